//! Passive linear-optical evolution of pure and mixed multiphoton states.

mod density;
mod detection;
mod lift;
mod permanent;
mod unitary;

pub use density::{embed_density, evolve_density, partial_trace, DensityMatrix, EIGEN_TOL, HERMITIAN_TOL, TRACE_TOL};
pub use detection::{pnr_distribution, postselect, sample_counts, OutcomeDistribution};
pub use lift::{lift_unitary, output_amplitudes, FockOperator};
pub use permanent::{permanent, permanent_brute_force, MAX_PERMANENT_SIZE};
pub use unitary::{haar_unitary, perturb_unitary, ModeUnitary};
