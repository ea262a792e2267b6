//! Simulation and learning toolkit for photonic quantum reservoir processing.
//!
//! Multimode Fock states are evolved through linear-optical unitaries, read
//! out with photon-number-resolving statistics, and fed to linear readouts
//! that reconstruct density matrices, estimate purity, entropy and
//! negativity, or classify classical data.
//!
//! Module map:
//!
//! - [`fock`]: occupation vectors and canonically ordered Fock bases.
//! - [`optics`]: mode unitaries, permanents, Fock-space lifting, density
//!   evolution, partial traces and detection statistics.
//! - [`tomography`]: parameter packing, ridge readout, physicalization and
//!   fidelity.
//! - [`metrics`]: purity, von Neumann entropy, negativity and the NOON-family
//!   closed forms.
//! - [`experiments`]: the seeded end-to-end studies.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod experiments;
pub mod fock;
pub mod linalg;
pub mod metrics;
pub mod optics;
pub mod seed;
pub mod tomography;

pub use error::{Error, Result};
pub use fock::{enumerate_fixed, enumerate_up_to, split_occupation, FockBasis, Occupation, Sector};
pub use optics::{DensityMatrix, ModeUnitary, OutcomeDistribution};
pub use tomography::{ParamStructure, RidgeModel};
