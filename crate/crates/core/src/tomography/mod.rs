//! Trainable readout for single-basis state tomography: density-matrix
//! parameter packing, multi-output ridge regression, physicalization and
//! fidelity.

mod fidelity;
mod params;
mod physical;
mod ridge;

pub use fidelity::{fidelity, psd_sqrt, SQRT_EIGEN_DUST};
pub use params::{hermitize, pack_params, unpack_params, ParamStructure, Part, Slot, Unpacked};
pub use physical::{project_physical, Projection, DEGENERATE_MASS};
pub use ridge::{ridge_fit, RidgeModel, DEFAULT_ALPHA};
