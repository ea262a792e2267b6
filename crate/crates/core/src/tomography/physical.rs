use std::sync::Arc;

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::fock::FockBasis;
use crate::linalg::{eigh, hermiticity_error, reassemble, symmetrize, CMatrix};
use crate::optics::DensityMatrix;

/// Input hermiticity accepted by [`project_physical`].
pub const HERMITIAN_INPUT_TOL: f64 = 1e-8;
/// Below this total positive spectral mass the projection falls back to the
/// maximally mixed state.
pub const DEGENERATE_MASS: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct Projection {
    pub state: DensityMatrix,
    /// Set when the input had no usable positive spectrum.
    pub degenerate: bool,
}

/// Nearest-spectrum physical state: eigendecompose, clip negative
/// eigenvalues to zero, renormalize the spectrum to sum one, and rebuild
/// with the original eigenvectors.
pub fn project_physical(rho_h: &CMatrix, basis: &Arc<FockBasis>) -> Result<Projection> {
    if rho_h.nrows() != rho_h.ncols() {
        return Err(Error::NotSquare { rows: rho_h.nrows(), cols: rho_h.ncols() });
    }
    if rho_h.nrows() != basis.len() {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} matrix for {} states",
            rho_h.nrows(),
            rho_h.ncols(),
            basis.len()
        )));
    }
    let herm = hermiticity_error(rho_h);
    if !(herm <= HERMITIAN_INPUT_TOL) {
        return Err(Error::InvalidArgument(format!("input is not Hermitian (deviation {herm:e})")));
    }
    let (values, vectors) = eigh(rho_h);
    let clipped: DVector<f64> = values.map(|l| l.max(0.0));
    let mass: f64 = clipped.sum();
    if !(mass >= DEGENERATE_MASS) {
        return Ok(Projection { state: DensityMatrix::maximally_mixed(Arc::clone(basis)), degenerate: true });
    }
    let spectrum = clipped / mass;
    let rebuilt = symmetrize(&reassemble(&spectrum, &vectors));
    Ok(Projection { state: DensityMatrix::new_unchecked(Arc::clone(basis), rebuilt)?, degenerate: false })
}
