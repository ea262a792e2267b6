use crate::error::{Error, Result};
use crate::linalg::{eigh, reassemble, CMatrix};
use crate::optics::DensityMatrix;

/// Eigenvalues down to this are treated as numerical zero when taking
/// matrix square roots; anything more negative is an input error.
pub const SQRT_EIGEN_DUST: f64 = 1e-10;

/// Square root of a positive-semidefinite Hermitian matrix. Eigenvalues
/// within rounding of zero (relative to the largest) are set to zero before
/// the root, so rank-deficient inputs keep their rank.
pub fn psd_sqrt(m: &CMatrix) -> Result<CMatrix> {
    let (values, vectors) = eigh(m);
    if let Some(&l) = values.iter().find(|&&l| l < -SQRT_EIGEN_DUST) {
        return Err(Error::Unphysical(format!("eigenvalue {l:e} below the square-root dust threshold")));
    }
    let scale = values.iter().fold(0.0f64, |a, &l| a.max(l.abs()));
    let floor = m.nrows() as f64 * f64::EPSILON * scale;
    Ok(reassemble(&values.map(|l| if l > floor { l.sqrt() } else { 0.0 }), &vectors))
}

/// Uhlmann fidelity `(Tr √(√ρa ρb √ρa))²`, clamped to [0, 1]. The trace is
/// taken as the nuclear norm of `√ρa √ρb`.
pub fn fidelity(rho_a: &DensityMatrix, rho_b: &DensityMatrix) -> Result<f64> {
    if rho_a.basis() != rho_b.basis() {
        return Err(Error::BasisMismatch("fidelity between states on different bases".into()));
    }
    rho_a.validate()?;
    rho_b.validate()?;
    let product = psd_sqrt(rho_a.matrix())? * psd_sqrt(rho_b.matrix())?;
    let tr: f64 = product.singular_values().iter().sum();
    Ok((tr * tr).clamp(0.0, 1.0))
}
