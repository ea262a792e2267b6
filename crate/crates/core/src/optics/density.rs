use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fock::{check_mode_set, enumerate_fixed, enumerate_up_to, split_occupation, FockBasis, Sector};
use crate::linalg::{eigvalsh, hermiticity_error, symmetrize, trace, CMatrix, C64};

use super::lift::lift_unitary;
use super::unitary::ModeUnitary;

pub const HERMITIAN_TOL: f64 = 1e-10;
pub const TRACE_TOL: f64 = 1e-8;
pub const EIGEN_TOL: f64 = 1e-8;

/// A Hermitian, positive-semidefinite, unit-trace matrix over an explicit
/// Fock basis.
#[derive(Clone, Debug)]
pub struct DensityMatrix {
    basis: Arc<FockBasis>,
    entries: CMatrix,
}

impl DensityMatrix {
    /// Validates the physical invariants.
    pub fn new(basis: Arc<FockBasis>, entries: CMatrix) -> Result<Self> {
        let rho = Self::new_unchecked(basis, entries)?;
        rho.validate()?;
        Ok(rho)
    }

    /// Checks only that the shape matches the basis.
    pub fn new_unchecked(basis: Arc<FockBasis>, entries: CMatrix) -> Result<Self> {
        let d = basis.len();
        if entries.shape() != (d, d) {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} matrix for a basis of {d} states",
                entries.nrows(),
                entries.ncols()
            )));
        }
        Ok(DensityMatrix { basis, entries })
    }

    /// `|ψ⟩⟨ψ|` for normalized amplitudes `psi` over `basis`.
    pub fn pure(basis: Arc<FockBasis>, psi: &[C64]) -> Result<Self> {
        if psi.len() != basis.len() {
            return Err(Error::DimensionMismatch(format!("{} amplitudes for {} states", psi.len(), basis.len())));
        }
        let d = psi.len();
        let entries = CMatrix::from_fn(d, d, |i, j| psi[i] * psi[j].conj());
        Self::new(basis, entries)
    }

    pub fn maximally_mixed(basis: Arc<FockBasis>) -> Self {
        let d = basis.len();
        let entries = CMatrix::identity(d, d) * C64::new(1.0 / d as f64, 0.0);
        DensityMatrix { basis, entries }
    }

    pub fn validate(&self) -> Result<()> {
        let herm = hermiticity_error(&self.entries);
        if !(herm <= HERMITIAN_TOL) {
            return Err(Error::Unphysical(format!("not Hermitian (deviation {herm:e})")));
        }
        let tr = trace(&self.entries);
        if !((tr.re - 1.0).abs() <= TRACE_TOL && tr.im.abs() <= TRACE_TOL) {
            return Err(Error::Unphysical(format!("trace {tr} differs from 1")));
        }
        let min_eig = self.min_eigenvalue();
        if !(min_eig >= -EIGEN_TOL) {
            return Err(Error::Unphysical(format!("negative eigenvalue {min_eig:e}")));
        }
        Ok(())
    }

    pub fn is_physical(&self) -> bool {
        self.validate().is_ok()
    }

    pub fn basis(&self) -> &Arc<FockBasis> {
        &self.basis
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.entries
    }

    pub fn into_matrix(self) -> CMatrix {
        self.entries
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn trace(&self) -> C64 {
        trace(&self.entries)
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        eigvalsh(&self.entries).iter().copied().collect()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        eigvalsh(&self.entries).iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// `Û ρ Û†` with `Û` the lift of `u` onto `rho`'s basis.
pub fn evolve_density(rho: &DensityMatrix, u: &ModeUnitary) -> Result<DensityMatrix> {
    let op = lift_unitary(u, rho.basis())?;
    let evolved = op.matrix() * rho.matrix() * op.matrix().adjoint();
    DensityMatrix::new_unchecked(Arc::clone(rho.basis()), symmetrize(&evolved))
}

/// Reduced state on `kept_modes` (in the given order). The result lives on
/// the up-to-n basis of the kept modes, n being the largest total photon
/// number of the input basis; keeping every mode in ascending order returns
/// the input unchanged.
pub fn partial_trace(rho: &DensityMatrix, kept_modes: &[usize]) -> Result<DensityMatrix> {
    if kept_modes.is_empty() {
        return Err(Error::EmptyModeSet);
    }
    let m = rho.basis().mode_count();
    check_mode_set(kept_modes, m)?;
    if kept_modes.len() == m && kept_modes.iter().enumerate().all(|(i, &k)| i == k) {
        return Ok(rho.clone());
    }
    let out_basis = Arc::new(enumerate_up_to(kept_modes.len(), rho.basis().max_photons())?);
    let split: Vec<_> = rho.basis().states().iter().map(|s| split_occupation(s, kept_modes)).collect::<Result<_>>()?;
    let kept_index: Vec<usize> =
        split.iter().map(|(a, _)| out_basis.index_of(a).expect("kept occupation within the reduced basis")).collect();
    let d = out_basis.len();
    let mut out = CMatrix::zeros(d, d);
    for (i, (_, bi)) in split.iter().enumerate() {
        for (j, (_, bj)) in split.iter().enumerate() {
            if bi == bj {
                out[(kept_index[i], kept_index[j])] += rho.matrix()[(i, j)];
            }
        }
    }
    DensityMatrix::new_unchecked(out_basis, out)
}

/// Places a state of k modes at `positions` of a `modes`-mode system whose
/// other modes are in vacuum. The output basis keeps the input's sector
/// kind (fixed-n stays fixed-n).
pub fn embed_density(rho: &DensityMatrix, modes: usize, positions: &[usize]) -> Result<DensityMatrix> {
    let basis = match rho.basis().sector() {
        Sector::Fixed(n) => enumerate_fixed(modes, n)?,
        Sector::UpTo(n) => enumerate_up_to(modes, n)?,
    };
    let basis = Arc::new(basis);
    let index: Vec<usize> = rho
        .basis()
        .states()
        .iter()
        .map(|s| {
            let e = s.embed(modes, positions)?;
            basis.index_of(&e).ok_or_else(|| Error::BasisMismatch(format!("{e} is outside the target basis")))
        })
        .collect::<Result<_>>()?;
    let d = basis.len();
    let mut out = CMatrix::zeros(d, d);
    for (i, &bi) in index.iter().enumerate() {
        for (j, &bj) in index.iter().enumerate() {
            out[(bi, bj)] = rho.matrix()[(i, j)];
        }
    }
    DensityMatrix::new_unchecked(basis, out)
}
