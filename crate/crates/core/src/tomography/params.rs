use std::ops::Range;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::FockBasis;
use crate::linalg::{eigvalsh, CMatrix, C64};
use crate::optics::DensityMatrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Part {
    Real,
    Imag,
}

/// One real degree of freedom of a density matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Slot {
    pub row: usize,
    pub col: usize,
    pub part: Part,
}

/// Which matrix entries a tomography readout predicts.
///
/// Slots come in a fixed order: the real diagonal entries except the last
/// (which is fixed by the trace), then the real and imaginary parts of every
/// strictly-upper entry inside a declared block, row-major.
#[derive(Clone, Debug)]
pub struct ParamStructure {
    basis: Arc<FockBasis>,
    blocks: Vec<Range<usize>>,
    free_slots: Vec<Slot>,
}

impl ParamStructure {
    /// Every entry of the d×d matrix may be nonzero: d² − 1 parameters.
    pub fn dense(basis: Arc<FockBasis>) -> Self {
        let d = basis.len();
        Self::with_blocks(basis, std::iter::once(0..d).collect()).expect("one block covering the basis")
    }

    /// Block-diagonal structure with one block per photon-number sector.
    pub fn photon_number_blocks(basis: Arc<FockBasis>) -> Self {
        let blocks = basis.sector_ranges();
        Self::with_blocks(basis, blocks).expect("sector ranges tile the basis")
    }

    /// `blocks` must tile `0..d` contiguously and in order.
    pub fn with_blocks(basis: Arc<FockBasis>, blocks: Vec<Range<usize>>) -> Result<Self> {
        let d = basis.len();
        let mut next = 0;
        for b in &blocks {
            if b.start != next || b.end <= b.start {
                return Err(Error::InvalidArgument(format!("blocks must tile 0..{d} in order")));
            }
            next = b.end;
        }
        if next != d {
            return Err(Error::InvalidArgument(format!("blocks must tile 0..{d} in order")));
        }
        let mut free_slots: Vec<Slot> =
            (0..d.saturating_sub(1)).map(|i| Slot { row: i, col: i, part: Part::Real }).collect();
        for b in &blocks {
            for row in b.clone() {
                for col in row + 1..b.end {
                    free_slots.push(Slot { row, col, part: Part::Real });
                    free_slots.push(Slot { row, col, part: Part::Imag });
                }
            }
        }
        Ok(ParamStructure { basis, blocks, free_slots })
    }

    pub fn basis(&self) -> &Arc<FockBasis> {
        &self.basis
    }

    pub fn blocks(&self) -> &[Range<usize>] {
        &self.blocks
    }

    pub fn block_sizes(&self) -> Vec<usize> {
        self.blocks.iter().map(|b| b.len()).collect()
    }

    pub fn free_slots(&self) -> &[Slot] {
        &self.free_slots
    }

    pub fn param_count(&self) -> usize {
        self.free_slots.len()
    }

    /// Whether `(row, col)` lies inside a declared block.
    pub fn in_block(&self, row: usize, col: usize) -> bool {
        self.blocks.iter().any(|b| b.contains(&row) && b.contains(&col))
    }

    fn check_basis(&self, basis: &FockBasis) -> Result<()> {
        if *basis != *self.basis {
            return Err(Error::BasisMismatch("state basis differs from the parameter structure's".into()));
        }
        Ok(())
    }
}

/// Reads the free slots of `rho` into a real vector.
pub fn pack_params(rho: &DensityMatrix, structure: &ParamStructure) -> Result<Vec<f64>> {
    structure.check_basis(rho.basis())?;
    let m = rho.matrix();
    Ok(structure
        .free_slots
        .iter()
        .map(|s| match s.part {
            Part::Real => m[(s.row, s.col)].re,
            Part::Imag => m[(s.row, s.col)].im,
        })
        .collect())
}

/// Upper-triangular reshaping of a parameter vector with the last diagonal
/// entry completed from the trace. Positivity is not enforced.
#[derive(Clone, Debug)]
pub struct Unpacked {
    pub matrix: CMatrix,
    /// Whether the Hermitian completion is a valid density matrix.
    pub physical: bool,
}

pub fn unpack_params(params: &[f64], structure: &ParamStructure) -> Result<Unpacked> {
    if params.len() != structure.param_count() {
        return Err(Error::DimensionMismatch(format!(
            "{} parameters for a structure with {}",
            params.len(),
            structure.param_count()
        )));
    }
    let d = structure.basis.len();
    let mut m = CMatrix::zeros(d, d);
    for (s, &v) in structure.free_slots.iter().zip(params) {
        match s.part {
            Part::Real => m[(s.row, s.col)].re = v,
            Part::Imag => m[(s.row, s.col)].im = v,
        }
    }
    if d > 0 {
        let partial: f64 = (0..d - 1).map(|i| m[(i, i)].re).sum();
        m[(d - 1, d - 1)] = C64::new(1.0 - partial, 0.0);
    }
    let full = hermitize(&m)?;
    let physical = eigvalsh(&full).iter().all(|&l| l >= -crate::optics::EIGEN_TOL);
    Ok(Unpacked { matrix: m, physical })
}

/// `ρ̃ + ρ̃† − diag(ρ̃)`.
pub fn hermitize(rho_tilde: &CMatrix) -> Result<CMatrix> {
    if rho_tilde.nrows() != rho_tilde.ncols() {
        return Err(Error::NotSquare { rows: rho_tilde.nrows(), cols: rho_tilde.ncols() });
    }
    let diag = CMatrix::from_diagonal(&rho_tilde.diagonal());
    Ok(rho_tilde + rho_tilde.adjoint() - diag)
}
