use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::linalg::{unitarity_error, CMatrix, C64};
use crate::seed::seeded_rng;

/// Tolerance on `‖U†U − I‖_max` accepted by [`ModeUnitary::new`].
pub const UNITARITY_TOL: f64 = 1e-10;

/// An m×m unitary acting on optical modes: `a_j† → Σᵢ U[i,j] aᵢ†`.
#[derive(Clone, Debug, PartialEq)]
pub struct ModeUnitary {
    matrix: CMatrix,
}

impl ModeUnitary {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::NotSquare { rows: matrix.nrows(), cols: matrix.ncols() });
        }
        if matrix.nrows() == 0 {
            return Err(Error::ZeroModes);
        }
        let err = unitarity_error(&matrix);
        if !(err <= UNITARITY_TOL) {
            return Err(Error::InvalidArgument(format!("matrix is not unitary (‖U†U − I‖ = {err:e})")));
        }
        Ok(ModeUnitary { matrix })
    }

    pub fn identity(dim: usize) -> Self {
        ModeUnitary { matrix: CMatrix::identity(dim, dim) }
    }

    /// Symmetric 50/50 beamsplitter `[[1, 1], [1, −1]]/√2`.
    pub fn balanced_beamsplitter() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let m =
            CMatrix::from_row_slice(2, 2, &[C64::new(h, 0.0), C64::new(h, 0.0), C64::new(h, 0.0), C64::new(-h, 0.0)]);
        ModeUnitary { matrix: m }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    /// Matrix product `self · other`: `other` acts first.
    pub fn then_after(&self, other: &ModeUnitary) -> Result<ModeUnitary> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch(format!("{} vs {} modes", self.dim(), other.dim())));
        }
        Ok(ModeUnitary { matrix: &self.matrix * &other.matrix })
    }

    /// Block-diagonal `self ⊕ other`.
    pub fn direct_sum(&self, other: &ModeUnitary) -> ModeUnitary {
        let (a, b) = (self.dim(), other.dim());
        let mut m = CMatrix::zeros(a + b, a + b);
        m.view_mut((0, 0), (a, a)).copy_from(&self.matrix);
        m.view_mut((a, a), (b, b)).copy_from(&other.matrix);
        ModeUnitary { matrix: m }
    }

    /// Acts with `self` on `positions` of a `modes`-mode system and as the
    /// identity on all other modes.
    pub fn embed(&self, modes: usize, positions: &[usize]) -> Result<ModeUnitary> {
        if positions.len() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "{} positions for a {}-mode unitary",
                positions.len(),
                self.dim()
            )));
        }
        crate::fock::check_mode_set(positions, modes)?;
        let mut m = CMatrix::identity(modes, modes);
        for (a, &pa) in positions.iter().enumerate() {
            for (b, &pb) in positions.iter().enumerate() {
                m[(pa, pb)] = self.matrix[(a, b)];
            }
        }
        Ok(ModeUnitary { matrix: m })
    }
}

fn complex_gaussian(dim: usize, rng: &mut impl rand::Rng) -> CMatrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    CMatrix::from_fn(dim, dim, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        C64::new(re * s, im * s)
    })
}

/// Haar-random unitary: QR of a complex Ginibre matrix with the phases of
/// R's diagonal moved into Q.
pub fn haar_unitary(dim: usize, seed: u64) -> Result<ModeUnitary> {
    if dim == 0 {
        return Err(Error::ZeroModes);
    }
    let mut rng = seeded_rng(seed);
    let z = complex_gaussian(dim, &mut rng);
    let qr = z.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..dim {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { C64::new(1.0, 0.0) };
        let mut col = q.column_mut(j);
        col *= phase;
    }
    Ok(ModeUnitary { matrix: q })
}

/// Shifts the real and imaginary part of every entry by an independent
/// N(0, ε²) draw, then returns the nearest unitary (polar factor).
/// `epsilon == 0` returns `u` unchanged.
pub fn perturb_unitary(u: &ModeUnitary, epsilon: f64, seed: u64) -> Result<ModeUnitary> {
    if !(epsilon >= 0.0) || !epsilon.is_finite() {
        return Err(Error::InvalidArgument(format!("epsilon must be finite and non-negative, got {epsilon}")));
    }
    if epsilon == 0.0 {
        return Ok(u.clone());
    }
    let mut rng = seeded_rng(seed);
    let noise = complex_gaussian(u.dim(), &mut rng) * C64::new(epsilon * std::f64::consts::SQRT_2, 0.0);
    Ok(ModeUnitary { matrix: nearest_unitary(&(u.matrix() + noise)) })
}

/// Unitary polar factor `W V†` of `M = W Σ V†`.
pub(crate) fn nearest_unitary(m: &CMatrix) -> CMatrix {
    let svd = m.clone().svd(true, true);
    let w = svd.u.expect("svd computed with u");
    let v_t = svd.v_t.expect("svd computed with v_t");
    w * v_t
}

#[derive(Serialize, Deserialize)]
struct UnitaryDoc {
    dim: usize,
    re: Vec<Vec<f64>>,
    im: Vec<Vec<f64>>,
}

impl Serialize for ModeUnitary {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let n = self.dim();
        let doc = UnitaryDoc {
            dim: n,
            re: (0..n).map(|i| (0..n).map(|j| self.matrix[(i, j)].re).collect()).collect(),
            im: (0..n).map(|i| (0..n).map(|j| self.matrix[(i, j)].im).collect()).collect(),
        };
        doc.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ModeUnitary {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let doc = UnitaryDoc::deserialize(deserializer)?;
        let n = doc.dim;
        let shape_ok = |rows: &Vec<Vec<f64>>| rows.len() == n && rows.iter().all(|r| r.len() == n);
        if !shape_ok(&doc.re) || !shape_ok(&doc.im) {
            return Err(D::Error::custom(format!("re/im must both be {n}x{n}")));
        }
        let m = CMatrix::from_fn(n, n, |i, j| C64::new(doc.re[i][j], doc.im[i][j]));
        ModeUnitary::new(m).map_err(D::Error::custom)
    }
}
