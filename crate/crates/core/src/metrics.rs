//! Purity, von Neumann entropy and negativity of reconstructed states, plus
//! the two-photon NOON family `n₁|2,0⟩⟨2,0| + n₂|0,2⟩⟨0,2| + σe^{iφ}|2,0⟩⟨0,2| + h.c.`
//! with its Bloch-vector parametrization and closed-form characteristics.

use std::f64::consts::{LN_2, TAU};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{enumerate_fixed, FockBasis, Occupation};
use crate::linalg::{eigvalsh, CMatrix, C64};
use crate::optics::DensityMatrix;

/// `Tr(ρ²)`.
pub fn purity(rho: &DensityMatrix) -> f64 {
    rho.matrix().iter().map(|z| z.norm_sqr()).sum()
}

/// `−Σ λ ln λ` over the spectrum, with `0 ln 0 = 0`.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    let s: f64 = eigvalsh(rho.matrix()).iter().filter(|&&l| l > 0.0).map(|&l| -l * l.ln()).sum();
    s.max(0.0)
}

/// Two-mode negativity with respect to the first mode: the summed magnitude
/// of the negative eigenvalues of the partial transpose, computed on the
/// product basis `{0..=cutoff} ⊗ {0..=cutoff}`.
pub fn negativity(rho: &DensityMatrix, local_cutoff: u32) -> Result<f64> {
    let basis = rho.basis();
    if basis.mode_count() != 2 {
        return Err(Error::InvalidArgument(format!(
            "negativity needs a two-mode state, got {} modes",
            basis.mode_count()
        )));
    }
    if let Some(s) = basis.states().iter().find(|s| s.counts().iter().any(|&n| n > local_cutoff)) {
        return Err(Error::InvalidArgument(format!("occupation {s} exceeds the local cutoff {local_cutoff}")));
    }
    let side = local_cutoff as usize + 1;
    let product_index = |s: &Occupation| s.counts()[0] as usize * side + s.counts()[1] as usize;
    let mut embedded = CMatrix::zeros(side * side, side * side);
    for (i, si) in basis.states().iter().enumerate() {
        for (j, sj) in basis.states().iter().enumerate() {
            embedded[(product_index(si), product_index(sj))] = rho.matrix()[(i, j)];
        }
    }
    // ⟨a,b|ρ^Γ|a',b'⟩ = ⟨a',b|ρ|a,b'⟩
    let transposed = CMatrix::from_fn(side * side, side * side, |r, c| {
        let (a, b) = (r / side, r % side);
        let (a2, b2) = (c / side, c % side);
        embedded[(a2 * side + b, a * side + b2)]
    });
    Ok(eigvalsh(&transposed).iter().map(|&eta| (eta.abs() - eta) / 2.0).sum())
}

/// Parameters of the two-photon NOON-family state.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoonState {
    pub n1: f64,
    pub n2: f64,
    pub sigma: f64,
    pub phi: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlochVector {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl BlochVector {
    pub fn norm(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn from_slice(v: &[f64]) -> Self {
        BlochVector { x: v[0], y: v[1], z: v[2] }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuantumMetrics {
    pub purity: f64,
    pub entropy: f64,
    pub negativity: f64,
}

impl QuantumMetrics {
    pub fn to_array(self) -> [f64; 3] {
        [self.purity, self.entropy, self.negativity]
    }
}

/// The two-mode, two-photon basis `[0,2], [1,1], [2,0]`.
pub fn noon_basis() -> Arc<FockBasis> {
    Arc::new(enumerate_fixed(2, 2).expect("two modes"))
}

const IDX_02: usize = 0;
const IDX_20: usize = 2;

impl NoonState {
    pub fn new(n1: f64, n2: f64, sigma: f64, phi: f64) -> Result<Self> {
        if !((n1 + n2 - 1.0).abs() <= 1e-12) || n1 < -1e-12 || n2 < -1e-12 {
            return Err(Error::InvalidArgument(format!("populations ({n1}, {n2}) must be non-negative and sum to 1")));
        }
        if !(sigma.abs() <= (n1 * n2).max(0.0).sqrt() + 1e-12) {
            return Err(Error::InvalidArgument(format!("|σ| = {} exceeds √(n₁n₂)", sigma.abs())));
        }
        Ok(NoonState { n1, n2, sigma, phi: phi.rem_euclid(TAU) })
    }

    /// Density matrix on [`noon_basis`].
    pub fn density(&self) -> DensityMatrix {
        DensityMatrix::new_unchecked(noon_basis(), noon_matrix(self.n1, self.n2, C64::from_polar(self.sigma, self.phi)))
            .expect("3x3 matrix on the three-state basis")
    }

    /// `(2σ cos φ, 2σ sin φ, n₁ − n₂)`.
    pub fn to_bloch(&self) -> BlochVector {
        BlochVector { x: 2.0 * self.sigma * self.phi.cos(), y: 2.0 * self.sigma * self.phi.sin(), z: self.n1 - self.n2 }
    }

    /// Inverse of [`NoonState::to_bloch`]; φ is taken as 0 when σ = 0.
    pub fn from_bloch(a: &BlochVector) -> Result<Self> {
        if !(a.norm() <= 1.0 + 1e-9) {
            return Err(Error::Unphysical(format!("Bloch vector length {} exceeds 1", a.norm())));
        }
        let sigma = 0.5 * a.x.hypot(a.y);
        let phi = if sigma == 0.0 { 0.0 } else { a.y.atan2(a.x).rem_euclid(TAU) };
        let n1 = 0.5 * (1.0 + a.z);
        Ok(NoonState { n1, n2: 1.0 - n1, sigma, phi })
    }

    /// `R = √((n₁ − n₂)² + 4σ²)`, the Bloch-vector length.
    pub fn bloch_radius(&self) -> f64 {
        ((self.n1 - self.n2).powi(2) + 4.0 * self.sigma * self.sigma).sqrt()
    }
}

fn noon_matrix(n1: f64, n2: f64, coherence: C64) -> CMatrix {
    let mut m = CMatrix::zeros(3, 3);
    m[(IDX_20, IDX_20)] = C64::new(n1, 0.0);
    m[(IDX_02, IDX_02)] = C64::new(n2, 0.0);
    m[(IDX_20, IDX_02)] = coherence;
    m[(IDX_02, IDX_20)] = coherence.conj();
    m
}

/// Matrix of the NOON-family state with Bloch vector `a`, without any
/// positivity check (`|a| > 1` gives an unphysical matrix).
pub fn noon_matrix_from_bloch(a: &BlochVector) -> CMatrix {
    noon_matrix(0.5 * (1.0 + a.z), 0.5 * (1.0 - a.z), C64::new(0.5 * a.x, 0.5 * a.y))
}

/// Closed-form entropy of a qubit-like state with Bloch radius `r`:
/// `ln 2 − ½ ln(1 − R²) + (R/2) ln((1 − R)/(1 + R))`.
pub fn entropy_from_radius(r: f64) -> f64 {
    let r = r.clamp(0.0, 1.0);
    if r == 0.0 {
        return LN_2;
    }
    if 1.0 - r < 1e-12 {
        return 0.0;
    }
    let s = LN_2 - 0.5 * ((1.0 - r) * (1.0 + r)).ln() + 0.5 * r * ((1.0 - r) / (1.0 + r)).ln();
    s.max(0.0)
}

/// `P = n₁² + n₂² + 2σ²`, `S(R)`, `N = |σ|`.
pub fn analytic_noon_metrics(state: &NoonState) -> QuantumMetrics {
    QuantumMetrics {
        purity: state.n1 * state.n1 + state.n2 * state.n2 + 2.0 * state.sigma * state.sigma,
        entropy: entropy_from_radius(state.bloch_radius()),
        negativity: state.sigma.abs(),
    }
}

/// Matrix-based purity, entropy and negativity of a two-mode state.
pub fn matrix_metrics(rho: &DensityMatrix, local_cutoff: u32) -> Result<QuantumMetrics> {
    Ok(QuantumMetrics {
        purity: purity(rho),
        entropy: von_neumann_entropy(rho),
        negativity: negativity(rho, local_cutoff)?,
    })
}
