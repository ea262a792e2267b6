use std::sync::Arc;

use rand_distr::{Binomial, Distribution};

use crate::error::{Error, Result};
use crate::fock::{FockBasis, Occupation};
use crate::seed::seeded_rng;

use super::density::DensityMatrix;

/// Diagonal entries below this are rejected as unphysical; entries between
/// it and zero are clipped.
pub const DIAGONAL_DUST: f64 = 1e-12;
pub const EMPTY_POSTSELECTION: f64 = 1e-12;

/// Photon-number-resolved outcome probabilities, one per basis state.
#[derive(Clone, Debug, PartialEq)]
pub struct OutcomeDistribution {
    basis: Arc<FockBasis>,
    probabilities: Vec<f64>,
}

impl OutcomeDistribution {
    pub fn new(basis: Arc<FockBasis>, probabilities: Vec<f64>) -> Result<Self> {
        if probabilities.len() != basis.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} probabilities for {} outcomes",
                probabilities.len(),
                basis.len()
            )));
        }
        if let Some(p) = probabilities.iter().find(|p| !(**p >= 0.0 && **p <= 1.0 + 1e-9)) {
            return Err(Error::Unphysical(format!("probability {p} outside [0, 1]")));
        }
        Ok(OutcomeDistribution { basis, probabilities })
    }

    pub fn basis(&self) -> &Arc<FockBasis> {
        &self.basis
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn into_probabilities(self) -> Vec<f64> {
        self.probabilities
    }

    pub fn probability(&self, occ: &Occupation) -> Option<f64> {
        self.basis.index_of(occ).map(|k| self.probabilities[k])
    }

    pub fn total(&self) -> f64 {
        self.probabilities.iter().sum()
    }
}

/// Outcome probabilities of an ideal PNR measurement: the Fock-basis
/// diagonal of `rho`.
pub fn pnr_distribution(rho: &DensityMatrix) -> Result<OutcomeDistribution> {
    let probabilities = rho
        .matrix()
        .diagonal()
        .iter()
        .map(|z| {
            if z.re < -DIAGONAL_DUST {
                Err(Error::Unphysical(format!("negative population {}", z.re)))
            } else {
                Ok(z.re.max(0.0))
            }
        })
        .collect::<Result<Vec<_>>>()?;
    OutcomeDistribution::new(Arc::clone(rho.basis()), probabilities)
}

/// Keeps only outcomes with exactly `total_photons` detected and
/// renormalizes.
pub fn postselect(dist: &OutcomeDistribution, total_photons: u32) -> Result<OutcomeDistribution> {
    let keep: Vec<bool> = dist.basis.states().iter().map(|s| s.total() == total_photons).collect();
    let retained: f64 = dist.probabilities.iter().zip(&keep).filter(|(_, &k)| k).map(|(p, _)| p).sum();
    if !(retained >= EMPTY_POSTSELECTION) {
        return Err(Error::EmptyPostselection { total: total_photons, retained });
    }
    let probabilities =
        dist.probabilities.iter().zip(&keep).map(|(p, &k)| if k { p / retained } else { 0.0 }).collect();
    Ok(OutcomeDistribution { basis: Arc::clone(&dist.basis), probabilities })
}

/// Empirical frequencies of `shots` multinomial draws from `dist`, sampled
/// as a chain of conditional binomials.
pub fn sample_counts(dist: &OutcomeDistribution, shots: u64, seed: u64) -> Result<OutcomeDistribution> {
    if shots == 0 {
        return Err(Error::InvalidArgument("shots must be at least 1".into()));
    }
    let mut rng = seeded_rng(seed);
    let norm = dist.total();
    let mut remaining_shots = shots;
    let mut remaining_mass = 1.0;
    let mut counts = vec![0u64; dist.probabilities.len()];
    for (k, &p) in dist.probabilities.iter().enumerate() {
        if remaining_shots == 0 {
            break;
        }
        let p = p / norm;
        let c = if remaining_mass <= p || k + 1 == counts.len() {
            remaining_shots
        } else if p <= 0.0 {
            0
        } else {
            let q = (p / remaining_mass).clamp(0.0, 1.0);
            Binomial::new(remaining_shots, q).map_err(|e| Error::InvalidArgument(e.to_string()))?.sample(&mut rng)
        };
        counts[k] = c;
        remaining_shots -= c;
        remaining_mass -= p;
    }
    let probabilities = counts.iter().map(|&c| c as f64 / shots as f64).collect();
    Ok(OutcomeDistribution { basis: Arc::clone(&dist.basis), probabilities })
}
