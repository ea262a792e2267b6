use serde::{Deserialize, Serialize};

use super::noon::{gen_noon_dataset, noon_features};
use super::record::{Details, RankDetails, ResultRecord, Timing};
use super::shots::Shots;
use super::tomography::{gen_mixed_state_dataset, reservoir_features};
use crate::error::{Error, Result};
use crate::fock::enumerate_up_to;
use crate::linalg::RMatrix;
use crate::optics::haar_unitary;
use crate::seed::derive_seed;
use crate::tomography::ParamStructure;

/// Singular values above `RANK_TOLERANCE · σ_max` count toward the rank.
pub const RANK_TOLERANCE: f64 = 1e-8;

/// Numerical rank of the samples × features matrix augmented with a
/// constant column.
pub fn rank_diagnostic(features: &RMatrix) -> Result<usize> {
    if features.nrows() < 2 {
        return Err(Error::InvalidArgument("rank diagnostic needs at least two samples".into()));
    }
    let mut aug = RMatrix::from_element(features.nrows(), features.ncols() + 1, 1.0);
    aug.view_mut((0, 0), features.shape()).copy_from(features);
    let sv = aug.singular_values();
    let max = sv.max();
    if max == 0.0 {
        return Ok(0);
    }
    Ok(sv.iter().filter(|&&s| s > RANK_TOLERANCE * max).count())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeatureSource {
    Noon,
    Tomography,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RankConfig {
    pub source: FeatureSource,
    pub samples: usize,
    /// Reservoir modes for NOON features.
    pub detector_count: usize,
    pub state_modes: usize,
    pub reservoir_modes: usize,
    pub master_seed: u64,
}

impl Default for RankConfig {
    fn default() -> Self {
        RankConfig {
            source: FeatureSource::Noon,
            samples: 200,
            detector_count: 3,
            state_modes: 2,
            reservoir_modes: 4,
            master_seed: 2024,
        }
    }
}

impl RankConfig {
    pub fn validate(&self) -> Result<()> {
        if self.samples < 2 {
            return Err(Error::config("/samples", "must be at least 2"));
        }
        match self.source {
            FeatureSource::Noon if !(2..=3).contains(&self.detector_count) => {
                Err(Error::config("/detector_count", "must be 2 or 3"))
            }
            FeatureSource::Tomography if !(2..=3).contains(&self.state_modes) => {
                Err(Error::config("/state_modes", "must be 2 or 3"))
            }
            FeatureSource::Tomography if self.reservoir_modes < self.state_modes => {
                Err(Error::config("/reservoir_modes", "must be at least state_modes"))
            }
            _ => Ok(()),
        }
    }
}

/// Rank of exact features for random inputs through one Haar reservoir.
pub fn run_rank_experiment(cfg: &RankConfig) -> Result<ResultRecord> {
    cfg.validate()?;
    let clock = Timing::start();
    let (features, param_count, source) = match cfg.source {
        FeatureSource::Noon => {
            let data = gen_noon_dataset(cfg.samples, derive_seed(cfg.master_seed, "noon-train", 0))?;
            let u = haar_unitary(cfg.detector_count, derive_seed(cfg.master_seed, "noon-reservoir", 0))?;
            (noon_features(&data, &u)?, 3, "noon")
        }
        FeatureSource::Tomography => {
            let data = gen_mixed_state_dataset(cfg.samples, cfg.state_modes, cfg.master_seed)?;
            let states: Vec<_> = data.into_iter().map(|s| s.state).collect();
            let u = haar_unitary(
                cfg.reservoir_modes,
                derive_seed(cfg.master_seed, "reservoir", cfg.reservoir_modes as u64),
            )?;
            let params =
                ParamStructure::photon_number_blocks(std::sync::Arc::new(enumerate_up_to(cfg.state_modes, 2)?))
                    .param_count();
            (reservoir_features(&states, &u, Shots::Exact, 0)?, params, "tomography")
        }
    };
    let rank = rank_diagnostic(&features)?;
    let details = RankDetails {
        source: source.to_string(),
        samples: cfg.samples,
        feature_count: features.ncols(),
        param_count,
        rank,
    };
    Ok(ResultRecord::new(
        "rank",
        serde_json::to_value(cfg).map_err(|e| Error::InvalidArgument(e.to_string()))?,
        "rank",
        vec![rank as f64],
        Details::Rank(details),
        Timing::finish(clock),
    ))
}
