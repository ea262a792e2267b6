use serde::{Deserialize, Serialize};

use crate::optics::ModeUnitary;

/// `(mean, sample standard deviation)`; the deviation is 0 for fewer than
/// two values.
pub fn mean_sd(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, var.sqrt())
}

/// Standard deviation of the mean.
pub fn standard_error(values: &[f64]) -> f64 {
    let (_, sd) = mean_sd(values);
    sd / (values.len() as f64).sqrt()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub mean: f64,
    pub sd: f64,
}

impl Summary {
    pub fn of(values: &[f64]) -> Self {
        let (mean, sd) = mean_sd(values);
        Summary { mean, sd }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub started_unix_ms: u64,
    pub elapsed_seconds: f64,
}

impl Timing {
    pub(crate) fn start() -> (std::time::Instant, u64) {
        let now = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_millis() as u64)
            .unwrap_or(0);
        (std::time::Instant::now(), now)
    }

    pub(crate) fn finish(start: (std::time::Instant, u64)) -> Self {
        Timing { started_unix_ms: start.1, elapsed_seconds: start.0.elapsed().as_secs_f64() }
    }
}

/// One experiment's outcome: a per-unit metric (split, reservoir or
/// realization), its summary, and experiment-specific detail.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub experiment: String,
    pub config: serde_json::Value,
    pub metric: String,
    pub per_split: Vec<f64>,
    pub mean: f64,
    pub sd: f64,
    pub details: Details,
    pub timing: Timing,
}

impl ResultRecord {
    pub(crate) fn new(
        experiment: &str,
        config: serde_json::Value,
        metric: &str,
        per_split: Vec<f64>,
        details: Details,
        timing: Timing,
    ) -> Self {
        let (mean, sd) = mean_sd(&per_split);
        ResultRecord {
            experiment: experiment.to_string(),
            config,
            metric: metric.to_string(),
            per_split,
            mean,
            sd,
            details,
            timing,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub x: f64,
    pub mean: f64,
    pub sd: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Details {
    Tomography(TomographyDetails),
    Noon(NoonDetails),
    Spiral(SpiralDetails),
    Rank(RankDetails),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TomographyDetails {
    pub use_reservoir: bool,
    pub state_modes: usize,
    pub reservoir_modes: usize,
    /// Size of the up-to-n outcome space (the feature vector length).
    pub outcome_count: usize,
    /// Size of the fixed-n outcome space at the injected photon number.
    pub fixed_outcome_count: usize,
    pub param_count: usize,
    pub feature_rank: usize,
    /// Mean modulus of the in-block off-diagonal entries of the predicted
    /// and the true test states at the configured training size.
    pub mean_offdiag_predicted: f64,
    pub mean_offdiag_true: f64,
    /// Projections that fell back to the maximally mixed state.
    pub degenerate_projections: usize,
    /// Mean test fidelity against the number of training states.
    pub learning_curve: Vec<CurvePoint>,
    pub reservoir: ModeUnitary,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScatterPoint {
    pub metric: String,
    pub truth: f64,
    pub predicted: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoonDetails {
    pub route: String,
    pub detector_count: usize,
    pub benchmark: bool,
    pub feature_count: usize,
    pub feature_rank: usize,
    pub rmse_purity: Summary,
    pub rmse_entropy: Summary,
    pub rmse_negativity: Summary,
    /// Mean |predicted negativity| over test states and reservoirs.
    pub mean_abs_predicted_negativity: f64,
    /// Per test state, the prediction averaged over reservoirs.
    pub scatter: Vec<ScatterPoint>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpiralDetails {
    /// Accuracy on the mismatched hardware unitary against training ε
    /// (mean and standard deviation of the mean over realizations).
    pub accuracy_vs_epsilon: Vec<CurvePoint>,
    pub per_realization: Vec<Vec<f64>>,
    pub best_epsilon: f64,
    /// ε = 0 model tested on the ideal reservoir.
    pub clean_accuracy: Summary,
    pub clean_per_realization: Vec<f64>,
    pub classical_accuracy: Summary,
    pub classical_per_realization: Vec<f64>,
    pub quantum_feature_count: usize,
    pub classical_feature_count: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RankDetails {
    pub source: String,
    pub samples: usize,
    pub feature_count: usize,
    pub param_count: usize,
    pub rank: usize,
}
