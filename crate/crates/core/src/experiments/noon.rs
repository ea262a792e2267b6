use std::f64::consts::TAU;
use std::sync::Arc;

use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::rank::rank_diagnostic;
use super::record::{Details, NoonDetails, ResultRecord, ScatterPoint, Summary, Timing};
use crate::error::{Error, Result};
use crate::fock::enumerate_fixed;
use crate::linalg::{rows_to_matrix, RMatrix};
use crate::metrics::{
    analytic_noon_metrics, matrix_metrics, noon_basis, noon_matrix_from_bloch, BlochVector, NoonState,
};
use crate::optics::{embed_density, haar_unitary, lift_unitary, pnr_distribution, DensityMatrix, ModeUnitary};
use crate::seed::{derive_seed, seeded_rng};
use crate::tomography::{project_physical, ridge_fit};

const METRICS: [&str; 3] = ["purity", "entropy", "negativity"];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NoonConfig {
    pub train_count: usize,
    pub test_count: usize,
    pub reservoir_count: usize,
    pub detector_count: usize,
    /// Replace the reservoir by the identity (direct photon counting).
    pub benchmark: bool,
    pub alpha: f64,
    /// Standardize features by their training-set spread before the fit.
    pub scale_features: bool,
    pub master_seed: u64,
}

impl Default for NoonConfig {
    fn default() -> Self {
        NoonConfig {
            train_count: 1500,
            test_count: 150,
            reservoir_count: 50,
            detector_count: 3,
            benchmark: false,
            alpha: crate::tomography::DEFAULT_ALPHA,
            scale_features: true,
            master_seed: 2024,
        }
    }
}

impl NoonConfig {
    pub fn validate(&self) -> Result<()> {
        if !(2..=3).contains(&self.detector_count) {
            return Err(Error::config("/detector_count", "must be 2 or 3"));
        }
        if self.train_count < 2 {
            return Err(Error::config("/train_count", "must be at least 2"));
        }
        if self.test_count == 0 {
            return Err(Error::config("/test_count", "must be positive"));
        }
        if self.reservoir_count == 0 {
            return Err(Error::config("/reservoir_count", "must be positive"));
        }
        if !(self.alpha >= 0.0 && self.alpha.is_finite()) {
            return Err(Error::config("/alpha", "must be finite and non-negative"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct NoonSample {
    pub state: NoonState,
    pub density: DensityMatrix,
}

/// Maps uniform draws `(n, γ, ϕ) ∈ [0, 1]³` to `n₁ = 1 − n`, `n₂ = n`,
/// `σ = γ√(n₁n₂)`, `φ = 2πϕ`.
pub fn noon_from_draw(n: f64, gamma: f64, varphi: f64) -> Result<NoonState> {
    for (name, v) in [("n", n), ("gamma", gamma), ("varphi", varphi)] {
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::InvalidArgument(format!("{name} = {v} is outside [0, 1]")));
        }
    }
    let (n1, n2) = (1.0 - n, n);
    NoonState::new(n1, n2, gamma * (n1 * n2).sqrt(), TAU * varphi)
}

pub fn gen_noon_dataset(count: usize, seed: u64) -> Result<Vec<NoonSample>> {
    if count == 0 {
        return Err(Error::InvalidArgument("dataset needs at least one state".into()));
    }
    let mut rng = seeded_rng(seed);
    (0..count)
        .map(|_| {
            let state = noon_from_draw(rng.random(), rng.random(), rng.random())?;
            Ok(NoonSample { state, density: state.density() })
        })
        .collect()
}

/// Training and test sets used by the NOON experiments.
pub fn noon_splits(cfg: &NoonConfig) -> Result<(Vec<NoonSample>, Vec<NoonSample>)> {
    Ok((
        gen_noon_dataset(cfg.train_count, derive_seed(cfg.master_seed, "noon-train", 0))?,
        gen_noon_dataset(cfg.test_count, derive_seed(cfg.master_seed, "noon-test", 0))?,
    ))
}

/// Exact two-photon PNR probabilities after the reservoir, with the state in
/// its first two modes; one feature per fixed-two outcome.
pub fn noon_features(states: &[NoonSample], reservoir: &ModeUnitary) -> Result<RMatrix> {
    let modes = reservoir.dim();
    if modes < 2 {
        return Err(Error::InvalidArgument("the reservoir needs at least two modes".into()));
    }
    let basis = Arc::new(enumerate_fixed(modes, 2)?);
    let lifted = lift_unitary(reservoir, &basis)?;
    let l = lifted.matrix();
    let l_dag = l.adjoint();
    let rows = states
        .iter()
        .map(|s| {
            let embedded = embed_density(&s.density, modes, &[0, 1])?;
            let out = DensityMatrix::new_unchecked(Arc::clone(&basis), l * embedded.matrix() * &l_dag)?;
            Ok(pnr_distribution(&out)?.into_probabilities())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(rows_to_matrix(&rows))
}

/// Predictions for every test state of one reservoir, for both routes.
struct ReservoirRun {
    via_density: Vec<[f64; 3]>,
    direct: Vec<[f64; 3]>,
    rank: usize,
}

struct Data {
    train: Vec<NoonSample>,
    test: Vec<NoonSample>,
    truth: Vec<[f64; 3]>,
}

fn metrics_of(samples: &[NoonSample]) -> Vec<[f64; 3]> {
    samples.iter().map(|s| analytic_noon_metrics(&s.state).to_array()).collect()
}

fn reservoir_of(cfg: &NoonConfig, index: usize) -> Result<ModeUnitary> {
    if cfg.benchmark {
        return Ok(ModeUnitary::identity(cfg.detector_count));
    }
    haar_unitary(cfg.detector_count, derive_seed(cfg.master_seed, "noon-reservoir", index as u64))
}

fn run_reservoir(cfg: &NoonConfig, data: &Data, index: usize) -> Result<ReservoirRun> {
    let reservoir = reservoir_of(cfg, index)?;
    let mut x_train = noon_features(&data.train, &reservoir)?;
    let mut x_test = noon_features(&data.test, &reservoir)?;
    let rank = rank_diagnostic(&x_train)?;
    if cfg.scale_features {
        (x_train, x_test) = super::scale_by_train_sd(&x_train, &x_test);
    }

    let bloch: Vec<Vec<f64>> = data.train.iter().map(|s| s.state.to_bloch().to_array().to_vec()).collect();
    let predicted = ridge_fit(&x_train, &rows_to_matrix(&bloch), cfg.alpha)?.predict_matrix(&x_test)?;
    let basis = noon_basis();
    let via_density = predicted
        .row_iter()
        .map(|row| {
            let a = BlochVector::from_slice(&row.iter().copied().collect::<Vec<_>>());
            let state = project_physical(&noon_matrix_from_bloch(&a), &basis)?.state;
            Ok(matrix_metrics(&state, 2)?.to_array())
        })
        .collect::<Result<Vec<_>>>()?;

    let targets: Vec<Vec<f64>> = metrics_of(&data.train).iter().map(|m| m.to_vec()).collect();
    let direct_pred = ridge_fit(&x_train, &rows_to_matrix(&targets), cfg.alpha)?.predict_matrix(&x_test)?;
    let direct = direct_pred.row_iter().map(|r| [r[0], r[1], r[2]]).collect();

    Ok(ReservoirRun { via_density, direct, rank })
}

fn rmse(pred: &[[f64; 3]], truth: &[[f64; 3]], k: usize) -> f64 {
    let sum: f64 = pred.iter().zip(truth).map(|(p, t)| (p[k] - t[k]).powi(2)).sum();
    (sum / truth.len() as f64).sqrt()
}

fn build_record(cfg: &NoonConfig, direct: bool) -> Result<ResultRecord> {
    cfg.validate()?;
    let clock = Timing::start();
    let (train, test) = noon_splits(cfg)?;
    let truth = metrics_of(&test);
    let data = Data { train, test, truth };
    // Every benchmark "realization" is the same identity map.
    let realizations = if cfg.benchmark { 1 } else { cfg.reservoir_count };
    let runs = (0..realizations).into_par_iter().map(|r| run_reservoir(cfg, &data, r)).collect::<Result<Vec<_>>>()?;
    let preds = |run: &ReservoirRun| if direct { run.direct.clone() } else { run.via_density.clone() };

    let per_metric: Vec<Vec<f64>> =
        (0..3).map(|k| runs.iter().map(|run| rmse(&preds(run), &data.truth, k)).collect()).collect();
    let mut scatter = Vec::with_capacity(3 * data.truth.len());
    for (k, name) in METRICS.iter().enumerate() {
        for (i, t) in data.truth.iter().enumerate() {
            let mean = runs.iter().map(|run| preds(run)[i][k]).sum::<f64>() / runs.len() as f64;
            scatter.push(ScatterPoint { metric: (*name).to_string(), truth: t[k], predicted: mean });
        }
    }
    let count = (runs.len() * data.truth.len()) as f64;
    let mean_abs_negativity = runs.iter().flat_map(preds).map(|p| p[2].abs()).sum::<f64>() / count;
    let details = NoonDetails {
        route: if direct { "direct" } else { "via_density" }.to_string(),
        detector_count: cfg.detector_count,
        benchmark: cfg.benchmark,
        feature_count: enumerate_fixed(cfg.detector_count, 2)?.len(),
        feature_rank: runs[0].rank,
        rmse_purity: Summary::of(&per_metric[0]),
        rmse_entropy: Summary::of(&per_metric[1]),
        rmse_negativity: Summary::of(&per_metric[2]),
        mean_abs_predicted_negativity: mean_abs_negativity,
        scatter,
    };
    let id = if direct { "noon_direct" } else { "noon" };
    Ok(ResultRecord::new(
        id,
        serde_json::to_value(cfg).map_err(|e| Error::InvalidArgument(e.to_string()))?,
        "rmse_negativity",
        per_metric[2].clone(),
        Details::Noon(details),
        Timing::finish(clock),
    ))
}

/// Reservoir features → Bloch vector → physical state → (P, S, N), with
/// RMSE against the closed forms averaged over reservoir realizations.
pub fn run_noon_experiment(cfg: &NoonConfig) -> Result<ResultRecord> {
    build_record(cfg, false)
}

/// Reservoir features regressed straight onto (P, S, N).
pub fn direct_feature_regression(cfg: &NoonConfig) -> Result<ResultRecord> {
    build_record(cfg, true)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn boundary_draws() {
        let s = noon_from_draw(0.0, 0.7, 0.3).unwrap();
        assert_eq!((s.n1, s.n2, s.sigma), (1.0, 0.0, 0.0));
        let s = noon_from_draw(0.5, 1.0, 0.0).unwrap();
        assert!((s.sigma - 0.5).abs() < 1e-15);
        assert_eq!(s.phi, 0.0);
        assert!(noon_from_draw(1.2, 0.0, 0.0).is_err());
    }

    #[test]
    fn draws_respect_the_coherence_bound() {
        let data = gen_noon_dataset(10_000, 1).unwrap();
        assert!(data.iter().all(|d| d.state.sigma.abs() <= (d.state.n1 * d.state.n2).sqrt()));
        assert!(data.iter().all(|d| d.density.is_physical()));
    }

    #[test]
    fn identity_detectors_only_see_populations() {
        let data = gen_noon_dataset(5, 2).unwrap();
        let x = noon_features(&data, &ModeUnitary::identity(2)).unwrap();
        for (row, d) in x.row_iter().zip(&data) {
            // Basis order [0,2], [1,1], [2,0].
            assert!((row[0] - d.state.n2).abs() < 1e-14);
            assert!(row[1].abs() < 1e-14);
            assert!((row[2] - d.state.n1).abs() < 1e-14);
        }
    }

    #[test]
    fn constant_targets_fit_exactly() {
        let data = gen_noon_dataset(30, 3).unwrap();
        let x = noon_features(&data, &haar_unitary(3, 1).unwrap()).unwrap();
        let y = RMatrix::from_element(30, 1, 0.25);
        let pred = ridge_fit(&x, &y, 1e-3).unwrap().predict_matrix(&x).unwrap();
        assert!(pred.iter().all(|p| (p - 0.25).abs() < 1e-12));
    }

    #[test]
    fn small_run_is_deterministic() {
        let cfg = NoonConfig { train_count: 60, test_count: 10, reservoir_count: 3, ..Default::default() };
        let a = run_noon_experiment(&cfg).unwrap();
        let b = run_noon_experiment(&cfg).unwrap();
        assert_eq!(a.per_split, b.per_split);
        assert_eq!(a.details, b.details);
        assert_eq!(a.per_split.len(), 3);
    }
}
