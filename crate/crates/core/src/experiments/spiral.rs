use std::f64::consts::PI;
use std::sync::OnceLock;

use rand::Rng as _;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::readout::LogisticReadout;
use super::record::{standard_error, CurvePoint, Details, ResultRecord, SpiralDetails, Summary, Timing};
use crate::error::{Error, Result};
use crate::fock::{enumerate_up_to, FockBasis};
use crate::linalg::{CMatrix, C64, ZERO};
use crate::optics::{haar_unitary, perturb_unitary, ModeUnitary};
use crate::seed::{derive_seed, seeded_rng};

/// Modes carrying the encoded photon pair; one photon enters each rail pair.
const ENCODING_MODES: usize = 4;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpiralConfig {
    pub points_per_class: usize,
    pub test_points_per_class: usize,
    pub noise_sd: f64,
    pub epsilon: f64,
    pub epochs: usize,
    pub learning_rate: f64,
    pub hardware_epsilon: f64,
    pub reservoir_realizations: usize,
    /// Training amplitudes compared against each other in the full run.
    pub epsilon_sweep: Vec<f64>,
    pub master_seed: u64,
}

impl Default for SpiralConfig {
    fn default() -> Self {
        SpiralConfig {
            points_per_class: 200,
            test_points_per_class: 200,
            noise_sd: 0.02,
            epsilon: 0.075,
            epochs: 1000,
            learning_rate: 1.0,
            hardware_epsilon: 0.075,
            reservoir_realizations: 10,
            epsilon_sweep: vec![0.0, 0.025, 0.05, 0.075, 0.1, 0.15],
            master_seed: 2024,
        }
    }
}

impl SpiralConfig {
    pub fn validate(&self) -> Result<()> {
        if self.points_per_class == 0 {
            return Err(Error::config("/points_per_class", "must be positive"));
        }
        if self.test_points_per_class == 0 {
            return Err(Error::config("/test_points_per_class", "must be positive"));
        }
        if !(self.noise_sd >= 0.0 && self.noise_sd.is_finite()) {
            return Err(Error::config("/noise_sd", "must be finite and non-negative"));
        }
        if !(self.epsilon >= 0.0 && self.epsilon.is_finite()) {
            return Err(Error::config("/epsilon", "must be finite and non-negative"));
        }
        if !(self.hardware_epsilon >= 0.0 && self.hardware_epsilon.is_finite()) {
            return Err(Error::config("/hardware_epsilon", "must be finite and non-negative"));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::config("/learning_rate", "must be positive"));
        }
        if self.reservoir_realizations == 0 {
            return Err(Error::config("/reservoir_realizations", "must be positive"));
        }
        if self.epsilon_sweep.is_empty() {
            return Err(Error::config("/epsilon_sweep", "must not be empty"));
        }
        for (i, e) in self.epsilon_sweep.iter().enumerate() {
            if !(*e >= 0.0 && e.is_finite()) {
                return Err(Error::config(&format!("/epsilon_sweep/{i}"), "must be finite and non-negative"));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpiralPoint {
    pub x: f64,
    pub y: f64,
    pub label: u8,
}

/// Two interleaved Archimedean arms over one and a half turns, class 1 being
/// class 0 rotated by π, with isotropic Gaussian noise. Coordinates are
/// clamped to the unit square.
pub fn spiral_dataset(points_per_class: usize, noise_sd: f64, seed: u64) -> Result<Vec<SpiralPoint>> {
    if points_per_class == 0 {
        return Err(Error::InvalidArgument("points_per_class must be positive".into()));
    }
    let noise = Normal::new(0.0, noise_sd).map_err(|e| Error::InvalidArgument(format!("noise_sd: {e}")))?;
    let mut rng = seeded_rng(seed);
    let mut points = Vec::with_capacity(2 * points_per_class);
    for label in 0..2u8 {
        let sign = if label == 0 { 1.0 } else { -1.0 };
        for _ in 0..points_per_class {
            let t: f64 = rng.random_range(0.0..=3.0 * PI);
            let r = t / (3.0 * PI);
            let x = sign * r * t.cos() + noise.sample(&mut rng);
            let y = sign * r * t.sin() + noise.sample(&mut rng);
            points.push(SpiralPoint { x: x.clamp(-1.0, 1.0), y: y.clamp(-1.0, 1.0), label });
        }
    }
    Ok(points)
}

/// Rail-pair block `diag(e^{iφ}, 1) · R(θ/2)` with `R` a real rotation.
fn rail_block(theta: f64, phi: f64) -> [[C64; 2]; 2] {
    let (s, c) = (theta / 2.0).sin_cos();
    let p = C64::from_polar(1.0, phi);
    [[p * c, -p * s], [C64::new(s, 0.0), C64::new(c, 0.0)]]
}

fn check_coordinate(v: f64, name: &str) -> Result<()> {
    if !(-1.0..=1.0).contains(&v) {
        return Err(Error::InvalidArgument(format!("{name} = {v} is outside [-1, 1]")));
    }
    Ok(())
}

fn encoding_angles(x: f64, y: f64) -> [(f64, f64); 2] {
    [(PI * (x + 1.0) / 2.0, PI * (y + 1.0)), (PI * (y + 1.0) / 2.0, PI * (x + 1.0))]
}

/// Dual-rail encoding of a point: rail pair (0, 1) gets θ₁ = π(x+1)/2,
/// φ₁ = π(y+1); pair (2, 3) gets θ₂ = π(y+1)/2, φ₂ = π(x+1).
pub fn encode_point(x: f64, y: f64) -> Result<ModeUnitary> {
    check_coordinate(x, "x")?;
    check_coordinate(y, "y")?;
    let mut m = CMatrix::zeros(ENCODING_MODES, ENCODING_MODES);
    for (pair, (theta, phi)) in encoding_angles(x, y).into_iter().enumerate() {
        let b = rail_block(theta, phi);
        for r in 0..2 {
            for c in 0..2 {
                m[(2 * pair + r, 2 * pair + c)] = b[r][c];
            }
        }
    }
    ModeUnitary::new(m)
}

/// Columns of the encoding unitary hit by the two input photons.
fn encoded_columns(p: &SpiralPoint) -> Result<[[C64; 4]; 2]> {
    check_coordinate(p.x, "x")?;
    check_coordinate(p.y, "y")?;
    let [(t1, f1), (t2, f2)] = encoding_angles(p.x, p.y);
    let b1 = rail_block(t1, f1);
    let b2 = rail_block(t2, f2);
    Ok([[b1[0][0], b1[1][0], ZERO, ZERO], [ZERO, ZERO, b2[0][0], b2[1][0]]])
}

fn feature_basis() -> &'static FockBasis {
    static BASIS: OnceLock<FockBasis> = OnceLock::new();
    BASIS.get_or_init(|| enumerate_up_to(ENCODING_MODES, 2).expect("four-mode basis"))
}

fn apply(u: &CMatrix, v: &[C64; 4]) -> [C64; 4] {
    let mut out = [ZERO; 4];
    for (i, o) in out.iter_mut().enumerate() {
        *o = (0..4).map(|k| u[(i, k)] * v[k]).sum();
    }
    out
}

/// Two-photon PNR probabilities over the up-to-two outcome space given the
/// single-photon output columns `a` and `b`; amplitudes are 2×2 permanents.
fn pair_probabilities(a: &[C64; 4], b: &[C64; 4]) -> Vec<f64> {
    feature_basis()
        .states()
        .iter()
        .map(|occ| {
            if occ.total() != 2 {
                return 0.0;
            }
            let modes = occ.mode_list();
            let (i, j) = (modes[0], modes[1]);
            let amp = (a[i] * b[j] + a[j] * b[i]) / occ.factorial_product().sqrt();
            amp.norm_sqr()
        })
        .collect()
}

/// Exact PNR features of `|1,0,1,0⟩` after the encoding and the reservoir.
pub fn quantum_features(reservoir: &ModeUnitary, point: &SpiralPoint) -> Result<Vec<f64>> {
    check_reservoir(reservoir)?;
    let [c0, c2] = encoded_columns(point)?;
    Ok(pair_probabilities(&apply(reservoir.matrix(), &c0), &apply(reservoir.matrix(), &c2)))
}

/// Mean output intensities for the coherent input `(1, 0, 1, 0)/√2`.
pub fn classical_features(reservoir: &ModeUnitary, point: &SpiralPoint) -> Result<Vec<f64>> {
    check_reservoir(reservoir)?;
    let [c0, c2] = encoded_columns(point)?;
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let field: [C64; 4] = std::array::from_fn(|k| (c0[k] + c2[k]) * s);
    Ok(apply(reservoir.matrix(), &field).iter().map(|a| a.norm_sqr()).collect())
}

fn check_reservoir(u: &ModeUnitary) -> Result<()> {
    if u.dim() != ENCODING_MODES {
        return Err(Error::DimensionMismatch(format!(
            "reservoir has {} modes, encoding uses {ENCODING_MODES}",
            u.dim()
        )));
    }
    Ok(())
}

fn features_of(points: &[SpiralPoint], f: impl Fn(&SpiralPoint) -> Result<Vec<f64>> + Sync) -> Result<Vec<Vec<f64>>> {
    points.iter().map(f).collect()
}

fn labels(points: &[SpiralPoint]) -> Vec<u8> {
    points.iter().map(|p| p.label).collect()
}

/// Training and test points for `cfg.master_seed`.
pub fn spiral_splits(cfg: &SpiralConfig) -> Result<(Vec<SpiralPoint>, Vec<SpiralPoint>)> {
    Ok((train_set(cfg)?, test_set(cfg)?))
}

/// Config of one reservoir realization in [`run_spiral_experiment`]; its
/// seed fixes the datasets, the reservoir and the hardware mismatch.
pub fn realization_config(cfg: &SpiralConfig, index: usize) -> SpiralConfig {
    SpiralConfig { master_seed: derive_seed(cfg.master_seed, "realization", index as u64), ..cfg.clone() }
}

fn train_set(cfg: &SpiralConfig) -> Result<Vec<SpiralPoint>> {
    spiral_dataset(cfg.points_per_class, cfg.noise_sd, derive_seed(cfg.master_seed, "spiral-train", 0))
}

fn test_set(cfg: &SpiralConfig) -> Result<Vec<SpiralPoint>> {
    spiral_dataset(cfg.test_points_per_class, cfg.noise_sd, derive_seed(cfg.master_seed, "spiral-test", 0))
}

/// Trains the readout on PNR features. With `epsilon > 0` every sample at
/// every epoch sees its own freshly perturbed reservoir; standardization is
/// fixed from the unperturbed features.
pub fn train_spiral(cfg: &SpiralConfig, reservoir: &ModeUnitary) -> Result<LogisticReadout> {
    cfg.validate()?;
    check_reservoir(reservoir)?;
    let points = train_set(cfg)?;
    let y = labels(&points);
    let columns = points.iter().map(encoded_columns).collect::<Result<Vec<_>>>()?;
    let clean = features_of(&points, |p| quantum_features(reservoir, p))?;
    let mut model = LogisticReadout::standardized(&clean)?;
    for epoch in 0..cfg.epochs {
        if cfg.epsilon == 0.0 {
            model.step(&clean, &y, cfg.learning_rate)?;
            continue;
        }
        let base = (epoch * points.len()) as u64;
        let noisy = columns
            .iter()
            .enumerate()
            .map(|(i, [c0, c2])| {
                let u =
                    perturb_unitary(reservoir, cfg.epsilon, derive_seed(cfg.master_seed, "perturb", base + i as u64))?;
                Ok(pair_probabilities(&apply(u.matrix(), c0), &apply(u.matrix(), c2)))
            })
            .collect::<Result<Vec<_>>>()?;
        model.step(&noisy, &y, cfg.learning_rate)?;
    }
    Ok(model)
}

/// Accuracy on the held-out spiral set with features taken through `hardware`.
pub fn evaluate_spiral(model: &LogisticReadout, cfg: &SpiralConfig, hardware: &ModeUnitary) -> Result<f64> {
    let points = test_set(cfg)?;
    let x = features_of(&points, |p| quantum_features(hardware, p))?;
    Ok(model.accuracy(&x, &labels(&points)))
}

/// Coherent-input, intensity-detection analogue of the same pipeline,
/// trained without perturbation and tested on the unperturbed reservoir.
pub fn classical_baseline(cfg: &SpiralConfig, reservoir: &ModeUnitary) -> Result<f64> {
    cfg.validate()?;
    let points = train_set(cfg)?;
    let x = features_of(&points, |p| classical_features(reservoir, p))?;
    let y = labels(&points);
    let mut model = LogisticReadout::standardized(&x)?;
    for _ in 0..cfg.epochs {
        model.step(&x, &y, cfg.learning_rate)?;
    }
    let test = test_set(cfg)?;
    let xt = features_of(&test, |p| classical_features(reservoir, p))?;
    Ok(model.accuracy(&xt, &labels(&test)))
}

struct Realization {
    hardware: Vec<f64>,
    clean: f64,
    classical: f64,
}

fn run_realization(cfg: &SpiralConfig, index: usize) -> Result<Realization> {
    let local = realization_config(cfg, index);
    let seed = local.master_seed;
    let reservoir = haar_unitary(ENCODING_MODES, derive_seed(seed, "reservoir", 0))?;
    let hardware = perturb_unitary(&reservoir, cfg.hardware_epsilon, derive_seed(seed, "hardware", 0))?;
    let mut accuracies = Vec::with_capacity(cfg.epsilon_sweep.len());
    let mut clean = f64::NAN;
    for &eps in &cfg.epsilon_sweep {
        let model = train_spiral(&SpiralConfig { epsilon: eps, ..local.clone() }, &reservoir)?;
        accuracies.push(evaluate_spiral(&model, &local, &hardware)?);
        if eps == 0.0 {
            clean = evaluate_spiral(&model, &local, &reservoir)?;
        }
    }
    if clean.is_nan() {
        let model = train_spiral(&SpiralConfig { epsilon: 0.0, ..local.clone() }, &reservoir)?;
        clean = evaluate_spiral(&model, &local, &reservoir)?;
    }
    let classical = classical_baseline(&local, &reservoir)?;
    Ok(Realization { hardware: accuracies, clean, classical })
}

/// Trains at every ε of the sweep on each reservoir realization and tests on
/// a fixed mismatched copy of that reservoir. The per-split metric is the
/// hardware accuracy of the model trained at `cfg.epsilon`.
pub fn run_spiral_experiment(cfg: &SpiralConfig) -> Result<ResultRecord> {
    cfg.validate()?;
    let clock = Timing::start();
    let runs =
        (0..cfg.reservoir_realizations).into_par_iter().map(|r| run_realization(cfg, r)).collect::<Result<Vec<_>>>()?;

    let column = |k: usize| runs.iter().map(|r| r.hardware[k]).collect::<Vec<_>>();
    let accuracy_vs_epsilon: Vec<CurvePoint> = cfg
        .epsilon_sweep
        .iter()
        .enumerate()
        .map(|(k, &eps)| {
            let v = column(k);
            CurvePoint { x: eps, mean: v.iter().sum::<f64>() / v.len() as f64, sd: standard_error(&v) }
        })
        .collect();
    let best = accuracy_vs_epsilon
        .iter()
        .fold(None::<&CurvePoint>, |acc, p| match acc {
            Some(b) if b.mean >= p.mean => Some(b),
            _ => Some(p),
        })
        .map_or(f64::NAN, |p| p.x);
    let per_split = match cfg.epsilon_sweep.iter().position(|&e| e == cfg.epsilon) {
        Some(k) => column(k),
        None => {
            return Err(Error::config("/epsilon", "must be one of epsilon_sweep"));
        }
    };
    let clean: Vec<f64> = runs.iter().map(|r| r.clean).collect();
    let classical: Vec<f64> = runs.iter().map(|r| r.classical).collect();
    let details = SpiralDetails {
        accuracy_vs_epsilon,
        per_realization: runs.iter().map(|r| r.hardware.clone()).collect(),
        best_epsilon: best,
        clean_accuracy: Summary::of(&clean),
        clean_per_realization: clean,
        classical_accuracy: Summary::of(&classical),
        classical_per_realization: classical,
        quantum_feature_count: feature_basis().len(),
        classical_feature_count: ENCODING_MODES,
    };
    Ok(ResultRecord::new(
        "spiral",
        serde_json::to_value(cfg).map_err(|e| Error::InvalidArgument(e.to_string()))?,
        "accuracy",
        per_split,
        Details::Spiral(details),
        Timing::finish(clock),
    ))
}
