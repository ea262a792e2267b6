use std::sync::Arc;

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::rank::rank_diagnostic;
use super::record::{mean_sd, CurvePoint, Details, ResultRecord, Timing, TomographyDetails};
use super::shots::Shots;
use crate::error::{Error, Result};
use crate::fock::{enumerate_fixed, enumerate_up_to, FockBasis, Occupation};
use crate::linalg::RMatrix;
use crate::optics::{
    embed_density, haar_unitary, lift_unitary, output_amplitudes, partial_trace, pnr_distribution, sample_counts,
    DensityMatrix, ModeUnitary,
};
use crate::seed::{derive_seed, seeded_rng};
use crate::tomography::{fidelity, hermitize, pack_params, project_physical, unpack_params, ParamStructure};

/// Modes of the state-preparation circuit.
const CIRCUIT_MODES: usize = 6;
/// Photons enter the circuit in these modes (third and fifth).
const INPUT_MODES: [usize; 2] = [2, 4];
/// The source unitary acts on the last four circuit modes.
const SOURCE_POSITIONS: [usize; 4] = [2, 3, 4, 5];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TomographyConfig {
    pub state_modes: usize,
    pub circuit_modes: usize,
    pub reservoir_modes: usize,
    pub dataset_size: usize,
    pub train_count: usize,
    pub split_seeds: usize,
    pub shots: Shots,
    pub alpha: f64,
    /// Standardize features by their training-set spread before the fit.
    pub scale_features: bool,
    /// Training-set sizes for the learning curve, each at most
    /// `train_count`. Empty selects a default grid up to `train_count`.
    pub curve_train_counts: Vec<usize>,
    pub master_seed: u64,
}

impl Default for TomographyConfig {
    fn default() -> Self {
        TomographyConfig {
            state_modes: 2,
            circuit_modes: CIRCUIT_MODES,
            reservoir_modes: 4,
            dataset_size: 100,
            train_count: 70,
            split_seeds: 50,
            shots: Shots::Exact,
            alpha: crate::tomography::DEFAULT_ALPHA,
            scale_features: true,
            curve_train_counts: Vec::new(),
            master_seed: 2024,
        }
    }
}

impl TomographyConfig {
    pub fn validate(&self) -> Result<()> {
        if !(2..=3).contains(&self.state_modes) {
            return Err(Error::config("/state_modes", "must be 2 or 3"));
        }
        if self.circuit_modes != CIRCUIT_MODES {
            return Err(Error::config("/circuit_modes", format!("only the {CIRCUIT_MODES}-mode circuit is supported")));
        }
        if self.reservoir_modes < self.state_modes {
            return Err(Error::config("/reservoir_modes", "must be at least state_modes"));
        }
        if self.dataset_size < 2 {
            return Err(Error::config("/dataset_size", "must be at least 2"));
        }
        if self.train_count == 0 {
            return Err(Error::config("/train_count", "must be positive"));
        }
        if self.train_count >= self.dataset_size {
            return Err(Error::config("/train_count", "must be less than dataset_size"));
        }
        if self.split_seeds == 0 {
            return Err(Error::config("/split_seeds", "must be positive"));
        }
        if !(self.alpha >= 0.0 && self.alpha.is_finite()) {
            return Err(Error::config("/alpha", "must be finite and non-negative"));
        }
        for (i, &n) in self.curve_train_counts.iter().enumerate() {
            if n == 0 || n > self.train_count {
                return Err(Error::config(&format!("/curve_train_counts/{i}"), "must be in 1..=train_count"));
            }
        }
        Ok(())
    }

    pub fn curve_points(&self) -> Vec<usize> {
        if !self.curve_train_counts.is_empty() {
            return self.curve_train_counts.clone();
        }
        let mut points: Vec<usize> =
            [5, 10, 15, 20, 30, 40, 50, 60].into_iter().filter(|&n| n < self.train_count).collect();
        points.push(self.train_count);
        points
    }
}

#[derive(Clone, Debug)]
pub struct MixedSample {
    pub source: ModeUnitary,
    pub state: DensityMatrix,
}

/// Reduced input states of the preparation circuit: two photons in the third
/// and fifth modes pass a Haar-random source unitary on modes three to six,
/// then all but the first `state_modes` of those four are traced out.
pub fn gen_mixed_state_dataset(count: usize, state_modes: usize, master_seed: u64) -> Result<Vec<MixedSample>> {
    if count == 0 {
        return Err(Error::InvalidArgument("dataset needs at least one state".into()));
    }
    if !(2..=3).contains(&state_modes) {
        return Err(Error::InvalidArgument(format!("state_modes must be 2 or 3, got {state_modes}")));
    }
    let circuit = Arc::new(enumerate_fixed(CIRCUIT_MODES, 2)?);
    let input = Occupation::new(vec![1, 1]).embed(CIRCUIT_MODES, &INPUT_MODES)?;
    let kept: Vec<usize> = SOURCE_POSITIONS[..state_modes].to_vec();
    (0..count)
        .into_par_iter()
        .map(|i| {
            let source = haar_unitary(4, derive_seed(master_seed, "source", i as u64))?;
            let state = reduced_state(&source, &circuit, &input, &kept)?;
            Ok(MixedSample { source, state })
        })
        .collect()
}

fn reduced_state(
    source: &ModeUnitary,
    circuit: &Arc<FockBasis>,
    input: &Occupation,
    kept: &[usize],
) -> Result<DensityMatrix> {
    let full = source.embed(CIRCUIT_MODES, &SOURCE_POSITIONS)?;
    let psi = output_amplitudes(&full, input, circuit)?;
    partial_trace(&DensityMatrix::pure(Arc::clone(circuit), &psi)?, kept)
}

/// PNR outcome probabilities after the reservoir, over the up-to-n outcome
/// space of the reservoir modes. States occupy the first reservoir modes.
/// Finite `shots` replace probabilities by frequencies drawn per sample.
pub fn reservoir_features(
    states: &[DensityMatrix],
    reservoir: &ModeUnitary,
    shots: Shots,
    seed: u64,
) -> Result<RMatrix> {
    let first = states.first().ok_or_else(|| Error::InvalidArgument("no states".into()))?;
    let k = first.basis().mode_count();
    let modes = reservoir.dim();
    if modes < k {
        return Err(Error::InvalidArgument(format!("{modes}-mode reservoir cannot hold a {k}-mode state")));
    }
    let positions: Vec<usize> = (0..k).collect();
    let basis = Arc::new(enumerate_up_to(modes, first.basis().max_photons())?);
    let lifted = lift_unitary(reservoir, &basis)?;
    let l = lifted.matrix();
    let l_dag = l.adjoint();
    let rows: Vec<Vec<f64>> = states
        .par_iter()
        .enumerate()
        .map(|(i, rho)| {
            let embedded = embed_density(rho, modes, &positions)?;
            if embedded.dim() != basis.len() {
                return Err(Error::BasisMismatch("state photon cutoff differs across the dataset".into()));
            }
            let out = DensityMatrix::new_unchecked(Arc::clone(&basis), l * embedded.matrix() * &l_dag)?;
            let dist = pnr_distribution(&out)?;
            Ok(match shots {
                Shots::Exact => dist.into_probabilities(),
                Shots::Count(n) => sample_counts(&dist, n, derive_seed(seed, "shots", i as u64))?.into_probabilities(),
            })
        })
        .collect::<Result<_>>()?;
    Ok(crate::linalg::rows_to_matrix(&rows))
}

struct SplitOutcome {
    curve: Vec<f64>,
    fidelity: f64,
    offdiag_predicted: f64,
    offdiag_true: f64,
    degenerate: usize,
}

struct Prepared {
    states: Vec<DensityMatrix>,
    structure: ParamStructure,
    features: RMatrix,
    targets: RMatrix,
}

fn select_rows(m: &RMatrix, rows: &[usize]) -> RMatrix {
    RMatrix::from_fn(rows.len(), m.ncols(), |i, j| m[(rows[i], j)])
}

fn mean_offdiag(m: &crate::linalg::CMatrix, structure: &ParamStructure) -> (f64, usize) {
    let mut sum = 0.0;
    let mut count = 0;
    for block in structure.blocks() {
        for i in block.clone() {
            for j in i + 1..block.end {
                sum += m[(i, j)].norm();
                count += 1;
            }
        }
    }
    (sum, count)
}

fn evaluate_split(cfg: &TomographyConfig, data: &Prepared, split: usize) -> Result<SplitOutcome> {
    let mut order: Vec<usize> = (0..cfg.dataset_size).collect();
    order.shuffle(&mut seeded_rng(derive_seed(cfg.master_seed, "split", split as u64)));
    let test = &order[cfg.train_count..];
    let basis = data.structure.basis();

    let score = |n_train: usize, collect: bool| -> Result<(f64, f64, f64, usize)> {
        let train = &order[..n_train];
        let mut x_train = select_rows(&data.features, train);
        let mut x_test = select_rows(&data.features, test);
        if cfg.scale_features {
            (x_train, x_test) = super::scale_by_train_sd(&x_train, &x_test);
        }
        let model = crate::tomography::ridge_fit(&x_train, &select_rows(&data.targets, train), cfg.alpha)?;
        let predicted = model.predict_matrix(&x_test)?;
        let (mut fid, mut off_p, mut off_t, mut slots, mut degenerate) = (0.0, 0.0, 0.0, 0usize, 0usize);
        for (row, &idx) in test.iter().enumerate() {
            let params: Vec<f64> = predicted.row(row).iter().copied().collect();
            let upper = unpack_params(&params, &data.structure)?;
            let projection = project_physical(&hermitize(&upper.matrix)?, basis)?;
            degenerate += usize::from(projection.degenerate);
            fid += fidelity(&projection.state, &data.states[idx])?;
            if collect {
                let (p, c) = mean_offdiag(projection.state.matrix(), &data.structure);
                let (t, _) = mean_offdiag(data.states[idx].matrix(), &data.structure);
                off_p += p;
                off_t += t;
                slots += c;
            }
        }
        let n = test.len() as f64;
        let slots = slots.max(1) as f64;
        Ok((fid / n, off_p / slots, off_t / slots, degenerate))
    };

    let curve = cfg.curve_points().iter().map(|&n| score(n, false).map(|r| r.0)).collect::<Result<Vec<_>>>()?;
    let (fidelity, offdiag_predicted, offdiag_true, degenerate) = score(cfg.train_count, true)?;
    Ok(SplitOutcome { curve, fidelity, offdiag_predicted, offdiag_true, degenerate })
}

/// Reservoir for a given size; sweeps and single runs at that size share it.
fn reservoir_for(cfg: &TomographyConfig, use_reservoir: bool) -> Result<ModeUnitary> {
    if use_reservoir {
        haar_unitary(cfg.reservoir_modes, derive_seed(cfg.master_seed, "reservoir", cfg.reservoir_modes as u64))
    } else {
        Ok(ModeUnitary::identity(cfg.reservoir_modes))
    }
}

/// Trains a ridge readout from PNR features to the block parameters of the
/// input state on each random split and reports the mean test fidelity of
/// the physicalized reconstructions. Without a reservoir the detectors see
/// the input modes directly.
pub fn run_tomography_experiment(cfg: &TomographyConfig, use_reservoir: bool) -> Result<ResultRecord> {
    cfg.validate()?;
    let clock = Timing::start();
    let samples = gen_mixed_state_dataset(cfg.dataset_size, cfg.state_modes, cfg.master_seed)?;
    let reservoir = reservoir_for(cfg, use_reservoir)?;
    let states: Vec<DensityMatrix> = samples.into_iter().map(|s| s.state).collect();
    let features = reservoir_features(&states, &reservoir, cfg.shots, derive_seed(cfg.master_seed, "detection", 0))?;
    let structure = ParamStructure::photon_number_blocks(Arc::clone(states[0].basis()));
    let target_rows = states.iter().map(|s| pack_params(s, &structure)).collect::<Result<Vec<_>>>()?;
    let targets = crate::linalg::rows_to_matrix(&target_rows);
    let feature_rank = rank_diagnostic(&features)?;
    let data = Prepared { states, structure, features, targets };

    let outcomes =
        (0..cfg.split_seeds).into_par_iter().map(|s| evaluate_split(cfg, &data, s)).collect::<Result<Vec<_>>>()?;

    let learning_curve = cfg
        .curve_points()
        .iter()
        .enumerate()
        .map(|(k, &n)| {
            let (mean, sd) = mean_sd(&outcomes.iter().map(|o| o.curve[k]).collect::<Vec<_>>());
            CurvePoint { x: n as f64, mean, sd }
        })
        .collect();
    let splits = outcomes.len() as f64;
    let details = TomographyDetails {
        use_reservoir,
        state_modes: cfg.state_modes,
        reservoir_modes: cfg.reservoir_modes,
        outcome_count: data.features.ncols(),
        fixed_outcome_count: enumerate_fixed(cfg.reservoir_modes, 2)?.len(),
        param_count: data.structure.param_count(),
        feature_rank,
        mean_offdiag_predicted: outcomes.iter().map(|o| o.offdiag_predicted).sum::<f64>() / splits,
        mean_offdiag_true: outcomes.iter().map(|o| o.offdiag_true).sum::<f64>() / splits,
        degenerate_projections: outcomes.iter().map(|o| o.degenerate).sum(),
        learning_curve,
        reservoir,
    };
    let per_split = outcomes.iter().map(|o| o.fidelity).collect();
    let id = if use_reservoir { "tomography_qrp" } else { "tomography_pnr" };
    Ok(ResultRecord::new(
        id,
        serde_json::to_value(cfg).map_err(|e| Error::InvalidArgument(e.to_string()))?,
        "fidelity",
        per_split,
        Details::Tomography(details),
        Timing::finish(clock),
    ))
}

/// One reservoir experiment per size, each with its own Haar reservoir.
pub fn sweep_reservoir_size(cfg: &TomographyConfig, sizes: &[usize]) -> Result<Vec<ResultRecord>> {
    if sizes.is_empty() {
        return Err(Error::config("/sizes", "at least one size is required"));
    }
    if sizes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::config("/sizes", "sizes must be strictly ascending"));
    }
    sizes
        .iter()
        .map(|&size| {
            let sized = TomographyConfig { reservoir_modes: size, ..cfg.clone() };
            run_tomography_experiment(&sized, true)
        })
        .collect()
}
