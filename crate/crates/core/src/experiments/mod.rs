//! Seeded end-to-end studies: mixed-state tomography with and without a
//! reservoir, reservoir-size sweeps, NOON-family feature estimation, spiral
//! classification with perturbation-aware training, and the feature-matrix
//! rank diagnostic.
//!
//! Work units (samples, splits, reservoir realizations) each draw from their
//! own generator derived from the master seed and the unit index, and are
//! reduced in index order, so results are identical for any thread count.

mod noon;
mod rank;
mod readout;
mod record;
mod shots;
mod spiral;
mod tomography;

pub use noon::{
    direct_feature_regression, gen_noon_dataset, noon_features, noon_from_draw, noon_splits, run_noon_experiment,
    NoonConfig, NoonSample,
};
pub use rank::{rank_diagnostic, run_rank_experiment, FeatureSource, RankConfig, RANK_TOLERANCE};
pub use readout::LogisticReadout;
pub use record::{
    mean_sd, standard_error, CurvePoint, Details, NoonDetails, RankDetails, ResultRecord, ScatterPoint, SpiralDetails,
    Summary, Timing, TomographyDetails,
};
pub use shots::Shots;
pub use spiral::{
    classical_baseline, classical_features, encode_point, evaluate_spiral, quantum_features, realization_config,
    run_spiral_experiment, spiral_dataset, spiral_splits, train_spiral, SpiralConfig, SpiralPoint,
};
pub use tomography::{
    gen_mixed_state_dataset, reservoir_features, run_tomography_experiment, sweep_reservoir_size, MixedSample,
    TomographyConfig,
};

use crate::linalg::RMatrix;

/// Divides every column of `train` and `test` by its training standard
/// deviation, so the ridge penalty acts on unit-variance features. Columns
/// that are constant on the training set are left unscaled.
pub(crate) fn scale_by_train_sd(train: &RMatrix, test: &RMatrix) -> (RMatrix, RMatrix) {
    let n = train.nrows().max(1) as f64;
    let scales: Vec<f64> = train
        .column_iter()
        .map(|c| {
            let mean = c.sum() / n;
            let sd = (c.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n).sqrt();
            if sd > 1e-12 {
                sd
            } else {
                1.0
            }
        })
        .collect();
    let apply = |m: &RMatrix| RMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)] / scales[j]);
    (apply(train), apply(test))
}
