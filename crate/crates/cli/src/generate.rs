use std::path::PathBuf;

use qrp_core::experiments::{
    gen_mixed_state_dataset, noon_splits, realization_config, spiral_splits, FeatureSource, NoonConfig, NoonSample,
    SpiralPoint,
};
use qrp_core::{DensityMatrix, ModeUnitary, Occupation};
use serde::Serialize;

use crate::error::Result;
use crate::manifest::{ExperimentConfig, ExperimentManifest};
use crate::runner::{create_dir, write_file};

pub const DATASET_FILE: &str = "dataset.json";

#[derive(Serialize)]
struct StateDoc {
    basis: Vec<Occupation>,
    re: Vec<Vec<f64>>,
    im: Vec<Vec<f64>>,
}

impl From<&DensityMatrix> for StateDoc {
    fn from(rho: &DensityMatrix) -> Self {
        let m = rho.matrix();
        StateDoc {
            basis: rho.basis().states().to_vec(),
            re: m.row_iter().map(|r| r.iter().map(|z| z.re).collect()).collect(),
            im: m.row_iter().map(|r| r.iter().map(|z| z.im).collect()).collect(),
        }
    }
}

#[derive(Serialize)]
struct MixedDoc {
    source: ModeUnitary,
    state: StateDoc,
}

#[derive(Serialize)]
struct NoonDoc {
    n1: f64,
    n2: f64,
    sigma: f64,
    phi: f64,
}

impl From<&NoonSample> for NoonDoc {
    fn from(s: &NoonSample) -> Self {
        NoonDoc { n1: s.state.n1, n2: s.state.n2, sigma: s.state.sigma, phi: s.state.phi }
    }
}

#[derive(Serialize)]
struct SplitDoc<T> {
    train: Vec<T>,
    test: Vec<T>,
}

fn mixed(count: usize, state_modes: usize, seed: u64) -> Result<serde_json::Value> {
    let docs: Vec<MixedDoc> = gen_mixed_state_dataset(count, state_modes, seed)?
        .into_iter()
        .map(|s| MixedDoc { state: StateDoc::from(&s.state), source: s.source })
        .collect();
    Ok(serde_json::to_value(docs).expect("dataset serializes"))
}

fn noon(cfg: &NoonConfig) -> Result<serde_json::Value> {
    let (train, test) = noon_splits(cfg)?;
    let doc =
        SplitDoc { train: train.iter().map(NoonDoc::from).collect(), test: test.iter().map(NoonDoc::from).collect() };
    Ok(serde_json::to_value(doc).expect("dataset serializes"))
}

/// Writes the input datasets an experiment would draw into `dataset.json`.
pub fn generate(manifest: &ExperimentManifest) -> Result<PathBuf> {
    manifest.validate()?;
    let data = match &manifest.config {
        ExperimentConfig::Tomography(c) | ExperimentConfig::Sweep { tomography: c, .. } => {
            mixed(c.dataset_size, c.state_modes, c.master_seed)?
        }
        ExperimentConfig::Noon(c) => noon(c)?,
        ExperimentConfig::Spiral(c) => {
            let splits = (0..c.reservoir_realizations)
                .map(|r| {
                    let (train, test) = spiral_splits(&realization_config(c, r))?;
                    Ok(SplitDoc::<SpiralPoint> { train, test })
                })
                .collect::<Result<Vec<_>>>()?;
            serde_json::to_value(splits).expect("dataset serializes")
        }
        ExperimentConfig::Rank(c) => match c.source {
            FeatureSource::Tomography => mixed(c.samples, c.state_modes, c.master_seed)?,
            FeatureSource::Noon => {
                let cfg = NoonConfig {
                    train_count: c.samples,
                    test_count: 1,
                    master_seed: c.master_seed,
                    ..Default::default()
                };
                noon(&cfg)?
            }
        },
    };
    let doc = serde_json::json!({ "experiment": manifest.kind(), "master_seed": manifest.master_seed, "data": data });
    create_dir(&manifest.output_dir)?;
    let path = manifest.output_dir.join(DATASET_FILE);
    let mut text = serde_json::to_string_pretty(&doc).expect("dataset serializes");
    text.push('\n');
    write_file(&path, &text)?;
    Ok(path)
}
