use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use qrp_core::experiments::{
    direct_feature_regression, run_noon_experiment, run_rank_experiment, run_spiral_experiment,
    run_tomography_experiment, sweep_reservoir_size, Details, ResultRecord,
};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};
use crate::manifest::{ExperimentConfig, ExperimentKind, ExperimentManifest};

pub const RESULTS_FILE: &str = "results.json";
pub const PER_SPLIT_FILE: &str = "per_split.csv";
pub const CONFIG_FILE: &str = "config.json";

/// Contents of `results.json`. Headline numbers sit at the top level next
/// to the full records.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultsDocument {
    pub experiment: ExperimentKind,
    pub master_seed: u64,
    #[serde(flatten)]
    pub summary: BTreeMap<String, f64>,
    pub records: Vec<ResultRecord>,
    pub artifact_versions: BTreeMap<String, String>,
}

impl ResultsDocument {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| CliError::Results { path: path.to_path_buf(), message: e.to_string() })
    }

    pub fn to_json_pretty(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("results serialize");
        s.push('\n');
        s
    }
}

fn noon_summary(summary: &mut BTreeMap<String, f64>, prefix: &str, record: &ResultRecord) {
    if let Details::Noon(d) = &record.details {
        summary.insert(format!("{prefix}rmse_purity"), d.rmse_purity.mean);
        summary.insert(format!("{prefix}rmse_entropy"), d.rmse_entropy.mean);
        summary.insert(format!("{prefix}rmse_negativity"), d.rmse_negativity.mean);
        summary.insert(format!("{prefix}mean_abs_predicted_negativity"), d.mean_abs_predicted_negativity);
    }
}

/// Runs the manifest's experiment without touching the filesystem.
pub fn execute(manifest: &ExperimentManifest) -> Result<ResultsDocument> {
    manifest.validate()?;
    let mut summary = BTreeMap::new();
    let records = match &manifest.config {
        ExperimentConfig::Tomography(cfg) => {
            let qrp = run_tomography_experiment(cfg, true)?;
            let pnr = run_tomography_experiment(cfg, false)?;
            summary.insert("mean_fidelity_qrp".into(), qrp.mean);
            summary.insert("sd_fidelity_qrp".into(), qrp.sd);
            summary.insert("mean_fidelity_pnr".into(), pnr.mean);
            summary.insert("sd_fidelity_pnr".into(), pnr.sd);
            vec![qrp, pnr]
        }
        ExperimentConfig::Sweep { tomography, sizes } => {
            let records = sweep_reservoir_size(tomography, sizes)?;
            for (size, r) in sizes.iter().zip(&records) {
                summary.insert(format!("mean_fidelity_size_{size}"), r.mean);
            }
            records
        }
        ExperimentConfig::Noon(cfg) => {
            let via = run_noon_experiment(cfg)?;
            let direct = direct_feature_regression(cfg)?;
            noon_summary(&mut summary, "", &via);
            noon_summary(&mut summary, "direct_", &direct);
            vec![via, direct]
        }
        ExperimentConfig::Spiral(cfg) => {
            let record = run_spiral_experiment(cfg)?;
            if let Details::Spiral(d) = &record.details {
                summary.insert("best_epsilon".into(), d.best_epsilon);
                summary.insert("clean_accuracy".into(), d.clean_accuracy.mean);
                summary.insert("classical_accuracy".into(), d.classical_accuracy.mean);
                for p in &d.accuracy_vs_epsilon {
                    summary.insert(format!("accuracy_epsilon_{}", p.x), p.mean);
                }
            }
            vec![record]
        }
        ExperimentConfig::Rank(cfg) => {
            let record = run_rank_experiment(cfg)?;
            if let Details::Rank(d) = &record.details {
                summary.insert("rank".into(), d.rank as f64);
                summary.insert("param_count".into(), d.param_count as f64);
            }
            vec![record]
        }
    };
    Ok(ResultsDocument {
        experiment: manifest.kind(),
        master_seed: manifest.master_seed,
        summary,
        records,
        artifact_versions: manifest.artifact_versions.clone(),
    })
}

pub(crate) fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|e| CliError::io(path, e))
}

pub(crate) fn create_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
}

fn per_split_csv(doc: &ResultsDocument) -> String {
    let mut out = String::from("record,metric,split,value\n");
    for r in &doc.records {
        for (i, v) in r.per_split.iter().enumerate() {
            let _ = writeln!(out, "{},{},{i},{v}", r.experiment, r.metric);
        }
    }
    out
}

/// Writes `results.json`, `per_split.csv` and the resolved manifest into
/// the manifest's output directory.
pub fn write_artifacts(manifest: &ExperimentManifest, doc: &ResultsDocument) -> Result<Vec<PathBuf>> {
    let dir = &manifest.output_dir;
    create_dir(dir)?;
    let files = [
        (dir.join(RESULTS_FILE), doc.to_json_pretty()),
        (dir.join(PER_SPLIT_FILE), per_split_csv(doc)),
        (dir.join(CONFIG_FILE), manifest.to_json_pretty()),
    ];
    for (path, contents) in &files {
        write_file(path, contents)?;
    }
    Ok(files.into_iter().map(|(p, _)| p).collect())
}

pub fn run(manifest: &ExperimentManifest) -> Result<ResultsDocument> {
    let doc = execute(manifest)?;
    write_artifacts(manifest, &doc)?;
    Ok(doc)
}
