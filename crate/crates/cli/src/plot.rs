//! Tidy CSV tables behind the figures: one row per x value and series.

use std::path::{Path, PathBuf};

use qrp_core::experiments::{Details, ResultRecord};

use crate::error::{CliError, Result};
use crate::manifest::ExperimentKind;
use crate::runner::{create_dir, write_file, ResultsDocument};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum PlotKind {
    /// Test fidelity against training-set size.
    Fig2b,
    /// Test fidelity against reservoir size.
    Fig3,
    /// Predicted against true purity, entropy and negativity.
    Fig4,
    /// Hardware accuracy against training perturbation amplitude.
    Fig5,
}

impl PlotKind {
    pub fn file_name(self) -> &'static str {
        match self {
            PlotKind::Fig2b => "fig2b.csv",
            PlotKind::Fig3 => "fig3.csv",
            PlotKind::Fig4 => "fig4.csv",
            PlotKind::Fig5 => "fig5.csv",
        }
    }

    fn source(self) -> ExperimentKind {
        match self {
            PlotKind::Fig2b => ExperimentKind::Tomography,
            PlotKind::Fig3 => ExperimentKind::Sweep,
            PlotKind::Fig4 => ExperimentKind::Noon,
            PlotKind::Fig5 => ExperimentKind::Spiral,
        }
    }

    pub fn header(self) -> &'static [&'static str] {
        match self {
            PlotKind::Fig2b => &["train_count", "series", "mean_fidelity", "sd"],
            PlotKind::Fig3 => &["reservoir_modes", "outcome_count", "mean_fidelity", "sd"],
            PlotKind::Fig4 => &["metric", "true", "predicted", "detector_count"],
            PlotKind::Fig5 => &["epsilon", "series", "mean_accuracy", "sd"],
        }
    }
}

/// Shortest decimal form that parses back to the same double.
fn num(v: f64) -> String {
    format!("{v}")
}

fn rows_for(kind: PlotKind, record: &ResultRecord) -> Vec<Vec<String>> {
    let mut rows = Vec::new();
    match (kind, &record.details) {
        (PlotKind::Fig2b, Details::Tomography(d)) => {
            let series = if d.use_reservoir { "qrp" } else { "pnr" };
            for p in &d.learning_curve {
                rows.push(vec![num(p.x), series.into(), num(p.mean), num(p.sd)]);
            }
        }
        (PlotKind::Fig3, Details::Tomography(d)) => {
            rows.push(vec![
                d.reservoir_modes.to_string(),
                d.outcome_count.to_string(),
                num(record.mean),
                num(record.sd),
            ]);
        }
        (PlotKind::Fig4, Details::Noon(d)) if d.route == "via_density" => {
            for p in &d.scatter {
                rows.push(vec![p.metric.clone(), num(p.truth), num(p.predicted), d.detector_count.to_string()]);
            }
        }
        (PlotKind::Fig5, Details::Spiral(d)) => {
            for p in &d.accuracy_vs_epsilon {
                rows.push(vec![num(p.x), "qrp_hardware".into(), num(p.mean), num(p.sd)]);
            }
            for p in &d.accuracy_vs_epsilon {
                rows.push(vec![
                    num(p.x),
                    "classical".into(),
                    num(d.classical_accuracy.mean),
                    num(d.classical_accuracy.sd),
                ]);
            }
        }
        _ => {}
    }
    rows
}

/// Builds the table for `kind` from matching results. Nothing is written
/// when the inputs are empty or of the wrong experiment kind.
pub fn plot_table(results: &[ResultsDocument], kind: PlotKind) -> Result<Vec<Vec<String>>> {
    if results.is_empty() {
        return Err(CliError::Plot("no results given".into()));
    }
    if let Some(doc) = results.iter().find(|d| d.experiment != kind.source()) {
        return Err(CliError::Plot(format!(
            "{} needs {} results, got {}",
            kind.file_name(),
            kind.source().name(),
            doc.experiment.name()
        )));
    }
    let rows: Vec<Vec<String>> = results.iter().flat_map(|d| &d.records).flat_map(|r| rows_for(kind, r)).collect();
    if rows.is_empty() {
        return Err(CliError::Plot(format!("results contain no data for {}", kind.file_name())));
    }
    Ok(rows)
}

pub fn emit_plot_data(results: &[ResultsDocument], kind: PlotKind, out_dir: &Path) -> Result<PathBuf> {
    let rows = plot_table(results, kind)?;
    let mut writer = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| CliError::Plot(e.to_string());
    writer.write_record(kind.header()).map_err(csv_err)?;
    for row in &rows {
        writer.write_record(row).map_err(csv_err)?;
    }
    let bytes = writer.into_inner().map_err(|e| CliError::Plot(e.to_string()))?;
    create_dir(out_dir)?;
    let path = out_dir.join(kind.file_name());
    write_file(&path, &String::from_utf8(bytes).expect("csv output is utf-8"))?;
    Ok(path)
}
