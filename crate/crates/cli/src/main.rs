use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use qrp_cli::{
    configure_threads, emit_plot_data, generate::generate, run, CliError, ExperimentManifest, Overrides, PlotKind,
    ResultsDocument,
};
use qrp_core::experiments::Shots;

#[derive(Parser)]
#[command(name = "qrp", version, about = "Photonic quantum reservoir processing experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct ConfigArgs {
    /// Experiment manifest (JSON)
    #[arg(long)]
    config: PathBuf,
    /// Output directory, overriding the manifest
    #[arg(long)]
    out: Option<PathBuf>,
    /// Master seed, overriding the manifest
    #[arg(long)]
    seed: Option<u64>,
    /// Detection events per state, or "exact"
    #[arg(long)]
    shots: Option<Shots>,
    /// Set a config field, e.g. --set train_count=50
    #[arg(long = "set", value_name = "KEY=VALUE", value_parser = parse_key_value)]
    set: Vec<(String, String)>,
}

#[derive(Subcommand)]
enum Command {
    /// Write the input datasets of an experiment
    Generate(ConfigArgs),
    /// Run an experiment and write its results
    Run(ConfigArgs),
    /// Run a tomography manifest over several reservoir sizes
    Sweep {
        #[command(flatten)]
        args: ConfigArgs,
        /// Reservoir sizes, ascending
        #[arg(long, value_delimiter = ',')]
        sizes: Vec<usize>,
    },
    /// Emit plot tables from results files
    PlotData {
        #[arg(long, required = true)]
        results: Vec<PathBuf>,
        #[arg(long)]
        kind: PlotKind,
        #[arg(long)]
        out: PathBuf,
    },
    /// Check a manifest and print it fully resolved
    Validate(ConfigArgs),
}

fn parse_key_value(s: &str) -> Result<(String, String), String> {
    s.split_once('=')
        .map(|(k, v)| (k.trim().to_string(), v.to_string()))
        .filter(|(k, _)| !k.is_empty())
        .ok_or_else(|| format!("expected KEY=VALUE, got {s:?}"))
}

fn load(args: &ConfigArgs, sizes: Option<Vec<usize>>) -> Result<ExperimentManifest, CliError> {
    let overrides = Overrides {
        master_seed: args.seed,
        output_dir: args.out.clone(),
        shots: args.shots,
        sizes,
        set: args.set.clone(),
    };
    ExperimentManifest::load(&args.config, &overrides)
}

fn sweep_manifest(args: &ConfigArgs, sizes: Vec<usize>) -> Result<ExperimentManifest, CliError> {
    let text =
        std::fs::read_to_string(&args.config).map_err(|e| CliError::Io { path: args.config.clone(), source: e })?;
    let mut value: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| CliError::config("", format!("not valid JSON: {e}")))?;
    if let Some(obj) = value.as_object_mut() {
        obj.insert("experiment".into(), "sweep".into());
    }
    let overrides = Overrides {
        master_seed: args.seed,
        output_dir: args.out.clone(),
        shots: args.shots,
        sizes: (!sizes.is_empty()).then_some(sizes),
        set: args.set.clone(),
    };
    ExperimentManifest::from_value(value, &overrides)
}

fn report(doc: &ResultsDocument, out: &std::path::Path) {
    println!("{} finished; results in {}", doc.experiment.name(), out.display());
    for (k, v) in &doc.summary {
        println!("  {k} = {v}");
    }
}

fn main_inner(cli: Cli) -> Result<(), CliError> {
    configure_threads()?;
    match cli.command {
        Command::Generate(args) => {
            let m = load(&args, None)?;
            println!("wrote {}", generate(&m)?.display());
        }
        Command::Run(args) => {
            let m = load(&args, None)?;
            let doc = run(&m)?;
            report(&doc, &m.output_dir);
        }
        Command::Sweep { args, sizes } => {
            let m = sweep_manifest(&args, sizes)?;
            let doc = run(&m)?;
            report(&doc, &m.output_dir);
        }
        Command::PlotData { results, kind, out } => {
            let docs = results.iter().map(|p| ResultsDocument::load(p)).collect::<Result<Vec<_>, _>>()?;
            println!("wrote {}", emit_plot_data(&docs, kind, &out)?.display());
        }
        Command::Validate(args) => {
            let m = load(&args, None)?;
            print!("{}", m.to_json_pretty());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match main_inner(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
