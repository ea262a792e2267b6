//! Experiment manifests: the experiment kind, its full config, the master
//! seed and the output directory. A resolved manifest reproduces its run.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use qrp_core::experiments::{NoonConfig, RankConfig, Shots, SpiralConfig, TomographyConfig};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{CliError, Result};

/// Version of the results and manifest layout.
pub const RESULTS_FORMAT: &str = "1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    Tomography,
    Sweep,
    Noon,
    Spiral,
    Rank,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Tomography => "tomography",
            ExperimentKind::Sweep => "sweep",
            ExperimentKind::Noon => "noon",
            ExperimentKind::Spiral => "spiral",
            ExperimentKind::Rank => "rank",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum ExperimentConfig {
    Tomography(TomographyConfig),
    Sweep { tomography: TomographyConfig, sizes: Vec<usize> },
    Noon(NoonConfig),
    Spiral(SpiralConfig),
    Rank(RankConfig),
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentManifest {
    pub config: ExperimentConfig,
    pub master_seed: u64,
    pub output_dir: PathBuf,
    pub artifact_versions: BTreeMap<String, String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawManifest {
    experiment: ExperimentKind,
    #[serde(default)]
    master_seed: Option<u64>,
    #[serde(default)]
    output_dir: Option<PathBuf>,
    #[serde(default)]
    config: Option<Value>,
    #[serde(default)]
    sizes: Option<Vec<usize>>,
    #[serde(default)]
    artifact_versions: BTreeMap<String, String>,
}

#[derive(Serialize)]
struct ManifestDoc<'a> {
    experiment: ExperimentKind,
    master_seed: u64,
    output_dir: &'a Path,
    config: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    sizes: Option<&'a [usize]>,
    artifact_versions: &'a BTreeMap<String, String>,
}

/// Command-line values that take precedence over the manifest file.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub master_seed: Option<u64>,
    pub output_dir: Option<PathBuf>,
    pub shots: Option<Shots>,
    pub sizes: Option<Vec<usize>>,
    /// `(key, value)` pairs set on the config object; values parse as JSON
    /// and fall back to strings.
    pub set: Vec<(String, String)>,
}

fn pointer_of(path: &serde_path_to_error::Path, prefix: &str) -> String {
    use serde_path_to_error::Segment;
    let mut out = prefix.to_string();
    for seg in path.iter() {
        match seg {
            Segment::Seq { index } => out.push_str(&format!("/{index}")),
            Segment::Map { key } => out.push_str(&format!("/{}", key.replace('~', "~0").replace('/', "~1"))),
            Segment::Enum { variant } => out.push_str(&format!("/{variant}")),
            Segment::Unknown => {}
        }
    }
    out
}

fn typed<T: DeserializeOwned>(value: Value, prefix: &str) -> Result<T> {
    serde_path_to_error::deserialize(value).map_err(|e| {
        let pointer = pointer_of(e.path(), prefix);
        CliError::config(pointer, e.into_inner().to_string())
    })
}

fn parse_override(raw: &str) -> Value {
    serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()))
}

impl ExperimentManifest {
    pub fn kind(&self) -> ExperimentKind {
        match self.config {
            ExperimentConfig::Tomography(_) => ExperimentKind::Tomography,
            ExperimentConfig::Sweep { .. } => ExperimentKind::Sweep,
            ExperimentConfig::Noon(_) => ExperimentKind::Noon,
            ExperimentConfig::Spiral(_) => ExperimentKind::Spiral,
            ExperimentConfig::Rank(_) => ExperimentKind::Rank,
        }
    }

    /// Manifest with every config field at its default.
    pub fn default_for(kind: ExperimentKind) -> Self {
        let doc = serde_json::json!({ "experiment": kind });
        Self::from_value(doc, &Overrides::default()).expect("defaults are valid")
    }

    pub fn load(path: &Path, overrides: &Overrides) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&text, overrides)
    }

    pub fn parse(text: &str, overrides: &Overrides) -> Result<Self> {
        let value: Value =
            serde_json::from_str(text).map_err(|e| CliError::config("", format!("not valid JSON: {e}")))?;
        Self::from_value(value, overrides)
    }

    pub fn from_value(mut value: Value, overrides: &Overrides) -> Result<Self> {
        let root = value.as_object_mut().ok_or_else(|| CliError::config("", "manifest must be a JSON object"))?;
        if let Some(seed) = overrides.master_seed {
            root.insert("master_seed".into(), seed.into());
        }
        if let Some(dir) = &overrides.output_dir {
            root.insert("output_dir".into(), Value::String(dir.to_string_lossy().into_owned()));
        }
        if let Some(sizes) = &overrides.sizes {
            root.insert("sizes".into(), sizes.clone().into());
        }
        let raw: RawManifest = typed(value, "")?;

        let mut config = match raw.config {
            None => Map::new(),
            Some(Value::Object(m)) => m,
            Some(_) => return Err(CliError::config("/config", "must be a JSON object")),
        };
        if let Some(shots) = overrides.shots {
            config.insert("shots".into(), serde_json::to_value(shots).expect("shots serialize"));
        }
        for (key, raw_value) in &overrides.set {
            config.insert(key.clone(), parse_override(raw_value));
        }
        if let Some(seed) = raw.master_seed {
            config.insert("master_seed".into(), seed.into());
        }
        if raw.sizes.is_some() && raw.experiment != ExperimentKind::Sweep {
            return Err(CliError::config("/sizes", "only sweep manifests take sizes"));
        }
        let config = Value::Object(config);
        let config = match raw.experiment {
            ExperimentKind::Tomography => ExperimentConfig::Tomography(typed(config, "/config")?),
            ExperimentKind::Sweep => {
                let tomography: TomographyConfig = typed(config, "/config")?;
                let sizes = raw.sizes.unwrap_or_else(|| default_sizes(tomography.state_modes));
                ExperimentConfig::Sweep { tomography, sizes }
            }
            ExperimentKind::Noon => ExperimentConfig::Noon(typed(config, "/config")?),
            ExperimentKind::Spiral => ExperimentConfig::Spiral(typed(config, "/config")?),
            ExperimentKind::Rank => ExperimentConfig::Rank(typed(config, "/config")?),
        };
        let mut artifact_versions = raw.artifact_versions;
        artifact_versions.entry("qrp".into()).or_insert_with(|| env!("CARGO_PKG_VERSION").to_string());
        artifact_versions.entry("results_format".into()).or_insert_with(|| RESULTS_FORMAT.to_string());
        let output_dir = raw.output_dir.unwrap_or_else(|| PathBuf::from("out").join(raw.experiment.name()));
        let manifest =
            ExperimentManifest { master_seed: master_seed_of(&config), config, output_dir, artifact_versions };
        manifest.validate()?;
        Ok(manifest)
    }

    pub fn validate(&self) -> Result<()> {
        match &self.config {
            ExperimentConfig::Tomography(c) => c.validate()?,
            ExperimentConfig::Sweep { tomography, sizes } => {
                tomography.validate()?;
                if sizes.is_empty() {
                    return Err(CliError::config("/sizes", "at least one size is required"));
                }
                for (i, &s) in sizes.iter().enumerate() {
                    if s < tomography.state_modes {
                        return Err(CliError::config(format!("/sizes/{i}"), "must be at least config.state_modes"));
                    }
                    if i > 0 && s <= sizes[i - 1] {
                        return Err(CliError::config(format!("/sizes/{i}"), "sizes must be strictly ascending"));
                    }
                }
            }
            ExperimentConfig::Noon(c) => c.validate()?,
            ExperimentConfig::Spiral(c) => {
                c.validate()?;
                if !c.epsilon_sweep.contains(&c.epsilon) {
                    return Err(CliError::config("/config/epsilon", "must be one of epsilon_sweep"));
                }
            }
            ExperimentConfig::Rank(c) => c.validate()?,
        }
        Ok(())
    }

    pub fn config_value(&self) -> Value {
        let v = match &self.config {
            ExperimentConfig::Tomography(c) | ExperimentConfig::Sweep { tomography: c, .. } => serde_json::to_value(c),
            ExperimentConfig::Noon(c) => serde_json::to_value(c),
            ExperimentConfig::Spiral(c) => serde_json::to_value(c),
            ExperimentConfig::Rank(c) => serde_json::to_value(c),
        };
        v.expect("configs serialize")
    }

    pub fn to_value(&self) -> Value {
        let sizes = match &self.config {
            ExperimentConfig::Sweep { sizes, .. } => Some(sizes.as_slice()),
            _ => None,
        };
        let doc = ManifestDoc {
            experiment: self.kind(),
            master_seed: self.master_seed,
            output_dir: &self.output_dir,
            config: self.config_value(),
            sizes,
            artifact_versions: &self.artifact_versions,
        };
        serde_json::to_value(doc).expect("manifest serializes")
    }

    pub fn to_json_pretty(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_value()).expect("manifest serializes");
        s.push('\n');
        s
    }
}

fn master_seed_of(config: &ExperimentConfig) -> u64 {
    match config {
        ExperimentConfig::Tomography(c) | ExperimentConfig::Sweep { tomography: c, .. } => c.master_seed,
        ExperimentConfig::Noon(c) => c.master_seed,
        ExperimentConfig::Spiral(c) => c.master_seed,
        ExperimentConfig::Rank(c) => c.master_seed,
    }
}

fn default_sizes(state_modes: usize) -> Vec<usize> {
    if state_modes == 2 {
        vec![2, 3, 4, 5, 6]
    } else {
        (3..=10).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pointer(err: CliError) -> String {
        match err {
            CliError::Config { pointer, .. } => pointer,
            other => panic!("expected a config error, got {other}"),
        }
    }

    #[test]
    fn type_errors_name_the_field() {
        let err = ExperimentManifest::parse(
            r#"{"experiment":"tomography","config":{"train_count":"many"}}"#,
            &Overrides::default(),
        )
        .unwrap_err();
        assert_eq!(pointer(err), "/config/train_count");
        let err =
            ExperimentManifest::parse(r#"{"experiment":"noon","config":{"detector_count":4}}"#, &Overrides::default())
                .unwrap_err();
        assert_eq!(pointer(err), "/config/detector_count");
        let err =
            ExperimentManifest::parse(r#"{"experiment":"sweep","sizes":[2,4,3]}"#, &Overrides::default()).unwrap_err();
        assert_eq!(pointer(err), "/sizes/2");
        let err = ExperimentManifest::parse(r#"{"experiment":"laser"}"#, &Overrides::default()).unwrap_err();
        assert_eq!(pointer(err), "/experiment");
    }

    #[test]
    fn overrides_win_and_seed_propagates() {
        let o = Overrides {
            master_seed: Some(9),
            shots: Some(Shots::Count(2000)),
            set: vec![("train_count".into(), "60".into())],
            ..Default::default()
        };
        let m =
            ExperimentManifest::parse(r#"{"experiment":"tomography","master_seed":1,"config":{"train_count":50}}"#, &o)
                .unwrap();
        match &m.config {
            ExperimentConfig::Tomography(c) => {
                assert_eq!((c.master_seed, c.train_count, c.shots), (9, 60, Shots::Count(2000)));
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(m.master_seed, 9);
    }

    #[test]
    fn resolved_manifest_round_trips() {
        for kind in [
            ExperimentKind::Tomography,
            ExperimentKind::Sweep,
            ExperimentKind::Noon,
            ExperimentKind::Spiral,
            ExperimentKind::Rank,
        ] {
            let m = ExperimentManifest::default_for(kind);
            let back = ExperimentManifest::parse(&m.to_json_pretty(), &Overrides::default()).unwrap();
            assert_eq!(back, m);
        }
    }
}
