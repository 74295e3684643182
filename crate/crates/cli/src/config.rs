//! Run configuration: a TOML file with top-level run settings and one table
//! per subcommand. Command-line flags override file values.

use std::collections::BTreeSet;
use std::path::Path;

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// Bandwidths in units of `n^{−1/(2β+1)}`.
pub const DEFAULT_BANDWIDTHS: [f64; 8] = [0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, rename_all = "kebab-case")]
pub struct RunConfig {
    pub seed: u64,
    pub out: String,
    pub format: Format,
    /// Worker threads; 0 uses every core.
    pub threads: usize,
    pub check_inequalities: CheckConfig,
    pub tightness_search: SearchSection,
    pub rao_blackwell: RaoBlackwellSection,
    pub gwn_experiment: GwnSection,
    pub frontier: FrontierSection,
    pub kernel_constants: KernelSection,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            out: "out".into(),
            format: Format::Json,
            threads: 0,
            check_inequalities: CheckConfig::default(),
            tightness_search: SearchSection::default(),
            rao_blackwell: RaoBlackwellSection::default(),
            gwn_experiment: GwnSection::default(),
            frontier: FrontierSection::default(),
            kernel_constants: KernelSection::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CheckConfig {
    pub trials: usize,
    pub max_space: usize,
    pub include_lemma3_literal: bool,
    pub d_grid: usize,
}

impl Default for CheckConfig {
    fn default() -> Self {
        Self {
            trials: 10_000,
            max_space: 20,
            include_lemma3_literal: false,
            d_grid: 10_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SearchSection {
    pub space_size: usize,
    pub iterations: u64,
    pub restarts: u64,
}

impl Default for SearchSection {
    fn default() -> Self {
        Self {
            space_size: 2,
            iterations: 100_000,
            restarts: 8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RaoBlackwellSection {
    pub trials: usize,
    pub max_space: usize,
}

impl Default for RaoBlackwellSection {
    fn default() -> Self {
        Self {
            trials: 1_000,
            max_space: 12,
        }
    }
}

/// Shared by the white noise experiments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ModelParams {
    pub beta: f64,
    #[serde(rename = "R")]
    pub radius: f64,
    #[serde(rename = "C")]
    pub c_const: f64,
    pub x0: f64,
    pub m: usize,
    pub replicates: usize,
    pub bandwidths: Vec<f64>,
}

impl Default for ModelParams {
    fn default() -> Self {
        Self {
            beta: 1.0,
            radius: 1.0,
            c_const: 1.0,
            x0: 0.5,
            m: 1024,
            replicates: 10_000,
            bandwidths: DEFAULT_BANDWIDTHS.to_vec(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GwnSection {
    pub n: f64,
    #[serde(flatten)]
    pub model: ModelParams,
}

impl Default for GwnSection {
    fn default() -> Self {
        Self {
            n: 4096.0,
            model: ModelParams::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FrontierSection {
    pub n_list: Vec<f64>,
    #[serde(flatten)]
    pub model: ModelParams,
}

impl Default for FrontierSection {
    fn default() -> Self {
        Self {
            n_list: (10..=16).map(|e| 2f64.powi(e)).collect(),
            model: ModelParams {
                replicates: 2_000,
                ..ModelParams::default()
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct KernelSection {
    pub beta: f64,
    #[serde(rename = "R")]
    pub radius: f64,
    #[serde(rename = "C")]
    pub c_const: f64,
    pub x0: f64,
}

impl Default for KernelSection {
    fn default() -> Self {
        Self {
            beta: 1.0,
            radius: 1.0,
            c_const: 1.0,
            x0: 0.5,
        }
    }
}

fn key_paths(value: &toml::Value, prefix: &str, out: &mut BTreeSet<String>) {
    if let toml::Value::Table(table) = value {
        for (k, v) in table {
            let path = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
            key_paths(v, &path, out);
            out.insert(path);
        }
    }
}

/// Keys of `text` that the schema does not know.
pub fn unknown_keys(text: &str) -> Result<Vec<String>> {
    let parsed: toml::Table = text.parse().map_err(|e| anyhow::anyhow!("{e}"))?;
    let known_value = toml::Value::try_from(RunConfig::default())?;
    let mut known = BTreeSet::new();
    key_paths(&known_value, "", &mut known);
    let mut found = BTreeSet::new();
    key_paths(&toml::Value::Table(parsed), "", &mut found);
    Ok(found.difference(&known).cloned().collect())
}

/// Parses a config; unknown keys are returned as warnings.
pub fn parse_config(text: &str) -> Result<(RunConfig, Vec<String>)> {
    let unknown = unknown_keys(text)?;
    let config: RunConfig = toml::from_str(text).map_err(|e| anyhow::anyhow!("{e}"))?;
    let warnings = unknown.into_iter().map(|k| format!("unknown config key `{k}`")).collect();
    Ok((config, warnings))
}

pub fn load_config(path: &Path) -> Result<(RunConfig, Vec<String>)> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read config {}", path.display()))?;
    parse_config(&text).with_context(|| format!("malformed config {}", path.display()))
}

impl RunConfig {
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// SHA-256 of the settings that determine a subcommand's output: seed,
    /// format, and that subcommand's table. `out` and `threads` are excluded.
    pub fn hash_for(&self, subcommand: &str) -> String {
        let section = match subcommand {
            "check-inequalities" => toml::Value::try_from(&self.check_inequalities),
            "tightness-search" => toml::Value::try_from(&self.tightness_search),
            "rao-blackwell" => toml::Value::try_from(&self.rao_blackwell),
            "gwn-experiment" => toml::Value::try_from(&self.gwn_experiment),
            "frontier" => toml::Value::try_from(&self.frontier),
            _ => toml::Value::try_from(&self.kernel_constants),
        }
        .expect("section serializes");
        let mut table = toml::Table::new();
        table.insert("subcommand".into(), subcommand.into());
        table.insert("seed".into(), toml::Value::Integer(self.seed as i64));
        table.insert("format".into(), toml::Value::try_from(self.format).expect("format"));
        table.insert("section".into(), section);
        let digest = Sha256::digest(toml::to_string(&table).expect("table serializes").as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}
