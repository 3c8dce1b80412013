//! Run configuration: optional JSON config file, flag overrides, and the
//! config hash embedded in every artifact.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use betagamma::models::{BasicModel, ModelSpec};
use serde::Deserialize;
use serde_json::Value;

/// Errors at the configuration layer map to exit code 2.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "config error: {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

impl From<betagamma::Error> for ConfigError {
    fn from(e: betagamma::Error) -> Self {
        ConfigError(e.to_string())
    }
}

pub type ConfigResult<T> = Result<T, ConfigError>;

/// Model description in a config file: either a basic-model name or an
/// explicit parameter object.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum FileModel {
    Named(String),
    Explicit {
        a: f64,
        b: f64,
        #[serde(default)]
        mu: Option<f64>,
        #[serde(default)]
        lambda: Option<f64>,
        #[serde(default)]
        beta: Option<f64>,
        #[serde(default)]
        reflected: bool,
    },
}

/// Optional file-level defaults; every flag overrides its field.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub model: Option<FileModel>,
    pub grid: Option<[usize; 2]>,
    pub site: Option<[usize; 2]>,
    pub replicas: Option<usize>,
    pub samples: Option<usize>,
    pub points: Option<usize>,
    pub seed: Option<u64>,
    pub level: Option<f64>,
    pub output: Option<PathBuf>,
    pub format: Option<String>,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> ConfigResult<Self> {
        match path {
            None => Ok(Self::default()),
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| ConfigError(format!("cannot read {}: {e}", p.display())))?;
                serde_json::from_str(&text)
                    .map_err(|e| ConfigError(format!("cannot parse {}: {e}", p.display())))
            }
        }
    }
}

/// Flag-level model selection shared by several subcommands.
#[derive(Clone, Debug, clap::Args)]
pub struct ModelArgs {
    /// Named basic model: log-gamma, strict-weak, beta, inverse-beta.
    #[arg(long)]
    pub model: Option<String>,
    /// Link intercept; h(y) = a + b·y.
    #[arg(long, allow_hyphen_values = true)]
    pub a: Option<f64>,
    /// Link slope.
    #[arg(long, allow_hyphen_values = true)]
    pub b: Option<f64>,
    #[arg(long)]
    pub mu: Option<f64>,
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    /// Use the reflected branch of the beta region.
    #[arg(long)]
    pub reflected: bool,
}

impl ModelArgs {
    /// Resolve flags over file defaults into a validated spec.
    pub fn resolve(&self, file: Option<&FileModel>) -> ConfigResult<ModelSpec> {
        // Figure out (a, b) and per-model parameter defaults.
        let named = |name: &str| -> ConfigResult<BasicModel> {
            BasicModel::from_str(name).map_err(ConfigError::from)
        };
        let (a, b, defaults, file_params, file_reflected) = if let Some(name) = &self.model {
            let m = named(name)?;
            let h = m.h();
            (h.a(), h.b(), m.default_params(), (None, None, None), false)
        } else if let (Some(a), Some(b)) = (self.a, self.b) {
            let defaults = defaults_for(a, b)?;
            (a, b, defaults, (None, None, None), false)
        } else {
            match file {
                Some(FileModel::Named(name)) => {
                    let m = named(name)?;
                    let h = m.h();
                    (h.a(), h.b(), m.default_params(), (None, None, None), false)
                }
                Some(FileModel::Explicit {
                    a,
                    b,
                    mu,
                    lambda,
                    beta,
                    reflected,
                }) => (*a, *b, defaults_for(*a, *b)?, (*mu, *lambda, *beta), *reflected),
                None => {
                    return Err(ConfigError(
                        "no model: pass --model NAME, or --a and --b, or a config file".into(),
                    ))
                }
            }
        };
        let (dmu, dlambda, dbeta) = defaults;
        let spec = ModelSpec::new(
            a,
            b,
            self.mu.or(file_params.0).unwrap_or(dmu),
            self.lambda.or(file_params.1).unwrap_or(dlambda),
            self.beta.or(file_params.2).unwrap_or(dbeta),
        )?;
        let reflected = self.reflected || file_reflected;
        Ok(if reflected {
            spec.with_reflected(true)?
        } else {
            spec
        })
    }
}

fn defaults_for(a: f64, b: f64) -> ConfigResult<(f64, f64, f64)> {
    betagamma::models::classify(a, b)
        .basic()
        .map(|m| m.default_params())
        .ok_or_else(|| {
            ConfigError(format!(
                "(a, b) = ({a}, {b}) lies in the region with no stationary model"
            ))
        })
}

/// FNV-1a over the canonical JSON of the resolved configuration.
pub fn config_hash(resolved: &Value) -> String {
    let text = resolved.to_string();
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for byte in text.as_bytes() {
        hash ^= u64::from(*byte);
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    format!("{hash:016x}")
}
