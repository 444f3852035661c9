//! Layered configuration: `key = value` file, then `HARDY_*` environment
//! variables, then command-line flags.

use std::collections::BTreeMap;
use std::path::Path;

use hardy_core::context::Tolerances;
use hardy_core::json::check_bits;

use crate::CliError;

pub const ENV_PREFIX: &str = "HARDY_";

/// Keys understood in config files and as `HARDY_<KEY>` variables.
pub const KEYS: [&str; 10] = [
    "bits",
    "merge_tol",
    "root_cluster_tol",
    "membership_tol",
    "bisection_tol",
    "psd_factor",
    "half_plane_margin",
    "k_max",
    "allow_vanishing_at_minus_one",
    "format",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Config {
    pub bits: Option<u32>,
    pub tolerances: Tolerances,
    pub format: Format,
}

/// Parses `key = value` lines; `#` starts a comment.
pub fn parse_file(text: &str) -> Result<BTreeMap<String, String>, CliError> {
    let mut out = BTreeMap::new();
    for (no, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("config line {}: expected key = value", no + 1)))?;
        let k = k.trim().to_ascii_lowercase();
        if !KEYS.contains(&k.as_str()) {
            return Err(CliError::Usage(format!("config line {}: unknown key {k:?}", no + 1)));
        }
        out.insert(k, v.trim().to_string());
    }
    Ok(out)
}

/// Reads `HARDY_<KEY>` for every known key.
pub fn from_env(vars: impl IntoIterator<Item = (String, String)>) -> BTreeMap<String, String> {
    vars.into_iter()
        .filter_map(|(k, v)| {
            let key = k.strip_prefix(ENV_PREFIX)?.to_ascii_lowercase();
            KEYS.contains(&key.as_str()).then_some((key, v))
        })
        .collect()
}

fn parse<V: std::str::FromStr>(key: &str, v: &str) -> Result<V, CliError> {
    v.parse().map_err(|_| CliError::Usage(format!("bad value {v:?} for {key}")))
}

fn positive(key: &str, v: &str) -> Result<f64, CliError> {
    let x: f64 = parse(key, v)?;
    if x > 0.0 && x.is_finite() {
        Ok(x)
    } else {
        Err(CliError::Usage(format!("{key} must be positive")))
    }
}

impl Config {
    /// Later layers win.
    pub fn from_layers(layers: &[BTreeMap<String, String>]) -> Result<Config, CliError> {
        let mut merged = BTreeMap::new();
        for l in layers {
            merged.extend(l.iter().map(|(k, v)| (k.clone(), v.clone())));
        }
        let mut cfg = Config { bits: None, tolerances: Tolerances::default(), format: Format::Json };
        let t = &mut cfg.tolerances;
        for (k, v) in &merged {
            match k.as_str() {
                "bits" => {
                    let b: u32 = parse(k, v)?;
                    check_bits(b).map_err(|e| CliError::Usage(e.to_string()))?;
                    cfg.bits = Some(b);
                }
                "merge_tol" => t.merge_tol = Some(positive(k, v)?),
                "root_cluster_tol" => t.root_cluster_tol = Some(positive(k, v)?),
                "membership_tol" => t.membership_tol = Some(positive(k, v)?),
                "bisection_tol" => t.bisection_tol = Some(positive(k, v)?),
                "psd_factor" => t.psd_factor = Some(positive(k, v)?),
                "half_plane_margin" => t.half_plane_margin = Some(positive(k, v)?),
                "k_max" => t.k_max = Some(parse(k, v)?),
                "allow_vanishing_at_minus_one" => t.allow_vanishing_at_minus_one = Some(parse(k, v)?),
                "format" => {
                    cfg.format = match v.as_str() {
                        "json" => Format::Json,
                        "csv" => Format::Csv,
                        _ => return Err(CliError::Usage(format!("format must be json or csv, got {v:?}"))),
                    }
                }
                _ => unreachable!("keys filtered on input"),
            }
        }
        Ok(cfg)
    }

    pub fn load(file: Option<&Path>, flags: BTreeMap<String, String>) -> Result<Config, CliError> {
        let file_layer = match file {
            Some(p) => parse_file(&std::fs::read_to_string(p).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?)?,
            None => BTreeMap::new(),
        };
        Config::from_layers(&[file_layer, from_env(std::env::vars()), flags])
    }

    pub fn bits_or(&self, default: u32) -> u32 {
        self.bits.unwrap_or(default)
    }
}
