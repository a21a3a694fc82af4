//! Textual specs (`kind:key=value,...`) and the run configuration shared by
//! the command-line tool.

use std::collections::BTreeMap;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Default)]
pub struct SpecParams(BTreeMap<String, String>);

impl SpecParams {
    fn raw(&self, key: &str) -> Result<&str> {
        self.0
            .get(key)
            .map(String::as_str)
            .ok_or_else(|| Error::Parse(format!("missing parameter `{key}`")))
    }

    pub fn text(&self, key: &str) -> Result<&str> {
        self.raw(key)
    }

    pub fn number(&self, key: &str) -> Result<f64> {
        let v = self.raw(key)?;
        v.parse()
            .map_err(|_| Error::Parse(format!("parameter `{key}` is not a number: `{v}`")))
    }

    pub fn optional_number(&self, key: &str) -> Result<Option<f64>> {
        match self.0.contains_key(key) {
            true => self.number(key).map(Some),
            false => Ok(None),
        }
    }

    pub fn number_or(&self, key: &str, default: f64) -> Result<f64> {
        Ok(self.optional_number(key)?.unwrap_or(default))
    }
}

/// Splits `kind:k1=v1,k2=v2` into the kind and its parameters.
pub fn parse_spec(s: &str) -> Result<(String, SpecParams)> {
    let s = s.trim();
    let (kind, rest) = match s.split_once(':') {
        Some((k, r)) => (k, r),
        None => (s, ""),
    };
    if kind.is_empty() {
        return Err(Error::Parse(format!("empty kind in `{s}`")));
    }
    let mut map = BTreeMap::new();
    for pair in rest.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (k, v) = pair
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("expected key=value, got `{pair}`")))?;
        if map.insert(k.trim().to_string(), v.trim().to_string()).is_some() {
            return Err(Error::Parse(format!("duplicate parameter `{k}`")));
        }
    }
    Ok((kind.to_string(), SpecParams(map)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
    Svg,
}

impl std::str::FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            "svg" => Ok(Self::Svg),
            other => Err(Error::Parse(format!("unknown format `{other}`"))),
        }
    }
}

/// Every option a run can take. All fields are optional so that a JSON
/// config file and command-line flags can be layered; flags win.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub profile: Option<String>,
    pub profile_y: Option<String>,
    pub rate: Option<String>,
    pub lambda: Option<f64>,
    pub lambda1: Option<f64>,
    pub lambda2: Option<f64>,
    pub alpha: Option<f64>,
    pub nu: Option<f64>,
    pub t: Option<f64>,
    pub paths: Option<u64>,
    pub seed: Option<u64>,
    pub grid: Option<f64>,
    pub points: Option<usize>,
    pub law: Option<String>,
    pub suite: Option<String>,
    pub dim: Option<u32>,
    pub order: Option<u32>,
    pub out: Option<PathBuf>,
    pub format: Option<OutputFormat>,
    pub figure1: Option<bool>,
    pub rk4: Option<bool>,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("config: {e}")))
    }

    /// Fields set in `flags` override those in `self`.
    pub fn overlay(self, flags: RunConfig) -> RunConfig {
        macro_rules! pick {
            ($($f:ident),*) => { RunConfig { $($f: flags.$f.or(self.$f)),* } };
        }
        pick!(
            profile, profile_y, rate, lambda, lambda1, lambda2, alpha, nu, t, paths, seed, grid,
            points, law, suite, dim, order, out, format, figure1, rk4
        )
    }

    pub fn require_seed(&self) -> Result<u64> {
        self.seed
            .ok_or_else(|| Error::Parse("--seed is required for stochastic subcommands".into()))
    }

    pub fn require_t(&self) -> Result<f64> {
        positive("t", self.t.ok_or_else(|| Error::Parse("--t is required".into()))?)
    }
}

pub fn positive(name: &str, v: f64) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Parse(format!("--{name} must be positive, got {v}")))
    }
}
