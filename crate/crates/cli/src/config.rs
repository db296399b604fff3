//! Effective run configuration: flags over config file over defaults.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use qcorr::figures::FigureGrid;
use qcorr::{QuadratureSpec, Vec3};

/// Keys accepted on the command line and in config files.
pub const KEYS: [&str; 17] = [
    "kappa",
    "c-hat",
    "lambda",
    "b",
    "target",
    "beta",
    "quad-theta",
    "quad-phi",
    "mc-samples",
    "seed",
    "out",
    "format",
    "trials",
    "points",
    "kappa-points",
    "b-points",
    "suite",
];

const DEFAULTS: [(&str, &str); 8] = [
    ("quad-theta", "64"),
    ("quad-phi", "128"),
    ("mc-samples", "0"),
    ("seed", "1"),
    ("format", "csv"),
    ("points", "21"),
    ("kappa-points", "20"),
    ("b-points", "20"),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

/// Raw key/value view, resolved in precedence order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunConfig {
    values: BTreeMap<String, String>,
}

fn canonical_key(key: &str) -> Result<String> {
    let k = key.trim().trim_start_matches("--").replace('_', "-");
    if KEYS.contains(&k.as_str()) {
        Ok(k)
    } else {
        bail!("unknown configuration key {key:?}")
    }
}

/// Parses `key = value` lines; blank lines and `#` comments are skipped.
pub fn parse_config_text(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| anyhow!("config line {}: expected key = value, got {line:?}", lineno + 1))?;
        let key = canonical_key(k).with_context(|| format!("config line {}", lineno + 1))?;
        out.insert(key, v.trim().to_string());
    }
    Ok(out)
}

impl RunConfig {
    /// Defaults, then the config file (if any), then explicit flags.
    pub fn resolve(file: Option<&Path>, flags: &[(&str, Option<String>)]) -> Result<Self> {
        let mut values: BTreeMap<String, String> =
            DEFAULTS.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect();
        if let Some(path) = file {
            let text = fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
            values.extend(parse_config_text(&text)?);
        }
        for (k, v) in flags {
            if let Some(v) = v {
                values.insert(canonical_key(k)?, v.clone());
            }
        }
        Ok(Self { values })
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn is_set(&self, key: &str) -> bool {
        self.values.contains_key(key)
    }

    fn parsed<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        self.get(key)
            .map(|v| v.parse::<T>().map_err(|e| anyhow!("invalid {key} {v:?}: {e}")))
            .transpose()
    }

    pub fn f64(&self, key: &str) -> Result<Option<f64>> {
        let v = self.parsed::<f64>(key)?;
        if let Some(x) = v {
            if !x.is_finite() {
                bail!("{key} must be finite, got {x}");
            }
        }
        Ok(v)
    }

    pub fn usize(&self, key: &str) -> Result<usize> {
        self.parsed::<usize>(key)?.ok_or_else(|| anyhow!("{key} is not set"))
    }

    pub fn u64(&self, key: &str) -> Result<Option<u64>> {
        self.parsed::<u64>(key)
    }

    pub fn vec3(&self, key: &str) -> Result<Option<Vec3>> {
        self.get(key).map(|v| parse_vec3(v).with_context(|| format!("invalid {key}"))).transpose()
    }

    pub fn seed(&self) -> Result<u64> {
        Ok(self.u64("seed")?.unwrap_or(1))
    }

    pub fn format(&self) -> Result<Format> {
        match self.get("format").unwrap_or("csv") {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => bail!("format must be csv or json, got {other:?}"),
        }
    }

    pub fn quadrature(&self) -> Result<QuadratureSpec> {
        Ok(QuadratureSpec::new(self.usize("quad-theta")?, self.usize("quad-phi")?)?)
    }

    pub fn grid(&self) -> Result<FigureGrid> {
        let grid = FigureGrid {
            points: self.usize("points")?,
            kappa_points: self.usize("kappa-points")?,
            b_points: self.usize("b-points")?,
        };
        grid.validate()?;
        Ok(grid)
    }

    /// `key = value` lines for output headers, in key order.
    pub fn echo(&self) -> Vec<String> {
        self.values.iter().map(|(k, v)| format!("{k} = {v}")).collect()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&String, &String)> {
        self.values.iter()
    }
}

/// `x,y,z` with optional surrounding parentheses or brackets.
pub fn parse_vec3(s: &str) -> Result<Vec3> {
    let inner = s.trim().trim_start_matches(['(', '[']).trim_end_matches([')', ']']);
    let parts: Vec<&str> = inner.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        bail!("expected three comma-separated numbers, got {s:?}");
    }
    let mut v = [0.0; 3];
    for (slot, p) in v.iter_mut().zip(&parts) {
        *slot = p.parse::<f64>().map_err(|e| anyhow!("{p:?}: {e}"))?;
        if !slot.is_finite() {
            bail!("components must be finite, got {p:?}");
        }
    }
    Ok(Vec3::new(v[0], v[1], v[2]))
}
