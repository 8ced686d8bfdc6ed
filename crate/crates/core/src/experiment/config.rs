//! Flat `key = value` experiment configuration.
//!
//! Files hold one `key = value` pair per line; `#` starts a comment. Keys
//! match the command-line flag names (`n-list`, `sine-c`, ...; underscores
//! are accepted for dashes). Later entries override earlier ones, so flags
//! appended after the file contents take precedence.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{config, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    NormsSweep,
    RothTest,
    LemmaBounds,
    DichotomyExample,
    ProductBound,
    Tails,
    NetVerify,
    Interpolation,
    HaarScan,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 9] = [
        ExperimentKind::NormsSweep,
        ExperimentKind::RothTest,
        ExperimentKind::LemmaBounds,
        ExperimentKind::DichotomyExample,
        ExperimentKind::ProductBound,
        ExperimentKind::Tails,
        ExperimentKind::NetVerify,
        ExperimentKind::Interpolation,
        ExperimentKind::HaarScan,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::NormsSweep => "norms-sweep",
            ExperimentKind::RothTest => "roth-test",
            ExperimentKind::LemmaBounds => "lemma-bounds",
            ExperimentKind::DichotomyExample => "dichotomy-example",
            ExperimentKind::ProductBound => "product-bound",
            ExperimentKind::Tails => "tails",
            ExperimentKind::NetVerify => "net-verify",
            ExperimentKind::Interpolation => "interpolation",
            ExperimentKind::HaarScan => "haar-scan",
        }
    }

    /// Generator, dimensions and sizes used when the configuration does not
    /// name them.
    fn defaults(self) -> (GeneratorKind, &'static str, &'static str) {
        use GeneratorKind::*;
        match self {
            ExperimentKind::NormsSweep => (Hammersley, "2", "2^4..2^12"),
            ExperimentKind::RothTest => (Hammersley, "2", "2^4..2^12"),
            ExperimentKind::LemmaBounds => (Hammersley, "2", "2^4..2^10"),
            ExperimentKind::DichotomyExample => (Faure, "2", "2^8..2^16"),
            ExperimentKind::ProductBound => (Faure, "3", "3^3..3^6"),
            ExperimentKind::Tails => (Hammersley, "3", "2^12"),
            ExperimentKind::NetVerify => (Faure, "2", "2^4..2^12"),
            ExperimentKind::Interpolation => (Random, "2", "2^6..2^10"),
            ExperimentKind::HaarScan => (Hammersley, "2", "2^6"),
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExperimentKind {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        ExperimentKind::ALL
            .into_iter()
            .find(|k| k.name() == s || k.name().split('-').next() == Some(s))
            .ok_or_else(|| config(format!("unknown experiment {s:?}")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum GeneratorKind {
    Random,
    Hammersley,
    Faure,
}

impl fmt::Display for GeneratorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GeneratorKind::Random => "random",
            GeneratorKind::Hammersley => "hammersley",
            GeneratorKind::Faure => "faure",
        })
    }
}

impl FromStr for GeneratorKind {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "random" => Ok(GeneratorKind::Random),
            "hammersley" | "van-der-corput" => Ok(GeneratorKind::Hammersley),
            "faure" => Ok(GeneratorKind::Faure),
            other => Err(config(format!("unknown generator {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Json => "json",
            Format::Csv => "csv",
        })
    }
}

impl FromStr for Format {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            other => Err(config(format!("unknown format {other:?}"))),
        }
    }
}

/// A fully resolved experiment configuration.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    pub generator: GeneratorKind,
    /// Faure base; `None` picks the smallest prime `>= d`.
    pub base: Option<u64>,
    /// Point-set file replacing the generator.
    pub points: Option<String>,
    pub dims: Vec<usize>,
    pub n_list: Vec<u64>,
    pub samples: usize,
    pub seed: u64,
    /// Corner-collapse exponent; `None` means `1/(2d)`.
    pub delta: Option<f64>,
    /// Dichotomy exponent; `None` means `min(1/d, 1/2)`.
    pub epsilon: Option<f64>,
    pub sine_c: Vec<f64>,
    /// Exponent of the interpolation check and the extra L^p norm.
    pub p: f64,
    /// Tail thresholds; `None` uses the lattice midpoints of `Z`.
    pub thresholds: Option<Vec<f64>>,
    pub tol: f64,
    pub levels_above: u32,
    pub trials: usize,
    pub allow_any_dim: bool,
    pub format: Format,
    pub out: Option<String>,
    pub plot: Option<String>,
    pub timing: bool,
}

pub const KEYS: [&str; 21] = [
    "experiment",
    "generator",
    "base",
    "points",
    "dim",
    "n-list",
    "samples",
    "seed",
    "delta",
    "epsilon",
    "sine-c",
    "p",
    "thresholds",
    "tol",
    "levels-above",
    "trials",
    "allow-any-dim",
    "format",
    "out",
    "plot",
    "timing",
];

/// Parses `key = value` lines; blank lines and `#` comments are skipped.
pub fn parse_config_text(text: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| config(format!("line {}: expected key = value", lineno + 1)))?;
        out.push((k.trim().to_string(), v.trim().to_string()));
    }
    Ok(out)
}

fn normalize_key(key: &str) -> String {
    key.trim().replace('_', "-")
}

fn parse_num<T: FromStr>(key: &str, v: &str) -> Result<T> {
    v.trim()
        .parse()
        .map_err(|_| config(format!("{key}: cannot parse {v:?}")))
}

fn parse_list<T: FromStr>(key: &str, v: &str) -> Result<Vec<T>> {
    v.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| parse_num(key, s))
        .collect()
}

fn parse_bool(key: &str, v: &str) -> Result<bool> {
    match v.trim() {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        other => Err(config(format!("{key}: expected a boolean, got {other:?}"))),
    }
}

fn parse_power(item: &str) -> Result<(Option<(u64, u32)>, u64)> {
    let item = item.trim();
    if let Some((b, e)) = item.split_once('^') {
        let b: u64 = parse_num("n-list", b)?;
        let e: u32 = parse_num("n-list", e)?;
        let v = b
            .checked_pow(e)
            .ok_or_else(|| config(format!("n-list: {item} overflows")))?;
        Ok((Some((b, e)), v))
    } else {
        Ok((None, parse_num("n-list", item)?))
    }
}

/// Parses a comma list of sizes; items are integers, powers `b^e`, or
/// ranges `b^e1..b^e2` over consecutive exponents.
pub fn parse_n_list(v: &str) -> Result<Vec<u64>> {
    let mut out = Vec::new();
    for item in v.split(',').filter(|s| !s.trim().is_empty()) {
        if let Some((lo, hi)) = item.split_once("..") {
            let (Some((b1, e1)), _) = parse_power(lo)? else {
                return Err(config(format!(
                    "n-list: range {item:?} must use powers b^e"
                )));
            };
            let (Some((b2, e2)), _) = parse_power(hi)? else {
                return Err(config(format!(
                    "n-list: range {item:?} must use powers b^e"
                )));
            };
            if b1 != b2 || e1 > e2 {
                return Err(config(format!("n-list: bad range {item:?}")));
            }
            for e in e1..=e2 {
                out.push(b1.pow(e));
            }
        } else {
            out.push(parse_power(item)?.1);
        }
    }
    if out.is_empty() {
        return Err(config("n-list is empty"));
    }
    if out.contains(&0) {
        return Err(config("n-list entries must be positive"));
    }
    Ok(out)
}

fn fmt_list<T: ToString>(v: &[T]) -> String {
    v.iter().map(T::to_string).collect::<Vec<_>>().join(",")
}

fn fmt_opt<T: ToString>(v: &Option<T>) -> String {
    v.as_ref().map_or_else(|| "auto".to_string(), T::to_string)
}

fn opt<T>(key: &str, v: &str, parse: impl Fn(&str, &str) -> Result<T>) -> Result<Option<T>> {
    if v.trim() == "auto" {
        Ok(None)
    } else {
        parse(key, v).map(Some)
    }
}

impl ExperimentConfig {
    /// Builds a configuration from ordered `key = value` entries. The
    /// experiment named by `kind` overrides any `experiment` entry; the seed
    /// is mandatory.
    pub fn resolve(kind: Option<ExperimentKind>, entries: &[(String, String)]) -> Result<Self> {
        let mut merged: Vec<(String, String)> = Vec::new();
        for (k, v) in entries {
            let k = normalize_key(k);
            if !KEYS.contains(&k.as_str()) {
                return Err(config(format!("unknown key {k:?}")));
            }
            merged.retain(|(key, _)| *key != k);
            merged.push((k, v.clone()));
        }
        let get = |key: &str| {
            merged
                .iter()
                .find(|(k, _)| k == key)
                .map(|(_, v)| v.as_str())
        };
        let experiment = match (kind, get("experiment")) {
            (Some(k), _) => k,
            (None, Some(v)) => v.parse()?,
            (None, None) => return Err(config("no experiment selected")),
        };
        let (default_gen, default_dims, default_n) = experiment.defaults();
        let seed = get("seed")
            .ok_or_else(|| config("seed is mandatory"))
            .and_then(|v| parse_num("seed", v))?;
        let cfg = ExperimentConfig {
            experiment,
            generator: get("generator").map_or(Ok(default_gen), str::parse)?,
            base: get("base").map_or(Ok(None), |v| opt("base", v, parse_num))?,
            points: get("points").filter(|v| *v != "auto").map(str::to_string),
            dims: parse_list("dim", get("dim").unwrap_or(default_dims))?,
            n_list: parse_n_list(get("n-list").unwrap_or(default_n))?,
            samples: get("samples").map_or(Ok(100_000), |v| parse_num("samples", v))?,
            seed,
            delta: get("delta").map_or(Ok(None), |v| opt("delta", v, parse_num))?,
            epsilon: get("epsilon").map_or(Ok(None), |v| opt("epsilon", v, parse_num))?,
            sine_c: get("sine-c").map_or(Ok(vec![0.05, 0.1, 0.2]), |v| parse_list("sine-c", v))?,
            p: get("p").map_or(Ok(2.0), |v| parse_num("p", v))?,
            thresholds: get("thresholds").map_or(Ok(None), |v| opt("thresholds", v, parse_list))?,
            tol: get("tol").map_or(Ok(1e-6), |v| parse_num("tol", v))?,
            levels_above: get("levels-above").map_or(Ok(6), |v| parse_num("levels-above", v))?,
            trials: get("trials").map_or(Ok(10_000), |v| parse_num("trials", v))?,
            allow_any_dim: get("allow-any-dim")
                .map_or(Ok(false), |v| parse_bool("allow-any-dim", v))?,
            format: get("format").map_or(Ok(Format::Json), str::parse)?,
            out: get("out").filter(|v| *v != "auto").map(str::to_string),
            plot: get("plot").filter(|v| *v != "auto").map(str::to_string),
            timing: get("timing").map_or(Ok(false), |v| parse_bool("timing", v))?,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<()> {
        if self.dims.is_empty() || self.dims.contains(&0) {
            return Err(config("dimensions must be positive"));
        }
        if self.samples < 2 {
            return Err(config("samples must be at least 2"));
        }
        if !(self.p >= 1.0 && self.p.is_finite()) {
            return Err(config("p must be finite and >= 1"));
        }
        if !(self.tol > 0.0) {
            return Err(config("tol must be positive"));
        }
        if self.sine_c.is_empty() {
            return Err(config("sine-c needs at least one value"));
        }
        Ok(())
    }

    /// `δ` for dimension `d`.
    pub fn delta_for(&self, d: usize) -> f64 {
        self.delta.unwrap_or(1.0 / (2.0 * d as f64))
    }

    /// `ε` for dimension `d`.
    pub fn epsilon_for(&self, d: usize) -> f64 {
        self.epsilon.unwrap_or((1.0 / d as f64).min(0.5))
    }

    /// Faure base for dimension `d`.
    pub fn base_for(&self, d: usize) -> u64 {
        self.base
            .unwrap_or_else(|| crate::combinatorics::next_prime(d as u64))
    }

    /// All settings except the output destinations (`out`, `plot`) as
    /// `key = value` pairs in a fixed order; feeding them back through
    /// [`ExperimentConfig::resolve`] reproduces the same report.
    pub fn to_pairs(&self) -> Vec<(String, String)> {
        let pairs: [(&str, String); 19] = [
            ("experiment", self.experiment.to_string()),
            ("generator", self.generator.to_string()),
            ("base", fmt_opt(&self.base)),
            ("points", fmt_opt(&self.points)),
            ("dim", fmt_list(&self.dims)),
            ("n-list", fmt_list(&self.n_list)),
            ("samples", self.samples.to_string()),
            ("seed", self.seed.to_string()),
            ("delta", fmt_opt(&self.delta)),
            ("epsilon", fmt_opt(&self.epsilon)),
            ("sine-c", fmt_list(&self.sine_c)),
            ("p", self.p.to_string()),
            (
                "thresholds",
                self.thresholds
                    .as_ref()
                    .map_or("auto".into(), |t| fmt_list(t)),
            ),
            ("tol", self.tol.to_string()),
            ("levels-above", self.levels_above.to_string()),
            ("trials", self.trials.to_string()),
            ("allow-any-dim", self.allow_any_dim.to_string()),
            ("format", self.format.to_string()),
            ("timing", self.timing.to_string()),
        ];
        pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
    }

    /// The configuration in the flat file format.
    pub fn to_config_text(&self) -> String {
        self.to_pairs()
            .into_iter()
            .map(|(k, v)| format!("{k} = {v}\n"))
            .collect()
    }
}
