//! Run configuration: JSON file and command-line overrides resolved against a
//! named preset.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{preset, Model, System};

/// Closed interval with an optional number of grid points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RangeSpec {
    pub lo: f64,
    pub hi: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
}

impl RangeSpec {
    /// Parses `lo:hi` or `lo:hi:n`.
    pub fn parse(s: &str) -> Result<Self> {
        let bad = |m: &str| Error::Config { path: "range".into(), msg: format!("`{s}`: {m}") };
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() < 2 || parts.len() > 3 {
            return Err(bad("expected lo:hi[:n]"));
        }
        let lo = parts[0].trim().parse::<f64>().map_err(|_| bad("bad lower bound"))?;
        let hi = parts[1].trim().parse::<f64>().map_err(|_| bad("bad upper bound"))?;
        let n = match parts.get(2) {
            Some(p) => Some(p.trim().parse::<usize>().map_err(|_| bad("bad point count"))?),
            None => None,
        };
        let r = RangeSpec { lo, hi, n };
        r.validate("range")?;
        Ok(r)
    }

    pub fn validate(&self, path: &str) -> Result<()> {
        if !(self.lo.is_finite() && self.hi.is_finite()) || self.lo >= self.hi {
            return Err(Error::Config { path: path.into(), msg: format!("empty or invalid range [{}, {}]", self.lo, self.hi) });
        }
        if let Some(n) = self.n {
            if n < 2 {
                return Err(Error::Config { path: format!("{path}.n"), msg: "need at least 2 points".into() });
            }
        }
        Ok(())
    }

    pub fn points(&self, default_n: usize) -> usize {
        self.n.unwrap_or(default_n)
    }
}

/// Mean, slope and intensity of the noisy input.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseConfig {
    pub mean: f64,
    pub std: f64,
    #[serde(default)]
    pub slope: f64,
}

impl NoiseConfig {
    /// Parses `mean=..,std=..[,slope=..]`.
    pub fn parse(s: &str) -> Result<Self> {
        let mut nc = NoiseConfig { mean: f64::NAN, std: f64::NAN, slope: 0.0 };
        for kv in s.split(',') {
            let (k, v) = split_kv(kv, "noise")?;
            match k {
                "mean" => nc.mean = v,
                "std" => nc.std = v,
                "slope" => nc.slope = v,
                _ => return Err(Error::Config { path: format!("noise.{k}"), msg: "unknown key".into() }),
            }
        }
        if !nc.mean.is_finite() || !(nc.std >= 0.0) {
            return Err(Error::Config { path: "noise".into(), msg: "need mean and a non-negative std".into() });
        }
        Ok(nc)
    }
}

fn split_kv<'a>(kv: &'a str, path: &str) -> Result<(&'a str, f64)> {
    let (k, v) = kv.split_once('=').ok_or_else(|| Error::Config { path: path.into(), msg: format!("expected name=value, got `{kv}`") })?;
    let k = k.trim();
    let v = v.trim().parse::<f64>().map_err(|_| Error::Config { path: format!("{path}.{k}"), msg: format!("`{v}` is not a number") })?;
    Ok((k, v))
}

/// Tolerance names accepted in `tol`.
pub const TOLERANCE_NAMES: &[&str] =
    &["xtol", "unstable_re", "imag_axis", "omega_min", "sn_nondegenerate", "l1_degenerate", "int_tol", "residual_tol", "dbt_radius"];

/// Fully resolved run configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Model or preset name.
    #[serde(default = "default_model")]
    pub model: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    /// Parameter overrides.
    #[serde(default)]
    pub set: BTreeMap<String, f64>,
    /// Continued or swept parameter (fold-of-cycles curve).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub param: Option<String>,
    /// Parameter plane `[theta, input]`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pair: Option<[String; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub range: Option<RangeSpec>,
    /// Secondary range (input range of cycle continuations).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_range: Option<RangeSpec>,
    #[serde(default = "default_out")]
    pub out: PathBuf,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub tol: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise: Option<NoiseConfig>,
    /// Simulation horizon (dimensionless).
    #[serde(default, rename = "T", skip_serializing_if = "Option::is_none")]
    pub t_end: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    /// Spacing of the written trajectory samples.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dt: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x0: Option<Vec<f64>>,
    /// Input artifact (the `bands` command reads a cycles table).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input: Option<PathBuf>,
}

fn default_model() -> String {
    "jr".into()
}

fn default_out() -> PathBuf {
    PathBuf::from("out")
}

impl Default for RunConfig {
    fn default() -> Self {
        serde_json::from_str("{}").expect("defaults")
    }
}

/// Command-line values that override the file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub model: Option<String>,
    pub preset: Option<String>,
    /// `name=value` strings, applied in order.
    pub set: Vec<String>,
    pub param: Option<String>,
    pub pair: Option<String>,
    pub range: Option<String>,
    pub p_range: Option<String>,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub tol: Vec<String>,
    pub noise: Option<String>,
    pub t_end: Option<f64>,
    pub dt: Option<f64>,
    pub output_dt: Option<f64>,
    pub input: Option<PathBuf>,
}

/// Parses a JSON config; errors name the offending key path.
pub fn parse_config_str(text: &str) -> Result<RunConfig> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        Error::Config { path, msg: e.into_inner().to_string() }
    })
}

/// Reads the optional config file, applies the overrides and validates.
pub fn parse_config(file: Option<&Path>, ov: &Overrides) -> Result<RunConfig> {
    let mut cfg = match file {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| Error::Config { path: p.display().to_string(), msg: e.to_string() })?;
            parse_config_str(&text)?
        }
        None => RunConfig::default(),
    };
    if let Some(m) = &ov.model {
        cfg.model = m.clone();
    }
    if let Some(p) = &ov.preset {
        cfg.preset = Some(p.clone());
    }
    for kv in &ov.set {
        let (k, v) = split_kv(kv, "set")?;
        cfg.set.insert(k.to_string(), v);
    }
    if let Some(p) = &ov.param {
        cfg.param = Some(p.clone());
    }
    if let Some(p) = &ov.pair {
        let v: Vec<&str> = p.split(',').map(str::trim).collect();
        if v.len() != 2 || v.iter().any(|s| s.is_empty()) {
            return Err(Error::Config { path: "pair".into(), msg: format!("expected a,b, got `{p}`") });
        }
        cfg.pair = Some([v[0].to_string(), v[1].to_string()]);
    }
    if let Some(r) = &ov.range {
        cfg.range = Some(RangeSpec::parse(r)?);
    }
    if let Some(r) = &ov.p_range {
        cfg.p_range = Some(RangeSpec::parse(r)?);
    }
    if let Some(o) = &ov.out {
        cfg.out = o.clone();
    }
    if let Some(s) = ov.seed {
        cfg.seed = s;
    }
    for kv in &ov.tol {
        let (k, v) = split_kv(kv, "tol")?;
        cfg.tol.insert(k.to_string(), v);
    }
    if let Some(n) = &ov.noise {
        cfg.noise = Some(NoiseConfig::parse(n)?);
    }
    if ov.t_end.is_some() {
        cfg.t_end = ov.t_end;
    }
    if ov.dt.is_some() {
        cfg.dt = ov.dt;
    }
    if ov.output_dt.is_some() {
        cfg.output_dt = ov.output_dt;
    }
    if ov.input.is_some() {
        cfg.input = ov.input.clone();
    }
    cfg.validate()?;
    Ok(cfg)
}

impl RunConfig {
    pub fn preset_name(&self) -> &str {
        self.preset.as_deref().unwrap_or(&self.model)
    }

    /// Model with the preset parameters and the overrides applied.
    pub fn build_model(&self) -> Result<Model<f64>> {
        let name = self.preset_name();
        let mut m = preset::<f64>(name).map_err(|_| Error::Config { path: "model".into(), msg: format!("unknown model or preset `{name}`") })?;
        for (k, v) in &self.set {
            m.set_param(k, *v).map_err(|e| Error::Config { path: format!("set.{k}"), msg: e.to_string() })?;
        }
        Ok(m)
    }

    pub fn tolerance(&self, name: &str, default: f64) -> f64 {
        self.tol.get(name).copied().unwrap_or(default)
    }

    pub fn validate(&self) -> Result<()> {
        self.build_model()?;
        for (k, v) in &self.tol {
            if !TOLERANCE_NAMES.contains(&k.as_str()) {
                return Err(Error::Config { path: format!("tol.{k}"), msg: format!("unknown tolerance; expected one of {}", TOLERANCE_NAMES.join(", ")) });
            }
            if !(*v > 0.0) {
                return Err(Error::Config { path: format!("tol.{k}"), msg: "must be positive".into() });
            }
        }
        if let Some(r) = &self.range {
            r.validate("range")?;
        }
        if let Some(r) = &self.p_range {
            r.validate("p_range")?;
        }
        let m = self.build_model()?;
        if let Some(p) = &self.param {
            m.param(p).map_err(|_| Error::Config { path: "param".into(), msg: format!("unknown parameter `{p}`") })?;
        }
        if let Some([a, b]) = &self.pair {
            m.param(a).map_err(|_| Error::Config { path: "pair".into(), msg: format!("unknown parameter `{a}`") })?;
            if b != m.input_name() {
                return Err(Error::Config { path: "pair".into(), msg: format!("second parameter must be the input `{}`", m.input_name()) });
            }
        }
        if let Some(n) = &self.noise {
            if !(n.std >= 0.0) {
                return Err(Error::Config { path: "noise.std".into(), msg: "must be non-negative".into() });
            }
        }
        for (name, v) in [("T", self.t_end), ("dt", self.dt), ("output_dt", self.output_dt)] {
            if let Some(v) = v {
                if !(v > 0.0) {
                    return Err(Error::Config { path: name.into(), msg: "must be positive".into() });
                }
            }
        }
        if let Some(x0) = &self.x0 {
            if x0.len() != m.kind().dim() {
                return Err(Error::Config { path: "x0".into(), msg: format!("expected {} components, got {}", m.kind().dim(), x0.len()) });
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jr_preset_from_model_key() {
        let cfg = parse_config_str(r#"{"model":"jr"}"#).unwrap();
        let m = cfg.build_model().unwrap();
        assert!((m.param("j").unwrap() - 12.285).abs() < 1e-12);
        assert!((m.param("G").unwrap() - 6.7692).abs() < 1e-4);
        assert!((m.param("ln_k0").unwrap() - 3.36).abs() < 1e-12);
    }

    #[test]
    fn flag_overrides_file() {
        let ov = Overrides { set: vec!["j=14".into()], ..Default::default() };
        let cfg = parse_config(None, &ov).unwrap();
        let m = cfg.build_model().unwrap();
        assert_eq!(m.param("j").unwrap(), 14.0);
        assert!((m.param("ln_k0").unwrap() - 3.36).abs() < 1e-12);
    }

    #[test]
    fn wc_preset() {
        let cfg = parse_config_str(r#"{"model":"wc"}"#).unwrap();
        let m = cfg.build_model().unwrap();
        assert!((m.param("G1").unwrap() - 6.76923).abs() < 1e-5);
        assert!((m.param("G2").unwrap() - 6.15385).abs() < 1e-5);
        assert!((m.param("d1").unwrap() - 0.2857).abs() < 1e-4);
    }

    #[test]
    fn errors_name_the_key() {
        match parse_config_str(r#"{"model":"jr","noise":{"mean":1,"std":"x"}}"#) {
            Err(Error::Config { path, .. }) => assert_eq!(path, "noise.std"),
            other => panic!("{other:?}"),
        }
        match parse_config_str(r#"{"modle":"jr"}"#) {
            Err(Error::Config { msg, .. }) => assert!(msg.contains("modle")),
            other => panic!("{other:?}"),
        }
        let bad = parse_config_str(r#"{"set":{"jj":1}}"#).unwrap();
        assert!(matches!(bad.validate(), Err(Error::Config { path, .. }) if path == "set.jj"));
        assert!(RangeSpec::parse("3:1").is_err());
        assert!(RangeSpec::parse("1:3:9").is_ok());
        let tol = parse_config_str(r#"{"tol":{"xtoll":1e-9}}"#).unwrap();
        assert!(tol.validate().is_err());
    }
}
