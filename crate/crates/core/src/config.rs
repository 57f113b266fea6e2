//! Run configuration and its flat `key = value` text format.
//!
//! ```text
//! # benchmark defaults
//! level = 2
//! youngs_modulus = 2100000000.0
//! poisson_ratio = 0.277
//! phi = 1.0
//! eps = 1e-6
//! max_iter = 100
//! x_range = 0.0, 2.0
//! y_range = 0.0, 1.0
//! z_range = 0.1, 1.0
//! foundation_z = 0.0
//! traction_right = -500000000.0, 0.0, 0.0
//! traction_top = 0.0, 0.0, -100000000.0
//! ```
//!
//! Optional keys: `divisions = ex, ey, ez` (overrides `level`),
//! `export_vtk`, `log_csv`, `oracle_check`, `full_newton_debug`,
//! `sweep = A..B`. Blank lines and `#` comments are ignored.

use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::fem::{ElasticParams, TractionSpec};
use crate::mesh::{DomainSpec, Interval, MeshLevelSpec};

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub level: u32,
    pub divisions: Option<(usize, usize, usize)>,
    pub domain: DomainSpec,
    pub elastic: ElasticParams,
    pub tractions: TractionSpec,
    pub phi: f64,
    pub eps: f64,
    pub max_iter: usize,
    pub export_vtk: Option<PathBuf>,
    pub log_csv: Option<PathBuf>,
    pub oracle_check: bool,
    pub full_newton_debug: bool,
    pub sweep: Option<(u32, u32)>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            level: 2,
            divisions: None,
            domain: DomainSpec::benchmark(),
            elastic: ElasticParams::benchmark(),
            tractions: TractionSpec::benchmark(),
            phi: 1.0,
            eps: 1e-6,
            max_iter: 100,
            export_vtk: None,
            log_csv: None,
            oracle_check: false,
            full_newton_debug: false,
            sweep: None,
        }
    }
}

fn parse_f64(key: &str, value: &str) -> Result<f64> {
    value
        .trim()
        .parse::<f64>()
        .map_err(|_| Error::Config(format!("{key}: expected a number, got {value:?}")))
}

fn parse_list<const N: usize>(key: &str, value: &str) -> Result<[f64; N]> {
    let parts: Vec<&str> = value.split(',').map(str::trim).collect();
    if parts.len() != N {
        return Err(Error::Config(format!(
            "{key}: expected {N} comma-separated numbers, got {value:?}"
        )));
    }
    let mut out = [0.0; N];
    for (o, p) in out.iter_mut().zip(parts) {
        *o = parse_f64(key, p)?;
    }
    Ok(out)
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value.trim() {
        "true" | "1" | "yes" | "on" => Ok(true),
        "false" | "0" | "no" | "off" => Ok(false),
        other => Err(Error::Config(format!("{key}: expected true/false, got {other:?}"))),
    }
}

fn parse_usize(key: &str, value: &str) -> Result<usize> {
    value
        .trim()
        .parse::<usize>()
        .map_err(|_| Error::Config(format!("{key}: expected a nonnegative integer, got {value:?}")))
}

/// Parses `A..B` (inclusive).
pub fn parse_sweep(value: &str) -> Result<(u32, u32)> {
    let (a, b) = value
        .trim()
        .split_once("..")
        .ok_or_else(|| Error::Config(format!("sweep: expected A..B, got {value:?}")))?;
    let parse = |s: &str| {
        s.trim()
            .parse::<u32>()
            .map_err(|_| Error::Config(format!("sweep: bad level {s:?}")))
    };
    let (a, b) = (parse(a)?, parse(b)?);
    if a == 0 || b < a {
        return Err(Error::Config(format!("sweep: empty or invalid range {a}..{b}")));
    }
    Ok((a, b))
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!("line {}: expected `key = value`, got {raw:?}", lineno + 1))
            })?;
            cfg.set(key.trim(), value.trim())?;
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "level" => {
                self.level = value
                    .parse()
                    .map_err(|_| Error::Config(format!("level: expected a positive integer, got {value:?}")))?
            }
            "divisions" => {
                let [ex, ey, ez] = parse_list::<3>(key, value)?;
                let to_count = |v: f64| {
                    if v >= 1.0 && v.fract() == 0.0 {
                        Ok(v as usize)
                    } else {
                        Err(Error::Config(format!("divisions: {v} is not a positive integer")))
                    }
                };
                self.divisions = Some((to_count(ex)?, to_count(ey)?, to_count(ez)?));
            }
            "x_range" => {
                let [lo, hi] = parse_list::<2>(key, value)?;
                self.domain.x_range = Interval::new(lo, hi);
            }
            "y_range" => {
                let [lo, hi] = parse_list::<2>(key, value)?;
                self.domain.y_range = Interval::new(lo, hi);
            }
            "z_range" => {
                let [lo, hi] = parse_list::<2>(key, value)?;
                self.domain.z_range = Interval::new(lo, hi);
            }
            "foundation_z" => self.domain.foundation_z = parse_f64(key, value)?,
            "youngs_modulus" => self.elastic.youngs_modulus = parse_f64(key, value)?,
            "poisson_ratio" => self.elastic.poisson_ratio = parse_f64(key, value)?,
            "traction_right" => self.tractions.right = parse_list::<3>(key, value)?,
            "traction_top" => self.tractions.top = parse_list::<3>(key, value)?,
            "phi" => self.phi = parse_f64(key, value)?,
            "eps" => self.eps = parse_f64(key, value)?,
            "max_iter" => self.max_iter = parse_usize(key, value)?,
            "export_vtk" => self.export_vtk = (!value.is_empty()).then(|| PathBuf::from(value)),
            "log_csv" => self.log_csv = (!value.is_empty()).then(|| PathBuf::from(value)),
            "oracle_check" => self.oracle_check = parse_bool(key, value)?,
            "full_newton_debug" => self.full_newton_debug = parse_bool(key, value)?,
            "sweep" => self.sweep = Some(parse_sweep(value)?),
            other => return Err(Error::Config(format!("unknown key {other:?}"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        self.domain.validate().map_err(|e| Error::Config(e.to_string()))?;
        self.elastic.validate().map_err(|e| Error::Config(e.to_string()))?;
        self.tractions.validate().map_err(|e| Error::Config(e.to_string()))?;
        self.mesh_spec().map_err(|e| Error::Config(e.to_string()))?;
        if !(self.phi >= 0.0 && self.phi.is_finite()) {
            return Err(Error::Config(format!("phi must be nonnegative, got {}", self.phi)));
        }
        if !(self.eps > 0.0 && self.eps.is_finite()) {
            return Err(Error::Config(format!("eps must be positive, got {}", self.eps)));
        }
        if self.max_iter == 0 {
            return Err(Error::Config("max_iter must be at least 1".into()));
        }
        Ok(())
    }

    pub fn mesh_spec(&self) -> Result<MeshLevelSpec> {
        match self.divisions {
            Some((ex, ey, ez)) => MeshLevelSpec::from_divisions(ex, ey, ez),
            None => MeshLevelSpec::from_level(self.level),
        }
    }

    /// The effective configuration in the format accepted by [`RunConfig::parse`].
    pub fn to_config_string(&self) -> String {
        let mut out = String::new();
        let mut line = |k: &str, v: String| {
            out.push_str(k);
            out.push_str(" = ");
            out.push_str(&v);
            out.push('\n');
        };
        let list = |v: &[f64]| v.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(", ");
        line("level", self.level.to_string());
        if let Some((ex, ey, ez)) = self.divisions {
            line("divisions", format!("{ex}, {ey}, {ez}"));
        }
        let d = &self.domain;
        line("x_range", list(&[d.x_range.lo, d.x_range.hi]));
        line("y_range", list(&[d.y_range.lo, d.y_range.hi]));
        line("z_range", list(&[d.z_range.lo, d.z_range.hi]));
        line("foundation_z", format!("{:?}", d.foundation_z));
        line("youngs_modulus", format!("{:?}", self.elastic.youngs_modulus));
        line("poisson_ratio", format!("{:?}", self.elastic.poisson_ratio));
        line("traction_right", list(&self.tractions.right));
        line("traction_top", list(&self.tractions.top));
        line("phi", format!("{:?}", self.phi));
        line("eps", format!("{:?}", self.eps));
        line("max_iter", self.max_iter.to_string());
        if let Some(p) = &self.export_vtk {
            line("export_vtk", p.display().to_string());
        }
        if let Some(p) = &self.log_csv {
            line("log_csv", p.display().to_string());
        }
        line("oracle_check", self.oracle_check.to_string());
        line("full_newton_debug", self.full_newton_debug.to_string());
        if let Some((a, b)) = self.sweep {
            line("sweep", format!("{a}..{b}"));
        }
        out
    }
}
