//! Resolved measurement parameters and the `key=value` layer on top of
//! them (presets, config files, `--set` overrides all funnel through
//! [`Params::set`]).

use std::path::Path;

use crate::error::{Error, Result};
use crate::fockspace::DimPolicy;
use crate::qspecial::DeformationParameter;
use crate::weakmeas::{CoherentLabel, MeasurementConfig, Observable};

/// Flat parameter record with one entry per `--set` key.
#[derive(Debug, Clone)]
pub struct Params {
    pub q: f64,
    pub g: f64,
    pub z_modulus: f64,
    pub z_phase: f64,
    pub alpha_modulus: f64,
    pub alpha_phase: f64,
    pub beta_modulus: f64,
    pub beta_phase: f64,
    pub observable: Observable,
}

impl Default for Params {
    fn default() -> Self {
        Params {
            q: 0.5,
            g: 0.3,
            z_modulus: 1.0,
            z_phase: 0.0,
            alpha_modulus: 1.0,
            alpha_phase: 0.0,
            beta_modulus: 1.0,
            beta_phase: 0.0,
            observable: Observable::X1,
        }
    }
}

pub const KEYS: &[&str] = &[
    "q",
    "g",
    "z_modulus",
    "z_phase",
    "alpha_modulus",
    "alpha_phase",
    "beta_modulus",
    "beta_phase",
    "observable",
];

impl Params {
    /// Applies one `key=value` assignment. Phases accept `pi` expressions
    /// such as `pi/2`, `7pi/8` or `-0.5pi`.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "q" => self.q = parse_number(key, value)?,
            "g" => self.g = parse_number(key, value)?,
            "z_modulus" => self.z_modulus = parse_number(key, value)?,
            "z_phase" => self.z_phase = parse_angle(key, value)?,
            "alpha_modulus" => self.alpha_modulus = parse_number(key, value)?,
            "alpha_phase" => self.alpha_phase = parse_angle(key, value)?,
            "beta_modulus" => self.beta_modulus = parse_number(key, value)?,
            "beta_phase" => self.beta_phase = parse_angle(key, value)?,
            "observable" => self.observable = value.parse()?,
            other => {
                return Err(Error::Config(format!(
                    "unknown parameter '{other}' (valid keys: {})",
                    KEYS.join(", ")
                )))
            }
        }
        Ok(())
    }

    /// Applies a `KEY=VALUE` string as passed to `--set`.
    pub fn apply_assignment(&mut self, assignment: &str) -> Result<()> {
        let (key, value) = assignment.split_once('=').ok_or_else(|| {
            Error::Config(format!("expected KEY=VALUE, got '{assignment}'"))
        })?;
        self.set(key.trim(), value.trim())
    }

    /// Reads a config file of `key = value` lines. Blank lines and lines
    /// starting with `#` are ignored.
    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path)?;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            self.apply_assignment(line).map_err(|e| {
                Error::Config(format!("{}:{}: {e}", path.display(), lineno + 1))
            })?;
        }
        Ok(())
    }

    /// Builds a validated measurement configuration from the record.
    pub fn build(&self, policy: DimPolicy) -> Result<MeasurementConfig> {
        let q = DeformationParameter::new(self.q)?;
        Ok(MeasurementConfig::new(
            q,
            self.g,
            CoherentLabel::new(self.z_modulus, self.z_phase)?,
            CoherentLabel::new(self.alpha_modulus, self.alpha_phase)?,
            CoherentLabel::new(self.beta_modulus, self.beta_phase)?,
            self.observable,
        )?
        .with_dim_policy(policy))
    }

    pub fn alpha(&self) -> Result<CoherentLabel> {
        CoherentLabel::new(self.alpha_modulus, self.alpha_phase)
    }

    pub fn beta(&self) -> Result<CoherentLabel> {
        CoherentLabel::new(self.beta_modulus, self.beta_phase)
    }

    pub fn z(&self) -> Result<CoherentLabel> {
        CoherentLabel::new(self.z_modulus, self.z_phase)
    }
}

fn parse_number(key: &str, value: &str) -> Result<f64> {
    value
        .trim()
        .parse::<f64>()
        .map_err(|_| Error::Config(format!("invalid number '{value}' for {key}")))
}

/// Parses an angle: either a plain float or `[coef]pi[/den]`.
fn parse_angle(key: &str, value: &str) -> Result<f64> {
    let s = value.trim();
    let Some(idx) = s.find("pi") else {
        return parse_number(key, s);
    };
    let (coef_str, rest) = (&s[..idx], &s[idx + 2..]);
    let coef = match coef_str.trim() {
        "" | "+" => 1.0,
        "-" => -1.0,
        c => c
            .parse::<f64>()
            .map_err(|_| Error::Config(format!("invalid angle '{value}' for {key}")))?,
    };
    let den = match rest.trim() {
        "" => 1.0,
        r => {
            let r = r.strip_prefix('/').ok_or_else(|| {
                Error::Config(format!("invalid angle '{value}' for {key}"))
            })?;
            let d = r
                .trim()
                .parse::<f64>()
                .map_err(|_| Error::Config(format!("invalid angle '{value}' for {key}")))?;
            if d == 0.0 {
                return Err(Error::Config(format!("zero denominator in angle '{value}'")));
            }
            d
        }
    };
    Ok(coef * std::f64::consts::PI / den)
}
