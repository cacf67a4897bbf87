//! Run settings: defaults, then a flat JSON config file, then flags.

use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::Serialize;
use serde_json::{Map, Value};
use stieltjes_lab::inversion::InversionConfig;
use stieltjes_lab::{QuadratureConfig, TauGrid};

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Settings {
    pub quadrature: QuadratureConfig,
    pub tau_max: f64,
    pub tau_step: f64,
    pub inversion: InversionConfig,
}

impl Default for Settings {
    fn default() -> Self {
        let grid = TauGrid::default();
        Self {
            quadrature: QuadratureConfig::default(),
            tau_max: grid.tau_max(),
            tau_step: grid.step(),
            inversion: InversionConfig::default(),
        }
    }
}

/// Flag values that override the config file when present.
#[derive(Debug, Clone, Copy, Default)]
pub struct Overrides {
    pub abs_tol: Option<f64>,
    pub rel_tol: Option<f64>,
    pub tau_max: Option<f64>,
    pub tau_step: Option<f64>,
    pub n_terms: Option<usize>,
    pub tau_cap: Option<f64>,
    pub noise_floor: Option<f64>,
    pub target_tol: Option<f64>,
}

fn number(key: &str, v: &Value) -> Result<f64> {
    v.as_f64().with_context(|| format!("config key `{key}` must be a number"))
}

fn count(key: &str, v: &Value) -> Result<u64> {
    v.as_u64().with_context(|| format!("config key `{key}` must be a non-negative integer"))
}

impl Settings {
    pub fn load(file: Option<&Path>, flags: &Overrides) -> Result<Self> {
        let mut s = Self::default();
        if let Some(path) = file {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            let doc: Value = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
            let Value::Object(map) = doc else {
                bail!("config file must hold a JSON object");
            };
            s.apply_file(&map)?;
        }
        s.apply_flags(flags);
        s.quadrature.validate()?;
        s.tau_grid()?;
        Ok(s)
    }

    fn apply_file(&mut self, map: &Map<String, Value>) -> Result<()> {
        let q = &mut self.quadrature;
        let inv = &mut self.inversion;
        for (key, v) in map {
            match key.as_str() {
                "abs_tol" => q.abs_tol = number(key, v)?,
                "rel_tol" => q.rel_tol = number(key, v)?,
                "tail_cut" => q.tail_cut = number(key, v)?,
                "pv_window_factor" => q.pv_window_factor = number(key, v)?,
                "sing_series_delta" => q.sing_series_delta = number(key, v)?,
                "max_depth" => q.max_depth = u32::try_from(count(key, v)?).context("max_depth out of range")?,
                "tau_max" => self.tau_max = number(key, v)?,
                "tau_step" => self.tau_step = number(key, v)?,
                "n_terms" => inv.n_terms = count(key, v)? as usize,
                "tau_cap" => inv.tau_cap = number(key, v)?,
                "noise_floor" => inv.noise_floor = number(key, v)?,
                "target_tol" => inv.target_tol = number(key, v)?,
                other => bail!("unknown config key `{other}`"),
            }
        }
        Ok(())
    }

    fn apply_flags(&mut self, f: &Overrides) {
        let set = |dst: &mut f64, src: Option<f64>| {
            if let Some(v) = src {
                *dst = v;
            }
        };
        set(&mut self.quadrature.abs_tol, f.abs_tol);
        set(&mut self.quadrature.rel_tol, f.rel_tol);
        set(&mut self.tau_max, f.tau_max);
        set(&mut self.tau_step, f.tau_step);
        set(&mut self.inversion.tau_cap, f.tau_cap);
        set(&mut self.inversion.noise_floor, f.noise_floor);
        set(&mut self.inversion.target_tol, f.target_tol);
        if let Some(n) = f.n_terms {
            self.inversion.n_terms = n;
        }
    }

    pub fn tau_grid(&self) -> Result<TauGrid> {
        Ok(TauGrid::new(self.tau_max, self.tau_step)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    #[test]
    fn flags_beat_file_beat_defaults() {
        let mut file = tempfile::NamedTempFile::new().unwrap();
        write!(file, r#"{{"abs_tol": 1e-12, "rel_tol": 1e-9, "n_terms": 12}}"#).unwrap();
        let flags = Overrides {
            rel_tol: Some(1e-10),
            ..Default::default()
        };
        let s = Settings::load(Some(file.path()), &flags).unwrap();
        assert_eq!(s.quadrature.abs_tol, 1e-12);
        assert_eq!(s.quadrature.rel_tol, 1e-10);
        assert_eq!(s.inversion.n_terms, 12);
        assert_eq!(s.quadrature.max_depth, QuadratureConfig::default().max_depth);
    }

    #[test]
    fn unknown_keys_and_bad_values_fail() {
        let mut file = tempfile::NamedTempFile::new().unwrap();
        write!(file, r#"{{"abs_tol": "tiny"}}"#).unwrap();
        assert!(Settings::load(Some(file.path()), &Overrides::default()).is_err());
        let mut file = tempfile::NamedTempFile::new().unwrap();
        write!(file, r#"{{"colour": 1}}"#).unwrap();
        assert!(Settings::load(Some(file.path()), &Overrides::default()).is_err());
        let flags = Overrides {
            abs_tol: Some(-1.0),
            ..Default::default()
        };
        assert!(Settings::load(None, &flags).is_err());
    }
}
