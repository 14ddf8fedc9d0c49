//! Run configuration: flat `section.key = value` text, overridable per key
//! from the command line.
//!
//! ```text
//! # reference fibre
//! fiber.radius_nm = 152.5
//! dipole.theta_deg = 20
//! sweep.theta_steps = 361
//! ```
//!
//! Blank lines and lines starting with `#` are ignored. Unknown keys are
//! rejected. Later assignments win, and command-line flags are applied after
//! the file.

use crate::coupling::{DipolePose, PropagationDirection};
use crate::error::{Error, Result};
use crate::mode::FiberSpec;
use crate::polarimetry::CompensationMode;

/// `(key, default, help)` for every accepted key.
pub const KEYS: &[(&str, &str, &str)] = &[
    ("fiber.radius_nm", "152.5", "fibre radius a, nm"),
    ("fiber.wavelength_nm", "637", "vacuum wavelength, nm"),
    ("fiber.n_core", "1.457", "core (silica) refractive index"),
    ("fiber.n_clad", "1.0", "cladding refractive index"),
    ("dipole.alpha_deg", "0", "dipole azimuth alpha, degrees"),
    ("dipole.theta_deg", "0", "dipole tilt theta from the fibre axis, degrees"),
    ("dipole.gap_nm", "9", "dipole height above the fibre surface, nm"),
    ("dipole.direction", "+z", "propagation direction analysed: +z or -z"),
    ("sweep.theta_min", "-90", "first tilt of theta sweeps, degrees"),
    ("sweep.theta_max", "90", "last tilt of theta sweeps, degrees"),
    ("sweep.theta_steps", "181", "number of tilts"),
    ("sweep.alpha_min", "-90", "first azimuth of alpha sweeps, degrees"),
    ("sweep.alpha_max", "90", "last azimuth of alpha sweeps, degrees"),
    ("sweep.alpha_steps", "19", "number of azimuths"),
    ("sweep.chi_min", "-40", "first beam angle relative to chi_max, degrees"),
    ("sweep.chi_max", "40", "last beam angle relative to chi_max, degrees"),
    ("sweep.chi_steps", "81", "number of beam angles"),
    ("scatterer.alpha_ratio", "0.1", "transverse/longitudinal polarizability ratio"),
    ("scatterer.chi_max_deg", "0", "beam angle aligned with the rod, degrees"),
    ("scatterer.noise", "0", "relative multiplicative noise on Malus samples"),
    ("compensate.mode", "full", "compensator family: full or single_berek"),
    ("compensate.trials", "1", "number of consecutive seeds to compensate"),
    ("seed", "0", "random seed"),
    ("output", "", "output file (standard output when empty)"),
];

/// Inclusive, uniformly spaced grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

impl Grid {
    pub fn values(&self) -> Vec<f64> {
        let n = self.steps;
        (0..n)
            .map(|i| {
                if i == n - 1 {
                    self.max
                } else {
                    self.min + (self.max - self.min) * i as f64 / (n - 1) as f64
                }
            })
            .collect()
    }

    fn validate(&self, name: &str) -> Result<()> {
        if self.steps < 2 {
            return Err(Error::Config(format!("{name}: steps must be at least 2")));
        }
        if !(self.min < self.max) {
            return Err(Error::Config(format!("{name}: min must be below max")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub fiber: FiberSpec,
    pub alpha_deg: f64,
    pub theta_deg: f64,
    pub gap_nm: f64,
    pub direction: PropagationDirection,
    pub theta_grid: Grid,
    pub alpha_grid: Grid,
    /// Beam angles relative to `chi_max_deg`.
    pub chi_grid: Grid,
    pub alpha_ratio: f64,
    pub chi_max_deg: f64,
    pub noise: f64,
    pub compensation: CompensationMode,
    pub trials: u64,
    pub seed: u64,
    pub output: Option<String>,
}

/// Parse `key = value` lines into ordered pairs.
pub fn parse_config_text(text: &str) -> Result<Vec<(String, String)>> {
    let mut pairs = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("line {}: expected 'key = value'", lineno + 1)))?;
        let key = key.trim();
        if key.is_empty() {
            return Err(Error::Config(format!("line {}: empty key", lineno + 1)));
        }
        pairs.push((key.to_string(), value.trim().to_string()));
    }
    Ok(pairs)
}

fn lookup<'a>(values: &'a [(String, String)], key: &str) -> &'a str {
    values
        .iter()
        .rev()
        .find(|(k, _)| k == key)
        .map(|(_, v)| v.as_str())
        .unwrap_or_else(|| {
            KEYS.iter()
                .find(|(k, _, _)| *k == key)
                .map(|(_, d, _)| *d)
                .unwrap_or("")
        })
}

fn number(values: &[(String, String)], key: &str) -> Result<f64> {
    let raw = lookup(values, key);
    let v: f64 = raw
        .parse()
        .map_err(|_| Error::Config(format!("{key}: '{raw}' is not a number")))?;
    if !v.is_finite() {
        return Err(Error::Config(format!("{key}: value must be finite")));
    }
    Ok(v)
}

fn integer(values: &[(String, String)], key: &str) -> Result<u64> {
    let raw = lookup(values, key);
    raw.parse()
        .map_err(|_| Error::Config(format!("{key}: '{raw}' is not a non-negative integer")))
}

impl RunConfig {
    /// Build from `(key, value)` assignments layered over the defaults.
    pub fn from_pairs(values: &[(String, String)]) -> Result<Self> {
        for (k, _) in values {
            if !KEYS.iter().any(|(known, _, _)| known == k) {
                return Err(Error::Config(format!("unknown key '{k}'")));
            }
        }
        let fiber = FiberSpec {
            radius_nm: number(values, "fiber.radius_nm")?,
            wavelength_nm: number(values, "fiber.wavelength_nm")?,
            n_core: number(values, "fiber.n_core")?,
            n_clad: number(values, "fiber.n_clad")?,
        };
        let grid = |prefix: &str| -> Result<Grid> {
            Ok(Grid {
                min: number(values, &format!("sweep.{prefix}_min"))?,
                max: number(values, &format!("sweep.{prefix}_max"))?,
                steps: integer(values, &format!("sweep.{prefix}_steps"))? as usize,
            })
        };
        let output = lookup(values, "output");
        let cfg = RunConfig {
            fiber,
            alpha_deg: number(values, "dipole.alpha_deg")?,
            theta_deg: number(values, "dipole.theta_deg")?,
            gap_nm: number(values, "dipole.gap_nm")?,
            direction: lookup(values, "dipole.direction").parse()?,
            theta_grid: grid("theta")?,
            alpha_grid: grid("alpha")?,
            chi_grid: grid("chi")?,
            alpha_ratio: number(values, "scatterer.alpha_ratio")?,
            chi_max_deg: number(values, "scatterer.chi_max_deg")?,
            noise: number(values, "scatterer.noise")?,
            compensation: lookup(values, "compensate.mode").parse()?,
            trials: integer(values, "compensate.trials")?,
            seed: integer(values, "seed")?,
            output: (!output.is_empty()).then(|| output.to_string()),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.fiber
            .validate()
            .map_err(|e| Error::Config(e.to_string()))?;
        DipolePose::new(self.alpha_deg, self.theta_deg, self.gap_nm)
            .map_err(|e| Error::Config(e.to_string()))?;
        self.theta_grid.validate("sweep.theta")?;
        self.alpha_grid.validate("sweep.alpha")?;
        self.chi_grid.validate("sweep.chi")?;
        for (name, g) in [("sweep.theta", &self.theta_grid), ("sweep.alpha", &self.alpha_grid)] {
            if g.min < -90.0 || g.max > 90.0 {
                return Err(Error::Config(format!("{name}: range must lie within [-90, 90]")));
            }
        }
        if self.noise < 0.0 {
            return Err(Error::Config("scatterer.noise must be non-negative".into()));
        }
        if self.trials == 0 {
            return Err(Error::Config("compensate.trials must be at least 1".into()));
        }
        Ok(())
    }

    pub fn pose(&self) -> DipolePose {
        DipolePose {
            azimuth_alpha_deg: self.alpha_deg,
            tilt_theta_deg: self.theta_deg,
            surface_gap_nm: self.gap_nm,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pairs(text: &str) -> Vec<(String, String)> {
        parse_config_text(text).unwrap()
    }

    #[test]
    fn defaults_reproduce_reference_fibre() {
        let cfg = RunConfig::from_pairs(&[]).unwrap();
        assert_eq!(cfg.fiber, FiberSpec::nanofiber_637());
        assert_eq!(cfg.gap_nm, 9.0);
        assert_eq!(cfg.output, None);
        assert_eq!(cfg.theta_grid.values().len(), 181);
    }

    #[test]
    fn parses_comments_and_overrides() {
        let p = pairs("# comment\n\nfiber.radius_nm = 150\n  dipole.theta_deg=20  \nfiber.radius_nm = 151\n");
        let cfg = RunConfig::from_pairs(&p).unwrap();
        assert_eq!(cfg.fiber.radius_nm, 151.0);
        assert_eq!(cfg.theta_deg, 20.0);
    }

    #[test]
    fn rejects_malformed_lines() {
        assert!(parse_config_text("fiber.radius_nm 150").is_err());
        assert!(parse_config_text(" = 3").is_err());
    }

    #[test]
    fn rejects_bad_values() {
        for text in [
            "fiber.radius_nm = abc",
            "fiber.unknown = 1",
            "sweep.theta_steps = 1",
            "sweep.theta_min = 10\nsweep.theta_max = 5",
            "sweep.theta_max = 120",
            "fiber.n_core = 0.9",
            "dipole.direction = up",
            "compensate.mode = half",
            "fiber.radius_nm = 1",
            "seed = -3",
            "fiber.radius_nm = inf",
        ] {
            assert!(
                matches!(RunConfig::from_pairs(&pairs(text)), Err(Error::Config(_))),
                "{text}"
            );
        }
    }

    #[test]
    fn grid_endpoints_exact() {
        let g = Grid {
            min: -43.1,
            max: 43.1,
            steps: 7,
        };
        let v = g.values();
        assert_eq!(v[0], -43.1);
        assert_eq!(v[6], 43.1);
    }
}
