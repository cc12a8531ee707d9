//! Run configuration: defaults, JSON config file and command-line flags, in
//! increasing precedence.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use kerrcap::channel::ChannelParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum InputKind {
    Opt,
    Beta1,
    Beta2,
}

impl std::str::FromStr for InputKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "opt" => Ok(InputKind::Opt),
            "beta1" => Ok(InputKind::Beta1),
            "beta2" => Ok(InputKind::Beta2),
            other => Err(format!("unknown input '{other}', expected opt, beta1 or beta2")),
        }
    }
}

/// Field names match the long flags with '-' replaced by '_'.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub gamma: Option<f64>,
    pub length_km: Option<f64>,
    pub q_noise: Option<f64>,
    pub power_start: Option<f64>,
    pub power_stop: Option<f64>,
    pub power_points: Option<usize>,
    pub inputs: Option<Vec<String>>,
    pub format: Option<Format>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub bits: Option<bool>,
    pub n_traj: Option<usize>,
    pub n_steps: Option<usize>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
        serde_json::from_str(&text).map_err(|e| format!("invalid config {}: {e}", path.display()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerGrid {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
}

impl PowerGrid {
    pub fn validate(&self) -> Result<(), String> {
        if !(self.start > 0.0 && self.start.is_finite()) {
            return Err(format!("--power-start must be > 0, got {}", self.start));
        }
        if !(self.stop > self.start && self.stop.is_finite()) {
            return Err(format!("--power-stop must exceed --power-start, got {}", self.stop));
        }
        if self.points < 2 {
            return Err(format!("--power-points must be >= 2, got {}", self.points));
        }
        Ok(())
    }

    /// Log-spaced powers in mW.
    pub fn powers(&self) -> Vec<f64> {
        let (a, b) = (self.start.ln(), self.stop.ln());
        (0..self.points)
            .map(|i| {
                if i == 0 {
                    self.start
                } else if i + 1 == self.points {
                    self.stop
                } else {
                    (a + (b - a) * i as f64 / (self.points - 1) as f64).exp()
                }
            })
            .collect()
    }
}

impl Default for PowerGrid {
    fn default() -> Self {
        PowerGrid {
            start: 1e-3,
            stop: 5e3,
            points: 50,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub params: ChannelParams,
    pub grid: PowerGrid,
    pub inputs: Vec<InputKind>,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub bits: bool,
    pub seed: u64,
    pub n_traj: Option<usize>,
    pub n_steps: Option<usize>,
}

pub const DEFAULT_SEED: u64 = 20140901;

/// Flag values; `None` defers to the config file, then to the defaults.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub gamma: Option<f64>,
    pub length_km: Option<f64>,
    pub q_noise: Option<f64>,
    pub power_start: Option<f64>,
    pub power_stop: Option<f64>,
    pub power_points: Option<usize>,
    pub inputs: Option<Vec<InputKind>>,
    pub format: Option<Format>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub bits: bool,
    pub n_traj: Option<usize>,
    pub n_steps: Option<usize>,
}

impl RunConfig {
    pub fn resolve(flags: Overrides, file: FileConfig) -> Result<Self, String> {
        let d = ChannelParams::default();
        let params = ChannelParams::new(
            flags.gamma.or(file.gamma).unwrap_or(d.gamma),
            flags.length_km.or(file.length_km).unwrap_or(d.length),
            flags.q_noise.or(file.q_noise).unwrap_or(d.noise_density),
        )
        .map_err(|e| e.to_string())?;
        if !(params.noise_density > 0.0) {
            return Err("--q-noise must be > 0".into());
        }
        let g = PowerGrid::default();
        let grid = PowerGrid {
            start: flags.power_start.or(file.power_start).unwrap_or(g.start),
            stop: flags.power_stop.or(file.power_stop).unwrap_or(g.stop),
            points: flags.power_points.or(file.power_points).unwrap_or(g.points),
        };
        grid.validate()?;
        let inputs = match (flags.inputs, file.inputs) {
            (Some(v), _) => v,
            (None, Some(v)) => v.iter().map(|s| s.parse()).collect::<Result<_, _>>()?,
            (None, None) => vec![InputKind::Opt, InputKind::Beta1, InputKind::Beta2],
        };
        if inputs.is_empty() {
            return Err("--inputs must name at least one input".into());
        }
        Ok(RunConfig {
            params,
            grid,
            inputs,
            out: flags.out.or(file.out),
            format: flags.format.or(file.format).unwrap_or(Format::Csv),
            bits: flags.bits || file.bits.unwrap_or(false),
            seed: flags.seed.or(file.seed).unwrap_or(DEFAULT_SEED),
            n_traj: flags.n_traj.or(file.n_traj),
            n_steps: flags.n_steps.or(file.n_steps),
        })
    }

    /// Factor converting nats to the requested unit.
    pub fn info_scale(&self) -> f64 {
        if self.bits {
            1.0 / std::f64::consts::LN_2
        } else {
            1.0
        }
    }

    pub fn info_unit(&self) -> &'static str {
        if self.bits {
            "bits"
        } else {
            "nats"
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file() {
        let file: FileConfig = serde_json::from_str(r#"{"gamma": 2e-3, "power_points": 7, "inputs": ["beta1"]}"#).unwrap();
        let flags = Overrides {
            gamma: Some(5e-4),
            ..Overrides::default()
        };
        let cfg = RunConfig::resolve(flags, file).unwrap();
        assert_eq!(cfg.params.gamma, 5e-4);
        assert_eq!(cfg.grid.points, 7);
        assert_eq!(cfg.inputs, vec![InputKind::Beta1]);
        assert_eq!(cfg.params.length, 1000.0);
    }

    #[test]
    fn unknown_config_fields_rejected() {
        assert!(serde_json::from_str::<FileConfig>(r#"{"gama": 1}"#).is_err());
    }

    #[test]
    fn grid_is_log_spaced_and_increasing() {
        let g = PowerGrid {
            start: 1e-3,
            stop: 1e3,
            points: 7,
        };
        let p = g.powers();
        assert_eq!(p.len(), 7);
        assert!((p[1] / 1e-2 - 1.0).abs() < 1e-12);
        assert_eq!((p[0], p[6]), (1e-3, 1e3));
        assert!(p.windows(2).all(|w| w[1] > w[0]));
        assert!(PowerGrid { stop: 1e-3, ..g }.validate().is_err());
    }
}
