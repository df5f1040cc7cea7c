//! Run configuration: a flat `key = value` file overlaid by command-line
//! flags.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use gaugeqed::readout::ReadoutModel;
use gaugeqed::switching::RampShape;

use crate::error::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Spectrum,
    Photodetect,
    Readout,
    Vacuum,
    Entropy,
    Circuit,
    Switch,
    Selftest,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GaugeChoice {
    Coulomb,
    Dipole,
    Flux,
    Charge,
    Both,
}

impl GaugeChoice {
    fn parse(s: &str) -> Result<Self, CliError> {
        Ok(match s {
            "coulomb" => Self::Coulomb,
            "dipole" => Self::Dipole,
            "flux" => Self::Flux,
            "charge" => Self::Charge,
            "both" => Self::Both,
            other => return Err(CliError::Config(format!("unknown gauge {other:?}"))),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Protocol {
    /// Off-switch from the interacting ground state.
    Off,
    /// On then off, starting from `|g,0⟩`.
    OnOff,
}

/// Inclusive grid `start, start + step, …, end`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid {
    pub start: f64,
    pub step: f64,
    pub end: f64,
}

impl Grid {
    pub fn parse(s: &str) -> Result<Self, CliError> {
        let bad = || CliError::Config(format!("grid {s:?} is not start:step:end or a number"));
        let parts: Vec<f64> = s
            .split(':')
            .map(|p| p.trim().parse::<f64>().map_err(|_| bad()))
            .collect::<Result<_, _>>()?;
        let grid = match parts[..] {
            [v] => Grid {
                start: v,
                step: 1.0,
                end: v,
            },
            [start, step, end] => Grid { start, step, end },
            _ => return Err(bad()),
        };
        grid.validate()?;
        Ok(grid)
    }

    fn validate(&self) -> Result<(), CliError> {
        let finite = self.start.is_finite() && self.step.is_finite() && self.end.is_finite();
        if !finite || self.step <= 0.0 || self.end < self.start || self.start < 0.0 {
            return Err(CliError::Config(format!(
                "invalid grid {}:{}:{} (need 0 <= start <= end and step > 0)",
                self.start, self.step, self.end
            )));
        }
        Ok(())
    }

    pub fn points(&self) -> Vec<f64> {
        let n = ((self.end - self.start) / self.step + 1e-9).floor() as usize;
        (0..=n).map(|k| self.start + self.step * k as f64).collect()
    }
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub command: Command,
    pub eta: Grid,
    pub omega0: f64,
    pub theta: f64,
    pub gauge: GaugeChoice,
    pub cutoff: Option<usize>,
    pub out: Option<PathBuf>,
    pub ramp: f64,
    pub shape: RampShape,
    pub levels: usize,
    pub omega_b: f64,
    pub g_b: f64,
    pub readout_model: ReadoutModel,
    pub protocol: Protocol,
    pub t_off: f64,
    pub t_end: f64,
    pub samples: usize,
    pub wrong_dipole: bool,
    pub max_phase: f64,
    pub halving_tol: f64,
}

pub const KEYS: [&str; 19] = [
    "eta",
    "omega0",
    "theta",
    "gauge",
    "cutoff",
    "out",
    "ramp",
    "shape",
    "levels",
    "omega_b",
    "g_b",
    "readout_model",
    "protocol",
    "t_off",
    "t_end",
    "samples",
    "wrong_dipole",
    "max_phase",
    "halving_tol",
];

/// Reads `key = value` lines; `#` starts a comment.
pub fn read_file(path: &Path) -> Result<BTreeMap<String, String>, CliError> {
    let text =
        fs::read_to_string(path).map_err(|e| CliError::Path(format!("cannot read config {}: {e}", path.display())))?;
    let mut map = BTreeMap::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = parse_pair(line).map_err(|e| CliError::Config(format!("{}:{}: {e}", path.display(), n + 1)))?;
        map.insert(k, v);
    }
    Ok(map)
}

pub fn parse_pair(s: &str) -> Result<(String, String), CliError> {
    let (k, v) = s
        .split_once('=')
        .ok_or_else(|| CliError::Config(format!("expected key=value, got {s:?}")))?;
    let key = k.trim().to_string();
    if !KEYS.contains(&key.as_str()) {
        return Err(CliError::Config(format!("unknown key {key:?}")));
    }
    Ok((key, v.trim().to_string()))
}

fn num<T: std::str::FromStr>(map: &BTreeMap<String, String>, key: &str, default: T) -> Result<T, CliError> {
    match map.get(key) {
        None => Ok(default),
        Some(v) => v
            .parse()
            .map_err(|_| CliError::Config(format!("{key} = {v:?} is not a valid number"))),
    }
}

impl RunConfig {
    /// Builds the configuration from merged settings; later layers of the
    /// map (flags) have already overwritten earlier ones (file).
    pub fn from_map(command: Command, map: &BTreeMap<String, String>) -> Result<Self, CliError> {
        let default_gauge = match command {
            Command::Photodetect => "coulomb",
            _ => "both",
        };
        let eta = match map.get("eta") {
            Some(g) => Grid::parse(g)?,
            None if command == Command::Switch => Grid::parse("0.8")?,
            None => Grid::parse("0:0.05:2")?,
        };
        let omega0: f64 = num(map, "omega0", 1.0)?;
        if !(omega0 > 0.0 && omega0.is_finite()) {
            return Err(CliError::Config(format!("omega0 must be positive, got {omega0}")));
        }
        let shape = match map.get("shape").map(String::as_str).unwrap_or("cosine") {
            "cosine" | "raised_cosine" => RampShape::RaisedCosine,
            "linear" => RampShape::Linear,
            other => return Err(CliError::Config(format!("unknown shape {other:?}"))),
        };
        let readout_model = match map.get("readout_model").map(String::as_str).unwrap_or("small") {
            "small" => ReadoutModel::SmallAngle,
            "full" => ReadoutModel::Full,
            other => return Err(CliError::Config(format!("unknown readout model {other:?}"))),
        };
        let protocol = match map.get("protocol").map(String::as_str).unwrap_or("off") {
            "off" => Protocol::Off,
            "onoff" => Protocol::OnOff,
            other => return Err(CliError::Config(format!("unknown protocol {other:?}"))),
        };
        let wrong_dipole = match map.get("wrong_dipole").map(String::as_str).unwrap_or("false") {
            "true" | "1" => true,
            "false" | "0" => false,
            other => return Err(CliError::Config(format!("wrong_dipole = {other:?} is not a boolean"))),
        };
        let cutoff = match map.get("cutoff") {
            None => None,
            Some(v) => Some(
                v.parse::<usize>()
                    .ok()
                    .filter(|&n| n >= 2)
                    .ok_or_else(|| CliError::Config(format!("cutoff = {v:?} must be an integer >= 2")))?,
            ),
        };
        let cfg = RunConfig {
            command,
            eta,
            omega0,
            theta: num(map, "theta", 0.0)?,
            gauge: GaugeChoice::parse(map.get("gauge").map(String::as_str).unwrap_or(default_gauge))?,
            cutoff,
            out: map.get("out").map(PathBuf::from),
            ramp: num(map, "ramp", 1e-3)?,
            shape,
            levels: num(map, "levels", 8)?,
            omega_b: num(map, "omega_b", 0.3)?,
            g_b: num(map, "g_b", 0.02 * omega0)?,
            readout_model,
            protocol,
            t_off: num(map, "t_off", 5.0)?,
            t_end: num(map, "t_end", 10.0)?,
            samples: num(map, "samples", 201)?,
            wrong_dipole,
            max_phase: num(map, "max_phase", 0.05)?,
            halving_tol: num(map, "halving_tol", 1e-8)?,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), CliError> {
        let positive = [
            ("ramp", self.ramp),
            ("max_phase", self.max_phase),
            ("halving_tol", self.halving_tol),
            ("omega_b", self.omega_b),
        ];
        for (k, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(CliError::Config(format!("{k} must be positive, got {v}")));
            }
        }
        if !self.theta.is_finite() || !(self.g_b >= 0.0) {
            return Err(CliError::Config("theta must be finite and g_b non-negative".into()));
        }
        if self.levels < 2 || self.samples < 2 {
            return Err(CliError::Config("levels and samples must be at least 2".into()));
        }
        if self.command == Command::Switch {
            if self.eta.points().len() != 1 {
                return Err(CliError::Config("switch takes a single --eta value".into()));
            }
            if self.protocol == Protocol::OnOff && self.t_off < self.ramp {
                return Err(CliError::Config("t_off must leave room for the on-ramp".into()));
            }
            if self.t_end <= 0.0 {
                return Err(CliError::Config("t_end must be positive".into()));
            }
        }
        Ok(())
    }
}
