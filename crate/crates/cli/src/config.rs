//! Sweep configuration: built-in defaults, then an optional key=value file,
//! then command-line flags.
//!
//! Config file keys (one per line, `#` starts a comment, lists are
//! comma-separated):
//!
//! ```text
//! method        A,B
//! mode_vertex   full,gamma0
//! mode_exchange plain,exchange
//! channels      both,direct
//! waves         S,P,D,F
//! alpha         0.1,1,10          (same unit as k; must be > 0)
//! k_min         0.001
//! k_max         1
//! k_steps       20                (number of grid points, >= 2)
//! k_spacing     log|linear
//! mass          1                 (defaults to the electron mass in `unit`)
//! unit          internal|eV|MeV
//! quad_order    64                (starting Gauss order)
//! term_mask     0x7ff             (11 bits, operator-sandwich method only)
//! output        phase_shifts.csv
//! format        csv|json
//! figure_report true|false
//! jobs          0                 (0 = one thread per core)
//! ```

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use clap::Parser;
use pwshift_core::{
    AmplitudeMode, Channels, EnergyUnit, ExchangeSpinTreatment, Method, TermMask, Vertex, Wave,
};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
#[error("{field}: {message}")]
pub struct ConfigError {
    pub field: String,
    pub message: String,
}

impl ConfigError {
    fn new(field: &str, message: impl Into<String>) -> Self {
        Self {
            field: field.to_string(),
            message: message.into(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Spacing {
    Linear,
    Log,
}

impl FromStr for Spacing {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "linear" | "lin" => Ok(Spacing::Linear),
            "log" => Ok(Spacing::Log),
            _ => Err(format!("expected linear or log, got '{s}'")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KGrid {
    pub min: f64,
    pub max: f64,
    pub count: usize,
    pub spacing: Spacing,
}

impl KGrid {
    /// Grid points; both endpoints are hit exactly.
    pub fn points(&self) -> Vec<f64> {
        let n = self.count;
        (0..n)
            .map(|i| {
                if i == 0 {
                    return self.min;
                }
                if i == n - 1 {
                    return self.max;
                }
                let t = i as f64 / (n - 1) as f64;
                match self.spacing {
                    Spacing::Linear => self.min + t * (self.max - self.min),
                    Spacing::Log => self.min * (self.max / self.min).powf(t),
                }
            })
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(format!("expected csv or json, got '{s}'")),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Csv => "csv",
            Format::Json => "json",
        })
    }
}

/// A validated sweep. `k` and `alpha` values are in `unit`.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepConfig {
    pub methods: Vec<Method>,
    pub modes: Vec<AmplitudeMode>,
    pub waves: Vec<Wave>,
    pub alpha_list: Vec<f64>,
    pub k_grid: KGrid,
    pub mass: f64,
    pub unit: EnergyUnit,
    pub quad_order: usize,
    pub term_mask: Option<TermMask>,
    pub format: Format,
    pub output: PathBuf,
    pub figure_report: bool,
    pub jobs: usize,
}

impl Default for SweepConfig {
    fn default() -> Self {
        RawConfig::default()
            .resolve()
            .expect("built-in defaults are valid")
    }
}

impl SweepConfig {
    /// Total number of records a complete sweep produces.
    pub fn record_count(&self) -> usize {
        self.methods.len()
            * self.modes.len()
            * self.waves.len()
            * self.alpha_list.len()
            * self.k_grid.count
    }
}

pub const KEYS: [&str; 18] = [
    "method",
    "mode_vertex",
    "mode_exchange",
    "channels",
    "waves",
    "alpha",
    "k_min",
    "k_max",
    "k_steps",
    "k_spacing",
    "mass",
    "unit",
    "quad_order",
    "term_mask",
    "output",
    "format",
    "figure_report",
    "jobs",
];

/// Unvalidated settings as strings, keyed by config-file key.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct RawConfig {
    values: BTreeMap<String, String>,
}

impl RawConfig {
    pub fn parse_file_text(text: &str) -> Result<Self, ConfigError> {
        let mut values = BTreeMap::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .or_else(|| line.split_once(char::is_whitespace))
                .ok_or_else(|| {
                    ConfigError::new("config", format!("line {}: expected key = value", n + 1))
                })?;
            let key = key.trim().replace('-', "_");
            if !KEYS.contains(&key.as_str()) {
                return Err(ConfigError::new(
                    "config",
                    format!("line {}: unknown key '{key}'", n + 1),
                ));
            }
            values.insert(key, value.trim().to_string());
        }
        Ok(Self { values })
    }

    pub fn set(&mut self, key: &str, value: impl Into<String>) {
        debug_assert!(KEYS.contains(&key));
        self.values.insert(key.to_string(), value.into());
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    /// Later settings win.
    pub fn merge(&mut self, other: RawConfig) {
        self.values.extend(other.values);
    }

    pub fn resolve(&self) -> Result<SweepConfig, ConfigError> {
        let unit: EnergyUnit = self.scalar("unit", "internal")?;
        let mass = match self.get("mass") {
            Some(v) => parse_f64("mass", v)?,
            None => unit.electron_mass(),
        };
        if !(mass > 0.0) || !mass.is_finite() {
            return Err(ConfigError::new("mass", "must be a positive finite number"));
        }

        let methods: Vec<Method> = self.list("method", "A,B")?;
        let vertices: Vec<Vertex> = self.list("mode_vertex", "full")?;
        let exchanges: Vec<ExchangeSpinTreatment> = self.list("mode_exchange", "plain,exchange")?;
        let channels: Vec<Channels> = self.list("channels", "both")?;
        let waves: Vec<Wave> = self.list("waves", "S,P,D,F")?;

        let term_mask = match self.get("term_mask") {
            None => None,
            Some(v) => {
                let bits = parse_mask(v).map_err(|m| ConfigError::new("term_mask", m))?;
                Some(
                    TermMask::new(bits)
                        .map_err(|e| ConfigError::new("term_mask", e.to_string()))?,
                )
            }
        };
        let mut modes = Vec::new();
        for &v in &vertices {
            for &e in &exchanges {
                for &c in &channels {
                    let mut m = AmplitudeMode::new(v, e, c);
                    if let Some(mask) = term_mask {
                        m = m.with_terms(mask);
                    }
                    modes.push(m);
                }
            }
        }

        let alpha_list = match self.get("alpha") {
            None => vec![0.1 * mass, mass, 10.0 * mass],
            Some(v) => split(v)
                .map(|s| parse_f64("alpha", s))
                .collect::<Result<Vec<_>, _>>()?,
        };
        if alpha_list.is_empty() {
            return Err(ConfigError::new("alpha", "needs at least one value"));
        }
        for &a in &alpha_list {
            if a == 0.0 {
                return Err(ConfigError::new(
                    "alpha",
                    "0 is not allowed: without screening the photon propagator has a forward \
                     singularity at x = cos(theta) = +-1, which the angular quadrature reaches",
                ));
            }
            if !(a > 0.0) || !a.is_finite() {
                return Err(ConfigError::new(
                    "alpha",
                    format!("{a} is not a positive number"),
                ));
            }
        }

        let k_min = match self.get("k_min") {
            Some(v) => parse_f64("k_min", v)?,
            None => 1e-3 * mass,
        };
        let k_max = match self.get("k_max") {
            Some(v) => parse_f64("k_max", v)?,
            None => mass,
        };
        if !(k_min > 0.0) {
            return Err(ConfigError::new("k_min", "must be > 0"));
        }
        if !(k_max > k_min) || !k_max.is_finite() {
            return Err(ConfigError::new(
                "k_max",
                "must be finite and greater than k_min",
            ));
        }
        let count: usize = self.scalar("k_steps", "20")?;
        if count < 2 {
            return Err(ConfigError::new("k_steps", "needs at least 2 grid points"));
        }
        let spacing: Spacing = self.scalar("k_spacing", "log")?;

        let quad_order: usize = self.scalar("quad_order", "64")?;
        if quad_order == 0 {
            return Err(ConfigError::new("quad_order", "must be at least 1"));
        }
        let format: Format = self.scalar("format", "csv")?;
        let output = PathBuf::from(self.get("output").unwrap_or(match format {
            Format::Csv => "phase_shifts.csv",
            Format::Json => "phase_shifts.json",
        }));
        let figure_report = parse_bool(self.get("figure_report").unwrap_or("false"))
            .map_err(|m| ConfigError::new("figure_report", m))?;
        let jobs: usize = self.scalar("jobs", "0")?;

        Ok(SweepConfig {
            methods,
            modes,
            waves,
            alpha_list,
            k_grid: KGrid {
                min: k_min,
                max: k_max,
                count,
                spacing,
            },
            mass,
            unit,
            quad_order,
            term_mask,
            format,
            output,
            figure_report,
            jobs,
        })
    }

    fn scalar<T>(&self, key: &str, default: &str) -> Result<T, ConfigError>
    where
        T: FromStr,
        T::Err: fmt::Display,
    {
        let v = self.get(key).unwrap_or(default).trim();
        v.parse()
            .map_err(|e: T::Err| ConfigError::new(key, format!("'{v}': {e}")))
    }

    fn list<T>(&self, key: &str, default: &str) -> Result<Vec<T>, ConfigError>
    where
        T: FromStr + PartialEq,
        T::Err: fmt::Display,
    {
        let mut out: Vec<T> = Vec::new();
        for s in split(self.get(key).unwrap_or(default)) {
            let v = s
                .parse()
                .map_err(|e: T::Err| ConfigError::new(key, format!("'{s}': {e}")))?;
            if !out.contains(&v) {
                out.push(v);
            }
        }
        if out.is_empty() {
            return Err(ConfigError::new(key, "needs at least one value"));
        }
        Ok(out)
    }
}

fn split(v: &str) -> impl Iterator<Item = &str> {
    v.split(',').map(str::trim).filter(|s| !s.is_empty())
}

fn parse_f64(field: &str, v: &str) -> Result<f64, ConfigError> {
    v.trim()
        .parse()
        .map_err(|_| ConfigError::new(field, format!("'{v}' is not a number")))
}

fn parse_mask(v: &str) -> Result<u32, String> {
    let v = v.trim();
    let parsed = if let Some(hex) = v.strip_prefix("0x").or_else(|| v.strip_prefix("0X")) {
        u32::from_str_radix(hex, 16)
    } else if let Some(bin) = v.strip_prefix("0b") {
        u32::from_str_radix(bin, 2)
    } else {
        v.parse()
    };
    parsed.map_err(|_| format!("'{v}' is not an integer (decimal, 0x.. or 0b..)"))
}

fn parse_bool(v: &str) -> Result<bool, String> {
    match v.trim() {
        "true" | "yes" | "1" | "on" => Ok(true),
        "false" | "no" | "0" | "off" => Ok(false),
        other => Err(format!("expected true or false, got '{other}'")),
    }
}

/// Born phase shifts for screened electron-electron scattering in the spin
/// singlet channel.
#[derive(Debug, Parser, Default)]
#[command(name = "pwshift", version)]
pub struct Cli {
    /// key = value file; flags override its entries
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// A, B or A,B
    #[arg(long)]
    pub method: Option<String>,
    /// subset of S,P,D,F
    #[arg(long)]
    pub waves: Option<String>,
    /// comma-separated screening values, > 0
    #[arg(long)]
    pub alpha: Option<String>,
    #[arg(long)]
    pub k_min: Option<String>,
    #[arg(long)]
    pub k_max: Option<String>,
    /// number of k points
    #[arg(long)]
    pub k_steps: Option<String>,
    /// log or linear
    #[arg(long)]
    pub k_spacing: Option<String>,
    #[arg(long)]
    pub mass: Option<String>,
    /// internal, eV or MeV
    #[arg(long)]
    pub unit: Option<String>,
    /// full, gamma0 or both comma-separated
    #[arg(long)]
    pub mode_vertex: Option<String>,
    /// plain, exchange or both comma-separated
    #[arg(long)]
    pub mode_exchange: Option<String>,
    /// both or direct (direct is for limit checks)
    #[arg(long)]
    pub channels: Option<String>,
    #[arg(long)]
    pub quad_order: Option<String>,
    /// 11-bit operator term mask, e.g. 0x7ff
    #[arg(long)]
    pub term_mask: Option<String>,
    #[arg(long, short)]
    pub output: Option<String>,
    /// csv or json
    #[arg(long)]
    pub format: Option<String>,
    /// also write the sign-pattern and potential-estimate report
    #[arg(long)]
    pub figure_report: bool,
    /// worker threads, 0 = one per core
    #[arg(long)]
    pub jobs: Option<String>,
}

impl Cli {
    /// Flag values as a raw config layer.
    pub fn overrides(&self) -> RawConfig {
        let mut raw = RawConfig::default();
        let pairs: [(&str, &Option<String>); 17] = [
            ("method", &self.method),
            ("waves", &self.waves),
            ("alpha", &self.alpha),
            ("k_min", &self.k_min),
            ("k_max", &self.k_max),
            ("k_steps", &self.k_steps),
            ("k_spacing", &self.k_spacing),
            ("mass", &self.mass),
            ("unit", &self.unit),
            ("mode_vertex", &self.mode_vertex),
            ("mode_exchange", &self.mode_exchange),
            ("channels", &self.channels),
            ("quad_order", &self.quad_order),
            ("term_mask", &self.term_mask),
            ("output", &self.output),
            ("format", &self.format),
            ("jobs", &self.jobs),
        ];
        for (key, value) in pairs {
            if let Some(v) = value {
                raw.set(key, v.clone());
            }
        }
        if self.figure_report {
            raw.set("figure_report", "true");
        }
        raw
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults() {
        let c = SweepConfig::default();
        assert_eq!(c.methods, vec![Method::A, Method::B]);
        assert_eq!(c.modes.len(), 2);
        assert_eq!(c.waves.len(), 4);
        assert_eq!(c.alpha_list, vec![0.1, 1.0, 10.0]);
        assert_eq!(c.k_grid.count, 20);
        assert_eq!(c.quad_order, 64);
        assert_eq!(c.format, Format::Csv);
        assert_eq!(c.record_count(), 2 * 2 * 4 * 3 * 20);
    }

    #[test]
    fn log_grid_hits_endpoints() {
        let g = KGrid {
            min: 1e-3,
            max: 1.0,
            count: 20,
            spacing: Spacing::Log,
        };
        let p = g.points();
        assert_eq!(p[0], 1e-3);
        assert_eq!(p[19], 1.0);
        assert!((p[1] / p[0] - 10f64.powf(3.0 / 19.0)).abs() < 1e-12);
        assert!(p.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn file_then_flags() {
        let mut raw = RawConfig::parse_file_text(
            "# comment\nmethod = B\nalpha = 0.5, 2\nk-steps 5\nwaves=S,D # trailing\n",
        )
        .unwrap();
        let mut flags = RawConfig::default();
        flags.set("alpha", "3");
        raw.merge(flags);
        let c = raw.resolve().unwrap();
        assert_eq!(c.methods, vec![Method::B]);
        assert_eq!(c.alpha_list, vec![3.0]);
        assert_eq!(c.k_grid.count, 5);
        assert_eq!(c.waves, vec![Wave::S, Wave::D]);
    }

    #[test]
    fn validation_messages_name_the_field() {
        let bad = |k: &str, v: &str| {
            let mut r = RawConfig::default();
            r.set(k, v);
            r.resolve().unwrap_err()
        };
        let e = bad("alpha", "0.1,0");
        assert_eq!(e.field, "alpha");
        assert!(e.message.contains("forward singularity"));
        assert_eq!(bad("alpha", "-1").field, "alpha");
        assert_eq!(bad("k_min", "0").field, "k_min");
        assert_eq!(bad("k_steps", "1").field, "k_steps");
        assert_eq!(bad("term_mask", "0x800").field, "term_mask");
        assert_eq!(bad("waves", "G").field, "waves");
        assert_eq!(bad("format", "xml").field, "format");
        assert!(RawConfig::parse_file_text("colour = red").is_err());
    }

    #[test]
    fn units_scale_defaults() {
        let mut r = RawConfig::default();
        r.set("unit", "MeV");
        let c = r.resolve().unwrap();
        assert!((c.mass - 0.51099895).abs() < 1e-12);
        assert!((c.k_grid.max - c.mass).abs() < 1e-15);
        assert!((c.alpha_list[1] - c.mass).abs() < 1e-15);
    }

    #[test]
    fn term_mask_applies_to_every_mode() {
        let mut r = RawConfig::default();
        r.set("term_mask", "0b10010000");
        let c = r.resolve().unwrap();
        for m in &c.modes {
            assert_eq!(m.terms.bits(), 0x90);
        }
    }
}
