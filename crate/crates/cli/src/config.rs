//! Flat `key = value` run configuration with per-command key tables.

use std::collections::BTreeMap;
use std::fmt;

use omdp_core::presets::{magnetometer, REFERENCE_OMEGA_M_SI};
use omdp_core::Params;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Spectrum,
    SqlMap,
    Sweep,
    Snr,
    Validate,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Spectrum => "spectrum",
            Command::SqlMap => "sql-map",
            Command::Sweep => "sweep",
            Command::Snr => "snr",
            Command::Validate => "validate",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        [Command::Spectrum, Command::SqlMap, Command::Sweep, Command::Snr, Command::Validate]
            .into_iter()
            .find(|c| c.name() == s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    pub key: Option<String>,
    pub message: String,
}

impl ConfigError {
    pub fn at(key: &str, message: impl Into<String>) -> Self {
        Self {
            key: Some(key.to_string()),
            message: message.into(),
        }
    }

    pub fn general(message: impl Into<String>) -> Self {
        Self {
            key: None,
            message: message.into(),
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.key {
            Some(k) => write!(f, "key `{k}`: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    /// Dimensionless or SI number, never rescaled.
    Number,
    /// Frequency or rate: multiples of `ω_m`, or rad/s with `units = si`.
    Rate,
    Count,
    List,
    RateList,
    /// Number or `none`.
    Optional,
    Choice(&'static [&'static str]),
}

struct Key {
    name: &'static str,
    kind: Kind,
    default: String,
}

fn key(name: &'static str, kind: Kind, default: impl ToString) -> Key {
    Key {
        name,
        kind,
        default: default.to_string(),
    }
}

fn detector_keys(p: &Params, omega_m_si: f64, nth: f64) -> Vec<Key> {
    vec![
        key("units", Kind::Choice(&["omega_m", "si"]), "omega_m"),
        key("omega_m", Kind::Number, omega_m_si),
        key("delta_prime", Kind::Rate, p.delta_prime),
        key("kappa", Kind::Rate, p.kappa),
        key("g", Kind::Rate, p.g1.re),
        key("v", Kind::Rate, p.v_coupling),
        key("gamma1", Kind::Rate, p.gamma1),
        key("gamma2", Kind::Rate, p.gamma2),
        key("delta_omega", Kind::Rate, 0.0),
        key("theta", Kind::Number, 0.0),
        key("nth", Kind::Number, nth),
        key("temperature", Kind::Optional, "none"),
    ]
}

fn keys_for(command: Command) -> Vec<Key> {
    let reference = omdp_core::presets::reference();
    match command {
        Command::Spectrum => {
            let mut k = detector_keys(&reference, REFERENCE_OMEGA_M_SI, reference.nth1);
            k.extend([
                key("v_list", Kind::RateList, "0,0.2,0.4"),
                key("omega_min", Kind::Rate, 0.8),
                key("omega_max", Kind::Rate, 1.3),
                key("points", Kind::Count, 2001),
                key("single", Kind::Choice(&["true", "false"]), "true"),
            ]);
            k
        }
        Command::SqlMap => {
            let mut k = detector_keys(&reference, REFERENCE_OMEGA_M_SI, 0.0);
            k.extend([
                key("omega_min", Kind::Rate, 0.9),
                key("omega_max", Kind::Rate, 1.2),
                key("omega_points", Kind::Count, 301),
                key("v_min", Kind::Rate, 0.0),
                key("v_max", Kind::Rate, 0.4),
                key("v_points", Kind::Count, 41),
            ]);
            k
        }
        Command::Sweep => {
            let mut k = detector_keys(&reference, REFERENCE_OMEGA_M_SI, reference.nth1);
            k.extend([
                key("panel", Kind::Choice(&["a", "b", "c", "d"]), "a"),
                key("mode", Kind::Choice(&["thermal", "sql"]), "thermal"),
                key("values", Kind::Optional, "none"),
                key("omega_points", Kind::Count, 4001),
            ]);
            k
        }
        Command::Snr => {
            let m = magnetometer::params();
            let mut k = detector_keys(&m, magnetometer::OMEGA_M_SI, 0.0);
            for entry in k.iter_mut() {
                if entry.name == "temperature" {
                    entry.default = magnetometer::TEMPERATURE.to_string();
                }
            }
            k.extend([
                key("current", Kind::Number, magnetometer::CURRENT),
                key("probe_size", Kind::Number, magnetometer::PROBE_SIZE),
                key("field", Kind::Number, magnetometer::FIELD),
                key("snr_anchor", Kind::Number, magnetometer::SNR_ANCHOR),
                key("reference_b_min", Kind::Number, magnetometer::REFERENCE_B_MIN),
                key("sr_v_list", Kind::RateList, join(&(0..=25).map(|i| i as f64 * 0.02).collect::<Vec<_>>())),
                key(
                    "sr_t_list",
                    Kind::List,
                    join(&(0..=15).map(|i| 1e-3 * 10f64.powf(i as f64 * 0.4)).collect::<Vec<_>>()),
                ),
                key("sr_t_v_list", Kind::RateList, "0.1,0.2,0.3"),
                key("field_list", Kind::List, "1e-15,1e-14,1e-13,1e-12,1e-11"),
                key("omega_min", Kind::Rate, 0.9),
                key("omega_max", Kind::Rate, 1.3),
                key("points", Kind::Count, 2001),
                key("omega_points", Kind::Count, 4001),
            ]);
            k
        }
        Command::Validate => vec![
            key("seed", Kind::Count, 20_240_611),
            key("cases", Kind::Count, 200),
            key("mutation", Kind::Choice(&["none", "flip_b_sign"]), "none"),
        ],
    }
}

fn join(xs: &[f64]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

fn parse_number(k: &str, v: &str) -> Result<f64, ConfigError> {
    let x: f64 = v
        .trim()
        .parse()
        .map_err(|_| ConfigError::at(k, format!("`{v}` is not a number")))?;
    if !x.is_finite() {
        return Err(ConfigError::at(k, "must be finite"));
    }
    Ok(x)
}

fn parse_list(k: &str, v: &str) -> Result<Vec<f64>, ConfigError> {
    let xs = v
        .split(',')
        .map(|s| parse_number(k, s))
        .collect::<Result<Vec<_>, _>>()?;
    if xs.is_empty() {
        return Err(ConfigError::at(k, "list is empty"));
    }
    Ok(xs)
}

/// Validates `raw` and returns its canonical spelling. Canonical numbers use
/// the shortest representation that parses back to the same `f64`.
fn canonical(k: &Key, raw: &str) -> Result<String, ConfigError> {
    let raw = raw.trim();
    match k.kind {
        Kind::Number | Kind::Rate => Ok(parse_number(k.name, raw)?.to_string()),
        Kind::Count => raw
            .parse::<u64>()
            .map(|n| n.to_string())
            .map_err(|_| ConfigError::at(k.name, format!("`{raw}` is not a non-negative integer"))),
        Kind::List | Kind::RateList => Ok(join(&parse_list(k.name, raw)?)),
        Kind::Optional if raw == "none" => Ok("none".into()),
        Kind::Optional => {
            if raw.contains(',') {
                Ok(join(&parse_list(k.name, raw)?))
            } else {
                Ok(parse_number(k.name, raw)?.to_string())
            }
        }
        Kind::Choice(options) => {
            if options.contains(&raw) {
                Ok(raw.to_string())
            } else {
                Err(ConfigError::at(k.name, format!("`{raw}` is not one of {}", options.join(", "))))
            }
        }
    }
}

/// Parses `key = value` lines. Blank lines and `#` comments are skipped.
pub fn parse_lines(text: &str) -> Result<Vec<(String, String)>, ConfigError> {
    let mut out = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| ConfigError::general(format!("line {}: expected `key = value`", n + 1)))?;
        out.push((k.trim().to_string(), v.trim().to_string()));
    }
    Ok(out)
}

pub fn parse_override(s: &str) -> Result<(String, String), ConfigError> {
    let (k, v) = s
        .split_once('=')
        .ok_or_else(|| ConfigError::general(format!("override `{s}` must look like key=value")))?;
    Ok((k.trim().to_string(), v.trim().to_string()))
}

/// Fully resolved parameters for one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub values: BTreeMap<String, String>,
}

impl RunConfig {
    /// Defaults, then file entries, then overrides; later entries win.
    pub fn resolve(command: Command, entries: &[(String, String)]) -> Result<Self, ConfigError> {
        let table = keys_for(command);
        let mut values = BTreeMap::new();
        for k in &table {
            values.insert(k.name.to_string(), canonical(k, &k.default)?);
        }
        for (name, raw) in entries {
            let k = table
                .iter()
                .find(|k| k.name == name)
                .ok_or_else(|| ConfigError::at(name, format!("unknown key for `{}`", command.name())))?;
            values.insert(name.clone(), canonical(k, raw)?);
        }
        let cfg = Self { command, values };
        if cfg.has("omega_m") && !(cfg.number("omega_m") > 0.0) {
            return Err(ConfigError::at("omega_m", "must be positive"));
        }
        Ok(cfg)
    }

    fn has(&self, k: &str) -> bool {
        self.values.contains_key(k)
    }

    fn raw(&self, k: &str) -> &str {
        self.values
            .get(k)
            .map(String::as_str)
            .unwrap_or_else(|| panic!("key `{k}` missing from the table of `{}`", self.command.name()))
    }

    pub fn text(&self, k: &str) -> &str {
        self.raw(k)
    }

    pub fn number(&self, k: &str) -> f64 {
        self.raw(k).parse().expect("canonical number")
    }

    pub fn count(&self, k: &str) -> usize {
        self.raw(k).parse().expect("canonical count")
    }

    pub fn list(&self, k: &str) -> Vec<f64> {
        self.raw(k).split(',').map(|s| s.parse().expect("canonical list")).collect()
    }

    pub fn optional_list(&self, k: &str) -> Option<Vec<f64>> {
        (self.raw(k) != "none").then(|| self.list(k))
    }

    /// Divisor that converts rates to multiples of `ω_m`.
    fn rate_scale(&self) -> f64 {
        if self.has("units") && self.raw("units") == "si" {
            self.number("omega_m")
        } else {
            1.0
        }
    }

    pub fn rate(&self, k: &str) -> f64 {
        self.number(k) / self.rate_scale()
    }

    pub fn rate_list(&self, k: &str) -> Vec<f64> {
        let s = self.rate_scale();
        self.list(k).into_iter().map(|x| x / s).collect()
    }

    pub fn optional_rate_list(&self, k: &str) -> Option<Vec<f64>> {
        let s = self.rate_scale();
        self.optional_list(k).map(|xs| xs.into_iter().map(|x| x / s).collect())
    }

    /// Detector in units of `ω_m`. Occupations come from `temperature` when
    /// it is set, otherwise from `nth`.
    pub fn detector(&self) -> Result<Params, ConfigError> {
        let p = Params::identical(
            1.0,
            self.rate("delta_prime"),
            self.rate("kappa"),
            self.rate("g"),
            self.rate("v"),
            self.rate("gamma1"),
            self.number("nth"),
        );
        let mut p = p.with_frequency_difference(self.rate("delta_omega")).with_theta(self.number("theta"));
        p.gamma2 = self.rate("gamma2");
        if let Some(t) = self.optional_list("temperature") {
            if t.len() != 1 {
                return Err(ConfigError::at("temperature", "expects one value"));
            }
            p = p
                .with_temperature(t[0], self.number("omega_m"))
                .map_err(|e| ConfigError::at("temperature", e.to_string()))?;
        }
        p.validate().map_err(|e| ConfigError::general(format!("invalid detector: {e}")))?;
        Ok(p)
    }

    /// The configuration as a replayable `key = value` text.
    pub fn to_text(&self) -> String {
        self.values.iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn entries(pairs: &[(&str, &str)]) -> Vec<(String, String)> {
        pairs.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect()
    }

    #[test]
    fn defaults_resolve_for_every_command() {
        for c in [Command::Spectrum, Command::SqlMap, Command::Sweep, Command::Snr, Command::Validate] {
            let cfg = RunConfig::resolve(c, &[]).unwrap();
            if c != Command::Validate {
                cfg.detector().unwrap();
            }
        }
    }

    #[test]
    fn unknown_key_is_named() {
        let e = RunConfig::resolve(Command::Spectrum, &entries(&[("kapa", "0.1")])).unwrap_err();
        assert_eq!(e.key.as_deref(), Some("kapa"));
    }

    #[test]
    fn later_entries_win() {
        let cfg = RunConfig::resolve(Command::Spectrum, &entries(&[("kappa", "0.2"), ("kappa", "0.3")])).unwrap();
        assert_eq!(cfg.rate("kappa"), 0.3);
    }

    #[test]
    fn si_units_are_normalized() {
        let w = 2.0 * std::f64::consts::PI * 5e6;
        let cfg = RunConfig::resolve(
            Command::Spectrum,
            &entries(&[("units", "si"), ("omega_m", &w.to_string()), ("kappa", &(0.1 * w).to_string())]),
        )
        .unwrap();
        assert!((cfg.detector().unwrap().kappa - 0.1).abs() < 1e-15);
    }

    #[test]
    fn parse_comments_and_errors() {
        let lines = parse_lines("# header\nkappa = 0.2 # trailing\n\n v=0.1\n").unwrap();
        assert_eq!(lines, entries(&[("kappa", "0.2"), ("v", "0.1")]));
        assert!(parse_lines("kappa 0.2").is_err());
        let e = RunConfig::resolve(Command::Spectrum, &entries(&[("kappa", "abc")])).unwrap_err();
        assert_eq!(e.key.as_deref(), Some("kappa"));
        let e = RunConfig::resolve(Command::Sweep, &entries(&[("panel", "z")])).unwrap_err();
        assert_eq!(e.key.as_deref(), Some("panel"));
    }

    #[test]
    fn canonical_text_round_trips() {
        let cfg = RunConfig::resolve(Command::Snr, &entries(&[("field", "1.0e-13")])).unwrap();
        let again = RunConfig::resolve(Command::Snr, &parse_lines(&cfg.to_text()).unwrap()).unwrap();
        assert_eq!(cfg, again);
    }

    #[test]
    fn unstable_detector_rejected() {
        let cfg = RunConfig::resolve(Command::Spectrum, &entries(&[("v", "1.5")])).unwrap();
        assert!(cfg.detector().is_err());
    }
}
