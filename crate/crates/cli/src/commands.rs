//! Subcommands: each turns a resolved configuration into tables.

use omdp_core::model::omega_eff;
use omdp_core::presets::sweep_panel;
use omdp_core::sensing::{
    calibrate_from_noise, detection_accuracy_from_noise, locate_optimum, response_coefficient, s_r,
    snr_from_noise, snr_linearity, CalibrationAnchor, SnrConvention,
};
use omdp_core::spectra::{som_spectrum, spectrum_sweep, OmegaSearch};
use omdp_core::sql::{r_map, s_min_sweep, Ratio, SweepMode};
use omdp_core::Params;
use thiserror::Error;

use crate::config::{ConfigError, RunConfig};
use crate::output::{Cell, RunOutput, Table};

#[derive(Debug, Error)]
pub enum CommandError {
    #[error("{0}")]
    Config(#[from] ConfigError),
    #[error("computation failed: {0}")]
    Compute(#[from] omdp_core::Error),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

impl CommandError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CommandError::Config(_) => 2,
            _ => 1,
        }
    }
}

type Result<T> = std::result::Result<T, CommandError>;

const REL_TOL: f64 = 1e-12;

fn span(cfg: &RunConfig, lo: &str, hi: &str) -> Result<(f64, f64)> {
    let (a, b) = (cfg.rate(lo), cfg.rate(hi));
    if !(b > a && a > 0.0) {
        return Err(ConfigError::at(hi, format!("need 0 < {lo} < {hi}")).into());
    }
    Ok((a, b))
}

fn lerp(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect(),
    }
}

fn series_name(prefix: &str, v: f64) -> String {
    format!("{prefix}_v{v}")
}

fn spectrum_table(name: String, points: &[omdp_core::spectra::SpectrumPoint<f64>]) -> Table {
    let mut t = Table::new(name, &["omega_over_omega_m", "s_add", "s_th", "a_p"]);
    for p in points {
        t.push(vec![p.omega.into(), p.s_add.into(), p.s_th.into(), p.a_p.into()]);
    }
    t
}

pub fn spectrum(cfg: &RunConfig) -> Result<RunOutput> {
    let base = cfg.detector()?;
    let search = OmegaSearch {
        span: span(cfg, "omega_min", "omega_max")?,
        base_points: cfg.count("points"),
        rel_tol: REL_TOL,
    };
    let mut out = RunOutput::default();
    for v in cfg.rate_list("v_list") {
        let p = base.with_v(v);
        p.validate()
            .map_err(|e| ConfigError::at("v_list", format!("V = {v}: {e}")))?;
        let res = spectrum_sweep(&p, &search.grid_for(&p)?)?;
        if let Some(min) = res.points.iter().min_by(|a, b| a.s_add.total_cmp(&b.s_add)) {
            out.notes.push(format!("V = {v}: least s_add {:e} at omega = {}", min.s_add, min.omega));
        }
        out.tables.push(spectrum_table(series_name("spectrum", v), &res.points));
    }
    if cfg.text("single") == "true" {
        let grid = search.grid_for(&base.with_v(0.0))?;
        let res = som_spectrum(&base, &grid)?;
        out.tables.push(spectrum_table("spectrum_single".into(), &res.points));
    }
    Ok(out)
}

pub fn sql_map(cfg: &RunConfig) -> Result<RunOutput> {
    let template = cfg.detector()?.ground_state();
    let (lo, hi) = span(cfg, "omega_min", "omega_max")?;
    let mut omegas = lerp(lo, hi, cfg.count("omega_points"));
    if omegas.len() < 2 {
        return Err(ConfigError::at("omega_points", "need at least 2 points").into());
    }
    // The ratios are normalized at the mechanical frequency; keep it on the grid.
    let wm = template.omega_m1;
    if wm > lo && wm < hi {
        omegas.push(wm);
        omegas.sort_by(f64::total_cmp);
        omegas.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * wm);
    }
    let mut out = RunOutput::default();
    let mut vs = Vec::new();
    for v in lerp(cfg.rate("v_min"), cfg.rate("v_max"), cfg.count("v_points")) {
        match template.with_v(v).validate() {
            Ok(()) => vs.push(v),
            Err(e) => out.notes.push(format!("skipped V = {v}: {e}")),
        }
    }
    let map = r_map(&template, &omegas, &vs)?;
    out.notes.push(format!("single-probe SQL at omega_m = {:e}", map.reference.som_sql));
    out.notes.push(format!("uncoupled dual-probe SQL at omega_m = {:e}", map.reference.uncoupled_sql));

    let mut t = Table::new("sql_map", &["omega_over_omega_m", "v_over_omega_m", "log10_r1", "log10_r2"]);
    for (j, &v) in map.v_values.iter().enumerate() {
        for (i, &w) in map.omegas.iter().enumerate() {
            t.push(vec![w.into(), v.into(), map.log10_r1[j][i].into(), map.log10_r2[j][i].into()]);
        }
    }
    let mut c = Table::new("sql_map_crossings", &["v_over_omega_m", "ratio", "omega_over_omega_m"]);
    for x in &map.crossings {
        let ratio = match x.ratio {
            Ratio::R1 => "r1",
            Ratio::R2 => "r2",
        };
        c.push(vec![x.v_coupling.into(), ratio.into(), x.omega.into()]);
    }
    out.tables.extend([t, c]);
    Ok(out)
}

pub fn sweep(cfg: &RunConfig) -> Result<RunOutput> {
    let name = cfg.text("panel").chars().next().unwrap_or('a');
    let panel = sweep_panel(name).ok_or_else(|| ConfigError::at("panel", "unknown panel"))?;
    let mode = match cfg.text("mode") {
        "sql" => SweepMode::Sql,
        _ => SweepMode::Thermal,
    };
    if mode == SweepMode::Sql && name == 'c' {
        return Err(ConfigError::at("mode", "panel c sweeps G, which the SQL mode already minimizes over").into());
    }
    let values = cfg.optional_rate_list("values").unwrap_or(panel.values);
    let increasing = values.windows(2).all(|w| w[1] > w[0]);
    let decreasing = values.windows(2).all(|w| w[1] < w[0]);
    if !(increasing || decreasing) {
        return Err(ConfigError::at("values", "must be strictly monotone").into());
    }
    let template = cfg.detector()?;
    let search = OmegaSearch {
        base_points: cfg.count("omega_points"),
        ..OmegaSearch::default()
    };
    let res = s_min_sweep(&template, panel.parameter, &values, mode, &search)?;

    let mut out = RunOutput::default();
    out.notes.push(format!("panel {name}: swept parameter {}", panel.parameter.name()));
    for (v, why) in &res.skipped {
        out.notes.push(format!("skipped {} = {v}: {why}", panel.parameter.name()));
    }
    let mut t = Table::new(format!("sweep_{name}"), &["swept_value", "s_min", "omega_at_min", "g_opt"]);
    for e in &res.entries {
        t.push(vec![e.value.into(), e.s_min.into(), e.omega_at_min.into(), e.g_opt.into()]);
    }
    out.tables.push(t);
    Ok(out)
}

fn with_v(p: &Params, v: f64) -> Option<Params> {
    let q = p.with_v(v);
    q.validate().ok().map(|_| q)
}

pub fn snr(cfg: &RunConfig) -> Result<RunOutput> {
    let p = cfg.detector()?;
    let omega_unit = cfg.number("omega_m");
    let search = OmegaSearch {
        base_points: cfg.count("omega_points"),
        ..OmegaSearch::default()
    };
    let xi = response_coefficient(cfg.number("current"), cfg.number("probe_size"))
        .map_err(|e| ConfigError::at("current", e.to_string()))?;
    let field = cfg.number("field");
    let fields = cfg.list("field_list");
    if fields.iter().any(|b| !(*b > 0.0)) {
        return Err(ConfigError::at("field_list", "fields must be positive").into());
    }
    let reference_b_min = cfg.number("reference_b_min");
    let opt = locate_optimum(&p, &search)?;
    let mut out = RunOutput::default();
    out.notes.push(format!(
        "optimum at omega = {} (formula {}), s_add = {:e}",
        opt.x,
        omega_eff(p.omega_m1, p.v_coupling)?,
        opt.value
    ));

    let mut detection = Table::new(
        "detection",
        &[
            "convention",
            "eta",
            "omega_opt_over_omega_m",
            "s_add_at_opt",
            "snr_at_field",
            "b_min",
            "reference_b_min",
            "b_min_over_reference",
            "linearity_slope",
        ],
    );
    let mut xi_n = Vec::new();
    for conv in [SnrConvention::Power, SnrConvention::Amplitude] {
        let anchor = CalibrationAnchor {
            b_field: field,
            snr_target: cfg.number("snr_anchor"),
            omega: opt.x,
            xi,
        };
        let eta = calibrate_from_noise(opt.value, &anchor, conv)
            .map_err(|e| ConfigError::general(format!("calibration anchor: {e}")))?;
        let xn = eta * xi;
        let b_min = detection_accuracy_from_noise(opt.value, xn)?;
        let lin = snr_linearity(&p, opt.x, xn, &fields, conv)
            .map_err(|e| ConfigError::at("field_list", e.to_string()))?;
        detection.push(vec![
            conv.name().into(),
            eta.into(),
            opt.x.into(),
            opt.value.into(),
            snr_from_noise(opt.value, xn, field, conv)?.into(),
            b_min.into(),
            reference_b_min.into(),
            (b_min / reference_b_min).into(),
            lin.slope.into(),
        ]);
        xi_n.push((conv, xn));
    }

    let mut vs_b = Table::new("snr_vs_b", &["b_field", "snr_power", "snr_amplitude"]);
    for &b in &fields {
        let mut row = vec![Cell::Num(b)];
        for &(conv, xn) in &xi_n {
            row.push(snr_from_noise(opt.value, xn, b, conv)?.into());
        }
        vs_b.push(row);
    }

    let grid_search = OmegaSearch {
        span: span(cfg, "omega_min", "omega_max")?,
        base_points: cfg.count("points"),
        rel_tol: REL_TOL,
    };
    let spectrum = spectrum_sweep(&p, &grid_search.grid_for(&p)?)?;
    let mut spec = Table::new("snr_spectrum", &["omega_over_omega_m", "b_field", "snr_power", "snr_amplitude"]);
    for &b in &fields {
        for pt in &spectrum.points {
            let mut row = vec![Cell::Num(pt.omega), Cell::Num(b)];
            for &(conv, xn) in &xi_n {
                row.push(snr_from_noise(pt.s_add, xn, b, conv)?.into());
            }
            spec.push(row);
        }
    }

    let mut sr_v = Table::new("s_r_vs_v", &["v_over_omega_m", "s_r", "omega_opt_over_omega_m"]);
    for v in cfg.rate_list("sr_v_list") {
        let Some(q) = with_v(&p, v) else {
            out.notes.push(format!("skipped V = {v} in s_r_vs_v: unstable"));
            continue;
        };
        let r = s_r(&q, &search)?;
        sr_v.push(vec![v.into(), r.s_r.into(), r.omega_eff.into()]);
    }

    let mut sr_t = Table::new("s_r_vs_t", &["temperature_k", "nth", "v_over_omega_m", "s_r"]);
    for v in cfg.rate_list("sr_t_v_list") {
        let Some(q) = with_v(&p, v) else {
            out.notes.push(format!("skipped V = {v} in s_r_vs_t: unstable"));
            continue;
        };
        for t in cfg.list("sr_t_list") {
            let hot = q
                .with_temperature(t, omega_unit)
                .map_err(|e| ConfigError::at("sr_t_list", e.to_string()))?;
            let r = s_r(&hot, &search)?;
            sr_t.push(vec![t.into(), hot.nth1.into(), v.into(), r.s_r.into()]);
        }
    }

    out.tables.extend([detection, vs_b, spec, sr_v, sr_t]);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Command;

    fn cfg(c: Command, pairs: &[(&str, &str)]) -> RunConfig {
        let e: Vec<(String, String)> = pairs.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect();
        RunConfig::resolve(c, &e).unwrap()
    }

    #[test]
    fn spectrum_minimum_near_optimized_frequency() {
        let out = spectrum(&cfg(Command::Spectrum, &[("v_list", "0.2"), ("nth", "0"), ("points", "801")])).unwrap();
        let t = &out.tables[0];
        assert_eq!(t.name, "spectrum_v0.2");
        let best = t
            .rows
            .iter()
            .filter_map(|r| match (&r[0], &r[1]) {
                (Cell::Num(w), Cell::Num(s)) => Some((*w, *s)),
                _ => None,
            })
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        assert!((best.0 / 1.0954451150103321 - 1.0).abs() < 0.01, "{best:?}");
        assert_eq!(out.tables.last().unwrap().name, "spectrum_single");
    }

    #[test]
    fn unstable_v_is_a_config_error() {
        let e = spectrum(&cfg(Command::Spectrum, &[("v_list", "0.2,1.5")])).unwrap_err();
        assert_eq!(e.exit_code(), 2);
    }

    #[test]
    fn sql_panel_c_rejected() {
        let e = sweep(&cfg(Command::Sweep, &[("panel", "c"), ("mode", "sql")])).unwrap_err();
        assert_eq!(e.exit_code(), 2);
    }
}
