//! Seeded oracle and property checks over random parameter draws.

use omdp_core::coefficients::{closed_form_coefficients, solve_coefficients, OutputCoefficients};
use omdp_core::presets::reference;
use omdp_core::scalar::{rel_diff, rel_diff_c};
use omdp_core::spectra::{s_add, s_add_resonant};
use omdp_core::sql::{minimize_over_g_analytic, sql_numeric, QuarticFit, DEFAULT_G_RANGE};
use omdp_core::{Error, Params};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::commands::CommandError;
use crate::config::RunConfig;
use crate::output::{Cell, RunOutput, Table};

/// Deliberate defect injected into the closed form, to prove the oracle
/// comparison notices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mutation {
    None,
    FlipBSign,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub cases: usize,
    pub skipped: usize,
    pub worst: f64,
    pub tolerance: f64,
}

fn draw(rng: &mut ChaCha8Rng) -> (Params, f64) {
    loop {
        let mut p = Params::identical(
            1.0,
            rng.gen_range(0.5..1.5),
            rng.gen_range(0.01..1.0),
            rng.gen_range(1e-3..0.2),
            rng.gen_range(0.0..0.6),
            rng.gen_range(1e-6..1e-3),
            0.0,
        )
        .with_frequency_difference(rng.gen_range(-0.1..0.1));
        p.gamma2 = rng.gen_range(1e-6..1e-3);
        let omega = rng.gen_range(0.3..1.7);
        if p.validate().is_ok() {
            return (p, omega);
        }
    }
}

fn worst_coefficient_error(a: &OutputCoefficients<f64>, b: &OutputCoefficients<f64>) -> f64 {
    a.as_array()
        .iter()
        .zip(b.as_array())
        .map(|(x, y)| rel_diff_c(*x, y))
        .fold(0.0, f64::max)
}

fn check(name: &'static str, tolerance: f64, cases: usize, mut f: impl FnMut() -> Result<Option<f64>, Error>) -> Result<Check, Error> {
    let (mut worst, mut skipped) = (0.0f64, 0);
    for _ in 0..cases {
        match f()? {
            Some(e) => worst = worst.max(if e.is_nan() { f64::INFINITY } else { e }),
            None => skipped += 1,
        }
    }
    Ok(Check {
        name,
        passed: worst < tolerance,
        cases,
        skipped,
        worst,
        tolerance,
    })
}

pub fn run_checks(seed: u64, cases: usize, mutation: Mutation) -> Result<Vec<Check>, Error> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checks = Vec::new();

    checks.push(check("coefficient_oracle", 1e-9, cases, || {
        let (p, w) = draw(&mut rng);
        let mut cf = closed_form_coefficients(&p, w)?;
        if mutation == Mutation::FlipBSign {
            cf.b_coef = -cf.b_coef;
        }
        let sv = solve_coefficients(&p, w)?;
        Ok(Some(worst_coefficient_error(&cf, &sv)))
    })?);

    checks.push(check("exchange_symmetry", 1e-10, cases, || {
        let (p, w) = draw(&mut rng);
        let a = solve_coefficients(&p, w)?;
        let b = solve_coefficients(&p.swapped(), w)?;
        let e = [
            rel_diff_c(a.a_coef, b.a_coef),
            rel_diff_c(a.b_coef, b.b_coef),
            rel_diff_c(a.c_coef, b.d_coef),
            rel_diff_c(a.d_coef, b.c_coef),
            rel_diff_c(a.d_e, b.d_e),
        ];
        Ok(Some(e.into_iter().fold(0.0, f64::max)))
    })?);

    checks.push(check("quartic_structure", 1e-10, cases, || {
        let (p, w) = draw(&mut rng);
        let fit = QuarticFit::through(|g| Ok(s_add(&p.with_g(g), w)?.s_add), 0.03)?;
        Ok(Some(if fit.p > 0.0 && fit.q > 0.0 { fit.residual } else { f64::INFINITY }))
    })?);

    checks.push(check("sql_analytic_vs_numeric", 1e-6, cases.min(100), || {
        let (mut p, w) = draw(&mut rng);
        p.omega_m2 = p.omega_m1;
        p.gamma2 = p.gamma1;
        match minimize_over_g_analytic(&p, w) {
            Ok(a) => {
                let n = sql_numeric(&p, w, DEFAULT_G_RANGE)?;
                Ok((!n.boundary_warning).then(|| rel_diff(a.s_sql, n.s_sql)))
            }
            Err(Error::StructureViolation { .. }) => Ok(None),
            Err(e) => Err(e),
        }
    })?);

    checks.push(check("thermal_halving", 1e-12, cases, || {
        let (p, w) = draw(&mut rng);
        let nth = rng.gen_range(0.0..1e4);
        let mut p = p.with_nth(nth, nth);
        p.omega_m2 = p.omega_m1;
        p.gamma2 = p.gamma1;
        let s = s_add(&p, w)?;
        let expect = p.gamma1 * nth / 2.0;
        Ok(Some((s.s_th - expect).abs() / expect.max(f64::MIN_POSITIVE)))
    })?);

    Ok(checks)
}

/// Relative deviation of the resonant reduction from the full expression at
/// the reference parameters and zero temperature, over `[0.9, 1.1]`.
pub fn resonant_deviation(points: usize) -> Result<Vec<(f64, f64, f64)>, Error> {
    let p = reference().ground_state();
    (0..points)
        .map(|i| {
            let w = 0.9 + 0.2 * i as f64 / (points - 1) as f64;
            let full = s_add(&p, w)?.s_add;
            let resonant = s_add_resonant(&p, w)?;
            Ok((w, full, resonant))
        })
        .collect()
}

pub fn validate(cfg: &RunConfig) -> Result<(RunOutput, bool), CommandError> {
    let mutation = match cfg.text("mutation") {
        "flip_b_sign" => Mutation::FlipBSign,
        _ => Mutation::None,
    };
    let checks = run_checks(cfg.count("seed") as u64, cfg.count("cases"), mutation)?;
    let mut out = RunOutput::default();
    let mut t = Table::new("validate", &["check", "passed", "cases", "skipped", "worst", "tolerance"]);
    for c in &checks {
        t.push(vec![
            c.name.into(),
            c.passed.into(),
            Cell::Int(c.cases as i64),
            Cell::Int(c.skipped as i64),
            c.worst.into(),
            c.tolerance.into(),
        ]);
    }
    out.tables.push(t);

    let dev = resonant_deviation(201)?;
    let mut d = Table::new("resonant_deviation", &["omega_over_omega_m", "s_add_full", "s_add_resonant", "rel_deviation"]);
    let mut within = 0;
    let mut max_dev: f64 = 0.0;
    for &(w, full, res) in &dev {
        let r = (res - full).abs() / full;
        within += usize::from(r < 0.1);
        max_dev = max_dev.max(r);
        d.push(vec![w.into(), full.into(), res.into(), r.into()]);
    }
    out.notes.push(format!(
        "resonant reduction within 10% of the full expression at {within} of {} frequencies; largest deviation {max_dev:e}",
        dev.len()
    ));
    out.tables.push(d);
    if mutation != Mutation::None {
        out.notes.push(format!("mutation active: {}", cfg.text("mutation")));
    }
    Ok((out, checks.iter().all(|c| c.passed)))
}
