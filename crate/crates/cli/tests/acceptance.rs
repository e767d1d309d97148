//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use omdp_core::coefficients::{closed_form_coefficients, solve_coefficients};
use omdp_core::model::omega_eff;
use omdp_core::presets::{magnetometer, reference, sweep_panel};
use omdp_core::scalar::{rel_diff, rel_diff_c};
use omdp_core::sensing::{
    calibrate_from_noise, detection_accuracy_from_noise, locate_optimum, response_coefficient, s_r, snr_linearity,
    CalibrationAnchor, SnrConvention,
};
use omdp_core::spectra::{noise_minimum, s_add, s_add_som, OmegaSearch};
use omdp_core::sql::{minimize_over_g_analytic, r_factors, s_min_sweep, sql_numeric, SweepMode, DEFAULT_G_RANGE};
use omdp_core::{Error, Params};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

fn random_detector(rng: &mut ChaCha8Rng, nth: f64) -> (Params, f64) {
    loop {
        let mut p = Params::identical(
            1.0,
            rng.gen_range(0.5..1.5),
            rng.gen_range(0.01..1.0),
            rng.gen_range(1e-3..0.2),
            rng.gen_range(0.0..0.6),
            rng.gen_range(1e-6..1e-3),
            nth,
        )
        .with_frequency_difference(rng.gen_range(-0.1..0.1));
        p.gamma2 = rng.gen_range(1e-6..1e-3);
        let w = rng.gen_range(0.3..1.7);
        if p.validate().is_ok() {
            return (p, w);
        }
    }
}

fn coefficient_oracle() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let (p, w) = random_detector(&mut rng, 0.0);
        let a = closed_form_coefficients(&p, w).unwrap();
        let b = solve_coefficients(&p, w).unwrap();
        for (x, y) in a.as_array().iter().zip(b.as_array()) {
            worst = worst.max(rel_diff_c(*x, y));
        }
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        worst < 1e-9 && secs < 5.0,
        format!("worst relative error {worst:.2e} over 1000 sets (< 1e-9), {secs:.2} s (< 5 s)"),
    )
}

fn sql_cross_check() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let (mut compared, mut skipped, mut worst) = (0, 0, 0.0f64);
    while compared < 100 {
        let (mut p, w) = random_detector(&mut rng, 0.0);
        p.omega_m2 = p.omega_m1;
        p.gamma2 = p.gamma1;
        match minimize_over_g_analytic(&p, w) {
            Ok(a) => {
                let n = sql_numeric(&p, w, DEFAULT_G_RANGE).unwrap();
                if n.boundary_warning {
                    skipped += 1;
                    continue;
                }
                worst = worst.max(rel_diff(a.s_sql, n.s_sql));
                compared += 1;
            }
            Err(Error::StructureViolation { .. }) => skipped += 1,
            Err(e) => return outcome(false, format!("analytic minimizer failed: {e}")),
        }
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        worst < 1e-6 && secs < 10.0,
        format!("worst relative gap {worst:.2e} over 100 sets (< 1e-6), {skipped} draws skipped, {secs:.2} s (< 10 s)"),
    )
}

fn optimized_frequency() -> Outcome {
    let search = OmegaSearch::default();
    let mut ok = true;
    let mut parts = Vec::new();
    for v in [0.1, 0.2, 0.3] {
        let p = reference().with_v(v).ground_state();
        let m = noise_minimum(&p, &search).unwrap();
        let w = omega_eff(1.0, v).unwrap();
        let off = (m.x / w - 1.0).abs();
        ok &= off < 0.01;
        parts.push(format!("V={v}: {:.5} vs {w:.5} ({:.2}%)", m.x, off * 100.0));
    }
    outcome(ok, format!("{} (< 1%)", parts.join("; ")))
}

fn sql_ratios() -> Outcome {
    let p = reference().with_v(0.2).ground_state();
    let w = omega_eff(1.0, 0.2).unwrap();
    let r = r_factors(&p, w).unwrap();
    let uncoupled = reference().with_v(0.0).ground_state();
    let mut max_r1: f64 = 0.0;
    let mut at = 0.0;
    for i in 0..=200 {
        let w = 0.9 + 0.2 * i as f64 / 200.0;
        let r1 = r_factors(&uncoupled, w).unwrap().r1;
        if r1 > max_r1 {
            max_r1 = r1;
            at = w;
        }
    }
    let ok = r.r1 <= 1e-6 && r.r2 <= 1e-4 && max_r1 <= 1.0;
    outcome(
        ok,
        format!(
            "at omega_eff, V=0.2: R1 = {:.3e} (<= 1e-6), R2 = {:.3e} (<= 1e-4); V=0 over [0.9, 1.1]: max R1 = {max_r1:.3e} at {at:.3} (<= 1)",
            r.r1, r.r2
        ),
    )
}

fn sweep_anchors() -> Outcome {
    let search = OmegaSearch::default();
    let a = sweep_panel('a').unwrap();
    let s = s_min_sweep(&a.params, a.parameter, &[0.47], SweepMode::Thermal, &search).unwrap();
    let s_min = s.entries[0].s_min;
    let anchor_ok = s_min >= 0.015 / 2.0 && s_min <= 0.015 * 2.0;

    let c = sweep_panel('c').unwrap();
    let g = s_min_sweep(&c.params, c.parameter, &c.values, SweepMode::Thermal, &search).unwrap();
    let best = g.entries.iter().min_by(|x, y| x.s_min.total_cmp(&y.s_min)).unwrap();
    let argmin_ok = (best.value / 0.02 - 1.0).abs() <= 0.3;

    // Same quantities on a plain uniform grid of step 0.01, for comparison.
    let coarse = |p: &Params| {
        (0..=100)
            .map(|i| s_add(p, 0.5 + 0.01 * i as f64).map_or(f64::INFINITY, |s| s.s_add))
            .fold(f64::INFINITY, f64::min)
    };
    let coarse_v = coarse(&a.params.with_v(0.47));
    let coarse_g = c
        .values
        .iter()
        .map(|&g| (g, coarse(&c.params.with_g(g))))
        .min_by(|x, y| x.1.total_cmp(&y.1))
        .unwrap();
    outcome(
        anchor_ok && argmin_ok,
        format!(
            "S_min(V=0.47) = {s_min:.3e} (0.015 within x2); argmin over G = {:.4} with S_min {:.3e} (0.02 +-30%); \
             uniform 0.01 grid gives {coarse_v:.3e} and argmin G = {:.4}",
            best.value, best.s_min, coarse_g.0
        ),
    )
}

fn thermal_halving() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let nth = rng.gen_range(1.0..1e4);
        let gamma = rng.gen_range(1e-6..1e-3);
        let mut p = reference().with_nth(nth, nth);
        p.gamma1 = gamma;
        p.gamma2 = gamma;
        let w = rng.gen_range(0.2..2.0);
        let s = s_add(&p, w).unwrap();
        worst = worst.max(rel_diff(s.s_th, gamma * nth / 2.0));
    }
    outcome(worst < 1e-12, format!("worst relative error {worst:.2e} at 100 frequencies (< 1e-12)"))
}

fn log_slope(g_lo: f64, g_hi: f64) -> f64 {
    let xs: Vec<f64> = (0..=20).map(|i| g_lo * (g_hi / g_lo).powf(i as f64 / 20.0)).collect();
    let pts: Vec<(f64, f64)> = xs
        .iter()
        .map(|&g| (g.ln(), s_add_som(1.0, 1e-5, 0.1, g, 0.0, 1.0).unwrap().ln()))
        .collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

fn single_probe_scaling() -> Outcome {
    let small = log_slope(1e-7, 1e-6);
    let large = log_slope(10.0, 100.0);
    outcome(
        (small + 2.0).abs() <= 0.02 && (large - 2.0).abs() <= 0.02,
        format!("slope {small:.4} for G in [1e-7, 1e-6] (-2 +-0.02), {large:.4} for G in [10, 100] (+2 +-0.02)"),
    )
}

fn s_r_limit() -> Outcome {
    let search = OmegaSearch::default();
    let mut ok = true;
    let mut parts = Vec::new();
    for nth in [1e3, 1e4, 1e5, 1e6] {
        let p = reference().with_nth(nth, nth);
        let r = s_r(&p, &search).unwrap().s_r;
        ok &= (r / 2.0 - 1.0).abs() <= 0.05;
        parts.push(format!("n_th={nth:.0e}: {r:.4}"));
    }
    outcome(ok, format!("{} (2 within 5%)", parts.join("; ")))
}

fn magnetometer_accuracy() -> Outcome {
    let p = magnetometer::params()
        .with_temperature(magnetometer::TEMPERATURE, magnetometer::OMEGA_M_SI)
        .unwrap();
    let opt = locate_optimum(&p, &OmegaSearch::default()).unwrap();
    let xi = response_coefficient(magnetometer::CURRENT, magnetometer::PROBE_SIZE).unwrap();
    let anchor = CalibrationAnchor {
        b_field: magnetometer::FIELD,
        snr_target: magnetometer::SNR_ANCHOR,
        omega: opt.x,
        xi,
    };
    let b_min = |conv| {
        let eta = calibrate_from_noise(opt.value, &anchor, conv).unwrap();
        detection_accuracy_from_noise(opt.value, eta * xi).unwrap()
    };
    let amp = b_min(SnrConvention::Amplitude);
    let pow = b_min(SnrConvention::Power);
    let ratio = amp / magnetometer::REFERENCE_B_MIN;
    outcome(
        (0.1..=10.0).contains(&ratio),
        format!(
            "amplitude convention: B_min = {amp:.3e} T, {ratio:.3} x 8.4e-20 (within one order); power convention: B_min = {pow:.3e} T, {:.1} x 8.4e-20",
            pow / magnetometer::REFERENCE_B_MIN
        ),
    )
}

fn linearity() -> Outcome {
    let p = magnetometer::params()
        .with_temperature(magnetometer::TEMPERATURE, magnetometer::OMEGA_M_SI)
        .unwrap();
    let w = locate_optimum(&p, &OmegaSearch::default()).unwrap().x;
    let bs = [1e-15, 1e-14, 1e-13, 1e-12];
    let pw = snr_linearity(&p, w, 1e24, &bs, SnrConvention::Power).unwrap();
    let am = snr_linearity(&p, w, 1e24, &bs, SnrConvention::Amplitude).unwrap();
    let noise_constant = pw.noise.windows(2).all(|x| x[0] == x[1]);
    outcome(
        (pw.slope - 2.0).abs() <= 1e-9 && (am.slope - 1.0).abs() <= 1e-9 && noise_constant,
        format!(
            "power slope {:.12}, amplitude slope {:.12} (exact to 1e-9); S_add identical at every B: {noise_constant}",
            pw.slope, am.slope
        ),
    )
}

fn data_files(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut files = BTreeMap::new();
    for e in fs::read_dir(dir).unwrap() {
        let path = e.unwrap().path();
        let name = path.file_name().unwrap().to_string_lossy().into_owned();
        if name == "manifest.cfg" {
            continue;
        }
        let bytes = fs::read(&path).unwrap();
        // JSON documents embed a timestamped manifest; compare the data member.
        let bytes = if name.ends_with(".json") {
            let doc: serde_json::Value = serde_json::from_slice(&bytes).unwrap();
            serde_json::to_vec(&doc["data"]).unwrap()
        } else {
            bytes
        };
        files.insert(name, bytes);
    }
    files
}

fn determinism() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_omdp-sense");
    let root = tempfile::TempDir::new().unwrap();
    let runs: [(&str, &[&str]); 6] = [
        ("spectrum", &[]),
        ("sql-map", &["--set", "omega_points=101", "--set", "v_points=11"]),
        ("sweep", &["--set", "values=0.1,0.2,0.3,0.47"]),
        ("snr", &[]),
        ("validate", &[]),
        ("validate", &["--format", "json"]),
    ];
    let mut failures = Vec::new();
    for (i, (cmd, extra)) in runs.iter().enumerate() {
        let first = root.path().join(format!("{i}a"));
        let second = root.path().join(format!("{i}b"));
        let format: &[&str] = if extra.contains(&"json") { &["--format", "json"] } else { &[] };
        let a = Command::new(bin).arg(cmd).args(*extra).arg("--out").arg(&first).output().unwrap();
        let manifest = first.join("manifest.cfg");
        let b = Command::new(bin)
            .arg(cmd)
            .arg("--config")
            .arg(&manifest)
            .args(format)
            .arg("--out")
            .arg(&second)
            .output()
            .unwrap();
        if !a.status.success() || !b.status.success() {
            failures.push(format!("{cmd}: run failed"));
            continue;
        }
        let (x, y) = (data_files(&first), data_files(&second));
        if x.is_empty() || x != y {
            failures.push(format!("{cmd}: data differ"));
        }
    }
    outcome(
        failures.is_empty(),
        if failures.is_empty() {
            format!("{} runs replayed from their manifests with byte-identical data", runs.len())
        } else {
            failures.join("; ")
        },
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("coefficient oracle equivalence", coefficient_oracle),
        ("SQL minimizer cross-check", sql_cross_check),
        ("optimized frequency", optimized_frequency),
        ("SQL ratios", sql_ratios),
        ("minimal-noise sweep anchors", sweep_anchors),
        ("thermal halving", thermal_halving),
        ("single-probe scaling", single_probe_scaling),
        ("S_R limit", s_r_limit),
        ("magnetometer detection accuracy", magnetometer_accuracy),
        ("linearity", linearity),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let o = f();
        if !o.passed {
            failed += 1;
        }
        println!("criterion {:>2} {} {name}: {}", i + 1, if o.passed { "PASS" } else { "FAIL" }, o.detail);
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
