use omdp_core::model::{omega_eff, DetectorParams};
use omdp_core::presets::reference;
use omdp_core::scalar::rel_diff;
use omdp_core::spectra::{noise_minimum, s_add, s_add_som, som_noise_minimum, OmegaSearch};
use omdp_core::sql::QuarticFit;
use proptest::prelude::*;

fn detector() -> impl Strategy<Value = (DetectorParams<f64>, f64)> {
    (
        0.5f64..1.5,
        0.01f64..1.0,
        1e-3f64..0.2,
        0.0f64..0.6,
        -0.1f64..0.1,
        1e-6f64..1e-3,
        0.0f64..100.0,
        0.3f64..1.7,
    )
        .prop_map(|(dp, kappa, g, v, dw, gamma, nth, omega)| {
            (DetectorParams::identical(1.0, dp, kappa, g, v, gamma, nth).with_frequency_difference(dw), omega)
        })
        .prop_filter("stable", |(p, _)| p.validate().is_ok())
}

proptest! {
    #[test]
    fn thermal_share_of_identical_pair_is_halved(
        gamma in 1e-6f64..1e-2, nth in 0.0f64..1e4, v in 0.0f64..0.6, w in 0.2f64..2.0
    ) {
        let p = reference().with_v(v).with_nth(nth, nth);
        let mut p = p;
        p.gamma1 = gamma;
        p.gamma2 = gamma;
        let s = s_add(&p, w).unwrap();
        let expect = gamma * nth / 2.0;
        prop_assert!((s.s_th - expect).abs() <= 1e-12 * expect.max(f64::MIN_POSITIVE));
    }

    #[test]
    fn additional_noise_dominates_thermal((p, w) in detector()) {
        let s = s_add(&p, w).unwrap();
        prop_assert!(s.s_add >= s.s_th);
    }

    #[test]
    fn exchange_leaves_noise_unchanged((p, w) in detector()) {
        let mut q = p;
        q.gamma2 = p.gamma1 * 1.7;
        q.nth2 = p.nth1 * 0.3;
        let a = s_add(&q, w).unwrap();
        let b = s_add(&q.swapped(), w).unwrap();
        prop_assert!(rel_diff(a.s_add, b.s_add) < 1e-10);
        prop_assert!(rel_diff(a.s_th, b.s_th) < 1e-10);
    }

    #[test]
    fn zero_temperature_noise_is_inverse_plus_quadratic_in_g((p, w) in detector()) {
        let cold = p.ground_state();
        let fit = QuarticFit::through(|g| Ok(s_add(&cold.with_g(g), w)?.s_add), 0.03).unwrap();
        prop_assert!(fit.residual < 1e-10, "residual {}", fit.residual);
        prop_assert!(fit.p > 0.0 && fit.q > 0.0);
    }
}

#[test]
fn single_probe_slopes_in_coupling() {
    let s = |g: f64| s_add_som(1.0, 1e-5, 0.1, g, 0.0, 1.0).unwrap();
    let slope = |g: f64| (s(g * 1.01).ln() - s(g / 1.01).ln()) / (1.01f64.ln() * 2.0);
    assert!((slope(1e-7) + 2.0).abs() < 0.02, "{}", slope(1e-7));
    assert!((slope(10.0) - 2.0).abs() < 0.02, "{}", slope(10.0));
}

#[test]
fn zero_temperature_minimum_sits_at_optimized_frequency() {
    let search = OmegaSearch::default();
    for v in [0.1, 0.2, 0.3] {
        let p = reference().with_v(v).ground_state();
        let m = noise_minimum(&p, &search).unwrap();
        let w = omega_eff(1.0, v).unwrap();
        assert!((m.x / w - 1.0).abs() < 0.01, "V = {v}: {} vs {w}", m.x);
    }
}

#[test]
fn coupling_lowers_thermal_minimum() {
    let search = OmegaSearch::default();
    let at = |v: f64| noise_minimum(&reference().with_v(v), &search).unwrap().value;
    let (s0, s2, s4) = (at(0.0), at(0.2), at(0.4));
    assert!(s4 < s2 && s2 < s0, "{s0} {s2} {s4}");
    let single = som_noise_minimum(&reference(), &search).unwrap().value;
    assert!(rel_diff(s0, single) < 0.05, "{s0} vs {single}");
}
