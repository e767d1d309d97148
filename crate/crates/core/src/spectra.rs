//! Additional-noise and thermal-noise spectral densities.
//!
//! Spectra are referred to the signal: the homodyne output divided by the
//! transduction `E = C + D`. Inputs are vacuum (`⟨a_in a_in†⟩ = δ`) and
//! Markovian thermal baths (`⟨P_th† P_th⟩ = n_th δ`).

use rayon::prelude::*;

use crate::coefficients::{solve_coefficients, OutputCoefficients};
use crate::error::{Error, Result};
use crate::model::{chi_mech, frequency_grid, normal_modes, omega_eff, DetectorParams, SusceptibilitySet};
use crate::optimize::{minimize_on_grid, ScalarMinimum};
use crate::scalar::{im, re, Cplx, Real};

/// Total additional noise and its thermal share at one frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseDensity<T> {
    pub s_add: T,
    pub s_th: T,
}

impl<T: Real> NoiseDensity<T> {
    /// Shot-noise plus back-action part.
    pub fn quantum(&self) -> T {
        self.s_add - self.s_th
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumPoint<T> {
    pub omega: T,
    pub s_add: T,
    pub s_th: T,
    /// Amplification `|C + D|`.
    pub a_p: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumResult<T> {
    pub points: Vec<SpectrumPoint<T>>,
    pub params: DetectorParams<T>,
}

/// Additional noise from the coefficient decomposition:
/// `S_add = ½(|A/E|² + |B/E|²) + S_th`,
/// `S_th = γ_1 n_th1 |C/E|² + γ_2 n_th2 |D/E|²`.
pub fn s_add<T: Real>(params: &DetectorParams<T>, omega: T) -> Result<NoiseDensity<T>> {
    let c = solve_coefficients(params, omega)?;
    density(params, &c)
}

fn density<T: Real>(params: &DetectorParams<T>, c: &OutputCoefficients<T>) -> Result<NoiseDensity<T>> {
    let e2 = c.e_coef.norm_sqr();
    if !(e2 > T::zero()) {
        return Err(Error::NoTransduction);
    }
    let s_th = (params.gamma1 * params.nth1 * c.c_coef.norm_sqr() + params.gamma2 * params.nth2 * c.d_coef.norm_sqr()) / e2;
    let shot_ba = T::lit(0.5) * (c.a_coef.norm_sqr() + c.b_coef.norm_sqr()) / e2;
    Ok(NoiseDensity {
        s_add: shot_ba + s_th,
        s_th,
    })
}

/// Thermal share computed from the susceptibilities alone, using
/// `C/E = (Vχ_m1χ_m2 − χ_m1) / (2Vχ_m1χ_m2 − χ_m1 − χ_m2)` (and `D/E` alike).
pub fn s_th_from_susceptibilities<T: Real>(params: &DetectorParams<T>, omega: T) -> Result<T> {
    let s = SusceptibilitySet::at(params, omega)?;
    let v = re(params.v_coupling);
    let m12 = s.chi_m1 * s.chi_m2;
    let x = re(T::lit(2.0)) * v * m12 - s.chi_m1 - s.chi_m2;
    let c_over_e = (v * m12 - s.chi_m1) / x;
    let d_over_e = (v * m12 - s.chi_m2) / x;
    Ok(params.gamma1 * params.nth1 * c_over_e.norm_sqr() + params.gamma2 * params.nth2 * d_over_e.norm_sqr())
}

/// Shot-noise and back-action amplitudes `(α, β)` of the resonant formula
/// `S_add = |α/G + βG|² + S_th`, valid for `Δ′ = ω_m1 = ω_m2`, real `G`, θ = 0:
///
/// `α = (1 − V²χ_m1χ_m2)/(2Vχ_m1χ_m2 − χ_m1 − χ_m2) · (−i[ω² + (κ/2 − iω)²]) / (2√κ(κ/2 − iω))`,
/// `β = 2(κ − iω_m) / (√κ(κ − 2iω_m))`.
pub fn resonant_components<T: Real>(params: &DetectorParams<T>, omega: T) -> Result<(Cplx<T>, Cplx<T>)> {
    params.validate()?;
    let tol = T::lit(1e-12);
    let wm = params.omega_m1;
    let near = |a: T, b: T| (a - b).abs() <= tol * a.abs().max(b.abs());
    if !near(params.delta_prime, wm) || !near(params.omega_m2, wm) {
        return Err(Error::param("delta_prime/omega_m2", "resonant formula needs delta' = omega_m1 = omega_m2"));
    }
    if params.symmetric_real_coupling().is_none() || params.theta != T::zero() {
        return Err(Error::param("g/theta", "resonant formula needs equal real G and theta = 0"));
    }
    let s = SusceptibilitySet::at(params, omega)?;
    let v = re(params.v_coupling);
    let m12 = s.chi_m1 * s.chi_m2;
    let k = (re(T::one()) - v * v * m12) / (re(T::lit(2.0)) * v * m12 - s.chi_m1 - s.chi_m2);
    let (alpha_cav, beta) = cavity_terms(params.kappa, wm, omega);
    Ok((k * alpha_cav, beta))
}

/// `(−i[ω² + (κ/2 − iω)²] / (2√κ(κ/2 − iω)), 2(κ − iω_m) / (√κ(κ − 2iω_m)))`.
fn cavity_terms<T: Real>(kappa: T, omega_m: T, omega: T) -> (Cplx<T>, Cplx<T>) {
    let two = T::lit(2.0);
    let sk = kappa.sqrt();
    let half = Cplx::new(kappa / two, -omega);
    let num = -im(T::one()) * (re(omega * omega) + half * half);
    let alpha = num / (half * (two * sk));
    let beta = Cplx::new(kappa, -omega_m) * two / (Cplx::new(kappa, -two * omega_m) * sk);
    (alpha, beta)
}

/// Resonant closed form of the additional noise, evaluated literally.
pub fn s_add_resonant<T: Real>(params: &DetectorParams<T>, omega: T) -> Result<T> {
    let g = params.symmetric_real_coupling().unwrap_or(T::zero());
    if g == T::zero() {
        return Err(Error::NoTransduction);
    }
    let (alpha, beta) = resonant_components(params, omega)?;
    Ok((alpha / g + beta * g).norm_sqr() + s_th_from_susceptibilities(params, omega)?)
}

/// Shot-noise and back-action amplitudes `(α, β)` of a single oscillator
/// probe: `S_add1 = |α/G + βG|² + γ_1 n_th1` with
/// `α = −i[ω² + (κ/2 − iω)²] / (2χ_m1√κ(κ/2 − iω))`.
pub fn som_components<T: Real>(omega_m: T, gamma1: T, kappa: T, omega: T) -> Result<(Cplx<T>, Cplx<T>)> {
    if !(kappa > T::zero()) {
        return Err(Error::param("kappa", "must be positive"));
    }
    let chi = chi_mech(omega, omega_m, gamma1)?;
    let (alpha, beta) = cavity_terms(kappa, omega_m, omega);
    Ok((alpha / chi, beta))
}

/// Additional noise of a single-oscillator, single-probe detector.
pub fn s_add_som<T: Real>(omega_m: T, gamma1: T, kappa: T, g_lin: T, nth1: T, omega: T) -> Result<T> {
    if g_lin == T::zero() {
        return Err(Error::NoTransduction);
    }
    if !(nth1 >= T::zero()) {
        return Err(Error::param("nth1", "must be non-negative"));
    }
    let (alpha, beta) = som_components(omega_m, gamma1, kappa, omega)?;
    Ok((alpha / g_lin + beta * g_lin).norm_sqr() + gamma1 * nth1)
}

/// Single-probe baseline sharing `ω_m1, γ_1, κ, G, n_th1` with `params`.
pub fn s_add_som_for<T: Real>(params: &DetectorParams<T>, omega: T) -> Result<T> {
    let g = params
        .symmetric_real_coupling()
        .or((params.g1.im == T::zero()).then_some(params.g1.re))
        .ok_or_else(|| Error::param("g1", "single-probe baseline needs a real coupling"))?;
    s_add_som(params.omega_m1, params.gamma1, params.kappa, g, params.nth1, omega)
}

fn check_grid<T: Real>(grid: &[T]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::param("grid", "must not be empty"));
    }
    if !grid.windows(2).all(|w| w[1] > w[0]) {
        return Err(Error::param("grid", "must be strictly increasing"));
    }
    Ok(())
}

/// Additional noise, thermal share and amplification on a frequency grid.
pub fn spectrum_sweep<T: Real>(params: &DetectorParams<T>, grid: &[T]) -> Result<SpectrumResult<T>> {
    params.validate()?;
    check_grid(grid)?;
    let points = grid
        .par_iter()
        .map(|&omega| {
            let c = solve_coefficients(params, omega)?;
            let n = density(params, &c)?;
            Ok(SpectrumPoint {
                omega,
                s_add: n.s_add,
                s_th: n.s_th,
                a_p: c.e_coef.norm(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SpectrumResult { points, params: *params })
}

/// Single-probe baseline spectrum. The amplification column is the
/// transduction `|C|` of oscillator 1 with the second oscillator detached.
pub fn som_spectrum<T: Real>(params: &DetectorParams<T>, grid: &[T]) -> Result<SpectrumResult<T>> {
    params.validate()?;
    check_grid(grid)?;
    let mut single = params.with_v(T::zero());
    single.g2 = Cplx::new(T::zero(), T::zero());
    let points = grid
        .par_iter()
        .map(|&omega| {
            let c = solve_coefficients(&single, omega)?;
            Ok(SpectrumPoint {
                omega,
                s_add: s_add_som_for(params, omega)?,
                s_th: params.gamma1 * params.nth1,
                a_p: c.c_coef.norm(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SpectrumResult { points, params: *params })
}

/// Where and how finely to look for the minimum over frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OmegaSearch<T> {
    /// Search window as multiples of `ω_m1`.
    pub span: (T, T),
    pub base_points: usize,
    /// Relative bracket width at which the golden-section polish stops.
    pub rel_tol: T,
}

impl<T: Real> Default for OmegaSearch<T> {
    fn default() -> Self {
        Self {
            span: (T::lit(0.5), T::lit(1.5)),
            base_points: 4001,
            rel_tol: T::lit(1e-12),
        }
    }
}

impl<T: Real> OmegaSearch<T> {
    /// Refined grid seeded at the mechanical frequencies, the coupled normal
    /// modes and `sqrt(ω_m(ω_m + V))`, refined below the smaller damping rate.
    pub fn grid_for(&self, params: &DetectorParams<T>) -> Result<Vec<T>> {
        let wm = params.omega_m1;
        let mut centers = vec![params.omega_m1, params.omega_m2];
        if let Ok((lo, hi)) = normal_modes(params.omega_m1, params.omega_m2, params.v_coupling) {
            centers.extend([lo, hi]);
        }
        if let Ok(w) = omega_eff(wm, params.v_coupling) {
            centers.push(w);
        }
        let linewidth = params.gamma1.min(params.gamma2);
        frequency_grid(&centers, linewidth, (self.span.0 * wm, self.span.1 * wm), self.base_points)
    }
}

/// Minimum over frequency of any spectrum evaluated on the refined grid of
/// `params`, followed by golden-section polish.
pub fn minimize_over_omega<T, F>(params: &DetectorParams<T>, search: &OmegaSearch<T>, f: F) -> Result<ScalarMinimum<T>>
where
    T: Real,
    F: FnMut(T) -> Result<T>,
{
    let grid = search.grid_for(params)?;
    minimize_on_grid(f, &grid, search.rel_tol)
}

/// Frequency of least additional noise (the optimized detection frequency).
pub fn noise_minimum<T: Real>(params: &DetectorParams<T>, search: &OmegaSearch<T>) -> Result<ScalarMinimum<T>> {
    params.validate()?;
    minimize_over_omega(params, search, |w| Ok(s_add(params, w)?.s_add))
}

/// Frequency of least single-probe noise.
pub fn som_noise_minimum<T: Real>(params: &DetectorParams<T>, search: &OmegaSearch<T>) -> Result<ScalarMinimum<T>> {
    params.validate()?;
    let mut single = params.with_v(T::zero());
    single.omega_m2 = single.omega_m1;
    minimize_over_omega(&single, search, |w| s_add_som_for(params, w))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reference(v: f64) -> DetectorParams<f64> {
        DetectorParams::identical(1.0, 1.0, 0.1, 0.03, v, 1e-5, 10.0)
    }

    #[test]
    fn thermal_share_halves_for_identical_pair() {
        let p = reference(0.2);
        for w in [0.7, 0.95, 1.0, 1.0954, 1.3] {
            let n = s_add(&p, w).unwrap();
            assert!((n.s_th - 0.5 * 1e-5 * 10.0).abs() < 1e-12 * 5e-5, "{}", n.s_th);
            assert!(n.s_add >= n.s_th);
        }
    }

    #[test]
    fn zero_temperature_has_no_thermal_share() {
        let p = reference(0.2).ground_state();
        let n = s_add(&p, 1.05).unwrap();
        assert_eq!(n.s_th, 0.0);
        assert!(n.s_add > 0.0);
        let hot = s_add(&reference(0.2), 1.05).unwrap();
        assert!((hot.quantum() - n.s_add).abs() < 1e-12 * n.s_add);
    }

    #[test]
    fn thermal_share_matches_susceptibility_form() {
        let mut p = reference(0.3).with_frequency_difference(0.02);
        p.nth2 = 3.0;
        p.gamma2 = 4e-5;
        for w in [0.9, 1.0, 1.1] {
            let a = s_add(&p, w).unwrap().s_th;
            let b = s_th_from_susceptibilities(&p, w).unwrap();
            assert!((a - b).abs() < 1e-10 * b);
        }
    }

    #[test]
    fn no_coupling_means_no_transduction() {
        assert_eq!(s_add(&reference(0.2).with_g(0.0), 1.0).unwrap_err(), Error::NoTransduction);
        assert_eq!(s_add_som(1.0_f64, 1e-5, 0.1, 0.0, 0.0, 1.0).unwrap_err(), Error::NoTransduction);
    }

    #[test]
    fn som_thermal_floor_is_additive() {
        let hot = s_add_som(1.0_f64, 1e-5, 0.1, 0.5, 10.0, 1.0).unwrap();
        let cold = s_add_som(1.0_f64, 1e-5, 0.1, 0.5, 0.0, 1.0).unwrap();
        assert!((hot - cold - 1e-4).abs() < 1e-12 * hot);
    }

    #[test]
    fn som_cross_term_minimum_identity() {
        // min over G > 0 of |α/G + βG|² is 2(|α||β| + Re(αβ*)) at G = sqrt(|α|/|β|).
        let (alpha, beta) = som_components(1.0_f64, 1e-5, 0.1, 1.0).unwrap();
        let g_opt = (alpha.norm() / beta.norm()).sqrt();
        let closed = 2.0 * (alpha.norm() * beta.norm() + (alpha * beta.conj()).re);
        let at_opt = s_add_som(1.0_f64, 1e-5, 0.1, g_opt, 0.0, 1.0).unwrap();
        assert!((at_opt - closed).abs() < 1e-9 * closed.abs().max(1e-300) + 1e-20);
        for f in [0.9, 0.99, 1.01, 1.1] {
            assert!(s_add_som(1.0_f64, 1e-5, 0.1, g_opt * f, 0.0, 1.0).unwrap() >= at_opt);
        }
    }

    #[test]
    fn resonant_formula_divergences() {
        let p = reference(0.2).ground_state();
        let small = [1e-6, 2e-6].map(|g| s_add_resonant(&p.with_g(g), 1.05).unwrap());
        let large = [1e3, 2e3].map(|g| s_add_resonant(&p.with_g(g), 1.05).unwrap());
        assert!(((small[0] / small[1]).log2() - 2.0).abs() < 1e-3);
        assert!(((large[1] / large[0]).log2() - 2.0).abs() < 1e-3);
    }

    #[test]
    fn resonant_formula_preconditions() {
        let mut p = reference(0.2);
        p.delta_prime = 1.1;
        assert!(s_add_resonant(&p, 1.0).is_err());
        assert!(s_add_resonant(&reference(0.2).with_frequency_difference(0.01), 1.0).is_err());
        assert!(s_add_resonant(&reference(0.2).with_theta(0.1), 1.0).is_err());
    }

    #[test]
    fn sweep_is_ordered_and_deterministic() {
        let grid: Vec<f64> = (0..50).map(|i| 0.9 + i as f64 * 0.004).collect();
        let a = spectrum_sweep(&reference(0.2), &grid).unwrap();
        let b = spectrum_sweep(&reference(0.2), &grid).unwrap();
        assert_eq!(a, b);
        assert!(a.points.iter().zip(&grid).all(|(p, w)| p.omega == *w));
        assert!(spectrum_sweep(&reference(0.2), &[1.0, 0.9]).is_err());
    }

    #[test]
    fn larger_coupling_lowers_minimum() {
        let search = OmegaSearch::default();
        let mins: Vec<f64> = [0.0, 0.2, 0.4]
            .iter()
            .map(|v| noise_minimum(&reference(*v), &search).unwrap().value)
            .collect();
        assert!(mins[2] < mins[1] && mins[1] < mins[0], "{mins:?}");
    }

    #[test]
    fn uncoupled_minimum_matches_single_probe() {
        let search = OmegaSearch::default();
        let dual = noise_minimum(&reference(0.0), &search).unwrap().value;
        let single = som_noise_minimum(&reference(0.0), &search).unwrap().value;
        assert!((dual - single).abs() / single < 0.05, "{dual} vs {single}");
    }
}
