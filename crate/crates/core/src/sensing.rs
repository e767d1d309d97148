//! Signal-to-noise ratio, the enhancement factor over a single oscillator,
//! and magnetometer detection accuracy.

use std::fmt;

use crate::error::{Error, Result};
use crate::model::{omega_eff, DetectorParams};
use crate::optimize::{minimize_on_grid, ScalarMinimum};
use crate::scalar::Real;
use crate::spectra::{s_add, som_noise_minimum, OmegaSearch};

/// How signal and noise are combined into an SNR.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SnrConvention {
    /// `(ξB)² / S_add`.
    Power,
    /// `ξB / sqrt(S_add)`.
    Amplitude,
}

impl SnrConvention {
    pub fn name(&self) -> &'static str {
        match self {
            SnrConvention::Power => "power",
            SnrConvention::Amplitude => "amplitude",
        }
    }

    /// Homogeneity degree of the SNR in the field.
    pub fn degree(&self) -> u32 {
        match self {
            SnrConvention::Power => 2,
            SnrConvention::Amplitude => 1,
        }
    }
}

impl fmt::Display for SnrConvention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// `ξ = I·L`, in A·m.
pub fn response_coefficient<T: Real>(current: T, probe_size: T) -> Result<T> {
    if !(current >= T::zero()) {
        return Err(Error::param("current", "must be non-negative"));
    }
    if !(probe_size >= T::zero()) {
        return Err(Error::param("probe_size", "must be non-negative"));
    }
    Ok(current * probe_size)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MagnetometerConfig<T> {
    /// Surface current, A.
    pub current: T,
    /// Probe size, m.
    pub probe_size: T,
    /// Field, T.
    pub field: T,
    /// Bath temperature, K.
    pub temperature: T,
    /// Model force units per A·m·T.
    pub conversion: T,
    pub convention: SnrConvention,
}

impl<T: Real> MagnetometerConfig<T> {
    pub fn validate(&self) -> Result<()> {
        if !(self.current >= T::zero()) {
            return Err(Error::param("current", "must be non-negative"));
        }
        if !(self.probe_size > T::zero()) {
            return Err(Error::param("probe_size", "must be positive"));
        }
        if !(self.conversion > T::zero()) {
            return Err(Error::param("conversion", "must be positive"));
        }
        if !(self.temperature >= T::zero()) {
            return Err(Error::param("temperature", "must be non-negative"));
        }
        Ok(())
    }

    pub fn xi(&self) -> Result<T> {
        response_coefficient(self.current, self.probe_size)
    }

    /// `η·ξ`, the response in model units per tesla.
    pub fn xi_normalized(&self) -> Result<T> {
        Ok(self.conversion * self.xi()?)
    }
}

pub fn snr_from_noise<T: Real>(noise: T, xi_normalized: T, b_field: T, convention: SnrConvention) -> Result<T> {
    if !(noise > T::zero()) {
        return Err(Error::Domain("additional noise must be positive".into()));
    }
    let signal = xi_normalized * b_field;
    Ok(match convention {
        SnrConvention::Power => signal * signal / noise,
        SnrConvention::Amplitude => signal / noise.sqrt(),
    })
}

pub fn snr<T: Real>(
    params: &DetectorParams<T>,
    omega: T,
    xi_normalized: T,
    b_field: T,
    convention: SnrConvention,
) -> Result<T> {
    snr_from_noise(s_add(params, omega)?.s_add, xi_normalized, b_field, convention)
}

/// Half-width of the window, relative to `ω_eff`, searched for the noise dip.
const DIP_WINDOW: f64 = 0.02;

/// The noise dip closest to `ω_eff`: the minimum of `S_add` on the refined
/// grid restricted to a window around the formula value, then polished.
pub fn locate_optimum<T: Real>(params: &DetectorParams<T>, search: &OmegaSearch<T>) -> Result<ScalarMinimum<T>> {
    params.validate()?;
    let center = omega_eff(params.omega_m1, params.v_coupling)?;
    let (lo, hi) = (center * T::lit(1.0 - DIP_WINDOW), center * T::lit(1.0 + DIP_WINDOW));
    let grid: Vec<T> = search.grid_for(params)?.into_iter().filter(|w| *w >= lo && *w <= hi).collect();
    minimize_on_grid(|w| Ok(s_add(params, w)?.s_add), &grid, search.rel_tol)
}

/// Enhancement factor `SNR(ω_eff) / max_ω SNR_single`, in the power
/// convention. Field and conversion cancel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnrEnhancement<T> {
    pub s_r: T,
    pub omega_eff: T,
    pub s_add_at_optimum: T,
    pub single_minimum: T,
    pub single_omega: T,
}

pub fn s_r<T: Real>(params: &DetectorParams<T>, search: &OmegaSearch<T>) -> Result<SnrEnhancement<T>> {
    let dual = locate_optimum(params, search)?;
    let single = som_noise_minimum(params, search)?;
    Ok(SnrEnhancement {
        s_r: single.value / dual.value,
        omega_eff: dual.x,
        s_add_at_optimum: dual.value,
        single_minimum: single.value,
        single_omega: single.x,
    })
}

/// [`s_r`] with occupations derived from a bath temperature; `omega_unit` is
/// the value of one normalized frequency unit in rad/s.
pub fn s_r_at_temperature<T: Real>(
    params: &DetectorParams<T>,
    temperature: T,
    omega_unit: T,
    search: &OmegaSearch<T>,
) -> Result<SnrEnhancement<T>> {
    s_r(&params.with_temperature(temperature, omega_unit)?, search)
}

/// Field at which the SNR is one. Both conventions give `sqrt(S)/(ηξ)`.
pub fn detection_accuracy_from_noise<T: Real>(noise: T, xi_normalized: T) -> Result<T> {
    if !(noise > T::zero()) {
        return Err(Error::Domain("additional noise must be positive".into()));
    }
    if !(xi_normalized > T::zero()) {
        return Err(Error::param("xi_normalized", "must be positive"));
    }
    Ok(noise.sqrt() / xi_normalized)
}

pub fn detection_accuracy<T: Real>(params: &DetectorParams<T>, omega: T, xi_normalized: T) -> Result<T> {
    detection_accuracy_from_noise(s_add(params, omega)?.s_add, xi_normalized)
}

/// Point at which the SNR is pinned for calibration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CalibrationAnchor<T> {
    pub b_field: T,
    pub snr_target: T,
    pub omega: T,
    /// `ξ` in A·m.
    pub xi: T,
}

/// Conversion `η` such that `snr(params, ω, η·ξ, B) = snr_target`.
pub fn calibrate_conversion<T: Real>(
    params: &DetectorParams<T>,
    anchor: &CalibrationAnchor<T>,
    convention: SnrConvention,
) -> Result<T> {
    calibrate_from_noise(s_add(params, anchor.omega)?.s_add, anchor, convention)
}

pub fn calibrate_from_noise<T: Real>(noise: T, anchor: &CalibrationAnchor<T>, convention: SnrConvention) -> Result<T> {
    if !(anchor.snr_target > T::zero()) {
        return Err(Error::param("snr_target", "must be positive"));
    }
    if !(anchor.b_field > T::zero() && anchor.xi > T::zero()) {
        return Err(Error::param("anchor", "field and response coefficient must be positive"));
    }
    if !(noise > T::zero()) {
        return Err(Error::Domain("additional noise must be positive".into()));
    }
    let needed_signal = match convention {
        SnrConvention::Power => (anchor.snr_target * noise).sqrt(),
        SnrConvention::Amplitude => anchor.snr_target * noise.sqrt(),
    };
    Ok(needed_signal / (anchor.xi * anchor.b_field))
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearityFit<T> {
    pub slope: T,
    pub intercept: T,
    /// `log10 SNR` residuals of the fit.
    pub residuals: Vec<T>,
    /// `S_add` evaluated independently for each field value.
    pub noise: Vec<T>,
}

/// Least-squares slope of `log10 SNR` against `log10 B`.
pub fn snr_linearity<T: Real>(
    params: &DetectorParams<T>,
    omega: T,
    xi_normalized: T,
    b_values: &[T],
    convention: SnrConvention,
) -> Result<LinearityFit<T>> {
    if b_values.len() < 3 {
        return Err(Error::param("b_values", "need at least three field values"));
    }
    if b_values.iter().any(|b| !(*b > T::zero())) {
        return Err(Error::param("b_values", "field values must be positive"));
    }
    let mut xs = Vec::with_capacity(b_values.len());
    let mut ys = Vec::with_capacity(b_values.len());
    let mut noise = Vec::with_capacity(b_values.len());
    for &b in b_values {
        let s = s_add(params, omega)?.s_add;
        noise.push(s);
        xs.push(b.log10());
        ys.push(snr_from_noise(s, xi_normalized, b, convention)?.log10());
    }
    let n = T::lit(xs.len() as f64);
    let mx = xs.iter().fold(T::zero(), |a, &x| a + x) / n;
    let my = ys.iter().fold(T::zero(), |a, &y| a + y) / n;
    let (mut sxy, mut sxx) = (T::zero(), T::zero());
    for (&x, &y) in xs.iter().zip(&ys) {
        sxy = sxy + (x - mx) * (y - my);
        sxx = sxx + (x - mx) * (x - mx);
    }
    if !(sxx > T::zero()) {
        return Err(Error::param("b_values", "field values must not all coincide"));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residuals = xs.iter().zip(&ys).map(|(&x, &y)| y - (intercept + slope * x)).collect();
    Ok(LinearityFit {
        slope,
        intercept,
        residuals,
        noise,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SensingReport<T> {
    pub convention: SnrConvention,
    pub conversion: T,
    pub omega_eff: T,
    pub snr_at_omega_eff: T,
    /// `(ω, SNR)` over the requested grid.
    pub snr_spectrum: Vec<(T, T)>,
    pub b_min: T,
    pub linearity_slope: T,
    pub params: DetectorParams<T>,
}

/// Evaluates the magnetometer at its located optimum. `b_values` feeds the
/// linearity fit.
pub fn sensing_report<T: Real>(
    params: &DetectorParams<T>,
    config: &MagnetometerConfig<T>,
    omegas: &[T],
    b_values: &[T],
    search: &OmegaSearch<T>,
) -> Result<SensingReport<T>> {
    config.validate()?;
    let xi_n = config.xi_normalized()?;
    let opt = locate_optimum(params, search)?;
    let snr_spectrum = omegas
        .iter()
        .map(|&w| snr(params, w, xi_n, config.field, config.convention).map(|s| (w, s)))
        .collect::<Result<Vec<_>>>()?;
    let lin = snr_linearity(params, opt.x, xi_n, b_values, config.convention)?;
    Ok(SensingReport {
        convention: config.convention,
        conversion: config.conversion,
        omega_eff: opt.x,
        snr_at_omega_eff: snr_from_noise(opt.value, xi_n, config.field, config.convention)?,
        snr_spectrum,
        b_min: detection_accuracy_from_noise(opt.value, xi_n)?,
        linearity_slope: lin.slope,
        params: *params,
    })
}
