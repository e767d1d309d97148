use crate::error::{Error, Result};
use crate::scalar::Real;

/// Reduced Planck constant (J·s), CODATA 2018 exact.
pub const HBAR: f64 = 1.054_571_817e-34;
/// Boltzmann constant (J/K), CODATA 2018 exact.
pub const BOLTZMANN: f64 = 1.380_649e-23;

/// Bose occupation `[exp(ħω_m / k_B T) − 1]⁻¹` of a mode at `omega_m` (rad/s).
///
/// Zero temperature returns 0 (the limit of the Bose factor).
pub fn thermal_occupation<T: Real>(omega_m: T, temperature: T) -> Result<T> {
    if !(omega_m > T::zero()) {
        return Err(Error::param("omega_m", "must be positive"));
    }
    if !(temperature >= T::zero()) || !temperature.is_finite() {
        return Err(Error::param("temperature", "must be finite and non-negative"));
    }
    if temperature == T::zero() {
        return Ok(T::zero());
    }
    // ħ/k_B folded together keeps the ratio representable in single precision.
    let x = T::lit(HBAR / BOLTZMANN) * omega_m / temperature;
    Ok(x.exp_m1().recip())
}

/// Mechanical bath at a given temperature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermalBath<T> {
    pub temperature: T,
    pub omega_m: T,
    pub n_th: T,
}

impl<T: Real> ThermalBath<T> {
    pub fn new(omega_m: T, temperature: T) -> Result<Self> {
        Ok(Self {
            temperature,
            omega_m,
            n_th: thermal_occupation(omega_m, temperature)?,
        })
    }
}
