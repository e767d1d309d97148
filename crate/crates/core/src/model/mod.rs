//! Parameter records, susceptibilities, thermal occupation and the classical
//! working point of the two-oscillator / one-cavity detector.

mod grid;
mod params;
mod steady_state;
mod susceptibility;
mod thermal;

pub use grid::frequency_grid;
pub use params::DetectorParams;
pub use steady_state::{single_photon_coupling, steady_state, CavityGeometry, DriveConfig, SteadyState};
pub use susceptibility::{chi_cavity, chi_cavity_conj, chi_mech, SusceptibilitySet};
pub use thermal::{thermal_occupation, ThermalBath, BOLTZMANN, HBAR};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Optimized detection frequency `sqrt(ω_m (ω_m + V))` of two identical
/// oscillators coupled with strength `V`.
pub fn omega_eff<T: Real>(omega_m: T, v_coupling: T) -> Result<T> {
    if !(omega_m > T::zero()) {
        return Err(Error::param("omega_m", "must be positive"));
    }
    let sum = omega_m + v_coupling;
    if !(sum > T::zero()) {
        return Err(Error::Domain(format!(
            "omega_m + V must be positive (got {})",
            sum
        )));
    }
    Ok((omega_m * sum).sqrt())
}

/// Frequencies `(lower, upper)` at which `χ_m1⁻¹ χ_m2⁻¹ = V²`, i.e. the
/// undamped normal modes of the coupled mechanical pair.
///
/// For identical oscillators these are `sqrt(ω_m (ω_m ∓ V))`.
pub fn normal_modes<T: Real>(omega_m1: T, omega_m2: T, v_coupling: T) -> Result<(T, T)> {
    let two = T::lit(2.0);
    let s = omega_m1 * omega_m1 + omega_m2 * omega_m2;
    let d = omega_m1 * omega_m1 - omega_m2 * omega_m2;
    let disc = (d * d + T::lit(4.0) * omega_m1 * omega_m2 * v_coupling * v_coupling).sqrt();
    let lower_sq = (s - disc) / two;
    let upper_sq = (s + disc) / two;
    if !(lower_sq > T::zero()) {
        return Err(Error::Domain(
            "coupled oscillator potential is not positive definite".into(),
        ));
    }
    Ok((lower_sq.sqrt(), upper_sq.sqrt()))
}
