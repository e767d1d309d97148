use crate::error::{Error, Result};
use crate::model::DetectorParams;
use crate::scalar::{im, re, Cplx, Real};

/// Cavity susceptibility `[i(Δ′ − ω) + κ/2]⁻¹`.
pub fn chi_cavity<T: Real>(omega: T, delta_prime: T, kappa: T) -> Result<Cplx<T>> {
    check_positive("kappa", kappa)?;
    Ok((im(delta_prime - omega) + re(kappa / T::lit(2.0))).inv())
}

/// `χ_c*(−ω) = [−i(Δ′ + ω) + κ/2]⁻¹`, the susceptibility seen by `δa†(−ω)`.
pub fn chi_cavity_conj<T: Real>(omega: T, delta_prime: T, kappa: T) -> Result<Cplx<T>> {
    check_positive("kappa", kappa)?;
    Ok((im(-(delta_prime + omega)) + re(kappa / T::lit(2.0))).inv())
}

/// Mechanical susceptibility `[ω_m − ω²/ω_m − iγω/ω_m]⁻¹`.
pub fn chi_mech<T: Real>(omega: T, omega_m: T, gamma: T) -> Result<Cplx<T>> {
    check_positive("omega_m", omega_m)?;
    check_positive("gamma", gamma)?;
    Ok(Cplx::new(omega_m - omega * omega / omega_m, -gamma * omega / omega_m).inv())
}

fn check_positive<T: Real>(name: &'static str, x: T) -> Result<()> {
    if x > T::zero() && x.is_finite() {
        Ok(())
    } else {
        Err(Error::param(name, format!("must be positive and finite (got {x})")))
    }
}

/// All four susceptibilities at one probe frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SusceptibilitySet<T> {
    pub chi_c: Cplx<T>,
    pub chi_c_dag: Cplx<T>,
    pub chi_m1: Cplx<T>,
    pub chi_m2: Cplx<T>,
}

impl<T: Real> SusceptibilitySet<T> {
    pub fn at(params: &DetectorParams<T>, omega: T) -> Result<Self> {
        Ok(Self {
            chi_c: chi_cavity(omega, params.delta_prime, params.kappa)?,
            chi_c_dag: chi_cavity_conj(omega, params.delta_prime, params.kappa)?,
            chi_m1: chi_mech(omega, params.omega_m1, params.gamma1)?,
            chi_m2: chi_mech(omega, params.omega_m2, params.gamma2)?,
        })
    }
}
