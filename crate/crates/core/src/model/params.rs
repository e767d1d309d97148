use crate::error::{Error, Result};
use crate::model::thermal_occupation;
use crate::scalar::{re, Cplx, Real};

/// Linearized parameter set of the cavity coupled to two mechanical
/// oscillators. All rates share one unit (rad/s, or multiples of a reference
/// mechanical frequency); occupations are dimensionless.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectorParams<T> {
    /// Effective (drive-shifted) cavity detuning Δ′.
    pub delta_prime: T,
    pub kappa: T,
    /// Linearized optomechanical couplings `G_j = g_j ⟨a⟩`.
    pub g1: Cplx<T>,
    pub g2: Cplx<T>,
    pub omega_m1: T,
    pub omega_m2: T,
    pub gamma1: T,
    pub gamma2: T,
    /// Mechanical coupling V between the two oscillators.
    pub v_coupling: T,
    /// Homodyne phase θ.
    pub theta: T,
    pub nth1: T,
    pub nth2: T,
}

impl<T: Real> DetectorParams<T> {
    /// Two identical oscillators at `omega_m`, equal real coupling `g`, θ = 0.
    pub fn identical(omega_m: T, delta_prime: T, kappa: T, g: T, v_coupling: T, gamma: T, nth: T) -> Self {
        Self {
            delta_prime,
            kappa,
            g1: re(g),
            g2: re(g),
            omega_m1: omega_m,
            omega_m2: omega_m,
            gamma1: gamma,
            gamma2: gamma,
            v_coupling,
            theta: T::zero(),
            nth1: nth,
            nth2: nth,
        }
    }

    pub fn validate(&self) -> Result<()> {
        positive("kappa", self.kappa)?;
        positive("gamma1", self.gamma1)?;
        positive("gamma2", self.gamma2)?;
        positive("omega_m1", self.omega_m1)?;
        positive("omega_m2", self.omega_m2)?;
        finite("delta_prime", self.delta_prime)?;
        finite("v_coupling", self.v_coupling)?;
        finite("theta", self.theta)?;
        for (name, g) in [("g1", self.g1), ("g2", self.g2)] {
            if !(g.re.is_finite() && g.im.is_finite()) {
                return Err(Error::param(name, "must be finite"));
            }
        }
        for (name, n) in [("nth1", self.nth1), ("nth2", self.nth2)] {
            if !(n >= T::zero()) || !n.is_finite() {
                return Err(Error::param(name, format!("must be finite and non-negative (got {n})")));
            }
        }
        if !(self.v_coupling * self.v_coupling < self.omega_m1 * self.omega_m2) {
            return Err(Error::param(
                "v_coupling",
                format!(
                    "V^2 must be below omega_m1*omega_m2 for a stable oscillator pair (V = {})",
                    self.v_coupling
                ),
            ));
        }
        Ok(())
    }

    /// Both couplings equal and real, as the closed-form coefficients require.
    pub fn symmetric_real_coupling(&self) -> Option<T> {
        (self.g1 == self.g2 && self.g1.im == T::zero()).then_some(self.g1.re)
    }

    /// Sets both couplings to the same real value.
    pub fn with_g(mut self, g: T) -> Self {
        self.g1 = re(g);
        self.g2 = re(g);
        self
    }

    pub fn with_v(mut self, v: T) -> Self {
        self.v_coupling = v;
        self
    }

    pub fn with_kappa(mut self, kappa: T) -> Self {
        self.kappa = kappa;
        self
    }

    pub fn with_theta(mut self, theta: T) -> Self {
        self.theta = theta;
        self
    }

    pub fn with_nth(mut self, nth1: T, nth2: T) -> Self {
        self.nth1 = nth1;
        self.nth2 = nth2;
        self
    }

    /// Zero-temperature copy.
    pub fn ground_state(self) -> Self {
        self.with_nth(T::zero(), T::zero())
    }

    /// Sets `ω_m2 = ω_m1 − Δω`, keeping oscillator 1 as the reference.
    pub fn with_frequency_difference(mut self, delta_omega: T) -> Self {
        self.omega_m2 = self.omega_m1 - delta_omega;
        self
    }

    /// Swaps the roles of the two oscillators.
    pub fn swapped(self) -> Self {
        Self {
            g1: self.g2,
            g2: self.g1,
            omega_m1: self.omega_m2,
            omega_m2: self.omega_m1,
            gamma1: self.gamma2,
            gamma2: self.gamma1,
            nth1: self.nth2,
            nth2: self.nth1,
            ..self
        }
    }

    /// Resolves both occupations from a bath temperature. `omega_unit` is the
    /// value of one model frequency unit in rad/s (1 when rates are already SI).
    pub fn with_temperature(self, temperature: T, omega_unit: T) -> Result<Self> {
        let n1 = thermal_occupation(self.omega_m1 * omega_unit, temperature)?;
        let n2 = thermal_occupation(self.omega_m2 * omega_unit, temperature)?;
        Ok(self.with_nth(n1, n2))
    }

    /// Multiplies every rate by `c`; occupations and θ are unchanged.
    pub fn rescaled(self, c: T) -> Self {
        Self {
            delta_prime: self.delta_prime * c,
            kappa: self.kappa * c,
            g1: self.g1 * c,
            g2: self.g2 * c,
            omega_m1: self.omega_m1 * c,
            omega_m2: self.omega_m2 * c,
            gamma1: self.gamma1 * c,
            gamma2: self.gamma2 * c,
            v_coupling: self.v_coupling * c,
            ..self
        }
    }
}

fn positive<T: Real>(name: &'static str, x: T) -> Result<()> {
    if x > T::zero() && x.is_finite() {
        Ok(())
    } else {
        Err(Error::param(name, format!("must be positive and finite (got {x})")))
    }
}

fn finite<T: Real>(name: &'static str, x: T) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(Error::param(name, "must be finite"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base() -> DetectorParams<f64> {
        DetectorParams::identical(1.0, 1.0, 0.1, 0.03, 0.2, 1e-5, 10.0)
    }

    #[test]
    fn accepts_reference_set() {
        base().validate().unwrap();
    }

    #[test]
    fn rejects_unstable_coupling() {
        assert!(base().with_v(1.0).validate().is_err());
        assert!(base().with_v(-1.2).validate().is_err());
        let mut p = base().with_frequency_difference(0.19);
        p.v_coupling = 0.9;
        assert!(p.validate().is_err());
    }

    #[test]
    fn rejects_bad_rates() {
        let mut p = base();
        p.kappa = 0.0;
        assert!(p.validate().is_err());
        let mut p = base();
        p.gamma2 = -1.0;
        assert!(p.validate().is_err());
        let mut p = base();
        p.nth1 = -0.1;
        assert!(p.validate().is_err());
    }

    #[test]
    fn swapped_twice_is_identity() {
        let p = base().with_frequency_difference(0.05);
        assert_eq!(p.swapped().swapped(), p);
        assert_eq!(p.swapped().omega_m1, p.omega_m2);
    }

    #[test]
    fn temperature_resolution() {
        let p = base().with_temperature(0.0, 1e7).unwrap();
        assert_eq!((p.nth1, p.nth2), (0.0, 0.0));
    }
}
