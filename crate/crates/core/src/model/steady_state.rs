use crate::error::{Error, Result};
use crate::linalg::solve_vec;
use crate::model::{DetectorParams, HBAR};
use crate::scalar::{Cplx, Real};

const MAX_ITERATIONS: usize = 10_000;
const RELAXATION: f64 = 0.5;
const CONTINUATION_STEPS: usize = 64;

/// Laser drive and mirror data from which the working point is derived.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriveConfig<T> {
    /// Input power P (W).
    pub power: T,
    /// Drive angular frequency ω_d (rad/s).
    pub omega_d: T,
    /// Input coupling rate κ_ex (rad/s).
    pub kappa_ex: T,
    /// Single-photon couplings g_j (rad/s).
    pub g0: [T; 2],
    /// Bare detuning Δ (rad/s).
    pub delta_bare: T,
    /// Cavity length L (m).
    pub cavity_length: T,
    /// Effective mirror mass m (kg).
    pub mass: T,
}

/// Cavity linewidth and mechanical frequencies/coupling seen by the drive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CavityGeometry<T> {
    pub kappa: T,
    pub omega_m: [T; 2],
    pub v_coupling: T,
}

/// `g = (ω_c / L) sqrt(ħ / (2 m ω_m))`.
pub fn single_photon_coupling<T: Real>(omega_c: T, cavity_length: T, mass: T, omega_m: T) -> Result<T> {
    if !(cavity_length > T::zero()) || !(mass > T::zero()) || !(omega_m > T::zero()) {
        return Err(Error::param("cavity_length/mass/omega_m", "must be positive"));
    }
    Ok(omega_c / cavity_length * (T::lit(HBAR) / (T::lit(2.0) * mass * omega_m)).sqrt())
}

impl<T: Real> DriveConfig<T> {
    /// Drive strength `ε = 2 sqrt(P κ_ex / (ħ ω_d))`.
    pub fn drive_strength(&self) -> T {
        T::lit(2.0) * (self.power * self.kappa_ex / (T::lit(HBAR) * self.omega_d)).sqrt()
    }

    /// Replaces `g0` by the single-photon couplings of mirrors at `omega_m`.
    pub fn with_derived_couplings(mut self, omega_c: T, omega_m: [T; 2]) -> Result<Self> {
        for j in 0..2 {
            self.g0[j] = single_photon_coupling(omega_c, self.cavity_length, self.mass, omega_m[j])?;
        }
        Ok(self)
    }

    pub fn validate(&self, geometry: &CavityGeometry<T>) -> Result<()> {
        if !(self.power >= T::zero()) {
            return Err(Error::param("power", "must be non-negative"));
        }
        if !(self.omega_d > T::zero()) {
            return Err(Error::param("omega_d", "must be positive"));
        }
        if !(self.kappa_ex >= T::zero()) || self.kappa_ex > geometry.kappa {
            return Err(Error::param("kappa_ex", "must lie in [0, kappa]"));
        }
        if !(self.mass > T::zero()) {
            return Err(Error::param("mass", "must be positive"));
        }
        if !(self.cavity_length > T::zero()) {
            return Err(Error::param("cavity_length", "must be positive"));
        }
        if !(geometry.kappa > T::zero()) {
            return Err(Error::param("kappa", "must be positive"));
        }
        let [w1, w2] = geometry.omega_m;
        if !(w1 > T::zero() && w2 > T::zero()) {
            return Err(Error::param("omega_m", "must be positive"));
        }
        if !(geometry.v_coupling * geometry.v_coupling < w1 * w2) {
            return Err(Error::param("v_coupling", "V^2 must be below omega_m1*omega_m2"));
        }
        Ok(())
    }
}

/// Classical working point around which the dynamics are linearized.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteadyState<T> {
    /// Mean intracavity amplitude ⟨a⟩.
    pub amplitude: Cplx<T>,
    /// Mean displacements ⟨q_1⟩, ⟨q_2⟩.
    pub displacement: [T; 2],
    pub delta_prime: T,
    /// `G_j = g_j ⟨a⟩`.
    pub g_lin: [Cplx<T>; 2],
    pub iterations: usize,
    /// Largest relative residual of the fixed-point equations.
    pub residual: T,
}

impl<T: Real> SteadyState<T> {
    /// Linearized detector parameters at this working point.
    pub fn detector_params(
        &self,
        geometry: &CavityGeometry<T>,
        gamma: [T; 2],
        nth: [T; 2],
        theta: T,
    ) -> DetectorParams<T> {
        DetectorParams {
            delta_prime: self.delta_prime,
            kappa: geometry.kappa,
            g1: self.g_lin[0],
            g2: self.g_lin[1],
            omega_m1: geometry.omega_m[0],
            omega_m2: geometry.omega_m[1],
            gamma1: gamma[0],
            gamma2: gamma[1],
            v_coupling: geometry.v_coupling,
            theta,
            nth1: nth[0],
            nth2: nth[1],
        }
    }
}

#[derive(Clone, Copy)]
struct Problem<T> {
    eps_sq: T,
    g: [T; 2],
    delta: T,
    kappa: T,
    omega: [T; 2],
    v: T,
    force: [T; 2],
}

impl<T: Real> Problem<T> {
    /// Displacements balancing radiation pressure `g n` plus the static force.
    fn displacement(&self, n: T) -> [T; 2] {
        let det = self.omega[0] * self.omega[1] - self.v * self.v;
        let f1 = self.g[0] * n + self.force[0];
        let f2 = self.g[1] * n + self.force[1];
        [(self.omega[1] * f1 - self.v * f2) / det, (self.omega[0] * f2 - self.v * f1) / det]
    }

    fn detuning(&self, q: [T; 2]) -> T {
        self.delta - self.g[0] * q[0] - self.g[1] * q[1]
    }

    fn photon_number(&self, delta_prime: T) -> T {
        let half = self.kappa / T::lit(2.0);
        self.eps_sq / (delta_prime * delta_prime + half * half)
    }

    /// Relative residual of the three real fixed-point equations.
    fn residual(&self, n: T, q: [T; 2]) -> T {
        let dp = self.detuning(q);
        let half = self.kappa / T::lit(2.0);
        let lhs = n * (dp * dp + half * half);
        let r0 = rel(lhs - self.eps_sq, lhs.abs().max(self.eps_sq));
        let mut worst = r0;
        for j in 0..2 {
            let k = 1 - j;
            let terms = [self.omega[j] * q[j], self.g[j] * n, self.v * q[k], self.force[j]];
            let r = terms[0] - terms[1] + terms[2] - terms[3];
            let scale = terms.iter().fold(T::zero(), |m, t| m.max(t.abs()));
            worst = worst.max(rel(r, scale));
        }
        worst
    }

    fn fixed_point(&self, tol: T) -> Option<(T, [T; 2], usize)> {
        let mut n = T::zero();
        let relax = T::lit(RELAXATION);
        for it in 1..=MAX_ITERATIONS {
            let q = self.displacement(n);
            let target = self.photon_number(self.detuning(q));
            n = n + relax * (target - n);
            if !n.is_finite() {
                return None;
            }
            let q = self.displacement(n);
            if self.residual(n, q) < tol {
                return Some((n, q, it));
            }
        }
        None
    }

    /// Newton on (n, q1, q2), ramping the drive from zero to follow the branch
    /// connected to the undriven solution.
    fn continuation(&self, tol: T) -> Result<(T, [T; 2], usize)> {
        let mut state = [T::zero(), self.force_only()[0], self.force_only()[1]];
        let mut total = 0;
        let full = self.eps_sq;
        for step in 1..=CONTINUATION_STEPS {
            let frac = T::lit(step as f64 / CONTINUATION_STEPS as f64);
            let stage = Problem { eps_sq: full * frac, ..*self };
            let mut converged = false;
            for _ in 0..MAX_ITERATIONS / CONTINUATION_STEPS {
                total += 1;
                let [n, q1, q2] = state;
                let dp = stage.detuning([q1, q2]);
                let half = stage.kappa / T::lit(2.0);
                let f = [
                    n * (dp * dp + half * half) - stage.eps_sq,
                    stage.omega[0] * q1 + stage.v * q2 - stage.g[0] * n - stage.force[0],
                    stage.v * q1 + stage.omega[1] * q2 - stage.g[1] * n - stage.force[1],
                ];
                let two_n_dp = T::lit(2.0) * n * dp;
                let jac = [
                    [dp * dp + half * half, -two_n_dp * stage.g[0], -two_n_dp * stage.g[1]],
                    [-stage.g[0], stage.omega[0], stage.v],
                    [-stage.g[1], stage.v, stage.omega[1]],
                ];
                let step = solve_vec(jac, f).map_err(|_| Error::Convergence {
                    iterations: total,
                    residual: stage.residual(n, [q1, q2]).as_f64(),
                })?;
                state = [n - step[0], q1 - step[1], q2 - step[2]];
                if stage.residual(state[0], [state[1], state[2]]) < tol {
                    converged = true;
                    break;
                }
            }
            if !converged {
                return Err(Error::Convergence {
                    iterations: total,
                    residual: stage.residual(state[0], [state[1], state[2]]).as_f64(),
                });
            }
        }
        Ok((state[0], [state[1], state[2]], total))
    }

    fn force_only(&self) -> [T; 2] {
        self.displacement(T::zero())
    }
}

fn rel<T: Real>(r: T, scale: T) -> T {
    if scale == T::zero() {
        r.abs()
    } else {
        r.abs() / scale
    }
}

/// Solves the classical equations
/// `⟨a⟩ = ε / (iΔ′ + κ/2)`, `Δ′ = Δ − Σ g_j⟨q_j⟩`,
/// `ω_mj⟨q_j⟩ = g_j|⟨a⟩|² − V⟨q_{3−j}⟩ + ξ_j B`.
///
/// `field_bias` holds the static forces `ξ_j B` in the same units as the rates.
pub fn steady_state<T: Real>(
    drive: &DriveConfig<T>,
    geometry: &CavityGeometry<T>,
    field_bias: [T; 2],
) -> Result<SteadyState<T>> {
    drive.validate(geometry)?;
    let eps = drive.drive_strength();
    let problem = Problem {
        eps_sq: eps * eps,
        g: drive.g0,
        delta: drive.delta_bare,
        kappa: geometry.kappa,
        omega: geometry.omega_m,
        v: geometry.v_coupling,
        force: field_bias,
    };
    let tol = T::lit(1e-13).max(T::epsilon() * T::lit(64.0));

    let (n, q, iterations) = match problem.fixed_point(tol) {
        Some(found) => found,
        None => problem.continuation(tol)?,
    };
    let delta_prime = problem.detuning(q);
    let amplitude = Cplx::new(eps, T::zero()) / Cplx::new(geometry.kappa / T::lit(2.0), delta_prime);
    Ok(SteadyState {
        amplitude,
        displacement: q,
        delta_prime,
        g_lin: [amplitude * drive.g0[0], amplitude * drive.g0[1]],
        iterations,
        residual: problem.residual(n, q),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn geometry() -> CavityGeometry<f64> {
        CavityGeometry {
            kappa: 1.0,
            omega_m: [1.0, 1.1],
            v_coupling: 0.2,
        }
    }

    fn drive(power: f64, g0: [f64; 2]) -> DriveConfig<f64> {
        DriveConfig {
            power,
            omega_d: 1.0,
            kappa_ex: 0.5,
            g0,
            delta_bare: 1.0,
            cavity_length: 1e-3,
            mass: 1e-9,
        }
    }

    /// Drive power giving ε² = target in the dimensionless units used here.
    fn power_for(eps_sq: f64) -> f64 {
        eps_sq * HBAR * 1.0 / (4.0 * 0.5)
    }

    #[test]
    fn undriven_fixed_point() {
        let s = steady_state(&drive(0.0, [0.1, 0.1]), &geometry(), [0.0, 0.0]).unwrap();
        assert_eq!(s.amplitude, Cplx::new(0.0, 0.0));
        assert_eq!(s.displacement, [0.0, 0.0]);
        assert_eq!(s.delta_prime, 1.0);
    }

    #[test]
    fn uncoupled_cavity_is_linear() {
        let d = drive(power_for(4.0), [0.0, 0.0]);
        let force = [0.3, -0.1];
        let s = steady_state(&d, &geometry(), force).unwrap();
        let eps = d.drive_strength();
        let expect = Cplx::new(eps, 0.0) / Cplx::new(0.5, 1.0);
        assert!((s.amplitude - expect).norm() < 1e-12 * expect.norm());
        // [1 0.2; 0.2 1.1] q = force
        let det = 1.1 - 0.04;
        let q1 = (1.1 * 0.3 - 0.2 * -0.1) / det;
        let q2 = (1.0 * -0.1 - 0.2 * 0.3) / det;
        assert!((s.displacement[0] - q1).abs() < 1e-14);
        assert!((s.displacement[1] - q2).abs() < 1e-14);
        assert_eq!(s.g_lin, [Cplx::new(0.0, 0.0); 2]);
    }

    #[test]
    fn generic_point_resubstitutes() {
        let d = drive(power_for(3.0), [0.05, 0.08]);
        let s = steady_state(&d, &geometry(), [0.01, 0.02]).unwrap();
        assert!(s.residual < 1e-12, "residual {}", s.residual);

        // Independent re-substitution of every equation.
        let n = s.amplitude.norm_sqr();
        let eps = d.drive_strength();
        let g = geometry();
        let [q1, q2] = s.displacement;
        let dp = d.delta_bare - d.g0[0] * q1 - d.g0[1] * q2;
        assert!((dp - s.delta_prime).abs() < 1e-12);
        let a = Cplx::new(eps, 0.0) / Cplx::new(0.5, dp);
        assert!((a - s.amplitude).norm() < 1e-12 * a.norm());
        let r1 = g.omega_m[0] * q1 - (d.g0[0] * n - g.v_coupling * q2 + 0.01);
        let r2 = g.omega_m[1] * q2 - (d.g0[1] * n - g.v_coupling * q1 + 0.02);
        assert!(r1.abs() < 1e-12 && r2.abs() < 1e-12);
        assert!((s.g_lin[1] - s.amplitude * 0.08).norm() < 1e-15);
    }

    #[test]
    fn strong_drive_uses_branch_from_zero() {
        // Strong enough that plain relaxation oscillates.
        let d = drive(power_for(400.0), [0.2, 0.2]);
        let s = steady_state(&d, &geometry(), [0.0, 0.0]).unwrap();
        assert!(s.residual < 1e-12, "residual {}", s.residual);
    }

    #[test]
    fn rejects_invalid_drive() {
        let mut d = drive(1.0, [0.1, 0.1]);
        d.kappa_ex = 2.0;
        assert!(steady_state(&d, &geometry(), [0.0, 0.0]).is_err());
        let d = drive(-1.0, [0.1, 0.1]);
        assert!(steady_state(&d, &geometry(), [0.0, 0.0]).is_err());
    }

    #[test]
    fn single_photon_coupling_formula() {
        let g = single_photon_coupling(1.2e15, 1e-3, 1e-12, 6.6e7).unwrap();
        let expect = 1.2e15 / 1e-3 * (HBAR / (2.0 * 1e-12 * 6.6e7)).sqrt();
        assert!((g - expect).abs() < 1e-12 * expect);
        let d = drive(1.0, [0.0, 0.0]).with_derived_couplings(1.2e15, [6.6e7, 6.6e7]).unwrap();
        assert_eq!(d.g0[0], d.g0[1]);
    }

    #[test]
    fn detector_params_from_working_point() {
        let d = drive(power_for(2.0), [0.05, 0.05]);
        let g = CavityGeometry { omega_m: [1.0, 1.0], ..geometry() };
        let s = steady_state(&d, &g, [0.0, 0.0]).unwrap();
        let p = s.detector_params(&g, [1e-3, 1e-3], [0.0, 0.0], 0.0);
        p.validate().unwrap();
        assert_eq!(p.g1, s.g_lin[0]);
    }
}
