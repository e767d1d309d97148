//! Homodyne output decomposition
//! `M_out = A a_in(ω) + B a_in†(−ω) + C F_in,1 + D F_in,2`.
//!
//! Two independent routes are provided: the closed form for θ = 0 and equal
//! couplings, and a direct solve of the frequency-domain operator equations
//! which is valid for any θ and complex, unequal couplings. Everything
//! downstream uses the solve.

use crate::error::{Error, Result};
use crate::linalg::solve;
use crate::model::{DetectorParams, SusceptibilitySet};
use crate::scalar::{im, re, Cplx, Real};

/// Transfer coefficients from unit inputs to the homodyne output at one
/// frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutputCoefficients<T> {
    pub a_coef: Cplx<T>,
    pub b_coef: Cplx<T>,
    pub c_coef: Cplx<T>,
    pub d_coef: Cplx<T>,
    /// `C + D`, the transduction of a common force on both oscillators.
    pub e_coef: Cplx<T>,
    /// Common denominator `D_e`.
    pub d_e: Cplx<T>,
}

impl<T: Real> OutputCoefficients<T> {
    fn new(a: Cplx<T>, b: Cplx<T>, c: Cplx<T>, d: Cplx<T>, d_e: Cplx<T>) -> Self {
        Self {
            a_coef: a,
            b_coef: b,
            c_coef: c,
            d_coef: d,
            e_coef: c + d,
            d_e,
        }
    }

    pub fn as_array(&self) -> [Cplx<T>; 4] {
        [self.a_coef, self.b_coef, self.c_coef, self.d_coef]
    }
}

/// How `B(ω)` combines the couplings in its correction term.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BVariant {
    /// `|G|² χ_c† + G*² χ_c`, as the closed form is usually printed.
    Printed,
    /// `|G|² χ_c† + G² χ_c`, which is what eliminating the equations gives.
    Derived,
}

/// Closed-form coefficients for θ = 0 and `G_1 = G_2 = G`.
///
/// With `X = 2Vχ_m1χ_m2 − χ_m1 − χ_m2`:
/// `D_e = i(V²χ_m1χ_m2 − 1) + |G|²(χ_c − χ_c†) X`,
/// `A = i(1 − κχ_c) + iκχ_c(|G|²χ_c + G*²χ_c†) X / D_e`,
/// `B = −i(1 − κχ_c†) + iκχ_c†(|G|²χ_c† + G*²χ_c) X / D_e`,
/// `C = i√κ(Gχ_c + G*χ_c†)(Vχ_m1χ_m2 − χ_m1) / D_e`, and `D` likewise with `χ_m2`.
pub fn closed_form_coefficients<T: Real>(params: &DetectorParams<T>, omega: T) -> Result<OutputCoefficients<T>> {
    closed_form_with(params, omega, BVariant::Printed)
}

/// Both readings of `B(ω)`; they coincide for real `G`.
pub fn closed_form_b_variants<T: Real>(params: &DetectorParams<T>, omega: T) -> Result<(Cplx<T>, Cplx<T>)> {
    let printed = closed_form_with(params, omega, BVariant::Printed)?.b_coef;
    let derived = closed_form_with(params, omega, BVariant::Derived)?.b_coef;
    Ok((printed, derived))
}

pub fn closed_form_with<T: Real>(
    params: &DetectorParams<T>,
    omega: T,
    variant: BVariant,
) -> Result<OutputCoefficients<T>> {
    params.validate()?;
    if params.theta != T::zero() {
        return Err(Error::Precondition("closed form requires theta = 0".into()));
    }
    if params.g1 != params.g2 {
        return Err(Error::Precondition("closed form requires G1 = G2".into()));
    }
    let s = SusceptibilitySet::at(params, omega)?;
    let g = params.g1;
    let g_abs2 = re(g.norm_sqr());
    let g_conj = g.conj();
    let kappa = re(params.kappa);
    let sqrt_kappa = re(params.kappa.sqrt());
    let v = re(params.v_coupling);
    let i = im(T::one());
    let one = re(T::one());

    let m12 = s.chi_m1 * s.chi_m2;
    let x = re(T::lit(2.0)) * v * m12 - s.chi_m1 - s.chi_m2;
    let d_e = i * (v * v * m12 - one) + g_abs2 * (s.chi_c - s.chi_c_dag) * x;

    let scale = T::one() + (v * v * m12).norm() + (g_abs2 * (s.chi_c - s.chi_c_dag) * x).norm();
    if d_e.norm() < T::lit(1e-30) * scale {
        return Err(Error::Singular {
            condition: (scale / d_e.norm()).as_f64(),
        });
    }

    let a = i * (one - kappa * s.chi_c) + i * kappa * s.chi_c * (g_abs2 * s.chi_c + g_conj * g_conj * s.chi_c_dag) * x / d_e;
    let b_cross = match variant {
        BVariant::Printed => g_conj * g_conj,
        BVariant::Derived => g * g,
    };
    let b = -i * (one - kappa * s.chi_c_dag) + i * kappa * s.chi_c_dag * (g_abs2 * s.chi_c_dag + b_cross * s.chi_c) * x / d_e;
    let drive = i * sqrt_kappa * (g * s.chi_c + g_conj * s.chi_c_dag) / d_e;
    let c = drive * (v * m12 - s.chi_m1);
    let d = drive * (v * m12 - s.chi_m2);
    Ok(OutputCoefficients::new(a, b, c, d, d_e))
}

/// Coefficients from a direct solve of the linear response.
///
/// Unknowns `(δa(ω), δa†(−ω), δq_1(ω), δq_2(ω))`:
///
/// ```text
/// δa      − iχ_c (G_1 δq_1 + G_2 δq_2)            = √κ χ_c  a_in(ω)
/// δa†     + iχ_c†(G_1* δq_1 + G_2* δq_2)          = √κ χ_c† a_in†(−ω)
/// δq_j    − χ_mj (G_j δa† + G_j* δa) + χ_mj V δq_k = χ_mj F_in,j
/// ```
///
/// followed by `a_out = √κ δa − a_in` and
/// `M_out = i[a_out†(−ω) e^{−iθ} − a_out(ω) e^{iθ}]`. The reported `D_e` is
/// `−i det` of the system matrix, which equals the closed-form denominator.
pub fn solve_coefficients<T: Real>(params: &DetectorParams<T>, omega: T) -> Result<OutputCoefficients<T>> {
    params.validate()?;
    let s = SusceptibilitySet::at(params, omega)?;
    let zero = re(T::zero());
    let one = re(T::one());
    let i = im(T::one());
    let v = re(params.v_coupling);
    let sqrt_kappa = params.kappa.sqrt();
    let (g1, g2) = (params.g1, params.g2);

    let system = [
        [one, zero, -i * s.chi_c * g1, -i * s.chi_c * g2],
        [zero, one, i * s.chi_c_dag * g1.conj(), i * s.chi_c_dag * g2.conj()],
        [-s.chi_m1 * g1.conj(), -s.chi_m1 * g1, one, s.chi_m1 * v],
        [-s.chi_m2 * g2.conj(), -s.chi_m2 * g2, s.chi_m2 * v, one],
    ];
    let inputs = [
        [s.chi_c * sqrt_kappa, zero, zero, zero],
        [zero, s.chi_c_dag * sqrt_kappa, zero, zero],
        [zero, zero, s.chi_m1, zero],
        [zero, zero, zero, s.chi_m2],
    ];
    let sol = solve(system, inputs)?;

    let lo_minus = Cplx::from_polar(T::one(), -params.theta);
    let lo_plus = Cplx::from_polar(T::one(), params.theta);
    let mut out = [zero; 4];
    for (k, o) in out.iter_mut().enumerate() {
        let a_out = sol.x[0][k] * sqrt_kappa - if k == 0 { one } else { zero };
        let a_out_dag = sol.x[1][k] * sqrt_kappa - if k == 1 { one } else { zero };
        *o = i * (a_out_dag * lo_minus - a_out * lo_plus);
    }
    Ok(OutputCoefficients::new(out[0], out[1], out[2], out[3], -i * sol.determinant))
}

/// Amplification `A_p = |C + D|` of a force common to both oscillators.
pub fn amplification<T: Real>(params: &DetectorParams<T>, omega: T) -> Result<T> {
    Ok(solve_coefficients(params, omega)?.e_coef.norm())
}
