//! Standard quantum limit: minimum of the zero-temperature additional noise
//! over the linearized coupling `G`, the ratios against the single-probe and
//! uncoupled references, and minimal-noise parameter sweeps.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::solve_vec;
use crate::model::DetectorParams;
use crate::optimize::{golden_section, log_grid, minimize_on_grid};
use crate::spectra::{minimize_over_omega, s_add, som_components, OmegaSearch};
use crate::scalar::Real;

/// Held-out relative residual above which the `P/G² + QG² + R` structure is
/// considered broken.
pub const STRUCTURE_TOLERANCE: f64 = 1e-8;

/// Exact fit `f(G) = P/G² + Q G² + R`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuarticFit<T> {
    pub p: T,
    pub q: T,
    pub r: T,
    /// Relative misfit at a held-out coupling `3 G₀`.
    pub residual: T,
}

impl<T: Real> QuarticFit<T> {
    /// Fits through `G₀/2, G₀, 2G₀` and checks the prediction at `3G₀`.
    pub fn through<F>(mut f: F, g0: T) -> Result<Self>
    where
        F: FnMut(T) -> Result<T>,
    {
        if !(g0 > T::zero()) {
            return Err(Error::param("g0", "fit point must be positive"));
        }
        let gs = [g0 * T::lit(0.5), g0, g0 * T::lit(2.0)];
        // Scale the unknowns so the system is well conditioned: u = P/G₀², w = Q G₀².
        let rows = gs.map(|g| {
            let t = g / g0;
            [T::one() / (t * t), t * t, T::one()]
        });
        let values = [f(gs[0])?, f(gs[1])?, f(gs[2])?];
        let [u, w, r] = solve_vec(rows, values)?;
        let (p, q) = (u * g0 * g0, w / (g0 * g0));
        let probe = g0 * T::lit(3.0);
        let actual = f(probe)?;
        let predicted = p / (probe * probe) + q * probe * probe + r;
        let residual = (predicted - actual).abs() / actual.abs().max(T::min_positive_value());
        Ok(Self { p, q, r, residual })
    }

    /// `(2 sqrt(PQ) + R, (P/Q)^{1/4})`.
    pub fn minimum(&self) -> Result<(T, T)> {
        if !(self.p > T::zero() && self.q > T::zero()) {
            return Err(Error::StructureViolation {
                residual: self.residual.as_f64(),
            });
        }
        Ok((T::lit(2.0) * (self.p * self.q).sqrt() + self.r, (self.p / self.q).sqrt().sqrt()))
    }
}

/// Minimum over `G` and the coupling that attains it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GMinimum<T> {
    pub s_sql: T,
    pub g_opt: T,
    /// Set by the numeric search when the best scan point is a range end.
    pub boundary_warning: bool,
}

/// SQL at `omega` from the exact `P/G² + QG² + R` structure of the
/// zero-temperature additional noise.
///
/// The structure is fitted at the coupling in `params`, then refitted around
/// the resulting optimum so that both terms are comparable in size.
pub fn minimize_over_g_analytic<T: Real>(params: &DetectorParams<T>, omega: T) -> Result<GMinimum<T>> {
    params.validate()?;
    if params.nth1 != T::zero() || params.nth2 != T::zero() {
        return Err(Error::Precondition("SQL is defined at zero temperature (n_th = 0)".into()));
    }
    if params.theta != T::zero() {
        return Err(Error::Precondition("SQL extraction assumes theta = 0".into()));
    }
    let g0 = params
        .symmetric_real_coupling()
        .filter(|g| *g > T::zero())
        .unwrap_or(params.omega_m1 * T::lit(0.03));
    let noise = |g: T| Ok(s_add(&params.with_g(g), omega)?.s_add);
    let first = QuarticFit::through(noise, g0)?;
    let (_, g1) = first.minimum()?;
    let fit = QuarticFit::through(noise, g1)?;
    if !(fit.residual <= T::lit(STRUCTURE_TOLERANCE)) {
        return Err(Error::StructureViolation {
            residual: fit.residual.as_f64(),
        });
    }
    let (s_sql, g_opt) = fit.minimum()?;
    Ok(GMinimum {
        s_sql,
        g_opt,
        boundary_warning: false,
    })
}

/// Default coupling range for the numeric search, in units of `ω_m`.
pub const DEFAULT_G_RANGE: (f64, f64) = (1e-4, 10.0);
const SCAN_PER_DECADE: usize = 64;
const G_REL_TOL: f64 = 1e-10;

/// Logarithmic scan (64 points per decade) over `g_range` followed by
/// golden-section refinement. Independent of any structure assumption.
pub fn minimize_over_g_numeric<T, F>(mut spectrum: F, g_range: (T, T)) -> Result<GMinimum<T>>
where
    T: Real,
    F: FnMut(T) -> Result<T>,
{
    let grid = log_grid(g_range.0, g_range.1, SCAN_PER_DECADE)?;
    let mut best = (0, T::infinity());
    for (i, &g) in grid.iter().enumerate() {
        let v = spectrum(g)?;
        if v < best.1 {
            best = (i, v);
        }
    }
    let i = best.0;
    let lo = grid[i.saturating_sub(1)];
    let hi = grid[(i + 1).min(grid.len() - 1)];
    let polished = golden_section(&mut spectrum, lo, hi, T::lit(G_REL_TOL))?;
    let (g_opt, s_sql) = if polished.value < best.1 {
        (polished.x, polished.value)
    } else {
        (grid[i], best.1)
    };
    Ok(GMinimum {
        s_sql,
        g_opt,
        boundary_warning: i == 0 || i == grid.len() - 1,
    })
}

/// Numeric SQL of the dual-probe detector at `omega`.
pub fn sql_numeric<T: Real>(params: &DetectorParams<T>, omega: T, g_range: (T, T)) -> Result<GMinimum<T>> {
    let cold = params.ground_state();
    cold.validate()?;
    minimize_over_g_numeric(|g| Ok(s_add(&cold.with_g(g), omega)?.s_add), g_range)
}

/// Single-probe SQL at `omega`: the minimum of `|α/G + βG|²` over `G > 0`,
/// `2(|α||β| + Re(αβ*))` at `G = sqrt(|α|/|β|)`.
pub fn som_sql<T: Real>(omega_m: T, gamma1: T, kappa: T, omega: T) -> Result<GMinimum<T>> {
    let (alpha, beta) = som_components(omega_m, gamma1, kappa, omega)?;
    let two = T::lit(2.0);
    Ok(GMinimum {
        s_sql: two * (alpha.norm() * beta.norm() + (alpha * beta.conj()).re),
        g_opt: (alpha.norm() / beta.norm()).sqrt(),
        boundary_warning: false,
    })
}

/// SQL at one frequency together with both reference ratios.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SqlResult<T> {
    pub omega: T,
    pub s_sql: T,
    pub g_opt: T,
    /// Against the single-probe SQL at `ω_m`.
    pub r1: T,
    /// Against the uncoupled (`V = 0`) dual-probe SQL at `ω_m`.
    pub r2: T,
}

/// Ratio denominators, computed once per parameter template.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SqlReference<T> {
    /// Single-probe SQL at `ω = ω_m1`.
    pub som_sql: T,
    /// Dual-probe SQL with `V = 0` at `ω = ω_m1`.
    pub uncoupled_sql: T,
}

impl<T: Real> SqlReference<T> {
    pub fn new(params: &DetectorParams<T>) -> Result<Self> {
        let cold = params.ground_state();
        cold.validate()?;
        let wm = cold.omega_m1;
        let som_sql = som_sql(wm, cold.gamma1, cold.kappa, wm)?.s_sql;
        let uncoupled_sql = minimize_over_g_analytic(&cold.with_v(T::zero()), wm)?.s_sql;
        Ok(Self { som_sql, uncoupled_sql })
    }

    pub fn evaluate(&self, params: &DetectorParams<T>, omega: T) -> Result<SqlResult<T>> {
        let m = minimize_over_g_analytic(&params.ground_state(), omega)?;
        Ok(SqlResult {
            omega,
            s_sql: m.s_sql,
            g_opt: m.g_opt,
            r1: m.s_sql / self.som_sql,
            r2: m.s_sql / self.uncoupled_sql,
        })
    }
}

/// `R1 = S_SQL,2(ω) / S_SQL,1(ω_m)`, `R2 = S_SQL,2(ω) / S_SQL,2(V = 0, ω_m)`.
pub fn r_factors<T: Real>(params: &DetectorParams<T>, omega: T) -> Result<SqlResult<T>> {
    SqlReference::new(params)?.evaluate(params, omega)
}

/// Which ratio a contour crossing belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ratio {
    R1,
    R2,
}

/// Frequency at which `log10 R` changes sign along one coupling row,
/// located by linear interpolation in `log10 R`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContourCrossing<T> {
    pub v_coupling: T,
    pub ratio: Ratio,
    pub omega: T,
}

/// Dense `log10 R1`, `log10 R2` over a frequency × coupling grid.
#[derive(Debug, Clone, PartialEq)]
pub struct RMap<T> {
    pub omegas: Vec<T>,
    pub v_values: Vec<T>,
    /// Indexed `[v][omega]`.
    pub log10_r1: Vec<Vec<T>>,
    pub log10_r2: Vec<Vec<T>>,
    pub crossings: Vec<ContourCrossing<T>>,
    pub reference: SqlReference<T>,
    pub params: DetectorParams<T>,
}

pub fn r_map<T: Real>(template: &DetectorParams<T>, omegas: &[T], v_values: &[T]) -> Result<RMap<T>> {
    if omegas.is_empty() || v_values.is_empty() {
        return Err(Error::param("grid", "frequency and coupling grids must be non-empty"));
    }
    if !omegas.windows(2).all(|w| w[1] > w[0]) {
        return Err(Error::param("omega grid", "must be strictly increasing"));
    }
    let reference = SqlReference::new(template)?;
    let rows = v_values
        .par_iter()
        .map(|&v| {
            let p = template.with_v(v);
            omegas
                .iter()
                .map(|&w| reference.evaluate(&p, w).map(|r| (r.r1.log10(), r.r2.log10())))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;

    let mut crossings = Vec::new();
    let mut log10_r1 = Vec::with_capacity(rows.len());
    let mut log10_r2 = Vec::with_capacity(rows.len());
    for (row, &v) in rows.iter().zip(v_values) {
        let r1: Vec<T> = row.iter().map(|x| x.0).collect();
        let r2: Vec<T> = row.iter().map(|x| x.1).collect();
        for (ratio, values) in [(Ratio::R1, &r1), (Ratio::R2, &r2)] {
            for k in 1..values.len() {
                let (a, b) = (values[k - 1], values[k]);
                if (a < T::zero()) != (b < T::zero()) {
                    let t = a / (a - b);
                    let omega = omegas[k - 1] + t * (omegas[k] - omegas[k - 1]);
                    crossings.push(ContourCrossing { v_coupling: v, ratio, omega });
                }
            }
        }
        log10_r1.push(r1);
        log10_r2.push(r2);
    }
    Ok(RMap {
        omegas: omegas.to_vec(),
        v_values: v_values.to_vec(),
        log10_r1,
        log10_r2,
        crossings,
        reference,
        params: *template,
    })
}

/// Parameter varied by a minimal-noise sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParameter {
    /// Mechanical coupling V.
    Coupling,
    /// `Δω = ω_m1 − ω_m2`.
    FrequencyDifference,
    /// Linearized coupling G.
    LinearCoupling,
    /// Cavity linewidth κ.
    Linewidth,
}

impl SweepParameter {
    pub fn name(&self) -> &'static str {
        match self {
            SweepParameter::Coupling => "v",
            SweepParameter::FrequencyDifference => "delta_omega",
            SweepParameter::LinearCoupling => "g",
            SweepParameter::Linewidth => "kappa",
        }
    }

    pub fn apply<T: Real>(&self, p: &DetectorParams<T>, value: T) -> DetectorParams<T> {
        match self {
            SweepParameter::Coupling => p.with_v(value),
            SweepParameter::FrequencyDifference => p.with_frequency_difference(value),
            SweepParameter::LinearCoupling => p.with_g(value),
            SweepParameter::Linewidth => p.with_kappa(value),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepMode {
    /// Additional noise at the template's occupations, minimized over ω.
    Thermal,
    /// Zero-temperature SQL (also minimized over G), minimized over ω.
    Sql,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepEntry<T> {
    pub value: T,
    pub s_min: T,
    pub omega_at_min: T,
    /// Minimizing coupling in SQL mode.
    pub g_opt: Option<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult<T> {
    pub parameter: SweepParameter,
    pub mode: SweepMode,
    pub entries: Vec<SweepEntry<T>>,
    /// Values rejected by parameter validation, with the reason.
    pub skipped: Vec<(T, String)>,
    pub params: DetectorParams<T>,
}

/// Minimal additional noise over ω for each value of one parameter.
pub fn s_min_sweep<T: Real>(
    template: &DetectorParams<T>,
    parameter: SweepParameter,
    values: &[T],
    mode: SweepMode,
    search: &OmegaSearch<T>,
) -> Result<SweepResult<T>> {
    if values.is_empty() {
        return Err(Error::param("values", "sweep needs at least one value"));
    }
    let increasing = values.windows(2).all(|w| w[1] > w[0]);
    let decreasing = values.windows(2).all(|w| w[1] < w[0]);
    if !(increasing || decreasing) {
        return Err(Error::param("values", "sweep values must be strictly monotone"));
    }
    if mode == SweepMode::Sql && parameter == SweepParameter::LinearCoupling {
        return Err(Error::Precondition("SQL sweeps already minimize over G".into()));
    }

    let outcomes = values
        .par_iter()
        .map(|&value| {
            let p = parameter.apply(template, value);
            if let Err(e) = p.validate() {
                return Ok(Err((value, e.to_string())));
            }
            let entry = match mode {
                SweepMode::Thermal => {
                    let m = minimize_over_omega(&p, search, |w| Ok(s_add(&p, w)?.s_add))?;
                    SweepEntry {
                        value,
                        s_min: m.value,
                        omega_at_min: m.x,
                        g_opt: None,
                    }
                }
                SweepMode::Sql => {
                    let cold = p.ground_state();
                    let grid = search.grid_for(&cold)?;
                    let m = minimize_on_grid(|w| Ok(minimize_over_g_analytic(&cold, w)?.s_sql), &grid, search.rel_tol)?;
                    let g = minimize_over_g_analytic(&cold, m.x)?.g_opt;
                    SweepEntry {
                        value,
                        s_min: m.value,
                        omega_at_min: m.x,
                        g_opt: Some(g),
                    }
                }
            };
            Ok(Ok(entry))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut entries = Vec::new();
    let mut skipped = Vec::new();
    for o in outcomes {
        match o {
            Ok(e) => entries.push(e),
            Err(s) => skipped.push(s),
        }
    }
    Ok(SweepResult {
        parameter,
        mode,
        entries,
        skipped,
        params: *template,
    })
}
