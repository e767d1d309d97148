//! Named parameter sets. Rates are in units of the mechanical frequency.

use std::f64::consts::PI;

use crate::model::DetectorParams;
use crate::sql::SweepParameter;

/// Mechanical frequency of the reference set in rad/s, used only when a
/// temperature has to be converted to an occupation.
pub const REFERENCE_OMEGA_M_SI: f64 = 2.0 * PI * 5e6;

/// Reference detector: `G = 0.03`, `κ = 0.1`, `Δ′ = 1`, `V = 0.2`,
/// `γ = 1e-5`, `n_th = 10`.
pub fn reference() -> DetectorParams<f64> {
    DetectorParams::identical(1.0, 1.0, 0.1, 0.03, 0.2, 1e-5, 10.0)
}

pub mod magnetometer {
    use super::*;

    pub const OMEGA_M_SI: f64 = 2.0 * PI * 10.56e6;
    pub const GAMMA_SI: f64 = 2.0 * PI * 32.0;
    pub const TEMPERATURE: f64 = 1e-3;
    pub const CURRENT: f64 = 10e-6;
    pub const PROBE_SIZE: f64 = 15e-6;
    pub const FIELD: f64 = 1e-13;
    /// SNR pinned at [`FIELD`] when calibrating the conversion factor.
    pub const SNR_ANCHOR: f64 = 1.7e6;
    /// Published detection accuracy, T.
    pub const REFERENCE_B_MIN: f64 = 8.4e-20;

    /// Detector at zero occupation; apply a temperature with
    /// [`DetectorParams::with_temperature`] and [`OMEGA_M_SI`].
    pub fn params() -> DetectorParams<f64> {
        DetectorParams::identical(1.0, 1.0, 0.1, 0.03, 0.2, GAMMA_SI / OMEGA_M_SI, 0.0)
    }
}

/// One minimal-noise sweep panel: the swept parameter, its default range and
/// the fixed parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPanel {
    pub name: char,
    pub parameter: SweepParameter,
    pub values: Vec<f64>,
    pub params: DetectorParams<f64>,
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

fn logspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.log10(), hi.log10());
    linspace(a, b, n).into_iter().map(|x| 10f64.powf(x)).collect()
}

pub fn sweep_panel(name: char) -> Option<SweepPanel> {
    let params = reference();
    let (parameter, values) = match name {
        'a' => (SweepParameter::Coupling, linspace(0.0, 0.5, 51)),
        'b' => (SweepParameter::FrequencyDifference, linspace(-0.1, 0.1, 41)),
        'c' => (SweepParameter::LinearCoupling, logspace(1e-3, 0.1, 41)),
        'd' => (SweepParameter::Linewidth, logspace(0.01, 1.0, 41)),
        _ => return None,
    };
    Some(SweepPanel {
        name,
        parameter,
        values,
        params,
    })
}
