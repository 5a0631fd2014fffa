//! Assembly of the per-axis kernels into level shifts.
//!
//! With weights `w_j = alpha_j / alpha0` (in units of [`crate::model::energy_unit`]):
//!
//! ```text
//! tf(excited) =  sum_j w_j [coth(theta/2) f̂_j - ĝ_j]
//! tf(ground)  = -tf(excited)
//! tf(average) =  sum_j w_j [-f̂_j + tanh(theta/2) ĝ_j]
//! rr          =  sum_j w_j f̂_j                     (all states)
//! ```
//!
//! `coth(theta/2) = 1 + 2/(e^theta - 1)`; both hyperbolic factors are exactly
//! 1 at zero temperature.

use crate::error::Result;
use crate::kernels::{self, Axis, GEstimate, KernelConfig};
use crate::model::{to_reduced, AtomSpec, Environment, ReducedPoint, ShiftBreakdown, StateLabel};

/// Coefficients `(c_f, c_g)` with `tf = sum_j w_j (c_f f̂_j + c_g ĝ_j)`.
pub fn thermal_coefficients(state: StateLabel, theta: f64) -> (f64, f64) {
    let tanh = if theta.is_infinite() { 1.0 } else { (0.5 * theta).tanh() };
    let coth = 1.0 / tanh;
    match state {
        StateLabel::Excited => (coth, -1.0),
        StateLabel::Ground => (-coth, 1.0),
        StateLabel::ThermalAverage => (-1.0, tanh),
    }
}

/// Whether the kernels (or their ζ-derivatives) are wanted.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Derivative {
    No,
    Yes,
}

/// One axis class with its summed weight.
#[derive(Debug, Clone, Copy)]
pub(crate) struct WeightedKernel {
    pub weight: f64,
    pub f: f64,
    pub g: Option<GEstimate>,
}

pub(crate) fn weighted_kernels(
    atom: &AtomSpec,
    point: ReducedPoint,
    cfg: &KernelConfig,
    derivative: Derivative,
    with_g: bool,
) -> Result<Vec<WeightedKernel>> {
    let [wx, wy, wz] = atom.weights();
    let mut out = Vec::with_capacity(2);
    for (axis, weight) in [(Axis::Parallel, wx + wy), (Axis::Perpendicular, wz)] {
        if weight == 0.0 {
            continue;
        }
        let (f, g) = match derivative {
            Derivative::No => (
                kernels::f_hat(axis, point.zeta)?,
                if with_g { Some(kernels::g_hat(axis, point, cfg)?) } else { None },
            ),
            Derivative::Yes => (
                kernels::df_hat_dzeta(axis, point.zeta)?,
                if with_g { Some(kernels::dg_hat_dzeta(axis, point, cfg)?) } else { None },
            ),
        };
        out.push(WeightedKernel { weight, f, g });
    }
    Ok(out)
}

const ROUNDOFF: f64 = 8.0 * f64::EPSILON;

/// `(tf, tf_error)` from precomputed kernels.
pub(crate) fn assemble_tf(state: StateLabel, theta: f64, ks: &[WeightedKernel]) -> (f64, f64) {
    let (cf, cg) = thermal_coefficients(state, theta);
    let mut value = 0.0;
    let mut error = 0.0;
    let mut magnitude = 0.0;
    for k in ks {
        let g = k.g.expect("tf needs the g kernels");
        let term = k.weight * (cf * k.f + cg * g.value);
        value += term;
        magnitude += k.weight.abs() * ((cf * k.f).abs() + (cg * g.value).abs());
        error += k.weight.abs() * cg.abs() * g.error;
    }
    (value, error + ROUNDOFF * magnitude)
}

/// `(rr, rr_error)` from precomputed kernels.
pub(crate) fn assemble_rr(ks: &[WeightedKernel]) -> (f64, f64) {
    let value: f64 = ks.iter().map(|k| k.weight * k.f).sum();
    let magnitude: f64 = ks.iter().map(|k| (k.weight * k.f).abs()).sum();
    (value, ROUNDOFF * magnitude)
}

/// Thermal-fluctuation part, reduced units, with its error bound.
pub fn shift_tf(state: StateLabel, atom: &AtomSpec, point: ReducedPoint, cfg: &KernelConfig) -> Result<(f64, f64)> {
    let ks = weighted_kernels(atom, point, cfg, Derivative::No, true)?;
    Ok(assemble_tf(state, point.theta, &ks))
}

/// Radiation-reaction part, reduced units. Temperature and state independent.
pub fn shift_rr(atom: &AtomSpec, point: ReducedPoint) -> Result<f64> {
    let ks = weighted_kernels(atom, point, &KernelConfig::default(), Derivative::No, false)?;
    Ok(assemble_rr(&ks).0)
}

/// tf + rr for one state, reduced units.
pub fn shift_total(
    state: StateLabel,
    atom: &AtomSpec,
    point: ReducedPoint,
    cfg: &KernelConfig,
) -> Result<ShiftBreakdown> {
    Ok(shift_states(&[state], atom, point, cfg)?.remove(0))
}

/// Several states at one point, sharing the kernel evaluations.
pub fn shift_states(
    states: &[StateLabel],
    atom: &AtomSpec,
    point: ReducedPoint,
    cfg: &KernelConfig,
) -> Result<Vec<ShiftBreakdown>> {
    let ks = weighted_kernels(atom, point, cfg, Derivative::No, true)?;
    let (rr, rr_err) = assemble_rr(&ks);
    Ok(states
        .iter()
        .map(|&s| {
            let (tf, tf_err) = assemble_tf(s, point.theta, &ks);
            ShiftBreakdown::new(s, tf, rr, tf_err, rr_err)
        })
        .collect())
}

/// SI shift (joules) for a physical environment.
pub fn shift_si(state: StateLabel, atom: &AtomSpec, env: &Environment, cfg: &KernelConfig) -> Result<ShiftBreakdown> {
    let point = to_reduced(atom, env)?;
    Ok(shift_total(state, atom, point, cfg)?.to_si(atom))
}
