//! Atom-wall force `F = -d(shift)/dz`.
//!
//! The outward normal is +z, so `F < 0` pulls the atom toward the wall. In
//! reduced units `F = -d(total)/d(zeta)`; multiply by
//! [`force_unit`](crate::model::force_unit) for newtons. For the excited
//! state this is the gradient of the level shift, which need not be the
//! whole mechanical force on an excited atom.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::Result;
use crate::kernels::KernelConfig;
use crate::model::{force_unit, AtomSpec, ReducedPoint, StateLabel, Units};
use crate::numerics::{bisect, sign_changes};
use crate::shifts::{self, Derivative};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Attractive,
    Repulsive,
    Null,
}

impl Direction {
    pub fn of(value: f64, error: f64) -> Self {
        if value.abs() <= error {
            Direction::Null
        } else if value < 0.0 {
            Direction::Attractive
        } else {
            Direction::Repulsive
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Direction::Attractive => "attractive",
            Direction::Repulsive => "repulsive",
            Direction::Null => "null",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ForceValue {
    pub state: StateLabel,
    pub point: ReducedPoint,
    pub units: Units,
    pub value: f64,
    pub error_estimate: f64,
    pub direction: Direction,
}

/// Reduced force from the analytic ζ-derivatives of the kernels.
pub fn force(state: StateLabel, atom: &AtomSpec, point: ReducedPoint, cfg: &KernelConfig) -> Result<ForceValue> {
    let ks = shifts::weighted_kernels(atom, point, cfg, Derivative::Yes, true)?;
    let (dtf, dtf_err) = shifts::assemble_tf(state, point.theta, &ks);
    let (drr, drr_err) = shifts::assemble_rr(&ks);
    let value = -(dtf + drr);
    let error_estimate = dtf_err + drr_err;
    Ok(ForceValue {
        state,
        point,
        units: Units::Reduced,
        value,
        error_estimate,
        direction: Direction::of(value, error_estimate),
    })
}

/// Force in newtons.
pub fn force_si(state: StateLabel, atom: &AtomSpec, point: ReducedPoint, cfg: &KernelConfig) -> Result<ForceValue> {
    let f = force(state, atom, point, cfg)?;
    let u = force_unit(atom);
    Ok(ForceValue {
        units: Units::Si,
        value: f.value * u,
        error_estimate: f.error_estimate * u,
        ..f
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DifferenceReport {
    pub analytic: f64,
    pub numerical: f64,
    pub step: f64,
    pub relative_deviation: f64,
    pub pass: bool,
}

/// Analytic force against a Richardson-extrapolated central difference of
/// the total shift.
pub fn force_vs_finite_difference(state: StateLabel, atom: &AtomSpec, point: ReducedPoint) -> Result<DifferenceReport> {
    let cfg = KernelConfig::with_tol(1e-12);
    let analytic = force(state, atom, point, &cfg)?.value;
    let z = point.zeta;
    // resolve both the power-law scale zeta and the oscillation period pi
    let h = 0.05 * z.min(1.0);
    let total = |zeta: f64| -> Result<f64> { Ok(shifts::shift_total(state, atom, point.with_zeta(zeta)?, &cfg)?.total) };
    let central = |h: f64| -> Result<f64> { Ok((total(z + h)? - total(z - h)?) / (2.0 * h)) };
    let d1 = central(h)?;
    let d2 = central(0.5 * h)?;
    let d4 = central(0.25 * h)?;
    let r1 = (4.0 * d2 - d1) / 3.0;
    let r2 = (4.0 * d4 - d2) / 3.0;
    let numerical = -(16.0 * r2 - r1) / 15.0;
    let relative_deviation = ((analytic - numerical) / analytic).abs();
    Ok(DifferenceReport {
        analytic,
        numerical,
        step: h,
        relative_deviation,
        pass: relative_deviation < 1e-6,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Stability {
    /// Repulsive below, attractive above: the atom is pushed back.
    Stable,
    Unstable,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ForceZero {
    pub zeta: f64,
    pub stability: Stability,
}

/// Scan density per oscillation period (pi in zeta).
pub const SCAN_POINTS_PER_PERIOD: usize = 64;

/// Zeros of the force on `[lo, hi]` at fixed θ, in increasing ζ.
pub fn find_force_zeros(
    state: StateLabel,
    atom: &AtomSpec,
    theta: f64,
    interval: (f64, f64),
    tol: f64,
    cfg: &KernelConfig,
) -> Result<Vec<ForceZero>> {
    let (lo, hi) = interval;
    let start = ReducedPoint::new(lo, theta)?;
    ReducedPoint::new(hi, theta)?;
    if !(hi > lo) {
        return Err(crate::Error::invalid(format!("empty interval [{lo}, {hi}]")));
    }
    if !(tol > 0.0) {
        return Err(crate::Error::invalid(format!("tolerance must be positive, got {tol}")));
    }
    let periods = (hi - lo) / std::f64::consts::PI;
    let n = ((periods * SCAN_POINTS_PER_PERIOD as f64).ceil() as usize).max(SCAN_POINTS_PER_PERIOD) + 1;
    let xs: Vec<f64> = (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect();
    let eval = |z: f64| -> Result<f64> { Ok(force(state, atom, start.with_zeta(z)?, cfg)?.value) };
    let ys = xs.par_iter().map(|&z| eval(z)).collect::<Result<Vec<f64>>>()?;

    sign_changes(&xs, &ys)
        .into_par_iter()
        .map(|b| {
            let zeta = bisect(eval, b, tol, 200)?;
            let stability = if b.f_lo > 0.0 { Stability::Stable } else { Stability::Unstable };
            Ok(ForceZero { zeta, stability })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn iso() -> AtomSpec {
        AtomSpec::isotropic(2.37e15, 1.0).unwrap()
    }

    #[test]
    fn van_der_waals_force() {
        let z = 1e-3;
        let p = ReducedPoint::zero_temperature(z).unwrap();
        let f = force(StateLabel::Ground, &iso(), p, &KernelConfig::default()).unwrap();
        assert_relative_eq!(f.value, -4.0 / z.powi(4), max_relative = 5e-3);
        assert_eq!(f.direction, Direction::Attractive);
    }

    #[test]
    fn matches_finite_difference() {
        for &(z, t) in &[(0.3, 4.0), (12.0, 1e6), (1.0, f64::INFINITY), (2.0, 2.0)] {
            for s in StateLabel::ALL {
                let r = force_vs_finite_difference(s, &iso(), ReducedPoint::new(z, t).unwrap()).unwrap();
                assert!(r.pass, "{s} {z} {t} {r:?}");
            }
        }
    }

    #[test]
    fn excited_zeros_alternate() {
        let zs = find_force_zeros(StateLabel::Excited, &iso(), 1e6, (10.0, 30.0), 1e-10, &KernelConfig::default())
            .unwrap();
        assert!(zs.len() >= 5);
        for w in zs.windows(2) {
            assert!(w[0].zeta < w[1].zeta);
            assert_ne!(w[0].stability, w[1].stability);
        }
        let cfg = KernelConfig::default();
        for z in &zs {
            let at = |d: f64| force(StateLabel::Excited, &iso(), ReducedPoint::new(z.zeta + d, 1e6).unwrap(), &cfg);
            assert!(at(0.0).unwrap().value.abs() < 1e-6 * at(0.3).unwrap().value.abs());
        }
    }

    #[test]
    fn ground_has_no_zeros_when_cold() {
        let zs = find_force_zeros(StateLabel::Ground, &iso(), 1e6, (20.0, 100.0), 1e-10, &KernelConfig::default())
            .unwrap();
        assert!(zs.is_empty());
    }

    #[test]
    fn rejects_bad_interval() {
        let cfg = KernelConfig::default();
        assert!(find_force_zeros(StateLabel::Ground, &iso(), 1.0, (2.0, 1.0), 1e-8, &cfg).is_err());
        assert!(find_force_zeros(StateLabel::Ground, &iso(), 1.0, (0.0, 1.0), 1e-8, &cfg).is_err());
    }
}
