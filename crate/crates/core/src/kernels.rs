//! Per-axis kernels of the boundary-dependent shifts in reduced form.
//!
//! With `v = omega0 u`, `zeta = omega0 z / c` and `theta = omega0 beta / c`,
//! the dimensional kernels factor as `f_j = (omega0/c)^3 f̂_j(zeta)` and
//! `g_j = (omega0/c)^3 ĝ_j(zeta, theta)` where
//!
//! ```text
//! f̂_x = f̂_y = ((4 zeta^2 - 1)/zeta^3) cos 2zeta - (2/zeta^2) sin 2zeta
//! f̂_z       = -(2/zeta^3) cos 2zeta - (4/zeta^2) sin 2zeta
//! ĝ_x = ĝ_y =  (64/pi) sum_k int_0^inf dv e^{-v} ((v+k theta)^2 - a^2) / ((v+k theta)^2 + a^2)^3
//! ĝ_z       = -(64/pi) sum_k int_0^inf dv e^{-v} 1 / ((v+k theta)^2 + a^2)^2
//! ```
//!
//! with `a = 2 zeta`. The substitution `u -> v/omega0` pulls `c/omega0` out of
//! every length (`u c + k beta = (v + k theta) c/omega0`, `2z = a c/omega0`),
//! which leaves exactly three powers of `omega0/c` in front.
//!
//! ĝ has two exact evaluation routes:
//!
//! * **image sum**: the series above, one damped quadrature per image `k`.
//!   For `k < 0` the rational factor peaks at `v = |k| theta` with width
//!   `~a`, so those points are seeded as panel breakpoints. Cheap when
//!   `zeta << theta` (few images matter).
//! * **frequency sum**: summing the exponential weights over all images turns
//!   the series into `int_0^inf R(w) cosh(theta/2 - w mod theta)/sinh(theta/2) dw`;
//!   the Fourier series of that periodic weight has coefficients
//!   `2/(theta (1 + w_n^2))`, `w_n = 2 pi n / theta`, and the cosine transforms
//!   of the Lorentzian powers are closed form:
//!
//!   ```text
//!   ĝ_z = -(32/(theta a^3)) sum_n (1 + x_n) e^{-x_n} / (1 + w_n^2)
//!   ĝ_x = -(16/(theta a^3)) sum_n (1 + x_n + x_n^2) e^{-x_n} / (1 + w_n^2),   x_n = a |w_n|
//!   ```
//!
//!   Cheap when `zeta >~ theta`. Only defined at finite temperature.
//!
//! [`GRoute::Auto`] picks whichever route needs less work according to the
//! certified tail bounds of both. ζ-derivatives are taken under the integral
//! (image route) or term by term (frequency route).

use std::f64::consts::PI;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::ReducedPoint;
use crate::numerics::{integrate_damped, sum_images, QuadResult, QuadSpec, SeriesSpec};

/// Below this ζ the closed forms of f̂ are replaced by their Taylor series.
pub const SERIES_SWITCH: f64 = 1e-4;

/// Rough cost of one image-term quadrature in units of one closed-form
/// frequency term. Only used to pick a route.
const QUAD_COST: f64 = 800.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    /// x or y, parallel to the wall.
    Parallel,
    /// z, normal to the wall.
    Perpendicular,
}

impl Axis {
    pub fn as_str(&self) -> &'static str {
        match self {
            Axis::Parallel => "parallel",
            Axis::Perpendicular => "perpendicular",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GRoute {
    Auto,
    ImageSum,
    FrequencySum,
}

impl fmt::Display for GRoute {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GRoute::Auto => "auto",
            GRoute::ImageSum => "image",
            GRoute::FrequencySum => "frequency",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KernelConfig {
    /// Relative tolerance requested for ĝ and its derivative.
    pub rel_tol: f64,
    /// Largest image (or frequency) index before giving up.
    pub image_cap: u64,
    pub route: GRoute,
}

impl Default for KernelConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            image_cap: 1_000_000,
            route: GRoute::Auto,
        }
    }
}

impl KernelConfig {
    pub fn with_tol(rel_tol: f64) -> Self {
        Self {
            rel_tol,
            ..Self::default()
        }
    }

    pub fn with_route(mut self, route: GRoute) -> Self {
        self.route = route;
        self
    }
}

/// A ĝ value (or ζ-derivative) with its error bound and convergence metadata.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GEstimate {
    pub value: f64,
    pub error: f64,
    /// Route actually used (never `Auto`).
    pub route: GRoute,
    /// Largest image / frequency index summed.
    pub max_index: u64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KernelValue {
    pub axis: Axis,
    pub point: ReducedPoint,
    pub f_hat: f64,
    pub df_dzeta: f64,
    pub g_hat: f64,
    pub g_error: f64,
    pub dg_dzeta: f64,
    pub dg_error: f64,
    pub route: GRoute,
    pub max_index: u64,
    pub evaluations: usize,
}

fn check_zeta(zeta: f64) -> Result<()> {
    if zeta.is_finite() && zeta > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!("zeta must be finite and positive, got {zeta}")))
    }
}

fn horner(z2: f64, coeffs: &[f64]) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * z2 + c)
}

/// Closed-form f̂ for the given axis.
pub fn f_hat(axis: Axis, zeta: f64) -> Result<f64> {
    check_zeta(zeta)?;
    Ok(if zeta < SERIES_SWITCH { f_series(axis, zeta) } else { f_closed(axis, zeta) })
}

/// Exact ζ-derivative of [`f_hat`].
pub fn df_hat_dzeta(axis: Axis, zeta: f64) -> Result<f64> {
    check_zeta(zeta)?;
    Ok(if zeta < SERIES_SWITCH { df_series(axis, zeta) } else { df_closed(axis, zeta) })
}

fn f_closed(axis: Axis, z: f64) -> f64 {
    let (s, c) = (2.0 * z).sin_cos();
    match axis {
        Axis::Parallel => ((4.0 * z * z - 1.0) / (z * z * z)) * c - (2.0 / (z * z)) * s,
        Axis::Perpendicular => -(2.0 / (z * z * z)) * c - (4.0 / (z * z)) * s,
    }
}

// Laurent series, odd powers only.
fn f_series(axis: Axis, z: f64) -> f64 {
    let z2 = z * z;
    match axis {
        Axis::Parallel => {
            -1.0 / (z2 * z) + 2.0 / z + z * horner(z2, &[-6.0, 20.0 / 9.0, -14.0 / 45.0, 4.0 / 175.0])
        }
        Axis::Perpendicular => {
            -2.0 / (z2 * z) - 4.0 / z + z * horner(z2, &[4.0, -8.0 / 9.0, 4.0 / 45.0, -8.0 / 1575.0])
        }
    }
}

fn df_closed(axis: Axis, z: f64) -> f64 {
    let (s, c) = (2.0 * z).sin_cos();
    let z2 = z * z;
    let z3 = z2 * z;
    let z4 = z2 * z2;
    match axis {
        Axis::Parallel => (3.0 / z4 - 8.0 / z2) * c + (6.0 / z3 - 8.0 / z) * s,
        Axis::Perpendicular => (6.0 / z4 - 8.0 / z2) * c + (12.0 / z3) * s,
    }
}

fn df_series(axis: Axis, z: f64) -> f64 {
    let z2 = z * z;
    let z4 = z2 * z2;
    match axis {
        Axis::Parallel => 3.0 / z4 - 2.0 / z2 + horner(z2, &[-6.0, 20.0 / 3.0, -14.0 / 9.0, 4.0 / 25.0]),
        Axis::Perpendicular => 6.0 / z4 + 4.0 / z2 + horner(z2, &[4.0, -8.0 / 3.0, 4.0 / 9.0, -8.0 / 225.0]),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Order {
    Value,
    Derivative,
}

/// Image-sum ingredients for one (axis, order): the rational factor of the
/// k-th term, its overall prefactor and a `c (s^2 + a^2)^{-p}` envelope.
struct ImageKernel {
    axis: Axis,
    order: Order,
    a: f64,
}

impl ImageKernel {
    fn prefactor(&self) -> f64 {
        match self.axis {
            Axis::Parallel => 64.0 / PI,
            Axis::Perpendicular => -64.0 / PI,
        }
    }

    fn rational(&self, s: f64) -> f64 {
        let a = self.a;
        let a2 = a * a;
        let q = s * s + a2;
        match (self.axis, self.order) {
            (Axis::Perpendicular, Order::Value) => 1.0 / (q * q),
            (Axis::Parallel, Order::Value) => (s * s - a2) / (q * q * q),
            // d/dzeta = 2 d/da
            (Axis::Perpendicular, Order::Derivative) => -8.0 * a / (q * q * q),
            (Axis::Parallel, Order::Derivative) => -8.0 * a * (2.0 * s * s - a2) / (q * q * q * q),
        }
    }

    fn power(&self) -> i32 {
        match self.order {
            Order::Value => 2,
            Order::Derivative => 3,
        }
    }

    fn envelope_coeff(&self) -> f64 {
        match (self.axis, self.order) {
            (_, Order::Value) => 1.0,
            (Axis::Perpendicular, Order::Derivative) => 8.0 * self.a,
            (Axis::Parallel, Order::Derivative) => 16.0 * self.a,
        }
    }

    fn envelope(&self, s: f64) -> f64 {
        self.envelope_coeff() / (s * s + self.a * self.a).powi(self.power())
    }

    /// `int_R (s^2 + a^2)^{-p} ds`
    fn full_line(&self) -> f64 {
        let a = self.a;
        match self.power() {
            2 => PI / (2.0 * a.powi(3)),
            _ => 3.0 * PI / (8.0 * a.powi(5)),
        }
    }

    /// Upper bound on `int_X^inf (s^2 + a^2)^{-p} ds`.
    fn half_line_tail(&self, x: f64) -> f64 {
        let p = self.power();
        let power_law = 1.0 / ((2 * p - 1) as f64 * x.powi(2 * p - 1));
        power_law.min(0.5 * self.full_line())
    }

    /// Bound on `sum_{|k| > K} int_0^inf e^{-v} |R(v + k theta)| dv`
    /// (without the prefactor).
    ///
    /// k > 0: the integrand is at most `L(k theta)` and `L` decreases, so the
    /// sum is below `(1/theta) int_{K theta}^inf L`.
    /// k = -m < 0: resumming `e^{-(u + m theta)}` over `m > K` gives a weight
    /// `<= min(1, e^{-(u+S)}) / (1 - e^{-theta})`, `S = (K+1) theta`; split
    /// at `u = -S/2`.
    fn tail_bound(&self, theta: f64, k: u64) -> f64 {
        if theta.is_infinite() {
            return 0.0;
        }
        if k == 0 {
            return f64::INFINITY;
        }
        let kt = k as f64 * theta;
        let positive = self.half_line_tail(kt) / theta;
        let s = (k as f64 + 1.0) * theta;
        let negative = (self.half_line_tail(0.5 * s) + (-0.5 * s).exp() * self.full_line())
            / (-(-theta).exp_m1());
        self.envelope_coeff() * (positive + negative)
    }

    /// Lower bound on `|ĝ|` (or its derivative) without the prefactor: the
    /// n = 0 frequency term, every frequency term having the same sign.
    fn floor_reference(&self, theta: f64) -> f64 {
        if theta.is_infinite() {
            return 0.0;
        }
        frequency_prefactor(self.axis, self.order, self.a, theta).abs()
            * frequency_h(self.axis, self.order, 0.0)
            / self.prefactor().abs()
    }
}

fn frequency_prefactor(axis: Axis, order: Order, a: f64, theta: f64) -> f64 {
    match (axis, order) {
        (Axis::Perpendicular, Order::Value) => -32.0 / (theta * a.powi(3)),
        (Axis::Parallel, Order::Value) => -16.0 / (theta * a.powi(3)),
        (Axis::Perpendicular, Order::Derivative) => 64.0 / (theta * a.powi(4)),
        (Axis::Parallel, Order::Derivative) => 32.0 / (theta * a.powi(4)),
    }
}

/// Frequency-route numerator as a function of `x = a |w_n|`.
fn frequency_h(axis: Axis, order: Order, x: f64) -> f64 {
    let e = (-x).exp();
    match (axis, order) {
        (Axis::Perpendicular, Order::Value) => (1.0 + x) * e,
        (Axis::Parallel, Order::Value) => (1.0 + x + x * x) * e,
        (Axis::Perpendicular, Order::Derivative) => (3.0 + x * (3.0 + x)) * e,
        (Axis::Parallel, Order::Derivative) => (3.0 + x * (3.0 + x * (2.0 + x))) * e,
    }
}

/// `sup_{y >= x} h(y)`.
fn frequency_h_sup(axis: Axis, order: Order, x: f64) -> f64 {
    let peak = match (axis, order) {
        (Axis::Parallel, Order::Value) => 1.0,
        (Axis::Parallel, Order::Derivative) => 0.5 * (1.0 + 5f64.sqrt()),
        _ => 0.0,
    };
    frequency_h(axis, order, x.max(peak))
}

/// Bound on `sum_{|n| > N} h(x_n) / (1 + w_n^2)`.
fn frequency_tail(axis: Axis, order: Order, a: f64, theta: f64, n: u64) -> f64 {
    let w = 2.0 * PI * n as f64 / theta;
    let inv_sq = if n == 0 { PI * PI / 6.0 } else { 1.0 / n as f64 };
    2.0 * frequency_h_sup(axis, order, a * w) * theta * theta / (4.0 * PI * PI) * inv_sq
}

/// Smallest K in [0, cap] with `bound(K) <= target`, or None.
fn needed_index(bound: impl Fn(u64) -> f64, target: f64, cap: u64) -> Option<u64> {
    if bound(0) <= target {
        return Some(0);
    }
    let mut hi = 1u64;
    while bound(hi) > target {
        if hi >= cap {
            return None;
        }
        hi = (hi * 2).min(cap);
    }
    let mut lo = hi / 2;
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if bound(mid) <= target {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some(hi)
}

fn image_route(kernel: &ImageKernel, theta: f64, cfg: &KernelConfig, k_est: u64) -> Result<GEstimate> {
    let a = kernel.a;
    let reference = kernel.floor_reference(theta);
    let per_term_floor = 0.1 * cfg.rel_tol * reference / (2 * k_est + 1) as f64;

    let term = |k: i64| -> Result<QuadResult> {
        let shift = if k == 0 { 0.0 } else { k as f64 * theta };
        let integrand = move |v: f64| (-v).exp() * kernel.rational(v + shift);
        let envelope = move |v: f64| kernel.envelope(v + shift);
        let peaks = if k < 0 { vec![-shift] } else { Vec::new() };
        let (rel, floor) = if theta.is_infinite() {
            (cfg.rel_tol, 0.0)
        } else {
            (0.1 * cfg.rel_tol, per_term_floor)
        };
        integrate_damped(
            &QuadSpec::new(&integrand)
                .peaks(peaks, a)
                .tolerance(rel, floor)
                .envelope(&envelope),
        )
    };
    let tail = |k: u64| kernel.tail_bound(theta, k);
    let r = sum_images(&SeriesSpec {
        term: &term,
        tail_bound: &tail,
        rel_tol: cfg.rel_tol,
        abs_floor: 0.5 * cfg.rel_tol * reference,
        cap: cfg.image_cap,
    })?;
    let p = kernel.prefactor();
    Ok(GEstimate {
        value: p * r.value,
        error: p.abs() * r.error_estimate,
        route: GRoute::ImageSum,
        max_index: r.max_index,
        evaluations: r.evaluations,
    })
}

fn frequency_route(axis: Axis, order: Order, a: f64, theta: f64, cfg: &KernelConfig) -> Result<GEstimate> {
    if theta.is_infinite() {
        return Err(Error::invalid(
            "the frequency-sum route needs a finite temperature",
        ));
    }
    let term = |n: i64| -> Result<QuadResult> {
        let w = 2.0 * PI * n.unsigned_abs() as f64 / theta;
        Ok(QuadResult::exact(frequency_h(axis, order, a * w) / (1.0 + w * w)))
    };
    let tail = |n: u64| frequency_tail(axis, order, a, theta, n);
    let r = sum_images(&SeriesSpec {
        term: &term,
        tail_bound: &tail,
        rel_tol: cfg.rel_tol,
        abs_floor: 0.0,
        cap: cfg.image_cap,
    })?;
    let p = frequency_prefactor(axis, order, a, theta);
    // closed-form terms: roundoff of the compensated sum only
    let roundoff = 4.0 * f64::EPSILON * r.value.abs();
    Ok(GEstimate {
        value: p * r.value,
        error: p.abs() * (r.error_estimate + roundoff),
        route: GRoute::FrequencySum,
        max_index: r.max_index,
        evaluations: r.evaluations,
    })
}

fn g_generic(axis: Axis, order: Order, point: ReducedPoint, cfg: &KernelConfig) -> Result<GEstimate> {
    check_zeta(point.zeta)?;
    if !(cfg.rel_tol > 0.0 && cfg.rel_tol < 1.0) {
        return Err(Error::invalid(format!(
            "kernel tolerance must lie in (0, 1), got {}",
            cfg.rel_tol
        )));
    }
    let theta = point.theta;
    let a = 2.0 * point.zeta;
    let kernel = ImageKernel { axis, order, a };

    if theta.is_infinite() {
        return match cfg.route {
            GRoute::FrequencySum => frequency_route(axis, order, a, theta, cfg),
            _ => image_route(&kernel, theta, cfg, 0),
        };
    }

    let image_target = 0.5 * cfg.rel_tol * kernel.floor_reference(theta);
    let k_needed = needed_index(|k| kernel.tail_bound(theta, k), image_target, cfg.image_cap);
    let freq_target = cfg.rel_tol * frequency_h(axis, order, 0.0);
    let n_needed = needed_index(
        |n| frequency_tail(axis, order, a, theta, n),
        freq_target,
        cfg.image_cap,
    );

    let route = match cfg.route {
        GRoute::Auto => {
            let cost_img = k_needed.map(|k| (2 * k + 1) as f64 * QUAD_COST);
            let cost_freq = n_needed.map(|n| (2 * n + 1) as f64);
            match (cost_img, cost_freq) {
                (Some(ci), Some(cf)) if ci < cf => GRoute::ImageSum,
                (Some(_), Some(_)) => GRoute::FrequencySum,
                (Some(_), None) => GRoute::ImageSum,
                (None, Some(_)) => GRoute::FrequencySum,
                (None, None) => {
                    return Err(Error::no_convergence(
                        "g_hat",
                        format!(
                            "neither image nor frequency sum converges within {} terms at {point}",
                            cfg.image_cap
                        ),
                    ))
                }
            }
        }
        forced => forced,
    };
    match route {
        GRoute::ImageSum => image_route(&kernel, theta, cfg, k_needed.unwrap_or(cfg.image_cap)),
        _ => frequency_route(axis, order, a, theta, cfg),
    }
}

/// ĝ for the given axis.
pub fn g_hat(axis: Axis, point: ReducedPoint, cfg: &KernelConfig) -> Result<GEstimate> {
    g_generic(axis, Order::Value, point, cfg)
}

/// ∂ĝ/∂ζ at fixed θ.
pub fn dg_hat_dzeta(axis: Axis, point: ReducedPoint, cfg: &KernelConfig) -> Result<GEstimate> {
    g_generic(axis, Order::Derivative, point, cfg)
}

/// Everything about one axis at one point.
pub fn kernel_value(axis: Axis, point: ReducedPoint, cfg: &KernelConfig) -> Result<KernelValue> {
    let g = g_hat(axis, point, cfg)?;
    let dg = dg_hat_dzeta(axis, point, cfg)?;
    Ok(KernelValue {
        axis,
        point,
        f_hat: f_hat(axis, point.zeta)?,
        df_dzeta: df_hat_dzeta(axis, point.zeta)?,
        g_hat: g.value,
        g_error: g.error,
        dg_dzeta: dg.value,
        dg_error: dg.error,
        route: g.route,
        max_index: g.max_index.max(dg.max_index),
        evaluations: g.evaluations + dg.evaluations,
    })
}
