//! Adaptive Gauss-Kronrod quadrature on `[0, inf)` for integrands that carry
//! an `e^{-v}` damping factor and may have narrow interior peaks.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::Serialize;

use super::Accumulator;
use crate::error::{Error, Result};

// 21-point Kronrod extension of the 10-point Gauss rule (QUADPACK qk21).
const XGK: [f64; 11] = [
    0.995_657_163_025_808_1,
    0.973_906_528_517_171_7,
    0.930_157_491_355_708_2,
    0.865_063_366_688_984_5,
    0.780_817_726_586_416_9,
    0.679_409_568_299_024_4,
    0.562_757_134_668_604_7,
    0.433_395_394_129_247_2,
    0.294_392_862_701_460_2,
    0.148_874_338_981_631_22,
    0.0,
];
const WG: [f64; 5] = [
    0.066_671_344_308_688_14,
    0.149_451_349_150_580_6,
    0.219_086_362_515_982_04,
    0.269_266_719_309_996_35,
    0.295_524_224_714_752_87,
];
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874,
    0.032_558_162_307_964_725,
    0.054_755_896_574_351_995,
    0.075_039_674_810_919_96,
    0.093_125_454_583_697_6,
    0.109_387_158_802_297_64,
    0.123_491_976_262_065_84,
    0.134_709_217_311_473_34,
    0.142_775_938_577_060_09,
    0.147_739_104_901_338_49,
    0.149_445_554_002_916_9,
];

/// Largest cutoff we ever use; `e^{-745}` underflows.
const V_CAP: f64 = 740.0;
/// Geometric ratio of the panel seeds placed around each peak.
const SEED_RATIO: f64 = 4.0;

pub type RealFn<'a> = &'a (dyn Fn(f64) -> f64 + Sync);

/// Input to [`integrate_damped`]: `integral_0^inf integrand(v) dv` where the
/// integrand behaves like `e^{-v} r(v)` for a rational-like `r`.
pub struct QuadSpec<'a> {
    /// Full integrand, damping included.
    pub integrand: RealFn<'a>,
    /// Locations of narrow structure (the origin is always seeded).
    pub peaks: Vec<f64>,
    /// Characteristic peak width.
    pub scale: f64,
    pub rel_tol: f64,
    pub abs_floor: f64,
    /// Optional bound on `|r(v)| = |integrand(v)| e^v`, non-increasing past
    /// the cutoff. Without it the tail is bounded from samples of the last
    /// panel.
    pub envelope: Option<RealFn<'a>>,
    pub max_panels: usize,
}

impl<'a> QuadSpec<'a> {
    pub fn new(integrand: RealFn<'a>) -> Self {
        Self {
            integrand,
            peaks: Vec::new(),
            scale: 1.0,
            rel_tol: 1e-10,
            abs_floor: 0.0,
            envelope: None,
            max_panels: 4000,
        }
    }

    pub fn peaks(mut self, peaks: Vec<f64>, scale: f64) -> Self {
        self.peaks = peaks;
        self.scale = scale;
        self
    }

    pub fn tolerance(mut self, rel_tol: f64, abs_floor: f64) -> Self {
        self.rel_tol = rel_tol;
        self.abs_floor = abs_floor;
        self
    }

    pub fn envelope(mut self, envelope: RealFn<'a>) -> Self {
        self.envelope = Some(envelope);
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadResult {
    pub value: f64,
    pub error_estimate: f64,
    pub evaluations: usize,
}

impl QuadResult {
    pub fn exact(value: f64) -> Self {
        Self {
            value,
            error_estimate: 0.0,
            evaluations: 1,
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.a.total_cmp(&self.a))
    }
}

fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut e = err.abs();
    if res_asc != 0.0 && e != 0.0 {
        let scale = (200.0 * e / res_asc).powf(1.5);
        e = if scale < 1.0 { res_asc * scale } else { res_asc };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        e = e.max(50.0 * f64::EPSILON * res_abs);
    }
    e
}

fn gk21(f: RealFn<'_>, a: f64, b: f64) -> Result<Panel> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let eval = |x: f64| -> Result<f64> {
        let y = f(x);
        if y.is_finite() {
            Ok(y)
        } else {
            Err(Error::invalid(format!("integrand is not finite at v={x}")))
        }
    };

    let fc = eval(center)?;
    let mut res_k = fc * WGK[10];
    let mut res_g = 0.0;
    let mut res_abs = fc.abs() * WGK[10];
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = eval(center - dx)?;
        let f2 = eval(center + dx)?;
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let h = half.abs();
    Ok(Panel {
        a,
        b,
        value: res_k * half,
        error: rescale_error((res_k - res_g) * half, res_abs * h, res_asc * h),
    })
}

fn seed_breakpoints(peaks: &[f64], scale: f64, v_max: f64) -> Vec<f64> {
    let mut pts = vec![0.0, v_max];
    let origin = std::iter::once(0.0);
    for p in origin.chain(peaks.iter().copied()) {
        if !(0.0..v_max).contains(&p) {
            continue;
        }
        pts.push(p);
        let mut d = scale;
        while d < v_max {
            for q in [p - d, p + d] {
                if q > 0.0 && q < v_max {
                    pts.push(q);
                }
            }
            d *= SEED_RATIO;
        }
    }
    pts.sort_by(f64::total_cmp);
    pts.dedup_by(|a, b| (*a - *b).abs() <= 1e-14 * b.abs().max(1e-300));
    pts
}

/// Integrate a damped integrand over `[0, inf)`.
///
/// The domain is cut at every peak (plus geometric seeds of width `scale`
/// around it) and at `V_max = max(peaks) + max(50, -ln(abs_floor))`; the
/// discarded tail is bounded and folded into the error estimate, and the
/// cutoff is pushed out if that bound is too large.
pub fn integrate_damped(spec: &QuadSpec<'_>) -> Result<QuadResult> {
    if !(spec.rel_tol > 0.0 && spec.rel_tol < 1.0) {
        return Err(Error::invalid(format!(
            "rel_tol must lie in (0, 1), got {}",
            spec.rel_tol
        )));
    }
    if !(spec.scale.is_finite() && spec.scale > 0.0) {
        return Err(Error::invalid(format!(
            "peak scale must be positive, got {}",
            spec.scale
        )));
    }
    if !(spec.abs_floor >= 0.0) {
        return Err(Error::invalid("abs_floor must be non-negative"));
    }
    if spec.peaks.iter().any(|p| !p.is_finite()) {
        return Err(Error::invalid("peak locations must be finite"));
    }

    let f = spec.integrand;
    let p_max = spec.peaks.iter().copied().fold(0.0_f64, f64::max);
    let damping = if spec.abs_floor > 0.0 {
        (-spec.abs_floor.ln()).max(50.0)
    } else {
        50.0
    };
    let mut v_max = (p_max + damping).min(p_max + V_CAP);

    let mut evaluations = 0usize;
    let mut heap = BinaryHeap::new();
    for w in seed_breakpoints(&spec.peaks, spec.scale, v_max).windows(2) {
        heap.push(gk21(f, w[0], w[1])?);
        evaluations += 21;
    }

    // Tail beyond the cutoff: |r(v)| <= C for v >= V_max, and
    // integral_{V_max}^inf e^{-v} dv = e^{-V_max}.
    let tail_bound = |v_max: f64, last_a: f64| -> Result<(f64, usize)> {
        match spec.envelope {
            Some(env) => Ok((env(v_max).abs() * (-v_max).exp(), 1)),
            None => {
                let mut c = 0.0_f64;
                for i in 0..=4 {
                    let x = last_a + (v_max - last_a) * i as f64 / 4.0;
                    let y = f(x);
                    if !y.is_finite() {
                        return Err(Error::invalid(format!("integrand is not finite at v={x}")));
                    }
                    c = c.max(y.abs() * (x - v_max).exp());
                }
                Ok((c, 5))
            }
        }
    };

    let sum = |heap: &BinaryHeap<Panel>| -> (f64, f64) {
        let mut v = Accumulator::default();
        let mut e = Accumulator::default();
        let mut panels: Vec<&Panel> = heap.iter().collect();
        panels.sort_by(|x, y| x.a.total_cmp(&y.a));
        for p in panels {
            v.add(p.value);
            e.add(p.error);
        }
        (v.sum(), e.sum())
    };

    let last_panel_start = |heap: &BinaryHeap<Panel>, v_max: f64| {
        heap.iter()
            .filter(|p| p.b >= v_max)
            .map(|p| p.a)
            .fold(0.0_f64, f64::max)
    };

    let (mut tail, n) = tail_bound(v_max, last_panel_start(&heap, v_max))?;
    evaluations += n;
    loop {
        let (value, err) = sum(&heap);
        let target = (spec.rel_tol * value.abs()).max(spec.abs_floor);

        // Push the cutoff out while the discarded tail is not negligible.
        if tail > 0.1 * target && v_max < p_max + V_CAP {
            let next = (v_max + 50.0).min(p_max + V_CAP);
            heap.push(gk21(f, v_max, next)?);
            evaluations += 21;
            v_max = next;
            let (t, n) = tail_bound(v_max, last_panel_start(&heap, v_max))?;
            tail = t;
            evaluations += n;
            continue;
        }

        if err + tail <= target {
            return Ok(QuadResult {
                value,
                error_estimate: err + tail,
                evaluations,
            });
        }
        if heap.len() >= spec.max_panels {
            return Err(Error::no_convergence(
                "integrate_damped",
                format!(
                    "{} panels, error {:e} above target {:e}",
                    heap.len(),
                    err + tail,
                    target
                ),
            ));
        }

        let worst = heap.pop().expect("at least one panel");
        let mid = 0.5 * (worst.a + worst.b);
        if !(mid > worst.a && mid < worst.b) || (worst.b - worst.a) < 1e3 * f64::EPSILON * mid.abs() {
            // Too narrow to split further: the remaining error is roundoff.
            return Err(Error::no_convergence(
                "integrate_damped",
                format!(
                    "panel [{:e}, {:e}] cannot be refined, error {:e} above target {:e}",
                    worst.a,
                    worst.b,
                    err + tail,
                    target
                ),
            ));
        }
        heap.push(gk21(f, worst.a, mid)?);
        heap.push(gk21(f, mid, worst.b)?);
        evaluations += 42;
    }
}
