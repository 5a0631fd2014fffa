use serde::Serialize;

use super::{Accumulator, QuadResult};
use crate::error::{Error, Result};

pub type TermFn<'a> = &'a (dyn Fn(i64) -> Result<QuadResult> + Sync);
pub type TailFn<'a> = &'a (dyn Fn(u64) -> f64 + Sync);

/// A two-sided series `sum_{k in Z} term(k)`.
pub struct SeriesSpec<'a> {
    /// Term value with its own error estimate and evaluation count.
    pub term: TermFn<'a>,
    /// Bound on `sum_{|k| > K} |term(k)|`, non-increasing in `K`.
    pub tail_bound: TailFn<'a>,
    pub rel_tol: f64,
    pub abs_floor: f64,
    /// Largest `K` before giving up.
    pub cap: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeriesResult {
    pub value: f64,
    pub error_estimate: f64,
    /// Final `K` of the symmetric partial sum over `|k| <= K`.
    pub max_index: u64,
    pub evaluations: usize,
}

/// Symmetric partial sums, grown one index at a time until the tail bound
/// drops below `max(rel_tol |partial|, abs_floor)`.
///
/// The returned error is the tail bound plus the accumulated term errors.
pub fn sum_images(spec: &SeriesSpec<'_>) -> Result<SeriesResult> {
    if !(spec.rel_tol > 0.0 && spec.rel_tol < 1.0) {
        return Err(Error::invalid(format!(
            "rel_tol must lie in (0, 1), got {}",
            spec.rel_tol
        )));
    }
    let mut acc = Accumulator::default();
    let mut term_err = Accumulator::default();
    let mut evaluations = 0usize;

    let mut push = |r: QuadResult, acc: &mut Accumulator, term_err: &mut Accumulator| {
        acc.add(r.value);
        term_err.add(r.error_estimate);
        evaluations += r.evaluations;
    };

    push((spec.term)(0)?, &mut acc, &mut term_err);
    let mut k: u64 = 0;
    loop {
        let tail = (spec.tail_bound)(k);
        if tail.is_nan() {
            return Err(Error::invalid(format!("tail bound is NaN at K={k}")));
        }
        let partial = acc.sum();
        if tail <= (spec.rel_tol * partial.abs()).max(spec.abs_floor) {
            return Ok(SeriesResult {
                value: partial,
                error_estimate: tail + term_err.sum(),
                max_index: k,
                evaluations,
            });
        }
        if k >= spec.cap {
            return Err(Error::no_convergence(
                "sum_images",
                format!("reached K={k}, tail bound {tail:e} vs partial {partial:e}"),
            ));
        }
        k += 1;
        let ki = k as i64;
        push((spec.term)(ki)?, &mut acc, &mut term_err);
        push((spec.term)(-ki)?, &mut acc, &mut term_err);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inverse_quartic_tail(theta: f64) -> impl Fn(u64) -> f64 {
        // sum_{|k|>K} 1/(1+(k theta)^4) <= 2/(3 theta^4 K^3)
        move |k: u64| {
            if k == 0 {
                f64::INFINITY
            } else {
                2.0 / (3.0 * theta.powi(4) * (k as f64).powi(3))
            }
        }
    }

    #[test]
    fn single_term() {
        let term = |k: i64| Ok(QuadResult::exact(if k == 0 { 3.25 } else { 0.0 }));
        let tail = |_k: u64| 0.0;
        let r = sum_images(&SeriesSpec {
            term: &term,
            tail_bound: &tail,
            rel_tol: 1e-12,
            abs_floor: 0.0,
            cap: 10,
        })
        .unwrap();
        assert_eq!(r.value, 3.25);
        assert_eq!(r.max_index, 0);
        assert_eq!(r.error_estimate, 0.0);
    }

    #[test]
    fn quartic_series_matches_brute_force() {
        let theta = 10.0;
        let f = move |k: i64| 1.0 / (1.0 + ((k as f64) * theta).powi(4));
        // brute force: |k| <= 1e5, summed from the small end up
        let mut brute = 0.0;
        for k in (1..=100_000i64).rev() {
            brute += f(k) + f(-k);
        }
        brute += f(0);
        let term = move |k: i64| Ok(QuadResult::exact(f(k)));
        let tail = inverse_quartic_tail(theta);
        let r = sum_images(&SeriesSpec {
            term: &term,
            tail_bound: &tail,
            rel_tol: 1e-13,
            abs_floor: 0.0,
            cap: 1_000_000,
        })
        .unwrap();
        assert!((r.value - brute).abs() < 1e-12, "{} vs {}", r.value, brute);
        assert!((r.value - brute).abs() <= r.error_estimate + 1e-15);
    }

    #[test]
    fn cap_is_enforced() {
        let term = |k: i64| Ok(QuadResult::exact(1.0 / (1.0 + (k as f64).powi(2))));
        let tail = |k: u64| 2.0 / (k as f64).max(1e-300);
        let err = sum_images(&SeriesSpec {
            term: &term,
            tail_bound: &tail,
            rel_tol: 1e-12,
            abs_floor: 0.0,
            cap: 100,
        })
        .unwrap_err();
        assert!(matches!(err, Error::NonConvergence { .. }));
    }

    #[test]
    fn tightening_never_grows_error() {
        let theta = 0.7;
        let term = move |k: i64| Ok(QuadResult::exact(1.0 / (1.0 + ((k as f64) * theta).powi(4))));
        let tail = inverse_quartic_tail(theta);
        let run = |tol: f64| {
            sum_images(&SeriesSpec {
                term: &term,
                tail_bound: &tail,
                rel_tol: tol,
                abs_floor: 0.0,
                cap: 1_000_000,
            })
            .unwrap()
        };
        let mut last = f64::INFINITY;
        for tol in [1e-4, 1e-6, 1e-8, 1e-10] {
            let r = run(tol);
            assert!(r.error_estimate <= last);
            last = r.error_estimate;
        }
    }
}
