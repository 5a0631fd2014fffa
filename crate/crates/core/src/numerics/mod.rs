//! Numerical engines: damped semi-infinite quadrature, symmetric series
//! summation with certified tails, and bracketing root search.

mod quad;
mod roots;
mod series;

pub use quad::{integrate_damped, QuadResult, QuadSpec, RealFn};
pub use roots::{bisect, sign_changes, Bracket};
pub use series::{sum_images, SeriesResult, SeriesSpec};

/// Neumaier compensated sum. Order-dependent, so callers feed terms in a
/// fixed order to stay deterministic.
#[derive(Debug, Clone, Copy, Default)]
pub struct Accumulator {
    sum: f64,
    comp: f64,
}

impl Accumulator {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn sum(&self) -> f64 {
        self.sum + self.comp
    }
}

#[cfg(test)]
mod tests {
    use super::Accumulator;

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let mut acc = Accumulator::default();
        for x in [1.0, 1e100, 1.0, -1e100] {
            acc.add(x);
        }
        assert_eq!(acc.sum(), 2.0);
    }
}
