use crate::error::{Error, Result};

/// A sign change of a scanned function between two grid points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bracket {
    pub lo: f64,
    pub hi: f64,
    pub f_lo: f64,
    pub f_hi: f64,
}

/// Adjacent grid pairs across which the sampled values change sign.
/// Exact zeros on the grid count once, attached to the interval on their left.
pub fn sign_changes(xs: &[f64], ys: &[f64]) -> Vec<Bracket> {
    let mut out = Vec::new();
    for i in 0..xs.len().saturating_sub(1) {
        let (a, b) = (ys[i], ys[i + 1]);
        let change = (a < 0.0 && b >= 0.0) || (a > 0.0 && b <= 0.0);
        if change {
            out.push(Bracket {
                lo: xs[i],
                hi: xs[i + 1],
                f_lo: a,
                f_hi: b,
            });
        }
    }
    out
}

/// Bisection on a sign-changing bracket down to `|hi - lo| <= tol`.
pub fn bisect<F>(mut f: F, bracket: Bracket, tol: f64, max_iter: usize) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let Bracket {
        mut lo,
        mut hi,
        mut f_lo,
        f_hi,
    } = bracket;
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_lo.signum() == f_hi.signum() {
        return Err(Error::invalid(format!("[{lo}, {hi}] does not bracket a root")));
    }
    for _ in 0..max_iter {
        let mid = 0.5 * (lo + hi);
        if (hi - lo) <= tol || mid <= lo || mid >= hi {
            return Ok(mid);
        }
        let fm = f(mid)?;
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == f_lo.signum() {
            lo = mid;
            f_lo = fm;
        } else {
            hi = mid;
        }
    }
    Err(Error::no_convergence(
        "bisect",
        format!("bracket [{lo}, {hi}] still wider than {tol} after {max_iter} steps"),
    ))
}
