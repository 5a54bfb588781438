//! Scalar root bracketing and minimization used by the curve tracers.

use crate::error::{Error, Result};

/// Root of `f` in `[lo, hi]` by the Illinois variant of regula falsi.
/// `f(lo)` and `f(hi)` must have opposite signs (or one of them vanish).
pub(crate) fn bracketed_root<F>(mut f: F, mut lo: f64, mut hi: f64, xtol: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let mut flo = f(lo)?;
    let mut fhi = f(hi)?;
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if (flo < 0.0) == (fhi < 0.0) {
        return Err(Error::NoConvergence("root bracket without sign change"));
    }
    let mut side = 0i8;
    for _ in 0..200 {
        if (hi - lo).abs() <= xtol {
            break;
        }
        let mut x = (lo * fhi - hi * flo) / (fhi - flo);
        // Fall back to bisection when the secant point hugs an endpoint.
        let w = hi - lo;
        if !(x > lo + 0.01 * w && x < hi - 0.01 * w) {
            x = 0.5 * (lo + hi);
        }
        let fx = f(x)?;
        if fx == 0.0 {
            return Ok(x);
        }
        if (fx < 0.0) == (flo < 0.0) {
            lo = x;
            flo = fx;
            if side == -1 {
                fhi *= 0.5;
            }
            side = -1;
        } else {
            hi = x;
            fhi = fx;
            if side == 1 {
                flo *= 0.5;
            }
            side = 1;
        }
    }
    if (hi - lo).abs() > xtol {
        return Err(Error::NoConvergence("bracketed root"));
    }
    Ok(0.5 * (lo + hi))
}

/// Golden-section minimum of `f` on `[lo, hi]`; returns `(x, f(x))`.
pub(crate) fn golden_min<F>(mut f: F, mut lo: f64, mut hi: f64, xtol: f64) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    let g = 0.5 * (5.0_f64.sqrt() - 1.0);
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    while (hi - lo).abs() > xtol {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = f(x1)?;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = f(x2)?;
        }
    }
    Ok(if f1 <= f2 { (x1, f1) } else { (x2, f2) })
}

/// `n` evenly spaced points from `lo` to `hi` inclusive.
pub(crate) fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    (0..n)
        .map(|i| {
            if i == n - 1 {
                hi
            } else {
                lo + (hi - lo) * i as f64 / (n - 1) as f64
            }
        })
        .collect()
}
