//! Adjacency points: trivial-monodromy parameters at integer `b`, their seeds,
//! and chains generated from the zeros of `u(s) = s^b (J_b(s) + y0·Y_b(s))`.

use crate::error::{Error, Result};
use crate::linalg::C64;
use crate::monodromy::{monodromy_loop, triviality_residual, CERTIFY_THRESHOLD, DEFAULT_RADIUS};
use crate::odeint::Tolerances;
use crate::roots::golden_min;
use crate::rotation::JosephsonParams;
use crate::specfun::{bessel_pair, find_zeros, u_eval, BesselCombo};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdjacencySeed {
    pub b: f64,
    pub a0: f64,
    pub omega0: f64,
    /// Identity residual of the monodromy at the seed.
    pub residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChainPoint {
    /// 1-based index of the zero of `u`.
    pub k: usize,
    pub a_star: f64,
    /// `|ω*_k|`; the sign of `ω` is a gauge (conjugation by `diag(1, −1)`).
    pub omega_star: f64,
    /// Identity residual of the monodromy at `(b, a*_k, ω*_k)`, NaN if it
    /// could not be computed.
    pub verify_residual: f64,
}

/// Mixing constant that makes `u(a0) = 0`.
pub fn seed_y0(b: f64, a0: f64) -> Result<f64> {
    let p = bessel_pair(b, a0)?;
    if p.y.abs() < 1e-14 {
        return Err(Error::PureYCombination(a0));
    }
    Ok(-p.j / p.y)
}

/// `ω0·a0·u'(a0) / (a*·u'(a*))`, in absolute value.
pub fn omega_star_formula(omega0: f64, a0: f64, up0: f64, a_star: f64, up_star: f64) -> f64 {
    (omega0 * a0 * up0 / (a_star * up_star)).abs()
}

/// `ω*` from `b₂b₃ = −1/(4ω*²)`.
pub fn omega_from_b2b3(b2: f64, b3: f64) -> Result<f64> {
    let p = b2 * b3;
    if !(p < 0.0) {
        return Err(Error::NoRealOmega(p));
    }
    Ok(0.5 / (-p).sqrt())
}

/// `d = (b₃/b₂)^{1/4}`, which equalizes the off-diagonal entries.
pub fn symmetric_gauge(b2: f64, b3: f64) -> Result<f64> {
    if b2 == 0.0 || !(b3 / b2 > 0.0) {
        return Err(Error::NoSymmetricGauge { b2, b3 });
    }
    Ok((b3 / b2).powf(0.25))
}

/// Identity residual of the monodromy at `(b, a, ω)`.
pub fn verify_point(b: f64, a: f64, omega: f64, tol: &Tolerances) -> Result<f64> {
    if a == 0.0 {
        return Err(Error::InvalidInput("adjacency points lie off the axis a = 0".into()));
    }
    triviality_residual(&JosephsonParams::new(b, a, omega)?, tol)
}

/// `true` when `b` is an integer and the identity residual is below 1e−3.
pub fn is_adjacency(b: f64, a: f64, omega: f64, tol: &Tolerances) -> Result<bool> {
    Ok(b == b.round() && verify_point(b, a, omega, tol)? < CERTIFY_THRESHOLD)
}

/// Grid step of the seed scan.
pub const SEED_SCAN_STEP: f64 = 0.05;

/// Scans `a` with step 0.05, refines each local minimum of the identity
/// residual below 0.5 by golden section, and returns the smallest certified
/// seed, polished as far as the residual keeps dropping.
pub fn find_seed(b: f64, omega: f64, a_range: (f64, f64), tol: &Tolerances) -> Result<AdjacencySeed> {
    let (lo, hi) = a_range;
    if !(lo >= 0.0 && hi > lo && hi.is_finite()) {
        return Err(Error::InvalidInput(format!("a range must satisfy 0 ≤ lo < hi, got ({lo}, {hi})")));
    }
    JosephsonParams::new(b, hi, omega)?;
    let n = ((hi - lo) / SEED_SCAN_STEP).floor() as usize;
    let grid: Vec<f64> = (0..=n)
        .map(|i| lo + i as f64 * SEED_SCAN_STEP)
        .filter(|&a| a > 0.0 && a <= hi)
        .collect();
    let res: Vec<f64> = grid
        .par_iter()
        .map(|&a| verify_point(b, a, omega, tol).unwrap_or(f64::INFINITY))
        .collect();
    for i in 1..grid.len().saturating_sub(1) {
        if !(res[i] <= res[i - 1] && res[i] <= res[i + 1] && res[i] < 0.5) {
            continue;
        }
        let f = |a: f64| verify_point(b, a, omega, tol);
        let (a, r) = golden_min(f, grid[i - 1], grid[i + 1], 1e-13)?;
        if r < CERTIFY_THRESHOLD {
            return Ok(AdjacencySeed {
                b,
                a0: a,
                omega0: omega,
                residual: r,
            });
        }
    }
    Err(Error::NoAdjacency(lo, hi))
}

/// The first `k_max` zeros `a*_k` of `u` with `y0` from the seed, paired with
/// `ω*_k` from the derivative ratio (the `s^b` factor of `u` included).
/// Zeros where `u'` nearly vanishes are skipped.
pub fn chain_points(seed: &AdjacencySeed, k_max: usize) -> Result<Vec<(usize, f64, f64)>> {
    if k_max == 0 {
        return Ok(Vec::new());
    }
    let y0 = seed_y0(seed.b, seed.a0)?;
    let combo = BesselCombo::new(seed.b, y0)?;
    let s_max = seed.a0.max(1.0) + PI * (k_max as f64 + 4.0);
    let zeros = find_zeros(&combo, (1e-3, s_max), k_max)?;
    let (_, up0) = u_eval(&combo, seed.a0)?;
    let mut out = Vec::with_capacity(k_max);
    for (i, &a) in zeros.zeros.iter().enumerate() {
        let (_, up) = u_eval(&combo, a)?;
        if up.abs() < 1e-12 {
            continue;
        }
        // The seed is a fixed point of the formula.
        let omega = if (a - seed.a0).abs() < 1e-9 * seed.a0 {
            seed.omega0
        } else {
            omega_star_formula(seed.omega0, seed.a0, up0, a, up)
        };
        out.push((i + 1, a, omega));
    }
    Ok(out)
}

/// [`chain_points`] with the monodromy residual recorded at each point.
pub fn chain(seed: &AdjacencySeed, k_max: usize, tol: &Tolerances) -> Result<Vec<ChainPoint>> {
    let pts = chain_points(seed, k_max)?;
    Ok(pts
        .par_iter()
        .map(|&(k, a_star, omega_star)| ChainPoint {
            k,
            a_star,
            omega_star,
            verify_residual: verify_point(seed.b, a_star, omega_star, tol).unwrap_or(f64::NAN),
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryChainPoint {
    pub point: ChainPoint,
    pub trace: C64,
    pub det: C64,
    pub eig_discriminant: C64,
}

/// The chain construction for any real `b`, recording the conjugation
/// invariants of the monodromy at every point.
pub fn boundary_chain(b: f64, a0: f64, omega0: f64, k_max: usize, tol: &Tolerances) -> Result<Vec<BoundaryChainPoint>> {
    let seed = AdjacencySeed {
        b,
        a0,
        omega0,
        residual: f64::NAN,
    };
    let pts = chain_points(&seed, k_max)?;
    pts.par_iter()
        .map(|&(k, a_star, omega_star)| {
            let m = monodromy_loop(&JosephsonParams::new(b, a_star, omega_star)?, DEFAULT_RADIUS, tol)?;
            Ok(BoundaryChainPoint {
                point: ChainPoint {
                    k,
                    a_star,
                    omega_star,
                    verify_residual: m.identity_residual,
                },
                trace: m.matrix.trace(),
                det: m.matrix.det(),
                eig_discriminant: m.eig_discriminant,
            })
        })
        .collect()
}
