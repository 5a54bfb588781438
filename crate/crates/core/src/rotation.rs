//! Rotation number of `dφ/dτ = (−sin φ + B + A cos τ)/ω`, tongue maps and
//! tongue boundaries.
//!
//! The substitution `Φ = e^{iφ}` turns the phase equation into a Riccati
//! equation whose linearization is
//! `dx/dτ = [[−i(b + a cos τ), 1/(2ω)], [1/(2ω), 0]] x`, with `Φ = x₂/x₁`.
//! One period of that linear system therefore gives the time-2π map of the
//! phase as an exact Möbius transformation of the circle. [`PeriodMap`] uses
//! it to iterate the Poincaré map without further integration.

use crate::error::{Error, Result};
use crate::linalg::{Mat2, C64};
use crate::odeint::{integrate_matrix_along_path, integrate_real, ComplexPath, Tolerances};
use crate::roots::{bracketed_root, linspace};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, TAU};

/// Smallest accepted `ω`.
pub const MIN_OMEGA: f64 = 1e-3;

/// The reduced parameters `b = B/ω`, `a = A/ω` and the frequency `ω`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JosephsonParams {
    pub b: f64,
    pub a: f64,
    pub omega: f64,
}

impl JosephsonParams {
    pub fn new(b: f64, a: f64, omega: f64) -> Result<Self> {
        if !(b.is_finite() && a.is_finite() && omega.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "parameters must be finite, got (b, a, omega) = ({b}, {a}, {omega})"
            )));
        }
        if omega < MIN_OMEGA {
            return Err(Error::InvalidInput(format!(
                "omega must be at least {MIN_OMEGA}, got {omega}"
            )));
        }
        Ok(JosephsonParams { b, a, omega })
    }

    /// `B = bω`.
    pub fn big_b(&self) -> f64 {
        self.b * self.omega
    }

    /// `A = aω`.
    pub fn big_a(&self) -> f64 {
        self.a * self.omega
    }

    pub fn with_b(&self, b: f64) -> Self {
        JosephsonParams { b, ..*self }
    }
}

/// `(τ, φ) ↦ dφ/dτ`.
pub fn phase_rhs(params: &JosephsonParams) -> impl Fn(f64, f64) -> f64 {
    let (bb, aa, w) = (params.big_b(), params.big_a(), params.omega);
    move |tau, phi| (-phi.sin() + bb + aa * tau.cos()) / w
}

/// `φ(2π)` for `φ(0) = phi0`, on the universal cover, by direct integration.
pub fn poincare_lift(params: &JosephsonParams, phi0: f64, tol: &Tolerances) -> Result<f64> {
    let rhs = phase_rhs(params);
    let r = integrate_real(|t, y, dy| dy[0] = rhs(t, y[0]), &[phi0], (0.0, TAU), tol)?;
    Ok(r.state[0])
}

/// Coefficient of the linear system in the angular time `τ`.
fn period_coeff(params: &JosephsonParams) -> impl Fn(C64) -> Mat2 {
    let (b, a) = (params.b, params.a);
    let off = C64::from(0.5 / params.omega);
    move |z| {
        let tau = z.re;
        Mat2::new(C64::new(0.0, -(b + a * tau.cos())), off, off, C64::from(0.0))
    }
}

/// The time-2π map of the phase as a lifted Möbius map
/// `P(x) = x + c − 2·Arg(1 + q e^{ix})`, `|q| < 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PeriodMap {
    pub params: JosephsonParams,
    /// Period matrix of the linear system.
    pub matrix: Mat2,
    q: C64,
    c: f64,
}

impl PeriodMap {
    pub fn new(params: &JosephsonParams, tol: &Tolerances) -> Result<Self> {
        let path = ComplexPath::segment(C64::from(0.0), C64::from(TAU));
        let n = integrate_matrix_along_path(period_coeff(params), Mat2::IDENTITY, &path, &[], tol)?;
        let (alpha, beta) = (n.get(0, 0), n.get(0, 1));
        let q = beta / alpha;
        if !(q.norm() < 1.0) {
            return Err(Error::NoConvergence("period map lost its circle structure"));
        }
        // The Möbius image fixes c modulo 2π; one integrated orbit picks the branch.
        let image = (n.get(1, 0) + n.get(1, 1)) / (alpha + beta);
        let c_mod = image.arg() + 2.0 * (C64::from(1.0) + q).arg();
        let anchor = poincare_lift(params, 0.0, tol)? + 2.0 * (C64::from(1.0) + q).arg();
        let c = c_mod + TAU * ((anchor - c_mod) / TAU).round();
        Ok(PeriodMap {
            params: *params,
            matrix: n,
            q,
            c,
        })
    }

    /// Lifted Poincaré map.
    pub fn apply(&self, x: f64) -> f64 {
        x + self.c - 2.0 * (C64::from(1.0) + self.q * C64::from_polar(1.0, x)).arg()
    }

    /// `P'(x)`; positive everywhere.
    pub fn derivative(&self, x: f64) -> f64 {
        let z = self.q * C64::from_polar(1.0, x);
        1.0 - 2.0 * (z / (C64::from(1.0) + z)).re
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RotationEstimate {
    /// Mean of `dφ/dτ`; plateaus sit at integers.
    pub rho: f64,
    pub periods_used: usize,
    pub error_estimate: f64,
    pub converged: bool,
}

impl RotationEstimate {
    pub(crate) fn failed() -> Self {
        RotationEstimate {
            rho: f64::NAN,
            periods_used: 0,
            error_estimate: f64::INFINITY,
            converged: false,
        }
    }
}

/// Default orbit length for [`rotation_number`].
pub const DEFAULT_MAX_PERIODS: usize = 1 << 14;

fn bump(t: f64) -> f64 {
    if t <= 0.0 || t >= 1.0 {
        0.0
    } else {
        (-1.0 / (t * (1.0 - t))).exp()
    }
}

fn weighted_mean(d: &[f64]) -> f64 {
    let n = d.len() as f64;
    let (mut num, mut den) = (0.0, 0.0);
    for (k, v) in d.iter().enumerate() {
        let w = bump((k as f64 + 0.5) / n);
        num += w * v;
        den += w;
    }
    num / den
}

/// Rotation number from the orbit of `φ = 0`.
pub fn rotation_number(params: &JosephsonParams, max_periods: usize, tol: &Tolerances) -> Result<RotationEstimate> {
    rotation_number_from(params, 0.0, max_periods, tol)
}

/// Rotation number `lim (φ(2πk) − φ(0))/(2πk)`.
///
/// The orbit of the exact period map is averaged with the smooth weight
/// `exp(−1/(t(1−t)))`, which converges far faster than the plain mean. The
/// orbit length doubles from 8 up to `max_periods`; the error estimate is the
/// gap between the last two averages plus a floor set by the integration
/// tolerance.
pub fn rotation_number_from(
    params: &JosephsonParams,
    phi0: f64,
    max_periods: usize,
    tol: &Tolerances,
) -> Result<RotationEstimate> {
    if max_periods < 8 {
        return Err(Error::InvalidInput(format!(
            "max_periods must be at least 8, got {max_periods}"
        )));
    }
    let map = PeriodMap::new(params, tol)?;
    let floor = 10.0 * tol.abs_tol.max(tol.rel_tol);
    let mut disp = Vec::with_capacity(max_periods);
    let mut x = phi0.rem_euclid(TAU);
    let mut n = 8;
    let mut prev = f64::NAN;
    let est;
    loop {
        while disp.len() < n {
            let y = map.apply(x);
            disp.push(y - x);
            x = y.rem_euclid(TAU);
        }
        let rho = weighted_mean(&disp) / TAU;
        let gap = (rho - prev).abs();
        let e = RotationEstimate {
            rho,
            periods_used: n,
            error_estimate: if gap.is_nan() { f64::INFINITY } else { gap + floor },
            converged: gap < 1e-8,
        };
        if n >= 64 && gap < 1e-14 || n * 2 > max_periods {
            est = e;
            break;
        }
        prev = rho;
        n *= 2;
    }
    Ok(est)
}

/// Closed form on the `a = 0` axis.
pub fn rho_axis_analytic(b: f64, omega: f64) -> f64 {
    let bb = b * omega;
    if bb.abs() <= 1.0 {
        0.0
    } else {
        bb.signum() * (bb * bb - 1.0).sqrt() / omega
    }
}

/// `true` when the rotation number is within 1e−4 of an integer and stays
/// there under `b ± 1e−3`.
pub fn in_tongue(params: &JosephsonParams, tol: &Tolerances) -> Result<bool> {
    let locked = |p: &JosephsonParams| -> Result<Option<i64>> {
        let r = rotation_number(p, DEFAULT_MAX_PERIODS, tol)?.rho;
        let n = r.round();
        Ok(((r - n).abs() < 1e-4).then_some(n as i64))
    };
    let mid = locked(params)?;
    Ok(mid.is_some()
        && locked(&params.with_b(params.b - 1e-3))? == mid
        && locked(&params.with_b(params.b + 1e-3))? == mid)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TongueGrid {
    pub b_axis: Vec<f64>,
    pub a_axis: Vec<f64>,
    /// `rho_values[i][j]` belongs to `(b_axis[j], a_axis[i])`.
    pub rho_values: Vec<Vec<RotationEstimate>>,
    pub omega: f64,
}

/// Rotation numbers on a `resolution.0 × resolution.1` grid over
/// `b_range × a_range`, computed in parallel. Cells that fail carry NaN with
/// an infinite error estimate.
pub fn scan_grid(
    b_range: (f64, f64),
    a_range: (f64, f64),
    resolution: (usize, usize),
    omega: f64,
    tol: &Tolerances,
) -> Result<TongueGrid> {
    let (nb, na) = resolution;
    if nb < 2 || na < 2 {
        return Err(Error::InvalidInput(format!(
            "grid resolution must be at least 2 per axis, got {nb}×{na}"
        )));
    }
    if !(b_range.0 <= b_range.1 && a_range.0 <= a_range.1) {
        return Err(Error::InvalidInput("grid ranges must be increasing".into()));
    }
    JosephsonParams::new(b_range.0, a_range.0, omega)?;
    JosephsonParams::new(b_range.1, a_range.1, omega)?;
    let b_axis = linspace(b_range.0, b_range.1, nb);
    let a_axis = linspace(a_range.0, a_range.1, na);
    let cells: Vec<RotationEstimate> = (0..na * nb)
        .into_par_iter()
        .map(|idx| {
            let p = JosephsonParams {
                b: b_axis[idx % nb],
                a: a_axis[idx / nb],
                omega,
            };
            rotation_number(&p, DEFAULT_MAX_PERIODS, tol).unwrap_or_else(|_| RotationEstimate::failed())
        })
        .collect();
    let rho_values = cells.chunks(nb).map(|row| row.to_vec()).collect();
    Ok(TongueGrid {
        b_axis,
        a_axis,
        rho_values,
        omega,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Plus,
    Minus,
}

impl std::str::FromStr for Side {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "plus" | "+" => Ok(Side::Plus),
            "minus" | "-" => Ok(Side::Minus),
            other => Err(Error::InvalidInput(format!("side must be plus or minus, got {other}"))),
        }
    }
}

impl std::fmt::Display for Side {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Side::Plus => "plus",
            Side::Minus => "minus",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryCurve {
    pub r: u32,
    pub side: Side,
    /// `(a, b)` pairs, `a` increasing.
    pub samples: Vec<(f64, f64)>,
    /// Requested `a` values for which no boundary point was found.
    pub missing: Vec<f64>,
}

/// The phase at which the given boundary curve is characterized.
///
/// Reversing time and reflecting `φ ↦ π − φ` conjugates the period map to its
/// inverse, so on a tongue boundary the parabolic periodic orbit sits at
/// `φ = ±π/2`. Each sign traces one analytic curve; `Minus` is the curve with
/// asymptotics `r + J_r(a)/ω`, `Plus` the one with `r − J_r(a)/ω`.
pub fn boundary_phase(r: u32, side: Side) -> f64 {
    let s = if r.is_multiple_of(2) { 1.0 } else { -1.0 };
    match side {
        Side::Minus => s * FRAC_PI_2,
        Side::Plus => -s * FRAC_PI_2,
    }
}

/// Solves `P(φ*) = φ* + 2πr` for `b` at fixed `a`.
pub fn boundary_point(r: u32, side: Side, a: f64, omega: f64, tol: &Tolerances) -> Result<f64> {
    let phi = boundary_phase(r, side);
    let p = JosephsonParams::new(r as f64, a, omega)?;
    // |φ' − b − a cos τ| ≤ 1/ω brackets the root.
    let half = 1.0 / omega + 1e-6;
    let f = |b: f64| -> Result<f64> { Ok(poincare_lift(&p.with_b(b), phi, tol)? - phi - TAU * r as f64) };
    bracketed_root(f, r as f64 - half, r as f64 + half, 1e-11)
}

/// One boundary curve of the tongue `ρ = r`, sampled at `a_samples`.
pub fn trace_boundary(
    r: u32,
    side: Side,
    a_samples: &[f64],
    omega: f64,
    tol: &Tolerances,
) -> Result<BoundaryCurve> {
    if a_samples.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidInput("a_samples must be strictly increasing".into()));
    }
    if a_samples.iter().any(|a| !(*a >= 0.0)) {
        return Err(Error::InvalidInput("a_samples must be non-negative".into()));
    }
    JosephsonParams::new(r as f64, 0.0, omega)?;
    let found: Vec<(f64, Option<f64>)> = a_samples
        .par_iter()
        .map(|&a| (a, boundary_point(r, side, a, omega, tol).ok()))
        .collect();
    let mut curve = BoundaryCurve {
        r,
        side,
        samples: Vec::new(),
        missing: Vec::new(),
    };
    for (a, b) in found {
        match b {
            Some(b) => curve.samples.push((a, b)),
            None => curve.missing.push(a),
        }
    }
    Ok(curve)
}
