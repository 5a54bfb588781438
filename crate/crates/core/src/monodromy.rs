//! Monodromy of the linear system
//!
//! ```text
//! dx/dζ = [[−a/(2ζ²) − b/ζ − a/2, 1/(2iωζ)], [1/(2iωζ), 0]] x
//! ```
//!
//! around its irregular singular point `ζ = 0`, the residuals used to detect
//! trivial monodromy (adjacency points) and multiple eigenvalues (tongue
//! boundaries), and a check of the second-order equation satisfied by the
//! second component.
//!
//! On the unit circle `ζ = e^{iθ}` the system reads
//! `dx/dθ = [[−i(b + a cos θ), 1/(2ω)], [1/(2ω), 0]] x`, which stays bounded
//! for every `a`. Shrinking or growing the loop multiplies the diagonal by
//! `exp((a/2)(1/r − r) cos θ)`, so radius 1 is the best conditioned choice
//! and is the default.

use crate::error::{Error, Result};
use crate::linalg::{Mat2, C64, I};
use crate::odeint::{integrate_matrix_along_path, ComplexPath, Tolerances};
use crate::roots::golden_min;
use crate::rotation::JosephsonParams;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Largest accepted `|a|/(2·radius)`.
pub const DYNAMIC_RANGE_GUARD: f64 = 400.0;

/// Identity residual below which a point counts as trivial monodromy.
pub const CERTIFY_THRESHOLD: f64 = 1e-3;

/// Identity residual targeted when polishing.
pub const REFINE_THRESHOLD: f64 = 1e-6;

pub const DEFAULT_RADIUS: f64 = 1.0;

/// The coefficient matrix as a function of `ζ` (unchecked at `ζ = 0`).
pub fn system_coeff(params: &JosephsonParams) -> impl Fn(C64) -> Mat2 {
    let (a, b, w) = (params.a, params.b, params.omega);
    move |z| {
        let zi = z.inv();
        let off = zi / (2.0 * w * I);
        Mat2::new(-a / 2.0 * zi * zi - b * zi - a / 2.0, off, off, C64::from(0.0))
    }
}

/// The coefficient matrix at one point.
pub fn system_matrix(params: &JosephsonParams, zeta: C64) -> Result<Mat2> {
    if zeta.norm() == 0.0 {
        return Err(Error::SingularPoint);
    }
    Ok(system_coeff(params)(zeta))
}

/// Residue matrix `A₁` of the `a = 0` system, where it is of Euler type.
pub fn euler_residue(b: f64, omega: f64) -> Mat2 {
    let off = C64::from(1.0) / (2.0 * omega * I);
    Mat2::new(C64::from(-b), off, off, C64::from(0.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonodromyResult {
    pub matrix: Mat2,
    /// Max-entry distance to the identity. Frame dependent unless the
    /// monodromy is trivial.
    pub identity_residual: f64,
    /// `|det M − e^{−2πib}|`.
    pub det_residual: f64,
    /// `tr²M − 4 det M`.
    pub eig_discriminant: C64,
    pub loop_radius: f64,
    pub tol_used: Tolerances,
}

/// Transport of `Y₀ = I` once counterclockwise around `|ζ| = radius`,
/// starting at `ζ = radius`.
pub fn monodromy_loop(params: &JosephsonParams, radius: f64, tol: &Tolerances) -> Result<MonodromyResult> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::InvalidInput(format!("loop radius must be positive, got {radius}")));
    }
    let guard = params.a.abs() / (2.0 * radius);
    if guard > DYNAMIC_RANGE_GUARD {
        return Err(Error::RadiusTooSmall(guard));
    }
    let m = integrate_matrix_along_path(
        system_coeff(params),
        Mat2::IDENTITY,
        &ComplexPath::circle(radius),
        &[C64::from(0.0)],
        tol,
    )?;
    let det = m.det();
    let tr = m.trace();
    Ok(MonodromyResult {
        matrix: m,
        identity_residual: m.dist(&Mat2::IDENTITY),
        det_residual: (det - C64::from_polar(1.0, -2.0 * PI * params.b)).norm(),
        eig_discriminant: tr * tr - 4.0 * det,
        loop_radius: radius,
        tol_used: *tol,
    })
}

/// Identity residual of the loop matrix at the default radius.
pub fn triviality_residual(params: &JosephsonParams, tol: &Tolerances) -> Result<f64> {
    Ok(monodromy_loop(params, DEFAULT_RADIUS, tol)?.identity_residual)
}

/// `tr²M − 4 det M`, which vanishes exactly when the eigenvalues coincide.
pub fn eig_discriminant(params: &JosephsonParams, tol: &Tolerances) -> Result<C64> {
    Ok(monodromy_loop(params, DEFAULT_RADIUS, tol)?.eig_discriminant)
}

/// Data for checking `E(z) = e^{μz} x₂(κz)` against the second-order equation
///
/// ```text
/// E'' + (2a/z² + (b+1)/z − 2a) E' + ((1/(4ω²) − 4a²)/z² − 2a(b+1)/z) E = 0.
/// ```
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DcheParams {
    pub a: f64,
    pub b: f64,
    pub omega: f64,
    pub mu: f64,
    pub kappa: f64,
    /// `x(1)` of the solution of the linear system.
    pub initial: [C64; 2],
    /// Value of `a` in the scalar equation when it differs from the system's.
    pub equation_a: Option<f64>,
}

impl DcheParams {
    pub fn new(a: f64, b: f64, omega: f64, mu: f64, kappa: f64) -> Result<Self> {
        JosephsonParams::new(b, a, omega)?;
        if !(mu.is_finite() && kappa.is_finite() && kappa != 0.0) {
            return Err(Error::InvalidInput(format!(
                "mu must be finite and kappa finite and non-zero, got ({mu}, {kappa})"
            )));
        }
        Ok(DcheParams {
            a,
            b,
            omega,
            mu,
            kappa,
            initial: [C64::from(1.0), C64::from(1.0)],
            equation_a: None,
        })
    }
}

/// Smallest `|z|` (in either variable) accepted as a sample.
const MIN_SAMPLE_RADIUS: f64 = 1e-3;

/// Solution of the linear system at `w`, continued from `ζ = 1` along the
/// unit circle to `arg w` and then radially.
fn solve_at(params: &JosephsonParams, initial: [C64; 2], w: C64, tol: &Tolerances) -> Result<[C64; 2]> {
    let coeff = system_coeff(params);
    let theta = w.arg();
    let mut y = Mat2::new(initial[0], C64::from(0.0), initial[1], C64::from(0.0));
    if theta != 0.0 {
        let arc = ComplexPath::Circle {
            center: C64::from(0.0),
            radius: 1.0,
            start_angle: 0.0,
            turns: theta / (2.0 * PI),
        };
        y = integrate_matrix_along_path(&coeff, y, &arc, &[C64::from(0.0)], tol)?;
    }
    let start = C64::from_polar(1.0, theta);
    if (w - start).norm() > 0.0 {
        y = integrate_matrix_along_path(&coeff, y, &ComplexPath::segment(start, w), &[C64::from(0.0)], tol)?;
    }
    Ok([y.get(0, 0), y.get(1, 0)])
}

/// Max over the samples of the scalar equation's residual.
///
/// Derivatives of `x₂` come from the system itself rather than from finite
/// differences: `x₂' = x₁/(2iωζ)` and `x₁' = c₁₁x₁ + x₂/(2iωζ)`.
pub fn dche_residual(p: &DcheParams, sample_z: &[C64], tol: &Tolerances) -> Result<f64> {
    Ok(dche_samples(p, sample_z, tol)?.iter().fold(0.0, |m, (r, _)| m.max(*r)))
}

/// Residual and `|E| + |E'| + |E''|` at each sample.
fn dche_samples(p: &DcheParams, sample_z: &[C64], tol: &Tolerances) -> Result<Vec<(f64, f64)>> {
    let sys = JosephsonParams::new(p.b, p.a, p.omega)?;
    let ea = p.equation_a.unwrap_or(p.a);
    let (b, w) = (p.b, p.omega);
    let mut out = Vec::with_capacity(sample_z.len());
    for &z in sample_z {
        let zeta = z * p.kappa;
        if z.norm() < MIN_SAMPLE_RADIUS || zeta.norm() < MIN_SAMPLE_RADIUS {
            return Err(Error::SampleTooClose(format!("z = {z}")));
        }
        let [x1, x2] = solve_at(&sys, p.initial, zeta, tol)?;
        let zi = zeta.inv();
        let k = zi / (2.0 * w * I);
        let c11 = -p.a / 2.0 * zi * zi - b * zi - p.a / 2.0;
        let x1p = c11 * x1 + k * x2;
        let x2p = k * x1;
        let x2pp = k * x1p - k * zi * x1;
        let (mu, ka) = (p.mu, p.kappa);
        let ex = (mu * z).exp();
        let e0 = ex * x2;
        let e1 = ex * (mu * x2 + ka * x2p);
        let e2 = ex * (mu * mu * x2 + 2.0 * mu * ka * x2p + ka * ka * x2pp);
        let zi = z.inv();
        let r = e2 + (2.0 * ea * zi * zi + (b + 1.0) * zi - 2.0 * ea) * e1
            + ((1.0 / (4.0 * w * w) - 4.0 * ea * ea) * zi * zi - 2.0 * ea * (b + 1.0) * zi) * e0;
        out.push((r.norm(), e0.norm() + e1.norm() + e2.norm()));
    }
    Ok(out)
}

/// Result of [`calibrate_dche`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DcheCalibration {
    pub mu: f64,
    pub kappa: f64,
    /// Residual relative to `|E| + |E'| + |E''|`.
    pub residual: f64,
}

/// Candidate scalings `κ` tried by [`calibrate_dche`].
pub const KAPPA_CANDIDATES: [f64; 10] = [1.0, -1.0, 2.0, -2.0, 0.5, -0.5, 4.0, -4.0, 0.25, -0.25];

/// Grid search over `μ` and [`KAPPA_CANDIDATES`], refined by golden section
/// in `μ`, minimizing [`dche_residual`] relative to the size of `E`.
pub fn calibrate_dche(base: &DcheParams, sample_z: &[C64], tol: &Tolerances) -> Result<DcheCalibration> {
    let span = 4.0 * base.a.abs() + 2.0;
    let n = 81;
    let eval = |mu: f64, kappa: f64| -> Result<f64> {
        let samples = dche_samples(&DcheParams { mu, kappa, ..*base }, sample_z, tol)?;
        Ok(samples.iter().fold(0.0_f64, |m, (r, e)| m.max(r / e.max(f64::MIN_POSITIVE))))
    };
    let mut best = DcheCalibration {
        mu: f64::NAN,
        kappa: f64::NAN,
        residual: f64::INFINITY,
    };
    for &kappa in &KAPPA_CANDIDATES {
        let grid: Vec<f64> = (0..n).map(|i| -span + 2.0 * span * i as f64 / (n - 1) as f64).collect();
        let vals: Vec<f64> = grid.iter().map(|&m| eval(m, kappa)).collect::<Result<_>>()?;
        let i = (0..n)
            .min_by(|&i, &j| vals[i].total_cmp(&vals[j]))
            .unwrap_or(0);
        let lo = grid[i.saturating_sub(1)];
        let hi = grid[(i + 1).min(n - 1)];
        let (mu, r) = golden_min(|m| eval(m, kappa), lo, hi, 1e-10)?;
        if r < best.residual {
            best = DcheCalibration { mu, kappa, residual: r };
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn coefficient_examples() {
        let p = JosephsonParams::new(0.0, 0.0, 1.0).unwrap();
        let m = system_matrix(&p, C64::from(1.0)).unwrap();
        let half_over_i = C64::new(0.0, -0.5);
        assert!(m.dist(&Mat2::new(C64::from(0.0), half_over_i, half_over_i, C64::from(0.0))) < 1e-15);
        let p = JosephsonParams::new(1.0, 2.0, 1.0).unwrap();
        let m = system_matrix(&p, C64::from(1.0)).unwrap();
        assert!(m.dist(&Mat2::new(C64::from(-3.0), half_over_i, half_over_i, C64::from(0.0))) < 1e-15);
        assert!(matches!(system_matrix(&p, C64::from(0.0)), Err(Error::SingularPoint)));
    }

    #[test]
    fn euler_limit() {
        let p = JosephsonParams::new(0.0, 0.0, 10.0).unwrap();
        let m = monodromy_loop(&p, 1.0, &tol()).unwrap();
        let exact = euler_residue(0.0, 10.0).scale(C64::new(0.0, 2.0 * PI)).expm();
        assert!(m.matrix.dist(&exact) < 1e-8);
    }

    #[test]
    fn radius_guard() {
        let p = JosephsonParams::new(1.0, 100.0, 1.0).unwrap();
        assert!(matches!(monodromy_loop(&p, 0.1, &tol()), Err(Error::RadiusTooSmall(_))));
        assert!(monodromy_loop(&p, 0.0, &tol()).is_err());
    }

    #[test]
    fn half_integer_b_obstructs_identity() {
        let p = JosephsonParams::new(0.5, 3.0, 1.0).unwrap();
        let r = monodromy_loop(&p, 1.0, &tol()).unwrap();
        assert!((r.matrix.det() + 1.0).norm() < 1e-8);
        // det M = −1 keeps M at least (√5 − 1)/2 away from I in the max-entry norm.
        assert!(r.identity_residual > 0.6);
    }

    #[test]
    fn zero_solution_has_zero_residual() {
        let mut p = DcheParams::new(1.0, 0.5, 1.0, 0.3, 1.0).unwrap();
        p.initial = [C64::from(0.0), C64::from(0.0)];
        let r = dche_residual(&p, &[C64::new(0.7, 0.2), C64::new(-1.3, 0.5)], &tol()).unwrap();
        assert_eq!(r, 0.0);
    }

    #[test]
    fn sample_near_zero_rejected() {
        let p = DcheParams::new(1.0, 0.5, 1.0, 0.3, 1.0).unwrap();
        assert!(matches!(
            dche_residual(&p, &[C64::new(1e-4, 0.0)], &tol()),
            Err(Error::SampleTooClose(_))
        ));
    }
}
