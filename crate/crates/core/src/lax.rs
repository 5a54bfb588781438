//! The isomonodromic family
//!
//! ```text
//! ∂Y/∂z = (−(t/z²)·A(t) + B(t)/z + diag(−1/2, 0)) Y
//! ∂Y/∂t = (1/z)·A(t) Y
//! ```
//!
//! with `A = G·diag(1/2, 0)·G⁻¹`, `G = [[1, h], [g, 1 + gh]]` (gauge `g₁ ≡ 1`)
//! and `B = [[−b, b₂], [b₃, 0]]`, built from a Bessel solution
//! `y(t) = √t·w(√t)`. Compatibility of the two equations is
//! `t·A' = [B, A]` and `B' = [A, diag(−1/2, 0)]`.
//!
//! With `s = √t` and `u` the Bessel combination, the relations
//! `b₂' = −h/4`, `h = 2b₂/y` and `g = C̃₁·u(s)` integrate in closed form:
//!
//! ```text
//! b₂ = K·s^{1−2b}·u'(s),   h = 2K·s^{−2b}·u(s),
//! b₃ = b₂g/h − b·g + b₂g² = C̃₁·s·u'(s)/2 − b·C̃₁·u + b₂·C̃₁²·u²,
//! ```
//!
//! where `K` is fixed by `b₂(t_ref) = b₂⁰`. These are smooth for all `t > 0`,
//! including the poles of `y`, so no continuation is needed.

use crate::error::{Error, Result};
use crate::linalg::{Mat2, C64};
use crate::monodromy::DEFAULT_RADIUS;
use crate::odeint::{integrate_matrix_along_path, ComplexPath, Tolerances};
use crate::specfun::{u_eval, BesselCombo};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IsoFamily {
    pub b: f64,
    pub combo: BesselCombo,
    /// `b₂(t_ref)`.
    pub b2_0: f64,
    /// Constant in `g₃/g₁ = C̃₁·u(√t)`.
    pub c1_tilde: f64,
    pub t_ref: f64,
    k: f64,
    b2_constant: Option<f64>,
}

/// `D = diag(−1/2, 0)`.
fn d_matrix() -> Mat2 {
    Mat2::real(-0.5, 0.0, 0.0, 0.0)
}

impl IsoFamily {
    /// Family with `b = combo.order_b`.
    ///
    /// `c1_tilde = 0` is accepted: it gives the reducible branch `g ≡ 0`,
    /// `b₃ ≡ 0`.
    pub fn new(combo: BesselCombo, b2_0: f64, c1_tilde: f64, t_ref: f64) -> Result<Self> {
        if !(t_ref > 0.0 && t_ref.is_finite()) {
            return Err(Error::InvalidInput(format!("t_ref must be positive, got {t_ref}")));
        }
        if !(b2_0 != 0.0 && b2_0.is_finite() && c1_tilde.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "b2_0 must be finite and non-zero and C1 finite, got ({b2_0}, {c1_tilde})"
            )));
        }
        let s = t_ref.sqrt();
        let (u, up) = u_eval(&combo, s)?;
        if u == 0.0 || up.abs() < 1e-14 * (1.0 + u.abs()) {
            return Err(Error::InvalidInput(format!(
                "t_ref = {t_ref} is a zero or pole of y; choose another base point"
            )));
        }
        let k = b2_0 / (s.powf(1.0 - 2.0 * combo.order_b) * up);
        Ok(IsoFamily {
            b: combo.order_b,
            combo,
            b2_0,
            c1_tilde,
            t_ref,
            k,
            b2_constant: None,
        })
    }

    /// `b₂⁰ = C̃₁ = 1`, `t_ref = 1/4`.
    pub fn with_defaults(combo: BesselCombo) -> Result<Self> {
        Self::new(combo, 1.0, 1.0, 0.25)
    }

    /// The same family with `b₂` frozen at `value` and `h`, `b₃` rebuilt from it.
    /// It violates `b₂' = −h/4` and serves as a negative control.
    pub fn with_constant_b2(mut self, value: f64) -> Self {
        self.b2_constant = Some(value);
        self
    }

    /// Scale `K` in `b₂ = K·s^{1−2b}·u'(s)`.
    pub fn scale(&self) -> f64 {
        self.k
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FamilyCoeffs {
    pub a: Mat2,
    pub b: Mat2,
    pub h: f64,
    pub b2: f64,
    pub b3: f64,
    pub g3_over_g1: f64,
}

/// `A(t)`, `B(t)` and the scalar functions behind them.
pub fn family_at(fam: &IsoFamily, t: f64) -> Result<FamilyCoeffs> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::Domain(format!("t must be positive, got {t}")));
    }
    let s = t.sqrt();
    let (u, up) = u_eval(&fam.combo, s)?;
    let g = fam.c1_tilde * u;
    let (b2, h, b3) = match fam.b2_constant {
        None => {
            let b2 = fam.k * s.powf(1.0 - 2.0 * fam.b) * up;
            let h = 2.0 * fam.k * s.powf(-2.0 * fam.b) * u;
            let b3 = fam.c1_tilde * s * up / 2.0 - fam.b * g + b2 * g * g;
            (b2, h, b3)
        }
        Some(b2) => {
            // h = 2b₂/y with y = s·u'/u
            let h = 2.0 * b2 * u / (s * up);
            let b3 = b2 * g / h - fam.b * g + b2 * g * g;
            (b2, h, b3)
        }
    };
    let gh = g * h;
    let a = Mat2::real(0.5 * (1.0 + gh), -0.5 * h, 0.5 * g * (1.0 + gh), -0.5 * gh);
    let bm = Mat2::real(-fam.b, b2, b3, 0.0);
    Ok(FamilyCoeffs {
        a,
        b: bm,
        h,
        b2,
        b3,
        g3_over_g1: g,
    })
}

/// `z ↦ −(t/z²)A(t) + B(t)/z + diag(−1/2, 0)`.
pub fn z_equation(fam: &IsoFamily, t: f64) -> Result<impl Fn(C64) -> Mat2> {
    let c = family_at(fam, t)?;
    Ok(move |z: C64| {
        let zi = z.inv();
        c.a.scale(-t * zi * zi) + c.b.scale(zi) + d_matrix()
    })
}

/// `z ↦ A(t)/z`.
pub fn t_equation(fam: &IsoFamily, t: f64) -> Result<impl Fn(C64) -> Mat2> {
    let c = family_at(fam, t)?;
    Ok(move |z: C64| c.a.scale(z.inv()))
}

/// Max over the grid of `‖∂_t M_z − ∂_z M_t + [M_z, M_t]‖` (max-entry norm),
/// with both partials from fourth-order centered differences of relative
/// step 1e−5.
pub fn zero_curvature_residual(fam: &IsoFamily, z_samples: &[C64], t_samples: &[f64]) -> Result<f64> {
    let mut worst = 0.0_f64;
    for &t in t_samples {
        let ht = 1e-5 * t.abs().max(1e-3);
        let mz = |tt: f64, z: C64| -> Result<Mat2> { Ok(z_equation(fam, tt)?(z)) };
        let mt = t_equation(fam, t)?;
        for &z in z_samples {
            if z.norm() < 1e-8 {
                return Err(Error::SampleTooClose(format!("z = {z}")));
            }
            let dt = (mz(t - 2.0 * ht, z)? - mz(t + 2.0 * ht, z)? + (mz(t + ht, z)? - mz(t - ht, z)?).scale(C64::from(8.0)))
                .scale(C64::from(1.0 / (12.0 * ht)));
            let hz = C64::from(1e-5 * z.norm());
            let dz = (mt(z - 2.0 * hz) - mt(z + 2.0 * hz) + (mt(z + hz) - mt(z - hz)).scale(C64::from(8.0)))
                .scale((12.0 * hz).inv());
            let m1 = mz(t, z)?;
            let m2 = mt(z);
            let r = dt - dz + m1.commutator(&m2);
            worst = worst.max(r.max_abs());
        }
    }
    Ok(worst)
}

/// Monodromy of the z-equation once around `|z| = √t·radius`.
pub fn z_monodromy(fam: &IsoFamily, t: f64, radius: f64, tol: &Tolerances) -> Result<Mat2> {
    let coeff = z_equation(fam, t)?;
    integrate_matrix_along_path(
        coeff,
        Mat2::IDENTITY,
        &ComplexPath::circle(t.sqrt() * radius),
        &[C64::from(0.0)],
        tol,
    )
}

/// Max over `t_list` of `|tr M(t) − tr M(t₁)|`.
pub fn isomonodromy_drift(fam: &IsoFamily, t_list: &[f64], radius: f64, tol: &Tolerances) -> Result<f64> {
    let Some(&t1) = t_list.first() else {
        return Ok(0.0);
    };
    let tr1 = z_monodromy(fam, t1, radius, tol)?.trace();
    let mut worst = 0.0_f64;
    for &t in &t_list[1..] {
        worst = worst.max((z_monodromy(fam, t, radius, tol)?.trace() - tr1).norm());
    }
    Ok(worst)
}

/// Default loop radius for [`isomonodromy_drift`], in units of `√t`.
pub const DRIFT_RADIUS: f64 = DEFAULT_RADIUS;

/// The family at a pole `t*` of `y`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PoleSpecialization {
    pub t_star: f64,
    pub b: f64,
    /// `A(t*)`, which is `diag(1/2, 0)`.
    pub a: Mat2,
    pub b2_star: f64,
    pub b3_star: f64,
}

impl PoleSpecialization {
    /// `z ↦ [[−t*/(2z²) − b/z − 1/2, b₂*/z], [b₃*/z, 0]]`.
    pub fn system(&self) -> impl Fn(C64) -> Mat2 {
        let (t, b, b2, b3) = (self.t_star, self.b, self.b2_star, self.b3_star);
        move |z| {
            let zi = z.inv();
            Mat2::new(-t / 2.0 * zi * zi - b * zi - 0.5, b2 * zi, b3 * zi, C64::from(0.0))
        }
    }

    /// The same system in `ζ = z/a*`, `a* = √t*`.
    pub fn rescaled_system(&self) -> impl Fn(C64) -> Mat2 {
        let a = self.t_star.sqrt();
        let sys = self.system();
        move |zeta| sys(zeta * a).scale(C64::from(a))
    }
}

/// Evaluates the family at a pole of `y`, where `h = 0` and `g = 0`.
pub fn specialize_at_pole(fam: &IsoFamily, t_star: f64) -> Result<PoleSpecialization> {
    if !(t_star > 0.0) {
        return Err(Error::Domain(format!("t* must be positive, got {t_star}")));
    }
    let s = t_star.sqrt();
    let (z, zp) = fam.combo.reduced(s)?;
    if zp.abs() < 1e-10 {
        return Err(Error::DoubleZero(t_star));
    }
    if z.abs() > 1e-8 * (1.0 + zp.abs()) {
        return Err(Error::InvalidInput(format!("√t* = {s} is not a zero of u (|Z| = {z:e})")));
    }
    let c = family_at(fam, t_star)?;
    let (_, up) = u_eval(&fam.combo, s)?;
    // At a zero of u the b₃ formula reduces to C̃₁·t·du/dt = C̃₁·s·u'(s)/2.
    let b3_star = fam.c1_tilde * s * up / 2.0;
    Ok(PoleSpecialization {
        t_star,
        b: fam.b,
        a: Mat2::real(0.5, 0.0, 0.0, 0.0),
        b2_star: c.b2,
        b3_star,
    })
}
