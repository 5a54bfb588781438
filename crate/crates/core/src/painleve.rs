//! Painlevé 3, its Bessel (Riccati) solutions and their poles.
//!
//! ```text
//! w'' = (w')²/w − w'/τ + (αw² + β)/τ + γw³ + δ/w
//! ```
//!
//! For `(α, β, γ, δ) = (−2b, 2b − 2, 1, −1)` every solution of the Riccati
//! equation `w' = −w² − (1 − 2b)w/τ − 1` solves Painlevé 3. Linearizing with
//! `w = u'/u` gives `u'' + (1 − 2b)u'/τ + u = 0`, solved by
//! `u(τ) = τ^b (J_b(τ) + y0·Y_b(τ))`. The poles of `w` are the zeros of `u`,
//! all simple with residue `+1`.

use crate::error::{Error, Result};
use crate::odeint::{integrate_observed, Flow, Tolerances};
use crate::specfun::{find_zeros, BesselCombo, ZeroList};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct P3Params {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
}

impl P3Params {
    pub fn new(alpha: f64, beta: f64, gamma: f64, delta: f64) -> Result<Self> {
        if ![alpha, beta, gamma, delta].iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidInput("Painlevé parameters must be finite".into()));
        }
        Ok(P3Params {
            alpha,
            beta,
            gamma,
            delta,
        })
    }

    /// Right-hand side `w''` at `(τ, w, w')`.
    pub fn rhs(&self, tau: f64, w: f64, wp: f64) -> f64 {
        wp * wp / w - wp / tau + (self.alpha * w * w + self.beta) / tau + self.gamma * w * w * w + self.delta / w
    }
}

/// Parameters attached to the Bessel family of order `b`.
pub fn params_from_b(b: f64) -> P3Params {
    P3Params {
        alpha: -2.0 * b,
        beta: 2.0 * b - 2.0,
        gamma: 1.0,
        delta: -1.0,
    }
}

/// `(w, w', w'')` at one point.
pub type Jet = (f64, f64, f64);

/// Second-order jet of `f` at `x` from the five-point stencils with step `h`.
pub fn fd_jet<F>(f: F, x: f64, h: f64) -> Result<Jet>
where
    F: Fn(f64) -> Result<f64>,
{
    let (m2, m1, c, p1, p2) = (f(x - 2.0 * h)?, f(x - h)?, f(x)?, f(x + h)?, f(x + 2.0 * h)?);
    let d1 = (m2 - 8.0 * m1 + 8.0 * p1 - p2) / (12.0 * h);
    let d2 = (-m2 + 16.0 * m1 - 30.0 * c + 16.0 * p1 - p2) / (12.0 * h * h);
    Ok((c, d1, d2))
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct P3Residual {
    /// Max over accepted samples of `|w'' − RHS|`.
    pub max_residual: f64,
    pub worst_tau: f64,
    /// Samples skipped because `w` could not be evaluated there or vanishes.
    pub excluded: Vec<f64>,
}

/// Residual of Painlevé 3 for a function given through its 2-jet.
pub fn p3_residual<F>(jet: F, params: &P3Params, tau_samples: &[f64]) -> P3Residual
where
    F: Fn(f64) -> Result<Jet>,
{
    let mut out = P3Residual::default();
    for &tau in tau_samples {
        if tau == 0.0 || !tau.is_finite() {
            out.excluded.push(tau);
            continue;
        }
        match jet(tau) {
            Ok((w, wp, wpp)) if w.abs() > 1e-12 && w.is_finite() => {
                let r = (wpp - params.rhs(tau, w, wp)).abs();
                if !(r <= out.max_residual) {
                    out.max_residual = r;
                    out.worst_tau = tau;
                }
            }
            _ => out.excluded.push(tau),
        }
    }
    out
}

/// Upper end of the range on which poles are precomputed.
pub const POLE_RANGE: (f64, f64) = (1e-3, 200.0);

/// Distance to a recorded pole below which evaluation is refused.
pub const POLE_GUARD: f64 = 1e-8;

/// `w(τ) = u'(τ)/u(τ)` with its poles precomputed on [`POLE_RANGE`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BesselP3Solution {
    pub combo: BesselCombo,
    pub poles: ZeroList,
}

/// The Bessel solution of Painlevé 3 with parameters [`params_from_b`]`(b)`.
pub fn bessel_w(combo: BesselCombo) -> Result<BesselP3Solution> {
    let poles = find_zeros(&combo, POLE_RANGE, usize::MAX)?;
    Ok(BesselP3Solution { combo, poles })
}

impl BesselP3Solution {
    pub fn params(&self) -> P3Params {
        params_from_b(self.combo.order_b)
    }

    /// Recorded pole nearest to `tau`, if any.
    pub fn nearest_pole(&self, tau: f64) -> Option<f64> {
        self.poles
            .zeros
            .iter()
            .copied()
            .min_by(|a, b| (a - tau).abs().total_cmp(&(b - tau).abs()))
    }

    fn check(&self, tau: f64) -> Result<()> {
        if !(tau > 0.0) {
            return Err(Error::Domain(format!("tau must be positive, got {tau}")));
        }
        if let Some(p) = self.nearest_pole(tau) {
            if (p - tau).abs() < POLE_GUARD {
                return Err(Error::PoleOfSolution(p));
            }
        }
        Ok(())
    }

    /// `w(τ) = b/τ + Z'(τ)/Z(τ)`, `Z = J_b + y0·Y_b`.
    pub fn w(&self, tau: f64) -> Result<f64> {
        self.check(tau)?;
        let (z, zp) = self.combo.reduced(tau)?;
        if z == 0.0 {
            return Err(Error::PoleOfSolution(tau));
        }
        Ok(self.combo.order_b / tau + zp / z)
    }

    /// `(w, w', w'')`, differentiating through Bessel's equation.
    pub fn jet(&self, tau: f64) -> Result<Jet> {
        let w = self.w(tau)?;
        let k = 1.0 - 2.0 * self.combo.order_b;
        let wp = -w * w - k * w / tau - 1.0;
        let wpp = -2.0 * w * wp - k * (wp / tau - w / (tau * tau));
        Ok((w, wp, wpp))
    }

    /// `y(t) = √t·w(√t)`.
    pub fn y_of_t(&self, t: f64) -> Result<f64> {
        if !(t > 0.0) {
            return Err(Error::Domain(format!("t must be positive, got {t}")));
        }
        let s = t.sqrt();
        Ok(s * self.w(s)?)
    }

    /// `(y, dy/dt, d²y/dt²)` from the jet of `w`.
    pub fn y_jet(&self, t: f64) -> Result<Jet> {
        if !(t > 0.0) {
            return Err(Error::Domain(format!("t must be positive, got {t}")));
        }
        let s = t.sqrt();
        let (w, wp, wpp) = self.jet(s)?;
        // y = s·w(s), ds/dt = 1/(2s)
        let ys = w + s * wp;
        let yss = 2.0 * wp + s * wpp;
        let ds = 0.5 / s;
        let dss = -0.25 / (s * t);
        Ok((s * w, ys * ds, yss * ds * ds + ys * dss))
    }
}

/// Right-hand side of `P̃3` as produced by the isomonodromy condition:
///
/// ```text
/// y'' = (y')²/y − y'/t + y³/(4t²) − (b/2)y²/t² − 1/(4y) + (b/2 − 1/2)/t
/// ```
pub fn p3_tilde_rhs(b: f64, t: f64, y: f64, yp: f64) -> f64 {
    yp * yp / y - yp / t + 0.25 * y * y * y / (t * t) - 0.5 * b * y * y / (t * t) - 0.25 / y + (0.5 * b - 0.5) / t
}

/// Max of `|y'' − P̃3 RHS|` over samples, from a 2-jet of `y`.
pub fn p3_tilde_residual<F>(jet: F, b: f64, t_samples: &[f64]) -> P3Residual
where
    F: Fn(f64) -> Result<Jet>,
{
    let mut out = P3Residual::default();
    for &t in t_samples {
        match jet(t) {
            Ok((y, yp, ypp)) if y.abs() > 1e-12 && y.is_finite() && t > 0.0 => {
                let r = (ypp - p3_tilde_rhs(b, t, y, yp)).abs();
                if !(r <= out.max_residual) {
                    out.max_residual = r;
                    out.worst_tau = t;
                }
            }
            _ => out.excluded.push(t),
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PoleResidue {
    pub value: f64,
    /// Gap between the last two extrapolated values.
    pub error_estimate: f64,
    pub converged: bool,
}

/// `lim (τ − τ*)·w(τ)` at a recorded pole, by Richardson extrapolation of the
/// symmetric average of `h·w(τ* + h)` and `−h·w(τ* − h)`, which is even in `h`.
pub fn pole_residue(sol: &BesselP3Solution, tau_star: f64) -> Result<PoleResidue> {
    let p = sol
        .nearest_pole(tau_star)
        .filter(|p| (p - tau_star).abs() < 1e-6 * (1.0 + p))
        .ok_or_else(|| Error::InvalidInput(format!("{tau_star} is not a recorded pole")))?;
    let h0 = 1e-2_f64.min(0.25 * p);
    let levels = 6;
    let mut table: Vec<Vec<f64>> = Vec::with_capacity(levels);
    for k in 0..levels {
        let h = h0 / 2f64.powi(k as i32);
        let g = 0.5 * (h * sol.w(p + h)? - h * sol.w(p - h)?);
        let mut row = vec![g];
        for j in 1..=k {
            let f = 4f64.powi(j as i32);
            let v = (f * row[j - 1] - table[k - 1][j - 1]) / (f - 1.0);
            row.push(v);
        }
        table.push(row);
    }
    let last = &table[levels - 1];
    let value = last[levels - 1];
    let error_estimate = (value - table[levels - 2][levels - 2]).abs();
    Ok(PoleResidue {
        value,
        error_estimate,
        converged: error_estimate < 1e-6,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpecialClass {
    BesselType,
    Rational,
    BesselAndRational,
    None,
}

fn near_integer(x: f64) -> bool {
    (x - x.round()).abs() < 1e-9
}

/// Special-solution predicate for the normalized equation `P3(α̂, β̂, 1, −1)`:
/// Bessel type when `α̂ + εβ̂ = 4k + 2`, rational when `α̂ + εβ̂ = 4k`, for
/// some `ε = ±1`, `k ∈ ℤ`. Both can hold for different signs `ε`.
pub fn special_solution_class(alpha_hat: f64, beta_hat: f64) -> SpecialClass {
    let sums = [alpha_hat + beta_hat, alpha_hat - beta_hat];
    let bessel = sums.iter().any(|s| near_integer((s - 2.0) / 4.0));
    let rational = sums.iter().any(|s| near_integer(s / 4.0));
    match (bessel, rational) {
        (true, true) => SpecialClass::BesselAndRational,
        (true, false) => SpecialClass::BesselType,
        (false, true) => SpecialClass::Rational,
        (false, false) => SpecialClass::None,
    }
}

/// `|w|` above which the solution is treated as having reached a pole.
pub const BLOW_UP: f64 = 1e8;

/// Integrates Painlevé 3 as a first-order system in `(w, w')`.
///
/// On reaching `|w| > 1e8` the run stops with
/// [`Error::MovingSingularity`] carrying the pole location `τ + w/w'`,
/// which is exact to second order for a simple pole.
pub fn integrate_p3(
    params: &P3Params,
    tau0: f64,
    w0: f64,
    w0_prime: f64,
    tau_end: f64,
    tol: &Tolerances,
) -> Result<f64> {
    if w0 == 0.0 {
        return Err(Error::InvalidInput("the equation is singular at w = 0".into()));
    }
    if !(tau0 * tau_end > 0.0) {
        return Err(Error::InvalidInput(format!(
            "the interval [{tau0}, {tau_end}] must not contain tau = 0"
        )));
    }
    let p = *params;
    let field = |t: f64, y: &[f64], dy: &mut [f64]| {
        dy[0] = y[1];
        dy[1] = p.rhs(t, y[0], y[1]);
    };
    let mut pole = None;
    let res = integrate_observed(field, &[w0, w0_prime], (tau0, tau_end), tol, |t, y| {
        if y[0].abs() > BLOW_UP {
            pole = Some(t + y[0] / y[1]);
            Flow::Stop
        } else {
            Flow::Continue
        }
    })
    .map_err(|e| match e {
        Error::BlowUp(t) => Error::MovingSingularity(t),
        other => other,
    })?;
    if let Some(t) = pole {
        return Err(Error::MovingSingularity(t));
    }
    Ok(res.state[0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn cot_jet(t: f64) -> Result<Jet> {
        let c = 1.0 / t.tan();
        let csc2 = 1.0 + c * c;
        Ok((c, -csc2, 2.0 * c * csc2))
    }

    #[test]
    fn parameters() {
        assert_eq!(params_from_b(0.0), P3Params::new(0.0, -2.0, 1.0, -1.0).unwrap());
        assert_eq!(params_from_b(1.0), P3Params::new(-2.0, 0.0, 1.0, -1.0).unwrap());
        let p = params_from_b(0.37);
        assert!((p.alpha + p.beta + 2.0).abs() < 1e-15);
    }

    #[test]
    fn cot_solves_p3() {
        let p = P3Params::new(-1.0, -1.0, 1.0, -1.0).unwrap();
        let taus: Vec<f64> = (0..=110).map(|i| 0.3 + 0.01 * i as f64).collect();
        assert!(p3_residual(cot_jet, &p, &taus).max_residual < 1e-12);
    }

    #[test]
    fn constant_residual() {
        let p = P3Params::new(0.7, 0.5, 1.0, -1.0).unwrap();
        let r = p3_residual(|_| Ok((1.0, 0.0, 0.0)), &p, &[1.0]);
        assert!((r.max_residual - 1.2).abs() < 1e-15);
    }

    #[test]
    fn half_order_is_cotangent() {
        let s = bessel_w(BesselCombo::new(0.5, 0.0).unwrap()).unwrap();
        assert!((s.w(PI / 4.0).unwrap() - 1.0).abs() < 1e-12);
        assert!((s.poles.zeros[0] - PI).abs() < 1e-12);
        assert!(matches!(s.w(PI), Err(Error::PoleOfSolution(_))));
        assert!(s.y_of_t(PI * PI / 4.0).unwrap().abs() < 1e-12);
        assert!((s.y_of_t(1e-8).unwrap() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn analytic_jet_matches_finite_differences() {
        let s = bessel_w(BesselCombo::new(1.3, 0.4).unwrap()).unwrap();
        for &t in &[0.7, 1.9, 6.1] {
            let a = s.jet(t).unwrap();
            let f = fd_jet(|x| s.w(x), t, 1e-3).unwrap();
            assert!((a.1 - f.1).abs() < 1e-6 * (1.0 + a.1.abs()));
            assert!((a.2 - f.2).abs() < 1e-4 * (1.0 + a.2.abs()));
        }
    }

    #[test]
    fn classes() {
        let p = params_from_b(0.3);
        assert_ne!(special_solution_class(p.alpha, p.beta), SpecialClass::None);
        let p = params_from_b(0.5);
        assert_eq!(special_solution_class(p.alpha, p.beta), SpecialClass::BesselAndRational);
        // α̂ − β̂ = 0 = 4·0 makes equal parameters rational.
        assert_eq!(special_solution_class(0.3, 0.3), SpecialClass::Rational);
        assert_eq!(special_solution_class(0.3, 0.5), SpecialClass::None);
        assert_eq!(special_solution_class(2.0, 2.0), SpecialClass::Rational);
    }

    #[test]
    fn integrate_cot() {
        let p = P3Params::new(-1.0, -1.0, 1.0, -1.0).unwrap();
        let w = integrate_p3(&p, PI / 4.0, 1.0, -2.0, 1.0, &Tolerances::default()).unwrap();
        assert!((w - 1.0 / 1.0_f64.tan()).abs() < 1e-8);
        assert!(integrate_p3(&p, 1.0, 0.0, 1.0, 2.0, &Tolerances::default()).is_err());
        let c = 1.0 / 2.0_f64.tan();
        match integrate_p3(&p, 2.0, c, -1.0 - c * c, 4.0, &Tolerances::default()) {
            Err(Error::MovingSingularity(t)) => assert!((t - PI).abs() < 1e-6, "{t}"),
            other => panic!("{other:?}"),
        }
    }
}
