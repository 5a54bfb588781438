//! Bessel functions of real order and positive argument, and the zeros of
//! `u(s) = s^b (J_b(s) + y0·Y_b(s))`.
//!
//! `J_ν` and `Y_ν` come from Steed's method: a continued fraction for
//! `J'_ν/J_ν`, downward recurrence to a reduced order `|μ| ≤ 1/2`, then
//! Temme's series (small argument) or the complex continued fraction for
//! `p + iq` (large argument) to fix the normalization and `Y_μ`. `Y` is
//! recurred upward, where it is stable. Integer orders need no special case.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Largest supported `|ν|`.
pub const MAX_ORDER: f64 = 50.0;

const EPS: f64 = 1e-16;
const FPMIN: f64 = 1e-300;
const MAXIT: usize = 100_000;
const SERIES_LIMIT: f64 = 2.0;

/// Taylor coefficients of `1/Γ(1+x)` about 0.
const RGAMMA: [f64; 25] = [
    1.0,
    0.577_215_664_901_532_86,
    -0.655_878_071_520_253_88,
    -0.042_002_635_034_095_236,
    0.166_538_611_382_291_49,
    -0.042_197_734_555_544_337,
    -0.009_621_971_527_876_973_6,
    0.007_218_943_246_663_099_5,
    -0.001_165_167_591_859_065_1,
    -0.000_215_241_674_114_950_97,
    0.000_128_050_282_388_116_19,
    -0.000_020_134_854_780_788_239,
    -0.000_001_250_493_482_142_670_7,
    0.000_001_133_027_231_981_695_9,
    -0.000_000_205_633_841_697_760_71,
    0.000_000_006_116_095_104_481_415_8,
    0.000_000_005_002_007_644_469_223,
    -0.000_000_001_181_274_570_487_020_1,
    0.000_000_000_104_342_671_169_110_05,
    0.000_000_000_007_782_263_439_905_071,
    -0.000_000_000_003_696_805_618_642_205_7,
    0.000_000_000_000_510_037_028_745_447_6,
    -0.000_000_000_000_020_583_260_535_665_068,
    -0.000_000_000_000_005_348_122_539_423_018,
    0.000_000_000_000_001_226_778_628_238_260_8,
];

/// `J_ν(s)`, `Y_ν(s)` and their derivatives in `s`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BesselPair {
    pub j: f64,
    pub y: f64,
    pub jp: f64,
    pub yp: f64,
}

/// Temme's auxiliary functions for `|x| ≤ 1/2`:
/// `(gam1, gam2, 1/Γ(1+x), 1/Γ(1−x))`.
fn temme_gammas(x: f64) -> (f64, f64, f64, f64) {
    let mut even = 0.0;
    let mut odd = 0.0;
    for k in (0..RGAMMA.len()).rev() {
        if k % 2 == 0 {
            even = even * x * x + RGAMMA[k];
        } else {
            odd = odd * x * x + RGAMMA[k];
        }
    }
    // 1/Γ(1±x) = even ± x·odd
    (-odd, even, even + x * odd, even - x * odd)
}

/// `(sin πx, cos πx)` with exact zeros at integers and half-integers.
fn sincos_pi(x: f64) -> (f64, f64) {
    let r = x.rem_euclid(2.0);
    let (s, c) = (PI * r).sin_cos();
    if r == r.round() {
        (0.0, if r == 0.0 { 1.0 } else { -1.0 })
    } else if (2.0 * r) == (2.0 * r).round() {
        (if r == 0.5 { 1.0 } else { -1.0 }, 0.0)
    } else {
        (s, c)
    }
}

fn bessjy(x: f64, nu: f64) -> Result<BesselPair> {
    let nl = if x < SERIES_LIMIT {
        (nu + 0.5) as usize
    } else {
        (nu - x + 1.5).max(0.0) as usize
    };
    let xmu = nu - nl as f64;
    let xmu2 = xmu * xmu;
    let xi = 1.0 / x;
    let xi2 = 2.0 * xi;
    let w = xi2 / PI;

    // CF1 for J'_ν/J_ν by the modified Lentz method.
    let mut isign = 1.0;
    let mut h = (nu * xi).max(FPMIN);
    let mut b = xi2 * nu;
    let mut d = 0.0;
    let mut c = h;
    let mut converged = false;
    for _ in 0..MAXIT {
        b += xi2;
        d = b - d;
        if d.abs() < FPMIN {
            d = FPMIN;
        }
        c = b - 1.0 / c;
        if c.abs() < FPMIN {
            c = FPMIN;
        }
        d = 1.0 / d;
        let del = c * d;
        h *= del;
        if d < 0.0 {
            isign = -isign;
        }
        if (del - 1.0).abs() < EPS {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NoConvergence("Bessel continued fraction CF1"));
    }

    // Downward recurrence from ν to μ with an arbitrary normalization.
    let mut rjl = isign * FPMIN;
    let mut rjpl = h * rjl;
    let rjl1 = rjl;
    let rjp1 = rjpl;
    let mut fact = nu * xi;
    for _ in 0..nl {
        let rjtemp = fact * rjl + rjpl;
        fact -= xi;
        rjpl = fact * rjtemp - rjl;
        rjl = rjtemp;
    }
    if rjl == 0.0 {
        rjl = EPS;
    }
    let f = rjpl / rjl;

    let (rjmu, mut rymu, mut ry1);
    if x < SERIES_LIMIT {
        let x2 = 0.5 * x;
        let pimu = PI * xmu;
        let fact = if pimu.abs() < EPS { 1.0 } else { pimu / pimu.sin() };
        let d = -x2.ln();
        let e = xmu * d;
        let fact2 = if e.abs() < EPS { 1.0 } else { e.sinh() / e };
        let (gam1, gam2, gampl, gammi) = temme_gammas(xmu);
        let mut ff = 2.0 / PI * fact * (gam1 * e.cosh() + gam2 * fact2 * d);
        let e = e.exp();
        let mut p = e / (gampl * PI);
        let mut q = 1.0 / (e * PI * gammi);
        let pimu2 = 0.5 * pimu;
        let fact3 = if pimu2.abs() < EPS { 1.0 } else { pimu2.sin() / pimu2 };
        let r = PI * pimu2 * fact3 * fact3;
        let mut c = 1.0;
        let d = -x2 * x2;
        let mut sum = ff + r * q;
        let mut sum1 = p;
        let mut converged = false;
        for i in 1..MAXIT {
            let fi = i as f64;
            ff = (fi * ff + p + q) / (fi * fi - xmu2);
            c *= d / fi;
            p /= fi - xmu;
            q /= fi + xmu;
            let del = c * (ff + r * q);
            sum += del;
            let del1 = c * p - fi * del;
            sum1 += del1;
            if del.abs() < (1.0 + sum.abs()) * EPS {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::NoConvergence("Temme series for Y"));
        }
        rymu = -sum;
        ry1 = -sum1 * xi2;
        let rymup = xmu * xi * rymu - ry1;
        rjmu = w / (rymup - f * rymu);
    } else {
        // CF2 for p + iq by Steed's algorithm in complex arithmetic.
        let mut a = 0.25 - xmu2;
        let mut p = -0.5 * xi;
        let mut q = 1.0;
        let br = 2.0 * x;
        let mut bi = 2.0;
        let mut fact = a * xi / (p * p + q * q);
        let mut cr = br + q * fact;
        let mut ci = bi + p * fact;
        let mut den = br * br + bi * bi;
        let mut dr = br / den;
        let mut di = -bi / den;
        let mut dlr = cr * dr - ci * di;
        let mut dli = cr * di + ci * dr;
        let mut temp = p * dlr - q * dli;
        q = p * dli + q * dlr;
        p = temp;
        let mut converged = false;
        for i in 2..MAXIT {
            a += 2.0 * (i as f64 - 1.0);
            bi += 2.0;
            dr = a * dr + br;
            di = a * di + bi;
            if dr.abs() + di.abs() < FPMIN {
                dr = FPMIN;
            }
            fact = a / (cr * cr + ci * ci);
            cr = br + cr * fact;
            ci = bi - ci * fact;
            if cr.abs() + ci.abs() < FPMIN {
                cr = FPMIN;
            }
            den = dr * dr + di * di;
            dr /= den;
            di /= -den;
            dlr = cr * dr - ci * di;
            dli = cr * di + ci * dr;
            temp = p * dlr - q * dli;
            q = p * dli + q * dlr;
            p = temp;
            if (dlr - 1.0).abs() + dli.abs() < EPS {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::NoConvergence("Bessel continued fraction CF2"));
        }
        let gam = (p - f) / q;
        let mag = (w / ((p - f) * gam + q)).sqrt();
        rjmu = mag.copysign(rjl);
        rymu = rjmu * gam;
        let rymup = rymu * (p + q / gam);
        ry1 = xmu * xi * rymu - rymup;
    }

    let scale = rjmu / rjl;
    let j = rjl1 * scale;
    let jp = rjp1 * scale;
    for i in 1..=nl {
        let rytemp = (xmu + i as f64) * xi2 * ry1 - rymu;
        rymu = ry1;
        ry1 = rytemp;
    }
    Ok(BesselPair {
        j,
        y: rymu,
        jp,
        yp: nu * xi * rymu - ry1,
    })
}

/// `J_ν(s)`, `Y_ν(s)`, `J'_ν(s)`, `Y'_ν(s)` for `|ν| ≤ 50`, `s > 0`.
///
/// Negative orders use `J_{−ν} = cos(νπ)J_ν − sin(νπ)Y_ν` and
/// `Y_{−ν} = sin(νπ)J_ν + cos(νπ)Y_ν`, exact at integer `ν`.
pub fn bessel_pair(nu: f64, s: f64) -> Result<BesselPair> {
    if !(s > 0.0) || !s.is_finite() {
        return Err(Error::Domain(format!("Bessel argument must be positive, got {s}")));
    }
    if !nu.is_finite() || nu.abs() > MAX_ORDER {
        return Err(Error::UnsupportedOrder(nu));
    }
    if nu >= 0.0 {
        return bessjy(s, nu);
    }
    let p = bessjy(s, -nu)?;
    let (sn, cs) = sincos_pi(-nu);
    Ok(BesselPair {
        j: cs * p.j - sn * p.y,
        y: sn * p.j + cs * p.y,
        jp: cs * p.jp - sn * p.yp,
        yp: sn * p.jp + cs * p.yp,
    })
}

/// The combination `u(s) = s^b (J_b(s) + y0·Y_b(s))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BesselCombo {
    pub order_b: f64,
    pub y0: f64,
}

impl BesselCombo {
    pub fn new(order_b: f64, y0: f64) -> Result<Self> {
        if !order_b.is_finite() || !y0.is_finite() {
            return Err(Error::InvalidInput(format!(
                "Bessel combination needs finite b and y0, got ({order_b}, {y0})"
            )));
        }
        if order_b.abs() > MAX_ORDER {
            return Err(Error::UnsupportedOrder(order_b));
        }
        Ok(BesselCombo { order_b, y0 })
    }

    /// `Z(s) = J_b + y0·Y_b` and `Z'(s)`, i.e. `u` without the `s^b` factor.
    pub fn reduced(&self, s: f64) -> Result<(f64, f64)> {
        let p = bessel_pair(self.order_b, s)?;
        Ok((p.j + self.y0 * p.y, p.jp + self.y0 * p.yp))
    }
}

/// `(u(s), u'(s))`, keeping the `s^b` prefactor in the derivative.
pub fn u_eval(combo: &BesselCombo, s: f64) -> Result<(f64, f64)> {
    let (z, zp) = combo.reduced(s)?;
    let b = combo.order_b;
    let sb = s.powf(b);
    Ok((sb * z, b * sb / s * z + sb * zp))
}

/// Positive zeros of `u` in a range.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ZeroList {
    pub zeros: Vec<f64>,
    /// `|J_b + y0·Y_b|` at each zero. The positive factor `s^b` is left out so
    /// that the figure is comparable across orders; entries above
    /// [`ZERO_TOL`] mark brackets whose refinement did not settle.
    pub residuals: Vec<f64>,
}

impl ZeroList {
    pub fn len(&self) -> usize {
        self.zeros.len()
    }

    pub fn is_empty(&self) -> bool {
        self.zeros.is_empty()
    }

    /// Indices of zeros whose residual exceeds [`ZERO_TOL`].
    pub fn flagged(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| !(self.residuals[i] < ZERO_TOL)).collect()
    }
}

/// Residual target for refined zeros.
pub const ZERO_TOL: f64 = 1e-11;

const SWEEP_STEP: f64 = PI / 8.0;

fn refine_zero(combo: &BesselCombo, mut lo: f64, mut hi: f64, mut flo: f64) -> Result<(f64, f64)> {
    for _ in 0..200 {
        if hi - lo <= 4.0 * f64::EPSILON * hi {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let (fm, _) = combo.reduced(mid)?;
        if fm == 0.0 {
            return Ok((mid, 0.0));
        }
        if (fm < 0.0) == (flo < 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    let mut x = 0.5 * (lo + hi);
    let (mut fx, fpx) = combo.reduced(x)?;
    // One Newton polish, kept only if it improves the residual.
    if fpx != 0.0 {
        let xn = x - fx / fpx;
        if xn > 0.0 {
            let (fn_, _) = combo.reduced(xn)?;
            if fn_.abs() < fx.abs() {
                x = xn;
                fx = fn_;
            }
        }
    }
    Ok((x, fx.abs()))
}

/// Zeros of `u` in `[s_min, s_max]`, at most `max_count`, in increasing order.
///
/// Brackets come from a sweep of step π/8; each is bisected and polished by
/// one Newton step. A bracket whose residual stays above [`ZERO_TOL`] is kept
/// and shows up in [`ZeroList::flagged`].
pub fn find_zeros(combo: &BesselCombo, range: (f64, f64), max_count: usize) -> Result<ZeroList> {
    let (s_min, s_max) = range;
    if !(s_min > 0.0 && s_min < s_max && s_max.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "zero search needs 0 < s_min < s_max, got ({s_min}, {s_max})"
        )));
    }
    let mut out = ZeroList::default();
    let mut a = s_min;
    let (mut fa, _) = combo.reduced(a)?;
    if fa == 0.0 {
        out.zeros.push(a);
        out.residuals.push(0.0);
    }
    while a < s_max && out.len() < max_count {
        let b = (a + SWEEP_STEP).min(s_max);
        let (fb, _) = combo.reduced(b)?;
        if fb == 0.0 {
            out.zeros.push(b);
            out.residuals.push(0.0);
        } else if fa != 0.0 && (fa < 0.0) != (fb < 0.0) {
            let (z, r) = refine_zero(combo, a, b, fa)?;
            out.zeros.push(z);
            out.residuals.push(r);
        }
        a = b;
        fa = fb;
    }
    out.zeros.truncate(max_count);
    out.residuals.truncate(max_count);
    Ok(out)
}
