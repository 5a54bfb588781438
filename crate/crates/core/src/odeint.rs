//! Adaptive initial-value integration shared by every other module.
//!
//! A single Dormand–Prince 5(4) pair with a PI step-size controller drives
//! real vector fields. Complex 2×2 linear systems along a parametrized
//! complex path are integrated by flattening the fundamental matrix into
//! eight real components.

use crate::error::{ensure, Error, Result};
use crate::linalg::{Mat2, C64};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_steps: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            abs_tol: 1e-10,
            rel_tol: 1e-10,
            max_steps: 10_000_000,
        }
    }
}

impl Tolerances {
    pub fn new(abs_tol: f64, rel_tol: f64, max_steps: usize) -> Result<Self> {
        let tol = Tolerances {
            abs_tol,
            rel_tol,
            max_steps,
        };
        tol.validate()?;
        Ok(tol)
    }

    /// Same absolute and relative tolerance, default step budget.
    pub fn uniform(tol: f64) -> Result<Self> {
        Self::new(tol, tol, Self::default().max_steps)
    }

    pub fn validate(&self) -> Result<()> {
        ensure(self.abs_tol > 0.0 && self.abs_tol.is_finite(), || {
            format!("abs_tol must be positive, got {}", self.abs_tol)
        })?;
        ensure(self.rel_tol > 0.0 && self.rel_tol.is_finite(), || {
            format!("rel_tol must be positive, got {}", self.rel_tol)
        })?;
        ensure(self.max_steps >= 1, || "max_steps must be at least 1".into())
    }

    pub fn halved(&self) -> Self {
        Tolerances {
            abs_tol: self.abs_tol / 2.0,
            rel_tol: self.rel_tol / 2.0,
            max_steps: self.max_steps,
        }
    }
}

/// End state of an integration together with the accumulated local error.
#[derive(Debug, Clone, PartialEq)]
pub struct Integration {
    pub t: f64,
    pub state: Vec<f64>,
    /// Sum of the embedded local error estimates (max norm) over accepted steps.
    pub error_estimate: f64,
    pub steps: usize,
    pub rejected: usize,
    /// `true` when an observer stopped the run before the end of the span.
    pub stopped: bool,
}

/// Returned by an observer after every accepted step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Flow {
    Continue,
    Stop,
}

// Dormand–Prince 5(4) tableau.
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

// PI controller constants (Hairer & Wanner).
const SAFETY: f64 = 0.9;
const BETA: f64 = 0.04;
const ALPHA: f64 = 0.2 - 0.75 * BETA;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 10.0;

struct Stages {
    k: [Vec<f64>; 7],
    tmp: Vec<f64>,
    y_new: Vec<f64>,
    err: Vec<f64>,
}

impl Stages {
    fn new(n: usize) -> Self {
        Stages {
            k: std::array::from_fn(|_| vec![0.0; n]),
            tmp: vec![0.0; n],
            y_new: vec![0.0; n],
            err: vec![0.0; n],
        }
    }
}

fn scaled_norm(err: &[f64], y: &[f64], y_new: &[f64], tol: &Tolerances) -> f64 {
    let n = err.len() as f64;
    let sum: f64 = err
        .iter()
        .zip(y.iter().zip(y_new))
        .map(|(e, (a, b))| {
            let sk = tol.abs_tol + tol.rel_tol * a.abs().max(b.abs());
            (e / sk).powi(2)
        })
        .sum();
    (sum / n).sqrt()
}

fn initial_step<F>(field: &mut F, t0: f64, y0: &[f64], f0: &[f64], span: f64, tol: &Tolerances) -> f64
where
    F: FnMut(f64, &[f64], &mut [f64]),
{
    let n = y0.len() as f64;
    let sk = |y: f64| tol.abs_tol + tol.rel_tol * y.abs();
    let d0 = (y0.iter().map(|y| (y / sk(*y)).powi(2)).sum::<f64>() / n).sqrt();
    let d1 = (y0
        .iter()
        .zip(f0)
        .map(|(y, f)| (f / sk(*y)).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    let mut h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    h0 = h0.min(span.abs());
    let dir = span.signum();
    let y1: Vec<f64> = y0.iter().zip(f0).map(|(y, f)| y + dir * h0 * f).collect();
    let mut f1 = vec![0.0; y0.len()];
    field(t0 + dir * h0, &y1, &mut f1);
    let d2 = (y0
        .iter()
        .zip(f0.iter().zip(&f1))
        .map(|(y, (a, b))| ((b - a) / sk(*y)).powi(2))
        .sum::<f64>()
        / n)
        .sqrt()
        / h0;
    let h1 = if d1.max(d2) <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / d1.max(d2)).powf(0.2)
    };
    (100.0 * h0).min(h1).min(span.abs()).max(span.abs() * 1e-12)
}

/// Integrates `y' = field(t, y)` over `span`, calling `observer` after every
/// accepted step. The observer may rescale the state (the linear transport
/// uses this to renormalize) or stop the run.
pub fn integrate_observed<F, O>(
    mut field: F,
    y0: &[f64],
    span: (f64, f64),
    tol: &Tolerances,
    mut observer: O,
) -> Result<Integration>
where
    F: FnMut(f64, &[f64], &mut [f64]),
    O: FnMut(f64, &mut [f64]) -> Flow,
{
    tol.validate()?;
    let (t0, t1) = span;
    ensure(t0.is_finite() && t1.is_finite(), || {
        format!("span must be finite, got ({t0}, {t1})")
    })?;
    ensure(y0.iter().all(|v| v.is_finite()), || "initial state must be finite".into())?;
    let n = y0.len();
    let mut y = y0.to_vec();
    let mut out = Integration {
        t: t0,
        state: y.clone(),
        error_estimate: 0.0,
        steps: 0,
        rejected: 0,
        stopped: false,
    };
    if t0 == t1 || n == 0 {
        return Ok(out);
    }
    let dir = (t1 - t0).signum();
    let mut st = Stages::new(n);
    field(t0, &y, &mut st.k[0]);
    if st.k[0].iter().any(|v| !v.is_finite()) {
        return Err(Error::BlowUp(t0));
    }
    let mut h = initial_step(&mut field, t0, &y, &st.k[0].clone(), t1 - t0, tol);
    let mut t = t0;
    let mut err_old: f64 = 1e-4;
    let mut last_rejected = false;

    while (t1 - t) * dir > 0.0 {
        if out.steps + out.rejected >= tol.max_steps {
            return Err(Error::MaxStepsExceeded(out.steps + out.rejected));
        }
        let mut hs = h * dir;
        if (t + hs - t1) * dir > 0.0 {
            hs = t1 - t;
        }
        if hs.abs() < 1e-14 * t.abs().max(1.0) {
            return Err(Error::BlowUp(t));
        }

        dp_step(&mut field, t, &y, hs, &mut st);

        let err = scaled_norm(&st.err, &y, &st.y_new, tol);
        if !err.is_finite() || st.y_new.iter().any(|v| !v.is_finite()) {
            out.rejected += 1;
            h = hs.abs() * FAC_MIN;
            last_rejected = true;
            continue;
        }
        if err <= 1.0 {
            let fac = (err.max(1e-10).powf(-ALPHA) * err_old.powf(BETA) * SAFETY)
                .clamp(FAC_MIN, FAC_MAX);
            err_old = err.max(1e-4);
            out.error_estimate += st.err.iter().fold(0.0_f64, |m, e| m.max(e.abs()));
            t += hs;
            y.copy_from_slice(&st.y_new);
            out.steps += 1;
            let flow = observer(t, &mut y);
            // First-same-as-last unless the observer touched the state.
            let fsal = st.k[6].clone();
            if y != st.y_new {
                field(t, &y, &mut st.k[0]);
            } else {
                st.k[0].copy_from_slice(&fsal);
            }
            if flow == Flow::Stop {
                out.stopped = true;
                break;
            }
            h = if last_rejected {
                hs.abs() * fac.min(1.0)
            } else {
                hs.abs() * fac
            };
            last_rejected = false;
        } else {
            let fac = (err.powf(-ALPHA) * SAFETY).max(FAC_MIN);
            h = hs.abs() * fac;
            out.rejected += 1;
            last_rejected = true;
        }
    }
    out.t = t;
    out.state = y;
    Ok(out)
}

fn dp_step<F>(field: &mut F, t: f64, y: &[f64], h: f64, st: &mut Stages)
where
    F: FnMut(f64, &[f64], &mut [f64]),
{
    let n = y.len();
    let Stages { k, tmp, y_new, err } = st;
    macro_rules! stage {
        ($dst:expr, $c:expr, $($a:expr => $ki:expr),+) => {{
            for i in 0..n {
                tmp[i] = y[i] + h * (0.0 $(+ $a * k[$ki][i])+);
            }
            let (head, tail) = k.split_at_mut($dst);
            let _ = head;
            field(t + $c * h, tmp, &mut tail[0]);
        }};
    }
    stage!(1, C2, A21 => 0);
    stage!(2, C3, A31 => 0, A32 => 1);
    stage!(3, C4, A41 => 0, A42 => 1, A43 => 2);
    stage!(4, C5, A51 => 0, A52 => 1, A53 => 2, A54 => 3);
    stage!(5, 1.0, A61 => 0, A62 => 1, A63 => 2, A64 => 3, A65 => 4);
    for i in 0..n {
        y_new[i] = y[i]
            + h * (A71 * k[0][i] + A73 * k[2][i] + A74 * k[3][i] + A75 * k[4][i] + A76 * k[5][i]);
    }
    let (head, tail) = k.split_at_mut(6);
    let _ = head;
    field(t + h, y_new, &mut tail[0]);
    for i in 0..n {
        err[i] = h
            * (E1 * k[0][i] + E3 * k[2][i] + E4 * k[3][i] + E5 * k[4][i] + E6 * k[5][i]
                + E7 * k[6][i]);
    }
}

/// Integrates a real vector field over `span` and returns the end state.
pub fn integrate_real<F>(field: F, y0: &[f64], span: (f64, f64), tol: &Tolerances) -> Result<Integration>
where
    F: FnMut(f64, &[f64], &mut [f64]),
{
    integrate_observed(field, y0, span, tol, |_, _| Flow::Continue)
}

/// A C¹ path `s ∈ [0, 1] ↦ z(s)` in the complex plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ComplexPath {
    /// `center + radius·exp(i(start + 2π·turns·s))`; negative turns run clockwise.
    Circle {
        center: C64,
        radius: f64,
        start_angle: f64,
        turns: f64,
    },
    Segment { from: C64, to: C64 },
}

impl ComplexPath {
    /// One counterclockwise loop of radius `radius` about the origin, starting on the positive real axis.
    pub fn circle(radius: f64) -> Self {
        ComplexPath::Circle {
            center: C64::new(0.0, 0.0),
            radius,
            start_angle: 0.0,
            turns: 1.0,
        }
    }

    pub fn segment(from: C64, to: C64) -> Self {
        ComplexPath::Segment { from, to }
    }

    pub fn point(&self, s: f64) -> C64 {
        match *self {
            ComplexPath::Circle {
                center,
                radius,
                start_angle,
                turns,
            } => center + C64::from_polar(radius, start_angle + 2.0 * PI * turns * s),
            ComplexPath::Segment { from, to } => from + (to - from) * s,
        }
    }

    pub fn derivative(&self, s: f64) -> C64 {
        match *self {
            ComplexPath::Circle {
                radius,
                start_angle,
                turns,
                ..
            } => {
                let w = 2.0 * PI * turns;
                C64::new(0.0, w) * C64::from_polar(radius, start_angle + w * s)
            }
            ComplexPath::Segment { from, to } => to - from,
        }
    }

    pub fn reversed(&self) -> Self {
        match *self {
            ComplexPath::Circle {
                center,
                radius,
                start_angle,
                turns,
            } => ComplexPath::Circle {
                center,
                radius,
                start_angle: start_angle + 2.0 * PI * turns,
                turns: -turns,
            },
            ComplexPath::Segment { from, to } => ComplexPath::Segment { from: to, to: from },
        }
    }

    pub fn is_closed(&self) -> bool {
        (self.point(0.0) - self.point(1.0)).norm() < 1e-12 * (1.0 + self.point(0.0).norm())
    }

    /// Minimum distance from the path to `z`.
    pub fn distance_to(&self, z: C64) -> f64 {
        match *self {
            ComplexPath::Circle {
                center,
                radius,
                start_angle,
                turns,
            } => {
                if turns.abs() >= 1.0 {
                    return ((z - center).norm() - radius).abs();
                }
                // Partial arc: nearest point is the radial projection if it lies on
                // the arc, otherwise an endpoint.
                let mut best = (self.point(0.0) - z).norm().min((self.point(1.0) - z).norm());
                let d = z - center;
                if d.norm() > 0.0 {
                    let theta = d.arg();
                    let span = 2.0 * PI * turns;
                    let rel = ((theta - start_angle) / span).rem_euclid(2.0 * PI / span.abs());
                    if (0.0..=1.0).contains(&rel) {
                        best = best.min((d.norm() - radius).abs());
                    }
                } else {
                    best = radius;
                }
                best
            }
            ComplexPath::Segment { from, to } => {
                let d = to - from;
                let len2 = d.norm_sqr();
                let s = if len2 == 0.0 {
                    0.0
                } else {
                    (((z - from) * d.conj()).re / len2).clamp(0.0, 1.0)
                };
                (from + d * s - z).norm()
            }
        }
    }
}

/// Matrix entries beyond this magnitude trigger renormalization.
const RENORM_THRESHOLD: f64 = 1e100;

/// Transports `dY/dz = coeff(z)·Y` along `path` from `y0`.
///
/// `singular` lists poles of `coeff`; a path passing within `1e-12` of any of
/// them is rejected. The running matrix is renormalized by its largest entry
/// whenever that exceeds 1e100 and the factor is restored at the end.
pub fn integrate_matrix_along_path<F>(
    coeff: F,
    y0: Mat2,
    path: &ComplexPath,
    singular: &[C64],
    tol: &Tolerances,
) -> Result<Mat2>
where
    F: Fn(C64) -> Mat2,
{
    for &p in singular {
        let d = path.distance_to(p);
        if d < 1e-12 {
            return Err(Error::SingularPath(format!(
                "path passes within {d:e} of the pole at {p}"
            )));
        }
    }
    let mut log_scale = 0.0_f64;
    let mut bad = false;
    let field = |s: f64, y: &[f64], dy: &mut [f64]| {
        let z = path.point(s);
        let a = coeff(z).scale(path.derivative(s));
        let out = a * Mat2::from_flat(y);
        dy.copy_from_slice(&out.to_flat());
    };
    let result = integrate_observed(field, &y0.to_flat(), (0.0, 1.0), tol, |_, y| {
        let m = y.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        if !m.is_finite() {
            bad = true;
            return Flow::Stop;
        }
        if m > RENORM_THRESHOLD {
            for v in y.iter_mut() {
                *v /= m;
            }
            log_scale += m.ln();
        }
        Flow::Continue
    })
    .map_err(|e| match e {
        Error::BlowUp(s) => Error::SingularPath(format!("coefficient not finite near s = {s}")),
        other => other,
    })?;
    if bad {
        return Err(Error::SingularPath("transport overflowed".into()));
    }
    let m = Mat2::from_flat(&result.state);
    let out = m.scale(C64::from(log_scale.exp()));
    if !out.is_finite() {
        return Err(Error::SingularPath(format!(
            "transport magnitude e^{log_scale:.1} exceeds f64 range"
        )));
    }
    Ok(out)
}
