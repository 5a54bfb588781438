//! 2×2 complex matrices, the only linear algebra the linear systems here need.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::ops::{Add, Mul, Sub};

pub type C64 = Complex64;

pub const I: C64 = C64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mat2(pub [[C64; 2]; 2]);

impl Mat2 {
    pub const ZERO: Mat2 = Mat2([[C64::new(0.0, 0.0); 2]; 2]);
    pub const IDENTITY: Mat2 = Mat2([
        [C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
        [C64::new(0.0, 0.0), C64::new(1.0, 0.0)],
    ]);

    pub fn new(a: C64, b: C64, c: C64, d: C64) -> Self {
        Mat2([[a, b], [c, d]])
    }

    pub fn real(a: f64, b: f64, c: f64, d: f64) -> Self {
        Self::new(a.into(), b.into(), c.into(), d.into())
    }

    pub fn diag(a: C64, d: C64) -> Self {
        Self::new(a, C64::new(0.0, 0.0), C64::new(0.0, 0.0), d)
    }

    pub fn scalar(s: C64) -> Self {
        Self::diag(s, s)
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.0[i][j]
    }

    pub fn trace(&self) -> C64 {
        self.0[0][0] + self.0[1][1]
    }

    pub fn det(&self) -> C64 {
        self.0[0][0] * self.0[1][1] - self.0[0][1] * self.0[1][0]
    }

    pub fn scale(&self, s: C64) -> Self {
        let m = &self.0;
        Mat2([[m[0][0] * s, m[0][1] * s], [m[1][0] * s, m[1][1] * s]])
    }

    pub fn inverse(&self) -> Option<Self> {
        let det = self.det();
        if det.norm() == 0.0 || !det.is_finite() {
            return None;
        }
        let m = &self.0;
        Some(Mat2([[m[1][1], -m[0][1]], [-m[1][0], m[0][0]]]).scale(det.inv()))
    }

    pub fn commutator(&self, other: &Self) -> Self {
        *self * *other - *other * *self
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.0.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Max-entry distance to `other`.
    pub fn dist(&self, other: &Self) -> f64 {
        (*self - *other).max_abs()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().flatten().all(|z| z.is_finite())
    }

    /// Eigenvalues (tr ± sqrt(tr² − 4 det)) / 2.
    pub fn eigenvalues(&self) -> (C64, C64) {
        let half_tr = self.trace() * 0.5;
        let root = (half_tr * half_tr - self.det()).sqrt();
        (half_tr + root, half_tr - root)
    }

    /// Matrix exponential by the Cayley–Hamilton closed form
    /// `exp(X) = e^m (cosh δ · I + sinh(δ)/δ · (X − m I))`, `m = tr X / 2`,
    /// `δ² = m² − det X`; valid for repeated eigenvalues as well.
    pub fn expm(&self) -> Self {
        let m = self.trace() * 0.5;
        let delta = (m * m - self.det()).sqrt();
        let (cosh, sinhc) = if delta.norm() < 1e-4 {
            let d2 = delta * delta;
            (
                1.0 + d2 / 2.0 + d2 * d2 / 24.0 + d2 * d2 * d2 / 720.0,
                1.0 + d2 / 6.0 + d2 * d2 / 120.0 + d2 * d2 * d2 / 5040.0,
            )
        } else {
            (delta.cosh(), delta.sinh() / delta)
        };
        let shifted = *self - Mat2::scalar(m);
        (Mat2::scalar(cosh) + shifted.scale(sinhc)).scale(m.exp())
    }

    /// Row-major `[re, im]` flattening used by the real-valued integrator.
    pub fn to_flat(&self) -> [f64; 8] {
        let mut out = [0.0; 8];
        for (k, z) in self.0.iter().flatten().enumerate() {
            out[2 * k] = z.re;
            out[2 * k + 1] = z.im;
        }
        out
    }

    pub fn from_flat(v: &[f64]) -> Self {
        let c = |k: usize| C64::new(v[2 * k], v[2 * k + 1]);
        Mat2([[c(0), c(1)], [c(2), c(3)]])
    }
}

impl Add for Mat2 {
    type Output = Mat2;
    fn add(self, o: Mat2) -> Mat2 {
        let (a, b) = (&self.0, &o.0);
        Mat2([
            [a[0][0] + b[0][0], a[0][1] + b[0][1]],
            [a[1][0] + b[1][0], a[1][1] + b[1][1]],
        ])
    }
}

impl Sub for Mat2 {
    type Output = Mat2;
    fn sub(self, o: Mat2) -> Mat2 {
        let (a, b) = (&self.0, &o.0);
        Mat2([
            [a[0][0] - b[0][0], a[0][1] - b[0][1]],
            [a[1][0] - b[1][0], a[1][1] - b[1][1]],
        ])
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, o: Mat2) -> Mat2 {
        let (a, b) = (&self.0, &o.0);
        Mat2([
            [
                a[0][0] * b[0][0] + a[0][1] * b[1][0],
                a[0][0] * b[0][1] + a[0][1] * b[1][1],
            ],
            [
                a[1][0] * b[0][0] + a[1][1] * b[1][0],
                a[1][0] * b[0][1] + a[1][1] * b[1][1],
            ],
        ])
    }
}
