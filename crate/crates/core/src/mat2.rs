//! 2x2 matrices over real or complex scalars.
//!
//! Transfer matrices are unimodular, so the closed-form singular values
//! `s_max^2 = (F + sqrt(F^2 - 4|det|^2))/2` (with `F` the squared Frobenius
//! norm) give the spectral norm without any iteration.

use crate::scalar::Energy;

/// Row-major 2x2 matrix `[[a, b], [c, d]]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Matrix2<T> {
    pub a: T,
    pub b: T,
    pub c: T,
    pub d: T,
}

impl<T: Energy> Matrix2<T> {
    pub fn new(a: T, b: T, c: T, d: T) -> Self {
        Matrix2 { a, b, c, d }
    }

    pub fn identity() -> Self {
        let one = T::from_real(1.0);
        let zero = T::from_real(0.0);
        Matrix2 {
            a: one,
            b: zero,
            c: zero,
            d: one,
        }
    }

    /// One-step transfer matrix `[[E - v, -1], [1, 0]]`.
    pub fn transfer(e: T, v: f64) -> Self {
        Matrix2 {
            a: e - T::from_real(v),
            b: T::from_real(-1.0),
            c: T::from_real(1.0),
            d: T::from_real(0.0),
        }
    }

    /// `self * rhs` (matrix product, self on the left).
    pub fn mul(&self, rhs: &Self) -> Self {
        Matrix2 {
            a: self.a * rhs.a + self.b * rhs.c,
            b: self.a * rhs.b + self.b * rhs.d,
            c: self.c * rhs.a + self.d * rhs.c,
            d: self.c * rhs.b + self.d * rhs.d,
        }
    }

    pub fn det(&self) -> T {
        self.a * self.d - self.b * self.c
    }

    pub fn trace(&self) -> T {
        self.a + self.d
    }

    /// Inverse assuming det = 1.
    pub fn inverse_unimodular(&self) -> Self {
        Matrix2 {
            a: self.d,
            b: -self.b,
            c: -self.c,
            d: self.a,
        }
    }

    pub fn apply(&self, v: (T, T)) -> (T, T) {
        (self.a * v.0 + self.b * v.1, self.c * v.0 + self.d * v.1)
    }

    pub fn scale(&self, s: f64) -> Self {
        let s = T::from_real(s);
        Matrix2 {
            a: self.a * s,
            b: self.b * s,
            c: self.c * s,
            d: self.d * s,
        }
    }

    pub fn frobenius_sq(&self) -> f64 {
        let sq = |x: T| {
            let m = x.abs();
            m * m
        };
        sq(self.a) + sq(self.b) + sq(self.c) + sq(self.d)
    }

    pub fn max_abs(&self) -> f64 {
        self.a
            .abs()
            .max(self.b.abs())
            .max(self.c.abs())
            .max(self.d.abs())
    }

    /// Largest singular value, in closed form.
    pub fn spectral_norm(&self) -> f64 {
        let f = self.frobenius_sq();
        let det = self.det().abs();
        let disc = (f * f - 4.0 * det * det).max(0.0);
        (0.5 * (f + disc.sqrt())).sqrt()
    }
}
