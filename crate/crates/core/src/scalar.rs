//! Scalar abstractions shared by the cocycle and trace-map code: a common
//! trait for real and complex energies, and a sign/log-magnitude
//! representation for quantities that outgrow `f64`.

#![allow(clippy::should_implement_trait)]

use num_complex::{Complex64, ComplexFloat};

/// Energy parameter of a cocycle: either `f64` or `Complex64`.
pub trait Energy: ComplexFloat<Real = f64> + std::fmt::Debug + Send + Sync + 'static {
    fn from_real(x: f64) -> Self;
    fn real_part(self) -> f64;
    fn imag_part(self) -> f64;
}

impl Energy for f64 {
    fn from_real(x: f64) -> Self {
        x
    }
    fn real_part(self) -> f64 {
        self
    }
    fn imag_part(self) -> f64 {
        0.0
    }
}

impl Energy for Complex64 {
    fn from_real(x: f64) -> Self {
        Complex64::new(x, 0.0)
    }
    fn real_part(self) -> f64 {
        self.re
    }
    fn imag_part(self) -> f64 {
        self.im
    }
}

/// A real number stored as `sign * exp(ln_abs)`.
///
/// Used once orbit values pass the plain-float threshold: the trace recursion
/// grows doubly exponentially, so magnitudes are compared through logarithms.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct LogReal {
    /// -1, 0, or +1.
    pub sign: i8,
    /// ln |value|; meaningless when `sign == 0`.
    pub ln_abs: f64,
}

impl LogReal {
    pub const ZERO: LogReal = LogReal {
        sign: 0,
        ln_abs: f64::NEG_INFINITY,
    };

    pub fn from_f64(x: f64) -> Self {
        if x == 0.0 {
            Self::ZERO
        } else {
            LogReal {
                sign: if x > 0.0 { 1 } else { -1 },
                ln_abs: x.abs().ln(),
            }
        }
    }

    /// Back to `f64`; overflows to signed infinity.
    pub fn to_f64(self) -> f64 {
        self.sign as f64 * self.ln_abs.exp()
    }

    pub fn is_zero(self) -> bool {
        self.sign == 0
    }

    pub fn abs_ln(self) -> f64 {
        self.ln_abs
    }

    pub fn mul(self, other: Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::ZERO;
        }
        LogReal {
            sign: self.sign * other.sign,
            ln_abs: self.ln_abs + other.ln_abs,
        }
    }

    pub fn scale(self, c: f64) -> Self {
        self.mul(Self::from_f64(c))
    }

    /// Exact-as-possible sum. Cancellation between nearly equal magnitudes is
    /// handled through `ln_1p`; the caller is expected to stay away from exact
    /// cancellation (the escape regime guarantees dominance).
    pub fn add(self, other: Self) -> Self {
        if self.is_zero() {
            return other;
        }
        if other.is_zero() {
            return self;
        }
        let (big, small) = if self.ln_abs >= other.ln_abs {
            (self, other)
        } else {
            (other, self)
        };
        let ratio = (small.ln_abs - big.ln_abs).exp(); // in [0, 1]
        let signed = if big.sign == small.sign {
            1.0 + ratio
        } else {
            1.0 - ratio
        };
        if signed == 0.0 {
            return Self::ZERO;
        }
        LogReal {
            sign: big.sign * if signed > 0.0 { 1 } else { -1 },
            ln_abs: big.ln_abs + signed.abs().ln(),
        }
    }

    /// Compare |self| with |other|.
    pub fn abs_cmp(self, other: Self) -> std::cmp::Ordering {
        match (self.is_zero(), other.is_zero()) {
            (true, true) => std::cmp::Ordering::Equal,
            (true, false) => std::cmp::Ordering::Less,
            (false, true) => std::cmp::Ordering::Greater,
            _ => self
                .ln_abs
                .partial_cmp(&other.ln_abs)
                .unwrap_or(std::cmp::Ordering::Equal),
        }
    }

    /// |self| > c for positive c.
    pub fn abs_gt(self, c: f64) -> bool {
        !self.is_zero() && self.ln_abs > c.ln()
    }
}

impl std::ops::Neg for LogReal {
    type Output = LogReal;
    fn neg(self) -> LogReal {
        LogReal {
            sign: -self.sign,
            ln_abs: self.ln_abs,
        }
    }
}

/// Complex analogue: `unit * exp(ln_abs)` with `|unit| = 1`.
#[derive(Clone, Copy, Debug)]
pub struct LogComplex {
    pub unit: Complex64,
    pub ln_abs: f64,
}

impl LogComplex {
    pub const ZERO: LogComplex = LogComplex {
        unit: Complex64::new(0.0, 0.0),
        ln_abs: f64::NEG_INFINITY,
    };

    pub fn from_c64(z: Complex64) -> Self {
        let r = z.norm();
        if r == 0.0 {
            Self::ZERO
        } else {
            LogComplex {
                unit: z / r,
                ln_abs: r.ln(),
            }
        }
    }

    pub fn is_zero(self) -> bool {
        self.unit.norm_sqr() == 0.0
    }

    pub fn to_c64(self) -> Complex64 {
        self.unit * self.ln_abs.exp()
    }

    pub fn mul(self, other: Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::ZERO;
        }
        let unit = self.unit * other.unit;
        let n = unit.norm();
        LogComplex {
            unit: unit / n,
            ln_abs: self.ln_abs + other.ln_abs + n.ln(),
        }
    }

    pub fn scale(self, c: f64) -> Self {
        if c == 0.0 || self.is_zero() {
            return Self::ZERO;
        }
        LogComplex {
            unit: if c > 0.0 { self.unit } else { -self.unit },
            ln_abs: self.ln_abs + c.abs().ln(),
        }
    }

    pub fn add(self, other: Self) -> Self {
        if self.is_zero() {
            return other;
        }
        if other.is_zero() {
            return self;
        }
        let (big, small) = if self.ln_abs >= other.ln_abs {
            (self, other)
        } else {
            (other, self)
        };
        let z = big.unit + small.unit * (small.ln_abs - big.ln_abs).exp();
        let n = z.norm();
        if n == 0.0 {
            return Self::ZERO;
        }
        LogComplex {
            unit: z / n,
            ln_abs: big.ln_abs + n.ln(),
        }
    }

    pub fn abs_gt(self, c: f64) -> bool {
        !self.is_zero() && self.ln_abs > c.ln()
    }
}
