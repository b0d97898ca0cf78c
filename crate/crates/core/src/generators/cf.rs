//! Continued fractions with exact convergents.
//!
//! Convergents are kept as big integers so rotation sequences can be
//! evaluated with exact integer arithmetic at depths far beyond what `f64`
//! resolves. Floating-point input is expanded by running the Euclidean
//! algorithm on the exact dyadic value of the float, which keeps every
//! computed coefficient faithful to the input bit pattern.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

use super::GeneratorsError;

#[derive(Clone, Debug)]
pub struct ContinuedFraction {
    /// a_1, a_2, ... (all >= 1).
    coefficients: Vec<u64>,
    /// p[k], q[k] for k = 0..=depth with p0 = 0, p1 = 1, q0 = 1, q1 = a1.
    p: Vec<BigUint>,
    q: Vec<BigUint>,
}

impl ContinuedFraction {
    pub fn from_coefficients(coefficients: &[u64]) -> Result<Self, GeneratorsError> {
        if coefficients.is_empty() || coefficients.contains(&0) {
            return Err(GeneratorsError::InvalidCoefficients);
        }
        let mut p = vec![BigUint::zero(), BigUint::one()];
        let mut q = vec![BigUint::one(), BigUint::from(coefficients[0])];
        for (k, &a) in coefficients.iter().enumerate().skip(1) {
            let a = BigUint::from(a);
            p.push(&a * &p[k] + &p[k - 1]);
            q.push(&a * &q[k] + &q[k - 1]);
        }
        // p1/q1 = 1/a1 needs its predecessor to make a straddling pair
        Ok(ContinuedFraction {
            coefficients: coefficients.to_vec(),
            p,
            q,
        })
    }

    /// All coefficients equal to `a` (golden mean inverse for `a = 1`).
    pub fn constant(a: u64, depth: usize) -> Self {
        Self::from_coefficients(&vec![a; depth]).expect("constant coefficients")
    }

    /// Golden rotation number (sqrt(5)-1)/2 = [1, 1, 1, ...].
    pub fn golden(depth: usize) -> Self {
        Self::constant(1, depth)
    }

    /// Expansion of a float in (0, 1). The float is treated as the exact
    /// dyadic rational it encodes; if the expansion terminates before `depth`
    /// the input was rational and an error reports the fraction found.
    pub fn from_f64(theta: f64, depth: usize) -> Result<Self, GeneratorsError> {
        if !(theta > 0.0 && theta < 1.0) || !theta.is_finite() {
            return Err(GeneratorsError::ThetaOutOfRange { theta });
        }
        if depth == 0 {
            return Err(GeneratorsError::InvalidCoefficients);
        }
        // exact fraction num/den of the float
        let (mut num, mut den) = dyadic_fraction(theta);
        let mut coefficients = Vec::with_capacity(depth);
        // Euclidean algorithm on 1/theta
        std::mem::swap(&mut num, &mut den);
        while coefficients.len() < depth {
            let a = &num / &den;
            let r = &num % &den;
            coefficients.push(a.to_u64().ok_or(GeneratorsError::InvalidCoefficients)?);
            if r.is_zero() {
                let cf = Self::from_coefficients(&coefficients)?;
                let (p, q) = cf.convergent(coefficients.len());
                return Err(GeneratorsError::RationalTheta {
                    num: p.to_u64().unwrap_or(u64::MAX),
                    den: q.to_u64().unwrap_or(u64::MAX),
                    depth: coefficients.len(),
                });
            }
            num = den;
            den = r;
        }
        let cf = Self::from_coefficients(&coefficients)?;
        debug_assert!(cf.approximation_quality_ok(theta));
        Ok(cf)
    }

    /// Best-approximant property |theta - p_k/q_k| < 1/q_k^2 against the f64
    /// value, checked at every depth that f64 can resolve.
    pub fn approximation_quality_ok(&self, theta: f64) -> bool {
        (1..=self.depth()).all(|k| {
            let (p, q) = self.convergent_f64(k);
            if q > 1e7 {
                return true; // beyond float resolution
            }
            (theta - p / q).abs() < 1.0 / (q * q)
        })
    }

    pub fn depth(&self) -> usize {
        self.coefficients.len()
    }

    pub fn coefficients(&self) -> &[u64] {
        &self.coefficients
    }

    pub fn coefficient(&self, k: usize) -> u64 {
        self.coefficients[k - 1]
    }

    /// (p_k, q_k); `k = 0` gives 0/1.
    pub fn convergent(&self, k: usize) -> (&BigUint, &BigUint) {
        (&self.p[k], &self.q[k])
    }

    pub fn convergent_f64(&self, k: usize) -> (f64, f64) {
        (
            self.p[k].to_f64().unwrap_or(f64::INFINITY),
            self.q[k].to_f64().unwrap_or(f64::INFINITY),
        )
    }

    pub fn q_u128(&self, k: usize) -> Option<u128> {
        self.q[k].to_u128()
    }

    pub fn p_u128(&self, k: usize) -> Option<u128> {
        self.p[k].to_u128()
    }

    /// theta as f64, from the deepest convergent.
    pub fn theta(&self) -> f64 {
        let (p, q) = self.convergent_f64(self.depth());
        if q.is_finite() {
            p / q
        } else {
            // walk down to the deepest convergent that fits
            let k = (0..=self.depth())
                .rev()
                .find(|&k| self.q[k].to_f64().map(|v| v.is_finite()).unwrap_or(false))
                .unwrap();
            let (p, q) = self.convergent_f64(k);
            p / q
        }
    }

    #[cfg(test)]
    pub(crate) fn gcd_check(&self) -> bool {
        (1..=self.depth()).all(|k| {
            let mut a = self.p[k].clone();
            let mut b = self.q[k].clone();
            while !b.is_zero() {
                let t = &a % &b;
                a = b;
                b = t;
            }
            a.is_one()
        })
    }
}

fn dyadic_fraction(x: f64) -> (BigUint, BigUint) {
    // x in (0,1): x = mantissa * 2^exp with exp < 0
    let bits = x.to_bits();
    let exponent = ((bits >> 52) & 0x7ff) as i64 - 1075;
    let mantissa = if (bits >> 52) & 0x7ff == 0 {
        bits & 0xf_ffff_ffff_ffff
    } else {
        (bits & 0xf_ffff_ffff_ffff) | (1 << 52)
    };
    let num = BigUint::from(mantissa);
    assert!(exponent < 0);
    let den = BigUint::one() << ((-exponent) as usize);
    (num, den)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_coefficients_and_fibonacci_denominators() {
        let theta = (5f64.sqrt() - 1.0) / 2.0;
        let cf = ContinuedFraction::from_f64(theta, 10).unwrap();
        assert!(cf.coefficients().iter().all(|&a| a == 1));
        let q: Vec<u64> = (1..=10).map(|k| cf.q_u128(k).unwrap() as u64).collect();
        assert_eq!(q, vec![1, 2, 3, 5, 8, 13, 21, 34, 55, 89]);
        assert!(cf.gcd_check());
    }

    #[test]
    fn silver_mean_coefficients() {
        // sqrt(2) - 1 = [2, 2, 2, ...]
        let theta = 2f64.sqrt() - 1.0;
        let cf = ContinuedFraction::from_f64(theta, 6).unwrap();
        assert_eq!(cf.coefficients(), &[2, 2, 2, 2, 2, 2]);
        // q: 2, 5, 12, 29, 70, 169
        assert_eq!(cf.q_u128(3).unwrap(), 12);
    }

    #[test]
    fn rational_input_is_rejected_with_fraction() {
        let err = ContinuedFraction::from_f64(0.5, 8).unwrap_err();
        match err {
            GeneratorsError::RationalTheta { num, den, depth } => {
                assert_eq!((num, den), (1, 2));
                assert_eq!(depth, 1);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn convergents_straddle_theta() {
        let theta = (5f64.sqrt() - 1.0) / 2.0;
        let cf = ContinuedFraction::from_f64(theta, 12).unwrap();
        for k in 0..10 {
            let (p0, q0) = cf.convergent_f64(k);
            let (p1, q1) = cf.convergent_f64(k + 1);
            let lo = (p0 / q0).min(p1 / q1);
            let hi = (p0 / q0).max(p1 / q1);
            assert!(lo < theta && theta < hi, "k={k}");
        }
    }

    #[test]
    fn quality_bound_holds() {
        for theta in [
            (5f64.sqrt() - 1.0) / 2.0,
            2f64.sqrt() - 1.0,
            std::f64::consts::PI - 3.0,
        ] {
            let cf = ContinuedFraction::from_f64(theta, 8).unwrap();
            assert!(cf.approximation_quality_ok(theta));
        }
    }
}
