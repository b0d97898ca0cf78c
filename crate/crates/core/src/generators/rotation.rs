//! Codings of circle rotations with respect to a partition into half-open
//! intervals `[c_i, c_{i+1})`.
//!
//! Cut points may involve the rotation number itself (e.g. `1 - theta` for
//! the Sturmian reduction), so they are represented as `num/den + coeff * theta`
//! and all membership tests go through the exact floor machinery.

use serde::{Deserialize, Serialize};

use super::cf::ContinuedFraction;
use super::sturmian::{floor_m_theta_plus_rational, PHASE_DENOM_LOG2};
use super::GeneratorsError;
use crate::words::{Alphabet, Window};

/// A point of the circle written as `num/den + theta_coeff * theta (mod 1)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CircleCoordinate {
    pub num: i64,
    pub den: u64,
    pub theta_coeff: i64,
}

impl CircleCoordinate {
    pub fn rational(num: i64, den: u64) -> Self {
        CircleCoordinate {
            num,
            den,
            theta_coeff: 0,
        }
    }

    /// `1 - theta`, the Sturmian cut point.
    pub fn one_minus_theta() -> Self {
        CircleCoordinate {
            num: 1,
            den: 1,
            theta_coeff: -1,
        }
    }

    /// Approximate numeric value for a given theta.
    pub fn value(&self, theta: f64) -> f64 {
        self.num as f64 / self.den as f64 + self.theta_coeff as f64 * theta
    }
}

#[derive(Clone, Debug)]
pub struct RotationCoding {
    cf: ContinuedFraction,
    /// phi = phi_num / 2^63.
    phi_num: u128,
    /// Interior cut points, strictly increasing, all in (0, 1). Together with
    /// 0 they delimit `l = cuts.len() + 1` intervals.
    cuts: Vec<CircleCoordinate>,
    labels: Vec<u32>,
    alphabet: Alphabet,
}

impl RotationCoding {
    pub fn new(
        cf: ContinuedFraction,
        phi: f64,
        cuts: Vec<CircleCoordinate>,
        labels: Vec<u32>,
    ) -> Result<Self, GeneratorsError> {
        if !(0.0..1.0).contains(&phi) {
            return Err(GeneratorsError::PhiOutOfRange { phi });
        }
        if labels.len() != cuts.len() + 1 {
            return Err(GeneratorsError::BadPartition {
                reason: format!("{} labels for {} intervals", labels.len(), cuts.len() + 1),
            });
        }
        // exact validation: 0 < c_1 < c_2 < ... < 1
        let zero = CircleCoordinate::rational(0, 1);
        let one = CircleCoordinate::rational(1, 1);
        let mut prev = zero;
        for (i, c) in cuts.iter().enumerate() {
            if compare_coordinates(&cf, &prev, c)? != std::cmp::Ordering::Less {
                return Err(GeneratorsError::BadPartition {
                    reason: format!("cut {i} is not strictly increasing"),
                });
            }
            prev = *c;
        }
        if compare_coordinates(&cf, &prev, &one)? != std::cmp::Ordering::Less {
            return Err(GeneratorsError::BadPartition {
                reason: "last cut must be below 1".to_string(),
            });
        }
        let phi_num = (phi * 2f64.powi(PHASE_DENOM_LOG2 as i32)) as u128;
        let alphabet = Alphabet::from_labels(&labels);
        Ok(RotationCoding {
            cf,
            phi_num,
            cuts,
            labels,
            alphabet,
        })
    }

    /// Two-interval coding `[0, 1-theta), [1-theta, 1)` with the given labels.
    pub fn sturmian_partition(
        cf: ContinuedFraction,
        phi: f64,
        labels: (u32, u32),
    ) -> Result<Self, GeneratorsError> {
        RotationCoding::new(
            cf,
            phi,
            vec![CircleCoordinate::one_minus_theta()],
            vec![labels.0, labels.1],
        )
    }

    pub fn theta(&self) -> f64 {
        self.cf.theta()
    }

    /// Index of the interval containing `{n theta + phi}`.
    pub fn interval_index(&self, n: i64) -> Result<usize, GeneratorsError> {
        let mut idx = 0;
        for (i, c) in self.cuts.iter().enumerate() {
            if self.frac_at_least(n, c)? {
                idx = i + 1;
            } else {
                break;
            }
        }
        Ok(idx)
    }

    /// `{n theta + phi} >= c`, exactly: equivalent to
    /// `floor(x - c) == floor(x)` for `x = n theta + phi`.
    fn frac_at_least(&self, n: i64, c: &CircleCoordinate) -> Result<bool, GeneratorsError> {
        let phase_den: u128 = 1 << PHASE_DENOM_LOG2;
        let fx = floor_m_theta_plus_rational(&self.cf, n as i128, self.phi_num as i128, phase_den)?;
        // x - c = (n - s) theta + (phi - num/den); common denominator den * 2^63
        let m = n as i128 - c.theta_coeff as i128;
        let num = self.phi_num as i128 * c.den as i128 - c.num as i128 * phase_den as i128;
        let den = c.den as u128 * phase_den;
        let fxc = floor_m_theta_plus_rational(&self.cf, m, num, den)?;
        Ok(fxc == fx)
    }

    pub fn symbol_label(&self, n: i64) -> Result<u32, GeneratorsError> {
        Ok(self.labels[self.interval_index(n)?])
    }

    pub fn window(&self, from: i64, to: i64) -> Result<Window, GeneratorsError> {
        if to <= from {
            return Err(GeneratorsError::EmptyRange);
        }
        let symbols = (from..to)
            .map(|n| {
                self.interval_index(n)
                    .map(|i| self.alphabet.canonical_of(self.labels[i]).unwrap())
            })
            .collect::<Result<Vec<u8>, _>>()?;
        Ok(Window::from_canonical_parts(
            from,
            symbols,
            self.alphabet.clone(),
        )?)
    }
}

/// Exact order of two circle coordinates for irrational theta.
fn compare_coordinates(
    cf: &ContinuedFraction,
    a: &CircleCoordinate,
    b: &CircleCoordinate,
) -> Result<std::cmp::Ordering, GeneratorsError> {
    use std::cmp::Ordering;
    // a - b = dr + ds * theta with dr rational
    let dr_num = a.num as i128 * b.den as i128 - b.num as i128 * a.den as i128;
    let dr_den = a.den as i128 * b.den as i128;
    let ds = a.theta_coeff as i128 - b.theta_coeff as i128;
    if ds == 0 {
        return Ok((dr_num * dr_den.signum()).cmp(&0));
    }
    // sign of dr + ds*theta, theta sandwiched between consecutive convergents
    let exact_side = |p: &num_bigint::BigUint, q: &num_bigint::BigUint| {
        use num_bigint::BigInt;
        let p = BigInt::from(p.clone());
        let q = BigInt::from(q.clone());
        // sign of (dr_num*q + ds*dr_den*p) / (dr_den*q)
        let v = BigInt::from(dr_num) * &q + BigInt::from(ds) * BigInt::from(dr_den) * p;
        (v * BigInt::from(dr_den.signum())).sign()
    };
    for k in 0..cf.depth() {
        let (bp0, bq0) = cf.convergent(k);
        let (bp1, bq1) = cf.convergent(k + 1);
        let e0 = exact_side(bp0, bq0);
        let e1 = exact_side(bp1, bq1);
        if e0 == e1 && e0 != num_bigint::Sign::NoSign {
            return Ok(if e0 == num_bigint::Sign::Minus {
                Ordering::Less
            } else {
                Ordering::Greater
            });
        }
    }
    Err(GeneratorsError::DepthExhausted)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{EndpointVariant, SturmianParams};

    fn golden_cf() -> ContinuedFraction {
        ContinuedFraction::golden(160)
    }

    #[test]
    fn two_interval_coding_reproduces_sturmian() {
        let rc = RotationCoding::sturmian_partition(golden_cf(), 0.0, (0, 1)).unwrap();
        let sp = SturmianParams::golden(0.0, EndpointVariant::LeftClosed);
        let a = rc.window(1, 10_001).unwrap();
        let b = sp.window(1, 10_001).unwrap();
        assert_eq!(a.canonical(), b.canonical());
    }

    #[test]
    fn single_interval_is_constant() {
        let rc = RotationCoding::new(golden_cf(), 0.25, vec![], vec![7]).unwrap();
        let w = rc.window(0, 64).unwrap();
        assert!(w.labels().iter().all(|&l| l == 7));
    }

    #[test]
    fn three_equal_thirds_complexity_eventually_affine() {
        let cuts = vec![
            CircleCoordinate::rational(1, 3),
            CircleCoordinate::rational(2, 3),
        ];
        let rc = RotationCoding::new(golden_cf(), 0.0, cuts, vec![0, 1, 2]).unwrap();
        let w = rc.window(0, 4096).unwrap();
        let profile = crate::words::complexity_profile(&w, 24).unwrap();
        // eventually affine: constant second difference, slope a, intercept b
        let diffs: Vec<i64> = (8..24)
            .map(|n| profile.p(n + 1) as i64 - profile.p(n) as i64)
            .collect();
        assert!(
            diffs.windows(2).all(|w| w[0] == w[1]),
            "slope not constant: {diffs:?}"
        );
        let a = diffs[0];
        let b = profile.p(10) as i64 - a * 10;
        for n in 10..24 {
            assert_eq!(profile.p(n) as i64, a * n as i64 + b, "n={n}");
        }
        assert!(a >= 1);
    }

    #[test]
    fn rejects_bad_partitions() {
        // overlapping cuts
        let cuts = vec![
            CircleCoordinate::rational(1, 2),
            CircleCoordinate::rational(1, 3),
        ];
        let err = RotationCoding::new(golden_cf(), 0.0, cuts, vec![0, 1, 2]);
        assert!(err.is_err());
        // cut at 1
        let cuts = vec![CircleCoordinate::rational(1, 1)];
        assert!(RotationCoding::new(golden_cf(), 0.0, cuts, vec![0, 1]).is_err());
    }

    #[test]
    fn float_crosscheck_generic_phase() {
        let cuts = vec![
            CircleCoordinate::rational(2, 7),
            CircleCoordinate::one_minus_theta(),
        ];
        let rc = RotationCoding::new(golden_cf(), 0.41, cuts.clone(), vec![0, 1, 2]).unwrap();
        let theta = rc.theta();
        let w = rc.window(-300, 300).unwrap();
        for n in -300i64..300 {
            let x = (n as f64 * theta + 0.41).rem_euclid(1.0);
            let mut expect = 0;
            for (i, c) in cuts.iter().enumerate() {
                if x >= c.value(theta) {
                    expect = i + 1;
                }
            }
            assert_eq!(w.label_at(n).unwrap(), expect as u32, "n={n}");
        }
    }
}
