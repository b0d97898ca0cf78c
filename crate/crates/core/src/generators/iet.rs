//! Interval exchange transformations and their symbolic codings.

use serde::{Deserialize, Serialize};

use super::GeneratorsError;
use crate::words::{Alphabet, Window};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct IetParams {
    /// Interval lengths, positive, summing to 1.
    lambda: Vec<f64>,
    /// Permutation: interval i (0-based) moves to slot tau[i] (0-based).
    tau: Vec<usize>,
    /// mu[i] = lambda_1 + ... + lambda_i (mu[0] = 0).
    mu: Vec<f64>,
    /// Cumulative sums of the permuted lengths.
    mu_tau: Vec<f64>,
}

pub const SUM_TOLERANCE: f64 = 1e-12;

impl IetParams {
    /// `tau` is given 1-based as in cycle-free one-line notation:
    /// `tau[i]` is the new (1-based) slot of interval `i+1`.
    pub fn new(lambda: Vec<f64>, tau_one_based: Vec<usize>) -> Result<Self, GeneratorsError> {
        let m = lambda.len();
        let sum: f64 = lambda.iter().sum();
        if m == 0 || lambda.iter().any(|&l| l <= 0.0) || (sum - 1.0).abs() > SUM_TOLERANCE {
            return Err(GeneratorsError::BadLengths { sum });
        }
        if tau_one_based.len() != m {
            return Err(GeneratorsError::BadPermutation);
        }
        let mut seen = vec![false; m];
        for &t in &tau_one_based {
            if t == 0 || t > m || seen[t - 1] {
                return Err(GeneratorsError::BadPermutation);
            }
            seen[t - 1] = true;
        }
        let tau: Vec<usize> = tau_one_based.iter().map(|&t| t - 1).collect();
        // lambda^tau: lengths ordered by destination slot
        let mut lambda_tau = vec![0.0; m];
        for i in 0..m {
            lambda_tau[tau[i]] = lambda[i];
        }
        let cumsum = |v: &[f64]| {
            let mut acc = vec![0.0; v.len() + 1];
            for (i, &x) in v.iter().enumerate() {
                acc[i + 1] = acc[i] + x;
            }
            acc
        };
        let mu = cumsum(&lambda);
        let mu_tau = cumsum(&lambda_tau);
        Ok(IetParams {
            lambda,
            tau,
            mu,
            mu_tau,
        })
    }

    pub fn intervals(&self) -> usize {
        self.lambda.len()
    }

    pub fn lengths(&self) -> &[f64] {
        &self.lambda
    }

    /// 0-based interval index of a point.
    pub fn interval_of(&self, x: f64) -> usize {
        debug_assert!((0.0..1.0).contains(&x));
        match self.mu[1..].binary_search_by(|m| m.partial_cmp(&x).unwrap()) {
            Ok(i) => i + 1, // x == mu[i+1] starts the next interval
            Err(i) => i,
        }
        .min(self.lambda.len() - 1)
    }

    pub fn apply(&self, x: f64) -> f64 {
        let i = self.interval_of(x);
        // clamp float drift at the top edge back into [0, 1)
        (x - self.mu[i] + self.mu_tau[self.tau[i]]).clamp(0.0, 1.0 - f64::EPSILON)
    }

    /// The inverse transformation, exchanged by (lambda^tau, tau^{-1}).
    pub fn inverse(&self) -> IetParams {
        let m = self.lambda.len();
        let mut lambda_tau = vec![0.0; m];
        for i in 0..m {
            lambda_tau[self.tau[i]] = self.lambda[i];
        }
        let mut tau_inv = vec![0; m];
        for i in 0..m {
            tau_inv[self.tau[i]] = i + 1;
        }
        IetParams::new(lambda_tau, tau_inv).expect("inverse parameters valid")
    }

    /// Discontinuity points mu_1, ..., mu_{m-1}.
    pub fn discontinuities(&self) -> &[f64] {
        &self.mu[1..self.mu.len() - 1]
    }

    /// Symbolic coding of the orbit of `x0` over the index range. Negative
    /// indices use the inverse transformation.
    pub fn coding_window(&self, x0: f64, from: i64, to: i64) -> Result<Window, GeneratorsError> {
        if to <= from || !(0.0..1.0).contains(&x0) {
            return Err(GeneratorsError::EmptyRange);
        }
        let labels: Vec<u32> = (1..=self.lambda.len() as u32).collect();
        let alphabet = Alphabet::from_labels(&labels);
        let inv = self.inverse();
        let len = (to - from) as usize;
        let mut symbols = vec![0u8; len];
        // forward part: n >= 0
        let mut x = x0;
        for n in 0..to.max(0) {
            if n >= from {
                symbols[(n - from) as usize] = self.interval_of(x) as u8;
            }
            x = self.apply(x);
        }
        // backward part: n < 0
        let mut x = x0;
        for n in (from.min(0)..0).rev() {
            x = inv.apply(x);
            if n < to {
                symbols[(n - from) as usize] = self.interval_of(x) as u8;
            }
        }
        Ok(Window::from_canonical_parts(from, symbols, alphabet)?)
    }

    /// Looks for collisions among the forward orbits of the discontinuities
    /// within the horizon. Finding none does not prove minimality; finding one
    /// falsifies the infinite-distinct-orbits condition at this resolution.
    pub fn keane_check(&self, horizon: usize) -> KeaneReport {
        const TOL: f64 = 1e-12;
        let mut points: Vec<(f64, usize, usize)> = Vec::new(); // (value, disc index, step)
        for (i, &d) in self.discontinuities().iter().enumerate() {
            let mut x = d;
            for step in 0..horizon {
                points.push((x, i, step));
                x = self.apply(x);
            }
        }
        points.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        for w in points.windows(2) {
            let (a, b) = (&w[0], &w[1]);
            if (b.0 - a.0).abs() < TOL && (a.1, a.2) != (b.1, b.2) {
                return KeaneReport {
                    collision: Some(KeaneCollision {
                        disc_a: a.1,
                        step_a: a.2,
                        disc_b: b.1,
                        step_b: b.2,
                        value: a.0,
                    }),
                    horizon,
                };
            }
        }
        KeaneReport {
            collision: None,
            horizon,
        }
    }
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct KeaneCollision {
    pub disc_a: usize,
    pub step_a: usize,
    pub disc_b: usize,
    pub step_b: usize,
    pub value: f64,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct KeaneReport {
    pub collision: Option<KeaneCollision>,
    pub horizon: usize,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{EndpointVariant, SturmianParams};

    fn golden_swap() -> IetParams {
        let theta = (5f64.sqrt() - 1.0) / 2.0;
        IetParams::new(vec![1.0 - theta, theta], vec![2, 1]).unwrap()
    }

    #[test]
    fn inverse_returns_start() {
        let t = golden_swap();
        let inv = t.inverse();
        for &x0 in &[0.05, 0.3, 0.6180339887, 0.95] {
            let y = t.apply(x0);
            assert!((inv.apply(y) - x0).abs() < 1e-12, "x0={x0}");
        }
        let t4 = IetParams::new(vec![0.15, 0.35, 0.1, 0.4], vec![3, 1, 4, 2]).unwrap();
        let inv4 = t4.inverse();
        for &x0 in &[0.01, 0.2, 0.55, 0.77, 0.99] {
            assert!((inv4.apply(t4.apply(x0)) - x0).abs() < 1e-12);
        }
    }

    #[test]
    fn two_interval_coding_is_sturmian_up_to_relabeling() {
        // exchanging [0, 1-theta) and [1-theta, 1) is the rotation by theta;
        // the coding of x0 = 0 matches the Sturmian sequence with symbol 1
        // on the second interval
        let t = golden_swap();
        let w = t.coding_window(0.0, 0, 2000).unwrap();
        let sp = SturmianParams::golden(0.0, EndpointVariant::LeftClosed);
        let sw = sp.window(0, 2000).unwrap();
        for n in 0..2000 {
            let iet_label = w.label_at(n).unwrap(); // 1 or 2
            let sturm = sw.symbol(n).unwrap(); // 0 or 1
            assert_eq!(iet_label - 1, sturm as u32, "n={n}");
        }
    }

    #[test]
    fn lebesgue_measure_preserved_on_grid() {
        // sorted image of a uniform grid is uniform up to one gap shift
        let t = IetParams::new(vec![0.15, 0.35, 0.1, 0.4], vec![3, 1, 4, 2]).unwrap();
        let m = 2048;
        let mut image: Vec<f64> = (0..m).map(|j| t.apply(j as f64 / m as f64)).collect();
        image.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (j, &y) in image.iter().enumerate() {
            assert!((y - j as f64 / m as f64).abs() < 1.5 / m as f64, "j={j}");
        }
    }

    #[test]
    fn keane_flags_rational_reducible_case() {
        // rational lengths with a reducible permutation: orbits collide fast
        let t = IetParams::new(vec![0.25, 0.25, 0.25, 0.25], vec![2, 1, 4, 3]).unwrap();
        let rep = t.keane_check(64);
        assert!(rep.collision.is_some());
    }

    #[test]
    fn keane_clean_for_golden_swap() {
        let rep = golden_swap().keane_check(10_000);
        assert!(rep.collision.is_none());
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(IetParams::new(vec![0.5, 0.4], vec![2, 1]).is_err());
        assert!(IetParams::new(vec![0.5, 0.5], vec![1, 1]).is_err());
        assert!(IetParams::new(vec![0.5, 0.5], vec![1, 3]).is_err());
    }
}
