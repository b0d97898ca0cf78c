//! Sturmian sequences evaluated with exact integer arithmetic.
//!
//! A symbol is a difference of floors, `s_n = floor((n+1)θ + φ) - floor(nθ + φ)`
//! for the left-closed indicator and the ceiling analogue for the right-closed
//! one. Floors of `mθ + r` are decided exactly by sandwiching θ between two
//! consecutive convergents: if both rationals give the same floor it is the
//! floor for θ. Windows use an incremental modular walk at one convergent
//! depth, verified against the next depth, falling back to the sandwich only
//! at the rare disagreements near interval endpoints. This keeps symbols
//! exact near the discontinuity of the indicator, where plain floating-point
//! evaluation silently picks the wrong endpoint convention.

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

use super::cf::ContinuedFraction;
use super::GeneratorsError;
use crate::words::{Alphabet, Window};

/// Endpoint convention of the coding interval.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum EndpointVariant {
    /// Indicator of `[1-θ, 1)`.
    LeftClosed,
    /// Indicator of `(1-θ, 1]`.
    RightClosed,
}

/// Denominator (as a power of two) used to quantize the phase.
pub const PHASE_DENOM_LOG2: u32 = 63;

#[derive(Clone, Debug)]
pub struct SturmianParams {
    cf: ContinuedFraction,
    /// φ = phi_num / 2^63, quantized from the input.
    phi_num: u128,
    variant: EndpointVariant,
}

impl SturmianParams {
    pub fn new(
        cf: ContinuedFraction,
        phi: f64,
        variant: EndpointVariant,
    ) -> Result<Self, GeneratorsError> {
        if !(0.0..1.0).contains(&phi) {
            return Err(GeneratorsError::PhiOutOfRange { phi });
        }
        let phi_num = (phi * 2f64.powi(PHASE_DENOM_LOG2 as i32)) as u128;
        Ok(SturmianParams {
            cf,
            phi_num,
            variant,
        })
    }

    pub fn golden(phi: f64, variant: EndpointVariant) -> Self {
        SturmianParams::new(ContinuedFraction::golden(160), phi, variant).unwrap()
    }

    pub fn cf(&self) -> &ContinuedFraction {
        &self.cf
    }

    pub fn theta(&self) -> f64 {
        self.cf.theta()
    }

    pub fn variant(&self) -> EndpointVariant {
        self.variant
    }

    pub fn phi_is_zero(&self) -> bool {
        self.phi_num == 0
    }

    /// Exact symbol at position `n`.
    pub fn symbol(&self, n: i64) -> Result<u8, GeneratorsError> {
        let f1 = self.floor_at(n + 1)?;
        let f0 = self.floor_at(n)?;
        let mut s = (f1 - f0) as u8;
        if self.variant == EndpointVariant::RightClosed && self.phi_num == 0 {
            // nθ + φ is an integer only at n = 0 when φ = 0; the ceiling
            // differs from floor+1 exactly there
            if n == -1 {
                s -= 1;
            }
            if n == 0 {
                s += 1;
            }
        }
        Ok(s)
    }

    /// floor(nθ + φ) for the quantized φ.
    fn floor_at(&self, n: i64) -> Result<i64, GeneratorsError> {
        floor_m_theta_plus_rational(
            &self.cf,
            n as i128,
            self.phi_num as i128,
            1u128 << PHASE_DENOM_LOG2,
        )
    }

    /// Exact window of symbols for positions `[from, to)`.
    pub fn window(&self, from: i64, to: i64) -> Result<Window, GeneratorsError> {
        if to <= from {
            return Err(GeneratorsError::EmptyRange);
        }
        let len = (to - from) as usize;
        let symbols = self.walk(from, len)?;
        Ok(Window::from_canonical_parts(
            from,
            symbols,
            Alphabet::binary(),
        )?)
    }

    /// Incremental modular walk at one convergent depth. The convergent is
    /// chosen with `q_K >= 2^16 * |n|`, which keeps `|n theta - n p_K/q_K|`
    /// below `2^-16`; whenever the walk state comes within the (much larger)
    /// safety margin of a wrap point the symbol is recomputed by the exact
    /// sandwich, so every emitted symbol is the exact one for theta.
    fn walk(&self, from: i64, len: usize) -> Result<Vec<u8>, GeneratorsError> {
        let bound = (from
            .unsigned_abs()
            .max((from + len as i64 + 2).unsigned_abs()) as u128)
            .saturating_mul(1 << 16);
        let k = (1..self.cf.depth())
            .find(|&k| self.cf.q_u128(k).map(|q| q >= bound).unwrap_or(true))
            .unwrap_or(self.cf.depth() - 1);
        let state_ok = self.cf.q_u128(k).map(|q| q >= bound).unwrap_or(false);
        match self.walk_state(k, from) {
            Some(mut st) if state_ok => {
                const MARGIN: u128 = 1 << 50;
                let mut symbols = Vec::with_capacity(len);
                let mut prev_unsafe = st.near_wrap(MARGIN);
                for i in 0..len {
                    let carry = st.step();
                    let cur_unsafe = st.near_wrap(MARGIN);
                    let s = if prev_unsafe || cur_unsafe {
                        let n = from + i as i64;
                        (self.floor_at(n + 1)? - self.floor_at(n)?) as u8
                    } else {
                        carry
                    };
                    symbols.push(s);
                    prev_unsafe = cur_unsafe;
                }
                self.apply_right_variant(from, &mut symbols);
                Ok(symbols)
            }
            _ => {
                // convergents exceed u128 or depth is too shallow for the
                // fast walk: evaluate symbol by symbol
                let mut symbols = Vec::with_capacity(len);
                let mut prev = self.floor_at(from)?;
                for i in 0..len {
                    let next = self.floor_at(from + i as i64 + 1)?;
                    symbols.push((next - prev) as u8);
                    prev = next;
                }
                self.apply_right_variant(from, &mut symbols);
                Ok(symbols)
            }
        }
    }

    fn apply_right_variant(&self, from: i64, symbols: &mut [u8]) {
        if self.variant != EndpointVariant::RightClosed || self.phi_num != 0 {
            return;
        }
        let len = symbols.len() as i64;
        if (-1 - from) >= 0 && (-1 - from) < len {
            symbols[(-1 - from) as usize] -= 1;
        }
        if (0 - from) >= 0 && (0 - from) < len {
            symbols[(0 - from) as usize] += 1;
        }
    }

    fn walk_state(&self, k: usize, from: i64) -> Option<WalkState> {
        let q = self.cf.q_u128(k)?;
        let p = self.cf.p_u128(k)?;
        let scale = 1u128 << PHASE_DENOM_LOG2;
        let denom = q.checked_mul(scale)?;
        denom.checked_mul(4)?; // headroom for the step addition
        let step = p.checked_mul(scale)?;
        let phi_q = mulmod(self.phi_num, q, denom);
        // residue of from * step + phi * q modulo denom, with from possibly negative
        let from_red = (from as i128).rem_euclid(denom as i128) as u128;
        let r = (mulmod(from_red, step, denom) + phi_q) % denom;
        Some(WalkState { r, step, denom })
    }
}

struct WalkState {
    r: u128,
    step: u128,
    denom: u128,
}

impl WalkState {
    /// Advances one position; returns 1 when the fractional part wrapped.
    fn step(&mut self) -> u8 {
        self.r += self.step;
        if self.r >= self.denom {
            self.r -= self.denom;
            1
        } else {
            0
        }
    }

    /// True when the state is within `margin` of a wrap point, i.e. the floor
    /// of the true orbit value may differ from the rational walk's.
    fn near_wrap(&self, margin: u128) -> bool {
        self.r < margin || self.r + margin >= self.denom
    }
}

fn mulmod(a: u128, b: u128, m: u128) -> u128 {
    // a, b < m <= 2^126; schoolbook split to avoid overflow
    if let (Some(prod), true) = (a.checked_mul(b), true) {
        return prod % m;
    }
    let mut result = 0u128;
    let mut a = a % m;
    let mut b = b;
    while b > 0 {
        if b & 1 == 1 {
            result = (result + a) % m;
        }
        a = (a << 1) % m;
        b >>= 1;
    }
    result
}

/// Exact floor(mθ + add_num/add_den), θ given by its continued fraction.
///
/// Sandwiches θ strictly between consecutive convergents, deepening until the
/// two candidate floors agree. `m = 0` is decided directly (the only case in
/// which the argument can be an exact integer).
pub fn floor_m_theta_plus_rational(
    cf: &ContinuedFraction,
    m: i128,
    add_num: i128,
    add_den: u128,
) -> Result<i64, GeneratorsError> {
    assert!(add_den > 0);
    if m == 0 {
        return Ok(add_num.div_euclid(add_den as i128) as i64);
    }
    let m = BigInt::from(m);
    let add_num = BigInt::from(add_num);
    let add_den = BigInt::from(add_den);
    for k in 0..cf.depth() {
        let (p0, q0) = cf.convergent(k);
        let (p1, q1) = cf.convergent(k + 1);
        let (p0, q0) = (BigInt::from(p0.clone()), BigInt::from(q0.clone()));
        let (p1, q1) = (BigInt::from(p1.clone()), BigInt::from(q1.clone()));
        // floor((m p + a q / b) / q) = floor((m p b + a q) / (q b))
        let f0 = (&m * &p0 * &add_den + &add_num * &q0).div_floor_big(&(&q0 * &add_den));
        let f1 = (&m * &p1 * &add_den + &add_num * &q1).div_floor_big(&(&q1 * &add_den));
        if f0 == f1 {
            return f0.to_i64().ok_or(GeneratorsError::DepthExhausted);
        }
    }
    Err(GeneratorsError::DepthExhausted)
}

trait DivFloorBig {
    fn div_floor_big(&self, d: &BigInt) -> BigInt;
}

impl DivFloorBig for BigInt {
    fn div_floor_big(&self, d: &BigInt) -> BigInt {
        let q = self / d;
        let r = self - &q * d;
        if r.is_zero() || (r.is_negative() == d.is_negative()) {
            q
        } else {
            q - 1
        }
    }
}

/// The hierarchy of standard words `w_0 = 0`, `w_1 = 0^{a_1 - 1} 1`,
/// `w_{k+1} = w_k^{a_{k+1}} w_{k-1}`, with `|w_k| = q_k`.
#[derive(Clone, Debug)]
pub struct StandardWords {
    words: Vec<Vec<u8>>,
}

/// Hard cap on generated word length.
pub const MAX_STANDARD_WORD_LEN: usize = 1 << 24;

pub fn standard_words(cf: &ContinuedFraction, k: usize) -> Result<StandardWords, GeneratorsError> {
    if k > cf.depth() {
        return Err(GeneratorsError::KOutOfRange {
            k,
            depth: cf.depth(),
        });
    }
    let mut words: Vec<Vec<u8>> = Vec::with_capacity(k + 1);
    words.push(vec![0]);
    if k >= 1 {
        let a1 = cf.coefficient(1) as usize;
        let mut w1 = vec![0u8; a1 - 1];
        w1.push(1);
        words.push(w1);
    }
    for j in 2..=k {
        let a = cf.coefficient(j) as usize;
        let len = words[j - 1].len() * a + words[j - 2].len();
        if len > MAX_STANDARD_WORD_LEN {
            return Err(GeneratorsError::WordTooLong {
                len,
                cap: MAX_STANDARD_WORD_LEN,
            });
        }
        let mut w = Vec::with_capacity(len);
        for _ in 0..a {
            w.extend_from_slice(&words[j - 1]);
        }
        w.extend_from_slice(&words[j - 2]);
        words.push(w);
    }
    // |w_k| = q_k
    for (j, w) in words.iter().enumerate().skip(1) {
        debug_assert_eq!(Some(w.len() as u128), cf.q_u128(j));
    }
    Ok(StandardWords { words })
}

impl StandardWords {
    pub fn word(&self, k: usize) -> &[u8] {
        &self.words[k]
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn to_window(&self, k: usize) -> Window {
        Window::from_canonical_parts(1, self.words[k].clone(), Alphabet::binary()).unwrap()
    }

    pub fn word_string(&self, k: usize) -> String {
        self.words[k]
            .iter()
            .map(|&s| if s == 0 { '0' } else { '1' })
            .collect()
    }
}
