//! Window generators for the sequence families under study: Sturmian codings
//! of irrational rotations, general codings of rotations, primitive
//! substitution fixed points, interval exchange codings, and the hierarchical
//! block partition of Sturmian windows.

mod cf;
mod iet;
mod partition;
mod rotation;
mod sturmian;
mod substitution;

pub use cf::ContinuedFraction;
pub use iet::{IetParams, KeaneReport};
pub use partition::{k_partition, BlockType, KBlock, KPartition};
pub use rotation::{CircleCoordinate, RotationCoding};
pub use sturmian::{
    floor_m_theta_plus_rational, standard_words, EndpointVariant, StandardWords, SturmianParams,
    MAX_STANDARD_WORD_LEN, PHASE_DENOM_LOG2,
};
pub use substitution::{PrimitivityReport, Substitution};

use thiserror::Error;

use crate::words::{self, Window, WordsError};

#[derive(Debug, Error)]
pub enum GeneratorsError {
    #[error("theta = {theta} is outside (0, 1)")]
    ThetaOutOfRange { theta: f64 },
    #[error("phi = {phi} is outside [0, 1)")]
    PhiOutOfRange { phi: f64 },
    #[error("theta is rational: {num}/{den} (expansion terminated at depth {depth})")]
    RationalTheta { num: u64, den: u64, depth: usize },
    #[error("continued fraction coefficients must be non-empty and positive")]
    InvalidCoefficients,
    #[error("continued fraction depth exhausted; supply more coefficients")]
    DepthExhausted,
    #[error("level k = {k} exceeds continued fraction depth {depth}")]
    KOutOfRange { k: usize, depth: usize },
    #[error("standard word length {len} exceeds cap {cap}")]
    WordTooLong { len: usize, cap: usize },
    #[error("empty index range")]
    EmptyRange,
    #[error("no symbol s with S^m(s) starting with s found for powers m <= {max_power}")]
    NoValidSeed { max_power: usize },
    #[error("substitution rule for symbol {label} is missing or empty")]
    BadRule { label: u32 },
    #[error("window does not parse into level-{k} blocks; first unparseable index {index}")]
    ParseFailure { k: usize, index: i64 },
    #[error("interval lengths must be positive and sum to 1 within 1e-12 (sum = {sum})")]
    BadLengths { sum: f64 },
    #[error("tau is not a permutation")]
    BadPermutation,
    #[error("circle partition invalid: {reason}")]
    BadPartition { reason: String },
    #[error(transparent)]
    Words(#[from] WordsError),
}

#[derive(Clone, Debug, serde::Serialize, serde::Deserialize)]
pub struct EntropyEstimate {
    /// (n, log p(n) / n) for each computed length.
    pub sequence: Vec<(usize, f64)>,
    /// Value at the deepest length.
    pub value: f64,
    /// log p(m + n) <= log p(m) + log p(n) held for all computed pairs.
    pub subadditive_ok: bool,
}

/// Topological entropy estimate from the complexity profile.
pub fn entropy_estimate(window: &Window, n_max: usize) -> Result<EntropyEstimate, GeneratorsError> {
    let profile = words::complexity_profile(window, n_max)?;
    let sequence: Vec<(usize, f64)> = profile
        .values
        .iter()
        .enumerate()
        .map(|(i, &p)| (i + 1, (p as f64).ln() / (i + 1) as f64))
        .collect();
    let logs: Vec<f64> = profile.values.iter().map(|&p| (p as f64).ln()).collect();
    let mut subadditive_ok = true;
    for m in 1..=n_max {
        for n in 1..=n_max - m {
            if logs[m + n - 1] > logs[m - 1] + logs[n - 1] + 1e-12 {
                subadditive_ok = false;
            }
        }
    }
    Ok(EntropyEstimate {
        value: sequence.last().unwrap().1,
        sequence,
        subadditive_ok,
    })
}
