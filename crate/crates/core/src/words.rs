//! Combinatorics on words over finite windows of symbolic sequences:
//! subword complexity, Rauzy graphs, special factors, palindromes, power
//! indices, recurrence statistics, and cylinder-frequency minima.
//!
//! All statistics are window statistics. A finite window cannot certify
//! properties of the infinite sequence, so operations carry a `saturated`
//! flag: it is set when the last quarter of the window contributed no new
//! factors, which is evidence (not proof) that the factor set is complete at
//! that length. Factor statistics at length `n` are only accepted when the
//! window is at least `4n` long.

use std::collections::{BTreeMap, HashSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rational::Rational;

/// Margin factor of the window-sufficiency rule.
pub const WINDOW_MARGIN: usize = 4;

#[derive(Debug, Error, PartialEq)]
pub enum WordsError {
    #[error("window of length {actual} too short for factor length {n}; need at least {minimum}")]
    WindowTooShort {
        n: usize,
        minimum: usize,
        actual: usize,
    },
    #[error("word occurs only {count} time(s) in the window; need at least 2")]
    TooFewOccurrences { count: usize },
    #[error("empty word")]
    EmptyWord,
    #[error("empty window")]
    EmptyWindow,
    #[error("symbol label {label} not in alphabet")]
    UnknownSymbol { label: u32 },
    #[error("symbol index {index} out of range for alphabet of size {size}")]
    SymbolOutOfRange { index: u8, size: usize },
}

/// Ordered set of symbol labels; symbols are canonicalized to `0..size` at
/// ingestion and mapped back to labels only for display.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Alphabet {
    labels: Vec<u32>,
}

impl Alphabet {
    pub fn from_labels(labels: &[u32]) -> Self {
        let mut labels: Vec<u32> = labels.to_vec();
        labels.sort_unstable();
        labels.dedup();
        assert!(!labels.is_empty(), "alphabet must be non-empty");
        assert!(labels.len() <= 256, "alphabet too large");
        Alphabet { labels }
    }

    pub fn binary() -> Self {
        Alphabet::from_labels(&[0, 1])
    }

    pub fn size(&self) -> usize {
        self.labels.len()
    }

    pub fn canonical_of(&self, label: u32) -> Option<u8> {
        self.labels.binary_search(&label).ok().map(|i| i as u8)
    }

    pub fn label_of(&self, canonical: u8) -> u32 {
        self.labels[canonical as usize]
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }
}

/// A finite word in canonical symbols.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Word {
    symbols: Vec<u8>,
}

impl Word {
    pub fn from_canonical(symbols: Vec<u8>) -> Self {
        Word { symbols }
    }

    pub fn from_labels(labels: &[u32], alphabet: &Alphabet) -> Result<Self, WordsError> {
        let symbols = labels
            .iter()
            .map(|&l| {
                alphabet
                    .canonical_of(l)
                    .ok_or(WordsError::UnknownSymbol { label: l })
            })
            .collect::<Result<Vec<u8>, _>>()?;
        Ok(Word { symbols })
    }

    /// Parses a word of single-digit labels, e.g. `"10110"`.
    pub fn from_digits(digits: &str, alphabet: &Alphabet) -> Result<Self, WordsError> {
        let labels: Vec<u32> = digits
            .chars()
            .map(|c| c.to_digit(10).expect("digit expected"))
            .collect();
        Word::from_labels(&labels, alphabet)
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn as_slice(&self) -> &[u8] {
        &self.symbols
    }

    pub fn label_string(&self, alphabet: &Alphabet) -> String {
        self.symbols
            .iter()
            .map(|&s| char_for_label(alphabet.label_of(s)))
            .collect()
    }
}

fn char_for_label(label: u32) -> char {
    char::from_digit(label.min(35), 36).unwrap_or('?')
}

/// A contiguous sample of a two-sided sequence: symbols for positions
/// `start, start+1, ..., start + len - 1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Window {
    start: i64,
    symbols: Vec<u8>,
    alphabet: Alphabet,
}

impl Window {
    pub fn from_canonical_parts(
        start: i64,
        symbols: Vec<u8>,
        alphabet: Alphabet,
    ) -> Result<Self, WordsError> {
        if symbols.is_empty() {
            return Err(WordsError::EmptyWindow);
        }
        let size = alphabet.size();
        if let Some(&bad) = symbols.iter().find(|&&s| (s as usize) >= size) {
            return Err(WordsError::SymbolOutOfRange { index: bad, size });
        }
        Ok(Window {
            start,
            symbols,
            alphabet,
        })
    }

    /// Canonicalizes symbol labels; the alphabet is the set of observed labels.
    pub fn from_labels(start: i64, labels: &[u32]) -> Result<Self, WordsError> {
        if labels.is_empty() {
            return Err(WordsError::EmptyWindow);
        }
        let alphabet = Alphabet::from_labels(labels);
        let symbols = labels
            .iter()
            .map(|&l| alphabet.canonical_of(l).unwrap())
            .collect();
        Ok(Window {
            start,
            symbols,
            alphabet,
        })
    }

    pub fn from_labels_with_alphabet(
        start: i64,
        labels: &[u32],
        alphabet: Alphabet,
    ) -> Result<Self, WordsError> {
        let symbols = labels
            .iter()
            .map(|&l| {
                alphabet
                    .canonical_of(l)
                    .ok_or(WordsError::UnknownSymbol { label: l })
            })
            .collect::<Result<Vec<u8>, _>>()?;
        Window::from_canonical_parts(start, symbols, alphabet)
    }

    /// Parses single-digit labels, e.g. `"0101010"`.
    pub fn from_digits(start: i64, digits: &str) -> Result<Self, WordsError> {
        let labels: Vec<u32> = digits
            .chars()
            .map(|c| c.to_digit(10).expect("digit expected"))
            .collect();
        Window::from_labels(start, &labels)
    }

    pub fn start(&self) -> i64 {
        self.start
    }

    /// One past the last position.
    pub fn end(&self) -> i64 {
        self.start + self.symbols.len() as i64
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn canonical(&self) -> &[u8] {
        &self.symbols
    }

    pub fn symbol(&self, pos: i64) -> Option<u8> {
        if pos < self.start || pos >= self.end() {
            None
        } else {
            Some(self.symbols[(pos - self.start) as usize])
        }
    }

    pub fn label_at(&self, pos: i64) -> Option<u32> {
        self.symbol(pos).map(|s| self.alphabet.label_of(s))
    }

    /// Canonical symbols for `[from, to)` in absolute coordinates.
    pub fn slice(&self, from: i64, to: i64) -> Option<&[u8]> {
        if from < self.start || to > self.end() || from > to {
            return None;
        }
        Some(&self.symbols[(from - self.start) as usize..(to - self.start) as usize])
    }

    pub fn subwindow(&self, from: i64, to: i64) -> Option<Window> {
        self.slice(from, to).map(|s| Window {
            start: from,
            symbols: s.to_vec(),
            alphabet: self.alphabet.clone(),
        })
    }

    pub fn re_anchored(&self, new_start: i64) -> Window {
        Window {
            start: new_start,
            symbols: self.symbols.clone(),
            alphabet: self.alphabet.clone(),
        }
    }

    pub fn label_string(&self) -> String {
        self.symbols
            .iter()
            .map(|&s| char_for_label(self.alphabet.label_of(s)))
            .collect()
    }

    pub fn labels(&self) -> Vec<u32> {
        self.symbols
            .iter()
            .map(|&s| self.alphabet.label_of(s))
            .collect()
    }
}

fn require_margin(window: &Window, n: usize) -> Result<(), WordsError> {
    let minimum = WINDOW_MARGIN * n;
    if window.len() < minimum {
        return Err(WordsError::WindowTooShort {
            n,
            minimum,
            actual: window.len(),
        });
    }
    Ok(())
}

fn factor_set(symbols: &[u8], n: usize) -> HashSet<&[u8]> {
    let mut set = HashSet::new();
    if n == 0 || n > symbols.len() {
        return set;
    }
    for i in 0..=symbols.len() - n {
        set.insert(&symbols[i..i + n]);
    }
    set
}

fn is_saturated(symbols: &[u8], n: usize) -> bool {
    let keep = symbols.len() - symbols.len() / 4;
    if keep < n {
        return false;
    }
    factor_set(&symbols[..keep], n).len() == factor_set(symbols, n).len()
}

/// Detected periodicity: `p(n0) <= n0` forces period `p(n1)` where `n1` is the
/// first complexity plateau.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PeriodicityWitness {
    pub n0: usize,
    pub period: usize,
    /// Rauzy graph at the plateau is a simple cycle.
    pub cycle_check: bool,
    /// The window itself repeats with this period.
    pub window_check: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexityProfile {
    /// `values[n - 1] = p(n)` for `1 <= n <= n_max`.
    pub values: Vec<usize>,
    /// `p(n) >= n + 1` held for every computed `n`.
    pub aperiodic: bool,
    pub periodicity: Option<PeriodicityWitness>,
    /// Per-length saturation flags (no new factors in the last window quarter).
    pub saturated: Vec<bool>,
}

impl ComplexityProfile {
    pub fn p(&self, n: usize) -> usize {
        self.values[n - 1]
    }
}

pub fn complexity_profile(window: &Window, n_max: usize) -> Result<ComplexityProfile, WordsError> {
    if n_max == 0 {
        return Err(WordsError::EmptyWord);
    }
    require_margin(window, n_max)?;
    let symbols = window.canonical();
    let mut values = Vec::with_capacity(n_max);
    let mut saturated = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        values.push(factor_set(symbols, n).len());
        saturated.push(is_saturated(symbols, n));
    }
    let aperiodic = values.iter().enumerate().all(|(i, &p)| p >= i + 2);
    let periodicity = detect_periodicity(window, &values);
    Ok(ComplexityProfile {
        values,
        aperiodic,
        periodicity,
        saturated,
    })
}

fn detect_periodicity(window: &Window, values: &[usize]) -> Option<PeriodicityWitness> {
    let n0 = values
        .iter()
        .position(|&p| p <= values.len())
        .map(|_| ())
        .and_then(|_| {
            values
                .iter()
                .enumerate()
                .find(|&(i, &p)| p <= i + 1)
                .map(|(i, _)| i + 1)
        })?;
    // first plateau p(n1) = p(n1 + 1); for a one-letter alphabet p(1) = 1 <= 1
    // and the period is 1 directly
    let (n1, period) = if values[n0 - 1] == 1 {
        (n0, 1)
    } else {
        let plateau = (1..n0).find(|&m| values[m - 1] == values[m])?;
        (plateau, values[plateau - 1])
    };
    let cycle_check = if period == 1 {
        true
    } else {
        rauzy_graph(window, n1)
            .map(|g| g.is_simple_cycle())
            .unwrap_or(false)
    };
    let symbols = window.canonical();
    let window_check = symbols.len() > period
        && (period..symbols.len()).all(|i| symbols[i] == symbols[i - period]);
    Some(PeriodicityWitness {
        n0,
        period,
        cycle_check,
        window_check,
    })
}

/// Directed graph on length-`n` factors; each length-`n+1` factor `axb`
/// contributes the edge `ax -> xb`.
#[derive(Clone, Debug)]
pub struct RauzyGraph {
    pub n: usize,
    /// Sorted length-n factors.
    pub vertices: Vec<Word>,
    /// `(from, to, witness)` with vertex indices, sorted by witness word.
    pub edges: Vec<(usize, usize, Word)>,
    pub strongly_connected: bool,
    pub saturated: bool,
}

impl RauzyGraph {
    pub fn out_degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|e| e.0 == v).count()
    }

    pub fn in_degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|e| e.1 == v).count()
    }

    /// Connected, and every vertex has in- and out-degree exactly one.
    pub fn is_simple_cycle(&self) -> bool {
        self.strongly_connected
            && self.edges.len() == self.vertices.len()
            && (0..self.vertices.len()).all(|v| self.out_degree(v) == 1 && self.in_degree(v) == 1)
    }
}

pub fn rauzy_graph(window: &Window, n: usize) -> Result<RauzyGraph, WordsError> {
    if n == 0 {
        return Err(WordsError::EmptyWord);
    }
    require_margin(window, n + 1)?;
    let symbols = window.canonical();
    let mut vertices: Vec<&[u8]> = factor_set(symbols, n).into_iter().collect();
    vertices.sort_unstable();
    let index: BTreeMap<&[u8], usize> = vertices.iter().enumerate().map(|(i, &w)| (w, i)).collect();
    let mut edge_words: Vec<&[u8]> = factor_set(symbols, n + 1).into_iter().collect();
    edge_words.sort_unstable();
    let edges: Vec<(usize, usize, Word)> = edge_words
        .into_iter()
        .map(|w| {
            let from = index[&w[..n]];
            let to = index[&w[1..]];
            (from, to, Word::from_canonical(w.to_vec()))
        })
        .collect();
    let strongly_connected = strongly_connected(vertices.len(), &edges);
    Ok(RauzyGraph {
        n,
        vertices: vertices
            .into_iter()
            .map(|w| Word::from_canonical(w.to_vec()))
            .collect(),
        edges,
        strongly_connected,
        saturated: is_saturated(symbols, n + 1),
    })
}

fn strongly_connected(n_vertices: usize, edges: &[(usize, usize, Word)]) -> bool {
    if n_vertices == 0 {
        return false;
    }
    let mut fwd = vec![Vec::new(); n_vertices];
    let mut bwd = vec![Vec::new(); n_vertices];
    for &(a, b, _) in edges {
        fwd[a].push(b);
        bwd[b].push(a);
    }
    let reach = |adj: &[Vec<usize>]| {
        let mut seen = vec![false; n_vertices];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen.into_iter().all(|s| s)
    };
    reach(&fwd) && reach(&bwd)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SpecialFactor {
    pub word: Word,
    /// Number of distinct one-symbol extensions on the special side.
    pub degree: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SpecialFactors {
    pub n: usize,
    pub right: Vec<SpecialFactor>,
    pub left: Vec<SpecialFactor>,
    pub bispecial: Vec<Word>,
    pub saturated: bool,
}

pub fn special_factors(window: &Window, n: usize) -> Result<SpecialFactors, WordsError> {
    if n == 0 {
        return Err(WordsError::EmptyWord);
    }
    require_margin(window, n + 1)?;
    let symbols = window.canonical();
    let mut right_ext: BTreeMap<&[u8], HashSet<u8>> = BTreeMap::new();
    let mut left_ext: BTreeMap<&[u8], HashSet<u8>> = BTreeMap::new();
    for i in 0..=symbols.len() - (n + 1) {
        let w = &symbols[i..i + n + 1];
        right_ext.entry(&w[..n]).or_default().insert(w[n]);
        left_ext.entry(&w[1..]).or_default().insert(w[0]);
    }
    let collect = |map: BTreeMap<&[u8], HashSet<u8>>| -> Vec<SpecialFactor> {
        map.into_iter()
            .filter(|(_, ext)| ext.len() >= 2)
            .map(|(w, ext)| SpecialFactor {
                word: Word::from_canonical(w.to_vec()),
                degree: ext.len(),
            })
            .collect()
    };
    let right = collect(right_ext);
    let left = collect(left_ext);
    let right_set: HashSet<&Word> = right.iter().map(|s| &s.word).collect();
    let bispecial: Vec<Word> = left
        .iter()
        .filter(|s| right_set.contains(&s.word))
        .map(|s| s.word.clone())
        .collect();
    Ok(SpecialFactors {
        n,
        right,
        left,
        bispecial,
        saturated: is_saturated(symbols, n + 1),
    })
}

/// A maximal palindromic factor. `center_two` is twice the center position in
/// sequence coordinates: even values sit on a symbol, odd values between two.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Palindrome {
    pub center_two: i64,
    pub length: usize,
}

/// All maximal palindromes of length at least `min_len` (Manacher scan).
pub fn palindrome_scan(window: &Window, min_len: usize) -> Result<Vec<Palindrome>, WordsError> {
    if min_len == 0 {
        return Err(WordsError::EmptyWord);
    }
    let s = window.canonical();
    if s.is_empty() {
        return Err(WordsError::EmptyWindow);
    }
    let radii = manacher(s);
    let mut out = Vec::new();
    for (c, &r) in radii.iter().enumerate() {
        // center index c in half-units over the transformed string
        let length = r;
        if length >= min_len {
            out.push(Palindrome {
                center_two: 2 * window.start() + c as i64,
                length,
            });
        }
    }
    Ok(out)
}

/// Maximal palindrome length at every center, in half-unit coordinates:
/// `result[2i]` is centered on position i (odd lengths), `result[2i+1]`
/// between positions i and i+1 (even lengths). Length of result: 2n-1.
fn manacher(s: &[u8]) -> Vec<usize> {
    let n = s.len();
    // classic odd/even split
    let mut d1 = vec![0usize; n]; // odd radii: number of symbols in half-arm + 1
    let (mut l, mut r) = (0isize, -1isize);
    for i in 0..n as isize {
        let mut k = if i > r {
            1
        } else {
            d1[(l + r - i) as usize].min((r - i + 1) as usize) as isize
        };
        while i - k >= 0 && i + k < n as isize && s[(i - k) as usize] == s[(i + k) as usize] {
            k += 1;
        }
        d1[i as usize] = k as usize;
        if i + k - 1 > r {
            l = i - k + 1;
            r = i + k - 1;
        }
    }
    let mut d2 = vec![0usize; n]; // even radii
    let (mut l, mut r) = (0isize, -1isize);
    for i in 0..n as isize {
        let mut k = if i > r {
            0
        } else {
            d2[(l + r - i + 1) as usize].min((r - i + 1) as usize) as isize
        };
        while i - k > 0 && i + k < n as isize && s[(i - k - 1) as usize] == s[(i + k) as usize] {
            k += 1;
        }
        d2[i as usize] = k as usize;
        if i + k - 1 > r {
            l = i - k;
            r = i + k - 1;
        }
    }
    let mut out = vec![0usize; 2 * n - 1];
    for i in 0..n {
        out[2 * i] = 2 * d1[i] - 1;
        if i + 1 < n {
            out[2 * i + 1] = 2 * d2[i + 1];
        }
    }
    out
}

/// A center witnessing reflection symmetry, with the growth ratio used by the
/// strong-palindromicity criterion.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct PalindromeWitness {
    /// Center in sequence coordinates.
    pub center: f64,
    pub length: usize,
    /// ln(B^center / length); strong palindromicity wants this -> -inf along
    /// a sequence of centers going to +inf.
    pub ln_ratio: f64,
    /// exp(ln_ratio), infinity on overflow.
    pub ratio: f64,
}

/// Scans for palindromes centered at positive positions and reports the
/// ratios `B^{n_j} / l_j` for a given growth constant `B > 1`.
pub fn strong_palindromicity_witnesses(
    window: &Window,
    b: f64,
    min_len: usize,
) -> Result<Vec<PalindromeWitness>, WordsError> {
    assert!(b > 1.0, "growth constant must exceed 1");
    let pals = palindrome_scan(window, min_len)?;
    let mut out: Vec<PalindromeWitness> = pals
        .into_iter()
        .filter(|p| p.center_two > 0)
        .map(|p| {
            let center = p.center_two as f64 / 2.0;
            let ln_ratio = center * b.ln() - (p.length as f64).ln();
            PalindromeWitness {
                center,
                length: p.length,
                ln_ratio,
                ratio: ln_ratio.exp(),
            }
        })
        .collect();
    out.sort_by(|a, b| a.center.partial_cmp(&b.center).unwrap());
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IndexReport {
    pub word: Word,
    /// Largest rational power of the word observed in the window; a certified
    /// lower bound for the index over the full language.
    pub index: Rational,
    pub is_factor: bool,
    /// Start position attaining the maximum.
    pub attained_at: Option<i64>,
}

/// Largest `r = m + |x|/|w|` such that `w^r` (i.e. `(xy)^m x` with `w = xy`)
/// occurs in the window.
pub fn index_of(word: &Word, window: &Window) -> Result<IndexReport, WordsError> {
    if word.is_empty() {
        return Err(WordsError::EmptyWord);
    }
    let w = word.as_slice();
    let s = window.canonical();
    let p = w.len();
    let mut best = Rational::zero();
    let mut attained = None;
    if s.len() >= p {
        for i in 0..=s.len() - p {
            if &s[i..i + p] != w {
                continue;
            }
            // extend the period-p run as far as it goes
            let mut ell = p;
            while i + ell < s.len() && s[i + ell] == s[i + ell - p] {
                ell += 1;
            }
            let r = Rational::new(ell as i64, p as i64);
            if r > best {
                best = r;
                attained = Some(window.start() + i as i64);
            }
        }
    }
    let is_factor = attained.is_some();
    Ok(IndexReport {
        word: word.clone(),
        index: best,
        is_factor,
        attained_at: attained,
    })
}

/// Supremum of `index_of` over all distinct factors of length at most `n_max`;
/// a lower bound for the index of the subshift.
pub fn subshift_index_estimate(
    window: &Window,
    n_max: usize,
) -> Result<(Rational, Word), WordsError> {
    require_margin(window, n_max)?;
    let symbols = window.canonical();
    let mut best = Rational::zero();
    let mut best_word = Word::from_canonical(vec![symbols[0]]);
    for n in 1..=n_max {
        let mut factors: Vec<&[u8]> = factor_set(symbols, n).into_iter().collect();
        factors.sort_unstable();
        for f in factors {
            let word = Word::from_canonical(f.to_vec());
            let rep = index_of(&word, window)?;
            if rep.index > best {
                best = rep.index;
                best_word = word;
            }
        }
    }
    Ok((best, best_word))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RecurrenceReport {
    pub word: Word,
    /// Occurrence start positions, strictly increasing.
    pub positions: Vec<i64>,
    pub gaps: Vec<u64>,
    pub max_gap: u64,
    /// max_gap / |word|: linear-recurrence constant estimate.
    pub gap_ratio: f64,
    /// Occurrences per admissible start position.
    pub frequency: f64,
}

pub fn recurrence_report(window: &Window, word: &Word) -> Result<RecurrenceReport, WordsError> {
    if word.is_empty() {
        return Err(WordsError::EmptyWord);
    }
    let s = window.canonical();
    let w = word.as_slice();
    let mut positions = Vec::new();
    if s.len() >= w.len() {
        for i in 0..=s.len() - w.len() {
            if &s[i..i + w.len()] == w {
                positions.push(window.start() + i as i64);
            }
        }
    }
    if positions.len() < 2 {
        return Err(WordsError::TooFewOccurrences {
            count: positions.len(),
        });
    }
    let gaps: Vec<u64> = positions.windows(2).map(|p| (p[1] - p[0]) as u64).collect();
    let max_gap = *gaps.iter().max().unwrap();
    let denom = (s.len() - w.len() + 1) as f64;
    Ok(RecurrenceReport {
        word: word.clone(),
        frequency: positions.len() as f64 / denom,
        gap_ratio: max_gap as f64 / w.len() as f64,
        positions,
        gaps,
        max_gap,
    })
}

/// `min_w n * freq(w)` over the length-`n` factors observed in the window,
/// with empirical frequencies standing in for the unique invariant measure.
pub fn boshernitzan_quantity(window: &Window, n: usize) -> Result<f64, WordsError> {
    if n == 0 {
        return Err(WordsError::EmptyWord);
    }
    require_margin(window, n)?;
    let s = window.canonical();
    let total = s.len() - n + 1;
    let mut counts: BTreeMap<&[u8], usize> = BTreeMap::new();
    for i in 0..total {
        *counts.entry(&s[i..i + n]).or_insert(0) += 1;
    }
    let min_count = counts.values().copied().min().unwrap();
    Ok(n as f64 * min_count as f64 / total as f64)
}

/// The sequence `n -> min_w n * freq(w)` so lim-sup positivity can be
/// inspected.
pub fn boshernitzan_profile(
    window: &Window,
    lengths: &[usize],
) -> Result<Vec<(usize, f64)>, WordsError> {
    lengths
        .iter()
        .map(|&n| boshernitzan_quantity(window, n).map(|q| (n, q)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn periodic_window(pattern: &[u32], len: usize) -> Window {
        let labels: Vec<u32> = (0..len).map(|i| pattern[i % pattern.len()]).collect();
        Window::from_labels(0, &labels).unwrap()
    }

    /// Brute-force factor counter, independent of the HashSet path.
    fn oracle_count_factors(s: &[u8], n: usize) -> usize {
        let mut distinct: Vec<&[u8]> = Vec::new();
        for i in 0..=s.len().saturating_sub(n) {
            let f = &s[i..i + n];
            if !distinct.contains(&f) {
                distinct.push(f);
            }
        }
        distinct.len()
    }

    #[test]
    fn constant_sequence_complexity_is_one() {
        let w = periodic_window(&[0], 64);
        let profile = complexity_profile(&w, 8).unwrap();
        assert!(profile.values.iter().all(|&p| p == 1));
        assert!(!profile.aperiodic);
        let witness = profile.periodicity.unwrap();
        assert_eq!(witness.period, 1);
        assert!(witness.window_check);
    }

    #[test]
    fn periodic_window_complexity_and_cycle() {
        let w = periodic_window(&[0, 1], 128);
        let profile = complexity_profile(&w, 8).unwrap();
        assert_eq!(profile.values[0], 2);
        assert!(profile.values.iter().all(|&p| p == 2));
        let witness = profile.periodicity.unwrap();
        assert_eq!(witness.period, 2);
        assert!(witness.cycle_check);
        assert!(witness.window_check);
        let g = rauzy_graph(&w, 2).unwrap();
        assert!(g.is_simple_cycle());
    }

    #[test]
    fn window_too_short_reports_minimum() {
        let w = periodic_window(&[0, 1], 16);
        let err = complexity_profile(&w, 8).unwrap_err();
        assert_eq!(
            err,
            WordsError::WindowTooShort {
                n: 8,
                minimum: 32,
                actual: 16
            }
        );
    }

    #[test]
    fn complexity_matches_bruteforce_oracle() {
        // a window with mixed structure
        let labels: Vec<u32> = (0..256u32).map(|i| (i * i / 7) % 3).collect();
        let w = Window::from_labels(0, &labels).unwrap();
        let profile = complexity_profile(&w, 10).unwrap();
        for n in 1..=10 {
            assert_eq!(
                profile.p(n),
                oracle_count_factors(w.canonical(), n),
                "n={n}"
            );
        }
    }

    #[test]
    fn one_letter_rauzy_is_self_loop() {
        let w = periodic_window(&[0], 16);
        let g = rauzy_graph(&w, 1).unwrap();
        assert_eq!(g.vertices.len(), 1);
        assert_eq!(g.edges.len(), 1);
        assert_eq!(g.edges[0].0, g.edges[0].1);
        assert!(g.is_simple_cycle());
    }

    #[test]
    fn periodic_has_no_special_factors_beyond_period() {
        let w = periodic_window(&[0, 1, 1], 256);
        let sp = special_factors(&w, 4).unwrap();
        assert!(sp.right.is_empty());
        assert!(sp.left.is_empty());
    }

    #[test]
    fn palindromes_constant_sequence() {
        let w = periodic_window(&[0], 9);
        let pals = palindrome_scan(&w, 1).unwrap();
        // the whole window is a palindrome around its middle symbol
        assert!(pals.iter().any(|p| p.length == 9));
        // every center carries a maximal palindrome reaching a boundary
        assert_eq!(pals.len(), 2 * 9 - 1);
    }

    #[test]
    fn manacher_against_naive_scan() {
        let labels: Vec<u32> = vec![0, 1, 1, 0, 1, 0, 0, 1, 0, 0, 1, 1, 0, 1];
        let w = Window::from_labels(0, &labels).unwrap();
        let pals = palindrome_scan(&w, 1).unwrap();
        let s = w.canonical();
        // naive check: every reported palindrome is one and is maximal
        for p in &pals {
            let c2 = p.center_two as usize;
            let (lo, hi) = if c2.is_multiple_of(2) {
                let c = c2 / 2;
                let r = (p.length - 1) / 2;
                (c - r, c + r)
            } else {
                let c = c2 / 2;
                let r = p.length / 2;
                (c + 1 - r, c + r)
            };
            for k in 0..p.length {
                assert_eq!(s[lo + k], s[hi - k]);
            }
            let extendable = lo > 0 && hi + 1 < s.len() && s[lo - 1] == s[hi + 1];
            assert!(
                !extendable,
                "palindrome not maximal at center {}",
                p.center_two
            );
        }
    }

    #[test]
    fn index_of_simple_power_window() {
        let w = Window::from_digits(0, "0101010").unwrap();
        let word = Word::from_digits("01", w.alphabet()).unwrap();
        let rep = index_of(&word, &w).unwrap();
        assert_eq!(rep.index, Rational::new(7, 2));
        assert!(rep.is_factor);
    }

    #[test]
    fn index_of_missing_word_flags_non_factor() {
        let w = Window::from_digits(0, "000000").unwrap();
        let alphabet = Alphabet::binary();
        let word = Word::from_digits("01", &alphabet).unwrap();
        let rep = index_of(&word, &w).unwrap();
        assert!(!rep.is_factor);
        assert_eq!(rep.index, Rational::zero());
    }

    #[test]
    fn index_at_least_m_on_power_windows() {
        // w^m windows give index >= m
        let w = Window::from_digits(0, "110110110110").unwrap(); // (110)^4
        let word = Word::from_digits("110", w.alphabet()).unwrap();
        let rep = index_of(&word, &w).unwrap();
        assert!(rep.index >= Rational::new(4, 1));
    }

    #[test]
    fn recurrence_periodic_gaps_equal_period() {
        let w = periodic_window(&[0, 1, 1, 0, 1], 200);
        let word = Word::from_digits("011", w.alphabet()).unwrap();
        let rep = recurrence_report(&w, &word).unwrap();
        assert!(rep.gaps.iter().all(|&g| g == 5));
        assert!((rep.frequency - 1.0 / 5.0).abs() < 0.01);
    }

    #[test]
    fn recurrence_too_few_occurrences() {
        let w = Window::from_digits(0, "0001000").unwrap();
        let word = Word::from_digits("1", w.alphabet()).unwrap();
        let err = recurrence_report(&w, &word).unwrap_err();
        assert_eq!(err, WordsError::TooFewOccurrences { count: 1 });
    }

    #[test]
    fn boshernitzan_periodic_is_one() {
        // period p, n = p: each cyclic factor has frequency 1/p
        for p in [2usize, 3, 5] {
            let pattern: Vec<u32> = (0..p as u32).collect();
            let w = periodic_window(&pattern, 60 * p);
            let q = boshernitzan_quantity(&w, p).unwrap();
            assert!((q - 1.0).abs() < 0.05, "period {p}: got {q}");
        }
    }

    #[test]
    fn frequencies_sum_to_one() {
        let labels: Vec<u32> = (0..512u32).map(|i| (i / 3) % 2).collect();
        let w = Window::from_labels(0, &labels).unwrap();
        let n = 4;
        let s = w.canonical();
        let total = s.len() - n + 1;
        let mut counts: BTreeMap<&[u8], usize> = BTreeMap::new();
        for i in 0..total {
            *counts.entry(&s[i..i + n]).or_insert(0) += 1;
        }
        let sum: f64 = counts.values().map(|&c| c as f64 / total as f64).sum();
        assert!((sum - 1.0).abs() < 1e-12);
    }
}
