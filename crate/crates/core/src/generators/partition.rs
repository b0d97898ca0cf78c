//! Hierarchical block partition of Sturmian windows.
//!
//! At level k every element of the subshift tiles uniquely into blocks `w_k`
//! and `w_{k-1}`, with `w_k` occurring `a_{k+1}` or `a_{k+1} + 1` times
//! between consecutive `w_{k-1}` blocks. A plain longest-match parse can tile
//! a finite window in non-canonical ways (`1|10` vs `10|1` ambiguities), so
//! the parser runs a feasibility pass over states `(position, run length,
//! interior)` that enforces the multiplicity pattern, then walks left to
//! right preferring `w_k`. Edge blocks may be cut off and are flagged.

use serde::{Deserialize, Serialize};

use super::cf::ContinuedFraction;
use super::sturmian::standard_words;
use super::GeneratorsError;
use crate::words::Window;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BlockType {
    /// A `w_k` block.
    WordK,
    /// A `w_{k-1}` block.
    WordKm1,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KBlock {
    pub kind: BlockType,
    /// Start position in sequence coordinates.
    pub start: i64,
    /// Block length as present in the window (shorter than the full word for
    /// cut-off edge blocks).
    pub len: usize,
    pub complete: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct KPartition {
    pub level: usize,
    pub blocks: Vec<KBlock>,
    /// Between consecutive complete `w_{k-1}` blocks, `w_k` occurred
    /// `a_{k+1}` or `a_{k+1} + 1` times (checked on fully interior runs).
    pub multiplicities_ok: bool,
}

/// Parse state: how many complete `w_k` blocks since the last `w_{k-1}`
/// boundary (capped at `a+1`), and whether a boundary has been seen yet
/// (before the first `w_{k-1}` the run may have been cut by the window edge).
#[derive(Clone, Copy, PartialEq, Eq)]
struct ParseState {
    run: u8,
    interior: bool,
}

pub fn k_partition(
    window: &Window,
    cf: &ContinuedFraction,
    k: usize,
) -> Result<KPartition, GeneratorsError> {
    if k + 1 > cf.depth() {
        return Err(GeneratorsError::KOutOfRange {
            k: k + 1,
            depth: cf.depth(),
        });
    }
    let s = window.canonical();
    if k == 0 {
        // level zero: the partition into single symbols
        let blocks = s
            .iter()
            .enumerate()
            .map(|(i, &c)| KBlock {
                kind: if c == 0 {
                    BlockType::WordK
                } else {
                    BlockType::WordKm1
                },
                start: window.start() + i as i64,
                len: 1,
                complete: true,
            })
            .collect();
        return Ok(KPartition {
            level: 0,
            blocks,
            multiplicities_ok: true,
        });
    }
    let sw = standard_words(cf, k)?;
    let (wk, wkm1): (Vec<u8>, Vec<u8>) = (sw.word(k).to_vec(), sw.word(k - 1).to_vec());
    let a = cf.coefficient(k + 1) as u8;
    let n = s.len();
    let matches = |i: usize, w: &[u8]| i + w.len() <= n && &s[i..i + w.len()] == w;
    let prefix_reaches_end = |i: usize, w: &[u8]| n - i < w.len() && s[i..] == w[..n - i];

    // feasibility from the right over (pos, run, interior)
    let states = (a as usize + 2) * 2;
    let idx = |st: ParseState| (st.run as usize) * 2 + st.interior as usize;
    let mut ok = vec![false; (n + 1) * states];
    for st_i in 0..states {
        ok[n * states + st_i] = true; // exact end is fine in any state
    }
    for i in (0..n).rev() {
        // cut-off final block ends the window in any state
        let edge = prefix_reaches_end(i, &wk) || prefix_reaches_end(i, &wkm1);
        for run in 0..=a + 1 {
            for interior in [false, true] {
                let st = ParseState { run, interior };
                let mut feasible = edge;
                if !feasible && run < a + 1 && matches(i, &wk) {
                    feasible = ok[(i + wk.len()) * states
                        + idx(ParseState {
                            run: run + 1,
                            interior,
                        })];
                }
                if !feasible && matches(i, &wkm1) && (!interior || run == a || run == a + 1) {
                    feasible = ok[(i + wkm1.len()) * states
                        + idx(ParseState {
                            run: 0,
                            interior: true,
                        })];
                }
                ok[i * states + idx(st)] = feasible;
            }
        }
    }

    // choose the start: a block boundary at 0, or a cut-off first block
    // (a proper suffix of one of the two words); prefer the longest cut
    let start_state = ParseState {
        run: 0,
        interior: false,
    };
    let mut start_choice: Option<(usize, Option<BlockType>, ParseState)> = None;
    if ok[idx(start_state)] {
        start_choice = Some((0, None, start_state));
    } else {
        let mut candidates: Vec<(usize, BlockType, ParseState)> = Vec::new();
        // after a cut w_{k-1} the boundary is known: interior parsing starts
        for cut in 1..wkm1.len().min(n) {
            let suffix = &wkm1[cut..];
            let st = ParseState {
                run: 0,
                interior: true,
            };
            if &s[..suffix.len()] == suffix && ok[suffix.len() * states + idx(st)] {
                candidates.push((suffix.len(), BlockType::WordKm1, st));
            }
        }
        // after a cut w_k the run count is unknown: any run, edge mode
        for cut in 1..wk.len().min(n) {
            let suffix = &wk[cut..];
            for run in 1..=a + 1 {
                let st = ParseState {
                    run,
                    interior: false,
                };
                if &s[..suffix.len()] == suffix && ok[suffix.len() * states + idx(st)] {
                    candidates.push((suffix.len(), BlockType::WordK, st));
                    break;
                }
            }
        }
        candidates.sort_by_key(|&(len, _, _)| std::cmp::Reverse(len));
        if let Some(&(len, kind, st)) = candidates.first() {
            start_choice = Some((len, Some(kind), st));
        }
    }

    let Some((first_offset, first_kind, mut state)) = start_choice else {
        return Err(GeneratorsError::ParseFailure {
            k,
            index: furthest_reach(s, &wk, &wkm1),
        });
    };

    let mut blocks = Vec::new();
    if let Some(kind) = first_kind {
        blocks.push(KBlock {
            kind,
            start: window.start(),
            len: first_offset,
            complete: false,
        });
    }
    let mut i = first_offset;
    while i < n {
        let take_k = state.run < a + 1
            && matches(i, &wk)
            && ok[(i + wk.len()) * states
                + idx(ParseState {
                    run: state.run + 1,
                    interior: state.interior,
                })];
        if take_k {
            blocks.push(KBlock {
                kind: BlockType::WordK,
                start: window.start() + i as i64,
                len: wk.len(),
                complete: true,
            });
            i += wk.len();
            state.run += 1;
            continue;
        }
        let allow_short = !state.interior || state.run == a || state.run == a + 1;
        if allow_short
            && matches(i, &wkm1)
            && ok[(i + wkm1.len()) * states
                + idx(ParseState {
                    run: 0,
                    interior: true,
                })]
        {
            blocks.push(KBlock {
                kind: BlockType::WordKm1,
                start: window.start() + i as i64,
                len: wkm1.len(),
                complete: true,
            });
            i += wkm1.len();
            state = ParseState {
                run: 0,
                interior: true,
            };
            continue;
        }
        if prefix_reaches_end(i, &wk) || prefix_reaches_end(i, &wkm1) {
            let kind = if prefix_reaches_end(i, &wk) {
                BlockType::WordK
            } else {
                BlockType::WordKm1
            };
            blocks.push(KBlock {
                kind,
                start: window.start() + i as i64,
                len: n - i,
                complete: false,
            });
            i = n;
            continue;
        }
        return Err(GeneratorsError::ParseFailure {
            k,
            index: window.start() + i as i64,
        });
    }

    let multiplicities_ok = check_multiplicities(&blocks, a as u64);
    Ok(KPartition {
        level: k,
        blocks,
        multiplicities_ok,
    })
}

/// Furthest position reachable by any unconstrained forward tiling, for error
/// reporting.
fn furthest_reach(s: &[u8], wk: &[u8], wkm1: &[u8]) -> i64 {
    let n = s.len();
    let matches = |i: usize, w: &[u8]| i + w.len() <= n && &s[i..i + w.len()] == w;
    let mut reach = vec![false; n + 1];
    reach[0] = true;
    for word in [wk, wkm1] {
        for cut in 1..word.len().min(n + 1) {
            let suffix = &word[cut..];
            if suffix.len() <= n && &s[..suffix.len()] == suffix {
                reach[suffix.len()] = true;
            }
        }
    }
    let mut furthest = 0usize;
    for i in 0..n {
        if !reach[i] {
            continue;
        }
        furthest = furthest.max(i);
        if matches(i, wk) {
            reach[i + wk.len()] = true;
        }
        if matches(i, wkm1) {
            reach[i + wkm1.len()] = true;
        }
    }
    furthest as i64
}

fn check_multiplicities(blocks: &[KBlock], a_next: u64) -> bool {
    let mut seen_short = false;
    let mut run: u64 = 0;
    let mut ok = true;
    for b in blocks {
        match (b.kind, b.complete) {
            (BlockType::WordK, true) => run += 1,
            (BlockType::WordKm1, true) => {
                if seen_short && !(run == a_next || run == a_next + 1) {
                    ok = false;
                }
                seen_short = true;
                run = 0;
            }
            _ => {
                seen_short = false;
                run = 0;
            }
        }
    }
    ok
}
