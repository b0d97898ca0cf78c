//! Finite disjoint unions of closed real intervals.
//!
//! These represent band spectra and their approximants. The representation is
//! kept sorted and disjoint at all times so measure and containment queries
//! are simple sweeps.

use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct IntervalSet {
    intervals: Vec<(f64, f64)>,
}

impl IntervalSet {
    pub fn empty() -> Self {
        IntervalSet {
            intervals: Vec::new(),
        }
    }

    /// Builds from arbitrary closed intervals, merging overlaps and anything
    /// closer than `merge_tol`.
    pub fn from_intervals(mut raw: Vec<(f64, f64)>, merge_tol: f64) -> Self {
        raw.retain(|&(l, r)| r >= l);
        raw.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(raw.len());
        for (l, r) in raw {
            match merged.last_mut() {
                Some(last) if l <= last.1 + merge_tol => last.1 = last.1.max(r),
                _ => merged.push((l, r)),
            }
        }
        IntervalSet { intervals: merged }
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.intervals
    }

    pub fn count(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn measure(&self) -> f64 {
        self.intervals.iter().map(|(l, r)| r - l).sum()
    }

    pub fn bounds(&self) -> Option<(f64, f64)> {
        if self.is_empty() {
            None
        } else {
            Some((
                self.intervals[0].0,
                self.intervals[self.intervals.len() - 1].1,
            ))
        }
    }

    pub fn contains(&self, x: f64, tol: f64) -> bool {
        // binary search on left endpoints
        let idx = self.intervals.partition_point(|&(l, _)| l <= x + tol);
        if idx == 0 {
            return false;
        }
        let (l, r) = self.intervals[idx - 1];
        x >= l - tol && x <= r + tol
    }

    pub fn union(&self, other: &IntervalSet) -> IntervalSet {
        let mut all = self.intervals.clone();
        all.extend_from_slice(&other.intervals);
        IntervalSet::from_intervals(all, 0.0)
    }

    /// Every point of `self` lies in `other` up to `tol` (endpoint slack).
    pub fn subset_of(&self, other: &IntervalSet, tol: f64) -> bool {
        self.intervals.iter().all(|&(l, r)| {
            // the covering interval must contain both endpoints; a band is
            // never split across a gap wider than tol
            other
                .intervals
                .iter()
                .any(|&(ol, or)| l >= ol - tol && r <= or + tol)
        })
    }

    /// Lebesgue measure of the symmetric difference.
    pub fn symmetric_difference_measure(&self, other: &IntervalSet) -> f64 {
        let mut points: Vec<f64> = Vec::new();
        for &(l, r) in self.intervals.iter().chain(other.intervals.iter()) {
            points.push(l);
            points.push(r);
        }
        points.sort_by(|a, b| a.partial_cmp(b).unwrap());
        points.dedup();
        let mut total = 0.0;
        for w in points.windows(2) {
            let mid = 0.5 * (w[0] + w[1]);
            if self.contains(mid, 0.0) != other.contains(mid, 0.0) {
                total += w[1] - w[0];
            }
        }
        total
    }

    /// Expands every interval by `pad` on both sides (then re-merges).
    pub fn padded(&self, pad: f64) -> IntervalSet {
        IntervalSet::from_intervals(
            self.intervals
                .iter()
                .map(|&(l, r)| (l - pad, r + pad))
                .collect(),
            0.0,
        )
    }

    /// Number of grid boxes of side `eps` (anchored at `origin`) meeting the set.
    pub fn box_count(&self, eps: f64, origin: f64) -> usize {
        assert!(eps > 0.0);
        let mut ranges: Vec<(i64, i64)> = self
            .intervals
            .iter()
            .map(|&(l, r)| {
                (
                    ((l - origin) / eps).floor() as i64,
                    ((r - origin) / eps).floor() as i64,
                )
            })
            .collect();
        ranges.sort_unstable();
        let mut count = 0i64;
        let mut last: Option<i64> = None;
        for (lo, hi) in ranges {
            let lo = match last {
                Some(prev) if lo <= prev => prev + 1,
                _ => lo,
            };
            if lo > hi {
                continue;
            }
            count += hi - lo + 1;
            last = Some(hi);
        }
        count as usize
    }
}
