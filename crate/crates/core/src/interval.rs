//! Temporal relations between units: parallel-pair detection and the slice
//! timeline used for segmentation.
//!
//! Interval semantics: for active-set membership a unit with positive
//! duration covers `[start, end)`; a zero-length unit is a closed point.
//! For pairing, a point at `t` overlaps any unit whose closed interval
//! contains `t`, while two back-to-back units only touch (gap 0, `NEAR`).

use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{AnalysisConfig, Corpus, Millis, TimeInterval, Token};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Relation {
    /// Identical intervals.
    Simultaneous,
    /// Positive intersection, or a point inside the other unit.
    Overlap,
    /// Disjoint (or touching) with a gap no larger than the tolerance.
    Near,
}

impl Relation {
    pub fn as_str(self) -> &'static str {
        match self {
            Relation::Simultaneous => "SIMULTANEOUS",
            Relation::Overlap => "OVERLAP",
            Relation::Near => "NEAR",
        }
    }
}

/// Two units active in parallel, in canonical order (`unit_a < unit_b`).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct ParallelPair {
    pub unit_a: Token,
    pub unit_b: Token,
    pub relation: Relation,
    /// The intersection, or the gap between the units for `NEAR`.
    pub shared: TimeInterval,
}

impl ParallelPair {
    /// Overlap length; zero for `NEAR` pairs.
    pub fn overlap(&self) -> Millis {
        match self.relation {
            Relation::Near => Millis::ZERO,
            _ => self.shared.duration(),
        }
    }
}

/// Relation of two intervals, or `None` when they are too far apart.
pub fn relate(a: &TimeInterval, b: &TimeInterval, gap_tolerance: Millis) -> Option<(Relation, TimeInterval)> {
    if a == b {
        return Some((Relation::Simultaneous, *a));
    }
    let lo = a.start().max(b.start());
    let hi = a.end().min(b.end());
    if lo < hi || (lo == hi && (a.is_point() || b.is_point())) {
        return Some((Relation::Overlap, TimeInterval::new(lo, hi).expect("lo <= hi")));
    }
    // Disjoint or touching: lo >= hi.
    let gap = lo - hi;
    (gap <= gap_tolerance).then(|| (Relation::Near, TimeInterval::new(hi, lo).expect("hi <= lo")))
}

fn canonical(corpus: &Corpus, i: usize, j: usize, relation: Relation, shared: TimeInterval) -> ParallelPair {
    let (a, b) = (&corpus.units()[i].id, &corpus.units()[j].id);
    let (unit_a, unit_b) = if a < b { (a.clone(), b.clone()) } else { (b.clone(), a.clone()) };
    ParallelPair { unit_a, unit_b, relation, shared }
}

/// All pairs of units (any actors, any modalities) that are simultaneous,
/// overlapping, or within `gap_tolerance` of each other, sorted by
/// `(unit_a, unit_b)`.
///
/// Sweeps units in start order keeping a heap of units whose end plus the
/// tolerance has not yet been passed; every unit still in the heap when a new
/// unit starts forms a reportable pair with it, so no candidate is wasted.
pub fn find_parallel_pairs(corpus: &Corpus, config: &AnalysisConfig) -> Vec<ParallelPair> {
    let units = corpus.units();
    let tol = config.gap_tolerance;
    let mut live: BinaryHeap<Reverse<(Millis, usize)>> = BinaryHeap::new();
    let mut active: BTreeSet<usize> = BTreeSet::new();
    let mut pairs = Vec::new();

    // Units are already sorted by start.
    for (j, u) in units.iter().enumerate() {
        let start = u.interval.start();
        while let Some(Reverse((reach, i))) = live.peek().copied() {
            if reach >= start {
                break;
            }
            live.pop();
            active.remove(&i);
        }
        for &i in &active {
            let (relation, shared) = relate(&units[i].interval, &u.interval, tol)
                .expect("live units are within tolerance of every later start");
            pairs.push(canonical(corpus, i, j, relation, shared));
        }
        live.push(Reverse((u.interval.end() + tol, j)));
        active.insert(j);
    }
    pairs.sort_by(|x, y| (&x.unit_a, &x.unit_b).cmp(&(&y.unit_a, &y.unit_b)));
    pairs
}

/// A stretch of time with a constant set of active units.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Slice {
    pub interval: TimeInterval,
    /// Positions into `corpus.units()`, ascending.
    pub active: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Timeline {
    /// Sorted distinct start and end times.
    pub boundaries: Vec<Millis>,
    /// Slices in time order. Between consecutive boundaries there is one
    /// slice; a boundary carrying zero-length units also gets a point slice
    /// `[t, t]`, ordered before the slice that starts at `t`.
    pub slices: Vec<Slice>,
}

impl Timeline {
    pub fn span(&self) -> TimeInterval {
        let first = *self.boundaries.first().expect("timeline is non-empty");
        let last = *self.boundaries.last().expect("timeline is non-empty");
        TimeInterval::new(first, last).expect("boundaries sorted")
    }
}

pub fn build_timeline(corpus: &Corpus) -> Result<Timeline> {
    let units = corpus.units();
    if units.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let mut boundaries: Vec<Millis> = units.iter().flat_map(|u| [u.interval.start(), u.interval.end()]).collect();
    boundaries.sort_unstable();
    boundaries.dedup();

    let mut by_start: Vec<usize> = (0..units.len()).filter(|&i| !units[i].interval.is_point()).collect();
    by_start.sort_by_key(|&i| units[i].interval.start());
    let mut by_end = by_start.clone();
    by_end.sort_by_key(|&i| units[i].interval.end());
    let points: Vec<usize> = (0..units.len()).filter(|&i| units[i].interval.is_point()).collect();

    let (mut si, mut ei, mut pi) = (0, 0, 0);
    let mut active: BTreeSet<usize> = BTreeSet::new();
    let mut slices = Vec::with_capacity(boundaries.len() * 2);

    for (k, &t) in boundaries.iter().enumerate() {
        while ei < by_end.len() && units[by_end[ei]].interval.end() <= t {
            active.remove(&by_end[ei]);
            ei += 1;
        }
        while si < by_start.len() && units[by_start[si]].interval.start() <= t {
            active.insert(by_start[si]);
            si += 1;
        }
        // Points are sorted by start because units are.
        let point_from = pi;
        while pi < points.len() && units[points[pi]].interval.start() == t {
            pi += 1;
        }
        if pi > point_from {
            let mut set: BTreeSet<usize> = active.clone();
            set.extend(&points[point_from..pi]);
            slices.push(Slice { interval: TimeInterval::point(t), active: set.into_iter().collect() });
        }
        if let Some(&next) = boundaries.get(k + 1) {
            slices.push(Slice {
                interval: TimeInterval::new(t, next).expect("boundaries ascend"),
                active: active.iter().copied().collect(),
            });
        }
    }
    Ok(Timeline { boundaries, slices })
}
