//! Descriptive statistics: co-occurrence of classified pairs, verbal move
//! transitions, and episode duration distributions.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::classify::{ClassifiedPair, Verdict};
use crate::coalition::CoalitionEpisode;
use crate::error::{Error, Result};
use crate::interval::Relation;
use crate::model::{space_of, Act, AnalysisConfig, Channel, Corpus, Millis, Space, VerbalAction};
use crate::segment::{Episode, Label};

fn ordered<T: Ord>(a: T, b: T) -> (T, T) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

fn unordered_pairs<T: Copy>(all: &[T]) -> Vec<(T, T)> {
    let mut out = Vec::new();
    for (i, &a) in all.iter().enumerate() {
        for &b in &all[i..] {
            out.push((a, b));
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CoOccurrenceCell {
    pub channels: (Channel, Channel),
    pub verdict: Verdict,
    pub spaces: (Space, Space),
    pub count: u64,
    pub overlap: Millis,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CoOccurrenceMatrix {
    /// Pairs counted in the cells.
    pub total: u64,
    /// `NEAR` pairs left out because `include_near` is off.
    pub excluded_near: u64,
    /// All 72 cells in fixed order: channel pair, verdict, space pair.
    pub cells: Vec<CoOccurrenceCell>,
}

impl CoOccurrenceMatrix {
    pub fn cell(&self, channels: (Channel, Channel), verdict: Verdict, spaces: (Space, Space)) -> &CoOccurrenceCell {
        let (channels, spaces) = (ordered(channels.0, channels.1), ordered(spaces.0, spaces.1));
        self.cells
            .iter()
            .find(|c| c.channels == channels && c.verdict == verdict && c.spaces == spaces)
            .expect("matrix holds every cell")
    }
}

pub fn co_occurrence(pairs: &[ClassifiedPair], corpus: &Corpus, config: &AnalysisConfig) -> Result<CoOccurrenceMatrix> {
    let mut cells = Vec::with_capacity(72);
    let mut index = BTreeMap::new();
    for ch in unordered_pairs(&Channel::ALL) {
        for verdict in [Verdict::Integrated, Verdict::NonIntegrated] {
            for sp in unordered_pairs(&Space::ALL) {
                index.insert((ch, verdict, sp), cells.len());
                cells.push(CoOccurrenceCell { channels: ch, verdict, spaces: sp, count: 0, overlap: Millis::ZERO });
            }
        }
    }
    let mut total = 0;
    let mut excluded_near = 0;
    for p in pairs {
        if p.pair.relation == Relation::Near && !config.include_near {
            excluded_near += 1;
            continue;
        }
        let a = corpus.unit(p.pair.unit_a.as_str())?;
        let b = corpus.unit(p.pair.unit_b.as_str())?;
        let key = (ordered(a.channel(), b.channel()), p.verdict, ordered(space_of(&a.object), space_of(&b.object)));
        let cell = &mut cells[index[&key]];
        cell.count += 1;
        cell.overlap = cell.overlap + p.pair.overlap();
        total += 1;
    }
    Ok(CoOccurrenceMatrix { total, excluded_near, cells })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum TransitionScope {
    PerActor,
    Pooled,
}

/// Verbal action codes crossed with spaces, e.g. `GEN/PROBLEM`.
pub fn transition_states() -> Vec<String> {
    VerbalAction::ALL
        .iter()
        .flat_map(|a| Space::ALL.iter().map(move |s| format!("{}/{}", a.code(), s.short())))
        .collect()
}

fn state_index(action: VerbalAction, space: Space) -> usize {
    let a = VerbalAction::ALL.iter().position(|x| *x == action).expect("known action");
    let s = Space::ALL.iter().position(|x| *x == space).expect("known space");
    a * Space::ALL.len() + s
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TransitionMatrix {
    /// `counts[from][to]`, indexed like [`transition_states`].
    pub counts: Vec<Vec<u64>>,
}

impl TransitionMatrix {
    fn new() -> TransitionMatrix {
        let n = VerbalAction::ALL.len() * Space::ALL.len();
        TransitionMatrix { counts: vec![vec![0; n]; n] }
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn get(&self, from: (VerbalAction, Space), to: (VerbalAction, Space)) -> u64 {
        self.counts[state_index(from.0, from.1)][state_index(to.0, to.1)]
    }

    /// Transitions between action codes, summed over spaces.
    pub fn by_action(&self, from: VerbalAction, to: VerbalAction) -> u64 {
        let (f, t) = (state_index(from, Space::ALL[0]), state_index(to, Space::ALL[0]));
        (0..Space::ALL.len()).flat_map(|i| (0..Space::ALL.len()).map(move |j| (i, j))).map(|(i, j)| self.counts[f + i][t + j]).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Transitions {
    pub scope: TransitionScope,
    pub states: Vec<String>,
    /// Keyed by actor, or by `POOLED`.
    pub matrices: BTreeMap<String, TransitionMatrix>,
}

/// Counts transitions between consecutive verbal units ordered by
/// `(t_start, unit_id)`, either per actor or over all actors.
pub fn transitions(corpus: &Corpus, scope: TransitionScope) -> Result<Transitions> {
    let mut verbal: Vec<(&crate::model::AnnotationUnit, usize)> = corpus
        .units()
        .iter()
        .filter_map(|u| match u.act {
            Act::Verbal { action, .. } => Some((u, state_index(action, space_of(&u.object)))),
            Act::Gestural { .. } => None,
        })
        .collect();
    if verbal.is_empty() {
        return Err(Error::NoVerbal);
    }
    verbal.sort_by(|(a, _), (b, _)| (a.interval.start(), &a.id).cmp(&(b.interval.start(), &b.id)));

    let mut sequences: BTreeMap<String, Vec<usize>> = BTreeMap::new();
    match scope {
        TransitionScope::Pooled => {
            sequences.insert("POOLED".to_string(), verbal.iter().map(|(_, s)| *s).collect());
        }
        TransitionScope::PerActor => {
            for a in corpus.actors() {
                sequences.insert(a.to_string(), Vec::new());
            }
            for (u, s) in &verbal {
                sequences.entry(u.actor.to_string()).or_default().push(*s);
            }
        }
    }
    let matrices = sequences
        .into_iter()
        .map(|(k, seq)| {
            let mut m = TransitionMatrix::new();
            for w in seq.windows(2) {
                m.counts[w[0]][w[1]] += 1;
            }
            (k, m)
        })
        .collect();
    Ok(Transitions { scope, states: transition_states(), matrices })
}

pub const HISTOGRAM_BIN: Millis = Millis(100);

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HistogramBin {
    pub from: Millis,
    pub count: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct DurationStats {
    pub count: u64,
    pub total: Millis,
    /// Rounded half up to the millisecond.
    pub mean: Millis,
    /// Non-empty 100 ms bins `[from, from + 100)`.
    pub histogram: Vec<HistogramBin>,
}

impl DurationStats {
    fn of(durations: impl Iterator<Item = Millis>) -> DurationStats {
        let mut bins: BTreeMap<u64, u64> = BTreeMap::new();
        let (mut count, mut total) = (0u64, 0u64);
        for d in durations {
            count += 1;
            total += d.as_ms();
            *bins.entry(d.as_ms() / HISTOGRAM_BIN.as_ms()).or_default() += 1;
        }
        let mean = if count == 0 { 0 } else { (2 * total + count) / (2 * count) };
        DurationStats {
            count,
            total: Millis(total),
            mean: Millis(mean),
            histogram: bins
                .into_iter()
                .map(|(b, count)| HistogramBin { from: Millis(b * HISTOGRAM_BIN.as_ms()), count })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DurationReport {
    pub total: Millis,
    /// Every label, in the order INT, NON_INT, SOLO, IDLE.
    pub by_label: Vec<(Label, DurationStats)>,
    pub coalitions: DurationStats,
}

impl DurationReport {
    pub fn label(&self, label: Label) -> &DurationStats {
        &self.by_label.iter().find(|(l, _)| *l == label).expect("all labels present").1
    }

    pub fn is_empty(&self) -> bool {
        self.by_label.iter().all(|(_, s)| s.count == 0) && self.coalitions.count == 0
    }
}

pub fn durations(episodes: &[Episode], coalitions: &[CoalitionEpisode]) -> DurationReport {
    let by_label = Label::ALL
        .iter()
        .map(|&l| (l, DurationStats::of(episodes.iter().filter(|e| e.label == l).map(Episode::duration))))
        .collect();
    DurationReport {
        total: Millis(episodes.iter().map(|e| e.duration().as_ms()).sum()),
        by_label,
        coalitions: DurationStats::of(coalitions.iter().map(|c| c.interval.duration())),
    }
}

/// CSV renderings, one table per matrix, with a header row and fixed column
/// and row order.
pub mod csv_out {
    use super::*;

    fn finish(w: csv::Writer<Vec<u8>>) -> Vec<u8> {
        w.into_inner().expect("writing to memory cannot fail")
    }

    fn writer() -> csv::Writer<Vec<u8>> {
        csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new())
    }

    pub fn co_occurrence(m: &CoOccurrenceMatrix) -> Vec<u8> {
        let mut w = writer();
        w.write_record(["channel_a", "channel_b", "verdict", "space_a", "space_b", "count", "overlap"])
            .expect("in-memory write");
        for c in &m.cells {
            w.write_record([
                c.channels.0.as_str(),
                c.channels.1.as_str(),
                c.verdict.as_str(),
                c.spaces.0.short(),
                c.spaces.1.short(),
                &c.count.to_string(),
                &c.overlap.to_string(),
            ])
            .expect("in-memory write");
        }
        finish(w)
    }

    pub fn transitions(t: &Transitions) -> Vec<u8> {
        let mut w = writer();
        w.write_record(["scope", "from", "to", "count"]).expect("in-memory write");
        for (key, m) in &t.matrices {
            for (i, row) in m.counts.iter().enumerate() {
                for (j, n) in row.iter().enumerate() {
                    w.write_record([key.as_str(), &t.states[i], &t.states[j], &n.to_string()]).expect("in-memory write");
                }
            }
        }
        finish(w)
    }

    pub fn durations(d: &DurationReport) -> Vec<u8> {
        let mut w = writer();
        w.write_record(["kind", "label", "count", "total", "mean"]).expect("in-memory write");
        let rows = d.by_label.iter().map(|(l, s)| ("EPISODE", l.as_str(), s)).chain([("COALITION", "ALL", &d.coalitions)]);
        for (kind, label, s) in rows {
            w.write_record([kind, label, &s.count.to_string(), &s.total.to_string(), &s.mean.to_string()])
                .expect("in-memory write");
        }
        finish(w)
    }

    pub fn histogram(d: &DurationReport) -> Vec<u8> {
        let mut w = writer();
        w.write_record(["kind", "label", "bin_from", "bin_to", "count"]).expect("in-memory write");
        let rows = d.by_label.iter().map(|(l, s)| ("EPISODE", l.as_str(), s)).chain([("COALITION", "ALL", &d.coalitions)]);
        for (kind, label, s) in rows {
            for b in &s.histogram {
                w.write_record([
                    kind,
                    label,
                    &b.from.to_string(),
                    &(b.from + HISTOGRAM_BIN).to_string(),
                    &b.count.to_string(),
                ])
                .expect("in-memory write");
            }
        }
        finish(w)
    }
}
