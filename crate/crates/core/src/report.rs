//! The full analysis pipeline and its serialized run report.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::classify::{classify_all, ClassifiedPair, RelationKind, Scope, Verdict};
use crate::coalition::{coalition_summary, detect_coalitions, CoalitionEpisode, CoalitionSummary};
use crate::error::Result;
use crate::exec::Execution;
use crate::interval::{find_parallel_pairs, Relation};
use crate::io::ParseReport;
use crate::model::{AnalysisConfig, Corpus, Granularity, Millis, TimeInterval, Token, TIME_RESOLUTION_MS};
use crate::pattern::{match_compiled, MatchSpan, Pattern};
use crate::segment::{classify_disalignment, segment_with, DisalignmentType, Episode, Label};
use crate::stats::{co_occurrence, durations, transitions, CoOccurrenceMatrix, DurationReport, TransitionScope, Transitions};
use crate::synth::GENERATOR;

pub const TOOL: &str = "cometlens";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Everything needed to reproduce a run, echoed into the report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConfigEcho {
    pub granularity: Granularity,
    pub gap_tolerance: Millis,
    pub min_episode_duration: Millis,
    pub include_near: bool,
    pub time_resolution_ms: u64,
    pub short_episode_merge: &'static str,
    pub transition_order: &'static str,
    pub focus_persistence: &'static str,
    pub patterns: Vec<String>,
    pub synth_generator: &'static str,
}

impl ConfigEcho {
    fn new(config: &AnalysisConfig, patterns: &[Pattern]) -> ConfigEcho {
        ConfigEcho {
            granularity: config.granularity,
            gap_tolerance: config.gap_tolerance,
            min_episode_duration: config.min_episode_duration,
            include_near: config.include_near,
            time_resolution_ms: TIME_RESOLUTION_MS,
            short_episode_merge: "BACKWARD (a short leading episode merges forward)",
            transition_order: "verbal units by (t_start, unit_id)",
            focus_persistence: "STRICT (focus lasts only while a unit is active)",
            patterns: patterns.iter().map(|p| p.source().to_string()).collect(),
            synth_generator: GENERATOR,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorpusInfo {
    pub units: usize,
    pub actors: Vec<Token>,
    pub span: TimeInterval,
    pub meta: BTreeMap<String, String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct PairSummary {
    pub total: usize,
    pub by_relation: BTreeMap<Relation, usize>,
    pub by_verdict: BTreeMap<Verdict, usize>,
    pub by_scope: BTreeMap<Scope, usize>,
    pub by_modality_relation: BTreeMap<RelationKind, usize>,
}

impl PairSummary {
    fn of(pairs: &[ClassifiedPair]) -> PairSummary {
        let mut s = PairSummary { total: pairs.len(), ..PairSummary::default() };
        for r in [Relation::Simultaneous, Relation::Overlap, Relation::Near] {
            s.by_relation.insert(r, 0);
        }
        for v in [Verdict::Integrated, Verdict::NonIntegrated] {
            s.by_verdict.insert(v, 0);
        }
        for c in [Scope::Individual, Scope::Collective] {
            s.by_scope.insert(c, 0);
        }
        for k in [RelationKind::Redundant, RelationKind::Complementary, RelationKind::NotApplicable] {
            s.by_modality_relation.insert(k, 0);
        }
        for p in pairs {
            *s.by_relation.entry(p.pair.relation).or_default() += 1;
            *s.by_verdict.entry(p.verdict).or_default() += 1;
            *s.by_scope.entry(p.scope).or_default() += 1;
            *s.by_modality_relation.entry(p.modality_relation).or_default() += 1;
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportedEpisode {
    #[serde(flatten)]
    pub episode: Episode,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub disalignment: Option<DisalignmentType>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PatternResult {
    pub pattern: String,
    pub matches: Vec<MatchSpan>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransitionStats {
    pub pooled: Transitions,
    pub per_actor: Transitions,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Stats {
    pub co_occurrence: CoOccurrenceMatrix,
    /// Absent when the corpus has no verbal unit.
    pub transitions: Option<TransitionStats>,
    pub durations: DurationReport,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParseSummary {
    pub unit_count: usize,
    pub warnings: Vec<crate::io::Issue>,
}

/// Serialized with a fixed key order (the field order below).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub tool: &'static str,
    pub tool_version: &'static str,
    pub config: ConfigEcho,
    pub corpus: CorpusInfo,
    pub parse: ParseSummary,
    pub pair_summary: PairSummary,
    pub pairs: Vec<ClassifiedPair>,
    pub episodes: Vec<ReportedEpisode>,
    pub patterns: Vec<PatternResult>,
    pub coalitions: Vec<CoalitionEpisode>,
    pub coalition_summary: CoalitionSummary,
    pub stats: Stats,
    pub warnings: Vec<String>,
}

impl RunReport {
    /// Pretty JSON with a single trailing newline.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn labels(&self) -> Vec<Label> {
        self.episodes.iter().map(|e| e.episode.label).collect()
    }

    /// Internal consistency checks; an empty list means all hold.
    pub fn invariant_violations(&self) -> Vec<String> {
        let mut v = Vec::new();
        let total: u64 = self.episodes.iter().map(|e| e.episode.duration().as_ms()).sum();
        if total != self.corpus.span.duration().as_ms() {
            v.push(format!("episode durations sum to {} ms, span is {}", total, self.corpus.span.duration().as_ms()));
        }
        for w in self.episodes.windows(2) {
            if w[0].episode.interval.end() != w[1].episode.interval.start() {
                v.push(format!("episodes {} and {} do not abut", w[0].episode.interval, w[1].episode.interval));
            }
            if w[0].episode.label == w[1].episode.label && w[0].episode.partition == w[1].episode.partition {
                v.push(format!("adjacent episodes at {} share a state", w[1].episode.interval.start()));
            }
        }
        let co = &self.stats.co_occurrence;
        if co.total + co.excluded_near != self.pairs.len() as u64 {
            v.push(format!("co-occurrence covers {} + {} of {} pairs", co.total, co.excluded_near, self.pairs.len()));
        }
        for p in &self.pairs {
            let l = p.levels;
            if (l.instance && !l.problem) || (l.problem && !l.space) {
                v.push(format!("pair {}/{} breaks level monotonicity", p.pair.unit_a, p.pair.unit_b));
            }
            if p.pair.unit_a >= p.pair.unit_b {
                v.push(format!("pair {}/{} is not canonical", p.pair.unit_a, p.pair.unit_b));
            }
        }
        for c in &self.coalitions {
            let hits = self
                .episodes
                .iter()
                .filter(|e| e.episode.label == Label::NonInt && e.episode.interval == c.interval)
                .count();
            if hits != 1 {
                v.push(format!("coalition {} matches {hits} NON_INT episodes", c.interval));
            }
        }
        if self.coalition_summary.total.count != self.coalitions.len() as u64 {
            v.push("coalition summary count differs from coalition list".to_string());
        }
        v
    }
}

pub fn analyze(corpus: &Corpus, parse: &ParseReport, config: &AnalysisConfig, patterns: &[Pattern]) -> Result<RunReport> {
    analyze_with(corpus, parse, config, patterns, Execution::default())
}

pub fn analyze_with(
    corpus: &Corpus,
    parse: &ParseReport,
    config: &AnalysisConfig,
    patterns: &[Pattern],
    exec: Execution,
) -> Result<RunReport> {
    let seg = segment_with(corpus, config, exec)?;
    let span = corpus.span().expect("segmentation succeeded on a non-empty corpus");
    let pairs = classify_all(&find_parallel_pairs(corpus, config), corpus, config, exec)?;
    let coalitions = detect_coalitions(&seg.episodes);
    let summary = coalition_summary(&coalitions, corpus);
    let mut warnings = seg.warnings.clone();

    let transitions = if corpus.has_verbal() {
        Some(TransitionStats {
            pooled: transitions(corpus, TransitionScope::Pooled)?,
            per_actor: transitions(corpus, TransitionScope::PerActor)?,
        })
    } else {
        warnings.push("no verbal units: transition matrices omitted".to_string());
        None
    };
    let stats = Stats {
        co_occurrence: co_occurrence(&pairs, corpus, config)?,
        transitions,
        durations: durations(&seg.episodes, &coalitions),
    };
    let patterns_out = patterns
        .iter()
        .map(|p| PatternResult { pattern: p.source().to_string(), matches: match_compiled(&seg.episodes, p) })
        .collect();
    let episodes = seg
        .episodes
        .into_iter()
        .map(|e| ReportedEpisode { disalignment: classify_disalignment(&e).ok(), episode: e })
        .collect();

    Ok(RunReport {
        tool: TOOL,
        tool_version: TOOL_VERSION,
        config: ConfigEcho::new(config, patterns),
        corpus: CorpusInfo {
            units: corpus.len(),
            actors: corpus.actors().iter().cloned().collect(),
            span,
            meta: corpus.meta().clone(),
        },
        parse: ParseSummary { unit_count: parse.unit_count, warnings: parse.warnings.clone() },
        pair_summary: PairSummary::of(&pairs),
        pairs,
        episodes,
        patterns: patterns_out,
        coalitions,
        coalition_summary: summary,
        stats,
        warnings,
    })
}

/// Analyzes independent corpora, in parallel across corpora when `exec` is
/// parallel. Results keep the input order.
pub fn analyze_batch(
    corpora: &[(Corpus, ParseReport)],
    config: &AnalysisConfig,
    patterns: &[Pattern],
    exec: Execution,
) -> Vec<Result<RunReport>> {
    exec.map(corpora, |(c, p)| analyze_with(c, p, config, patterns, Execution::Sequential))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::{scatter, ScatterSpec};

    #[test]
    fn report_is_consistent_and_stable() {
        let corpus = scatter(&ScatterSpec::new(11, 120));
        let parse = ParseReport { unit_count: corpus.len(), ..ParseReport::default() };
        let patterns = [Pattern::parse(crate::pattern::COMPOSITE_PATTERN).unwrap()];
        let config = AnalysisConfig::default();
        let a = analyze_with(&corpus, &parse, &config, &patterns, Execution::Sequential).unwrap();
        let b = analyze_with(&corpus, &parse, &config, &patterns, Execution::Parallel).unwrap();
        assert!(a.invariant_violations().is_empty(), "{:?}", a.invariant_violations());
        assert_eq!(a.to_json(), b.to_json());
        let json = a.to_json();
        assert!(json.ends_with("}\n") && !json.ends_with("\n\n"));
        let keys = ["tool", "config", "corpus", "parse", "pairs", "episodes", "coalitions", "stats", "warnings"];
        let pos: Vec<usize> = keys.iter().map(|k| json.find(&format!("\n  \"{k}\":")).unwrap()).collect();
        assert!(pos.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn batch_matches_single_runs() {
        let corpora: Vec<(Corpus, ParseReport)> =
            (0..4).map(|s| (scatter(&ScatterSpec::new(s, 50)), ParseReport::default())).collect();
        let config = AnalysisConfig::default();
        let batch = analyze_batch(&corpora, &config, &[], Execution::Parallel);
        for ((c, p), r) in corpora.iter().zip(batch) {
            assert_eq!(r.unwrap(), analyze(c, p, &config, &[]).unwrap());
        }
    }
}
