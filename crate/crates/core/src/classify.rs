//! Integration verdicts and redundant / complementary labelling of parallel
//! pairs.

use serde::Serialize;

use crate::error::Result;
use crate::exec::Execution;
use crate::interval::ParallelPair;
use crate::model::{objects_match, AnalysisConfig, AnnotationUnit, Corpus, Granularity};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Integrated,
    NonIntegrated,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Integrated => "INTEGRATED",
            Verdict::NonIntegrated => "NON_INTEGRATED",
        }
    }

    fn from_match(matched: bool) -> Verdict {
        if matched {
            Verdict::Integrated
        } else {
            Verdict::NonIntegrated
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Scope {
    /// Both units belong to the same actor.
    Individual,
    Collective,
}

/// Match result at every granularity level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct LevelResults {
    pub instance: bool,
    pub problem: bool,
    pub space: bool,
}

impl LevelResults {
    pub fn at(&self, level: Granularity) -> bool {
        match level {
            Granularity::Instance => self.instance,
            Granularity::Problem => self.problem,
            Granularity::Space => self.space,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IntegrationVerdict {
    pub pair: ParallelPair,
    pub levels: LevelResults,
    pub verdict: Verdict,
    pub scope: Scope,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum RelationKind {
    Redundant,
    Complementary,
    NotApplicable,
}

impl RelationKind {
    pub fn as_str(self) -> &'static str {
        match self {
            RelationKind::Redundant => "REDUNDANT",
            RelationKind::Complementary => "COMPLEMENTARY",
            RelationKind::NotApplicable => "NOT_APPLICABLE",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ModalityRelation {
    pub pair: ParallelPair,
    pub kind: RelationKind,
}

fn resolve<'c>(pair: &ParallelPair, corpus: &'c Corpus) -> Result<(&'c AnnotationUnit, &'c AnnotationUnit)> {
    Ok((corpus.unit(pair.unit_a.as_str())?, corpus.unit(pair.unit_b.as_str())?))
}

fn levels(a: &AnnotationUnit, b: &AnnotationUnit) -> LevelResults {
    LevelResults {
        instance: objects_match(&a.object, &b.object, Granularity::Instance),
        problem: objects_match(&a.object, &b.object, Granularity::Problem),
        space: objects_match(&a.object, &b.object, Granularity::Space),
    }
}

/// Integrated iff the two objects match at the configured granularity.
pub fn classify_integration(
    pair: &ParallelPair,
    corpus: &Corpus,
    config: &AnalysisConfig,
) -> Result<IntegrationVerdict> {
    let (a, b) = resolve(pair, corpus)?;
    let levels = levels(a, b);
    Ok(IntegrationVerdict {
        pair: pair.clone(),
        levels,
        verdict: Verdict::from_match(levels.at(config.granularity)),
        scope: if a.actor == b.actor { Scope::Individual } else { Scope::Collective },
    })
}

/// Redundant when an integrated cross-channel pair expresses the same action
/// family on the identical object; complementary when it is integrated but
/// the objects differ below the configured level or the families differ;
/// not applicable for non-integrated or same-channel pairs.
pub fn classify_modality_relation(
    pair: &ParallelPair,
    corpus: &Corpus,
    config: &AnalysisConfig,
) -> Result<ModalityRelation> {
    let (a, b) = resolve(pair, corpus)?;
    let kind = relation_kind(a, b, levels(a, b), config.granularity);
    Ok(ModalityRelation { pair: pair.clone(), kind })
}

fn relation_kind(a: &AnnotationUnit, b: &AnnotationUnit, levels: LevelResults, level: Granularity) -> RelationKind {
    if !levels.at(level) || a.channel() == b.channel() {
        RelationKind::NotApplicable
    } else if levels.instance && a.act.family() == b.act.family() {
        RelationKind::Redundant
    } else {
        RelationKind::Complementary
    }
}

/// A pair with both of its classifications.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClassifiedPair {
    pub pair: ParallelPair,
    pub levels: LevelResults,
    pub verdict: Verdict,
    pub scope: Scope,
    pub modality_relation: RelationKind,
}

pub fn classify_pair(pair: &ParallelPair, corpus: &Corpus, config: &AnalysisConfig) -> Result<ClassifiedPair> {
    let v = classify_integration(pair, corpus, config)?;
    let (a, b) = resolve(pair, corpus)?;
    Ok(ClassifiedPair {
        modality_relation: relation_kind(a, b, v.levels, config.granularity),
        pair: v.pair,
        levels: v.levels,
        verdict: v.verdict,
        scope: v.scope,
    })
}

/// Classifies every pair; output order follows the input order.
pub fn classify_all(
    pairs: &[ParallelPair],
    corpus: &Corpus,
    config: &AnalysisConfig,
    exec: Execution,
) -> Result<Vec<ClassifiedPair>> {
    exec.try_map(pairs, |p| classify_pair(p, corpus, config))
}
