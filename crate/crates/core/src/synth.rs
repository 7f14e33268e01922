//! Synthetic corpora with known ground truth.
//!
//! A [`SynthSpec`] schedules, for every stretch of time, which object each
//! actor works on. Each scheduled actor emits a renewal stream of
//! back-to-back units covering its stretch, with exponentially distributed
//! durations (minimum 100 ms). Randomness comes from ChaCha8 seeded with the
//! spec seed, so a seed fully determines the output on every platform.
//!
//! [`scatter`] produces unstructured random corpora (points, overlaps,
//! awkward transcriptions) for oracle and round-trip tests.

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Deserializer, Serialize};

use crate::coalition::{detect_coalitions, CoalitionEpisode};
use crate::error::{Error, Result};
use crate::model::{
    AnnotationUnit, Corpus, GestureAction, GestureAttrs, Granularity, Millis, Modulation, ObjectRef, TimeInterval,
    Token, Tool, VerbalAction,
};
use crate::segment::{label_of, partition, ActorFocus, Episode, Label};

/// Name of the pseudo-random generator, recorded in corpus metadata.
pub const GENERATOR: &str = "ChaCha8";

const MIN_UNIT: u64 = 100;

fn de_secs<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Millis, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Secs {
        Num(serde_json::Number),
        Text(String),
    }
    let text = match Secs::deserialize(d)? {
        Secs::Num(n) => n.to_string(),
        Secs::Text(s) => s,
    };
    text.parse().map_err(serde::de::Error::custom)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleSegment {
    #[serde(deserialize_with = "de_secs")]
    pub start: Millis,
    #[serde(deserialize_with = "de_secs")]
    pub end: Millis,
    /// Actor to object token; unlisted actors are idle.
    #[serde(default)]
    pub assign: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthSpec {
    #[serde(default)]
    pub seed: u64,
    pub actors: Vec<String>,
    #[serde(deserialize_with = "de_secs")]
    pub span: Millis,
    pub schedule: Vec<ScheduleSegment>,
    /// Units per minute per actor.
    pub unit_rate: f64,
    /// Probability that a unit is graphico-gestural.
    #[serde(default)]
    pub modality_mix: f64,
    /// Bound on the uniform perturbation of each actor's focus changes.
    #[serde(default, deserialize_with = "de_secs")]
    pub jitter: Millis,
    /// Level at which the ground truth is computed.
    #[serde(default)]
    pub granularity: Granularity,
}

impl SynthSpec {
    pub fn from_json(text: &str) -> Result<SynthSpec> {
        serde_json::from_str(text).map_err(|e| Error::Spec(e.to_string()))
    }
}

struct Checked {
    actors: Vec<Token>,
    /// Per segment, actor to object.
    segments: Vec<(TimeInterval, BTreeMap<Token, ObjectRef>)>,
}

fn check(spec: &SynthSpec) -> Result<Checked> {
    let bad = |m: String| Err(Error::Spec(m));
    if spec.actors.is_empty() {
        return bad("no actors".into());
    }
    let mut actors = Vec::new();
    for a in &spec.actors {
        let t = Token::new(a.as_str()).map_err(|e| Error::Spec(format!("actor: {e}")))?;
        if actors.contains(&t) {
            return bad(format!("duplicate actor {a:?}"));
        }
        actors.push(t);
    }
    if spec.span == Millis::ZERO {
        return bad("span must be positive".into());
    }
    if !(spec.unit_rate.is_finite() && spec.unit_rate >= 0.0) {
        return bad(format!("unit_rate {} out of range", spec.unit_rate));
    }
    if !(0.0..=1.0).contains(&spec.modality_mix) {
        return bad(format!("modality_mix {} outside [0, 1]", spec.modality_mix));
    }
    let mut at = Millis::ZERO;
    let mut segments = Vec::new();
    for (i, seg) in spec.schedule.iter().enumerate() {
        if seg.start != at {
            return bad(format!("segment {i} starts at {} instead of {at}", seg.start));
        }
        if seg.end <= seg.start {
            return bad(format!("segment {i} is empty or inverted"));
        }
        let mut assign = BTreeMap::new();
        for (actor, obj) in &seg.assign {
            let actor = actors
                .iter()
                .find(|t| t.as_str() == actor)
                .ok_or_else(|| Error::Spec(format!("segment {i}: unknown actor {actor:?}")))?;
            let obj: ObjectRef = obj.parse().map_err(|e| Error::Spec(format!("segment {i}: {e}")))?;
            assign.insert(actor.clone(), obj);
        }
        segments.push((TimeInterval::new(seg.start, seg.end).expect("checked order"), assign));
        at = seg.end;
    }
    if at != spec.span {
        return bad(format!("schedule covers [0, {at}] but span is {}", spec.span));
    }
    Ok(Checked { actors, segments })
}

/// Expected segmentation and coalitions, derived from the schedule alone.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GroundTruth {
    pub episodes: Vec<Episode>,
    pub coalitions: Vec<CoalitionEpisode>,
}

impl GroundTruth {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("ground truth serializes");
        s.push('\n');
        s
    }
}

fn ground_truth(checked: &Checked, level: Granularity) -> GroundTruth {
    let mut episodes: Vec<Episode> = Vec::new();
    for (iv, assign) in &checked.segments {
        let foci: Vec<ActorFocus> = assign
            .iter()
            .map(|(a, o)| ActorFocus { actor: a.clone(), focus_objects: BTreeSet::from([o.clone()]), intra_actor_aligned: true })
            .collect();
        let blocks = partition(&foci, level);
        let ep = Episode { interval: *iv, label: label_of(&blocks), partition: blocks, modalities: BTreeMap::new() };
        match episodes.last_mut() {
            Some(last) if last.label == ep.label && last.partition == ep.partition => {
                last.interval = last.interval.hull(&ep.interval)
            }
            _ => episodes.push(ep),
        }
    }
    // The corpus span runs from the first to the last unit.
    while episodes.first().is_some_and(|e| e.label == Label::Idle) {
        episodes.remove(0);
    }
    while episodes.last().is_some_and(|e| e.label == Label::Idle) {
        episodes.pop();
    }
    let coalitions = detect_coalitions(&episodes);
    GroundTruth { episodes, coalitions }
}

/// Runs of one actor: maximal stretches with the same assignment.
fn actor_runs(checked: &Checked, actor: &Token) -> Vec<(Millis, Millis, Option<ObjectRef>)> {
    let mut runs: Vec<(Millis, Millis, Option<ObjectRef>)> = Vec::new();
    for (iv, assign) in &checked.segments {
        let obj = assign.get(actor).cloned();
        match runs.last_mut() {
            Some(last) if last.2 == obj => last.1 = iv.end(),
            _ => runs.push((iv.start(), iv.end(), obj)),
        }
    }
    runs
}

/// Moves every interior run boundary by a uniform offset in `[-j, j]`,
/// keeping boundaries strictly increasing inside `(0, span)`.
fn jitter_runs(runs: &mut [(Millis, Millis, Option<ObjectRef>)], j: u64, span: u64, rng: &mut ChaCha8Rng) {
    if j == 0 || runs.len() < 2 {
        return;
    }
    let n = runs.len();
    let mut prev = 0u64;
    for k in 0..n - 1 {
        let b = runs[k].1.as_ms() as i64 + rng.gen_range(-(j as i64)..=j as i64);
        let hi = span - (n - 1 - k) as u64;
        let b = (b.max(prev as i64 + 1) as u64).min(hi);
        runs[k].1 = Millis(b);
        runs[k + 1].0 = Millis(b);
        prev = b;
    }
}

fn exp_duration(rng: &mut ChaCha8Rng, mean_ms: f64) -> u64 {
    let u: f64 = rng.gen::<f64>();
    let d = -mean_ms * (1.0 - u).ln();
    (d.round() as u64).max(MIN_UNIT)
}

fn random_act(rng: &mut ChaCha8Rng, gestural_p: f64) -> (Option<(GestureAction, GestureAttrs)>, VerbalAction) {
    if rng.gen_bool(gestural_p) {
        let action = GestureAction::CLOSED[rng.gen_range(0..GestureAction::CLOSED.len())].clone();
        let mut attrs = GestureAttrs::new(Token::new(format!("P{}", rng.gen_range(1..=3))).expect("valid token"));
        attrs.tool = Some([Tool::Hand, Tool::Pen, Tool::Pencil, Tool::Ruler][rng.gen_range(0..4)].clone());
        (Some((action, attrs)), VerbalAction::Generate)
    } else {
        (None, VerbalAction::ALL[rng.gen_range(0..VerbalAction::ALL.len())])
    }
}

pub fn generate(spec: &SynthSpec) -> Result<(Corpus, GroundTruth)> {
    let checked = check(spec)?;
    let mut meta = BTreeMap::new();
    meta.insert("source".to_string(), "synth".to_string());
    meta.insert("seed".to_string(), spec.seed.to_string());
    meta.insert("generator".to_string(), GENERATOR.to_string());
    let roster: BTreeSet<Token> = checked.actors.iter().cloned().collect();

    if spec.unit_rate == 0.0 {
        let corpus = Corpus::new(Vec::new(), roster, meta)?;
        return Ok((corpus, GroundTruth { episodes: Vec::new(), coalitions: Vec::new() }));
    }
    let mean_ms = 60_000.0 / spec.unit_rate;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut units = Vec::new();
    for actor in &checked.actors {
        let mut runs = actor_runs(&checked, actor);
        jitter_runs(&mut runs, spec.jitter.as_ms(), spec.span.as_ms(), &mut rng);
        let mut n = 0u32;
        for (start, end, obj) in runs {
            let Some(obj) = obj else { continue };
            let (mut t, end) = (start.as_ms(), end.as_ms());
            while t < end {
                let mut e = (t + exp_duration(&mut rng, mean_ms)).min(end);
                if end - e < MIN_UNIT {
                    e = end;
                }
                n += 1;
                let id = Token::new(format!("{actor}-{n:05}")).expect("valid token");
                let iv = TimeInterval::from_ms(t, e).expect("t < e");
                let unit = match random_act(&mut rng, spec.modality_mix) {
                    (Some((action, attrs)), _) => AnnotationUnit::gestural(id, actor.clone(), iv, action, obj.clone(), attrs),
                    (None, action) => AnnotationUnit::verbal(id, actor.clone(), iv, action, obj.clone())
                        .with_transcription(format!("utterance {n}")),
                };
                units.push(unit);
                t = e;
            }
        }
    }
    let corpus = Corpus::new(units, roster, meta)?;
    Ok((corpus, ground_truth(&checked, spec.granularity)))
}

/// Parameters for unstructured random corpora.
#[derive(Debug, Clone, PartialEq)]
pub struct ScatterSpec {
    pub seed: u64,
    pub units: usize,
    pub actors: usize,
    pub span: Millis,
    /// Longest unit duration.
    pub max_duration: Millis,
    /// Probability of a zero-length unit.
    pub point_rate: f64,
}

impl ScatterSpec {
    pub fn new(seed: u64, units: usize) -> ScatterSpec {
        ScatterSpec { seed, units, actors: 3, span: Millis(60_000), max_duration: Millis(5_000), point_rate: 0.05 }
    }
}

const OBJECTS: [&str; 14] = [
    "SOL:a@PB1", "SOL:b@PB1", "SOL:a@PB2", "SOL:c@PB3", "DAT", "DAT@PB1", "DAT@PB2:d1", "DAT:d1", "OBJ:wall", "OBJ",
    "PROC:p1", "GOAL", "TASK:t1", "TASK",
];

const TEXT_PIECES: [&str; 10] = ["yes", "on both sides", "\"quoted\"", "back\\slash", "tab\there", "line\nbreak", "ça", "中文", " ", "-"];

fn random_text(rng: &mut ChaCha8Rng) -> Option<String> {
    match rng.gen_range(0..10) {
        0 => None,
        1 => Some(String::new()),
        _ => {
            let n = rng.gen_range(1..4);
            Some((0..n).map(|_| TEXT_PIECES[rng.gen_range(0..TEXT_PIECES.len())]).collect::<Vec<_>>().join(" "))
        }
    }
}

fn opt_token(rng: &mut ChaCha8Rng, p: f64, choices: &[&str]) -> Option<Token> {
    rng.gen_bool(p).then(|| Token::new(choices[rng.gen_range(0..choices.len())]).expect("valid token"))
}

/// A random corpus with arbitrary overlaps, exact duplicates of intervals,
/// zero-length units, extension gestures and request modulations.
pub fn scatter(spec: &ScatterSpec) -> Corpus {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let actors: Vec<Token> = (0..spec.actors.max(1)).map(|i| Token::new(format!("A{i}")).expect("valid token")).collect();
    let mut units: Vec<AnnotationUnit> = Vec::with_capacity(spec.units);
    for k in 0..spec.units {
        let interval = if k > 0 && rng.gen_bool(0.05) {
            units[rng.gen_range(0..units.len())].interval
        } else {
            let s = rng.gen_range(0..=spec.span.as_ms());
            let d = if rng.gen_bool(spec.point_rate) { 0 } else { rng.gen_range(1..=spec.max_duration.as_ms().max(1)) };
            TimeInterval::from_ms(s, s + d).expect("s <= s + d")
        };
        let id = Token::new(format!("u{k:04}")).expect("valid token");
        let actor = actors[rng.gen_range(0..actors.len())].clone();
        let object: ObjectRef = OBJECTS[rng.gen_range(0..OBJECTS.len())].parse().expect("valid object");
        let mut unit = if rng.gen_bool(0.4) {
            let action = if rng.gen_bool(0.15) {
                GestureAction::ext(Token::new(["Movem_2d", "Position", "Wave"][rng.gen_range(0..3)]).expect("valid token"))
                    .expect("not a closed action")
            } else {
                GestureAction::CLOSED[rng.gen_range(0..GestureAction::CLOSED.len())].clone()
            };
            let attrs = GestureAttrs {
                obj1: Token::new(["C16", "C16+P1", "C_Virgin/C16", "P1"][rng.gen_range(0..4)]).expect("valid token"),
                obj2: opt_token(&mut rng, 0.3, &["C16_over_P1", "P2"]),
                tool: rng.gen_bool(0.8).then(|| {
                    [Tool::Hand, Tool::Pen, Tool::Pencil, Tool::Ruler, Tool::Other(Token::new("eraser").expect("valid token"))]
                        [rng.gen_range(0..5)]
                    .clone()
                }),
                area: opt_token(&mut rng, 0.3, &["centre", "left"]),
            };
            AnnotationUnit::gestural(id, actor, interval, action, object, attrs)
        } else {
            let action = VerbalAction::ALL[rng.gen_range(0..VerbalAction::ALL.len())];
            let mut u = AnnotationUnit::verbal(id, actor, interval, action, object);
            if rng.gen_bool(0.2) {
                if let crate::model::Act::Verbal { modulation, .. } = &mut u.act {
                    *modulation = Modulation::Request;
                }
            }
            u
        };
        unit.transcription = random_text(&mut rng);
        units.push(unit);
    }
    let mut meta = BTreeMap::new();
    meta.insert("source".to_string(), "scatter".to_string());
    meta.insert("seed".to_string(), spec.seed.to_string());
    Corpus::new(units, actors.into_iter().collect(), meta).expect("scatter corpora are valid")
}
