//! Segmentation of the timeline into episodes of constant alignment.
//!
//! In every slice each active actor's focus is the set of objects of their
//! active units. Actors whose focus is a single class at the configured
//! granularity are grouped into blocks by that class; an actor whose own
//! units disagree sits alone in an `INTRA_SPLIT` block. Consecutive slices
//! with the same label and partition form one episode.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::interval::build_timeline;
use crate::model::{AnalysisConfig, Channel, Corpus, FocusClass, Granularity, Millis, ObjectRef, Space, TimeInterval, Token};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Label {
    /// No active actor.
    Idle,
    /// One active actor.
    Solo,
    /// Two or more active actors, all in one block.
    Int,
    /// Two or more blocks.
    NonInt,
}

impl Label {
    pub const ALL: [Label; 4] = [Label::Int, Label::NonInt, Label::Solo, Label::Idle];

    pub fn as_str(self) -> &'static str {
        match self {
            Label::Idle => "IDLE",
            Label::Solo => "SOLO",
            Label::Int => "INT",
            Label::NonInt => "NON_INT",
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Focus of one actor during a slice.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActorFocus {
    pub actor: Token,
    pub focus_objects: BTreeSet<ObjectRef>,
    pub intra_actor_aligned: bool,
}

/// Representative focus of a block.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(untagged)]
pub enum BlockFocus {
    Class(FocusClass),
    /// Conflicting classes of a single intra-split actor, sorted.
    Split(Vec<FocusClass>),
}

impl BlockFocus {
    pub fn classes(&self) -> &[FocusClass] {
        match self {
            BlockFocus::Class(c) => std::slice::from_ref(c),
            BlockFocus::Split(cs) => cs,
        }
    }
}

impl fmt::Display for BlockFocus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BlockFocus::Class(c) => write!(f, "{c}"),
            BlockFocus::Split(cs) => {
                let keys: Vec<&str> = cs.iter().map(|c| c.key.as_str()).collect();
                write!(f, "SPLIT({})", keys.join("|"))
            }
        }
    }
}

/// Actors pairwise aligned at the configured granularity.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Block {
    /// Sorted, non-empty.
    pub actors: Vec<Token>,
    pub focus: BlockFocus,
    pub intra_split: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Episode {
    pub interval: TimeInterval,
    pub label: Label,
    /// Blocks sorted by their first actor.
    pub partition: Vec<Block>,
    /// Units active at some point of the episode, counted per actor and
    /// channel.
    pub modalities: BTreeMap<Token, BTreeMap<Channel, u32>>,
}

impl Episode {
    pub fn duration(&self) -> Millis {
        self.interval.duration()
    }

    pub fn active_actors(&self) -> usize {
        self.partition.iter().map(|b| b.actors.len()).sum()
    }

    fn same_state(&self, other: &Episode) -> bool {
        self.label == other.label && self.partition == other.partition
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Segmentation {
    pub episodes: Vec<Episode>,
    pub warnings: Vec<String>,
}

/// Per-actor focus over a set of active units (positions into the corpus).
pub fn actor_foci(corpus: &Corpus, active: &[usize], level: Granularity) -> Vec<ActorFocus> {
    let mut by_actor: BTreeMap<&Token, BTreeSet<ObjectRef>> = BTreeMap::new();
    for &i in active {
        let u = &corpus.units()[i];
        by_actor.entry(&u.actor).or_default().insert(u.object.clone());
    }
    by_actor
        .into_iter()
        .map(|(actor, objects)| {
            let first = objects.iter().next().expect("non-empty focus");
            let aligned = objects.iter().all(|o| crate::model::objects_match(first, o, level));
            ActorFocus { actor: actor.clone(), focus_objects: objects, intra_actor_aligned: aligned }
        })
        .collect()
}

/// Groups actors into aligned blocks.
pub fn partition(foci: &[ActorFocus], level: Granularity) -> Vec<Block> {
    let mut aligned: BTreeMap<FocusClass, Vec<Token>> = BTreeMap::new();
    let mut blocks = Vec::new();
    for f in foci {
        let mut classes: Vec<FocusClass> = f.focus_objects.iter().map(|o| FocusClass::of(o, level)).collect();
        classes.sort();
        classes.dedup();
        if f.intra_actor_aligned {
            aligned.entry(classes.swap_remove(0)).or_default().push(f.actor.clone());
        } else {
            blocks.push(Block { actors: vec![f.actor.clone()], focus: BlockFocus::Split(classes), intra_split: true });
        }
    }
    for (class, mut actors) in aligned {
        actors.sort();
        blocks.push(Block { actors, focus: BlockFocus::Class(class), intra_split: false });
    }
    blocks.sort_by(|a, b| a.actors[0].cmp(&b.actors[0]));
    blocks
}

pub fn label_of(partition: &[Block]) -> Label {
    let actors: usize = partition.iter().map(|b| b.actors.len()).sum();
    match (actors, partition.len()) {
        (0, _) => Label::Idle,
        (1, _) => Label::Solo,
        (_, 1) => Label::Int,
        _ => Label::NonInt,
    }
}

struct Draft {
    episode: Episode,
    units: BTreeSet<usize>,
}

impl Draft {
    fn absorb(&mut self, other: Draft) {
        self.episode.interval = self.episode.interval.hull(&other.episode.interval);
        self.units.extend(other.units);
    }
}

pub fn segment(corpus: &Corpus, config: &AnalysisConfig) -> Result<Segmentation> {
    segment_with(corpus, config, Execution::default())
}

pub fn segment_with(corpus: &Corpus, config: &AnalysisConfig, exec: Execution) -> Result<Segmentation> {
    let timeline = build_timeline(corpus)?;
    let level = config.granularity;
    let states = exec.map(&timeline.slices, |slice| {
        let blocks = partition(&actor_foci(corpus, &slice.active, level), level);
        (label_of(&blocks), blocks)
    });

    // Slice-level episodes, merged while the state is unchanged.
    let mut raw: Vec<Draft> = Vec::new();
    for (slice, (label, blocks)) in timeline.slices.iter().zip(states) {
        let draft = Draft {
            episode: Episode { interval: slice.interval, label, partition: blocks, modalities: BTreeMap::new() },
            units: slice.active.iter().copied().collect(),
        };
        match raw.last_mut() {
            Some(last) if last.episode.same_state(&draft.episode) => last.absorb(draft),
            _ => raw.push(draft),
        }
    }

    let mut warnings = Vec::new();
    let drafts = if config.min_episode_duration > Millis::ZERO {
        merge_short(raw, config.min_episode_duration, &mut warnings)
    } else {
        raw
    };

    let episodes = drafts
        .into_iter()
        .map(|d| {
            let mut ep = d.episode;
            for i in d.units {
                let u = &corpus.units()[i];
                *ep.modalities.entry(u.actor.clone()).or_default().entry(u.channel()).or_default() += 1;
            }
            ep
        })
        .collect();
    Ok(Segmentation { episodes, warnings })
}

/// Folds episodes shorter than `min` into the preceding episode. A short
/// leading episode has no predecessor and is folded into the next one.
fn merge_short(raw: Vec<Draft>, min: Millis, warnings: &mut Vec<String>) -> Vec<Draft> {
    let mut out: Vec<Draft> = Vec::with_capacity(raw.len());
    let mut short_head = false;
    for d in raw {
        let short = d.episode.duration() < min;
        let Some(last) = out.last_mut() else {
            short_head = short;
            out.push(d);
            continue;
        };
        if short_head {
            warnings.push(format!(
                "episode {} ({}) shorter than {} s merged into the following episode",
                last.episode.interval,
                last.episode.label,
                min
            ));
            let head = out.pop().expect("head present");
            let mut d = d;
            d.episode.interval = head.episode.interval.hull(&d.episode.interval);
            d.units.extend(head.units);
            short_head = d.episode.duration() < min;
            out.push(d);
            continue;
        }
        if short {
            warnings.push(format!(
                "episode {} ({}) shorter than {} s merged into the preceding episode",
                d.episode.interval,
                d.episode.label,
                min
            ));
            last.absorb(d);
        } else if last.episode.same_state(&d.episode) {
            last.absorb(d);
        } else {
            out.push(d);
        }
    }
    out
}

/// Kind of focus gap between the blocks of a non-integrated episode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum DisalignmentType {
    /// All blocks in the problem/solution space, on different problems.
    ProblemShift,
    ProblemVsGroup,
    ProblemVsDomain,
    GroupVsDomain,
    WithinGroup,
    WithinDomain,
    /// Three spaces involved, or no rule above applies.
    Mixed,
}

impl DisalignmentType {
    pub const ALL: [DisalignmentType; 7] = [
        DisalignmentType::ProblemShift,
        DisalignmentType::ProblemVsGroup,
        DisalignmentType::ProblemVsDomain,
        DisalignmentType::GroupVsDomain,
        DisalignmentType::WithinGroup,
        DisalignmentType::WithinDomain,
        DisalignmentType::Mixed,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            DisalignmentType::ProblemShift => "PROBLEM_SHIFT",
            DisalignmentType::ProblemVsGroup => "PROBLEM_VS_GROUP",
            DisalignmentType::ProblemVsDomain => "PROBLEM_VS_DOMAIN",
            DisalignmentType::GroupVsDomain => "GROUP_VS_DOMAIN",
            DisalignmentType::WithinGroup => "WITHIN_GROUP",
            DisalignmentType::WithinDomain => "WITHIN_DOMAIN",
            DisalignmentType::Mixed => "MIXED",
        }
    }
}

impl fmt::Display for DisalignmentType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

pub fn classify_disalignment(episode: &Episode) -> Result<DisalignmentType> {
    if episode.label != Label::NonInt {
        return Err(Error::NotDisaligned(episode.label.to_string()));
    }
    let classes: Vec<&FocusClass> = episode.partition.iter().flat_map(|b| b.focus.classes()).collect();
    let spaces: BTreeSet<Space> = classes.iter().map(|c| c.space).collect();
    let ps = spaces.contains(&Space::ProblemSolution);
    let group = spaces.contains(&Space::Group);
    let domain = spaces.contains(&Space::Domain);
    Ok(match (ps, group, domain) {
        (true, false, false) => {
            let problems: BTreeSet<&Token> = classes.iter().filter_map(|c| c.problem.as_ref()).collect();
            if problems.len() >= 2 {
                DisalignmentType::ProblemShift
            } else {
                DisalignmentType::Mixed
            }
        }
        (true, true, false) => DisalignmentType::ProblemVsGroup,
        (true, false, true) => DisalignmentType::ProblemVsDomain,
        (false, true, true) => DisalignmentType::GroupVsDomain,
        (false, true, false) => DisalignmentType::WithinGroup,
        (false, false, true) => DisalignmentType::WithinDomain,
        _ => DisalignmentType::Mixed,
    })
}
