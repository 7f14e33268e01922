//! Coalitions: a block of two or more aligned actors working concurrently
//! with at least one other block on a different focus.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::model::{Channel, Corpus, Millis, TimeInterval, Token};
use crate::segment::{classify_disalignment, BlockFocus, DisalignmentType, Episode, Label};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OpposedBlock {
    pub actors: Vec<Token>,
    pub focus: BlockFocus,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CoalitionEpisode {
    pub interval: TimeInterval,
    pub coalition_block: Vec<Token>,
    pub coalition_focus: BlockFocus,
    pub opposed: Vec<OpposedBlock>,
    pub disalignment: DisalignmentType,
    /// Units per actor and channel inside the episode.
    pub modality_profile: BTreeMap<Token, BTreeMap<Channel, u32>>,
}

impl CoalitionEpisode {
    /// Membership key such as `C+M`.
    pub fn membership(&self) -> String {
        join(self.coalition_block.iter().map(Token::as_str))
    }

    /// Channels used by the coalition members, such as `GESTURAL+VERBAL`.
    pub fn profile_key(&self) -> String {
        let channels: BTreeSet<Channel> = self
            .coalition_block
            .iter()
            .filter_map(|a| self.modality_profile.get(a))
            .flat_map(|m| m.keys().copied())
            .collect();
        if channels.is_empty() {
            return "NONE".to_string();
        }
        join(channels.iter().map(|c| c.as_str()))
    }
}

fn join<'a>(parts: impl Iterator<Item = &'a str>) -> String {
    parts.collect::<Vec<_>>().join("+")
}

/// One coalition per maximal block (size >= 2) of every non-integrated
/// episode; equal-sized maximal blocks each yield one.
pub fn detect_coalitions(episodes: &[Episode]) -> Vec<CoalitionEpisode> {
    let mut out = Vec::new();
    for ep in episodes.iter().filter(|e| e.label == Label::NonInt) {
        let max = ep.partition.iter().map(|b| b.actors.len()).max().unwrap_or(0);
        if max < 2 {
            continue;
        }
        let disalignment = classify_disalignment(ep).expect("episode is NON_INT");
        for (i, block) in ep.partition.iter().enumerate() {
            if block.actors.len() != max {
                continue;
            }
            let opposed = ep
                .partition
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, b)| OpposedBlock { actors: b.actors.clone(), focus: b.focus.clone() })
                .collect();
            out.push(CoalitionEpisode {
                interval: ep.interval,
                coalition_block: block.actors.clone(),
                coalition_focus: block.focus.clone(),
                opposed,
                disalignment,
                modality_profile: ep.modalities.clone(),
            });
        }
    }
    // Episodes are already in time order; the sort is stable for ties.
    out.sort_by_key(|c| c.interval.start());
    out
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Tally {
    pub count: u64,
    pub duration: Millis,
}

impl Tally {
    fn add(&mut self, d: Millis) {
        self.count += 1;
        self.duration = self.duration + d;
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct CoalitionSummary {
    pub total: Tally,
    /// Every disalignment type, including zero rows.
    pub by_type: BTreeMap<DisalignmentType, Tally>,
    pub by_membership: BTreeMap<String, Tally>,
    pub by_modality_profile: BTreeMap<String, Tally>,
    /// Coalition participation per roster actor, including zero rows.
    pub by_actor: BTreeMap<Token, Tally>,
}

pub fn coalition_summary(coalitions: &[CoalitionEpisode], corpus: &Corpus) -> CoalitionSummary {
    let mut s = CoalitionSummary {
        by_type: DisalignmentType::ALL.iter().map(|&t| (t, Tally::default())).collect(),
        by_actor: corpus.actors().iter().map(|a| (a.clone(), Tally::default())).collect(),
        ..CoalitionSummary::default()
    };
    for c in coalitions {
        let d = c.interval.duration();
        s.total.add(d);
        s.by_type.entry(c.disalignment).or_default().add(d);
        s.by_membership.entry(c.membership()).or_default().add(d);
        s.by_modality_profile.entry(c.profile_key()).or_default().add(d);
        for a in &c.coalition_block {
            s.by_actor.entry(a.clone()).or_default().add(d);
        }
    }
    s
}
