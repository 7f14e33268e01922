use std::collections::{BTreeMap, BTreeSet, HashMap};

use super::token::Token;
use super::unit::{AnnotationUnit, Modality};
use super::time::TimeInterval;
use crate::error::{Error, Result};

/// A validated, time-ordered collection of units with its actor roster.
///
/// Units are kept sorted by `(t_start, t_end, unit_id)`; unit ids are unique
/// and every unit's actor belongs to the roster.
#[derive(Debug, Clone)]
pub struct Corpus {
    units: Vec<AnnotationUnit>,
    actors: BTreeSet<Token>,
    meta: BTreeMap<String, String>,
    index: HashMap<Token, usize>,
}

impl PartialEq for Corpus {
    fn eq(&self, other: &Corpus) -> bool {
        self.units == other.units && self.actors == other.actors && self.meta == other.meta
    }
}

impl Eq for Corpus {}

fn check_meta_text(s: &str) -> Result<()> {
    if s.chars().any(|c| c.is_control()) {
        return Err(Error::InvalidValue { field: "meta", value: s.to_string() });
    }
    Ok(())
}

impl Corpus {
    pub fn new(
        mut units: Vec<AnnotationUnit>,
        actors: BTreeSet<Token>,
        meta: BTreeMap<String, String>,
    ) -> Result<Corpus> {
        for (k, v) in &meta {
            Token::new(k.as_str()).map_err(|_| Error::InvalidValue { field: "meta key", value: k.clone() })?;
            check_meta_text(v)?;
        }
        for u in &units {
            if !actors.contains(&u.actor) {
                return Err(Error::UnknownActor(u.actor.to_string()));
            }
        }
        units.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
        let mut index = HashMap::with_capacity(units.len());
        for (i, u) in units.iter().enumerate() {
            if index.insert(u.id.clone(), i).is_some() {
                return Err(Error::DuplicateUnit(u.id.to_string()));
            }
        }
        Ok(Corpus { units, actors, meta, index })
    }

    /// Builds a corpus whose roster is exactly the set of unit actors.
    pub fn from_units(units: Vec<AnnotationUnit>) -> Result<Corpus> {
        let actors = units.iter().map(|u| u.actor.clone()).collect();
        Corpus::new(units, actors, BTreeMap::new())
    }

    pub fn units(&self) -> &[AnnotationUnit] {
        &self.units
    }

    pub fn actors(&self) -> &BTreeSet<Token> {
        &self.actors
    }

    pub fn meta(&self) -> &BTreeMap<String, String> {
        &self.meta
    }

    pub fn len(&self) -> usize {
        self.units.len()
    }

    pub fn is_empty(&self) -> bool {
        self.units.is_empty()
    }

    pub fn position(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn unit(&self, id: &str) -> Result<&AnnotationUnit> {
        self.position(id)
            .map(|i| &self.units[i])
            .ok_or_else(|| Error::UnknownUnit(id.to_string()))
    }

    /// `[min t_start, max t_end]`, or `None` for an empty corpus.
    pub fn span(&self) -> Option<TimeInterval> {
        let first = self.units.first()?;
        let end = self.units.iter().map(|u| u.interval.end()).max()?;
        TimeInterval::new(first.interval.start(), end).ok()
    }

    pub fn has_verbal(&self) -> bool {
        self.units.iter().any(|u| u.modality() == Modality::Verbal)
    }

    /// Copy of the corpus without any unit of `actor`; the roster keeps the
    /// remaining actors only.
    pub fn without_actor(&self, actor: &str) -> Corpus {
        let units = self.units.iter().filter(|u| u.actor.as_str() != actor).cloned().collect();
        let actors = self.actors.iter().filter(|a| a.as_str() != actor).cloned().collect();
        Corpus::new(units, actors, self.meta.clone()).expect("subset of a valid corpus is valid")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ObjectRef, VerbalAction};

    fn unit(id: &str, actor: &str, s: u64, e: u64) -> AnnotationUnit {
        AnnotationUnit::verbal(
            Token::new(id).unwrap(),
            Token::new(actor).unwrap(),
            TimeInterval::from_ms(s, e).unwrap(),
            VerbalAction::Generate,
            ObjectRef::Task(None),
        )
    }

    #[test]
    fn sorts_by_time_then_id() {
        let c = Corpus::from_units(vec![unit("b", "A", 5, 9), unit("a", "A", 5, 9), unit("c", "A", 1, 2), unit("d", "A", 5, 6)])
            .unwrap();
        let ids: Vec<&str> = c.units().iter().map(|u| u.id.as_str()).collect();
        assert_eq!(ids, ["c", "d", "a", "b"]);
        assert_eq!(c.span().unwrap(), TimeInterval::from_ms(1, 9).unwrap());
    }

    #[test]
    fn rejects_duplicates_and_unknown_actors() {
        let err = Corpus::from_units(vec![unit("a", "A", 0, 1), unit("a", "B", 2, 3)]).unwrap_err();
        assert_eq!(err.code(), "E_DUPID");
        let roster = [Token::new("A").unwrap()].into_iter().collect();
        let err = Corpus::new(vec![unit("a", "B", 0, 1)], roster, BTreeMap::new()).unwrap_err();
        assert_eq!(err.code(), "E_ACTOR");
    }
}
