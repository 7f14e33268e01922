//! Design objects (the argument of a coded unit) and the three
//! representation spaces they belong to.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize, Serializer};

use super::token::Token;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Category {
    Dat,
    Sol,
    Obj,
    Proc,
    Goal,
    Task,
}

impl Category {
    pub const ALL: [Category; 6] =
        [Category::Dat, Category::Sol, Category::Obj, Category::Proc, Category::Goal, Category::Task];

    pub fn as_str(self) -> &'static str {
        match self {
            Category::Dat => "DAT",
            Category::Sol => "SOL",
            Category::Obj => "OBJ",
            Category::Proc => "PROC",
            Category::Goal => "GOAL",
            Category::Task => "TASK",
        }
    }

    pub fn space(self) -> Space {
        match self {
            Category::Dat | Category::Sol => Space::ProblemSolution,
            Category::Goal | Category::Task => Space::Group,
            Category::Obj | Category::Proc => Space::Domain,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Space {
    ProblemSolution,
    Group,
    Domain,
}

impl Space {
    pub const ALL: [Space; 3] = [Space::ProblemSolution, Space::Group, Space::Domain];

    pub fn as_str(self) -> &'static str {
        match self {
            Space::ProblemSolution => "PROBLEM_SOLUTION",
            Space::Group => "GROUP",
            Space::Domain => "DOMAIN",
        }
    }

    /// Short form used in matrix keys.
    pub fn short(self) -> &'static str {
        match self {
            Space::ProblemSolution => "PROBLEM",
            Space::Group => "GROUP",
            Space::Domain => "DOMAIN",
        }
    }
}

impl fmt::Display for Space {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Level at which two objects are considered "the same category".
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Granularity {
    Instance,
    #[default]
    Problem,
    Space,
}

impl Granularity {
    pub const ALL: [Granularity; 3] = [Granularity::Instance, Granularity::Problem, Granularity::Space];

    pub fn as_str(self) -> &'static str {
        match self {
            Granularity::Instance => "INSTANCE",
            Granularity::Problem => "PROBLEM",
            Granularity::Space => "SPACE",
        }
    }
}

impl fmt::Display for Granularity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Granularity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Granularity> {
        match s.to_ascii_uppercase().as_str() {
            "INSTANCE" => Ok(Granularity::Instance),
            "PROBLEM" => Ok(Granularity::Problem),
            "SPACE" => Ok(Granularity::Space),
            _ => Err(Error::InvalidValue { field: "granularity", value: s.to_string() }),
        }
    }
}

/// The coded object of a unit.
///
/// Solutions are always indexed by the problem they answer; problem data may
/// optionally be attached to a problem.
///
/// Textual form: `DAT[@<pb>][:<inst>]`, `SOL:<sid>@<pb>`, `OBJ[:<inst>]`,
/// `PROC[:<inst>]`, `GOAL[:<inst>]`, `TASK[:<inst>]`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ObjectRef {
    Dat { problem: Option<Token>, instance: Option<Token> },
    Sol { solution: Token, problem: Token },
    Obj(Option<Token>),
    Proc(Option<Token>),
    Goal(Option<Token>),
    Task(Option<Token>),
}

fn ident(s: &str, whole: &str) -> Result<Token> {
    if s.contains('@') || s.contains(':') {
        return Err(Error::InvalidObject(whole.to_string(), "component contains '@' or ':'"));
    }
    Token::new(s).map_err(|_| Error::InvalidObject(whole.to_string(), "empty or malformed component"))
}

impl ObjectRef {
    pub fn sol(solution: &str, problem: &str) -> Result<ObjectRef> {
        let whole = format!("SOL:{solution}@{problem}");
        Ok(ObjectRef::Sol { solution: ident(solution, &whole)?, problem: ident(problem, &whole)? })
    }

    pub fn category(&self) -> Category {
        match self {
            ObjectRef::Dat { .. } => Category::Dat,
            ObjectRef::Sol { .. } => Category::Sol,
            ObjectRef::Obj(_) => Category::Obj,
            ObjectRef::Proc(_) => Category::Proc,
            ObjectRef::Goal(_) => Category::Goal,
            ObjectRef::Task(_) => Category::Task,
        }
    }

    pub fn problem_id(&self) -> Option<&Token> {
        match self {
            ObjectRef::Dat { problem, .. } => problem.as_ref(),
            ObjectRef::Sol { problem, .. } => Some(problem),
            _ => None,
        }
    }

    pub fn solution_id(&self) -> Option<&Token> {
        match self {
            ObjectRef::Sol { solution, .. } => Some(solution),
            _ => None,
        }
    }

    pub fn instance_id(&self) -> Option<&Token> {
        match self {
            ObjectRef::Dat { instance, .. } => instance.as_ref(),
            ObjectRef::Sol { .. } => None,
            ObjectRef::Obj(i) | ObjectRef::Proc(i) | ObjectRef::Goal(i) | ObjectRef::Task(i) => i.as_ref(),
        }
    }
}

impl fmt::Display for ObjectRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ObjectRef::Sol { solution, problem } => write!(f, "SOL:{solution}@{problem}"),
            ObjectRef::Dat { problem, instance } => {
                f.write_str("DAT")?;
                if let Some(p) = problem {
                    write!(f, "@{p}")?;
                }
                if let Some(i) = instance {
                    write!(f, ":{i}")?;
                }
                Ok(())
            }
            other => {
                f.write_str(other.category().as_str())?;
                if let Some(i) = other.instance_id() {
                    write!(f, ":{i}")?;
                }
                Ok(())
            }
        }
    }
}

impl FromStr for ObjectRef {
    type Err = Error;

    fn from_str(s: &str) -> Result<ObjectRef> {
        let head_len = s.find([':', '@']).unwrap_or(s.len());
        let (head, rest) = s.split_at(head_len);
        match head {
            "SOL" => {
                let body = rest
                    .strip_prefix(':')
                    .ok_or(Error::InvalidObject(s.to_string(), "SOL requires a solution id"))?;
                let (sid, pb) = body
                    .split_once('@')
                    .ok_or(Error::InvalidObject(s.to_string(), "SOL requires a problem id"))?;
                Ok(ObjectRef::Sol { solution: ident(sid, s)?, problem: ident(pb, s)? })
            }
            "DAT" => {
                let (problem, inst_part) = match rest.strip_prefix('@') {
                    Some(after) => match after.split_once(':') {
                        Some((pb, inst)) => (Some(ident(pb, s)?), Some(inst)),
                        None => (Some(ident(after, s)?), None),
                    },
                    None if rest.is_empty() => (None, None),
                    None => (None, Some(rest.strip_prefix(':').unwrap_or(rest))),
                };
                let instance = inst_part.map(|i| ident(i, s)).transpose()?;
                Ok(ObjectRef::Dat { problem, instance })
            }
            "OBJ" | "PROC" | "GOAL" | "TASK" => {
                let instance = if rest.is_empty() {
                    None
                } else {
                    let inst = rest
                        .strip_prefix(':')
                        .ok_or(Error::InvalidObject(s.to_string(), "problem ids apply to DAT and SOL only"))?;
                    Some(ident(inst, s)?)
                };
                Ok(match head {
                    "OBJ" => ObjectRef::Obj(instance),
                    "PROC" => ObjectRef::Proc(instance),
                    "GOAL" => ObjectRef::Goal(instance),
                    _ => ObjectRef::Task(instance),
                })
            }
            _ => Err(Error::InvalidObject(s.to_string(), "unknown object category")),
        }
    }
}

impl Serialize for ObjectRef {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// Representation space of an object.
pub fn space_of(object: &ObjectRef) -> Space {
    object.category().space()
}

/// Whether two objects belong to the same category at `level`.
///
/// * `Instance`: full equality.
/// * `Problem`: solutions match when they answer the same problem; problem
///   data matches other problem data on the same problem, or by instance when
///   neither carries a problem; other categories match on category and
///   instance. Different categories never match.
/// * `Space`: same representation space.
pub fn objects_match(a: &ObjectRef, b: &ObjectRef, level: Granularity) -> bool {
    match level {
        Granularity::Instance => a == b,
        Granularity::Space => space_of(a) == space_of(b),
        Granularity::Problem => match (a, b) {
            (ObjectRef::Sol { problem: p, .. }, ObjectRef::Sol { problem: q, .. }) => p == q,
            (
                ObjectRef::Dat { problem: Some(p), .. },
                ObjectRef::Dat { problem: Some(q), .. },
            ) => p == q,
            (
                ObjectRef::Dat { problem: None, instance: i },
                ObjectRef::Dat { problem: None, instance: j },
            ) => i == j,
            (ObjectRef::Dat { .. }, ObjectRef::Dat { .. }) => false,
            _ => a.category() == b.category() && a.instance_id() == b.instance_id(),
        },
    }
}

/// The equivalence class of an object at a granularity level: two objects
/// match exactly when their classes are equal.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct FocusClass {
    pub space: Space,
    /// Canonical class label: the full object token at `Instance`,
    /// `SOL@<pb>` / `DAT@<pb>` / `<CAT>[:<inst>]` at `Problem`, the space
    /// name at `Space`.
    pub key: String,
    /// Problem the class is attached to, when known below `Space` level.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub problem: Option<Token>,
}

impl FocusClass {
    pub fn of(object: &ObjectRef, level: Granularity) -> FocusClass {
        let space = space_of(object);
        let (key, problem) = match level {
            Granularity::Instance => (object.to_string(), object.problem_id().cloned()),
            Granularity::Space => (space.as_str().to_string(), None),
            Granularity::Problem => match object {
                ObjectRef::Sol { problem, .. } => (format!("SOL@{problem}"), Some(problem.clone())),
                ObjectRef::Dat { problem: Some(p), .. } => (format!("DAT@{p}"), Some(p.clone())),
                ObjectRef::Dat { problem: None, instance } => (
                    match instance {
                        Some(i) => format!("DAT:{i}"),
                        None => "DAT".to_string(),
                    },
                    None,
                ),
                other => (other.to_string(), None),
            },
        };
        FocusClass { space, key, problem }
    }
}

impl fmt::Display for FocusClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.key)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn o(s: &str) -> ObjectRef {
        s.parse().unwrap()
    }

    #[test]
    fn grammar_round_trips() {
        for s in ["DAT", "DAT@PB1", "DAT:x", "DAT@PB1:x", "SOL:a@PB1", "OBJ", "OBJ:wall", "PROC:p", "GOAL", "TASK:t1"] {
            assert_eq!(o(s).to_string(), s);
        }
    }

    #[test]
    fn malformed_objects() {
        for bad in ["SOL", "SOL:a", "SOL:@PB1", "SOL:a@", "FOO", "OBJ@PB1", "DAT@", "TASK:", "sol:a@PB1", "OBJ:a:b"] {
            let err = bad.parse::<ObjectRef>().unwrap_err();
            assert_eq!(err.code(), "E_OBJECT", "{bad}");
        }
    }

    #[test]
    fn space_table() {
        assert_eq!(space_of(&o("SOL:a@PB1")), Space::ProblemSolution);
        assert_eq!(space_of(&o("DAT")), Space::ProblemSolution);
        assert_eq!(space_of(&o("TASK")), Space::Group);
        assert_eq!(space_of(&o("GOAL:g")), Space::Group);
        assert_eq!(space_of(&o("PROC")), Space::Domain);
        assert_eq!(space_of(&o("OBJ:x")), Space::Domain);
    }

    #[test]
    fn solution_matching_by_problem() {
        let a1 = o("SOL:a@PB1");
        let b1 = o("SOL:b@PB1");
        let b2 = o("SOL:b@PB2");
        assert!(objects_match(&a1, &b1, Granularity::Problem));
        assert!(!objects_match(&a1, &b2, Granularity::Problem));
        assert!(objects_match(&a1, &a1, Granularity::Instance));
        assert!(!objects_match(&a1, &b1, Granularity::Instance));
        assert!(!objects_match(&a1, &o("TASK"), Granularity::Space));
        assert!(objects_match(&a1, &b2, Granularity::Space));
    }

    #[test]
    fn data_and_solutions_never_match_at_problem_level() {
        assert!(!objects_match(&o("DAT@PB1"), &o("SOL:a@PB1"), Granularity::Problem));
        assert!(objects_match(&o("DAT@PB1:x"), &o("DAT@PB1:y"), Granularity::Problem));
        assert!(!objects_match(&o("DAT@PB1:x"), &o("DAT:x"), Granularity::Problem));
        assert!(objects_match(&o("DAT:x"), &o("DAT:x"), Granularity::Problem));
        assert!(!objects_match(&o("DAT:x"), &o("DAT:y"), Granularity::Problem));
        assert!(objects_match(&o("OBJ:w"), &o("OBJ:w"), Granularity::Problem));
        assert!(!objects_match(&o("OBJ:w"), &o("OBJ"), Granularity::Problem));
    }

    #[test]
    fn focus_class_keys() {
        assert_eq!(FocusClass::of(&o("SOL:a@PB1"), Granularity::Problem).key, "SOL@PB1");
        assert_eq!(FocusClass::of(&o("SOL:a@PB1"), Granularity::Instance).key, "SOL:a@PB1");
        assert_eq!(FocusClass::of(&o("TASK:t"), Granularity::Space).key, "GROUP");
        assert_eq!(FocusClass::of(&o("DAT:q"), Granularity::Problem).key, "DAT:q");
    }
}
