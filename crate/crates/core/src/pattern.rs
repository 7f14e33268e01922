//! Regular expressions over episode labels.
//!
//! Syntax: the labels `INT`, `NON_INT` (also `NON-INT`), `SOLO`, `IDLE`
//! (case-insensitive), juxtaposition for concatenation, `|` for alternation,
//! postfix `*`, `+`, `?`, and parentheses. Matches are leftmost-longest and
//! non-overlapping; empty matches are never reported.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::TimeInterval;
use crate::segment::{Episode, Label};

/// Integrated activity interrupted by non-integrated activity and then
/// resumed, with solo or idle interludes admitted between the parts.
pub const COMPOSITE_PATTERN: &str = "INT (SOLO | IDLE)* NON_INT (SOLO | IDLE | NON_INT)* INT";

#[derive(Debug, Clone, PartialEq, Eq)]
enum Ast {
    Label(Label),
    Concat(Vec<Ast>),
    Alt(Vec<Ast>),
    Star(Box<Ast>),
    Plus(Box<Ast>),
    Opt(Box<Ast>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Label(Label),
    Open,
    Close,
    Bar,
    Star,
    Plus,
    Quest,
}

fn tokenize(src: &str) -> Result<Vec<Tok>> {
    let mut out = Vec::new();
    let mut chars = src.char_indices().peekable();
    while let Some(&(i, c)) = chars.peek() {
        match c {
            c if c.is_whitespace() => {
                chars.next();
            }
            '(' | ')' | '|' | '*' | '+' | '?' => {
                chars.next();
                out.push(match c {
                    '(' => Tok::Open,
                    ')' => Tok::Close,
                    '|' => Tok::Bar,
                    '*' => Tok::Star,
                    '+' => Tok::Plus,
                    _ => Tok::Quest,
                });
            }
            c if c.is_ascii_alphabetic() || c == '_' || c == '-' => {
                let mut end = i;
                while let Some(&(j, d)) = chars.peek() {
                    if d.is_ascii_alphabetic() || d == '_' || d == '-' {
                        end = j + d.len_utf8();
                        chars.next();
                    } else {
                        break;
                    }
                }
                let word = &src[i..end];
                let label = match word.to_ascii_uppercase().replace('-', "_").as_str() {
                    "INT" => Label::Int,
                    "NON_INT" | "NONINT" => Label::NonInt,
                    "SOLO" => Label::Solo,
                    "IDLE" => Label::Idle,
                    _ => return Err(Error::Pattern(format!("unknown label {word:?}"))),
                };
                out.push(Tok::Label(label));
            }
            other => return Err(Error::Pattern(format!("unexpected character {other:?} at {i}"))),
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<Tok>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn alt(&mut self) -> Result<Ast> {
        let mut arms = vec![self.seq()?];
        while self.peek() == Some(&Tok::Bar) {
            self.pos += 1;
            arms.push(self.seq()?);
        }
        Ok(if arms.len() == 1 { arms.pop().expect("one arm") } else { Ast::Alt(arms) })
    }

    fn seq(&mut self) -> Result<Ast> {
        let mut items = Vec::new();
        while matches!(self.peek(), Some(Tok::Label(_)) | Some(Tok::Open)) {
            items.push(self.postfix()?);
        }
        match items.len() {
            0 => Err(Error::Pattern(format!("expected a label or group at token {}", self.pos + 1))),
            1 => Ok(items.pop().expect("one item")),
            _ => Ok(Ast::Concat(items)),
        }
    }

    fn postfix(&mut self) -> Result<Ast> {
        let mut node = self.atom()?;
        loop {
            node = match self.peek() {
                Some(Tok::Star) => Ast::Star(Box::new(node)),
                Some(Tok::Plus) => Ast::Plus(Box::new(node)),
                Some(Tok::Quest) => Ast::Opt(Box::new(node)),
                _ => return Ok(node),
            };
            self.pos += 1;
        }
    }

    fn atom(&mut self) -> Result<Ast> {
        match self.peek().cloned() {
            Some(Tok::Label(l)) => {
                self.pos += 1;
                Ok(Ast::Label(l))
            }
            Some(Tok::Open) => {
                self.pos += 1;
                let inner = self.alt()?;
                if self.peek() != Some(&Tok::Close) {
                    return Err(Error::Pattern("unbalanced parenthesis".to_string()));
                }
                self.pos += 1;
                Ok(inner)
            }
            _ => Err(Error::Pattern("expected a label or group".to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy)]
enum State {
    Sym(Label, usize),
    Split(usize, usize),
    Match,
}

/// A compiled label pattern.
#[derive(Debug, Clone)]
pub struct Pattern {
    source: String,
    states: Vec<State>,
    start: usize,
}

impl Pattern {
    pub fn parse(src: &str) -> Result<Pattern> {
        let toks = tokenize(src)?;
        if toks.is_empty() {
            return Err(Error::Pattern("empty pattern".to_string()));
        }
        let mut parser = Parser { toks, pos: 0 };
        let ast = parser.alt()?;
        if parser.pos != parser.toks.len() {
            return Err(Error::Pattern(format!("unexpected token at position {}", parser.pos + 1)));
        }
        let mut states = vec![State::Match];
        let start = compile(&ast, 0, &mut states);
        Ok(Pattern { source: src.to_string(), states, start })
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    fn closure(&self, seeds: impl IntoIterator<Item = usize>) -> BTreeSet<usize> {
        let mut seen = BTreeSet::new();
        let mut stack: Vec<usize> = seeds.into_iter().collect();
        while let Some(s) = stack.pop() {
            if !seen.insert(s) {
                continue;
            }
            if let State::Split(a, b) = self.states[s] {
                stack.push(a);
                stack.push(b);
            }
        }
        seen
    }

    fn accepts(&self, set: &BTreeSet<usize>) -> bool {
        set.iter().any(|&s| matches!(self.states[s], State::Match))
    }

    /// Length of the longest non-empty match starting at `from`.
    fn longest_at(&self, labels: &[Label], from: usize) -> Option<usize> {
        let mut set = self.closure([self.start]);
        let mut best = None;
        for (k, &label) in labels[from..].iter().enumerate() {
            let next: Vec<usize> = set
                .iter()
                .filter_map(|&s| match self.states[s] {
                    State::Sym(l, to) if l == label => Some(to),
                    _ => None,
                })
                .collect();
            if next.is_empty() {
                break;
            }
            set = self.closure(next);
            if self.accepts(&set) {
                best = Some(k + 1);
            }
        }
        best
    }

    /// Leftmost-longest, non-overlapping matches as half-open index ranges.
    pub fn find_all(&self, labels: &[Label]) -> Vec<std::ops::Range<usize>> {
        let mut out = Vec::new();
        let mut i = 0;
        while i < labels.len() {
            match self.longest_at(labels, i) {
                Some(len) => {
                    out.push(i..i + len);
                    i += len;
                }
                None => i += 1,
            }
        }
        out
    }
}

/// Compiles `ast` so that it continues to state `next`; returns its entry.
fn compile(ast: &Ast, next: usize, states: &mut Vec<State>) -> usize {
    let push = |states: &mut Vec<State>, s: State| {
        states.push(s);
        states.len() - 1
    };
    match ast {
        Ast::Label(l) => push(states, State::Sym(*l, next)),
        Ast::Concat(items) => items.iter().rev().fold(next, |to, item| compile(item, to, states)),
        Ast::Alt(arms) => {
            let entries: Vec<usize> = arms.iter().map(|a| compile(a, next, states)).collect();
            entries
                .into_iter()
                .rev()
                .reduce(|rest, first| push(states, State::Split(first, rest)))
                .expect("at least one arm")
        }
        Ast::Opt(body) => {
            let entry = compile(body, next, states);
            push(states, State::Split(entry, next))
        }
        Ast::Star(body) => {
            let split = push(states, State::Split(0, next));
            let entry = compile(body, split, states);
            states[split] = State::Split(entry, next);
            split
        }
        Ast::Plus(body) => {
            let split = push(states, State::Split(0, next));
            let entry = compile(body, split, states);
            states[split] = State::Split(entry, next);
            entry
        }
    }
}

/// A run of consecutive episodes matching a pattern.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MatchSpan {
    /// Index of the first matched episode.
    pub first: usize,
    /// Index of the last matched episode (inclusive).
    pub last: usize,
    pub interval: TimeInterval,
    pub labels: Vec<Label>,
}

pub fn match_pattern(episodes: &[Episode], pattern: &str) -> Result<Vec<MatchSpan>> {
    Ok(match_compiled(episodes, &Pattern::parse(pattern)?))
}

pub fn match_compiled(episodes: &[Episode], pattern: &Pattern) -> Vec<MatchSpan> {
    let labels: Vec<Label> = episodes.iter().map(|e| e.label).collect();
    pattern
        .find_all(&labels)
        .into_iter()
        .map(|r| MatchSpan {
            first: r.start,
            last: r.end - 1,
            interval: episodes[r.start].interval.hull(&episodes[r.end - 1].interval),
            labels: labels[r.clone()].to_vec(),
        })
        .collect()
}
