//! Reading and writing corpora.
//!
//! Two interchangeable formats are supported: a strict tab-separated table
//! ([`Format::Tsv`]) and a JSON document ([`Format::Doc`]) whose unit objects
//! use the TSV column names as keys. Both go through the same row validation,
//! so they accept and reject exactly the same content.

mod doc;
mod tsv;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::Error;
use crate::model::{
    Act, AnnotationUnit, Corpus, GestureAction, GestureAttrs, Modality, Modulation, ObjectRef, TimeInterval,
    Token, Tool, VerbalAction,
};

/// Column order of the TSV format; DOC unit keys use the same names.
pub const COLUMNS: [&str; 13] = [
    "unit_id",
    "actor",
    "modality",
    "t_start",
    "t_end",
    "modulation",
    "action",
    "object",
    "transcription",
    "obj1",
    "obj2",
    "tool",
    "area",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Tsv,
    Doc,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Format, Error> {
        match s.to_ascii_lowercase().as_str() {
            "tsv" => Ok(Format::Tsv),
            "doc" | "json" => Ok(Format::Doc),
            _ => Err(Error::InvalidValue { field: "format", value: s.to_string() }),
        }
    }
}

impl Format {
    /// Guess from a file name: `.json` / `.doc` are documents, anything else TSV.
    pub fn from_path(path: &str) -> Format {
        let lower = path.to_ascii_lowercase();
        if lower.ends_with(".json") || lower.ends_with(".doc") {
            Format::Doc
        } else {
            Format::Tsv
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum IssueCode {
    #[serde(rename = "E_ENCODING")]
    Encoding,
    #[serde(rename = "E_SYNTAX")]
    Syntax,
    #[serde(rename = "E_HEADER")]
    Header,
    #[serde(rename = "E_COLUMNS")]
    Columns,
    #[serde(rename = "E_TIME")]
    Time,
    #[serde(rename = "E_DUPID")]
    DupId,
    #[serde(rename = "E_FIELDGROUP")]
    FieldGroup,
    #[serde(rename = "E_OBJECT")]
    Object,
    #[serde(rename = "E_VALUE")]
    Value,
    #[serde(rename = "E_ACTOR")]
    Actor,
    #[serde(rename = "W_EXT_GESTURE")]
    ExtGesture,
    #[serde(rename = "W_EMPTY_TRANSCRIPTION")]
    EmptyTranscription,
    #[serde(rename = "W_EMPTY")]
    Empty,
}

impl IssueCode {
    pub fn as_str(self) -> &'static str {
        match self {
            IssueCode::Encoding => "E_ENCODING",
            IssueCode::Syntax => "E_SYNTAX",
            IssueCode::Header => "E_HEADER",
            IssueCode::Columns => "E_COLUMNS",
            IssueCode::Time => "E_TIME",
            IssueCode::DupId => "E_DUPID",
            IssueCode::FieldGroup => "E_FIELDGROUP",
            IssueCode::Object => "E_OBJECT",
            IssueCode::Value => "E_VALUE",
            IssueCode::Actor => "E_ACTOR",
            IssueCode::ExtGesture => "W_EXT_GESTURE",
            IssueCode::EmptyTranscription => "W_EMPTY_TRANSCRIPTION",
            IssueCode::Empty => "W_EMPTY",
        }
    }

    fn from_error(err: &Error) -> IssueCode {
        match err.code() {
            "E_TIME" => IssueCode::Time,
            "E_OBJECT" => IssueCode::Object,
            "E_DUPID" => IssueCode::DupId,
            "E_ACTOR" => IssueCode::Actor,
            _ => IssueCode::Value,
        }
    }
}

impl fmt::Display for IssueCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One diagnostic, anchored at a 1-based input line.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Issue {
    pub line: usize,
    pub code: IssueCode,
    pub message: String,
}

impl fmt::Display for Issue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}: {}", self.line, self.code, self.message)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ParseReport {
    pub unit_count: usize,
    pub warnings: Vec<Issue>,
    pub errors: Vec<Issue>,
}

impl ParseReport {
    pub fn is_ok(&self) -> bool {
        self.errors.is_empty()
    }

    pub(crate) fn error(&mut self, line: usize, code: IssueCode, message: impl Into<String>) {
        self.errors.push(Issue { line, code, message: message.into() });
    }

    pub(crate) fn warn(&mut self, line: usize, code: IssueCode, message: impl Into<String>) {
        self.warnings.push(Issue { line, code, message: message.into() });
    }

    fn finish(&mut self) {
        self.errors.sort_by_key(|i| (i.line, i.code));
        self.warnings.sort_by_key(|i| (i.line, i.code));
    }
}

impl fmt::Display for ParseReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} error(s), {} warning(s)", self.errors.len(), self.warnings.len())?;
        if let Some(first) = self.errors.first() {
            write!(f, "; first: {first}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ParseReport {}

/// Parses a corpus. A corpus is returned only when the report has no errors;
/// otherwise the report is the error value.
pub fn parse_corpus(input: &[u8], format: Format) -> Result<(Corpus, ParseReport), ParseReport> {
    let mut report = ParseReport::default();
    let text = match decode(input) {
        Ok(t) => t,
        Err(line) => {
            report.error(line, IssueCode::Encoding, "input is not valid UTF-8");
            return Err(report);
        }
    };
    let raw = match format {
        Format::Tsv => tsv::read(text, &mut report),
        Format::Doc => doc::read(text, &mut report),
    };
    let corpus = raw.and_then(|raw| assemble(raw, &mut report));
    report.finish();
    match corpus {
        Some(c) if report.is_ok() => {
            report.unit_count = c.len();
            Ok((c, report))
        }
        _ => Err(report),
    }
}

/// Serializes a corpus. Output is deterministic: fixed column order, times
/// with exactly three decimals, one trailing newline.
pub fn write_corpus(corpus: &Corpus, format: Format) -> Vec<u8> {
    match format {
        Format::Tsv => tsv::write(corpus).into_bytes(),
        Format::Doc => doc::write(corpus).into_bytes(),
    }
}

fn decode(input: &[u8]) -> Result<&str, usize> {
    let input = input.strip_prefix(b"\xEF\xBB\xBF").unwrap_or(input);
    std::str::from_utf8(input).map_err(|e| {
        let upto = e.valid_up_to();
        1 + input[..upto].iter().filter(|b| **b == b'\n').count()
    })
}

/// One data row with absent fields as `None`, before validation.
pub(crate) struct RawRow {
    pub line: usize,
    pub cells: [Option<String>; 13],
}

/// Format-independent content read from an input.
pub(crate) struct RawCorpus {
    pub meta: BTreeMap<String, String>,
    /// Declared roster and the line it was declared on.
    pub actors: Option<(usize, BTreeSet<Token>)>,
    pub rows: Vec<RawRow>,
}

fn assemble(raw: RawCorpus, report: &mut ParseReport) -> Option<Corpus> {
    let mut units = Vec::with_capacity(raw.rows.len());
    let mut seen: HashMap<String, usize> = HashMap::new();
    for row in &raw.rows {
        let Some(unit) = build_unit(row, report) else { continue };
        if let Some(first) = seen.get(unit.id.as_str()) {
            report.error(
                row.line,
                IssueCode::DupId,
                format!("unit id {:?} already used on line {first}", unit.id.as_str()),
            );
            continue;
        }
        seen.insert(unit.id.to_string(), row.line);
        if let Some((_, roster)) = &raw.actors {
            if !roster.contains(&unit.actor) {
                report.error(
                    row.line,
                    IssueCode::Actor,
                    format!("actor {:?} is not in the declared roster", unit.actor.as_str()),
                );
                continue;
            }
        }
        units.push(unit);
    }
    if !report.is_ok() {
        return None;
    }
    let actors = match raw.actors {
        Some((_, roster)) => roster,
        None => units.iter().map(|u| u.actor.clone()).collect(),
    };
    match Corpus::new(units, actors, raw.meta) {
        Ok(c) => Some(c),
        Err(e) => {
            report.error(1, IssueCode::from_error(&e), e.to_string());
            None
        }
    }
}

fn col(name: &str) -> usize {
    COLUMNS.iter().position(|c| *c == name).expect("known column")
}

/// Validates one row into a unit, recording every problem found.
fn build_unit(row: &RawRow, report: &mut ParseReport) -> Option<AnnotationUnit> {
    let line = row.line;
    let cell = |name: &str| row.cells[col(name)].as_deref();
    let before = report.errors.len();
    let token = |report: &mut ParseReport, name: &'static str| -> Option<Token> {
        match cell(name) {
            None => {
                report.error(line, IssueCode::Value, format!("missing {name}"));
                None
            }
            Some(s) => match Token::new(s) {
                Ok(t) => Some(t),
                Err(e) => {
                    report.error(line, IssueCode::Value, format!("{name}: {e}"));
                    None
                }
            },
        }
    };
    let id = token(report, "unit_id");
    let actor = token(report, "actor");

    let modality = match cell("modality") {
        Some("V") | Some("v") => Some(Modality::Verbal),
        Some("G") | Some("g") => Some(Modality::Gestural),
        other => {
            report.error(line, IssueCode::Value, format!("modality must be V or G, got {other:?}"));
            None
        }
    };

    let time = |report: &mut ParseReport, name: &str| match cell(name) {
        None => {
            report.error(line, IssueCode::Time, format!("missing {name}"));
            None
        }
        Some(s) => match s.parse() {
            Ok(t) => Some(t),
            Err(e) => {
                report.error(line, IssueCode::Time, format!("{name}: {e}"));
                None
            }
        },
    };
    let t_start = time(report, "t_start");
    let t_end = time(report, "t_end");
    let interval = match (t_start, t_end) {
        (Some(s), Some(e)) => match TimeInterval::new(s, e) {
            Ok(iv) => Some(iv),
            Err(e) => {
                report.error(line, IssueCode::Time, e.to_string());
                None
            }
        },
        _ => None,
    };

    let object = match cell("object") {
        None => {
            report.error(line, IssueCode::Object, "missing object");
            None
        }
        Some(s) => match s.parse::<ObjectRef>() {
            Ok(o) => Some(o),
            Err(e) => {
                report.error(line, IssueCode::Object, e.to_string());
                None
            }
        },
    };

    let transcription = cell("transcription").map(str::to_string);
    let act = match modality {
        Some(Modality::Verbal) => verbal_act(row, report),
        Some(Modality::Gestural) => gestural_act(row, report),
        None => None,
    };

    if report.errors.len() != before {
        return None;
    }
    let (id, actor, interval, object, act) = (id?, actor?, interval?, object?, act?);
    if act.modality() == Modality::Verbal && transcription.as_deref().is_none_or(|t| t.trim().is_empty()) {
        report.warn(line, IssueCode::EmptyTranscription, format!("verbal unit {id} has an empty transcription"));
    }
    Some(AnnotationUnit { id, actor, interval, object, transcription, act })
}

const GESTURE_ONLY: [&str; 4] = ["obj1", "obj2", "tool", "area"];

fn verbal_act(row: &RawRow, report: &mut ParseReport) -> Option<Act> {
    let line = row.line;
    let cell = |name: &str| row.cells[col(name)].as_deref();
    let mut ok = true;
    for name in GESTURE_ONLY {
        if cell(name).is_some() {
            report.error(line, IssueCode::FieldGroup, format!("verbal unit has gestural field {name}"));
            ok = false;
        }
    }
    let modulation = match cell("modulation") {
        None => Some(Modulation::Assert),
        Some(s) => match s.parse::<Modulation>() {
            Ok(m) => Some(m),
            Err(e) => {
                report.error(line, IssueCode::Value, e.to_string());
                None
            }
        },
    };
    let action = match cell("action") {
        None => {
            report.error(line, IssueCode::Value, "missing action");
            None
        }
        Some(s) => match s.parse::<VerbalAction>() {
            Ok(a) => Some(a),
            Err(_) if !GestureAction::parse(s).map(|g| g.is_ext()).unwrap_or(true) => {
                report.error(line, IssueCode::FieldGroup, format!("gesture action {s:?} on a verbal unit"));
                None
            }
            Err(e) => {
                report.error(line, IssueCode::Value, e.to_string());
                None
            }
        },
    };
    if !ok {
        return None;
    }
    Some(Act::Verbal { modulation: modulation?, action: action? })
}

fn gestural_act(row: &RawRow, report: &mut ParseReport) -> Option<Act> {
    let line = row.line;
    let cell = |name: &str| row.cells[col(name)].as_deref();
    let mut ok = true;
    if let Some(m) = cell("modulation") {
        report.error(line, IssueCode::FieldGroup, format!("gestural unit has modulation {m:?}"));
        ok = false;
    }
    let action = match cell("action") {
        None => {
            report.error(line, IssueCode::Value, "missing action");
            None
        }
        Some(s) if s.parse::<VerbalAction>().is_ok() => {
            report.error(line, IssueCode::FieldGroup, format!("verbal action {s:?} on a gestural unit"));
            None
        }
        Some(s) => match GestureAction::parse(s) {
            Ok(a) => {
                if a.is_ext() {
                    report.warn(
                        line,
                        IssueCode::ExtGesture,
                        format!("gesture action {s:?} is outside the closed vocabulary; kept as extension"),
                    );
                }
                Some(a)
            }
            Err(e) => {
                report.error(line, IssueCode::Value, format!("action: {e}"));
                None
            }
        },
    };
    let mut opt_token = |name: &'static str| -> Option<Option<Token>> {
        match cell(name) {
            None => Some(None),
            Some(s) => match Token::new(s) {
                Ok(t) => Some(Some(t)),
                Err(e) => {
                    report.error(line, IssueCode::Value, format!("{name}: {e}"));
                    None
                }
            },
        }
    };
    let obj1 = opt_token("obj1");
    let obj2 = opt_token("obj2");
    let area = opt_token("area");
    let tool = match cell("tool") {
        None => Some(None),
        Some(s) => match Tool::parse(s) {
            Ok(t) => Some(Some(t)),
            Err(e) => {
                report.error(line, IssueCode::Value, format!("tool: {e}"));
                None
            }
        },
    };
    let obj1 = match obj1 {
        Some(None) => {
            report.error(line, IssueCode::FieldGroup, "gestural unit requires obj1");
            None
        }
        other => other.flatten(),
    };
    if !ok {
        return None;
    }
    Some(Act::Gestural {
        action: action?,
        attrs: GestureAttrs { obj1: obj1?, obj2: obj2?, tool: tool?, area: area? },
    })
}

/// Text of a row's cells as they should be written (absent = `None`).
pub(crate) fn unit_cells(u: &AnnotationUnit) -> [Option<String>; 13] {
    let (modulation, gesture) = match &u.act {
        Act::Verbal { modulation, .. } => (Some(modulation.code().to_string()), None),
        Act::Gestural { attrs, .. } => (None, Some(attrs)),
    };
    [
        Some(u.id.to_string()),
        Some(u.actor.to_string()),
        Some(u.modality().code().to_string()),
        Some(u.interval.start().to_string()),
        Some(u.interval.end().to_string()),
        modulation,
        Some(u.act.code().to_string()),
        Some(u.object.to_string()),
        u.transcription.clone(),
        gesture.map(|a| a.obj1.to_string()),
        gesture.and_then(|a| a.obj2.as_ref().map(Token::to_string)),
        gesture.and_then(|a| a.tool.as_ref().map(|t| t.code().to_string())),
        gesture.and_then(|a| a.area.as_ref().map(Token::to_string)),
    ]
}
