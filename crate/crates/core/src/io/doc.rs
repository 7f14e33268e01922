//! JSON document corpus format:
//!
//! ```json
//! {
//!   "meta": {"source": "..."},
//!   "actors": ["C", "L", "M"],
//!   "units": [
//!     {"unit_id": "u1", "actor": "L", "modality": "V", "t_start": 43707.000, ...}
//!   ]
//! }
//! ```
//!
//! Unit keys are the TSV column names; absent fields are `null` or omitted.
//! Times may be numbers or strings in any form the TSV reader accepts.

use std::collections::{BTreeMap, BTreeSet};

use serde::Deserialize;
use serde_json::value::RawValue;

use super::{unit_cells, IssueCode, ParseReport, RawCorpus, RawRow, COLUMNS};
use crate::model::{Corpus, Token};

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Document<'a> {
    #[serde(default)]
    meta: BTreeMap<String, String>,
    #[serde(default)]
    actors: Option<Vec<String>>,
    #[serde(borrow)]
    units: Vec<&'a RawValue>,
}

/// Line numbers of fragments of `text`, queried in increasing offset order.
struct Lines<'t> {
    text: &'t str,
    offset: usize,
    line: usize,
}

impl Lines<'_> {
    fn of(&mut self, fragment: &str) -> usize {
        let at = (fragment.as_ptr() as usize).saturating_sub(self.text.as_ptr() as usize).min(self.text.len());
        if at >= self.offset {
            self.line += self.text.as_bytes()[self.offset..at].iter().filter(|b| **b == b'\n').count();
            self.offset = at;
        }
        self.line
    }
}

pub(crate) fn read(text: &str, report: &mut ParseReport) -> Option<RawCorpus> {
    let doc: Document = match serde_json::from_str(text) {
        Ok(d) => d,
        Err(e) => {
            let code = if e.is_data() { IssueCode::Header } else { IssueCode::Syntax };
            report.error(e.line().max(1), code, e.to_string());
            return None;
        }
    };
    for k in doc.meta.keys() {
        if Token::new(k.as_str()).is_err() {
            report.error(1, IssueCode::Value, format!("invalid meta key {k:?}"));
        }
    }
    let actors = doc.actors.map(|list| {
        let mut set = BTreeSet::new();
        for a in list {
            match Token::new(a) {
                Ok(t) => {
                    set.insert(t);
                }
                Err(e) => report.error(1, IssueCode::Value, format!("actors: {e}")),
            }
        }
        (1, set)
    });

    let mut rows = Vec::with_capacity(doc.units.len());
    let mut lines = Lines { text, offset: 0, line: 1 };
    for raw in doc.units {
        let line = lines.of(raw.get());
        let fields: BTreeMap<String, &RawValue> = match serde_json::from_str(raw.get()) {
            Ok(f) => f,
            Err(e) => {
                report.error(line, IssueCode::Syntax, format!("unit must be an object: {e}"));
                continue;
            }
        };
        let mut cells: [Option<String>; 13] = Default::default();
        let mut ok = true;
        for (key, value) in &fields {
            let Some(idx) = COLUMNS.iter().position(|c| c == key) else {
                report.error(line, IssueCode::Header, format!("unknown unit field {key:?}"));
                ok = false;
                continue;
            };
            let text = value.get().trim();
            cells[idx] = if text == "null" {
                None
            } else if text.starts_with('"') {
                match serde_json::from_str::<String>(text) {
                    Ok(s) => Some(s),
                    Err(e) => {
                        report.error(line, IssueCode::Syntax, e.to_string());
                        ok = false;
                        None
                    }
                }
            } else if key == "t_start" || key == "t_end" {
                Some(text.to_string())
            } else {
                report.error(line, IssueCode::Value, format!("field {key:?} must be a string or null"));
                ok = false;
                None
            };
        }
        if ok {
            rows.push(RawRow { line, cells });
        }
    }
    Some(RawCorpus { meta: doc.meta, actors, rows })
}

fn json_str(s: &str) -> String {
    serde_json::to_string(s).expect("strings always serialize")
}

pub(crate) fn write(corpus: &Corpus) -> String {
    let meta = serde_json::to_string(corpus.meta()).expect("string map serializes");
    let actors = serde_json::to_string(corpus.actors()).expect("token set serializes");
    let mut out = format!("{{\n  \"meta\": {meta},\n  \"actors\": {actors},\n  \"units\": [");
    for (i, u) in corpus.units().iter().enumerate() {
        out.push_str(if i == 0 { "\n    {" } else { ",\n    {" });
        for (j, (name, cell)) in COLUMNS.iter().zip(unit_cells(u)).enumerate() {
            if j > 0 {
                out.push_str(", ");
            }
            let value = match (*name, cell) {
                (_, None) => "null".to_string(),
                ("t_start" | "t_end", Some(t)) => t,
                (_, Some(v)) => json_str(&v),
            };
            out.push_str(&format!("\"{name}\": {value}"));
        }
        out.push('}');
    }
    if !corpus.is_empty() {
        out.push_str("\n  ");
    }
    out.push_str("]\n}\n");
    out
}
