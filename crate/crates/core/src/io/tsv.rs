//! Tab-separated corpus format.
//!
//! ```text
//! #@meta<TAB>key<TAB>value          optional, repeatable
//! #@actors<TAB>L<TAB>C<TAB>M        optional roster
//! # free comment
//! unit_id<TAB>actor<TAB>...<TAB>area
//! u1<TAB>L<TAB>V<TAB>43707.000<TAB>...
//! ```
//!
//! `-` marks an absent field. Transcriptions may be double-quoted, in which
//! case `\"`, `\\`, `\t`, `\n` and `\r` escapes are recognized; the writer
//! always quotes them.

use std::collections::{BTreeMap, BTreeSet};

use super::{unit_cells, IssueCode, ParseReport, RawCorpus, RawRow, COLUMNS};
use crate::model::{Corpus, Token};

const TRANSCRIPTION: usize = 8;

pub(crate) fn read(text: &str, report: &mut ParseReport) -> Option<RawCorpus> {
    let mut meta = BTreeMap::new();
    let mut actors: Option<(usize, BTreeSet<Token>)> = None;
    let mut rows = Vec::new();
    let mut header_seen = false;

    for (idx, raw_line) in text.split('\n').enumerate() {
        let line = idx + 1;
        let l = raw_line.strip_suffix('\r').unwrap_or(raw_line);
        if l.trim().is_empty() {
            continue;
        }
        if let Some(directive) = l.strip_prefix("#@") {
            read_directive(directive, line, &mut meta, &mut actors, report);
            continue;
        }
        if l.starts_with('#') {
            continue;
        }
        if !header_seen {
            let cols: Vec<&str> = l.split('\t').collect();
            if cols != COLUMNS {
                report.error(
                    line,
                    IssueCode::Header,
                    format!("expected header columns {:?}, got {:?}", COLUMNS.join(" "), cols.join(" ")),
                );
                return None;
            }
            header_seen = true;
            continue;
        }
        let fields: Vec<&str> = l.split('\t').collect();
        if fields.len() != COLUMNS.len() {
            report.error(
                line,
                IssueCode::Columns,
                format!("expected {} tab-separated fields, found {}", COLUMNS.len(), fields.len()),
            );
            continue;
        }
        let mut cells: [Option<String>; 13] = Default::default();
        let mut ok = true;
        for (i, f) in fields.iter().enumerate() {
            cells[i] = if i == TRANSCRIPTION {
                match unquote(f) {
                    Ok(v) => v,
                    Err(msg) => {
                        report.error(line, IssueCode::Value, format!("transcription: {msg}"));
                        ok = false;
                        None
                    }
                }
            } else if *f == "-" || f.is_empty() {
                None
            } else {
                Some((*f).to_string())
            };
        }
        if ok {
            rows.push(RawRow { line, cells });
        }
    }
    if !header_seen {
        report.error(1, IssueCode::Header, "missing header row");
        return None;
    }
    Some(RawCorpus { meta, actors, rows })
}

fn read_directive(
    directive: &str,
    line: usize,
    meta: &mut BTreeMap<String, String>,
    actors: &mut Option<(usize, BTreeSet<Token>)>,
    report: &mut ParseReport,
) {
    let parts: Vec<&str> = directive.split('\t').collect();
    match parts[0] {
        "meta" if parts.len() == 3 => {
            if Token::new(parts[1]).is_err() {
                report.error(line, IssueCode::Value, format!("invalid meta key {:?}", parts[1]));
            } else {
                meta.insert(parts[1].to_string(), parts[2].to_string());
            }
        }
        "actors" => {
            let mut set = actors.take().map(|(_, s)| s).unwrap_or_default();
            for a in &parts[1..] {
                match Token::new(*a) {
                    Ok(t) => {
                        set.insert(t);
                    }
                    Err(e) => report.error(line, IssueCode::Value, format!("actors: {e}")),
                }
            }
            *actors = Some((line, set));
        }
        other => report.error(line, IssueCode::Header, format!("unknown or malformed directive {other:?}")),
    }
}

fn unquote(field: &str) -> Result<Option<String>, String> {
    let Some(body) = field.strip_prefix('"') else {
        return Ok(if field == "-" || field.is_empty() { None } else { Some(field.to_string()) });
    };
    let body = body.strip_suffix('"').ok_or("unterminated quoted transcription")?;
    let mut out = String::with_capacity(body.len());
    let mut chars = body.chars();
    while let Some(c) = chars.next() {
        match c {
            '\\' => match chars.next() {
                Some('\\') => out.push('\\'),
                Some('"') => out.push('"'),
                Some('t') => out.push('\t'),
                Some('n') => out.push('\n'),
                Some('r') => out.push('\r'),
                other => return Err(format!("invalid escape \\{}", other.map(String::from).unwrap_or_default())),
            },
            '"' => return Err("unescaped quote inside transcription".to_string()),
            c => out.push(c),
        }
    }
    Ok(Some(out))
}

fn quote(text: &str) -> String {
    let mut out = String::with_capacity(text.len() + 2);
    out.push('"');
    for c in text.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '"' => out.push_str("\\\""),
            '\t' => out.push_str("\\t"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

pub(crate) fn write(corpus: &Corpus) -> String {
    let mut out = String::new();
    for (k, v) in corpus.meta() {
        out.push_str(&format!("#@meta\t{k}\t{v}\n"));
    }
    if !corpus.actors().is_empty() {
        out.push_str("#@actors");
        for a in corpus.actors() {
            out.push('\t');
            out.push_str(a.as_str());
        }
        out.push('\n');
    }
    out.push_str(&COLUMNS.join("\t"));
    out.push('\n');
    for u in corpus.units() {
        let cells = unit_cells(u);
        let rendered: Vec<String> = cells
            .iter()
            .enumerate()
            .map(|(i, c)| match (i, c) {
                (TRANSCRIPTION, Some(t)) => quote(t),
                (_, Some(v)) => v.clone(),
                (_, None) => "-".to_string(),
            })
            .collect();
        out.push_str(&rendered.join("\t"));
        out.push('\n');
    }
    out
}
