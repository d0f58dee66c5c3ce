//! Presentation text format.
//!
//! ```text
//! # comment
//! generators: a1 a2 b1 b2
//! relator: a1 a2 a1^-1 b1
//! #meta {"construction": {...}}
//! ```
//!
//! A JSON report that carries a `presentation` string is accepted too, so
//! `--format doc` output of `gen` pipes like the text form.

use losc_core::cancellation::Presentation;
use losc_core::words::{Alphabet, Word};
use serde_json::Value;

use crate::CliError;

const META: &str = "#meta ";

#[derive(Clone, Debug)]
pub struct Parsed {
    pub presentation: Presentation,
    pub meta: Option<Value>,
}

pub fn parse(text: &str) -> Result<Parsed, CliError> {
    if text.trim_start().starts_with('{') {
        let doc: Value = serde_json::from_str(text).map_err(|e| CliError::input(format!("bad document: {e}")))?;
        let inner = doc
            .get("presentation")
            .and_then(Value::as_str)
            .ok_or_else(|| CliError::input("document has no `presentation` field"))?;
        let mut parsed = parse(inner)?;
        if parsed.meta.is_none() {
            parsed.meta = doc.get("meta").cloned();
        }
        return Ok(parsed);
    }
    let mut alphabet: Option<Alphabet> = None;
    let mut relators: Vec<Word> = Vec::new();
    let mut meta = None;
    for (n, raw) in text.lines().enumerate() {
        let line_no = n + 1;
        if let Some(json) = raw.trim_start().strip_prefix(META) {
            let v = serde_json::from_str(json).map_err(|e| CliError::input(format!("line {line_no}: bad #meta: {e}")))?;
            meta = Some(v);
            continue;
        }
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, rest) = line
            .split_once(':')
            .ok_or_else(|| CliError::input(format!("line {line_no}: expected `generators:` or `relator:`")))?;
        match key.trim() {
            "generators" => {
                if alphabet.is_some() {
                    return Err(CliError::input(format!("line {line_no}: second `generators:` line")));
                }
                let a = Alphabet::new(rest.split_whitespace())
                    .map_err(|e| CliError::input(format!("line {line_no}: {e}")))?;
                alphabet = Some(a);
            }
            "relator" => {
                let a = alphabet
                    .as_ref()
                    .ok_or_else(|| CliError::input(format!("line {line_no}: relator before `generators:`")))?;
                let w = a.parse_word(rest).map_err(|e| CliError::input(format!("line {line_no}: {e}")))?;
                relators.push(w);
            }
            other => return Err(CliError::input(format!("line {line_no}: unknown key `{other}`"))),
        }
    }
    let alphabet = alphabet.ok_or_else(|| CliError::input("missing `generators:` line"))?;
    let presentation = Presentation::from_words(alphabet, relators).map_err(|e| CliError::input(e.to_string()))?;
    Ok(Parsed { presentation, meta })
}

pub fn format(p: &Presentation, meta: Option<&Value>) -> String {
    let mut out = String::new();
    out.push_str("generators: ");
    out.push_str(&p.alphabet.names().join(" "));
    out.push('\n');
    for r in p.relators() {
        out.push_str("relator: ");
        out.push_str(&p.alphabet.format_word(r.word()));
        out.push('\n');
    }
    if let Some(m) = meta {
        out.push_str(META);
        out.push_str(&m.to_string());
        out.push('\n');
    }
    out
}
