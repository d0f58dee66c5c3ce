//! Report documents and their text rendering.

use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

pub const SCHEMA: &str = "losc-report";
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Text,
    Doc,
}

/// One command's result: a verdict, a body of fields, and the text lines
/// shown in `--format text`.
#[derive(Clone, Debug)]
pub struct Report {
    pub command: String,
    pub verdict: String,
    pub digest: Option<String>,
    pub body: Map<String, Value>,
    pub lines: Vec<String>,
    /// Emitted as-is in text mode instead of `lines` (used by `gen`).
    pub raw_text: Option<String>,
}

pub fn digest(bytes: &[u8]) -> String {
    let d = Sha256::digest(bytes);
    d.iter().map(|b| format!("{b:02x}")).collect()
}

impl Report {
    pub fn new(command: &str, verdict: &str) -> Self {
        Report {
            command: command.to_string(),
            verdict: verdict.to_string(),
            digest: None,
            body: Map::new(),
            lines: Vec::new(),
            raw_text: None,
        }
    }

    pub fn with_input(mut self, bytes: &[u8]) -> Self {
        self.digest = Some(digest(bytes));
        self
    }

    pub fn set(&mut self, key: &str, v: impl Into<Value>) {
        self.body.insert(key.to_string(), v.into());
    }

    pub fn line(&mut self, s: impl Into<String>) {
        self.lines.push(s.into());
    }

    pub fn to_doc(&self) -> Value {
        let mut doc = Map::new();
        doc.insert("schema".into(), json!(SCHEMA));
        doc.insert("version".into(), json!(SCHEMA_VERSION));
        doc.insert("tool".into(), json!(concat!("losc ", env!("CARGO_PKG_VERSION"))));
        doc.insert("command".into(), json!(self.command));
        doc.insert("verdict".into(), json!(self.verdict));
        if let Some(d) = &self.digest {
            doc.insert("input_digest".into(), json!(format!("sha256:{d}")));
        }
        for (k, v) in &self.body {
            doc.insert(k.clone(), v.clone());
        }
        Value::Object(doc)
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Doc => {
                let mut s = serde_json::to_string_pretty(&self.to_doc()).expect("json values serialise");
                s.push('\n');
                s
            }
            Format::Text => {
                if let Some(t) = &self.raw_text {
                    return t.clone();
                }
                let mut s = format!("verdict: {}\n", self.verdict);
                for l in &self.lines {
                    s.push_str(l);
                    s.push('\n');
                }
                s
            }
        }
    }
}
