use std::fmt::Write;

use super::Format;

/// One line of a report: a kind and ordered `key=value` fields. The window
/// field holds the window parameters verbatim.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Record {
    pub kind: String,
    pub fields: Vec<(String, String)>,
}

impl Record {
    /// Read a tab-separated library record back into fields.
    pub fn parse(line: &str, window: &str) -> Record {
        let mut parts = line.split('\t');
        let kind = parts.next().unwrap_or_default().to_string();
        let fields = parts
            .map(|f| {
                if f == window {
                    ("window".to_string(), f.to_string())
                } else {
                    match f.split_once('=') {
                        Some((k, v)) => (k.to_string(), v.to_string()),
                        None => ("value".to_string(), f.to_string()),
                    }
                }
            })
            .collect();
        Record { kind, fields }
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.fields.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    fn line(&self) -> String {
        let mut out = self.kind.clone();
        for (k, v) in &self.fields {
            out.push('\t');
            if k == "window" {
                out.push_str(v);
            } else {
                let _ = write!(out, "{}={}", k, one_line(v));
            }
        }
        out
    }
}

fn one_line(v: &str) -> String {
    v.replace(['\t', '\n'], " ")
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Report {
    pub verb: String,
    pub spec: String,
    pub window: String,
    pub records: Vec<Record>,
    /// Set when any check in the run failed.
    pub failed: bool,
}

impl Report {
    pub fn new(verb: &str, spec: &str, window: String) -> Report {
        Report { verb: verb.into(), spec: spec.into(), window, records: Vec::new(), failed: false }
    }

    pub fn push(&mut self, kind: &str, fields: &[(&str, String)]) {
        let mut all = vec![("window".to_string(), self.window.clone())];
        all.extend(fields.iter().map(|(k, v)| (k.to_string(), v.clone())));
        self.records.push(Record { kind: kind.into(), fields: all });
    }

    /// Append library records, which already carry their window.
    pub fn extend_lines(&mut self, lines: &[String], window: &str) {
        self.records.extend(lines.iter().map(|l| Record::parse(l, window)));
    }

    pub fn message(&mut self, text: impl Into<String>) {
        self.push("message", &[("text", text.into())]);
    }

    /// Record a pass/fail check; a failure marks the whole run.
    pub fn check(&mut self, name: &str, ok: bool, detail: impl Into<String>) {
        if !ok {
            self.failed = true;
        }
        self.push("check", &[("name", name.into()), ("status", if ok { "pass" } else { "fail" }.into()), ("detail", detail.into())]);
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Records => self.render_records(),
            Format::Text => self.render_text(),
        }
    }

    fn render_records(&self) -> String {
        let mut out = format!("# obstructa {}\tspec={}\t{}\n", self.verb, self.spec, self.window);
        for r in &self.records {
            out.push_str(&r.line());
            out.push('\n');
        }
        out
    }

    fn render_text(&self) -> String {
        let mut out = format!("obstructa {} on {} ({})\n", self.verb, self.spec, self.window);
        let mut i = 0;
        while i < self.records.len() {
            let kind = &self.records[i].kind;
            let mut j = i;
            while j < self.records.len() && &self.records[j].kind == kind {
                j += 1;
            }
            let group = &self.records[i..j];
            if kind == "message" {
                for r in group {
                    let _ = writeln!(out, "{}", r.get("text").unwrap_or_default());
                }
            } else {
                out.push('\n');
                out.push_str(&table(kind, group, &self.window));
            }
            i = j;
        }
        out
    }
}

/// Aligned columns; the window column is dropped when it matches the header.
fn table(kind: &str, group: &[Record], window: &str) -> String {
    let mut keys: Vec<String> = Vec::new();
    for r in group {
        for (k, v) in &r.fields {
            if (k != "window" || v != window) && !keys.contains(k) {
                keys.push(k.clone());
            }
        }
    }
    let rows: Vec<Vec<String>> = group
        .iter()
        .map(|r| keys.iter().map(|k| r.fields.iter().find(|(f, _)| f == k).map(|(_, v)| one_line(v)).unwrap_or_default()).collect())
        .collect();
    let widths: Vec<usize> = keys
        .iter()
        .enumerate()
        .map(|(c, k)| rows.iter().map(|r| r[c].chars().count()).chain([k.chars().count()]).max().unwrap_or(0))
        .collect();
    let fmt_row = |cells: &[String]| {
        let mut line = String::from("  ");
        for (c, cell) in cells.iter().enumerate() {
            if c + 1 == cells.len() {
                line.push_str(cell);
            } else {
                let _ = write!(line, "{:<w$}  ", cell, w = widths[c]);
            }
        }
        line.trim_end().to_string() + "\n"
    };
    let mut out = format!("[{}]\n", kind);
    out.push_str(&fmt_row(&keys));
    for r in &rows {
        out.push_str(&fmt_row(r));
    }
    out
}
