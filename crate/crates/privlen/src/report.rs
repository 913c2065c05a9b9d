//! Reports as ordered key/value entries grouped into sections.
//!
//! The text form is for people; the structured form is one `section.key=value`
//! line per entry with stable key names, so identical runs produce
//! byte-identical output.

use std::fmt::Write as _;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Style {
    Text,
    Structured,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Report {
    sections: Vec<(String, Vec<(String, String)>)>,
}

impl Report {
    pub fn new() -> Self {
        Report::default()
    }

    pub fn section(&mut self, name: impl Into<String>) -> &mut Self {
        self.sections.push((name.into(), Vec::new()));
        self
    }

    pub fn put(&mut self, key: impl Into<String>, value: impl ToString) -> &mut Self {
        if self.sections.is_empty() {
            self.section("run");
        }
        let last = self.sections.last_mut().expect("a section exists");
        last.1.push((key.into(), value.to_string()));
        self
    }

    pub fn get(&self, section: &str, key: &str) -> Option<&str> {
        self.sections
            .iter()
            .filter(|(s, _)| s == section)
            .flat_map(|(_, kv)| kv.iter())
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn render(&self, style: Style) -> String {
        let mut out = String::new();
        for (i, (name, entries)) in self.sections.iter().enumerate() {
            match style {
                Style::Text => {
                    if i > 0 {
                        out.push('\n');
                    }
                    let _ = writeln!(out, "[{name}]");
                    let width = entries.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
                    for (k, v) in entries {
                        let _ = writeln!(out, "  {k:<width$}  {v}");
                    }
                }
                Style::Structured => {
                    for (k, v) in entries {
                        let _ = writeln!(out, "{name}.{k}={v}");
                    }
                }
            }
        }
        out
    }
}

/// Fixed-precision number: 10 decimals in structured output, 4 in text.
pub fn num(v: f64, style: Style) -> String {
    let s = match style {
        Style::Text => format!("{v:.4}"),
        Style::Structured => format!("{v:.10}"),
    };
    // rounding noise such as -4e-16 should not print as "-0.0000"
    match s.strip_prefix('-') {
        Some(rest) if rest.chars().all(|c| c == '0' || c == '.') => rest.to_string(),
        _ => s,
    }
}

pub fn nums(v: &[f64], style: Style) -> String {
    v.iter()
        .map(|&x| num(x, style))
        .collect::<Vec<_>>()
        .join(" ")
}
