//! The named-field text layout shared by distribution and code files.
//!
//! ```text
//! # comment
//! kernel_x_given_y:
//!   1 1 1 0 0 0
//!   0 0 0 1 1 1
//! p_y: 1/8 2/8 3/8 1/8 1/16 1/16
//! ```
//!
//! A line `name:` opens a field; tokens after the colon form its first row
//! and every following line without a field name adds another row.

use crate::input::InputError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Token {
    pub text: String,
    pub line: usize,
    pub col: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Field {
    pub name: String,
    pub line: usize,
    pub col: usize,
    pub rows: Vec<Vec<Token>>,
}

impl Field {
    /// All tokens in reading order.
    pub fn tokens(&self) -> impl Iterator<Item = &Token> {
        self.rows.iter().flatten()
    }

    /// The single token of a scalar field.
    pub fn scalar(&self) -> Result<&Token, InputError> {
        let mut it = self.tokens();
        match (it.next(), it.next()) {
            (Some(t), None) => Ok(t),
            (None, _) => Err(InputError::parse(
                self.line,
                self.col,
                format!("field `{}` is empty", self.name),
            )),
            (Some(_), Some(t)) => Err(InputError::parse(
                t.line,
                t.col,
                format!("field `{}` takes one value", self.name),
            )),
        }
    }
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn tokenize(text: &str, line: usize, offset: usize) -> Vec<Token> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in text
        .char_indices()
        .chain(std::iter::once((text.len(), ' ')))
    {
        match (c.is_whitespace(), start) {
            (false, None) => start = Some(i),
            (true, Some(s)) => {
                out.push(Token {
                    text: text[s..i].to_string(),
                    line,
                    col: offset + s + 1,
                });
                start = None;
            }
            _ => {}
        }
    }
    out
}

pub fn parse_document(src: &str) -> Result<Vec<Field>, InputError> {
    let mut fields: Vec<Field> = Vec::new();
    for (idx, raw) in src.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("");
        if content.trim().is_empty() {
            continue;
        }
        if let Some(colon) = content.find(':') {
            let name = content[..colon].trim();
            if !is_identifier(name) {
                let col = content.len() - content.trim_start().len() + 1;
                return Err(InputError::parse(
                    line,
                    col,
                    format!("invalid field name `{name}`"),
                ));
            }
            let col = content.find(name).unwrap_or(0) + 1;
            // a `scheme:` line starts a new block in which names may repeat
            let block = fields.iter().rposition(|f| f.name == "scheme").unwrap_or(0);
            if name != "scheme" && fields[block..].iter().any(|f| f.name == name) {
                return Err(InputError::parse(
                    line,
                    col,
                    format!("duplicate field `{name}`"),
                ));
            }
            let first = tokenize(&content[colon + 1..], line, colon + 1);
            fields.push(Field {
                name: name.to_string(),
                line,
                col,
                rows: if first.is_empty() {
                    Vec::new()
                } else {
                    vec![first]
                },
            });
        } else {
            let tokens = tokenize(content, line, 0);
            match fields.last_mut() {
                Some(f) => f.rows.push(tokens),
                None => {
                    let t = &tokens[0];
                    return Err(InputError::parse(
                        line,
                        t.col,
                        "values outside any field".into(),
                    ));
                }
            }
        }
    }
    Ok(fields)
}
