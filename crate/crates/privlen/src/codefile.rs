//! Serialized codes, so that `audit` can re-verify a code built earlier.
//!
//! Each code is a block of named fields opened by `scheme:`. Probabilities
//! are written in shortest round-trip form and codewords as `0`/`1` strings;
//! `-` marks an empty decode cell or a zero-width second field.

use std::fmt::Write as _;

use privlen_core::codec::{Bits, PrefixCode, PrivateCode, TwoPartCode};
use privlen_core::dist::{JointDistribution, Kernel};
use privlen_core::linalg::Matrix;
use privlen_core::mechanism::{DecodeTable, Mechanism};
use privlen_core::{codec, Tolerances};

use crate::doc::{parse_document, Field, Token};
use crate::input::InputError;

fn join<T: ToString>(items: impl IntoIterator<Item = T>) -> String {
    items
        .into_iter()
        .map(|t| t.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

fn float(v: f64) -> String {
    format!("{v:?}")
}

pub fn write_code(code: &PrivateCode, d: &JointDistribution) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "scheme: {}", code.scheme_name());
    let _ = writeln!(s, "x_size: {}", d.x_size());
    let _ = writeln!(s, "y_size: {}", d.y_size());
    match code {
        PrivateCode::DirectPad(c) => {
            let _ = writeln!(s, "field_bits: {}", c.field_bits());
        }
        PrivateCode::TwoPart(c) => {
            let mech = c.mechanism();
            let _ = writeln!(s, "x_field_bits: {}", c.x_field_bits());
            let _ = writeln!(s, "p_u: {}", join(mech.p_u().iter().map(|&p| float(p))));
            s.push_str("p_y_given_u:\n");
            for row in mech.p_y_given_u().matrix().to_rows() {
                let _ = writeln!(s, "  {}", join(row.into_iter().map(float)));
            }
            s.push_str("decode:\n");
            if let Some(t) = mech.decode_table() {
                for x in 0..t.x_size() {
                    let cells = (0..t.u_size())
                        .map(|u| t.get(x, u).map_or("-".to_string(), |y| y.to_string()));
                    let _ = writeln!(s, "  {}", join(cells));
                }
            }
            match c.u_code() {
                Some(p) => {
                    let _ = writeln!(
                        s,
                        "u_codewords: {}",
                        join(p.codewords().iter().map(Bits::to_string_01))
                    );
                }
                None => s.push_str("u_codewords: -\n"),
            }
        }
    }
    s
}

fn usize_of(tok: &Token) -> Result<usize, InputError> {
    tok.text.parse().map_err(|_| {
        InputError::at(
            tok,
            format!("expected a nonnegative integer, got `{}`", tok.text),
        )
    })
}

fn f64_of(tok: &Token) -> Result<f64, InputError> {
    tok.text
        .parse()
        .map_err(|_| InputError::at(tok, format!("expected a number, got `{}`", tok.text)))
}

struct Block<'a> {
    scheme: &'a Field,
    fields: Vec<&'a Field>,
}

impl<'a> Block<'a> {
    fn get(&self, name: &str) -> Result<&'a Field, InputError> {
        self.fields
            .iter()
            .copied()
            .find(|f| f.name == name)
            .ok_or_else(|| {
                InputError::parse(
                    self.scheme.line,
                    self.scheme.col,
                    format!("code block lacks `{name}`"),
                )
            })
    }

    fn size(&self, name: &str, expect: usize) -> Result<(), InputError> {
        let tok = self.get(name)?.scalar()?;
        let v = usize_of(tok)?;
        if v != expect {
            return Err(InputError::at(
                tok,
                format!("{name} is {v} but the distribution has {expect}"),
            ));
        }
        Ok(())
    }
}

fn core_at(tok: &Token) -> impl Fn(privlen_core::Error) -> InputError + '_ {
    move |e| InputError::at(tok, e.to_string())
}

fn read_two_part(
    b: &Block,
    d: &JointDistribution,
    tol: &Tolerances,
) -> Result<PrivateCode, InputError> {
    b.size("x_field_bits", codec::field_width(d.x_size()) as usize)?;
    let p_u_field = b.get("p_u")?;
    let p_u: Vec<f64> = p_u_field.tokens().map(f64_of).collect::<Result<_, _>>()?;
    let nu = p_u.len();
    if nu == 0 {
        return Err(InputError::parse(
            p_u_field.line,
            p_u_field.col,
            "p_u is empty".into(),
        ));
    }
    let kernel_field = b.get("p_y_given_u")?;
    let rows: Vec<Vec<f64>> = kernel_field
        .rows
        .iter()
        .map(|r| r.iter().map(f64_of).collect())
        .collect::<Result<_, _>>()?;
    if rows.len() != d.y_size() || rows.iter().any(|r| r.len() != nu) {
        return Err(InputError::parse(
            kernel_field.line,
            kernel_field.col,
            format!("p_y_given_u must be {} x {nu}", d.y_size()),
        ));
    }
    let here = core_at(&kernel_field.rows[0][0]);
    let kernel = Kernel::new(Matrix::from_rows(&rows).map_err(&here)?, tol.prob).map_err(&here)?;
    let mech = Mechanism::new(p_u.clone(), kernel, tol)
        .map_err(|e| InputError::parse(p_u_field.line, p_u_field.col, e.to_string()))?;

    let decode_field = b.get("decode")?;
    if decode_field.rows.len() != d.x_size() || decode_field.rows.iter().any(|r| r.len() != nu) {
        return Err(InputError::parse(
            decode_field.line,
            decode_field.col,
            format!("decode must be {} x {nu}", d.x_size()),
        ));
    }
    let mut entries = Vec::with_capacity(d.x_size() * nu);
    for tok in decode_field.tokens() {
        entries.push(if tok.text == "-" {
            None
        } else {
            let y = usize_of(tok)?;
            if y >= d.y_size() {
                return Err(InputError::at(
                    tok,
                    format!("decoded symbol {y} is out of range"),
                ));
            }
            Some(y)
        });
    }
    let anchor = &decode_field.rows[0][0];
    let table = DecodeTable::from_entries(d.x_size(), nu, entries).map_err(core_at(anchor))?;
    let mech = mech.with_decode_table(table).map_err(core_at(anchor))?;

    let cw_field = b.get("u_codewords")?;
    let first = cw_field.tokens().next();
    let u_code = match first {
        Some(t) if t.text == "-" && cw_field.tokens().count() == 1 => None,
        _ => {
            let words: Vec<Bits> = cw_field
                .tokens()
                .map(|t| Bits::parse(&t.text).map_err(core_at(t)))
                .collect::<Result<_, _>>()?;
            Some(
                PrefixCode::from_codewords(words, &p_u)
                    .map_err(|e| InputError::parse(cw_field.line, cw_field.col, e.to_string()))?,
            )
        }
    };
    let code = TwoPartCode::with_prefix_code(d, &mech, u_code)
        .map_err(|e| InputError::parse(cw_field.line, cw_field.col, e.to_string()))?;
    Ok(PrivateCode::TwoPart(code))
}

fn read_direct_pad(b: &Block, d: &JointDistribution) -> Result<PrivateCode, InputError> {
    let code = codec::build_direct_pad(d).map_err(core_at(b.scheme.scalar()?))?;
    if let PrivateCode::DirectPad(c) = &code {
        b.size("field_bits", c.field_bits() as usize)?;
    }
    Ok(code)
}

/// Reads every code block and rebuilds it against `d`.
pub fn read_codes(
    src: &str,
    d: &JointDistribution,
    tol: &Tolerances,
) -> Result<Vec<PrivateCode>, InputError> {
    let fields = parse_document(src)?;
    let mut blocks: Vec<Block> = Vec::new();
    for f in &fields {
        if f.name == "scheme" {
            blocks.push(Block {
                scheme: f,
                fields: Vec::new(),
            });
        } else {
            match blocks.last_mut() {
                Some(b) => b.fields.push(f),
                None => {
                    return Err(InputError::parse(
                        f.line,
                        f.col,
                        "expected `scheme:` first".into(),
                    ))
                }
            }
        }
    }
    if blocks.is_empty() {
        return Err(InputError::parse(1, 1, "no code blocks".into()));
    }
    blocks
        .iter()
        .map(|b| {
            b.size("x_size", d.x_size())?;
            b.size("y_size", d.y_size())?;
            let tok = b.scheme.scalar()?;
            let code = match tok.text.as_str() {
                "two_part" => read_two_part(b, d, tol)?,
                "direct_pad" => read_direct_pad(b, d)?,
                other => return Err(InputError::at(tok, format!("unknown scheme `{other}`"))),
            };
            Ok(code)
        })
        .collect()
}
