//! Distribution files.
//!
//! Either a full joint matrix
//!
//! ```text
//! joint:
//!   0.25 0.25
//!   0.25 0.25
//! ```
//!
//! or a leakage kernel `P(X|Y)` (rows indexed by `x`) with the marginal of
//! `Y`. Entries are decimals or fractions `a/b`; both are read exactly and
//! converted to floating point only after the stochasticity checks.

use std::path::Path;

use num_rational::Ratio;
use num_traits::{CheckedAdd, One, Zero};
use privlen_core::dist::JointDistribution;
use privlen_core::Tolerances;
use thiserror::Error;

use crate::doc::{parse_document, Field, Token};

pub type Exact = Ratio<i128>;

#[derive(Debug, Error)]
pub enum InputError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("parse error at line {line}, column {col}: {msg}")]
    Parse {
        line: usize,
        col: usize,
        msg: String,
    },
    #[error("stochasticity error: {what} {index} sums to {sum}")]
    Stochasticity {
        what: &'static str,
        index: usize,
        sum: f64,
    },
    #[error(transparent)]
    Core(#[from] privlen_core::Error),
}

impl InputError {
    pub(crate) fn parse(line: usize, col: usize, msg: String) -> Self {
        InputError::Parse { line, col, msg }
    }

    pub(crate) fn at(tok: &Token, msg: String) -> Self {
        InputError::parse(tok.line, tok.col, msg)
    }
}

/// Parses a decimal such as `0.125` or `3`, or a fraction `a/b`.
pub fn parse_exact(tok: &Token) -> Result<Exact, InputError> {
    let s = tok.text.as_str();
    let bad = |why: &str| InputError::at(tok, format!("invalid number `{s}`: {why}"));
    let value = if let Some((num, den)) = s.split_once('/') {
        let n: i128 = num.parse().map_err(|_| bad("bad numerator"))?;
        let d: i128 = den.parse().map_err(|_| bad("bad denominator"))?;
        if d == 0 {
            return Err(bad("zero denominator"));
        }
        Ratio::new(n, d)
    } else {
        let (neg, body) = match s.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, s),
        };
        let (int, frac) = body.split_once('.').unwrap_or((body, ""));
        if int.is_empty() && frac.is_empty() {
            return Err(bad("no digits"));
        }
        if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
            return Err(bad("expected digits"));
        }
        if frac.len() > 30 {
            return Err(bad("too many decimal places"));
        }
        let digits = format!("{int}{frac}");
        let n: i128 = digits.trim_start_matches('0').parse().unwrap_or(0);
        let r = Ratio::new(n, 10i128.pow(frac.len() as u32));
        if neg {
            -r
        } else {
            r
        }
    };
    if value < Exact::zero() {
        return Err(bad("negative probability"));
    }
    Ok(value)
}

// correctly rounded whenever both parts are below 2^53
fn to_f64(r: &Exact) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// Exact when the running sum fits, floating point otherwise.
fn sum_is_one(values: &[Exact], tol: f64) -> (bool, f64) {
    let exact = values
        .iter()
        .try_fold(Exact::zero(), |acc, v| acc.checked_add(v));
    match exact {
        Some(s) if s == Exact::one() => (true, 1.0),
        Some(s) => {
            let f = to_f64(&s);
            ((f - 1.0).abs() <= tol, f)
        }
        None => {
            let f: f64 = values.iter().map(to_f64).sum();
            ((f - 1.0).abs() <= tol, f)
        }
    }
}

fn matrix(field: &Field) -> Result<Vec<Vec<Exact>>, InputError> {
    if field.rows.is_empty() {
        return Err(InputError::parse(
            field.line,
            field.col,
            format!("field `{}` has no rows", field.name),
        ));
    }
    let width = field.rows[0].len();
    field
        .rows
        .iter()
        .map(|row| {
            if row.len() != width {
                return Err(InputError::at(
                    &row[0],
                    format!("row has {} entries, expected {width}", row.len()),
                ));
            }
            row.iter().map(parse_exact).collect()
        })
        .collect()
}

fn to_floats(m: &[Vec<Exact>]) -> Vec<Vec<f64>> {
    m.iter().map(|r| r.iter().map(to_f64).collect()).collect()
}

pub fn parse_distribution(src: &str, tol: &Tolerances) -> Result<JointDistribution, InputError> {
    let fields = parse_document(src)?;
    let mut joint = None;
    let mut kernel = None;
    let mut p_y = None;
    for f in &fields {
        match f.name.as_str() {
            "joint" => joint = Some(f),
            "kernel_x_given_y" => kernel = Some(f),
            "p_y" => p_y = Some(f),
            other => {
                return Err(InputError::parse(
                    f.line,
                    f.col,
                    format!("unknown field `{other}`"),
                ))
            }
        }
    }
    match (joint, kernel, p_y) {
        (Some(j), None, None) => {
            let m = matrix(j)?;
            let all: Vec<Exact> = m.iter().flatten().cloned().collect();
            let (ok, sum) = sum_is_one(&all, tol.prob);
            if !ok {
                return Err(InputError::Stochasticity {
                    what: "joint",
                    index: 0,
                    sum,
                });
            }
            Ok(JointDistribution::validate_and_normalize(
                &to_floats(&m),
                tol,
            )?)
        }
        (None, Some(k), Some(py)) => {
            let m = matrix(k)?;
            let py_vals: Vec<Exact> = py.tokens().map(parse_exact).collect::<Result<_, _>>()?;
            if py_vals.len() != m[0].len() {
                return Err(InputError::parse(
                    py.line,
                    py.col,
                    format!(
                        "p_y has {} entries but the kernel has {} columns",
                        py_vals.len(),
                        m[0].len()
                    ),
                ));
            }
            for y in 0..py_vals.len() {
                let col: Vec<Exact> = m.iter().map(|r| r[y]).collect();
                let (ok, sum) = sum_is_one(&col, tol.prob);
                if !ok {
                    return Err(InputError::Stochasticity {
                        what: "kernel column",
                        index: y,
                        sum,
                    });
                }
            }
            let (ok, sum) = sum_is_one(&py_vals, tol.prob);
            if !ok {
                return Err(InputError::Stochasticity {
                    what: "p_y",
                    index: 0,
                    sum,
                });
            }
            let p: Vec<f64> = py_vals.iter().map(to_f64).collect();
            Ok(JointDistribution::from_kernel(&to_floats(&m), &p, tol)?)
        }
        (Some(j), _, _) => Err(InputError::parse(
            j.line,
            j.col,
            "`joint` cannot be combined with a kernel".into(),
        )),
        (None, Some(k), None) => Err(InputError::parse(
            k.line,
            k.col,
            "kernel given without `p_y`".into(),
        )),
        (None, None, Some(py)) => Err(InputError::parse(
            py.line,
            py.col,
            "`p_y` given without a kernel".into(),
        )),
        (None, None, None) => Err(InputError::parse(
            1,
            1,
            "expected `joint` or `kernel_x_given_y` with `p_y`".into(),
        )),
    }
}

pub fn read_distribution(path: &Path, tol: &Tolerances) -> Result<JointDistribution, InputError> {
    let src = std::fs::read_to_string(path).map_err(|source| InputError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_distribution(&src, tol)
}
