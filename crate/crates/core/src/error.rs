use core::fmt;

#[derive(Clone, Debug, PartialEq)]
pub enum Error {
    /// The input has no rows/columns or is ragged.
    BadShape(&'static str),
    /// All probability mass is zero.
    EmptySupport,
    /// An entry is negative beyond the tolerance.
    NegativeMass { row: usize, col: usize, value: f64 },
    /// A row, column or vector does not sum to one.
    NotStochastic {
        what: &'static str,
        index: usize,
        sum: f64,
    },
    /// The simplex method could not certify a status.
    NumericalFailure(&'static str),
    /// A linear system or polytope has no feasible point.
    Infeasible,
    /// Bounds on the optimizer entropy were requested outside the set where
    /// the two privacy funnels coincide.
    NotInPhat { g0: f64, h_y_given_x: f64 },
    /// The strengthened upper-bound program and its fallback both failed.
    InfeasibleBoundLp,
    /// A mechanism output `u` is not independent of `X`.
    Leaky { u: usize, deviation: f64 },
    /// `(x, u)` carries positive mass but does not determine `y`.
    NotDecodable { x: usize, u: usize },
    /// A code was requested from a mechanism without a decode table.
    IncompleteMechanism,
    /// The direct pad was requested with `|Y| > |X|`.
    WrongRegime { x_size: usize, y_size: usize },
    /// A bit string does not parse as a message of the code.
    MalformedBits,
    /// A symbol or key lies outside its alphabet, or has zero probability.
    InvalidSymbol { what: &'static str, value: usize },
    /// An internal invariant failed; indicates a bug or severe round-off.
    Internal(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::BadShape(msg) => write!(f, "bad shape: {msg}"),
            Error::EmptySupport => f.write_str("all probability mass is zero"),
            Error::NegativeMass { row, col, value } => {
                write!(f, "negative mass {value} at ({row}, {col})")
            }
            Error::NotStochastic { what, index, sum } => {
                write!(f, "{what} {index} sums to {sum}, expected 1")
            }
            Error::NumericalFailure(msg) => write!(f, "numerical failure: {msg}"),
            Error::Infeasible => f.write_str("no feasible point"),
            Error::NotInPhat { g0, h_y_given_x } => write!(
                f,
                "distribution is not in the zero-leakage equality set (g0 = {g0}, H(Y|X) = {h_y_given_x})"
            ),
            Error::InfeasibleBoundLp => f.write_str("strengthened bound program is infeasible"),
            Error::Leaky { u, deviation } => {
                write!(f, "output {u} leaks private data (deviation {deviation})")
            }
            Error::NotDecodable { x, u } => {
                write!(f, "pair (x = {x}, u = {u}) does not determine y")
            }
            Error::IncompleteMechanism => f.write_str("mechanism has no decode table"),
            Error::WrongRegime { x_size, y_size } => write!(
                f,
                "direct pad needs |Y| <= |X| (got |X| = {x_size}, |Y| = {y_size})"
            ),
            Error::MalformedBits => f.write_str("bit string is not a valid message"),
            Error::InvalidSymbol { what, value } => write!(f, "invalid {what}: {value}"),
            Error::Internal(msg) => write!(f, "internal error: {msg}"),
        }
    }
}

impl core::error::Error for Error {}
