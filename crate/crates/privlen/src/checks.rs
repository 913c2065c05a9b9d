//! Full analysis of one distribution and the invariants it must satisfy.

use privlen_core::bounds::{lower_bounds, BoundsReport};
use privlen_core::codec::{self, audit, pad_audit, KeyedCode, LeakageAudit, PadAudit, PrivateCode};
use privlen_core::dist::JointDistribution;
use privlen_core::linalg::rank_and_nullity;
use privlen_core::mechanism::{
    build_decode_table, conditional_entropy_balance, entropy_bounds, key_identity,
    membership_in_phat, solve_g0, G0Solution, KeyIdentity, Mechanism, MechanismBounds, Membership,
};
use privlen_core::{Error, Tolerances};

/// Slack for audited information quantities, bits.
pub const BITS_EPS: f64 = 1e-9;
/// Slack for the linear-program sandwich, bits.
pub const SANDWICH_EPS: f64 = 1e-6;
/// Slack for quantities that are exact up to rounding of a few sums.
pub const EXACT_EPS: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct CodeReport {
    pub code: PrivateCode,
    pub audit: LeakageAudit,
}

#[derive(Clone, Debug)]
pub struct Analysis {
    pub d: JointDistribution,
    pub rank: usize,
    pub nullity: usize,
    pub membership: Membership,
    pub g0: Option<G0Solution>,
    /// The optimizer with its decode table.
    pub mechanism: Option<Mechanism>,
    pub synthesis_error: Option<Error>,
    pub identity: Option<KeyIdentity>,
    /// Largest absolute entry of the conditional-entropy balance.
    pub balance: Option<f64>,
    pub mech_bounds: Option<MechanismBounds>,
    pub bounds_error: Option<Error>,
    pub two_part: Option<CodeReport>,
    pub direct_pad: Option<CodeReport>,
    pub pad: PadAudit,
    pub report: BoundsReport,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &'static str, passed: bool, detail: String) -> Self {
        Check {
            name,
            passed,
            detail,
        }
    }
}

pub fn analyze(d: JointDistribution, tol: &Tolerances) -> Result<Analysis, Error> {
    let (rank, nullity) = rank_and_nullity(d.kernel_x_given_y().matrix(), tol.rank);
    let membership = membership_in_phat(&d, tol)?;
    let mut out = Analysis {
        rank,
        nullity,
        membership,
        g0: None,
        mechanism: None,
        synthesis_error: None,
        identity: None,
        balance: None,
        mech_bounds: None,
        bounds_error: None,
        two_part: None,
        direct_pad: None,
        pad: pad_audit(&d),
        report: BoundsReport::assemble(&d, None, None, None, tol),
        d,
    };
    let d = &out.d.clone();
    if membership.is_member() {
        let g0 = solve_g0(d, tol)?;
        match build_decode_table(d, &g0.mechanism, tol) {
            Ok(mech) => {
                out.identity = Some(key_identity(d, &mech));
                out.balance = Some(
                    conditional_entropy_balance(d, &mech)
                        .iter()
                        .fold(0.0, |m, v| f64::max(m, v.abs())),
                );
                match entropy_bounds(d, mech.entropy(), tol) {
                    Ok(b) => out.mech_bounds = Some(b),
                    Err(e) => out.bounds_error = Some(e),
                }
                let code = codec::build_two_part(d, &mech)?;
                out.two_part = Some(CodeReport {
                    audit: audit(&code, d)?,
                    code,
                });
                out.mechanism = Some(mech);
            }
            Err(e) => out.synthesis_error = Some(e),
        }
        out.g0 = Some(g0);
    }
    if d.y_size() <= d.x_size() {
        let code = codec::build_direct_pad(d)?;
        out.direct_pad = Some(CodeReport {
            audit: audit(&code, d)?,
            code,
        });
    }
    out.report = BoundsReport::assemble(
        d,
        out.mech_bounds.as_ref(),
        out.mechanism.as_ref().map(Mechanism::entropy),
        out.two_part.as_ref().map(|c| &c.audit),
        tol,
    );
    Ok(out)
}

fn bits(v: f64) -> String {
    format!("{v:.3e}")
}

/// Privacy, losslessness and length checks on an audited code.
pub fn code_checks(code: &PrivateCode, a: &LeakageAudit, d: &JointDistribution) -> Vec<Check> {
    let spread = Check::new(
        "key_constant",
        a.key_spread() <= EXACT_EPS,
        format!("spread {}", bits(a.key_spread())),
    );
    let lossless = Check::new(
        "lossless",
        a.lossless_prob == 1.0,
        format!("{} failures", a.failures),
    );
    match code {
        PrivateCode::TwoPart(c) => {
            let limit = c.mechanism().entropy() + 1.0 + f64::from(c.x_field_bits());
            vec![
                Check::new(
                    "two_part_private",
                    a.mi_c_x <= BITS_EPS,
                    format!("I(C;X) = {}", bits(a.mi_c_x)),
                ),
                Check {
                    name: "two_part_lossless",
                    ..lossless
                },
                Check {
                    name: "two_part_key_constant",
                    ..spread
                },
                Check::new(
                    "two_part_length",
                    a.max_expected_length() <= limit + BITS_EPS,
                    format!("{:.6} <= {limit:.6}", a.max_expected_length()),
                ),
            ]
        }
        PrivateCode::DirectPad(c) => {
            let (nx, ny) = (d.x_size(), d.y_size());
            let width = c.field_bits() as usize;
            let exact = (0..nx).all(|x| {
                (0..ny).filter(|&y| d.get(x, y) > 0.0).all(|y| {
                    (0..ny).all(|w| {
                        code.messages(x, y, w)
                            .is_ok_and(|m| m.iter().all(|(_, b)| b.len() == width))
                    })
                })
            });
            vec![
                Check::new(
                    "direct_pad_width",
                    exact,
                    format!("every message {width} bits"),
                ),
                Check::new(
                    "direct_pad_private",
                    a.mi_c_x <= EXACT_EPS,
                    format!("I(C;X) = {}", bits(a.mi_c_x)),
                ),
                Check {
                    name: "direct_pad_lossless",
                    ..lossless
                },
                Check {
                    name: "direct_pad_key_constant",
                    ..spread
                },
            ]
        }
    }
}

impl Analysis {
    pub fn achieved_entropy(&self) -> Option<f64> {
        self.mechanism.as_ref().map(Mechanism::entropy)
    }

    pub fn checks(&self) -> Vec<Check> {
        let d = &self.d;
        let (nx, ny) = (d.x_size(), d.y_size());
        let h = d.conditional_entropy_y_given_x();
        let mut out = Vec::new();

        if d.x_is_function_of_y() {
            let expect = ny - nx;
            out.push(Check::new(
                "nullity_identity",
                self.nullity == expect,
                format!("nullity {} vs |Y|-|X| = {expect}", self.nullity),
            ));
        }
        if let Some(g0) = &self.g0 {
            out.push(Check::new(
                "g0_equals_conditional_entropy",
                (g0.value - h).abs() <= SANDWICH_EPS,
                format!("g0 - H(Y|X) = {}", bits(g0.value - h)),
            ));
            out.push(Check::new(
                "mechanism_decodable",
                self.synthesis_error.is_none(),
                self.synthesis_error
                    .as_ref()
                    .map_or(String::new(), ToString::to_string),
            ));
        }
        if let (Some(mech), Some(id)) = (&self.mechanism, &self.identity) {
            out.push(Check::new(
                "zero_leakage",
                id.i_xu <= BITS_EPS,
                format!("I(X;U) = {}", bits(id.i_xu)),
            ));
            out.push(Check::new(
                "y_recoverable",
                id.h_y_given_xu <= BITS_EPS,
                format!("H(Y|X,U) = {}", bits(id.h_y_given_xu)),
            ));
            out.push(Check::new(
                "key_identity",
                id.residual().abs() <= BITS_EPS,
                format!("residual {}", bits(id.residual())),
            ));
            let balance = self.balance.unwrap_or(0.0);
            out.push(Check::new(
                "entropy_balance",
                balance <= SANDWICH_EPS,
                format!("max residual {}", bits(balance)),
            ));
            out.push(Check::new(
                "cardinality",
                mech.u_size() <= self.nullity + 1,
                format!(
                    "|U| = {} vs nullity + 1 = {}",
                    mech.u_size(),
                    self.nullity + 1
                ),
            ));
            match (&self.mech_bounds, &self.bounds_error) {
                (Some(b), _) => {
                    let hu = mech.entropy();
                    let ok = b.k_lower - SANDWICH_EPS <= hu
                        && hu <= b.k_upper_strengthened + SANDWICH_EPS
                        && b.k_upper_strengthened <= b.log_nullity_bound + SANDWICH_EPS;
                    out.push(Check::new(
                        "sandwich",
                        ok,
                        format!(
                            "{:.6} <= {:.6} <= {:.6} <= {:.6}",
                            b.k_lower, hu, b.k_upper_strengthened, b.log_nullity_bound
                        ),
                    ));
                    if b.unique {
                        let ok = (b.k_lower - b.k_upper_strengthened).abs() <= SANDWICH_EPS
                            && (hu - b.k_lower).abs() <= SANDWICH_EPS;
                        out.push(Check::new(
                            "unique_optimizer",
                            ok,
                            format!("k_lower {:.6}, H(U) {hu:.6}", b.k_lower),
                        ));
                    }
                }
                (None, Some(e)) => out.push(Check::new("entropy_bounds", false, e.to_string())),
                (None, None) => {}
            }
        }
        if let Some(c) = &self.two_part {
            out.extend(code_checks(&c.code, &c.audit, d));
            out.push(Check::new(
                "pad_uniform",
                self.pad.mi <= EXACT_EPS
                    && (self.pad.h_padded - (nx as f64).log2()).abs() <= EXACT_EPS,
                format!(
                    "I(X;X~) = {}, H(X~) = {:.12}",
                    bits(self.pad.mi),
                    self.pad.h_padded
                ),
            ));
        }
        if let Some(c) = &self.direct_pad {
            let a = &c.audit;
            out.extend(code_checks(&c.code, a, d));
            out.push(Check::new(
                "direct_pad_improvement",
                self.report.flags.direct_pad,
                "direct pad no longer than the functional-representation bound".to_string(),
            ));
            let (lower, _) = lower_bounds(d, ny, None);
            let max_lower = lower.iter().map(|e| e.bits).fold(0.0, f64::max);
            out.push(Check::new(
                "direct_pad_converse",
                a.max_expected_length() >= max_lower - BITS_EPS,
                format!("{:.6} >= {max_lower:.6}", a.max_expected_length()),
            ));
        }
        let flag_ok =
            (1..=nx + 1).all(|m| lower_bounds(d, m, None).1 == (d.x_is_function_of_y() && m < nx));
        out.push(Check::new(
            "nonexistence_flag",
            flag_ok,
            "fires iff X=f(Y) and M < |X|".to_string(),
        ));
        out.push(match self.report.check_consistency(BITS_EPS) {
            Ok(()) => Check::new("bounds_consistent", true, String::new()),
            Err(e) => Check::new(
                "bounds_consistent",
                false,
                format!(
                    "{} {:.6} > {} {:.6}",
                    e.lower, e.lower_bits, e.upper, e.upper_bits
                ),
            ),
        });
        out.push(match self.report.check_achieved(BITS_EPS) {
            Ok(()) => Check::new("achieved_within_bounds", true, String::new()),
            Err(e) => Check::new(
                "achieved_within_bounds",
                false,
                format!(
                    "{} {:.6} > {} {:.6}",
                    e.lower, e.lower_bits, e.upper, e.upper_bits
                ),
            ),
        });
        out
    }

    pub fn failures(&self) -> Vec<Check> {
        self.checks().into_iter().filter(|c| !c.passed).collect()
    }
}
