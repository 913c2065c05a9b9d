//! Upper and lower bounds on the minimum expected length of a perfectly
//! private lossless code, assembled into one labeled report.
//!
//! Every entry carries a [`Requirement`] describing when it holds and a flag
//! saying whether the requirement is met for the distribution at hand, so the
//! report can be checked for internal consistency without special cases.

use alloc::vec::Vec;

use crate::codec::{field_width, LeakageAudit};
use crate::dist::JointDistribution;
use crate::linalg::rank_and_nullity;
use crate::mechanism::MechanismBounds;
use crate::Tolerances;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Requirement {
    Always,
    /// `X` is a deterministic function of `Y`.
    XFunctionOfY,
    /// The zero-leakage funnel value equals `H(Y|X)`.
    MemberPhat,
    /// `|Y| <= |X|`.
    YNotLargerThanX,
    /// A mechanism with `I(X;U) = 0` and `H(Y|X,U) = 0` is available.
    DecodableMechanism,
    /// The code itself satisfies `I(X;C) = 0`, `H(Y|X,C) = 0` and `X - Y - C`.
    MarkovDecodableCode,
}

impl Requirement {
    pub fn tag(self) -> &'static str {
        match self {
            Requirement::Always => "requires: none",
            Requirement::XFunctionOfY => "requires: X=f(Y)",
            Requirement::MemberPhat => "requires: member_Phat",
            Requirement::YNotLargerThanX => "requires: |Y|<=|X|",
            Requirement::DecodableMechanism => "requires: decodable_mechanism",
            Requirement::MarkovDecodableCode => "requires: markov_decodable_code",
        }
    }
}

/// The code (or converse argument) a bound is derived from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Construction {
    /// Padded private symbol plus a prefix code for a decodable mechanism.
    TwoPart,
    DirectPad,
    FunctionalRepresentation,
    DeterministicPrior,
    Converse,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoundEntry {
    pub name: &'static str,
    pub bits: f64,
    /// Key size `M` the bound refers to.
    pub key_size: usize,
    pub requirement: Requirement,
    pub construction: Construction,
    pub applicable: bool,
    /// Computed from the synthesized mechanism rather than the exact minimum.
    pub surrogate: bool,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ImprovementFlags {
    /// `|Y| <= |X|` and the direct pad is no longer than the
    /// functional-representation bound.
    pub direct_pad: bool,
    /// `X = f(Y)` and the two-part code built from the synthesized optimizer
    /// is strictly shorter than the prior deterministic-case bound.
    pub two_part_achieved: bool,
    /// Same comparison for the capped linear-program bound.
    pub two_part_lp: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoundsReport {
    pub upper: Vec<BoundEntry>,
    pub lower: Vec<BoundEntry>,
    /// Earlier bounds reproduced for comparison.
    pub prior_upper: Vec<(&'static str, f64)>,
    pub flags: ImprovementFlags,
    /// `X = f(Y)` and the key is shorter than `|X|`: no perfectly private
    /// lossless code exists.
    pub nonexistence: bool,
    /// Worst-key expected length of the audited two-part code.
    pub achieved: Option<f64>,
    /// Whether the audited two-part code satisfies the conditions of the
    /// linear-program converse (`None` if no code was audited).
    pub markov_code: Option<bool>,
}

/// A failed consistency check.
#[derive(Clone, Debug, PartialEq)]
pub struct Inconsistency {
    pub lower: &'static str,
    pub upper: &'static str,
    pub lower_bits: f64,
    pub upper_bits: f64,
}

fn log2_ceil(n: usize) -> f64 {
    f64::from(field_width(n))
}

/// All upper bounds on the minimum expected length.
///
/// `mech_bounds` is only available for members; `achieved_hu` is the entropy
/// of a synthesized decodable optimizer and stands in for the exact minimum.
pub fn upper_bounds(
    d: &JointDistribution,
    mech_bounds: Option<&MechanismBounds>,
    achieved_hu: Option<f64>,
    tol: &Tolerances,
) -> Vec<BoundEntry> {
    let (nx, ny) = (d.x_size(), d.y_size());
    let pad = log2_ceil(nx);
    let mut out = Vec::new();
    let entry =
        |name, bits, key_size, requirement, construction, applicable, surrogate| BoundEntry {
            name,
            bits,
            key_size,
            requirement,
            construction,
            applicable,
            surrogate,
        };
    use Construction::*;
    if let Some(hu) = achieved_hu {
        out.push(entry(
            "two_part_optimizer",
            hu + 1.0 + pad,
            nx,
            Requirement::MemberPhat,
            TwoPart,
            mech_bounds.is_some(),
            true,
        ));
        out.push(entry(
            "min_entropy_decodable",
            hu + 1.0 + pad,
            nx,
            Requirement::DecodableMechanism,
            TwoPart,
            true,
            true,
        ));
    }
    if let Some(b) = mech_bounds {
        out.push(entry(
            "two_part_capped_lp",
            b.k_upper_strengthened + 1.0 + pad,
            nx,
            Requirement::MemberPhat,
            TwoPart,
            true,
            false,
        ));
        out.push(entry(
            "two_part_nullity",
            b.log_nullity_bound + 1.0 + pad,
            nx,
            Requirement::MemberPhat,
            TwoPart,
            true,
            false,
        ));
    }
    out.push(entry(
        "functional_representation",
        functional_representation(d),
        nx,
        Requirement::Always,
        FunctionalRepresentation,
        true,
        false,
    ));
    let x_of_y = d.x_is_function_of_y();
    if ny + 1 > nx {
        out.push(entry(
            "deterministic_prior",
            log2_ceil(ny - nx + 1) + pad,
            nx,
            Requirement::XFunctionOfY,
            DeterministicPrior,
            x_of_y,
            false,
        ));
    }
    out.push(entry(
        "direct_pad",
        log2_ceil(ny),
        ny,
        Requirement::YNotLargerThanX,
        DirectPad,
        ny <= nx,
        false,
    ));
    let _ = tol;
    out
}

/// `1 + min(sum_x H(Y|X=x), ceil(log2(|X|(|Y|-1)+1) - 1)) + ceil(log2 |X|)`.
fn functional_representation(d: &JointDistribution) -> f64 {
    let (nx, ny) = (d.x_size(), d.y_size());
    let sum: f64 = (0..nx).map(|x| d.conditional_entropy_per_x(x)).sum();
    let card = libm::ceil(libm::log2((nx * (ny - 1) + 1) as f64) - 1.0);
    1.0 + sum.min(card) + log2_ceil(nx)
}

/// Lower bounds for key size `key_size`, and whether a private code cannot
/// exist at all.
///
/// `k_lower` is the minimized linear program of the mechanism bounds; it
/// yields the conditional converse.
pub fn lower_bounds(
    d: &JointDistribution,
    key_size: usize,
    k_lower: Option<f64>,
) -> (Vec<BoundEntry>, bool) {
    let nx = d.x_size();
    let x_of_y = d.x_is_function_of_y();
    let max_h = (0..nx)
        .map(|x| d.conditional_entropy_per_x(x))
        .fold(0.0, f64::max);
    let mut out = alloc::vec![BoundEntry {
        name: "max_conditional_entropy",
        bits: max_h,
        key_size,
        requirement: Requirement::Always,
        construction: Construction::Converse,
        applicable: true,
        surrogate: false,
    }];
    if x_of_y && key_size >= nx {
        out.push(BoundEntry {
            name: "log_private_alphabet",
            bits: libm::log2(nx as f64),
            key_size,
            requirement: Requirement::XFunctionOfY,
            construction: Construction::Converse,
            applicable: true,
            surrogate: false,
        });
    }
    if let Some(k) = k_lower {
        out.push(BoundEntry {
            name: "lp_converse",
            bits: k,
            key_size,
            requirement: Requirement::MarkovDecodableCode,
            construction: Construction::Converse,
            applicable: true,
            surrogate: false,
        });
    }
    (out, x_of_y && key_size < nx)
}

impl BoundsReport {
    /// Assembles the report. `two_part` is the audit of the two-part code
    /// built from the synthesized optimizer (key size `|X|`), when one exists.
    pub fn assemble(
        d: &JointDistribution,
        mech_bounds: Option<&MechanismBounds>,
        achieved_hu: Option<f64>,
        two_part: Option<&LeakageAudit>,
        tol: &Tolerances,
    ) -> Self {
        let upper = upper_bounds(d, mech_bounds, achieved_hu, tol);
        let markov_code = two_part
            .map(|a| a.mi_c_x <= tol.ent && a.mi_c_x_given_y <= tol.ent && a.lossless_prob == 1.0);
        let (mut lower, nonexistence) = lower_bounds(d, d.x_size(), mech_bounds.map(|b| b.k_lower));
        for e in lower.iter_mut() {
            if e.requirement == Requirement::MarkovDecodableCode {
                e.applicable = markov_code == Some(true);
            }
        }
        let find = |name: &str| {
            upper
                .iter()
                .find(|e| e.name == name && e.applicable)
                .map(|e| e.bits)
        };
        let prior_upper: Vec<(&'static str, f64)> = upper
            .iter()
            .filter(|e| matches!(e.name, "functional_representation" | "deterministic_prior"))
            .map(|e| (e.name, e.bits))
            .collect();
        let flags = ImprovementFlags {
            direct_pad: match (find("direct_pad"), find("functional_representation")) {
                (Some(a), Some(b)) => a <= b,
                _ => false,
            },
            two_part_achieved: match (find("two_part_optimizer"), find("deterministic_prior")) {
                (Some(a), Some(b)) => a < b,
                _ => false,
            },
            two_part_lp: match (find("two_part_capped_lp"), find("deterministic_prior")) {
                (Some(a), Some(b)) => a < b,
                _ => false,
            },
        };
        BoundsReport {
            upper,
            lower,
            prior_upper,
            flags,
            nonexistence,
            achieved: two_part.map(LeakageAudit::max_expected_length),
            markov_code,
        }
    }

    pub fn applicable_upper(&self) -> impl Iterator<Item = &BoundEntry> {
        self.upper.iter().filter(|e| e.applicable)
    }

    pub fn applicable_lower(&self) -> impl Iterator<Item = &BoundEntry> {
        self.lower.iter().filter(|e| e.applicable)
    }

    /// Every applicable lower bound lies below every applicable upper bound
    /// that refers to a compatible key size.
    pub fn check_consistency(&self, slack: f64) -> Result<(), Inconsistency> {
        for lo in self.applicable_lower() {
            for up in self.applicable_upper() {
                let keyed = lo.requirement == Requirement::XFunctionOfY;
                if keyed && up.key_size < lo.key_size {
                    continue;
                }
                if lo.bits > up.bits + slack {
                    return Err(Inconsistency {
                        lower: lo.name,
                        upper: up.name,
                        lower_bits: lo.bits,
                        upper_bits: up.bits,
                    });
                }
            }
        }
        Ok(())
    }

    /// The audited two-part length lies above every applicable lower bound
    /// and below every applicable bound derived from the two-part
    /// construction. Bounds from other constructions describe other codes
    /// and need not dominate this one.
    pub fn check_achieved(&self, slack: f64) -> Result<(), Inconsistency> {
        let Some(achieved) = self.achieved else {
            return Ok(());
        };
        for lo in self.applicable_lower() {
            if lo.bits > achieved + slack {
                return Err(Inconsistency {
                    lower: lo.name,
                    upper: "achieved",
                    lower_bits: lo.bits,
                    upper_bits: achieved,
                });
            }
        }
        for up in self
            .applicable_upper()
            .filter(|e| e.construction == Construction::TwoPart)
        {
            if achieved > up.bits + slack {
                return Err(Inconsistency {
                    lower: "achieved",
                    upper: up.name,
                    lower_bits: achieved,
                    upper_bits: up.bits,
                });
            }
        }
        Ok(())
    }
}

/// `nullity(P(X|Y)) = |Y| - |X|` whenever `X = f(Y)` with full-support `P(X)`.
pub fn deterministic_nullity_gap(
    d: &JointDistribution,
    tol: &Tolerances,
) -> Option<(usize, usize)> {
    if !d.x_is_function_of_y() {
        return None;
    }
    let (_, nullity) = rank_and_nullity(d.kernel_x_given_y().matrix(), tol.rank);
    Some((nullity, d.y_size() - d.x_size()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codec::{audit, build_two_part};
    use crate::mechanism::{entropy_bounds, synthesize};
    use crate::testutil::{example_one, independent};

    fn report(d: &JointDistribution) -> BoundsReport {
        let tol = Tolerances::default();
        let mech = synthesize(d, &tol).unwrap();
        let hu = mech.entropy();
        let b = entropy_bounds(d, hu, &tol).unwrap();
        let a = audit(&build_two_part(d, &mech).unwrap(), d).unwrap();
        BoundsReport::assemble(d, Some(&b), Some(hu), Some(&a), &tol)
    }

    fn bits(entries: &[BoundEntry], name: &str) -> f64 {
        entries.iter().find(|e| e.name == name).unwrap().bits
    }

    #[test]
    fn example_comparison() {
        let d = example_one();
        let r = report(&d);
        assert_eq!(bits(&r.upper, "deterministic_prior"), 4.0);
        assert!(bits(&r.upper, "two_part_optimizer") <= 3.9591 + 1e-3);
        assert!(r.flags.two_part_achieved);
        assert!(r.check_consistency(1e-9).is_ok());
        assert!(r.check_achieved(1e-9).is_ok());
        assert_eq!(r.markov_code, Some(true));
    }

    #[test]
    fn example_lower_bounds() {
        let d = example_one();
        let (lo, none) = lower_bounds(&d, 2, None);
        assert!(!none);
        assert!((bits(&lo, "max_conditional_entropy") - 1.5).abs() < 1e-12);
        assert_eq!(bits(&lo, "log_private_alphabet"), 1.0);
        let (lo, none) = lower_bounds(&d, 1, None);
        assert!(none);
        assert!(lo.iter().all(|e| e.name != "log_private_alphabet"));
    }

    #[test]
    fn direct_pad_case() {
        let raw = [
            [0.1, 0.1, 0.05],
            [0.05, 0.1, 0.1],
            [0.1, 0.05, 0.1],
            [0.1, 0.05, 0.1],
        ];
        let d = JointDistribution::validate_and_normalize(&raw, &Tolerances::default()).unwrap();
        let up = upper_bounds(&d, None, None, &Tolerances::default());
        let pad = up.iter().find(|e| e.name == "direct_pad").unwrap();
        assert!(pad.applicable && pad.bits == 2.0 && pad.key_size == 3);
        assert!(pad.bits <= bits(&up, "functional_representation"));
        let r = BoundsReport::assemble(&d, None, None, None, &Tolerances::default());
        assert!(r.flags.direct_pad);
    }

    #[test]
    fn single_private_symbol() {
        let d =
            JointDistribution::validate_and_normalize(&[[0.5, 0.25, 0.25]], &Tolerances::default())
                .unwrap();
        let up = upper_bounds(&d, None, Some(1.5), &Tolerances::default());
        assert_eq!(bits(&up, "two_part_optimizer"), 2.5);
    }

    #[test]
    fn independent_lower_bounds() {
        let py = [0.5, 0.25, 0.25];
        let d = independent(&[0.5, 0.5], &py);
        let r = report(&d);
        assert!((bits(&r.lower, "max_conditional_entropy") - 1.5).abs() < 1e-12);
        assert!((bits(&r.lower, "lp_converse") - 1.5).abs() < 1e-9);
        assert!(r.check_consistency(1e-9).is_ok());
    }

    #[test]
    fn two_part_may_exceed_direct_pad() {
        let d = independent(&[0.5, 0.5], &[0.5, 0.5]);
        let r = report(&d);
        assert_eq!(r.achieved, Some(2.0));
        assert_eq!(bits(&r.upper, "direct_pad"), 1.0);
        assert!(r.check_achieved(1e-9).is_ok());
        assert!(r.check_consistency(1e-9).is_ok());
    }

    #[test]
    fn nullity_gap_identity() {
        assert_eq!(
            deterministic_nullity_gap(&example_one(), &Tolerances::default()),
            Some((4, 4))
        );
    }
}
