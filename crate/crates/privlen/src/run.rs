//! Batch commands.

use std::path::PathBuf;

use anyhow::{bail, Context};
use clap::ValueEnum;
use privlen_core::bounds::BoundEntry;
use privlen_core::codec::{self, audit, field_width, PrivateCode, UnpaddedHuffman};
use privlen_core::dist::JointDistribution;
use privlen_core::linalg::rank_and_nullity;
use privlen_core::mechanism::{build_bound_matrices, key_identity, Verdict};
use privlen_core::Tolerances;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::checks::{analyze, code_checks, Analysis, Check, BITS_EPS};
use crate::codefile::{read_codes, write_code};
use crate::families::{generate, Family};
use crate::input::read_distribution;
use crate::report::{num, nums, Report, Style};

pub const DEFAULT_SEED: u64 = 0x5eed;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Command {
    Analyze,
    Mechanism,
    Code,
    Audit,
    Sweep,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Text,
    Structured,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub input_path: Option<PathBuf>,
    pub command: Command,
    pub tol: Tolerances,
    pub seed: u64,
    pub format: OutputFormat,
    /// Instances for `sweep`.
    pub n: usize,
    pub family: Family,
    /// Written by `code`, read by `audit`.
    pub code_path: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            input_path: None,
            command: Command::Analyze,
            tol: Tolerances::default(),
            seed: DEFAULT_SEED,
            format: OutputFormat::Text,
            n: 100,
            family: Family::DetF,
            code_path: None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub report: Report,
    pub rendered: String,
    /// Named invariant violations; empty iff the run succeeded.
    pub violations: Vec<String>,
}

impl RunOutcome {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn run(config: &RunConfig) -> anyhow::Result<RunOutcome> {
    if !config.tol.is_valid() {
        bail!("tolerances must be positive and finite");
    }
    let style = match config.format {
        OutputFormat::Text => Style::Text,
        OutputFormat::Structured => Style::Structured,
    };
    let mut report = Report::new();
    let mut violations = Vec::new();
    match config.command {
        Command::Sweep => sweep(config, style, &mut report, &mut violations)?,
        cmd => {
            let path = config
                .input_path
                .as_ref()
                .context("--input is required for this command")?;
            let d = read_distribution(path, &config.tol)?;
            if cmd == Command::Audit {
                audit_file(config, &d, style, &mut report, &mut violations)?;
            } else {
                let a = analyze(d, &config.tol)?;
                describe(&a, style, &mut report);
                if cmd != Command::Analyze {
                    describe_mechanism(&a, style, &mut report);
                }
                if cmd == Command::Code {
                    describe_codes(config, &a, style, &mut report, &mut violations)?;
                }
                record_checks(&a.checks(), "", style, &mut report, &mut violations);
            }
        }
    }
    report
        .section("status")
        .put("ok", violations.is_empty())
        .put("violations", violations.len());
    Ok(RunOutcome {
        rendered: report.render(style),
        report,
        violations,
    })
}

fn record_checks(
    checks: &[Check],
    prefix: &str,
    style: Style,
    report: &mut Report,
    violations: &mut Vec<String>,
) {
    report.section(format!("{prefix}checks"));
    for c in checks {
        let status = if c.passed { "pass" } else { "FAIL" };
        let value = match (style, c.detail.is_empty()) {
            (Style::Text, false) => format!("{status}  {}", c.detail),
            _ => status.to_string(),
        };
        report.put(c.name, value);
        if !c.passed {
            violations.push(format!("{prefix}{}: {}", c.name, c.detail));
        }
    }
}

fn verdict_name(v: Verdict) -> &'static str {
    match v {
        Verdict::Member => "member",
        Verdict::Boundary => "boundary",
        Verdict::NonMember => "non_member",
    }
}

fn bound_entries(report: &mut Report, kind: &str, entries: &[BoundEntry], style: Style) {
    for e in entries {
        match style {
            Style::Text => {
                let mut notes = vec![e.requirement.tag().to_string(), format!("M={}", e.key_size)];
                if !e.applicable {
                    notes.push("not applicable".into());
                }
                if e.surrogate {
                    notes.push("surrogate".into());
                }
                report.put(
                    format!("{kind} {}", e.name),
                    format!("{}  ({})", num(e.bits, style), notes.join(", ")),
                );
            }
            Style::Structured => {
                let key = format!("{kind}.{}", e.name);
                report
                    .put(format!("{key}.bits"), num(e.bits, style))
                    .put(format!("{key}.key_size"), e.key_size)
                    .put(format!("{key}.requirement"), e.requirement.tag())
                    .put(format!("{key}.applicable"), e.applicable)
                    .put(format!("{key}.surrogate"), e.surrogate);
            }
        }
    }
}

fn describe(a: &Analysis, style: Style, report: &mut Report) {
    let d = &a.d;
    let (nx, ny) = (d.x_size(), d.y_size());
    report
        .section("input")
        .put("x_size", nx)
        .put("y_size", ny)
        .put("x_function_of_y", d.x_is_function_of_y())
        .put("y_function_of_x", d.y_is_function_of_x());
    report
        .section("marginals")
        .put("p_x", nums(&d.marginal_x(), style))
        .put("p_y", nums(&d.marginal_y(), style));
    let per_x: Vec<f64> = (0..nx).map(|x| d.conditional_entropy_per_x(x)).collect();
    report
        .section("entropy")
        .put("h_x", num(d.entropy_x(), style))
        .put("h_y", num(d.entropy_y(), style))
        .put("h_y_given_x", num(d.conditional_entropy_y_given_x(), style))
        .put("h_y_given_each_x", nums(&per_x, style))
        .put("mutual_information", num(d.mutual_information(), style));
    report
        .section("kernel")
        .put("rank", a.rank)
        .put("nullity", a.nullity)
        .put(
            "log_nullity_bound",
            num(((a.nullity + 1) as f64).log2(), style),
        );
    report
        .section("membership")
        .put("verdict", verdict_name(a.membership.verdict))
        .put("member", a.membership.is_member())
        .put("certificate_g0", num(a.membership.g0, style))
        .put("deterministic", a.membership.deterministic);

    if let Some(mech) = &a.mechanism {
        let id = a.identity.expect("identity accompanies a mechanism");
        report
            .section("optimizer")
            .put("u_size", mech.u_size())
            .put("entropy", num(mech.entropy(), style))
            .put("i_x_u", num(id.i_xu, style))
            .put("h_y_given_x_u", num(id.h_y_given_xu, style))
            .put("key_identity_residual", format!("{:.3e}", id.residual()))
            .put(
                "balance_residual",
                format!("{:.3e}", a.balance.unwrap_or(0.0)),
            );
        if let Some(g0) = &a.g0 {
            report.put("vertex_count", g0.vertex_count);
        }
    } else if let Some(e) = &a.synthesis_error {
        report.section("optimizer").put("error", e);
    }
    if let Some(b) = &a.mech_bounds {
        report
            .section("entropy_bounds")
            .put("k_lower", num(b.k_lower, style))
            .put("k_upper", num(b.k_upper, style))
            .put("k_upper_strengthened", num(b.k_upper_strengthened, style))
            .put("strengthened_fallback", b.strengthened_fallback)
            .put("rank_a", b.rank_a)
            .put("unique", b.unique)
            .put("degenerate", b.degenerate);
    }

    let r = &a.report;
    report.section("bounds");
    bound_entries(report, "upper", &r.upper, style);
    bound_entries(report, "lower", &r.lower, style);
    report
        .put("nonexistence", r.nonexistence)
        .put("flag_direct_pad", r.flags.direct_pad)
        .put("flag_two_part_achieved", r.flags.two_part_achieved)
        .put("flag_two_part_lp", r.flags.two_part_lp);
    if let Some(v) = r.achieved {
        report.put("achieved", num(v, style));
    }
    if let Some(m) = r.markov_code {
        report.put("markov_code", m);
    }

    if let (Some(hu), true) = (a.achieved_entropy(), d.x_is_function_of_y() && ny > nx) {
        let lhs = hu + 1.0;
        let rhs = field_width(ny - nx + 1);
        let strict = lhs < f64::from(rhs);
        let relation = if strict { "<" } else { ">=" };
        report
            .section("comparison")
            .put("entropy_plus_one", num(lhs, style))
            .put("prior_field_bits", rhs)
            .put("strictly_lower", strict)
            .put("statement", format!("{lhs:.4} {relation} {rhs}"));
    }
}

fn describe_mechanism(a: &Analysis, style: Style, report: &mut Report) {
    let Some(mech) = &a.mechanism else {
        report.section("mechanism").put("available", false);
        return;
    };
    report
        .section("mechanism")
        .put("available", true)
        .put("p_u", nums(mech.p_u(), style));
    for u in 0..mech.u_size() {
        report.put(
            format!("p_y_given_u{u}"),
            nums(&mech.p_y_given_u().column(u), style),
        );
    }
    if let Some(t) = mech.decode_table() {
        for x in 0..t.x_size() {
            let row: Vec<String> = (0..t.u_size())
                .map(|u| t.get(x, u).map_or("-".into(), |y| y.to_string()))
                .collect();
            report.put(format!("decode_x{x}"), row.join(" "));
        }
    }
}

fn describe_code(code: &PrivateCode, style: Style, report: &mut Report) {
    let name = code.scheme_name();
    report
        .section(format!("code.{name}"))
        .put("key_size", code.key_size())
        .put("pad_modulus", code.pad_modulus());
    match code {
        PrivateCode::TwoPart(c) => {
            report.put("x_field_bits", c.x_field_bits());
            match c.u_code() {
                Some(p) => {
                    for (u, w) in p.codewords().iter().enumerate() {
                        report.put(format!("codeword_u{u}"), w.to_string_01());
                    }
                    report.put("u_expected_length", num(p.expected_length(), style));
                }
                None => {
                    report.put("u_field", "zero-width");
                }
            }
        }
        PrivateCode::DirectPad(c) => {
            report.put("field_bits", c.field_bits());
        }
    }
}

fn describe_audit(name: &str, a: &codec::LeakageAudit, style: Style, report: &mut Report) {
    report
        .section(format!("audit.{name}"))
        .put("mi_c_x", num(a.mi_c_x, style))
        .put("mi_c_x_given_y", num(a.mi_c_x_given_y, style))
        .put("lossless_prob", num(a.lossless_prob, style))
        .put("failures", a.failures)
        .put(
            "per_key_expected_length",
            nums(&a.per_key_expected_length, style),
        )
        .put("max_expected_length", num(a.max_expected_length(), style))
        .put("support", a.support);
}

fn describe_codes(
    config: &RunConfig,
    a: &Analysis,
    style: Style,
    report: &mut Report,
    violations: &mut Vec<String>,
) -> anyhow::Result<()> {
    let codes: Vec<&crate::checks::CodeReport> =
        a.two_part.iter().chain(a.direct_pad.iter()).collect();
    if codes.is_empty() {
        report
            .section("code")
            .put("scheme", "none")
            .put("reason", "not a decodable member and |Y| > |X|");
        return Ok(());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut file = String::new();
    for c in &codes {
        describe_code(&c.code, style, report);
        let name = c.code.scheme_name();
        // a few encodings with the seeded randomness, each decoded back
        let d = &a.d;
        for y in 0..d.y_size().min(4) {
            let w = y % c.code.key_size();
            let bits = c.code.encode(y, w, &mut rng)?;
            let back = c.code.decode(&bits, w)?;
            report.put(
                format!("sample_y{y}_w{w}"),
                format!("{} -> {back}", bits.to_string_01()),
            );
            if back != y {
                violations.push(format!("{name}: sample y={y} w={w} decoded to {back}"));
            }
        }
        describe_audit(name, &c.audit, style, report);
        if !file.is_empty() {
            file.push('\n');
        }
        file.push_str(&write_code(&c.code, d));
    }
    let control = audit(&UnpaddedHuffman::new(&a.d)?, &a.d)?;
    report
        .section("control.unpadded_huffman")
        .put("mi_c_x", num(control.mi_c_x, style))
        .put("expected_length", num(control.max_expected_length(), style));
    if let Some(path) = &config.code_path {
        std::fs::write(path, file).with_context(|| format!("cannot write {}", path.display()))?;
        report.section("output").put("code_file", path.display());
    }
    Ok(())
}

fn audit_file(
    config: &RunConfig,
    d: &JointDistribution,
    style: Style,
    report: &mut Report,
    violations: &mut Vec<String>,
) -> anyhow::Result<()> {
    let path = config
        .code_path
        .as_ref()
        .context("--code is required for audit")?;
    let src =
        std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    let codes = read_codes(&src, d, &config.tol)?;
    report
        .section("input")
        .put("x_size", d.x_size())
        .put("y_size", d.y_size())
        .put("codes", codes.len());
    for (i, code) in codes.iter().enumerate() {
        describe_code(code, style, report);
        let a = audit(code, d)?;
        describe_audit(code.scheme_name(), &a, style, report);
        let mut checks = code_checks(code, &a, d);
        if let PrivateCode::TwoPart(c) = code {
            let mech = c.mechanism();
            let leak = mech.check_zero_leakage(d, &config.tol);
            checks.push(Check {
                name: "mechanism_zero_leakage",
                passed: leak.is_ok(),
                detail: leak.err().map_or(String::new(), |e| e.to_string()),
            });
            let h = key_identity(d, mech).h_y_given_xu;
            checks.push(Check {
                name: "mechanism_recoverable",
                passed: h <= BITS_EPS,
                detail: format!("H(Y|X,U) = {h:.3e}"),
            });
        }
        record_checks(&checks, &format!("code{i}."), style, report, violations);
    }
    Ok(())
}

/// Filter counts for instances that could pin the optimizer entropy.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct UniqueFilter {
    pub shape: usize,
    pub full_rank: usize,
    pub y_not_function: usize,
    pub member: usize,
    pub pinned: usize,
}

impl UniqueFilter {
    /// Applies the filters in order; returns whether the instance survived
    /// all of them.
    pub fn observe(&mut self, a: &Analysis, tol: &Tolerances) -> bool {
        let d = &a.d;
        if d.x_size() < d.y_size() + 1 {
            return false;
        }
        self.shape += 1;
        let (rank_a, _) = rank_and_nullity(&build_bound_matrices(d).a_xy, tol.rank);
        if rank_a != d.y_size() {
            return false;
        }
        self.full_rank += 1;
        if d.y_is_function_of_x() {
            return false;
        }
        self.y_not_function += 1;
        let (Some(b), true) = (&a.mech_bounds, a.membership.is_member()) else {
            return false;
        };
        self.member += 1;
        let hu = a.achieved_entropy().unwrap_or(f64::NAN);
        if (b.k_lower - b.k_upper_strengthened).abs() <= 1e-6 && (hu - b.k_lower).abs() <= 1e-6 {
            self.pinned += 1;
        }
        true
    }
}

fn sweep(
    config: &RunConfig,
    style: Style,
    report: &mut Report,
    violations: &mut Vec<String>,
) -> anyhow::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut tallies: Vec<(&'static str, usize, usize)> = Vec::new();
    let mut failed_instances = 0;
    let mut filter = UniqueFilter::default();
    let mut lines = Vec::new();
    for i in 0..config.n {
        let d = generate(config.family, &mut rng, &config.tol);
        let shape = format!("{}x{}", d.x_size(), d.y_size());
        let a = analyze(d, &config.tol).with_context(|| format!("instance {i}"))?;
        let mut checks = a.checks();
        let expect_member = match config.family {
            Family::DetF | Family::CommonInfo => Some(true),
            Family::Invertible => (a.d.conditional_entropy_y_given_x() > 1e-3).then_some(false),
        };
        if let Some(m) = expect_member {
            checks.push(Check {
                name: "family_membership",
                passed: a.membership.is_member() == m,
                detail: format!("verdict {}", verdict_name(a.membership.verdict)),
            });
        }
        filter.observe(&a, &config.tol);
        let failed: Vec<&Check> = checks.iter().filter(|c| !c.passed).collect();
        for c in &checks {
            match tallies.iter_mut().find(|t| t.0 == c.name) {
                Some(t) => {
                    t.1 += usize::from(c.passed);
                    t.2 += 1;
                }
                None => tallies.push((c.name, usize::from(c.passed), 1)),
            }
        }
        let status = if failed.is_empty() {
            "pass".to_string()
        } else {
            failed_instances += 1;
            for c in &failed {
                violations.push(format!("instance {i}: {}: {}", c.name, c.detail));
            }
            format!(
                "FAIL {}",
                failed.iter().map(|c| c.name).collect::<Vec<_>>().join(",")
            )
        };
        lines.push((
            format!("i{i:04}"),
            format!("{shape} {} {status}", verdict_name(a.membership.verdict)),
        ));
    }
    report
        .section("sweep")
        .put("family", config.family.name())
        .put("n", config.n)
        .put("seed", config.seed)
        .put("passed", config.n - failed_instances)
        .put("failed", failed_instances);
    report.section("tally");
    for (name, passed, total) in &tallies {
        report.put(*name, format!("{passed}/{total}"));
    }
    let status = if filter.member == 0 {
        "vacuous"
    } else {
        "checked"
    };
    report
        .section("unique_optimizer")
        .put("status", status)
        .put("shape_x_ge_y_plus_1", filter.shape)
        .put("rank_a_full", filter.full_rank)
        .put("y_not_function_of_x", filter.y_not_function)
        .put("member", filter.member)
        .put("pinned", filter.pinned);
    report.section("instances");
    for (k, v) in lines {
        report.put(k, v);
    }
    let _ = style;
    Ok(())
}
