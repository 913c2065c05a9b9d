//! Known values: worked example, hand-derived cases and trivial identities.

use privlen_core::bounds::{lower_bounds, upper_bounds, BoundsReport};
use privlen_core::codec::{
    audit, build_direct_pad, build_huffman, build_two_part, Bits, PrivateCode, UnpaddedHuffman,
};
use privlen_core::dist::{entropy, JointDistribution, Kernel};
use privlen_core::linalg::{rank_and_nullity, Matrix};
use privlen_core::lp::{enumerate_vertices, solve_lp, LinearProgram, LpOutcome, Sense};
use privlen_core::mechanism::{
    build_decode_table, entropy_bounds, key_identity, membership_in_phat, solve_g0, synthesize,
    Mechanism,
};
use privlen_core::{Error, Tolerances};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn tol() -> Tolerances {
    Tolerances::default()
}

fn example() -> JointDistribution {
    let k = [
        [1.0, 1.0, 1.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, 1.0, 1.0, 1.0],
    ];
    let py = [
        1.0 / 8.0,
        2.0 / 8.0,
        3.0 / 8.0,
        1.0 / 8.0,
        1.0 / 16.0,
        1.0 / 16.0,
    ];
    JointDistribution::from_kernel(&k, &py, &tol()).unwrap()
}

fn h2(p: f64) -> f64 {
    entropy(&[p, 1.0 - p])
}

#[test]
fn example_marginals_and_kernel() {
    let d = example();
    assert_eq!(d.marginal_x(), vec![0.75, 0.25]);
    let py = d.marginal_y();
    assert!((py[2] - 0.375).abs() < 1e-15 && (py[5] - 0.0625).abs() < 1e-15);
    assert_eq!(
        d.kernel_x_given_y().matrix().row(1),
        &[0.0, 0.0, 0.0, 1.0, 1.0, 1.0]
    );
    assert!(d.x_is_function_of_y());
}

#[test]
fn example_conditional_entropy_matches_direct_formula() {
    let d = example();
    let h1 = entropy(&[1.0 / 6.0, 2.0 / 6.0, 3.0 / 6.0]);
    assert!((d.conditional_entropy_y_given_x() - (0.75 * h1 + 0.25 * 1.5)).abs() < 1e-12);
    // the worked example quotes 1.4693 (truncated)
    assert!((d.conditional_entropy_y_given_x() - 1.4693).abs() < 1e-4);
}

#[test]
fn example_vertices_all_have_binary_entropy_of_a_quarter() {
    let d = example();
    let (rank, nullity) = rank_and_nullity(d.kernel_x_given_y().matrix(), tol().rank);
    assert_eq!((rank, nullity), (2, 4));
    let v = enumerate_vertices(d.kernel_x_given_y().matrix(), &d.marginal_x(), &tol()).unwrap();
    assert_eq!(v.len(), 9);
    for vertex in &v {
        assert!((entropy(vertex) - h2(0.25)).abs() < 1e-12);
    }
}

#[test]
fn example_funnel_and_membership() {
    let d = example();
    let m = membership_in_phat(&d, &tol()).unwrap();
    assert!(m.is_member() && m.deterministic);
    let g0 = solve_g0(&d, &tol()).unwrap();
    assert!((g0.value - d.conditional_entropy_y_given_x()).abs() < 1e-9);
    assert!(g0.mechanism.u_size() <= 5);
    assert_eq!(g0.vertex_count, 9);
}

#[test]
fn listed_example_mechanism_is_a_valid_optimizer() {
    let d = example();
    let cols = [
        [0.75, 0.0, 0.0, 0.25, 0.0, 0.0],
        [0.0, 0.75, 0.0, 0.25, 0.0, 0.0],
        [0.0, 0.0, 0.75, 0.0, 0.25, 0.0],
        [0.0, 0.0, 0.75, 0.0, 0.0, 0.25],
    ];
    let k = Matrix::from_fn(6, 4, |y, u| cols[u][y]);
    let mech = Mechanism::new(
        vec![1.0 / 6.0, 1.0 / 3.0, 0.25, 0.25],
        Kernel::new(k, 1e-12).unwrap(),
        &tol(),
    )
    .unwrap();
    assert!((mech.entropy() - 1.9591).abs() < 5e-5);
    let mech = build_decode_table(&d, &mech, &tol()).unwrap();
    let id = key_identity(&d, &mech);
    assert!(id.i_xu.abs() < 1e-12 && id.h_y_given_xu.abs() < 1e-12);
    assert!((id.i_uy - d.conditional_entropy_y_given_x()).abs() < 1e-12);
}

#[test]
fn synthesized_optimizer_is_no_worse_than_the_listed_one() {
    let d = example();
    let mech = synthesize(&d, &tol()).unwrap();
    assert!(mech.entropy() <= 1.9591 + 1e-3);
    let b = entropy_bounds(&d, mech.entropy(), &tol()).unwrap();
    assert!((b.log_nullity_bound - 5f64.log2()).abs() < 1e-12);
    assert!(b.k_lower >= d.conditional_entropy_y_given_x() - 1e-9);
    assert!(b.k_lower - 1e-9 <= mech.entropy() && mech.entropy() <= b.k_upper_strengthened + 1e-9);
}

#[test]
fn example_bound_comparison() {
    let d = example();
    let mech = synthesize(&d, &tol()).unwrap();
    let up = upper_bounds(&d, None, Some(mech.entropy()), &tol());
    let get = |n: &str| up.iter().find(|e| e.name == n).unwrap().bits;
    assert_eq!(get("deterministic_prior"), 4.0);
    assert!(get("two_part_optimizer") < 4.0);
    let (lo, none) = lower_bounds(&d, 2, None);
    assert!(!none);
    assert_eq!(lo[0].bits, 1.5);
    assert_eq!(lo[1].bits, 1.0);
    assert!(lower_bounds(&d, 1, None).1);
}

#[test]
fn example_two_part_first_field_is_padded_private_symbol() {
    let d = example();
    let code = build_two_part(&d, &synthesize(&d, &tol()).unwrap()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    // x = 0, key 1: (0 + 1) mod 2 = 1
    let bits = code.encode_with_private(0, 0, 1, &mut rng).unwrap();
    assert!(bits.as_slice()[0]);
    assert_eq!(code.decode(&bits, 1).unwrap(), 0);
    let a = audit(&code, &d).unwrap();
    assert!(a.mi_c_x < 1e-12 && a.lossless_prob == 1.0);
    assert!(a.max_expected_length() <= 1.0 + 2.9591);
}

#[test]
fn unpadded_huffman_leaks_on_the_example() {
    let d = example();
    let a = audit(&UnpaddedHuffman::new(&d).unwrap(), &d).unwrap();
    assert!(a.mi_c_x > 0.01);
}

#[test]
fn dyadic_huffman() {
    let c = build_huffman(&[0.5, 0.25, 0.25]).unwrap();
    assert_eq!(c.lengths(), vec![1, 2, 2]);
    assert_eq!(c.expected_length(), 1.5);
    let single = build_huffman(&[1.0]).unwrap();
    assert_eq!(single.lengths(), vec![1]);
    assert_eq!(single.expected_length(), 1.0);
}

#[test]
fn direct_pad_modular_arithmetic() {
    let raw = [
        [0.1, 0.05, 0.05, 0.05],
        [0.05, 0.1, 0.05, 0.05],
        [0.05, 0.05, 0.1, 0.05],
        [0.05, 0.05, 0.05, 0.1],
    ];
    let d = JointDistribution::validate_and_normalize(&raw, &tol()).unwrap();
    let code = build_direct_pad(&d).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let bits = code.encode(2, 3, &mut rng).unwrap();
    assert_eq!(bits, Bits::parse("01").unwrap());
    assert_eq!(code.decode(&bits, 3).unwrap(), 2);
    let a = audit(&code, &d).unwrap();
    assert!(a
        .per_key_expected_length
        .iter()
        .all(|l| (l - 2.0).abs() < 1e-12));
    assert!(a.mi_c_x.abs() < 1e-12);
}

#[test]
fn direct_pad_regime_is_enforced() {
    assert!(matches!(
        build_direct_pad(&example()),
        Err(Error::WrongRegime {
            x_size: 2,
            y_size: 6
        })
    ));
}

#[test]
fn direct_pad_beats_functional_representation_when_y_is_small() {
    let raw = [
        [0.1, 0.1, 0.05],
        [0.05, 0.1, 0.1],
        [0.1, 0.05, 0.1],
        [0.1, 0.05, 0.1],
    ];
    let d = JointDistribution::validate_and_normalize(&raw, &tol()).unwrap();
    let r = BoundsReport::assemble(&d, None, None, None, &tol());
    let pad = r.upper.iter().find(|e| e.name == "direct_pad").unwrap();
    assert_eq!(pad.bits, 2.0);
    assert!(r.flags.direct_pad);
    assert!(
        matches!(&build_direct_pad(&d).unwrap(), PrivateCode::DirectPad(c) if c.field_bits() == 2)
    );
}

#[test]
fn independent_pair_bounds() {
    let px = [0.3, 0.7];
    let py = [0.5, 0.25, 0.25];
    let raw: Vec<Vec<f64>> = px
        .iter()
        .map(|a| py.iter().map(|b| a * b).collect())
        .collect();
    let d = JointDistribution::validate_and_normalize(&raw, &tol()).unwrap();
    let mech = synthesize(&d, &tol()).unwrap();
    assert!((mech.entropy() - 1.5).abs() < 1e-12);
    let b = entropy_bounds(&d, mech.entropy(), &tol()).unwrap();
    assert!((b.k_lower - 1.5).abs() < 1e-12);
    let (lo, _) = lower_bounds(&d, 2, Some(b.k_lower));
    assert!(lo.iter().all(|e| (e.bits - 1.5).abs() < 1e-12));
}

#[test]
fn identity_joint_needs_a_single_output() {
    let raw = [[0.5, 0.0], [0.0, 0.5]];
    let d = JointDistribution::validate_and_normalize(&raw, &tol()).unwrap();
    let mech = synthesize(&d, &tol()).unwrap();
    assert_eq!(mech.u_size(), 1);
    let code = build_two_part(&d, &mech).unwrap();
    let a = audit(&code, &d).unwrap();
    // the pad carries everything; the second field is zero-width
    assert!(a
        .per_key_expected_length
        .iter()
        .all(|l| (l - 1.0).abs() < 1e-12));
    assert_eq!(a.lossless_prob, 1.0);
}

#[test]
fn zero_rows_are_removed() {
    let d = JointDistribution::validate_and_normalize(&[[0.5, 0.5], [0.0, 0.0]], &tol()).unwrap();
    assert_eq!((d.x_size(), d.y_size()), (1, 2));
    assert_eq!(d.x_labels(), &[0]);
    let u =
        JointDistribution::validate_and_normalize(&[[0.25, 0.25], [0.25, 0.25]], &tol()).unwrap();
    assert_eq!(u.marginal_x(), vec![0.5, 0.5]);
}

#[test]
fn single_private_symbol_has_no_pad() {
    let d = JointDistribution::validate_and_normalize(&[[0.5, 0.25, 0.25]], &tol()).unwrap();
    let mech = synthesize(&d, &tol()).unwrap();
    let a = audit(&build_two_part(&d, &mech).unwrap(), &d).unwrap();
    assert!((a.per_key_expected_length[0] - 1.5).abs() < 1e-12);
    let up = upper_bounds(&d, None, Some(mech.entropy()), &tol());
    assert_eq!(up[0].bits, mech.entropy() + 1.0);
}

#[test]
fn small_linear_programs() {
    let a = Matrix::from_rows(&[[1.0, 2.0]]).unwrap();
    let lp = LinearProgram::new(vec![1.0, 1.0], a.clone(), vec![2.0], Sense::Minimize).unwrap();
    let sol = solve_lp(&lp, &tol()).unwrap();
    let s = sol.optimal().unwrap();
    assert!((s.value - 1.0).abs() < 1e-12);
    assert!((s.point[1] - 1.0).abs() < 1e-12);
    let lp = LinearProgram::new(vec![1.0, 1.0], a.clone(), vec![2.0], Sense::Maximize).unwrap();
    let sol = solve_lp(&lp, &tol()).unwrap();
    assert!((sol.optimal().unwrap().value - 2.0).abs() < 1e-12);
    let lp = LinearProgram::new(vec![1.0, 1.0], a, vec![-1.0], Sense::Minimize).unwrap();
    assert_eq!(solve_lp(&lp, &tol()).unwrap(), LpOutcome::Infeasible);
    let free = Matrix::from_rows(&[[1.0, -1.0]]).unwrap();
    let lp = LinearProgram::new(vec![1.0, 0.0], free, vec![0.0], Sense::Maximize).unwrap();
    assert_eq!(solve_lp(&lp, &tol()).unwrap(), LpOutcome::Unbounded);
}
