//! Zero-leakage disclosure variables `U`.
//!
//! A mechanism is a kernel `P(y|u)` together with weights `P(u)` that mix back
//! to `P(Y)`. Each column `P(.|u)` lies in the polytope
//! `{p >= 0 : P(X|Y) p = P(X)}`, which is exactly the condition `I(X;U) = 0`
//! for `U` generated from `Y` alone. The optimizer of the zero-leakage privacy
//! funnel is a mixture of vertices of that polytope and is found by a linear
//! program over vertex weights.

use alloc::vec;
use alloc::vec::Vec;

use crate::dist::{entropy, JointDistribution, Kernel};
use crate::linalg::{rank_and_nullity, Matrix};
use crate::lp::{enumerate_vertices, solve_lp, LinearProgram, LpOutcome, Sense};
use crate::{Error, Result, Tolerances};

/// Membership gaps up to this multiple of `tol.ent` are reported as boundary
/// cases rather than as non-members.
pub const BOUNDARY_FACTOR: f64 = 100.0;

/// Linear constraints satisfied by `a_y = H(U|Y = y)` for every zero-leakage
/// optimizer: `a_xy a = b_xy`.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundMatrices {
    /// `a_xy[x][y] = P(y) - P(y|x)`.
    pub a_xy: Matrix,
    /// `b_xy[x] = H(Y|X = x) - H(Y|X)`, bits.
    pub b_xy: Vec<f64>,
}

pub fn build_bound_matrices(d: &JointDistribution) -> BoundMatrices {
    let py = d.marginal_y();
    let h = d.conditional_entropy_y_given_x();
    let conds: Vec<Vec<f64>> = (0..d.x_size()).map(|x| d.conditional_y(x)).collect();
    let a_xy = Matrix::from_fn(d.x_size(), d.y_size(), |x, y| py[y] - conds[x][y]);
    let b_xy = conds.iter().map(|c| entropy(c) - h).collect();
    BoundMatrices { a_xy, b_xy }
}

/// Recovers `y` from `(x, u)`; `None` marks pairs of zero probability.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecodeTable {
    x_size: usize,
    u_size: usize,
    entries: Vec<Option<usize>>,
}

impl DecodeTable {
    pub fn from_entries(x_size: usize, u_size: usize, entries: Vec<Option<usize>>) -> Result<Self> {
        if entries.len() != x_size * u_size {
            return Err(Error::BadShape("decode table size differs from |X| x |U|"));
        }
        Ok(DecodeTable {
            x_size,
            u_size,
            entries,
        })
    }

    #[inline]
    pub fn get(&self, x: usize, u: usize) -> Option<usize> {
        self.entries[x * self.u_size + u]
    }

    pub fn x_size(&self) -> usize {
        self.x_size
    }

    pub fn u_size(&self) -> usize {
        self.u_size
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Mechanism {
    p_u: Vec<f64>,
    /// `|Y| x |U|`.
    p_y_given_u: Kernel,
    decode: Option<DecodeTable>,
}

impl Mechanism {
    pub fn new(p_u: Vec<f64>, p_y_given_u: Kernel, tol: &Tolerances) -> Result<Self> {
        if p_u.len() != p_y_given_u.cond_size() || p_u.is_empty() {
            return Err(Error::BadShape("P(U) length differs from kernel columns"));
        }
        crate::dist::check_probability_vector(&p_u, tol.prob)?;
        Ok(Mechanism {
            p_u,
            p_y_given_u,
            decode: None,
        })
    }

    /// Discloses `Y` itself.
    pub fn identity(d: &JointDistribution) -> Self {
        Mechanism {
            p_u: d.marginal_y(),
            p_y_given_u: Kernel::new(Matrix::identity(d.y_size()), 0.0)
                .expect("identity is stochastic"),
            decode: None,
        }
    }

    pub fn with_decode_table(mut self, table: DecodeTable) -> Result<Self> {
        if table.u_size != self.u_size() {
            return Err(Error::BadShape("decode table |U| differs from mechanism"));
        }
        self.decode = Some(table);
        Ok(self)
    }

    pub fn u_size(&self) -> usize {
        self.p_u.len()
    }

    pub fn y_size(&self) -> usize {
        self.p_y_given_u.out_size()
    }

    pub fn p_u(&self) -> &[f64] {
        &self.p_u
    }

    pub fn p_y_given_u(&self) -> &Kernel {
        &self.p_y_given_u
    }

    pub fn decode_table(&self) -> Option<&DecodeTable> {
        self.decode.as_ref()
    }

    /// `H(U)` in bits.
    pub fn entropy(&self) -> f64 {
        entropy(&self.p_u)
    }

    /// `P(u|y) = P(u) P(y|u) / P(y)`, rows indexed by `u`.
    pub fn p_u_given_y(&self, d: &JointDistribution) -> Matrix {
        let py = d.marginal_y();
        Matrix::from_fn(self.u_size(), d.y_size(), |u, y| {
            self.p_u[u] * self.p_y_given_u.get(y, u) / py[y]
        })
    }

    /// Exact `P(x, y, u) = P(x, y) P(u|y)`.
    pub fn joint(&self, d: &JointDistribution) -> TripleJoint {
        let pu_y = self.p_u_given_y(d);
        let (nx, ny, nu) = (d.x_size(), d.y_size(), self.u_size());
        let mut mass = vec![0.0; nx * ny * nu];
        for x in 0..nx {
            for y in 0..ny {
                for u in 0..nu {
                    mass[(x * ny + y) * nu + u] = d.get(x, y) * pu_y[(u, y)];
                }
            }
        }
        TripleJoint { nx, ny, nu, mass }
    }

    /// Checks that `P(U)` mixes back to `P(Y)` and that `P(X|Y) P(.|u) = P(X)`
    /// for every `u`.
    pub fn check_zero_leakage(&self, d: &JointDistribution, tol: &Tolerances) -> Result<()> {
        if self.y_size() != d.y_size() {
            return Err(Error::BadShape("mechanism |Y| differs from distribution"));
        }
        let py = d.marginal_y();
        for (y, &target) in py.iter().enumerate() {
            let mix: f64 = (0..self.u_size())
                .map(|u| self.p_u[u] * self.p_y_given_u.get(y, u))
                .sum();
            if (mix - target).abs() > tol.prob {
                return Err(Error::NotStochastic {
                    what: "mixture at y",
                    index: y,
                    sum: mix,
                });
            }
        }
        let k = d.kernel_x_given_y();
        let px = d.marginal_x();
        for u in 0..self.u_size() {
            let col = self.p_y_given_u.column(u);
            let image = k.matrix().mul_vec(&col);
            let deviation = image
                .iter()
                .zip(&px)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            if deviation > tol.prob {
                return Err(Error::Leaky { u, deviation });
            }
        }
        Ok(())
    }
}

/// An exact joint distribution of `(X, Y, U)`.
#[derive(Clone, Debug)]
pub struct TripleJoint {
    nx: usize,
    ny: usize,
    nu: usize,
    mass: Vec<f64>,
}

impl TripleJoint {
    #[inline]
    pub fn get(&self, x: usize, y: usize, u: usize) -> f64 {
        self.mass[(x * self.ny + y) * self.nu + u]
    }

    /// Entropy of the marginal on the selected coordinates `(x, y, u)`.
    fn marginal_entropy(&self, keep_x: bool, keep_y: bool, keep_u: bool) -> f64 {
        let dx = if keep_x { self.nx } else { 1 };
        let dy = if keep_y { self.ny } else { 1 };
        let du = if keep_u { self.nu } else { 1 };
        let mut m = vec![0.0; dx * dy * du];
        for x in 0..self.nx {
            for y in 0..self.ny {
                for u in 0..self.nu {
                    let i = ((if keep_x { x } else { 0 }) * dy + if keep_y { y } else { 0 }) * du
                        + if keep_u { u } else { 0 };
                    m[i] += self.get(x, y, u);
                }
            }
        }
        entropy(&m)
    }
}

/// The five terms of `I(U;Y) = I(X;U) + H(Y|X) - I(X;U|Y) - H(Y|X,U)`,
/// each computed from the exact joint.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KeyIdentity {
    pub i_uy: f64,
    pub i_xu: f64,
    pub h_y_given_x: f64,
    pub i_xu_given_y: f64,
    pub h_y_given_xu: f64,
}

impl KeyIdentity {
    pub fn residual(&self) -> f64 {
        self.i_uy - self.i_xu - self.h_y_given_x + self.i_xu_given_y + self.h_y_given_xu
    }
}

pub fn key_identity(d: &JointDistribution, mech: &Mechanism) -> KeyIdentity {
    let j = mech.joint(d);
    let h = |x, y, u| j.marginal_entropy(x, y, u);
    let (hx, hy, hu) = (
        h(true, false, false),
        h(false, true, false),
        h(false, false, true),
    );
    let (hxy, hxu, hyu, hxyu) = (
        h(true, true, false),
        h(true, false, true),
        h(false, true, true),
        h(true, true, true),
    );
    KeyIdentity {
        i_uy: hu + hy - hyu,
        i_xu: hx + hu - hxu,
        h_y_given_x: hxy - hx,
        i_xu_given_y: hxy + hyu - hxyu - hy,
        h_y_given_xu: hxyu - hxu,
    }
}

/// For each `x`: `sum_y (P(y|x) - P(y)) H(U|Y=y) - (H(Y|X) - H(Y|X=x))`.
///
/// Vanishes for every optimizer that is independent of `X`, generated from
/// `Y` and lets `(X, U)` determine `Y`.
pub fn conditional_entropy_balance(d: &JointDistribution, mech: &Mechanism) -> Vec<f64> {
    let a = entropies_given_y(d, mech);
    let bm = build_bound_matrices(d);
    (0..d.x_size())
        .map(|x| {
            let lhs: f64 = (0..d.y_size()).map(|y| -bm.a_xy[(x, y)] * a[y]).sum();
            lhs + bm.b_xy[x]
        })
        .collect()
}

/// `H(U|Y = y)` for every `y`.
pub fn entropies_given_y(d: &JointDistribution, mech: &Mechanism) -> Vec<f64> {
    let pu_y = mech.p_u_given_y(d);
    (0..d.y_size()).map(|y| entropy(&pu_y.column(y))).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Member,
    /// The gap `H(Y|X) - g0` is above `tol.ent` but within
    /// [`BOUNDARY_FACTOR`] times it.
    Boundary,
    NonMember,
}

/// Result of testing whether the zero-leakage funnel value `g0` reaches
/// `H(Y|X)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Membership {
    pub verdict: Verdict,
    /// The certificate: `g0` in bits (equal to `H(Y|X)` on the fast path).
    pub g0: f64,
    pub h_y_given_x: f64,
    /// Decided without solving, because `X` is a function of `Y`.
    pub deterministic: bool,
}

impl Membership {
    pub fn is_member(&self) -> bool {
        self.verdict == Verdict::Member
    }
}

pub fn membership_in_phat(d: &JointDistribution, tol: &Tolerances) -> Result<Membership> {
    let h = d.conditional_entropy_y_given_x();
    if d.x_is_function_of_y() {
        return Ok(Membership {
            verdict: Verdict::Member,
            g0: h,
            h_y_given_x: h,
            deterministic: true,
        });
    }
    let g0 = solve_g0(d, tol)?.value;
    Ok(Membership {
        verdict: classify(h - g0, tol),
        g0,
        h_y_given_x: h,
        deterministic: false,
    })
}

fn classify(gap: f64, tol: &Tolerances) -> Verdict {
    if gap.abs() <= tol.ent {
        Verdict::Member
    } else if gap.abs() <= BOUNDARY_FACTOR * tol.ent {
        Verdict::Boundary
    } else {
        Verdict::NonMember
    }
}

#[derive(Clone, Debug)]
pub struct G0Solution {
    /// `g0 = max I(Y;U)` over zero-leakage mechanisms, bits.
    pub value: f64,
    pub mechanism: Mechanism,
    /// Number of vertices of the leakage polytope.
    pub vertex_count: usize,
    pub nullity: usize,
}

/// Solves the zero-leakage privacy funnel exactly.
///
/// Enumerates the vertices `v` of `{p >= 0 : P(X|Y) p = P(X)}` and solves
/// `min sum_v w_v H(v)` subject to `sum_v w_v v = P(Y)`, `w >= 0`. The funnel
/// value is `H(Y)` minus that minimum; the basic optimal weights become `P(U)`
/// and the selected vertices the columns of `P(Y|U)`.
pub fn solve_g0(d: &JointDistribution, tol: &Tolerances) -> Result<G0Solution> {
    let k = d.kernel_x_given_y();
    let px = d.marginal_x();
    let py = d.marginal_y();
    let (_, nullity) = rank_and_nullity(k.matrix(), tol.rank);
    let vertices = match enumerate_vertices(k.matrix(), &px, tol) {
        Ok(v) => v,
        Err(Error::Infeasible) => return Err(Error::Internal("leakage polytope has no vertex")),
        Err(e) => return Err(e),
    };

    let ny = d.y_size();
    let weights_lhs = Matrix::from_fn(ny, vertices.len(), |y, v| vertices[v][y]);
    let costs: Vec<f64> = vertices.iter().map(|v| entropy(v)).collect();
    let lp = LinearProgram::new(costs, weights_lhs, py.clone(), Sense::Minimize)?;
    let sol = match solve_lp(&lp, tol)? {
        LpOutcome::Optimal(s) => s,
        _ => return Err(Error::Internal("vertex weight program has no optimum")),
    };

    let kept: Vec<usize> = (0..vertices.len())
        .filter(|&v| sol.point[v] > tol.lp)
        .collect();
    let total: f64 = kept.iter().map(|&v| sol.point[v]).sum();
    let p_u: Vec<f64> = kept.iter().map(|&v| sol.point[v] / total).collect();
    if p_u.len() > nullity + 1 {
        return Err(Error::Internal("optimal weights are not basic"));
    }
    let kernel = Matrix::from_fn(ny, kept.len(), |y, u| vertices[kept[u]][y]);
    let mechanism = Mechanism::new(p_u, Kernel::new(kernel, tol.prob)?, tol)?;

    Ok(G0Solution {
        value: d.entropy_y() - sol.value,
        mechanism,
        vertex_count: vertices.len(),
        nullity,
    })
}

/// Fills the `(x, u) -> y` table and verifies `H(Y|X,U) = 0`.
pub fn build_decode_table(
    d: &JointDistribution,
    mech: &Mechanism,
    tol: &Tolerances,
) -> Result<Mechanism> {
    mech.check_zero_leakage(d, tol)?;
    let nu = mech.u_size();
    let mut entries = vec![None; d.x_size() * nu];
    for x in 0..d.x_size() {
        for u in 0..nu {
            let mut candidates =
                (0..d.y_size()).filter(|&y| d.get(x, y) > 0.0 && mech.p_y_given_u.get(y, u) > 0.0);
            let first = candidates.next();
            if first.is_some() && candidates.next().is_some() {
                return Err(Error::NotDecodable { x, u });
            }
            entries[x * nu + u] = first;
        }
    }
    let h = key_identity(d, mech).h_y_given_xu;
    if h > tol.ent {
        return Err(Error::Internal("unique candidates but positive H(Y|X,U)"));
    }
    mech.clone()
        .with_decode_table(DecodeTable::from_entries(d.x_size(), nu, entries)?)
}

/// Solves the funnel and attaches a decode table.
pub fn synthesize(d: &JointDistribution, tol: &Tolerances) -> Result<Mechanism> {
    let g0 = solve_g0(d, tol)?;
    build_decode_table(d, &g0.mechanism, tol)
}

/// Brackets on the minimum entropy of a zero-leakage optimizer.
#[derive(Clone, Debug, PartialEq)]
pub struct MechanismBounds {
    pub h_y_given_x: f64,
    /// `H(Y|X) + min P(Y) . a` over `{a_xy a = b_xy, a >= 0}`.
    pub k_lower: f64,
    /// Same program maximized; infinite when unbounded.
    pub k_upper: f64,
    /// The maximum with the extra cap `P(Y) . a <= log(nullity + 1) - H(Y|X)`.
    pub k_upper_strengthened: f64,
    /// `log2(nullity(P(X|Y)) + 1)`.
    pub log_nullity_bound: f64,
    pub nullity: usize,
    pub rank_a: usize,
    /// `rank(a_xy) = |Y|` and `Y` is not a function of `X`: the optimizer
    /// entropy is pinned.
    pub unique: bool,
    /// `Y` is a function of `X`, so every program collapses to zero.
    pub degenerate: bool,
    /// The capped maximum was infeasible in floating point and replaced by
    /// `min(k_upper, log_nullity_bound)`.
    pub strengthened_fallback: bool,
    pub achieved_entropy: f64,
}

pub fn entropy_bounds(
    d: &JointDistribution,
    achieved: f64,
    tol: &Tolerances,
) -> Result<MechanismBounds> {
    let membership = membership_in_phat(d, tol)?;
    if !membership.is_member() {
        return Err(Error::NotInPhat {
            g0: membership.g0,
            h_y_given_x: membership.h_y_given_x,
        });
    }
    let h = membership.h_y_given_x;
    let bm = build_bound_matrices(d);
    let py = d.marginal_y();
    let (_, nullity) = rank_and_nullity(d.kernel_x_given_y().matrix(), tol.rank);
    let (rank_a, _) = rank_and_nullity(&bm.a_xy, tol.rank);
    let log_nullity_bound = libm::log2((nullity + 1) as f64);

    let program = |sense| LinearProgram::new(py.clone(), bm.a_xy.clone(), bm.b_xy.clone(), sense);
    let k_lower = match solve_lp(&program(Sense::Minimize)?, tol)? {
        LpOutcome::Optimal(s) => h + s.value,
        _ => return Err(Error::InfeasibleBoundLp),
    };
    let k_upper = match solve_lp(&program(Sense::Maximize)?, tol)? {
        LpOutcome::Optimal(s) => h + s.value,
        LpOutcome::Unbounded => f64::INFINITY,
        LpOutcome::Infeasible => return Err(Error::InfeasibleBoundLp),
    };
    let capped = program(Sense::Maximize)?.with_upper_bound(py.clone(), log_nullity_bound - h)?;
    let (k_upper_strengthened, strengthened_fallback) = match solve_lp(&capped, tol)? {
        LpOutcome::Optimal(s) => (h + s.value, false),
        _ => (k_upper.min(log_nullity_bound), true),
    };

    Ok(MechanismBounds {
        h_y_given_x: h,
        k_lower,
        k_upper,
        k_upper_strengthened,
        log_nullity_bound,
        nullity,
        rank_a,
        unique: rank_a == d.y_size() && !d.y_is_function_of_x(),
        degenerate: d.y_is_function_of_x(),
        strengthened_fallback,
        achieved_entropy: achieved,
    })
}
