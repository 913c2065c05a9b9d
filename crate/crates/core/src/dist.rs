//! Finite joint distributions of a private variable `X` and a useful variable
//! `Y`, their kernels, and the information measures used throughout (in bits).

use alloc::vec::Vec;

use crate::linalg::Matrix;
use crate::{Error, Result, Tolerances};

/// `H(p)` in bits, with `0 log 0 = 0`.
pub fn entropy(p: &[f64]) -> f64 {
    p.iter()
        .filter(|&&v| v > 0.0)
        .map(|&v| -v * libm::log2(v))
        .sum()
}

/// A column-stochastic matrix `k[out][cond]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Kernel {
    k: Matrix,
}

impl Kernel {
    pub fn new(k: Matrix, tol: f64) -> Result<Self> {
        for j in 0..k.cols() {
            let mut sum = 0.0;
            for i in 0..k.rows() {
                let v = k[(i, j)];
                if v < -tol {
                    return Err(Error::NegativeMass {
                        row: i,
                        col: j,
                        value: v,
                    });
                }
                sum += v;
            }
            if (sum - 1.0).abs() > tol {
                return Err(Error::NotStochastic {
                    what: "column",
                    index: j,
                    sum,
                });
            }
        }
        Ok(Kernel { k })
    }

    pub fn out_size(&self) -> usize {
        self.k.rows()
    }

    pub fn cond_size(&self) -> usize {
        self.k.cols()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.k
    }

    /// The conditional distribution `k[.][cond]`.
    pub fn column(&self, cond: usize) -> Vec<f64> {
        self.k.column(cond)
    }

    #[inline]
    pub fn get(&self, out: usize, cond: usize) -> f64 {
        self.k[(out, cond)]
    }
}

/// The joint distribution `P(x, y)` stored as a `|X| x |Y|` matrix.
///
/// Construction strips all-zero rows and columns; the original indices of
/// the surviving symbols are kept in [`x_labels`](Self::x_labels) and
/// [`y_labels`](Self::y_labels).
#[derive(Clone, Debug, PartialEq)]
pub struct JointDistribution {
    p: Matrix,
    x_labels: Vec<usize>,
    y_labels: Vec<usize>,
}

impl JointDistribution {
    /// Clamps entries in `[-tol.prob, 0)` to zero, removes zero rows and
    /// columns and rescales the remaining mass to one.
    pub fn validate_and_normalize<R: AsRef<[f64]>>(raw: &[R], tol: &Tolerances) -> Result<Self> {
        let m = Matrix::from_rows(raw)?;
        let mut total = 0.0;
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                let v = m[(i, j)];
                if !v.is_finite() || v < -tol.prob {
                    return Err(Error::NegativeMass {
                        row: i,
                        col: j,
                        value: v,
                    });
                }
                total += v.max(0.0);
            }
        }
        if total <= 0.0 {
            return Err(Error::EmptySupport);
        }
        let x_labels: Vec<usize> = (0..m.rows())
            .filter(|&i| m.row(i).iter().any(|&v| v > 0.0))
            .collect();
        let y_labels: Vec<usize> = (0..m.cols())
            .filter(|&j| (0..m.rows()).any(|i| m[(i, j)] > 0.0))
            .collect();
        let p = Matrix::from_fn(x_labels.len(), y_labels.len(), |i, j| {
            m[(x_labels[i], y_labels[j])].max(0.0) / total
        });
        Ok(JointDistribution {
            p,
            x_labels,
            y_labels,
        })
    }

    /// Composes `P(x, y) = P(x|y) P(y)` from a leakage kernel (rows indexed
    /// by `x`) and the marginal of `Y`.
    pub fn from_kernel<R: AsRef<[f64]>>(
        kernel_x_given_y: &[R],
        p_y: &[f64],
        tol: &Tolerances,
    ) -> Result<Self> {
        let k = Kernel::new(Matrix::from_rows(kernel_x_given_y)?, tol.prob)?;
        if p_y.len() != k.cond_size() {
            return Err(Error::BadShape(
                "marginal length differs from kernel columns",
            ));
        }
        check_probability_vector(p_y, tol.prob)?;
        let rows: Vec<Vec<f64>> = (0..k.out_size())
            .map(|x| (0..k.cond_size()).map(|y| k.get(x, y) * p_y[y]).collect())
            .collect();
        Self::validate_and_normalize(&rows, tol)
    }

    #[inline]
    pub fn x_size(&self) -> usize {
        self.p.rows()
    }

    #[inline]
    pub fn y_size(&self) -> usize {
        self.p.cols()
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.p[(x, y)]
    }

    pub fn matrix(&self) -> &Matrix {
        &self.p
    }

    pub fn x_labels(&self) -> &[usize] {
        &self.x_labels
    }

    pub fn y_labels(&self) -> &[usize] {
        &self.y_labels
    }

    pub fn marginal_x(&self) -> Vec<f64> {
        (0..self.x_size())
            .map(|x| self.p.row(x).iter().sum())
            .collect()
    }

    pub fn marginal_y(&self) -> Vec<f64> {
        (0..self.y_size())
            .map(|y| (0..self.x_size()).map(|x| self.p[(x, y)]).sum())
            .collect()
    }

    /// The leakage matrix `P(x|y)`, rows indexed by `x`.
    pub fn kernel_x_given_y(&self) -> Kernel {
        let py = self.marginal_y();
        Kernel {
            k: Matrix::from_fn(self.x_size(), self.y_size(), |x, y| self.p[(x, y)] / py[y]),
        }
    }

    /// `P(y|x)`, rows indexed by `y`.
    pub fn kernel_y_given_x(&self) -> Kernel {
        let px = self.marginal_x();
        Kernel {
            k: Matrix::from_fn(self.y_size(), self.x_size(), |y, x| self.p[(x, y)] / px[x]),
        }
    }

    /// `P(.|x)` as a vector over `Y`.
    pub fn conditional_y(&self, x: usize) -> Vec<f64> {
        let px: f64 = self.p.row(x).iter().sum();
        self.p.row(x).iter().map(|v| v / px).collect()
    }

    pub fn entropy_x(&self) -> f64 {
        entropy(&self.marginal_x())
    }

    pub fn entropy_y(&self) -> f64 {
        entropy(&self.marginal_y())
    }

    /// `H(Y|X = x)`.
    pub fn conditional_entropy_per_x(&self, x: usize) -> f64 {
        entropy(&self.conditional_y(x))
    }

    /// `H(Y|X) = sum_x P(x) H(Y|X = x)`.
    pub fn conditional_entropy_y_given_x(&self) -> f64 {
        self.marginal_x()
            .iter()
            .enumerate()
            .map(|(x, px)| px * self.conditional_entropy_per_x(x))
            .sum()
    }

    pub fn mutual_information(&self) -> f64 {
        let hxy = entropy(&self.flat());
        (self.entropy_x() + self.entropy_y() - hxy).max(0.0)
    }

    fn flat(&self) -> Vec<f64> {
        (0..self.x_size())
            .flat_map(|x| self.p.row(x).iter().copied())
            .collect()
    }

    /// True if every column of `P(x|y)` is a point mass, i.e. `X = f(Y)`.
    pub fn x_is_function_of_y(&self) -> bool {
        (0..self.y_size())
            .all(|y| (0..self.x_size()).filter(|&x| self.p[(x, y)] > 0.0).count() == 1)
    }

    /// True if every row of `P(y|x)` is a point mass, i.e. `Y = f(X)`.
    pub fn y_is_function_of_x(&self) -> bool {
        (0..self.x_size()).all(|x| self.p.row(x).iter().filter(|&&v| v > 0.0).count() == 1)
    }

    /// For `X = f(Y)`, the value of `f` at each `y`.
    pub fn x_of_y(&self) -> Option<Vec<usize>> {
        if !self.x_is_function_of_y() {
            return None;
        }
        Some(
            (0..self.y_size())
                .map(|y| (0..self.x_size()).find(|&x| self.p[(x, y)] > 0.0).unwrap())
                .collect(),
        )
    }
}

pub(crate) fn check_probability_vector(p: &[f64], tol: f64) -> Result<()> {
    for (i, &v) in p.iter().enumerate() {
        if !v.is_finite() || v < -tol {
            return Err(Error::NegativeMass {
                row: 0,
                col: i,
                value: v,
            });
        }
    }
    let sum: f64 = p.iter().sum();
    if (sum - 1.0).abs() > tol {
        return Err(Error::NotStochastic {
            what: "vector",
            index: 0,
            sum,
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::example_one;
    use alloc::vec;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn close(a: &[f64], b: &[f64], eps: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= eps)
    }

    #[test]
    fn zero_row_is_removed() {
        let d =
            JointDistribution::validate_and_normalize(&[[0.5, 0.5], [0.0, 0.0]], &tol()).unwrap();
        assert_eq!((d.x_size(), d.y_size()), (1, 2));
        assert_eq!(d.x_labels(), &[0]);
        assert_eq!(d.marginal_y(), vec![0.5, 0.5]);
    }

    #[test]
    fn valid_input_is_a_fixed_point() {
        let raw = [[0.1, 0.2], [0.3, 0.4]];
        let d = JointDistribution::validate_and_normalize(&raw, &tol()).unwrap();
        let again =
            JointDistribution::validate_and_normalize(&d.matrix().to_rows(), &tol()).unwrap();
        assert_eq!(d, again);
        assert!(close(d.matrix().row(1), &raw[1], 1e-15));
    }

    #[test]
    fn rejects_empty_ragged_and_negative() {
        assert_eq!(
            JointDistribution::validate_and_normalize(&[[0.0, 0.0]], &tol()),
            Err(Error::EmptySupport)
        );
        let ragged: [&[f64]; 2] = [&[0.5, 0.5], &[0.0]];
        assert!(matches!(
            JointDistribution::validate_and_normalize(&ragged, &tol()),
            Err(Error::BadShape(_))
        ));
        assert!(matches!(
            JointDistribution::validate_and_normalize(&[[0.5, -0.1]], &tol()),
            Err(Error::NegativeMass { .. })
        ));
        // tiny negatives are clamped
        let d = JointDistribution::validate_and_normalize(&[[1.0, -1e-12]], &tol()).unwrap();
        assert_eq!(d.y_size(), 1);
    }

    #[test]
    fn example_marginals_and_kernel() {
        let d = example_one();
        assert!(close(&d.marginal_x(), &[0.75, 0.25], 1e-15));
        assert!(close(
            &d.marginal_y(),
            &[0.125, 0.25, 0.375, 0.125, 0.0625, 0.0625],
            1e-15
        ));
        let k = d.kernel_x_given_y();
        assert!(close(
            d.kernel_x_given_y().matrix().row(0),
            &[1.0, 1.0, 1.0, 0.0, 0.0, 0.0],
            1e-15
        ));
        assert!(close(
            k.matrix().row(1),
            &[0.0, 0.0, 0.0, 1.0, 1.0, 1.0],
            1e-15
        ));
        assert!(d.x_is_function_of_y());
        assert!(!d.y_is_function_of_x());
    }

    #[test]
    fn example_conditional_entropy() {
        let d = example_one();
        // P(Y|x1) = [1/6, 2/6, 3/6], P(Y|x2) = [1/2, 1/4, 1/4]
        let h1 = (1.0 / 6.0) * libm::log2(6.0) + (1.0 / 3.0) * libm::log2(3.0) + 0.5;
        let h2 = 1.5;
        let expect = 0.75 * h1 + 0.25 * h2;
        assert!((d.conditional_entropy_per_x(0) - h1).abs() < 1e-12);
        assert!((d.conditional_entropy_y_given_x() - expect).abs() < 1e-12);
        assert!((expect - 1.4693).abs() < 1e-4);
    }

    #[test]
    fn uniform_and_degenerate_entropies() {
        assert!((entropy(&[0.25; 4]) - 2.0).abs() < 1e-15);
        let d =
            JointDistribution::validate_and_normalize(&[[0.5, 0.0], [0.0, 0.5]], &tol()).unwrap();
        assert_eq!(d.conditional_entropy_y_given_x(), 0.0);
        assert_eq!(d.kernel_x_given_y().matrix(), &Matrix::identity(2));
        let u = JointDistribution::validate_and_normalize(&[[0.25, 0.25], [0.25, 0.25]], &tol())
            .unwrap();
        assert_eq!(u.marginal_x(), vec![0.5, 0.5]);
        assert!(close(
            &u.kernel_x_given_y().column(1),
            &u.marginal_x(),
            1e-15
        ));
    }

    #[test]
    fn kernel_rejects_bad_column() {
        let k = [[0.5, 1.0], [0.4, 0.0]];
        assert!(matches!(
            JointDistribution::from_kernel(&k, &[0.5, 0.5], &tol()),
            Err(Error::NotStochastic {
                what: "column",
                index: 0,
                ..
            })
        ));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn joint() -> impl Strategy<Value = JointDistribution> {
            (1usize..5, 1usize..6).prop_flat_map(|(r, c)| {
                proptest::collection::vec(0.0f64..1.0, r * c).prop_filter_map("empty", move |v| {
                    let rows: Vec<Vec<f64>> = v.chunks(c).map(|s| s.to_vec()).collect();
                    JointDistribution::validate_and_normalize(&rows, &Tolerances::default()).ok()
                })
            })
        }

        proptest! {
            #[test]
            fn chain_rule(d in joint()) {
                let lhs = d.entropy_y();
                let rhs = d.conditional_entropy_y_given_x() + d.mutual_information();
                prop_assert!((lhs - rhs).abs() <= 1e-10);
            }

            #[test]
            fn kernel_recomposes(d in joint()) {
                let k = d.kernel_x_given_y();
                let py = d.marginal_y();
                for x in 0..d.x_size() {
                    for y in 0..d.y_size() {
                        prop_assert!((k.get(x, y) * py[y] - d.get(x, y)).abs() <= 1e-12);
                    }
                }
            }

            #[test]
            fn entropy_bounds(v in proptest::collection::vec(0.0f64..1.0, 1..8), rot in 0usize..8) {
                let s: f64 = v.iter().sum();
                prop_assume!(s > 0.0);
                let p: Vec<f64> = v.iter().map(|x| x / s).collect();
                let mut q = p.clone();
                let len = q.len();
                q.rotate_left(rot % len);
                let support = p.iter().filter(|&&x| x > 0.0).count() as f64;
                prop_assert!((entropy(&p) - entropy(&q)).abs() <= 1e-12);
                prop_assert!(entropy(&p) <= libm::log2(support) + 1e-12);
                prop_assert!(entropy(&p) >= 0.0);
            }
        }
    }
}
