use crate::dist::JointDistribution;
use crate::Tolerances;

/// Two private values; `X` is a function of `Y` with three `y` per value.
pub(crate) fn example_one() -> JointDistribution {
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
    JointDistribution::from_kernel(&k, &py, &Tolerances::default()).unwrap()
}

/// Binary symmetric pair with uniform input and crossover `eps`.
pub(crate) fn binary_symmetric(eps: f64) -> JointDistribution {
    let raw = [
        [0.5 * (1.0 - eps), 0.5 * eps],
        [0.5 * eps, 0.5 * (1.0 - eps)],
    ];
    JointDistribution::validate_and_normalize(&raw, &Tolerances::default()).unwrap()
}

pub(crate) fn independent(px: &[f64], py: &[f64]) -> JointDistribution {
    let rows: alloc::vec::Vec<alloc::vec::Vec<f64>> = px
        .iter()
        .map(|a| py.iter().map(|b| a * b).collect())
        .collect();
    JointDistribution::validate_and_normalize(&rows, &Tolerances::default()).unwrap()
}
