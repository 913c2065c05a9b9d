//! Seeded random instance families.

use clap::ValueEnum;
use privlen_core::dist::JointDistribution;
use privlen_core::Tolerances;
use rand::seq::SliceRandom;
use rand::Rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Family {
    /// `X = f(Y)` for a random surjection `f`, `|X| <= 4`, `|Y| <= 10`.
    DetF,
    /// `X = (V, N1)`, `Y = (V, N2)` with `N1 - V - N2`.
    CommonInfo,
    /// Dense joint with `|Y| <= |X|`; the kernel `P(X|Y)` has full column
    /// rank, so the instance lies outside the equality set.
    Invertible,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::DetF => "det-f",
            Family::CommonInfo => "common-info",
            Family::Invertible => "invertible",
        }
    }
}

fn weights<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    let w: Vec<f64> = (0..n).map(|_| rng.random_range(0.05..1.0)).collect();
    let total: f64 = w.iter().sum();
    w.into_iter().map(|v| v / total).collect()
}

/// A random surjection `0..ny -> 0..nx` as a lookup table.
pub fn random_surjection<R: Rng + ?Sized>(rng: &mut R, ny: usize, nx: usize) -> Vec<usize> {
    let mut f: Vec<usize> = (0..ny)
        .map(|y| if y < nx { y } else { rng.random_range(0..nx) })
        .collect();
    f.shuffle(rng);
    f
}

pub fn det_f<R: Rng + ?Sized>(rng: &mut R, tol: &Tolerances) -> JointDistribution {
    let nx = rng.random_range(2..=4);
    let ny = rng.random_range(nx..=10);
    let f = random_surjection(rng, ny, nx);
    let py = weights(rng, ny);
    let raw: Vec<Vec<f64>> = (0..nx)
        .map(|x| {
            (0..ny)
                .map(|y| if f[y] == x { py[y] } else { 0.0 })
                .collect()
        })
        .collect();
    JointDistribution::validate_and_normalize(&raw, tol).expect("generated joint is valid")
}

pub fn common_info<R: Rng + ?Sized>(rng: &mut R, tol: &Tolerances) -> JointDistribution {
    let nv = rng.random_range(1..=3);
    let n1 = rng.random_range(1..=3);
    let n2 = rng.random_range(1..=3);
    let pv = weights(rng, nv);
    let a: Vec<Vec<f64>> = (0..nv).map(|_| weights(rng, n1)).collect();
    let b: Vec<Vec<f64>> = (0..nv).map(|_| weights(rng, n2)).collect();
    // x = (v, i) and y = (v, j); cross-v pairs carry no mass
    let raw: Vec<Vec<f64>> = (0..nv * n1)
        .map(|x| {
            let (v, i) = (x / n1, x % n1);
            (0..nv * n2)
                .map(|y| {
                    let (w, j) = (y / n2, y % n2);
                    if v == w {
                        pv[v] * a[v][i] * b[v][j]
                    } else {
                        0.0
                    }
                })
                .collect()
        })
        .collect();
    JointDistribution::validate_and_normalize(&raw, tol).expect("generated joint is valid")
}

pub fn invertible<R: Rng + ?Sized>(rng: &mut R, tol: &Tolerances) -> JointDistribution {
    let ny = rng.random_range(2..=8);
    let nx = rng.random_range(ny..=ny + 2);
    let flat = weights(rng, nx * ny);
    let raw: Vec<Vec<f64>> = flat.chunks(ny).map(<[f64]>::to_vec).collect();
    JointDistribution::validate_and_normalize(&raw, tol).expect("generated joint is valid")
}

pub fn generate<R: Rng + ?Sized>(
    family: Family,
    rng: &mut R,
    tol: &Tolerances,
) -> JointDistribution {
    match family {
        Family::DetF => det_f(rng, tol),
        Family::CommonInfo => common_info(rng, tol),
        Family::Invertible => invertible(rng, tol),
    }
}
