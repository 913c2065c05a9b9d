use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use super::bits::Bits;
use super::scheme::KeyedCode;
use crate::dist::{entropy, JointDistribution};
use crate::Result;

/// Exact privacy and length accounting of a keyed code under `P(X, Y)` and a
/// uniform key.
#[derive(Clone, Debug, PartialEq)]
pub struct LeakageAudit {
    /// `I(C;X)` in bits.
    pub mi_c_x: f64,
    /// `I(C;X|Y)` in bits; zero iff `X - Y - C` is a Markov chain.
    pub mi_c_x_given_y: f64,
    /// Probability that decoding returns `Y`.
    pub lossless_prob: f64,
    /// Number of `(x, y, message, w)` outcomes that decoded wrongly.
    pub failures: usize,
    /// `E[len(C(Y, w))]` for each key `w`, averaged over `(X, Y)` and the
    /// encoder's own randomness.
    pub per_key_expected_length: Vec<f64>,
    /// Number of distinct messages with positive probability.
    pub support: usize,
}

impl LeakageAudit {
    pub fn max_expected_length(&self) -> f64 {
        self.per_key_expected_length
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Largest gap between the per-key expected lengths.
    pub fn key_spread(&self) -> f64 {
        let min = self
            .per_key_expected_length
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        self.max_expected_length() - min
    }
}

/// Enumerates every `(x, y, message, w)` outcome with its exact probability.
pub fn audit<C: KeyedCode + ?Sized>(code: &C, d: &JointDistribution) -> Result<LeakageAudit> {
    let (nx, ny, m) = (d.x_size(), d.y_size(), code.key_size());
    let key_mass = 1.0 / m as f64;
    // message -> P(c, x, y), flattened over (x, y)
    let mut joint: BTreeMap<Bits, Vec<f64>> = BTreeMap::new();
    let mut failed_mass = 0.0;
    let mut failures = 0;
    let mut per_key = vec![0.0; m];
    for x in 0..nx {
        for y in 0..ny {
            let pxy = d.get(x, y);
            if pxy <= 0.0 {
                continue;
            }
            for (w, len_w) in per_key.iter_mut().enumerate() {
                for (p, bits) in code.messages(x, y, w)? {
                    let mass = pxy * p * key_mass;
                    *len_w += pxy * p * bits.len() as f64;
                    if code.decode(&bits, w).ok() != Some(y) {
                        failed_mass += mass;
                        failures += 1;
                    }
                    joint.entry(bits).or_insert_with(|| vec![0.0; nx * ny])[x * ny + y] += mass;
                }
            }
        }
    }

    let px = d.marginal_x();
    let py = d.marginal_y();
    let mut mi = 0.0;
    let mut mi_given_y = 0.0;
    for masses in joint.values() {
        let pc: f64 = masses.iter().sum();
        for x in 0..nx {
            let pcx: f64 = (0..ny).map(|y| masses[x * ny + y]).sum();
            if pcx > 0.0 {
                mi += pcx * libm::log2(pcx / (pc * px[x]));
            }
        }
        for y in 0..ny {
            let pcy: f64 = (0..nx).map(|x| masses[x * ny + y]).sum();
            for x in 0..nx {
                let pcxy = masses[x * ny + y];
                if pcxy > 0.0 {
                    mi_given_y += pcxy * libm::log2(pcxy * py[y] / (pcy * d.get(x, y)));
                }
            }
        }
    }

    Ok(LeakageAudit {
        mi_c_x: mi.max(0.0),
        mi_c_x_given_y: mi_given_y.max(0.0),
        lossless_prob: 1.0 - failed_mass,
        failures,
        per_key_expected_length: per_key,
        support: joint.len(),
    })
}

/// Distribution of the padded private symbol `X + W mod |X|`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PadAudit {
    /// `H(X + W)`, bits.
    pub h_padded: f64,
    /// `I(X; X + W)`, bits.
    pub mi: f64,
}

pub fn pad_audit(d: &JointDistribution) -> PadAudit {
    let n = d.x_size();
    let px = d.marginal_x();
    let mut joint = vec![0.0; n * n];
    for (x, p) in px.iter().enumerate() {
        for w in 0..n {
            joint[x * n + (x + w) % n] += p / n as f64;
        }
    }
    let padded: Vec<f64> = (0..n)
        .map(|t| (0..n).map(|x| joint[x * n + t]).sum())
        .collect();
    let h_padded = entropy(&padded);
    PadAudit {
        h_padded,
        mi: (entropy(&px) + h_padded - entropy(&joint)).max(0.0),
    }
}
