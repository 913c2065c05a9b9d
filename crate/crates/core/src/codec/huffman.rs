use alloc::collections::BinaryHeap;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use super::bits::Bits;
use crate::{Error, Result};

/// A prefix-free code over symbols `0..n`.
#[derive(Clone, Debug, PartialEq)]
pub struct PrefixCode {
    codewords: Vec<Bits>,
    /// Expected length under the distribution the code was built for.
    expected_length: f64,
}

struct Node {
    weight: f64,
    /// Smallest symbol index below this node; breaks weight ties.
    min_symbol: usize,
    id: usize,
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Node {}

impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Node {
    // reversed: BinaryHeap is a max-heap and we pop the lightest node
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .weight
            .total_cmp(&self.weight)
            .then_with(|| other.min_symbol.cmp(&self.min_symbol))
    }
}

/// Builds an optimal (Huffman) prefix code for `p`.
///
/// Merges are ordered by `(weight, smallest symbol index)`; codewords are
/// then assigned canonically, sorted by `(length, symbol)`. A single symbol
/// gets the one-bit codeword `0`.
pub fn build_huffman(p: &[f64]) -> Result<PrefixCode> {
    let n = p.len();
    if n == 0 {
        return Err(Error::BadShape("empty alphabet"));
    }
    if p.iter().any(|v| !v.is_finite() || *v < 0.0) {
        return Err(Error::InvalidSymbol {
            what: "probability",
            value: 0,
        });
    }
    let lengths = if n == 1 {
        vec![1]
    } else {
        let mut parent = vec![usize::MAX; 2 * n - 1];
        let mut heap: BinaryHeap<Node> = p
            .iter()
            .enumerate()
            .map(|(i, &w)| Node {
                weight: w,
                min_symbol: i,
                id: i,
            })
            .collect();
        let mut next = n;
        while heap.len() > 1 {
            let a = heap.pop().unwrap();
            let b = heap.pop().unwrap();
            parent[a.id] = next;
            parent[b.id] = next;
            heap.push(Node {
                weight: a.weight + b.weight,
                min_symbol: a.min_symbol.min(b.min_symbol),
                id: next,
            });
            next += 1;
        }
        (0..n)
            .map(|s| {
                let mut depth = 0;
                let mut v = s;
                while parent[v] != usize::MAX {
                    v = parent[v];
                    depth += 1;
                }
                depth
            })
            .collect()
    };
    PrefixCode::from_lengths(&lengths, p)
}

impl PrefixCode {
    /// Canonical code with the given codeword lengths; fails if they violate
    /// Kraft's inequality.
    pub fn from_lengths(lengths: &[u32], p: &[f64]) -> Result<Self> {
        if lengths.iter().any(|&l| l == 0 || l > 63) {
            return Err(Error::BadShape("codeword lengths must lie in 1..=63"));
        }
        let kraft: f64 = lengths.iter().map(|&l| libm::ldexp(1.0, -(l as i32))).sum();
        if kraft > 1.0 + 1e-12 {
            return Err(Error::BadShape("lengths violate Kraft's inequality"));
        }
        let mut order: Vec<usize> = (0..lengths.len()).collect();
        order.sort_by_key(|&s| (lengths[s], s));
        let mut codewords = vec![Bits::new(); lengths.len()];
        let mut code: u64 = 0;
        let mut prev_len = lengths[order[0]];
        for (k, &s) in order.iter().enumerate() {
            let len = lengths[s];
            if k > 0 {
                code = (code + 1) << (len - prev_len);
            }
            prev_len = len;
            codewords[s].push_fixed(code as usize, len);
        }
        let mut out = PrefixCode {
            codewords,
            expected_length: 0.0,
        };
        out.expected_length = out.expected_length_under(p);
        Ok(out)
    }

    /// A code from explicit codewords; fails unless they are prefix-free.
    pub fn from_codewords(codewords: Vec<Bits>, p: &[f64]) -> Result<Self> {
        if codewords.is_empty() || codewords.iter().any(|c| c.is_empty()) {
            return Err(Error::BadShape("codewords must be nonempty"));
        }
        for (i, a) in codewords.iter().enumerate() {
            for (j, b) in codewords.iter().enumerate() {
                if i != j && b.as_slice().starts_with(a.as_slice()) {
                    return Err(Error::BadShape("codewords are not prefix-free"));
                }
            }
        }
        let mut out = PrefixCode {
            codewords,
            expected_length: 0.0,
        };
        out.expected_length = out.expected_length_under(p);
        Ok(out)
    }

    pub fn len(&self) -> usize {
        self.codewords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codewords.is_empty()
    }

    pub fn codeword(&self, symbol: usize) -> &Bits {
        &self.codewords[symbol]
    }

    pub fn codewords(&self) -> &[Bits] {
        &self.codewords
    }

    pub fn lengths(&self) -> Vec<usize> {
        self.codewords.iter().map(Bits::len).collect()
    }

    pub fn expected_length(&self) -> f64 {
        self.expected_length
    }

    pub fn expected_length_under(&self, p: &[f64]) -> f64 {
        p.iter()
            .zip(&self.codewords)
            .map(|(w, c)| w * c.len() as f64)
            .sum()
    }

    pub fn kraft_sum(&self) -> f64 {
        self.codewords
            .iter()
            .map(|c| libm::ldexp(1.0, -(c.len() as i32)))
            .sum()
    }

    /// Decodes one codeword starting at `pos`; returns the symbol and the
    /// position after it.
    pub fn decode_at(&self, bits: &Bits, pos: usize) -> Option<(usize, usize)> {
        let rest = bits.as_slice().get(pos..)?;
        self.codewords
            .iter()
            .position(|c| rest.starts_with(c.as_slice()))
            .map(|s| (s, pos + self.codewords[s].len()))
    }
}
