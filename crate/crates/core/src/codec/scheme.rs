use alloc::vec::Vec;

use rand_core::RngCore;

use super::bits::{field_width, Bits};
use super::huffman::{build_huffman, PrefixCode};
use crate::dist::JointDistribution;
use crate::linalg::Matrix;
use crate::mechanism::Mechanism;
use crate::{Error, Result};

/// A code driven by a shared key `w in 0..key_size()`.
pub trait KeyedCode {
    fn key_size(&self) -> usize;

    /// Every message the encoder can emit for private `x`, useful `y` and key
    /// `w`, with its probability given `(x, y)`.
    fn messages(&self, x: usize, y: usize, w: usize) -> Result<Vec<(f64, Bits)>>;

    fn decode(&self, bits: &Bits, w: usize) -> Result<usize>;
}

/// One-time-padded private symbol followed by a prefix codeword for `U`.
#[derive(Clone, Debug, PartialEq)]
pub struct TwoPartCode {
    x_size: usize,
    y_size: usize,
    x_field_bits: u32,
    /// `None` when `|U| = 1`: the second field is declared zero-width.
    u_code: Option<PrefixCode>,
    mech: Mechanism,
    /// `|U| x |Y|`.
    u_given_y: Matrix,
    /// `|X| x |Y|`.
    x_given_y: Matrix,
}

/// `Y + W mod |Y|` in a fixed-width field.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DirectPadCode {
    y_size: usize,
    field_bits: u32,
}

#[derive(Clone, Debug, PartialEq)]
pub enum PrivateCode {
    TwoPart(TwoPartCode),
    DirectPad(DirectPadCode),
}

/// Builds the two-part code for a mechanism that carries a decode table.
pub fn build_two_part(d: &JointDistribution, mech: &Mechanism) -> Result<PrivateCode> {
    Ok(PrivateCode::TwoPart(TwoPartCode::new(d, mech)?))
}

/// Builds the direct pad; refuses `|Y| > |X|`.
pub fn build_direct_pad(d: &JointDistribution) -> Result<PrivateCode> {
    if d.y_size() > d.x_size() {
        return Err(Error::WrongRegime {
            x_size: d.x_size(),
            y_size: d.y_size(),
        });
    }
    Ok(PrivateCode::DirectPad(DirectPadCode {
        y_size: d.y_size(),
        field_bits: field_width(d.y_size()),
    }))
}

impl TwoPartCode {
    pub fn new(d: &JointDistribution, mech: &Mechanism) -> Result<Self> {
        let u_code = if mech.u_size() == 1 {
            None
        } else {
            Some(build_huffman(mech.p_u())?)
        };
        Self::with_prefix_code(d, mech, u_code)
    }

    /// Uses a caller-supplied prefix code for `U` (e.g. one read back from
    /// disk); `None` is only allowed when `|U| = 1`.
    pub fn with_prefix_code(
        d: &JointDistribution,
        mech: &Mechanism,
        u_code: Option<PrefixCode>,
    ) -> Result<Self> {
        let table = mech.decode_table().ok_or(Error::IncompleteMechanism)?;
        if table.x_size() != d.x_size() || mech.y_size() != d.y_size() {
            return Err(Error::BadShape("mechanism does not match the distribution"));
        }
        match &u_code {
            Some(c) if c.len() != mech.u_size() => {
                return Err(Error::BadShape("prefix code size differs from |U|"))
            }
            None if mech.u_size() != 1 => {
                return Err(Error::BadShape("zero-width field needs |U| = 1"))
            }
            _ => {}
        }
        Ok(TwoPartCode {
            x_size: d.x_size(),
            y_size: d.y_size(),
            x_field_bits: field_width(d.x_size()),
            u_code,
            mech: mech.clone(),
            u_given_y: mech.p_u_given_y(d),
            x_given_y: d.kernel_x_given_y().matrix().clone(),
        })
    }

    pub fn x_field_bits(&self) -> u32 {
        self.x_field_bits
    }

    pub fn u_code(&self) -> Option<&PrefixCode> {
        self.u_code.as_ref()
    }

    pub fn mechanism(&self) -> &Mechanism {
        &self.mech
    }

    fn message(&self, x: usize, u: usize, w: usize) -> Bits {
        let mut bits = Bits::new();
        bits.push_fixed((x + w) % self.x_size, self.x_field_bits);
        if let Some(code) = &self.u_code {
            bits.extend(code.codeword(u));
        }
        bits
    }

    fn check(&self, x: usize, y: usize, w: usize) -> Result<()> {
        if y >= self.y_size {
            return Err(Error::InvalidSymbol {
                what: "y",
                value: y,
            });
        }
        if x >= self.x_size || self.x_given_y[(x, y)] <= 0.0 {
            return Err(Error::InvalidSymbol {
                what: "x",
                value: x,
            });
        }
        if w >= self.x_size {
            return Err(Error::InvalidSymbol {
                what: "key",
                value: w,
            });
        }
        Ok(())
    }
}

impl KeyedCode for TwoPartCode {
    fn key_size(&self) -> usize {
        self.x_size
    }

    fn messages(&self, x: usize, y: usize, w: usize) -> Result<Vec<(f64, Bits)>> {
        self.check(x, y, w)?;
        Ok((0..self.mech.u_size())
            .filter(|&u| self.u_given_y[(u, y)] > 0.0)
            .map(|u| (self.u_given_y[(u, y)], self.message(x, u, w)))
            .collect())
    }

    fn decode(&self, bits: &Bits, w: usize) -> Result<usize> {
        if w >= self.x_size {
            return Err(Error::InvalidSymbol {
                what: "key",
                value: w,
            });
        }
        let padded = bits
            .read_fixed(0, self.x_field_bits)
            .ok_or(Error::MalformedBits)?;
        if padded >= self.x_size {
            return Err(Error::MalformedBits);
        }
        let x = (padded + self.x_size - w) % self.x_size;
        let start = self.x_field_bits as usize;
        let (u, end) = match &self.u_code {
            Some(code) => code.decode_at(bits, start).ok_or(Error::MalformedBits)?,
            None => (0, start),
        };
        if end != bits.len() {
            return Err(Error::MalformedBits);
        }
        let table = self.mech.decode_table().ok_or(Error::IncompleteMechanism)?;
        table.get(x, u).ok_or(Error::MalformedBits)
    }
}

impl DirectPadCode {
    pub fn field_bits(&self) -> u32 {
        self.field_bits
    }
}

impl KeyedCode for DirectPadCode {
    fn key_size(&self) -> usize {
        self.y_size
    }

    fn messages(&self, _x: usize, y: usize, w: usize) -> Result<Vec<(f64, Bits)>> {
        if y >= self.y_size {
            return Err(Error::InvalidSymbol {
                what: "y",
                value: y,
            });
        }
        if w >= self.y_size {
            return Err(Error::InvalidSymbol {
                what: "key",
                value: w,
            });
        }
        let mut bits = Bits::new();
        bits.push_fixed((y + w) % self.y_size, self.field_bits);
        Ok(alloc::vec![(1.0, bits)])
    }

    fn decode(&self, bits: &Bits, w: usize) -> Result<usize> {
        if w >= self.y_size {
            return Err(Error::InvalidSymbol {
                what: "key",
                value: w,
            });
        }
        if bits.len() != self.field_bits as usize {
            return Err(Error::MalformedBits);
        }
        let padded = bits
            .read_fixed(0, self.field_bits)
            .ok_or(Error::MalformedBits)?;
        if padded >= self.y_size {
            return Err(Error::MalformedBits);
        }
        Ok((padded + self.y_size - w) % self.y_size)
    }
}

impl PrivateCode {
    /// `M`: `|X|` for the two-part code, `|Y|` for the direct pad.
    pub fn key_size(&self) -> usize {
        match self {
            PrivateCode::TwoPart(c) => c.key_size(),
            PrivateCode::DirectPad(c) => c.key_size(),
        }
    }

    /// Modulus of the one-time pad (equal to the key size).
    pub fn pad_modulus(&self) -> usize {
        self.key_size()
    }

    pub fn scheme_name(&self) -> &'static str {
        match self {
            PrivateCode::TwoPart(_) => "two_part",
            PrivateCode::DirectPad(_) => "direct_pad",
        }
    }

    /// Encodes `y` when the encoder only observes `Y`. The two-part code
    /// draws `x` from `P(X|Y = y)` before padding it.
    pub fn encode<R: RngCore + ?Sized>(&self, y: usize, w: usize, rng: &mut R) -> Result<Bits> {
        match self {
            PrivateCode::TwoPart(c) => {
                if y >= c.y_size {
                    return Err(Error::InvalidSymbol {
                        what: "y",
                        value: y,
                    });
                }
                let x = sample(rng, (0..c.x_size).map(|x| c.x_given_y[(x, y)]));
                self.encode_with_private(x, y, w, rng)
            }
            PrivateCode::DirectPad(c) => Ok(c.messages(0, y, w)?.remove(0).1),
        }
    }

    /// Encodes `y` when the encoder also observes the private symbol `x`.
    pub fn encode_with_private<R: RngCore + ?Sized>(
        &self,
        x: usize,
        y: usize,
        w: usize,
        rng: &mut R,
    ) -> Result<Bits> {
        match self {
            PrivateCode::TwoPart(c) => {
                c.check(x, y, w)?;
                let u = sample(rng, (0..c.mech.u_size()).map(|u| c.u_given_y[(u, y)]));
                Ok(c.message(x, u, w))
            }
            PrivateCode::DirectPad(c) => Ok(c.messages(x, y, w)?.remove(0).1),
        }
    }

    pub fn decode(&self, bits: &Bits, w: usize) -> Result<usize> {
        KeyedCode::decode(self, bits, w)
    }
}

impl KeyedCode for PrivateCode {
    fn key_size(&self) -> usize {
        PrivateCode::key_size(self)
    }

    fn messages(&self, x: usize, y: usize, w: usize) -> Result<Vec<(f64, Bits)>> {
        match self {
            PrivateCode::TwoPart(c) => c.messages(x, y, w),
            PrivateCode::DirectPad(c) => c.messages(x, y, w),
        }
    }

    fn decode(&self, bits: &Bits, w: usize) -> Result<usize> {
        match self {
            PrivateCode::TwoPart(c) => c.decode(bits, w),
            PrivateCode::DirectPad(c) => c.decode(bits, w),
        }
    }
}

/// Huffman code of `Y` with no key: lossless but not private.
#[derive(Clone, Debug, PartialEq)]
pub struct UnpaddedHuffman {
    code: PrefixCode,
}

impl UnpaddedHuffman {
    pub fn new(d: &JointDistribution) -> Result<Self> {
        Ok(UnpaddedHuffman {
            code: build_huffman(&d.marginal_y())?,
        })
    }
}

impl KeyedCode for UnpaddedHuffman {
    fn key_size(&self) -> usize {
        1
    }

    fn messages(&self, _x: usize, y: usize, _w: usize) -> Result<Vec<(f64, Bits)>> {
        if y >= self.code.len() {
            return Err(Error::InvalidSymbol {
                what: "y",
                value: y,
            });
        }
        Ok(alloc::vec![(1.0, self.code.codeword(y).clone())])
    }

    fn decode(&self, bits: &Bits, _w: usize) -> Result<usize> {
        match self.code.decode_at(bits, 0) {
            Some((s, end)) if end == bits.len() => Ok(s),
            _ => Err(Error::MalformedBits),
        }
    }
}

/// Inverse-CDF draw from nonnegative weights summing to (about) one.
fn sample<R: RngCore + ?Sized>(rng: &mut R, weights: impl Iterator<Item = f64>) -> usize {
    let r = (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
    let mut acc = 0.0;
    let mut last_positive = 0;
    for (i, w) in weights.enumerate() {
        if w > 0.0 {
            last_positive = i;
            acc += w;
            if r < acc {
                return i;
            }
        }
    }
    last_positive
}
