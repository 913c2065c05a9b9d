//! Executable private codes and their exact audit.
//!
//! Two schemes are provided. [`TwoPartCode`] sends the private symbol under a
//! one-time pad, `X + W mod |X|`, in a fixed-width field, followed by a
//! prefix codeword for the output of a zero-leakage mechanism `U`; the
//! receiver removes the pad and looks `y` up from `(x, u)`. [`DirectPadCode`]
//! pads `Y` itself, `Y + W mod |Y|`, and is offered when `|Y| <= |X|`.

mod audit;
mod bits;
mod huffman;
mod scheme;

pub use audit::{audit, pad_audit, LeakageAudit, PadAudit};
pub use bits::{field_width, Bits};
pub use huffman::{build_huffman, PrefixCode};
pub use scheme::{
    build_direct_pad, build_two_part, DirectPadCode, KeyedCode, PrivateCode, TwoPartCode,
    UnpaddedHuffman,
};
