//! Constant-energy spherical codes built from Cartesian powers of PAM
//! constellations.
//!
//! The crate covers the whole chain used to evaluate such codes as inner
//! modulations for probabilistic amplitude shaping:
//!
//! * [`constellation`]: 2p-PAM alphabets and the sign/Gray bit labeling.
//! * [`permcode`]: Variant I/II permutation codes, lexicographic ranking and
//!   the affine index spreading used for expurgated codes.
//! * [`shellcode`]: complete and maximal k-class partial shell codes.
//! * [`assignment`]: sorting-based assignment solvers and a k-best
//!   (Murty-style) list decoder specialised to monotone weights.
//! * [`demap`]: orbit likelihoods and the exact, symbol-by-symbol and
//!   frozen-symbol orbit soft demappers.
//! * [`trellis`]: the energy trellis of complete shells and log-domain BCJR.
//! * [`fec`]: alist parity-check matrices, systematic encoding and
//!   sum-product decoding.
//! * [`presets`]: named codes used by the examples and tests.
//! * [`cli`]: the `spherecode` command-line front end.
//! * [`sim`]: AWGN channel and Monte-Carlo estimators (MI, BMD rate, PAS
//!   block error rate).

pub mod assignment;
pub mod cli;
pub mod constellation;
pub mod demap;
mod error;
pub mod fec;
pub mod numeric;
pub mod permcode;
pub mod presets;
pub mod shellcode;
pub mod sim;
pub mod trellis;

pub use error::{Error, Result};
