//! Single parity-check product codes (SPC-PCs).
//!
//! An SPC-PC iterates `(n_l, n_l - 1)` single parity-check component codes
//! over `m` dimensions: codewords are `n_1 x ... x n_m` binary arrays in
//! which every axis-aligned line has even parity. This crate provides
//!
//! - the code construction itself (parameters, index maps, recursive and
//!   Kronecker-form encoders, brute-force distance properties),
//! - a successive cancellation (SC) decoder operating over the per-bit
//!   decoding tree, in both a real-LLR domain and an exact ternary domain
//!   for the binary erasure channel,
//! - Elias' one-sweep decoder,
//! - exact ground truth on the erasure channel: maximum-likelihood erasure
//!   decoding by GF(2) elimination and exhaustive-pattern block error
//!   probabilities for all three decoders,
//! - a closed-form analysis engine (erasure/mutual-information density
//!   evolution, block error bounds, truncated union bounds),
//! - channel models and a seeded, parallel Monte Carlo harness.
//!
//! The companion `spcpc-cli` crate exposes all of this on the command line
//! with CSV output.
//!
//! # Example
//!
//! ```rust
//! use spcpc::code_structure::{encode, ProductCodeSpec};
//! use spcpc::sc_decoder::sc_decode_erasure;
//! use spcpc::{ErasurePattern, HardMessage};
//!
//! // The (9,4) code built from two (3,2) components.
//! let spec = ProductCodeSpec::new(&[3, 3]).unwrap();
//! let codeword = encode(&spec, &[1, 0, 0, 0]).unwrap();
//! assert_eq!(codeword, vec![1, 0, 1, 0, 0, 0, 1, 0, 1]);
//!
//! // Erase five positions; SC decoding still pins every message bit.
//! let pattern = ErasurePattern::from_positions(&[0, 4, 5, 6, 7], 9);
//! let decoded = sc_decode_erasure(&spec, &pattern, &codeword).unwrap();
//! assert_eq!(decoded, vec![
//!     HardMessage::One,
//!     HardMessage::Zero,
//!     HardMessage::Zero,
//!     HardMessage::Zero,
//! ]);
//! ```

pub mod analysis;
pub mod bec_exact;
pub mod code_structure;
pub mod elias_decoder;
pub mod gf2;
pub mod message;
pub mod sc_decoder;
pub mod sim;

pub use bec_exact::{ErasurePattern, MlOutcome};
pub use code_structure::ProductCodeSpec;
pub use message::{DecisionRule, HardMessage, SoftMessage};

use thiserror::Error;

/// Errors reported by fallible operations in this crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// An input vector had the wrong length.
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    /// The component-length list does not describe a valid product code.
    #[error("invalid code spec: {0}")]
    InvalidSpec(String),
    /// Exhaustive pattern enumeration refused: 2^n patterns is over the cap.
    #[error(
        "exhaustive enumeration of 2^{n} erasure patterns exceeds the n <= {limit} cap; \
         pass force=true (CLI: --force) or use Monte Carlo instead"
    )]
    EnumerationCap { n: usize, limit: usize },
    /// Brute-force codeword enumeration refused: 2^k codewords is over the cap.
    #[error("brute-force distance enumeration is limited to k <= {limit}; this code has k = {k}")]
    DistanceCap { k: usize, limit: usize },
    /// The unerased bits handed to the ML decoder match no codeword. This
    /// cannot happen for output of a real erasure channel; it signals a
    /// caller bug.
    #[error("received bits are inconsistent with every codeword")]
    InconsistentReceived,
    /// A configuration value was rejected before any computation ran.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Decoding algorithm selector shared by the exact-enumeration and Monte
/// Carlo harnesses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DecoderKind {
    /// Successive cancellation decoding.
    Sc,
    /// Elias' one-sweep decoding.
    Elias,
    /// Maximum-likelihood erasure decoding (erasure channel only).
    Ml,
}

impl DecoderKind {
    /// Stable lower-case label used in CSV output and CLI flags.
    pub fn label(self) -> &'static str {
        match self {
            DecoderKind::Sc => "sc",
            DecoderKind::Elias => "elias",
            DecoderKind::Ml => "ml",
        }
    }
}

impl std::fmt::Display for DecoderKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}
