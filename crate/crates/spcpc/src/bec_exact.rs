//! Exact ground truth on the binary erasure channel.
//!
//! Maximum-likelihood erasure decoding by GF(2) elimination, plus
//! exhaustive enumeration of all `2^n` erasure patterns to compute exact
//! block and per-bit error probabilities for the SC, Elias, and ML
//! decoders. Failure counts are binned by pattern weight, so one
//! enumeration sweep prices an entire grid of channel erasure
//! probabilities.
//!
//! Enumeration is partitioned across threads by pattern index; per-weight
//! counters merge by summation, so the result does not depend on the
//! partitioning.

use rayon::prelude::*;

use crate::code_structure::{generator_matrix, ProductCodeSpec};
use crate::elias_decoder::elias_decode_erasure;
use crate::gf2::{self, BinMatrix, Gf2Solution};
use crate::message::HardMessage;
use crate::sc_decoder::ScDecoder;
use crate::{DecoderKind, Error, Result};

/// Default cap on exhaustive enumeration: at most `2^16` patterns.
pub const ENUMERATION_N_LIMIT: usize = 16;

/// Hard ceiling even with the cap overridden.
const ENUMERATION_N_CEILING: usize = 32;

/// A set of erased codeword positions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ErasurePattern {
    erased: Vec<bool>,
}

impl ErasurePattern {
    /// Pattern from an explicit flag per position.
    pub fn new(erased: Vec<bool>) -> ErasurePattern {
        ErasurePattern { erased }
    }

    /// Pattern of length `n` from the low `n` bits of `mask` (bit `i`
    /// erases position `i`). Panics if `n > 64`.
    pub fn from_mask(mask: u64, n: usize) -> ErasurePattern {
        assert!(n <= 64, "mask patterns support at most 64 positions");
        ErasurePattern { erased: (0..n).map(|i| (mask >> i) & 1 == 1).collect() }
    }

    /// Pattern of length `n` erasing exactly the given positions.
    /// Panics on an out-of-range position.
    pub fn from_positions(positions: &[usize], n: usize) -> ErasurePattern {
        let mut erased = vec![false; n];
        for &p in positions {
            assert!(p < n, "position {p} out of range for length {n}");
            erased[p] = true;
        }
        ErasurePattern { erased }
    }

    /// The empty pattern (nothing erased).
    pub fn none(n: usize) -> ErasurePattern {
        ErasurePattern { erased: vec![false; n] }
    }

    /// The full pattern (everything erased).
    pub fn all(n: usize) -> ErasurePattern {
        ErasurePattern { erased: vec![true; n] }
    }

    pub fn len(&self) -> usize {
        self.erased.len()
    }

    pub fn is_empty(&self) -> bool {
        self.erased.is_empty()
    }

    /// Number of erased positions.
    pub fn weight(&self) -> usize {
        self.erased.iter().filter(|&&e| e).count()
    }

    pub fn is_erased(&self, position: usize) -> bool {
        self.erased[position]
    }

    /// Observe `codeword` through this pattern.
    pub fn apply(&self, codeword: &[u8]) -> Vec<HardMessage> {
        assert_eq!(codeword.len(), self.erased.len(), "length mismatch");
        codeword
            .iter()
            .zip(&self.erased)
            .map(|(&b, &e)| if e { HardMessage::Erased } else { HardMessage::from_bit(b) })
            .collect()
    }
}

/// Outcome of maximum-likelihood erasure decoding.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MlOutcome {
    /// The unerased positions pin the message uniquely.
    Unique(Vec<u8>),
    /// More than one codeword matches; counted as a block error.
    Ambiguous,
}

/// ML erasure decoder with the generator matrix cached.
#[derive(Debug, Clone)]
pub struct MlDecoder {
    spec: ProductCodeSpec,
    generator: BinMatrix,
}

impl MlDecoder {
    pub fn new(spec: &ProductCodeSpec) -> MlDecoder {
        MlDecoder { spec: spec.clone(), generator: generator_matrix(spec) }
    }

    /// Solve for the message from the bits surviving `pattern`,
    /// `unerased_bits` listing them in position order.
    ///
    /// Returns [`MlOutcome::Unique`] iff the generator matrix restricted
    /// to the unerased columns has full rank. Inconsistent received bits
    /// (impossible on a real erasure channel) are a distinct error.
    pub fn decode(&self, pattern: &ErasurePattern, unerased_bits: &[u8]) -> Result<MlOutcome> {
        let n = self.spec.block_length();
        let k = self.spec.dimension();
        if pattern.len() != n {
            return Err(Error::LengthMismatch { expected: n, got: pattern.len() });
        }
        let expected_bits = n - pattern.weight();
        if unerased_bits.len() != expected_bits {
            return Err(Error::LengthMismatch {
                expected: expected_bits,
                got: unerased_bits.len(),
            });
        }

        let unerased: Vec<usize> = (0..n).filter(|&p| !pattern.is_erased(p)).collect();
        let augmented = BinMatrix::from_fn(unerased.len(), k + 1, |r, c| {
            if c < k {
                self.generator.get(c, unerased[r])
            } else {
                unerased_bits[r] & 1 == 1
            }
        });
        match gf2::solve_augmented(augmented, k) {
            Gf2Solution::Unique(message) => Ok(MlOutcome::Unique(message)),
            Gf2Solution::Underdetermined { .. } => Ok(MlOutcome::Ambiguous),
            Gf2Solution::Inconsistent => Err(Error::InconsistentReceived),
        }
    }

    /// As [`decode`](Self::decode), taking a ternary received word.
    pub fn decode_received(&self, received: &[HardMessage]) -> Result<MlOutcome> {
        let erased: Vec<bool> = received.iter().map(|h| h.is_erased()).collect();
        let bits: Vec<u8> = received.iter().filter_map(|h| h.bit()).collect();
        self.decode(&ErasurePattern::new(erased), &bits)
    }

    /// True iff message bit `bit` takes the same value in every codeword
    /// consistent with the unerased positions: the unit functional lies
    /// in the row space of the restricted system.
    pub fn bit_determined(&self, pattern: &ErasurePattern, bit: usize) -> bool {
        let n = self.spec.block_length();
        let k = self.spec.dimension();
        let unerased: Vec<usize> = (0..n).filter(|&p| !pattern.is_erased(p)).collect();
        let a = BinMatrix::from_fn(unerased.len(), k, |r, c| self.generator.get(c, unerased[r]));
        let with_unit = BinMatrix::from_fn(unerased.len() + 1, k, |r, c| {
            if r < unerased.len() {
                self.generator.get(c, unerased[r])
            } else {
                c == bit
            }
        });
        a.rank() == with_unit.rank()
    }
}

/// One-shot ML erasure decode (builds the generator matrix; use
/// [`MlDecoder`] for repeated decoding).
pub fn ml_erasure_decode(
    spec: &ProductCodeSpec,
    pattern: &ErasurePattern,
    unerased_bits: &[u8],
) -> Result<MlOutcome> {
    MlDecoder::new(spec).decode(pattern, unerased_bits)
}

/// Failure counts of a decoder, binned by erasure-pattern weight.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FailureSpectrum {
    block_length: usize,
    failing: Vec<u64>,
}

impl FailureSpectrum {
    pub fn block_length(&self) -> usize {
        self.block_length
    }

    /// Number of failing patterns per weight (`failing()[w]` out of the
    /// `C(n, w)` patterns of weight `w`).
    pub fn failing(&self) -> &[u64] {
        &self.failing
    }

    /// Exact block error probability at channel erasure probability
    /// `epsilon`.
    pub fn block_error_probability(&self, epsilon: f64) -> f64 {
        assert!((0.0..=1.0).contains(&epsilon), "epsilon must be in [0, 1]");
        let n = self.block_length as i32;
        self.failing
            .iter()
            .enumerate()
            .map(|(w, &count)| {
                count as f64 * epsilon.powi(w as i32) * (1.0 - epsilon).powi(n - w as i32)
            })
            .sum()
    }
}

/// Exact block error probabilities of one decoder over a grid of channel
/// erasure probabilities.
#[derive(Debug, Clone)]
pub struct ExactCurve {
    pub decoder: DecoderKind,
    pub epsilon: Vec<f64>,
    pub probability: Vec<f64>,
}

fn check_enumeration_limit(n: usize, force: bool) -> Result<()> {
    if n > ENUMERATION_N_CEILING {
        return Err(Error::InvalidParameter(format!(
            "exhaustive enumeration beyond n = {ENUMERATION_N_CEILING} is not supported"
        )));
    }
    if n > ENUMERATION_N_LIMIT && !force {
        return Err(Error::EnumerationCap { n, limit: ENUMERATION_N_LIMIT });
    }
    Ok(())
}

/// Run `fails` on every pattern of length `n` and bin failures by weight.
/// Patterns are split across threads; counters merge by summation.
fn count_failures_by_weight<S: Send>(
    n: usize,
    make_state: impl Fn() -> S + Sync,
    fails: impl Fn(&mut S, u64) -> bool + Sync,
) -> Vec<u64> {
    (0u64..1 << n)
        .into_par_iter()
        .fold(
            || (vec![0u64; n + 1], None::<S>),
            |(mut counts, mut state), mask| {
                let s = state.get_or_insert_with(&make_state);
                if fails(s, mask) {
                    counts[mask.count_ones() as usize] += 1;
                }
                (counts, state)
            },
        )
        .map(|(counts, _)| counts)
        .reduce(
            || vec![0u64; n + 1],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
                a
            },
        )
}

/// Per-weight failure counts of `decoder` on this code, enumerating every
/// erasure pattern applied to `codeword`. A block fails when any decoded
/// bit differs from the encoded message (erasures included).
pub fn failure_spectrum_for_codeword(
    spec: &ProductCodeSpec,
    decoder: DecoderKind,
    codeword: &[u8],
    force: bool,
) -> Result<FailureSpectrum> {
    let n = spec.block_length();
    check_enumeration_limit(n, force)?;
    if codeword.len() != n {
        return Err(Error::LengthMismatch { expected: n, got: codeword.len() });
    }
    let message: Vec<HardMessage> = (0..spec.dimension())
        .map(|t| HardMessage::from_bit(codeword[spec.message_cell(t)]))
        .collect();

    let failing = match decoder {
        DecoderKind::Sc => count_failures_by_weight(
            n,
            || ScDecoder::new(spec),
            |dec, mask| {
                let received = ErasurePattern::from_mask(mask, n).apply(codeword);
                dec.decode_erasure(&received).unwrap() != message
            },
        ),
        DecoderKind::Elias => count_failures_by_weight(
            n,
            || (),
            |_, mask| {
                let received = ErasurePattern::from_mask(mask, n).apply(codeword);
                elias_decode_erasure(spec, &received).unwrap() != message
            },
        ),
        DecoderKind::Ml => {
            let message_bits: Vec<u8> = message.iter().map(|h| h.bit().unwrap()).collect();
            count_failures_by_weight(
                n,
                || MlDecoder::new(spec),
                move |dec, mask| {
                    let received = ErasurePattern::from_mask(mask, n).apply(codeword);
                    match dec.decode_received(&received).unwrap() {
                        MlOutcome::Unique(msg) => msg != message_bits,
                        MlOutcome::Ambiguous => true,
                    }
                },
            )
        }
    };
    Ok(FailureSpectrum { block_length: n, failing })
}

/// [`failure_spectrum_for_codeword`] on the all-zero codeword. On the
/// erasure channel the outcome is codeword-independent.
pub fn failure_spectrum(
    spec: &ProductCodeSpec,
    decoder: DecoderKind,
    force: bool,
) -> Result<FailureSpectrum> {
    failure_spectrum_for_codeword(spec, decoder, &vec![0u8; spec.block_length()], force)
}

/// Exact block error probability curve of `decoder` over `epsilon_grid`,
/// from a single enumeration sweep.
pub fn exact_block_error(
    spec: &ProductCodeSpec,
    decoder: DecoderKind,
    epsilon_grid: &[f64],
    force: bool,
) -> Result<ExactCurve> {
    if let Some(&bad) = epsilon_grid.iter().find(|e| !(0.0..=1.0).contains(*e)) {
        return Err(Error::InvalidParameter(format!(
            "epsilon values must be in [0, 1], got {bad}"
        )));
    }
    let spectrum = failure_spectrum(spec, decoder, force)?;
    Ok(ExactCurve {
        decoder,
        epsilon: epsilon_grid.to_vec(),
        probability: epsilon_grid.iter().map(|&e| spectrum.block_error_probability(e)).collect(),
    })
}

/// Exact probability that message bit `bit` is erased (or wrong) at
/// channel erasure probability `epsilon`.
///
/// With `genie` set (SC only), feedback for earlier bits is forced
/// correct, yielding the conditional per-bit erasure probability of the
/// density evolution recursion.
pub fn per_bit_exact_erasure(
    spec: &ProductCodeSpec,
    decoder: DecoderKind,
    epsilon: f64,
    bit: usize,
    genie: bool,
) -> Result<f64> {
    let n = spec.block_length();
    let k = spec.dimension();
    check_enumeration_limit(n, false)?;
    if !(0.0..=1.0).contains(&epsilon) {
        return Err(Error::InvalidParameter(format!(
            "epsilon must be in [0, 1], got {epsilon}"
        )));
    }
    if bit >= k {
        return Err(Error::InvalidParameter(format!(
            "bit index {bit} out of range for k = {k}"
        )));
    }
    if genie && decoder != DecoderKind::Sc {
        return Err(Error::InvalidParameter(
            "genie-aided evaluation applies to the SC decoder only".into(),
        ));
    }

    let zero_cw = vec![0u8; n];
    let zero_msg = vec![0u8; k];
    let failing = match decoder {
        DecoderKind::Sc => count_failures_by_weight(
            n,
            || ScDecoder::new(spec),
            |dec, mask| {
                let received = ErasurePattern::from_mask(mask, n).apply(&zero_cw);
                let out = if genie {
                    dec.decode_erasure_genie(&received, &zero_msg).unwrap()
                } else {
                    dec.decode_erasure(&received).unwrap()
                };
                out[bit] != HardMessage::Zero
            },
        ),
        DecoderKind::Elias => count_failures_by_weight(
            n,
            || (),
            |_, mask| {
                let received = ErasurePattern::from_mask(mask, n).apply(&zero_cw);
                elias_decode_erasure(spec, &received).unwrap()[bit] != HardMessage::Zero
            },
        ),
        DecoderKind::Ml => count_failures_by_weight(
            n,
            || MlDecoder::new(spec),
            |dec, mask| !dec.bit_determined(&ErasurePattern::from_mask(mask, n), bit),
        ),
    };
    let spectrum = FailureSpectrum { block_length: n, failing };
    Ok(spectrum.block_error_probability(epsilon))
}
