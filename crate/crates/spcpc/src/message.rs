//! Message types shared by the decoders.
//!
//! Soft messages are log-likelihood ratios in natural-log units. The sign
//! convention follows the usual one: positive favours bit 0, negative
//! favours bit 1, `+inf`/`-inf` encode certainty and an exact 0 encodes an
//! erasure. Hard messages are ternary: `0`, `1`, or an erasure.

use std::fmt;

/// Finite LLR magnitudes are clamped to this value before entering `tanh`,
/// so that certainty is reserved for genuine `+inf`/`-inf` inputs.
pub const LLR_CLAMP: f64 = 40.0;

/// A soft message: an extended-real log-likelihood ratio.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SoftMessage(f64);

impl SoftMessage {
    /// The erasure message (LLR 0: both bit values equally likely).
    pub const ERASURE: SoftMessage = SoftMessage(0.0);

    /// Wrap a raw LLR value. `NaN` is rejected.
    pub fn new(llr: f64) -> SoftMessage {
        assert!(!llr.is_nan(), "LLR must not be NaN");
        SoftMessage(llr)
    }

    /// The infinite LLR expressing certainty of `bit`.
    pub fn certain(bit: u8) -> SoftMessage {
        match bit {
            0 => SoftMessage(f64::INFINITY),
            1 => SoftMessage(f64::NEG_INFINITY),
            b => panic!("bit must be 0 or 1, got {b}"),
        }
    }

    /// Lossless embedding of a ternary message: `0 -> +inf`, `1 -> -inf`,
    /// erasure `-> 0`.
    pub fn from_hard(h: HardMessage) -> SoftMessage {
        match h {
            HardMessage::Zero => SoftMessage(f64::INFINITY),
            HardMessage::One => SoftMessage(f64::NEG_INFINITY),
            HardMessage::Erased => SoftMessage(0.0),
        }
    }

    /// The raw LLR value.
    pub fn llr(self) -> f64 {
        self.0
    }

    /// True iff the message carries no information (LLR exactly 0).
    pub fn is_erasure(self) -> bool {
        self.0 == 0.0
    }

    /// Hard decision on this message under the given rule.
    ///
    /// With [`DecisionRule::TiesToZero`] (generic binary-input channels) a
    /// non-negative LLR decodes to 0. With [`DecisionRule::ErasureOnTie`]
    /// (erasure channels) an LLR of exactly 0 stays undecided.
    pub fn decide(self, rule: DecisionRule) -> HardMessage {
        match rule {
            DecisionRule::TiesToZero => {
                if self.0 >= 0.0 {
                    HardMessage::Zero
                } else {
                    HardMessage::One
                }
            }
            DecisionRule::ErasureOnTie => {
                if self.0 > 0.0 {
                    HardMessage::Zero
                } else if self.0 < 0.0 {
                    HardMessage::One
                } else {
                    HardMessage::Erased
                }
            }
        }
    }
}

/// Add two LLRs, treating opposite certainties as cancelling to an erasure
/// rather than producing NaN. Opposing infinities cannot arise on an
/// erasure channel; the rule only matters for hand-crafted inputs.
pub(crate) fn add_llr(a: f64, b: f64) -> f64 {
    if a.is_infinite() && b.is_infinite() && a.signum() != b.signum() {
        0.0
    } else {
        a + b
    }
}

/// `2 * atanh(prod tanh(llr/2))` over the given messages: the extrinsic
/// LLR a single parity check contributes about one of its bits.
///
/// Infinite inputs map to `tanh = +-1` symbolically; finite inputs are
/// clamped to [`LLR_CLAMP`] first. A product that reaches exactly `+-1`
/// (all inputs certain, or finite ones large enough to round there) yields
/// an infinite extrinsic; any erased input zeroes it.
pub(crate) fn extrinsic_llr(llrs: impl Iterator<Item = SoftMessage>) -> f64 {
    let mut prod = 1.0f64;
    for m in llrs {
        let l = m.llr();
        let t = if l.is_infinite() {
            l.signum()
        } else {
            (l.clamp(-LLR_CLAMP, LLR_CLAMP) / 2.0).tanh()
        };
        prod *= t;
        if prod == 0.0 {
            return 0.0;
        }
    }
    2.0 * prod.atanh()
}

/// A hard message: a decided bit or an erasure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum HardMessage {
    Zero,
    One,
    Erased,
}

impl HardMessage {
    /// Wrap a bit value (0 or 1).
    pub fn from_bit(bit: u8) -> HardMessage {
        match bit {
            0 => HardMessage::Zero,
            1 => HardMessage::One,
            b => panic!("bit must be 0 or 1, got {b}"),
        }
    }

    /// The bit value, or `None` for an erasure.
    pub fn bit(self) -> Option<u8> {
        match self {
            HardMessage::Zero => Some(0),
            HardMessage::One => Some(1),
            HardMessage::Erased => None,
        }
    }

    /// True iff this message is an erasure.
    pub fn is_erased(self) -> bool {
        self == HardMessage::Erased
    }

    /// GF(2) addition with erasure absorption: any erased operand erases
    /// the sum.
    pub fn xor(self, other: HardMessage) -> HardMessage {
        match (self.bit(), other.bit()) {
            (Some(a), Some(b)) => HardMessage::from_bit(a ^ b),
            _ => HardMessage::Erased,
        }
    }
}

impl fmt::Display for HardMessage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = match self {
            HardMessage::Zero => '0',
            HardMessage::One => '1',
            HardMessage::Erased => 'e',
        };
        write!(f, "{c}")
    }
}

impl TryFrom<char> for HardMessage {
    type Error = crate::Error;

    fn try_from(c: char) -> crate::Result<HardMessage> {
        match c {
            '0' => Ok(HardMessage::Zero),
            '1' => Ok(HardMessage::One),
            'e' | 'E' | '?' => Ok(HardMessage::Erased),
            _ => Err(crate::Error::InvalidParameter(format!(
                "ternary symbols are 0, 1, e; got {c:?}"
            ))),
        }
    }
}

/// Tie handling for the final hard decision, selected by channel type.
/// The two rules are never mixed within one decode.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecisionRule {
    /// Generic binary-input channel: an LLR of 0 decodes to 0.
    TiesToZero,
    /// Erasure channel: an LLR of 0 stays an erasure.
    ErasureOnTie,
}
