//! Successive cancellation decoding over the multi-level decoding graph.
//!
//! Bits are decided one at a time in message order. For bit `t` the
//! decoder evaluates the tree rooted in `u_t` bottom-up: every level-0
//! local code combines its channel LLRs and the hard feedback from already
//! decided bits into a soft output for the bit's local position; those
//! outputs feed the level-1 local codes of the tree, and so on up to the
//! root, where the decision is made.
//!
//! The hard feedback (`lambda`) entering a level-`l` local code is the
//! partial re-encoding of the decided prefix through all levels above `l`.
//! A feedback bit whose supporting decisions contain an erasure is itself
//! an erasure, in which case the local code falls back to forwarding its
//! own channel-side message unchanged.
//!
//! Two message domains are provided: real LLRs (generic binary-input
//! channels) and exact ternary values (erasure channel). They agree
//! bit-for-bit when the LLR inputs are restricted to `{+inf, 0, -inf}`.

use crate::bec_exact::ErasurePattern;
use crate::code_structure::{for_each_mixed_radix, ProductCodeSpec};
use crate::message::{add_llr, extrinsic_llr, DecisionRule, HardMessage, SoftMessage};
use crate::{Error, Result};

/// Soft output of one local SPC code for the information bit at `pos`
/// (0-based; the parity bit occupies the last slot of `rho`).
///
/// With all feedback bits known, the output is the channel-side message
/// plus the extrinsic parity contribution of the later positions, its sign
/// flipped by the feedback parity. Any erased feedback bit suppresses the
/// extrinsic term entirely.
///
/// Panics if `pos` addresses the parity slot or `lambda` does not hold
/// exactly one message per earlier information position.
pub fn local_spc_output(rho: &[SoftMessage], lambda: &[HardMessage], pos: usize) -> SoftMessage {
    assert!(pos + 1 < rho.len(), "position {pos} is not an information slot");
    assert_eq!(lambda.len(), pos, "need one feedback message per earlier position");

    if lambda.iter().any(|l| l.is_erased()) {
        return rho[pos];
    }
    let extrinsic = extrinsic_llr(rho[pos + 1..].iter().copied());
    let feedback_parity = lambda.iter().fold(0u8, |acc, l| acc ^ l.bit().unwrap());
    let signed = if feedback_parity == 1 { -extrinsic } else { extrinsic };
    SoftMessage::new(add_llr(rho[pos].llr(), signed))
}

/// Ternary-domain twin of [`local_spc_output`] for the erasure channel.
///
/// An unerased channel-side message passes through; an erased one is
/// filled from the parity of the later positions and the feedback, unless
/// any of those is erased too.
pub fn local_spc_output_erasure(
    rho: &[HardMessage],
    lambda: &[HardMessage],
    pos: usize,
) -> HardMessage {
    assert!(pos + 1 < rho.len(), "position {pos} is not an information slot");
    assert_eq!(lambda.len(), pos, "need one feedback message per earlier position");

    if lambda.iter().any(|l| l.is_erased()) {
        return rho[pos];
    }
    if !rho[pos].is_erased() {
        return rho[pos];
    }
    let mut extrinsic = HardMessage::Zero;
    for r in &rho[pos + 1..] {
        extrinsic = extrinsic.xor(*r);
    }
    for l in lambda {
        extrinsic = extrinsic.xor(*l);
    }
    extrinsic
}

/// Message algebra the tree evaluation is generic over.
trait ScMessage: Copy {
    fn local_output(rho: &[Self], lambda: &[HardMessage], pos: usize) -> Self;
    fn as_soft(self) -> SoftMessage;
    fn decide(self, rule: DecisionRule) -> HardMessage;
}

impl ScMessage for SoftMessage {
    fn local_output(rho: &[Self], lambda: &[HardMessage], pos: usize) -> Self {
        local_spc_output(rho, lambda, pos)
    }
    fn as_soft(self) -> SoftMessage {
        self
    }
    fn decide(self, rule: DecisionRule) -> HardMessage {
        SoftMessage::decide(self, rule)
    }
}

impl ScMessage for HardMessage {
    fn local_output(rho: &[Self], lambda: &[HardMessage], pos: usize) -> Self {
        local_spc_output_erasure(rho, lambda, pos)
    }
    fn as_soft(self) -> SoftMessage {
        SoftMessage::from_hard(self)
    }
    fn decide(self, _rule: DecisionRule) -> HardMessage {
        self
    }
}

/// Result of an LLR-domain decode.
#[derive(Debug, Clone)]
pub struct ScOutput {
    /// Decided message bits in message order.
    pub message: Vec<HardMessage>,
    /// The root soft message each decision was made from.
    pub root_messages: Vec<SoftMessage>,
}

/// A reusable SC decoder instance for one code spec.
///
/// One decode runs single-threaded on `&mut self`; distinct instances may
/// run concurrently and an idle instance can move between threads.
#[derive(Debug, Clone)]
pub struct ScDecoder {
    spec: ProductCodeSpec,
    /// `reenc[l]`: decided bits re-encoded through all levels above `l`;
    /// `None` marks cells whose supporting bits are not all decided yet.
    reenc: Vec<Vec<Option<HardMessage>>>,
    decided: Vec<HardMessage>,
    lambda_scratch: Vec<HardMessage>,
    soft_bufs: Vec<Vec<SoftMessage>>,
    hard_bufs: Vec<Vec<HardMessage>>,
}

impl ScDecoder {
    pub fn new(spec: &ProductCodeSpec) -> ScDecoder {
        let m = spec.num_levels();
        let n = spec.block_length();
        let lens = spec.component_lengths();
        // The tree buffer for level l holds one message per tuple of
        // coordinates above l.
        let buf_len = |l: usize| lens[l + 1..].iter().product::<usize>();
        ScDecoder {
            spec: spec.clone(),
            reenc: vec![vec![None; n]; m],
            decided: vec![HardMessage::Erased; spec.dimension()],
            lambda_scratch: Vec::with_capacity(lens.iter().max().copied().unwrap_or(1)),
            soft_bufs: (0..m).map(|l| vec![SoftMessage::ERASURE; buf_len(l)]).collect(),
            hard_bufs: (0..m).map(|l| vec![HardMessage::Erased; buf_len(l)]).collect(),
        }
    }

    pub fn spec(&self) -> &ProductCodeSpec {
        &self.spec
    }

    /// LLR-domain SC decoding. The decision rule is selected by channel
    /// type: ties to zero off the erasure channel, erasures on ties on it.
    pub fn decode(&mut self, channel_llrs: &[SoftMessage], rule: DecisionRule) -> Result<ScOutput> {
        self.check_len(channel_llrs.len())?;
        let mut roots = vec![SoftMessage::ERASURE; self.spec.dimension()];
        run_sc(
            &self.spec,
            &mut self.reenc,
            &mut self.decided,
            &mut self.lambda_scratch,
            &mut self.soft_bufs,
            channel_llrs,
            rule,
            None,
            Some(&mut roots),
        );
        Ok(ScOutput { message: self.decided.clone(), root_messages: roots })
    }

    /// Exact ternary-domain SC decoding of an erasure-channel observation.
    pub fn decode_erasure(&mut self, received: &[HardMessage]) -> Result<Vec<HardMessage>> {
        self.check_len(received.len())?;
        run_sc(
            &self.spec,
            &mut self.reenc,
            &mut self.decided,
            &mut self.lambda_scratch,
            &mut self.hard_bufs,
            received,
            DecisionRule::ErasureOnTie,
            None,
            None,
        );
        Ok(self.decided.clone())
    }

    /// Genie-aided ternary decoding: feedback comes from the true message
    /// instead of the decoder's own decisions, so each bit's outcome is
    /// the conditional one given correct past decisions.
    pub fn decode_erasure_genie(
        &mut self,
        received: &[HardMessage],
        true_message: &[u8],
    ) -> Result<Vec<HardMessage>> {
        self.check_len(received.len())?;
        if true_message.len() != self.spec.dimension() {
            return Err(Error::LengthMismatch {
                expected: self.spec.dimension(),
                got: true_message.len(),
            });
        }
        run_sc(
            &self.spec,
            &mut self.reenc,
            &mut self.decided,
            &mut self.lambda_scratch,
            &mut self.hard_bufs,
            received,
            DecisionRule::ErasureOnTie,
            Some(true_message),
            None,
        );
        Ok(self.decided.clone())
    }

    fn check_len(&self, got: usize) -> Result<()> {
        if got != self.spec.block_length() {
            return Err(Error::LengthMismatch { expected: self.spec.block_length(), got });
        }
        Ok(())
    }
}

/// The sequential decode loop, shared by both message domains.
#[allow(clippy::too_many_arguments)]
fn run_sc<M: ScMessage>(
    spec: &ProductCodeSpec,
    reenc: &mut [Vec<Option<HardMessage>>],
    decided: &mut [HardMessage],
    lambda_scratch: &mut Vec<HardMessage>,
    bufs: &mut [Vec<M>],
    channel: &[M],
    rule: DecisionRule,
    genie_message: Option<&[u8]>,
    mut roots: Option<&mut Vec<SoftMessage>>,
) {
    if let Some(message) = genie_message {
        let hard: Vec<HardMessage> = message.iter().map(|&b| HardMessage::from_bit(b)).collect();
        rebuild_feedback(spec, reenc, &hard);
    }
    for t in 0..spec.dimension() {
        if genie_message.is_none() {
            rebuild_feedback(spec, reenc, &decided[..t]);
        }
        let root = eval_tree(spec, reenc, lambda_scratch, bufs, channel, t);
        if let Some(r) = roots.as_deref_mut() {
            r[t] = root.as_soft();
        }
        decided[t] = root.decide(rule);
    }
}

/// Re-encode `bits` (a decided prefix in message order) through every
/// level, populating the per-level feedback arrays. Cells supported by
/// any still-undecided bit stay `None`.
fn rebuild_feedback(
    spec: &ProductCodeSpec,
    reenc: &mut [Vec<Option<HardMessage>>],
    bits: &[HardMessage],
) {
    let m = spec.num_levels();
    let lens = spec.component_lengths();
    let strides = spec.codeword_strides();

    let top = &mut reenc[m - 1];
    top.iter_mut().for_each(|c| *c = None);
    for (t, &b) in bits.iter().enumerate() {
        top[spec.message_cell(t)] = Some(b);
    }

    for level in (0..m - 1).rev() {
        let dim = level + 1;
        let (lower, upper) = reenc.split_at_mut(dim);
        let dst = &mut lower[level];
        let src = &upper[0];
        dst.copy_from_slice(src);
        // Fill the parity slots along `dim`: lines have info-range
        // coordinates below `dim` and full range above it.
        let radices: Vec<usize> = (0..m)
            .map(|i| {
                if i == dim {
                    1
                } else if i < dim {
                    lens[i] - 1
                } else {
                    lens[i]
                }
            })
            .collect();
        let stride = strides[dim];
        for_each_mixed_radix(&radices, strides, |base| {
            let mut acc = Some(HardMessage::Zero);
            for pos in 0..lens[dim] - 1 {
                acc = match (acc, dst[base + pos * stride]) {
                    (Some(a), Some(b)) => Some(a.xor(b)),
                    _ => None,
                };
            }
            dst[base + (lens[dim] - 1) * stride] = acc;
        });
    }
}

/// Evaluate the decoding tree rooted in message bit `t` bottom-up and
/// return the root message.
fn eval_tree<M: ScMessage>(
    spec: &ProductCodeSpec,
    reenc: &[Vec<Option<HardMessage>>],
    lambda_scratch: &mut Vec<HardMessage>,
    bufs: &mut [Vec<M>],
    channel: &[M],
    t: usize,
) -> M {
    let m = spec.num_levels();
    let lens = spec.component_lengths();
    let strides = spec.codeword_strides();
    let coords = spec.message_coords(t);

    for level in 0..m {
        let (done, rest) = bufs.split_at_mut(level);
        let cur = &mut rest[0];
        let src = done.last();

        let n_l = lens[level];
        let pos = coords[level];
        // Codeword-index contribution of the coordinates below this
        // level, pinned to the bit's own coordinates.
        let prefix_base: usize = (0..level).map(|i| coords[i] * strides[i]).sum();
        let suffix_radices = &lens[level + 1..];
        let suffix_strides = &strides[level + 1..];
        let suffix_count: usize = suffix_radices.iter().product();

        // Walk the tuples of coordinates above this level in buffer
        // order, tracking their codeword-index contribution.
        let mut digits = vec![0usize; suffix_radices.len()];
        let mut suffix_base = 0usize;
        for sfx in 0..suffix_count {
            lambda_scratch.clear();
            for z in 0..pos {
                let cell = prefix_base + z * strides[level] + suffix_base;
                let lam = reenc[level][cell]
                    .expect("feedback must be decided before it is consumed");
                lambda_scratch.push(lam);
            }
            let rho: &[M] = match src {
                None => &channel[suffix_base..suffix_base + n_l],
                Some(below) => &below[sfx * n_l..(sfx + 1) * n_l],
            };
            cur[sfx] = M::local_output(rho, lambda_scratch, pos);

            for (i, d) in digits.iter_mut().enumerate() {
                *d += 1;
                suffix_base += suffix_strides[i];
                if *d < suffix_radices[i] {
                    break;
                }
                suffix_base -= suffix_radices[i] * suffix_strides[i];
                *d = 0;
            }
        }
    }
    bufs[m - 1][0]
}

/// One-shot LLR-domain SC decode.
pub fn sc_decode(
    spec: &ProductCodeSpec,
    channel_llrs: &[SoftMessage],
    rule: DecisionRule,
) -> Result<ScOutput> {
    ScDecoder::new(spec).decode(channel_llrs, rule)
}

/// One-shot exact SC decode of `codeword` observed through `pattern`.
pub fn sc_decode_erasure(
    spec: &ProductCodeSpec,
    pattern: &ErasurePattern,
    codeword: &[u8],
) -> Result<Vec<HardMessage>> {
    if codeword.len() != spec.block_length() {
        return Err(Error::LengthMismatch {
            expected: spec.block_length(),
            got: codeword.len(),
        });
    }
    if pattern.len() != spec.block_length() {
        return Err(Error::LengthMismatch {
            expected: spec.block_length(),
            got: pattern.len(),
        });
    }
    ScDecoder::new(spec).decode_erasure(&pattern.apply(codeword))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code_structure::encode;

    fn spec(lengths: &[usize]) -> ProductCodeSpec {
        ProductCodeSpec::new(lengths).unwrap()
    }

    fn soft(vals: &[f64]) -> Vec<SoftMessage> {
        vals.iter().map(|&v| SoftMessage::new(v)).collect()
    }

    /// Bitwise MAP LLR of bit `pos` of an SPC code, by brute-force
    /// summation over all codewords, optionally conditioning the leading
    /// information bits to fixed values. Likelihood ratios are taken from
    /// the input LLRs; an independent check on the recursive formula.
    fn spc_map_llr(rho: &[f64], conditioned: &[u8], pos: usize) -> f64 {
        let n = rho.len();
        let mut zero_mass = 0.0f64;
        let mut one_mass = 0.0f64;
        for bits in 0..(1u32 << (n - 1)) {
            let mut cw: Vec<u8> = (0..n - 1).map(|i| ((bits >> i) & 1) as u8).collect();
            let parity = cw.iter().fold(0, |a, &b| a ^ b);
            cw.push(parity);
            if cw[..conditioned.len()] != *conditioned {
                continue;
            }
            // P(y|cw) up to a common factor: product of e^{-rho_i * cw_i}.
            let w = (-cw.iter().zip(rho).map(|(&b, &r)| b as f64 * r).sum::<f64>()).exp();
            if cw[pos] == 0 {
                zero_mass += w;
            } else {
                one_mass += w;
            }
        }
        (zero_mass / one_mass).ln()
    }

    #[test]
    fn local_output_erasure_fill() {
        let inf = SoftMessage::certain(0);
        let e = SoftMessage::ERASURE;
        // Erased bit recovered from two known zeros.
        let out = local_spc_output(&[e, inf, inf], &[], 0);
        assert_eq!(out.llr(), f64::INFINITY);
        // Two erasures: nothing to recover.
        let out = local_spc_output(&[e, e, inf], &[], 0);
        assert!(out.is_erasure());
    }

    #[test]
    fn local_output_matches_map_oracle() {
        let rho = [0.5, 0.5, 0.5];
        let out = local_spc_output(&soft(&rho), &[], 0);
        let oracle = spc_map_llr(&rho, &[], 0);
        assert!((out.llr() - oracle).abs() < 1e-12, "{} vs {}", out.llr(), oracle);
        // Frozen: 0.5 + 2 atanh(tanh(0.25)^2).
        assert!((out.llr() - 0.6201145069582775).abs() < 1e-12);
    }

    #[test]
    fn feedback_flips_extrinsic_sign() {
        let rho = [0.3, -0.7, 1.1];
        let out0 = local_spc_output(&soft(&rho), &[HardMessage::Zero], 1);
        let out1 = local_spc_output(&soft(&rho), &[HardMessage::One], 1);
        let ext0 = out0.llr() - rho[1];
        let ext1 = out1.llr() - rho[1];
        assert!((ext0 + ext1).abs() < 1e-12, "sign must flip");
        // Against the conditional MAP oracle.
        let oracle0 = spc_map_llr(&rho, &[0], 1);
        let oracle1 = spc_map_llr(&rho, &[1], 1);
        assert!((out0.llr() - oracle0).abs() < 1e-12);
        assert!((out1.llr() - oracle1).abs() < 1e-12);
    }

    #[test]
    fn erased_feedback_suppresses_extrinsic() {
        let rho = soft(&[0.3, -0.7, 1.1]);
        let out = local_spc_output(&rho, &[HardMessage::Erased], 1);
        assert_eq!(out.llr(), -0.7);
    }

    #[test]
    fn reference_received_vector_decodes_under_sc() {
        // y = (e,0,1,0,e,e,e,e,1) on the (9,4) code: SC recovers the full
        // message (1,0,0,0) with no erasures.
        let s = spec(&[3, 3]);
        let y = "e010eeee1";
        let llrs: Vec<SoftMessage> = y
            .chars()
            .map(|c| SoftMessage::from_hard(HardMessage::try_from(c).unwrap()))
            .collect();
        let out = sc_decode(&s, &llrs, DecisionRule::ErasureOnTie).unwrap();
        let bits: Vec<u8> = out.message.iter().map(|h| h.bit().unwrap()).collect();
        assert_eq!(bits, vec![1, 0, 0, 0]);

        // Same thing through the ternary path.
        let received: Vec<HardMessage> =
            y.chars().map(|c| HardMessage::try_from(c).unwrap()).collect();
        let decoded = ScDecoder::new(&s).decode_erasure(&received).unwrap();
        assert_eq!(decoded, out.message);
    }

    #[test]
    fn noiseless_roundtrip_all_messages() {
        for lengths in [&[3usize, 3] as &[usize], &[4, 3], &[3, 2, 2]] {
            let s = spec(lengths);
            let k = s.dimension();
            for bits in 0u32..(1 << k) {
                let msg: Vec<u8> = (0..k).map(|i| ((bits >> i) & 1) as u8).collect();
                let cw = encode(&s, &msg).unwrap();
                let llrs: Vec<SoftMessage> = cw.iter().map(|&b| SoftMessage::certain(b)).collect();
                let out = sc_decode(&s, &llrs, DecisionRule::TiesToZero).unwrap();
                let got: Vec<u8> = out.message.iter().map(|h| h.bit().unwrap()).collect();
                assert_eq!(got, msg, "spec {lengths:?}");
            }
        }
    }

    #[test]
    fn all_erased_yields_all_erasures() {
        let s = spec(&[3, 3]);
        let pattern = ErasurePattern::all(9);
        let decoded = sc_decode_erasure(&s, &pattern, &[0; 9]).unwrap();
        assert!(decoded.iter().all(|h| h.is_erased()));
    }

    #[test]
    fn empty_pattern_recovers_message() {
        let s = spec(&[3, 3]);
        let msg = [1, 1, 0, 1];
        let cw = encode(&s, &msg).unwrap();
        let decoded = sc_decode_erasure(&s, &ErasurePattern::none(9), &cw).unwrap();
        let bits: Vec<u8> = decoded.iter().map(|h| h.bit().unwrap()).collect();
        assert_eq!(bits, msg);
    }

    #[test]
    fn domain_equivalence_all_patterns_9_4() {
        let s = spec(&[3, 3]);
        let msg = [1, 0, 1, 1];
        let cw = encode(&s, &msg).unwrap();
        let mut dec = ScDecoder::new(&s);
        for mask in 0u64..512 {
            let pattern = ErasurePattern::from_mask(mask, 9);
            let received = pattern.apply(&cw);
            let ternary = dec.decode_erasure(&received).unwrap();
            let llrs: Vec<SoftMessage> =
                received.iter().map(|&h| SoftMessage::from_hard(h)).collect();
            let soft_out = dec.decode(&llrs, DecisionRule::ErasureOnTie).unwrap();
            assert_eq!(ternary, soft_out.message, "mask {mask:#b}");
        }
    }

    #[test]
    fn erasure_outcome_codeword_independent() {
        // For a handful of patterns, the erased-bit set is the same no
        // matter which codeword was transmitted, and decided bits always
        // match the transmitted message.
        let s = spec(&[3, 3]);
        let mut dec = ScDecoder::new(&s);
        for mask in [0u64, 0b000010001, 0b111110000, 0b101010101, 0b111111111] {
            let pattern = ErasurePattern::from_mask(mask, 9);
            let mut erased_sets = Vec::new();
            for bits in 0u32..16 {
                let msg: Vec<u8> = (0..4).map(|i| ((bits >> i) & 1) as u8).collect();
                let cw = encode(&s, &msg).unwrap();
                let out = dec.decode_erasure(&pattern.apply(&cw)).unwrap();
                for (t, h) in out.iter().enumerate() {
                    if let Some(b) = h.bit() {
                        assert_eq!(b, msg[t], "decided bits are never wrong on the BEC");
                    }
                }
                erased_sets.push(out.iter().map(|h| h.is_erased()).collect::<Vec<_>>());
            }
            assert!(erased_sets.windows(2).all(|w| w[0] == w[1]), "mask {mask:#b}");
        }
    }

    #[test]
    fn genie_matches_real_decoder_on_first_bit() {
        let s = spec(&[3, 3]);
        let mut dec = ScDecoder::new(&s);
        let msg = [0u8, 1, 1, 0];
        let cw = encode(&s, &msg).unwrap();
        for mask in 0u64..512 {
            let pattern = ErasurePattern::from_mask(mask, 9);
            let received = pattern.apply(&cw);
            let real = dec.decode_erasure(&received).unwrap();
            let genie = dec.decode_erasure_genie(&received, &msg).unwrap();
            // Bit 0 has no feedback, so genie and real always agree there.
            assert_eq!(real[0], genie[0]);
        }
    }

    #[test]
    fn length_mismatch_rejected() {
        let s = spec(&[3, 3]);
        let llrs = soft(&[0.0; 8]);
        assert!(matches!(
            sc_decode(&s, &llrs, DecisionRule::TiesToZero),
            Err(Error::LengthMismatch { expected: 9, got: 8 })
        ));
    }

    #[test]
    fn large_code_noiseless_roundtrip() {
        // The (216,125) code end to end: decode recovers a fixed message
        // from a clean observation.
        let s = spec(&[6, 6, 6]);
        let msg: Vec<u8> = (0..s.dimension()).map(|i| ((i * 7 + 3) % 5 == 0) as u8).collect();
        let cw = encode(&s, &msg).unwrap();
        let llrs: Vec<SoftMessage> = cw.iter().map(|&b| SoftMessage::certain(b)).collect();
        let out = ScDecoder::new(&s).decode(&llrs, DecisionRule::TiesToZero).unwrap();
        let got: Vec<u8> = out.message.iter().map(|h| h.bit().unwrap()).collect();
        assert_eq!(got, msg);
    }

    #[test]
    fn three_level_roundtrip_and_single_erasures() {
        // Exercise m = 3 with mixed lengths: noiseless decode and every
        // weight-1 erasure pattern.
        let s = spec(&[3, 2, 2]);
        let k = s.dimension();
        let mut dec = ScDecoder::new(&s);
        for bits in 0u32..(1 << k) {
            let msg: Vec<u8> = (0..k).map(|i| ((bits >> i) & 1) as u8).collect();
            let cw = encode(&s, &msg).unwrap();
            for erased in 0..s.block_length() {
                let pattern = ErasurePattern::from_positions(&[erased], s.block_length());
                let out = dec.decode_erasure(&pattern.apply(&cw)).unwrap();
                let got: Vec<u8> = out.iter().map(|h| h.bit().unwrap()).collect();
                assert_eq!(got, msg, "single erasure is always recoverable");
            }
        }
    }
}
