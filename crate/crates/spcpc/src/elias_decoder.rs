//! Elias' one-sweep decoder.
//!
//! Each level's local codes are decoded exactly once, from the channel
//! side (level 0) to the message side (level `m-1`), using extrinsic
//! information only: no decision ever feeds back. A local code's output
//! for position `pos` combines the channel-side message there with the
//! parity contribution of all other positions. Only the information
//! positions are forwarded to the next level; parity positions are
//! consumed as extrinsic inputs.
//!
//! Local codes within one level are independent, so their processing
//! order is irrelevant.

use crate::code_structure::{for_each_mixed_radix_pair, strides_of, ProductCodeSpec};
use crate::message::{add_llr, extrinsic_llr, DecisionRule, HardMessage, SoftMessage};
use crate::{Error, Result};

/// Soft output of one local SPC code for the bit at `pos` under one-sweep
/// decoding: channel-side message plus the extrinsic parity contribution
/// of every other position.
///
/// Panics if `pos` addresses the parity slot.
pub fn elias_local_output(rho: &[SoftMessage], pos: usize) -> SoftMessage {
    assert!(pos + 1 < rho.len(), "position {pos} is not an information slot");
    let others = rho[..pos].iter().chain(&rho[pos + 1..]).copied();
    SoftMessage::new(add_llr(rho[pos].llr(), extrinsic_llr(others)))
}

/// Ternary-domain twin of [`elias_local_output`]: fills a single erasure
/// from the line's parity, the classic bounded-distance step.
pub fn elias_local_output_erasure(rho: &[HardMessage], pos: usize) -> HardMessage {
    assert!(pos + 1 < rho.len(), "position {pos} is not an information slot");
    if !rho[pos].is_erased() {
        return rho[pos];
    }
    let mut extrinsic = HardMessage::Zero;
    for (i, r) in rho.iter().enumerate() {
        if i != pos {
            extrinsic = extrinsic.xor(*r);
        }
    }
    extrinsic
}

trait EliasMessage: Copy {
    fn elias_output(rho: &[Self], pos: usize) -> Self;
    fn decide(self, rule: DecisionRule) -> HardMessage;
}

impl EliasMessage for SoftMessage {
    fn elias_output(rho: &[Self], pos: usize) -> Self {
        elias_local_output(rho, pos)
    }
    fn decide(self, rule: DecisionRule) -> HardMessage {
        SoftMessage::decide(self, rule)
    }
}

impl EliasMessage for HardMessage {
    fn elias_output(rho: &[Self], pos: usize) -> Self {
        elias_local_output_erasure(rho, pos)
    }
    fn decide(self, _rule: DecisionRule) -> HardMessage {
        self
    }
}

fn run_elias<M: EliasMessage>(
    spec: &ProductCodeSpec,
    channel: &[M],
    rule: DecisionRule,
) -> Vec<HardMessage> {
    let m = spec.num_levels();
    let lens = spec.component_lengths();

    // The working array starts as the full channel observation; each
    // processed level shrinks its dimension from n_l to n_l - 1 (parity
    // positions are not forwarded).
    let mut radices: Vec<usize> = lens.to_vec();
    let mut cur: Vec<M> = channel.to_vec();

    for level in 0..m {
        let n_l = lens[level];
        let in_strides = strides_of(&radices);
        let mut out_radices = radices.clone();
        out_radices[level] = n_l - 1;
        let out_strides = strides_of(&out_radices);
        let mut out: Vec<M> = vec![cur[0]; out_radices.iter().product()];

        let mut line_radices = radices.clone();
        line_radices[level] = 1;
        let mut rho = vec![cur[0]; n_l];
        for_each_mixed_radix_pair(&line_radices, &in_strides, &out_strides, |in_base, out_base| {
            for (i, r) in rho.iter_mut().enumerate() {
                *r = cur[in_base + i * in_strides[level]];
            }
            for pos in 0..n_l - 1 {
                out[out_base + pos * out_strides[level]] = M::elias_output(&rho, pos);
            }
        });

        cur = out;
        radices = out_radices;
    }

    // The final array is over information tuples; read it out in message
    // order and decide.
    let final_strides = strides_of(&radices);
    (0..spec.dimension())
        .map(|t| {
            let coords = spec.message_coords(t);
            let idx: usize = coords.iter().zip(&final_strides).map(|(&c, &s)| c * s).sum();
            cur[idx].decide(rule)
        })
        .collect()
}

/// One-sweep decode of LLR observations. The decision rule is selected by
/// channel type, as for SC decoding.
pub fn elias_decode(
    spec: &ProductCodeSpec,
    channel_llrs: &[SoftMessage],
    rule: DecisionRule,
) -> Result<Vec<HardMessage>> {
    if channel_llrs.len() != spec.block_length() {
        return Err(Error::LengthMismatch {
            expected: spec.block_length(),
            got: channel_llrs.len(),
        });
    }
    Ok(run_elias(spec, channel_llrs, rule))
}

/// One-sweep decode of an erasure-channel observation in the exact
/// ternary domain.
pub fn elias_decode_erasure(
    spec: &ProductCodeSpec,
    received: &[HardMessage],
) -> Result<Vec<HardMessage>> {
    if received.len() != spec.block_length() {
        return Err(Error::LengthMismatch {
            expected: spec.block_length(),
            got: received.len(),
        });
    }
    Ok(run_elias(spec, received, DecisionRule::ErasureOnTie))
}
