//! Property tests across modules: encoder algebra, index maps, decoder
//! domain equivalence, and the erasure/mutual-information duality.

use proptest::prelude::*;

use spcpc::analysis::{spc_erasure_step, spc_mi_step};
use spcpc::code_structure::{
    encode, encode_in_order, generator_matrix, verify_codeword, ProductCodeSpec,
};
use spcpc::elias_decoder::{elias_decode, elias_decode_erasure};
use spcpc::message::DecisionRule;
use spcpc::sc_decoder::ScDecoder;
use spcpc::{ErasurePattern, HardMessage, SoftMessage};

/// Small random specs: 1-3 levels, component lengths 2-5, n capped so
/// exhaustive-ish work stays fast.
fn small_spec() -> impl Strategy<Value = ProductCodeSpec> {
    prop::collection::vec(2usize..=5, 1..=3)
        .prop_filter("keep n small", |lengths| lengths.iter().product::<usize>() <= 64)
        .prop_map(|lengths| ProductCodeSpec::new(&lengths).unwrap())
}

fn message_for(spec: &ProductCodeSpec, bits: u64) -> Vec<u8> {
    (0..spec.dimension()).map(|i| ((bits >> (i % 64)) & 1) as u8).collect()
}

proptest! {
    #[test]
    fn encoder_is_linear(spec in small_spec(), a in any::<u64>(), b in any::<u64>()) {
        let ma = message_for(&spec, a);
        let mb = message_for(&spec, b);
        let sum: Vec<u8> = ma.iter().zip(&mb).map(|(x, y)| x ^ y).collect();
        let ca = encode(&spec, &ma).unwrap();
        let cb = encode(&spec, &mb).unwrap();
        let csum: Vec<u8> = ca.iter().zip(&cb).map(|(x, y)| x ^ y).collect();
        prop_assert_eq!(encode(&spec, &sum).unwrap(), csum);
    }

    #[test]
    fn encoder_output_satisfies_every_check(spec in small_spec(), bits in any::<u64>()) {
        let cw = encode(&spec, &message_for(&spec, bits)).unwrap();
        prop_assert!(verify_codeword(&spec, &cw));
    }

    #[test]
    fn encoding_order_is_irrelevant(
        (spec, order) in small_spec().prop_flat_map(|s| {
            let m = s.num_levels();
            (Just(s), Just((0..m).collect::<Vec<_>>()).prop_shuffle())
        }),
        bits in any::<u64>(),
    ) {
        let msg = message_for(&spec, bits);
        prop_assert_eq!(
            encode_in_order(&spec, &msg, &order).unwrap(),
            encode(&spec, &msg).unwrap()
        );
    }

    #[test]
    fn generator_matrix_matches_encoder(spec in small_spec(), bits in any::<u64>()) {
        let msg = message_for(&spec, bits);
        let g = generator_matrix(&spec);
        prop_assert_eq!(g.mul_row_vec(&msg), encode(&spec, &msg).unwrap());
    }

    #[test]
    fn index_maps_roundtrip(spec in small_spec()) {
        for idx in 0..spec.block_length() {
            prop_assert_eq!(spec.codeword_index(&spec.codeword_coords(idx)), idx);
        }
        for t in 0..spec.dimension() {
            prop_assert_eq!(spec.message_index(&spec.message_coords(t)), t);
        }
    }

    #[test]
    fn sc_domains_agree(spec in small_spec(), bits in any::<u64>(), mask in any::<u64>()) {
        let msg = message_for(&spec, bits);
        let cw = encode(&spec, &msg).unwrap();
        let pattern = ErasurePattern::from_mask(mask, spec.block_length());
        let received = pattern.apply(&cw);
        let mut dec = ScDecoder::new(&spec);
        let ternary = dec.decode_erasure(&received).unwrap();
        let llrs: Vec<SoftMessage> = received.iter().map(|&h| SoftMessage::from_hard(h)).collect();
        let soft = dec.decode(&llrs, DecisionRule::ErasureOnTie).unwrap();
        prop_assert_eq!(ternary, soft.message);
    }

    #[test]
    fn elias_domains_agree(spec in small_spec(), bits in any::<u64>(), mask in any::<u64>()) {
        let msg = message_for(&spec, bits);
        let cw = encode(&spec, &msg).unwrap();
        let pattern = ErasurePattern::from_mask(mask, spec.block_length());
        let received = pattern.apply(&cw);
        let ternary = elias_decode_erasure(&spec, &received).unwrap();
        let llrs: Vec<SoftMessage> = received.iter().map(|&h| SoftMessage::from_hard(h)).collect();
        let soft = elias_decode(&spec, &llrs, DecisionRule::ErasureOnTie).unwrap();
        prop_assert_eq!(ternary, soft);
    }

    #[test]
    fn bec_decisions_are_never_wrong(spec in small_spec(), bits in any::<u64>(), mask in any::<u64>()) {
        let msg = message_for(&spec, bits);
        let cw = encode(&spec, &msg).unwrap();
        let pattern = ErasurePattern::from_mask(mask, spec.block_length());
        let received = pattern.apply(&cw);
        let mut dec = ScDecoder::new(&spec);
        for (out, name) in [
            (dec.decode_erasure(&received).unwrap(), "sc"),
            (elias_decode_erasure(&spec, &received).unwrap(), "elias"),
        ] {
            for (t, h) in out.iter().enumerate() {
                if let Some(b) = h.bit() {
                    prop_assert_eq!(b, msg[t], "{} decided a wrong bit", name);
                }
            }
        }
    }

    #[test]
    fn genie_never_loses_to_real_decoder(spec in small_spec(), mask in any::<u64>()) {
        // With correct feedback forced, a bit the genie-aided decoder
        // erases is also erased by the real decoder.
        let n = spec.block_length();
        let msg = vec![0u8; spec.dimension()];
        let cw = vec![0u8; n];
        let pattern = ErasurePattern::from_mask(mask, n);
        let received = pattern.apply(&cw);
        let mut dec = ScDecoder::new(&spec);
        let real = dec.decode_erasure(&received).unwrap();
        let genie = dec.decode_erasure_genie(&received, &msg).unwrap();
        for (r, g) in real.iter().zip(&genie) {
            if g.is_erased() {
                prop_assert!(r.is_erased());
            }
        }
    }

    #[test]
    fn erasure_mi_duality(mi in 0.0f64..=1.0, n in 2usize..=9, pos_seed in any::<u64>()) {
        let pos = (pos_seed % (n as u64 - 1)) as usize;
        let via_erasure = 1.0 - spc_erasure_step(1.0 - mi, n, pos).unwrap();
        let direct = spc_mi_step(mi, n, pos).unwrap();
        prop_assert!((via_erasure - direct).abs() < 1e-14);
    }

    #[test]
    fn pattern_mask_roundtrip(mask in any::<u64>(), n in 1usize..=16) {
        let truncated = mask & ((1 << n) - 1);
        let p = ErasurePattern::from_mask(truncated, n);
        prop_assert_eq!(p.weight(), truncated.count_ones() as usize);
        let back: u64 = (0..n).filter(|&i| p.is_erased(i)).map(|i| 1u64 << i).sum();
        prop_assert_eq!(back, truncated);
    }
}

#[test]
fn hard_message_survives_pattern_application() {
    let cw = [0u8, 1, 0, 1];
    let p = ErasurePattern::from_positions(&[1, 2], 4);
    let received = p.apply(&cw);
    assert_eq!(
        received,
        vec![HardMessage::Zero, HardMessage::Erased, HardMessage::Erased, HardMessage::One]
    );
}
