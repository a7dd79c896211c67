//! Closed-form analysis: density evolution of erasure probability and
//! mutual information across the decoding levels, per-bit reliability
//! profiles, block error bounds, and truncated union bounds.

use statrs::function::erf::erfc;

use crate::code_structure::ProductCodeSpec;
use crate::{Error, Result};

fn check_unit_interval(value: f64, name: &str) -> Result<()> {
    if !(0.0..=1.0).contains(&value) {
        return Err(Error::InvalidParameter(format!("{name} must be in [0, 1], got {value}")));
    }
    Ok(())
}

/// Erasure probability of the information bit at `pos` (0-based) of an
/// SPC code of length `spc_len` under SC decoding, conditioned on correct
/// earlier decisions, when every input is erased independently with
/// probability `epsilon`: the bit stays erased iff its own observation is
/// erased and at least one of the later positions is too.
///
/// Panics if `pos` is not an information position; returns an error for
/// `epsilon` outside `[0, 1]`.
pub fn spc_erasure_step(epsilon: f64, spc_len: usize, pos: usize) -> Result<f64> {
    check_unit_interval(epsilon, "epsilon")?;
    assert!(spc_len >= 2, "SPC length must be at least 2");
    assert!(pos + 1 < spc_len, "position {pos} is not an information slot");
    let later = (spc_len - 1 - pos) as i32;
    Ok(epsilon * (1.0 - (1.0 - epsilon).powi(later)))
}

/// Mutual-information image of [`spc_erasure_step`]:
/// `1 - spc_erasure_step(1 - mi, ...)`.
pub fn spc_mi_step(mi: f64, spc_len: usize, pos: usize) -> Result<f64> {
    check_unit_interval(mi, "mutual information")?;
    assert!(spc_len >= 2, "SPC length must be at least 2");
    assert!(pos + 1 < spc_len, "position {pos} is not an information slot");
    let later = (spc_len - 1 - pos) as i32;
    Ok(1.0 - (1.0 - mi) * (1.0 - mi.powi(later)))
}

/// Erasure probability of the worst (first-decoded) information bit:
/// the position-0 recursion applied once per level. Under one-sweep
/// decoding every bit evolves by this same recursion, so this is also the
/// per-bit erasure probability of Elias' decoder.
pub fn worst_bit_erasure(spec: &ProductCodeSpec, epsilon: f64) -> Result<f64> {
    check_unit_interval(epsilon, "epsilon")?;
    let mut x = epsilon;
    for &n_l in spec.component_lengths() {
        x *= 1.0 - (1.0 - x).powi((n_l - 1) as i32);
    }
    Ok(x)
}

/// Per-bit conditional erasure probabilities and the block error bounds
/// built from them.
#[derive(Debug, Clone)]
pub struct DeProfile {
    /// Channel erasure probability the profile was evaluated at.
    pub epsilon: f64,
    /// Conditional erasure probability per information bit, message order.
    pub q: Vec<f64>,
    /// `max(q)`, attained at the first decoded bit.
    pub q_max: f64,
    /// Lower bound on the SC block error probability (`q_max`).
    pub lower_bound: f64,
    /// Union upper bound on the SC block error probability (`sum(q)`).
    pub upper_bound_sum: f64,
    /// Looser upper bound `k * q_max`, which also bounds Elias' decoder.
    pub upper_bound_loose: f64,
}

/// Evolve the channel erasure probability through every level for every
/// information bit: bit `(c_0, ..., c_{m-1})` applies the level-`l` step
/// at position `c_l`, channel side first.
pub fn de_profile(spec: &ProductCodeSpec, epsilon: f64) -> Result<DeProfile> {
    check_unit_interval(epsilon, "epsilon")?;
    let k = spec.dimension();
    let lens = spec.component_lengths();
    let q: Vec<f64> = (0..k)
        .map(|t| {
            let coords = spec.message_coords(t);
            let mut x = epsilon;
            for (level, &pos) in coords.iter().enumerate() {
                x = spc_erasure_step(x, lens[level], pos)?;
            }
            Ok(x)
        })
        .collect::<Result<_>>()?;
    let q_max = q.iter().copied().fold(0.0f64, f64::max);
    debug_assert!(
        (q[0] - q_max).abs() < 1e-15,
        "the first decoded bit must be the least reliable"
    );
    Ok(DeProfile {
        epsilon,
        q_max,
        lower_bound: q_max,
        upper_bound_sum: q.iter().sum(),
        upper_bound_loose: k as f64 * q_max,
        q: q.to_vec(),
    })
}

/// One level of the mutual-information evolution tree.
#[derive(Debug, Clone)]
pub struct MiLevel {
    /// Component length at this level.
    pub spc_len: usize,
    /// Mutual information entering each local decoder of the tree, one
    /// value per branch path of the levels below.
    pub inputs: Vec<f64>,
    /// Outputs, `spc_len - 1` per input, grouped input-major.
    pub outputs: Vec<f64>,
}

impl MiLevel {
    /// Mutual information lost by the local decoder fed `inputs[idx]`:
    /// the summed outputs fall short of `spc_len * input` by exactly
    /// `input^spc_len`.
    pub fn loss(&self, idx: usize) -> f64 {
        self.inputs[idx].powi(self.spc_len as i32)
    }

    /// Sum of the outputs branched from `inputs[idx]`.
    pub fn branch_sum(&self, idx: usize) -> f64 {
        let w = self.spc_len - 1;
        self.outputs[idx * w..(idx + 1) * w].iter().sum()
    }
}

/// The full mutual-information evolution tree from one root value.
#[derive(Debug, Clone)]
pub struct MiProfile {
    /// Mutual information of the raw channel (`1 - epsilon` on a BEC).
    pub channel_mi: f64,
    /// One entry per level, channel side first.
    pub levels: Vec<MiLevel>,
}

impl MiProfile {
    /// Per-bit mutual information after the last level, message order.
    pub fn final_mi(&self) -> &[f64] {
        &self.levels.last().expect("at least one level").outputs
    }

    /// Average decoded mutual information per channel use; strictly below
    /// `channel_mi` for any root in (0, 1).
    pub fn average_decoded_mi(&self) -> f64 {
        let n: usize = self.levels.iter().map(|l| l.spc_len).product();
        self.final_mi().iter().sum::<f64>() / n as f64
    }
}

/// Evolve mutual information `channel_mi` through every level, recording
/// the whole branching tree. The final outputs are in message order and
/// equal `1 - q` of [`de_profile`] at `epsilon = 1 - channel_mi`.
pub fn mi_profile(spec: &ProductCodeSpec, channel_mi: f64) -> Result<MiProfile> {
    check_unit_interval(channel_mi, "mutual information")?;
    let mut inputs = vec![channel_mi];
    let mut levels = Vec::with_capacity(spec.num_levels());
    for &n_l in spec.component_lengths() {
        let mut outputs = Vec::with_capacity(inputs.len() * (n_l - 1));
        for &mi in &inputs {
            for pos in 0..n_l - 1 {
                outputs.push(spc_mi_step(mi, n_l, pos)?);
            }
        }
        levels.push(MiLevel { spc_len: n_l, inputs, outputs: outputs.clone() });
        inputs = outputs;
    }
    Ok(MiProfile { channel_mi, levels })
}

/// Truncated union bound on the ML block error probability over the
/// erasure channel: the minimum-distance term `A_min * epsilon^d`.
pub fn tub_bec(spec: &ProductCodeSpec, epsilon: f64) -> Result<f64> {
    check_unit_interval(epsilon, "epsilon")?;
    Ok(spec.min_distance_multiplicity() as f64 * epsilon.powi(spec.min_distance() as i32))
}

/// Truncated union bound on the ML block error probability over the
/// binary-input AWGN channel with antipodal unit-energy signaling:
/// `A_min / 2 * erfc(sqrt(d * R * Eb/N0))`.
pub fn tub_awgn(spec: &ProductCodeSpec, ebn0_db: f64) -> Result<f64> {
    if !ebn0_db.is_finite() {
        return Err(Error::InvalidParameter(format!("Eb/N0 must be finite, got {ebn0_db}")));
    }
    let ebn0 = 10f64.powf(ebn0_db / 10.0);
    let arg = (spec.min_distance() as f64 * spec.rate() * ebn0).sqrt();
    Ok(0.5 * spec.min_distance_multiplicity() as f64 * erfc(arg))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(lengths: &[usize]) -> ProductCodeSpec {
        ProductCodeSpec::new(lengths).unwrap()
    }

    /// Genie-aided erasure probability of bit `pos` of a single SPC code,
    /// by enumerating all 2^n erasure patterns: the bit stays erased iff
    /// its own position and at least one later position are erased.
    fn spc_step_oracle(epsilon: f64, spc_len: usize, pos: usize) -> f64 {
        let mut prob = 0.0;
        for mask in 0u32..(1 << spc_len) {
            let erased = |i: usize| (mask >> i) & 1 == 1;
            if !erased(pos) || !(pos + 1..spc_len).any(erased) {
                continue;
            }
            let w = mask.count_ones() as i32;
            prob += epsilon.powi(w) * (1.0 - epsilon).powi(spc_len as i32 - w);
        }
        prob
    }

    #[test]
    fn erasure_step_reference_values() {
        assert_eq!(spc_erasure_step(0.5, 3, 0).unwrap(), 0.375);
        assert_eq!(spc_erasure_step(0.5, 3, 1).unwrap(), 0.25);
        for (n, pos) in [(3, 0), (3, 1), (5, 2), (6, 0)] {
            assert_eq!(spc_erasure_step(0.0, n, pos).unwrap(), 0.0);
            assert_eq!(spc_erasure_step(1.0, n, pos).unwrap(), 1.0);
        }
    }

    #[test]
    fn erasure_step_matches_pattern_oracle() {
        for n in [3usize, 4, 5] {
            for pos in 0..n - 1 {
                for eps in [0.1, 0.3, 0.5, 0.9] {
                    let step = spc_erasure_step(eps, n, pos).unwrap();
                    let oracle = spc_step_oracle(eps, n, pos);
                    assert!((step - oracle).abs() < 1e-14, "n={n} pos={pos} eps={eps}");
                }
            }
        }
    }

    #[test]
    fn mi_step_reference_values() {
        assert!((spc_mi_step(0.3, 3, 0).unwrap() - 0.363).abs() < 1e-15);
        assert!((spc_mi_step(0.3, 3, 1).unwrap() - 0.51).abs() < 1e-15);
    }

    #[test]
    fn erasure_mi_duality() {
        for n in 2..=8 {
            for pos in 0..n - 1 {
                for i in 0..=20 {
                    let mi = i as f64 / 20.0;
                    let via_erasure = 1.0 - spc_erasure_step(1.0 - mi, n, pos).unwrap();
                    let direct = spc_mi_step(mi, n, pos).unwrap();
                    assert!((via_erasure - direct).abs() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn mi_sum_identity() {
        // sum_j I^(j) = n I - I^n, exactly.
        for n in 3..=8 {
            for i in 0..=10 {
                let mi = i as f64 / 10.0;
                let sum: f64 = (0..n - 1).map(|p| spc_mi_step(mi, n, p).unwrap()).sum();
                let closed = n as f64 * mi - mi.powi(n as i32);
                assert!((sum - closed).abs() < 1e-12, "n={n} mi={mi}: {sum} vs {closed}");
            }
        }
        // Hand value: n=3, I=0.3 gives 0.363 + 0.51 = 0.873 = 0.9 - 0.027.
        let sum = spc_mi_step(0.3, 3, 0).unwrap() + spc_mi_step(0.3, 3, 1).unwrap();
        assert!((sum - 0.873).abs() < 1e-15);
    }

    #[test]
    fn worst_bit_reference_value() {
        // Two applications of the position-0 step at eps = 0.5:
        // 0.375, then 0.375 * (1 - 0.625^2) = 0.228515625.
        let s = spec(&[3, 3]);
        assert_eq!(worst_bit_erasure(&s, 0.5).unwrap(), 0.228515625);
        assert_eq!(worst_bit_erasure(&s, 0.0).unwrap(), 0.0);
        assert_eq!(worst_bit_erasure(&s, 1.0).unwrap(), 1.0);
    }

    #[test]
    fn de_profile_9_4_at_half() {
        let s = spec(&[3, 3]);
        let p = de_profile(&s, 0.5).unwrap();
        // Message order: (0,0), (0,1), (1,0), (1,1).
        let expect = [0.228515625, 0.140625, 0.109375, 0.0625];
        for (qi, ei) in p.q.iter().zip(expect) {
            assert!((qi - ei).abs() < 1e-15, "{} vs {}", qi, ei);
        }
        assert_eq!(p.q_max, 0.228515625);
        assert_eq!(p.lower_bound, p.q_max);
        assert!((p.upper_bound_sum - p.q.iter().sum::<f64>()).abs() < 1e-15);
        assert_eq!(p.upper_bound_loose, 4.0 * p.q_max);
    }

    #[test]
    fn de_profile_single_level() {
        let s = spec(&[3]);
        let p = de_profile(&s, 0.5).unwrap();
        assert_eq!(p.q, vec![0.375, 0.25]);
    }

    #[test]
    fn de_profile_boundaries() {
        for lengths in [&[3usize, 3] as &[usize], &[4, 3, 2]] {
            let s = spec(lengths);
            assert!(de_profile(&s, 1.0).unwrap().q.iter().all(|&q| q == 1.0));
            assert!(de_profile(&s, 0.0).unwrap().q.iter().all(|&q| q == 0.0));
        }
    }

    #[test]
    fn de_profile_monotonicity() {
        let s = spec(&[4, 3, 3]);
        // Non-decreasing in epsilon, for every bit.
        let mut prev = vec![0.0; s.dimension()];
        for i in 0..=20 {
            let eps = i as f64 / 20.0;
            let p = de_profile(&s, eps).unwrap();
            for (a, b) in p.q.iter().zip(&prev) {
                assert!(a + 1e-15 >= *b);
            }
            prev = p.q;
        }
        // Non-increasing in each coordinate: later positions in a local
        // code are more reliable.
        let p = de_profile(&s, 0.4).unwrap();
        for t in 0..s.dimension() {
            let coords = s.message_coords(t);
            for level in 0..s.num_levels() {
                if coords[level] + 2 < s.component_lengths()[level] {
                    let mut next = coords.clone();
                    next[level] += 1;
                    let t_next = s.message_index(&next);
                    assert!(p.q[t_next] <= p.q[t] + 1e-15);
                }
            }
        }
    }

    #[test]
    fn mi_profile_matches_de_profile() {
        let s = spec(&[3, 4, 3]);
        let eps = 0.35;
        let mi = mi_profile(&s, 1.0 - eps).unwrap();
        let de = de_profile(&s, eps).unwrap();
        for (i_final, q) in mi.final_mi().iter().zip(&de.q) {
            assert!((i_final - (1.0 - q)).abs() < 1e-14);
        }
    }

    #[test]
    fn mi_profile_tree_shape_and_loss() {
        let s = spec(&[3, 3]);
        let p = mi_profile(&s, 0.3).unwrap();
        assert_eq!(p.levels.len(), 2);
        assert_eq!(p.levels[0].inputs, vec![0.3]);
        assert_eq!(p.levels[0].outputs.len(), 2);
        assert_eq!(p.levels[1].inputs.len(), 2);
        assert_eq!(p.levels[1].outputs.len(), 4);
        // Per-branch conservation: sum of outputs = n*I - loss.
        for level in &p.levels {
            for (idx, &input) in level.inputs.iter().enumerate() {
                let expect = level.spc_len as f64 * input - level.loss(idx);
                assert!((level.branch_sum(idx) - expect).abs() < 1e-12);
            }
        }
        // Strict capacity gap away from the extremes.
        assert!(p.average_decoded_mi() < 0.3);
    }

    #[test]
    fn mi_profile_extremes() {
        let s = spec(&[3, 3]);
        let perfect = mi_profile(&s, 1.0).unwrap();
        assert!(perfect.final_mi().iter().all(|&v| v == 1.0));
        // Perfect channel: each local code loses exactly the rate
        // overhead, I^n = 1 per local decoder.
        assert_eq!(perfect.levels[0].loss(0), 1.0);
        assert!((perfect.levels[0].branch_sum(0) - 2.0).abs() < 1e-15);

        let useless = mi_profile(&s, 0.0).unwrap();
        assert!(useless.final_mi().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn tub_bec_reference_values() {
        assert!((tub_bec(&spec(&[3, 3]), 0.1).unwrap() - 9e-4).abs() < 1e-18);
        assert_eq!(tub_bec(&spec(&[3, 3]), 0.0).unwrap(), 0.0);
        assert!((tub_bec(&spec(&[5, 5, 5]), 0.1).unwrap() - 1000.0 * 1e-8).abs() < 1e-19);
    }

    #[test]
    fn tub_awgn_reference_values() {
        // (125,64): 0.5 * 1000 * erfc(sqrt(8 * 0.512 * 10^0.4)), frozen
        // from the erfc implementation in use.
        let v = tub_awgn(&spec(&[5, 5, 5]), 4.0).unwrap();
        assert!((v - 2.8634496133601007e-3).abs() < 1e-15, "got {v}");
        // Monotone decreasing towards zero.
        let s = spec(&[6, 6, 6]);
        let mut prev = f64::INFINITY;
        for db in [0.0, 2.0, 4.0, 6.0, 8.0, 12.0] {
            let v = tub_awgn(&s, db).unwrap();
            assert!(v < prev);
            prev = v;
        }
        assert!(prev < 1e-12);
        assert!(tub_awgn(&s, f64::INFINITY).is_err());
    }

    #[test]
    fn range_validation() {
        let s = spec(&[3, 3]);
        assert!(spc_erasure_step(1.5, 3, 0).is_err());
        assert!(spc_mi_step(-0.1, 3, 0).is_err());
        assert!(worst_bit_erasure(&s, 2.0).is_err());
        assert!(de_profile(&s, -0.5).is_err());
    }

    #[test]
    #[should_panic(expected = "not an information slot")]
    fn erasure_step_rejects_parity_position() {
        let _ = spc_erasure_step(0.5, 3, 2);
    }
}
