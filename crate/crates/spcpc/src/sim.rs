//! Channel models and a seeded, parallel Monte Carlo engine.
//!
//! Every trial draws its randomness from a counter-based stream keyed by
//! `(master seed, grid point index, trial index)`, so results are
//! bitwise-identical no matter how trials are sharded across threads.
//! Trials run in fixed-size batches; the stop rule is checked between
//! batches, which keeps the set of counted trials deterministic as well.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::bec_exact::{MlDecoder, MlOutcome};
use crate::code_structure::{encode, ProductCodeSpec};
use crate::elias_decoder::elias_decode;
use crate::message::{DecisionRule, HardMessage, SoftMessage};
use crate::sc_decoder::ScDecoder;
use crate::{DecoderKind, Error, Result};

/// Trials per scheduling batch; the stop rule is evaluated on batch
/// boundaries.
const TRIAL_BATCH: u64 = 4096;

/// Default trial ceiling per grid point.
pub const DEFAULT_MAX_TRIALS: u64 = 10_000_000;

/// Default early-stop target of observed block errors per grid point.
pub const DEFAULT_TARGET_BLOCK_ERRORS: u64 = 100;

/// One channel operating point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ChannelParam {
    /// Binary erasure channel with erasure probability `epsilon`.
    Bec { epsilon: f64 },
    /// Binary-input AWGN channel at the given `Eb/N0`; `sigma2` is the
    /// noise variance for antipodal unit-energy symbols at the code rate
    /// the point was built for.
    BiAwgn { ebn0_db: f64, sigma2: f64 },
}

impl ChannelParam {
    pub fn bec(epsilon: f64) -> Result<ChannelParam> {
        if !(0.0..=1.0).contains(&epsilon) {
            return Err(Error::InvalidParameter(format!(
                "epsilon must be in [0, 1], got {epsilon}"
            )));
        }
        Ok(ChannelParam::Bec { epsilon })
    }

    /// Rate-normalized AWGN point: `sigma2 = 1 / (2 R Eb/N0)`.
    pub fn bi_awgn(ebn0_db: f64, rate: f64) -> Result<ChannelParam> {
        if !ebn0_db.is_finite() {
            return Err(Error::InvalidParameter(format!("Eb/N0 must be finite, got {ebn0_db}")));
        }
        if !(rate > 0.0 && rate <= 1.0) {
            return Err(Error::InvalidParameter(format!("rate must be in (0, 1], got {rate}")));
        }
        let sigma2 = 1.0 / (2.0 * rate * 10f64.powf(ebn0_db / 10.0));
        Ok(ChannelParam::BiAwgn { ebn0_db, sigma2 })
    }

    /// The grid value this point represents (`epsilon` or `Eb/N0` in dB).
    pub fn value(&self) -> f64 {
        match *self {
            ChannelParam::Bec { epsilon } => epsilon,
            ChannelParam::BiAwgn { ebn0_db, .. } => ebn0_db,
        }
    }

    pub fn kind_label(&self) -> &'static str {
        match self {
            ChannelParam::Bec { .. } => "bec",
            ChannelParam::BiAwgn { .. } => "awgn",
        }
    }

    /// Decision rule matching this channel type.
    pub fn decision_rule(&self) -> DecisionRule {
        match self {
            ChannelParam::Bec { .. } => DecisionRule::ErasureOnTie,
            ChannelParam::BiAwgn { .. } => DecisionRule::TiesToZero,
        }
    }
}

/// Send `codeword` through the channel, returning one LLR per position.
///
/// BEC: each bit is independently erased (LLR 0) or delivered with
/// certainty. AWGN: bit `b` maps to the antipodal symbol `1 - 2b`,
/// Gaussian noise of variance `sigma2` is added, and the LLR is
/// `2 y / sigma2`.
pub fn channel_transmit(
    param: &ChannelParam,
    codeword: &[u8],
    rng: &mut impl Rng,
) -> Vec<SoftMessage> {
    match *param {
        ChannelParam::Bec { epsilon } => codeword
            .iter()
            .map(|&b| {
                if rng.random::<f64>() < epsilon {
                    SoftMessage::ERASURE
                } else {
                    SoftMessage::certain(b)
                }
            })
            .collect(),
        ChannelParam::BiAwgn { sigma2, .. } => {
            let sigma = sigma2.sqrt();
            codeword
                .iter()
                .map(|&b| {
                    let symbol = 1.0 - 2.0 * b as f64;
                    let noise: f64 = rng.sample(StandardNormal);
                    SoftMessage::new(2.0 * (symbol + sigma * noise) / sigma2)
                })
                .collect()
        }
    }
}

/// Early-stop rule for one grid point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StopRule {
    pub max_trials: u64,
    pub target_block_errors: u64,
}

impl StopRule {
    pub fn new(max_trials: u64, target_block_errors: u64) -> Result<StopRule> {
        if max_trials == 0 || target_block_errors == 0 {
            return Err(Error::InvalidParameter(
                "stop criteria must be positive".into(),
            ));
        }
        Ok(StopRule { max_trials, target_block_errors })
    }
}

impl Default for StopRule {
    fn default() -> StopRule {
        StopRule {
            max_trials: DEFAULT_MAX_TRIALS,
            target_block_errors: DEFAULT_TARGET_BLOCK_ERRORS,
        }
    }
}

/// Monte Carlo estimate at one channel point.
#[derive(Debug, Clone, PartialEq)]
pub struct SimPoint {
    pub channel: ChannelParam,
    pub decoder: DecoderKind,
    pub trials: u64,
    pub block_errors: u64,
    pub bit_errors: u64,
    /// Information bits per trial (the code dimension).
    pub info_bits_per_trial: u64,
    pub seed: u64,
}

impl SimPoint {
    /// Block error rate estimate.
    pub fn bler(&self) -> f64 {
        self.block_errors as f64 / self.trials as f64
    }

    /// Bit error rate estimate (erasures count as errors).
    pub fn ber(&self) -> f64 {
        self.bit_errors as f64 / (self.trials * self.info_bits_per_trial) as f64
    }

    /// Standard error of the BLER estimate.
    pub fn bler_stderr(&self) -> f64 {
        let p = self.bler();
        (p * (1.0 - p) / self.trials as f64).sqrt()
    }
}

/// SplitMix64 step, used to key per-trial generator streams.
fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Counter-based per-trial generator: a ChaCha stream keyed by
/// `(seed, point, trial)` only.
fn trial_rng(seed: u64, point: u64, trial: u64) -> ChaCha8Rng {
    let mut state = seed;
    let _ = splitmix64(&mut state);
    state ^= point;
    let w0 = splitmix64(&mut state);
    state ^= trial;
    let w1 = splitmix64(&mut state);
    let w2 = splitmix64(&mut state);
    let w3 = splitmix64(&mut state);
    let mut key = [0u8; 32];
    for (chunk, w) in key.chunks_exact_mut(8).zip([w0, w1, w2, w3]) {
        chunk.copy_from_slice(&w.to_le_bytes());
    }
    ChaCha8Rng::from_seed(key)
}

enum TrialState {
    Sc(ScDecoder),
    Elias,
    Ml(MlDecoder),
}

fn run_trial(
    state: &mut TrialState,
    spec: &ProductCodeSpec,
    param: &ChannelParam,
    seed: u64,
    point: u64,
    trial: u64,
) -> (u64, u64) {
    let mut rng = trial_rng(seed, point, trial);
    let k = spec.dimension();
    let message: Vec<u8> = (0..k).map(|_| rng.random::<bool>() as u8).collect();
    let codeword = encode(spec, &message).expect("message length is k by construction");
    let llrs = channel_transmit(param, &codeword, &mut rng);
    let rule = param.decision_rule();

    let bit_errors: u64 = match state {
        TrialState::Sc(dec) => {
            let out = dec.decode(&llrs, rule).expect("length checked");
            count_bit_errors(&out.message, &message)
        }
        TrialState::Elias => {
            let out = elias_decode(spec, &llrs, rule).expect("length checked");
            count_bit_errors(&out, &message)
        }
        TrialState::Ml(dec) => {
            let received: Vec<HardMessage> =
                llrs.iter().map(|&l| l.decide(DecisionRule::ErasureOnTie)).collect();
            match dec.decode_received(&received).expect("BEC output is consistent") {
                MlOutcome::Unique(decoded) => decoded
                    .iter()
                    .zip(&message)
                    .filter(|(a, b)| a != b)
                    .count() as u64,
                MlOutcome::Ambiguous => {
                    // Determined bits are necessarily correct; undetermined
                    // ones count as erased.
                    let erased: Vec<bool> = received.iter().map(|h| h.is_erased()).collect();
                    let pattern = crate::bec_exact::ErasurePattern::new(erased);
                    (0..k).filter(|&bit| !dec.bit_determined(&pattern, bit)).count() as u64
                }
            }
        }
    };
    ((bit_errors > 0) as u64, bit_errors)
}

fn count_bit_errors(decoded: &[HardMessage], message: &[u8]) -> u64 {
    decoded
        .iter()
        .zip(message)
        .filter(|(h, &b)| h.bit() != Some(b))
        .count() as u64
}

/// Estimate BLER/BER at one channel point.
///
/// `point_index` keys the randomness of this point within a curve; points
/// of one curve must use distinct indices for independent streams.
pub fn run_point(
    spec: &ProductCodeSpec,
    decoder: DecoderKind,
    param: &ChannelParam,
    stop: &StopRule,
    seed: u64,
    point_index: u64,
) -> Result<SimPoint> {
    StopRule::new(stop.max_trials, stop.target_block_errors)?;
    if decoder == DecoderKind::Ml && !matches!(param, ChannelParam::Bec { .. }) {
        return Err(Error::InvalidParameter(
            "ML decoding is available on the erasure channel only".into(),
        ));
    }

    let make_state = || match decoder {
        DecoderKind::Sc => TrialState::Sc(ScDecoder::new(spec)),
        DecoderKind::Elias => TrialState::Elias,
        DecoderKind::Ml => TrialState::Ml(MlDecoder::new(spec)),
    };

    let mut trials = 0u64;
    let mut block_errors = 0u64;
    let mut bit_errors = 0u64;
    while trials < stop.max_trials && block_errors < stop.target_block_errors {
        let batch = TRIAL_BATCH.min(stop.max_trials - trials);
        let (be, bite) = (trials..trials + batch)
            .into_par_iter()
            .fold(
                || (0u64, 0u64, None::<TrialState>),
                |(be, bite, mut state), trial| {
                    let s = state.get_or_insert_with(&make_state);
                    let (b, e) = run_trial(s, spec, param, seed, point_index, trial);
                    (be + b, bite + e, state)
                },
            )
            .map(|(be, bite, _)| (be, bite))
            .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
        trials += batch;
        block_errors += be;
        bit_errors += bite;
    }

    Ok(SimPoint {
        channel: *param,
        decoder,
        trials,
        block_errors,
        bit_errors,
        info_bits_per_trial: spec.dimension() as u64,
        seed,
    })
}

/// Estimate a whole curve, one [`SimPoint`] per channel parameter.
pub fn run_curve(
    spec: &ProductCodeSpec,
    decoder: DecoderKind,
    params: &[ChannelParam],
    stop: &StopRule,
    seed: u64,
) -> Result<Vec<SimPoint>> {
    params
        .iter()
        .enumerate()
        .map(|(i, param)| run_point(spec, decoder, param, stop, seed, i as u64))
        .collect()
}
