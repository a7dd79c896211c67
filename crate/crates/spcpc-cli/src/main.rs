//! Command-line front end: code parameters, exact erasure-channel curves,
//! closed-form analysis tables, Monte Carlo simulation, and single-shot
//! encode/decode. Tabular results are CSV with `#`-prefixed metadata
//! header lines; re-running the command echoed in the header reproduces
//! the output byte for byte.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use spcpc::analysis::{de_profile, mi_profile, tub_awgn, tub_bec};
use spcpc::bec_exact::{exact_block_error, MlDecoder, MlOutcome};
use spcpc::code_structure::{encode, min_distance_bruteforce, ProductCodeSpec};
use spcpc::elias_decoder::elias_decode;
use spcpc::message::DecisionRule;
use spcpc::sc_decoder::sc_decode;
use spcpc::sim::{run_curve, ChannelParam, StopRule, DEFAULT_MAX_TRIALS, DEFAULT_TARGET_BLOCK_ERRORS};
use spcpc::{DecoderKind, HardMessage, SoftMessage};

#[derive(Parser)]
#[command(name = "spcpc", version, about = "Single parity-check product codes: encoding, SC/Elias/ML decoding, exact erasure-channel analysis, and Monte Carlo simulation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the parameters of a code.
    Info(InfoArgs),
    /// Exact block error probabilities on the erasure channel, by
    /// exhaustive pattern enumeration.
    Exact(ExactArgs),
    /// Closed-form analysis: per-bit erasure profile with block error
    /// bounds, or the mutual-information evolution tree.
    Analyze(AnalyzeArgs),
    /// Monte Carlo BLER/BER estimation.
    Simulate(SimulateArgs),
    /// Single-shot encoding and decoding.
    Codec(CodecArgs),
}

#[derive(Args)]
struct InfoArgs {
    /// Component lengths, e.g. 3,3 or 5,5,5.
    #[arg(long)]
    spec: String,
}

#[derive(Args)]
struct ExactArgs {
    #[arg(long)]
    spec: String,
    /// Erasure probability grid: comma list or start:step:stop.
    #[arg(long)]
    eps: String,
    /// Decoders to evaluate (comma list of sc, elias, ml).
    #[arg(long, default_value = "sc,elias,ml")]
    decoder: String,
    /// Append bound columns (q_max, sum_q, k_qmax, tub) to every row.
    #[arg(long)]
    bounds: bool,
    /// Enumerate beyond the default n <= 16 cap.
    #[arg(long)]
    force: bool,
    /// Write CSV here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct AnalyzeArgs {
    #[arg(long)]
    spec: String,
    /// Erasure probability grid for the per-bit profile table.
    #[arg(long)]
    eps: Option<String>,
    /// Root mutual information for the evolution-tree table instead.
    #[arg(long)]
    mi_root: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    spec: String,
    /// Erasure channel grid (mutually exclusive with --ebn0).
    #[arg(long)]
    eps: Option<String>,
    /// AWGN Eb/N0 grid in dB (mutually exclusive with --eps).
    #[arg(long)]
    ebn0: Option<String>,
    /// Decoders to simulate (comma list; ml is erasure-channel only).
    #[arg(long, default_value = "sc")]
    decoder: String,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_MAX_TRIALS)]
    max_trials: u64,
    #[arg(long, default_value_t = DEFAULT_TARGET_BLOCK_ERRORS)]
    target_errors: u64,
    /// Append the truncated-union-bound column on AWGN grids.
    #[arg(long)]
    tub: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CodecArgs {
    #[command(subcommand)]
    action: CodecAction,
}

#[derive(Subcommand)]
enum CodecAction {
    /// Encode a binary message string.
    Encode(CodecEncodeArgs),
    /// Decode a ternary received string (symbols 0, 1, e).
    Decode(CodecDecodeArgs),
}

#[derive(Args)]
struct CodecEncodeArgs {
    #[arg(long)]
    spec: String,
    /// Message bits, e.g. 1000.
    #[arg(long)]
    input: String,
}

#[derive(Args)]
struct CodecDecodeArgs {
    #[arg(long)]
    spec: String,
    /// Received word over {0,1,e}, e.g. e010eeee1.
    #[arg(long)]
    input: String,
    /// sc, elias, or ml.
    #[arg(long, default_value = "sc")]
    decoder: String,
    /// Channel type selecting the decision rule: bec (erasure on ties)
    /// or awgn (ties to zero).
    #[arg(long, default_value = "bec")]
    channel: String,
}

/// Errors mapped to process exit codes: 2 for configuration problems,
/// 3 for refused resource caps.
#[derive(Debug)]
enum CliError {
    Config(String),
    ResourceCap(String),
    Io(std::io::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::ResourceCap(_) => 3,
            CliError::Io(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "{msg}"),
            CliError::ResourceCap(msg) => write!(f, "{msg}"),
            CliError::Io(e) => write!(f, "{e}"),
        }
    }
}

impl From<spcpc::Error> for CliError {
    fn from(e: spcpc::Error) -> CliError {
        match e {
            spcpc::Error::EnumerationCap { .. } | spcpc::Error::DistanceCap { .. } => {
                CliError::ResourceCap(e.to_string())
            }
            other => CliError::Config(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> CliError {
        CliError::Io(e)
    }
}

fn main() -> ExitCode {
    let command_line = reconstruct_command_line();
    let cli = Cli::parse();
    match run(cli, &command_line) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn reconstruct_command_line() -> String {
    let mut parts = vec!["spcpc".to_string()];
    parts.extend(std::env::args().skip(1));
    parts.join(" ")
}

fn run(cli: Cli, command_line: &str) -> Result<(), CliError> {
    match cli.command {
        Command::Info(args) => cmd_info(args),
        Command::Exact(args) => cmd_exact(args, command_line),
        Command::Analyze(args) => cmd_analyze(args, command_line),
        Command::Simulate(args) => cmd_simulate(args, command_line),
        Command::Codec(args) => match args.action {
            CodecAction::Encode(a) => cmd_codec_encode(a),
            CodecAction::Decode(a) => cmd_codec_decode(a),
        },
    }
}

fn parse_spec(s: &str) -> Result<ProductCodeSpec, CliError> {
    let lengths: Vec<usize> = s
        .split(',')
        .map(|part| {
            part.trim()
                .parse::<usize>()
                .map_err(|_| CliError::Config(format!("invalid component length {part:?}")))
        })
        .collect::<Result<_, _>>()?;
    Ok(ProductCodeSpec::new(&lengths)?)
}

/// Parse a grid given as a comma list (`0.1,0.2`) or an inclusive range
/// (`start:step:stop`).
fn parse_grid(s: &str) -> Result<Vec<f64>, CliError> {
    let bad = |msg: &str| CliError::Config(format!("invalid grid {s:?}: {msg}"));
    if s.contains(':') {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(bad("expected start:step:stop"));
        }
        let nums: Vec<f64> = parts
            .iter()
            .map(|p| p.trim().parse::<f64>().map_err(|_| bad("non-numeric bound")))
            .collect::<Result<_, _>>()?;
        let (start, step, stop) = (nums[0], nums[1], nums[2]);
        if step <= 0.0 || !step.is_finite() || stop < start {
            return Err(bad("need step > 0 and stop >= start"));
        }
        let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
        Ok((0..count).map(|i| start + i as f64 * step).collect())
    } else {
        let values: Vec<f64> = s
            .split(',')
            .map(|p| p.trim().parse::<f64>().map_err(|_| bad("non-numeric value")))
            .collect::<Result<_, _>>()?;
        if values.is_empty() {
            return Err(bad("empty"));
        }
        Ok(values)
    }
}

fn parse_decoders(s: &str) -> Result<Vec<DecoderKind>, CliError> {
    s.split(',')
        .map(|part| match part.trim() {
            "sc" => Ok(DecoderKind::Sc),
            "elias" => Ok(DecoderKind::Elias),
            "ml" => Ok(DecoderKind::Ml),
            other => Err(CliError::Config(format!(
                "unknown decoder {other:?} (expected sc, elias, or ml)"
            ))),
        })
        .collect()
}

fn spec_summary(spec: &ProductCodeSpec) -> String {
    let lengths: Vec<String> = spec.component_lengths().iter().map(|n| n.to_string()).collect();
    format!(
        "({},{}) lengths={} d={} A_min={} R={}",
        spec.block_length(),
        spec.dimension(),
        lengths.join(","),
        spec.min_distance(),
        spec.min_distance_multiplicity(),
        spec.rate()
    )
}

fn csv_header(out: &mut String, command_line: &str, spec: &ProductCodeSpec, seed: Option<u64>) {
    let _ = writeln!(out, "# spcpc {}", env!("CARGO_PKG_VERSION"));
    let _ = writeln!(out, "# command: {command_line}");
    let _ = writeln!(out, "# code: {}", spec_summary(spec));
    if let Some(seed) = seed {
        let _ = writeln!(out, "# seed: {seed}");
    }
}

/// Write the finished output in one shot; no partial files on error.
fn emit(out: Option<&PathBuf>, content: &str) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, content)?,
        None => print!("{content}"),
    }
    Ok(())
}

fn cmd_info(args: InfoArgs) -> Result<(), CliError> {
    let spec = parse_spec(&args.spec)?;
    let mut out = String::new();
    let _ = writeln!(out, "code: {}", spec_summary(&spec));
    let _ = writeln!(out, "  n       = {}", spec.block_length());
    let _ = writeln!(out, "  k       = {}", spec.dimension());
    let _ = writeln!(out, "  rate    = {}", spec.rate());
    let _ = writeln!(out, "  d       = {}", spec.min_distance());
    let _ = writeln!(out, "  A_min   = {}", spec.min_distance_multiplicity());
    let eta: Vec<String> = spec.local_code_counts().iter().map(|e| e.to_string()).collect();
    let _ = writeln!(out, "  eta     = ({})", eta.join(","));
    for (l, &n_l) in spec.component_lengths().iter().enumerate() {
        let _ = writeln!(
            out,
            "  level {} = ({},{}) SPC code, {} local codes",
            l + 1,
            n_l,
            n_l - 1,
            spec.local_code_counts()[l]
        );
    }
    if spec.dimension() <= 16 {
        let (d, a) = min_distance_bruteforce(&spec)?;
        let _ = writeln!(out, "  brute-force check: d = {d}, A_d = {a}");
    }
    print!("{out}");
    Ok(())
}

fn cmd_exact(args: ExactArgs, command_line: &str) -> Result<(), CliError> {
    let spec = parse_spec(&args.spec)?;
    let grid = parse_grid(&args.eps)?;
    let decoders = parse_decoders(&args.decoder)?;

    let mut out = String::new();
    csv_header(&mut out, command_line, &spec, None);
    if args.bounds {
        out.push_str("epsilon,decoder,block_error_prob,q_max,sum_q,k_qmax,tub\n");
    } else {
        out.push_str("epsilon,decoder,block_error_prob\n");
    }

    for &decoder in &decoders {
        let curve = exact_block_error(&spec, decoder, &grid, args.force)?;
        for (i, &eps) in grid.iter().enumerate() {
            if args.bounds {
                let profile = de_profile(&spec, eps)?;
                let tub = tub_bec(&spec, eps)?;
                let _ = writeln!(
                    out,
                    "{eps},{},{},{},{},{},{tub}",
                    decoder,
                    curve.probability[i],
                    profile.q_max,
                    profile.upper_bound_sum,
                    profile.upper_bound_loose
                );
            } else {
                let _ = writeln!(out, "{eps},{},{}", decoder, curve.probability[i]);
            }
        }
    }
    emit(args.out.as_ref(), &out)
}

fn cmd_analyze(args: AnalyzeArgs, command_line: &str) -> Result<(), CliError> {
    let spec = parse_spec(&args.spec)?;
    let mut out = String::new();
    match (&args.eps, args.mi_root) {
        (Some(eps), None) => {
            let grid = parse_grid(eps)?;
            csv_header(&mut out, command_line, &spec, None);
            let mut header = String::from("epsilon,q_max,sum_q,k_qmax,tub");
            for i in 1..=spec.dimension() {
                let _ = write!(header, ",q{i}");
            }
            out.push_str(&header);
            out.push('\n');
            for &eps in &grid {
                let profile = de_profile(&spec, eps)?;
                let tub = tub_bec(&spec, eps)?;
                let _ = write!(
                    out,
                    "{eps},{},{},{},{tub}",
                    profile.q_max, profile.upper_bound_sum, profile.upper_bound_loose
                );
                for q in &profile.q {
                    let _ = write!(out, ",{q}");
                }
                out.push('\n');
            }
        }
        (None, Some(root)) => {
            csv_header(&mut out, command_line, &spec, None);
            out.push_str("level,path,mi\n");
            let profile = mi_profile(&spec, root)?;
            let _ = writeln!(out, "0,0,{root}");
            for (l, level) in profile.levels.iter().enumerate() {
                for (p, mi) in level.outputs.iter().enumerate() {
                    let _ = writeln!(out, "{},{p},{mi}", l + 1);
                }
            }
        }
        _ => {
            return Err(CliError::Config(
                "analyze needs exactly one of --eps or --mi-root".into(),
            ));
        }
    }
    emit(args.out.as_ref(), &out)
}

fn cmd_simulate(args: SimulateArgs, command_line: &str) -> Result<(), CliError> {
    let spec = parse_spec(&args.spec)?;
    let decoders = parse_decoders(&args.decoder)?;
    let stop = StopRule::new(args.max_trials, args.target_errors)?;

    let params: Vec<ChannelParam> = match (&args.eps, &args.ebn0) {
        (Some(eps), None) => parse_grid(eps)?
            .into_iter()
            .map(ChannelParam::bec)
            .collect::<Result<_, _>>()?,
        (None, Some(ebn0)) => parse_grid(ebn0)?
            .into_iter()
            .map(|db| ChannelParam::bi_awgn(db, spec.rate()))
            .collect::<Result<_, _>>()?,
        _ => {
            return Err(CliError::Config(
                "simulate needs exactly one of --eps or --ebn0".into(),
            ));
        }
    };
    let awgn = args.ebn0.is_some();
    if args.tub && !awgn {
        return Err(CliError::Config("--tub applies to AWGN grids only".into()));
    }

    let mut out = String::new();
    csv_header(&mut out, command_line, &spec, Some(args.seed));
    out.push_str("channel,param,decoder,trials,block_errors,bit_errors,bler,ber,stderr_bler,seed");
    if args.tub {
        out.push_str(",tub");
    }
    out.push('\n');

    for &decoder in &decoders {
        let points = run_curve(&spec, decoder, &params, &stop, args.seed)?;
        for point in points {
            let _ = write!(
                out,
                "{},{},{},{},{},{},{},{},{},{}",
                point.channel.kind_label(),
                point.channel.value(),
                point.decoder,
                point.trials,
                point.block_errors,
                point.bit_errors,
                point.bler(),
                point.ber(),
                point.bler_stderr(),
                point.seed
            );
            if args.tub {
                let _ = write!(out, ",{}", tub_awgn(&spec, point.channel.value())?);
            }
            out.push('\n');
        }
    }
    emit(args.out.as_ref(), &out)
}

fn parse_bits(s: &str) -> Result<Vec<u8>, CliError> {
    s.chars()
        .map(|c| match c {
            '0' => Ok(0u8),
            '1' => Ok(1u8),
            other => Err(CliError::Config(format!("message bits are 0/1, got {other:?}"))),
        })
        .collect()
}

fn parse_ternary(s: &str) -> Result<Vec<HardMessage>, CliError> {
    s.chars().map(|c| HardMessage::try_from(c).map_err(CliError::from)).collect()
}

fn ternary_string(word: &[HardMessage]) -> String {
    word.iter().map(|h| h.to_string()).collect()
}

fn cmd_codec_encode(args: CodecEncodeArgs) -> Result<(), CliError> {
    let spec = parse_spec(&args.spec)?;
    let message = parse_bits(&args.input)?;
    let codeword = encode(&spec, &message)?;
    let bits: String = codeword.iter().map(|b| b.to_string()).collect();
    println!("message:  {}", args.input);
    println!("codeword: {bits}");
    Ok(())
}

fn cmd_codec_decode(args: CodecDecodeArgs) -> Result<(), CliError> {
    let spec = parse_spec(&args.spec)?;
    let received = parse_ternary(&args.input)?;
    let decoders = parse_decoders(&args.decoder)?;
    if decoders.len() != 1 {
        return Err(CliError::Config("codec decode takes a single decoder".into()));
    }
    let rule = match args.channel.as_str() {
        "bec" => DecisionRule::ErasureOnTie,
        "awgn" => DecisionRule::TiesToZero,
        other => {
            return Err(CliError::Config(format!(
                "unknown channel {other:?} (expected bec or awgn)"
            )));
        }
    };
    let llrs: Vec<SoftMessage> = received.iter().map(|&h| SoftMessage::from_hard(h)).collect();

    println!("received: {}", args.input);
    let decoded: Vec<HardMessage> = match decoders[0] {
        DecoderKind::Sc => sc_decode(&spec, &llrs, rule)?.message,
        DecoderKind::Elias => elias_decode(&spec, &llrs, rule)?,
        DecoderKind::Ml => {
            let ml = MlDecoder::new(&spec);
            match ml.decode_received(&received)? {
                MlOutcome::Unique(message) => {
                    message.iter().map(|&b| HardMessage::from_bit(b)).collect()
                }
                MlOutcome::Ambiguous => {
                    println!("decoder:  ml");
                    println!("message:  ambiguous (multiple codewords match)");
                    return Ok(());
                }
            }
        }
    };
    println!("decoder:  {}", decoders[0]);
    println!("message:  {}", ternary_string(&decoded));
    if let Some(bits) = decoded.iter().map(|h| h.bit()).collect::<Option<Vec<u8>>>() {
        let codeword = encode(&spec, &bits)?;
        let cw: String = codeword.iter().map(|b| b.to_string()).collect();
        println!("codeword: {cw}");
    } else {
        let erased: Vec<String> = decoded
            .iter()
            .enumerate()
            .filter(|(_, h)| h.is_erased())
            .map(|(i, _)| (i + 1).to_string())
            .collect();
        println!("erasures: bit {}", erased.join(", bit "));
    }
    Ok(())
}
