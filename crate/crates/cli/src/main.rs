//! `guessdec` command-line front end.
//!
//! CSV goes to stdout, diagnostics to stderr. Exit status is 0 on success,
//! 2 for usage and input errors, 1 when a run violates a checked invariant.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use guessdec::channel::{ChannelKind, LlrVector};
use guessdec::codes::{hamming_7_4, load_code, random_code, reed_muller, LinearCode};
use guessdec::decoders::{decode, DecoderConfig, DecoderKind};
use guessdec::sim::{find_snr_at_fer, run_paired, PairedChecks, SimConfig, SimResult, CSV_HEADER};

#[derive(Parser, Debug)]
#[command(
    name = "guessdec",
    version,
    about = "Guessing decoders for binary linear block codes"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decode a single reception given as LLRs.
    Decode(DecodeArgs),
    /// Simulate decoders over a channel and print CSV.
    Simulate(RunArgs),
    /// Run decoders on paired frames and count dominance violations.
    Compare(RunArgs),
    /// Simulate over a grid of channel parameters.
    Sweep(RunArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum CodeName {
    Hamming74,
    Rm,
    Random,
    File,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq)]
enum ChannelName {
    Bsc,
    Awgn,
}

#[derive(Args, Debug)]
struct CodeArgs {
    #[arg(long, value_enum)]
    code: CodeName,
    /// Reed-Muller length exponent.
    #[arg(long)]
    m: Option<usize>,
    /// Reed-Muller order.
    #[arg(long)]
    r: Option<usize>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, default_value_t = 0)]
    code_seed: u64,
    /// Parity-check matrix file: a `rows cols` header, then one 0/1 row per line.
    #[arg(long)]
    matrix: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct DecodeArgs {
    #[command(flatten)]
    code: CodeArgs,
    #[arg(long, value_parser = parse_decoder, default_value = "gcd")]
    decoder: DecoderKind,
    #[arg(long)]
    max_guesses: Option<u64>,
    /// Comma-separated LLRs, or @PATH to read them from a file.
    #[arg(long, allow_hyphen_values = true)]
    llr: String,
}

#[derive(Args, Debug)]
struct RunArgs {
    #[command(flatten)]
    code: CodeArgs,
    #[arg(long, value_enum)]
    channel: ChannelName,
    /// Crossover probability; a comma list for sweep.
    #[arg(long, value_delimiter = ',')]
    p: Vec<f64>,
    /// E_b/N_0 in dB; a comma list for sweep, or the search bracket with --target-fer.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    snr_db: Vec<f64>,
    /// Decoder to run; repeat for several.
    #[arg(long, value_parser = parse_decoder)]
    decoder: Vec<DecoderKind>,
    #[arg(long, default_value_t = 10_000)]
    frames: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Guess budget applied to every decoder.
    #[arg(long)]
    max_guesses: Option<u64>,
    /// Search the SNR where the first decoder reaches this FER, then run there.
    #[arg(long)]
    target_fer: Option<f64>,
    #[arg(long)]
    stop_at_errors: Option<u64>,
    /// Worker threads; 0 uses all cores.
    #[arg(long, default_value_t = 0)]
    jobs: usize,
}

fn parse_decoder(s: &str) -> Result<DecoderKind, String> {
    s.parse().map_err(|e: guessdec::decoders::DecodeError| e.to_string())
}

enum Failure {
    Usage(String),
    Internal(String),
}

impl Failure {
    fn usage(e: impl ToString) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn build_code(args: &CodeArgs) -> Result<LinearCode, Failure> {
    let need = |v: Option<usize>, flag: &str| v.ok_or_else(|| Failure::Usage(format!("--code needs --{flag}")));
    let code = match args.code {
        CodeName::Hamming74 => hamming_7_4(),
        CodeName::Rm => reed_muller(need(args.r, "r")?, need(args.m, "m")?).map_err(Failure::usage)?,
        CodeName::Random => {
            random_code(need(args.n, "n")?, need(args.k, "k")?, args.code_seed).map_err(Failure::usage)?
        }
        CodeName::File => {
            let path = args
                .matrix
                .as_ref()
                .ok_or_else(|| Failure::usage("--code file needs --matrix"))?;
            load_code(path).map_err(Failure::usage)?
        }
    };
    Ok(code)
}

fn parse_llrs(spec: &str) -> Result<LlrVector, Failure> {
    let text = match spec.strip_prefix('@') {
        Some(path) => std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{path}: {e}")))?,
        None => spec.to_string(),
    };
    let values = text
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse::<f64>()
                .map_err(|_| Failure::Usage(format!("malformed LLR value {t:?}")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    LlrVector::new(values).map_err(Failure::usage)
}

fn cmd_decode(args: &DecodeArgs) -> Result<(), Failure> {
    let code = build_code(&args.code)?;
    let r = parse_llrs(&args.llr)?;
    let mut config = DecoderConfig::new(args.decoder);
    if let Some(cap) = args.max_guesses {
        config = config.with_max_guesses(cap);
    }
    let out = decode(&code, &r, &config).map_err(Failure::usage)?;
    println!(
        "decoder={} codeword={} tep={} soft_weight={} guesses={} termination={} ml_certified={}",
        args.decoder, out.codeword, out.tep, out.soft_weight, out.guesses, out.termination, out.ml_certified
    );
    Ok(())
}

/// Channel parameters requested on the command line, in order.
fn channel_points(args: &RunArgs) -> Result<Vec<ChannelKind>, Failure> {
    match args.channel {
        ChannelName::Bsc => {
            if !args.snr_db.is_empty() {
                return Err(Failure::usage("--snr-db does not apply to --channel bsc"));
            }
            Ok(args.p.iter().map(|&p| ChannelKind::Bsc { p }).collect())
        }
        ChannelName::Awgn => {
            if !args.p.is_empty() {
                return Err(Failure::usage("--p does not apply to --channel awgn"));
            }
            Ok(args.snr_db.iter().map(|&snr_db| ChannelKind::Awgn { snr_db }).collect())
        }
    }
}

fn base_config(args: &RunArgs, default_decoders: &[DecoderKind]) -> Result<SimConfig, Failure> {
    let code = build_code(&args.code)?;
    let kinds = if args.decoder.is_empty() {
        default_decoders.to_vec()
    } else {
        args.decoder.clone()
    };
    let decoders = kinds
        .into_iter()
        .map(|kind| match args.max_guesses {
            Some(cap) => DecoderConfig::new(kind).with_max_guesses(cap),
            None => DecoderConfig::new(kind),
        })
        .collect();
    let mut cfg = SimConfig::new(code, ChannelKind::Bsc { p: 0.0 }, decoders, args.frames, args.seed);
    cfg.stop_at_errors = args.stop_at_errors;
    cfg.target_fer = args.target_fer;
    cfg.jobs = args.jobs;
    Ok(cfg)
}

fn run(cfg: &SimConfig) -> Result<SimResult, Failure> {
    cfg.validate().map_err(Failure::usage)?;
    let result = run_paired(cfg).map_err(|e| Failure::Internal(e.to_string()))?;
    eprintln!(
        "{} {}={}: {} frames in {:.2}s",
        result.code_name,
        cfg.channel.name(),
        cfg.channel.param(),
        result.frames_run,
        result.wall_time.as_secs_f64()
    );
    Ok(result)
}

/// Resolves the single operating point of `simulate` and `compare`.
fn single_point(args: &RunArgs, cfg: &SimConfig) -> Result<ChannelKind, Failure> {
    let points = channel_points(args)?;
    let Some(target) = args.target_fer else {
        return match points.as_slice() {
            [one] => Ok(*one),
            [] => Err(Failure::usage("a channel parameter (--p or --snr-db) is required")),
            _ => Err(Failure::usage("use sweep for more than one channel parameter")),
        };
    };
    if args.channel != ChannelName::Awgn {
        return Err(Failure::usage("--target-fer needs --channel awgn"));
    }
    let bracket = match points.as_slice() {
        [] => (0.0, 8.0),
        [ChannelKind::Awgn { snr_db: lo }, ChannelKind::Awgn { snr_db: hi }] => (*lo, *hi),
        _ => {
            return Err(Failure::usage(
                "with --target-fer, --snr-db takes a LO,HI search bracket",
            ))
        }
    };
    let mut probe = cfg.clone();
    probe.channel = ChannelKind::Awgn { snr_db: bracket.0 };
    probe.validate().map_err(Failure::usage)?;
    let est = find_snr_at_fer(&probe, cfg.decoders[0], target, 0.05, bracket).map_err(Failure::usage)?;
    eprintln!(
        "{}: FER {:.4} (±{:.4}) at {:.4} dB after {} frames",
        cfg.decoders[0].kind, est.fer, est.fer_ci95, est.snr_db, est.frames
    );
    Ok(ChannelKind::Awgn { snr_db: est.snr_db })
}

fn cmd_simulate(args: &RunArgs) -> Result<(), Failure> {
    let mut cfg = base_config(args, &[DecoderKind::Gcd])?;
    cfg.channel = single_point(args, &cfg)?;
    let result = run(&cfg)?;
    print!("{CSV_HEADER}\n{}", result.csv_rows());
    Ok(())
}

fn cmd_compare(args: &RunArgs) -> Result<(), Failure> {
    let mut cfg = base_config(args, &[DecoderKind::Gnd, DecoderKind::Gcd])?;
    cfg.channel = single_point(args, &cfg)?;
    cfg.checks = PairedChecks {
        dominance: true,
        ml_agreement: true,
    };
    let result = run(&cfg)?;
    print!("{CSV_HEADER}\n{}", result.csv_rows());
    println!("violations,{}", result.dominance_violations);
    if result.ml_disagreements > 0 {
        eprintln!(
            "{} frames where certified decoders disagree on soft weight",
            result.ml_disagreements
        );
    }
    if result.dominance_violations > 0 || result.ml_disagreements > 0 {
        return Err(Failure::Internal("paired decoders violated a checked invariant".into()));
    }
    Ok(())
}

fn cmd_sweep(args: &RunArgs) -> Result<(), Failure> {
    if args.target_fer.is_some() {
        return Err(Failure::usage("--target-fer applies to simulate and compare"));
    }
    let base = base_config(args, &[DecoderKind::Gcd])?;
    let points = channel_points(args)?;
    if points.is_empty() {
        return Err(Failure::usage("sweep needs --p or --snr-db values"));
    }
    println!("{CSV_HEADER}");
    for channel in points {
        let mut cfg = base.clone();
        cfg.channel = channel;
        print!("{}", run(&cfg)?.csv_rows());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Decode(a) => cmd_decode(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::Compare(a) => cmd_compare(a),
        Command::Sweep(a) => cmd_sweep(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Internal(msg)) => {
            eprintln!("internal error: {msg}");
            ExitCode::from(1)
        }
    }
}
