//! Paired Monte-Carlo harness.
//!
//! Every frame draws one information word and one channel realization, and
//! every configured decoder sees the same LLRs. Frame `f` only depends on
//! `(seed, f)`, and counters are reduced in frame order, so results do not
//! depend on the number of worker threads.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::time::{Duration, Instant};

use rand::Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::channel::{frame_rng, transmit, ChannelKind, ChannelSpec, FrameStream};
use crate::codes::LinearCode;
use crate::decoders::{decode, DecodeError, DecodeOutcome, DecoderConfig, DecoderKind, Termination, ORACLE_MAX_K};
use crate::gf2::BitVector;

/// Frames handed to the worker pool at a time.
const BATCH: u64 = 512;

/// Two-sided 95% normal quantile.
const Z95: f64 = 1.959_963_984_540_054;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("invalid simulation config: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Decode(#[from] DecodeError),
    #[error("cannot build worker pool: {0}")]
    Pool(String),
    #[error("target FER {target} is not bracketed: FER {fer_lo} at {lo} dB, {fer_hi} at {hi} dB")]
    Bracket {
        target: f64,
        lo: f64,
        hi: f64,
        fer_lo: f64,
        fer_hi: f64,
    },
}

/// Per-frame cross-decoder checks.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct PairedChecks {
    /// Count frames where the codeword guesser used more guesses than the
    /// noise guesser (both uncapped).
    pub dominance: bool,
    /// Count frames where certified decoders disagree on the soft weight.
    pub ml_agreement: bool,
}

#[derive(Clone, Debug)]
pub struct SimConfig {
    pub code: LinearCode,
    pub channel: ChannelKind,
    pub decoders: Vec<DecoderConfig>,
    pub frames: u64,
    pub seed: u64,
    pub target_fer: Option<f64>,
    /// Stop once every decoder has accumulated this many frame errors.
    pub stop_at_errors: Option<u64>,
    pub checks: PairedChecks,
    /// Worker threads; 0 uses the global pool.
    pub jobs: usize,
}

impl SimConfig {
    pub fn new(code: LinearCode, channel: ChannelKind, decoders: Vec<DecoderConfig>, frames: u64, seed: u64) -> Self {
        SimConfig {
            code,
            channel,
            decoders,
            frames,
            seed,
            target_fer: None,
            stop_at_errors: None,
            checks: PairedChecks::default(),
            jobs: 0,
        }
    }

    pub fn validate(&self) -> Result<(), SimError> {
        let bad = |msg: String| Err(SimError::InvalidConfig(msg));
        if self.frames == 0 {
            return bad("frames must be at least 1".into());
        }
        if self.decoders.is_empty() {
            return bad("at least one decoder is required".into());
        }
        if let Some(t) = self.target_fer {
            if !(t > 0.0 && t < 1.0) {
                return bad(format!("target FER must lie in (0, 1), got {t}"));
            }
        }
        if self.stop_at_errors == Some(0) {
            return bad("stop-at-errors must be at least 1".into());
        }
        match self.channel {
            ChannelKind::Bsc { p } if !(p > 0.0 && p < 0.5) => {
                return bad(format!("crossover probability must lie in (0, 1/2), got {p}"))
            }
            ChannelKind::Awgn { snr_db } if !snr_db.is_finite() => {
                return bad(format!("SNR must be finite, got {snr_db}"))
            }
            _ => {}
        }
        for d in &self.decoders {
            if d.max_guesses == Some(0) {
                return Err(DecodeError::ZeroGuessCap.into());
            }
            if d.kind == DecoderKind::Oracle && self.code.k() > ORACLE_MAX_K {
                return Err(DecodeError::DimensionTooLarge(self.code.k()).into());
            }
        }
        Ok(())
    }
}

/// Accumulated statistics of one decoder.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecoderStats {
    pub config: DecoderConfig,
    pub frames: u64,
    pub errors: u64,
    pub total_guesses: u128,
    pub total_guesses_sq: u128,
    pub max_guesses_observed: u64,
    /// Bucket `b` counts frames with `2^b <= guesses < 2^(b+1)`.
    pub guess_histogram: BTreeMap<u32, u64>,
    pub ml_certified: u64,
    pub cap_hits: u64,
}

impl DecoderStats {
    fn new(config: DecoderConfig) -> Self {
        DecoderStats {
            config,
            frames: 0,
            errors: 0,
            total_guesses: 0,
            total_guesses_sq: 0,
            max_guesses_observed: 0,
            guess_histogram: BTreeMap::new(),
            ml_certified: 0,
            cap_hits: 0,
        }
    }

    fn record(&mut self, error: bool, outcome: &DecodeOutcome) {
        let g = outcome.guesses;
        self.frames += 1;
        self.errors += error as u64;
        self.total_guesses += g as u128;
        self.total_guesses_sq += (g as u128) * (g as u128);
        self.max_guesses_observed = self.max_guesses_observed.max(g);
        *self.guess_histogram.entry(63 - g.max(1).leading_zeros()).or_default() += 1;
        self.ml_certified += outcome.ml_certified as u64;
        self.cap_hits += (outcome.termination == Termination::CapHit) as u64;
    }

    pub fn kind(&self) -> DecoderKind {
        self.config.kind
    }

    pub fn fer(&self) -> f64 {
        self.errors as f64 / self.frames as f64
    }

    /// Normal-approximation 95% half-width of the FER estimate.
    pub fn fer_ci95(&self) -> f64 {
        let p = self.fer();
        Z95 * (p * (1.0 - p) / self.frames as f64).sqrt()
    }

    pub fn avg_guesses(&self) -> f64 {
        self.total_guesses as f64 / self.frames as f64
    }

    /// Standard error of [`DecoderStats::avg_guesses`].
    pub fn avg_guesses_std_error(&self) -> f64 {
        let n = self.frames as f64;
        let mean = self.avg_guesses();
        let var = (self.total_guesses_sq as f64 / n - mean * mean).max(0.0);
        (var / n).sqrt()
    }

    pub fn ml_certified_fraction(&self) -> f64 {
        self.ml_certified as f64 / self.frames as f64
    }
}

#[derive(Clone, Debug)]
pub struct SimResult {
    pub code_name: String,
    pub n: usize,
    pub k: usize,
    pub channel: ChannelKind,
    pub seed: u64,
    pub frames_run: u64,
    pub decoders: Vec<DecoderStats>,
    /// Frames where the codeword guesser needed more guesses than the noise
    /// guesser. Only counted when [`PairedChecks::dominance`] is set.
    pub dominance_violations: u64,
    /// Frames where two certified decoders returned different soft weights.
    /// Only counted when [`PairedChecks::ml_agreement`] is set.
    pub ml_disagreements: u64,
    pub wall_time: Duration,
}

impl SimResult {
    pub fn stats(&self, kind: DecoderKind) -> Option<&DecoderStats> {
        self.decoders.iter().find(|d| d.kind() == kind)
    }

    /// CSV rows, one per decoder, without header.
    pub fn csv_rows(&self) -> String {
        let mut out = String::new();
        for d in &self.decoders {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
                self.code_name,
                self.n,
                self.k,
                self.channel.name(),
                format_sig6(self.channel.param()),
                d.kind(),
                d.frames,
                d.errors,
                format_sig6(d.fer()),
                format_sig6(d.fer_ci95()),
                format_sig6(d.avg_guesses()),
                d.max_guesses_observed,
                format_sig6(d.ml_certified_fraction()),
                self.seed,
            );
        }
        out
    }
}

pub const CSV_HEADER: &str =
    "code,n,k,channel,param,decoder,frames,errors,fer,fer_ci95,avg_guesses,max_guesses,ml_certified_frac,seed";

/// Formats like C's `%.6g`: six significant digits, trailing zeros removed,
/// scientific notation for exponents below -4 or above 5.
pub fn format_sig6(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{x:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..6).contains(&exp) {
        let mantissa = strip_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (5 - exp).max(0) as usize;
        strip_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

struct FrameRecord {
    errors: Vec<bool>,
    outcomes: Vec<DecodeOutcome>,
    dominance_violation: bool,
    ml_disagreement: bool,
}

fn run_frame(config: &SimConfig, frame: u64) -> Result<FrameRecord, DecodeError> {
    let code = &config.code;
    let mut rng = frame_rng(config.seed, frame, FrameStream::Message);
    let info: Vec<bool> = (0..code.k()).map(|_| rng.random()).collect();
    let c = code.encode(&BitVector::from_bools(&info)).expect("info length is k");
    let spec = ChannelSpec {
        kind: config.channel,
        seed: config.seed,
    };
    let r = transmit(code, &c, &spec, frame);

    let outcomes = config
        .decoders
        .iter()
        .map(|d| decode(code, &r, d))
        .collect::<Result<Vec<_>, _>>()?;
    let errors = outcomes.iter().map(|o| o.codeword != c).collect();

    let mut dominance_violation = false;
    if config.checks.dominance {
        let uncapped = |kind| {
            config
                .decoders
                .iter()
                .zip(&outcomes)
                .find(|(d, o)| d.kind == kind && o.termination != Termination::CapHit)
                .map(|(_, o)| o.guesses)
        };
        if let (Some(gnd), Some(gcd)) = (uncapped(DecoderKind::Gnd), uncapped(DecoderKind::Gcd)) {
            dominance_violation = gcd > gnd;
        }
    }
    let mut ml_disagreement = false;
    if config.checks.ml_agreement {
        let mut weights = outcomes.iter().filter(|o| o.ml_certified).map(|o| o.soft_weight);
        if let Some(first) = weights.next() {
            ml_disagreement = weights.any(|w| w != first);
        }
    }
    Ok(FrameRecord {
        errors,
        outcomes,
        dominance_violation,
        ml_disagreement,
    })
}

/// Runs every configured decoder on the same frames.
pub fn run_paired(config: &SimConfig) -> Result<SimResult, SimError> {
    config.validate()?;
    let start = Instant::now();
    let pool = if config.jobs > 0 {
        Some(
            rayon::ThreadPoolBuilder::new()
                .num_threads(config.jobs)
                .build()
                .map_err(|e| SimError::Pool(e.to_string()))?,
        )
    } else {
        None
    };

    let mut stats: Vec<DecoderStats> = config.decoders.iter().copied().map(DecoderStats::new).collect();
    let mut dominance_violations = 0;
    let mut ml_disagreements = 0;
    let mut frames_run = 0;

    'batches: for batch_start in (0..config.frames).step_by(BATCH as usize) {
        let batch_end = (batch_start + BATCH).min(config.frames);
        let work = || {
            (batch_start..batch_end)
                .into_par_iter()
                .map(|f| run_frame(config, f))
                .collect::<Result<Vec<_>, _>>()
        };
        let records = match &pool {
            Some(pool) => pool.install(work),
            None => work(),
        }?;
        for record in records {
            frames_run += 1;
            for ((s, &error), outcome) in stats.iter_mut().zip(&record.errors).zip(&record.outcomes) {
                s.record(error, outcome);
            }
            dominance_violations += record.dominance_violation as u64;
            ml_disagreements += record.ml_disagreement as u64;
            if let Some(limit) = config.stop_at_errors {
                if stats.iter().all(|s| s.errors >= limit) {
                    break 'batches;
                }
            }
        }
    }

    Ok(SimResult {
        code_name: config.code.name().to_string(),
        n: config.code.n(),
        k: config.code.k(),
        channel: config.channel,
        seed: config.seed,
        frames_run,
        decoders: stats,
        dominance_violations,
        ml_disagreements,
        wall_time: start.elapsed(),
    })
}

/// Outcome of an SNR search.
#[derive(Clone, Debug, PartialEq)]
pub struct SnrEstimate {
    pub snr_db: f64,
    pub fer: f64,
    pub fer_ci95: f64,
    pub frames: u64,
    pub errors: u64,
}

/// Bisects `E_b/N_0` over `[lo, hi]` dB until the FER confidence interval
/// of `decoder` contains `target_fer` or the bracket is narrower than
/// `tolerance`. Code, frames, seed, stop rule and jobs come from `base`; its
/// channel and decoder list are replaced.
pub fn find_snr_at_fer(
    base: &SimConfig,
    decoder: DecoderConfig,
    target_fer: f64,
    tolerance: f64,
    bracket: (f64, f64),
) -> Result<SnrEstimate, SimError> {
    if !(target_fer > 0.0 && target_fer < 1.0) {
        return Err(SimError::InvalidConfig(format!(
            "target FER must lie in (0, 1), got {target_fer}"
        )));
    }
    if !(tolerance > 0.0 && bracket.0 < bracket.1) {
        return Err(SimError::InvalidConfig("need tolerance > 0 and lo < hi".into()));
    }
    let evaluate = |snr_db: f64| -> Result<SnrEstimate, SimError> {
        let mut cfg = base.clone();
        cfg.channel = ChannelKind::Awgn { snr_db };
        cfg.decoders = vec![decoder];
        cfg.checks = PairedChecks::default();
        let result = run_paired(&cfg)?;
        let s = &result.decoders[0];
        Ok(SnrEstimate {
            snr_db,
            fer: s.fer(),
            fer_ci95: s.fer_ci95(),
            frames: s.frames,
            errors: s.errors,
        })
    };

    let (mut lo, mut hi) = bracket;
    let at_lo = evaluate(lo)?;
    let at_hi = evaluate(hi)?;
    if at_lo.fer < target_fer || at_hi.fer > target_fer {
        return Err(SimError::Bracket {
            target: target_fer,
            lo,
            hi,
            fer_lo: at_lo.fer,
            fer_hi: at_hi.fer,
        });
    }
    loop {
        let mid = 0.5 * (lo + hi);
        let est = evaluate(mid)?;
        if (est.fer - target_fer).abs() <= est.fer_ci95 || hi - lo < tolerance {
            return Ok(est);
        }
        if est.fer > target_fer {
            lo = mid;
        } else {
            hi = mid;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::hamming_7_4;

    #[test]
    fn sig6_formatting() {
        assert_eq!(format_sig6(0.0), "0");
        assert_eq!(format_sig6(1.0), "1");
        assert_eq!(format_sig6(0.05), "0.05");
        assert_eq!(format_sig6(1.234567), "1.23457");
        assert_eq!(format_sig6(123456.7), "123457");
        assert_eq!(format_sig6(1234567.0), "1.23457e+06");
        assert_eq!(format_sig6(0.0001234), "0.0001234");
        assert_eq!(format_sig6(0.00001234), "1.234e-05");
        assert_eq!(format_sig6(-2.5), "-2.5");
        assert_eq!(format_sig6(4.0), "4");
    }

    #[test]
    fn validation() {
        let mut cfg = SimConfig::new(
            hamming_7_4(),
            ChannelKind::Bsc { p: 0.05 },
            vec![DecoderConfig::new(DecoderKind::Gcd)],
            10,
            1,
        );
        assert!(cfg.validate().is_ok());
        cfg.frames = 0;
        assert!(run_paired(&cfg).is_err());
        cfg.frames = 10;
        cfg.target_fer = Some(1.5);
        assert!(cfg.validate().is_err());
        cfg.target_fer = None;
        cfg.channel = ChannelKind::Bsc { p: 0.7 };
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn noiseless_channel_needs_one_guess() {
        let cfg = SimConfig::new(
            hamming_7_4(),
            ChannelKind::Awgn { snr_db: 60.0 },
            vec![
                DecoderConfig::new(DecoderKind::Gcd),
                DecoderConfig::new(DecoderKind::Gnd),
            ],
            500,
            3,
        );
        let res = run_paired(&cfg).unwrap();
        for s in &res.decoders {
            assert_eq!(s.errors, 0);
            assert_eq!(s.avg_guesses(), 1.0);
            assert_eq!(s.guess_histogram.get(&0), Some(&500));
        }
    }

    #[test]
    fn stop_at_errors_is_exact() {
        let mut cfg = SimConfig::new(
            hamming_7_4(),
            ChannelKind::Bsc { p: 0.2 },
            vec![DecoderConfig::new(DecoderKind::Gcd)],
            100_000,
            9,
        );
        cfg.stop_at_errors = Some(25);
        let res = run_paired(&cfg).unwrap();
        assert_eq!(res.decoders[0].errors, 25);
        assert!(res.frames_run < 100_000);
    }
}
