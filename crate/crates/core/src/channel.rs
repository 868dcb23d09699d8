//! Channel models, log-likelihood ratios, hard decisions and soft weights.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use thiserror::Error;

use crate::codes::LinearCode;
use crate::gf2::{BitVector, Gf2Error};

/// LLR magnitudes are clamped to this bound so soft weights stay finite.
pub const LLR_CLAMP: f64 = 1e6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ChannelError {
    #[error("crossover probability must lie strictly inside (0, 1/2), got {0}")]
    InvalidCrossover(f64),
    #[error("SNR must be finite, got {0}")]
    InvalidSnr(f64),
    #[error("LLR value at position {0} is NaN")]
    NotANumber(usize),
    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },
}

/// Per-position log-likelihood ratios `log P(y|0) - log P(y|1)`.
#[derive(Clone, Debug, PartialEq)]
pub struct LlrVector(Vec<f64>);

impl LlrVector {
    /// Wraps raw values, clamping infinities and magnitudes to [`LLR_CLAMP`].
    pub fn new(values: Vec<f64>) -> Result<Self, ChannelError> {
        if let Some(i) = values.iter().position(|v| v.is_nan()) {
            return Err(ChannelError::NotANumber(i));
        }
        Ok(LlrVector(
            values.into_iter().map(|v| v.clamp(-LLR_CLAMP, LLR_CLAMP)).collect(),
        ))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `|r_i|` for every position.
    pub fn reliabilities(&self) -> Vec<f64> {
        self.0.iter().map(|v| v.abs()).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ChannelKind {
    /// Binary symmetric channel with crossover probability `p`.
    Bsc { p: f64 },
    /// BPSK over AWGN at the given `E_b/N_0` in dB.
    Awgn { snr_db: f64 },
}

impl ChannelKind {
    pub fn name(&self) -> &'static str {
        match self {
            ChannelKind::Bsc { .. } => "bsc",
            ChannelKind::Awgn { .. } => "awgn",
        }
    }

    /// The channel parameter: `p` for the BSC, `E_b/N_0` in dB for AWGN.
    pub fn param(&self) -> f64 {
        match *self {
            ChannelKind::Bsc { p } => p,
            ChannelKind::Awgn { snr_db } => snr_db,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChannelSpec {
    pub kind: ChannelKind,
    pub seed: u64,
}

impl ChannelSpec {
    pub fn bsc(p: f64, seed: u64) -> Result<Self, ChannelError> {
        if !(p > 0.0 && p < 0.5) {
            return Err(ChannelError::InvalidCrossover(p));
        }
        Ok(ChannelSpec {
            kind: ChannelKind::Bsc { p },
            seed,
        })
    }

    pub fn awgn(snr_db: f64, seed: u64) -> Result<Self, ChannelError> {
        if !snr_db.is_finite() {
            return Err(ChannelError::InvalidSnr(snr_db));
        }
        Ok(ChannelSpec {
            kind: ChannelKind::Awgn { snr_db },
            seed,
        })
    }

    pub fn with_seed(self, seed: u64) -> Self {
        ChannelSpec { seed, ..self }
    }
}

/// Random streams drawn for each frame.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FrameStream {
    Noise = 0,
    Message = 1,
}

/// The RNG for one frame and purpose. Streams are keyed by
/// `(seed, frame_index, purpose)` so frames can be generated in any order.
pub fn frame_rng(seed: u64, frame_index: u64, stream: FrameStream) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(frame_index.wrapping_mul(2).wrapping_add(stream as u64));
    rng
}

/// `ln((1-p)/p)`, the LLR magnitude of every BSC output.
pub fn bsc_llr_magnitude(p: f64) -> f64 {
    ((1.0 - p) / p).ln()
}

/// Noise variance per real dimension for BPSK at `E_b/N_0 = snr_db` and code
/// rate `rate`: `sigma^2 = 1 / (2 R 10^(snr_db/10))`.
pub fn awgn_sigma2(snr_db: f64, rate: f64) -> f64 {
    1.0 / (2.0 * rate * 10f64.powf(snr_db / 10.0))
}

/// AWGN LLRs `2 y_i / sigma^2` for received amplitudes `y`.
pub fn awgn_llrs(y: &[f64], sigma2: f64) -> LlrVector {
    LlrVector::new(y.iter().map(|&v| 2.0 * v / sigma2).collect()).expect("finite received values")
}

/// Sends codeword `c` through the channel and returns the receiver's LLRs.
/// Deterministic in `(spec.seed, frame_index)`.
pub fn transmit(code: &LinearCode, c: &BitVector, spec: &ChannelSpec, frame_index: u64) -> LlrVector {
    let mut rng = frame_rng(spec.seed, frame_index, FrameStream::Noise);
    match spec.kind {
        ChannelKind::Bsc { p } => {
            let l = bsc_llr_magnitude(p);
            let values = (0..c.len())
                .map(|i| {
                    let y = c.get(i) ^ rng.random_bool(p);
                    if y {
                        -l
                    } else {
                        l
                    }
                })
                .collect();
            LlrVector::new(values).expect("finite BSC LLRs")
        }
        ChannelKind::Awgn { snr_db } => {
            let sigma2 = awgn_sigma2(snr_db, code.rate());
            let noise = Normal::new(0.0, sigma2.sqrt()).expect("positive noise deviation");
            let y: Vec<f64> = (0..c.len())
                .map(|i| {
                    let x = if c.get(i) { -1.0 } else { 1.0 };
                    x + noise.sample(&mut rng)
                })
                .collect();
            awgn_llrs(&y, sigma2)
        }
    }
}

/// `z_i = 0` if `r_i >= 0`, else `1`.
pub fn hard_decision(r: &LlrVector) -> BitVector {
    let mut z = BitVector::zeros(r.len());
    for (i, &v) in r.values().iter().enumerate() {
        if v < 0.0 {
            z.set(i, true);
        }
    }
    z
}

/// Soft weight `sum_i e_i |r_i|`, accumulated in increasing position order.
pub fn soft_weight(e: &BitVector, r: &LlrVector) -> Result<f64, ChannelError> {
    if e.len() != r.len() {
        return Err(ChannelError::LengthMismatch {
            expected: r.len(),
            found: e.len(),
        });
    }
    Ok(soft_weight_of(e, r.values()))
}

/// Soft weight against raw values whose magnitudes are the reliabilities.
/// Accumulates in increasing position order so every caller obtains the same
/// floating-point result for the same pattern.
pub fn soft_weight_of(e: &BitVector, values: &[f64]) -> f64 {
    debug_assert_eq!(e.len(), values.len());
    e.support().fold(0.0, |acc, i| acc + values[i].abs())
}

/// Syndrome `H z^T` of a hard-decision vector.
pub fn syndrome(code: &LinearCode, z: &BitVector) -> Result<BitVector, Gf2Error> {
    code.syndrome(z)
}
