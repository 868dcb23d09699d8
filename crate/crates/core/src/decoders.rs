//! Guessing decoders.
//!
//! * [`decode_gnd`] guesses full-length noise patterns lightest first and
//!   stops at the first one that explains the syndrome.
//! * [`decode_gcd`] guesses only the `k` right-part positions of the
//!   systematic form, re-encodes each guess into a valid pattern, and stops
//!   once the right-part weight alone reaches the best full weight found.
//! * [`decode_osd_gcd`] is the same search over a per-reception
//!   reliability-ordered systematic form (most reliable basis on the right).
//! * [`decode_oracle`] enumerates every codeword.
//!
//! Guess counts: the noise guesser counts syndrome checks, the codeword
//! guesser counts re-encodings including the all-zero right part. The
//! emission that trips the stopping rule is drawn from the sorter but not
//! counted.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::channel::{hard_decision, soft_weight_of, LlrVector};
use crate::codes::LinearCode;
use crate::gf2::{systematize, BitVector, SystematicParity};
use crate::tep::TepSorter;

/// Largest dimension the exhaustive oracle accepts.
pub const ORACLE_MAX_K: usize = 24;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DecodeError {
    #[error("LLR vector has length {found}, code length is {expected}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("exhaustive decoding needs k <= {ORACLE_MAX_K}, code has k = {0}")]
    DimensionTooLarge(usize),
    #[error("max_guesses must be at least 1")]
    ZeroGuessCap,
    #[error("unknown decoder {0:?} (expected gnd, gcd, osd or oracle)")]
    UnknownDecoder(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Termination {
    /// The decoder's own stopping rule fired.
    EarlyStop,
    /// Every candidate was examined.
    Exhausted,
    /// The guess budget ran out first.
    CapHit,
}

impl fmt::Display for Termination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Termination::EarlyStop => "early_stop",
            Termination::Exhausted => "exhausted",
            Termination::CapHit => "cap_hit",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DecodeOutcome {
    pub codeword: BitVector,
    /// `tep = z ^ codeword`, in original position order.
    pub tep: BitVector,
    pub soft_weight: f64,
    pub guesses: u64,
    pub termination: Termination,
    /// True when termination proves the codeword is a most likely one.
    pub ml_certified: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DecoderKind {
    Gnd,
    Gcd,
    OsdGcd,
    Oracle,
}

impl DecoderKind {
    pub fn name(&self) -> &'static str {
        match self {
            DecoderKind::Gnd => "gnd",
            DecoderKind::Gcd => "gcd",
            DecoderKind::OsdGcd => "osd",
            DecoderKind::Oracle => "oracle",
        }
    }
}

impl fmt::Display for DecoderKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DecoderKind {
    type Err = DecodeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "gnd" => Ok(DecoderKind::Gnd),
            "gcd" => Ok(DecoderKind::Gcd),
            "osd" | "osd_gcd" => Ok(DecoderKind::OsdGcd),
            "oracle" => Ok(DecoderKind::Oracle),
            other => Err(DecodeError::UnknownDecoder(other.to_string())),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DecoderConfig {
    pub kind: DecoderKind,
    /// `None` means unlimited.
    pub max_guesses: Option<u64>,
}

impl DecoderConfig {
    pub fn new(kind: DecoderKind) -> Self {
        DecoderConfig {
            kind,
            max_guesses: None,
        }
    }

    pub fn with_max_guesses(self, max_guesses: u64) -> Self {
        DecoderConfig {
            max_guesses: Some(max_guesses),
            ..self
        }
    }

    fn cap(&self) -> Result<u64, DecodeError> {
        match self.max_guesses {
            Some(0) => Err(DecodeError::ZeroGuessCap),
            Some(m) => Ok(m),
            None => Ok(u64::MAX),
        }
    }
}

fn check_length(code: &LinearCode, r: &LlrVector) -> Result<(), DecodeError> {
    if r.len() != code.n() {
        return Err(DecodeError::LengthMismatch {
            expected: code.n(),
            found: r.len(),
        });
    }
    Ok(())
}

/// Dispatches on `config.kind`.
pub fn decode(code: &LinearCode, r: &LlrVector, config: &DecoderConfig) -> Result<DecodeOutcome, DecodeError> {
    match config.kind {
        DecoderKind::Gnd => decode_gnd(code, r, config),
        DecoderKind::Gcd => decode_gcd(code, r, config),
        DecoderKind::OsdGcd => decode_osd_gcd(code, r, config),
        DecoderKind::Oracle => decode_oracle(code, r),
    }
}

fn outcome(z: &BitVector, tep: BitVector, values: &[f64], guesses: u64, termination: Termination) -> DecodeOutcome {
    DecodeOutcome {
        codeword: z ^ &tep,
        soft_weight: soft_weight_of(&tep, values),
        tep,
        guesses,
        termination,
        ml_certified: termination != Termination::CapHit,
    }
}

/// Guessing noise decoding.
///
/// If the budget runs out, falls back to the pattern that is zero on the
/// systematic right part, so the result is still a codeword.
pub fn decode_gnd(code: &LinearCode, r: &LlrVector, config: &DecoderConfig) -> Result<DecodeOutcome, DecodeError> {
    check_length(code, r)?;
    let cap = config.cap()?;
    let values = r.values();
    let z = hard_decision(r);
    let s = code.syndrome(&z).expect("length checked");
    let mut sorter = TepSorter::new(&r.reliabilities()).expect("magnitudes are non-negative");

    let mut guesses = 0u64;
    let mut pattern = BitVector::zeros(code.n());
    let mut check = BitVector::zeros(s.len());
    while sorter.next_into(&mut pattern).is_some() {
        guesses += 1;
        check.clone_from(&s);
        for i in pattern.support() {
            check ^= code.parity_column(i);
        }
        if check.is_zero() {
            return Ok(outcome(&z, pattern, values, guesses, Termination::EarlyStop));
        }
        if guesses >= cap {
            let sys = code.systematic();
            let s_sys = sys.syndrome(&sys.to_systematic(&z));
            let tep = sys.to_original(&s_sys.concat(&BitVector::zeros(sys.k)));
            return Ok(outcome(&z, tep, values, guesses, Termination::CapHit));
        }
    }
    unreachable!("some pattern always maps the hard decision onto a codeword")
}

/// Guessing codeword decoding over the code's cached systematic form.
pub fn decode_gcd(code: &LinearCode, r: &LlrVector, config: &DecoderConfig) -> Result<DecodeOutcome, DecodeError> {
    check_length(code, r)?;
    let cap = config.cap()?;
    Ok(guess_codeword(code.systematic(), r, cap))
}

/// Reliability-ordered codeword guessing: a fresh systematic form is computed
/// for every reception so the right part is the most reliable basis.
pub fn decode_osd_gcd(code: &LinearCode, r: &LlrVector, config: &DecoderConfig) -> Result<DecodeOutcome, DecodeError> {
    check_length(code, r)?;
    let cap = config.cap()?;
    let sys = reliability_ordered_form(code, r);
    Ok(guess_codeword(&sys, r, cap))
}

/// Systematic form whose pivots are taken greedily from the least reliable
/// positions, leaving the `k` most reliable independent positions on the
/// right.
pub fn reliability_ordered_form(code: &LinearCode, r: &LlrVector) -> SystematicParity {
    let values = r.values();
    let mut order: Vec<usize> = (0..code.n()).collect();
    order.sort_by(|&a, &b| values[a].abs().total_cmp(&values[b].abs()).then(a.cmp(&b)));
    systematize(&code.parity().select_columns(&order))
        .expect("column permutation preserves rank")
        .relabel(&order)
}

fn guess_codeword(sys: &SystematicParity, r: &LlrVector, cap: u64) -> DecodeOutcome {
    let values = r.values();
    let redundancy = sys.redundancy();
    let z = hard_decision(r);
    let s = sys.syndrome(&sys.to_systematic(&z));
    let full_weight =
        |e_left: &BitVector, e_right: &BitVector| soft_weight_of(&sys.to_original(&e_left.concat(e_right)), values);

    let right_reliabilities: Vec<f64> = sys.column_perm[redundancy..].iter().map(|&i| values[i].abs()).collect();
    let mut sorter = TepSorter::new(&right_reliabilities).expect("magnitudes are non-negative");
    let zero = sorter.next_emission().expect("the all-zero pattern is always emitted");

    let mut best_left = s.clone();
    let mut best_right = zero.pattern;
    let mut gamma_opt = full_weight(&best_left, &best_right);
    let mut last_weight = zero.weight;
    let mut guesses = 1u64;

    let termination = loop {
        if last_weight >= gamma_opt {
            break Termination::EarlyStop;
        }
        let Some(emission) = sorter.next_emission() else {
            break Termination::Exhausted;
        };
        if emission.weight >= gamma_opt {
            break Termination::EarlyStop;
        }
        if guesses >= cap {
            break Termination::CapHit;
        }
        guesses += 1;
        let e_left = sys.reencode(&s, &emission.pattern);
        let weight = full_weight(&e_left, &emission.pattern);
        if weight < gamma_opt {
            gamma_opt = weight;
            best_left = e_left;
            best_right = emission.pattern;
        }
        last_weight = emission.weight;
    };

    let tep = sys.to_original(&best_left.concat(&best_right));
    outcome(&z, tep, values, guesses, termination)
}

/// Result of the exhaustive search, with the number of codewords attaining
/// the minimum soft weight.
#[derive(Clone, Debug, PartialEq)]
pub struct OracleReport {
    pub outcome: DecodeOutcome,
    pub minimizers: u64,
}

impl OracleReport {
    pub fn is_unique(&self) -> bool {
        self.minimizers == 1
    }
}

/// Exhaustive maximum-likelihood decoding over all `2^k` codewords. Among
/// equally light patterns the lexicographically first wins.
pub fn decode_oracle(code: &LinearCode, r: &LlrVector) -> Result<DecodeOutcome, DecodeError> {
    oracle_search(code, r).map(|report| report.outcome)
}

pub fn oracle_search(code: &LinearCode, r: &LlrVector) -> Result<OracleReport, DecodeError> {
    check_length(code, r)?;
    if code.k() > ORACLE_MAX_K {
        return Err(DecodeError::DimensionTooLarge(code.k()));
    }
    let values = r.values();
    let z = hard_decision(r);
    let total = 1u64 << code.k();

    let mut tep = z.clone();
    let mut best = tep.clone();
    let mut best_weight = soft_weight_of(&tep, values);
    let mut minimizers = 1u64;
    for step in 1..total {
        tep ^= code.generator().row(step.trailing_zeros() as usize);
        let weight = soft_weight_of(&tep, values);
        match weight.total_cmp(&best_weight) {
            Ordering::Less => {
                best_weight = weight;
                best.clone_from(&tep);
                minimizers = 1;
            }
            Ordering::Equal => {
                minimizers += 1;
                if tep.lex_cmp(&best) == Ordering::Less {
                    best.clone_from(&tep);
                }
            }
            Ordering::Greater => {}
        }
    }
    Ok(OracleReport {
        outcome: outcome(&z, best, values, total, Termination::Exhausted),
        minimizers,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::{hamming_7_4, reed_muller, LinearCode};
    use crate::gf2::BitMatrix;

    fn spc3() -> LinearCode {
        LinearCode::from_parity("spc3", BitMatrix::from_bit_rows(&[&[1, 1, 1]]).unwrap()).unwrap()
    }

    fn llr(v: &[f64]) -> LlrVector {
        LlrVector::new(v.to_vec()).unwrap()
    }

    fn unlimited(kind: DecoderKind) -> DecoderConfig {
        DecoderConfig::new(kind)
    }

    #[test]
    fn gnd_single_parity_instance() {
        let out = decode_gnd(&spc3(), &llr(&[-0.5, 1.0, 2.0]), &unlimited(DecoderKind::Gnd)).unwrap();
        assert_eq!(out.tep, BitVector::from_bits(&[1, 0, 0]));
        assert_eq!(out.codeword, BitVector::zeros(3));
        assert_eq!(out.guesses, 2);
        assert_eq!(out.soft_weight, 0.5);
        assert_eq!(out.termination, Termination::EarlyStop);
        assert!(out.ml_certified);
    }

    #[test]
    fn gcd_single_parity_instance() {
        let out = decode_gcd(&spc3(), &llr(&[-0.5, 1.0, 2.0]), &unlimited(DecoderKind::Gcd)).unwrap();
        assert_eq!(out.tep, BitVector::from_bits(&[1, 0, 0]));
        assert_eq!(out.codeword, BitVector::zeros(3));
        assert_eq!(out.guesses, 1);
        assert_eq!(out.termination, Termination::EarlyStop);
    }

    #[test]
    fn codeword_reception_needs_one_guess() {
        let code = hamming_7_4();
        let c = code.encode(&BitVector::from_bits(&[1, 0, 1, 1])).unwrap();
        let r = llr(&(0..7)
            .map(|i| if c.get(i) { -1.0 - i as f64 } else { 0.5 + i as f64 })
            .collect::<Vec<_>>());
        for kind in [DecoderKind::Gnd, DecoderKind::Gcd, DecoderKind::OsdGcd] {
            let out = decode(&code, &r, &unlimited(kind)).unwrap();
            assert_eq!(out.guesses, 1, "{kind}");
            assert!(out.tep.is_zero());
            assert_eq!(out.codeword, c);
        }
    }

    #[test]
    fn oracle_repetition_code() {
        let rep = LinearCode::from_generator("rep3", BitMatrix::from_bit_rows(&[&[1, 1, 1]]).unwrap()).unwrap();
        let out = decode_oracle(&rep, &llr(&[1.0, -2.0, -3.0])).unwrap();
        assert_eq!(out.codeword, BitVector::ones(3));
        assert_eq!(out.tep, BitVector::from_bits(&[1, 0, 0]));
        assert_eq!(out.soft_weight, 1.0);
        assert_eq!(out.guesses, 2);
    }

    #[test]
    fn oracle_noiseless_all_zero() {
        let code = hamming_7_4();
        let out = decode_oracle(&code, &llr(&[2.0; 7])).unwrap();
        assert!(out.codeword.is_zero());
        assert_eq!(out.soft_weight, 0.0);
    }

    #[test]
    fn oracle_rejects_large_dimension() {
        let code = reed_muller(3, 5).unwrap();
        assert_eq!(
            decode_oracle(&code, &llr(&[1.0; 32])).unwrap_err(),
            DecodeError::DimensionTooLarge(26)
        );
    }

    #[test]
    fn length_and_cap_errors() {
        let code = hamming_7_4();
        let r = llr(&[1.0; 6]);
        assert!(matches!(
            decode_gcd(&code, &r, &unlimited(DecoderKind::Gcd)),
            Err(DecodeError::LengthMismatch { expected: 7, found: 6 })
        ));
        let zero_cap = DecoderConfig::new(DecoderKind::Gnd).with_max_guesses(0);
        assert_eq!(
            decode(&code, &llr(&[1.0; 7]), &zero_cap),
            Err(DecodeError::ZeroGuessCap)
        );
    }

    #[test]
    fn gnd_cap_falls_back_to_a_codeword() {
        let code = reed_muller(1, 4).unwrap();
        let r = llr(&[
            -0.2, 0.3, -0.1, 0.4, 0.9, -0.8, 0.05, 0.6, -0.7, 0.3, 0.2, -0.15, 0.45, 0.35, -0.25, 0.5,
        ]);
        let out = decode_gnd(&code, &r, &DecoderConfig::new(DecoderKind::Gnd).with_max_guesses(3)).unwrap();
        assert_eq!(out.termination, Termination::CapHit);
        assert!(!out.ml_certified);
        assert_eq!(out.guesses, 3);
        assert!(code.is_codeword(&out.codeword));
        let sys = code.systematic();
        assert!(sys.to_systematic(&out.tep).slice(sys.redundancy(), sys.n).is_zero());
    }

    #[test]
    fn gcd_cap_returns_best_so_far() {
        let code = reed_muller(2, 4).unwrap();
        let r = llr(&[
            -0.2, 0.3, -0.1, 0.4, 0.9, -0.8, 0.05, 0.6, -0.7, 0.3, 0.2, -0.15, 0.45, 0.35, -0.25, 0.5,
        ]);
        let out = decode_gcd(&code, &r, &DecoderConfig::new(DecoderKind::Gcd).with_max_guesses(2)).unwrap();
        assert!(out.guesses <= 2);
        assert!(code.is_codeword(&out.codeword));
        if out.termination == Termination::CapHit {
            assert!(!out.ml_certified);
        }
    }

    #[test]
    fn decoder_kind_parsing() {
        assert_eq!("osd".parse::<DecoderKind>().unwrap(), DecoderKind::OsdGcd);
        assert!("bp".parse::<DecoderKind>().is_err());
        for kind in [
            DecoderKind::Gnd,
            DecoderKind::Gcd,
            DecoderKind::OsdGcd,
            DecoderKind::Oracle,
        ] {
            assert_eq!(kind.name().parse::<DecoderKind>().unwrap(), kind);
        }
    }

    #[test]
    fn osd_with_increasing_reliabilities_matches_gcd() {
        // Hamming H = [I | P]: the first three columns are independent, so an
        // increasing reliability profile keeps the identity ordering.
        let code = hamming_7_4();
        let r = llr(&[0.1, -0.2, 0.3, -0.4, 0.5, 0.6, -0.7]);
        let sys = reliability_ordered_form(&code, &r);
        assert_eq!(&sys, code.systematic());
        let a = decode_gcd(&code, &r, &unlimited(DecoderKind::Gcd)).unwrap();
        let b = decode_osd_gcd(&code, &r, &unlimited(DecoderKind::OsdGcd)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn osd_right_part_is_most_reliable_basis() {
        let code = reed_muller(1, 4).unwrap();
        let values: Vec<f64> = (0..16).map(|i| ((i * 7) % 16) as f64 * 0.1 + 0.05).collect();
        let r = llr(&values);
        let sys = reliability_ordered_form(&code, &r);
        // greedy basis of the generator's column matroid, most reliable first
        let mut order: Vec<usize> = (0..16).collect();
        order.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(b.cmp(&a)));
        let mut chosen: Vec<usize> = Vec::new();
        for &i in &order {
            let mut cols = chosen.clone();
            cols.push(i);
            if code.generator().select_columns(&cols).rank() == cols.len() {
                chosen.push(i);
            }
        }
        let mut right: Vec<usize> = sys.column_perm[sys.redundancy()..].to_vec();
        right.sort();
        chosen.sort();
        assert_eq!(right, chosen);
    }
}
