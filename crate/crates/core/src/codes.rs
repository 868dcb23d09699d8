//! Binary linear block codes: builtin constructions and the matrix-file loader.

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::gf2::{null_space, systematize, BitMatrix, BitVector, Gf2Error, SystematicParity};

#[derive(Debug, Error)]
pub enum CodeError {
    #[error("invalid code parameters: {0}")]
    InvalidParameters(String),
    #[error(transparent)]
    Gf2(#[from] Gf2Error),
    #[error("cannot read matrix file {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// A binary linear block code `C[n, k]` with both generator and parity-check
/// matrices plus the cached systematic form of the parity-check matrix.
#[derive(Clone, Debug)]
pub struct LinearCode {
    name: String,
    n: usize,
    k: usize,
    generator: BitMatrix,
    parity: BitMatrix,
    parity_columns: Vec<BitVector>,
    systematic: SystematicParity,
}

impl LinearCode {
    /// Builds a code from a full-row-rank parity-check matrix.
    pub fn from_parity(name: impl Into<String>, parity: BitMatrix) -> Result<Self, CodeError> {
        let systematic = systematize(&parity)?;
        let generator = systematic.null_space();
        Ok(LinearCode {
            name: name.into(),
            n: parity.cols(),
            k: generator.rows(),
            generator,
            parity_columns: parity.columns(),
            parity,
            systematic,
        })
    }

    /// Builds a code from a full-row-rank generator matrix.
    pub fn from_generator(name: impl Into<String>, generator: BitMatrix) -> Result<Self, CodeError> {
        let parity = null_space(&generator)?;
        let systematic = systematize(&parity)?;
        Ok(LinearCode {
            name: name.into(),
            n: generator.cols(),
            k: generator.rows(),
            generator,
            parity_columns: parity.columns(),
            parity,
            systematic,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn rate(&self) -> f64 {
        self.k as f64 / self.n as f64
    }

    pub fn generator(&self) -> &BitMatrix {
        &self.generator
    }

    pub fn parity(&self) -> &BitMatrix {
        &self.parity
    }

    /// Column `i` of the parity-check matrix: the syndrome of a single error
    /// at position `i`.
    pub fn parity_column(&self, i: usize) -> &BitVector {
        &self.parity_columns[i]
    }

    pub fn systematic(&self) -> &SystematicParity {
        &self.systematic
    }

    /// Codeword `u G` for an information word of length `k`.
    pub fn encode(&self, info: &BitVector) -> Result<BitVector, Gf2Error> {
        self.generator.vecmat(info)
    }

    pub fn syndrome(&self, x: &BitVector) -> Result<BitVector, Gf2Error> {
        self.parity.matvec_t(x)
    }

    pub fn is_codeword(&self, x: &BitVector) -> bool {
        self.syndrome(x).map(|s| s.is_zero()).unwrap_or(false)
    }

    /// All `2^k` codewords in Gray-code order. Intended for small `k`.
    pub fn codewords(&self) -> Vec<BitVector> {
        assert!(self.k < 31, "codeword enumeration needs k < 31");
        let mut out = Vec::with_capacity(1 << self.k);
        let mut c = BitVector::zeros(self.n);
        out.push(c.clone());
        for step in 1u64..(1u64 << self.k) {
            c ^= self.generator.row(step.trailing_zeros() as usize);
            out.push(c.clone());
        }
        out
    }

    /// Minimum Hamming distance by exhaustive enumeration.
    pub fn min_distance(&self) -> usize {
        self.codewords()
            .iter()
            .map(BitVector::weight)
            .filter(|&w| w > 0)
            .min()
            .unwrap_or(0)
    }
}

/// The Hamming `C[7,4]` code. Its parity-check columns are the seven nonzero
/// length-3 vectors: the weight-1 columns first, then 011, 101, 110, 111, so
/// that `H = [I | P]` without any column swap.
pub fn hamming_7_4() -> LinearCode {
    let values = [0b100u8, 0b010, 0b001, 0b011, 0b101, 0b110, 0b111];
    let mut h = BitMatrix::zeros(3, 7);
    for (c, v) in values.iter().enumerate() {
        for r in 0..3 {
            h.set(r, c, (v >> (2 - r)) & 1 == 1);
        }
    }
    LinearCode::from_parity("hamming74", h).expect("Hamming parity matrix has full rank")
}

/// Reed-Muller code `RM(r, m)` of length `2^m`, generated by evaluating every
/// monomial of degree at most `r` at the points of `F_2^m`. Point `t` has
/// coordinate `i` equal to bit `i` of `t`.
pub fn reed_muller(r: usize, m: usize) -> Result<LinearCode, CodeError> {
    if r > m || m > 16 {
        return Err(CodeError::InvalidParameters(format!(
            "Reed-Muller RM({r},{m}) needs 0 <= r <= m <= 16"
        )));
    }
    let n = 1usize << m;
    let mut rows = Vec::new();
    for degree in 0..=r {
        for vars in combinations(m, degree) {
            let mask: usize = vars.iter().map(|&v| 1usize << v).sum();
            let mut row = BitVector::zeros(n);
            for t in 0..n {
                if t & mask == mask {
                    row.set(t, true);
                }
            }
            rows.push(row);
        }
    }
    let g = BitMatrix::from_rows(n, rows)?;
    LinearCode::from_generator(format!("rm_{r}_{m}"), g)
}

/// All `size`-subsets of `0..n` in lexicographic order.
fn combinations(n: usize, size: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, size: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == size {
            out.push(cur.clone());
            return;
        }
        for v in start..n {
            cur.push(v);
            rec(v + 1, n, size, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, size, &mut Vec::new(), &mut out);
    out
}

/// A code with a generator drawn uniformly from the full-rank `k x n`
/// matrices, resampling until full rank. Deterministic in `seed`.
pub fn random_code(n: usize, k: usize, seed: u64) -> Result<LinearCode, CodeError> {
    if k == 0 || k >= n {
        return Err(CodeError::InvalidParameters(format!(
            "random code needs 0 < k < n, got n={n}, k={k}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let rows = (0..k)
            .map(|_| {
                let bits: Vec<bool> = (0..n).map(|_| rng.random()).collect();
                BitVector::from_bools(&bits)
            })
            .collect();
        let g = BitMatrix::from_rows(n, rows)?;
        if g.rank() == k {
            return LinearCode::from_generator(format!("random_{n}_{k}_{seed}"), g);
        }
    }
}

/// Loads a code from a parity-check matrix in the matrix text format.
pub fn load_code(path: impl AsRef<Path>) -> Result<LinearCode, CodeError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| CodeError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let h = BitMatrix::parse_text(&text)?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "file".to_string());
    LinearCode::from_parity(name, h)
}
