//! Dense linear algebra over GF(2).
//!
//! Vectors are bit-packed into `u64` words, bit `i` of the vector living in
//! word `i / 64` at bit position `i % 64`. Index 0 is the first transmitted
//! position. Matrices are stored row-major as a list of packed rows.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{BitXor, BitXorAssign};

use thiserror::Error;

const WORD_BITS: usize = 64;

#[inline]
fn words_for(len: usize) -> usize {
    len.div_ceil(WORD_BITS)
}

/// Errors raised by GF(2) operations and the matrix text format.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Gf2Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix is rank deficient: no pivot available for row {row}")]
    RankDeficient { row: usize },
    #[error("matrix text line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// A fixed-length vector over GF(2).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitVector {
    words: Vec<u64>,
    len: usize,
}

impl BitVector {
    pub fn zeros(len: usize) -> Self {
        BitVector {
            words: vec![0; words_for(len)],
            len,
        }
    }

    pub fn ones(len: usize) -> Self {
        let mut v = BitVector::zeros(len);
        for i in 0..len {
            v.set(i, true);
        }
        v
    }

    /// Builds a vector from `0`/`1` integers; any nonzero value counts as 1.
    pub fn from_bits(bits: &[u8]) -> Self {
        let mut v = BitVector::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b != 0 {
                v.set(i, true);
            }
        }
        v
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut v = BitVector::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            v.set(i, b);
        }
        v
    }

    /// Builds a vector of length `len` with ones at `positions`.
    pub fn from_support(len: usize, positions: &[usize]) -> Self {
        let mut v = BitVector::zeros(len);
        for &p in positions {
            v.set(p, true);
        }
        v
    }

    /// Builds a vector from the low `len` bits of `value`, bit `i` of the
    /// integer becoming position `i`.
    pub fn from_u64(value: u64, len: usize) -> Self {
        assert!(len <= WORD_BITS);
        let mut v = BitVector::zeros(len);
        if len > 0 {
            let mask = if len == WORD_BITS { u64::MAX } else { (1u64 << len) - 1 };
            v.words[0] = value & mask;
        }
        v
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        (self.words[i / WORD_BITS] >> (i % WORD_BITS)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        let mask = 1u64 << (i % WORD_BITS);
        if value {
            self.words[i / WORD_BITS] |= mask;
        } else {
            self.words[i / WORD_BITS] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        self.words[i / WORD_BITS] ^= 1u64 << (i % WORD_BITS);
    }

    /// Hamming weight.
    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    /// Overwrites the packed words; `words` must have the packed length and
    /// no bits set past `len`.
    pub fn copy_from_words(&mut self, words: &[u64]) {
        self.words.copy_from_slice(words);
    }

    /// Inner product over GF(2).
    pub fn dot(&self, other: &BitVector) -> bool {
        assert_eq!(self.len, other.len, "dot product of unequal lengths");
        let ones: u32 = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones())
            .sum();
        ones & 1 == 1
    }

    /// Positions holding a one, in increasing order.
    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut rest = w;
            std::iter::from_fn(move || {
                if rest == 0 {
                    None
                } else {
                    let tz = rest.trailing_zeros() as usize;
                    rest &= rest - 1;
                    Some(wi * WORD_BITS + tz)
                }
            })
        })
    }

    pub fn to_bits(&self) -> Vec<u8> {
        (0..self.len).map(|i| self.get(i) as u8).collect()
    }

    /// Lexicographic order over positions: at the first index where the two
    /// vectors differ, the one holding 0 comes first.
    pub fn lex_cmp(&self, other: &BitVector) -> Ordering {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter().zip(&other.words) {
            let diff = a ^ b;
            if diff != 0 {
                let first = diff.trailing_zeros();
                return if (a >> first) & 1 == 0 {
                    Ordering::Less
                } else {
                    Ordering::Greater
                };
            }
        }
        Ordering::Equal
    }

    /// Copy of positions `start..end`.
    pub fn slice(&self, start: usize, end: usize) -> BitVector {
        assert!(start <= end && end <= self.len);
        let mut out = BitVector::zeros(end - start);
        for i in self.support().skip_while(|&i| i < start).take_while(|&i| i < end) {
            out.set(i - start, true);
        }
        out
    }

    /// Concatenation `(self, tail)`.
    pub fn concat(&self, tail: &BitVector) -> BitVector {
        let mut out = BitVector::zeros(self.len + tail.len);
        for i in self.support() {
            out.set(i, true);
        }
        for i in tail.support() {
            out.set(self.len + i, true);
        }
        out
    }
}

impl fmt::Debug for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVector({self})")
    }
}

impl fmt::Display for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl std::str::FromStr for BitVector {
    type Err = Gf2Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut v = BitVector::zeros(s.len());
        for (i, ch) in s.chars().enumerate() {
            match ch {
                '0' => {}
                '1' => v.set(i, true),
                other => {
                    return Err(Gf2Error::Parse {
                        line: 1,
                        message: format!("unexpected character {other:?} at column {}", i + 1),
                    })
                }
            }
        }
        Ok(v)
    }
}

impl BitXorAssign<&BitVector> for BitVector {
    fn bitxor_assign(&mut self, rhs: &BitVector) {
        assert_eq!(self.len, rhs.len, "xor of unequal lengths");
        for (a, b) in self.words.iter_mut().zip(&rhs.words) {
            *a ^= b;
        }
    }
}

impl BitXor<&BitVector> for &BitVector {
    type Output = BitVector;

    fn bitxor(self, rhs: &BitVector) -> BitVector {
        let mut out = self.clone();
        out ^= rhs;
        out
    }
}

/// A dense `rows x cols` matrix over GF(2).
#[derive(Clone, PartialEq, Eq)]
pub struct BitMatrix {
    rows: Vec<BitVector>,
    cols: usize,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        BitMatrix {
            rows: vec![BitVector::zeros(cols); rows],
            cols,
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = BitMatrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    /// Builds a matrix from row vectors that must all have length `cols`.
    pub fn from_rows(cols: usize, rows: Vec<BitVector>) -> Result<Self, Gf2Error> {
        if let Some(bad) = rows.iter().find(|r| r.len() != cols) {
            return Err(Gf2Error::DimensionMismatch {
                expected: cols,
                found: bad.len(),
            });
        }
        Ok(BitMatrix { rows, cols })
    }

    /// Convenience constructor from nested `0`/`1` slices.
    pub fn from_bit_rows(rows: &[&[u8]]) -> Result<Self, Gf2Error> {
        let cols = rows.first().map_or(0, |r| r.len());
        BitMatrix::from_rows(cols, rows.iter().map(|r| BitVector::from_bits(r)).collect())
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows.len()
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> bool {
        self.rows[r].get(c)
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        self.rows[r].set(c, value)
    }

    pub fn row(&self, r: usize) -> &BitVector {
        &self.rows[r]
    }

    pub fn row_vectors(&self) -> &[BitVector] {
        &self.rows
    }

    pub fn column(&self, c: usize) -> BitVector {
        let mut v = BitVector::zeros(self.rows());
        for (r, row) in self.rows.iter().enumerate() {
            if row.get(c) {
                v.set(r, true);
            }
        }
        v
    }

    pub fn columns(&self) -> Vec<BitVector> {
        (0..self.cols).map(|c| self.column(c)).collect()
    }

    pub fn transpose(&self) -> BitMatrix {
        BitMatrix {
            rows: self.columns(),
            cols: self.rows(),
        }
    }

    /// Matrix whose column `j` is column `order[j]` of `self`.
    pub fn select_columns(&self, order: &[usize]) -> BitMatrix {
        let rows = self
            .rows
            .iter()
            .map(|row| {
                let mut out = BitVector::zeros(order.len());
                for (j, &src) in order.iter().enumerate() {
                    if row.get(src) {
                        out.set(j, true);
                    }
                }
                out
            })
            .collect();
        BitMatrix {
            rows,
            cols: order.len(),
        }
    }

    /// The product `self * v^T`, one output bit per row.
    pub fn matvec_t(&self, v: &BitVector) -> Result<BitVector, Gf2Error> {
        if v.len() != self.cols {
            return Err(Gf2Error::DimensionMismatch {
                expected: self.cols,
                found: v.len(),
            });
        }
        let mut out = BitVector::zeros(self.rows());
        for (r, row) in self.rows.iter().enumerate() {
            if row.dot(v) {
                out.set(r, true);
            }
        }
        Ok(out)
    }

    /// Row vector times matrix: `v * self`.
    pub fn vecmat(&self, v: &BitVector) -> Result<BitVector, Gf2Error> {
        if v.len() != self.rows() {
            return Err(Gf2Error::DimensionMismatch {
                expected: self.rows(),
                found: v.len(),
            });
        }
        let mut out = BitVector::zeros(self.cols);
        for r in v.support() {
            out ^= &self.rows[r];
        }
        Ok(out)
    }

    /// Matrix product `self * other`.
    pub fn mul(&self, other: &BitMatrix) -> Result<BitMatrix, Gf2Error> {
        if self.cols != other.rows() {
            return Err(Gf2Error::DimensionMismatch {
                expected: self.cols,
                found: other.rows(),
            });
        }
        let rows = self
            .rows
            .iter()
            .map(|row| other.vecmat(row))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(BitMatrix { rows, cols: other.cols })
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(BitVector::is_zero)
    }

    /// GF(2) rank by forward elimination on a copy.
    pub fn rank(&self) -> usize {
        let mut rows = self.rows.clone();
        let mut rank = 0;
        for c in 0..self.cols {
            let Some(p) = (rank..rows.len()).find(|&r| rows[r].get(c)) else {
                continue;
            };
            rows.swap(rank, p);
            let pivot = rows[rank].clone();
            for row in rows.iter_mut().skip(rank + 1) {
                if row.get(c) {
                    *row ^= &pivot;
                }
            }
            rank += 1;
            if rank == rows.len() {
                break;
            }
        }
        rank
    }

    /// Parses the matrix text format: a `rows cols` header line followed by
    /// `rows` lines of exactly `cols` characters from `{0,1}`.
    pub fn parse_text(text: &str) -> Result<BitMatrix, Gf2Error> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines.next().ok_or(Gf2Error::Parse {
            line: 1,
            message: "missing `rows cols` header".into(),
        })?;
        let dims: Vec<&str> = header.split_whitespace().collect();
        let parse_dim = |s: &str| {
            s.parse::<usize>().map_err(|_| Gf2Error::Parse {
                line: 1,
                message: format!("invalid dimension {s:?}"),
            })
        };
        if dims.len() != 2 {
            return Err(Gf2Error::Parse {
                line: 1,
                message: "header must be `rows cols`".into(),
            });
        }
        let (nrows, ncols) = (parse_dim(dims[0])?, parse_dim(dims[1])?);
        let mut rows = Vec::with_capacity(nrows);
        for (idx, line) in lines {
            let line = line.trim_end_matches('\r');
            if rows.len() == nrows {
                return Err(Gf2Error::Parse {
                    line: idx + 1,
                    message: format!("more than {nrows} rows"),
                });
            }
            let row: BitVector = line.parse().map_err(|e| match e {
                Gf2Error::Parse { message, .. } => Gf2Error::Parse { line: idx + 1, message },
                other => other,
            })?;
            if row.len() != ncols {
                return Err(Gf2Error::Parse {
                    line: idx + 1,
                    message: format!("expected {ncols} columns, found {}", row.len()),
                });
            }
            rows.push(row);
        }
        if rows.len() != nrows {
            return Err(Gf2Error::Parse {
                line: text.lines().count(),
                message: format!("expected {nrows} rows, found {}", rows.len()),
            });
        }
        Ok(BitMatrix { rows, cols: ncols })
    }

    /// Serializes to the matrix text format.
    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.rows(), self.cols);
        for row in &self.rows {
            out.push_str(&row.to_string());
            out.push('\n');
        }
        out
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix {}x{} [", self.rows(), self.cols)?;
        for row in &self.rows {
            writeln!(f, "  {row}")?;
        }
        write!(f, "]")
    }
}

/// A full-row-rank parity-check matrix reduced to `[I | P]` after a column
/// permutation.
///
/// Systematic position `j` corresponds to original position
/// `column_perm[j]`. Positions `0..n-k` form the identity (left) part and
/// `n-k..n` the right part that `P` acts on.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SystematicParity {
    pub p: BitMatrix,
    pub column_perm: Vec<usize>,
    pub n: usize,
    pub k: usize,
    p_columns: Vec<BitVector>,
}

impl SystematicParity {
    /// Reorders the right part so its original positions increase. This keeps
    /// `[I | P]` systematic and makes lexicographic order over the right part
    /// agree with lexicographic order over original positions.
    fn new(p: BitMatrix, mut column_perm: Vec<usize>, n: usize, k: usize) -> Self {
        let r = n - k;
        let mut right: Vec<usize> = (0..k).collect();
        right.sort_by_key(|&j| column_perm[r + j]);
        let p = p.select_columns(&right);
        let sorted: Vec<usize> = right.iter().map(|&j| column_perm[r + j]).collect();
        column_perm[r..].copy_from_slice(&sorted);
        let p_columns = p.columns();
        SystematicParity {
            p,
            column_perm,
            n,
            k,
            p_columns,
        }
    }

    pub fn redundancy(&self) -> usize {
        self.n - self.k
    }

    /// Column `j` of `P`, i.e. the syndrome contribution of right position `j`.
    pub fn p_column(&self, j: usize) -> &BitVector {
        &self.p_columns[j]
    }

    /// Reorders an original-order vector into systematic order.
    pub fn to_systematic(&self, x: &BitVector) -> BitVector {
        let mut out = BitVector::zeros(self.n);
        for (j, &src) in self.column_perm.iter().enumerate() {
            if x.get(src) {
                out.set(j, true);
            }
        }
        out
    }

    /// Inverse of [`SystematicParity::to_systematic`].
    pub fn to_original(&self, x: &BitVector) -> BitVector {
        let mut out = BitVector::zeros(self.n);
        for j in x.support() {
            out.set(self.column_perm[j], true);
        }
        out
    }

    /// Syndrome of a systematic-order vector under `[I | P]`.
    pub fn syndrome(&self, x_sys: &BitVector) -> BitVector {
        let r = self.redundancy();
        let mut s = x_sys.slice(0, r);
        for j in x_sys.support().filter(|&j| j >= r) {
            s ^= &self.p_columns[j - r];
        }
        s
    }

    /// Re-encoding: the left part `e_L = s + P e_R^T` that makes `(e_L, e_R)`
    /// a valid pattern for systematic syndrome `s`.
    pub fn reencode(&self, s: &BitVector, e_right: &BitVector) -> BitVector {
        let mut e_left = s.clone();
        for j in e_right.support() {
            e_left ^= &self.p_columns[j];
        }
        e_left
    }

    /// Same reduced matrix, with column labels pushed through `map`: the
    /// matrix this form was computed from had its column `c` taken from
    /// column `map[c]` of some outer matrix.
    pub fn relabel(self, map: &[usize]) -> SystematicParity {
        assert_eq!(map.len(), self.n);
        let perm = self.column_perm.iter().map(|&c| map[c]).collect();
        SystematicParity::new(self.p, perm, self.n, self.k)
    }

    /// A `k x n` basis of the null space, in original column order.
    ///
    /// In systematic order the basis is `[P^T | I]`.
    pub fn null_space(&self) -> BitMatrix {
        let r = self.redundancy();
        let rows = (0..self.k)
            .map(|j| {
                let mut row = BitVector::zeros(self.n);
                for i in self.p_columns[j].support() {
                    row.set(self.column_perm[i], true);
                }
                row.set(self.column_perm[r + j], true);
                row
            })
            .collect();
        BitMatrix { rows, cols: self.n }
    }
}

/// Reduces a full-row-rank matrix to `[I | P]` by row operations, swapping a
/// column into pivot position only when the current one cannot supply a
/// pivot. The swap partner is the smallest-index later column with a one
/// among the unreduced rows. Right-part columns end up in increasing
/// original order.
pub fn systematize(h: &BitMatrix) -> Result<SystematicParity, Gf2Error> {
    let r = h.rows();
    let n = h.cols();
    if r > n {
        return Err(Gf2Error::RankDeficient { row: n });
    }
    let mut rows = h.rows.clone();
    let mut perm: Vec<usize> = (0..n).collect();

    for i in 0..r {
        let pivot_row = match (i..r).find(|&row| rows[row].get(i)) {
            Some(row) => row,
            None => {
                let (col, row) = (i + 1..n)
                    .find_map(|c| (i..r).find(|&row| rows[row].get(c)).map(|row| (c, row)))
                    .ok_or(Gf2Error::RankDeficient { row: i })?;
                for v in rows.iter_mut() {
                    let (a, b) = (v.get(i), v.get(col));
                    v.set(i, b);
                    v.set(col, a);
                }
                perm.swap(i, col);
                row
            }
        };
        rows.swap(i, pivot_row);
        let pivot = rows[i].clone();
        for (other, row) in rows.iter_mut().enumerate() {
            if other != i && row.get(i) {
                *row ^= &pivot;
            }
        }
    }

    let k = n - r;
    let p_rows = rows.iter().map(|row| row.slice(r, n)).collect();
    let p = BitMatrix { rows: p_rows, cols: k };
    Ok(SystematicParity::new(p, perm, n, k))
}

/// Basis of the null space of a full-row-rank matrix, one basis vector per row.
pub fn null_space(m: &BitMatrix) -> Result<BitMatrix, Gf2Error> {
    Ok(systematize(m)?.null_space())
}
