//! Lazy enumeration of test error patterns in non-decreasing soft weight.
//!
//! Positions are ranked by increasing reliability. Every nonempty pattern is
//! an index set over that ranking and has exactly one parent: removing its
//! largest rank (when the set is a single "extension"), or sliding that rank
//! back by one. Conversely each popped pattern pushes at most two children:
//!
//! * extend: add rank `m + 1`
//! * slide: replace the largest rank `m` by `m + 1`
//!
//! Both children weigh at least as much as their parent, so a min-heap over
//! the frontier emits patterns in weight order. Ties are broken
//! lexicographically in the caller's position order (a 0 at the first
//! differing position sorts first). Equal reliabilities are ranked by
//! decreasing position, which keeps every parent ahead of its children under
//! that tie rule as well.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use smallvec::SmallVec;
use thiserror::Error;

use crate::gf2::BitVector;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TepError {
    #[error("reliability at position {position} is {value}; reliabilities must be non-negative")]
    InvalidReliability { position: usize, value: f64 },
    #[error("pattern index {k} out of range for length {n}")]
    IndexOutOfRange { k: u64, n: usize },
}

type Words = SmallVec<[u64; 2]>;

const NO_RANK: usize = usize::MAX;

#[derive(Clone, Debug)]
struct Node {
    weight: f64,
    /// Weight of the set without its largest rank.
    prefix: f64,
    /// Largest rank in the set, or `NO_RANK` for the empty pattern.
    last: usize,
    words: Words,
}

fn lex_cmp_words(a: &[u64], b: &[u64]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        let diff = x ^ y;
        if diff != 0 {
            let first = diff.trailing_zeros();
            return if (x >> first) & 1 == 0 {
                Ordering::Less
            } else {
                Ordering::Greater
            };
        }
    }
    Ordering::Equal
}

impl Node {
    fn key_cmp(&self, other: &Node) -> Ordering {
        self.weight
            .total_cmp(&other.weight)
            .then_with(|| lex_cmp_words(&self.words, &other.words))
    }
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.key_cmp(other) == Ordering::Equal
    }
}

impl Eq for Node {}

impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Node {
    // reversed: BinaryHeap is a max-heap
    fn cmp(&self, other: &Self) -> Ordering {
        other.key_cmp(self)
    }
}

/// A pattern emitted by the sorter together with its soft weight.
#[derive(Clone, Debug, PartialEq)]
pub struct Emission {
    pub pattern: BitVector,
    pub weight: f64,
}

/// Single-consumer enumerator over all `2^n` binary patterns of length `n`
/// ordered by `(soft weight, lexicographic)`.
#[derive(Clone, Debug)]
pub struct TepSorter {
    n: usize,
    /// `rank -> position`
    order: Vec<usize>,
    /// Reliabilities indexed by rank.
    ranked: Vec<f64>,
    heap: BinaryHeap<Node>,
    emitted: u64,
    frontier_ops: u64,
}

impl TepSorter {
    pub fn new(reliabilities: &[f64]) -> Result<Self, TepError> {
        if let Some((position, &value)) = reliabilities
            .iter()
            .enumerate()
            .find(|(_, v)| !v.is_finite() || **v < 0.0)
        {
            return Err(TepError::InvalidReliability { position, value });
        }
        let n = reliabilities.len();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| reliabilities[a].total_cmp(&reliabilities[b]).then_with(|| b.cmp(&a)));
        let ranked = order.iter().map(|&i| reliabilities[i]).collect();
        let mut heap = BinaryHeap::new();
        heap.push(Node {
            weight: 0.0,
            prefix: 0.0,
            last: NO_RANK,
            words: SmallVec::from_elem(0, n.div_ceil(64)),
        });
        Ok(TepSorter {
            n,
            order,
            ranked,
            heap,
            emitted: 0,
            frontier_ops: 1,
        })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Number of patterns emitted so far.
    pub fn emitted(&self) -> u64 {
        self.emitted
    }

    /// Heap pushes plus pops performed so far.
    pub fn frontier_ops(&self) -> u64 {
        self.frontier_ops
    }

    #[inline]
    fn toggle(words: &mut Words, position: usize) {
        words[position / 64] ^= 1u64 << (position % 64);
    }

    fn push(&mut self, node: Node) {
        self.frontier_ops += 1;
        self.heap.push(node);
    }

    /// Emits the next pattern with its weight, or `None` once all `2^n`
    /// patterns have been produced.
    pub fn next_emission(&mut self) -> Option<Emission> {
        let mut pattern = BitVector::zeros(self.n);
        let weight = self.next_into(&mut pattern)?;
        Some(Emission { pattern, weight })
    }

    /// Like [`TepSorter::next_emission`] but writes the pattern into `out`,
    /// which must have length `n`. Returns the pattern's weight.
    pub fn next_into(&mut self, out: &mut BitVector) -> Option<f64> {
        debug_assert_eq!(out.len(), self.n);
        let node = self.heap.pop()?;
        self.frontier_ops += 1;
        self.emitted += 1;

        let next_rank = if node.last == NO_RANK { 0 } else { node.last + 1 };
        if next_rank < self.n {
            let rel = self.ranked[next_rank];
            let pos = self.order[next_rank];

            let mut extended = node.words.clone();
            Self::toggle(&mut extended, pos);
            self.push(Node {
                weight: node.weight + rel,
                prefix: node.weight,
                last: next_rank,
                words: extended,
            });

            if node.last != NO_RANK {
                let mut slid = node.words.clone();
                Self::toggle(&mut slid, self.order[node.last]);
                Self::toggle(&mut slid, pos);
                self.push(Node {
                    weight: node.prefix + rel,
                    prefix: node.prefix,
                    last: next_rank,
                    words: slid,
                });
            }
        }

        out.copy_from_words(&node.words);
        Some(node.weight)
    }
}

impl Iterator for TepSorter {
    type Item = BitVector;

    fn next(&mut self) -> Option<BitVector> {
        self.next_emission().map(|e| e.pattern)
    }
}

/// The `k`-th pattern (0-based) a fresh sorter would emit.
pub fn kth_pattern(reliabilities: &[f64], k: u64) -> Result<BitVector, TepError> {
    let n = reliabilities.len();
    if n < 64 && k >= (1u64 << n) {
        return Err(TepError::IndexOutOfRange { k, n });
    }
    let mut sorter = TepSorter::new(reliabilities)?;
    let mut last = None;
    for _ in 0..=k {
        last = sorter.next();
    }
    last.ok_or(TepError::IndexOutOfRange { k, n })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn emit_all(rel: &[f64]) -> Vec<String> {
        TepSorter::new(rel).unwrap().map(|p| p.to_string()).collect()
    }

    #[test]
    fn empty_length_emits_once() {
        let mut s = TepSorter::new(&[]).unwrap();
        assert_eq!(s.next().unwrap().len(), 0);
        assert!(s.next().is_none());
    }

    #[test]
    fn first_emission_is_zero() {
        let mut s = TepSorter::new(&[0.4, 0.1, 3.0]).unwrap();
        assert!(s.next().unwrap().is_zero());
    }

    #[test]
    fn zero_reliability_comes_second() {
        let mut s = TepSorter::new(&[0.7, 0.0, 0.2]).unwrap();
        s.next();
        let second = s.next_emission().unwrap();
        assert_eq!(second.pattern.to_string(), "010");
        assert_eq!(second.weight, 0.0);
    }

    #[test]
    fn increasing_reliabilities_order() {
        assert_eq!(
            emit_all(&[1.0, 2.0, 3.0]),
            ["000", "100", "010", "001", "110", "101", "011", "111"]
        );
    }

    #[test]
    fn close_pair_after_strong_position() {
        let order = emit_all(&[5.0, 0.1, 0.1]);
        assert_eq!(&order[1..3], ["001", "010"]);
    }

    #[test]
    fn equal_reliabilities_order_by_weight_then_lex() {
        assert_eq!(
            emit_all(&[1.0; 3]),
            ["000", "001", "010", "100", "011", "101", "110", "111"]
        );
    }

    #[test]
    fn rejects_negative() {
        assert!(matches!(
            TepSorter::new(&[1.0, -0.5]),
            Err(TepError::InvalidReliability { position: 1, .. })
        ));
        assert!(TepSorter::new(&[f64::NAN]).is_err());
    }

    #[test]
    fn kth_pattern_bounds() {
        let rel = [0.3, 1.2, 0.9];
        assert!(kth_pattern(&rel, 0).unwrap().is_zero());
        assert_eq!(kth_pattern(&rel, 7).unwrap(), BitVector::ones(3));
        assert!(kth_pattern(&rel, 8).is_err());
    }

    #[test]
    fn frontier_work_is_linear_in_emissions() {
        let rel: Vec<f64> = (0..40).map(|i| ((i * 37) % 11) as f64 * 0.3 + 0.1).collect();
        let mut s = TepSorter::new(&rel).unwrap();
        for m in 1..=5000u64 {
            s.next().unwrap();
            assert!(s.frontier_ops() <= 3 * m + 1);
        }
    }
}
