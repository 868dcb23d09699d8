use guessdec::gf2::BitVector;
use guessdec::tep::{kth_pattern, TepSorter};
use proptest::prelude::*;

fn brute_force(rel: &[f64]) -> Vec<BitVector> {
    let n = rel.len();
    let mut all: Vec<(f64, BitVector)> = (0..(1u64 << n))
        .map(|bits| {
            let e = BitVector::from_u64(bits, n);
            (e.support().map(|i| rel[i]).sum::<f64>(), e)
        })
        .collect();
    all.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.lex_cmp(&b.1)));
    all.into_iter().map(|(_, e)| e).collect()
}

fn reliabilities() -> impl Strategy<Value = Vec<f64>> {
    prop_oneof![
        prop::collection::vec(0.0f64..10.0, 0..11),
        // small integers: many exact ties
        prop::collection::vec((0u8..4).prop_map(f64::from), 0..11),
    ]
}

proptest! {
    #[test]
    fn matches_brute_force_order(rel in reliabilities()) {
        let got: Vec<BitVector> = TepSorter::new(&rel).unwrap().collect();
        prop_assert_eq!(got, brute_force(&rel));
    }

    #[test]
    fn emitted_weights_are_non_decreasing_and_exact(rel in prop::collection::vec(0.0f64..100.0, 1..14)) {
        let mut s = TepSorter::new(&rel).unwrap();
        let mut last = -1.0;
        while let Some(e) = s.next_emission() {
            prop_assert!(e.weight >= last);
            let direct: f64 = e.pattern.support().map(|i| rel[i]).sum();
            prop_assert!((e.weight - direct).abs() <= 1e-9 * (1.0 + direct));
            last = e.weight;
        }
        prop_assert_eq!(s.emitted(), 1u64 << rel.len());
    }

    #[test]
    fn frontier_work_is_linear(rel in prop::collection::vec(0.0f64..5.0, 20..60), m in 1u64..3000) {
        let mut s = TepSorter::new(&rel).unwrap();
        for _ in 0..m {
            s.next().unwrap();
        }
        prop_assert!(s.frontier_ops() <= 3 * m + 1);
    }
}

#[test]
fn kth_pattern_agrees_with_brute_force_for_every_index() {
    // dyadic values keep tied sums exact regardless of summation order
    let rel = [0.875, 0.125, 2.5, 0.125, 1.75, 0.375, 3.25, 0.875, 0.0625, 1.125];
    let expected = brute_force(&rel);
    for (k, e) in expected.iter().enumerate() {
        assert_eq!(&kth_pattern(&rel, k as u64).unwrap(), e, "k = {k}");
    }
}

#[test]
fn long_vectors_span_several_words() {
    let rel: Vec<f64> = (0..150).map(|i| 1.0 + i as f64).collect();
    let got: Vec<BitVector> = TepSorter::new(&rel).unwrap().take(4).collect();
    assert!(got[0].is_zero());
    assert_eq!(got[1].support().collect::<Vec<_>>(), vec![0]);
    assert_eq!(got[2].support().collect::<Vec<_>>(), vec![1]);
    // weight 3: {2} and {0,1} tie; {0,1} has a 1 at position 0 so sorts later
    assert_eq!(got[3].support().collect::<Vec<_>>(), vec![2]);
}
