use guessdec::channel::ChannelKind;
use guessdec::codes::{hamming_7_4, reed_muller, LinearCode};
use guessdec::decoders::{DecoderConfig, DecoderKind};
use guessdec::gf2::BitMatrix;
use guessdec::sim::{find_snr_at_fer, run_paired, SimConfig, SimError, CSV_HEADER};

fn repetition3() -> LinearCode {
    let h = BitMatrix::from_bit_rows(&[&[1, 1, 0], &[1, 0, 1]]).unwrap();
    LinearCode::from_parity("rep3", h).unwrap()
}

fn gcd() -> DecoderConfig {
    DecoderConfig::new(DecoderKind::Gcd)
}

#[test]
fn repetition_fer_matches_majority_vote() {
    let frames = 200_000u64;
    for (i, p) in [0.02, 0.1, 0.3].into_iter().enumerate() {
        let cfg = SimConfig::new(
            repetition3(),
            ChannelKind::Bsc { p },
            vec![gcd()],
            frames,
            30 + i as u64,
        );
        let res = run_paired(&cfg).unwrap();
        let fer = res.decoders[0].fer();
        let exact = 3.0 * p * p * (1.0 - p) + p.powi(3);
        let sigma = (exact * (1.0 - exact) / frames as f64).sqrt();
        assert!((fer - exact).abs() <= 3.0 * sigma, "p={p}: {fer} vs {exact} ± {sigma}");
    }
}

#[test]
fn results_do_not_depend_on_worker_count() {
    let mut cfg = SimConfig::new(
        hamming_7_4(),
        ChannelKind::Awgn { snr_db: 1.0 },
        vec![DecoderConfig::new(DecoderKind::Gnd), gcd()],
        3000,
        99,
    );
    cfg.checks.dominance = true;
    cfg.checks.ml_agreement = true;
    let runs: Vec<_> = [1, 3]
        .into_iter()
        .map(|jobs| {
            cfg.jobs = jobs;
            let res = run_paired(&cfg).unwrap();
            (res.csv_rows(), res.dominance_violations, res.ml_disagreements)
        })
        .collect();
    assert_eq!(runs[0], runs[1]);
    assert_eq!(runs[0].1, 0);
    assert_eq!(runs[0].2, 0);
}

#[test]
fn different_seeds_give_different_frames() {
    let run = |seed| {
        let cfg = SimConfig::new(hamming_7_4(), ChannelKind::Bsc { p: 0.1 }, vec![gcd()], 2000, seed);
        run_paired(&cfg).unwrap().csv_rows()
    };
    assert_eq!(run(1), run(1));
    assert_ne!(run(1), run(2));
}

#[test]
fn csv_rows_follow_header_layout() {
    let cfg = SimConfig::new(
        hamming_7_4(),
        ChannelKind::Bsc { p: 0.05 },
        vec![DecoderConfig::new(DecoderKind::Gnd), gcd()],
        100,
        4,
    );
    let rows = run_paired(&cfg).unwrap().csv_rows();
    let columns = CSV_HEADER.split(',').count();
    let lines: Vec<&str> = rows.lines().collect();
    assert_eq!(lines.len(), 2);
    for line in &lines {
        assert_eq!(line.split(',').count(), columns);
    }
    assert!(lines[0].starts_with("hamming74,7,4,bsc,0.05,gnd,100,"));
    assert!(lines[1].ends_with(",4"));
}

#[test]
fn snr_search_lands_near_target() {
    let mut base = SimConfig::new(
        reed_muller(1, 4).unwrap(),
        ChannelKind::Awgn { snr_db: 0.0 },
        vec![gcd()],
        50_000,
        8,
    );
    base.stop_at_errors = Some(100);
    let est = find_snr_at_fer(&base, gcd(), 0.05, 0.05, (-2.0, 8.0)).unwrap();
    assert!(est.errors >= 100 || est.frames == 50_000);
    // bisection stops inside the confidence interval or on a 0.05 dB bracket
    assert!((est.fer - 0.05).abs() <= est.fer_ci95.max(0.02), "{est:?}");
    // the estimate must be consistent with a fresh run at the returned SNR
    let mut check = base.clone();
    check.channel = ChannelKind::Awgn { snr_db: est.snr_db };
    let fer = run_paired(&check).unwrap().decoders[0].fer();
    assert_eq!(fer, est.fer);
}

#[test]
fn unbracketed_target_is_reported() {
    let mut base = SimConfig::new(hamming_7_4(), ChannelKind::Awgn { snr_db: 0.0 }, vec![gcd()], 2000, 8);
    base.stop_at_errors = Some(50);
    let err = find_snr_at_fer(&base, gcd(), 1e-2, 0.1, (20.0, 30.0)).unwrap_err();
    assert!(matches!(err, SimError::Bracket { .. }));
}
