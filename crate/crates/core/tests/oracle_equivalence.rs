mod common;

use common::{basis_runs, random_unit_seq, rng};
use infoshot_core::keyframer::{shot_scores, FrameScores};
use infoshot_core::oracle::{
    exhaustive_min_distortion, exhaustive_pair, naive_boundary_score, naive_distortion, naive_greedy_segment,
    naive_shot_scores,
};
use infoshot_core::{
    boundary_score, distortion, greedy_segment, select_pair, AffinityView, Error, KeyframerConfig, SegmenterConfig,
};
use rand::Rng;

#[test]
fn boundary_score_matches_naive_on_random_cases() {
    let mut r = rng(11);
    let mut worst: f64 = 0.0;
    for _ in 0..500 {
        let frames = r.random_range(2..40);
        let dim = r.random_range(1..12);
        let seq = random_unit_seq(&mut r, frames, dim);
        let view = AffinityView::new(&seq).unwrap();
        let a = r.random_range(0..frames - 1);
        let b = r.random_range(a + 2..=frames);
        let t = r.random_range(a + 1..b);
        let k = r.random_range(1..16);
        let fast = boundary_score(&view, t, k, a..b).unwrap();
        let slow = naive_boundary_score(&seq, t, k, a..b).unwrap();
        worst = worst.max((fast - slow).abs());
    }
    assert!(worst < 1e-9, "max abs diff {worst}");
}

#[test]
fn boundary_score_fixed_cases() {
    let seq = basis_runs(&[(0, 5), (1, 5)], 2);
    assert_eq!(naive_boundary_score(&seq, 5, 3, 0..10).unwrap(), 1.0);
    let seq = basis_runs(&[(0, 12)], 3);
    assert!(naive_boundary_score(&seq, 6, 3, 0..12).unwrap().abs() < 1e-12);

    let mut r = rng(5);
    let seq = random_unit_seq(&mut r, 12, 6);
    let view = AffinityView::new(&seq).unwrap();
    let fast = boundary_score(&view, 6, 3, 0..12).unwrap();
    let slow = naive_boundary_score(&seq, 6, 3, 0..12).unwrap();
    assert!((fast - slow).abs() < 1e-9);
}

#[test]
fn best_split_three_runs_matches_oracle() {
    let seq = basis_runs(&[(0, 8), (1, 8), (2, 8)], 3);
    // k = clamp(24 / 20, 3, 15) = 3
    assert_eq!(naive_boundary_score(&seq, 8, 3, 0..24).unwrap(), 1.0);
    assert_eq!(naive_boundary_score(&seq, 16, 3, 0..24).unwrap(), 1.0);
    let view = AffinityView::new(&seq).unwrap();
    assert_eq!(infoshot_core::best_split(&view, 0..24, &SegmenterConfig::default()), Some((8, 1.0)));
}

#[test]
fn shot_scores_match_naive() {
    let mut r = rng(3);
    let cfg = KeyframerConfig::default();
    for _ in 0..200 {
        let frames = r.random_range(1..40);
        let dim = r.random_range(2..8);
        let seq = random_unit_seq(&mut r, frames, dim);
        let view = AffinityView::new(&seq).unwrap().with_block_size(r.random_range(1..10)).unwrap();
        let a = r.random_range(0..frames);
        let b = r.random_range(a + 1..=frames);
        let k = r.random_range(1..4);
        let fast = shot_scores(&view, a..b, &KeyframerConfig { neighborhood_k: k, ..cfg }).unwrap();
        let slow = naive_shot_scores(&seq, a..b, k);
        for (x, y) in [
            (&fast.typicality, &slow.g),
            (&fast.volatility, &slow.v),
            (&fast.typ_norm, &slow.g_hat),
            (&fast.vol_norm, &slow.v_hat),
        ] {
            assert_eq!(x.len(), y.len());
            for (p, q) in x.iter().zip(y.iter()) {
                assert!((p - q).abs() < 1e-9, "{p} vs {q}");
            }
        }
    }
}

#[test]
fn outlier_shot_example_matches_naive() {
    let seq = basis_runs(&[(0, 2), (1, 1), (0, 2)], 2);
    let s = naive_shot_scores(&seq, 0..5, 1);
    assert_eq!(s.g, vec![0.75, 0.75, 0.0, 0.75, 0.75]);
    assert_eq!(s.v, vec![0.0, 0.5, 1.0, 0.5, 0.0]);
    assert_eq!(exhaustive_pair(&s.g_hat, &s.v_hat, 0.7, 0.5), (0, Some(2)));
    assert_eq!(exhaustive_pair(&[0.0; 4], &[0.0; 4], 0.7, 0.5), (0, Some(1)));
    assert_eq!(exhaustive_pair(&[0.0], &[0.0], 0.7, 0.5), (0, None));
}

#[test]
fn select_pair_matches_exhaustive() {
    let mut r = rng(17);
    for case in 0..1000 {
        let len = r.random_range(1..30);
        let cfg = KeyframerConfig {
            lambda: r.random_range(0.0..=1.0),
            alpha: r.random_range(0.0..=1.0),
            neighborhood_k: 1,
        };
        // Quantized raw scores produce plenty of exact ties.
        let raw = |r: &mut rand_chacha::ChaCha8Rng| -> Vec<f64> {
            if case % 2 == 0 {
                (0..len).map(|_| r.random_range(0..4) as f64 / 4.0).collect()
            } else {
                (0..len).map(|_| r.random_range(-1.0..1.0)).collect()
            }
        };
        let scores = FrameScores::from_raw(raw(&mut r), raw(&mut r));
        assert_eq!(
            select_pair(&scores, &cfg),
            exhaustive_pair(&scores.typ_norm, &scores.vol_norm, cfg.lambda, cfg.alpha),
            "case {case}"
        );
    }
}

#[test]
fn greedy_matches_naive_greedy() {
    let cfg = SegmenterConfig::default();
    let seq = basis_runs(&[(0, 100)], 2);
    let view = AffinityView::new(&seq).unwrap();
    let fast = greedy_segment(&view, 4, &cfg).unwrap();
    let slow = naive_greedy_segment(&seq, 4, (3, 15), (3, 300));
    assert_eq!(fast.segments, slow);
    assert_eq!(slow, vec![0..3, 3..6, 6..9, 9..100]);

    let mut r = rng(23);
    for _ in 0..30 {
        let frames = r.random_range(6..80);
        let seq = random_unit_seq(&mut r, frames, 8);
        let view = AffinityView::new(&seq).unwrap();
        let m = r.random_range(1..8);
        let cfg = SegmenterConfig {
            max_shot_len: r.random_range(6..100),
            ..SegmenterConfig::default()
        };
        let fast = greedy_segment(&view, m, &cfg).unwrap();
        let slow = naive_greedy_segment(&seq, m, (3, 15), (3, cfg.max_shot_len));
        assert_eq!(fast.segments, slow);
    }
}

#[test]
fn distortion_matches_enumeration() {
    let seq = basis_runs(&[(0, 2), (1, 2)], 2);
    let (set, d) = exhaustive_min_distortion(&seq, 2).unwrap();
    assert_eq!(d, 0.0);
    assert_eq!(set, vec![0, 2]);
    assert_eq!(distortion(&seq, &[0]).unwrap(), 0.5);
    assert_eq!(naive_distortion(&seq, &[0]), 0.5);

    let mut r = rng(29);
    for _ in 0..40 {
        let t = r.random_range(1..=14);
        let dim = r.random_range(2..6);
        let seq = random_unit_seq(&mut r, t, dim);
        for k in 1..=t.min(4) {
            let (set, d) = exhaustive_min_distortion(&seq, k).unwrap();
            assert_eq!(distortion(&seq, &set).unwrap(), d);
        }
        if t <= 4 {
            let all: Vec<usize> = (0..t).collect();
            let (set, d) = exhaustive_min_distortion(&seq, t).unwrap();
            assert_eq!(set, all);
            assert!(d.abs() < 1e-12);
        }
    }
    let seq = random_unit_seq(&mut r, 15, 3);
    assert!(matches!(exhaustive_min_distortion(&seq, 2), Err(Error::TooLarge(_))));
}

#[test]
fn infoshot_distortion_gap_on_tiny_instances() {
    let mut r = rng(31);
    for _ in 0..20 {
        let seq = random_unit_seq(&mut r, 12, 4);
        let out = infoshot_core::InfoShot::default().run_with_k(&seq, 4).unwrap();
        let d = distortion(&seq, &out.keyframes.indices()).unwrap();
        let (_, best) = exhaustive_min_distortion(&seq, 4).unwrap();
        assert!(d >= best - 1e-12);
    }
}
