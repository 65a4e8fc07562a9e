mod common;

use common::{basis_runs, random_unit_seq, rng};
use infoshot_core::oracle::{cosine, exhaustive_pair, naive_greedy_segment, naive_recall, naive_shot_scores};
use infoshot_core::{
    default_benchmark, evaluate_suite, generate, greedy_segment, select_pair, shot_scores, uniform_sample,
    AffinityView, AnomalyMode, BudgetSpec, FeatureSequence, InfoShot, KeyframerConfig, SegmenterConfig,
    SyntheticSpec, VideoRun,
};
use rand::Rng;

fn shot_mean(seq: &FeatureSequence, range: std::ops::Range<usize>) -> Vec<f64> {
    let mut m = vec![0.0; seq.dim()];
    for t in range {
        for (acc, x) in m.iter_mut().zip(seq.frame(t)) {
            *acc += x;
        }
    }
    m
}

#[test]
fn two_shots_are_nearly_orthogonal() {
    for seed in 0..20 {
        let spec = SyntheticSpec { dim: 128, shots: vec![40, 60], seed, ..SyntheticSpec::default() };
        let (seq, truth) = generate(&spec).unwrap();
        assert_eq!(truth.boundary_indices, vec![40]);
        assert!(truth.anomaly_frames.is_empty());
        let c = cosine(&shot_mean(&seq, 0..40), &shot_mean(&seq, 40..100));
        assert!(c.abs() < 0.3, "seed {seed}: cos {c}");
    }
}

#[test]
fn anomalies_are_less_affine_than_their_shot() {
    let mut passed = 0;
    for seed in 0..100 {
        let spec = SyntheticSpec {
            anomaly_intervals: vec![(10, 3)],
            anomaly_mode: if seed % 2 == 0 { AnomalyMode::HeavyTail } else { AnomalyMode::HighVariance },
            seed,
            ..SyntheticSpec::default()
        };
        assert!(spec.anomaly_scale >= 10.0 * spec.walk_sigma);
        let (seq, truth) = generate(&spec).unwrap();
        assert_eq!(truth.anomaly_frames, vec![10, 11, 12]);
        assert_eq!(truth.event_intervals, vec![[10, 12]]);

        let normal: Vec<usize> = (0..100).filter(|t| !(10..13).contains(t)).collect();
        let mut pairs = Vec::new();
        for (i, &a) in normal.iter().enumerate() {
            for &b in &normal[i + 1..] {
                pairs.push(cosine(seq.frame(a), seq.frame(b)));
            }
        }
        pairs.sort_by(f64::total_cmp);
        let median = pairs[pairs.len() / 2];
        let ok = (10..13).all(|a| {
            let m = normal.iter().map(|&b| cosine(seq.frame(a), seq.frame(b))).sum::<f64>() / normal.len() as f64;
            m < median
        });
        passed += usize::from(ok);
    }
    assert!(passed >= 99, "{passed}/100");
}

#[test]
fn default_benchmark_layout() {
    let suite = default_benchmark(0);
    assert_eq!(suite.len(), 200);
    for (seq, truth) in &suite {
        assert_eq!(seq.frame_count(), 720);
        assert_eq!(truth.event_intervals.len(), 1);
        let [a, b] = truth.event_intervals[0];
        assert!((2..=5).contains(&(b - a + 1)));
        assert_eq!(truth.anomaly_frames, (a..=b).collect::<Vec<_>>());
        assert_eq!(truth.boundary_indices.len(), 2);
        assert!(seq.has_unit_norms());
    }
    let again = default_benchmark(0);
    assert!(suite.iter().zip(&again).all(|(x, y)| x == y));
    let other = default_benchmark(1);
    assert!(suite.iter().zip(&other).any(|(x, y)| x.0 != y.0));
}

#[test]
fn planted_boundaries_are_recovered() {
    let cfg = SegmenterConfig::default();
    let mut r = rng(41);
    for seed in 0..100 {
        let shots: Vec<usize> = (0..3).map(|_| r.random_range(2 * cfg.window_max..=120)).collect();
        let spec = SyntheticSpec { shots, seed, ..SyntheticSpec::default() };
        assert!(spec.shot_mean_scale >= 10.0 * spec.walk_sigma);
        let (seq, truth) = generate(&spec).unwrap();
        let view = AffinityView::new(&seq).unwrap();
        let p = greedy_segment(&view, 3, &cfg).unwrap();
        assert_eq!(p.boundaries(), truth.boundary_indices, "seed {seed}");
    }
}

fn outlier_shot(len: usize, pos: usize, noise: f64, r: &mut rand_chacha::ChaCha8Rng) -> FeatureSequence {
    let dim = 8;
    let frames: Vec<Vec<f64>> = (0..len)
        .map(|t| {
            let mut v = vec![0.0; dim];
            if t == pos {
                v[1] = 1.0;
            } else {
                v[0] = 1.0;
                for x in &mut v[2..] {
                    *x = noise * r.random_range(-1.0..1.0);
                }
            }
            v
        })
        .collect();
    infoshot_core::l2_normalize(&FeatureSequence::from_frames(&frames, 24.0).unwrap())
}

#[test]
fn outlier_is_the_unique_frame() {
    let cfg = KeyframerConfig::default();
    let mut r = rng(43);
    for noise in [0.0, 0.1] {
        for len in 3..=50 {
            for pos in 0..len {
                let seq = outlier_shot(len, pos, noise, &mut r);
                let view = AffinityView::new(&seq).unwrap();
                for i in 0..len {
                    for j in 0..len {
                        let a = view.pair_affinity(i, j).unwrap();
                        if i == pos && j != pos {
                            assert!(a <= 0.1);
                        } else if i != pos && j != pos {
                            assert!(a >= 0.9);
                        }
                    }
                }
                let scores = shot_scores(&view, 0..len, &cfg).unwrap();
                let (_, uni) = select_pair(&scores, &cfg);
                assert_eq!(uni, Some(pos), "L={len} pos={pos} noise={noise}");
            }
        }
    }
}

fn pipeline_oracle(seq: &FeatureSequence, k: usize) -> Vec<usize> {
    let segments = naive_greedy_segment(seq, (k / 2).max(1), (3, 15), (3, 300));
    let mut picks = Vec::new();
    for s in &segments {
        let sc = naive_shot_scores(seq, s.clone(), 1);
        let (c, u) = exhaustive_pair(&sc.g_hat, &sc.v_hat, 0.7, 0.5);
        picks.push(s.start + c);
        if let Some(u) = u {
            picks.push(s.start + u);
        }
    }
    picks.sort_unstable();
    picks
}

#[test]
fn forty_frame_example() {
    let mut seq = basis_runs(&[(0, 20), (1, 20)], 3);
    let mut data = seq.as_flat().to_vec();
    data[30 * 3..31 * 3].copy_from_slice(&[0.0, 0.0, 1.0]);
    seq = FeatureSequence::from_flat(data, 40, 3, 24.0).unwrap();
    let out = InfoShot::default().run_with_k(&seq, 4).unwrap();
    assert_eq!(out.partition.boundaries(), vec![20]);
    assert_eq!(out.keyframes.indices(), vec![0, 1, 20, 30]);
    assert_eq!(out.keyframes.indices(), pipeline_oracle(&seq, 4));

    for seed in 0..20 {
        let spec = SyntheticSpec {
            shots: vec![20, 20],
            anomaly_intervals: vec![(30, 1)],
            anomaly_len: (1, 1),
            seed,
            ..SyntheticSpec::default()
        };
        let (seq, _) = generate(&spec).unwrap();
        let out = InfoShot::default().run_with_k(&seq, 4).unwrap();
        let idx = out.keyframes.indices();
        assert_eq!(idx.len(), 4);
        assert!(idx.contains(&30), "seed {seed}: {idx:?}");
        assert_eq!(idx, pipeline_oracle(&seq, 4));
    }
}

#[test]
fn blocked_affinities_are_bit_exact() {
    let mut r = rng(47);
    for t in 1..=64 {
        let seq = random_unit_seq(&mut r, t, 5);
        for bs in (1..=8).chain([600]) {
            let view = AffinityView::new(&seq).unwrap().with_block_size(bs).unwrap();
            let mut seen = vec![false; t * t];
            view.for_each_block(0..t, 0..t, |r0, c0, block| {
                for ((i, j), &a) in block.indexed_iter() {
                    let direct: f64 = seq.frame(r0 + i).iter().zip(seq.frame(c0 + j)).map(|(x, y)| x * y).sum();
                    assert_eq!(a.to_bits(), direct.to_bits());
                    seen[(r0 + i) * t + c0 + j] = true;
                }
            })
            .unwrap();
            assert!(seen.iter().all(|&s| s));
        }
    }
}

#[test]
fn evaluator_agrees_with_metric_oracle() {
    let suite = default_benchmark(0);
    let samples: Vec<Vec<usize>> = suite
        .iter()
        .map(|(seq, _)| {
            let k = BudgetSpec::Rate(0.1).resolve(seq.frame_count(), seq.fps()).unwrap();
            uniform_sample(seq.frame_count(), k).unwrap()
        })
        .collect();
    let ids: Vec<String> = (0..suite.len()).map(|i| format!("v{i}")).collect();
    let runs: Vec<VideoRun<'_>> = suite
        .iter()
        .zip(&samples)
        .zip(&ids)
        .map(|(((seq, truth), s), id)| VideoRun { id, features: seq, truth, samples: s, budget_k: s.len() })
        .collect();
    let report = evaluate_suite(&runs).unwrap();
    let anomalies: Vec<Vec<usize>> = suite.iter().map(|(_, t)| t.anomaly_frames.clone()).collect();
    assert_eq!(report.frame_recall, naive_recall(&samples, &anomalies));
}
