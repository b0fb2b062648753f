//! Implementation-versus-oracle checks. Each oracle recomputes its quantity
//! from scratch with plain loops over `f64`, without going through the
//! crate's distance, kernel or grid helpers.

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use som_core::*;

fn oracle_distance(a: &[f64], b: &[f64]) -> f64 {
    let mut s = 0.0;
    for k in 0..a.len() {
        s += (a[k] - b[k]) * (a[k] - b[k]);
    }
    s.sqrt()
}

fn oracle_bmu(weights: &[f64], dim: usize, x: &[f64]) -> (usize, f64) {
    let n = weights.len() / dim;
    let mut best = 0;
    let mut best_d = f64::INFINITY;
    for i in 0..n {
        let d = oracle_distance(&weights[i * dim..(i + 1) * dim], x);
        if d < best_d {
            best = i;
            best_d = d;
        }
    }
    (best, best_d)
}

fn random_map(rng: &mut ChaCha8Rng, rows: usize, cols: usize, dim: usize) -> Map {
    let w: Vec<f64> = (0..rows * cols * dim).map(|_| rng.random_range(-5.0..5.0)).collect();
    Map::from_weights(GridShape::new(rows, cols).unwrap(), dim, w, 0, 0).unwrap()
}

fn random_vec(rng: &mut ChaCha8Rng, dim: usize) -> Features {
    FeatureVector::new((0..dim).map(|_| rng.random_range(-5.0..5.0)).collect()).unwrap()
}

#[test]
fn bmu_matches_exhaustive_scan_on_six_by_six() {
    let mut rng = ChaCha8Rng::seed_from_u64(66);
    for _ in 0..200 {
        let m = random_map(&mut rng, 6, 6, 3);
        let x = random_vec(&mut rng, 3);
        let b = m.find_bmu(&x).unwrap();
        assert_eq!((b.index, b.distance), oracle_bmu(m.weights(), 3, x.as_slice()));
    }
}

#[test]
fn bmu_tie_break_on_duplicated_nodes() {
    // integer-valued weights with many exact duplicates force ties
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..500 {
        let w: Vec<f64> = (0..16 * 2).map(|_| rng.random_range(0..3) as f64).collect();
        let m = Map::from_weights(GridShape::new(4, 4).unwrap(), 2, w, 0, 0).unwrap();
        let x = FeatureVector::new(vec![rng.random_range(0..3) as f64, 1.0]).unwrap();
        let b = m.find_bmu(&x).unwrap();
        assert_eq!((b.index, b.distance), oracle_bmu(m.weights(), 2, x.as_slice()));
    }
}

#[test]
fn quantization_error_matches_double_loop() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..50 {
        let (rows, cols, dim) = (rng.random_range(1..6), rng.random_range(1..6), rng.random_range(1..5));
        let m = random_map(&mut rng, rows, cols, dim);
        let data: Vec<Features> = (0..rng.random_range(1..40)).map(|_| random_vec(&mut rng, dim)).collect();
        let mut total = 0.0;
        for x in &data {
            let mut best = f64::INFINITY;
            for i in 0..rows * cols {
                let w = &m.weights()[i * dim..(i + 1) * dim];
                best = best.min(oracle_distance(w, x.as_slice()));
            }
            total += best;
        }
        let oracle = total / data.len() as f64;
        assert!((m.quantization_error(&data).unwrap() - oracle).abs() <= 1e-12);
    }
}

#[test]
fn umatrix_matches_neighbour_mean() {
    let mut rng = ChaCha8Rng::seed_from_u64(88);
    for _ in 0..20 {
        let m = random_map(&mut rng, 8, 8, 4);
        let u = compute_umatrix(&m);
        for r in 0..8i64 {
            for c in 0..8i64 {
                let i = (r * 8 + c) as usize;
                let mut sum = 0.0;
                let mut n = 0.0;
                for (dr, dc) in [(-1, 0), (1, 0), (0, -1), (0, 1)] {
                    let (rr, cc) = (r + dr, c + dc);
                    if (0..8).contains(&rr) && (0..8).contains(&cc) {
                        let j = (rr * 8 + cc) as usize;
                        sum += oracle_distance(m.weight(i), m.weight(j));
                        n += 1.0;
                    }
                }
                assert!((u.values()[i] - sum / n).abs() <= 1e-12);
            }
        }
    }
}

#[test]
fn umatrix_depends_only_on_the_map() {
    // a reloaded copy of the map yields the same matrix
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let m = random_map(&mut rng, 5, 7, 2);
    let copy = Map::from_bytes(&m.to_bytes()).unwrap();
    assert_eq!(compute_umatrix(&m), compute_umatrix(&copy));
}

fn gaussian_clusters(centres: &[(f64, f64)], per: usize, sd: f64, seed: u64) -> Vec<Features> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = Normal::new(0.0, sd).unwrap();
    centres
        .iter()
        .flat_map(|&(cx, cy)| {
            (0..per)
                .map(|_| {
                    FeatureVector::new(vec![cx + n.sample(&mut rng), cy + n.sample(&mut rng)])
                        .unwrap()
                })
                .collect::<Vec<_>>()
        })
        .collect()
}

#[test]
fn standard_cutoff_barely_moves_final_error() {
    let data = gaussian_clusters(&[(0.0, 0.0), (0.0, 10.0), (10.0, 0.0), (10.0, 10.0)], 100, 0.25, 1);
    let shape = GridShape::new(10, 10).unwrap();
    let bounds = data_bounds(&data).unwrap();
    let schedule = Schedule::defaults(shape);

    let mut full = Map::initialize(shape, 2, &bounds, 1).unwrap();
    let a = train(&mut full, &data, &schedule, &TrainOptions::default()).unwrap();
    let mut cut = Map::initialize(shape, 2, &bounds, 1).unwrap();
    let opts = TrainOptions {
        cutoff: KernelCutoff::standard(),
        ..TrainOptions::default()
    };
    let b = train(&mut cut, &data, &schedule, &opts).unwrap();
    assert!((a.final_qe - b.final_qe).abs() < 1e-9);
}

#[test]
fn trained_map_separates_two_clusters() {
    let data = gaussian_clusters(&[(0.0, 0.0), (10.0, 10.0)], 200, 1.0, 4);
    let shape = GridShape::new(10, 10).unwrap();
    let mut map = Map::initialize(shape, 2, &data_bounds(&data).unwrap(), 4).unwrap();
    let report = train(&mut map, &data, &Schedule::defaults(shape), &TrainOptions::default()).unwrap();
    assert!(report.final_qe < report.initial_qe);
    assert_eq!(report.steps, 50_000);
    assert_eq!(map.steps_trained(), 50_000);

    // points from either cluster land on disjoint sets of winners
    let winners = |pts: &[Features]| {
        pts.iter()
            .map(|x| map.find_bmu(x).unwrap().index)
            .collect::<std::collections::BTreeSet<_>>()
    };
    let (a, b) = data.split_at(200);
    assert!(winners(a).is_disjoint(&winners(b)));
}

#[test]
fn pipeline_through_normalised_csv() {
    let raw = "bytes,duration,label\n100,0.5,normal\n120,0.4,normal\n110,0.6,normal\n90000,30,anomalous\n105,0.55,normal\n";
    let ds: Data = load_csv(raw.as_bytes(), true, Some("label")).unwrap();
    let model = fit_normalizer(&ds, NormMethod::MinMax).unwrap();
    let scaled = model.apply(&ds).unwrap();
    let (train_part, _, _) = split(&scaled, (1.0, 0.0, 0.0), 7).unwrap();
    let shape = GridShape::new(2, 2).unwrap();
    let normals: Vec<Features> = train_part
        .labeled()
        .unwrap()
        .into_iter()
        .filter(|(_, l)| *l == Label::Normal)
        .map(|(x, _)| x)
        .collect();
    let mut map = Map::initialize(shape, 2, &data_bounds(&normals).unwrap(), 7).unwrap();
    train(&mut map, &normals, &Schedule::defaults(shape), &TrainOptions::default()).unwrap();
    let baseline = Baseline::calibrate(map, &normals, 100.0).unwrap();
    let summary = baseline.evaluate(&scaled.labeled().unwrap()).unwrap();
    assert_eq!(summary.machine_line(), "1,0,4,0,1.0000,0.0000");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn adapt_matches_update_rule(
        rows in 1usize..6,
        cols in 1usize..6,
        dim in 1usize..5,
        seed: u64,
        alpha in 0.001f64..=1.0,
        sigma in 0.05f64..6.0,
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut m = random_map(&mut rng, rows, cols, dim);
        let before = m.weights().to_vec();
        let x = random_vec(&mut rng, dim);
        let c = rng.random_range(0..rows * cols);
        m.adapt(&x, c, alpha, sigma).unwrap();
        let (cr, cc) = ((c / cols) as f64, (c % cols) as f64);
        for i in 0..rows * cols {
            let (ir, ic) = ((i / cols) as f64, (i % cols) as f64);
            let d2 = (cr - ir).powi(2) + (cc - ic).powi(2);
            let h = alpha * (-d2 / (2.0 * sigma * sigma)).exp();
            for k in 0..dim {
                let w0 = before[i * dim + k];
                let expected = w0 + h * (x.as_slice()[k] - w0);
                prop_assert!((m.weights()[i * dim + k] - expected).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn kernel_bounded_and_peaked(
        r1 in 0usize..12, c1 in 0usize..12, r2 in 0usize..12, c2 in 0usize..12,
        alpha in 0.001f64..=1.0,
        sigma in 0.5f64..10.0,
    ) {
        let (a, b) = (GridPosition::new(r1, c1), GridPosition::new(r2, c2));
        let h = kernel(a, b, alpha, sigma).unwrap();
        prop_assert!(h > 0.0 && h <= alpha);
        prop_assert_eq!(h == alpha, a == b);
    }

    #[test]
    fn schedule_is_non_increasing(
        total in 1u64..3000,
        ord_frac in 0.0f64..=1.0,
        a_end in 0.001f64..0.3,
        a_gap1 in 0.0f64..0.4,
        a_gap2 in 0.0f64..0.3,
        s_end in 0.1f64..3.0,
        s_gap in 0.0f64..5.0,
    ) {
        let ordering = ((total as f64) * ord_frac) as u64;
        let s = Schedule::new(ordering, total, a_end + a_gap1 + a_gap2, a_end + a_gap1, a_end, s_end + s_gap, s_end).unwrap();
        let mut prev = s.at(0).unwrap();
        for t in 1..total {
            let cur = s.at(t).unwrap();
            prop_assert!(cur.0 <= prev.0 && cur.1 <= prev.1);
            prev = cur;
        }
    }

    #[test]
    fn minmax_output_in_unit_interval(
        rows in proptest::collection::vec(proptest::collection::vec(-1e6f64..1e6, 3), 1..30),
    ) {
        let ds = Data::new(rows.into_iter().map(|r| FeatureVector::new(r).unwrap()).collect()).unwrap();
        let m = fit_normalizer(&ds, NormMethod::MinMax).unwrap();
        for v in m.apply(&ds).unwrap().vectors() {
            prop_assert!(v.as_slice().iter().all(|&x| (0.0..=1.0).contains(&x)));
        }
    }

    #[test]
    fn normalised_csv_round_trips_exactly(
        rows in proptest::collection::vec(proptest::collection::vec(-1e3f64..1e3, 2), 1..20),
    ) {
        let ds = Data::new(rows.into_iter().map(|r| FeatureVector::new(r).unwrap()).collect())
            .unwrap()
            .with_column_names(vec!["a".into(), "b".into()])
            .unwrap();
        let z = fit_normalizer(&ds, NormMethod::ZScore).unwrap().apply(&ds).unwrap();
        let mut buf = Vec::new();
        z.write_csv(&mut buf).unwrap();
        let back: Data = load_csv(buf.as_slice(), true, None).unwrap();
        for (p, q) in back.vectors().iter().zip(z.vectors()) {
            for (x, y) in p.as_slice().iter().zip(q.as_slice()) {
                prop_assert_eq!(x.to_bits(), y.to_bits());
            }
        }
    }

    #[test]
    fn raising_threshold_never_adds_anomalies(
        seed: u64,
        t1 in 0.0f64..5.0,
        dt in 0.0f64..5.0,
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = random_map(&mut rng, 3, 3, 2);
        let data: Vec<Features> = (0..30).map(|_| random_vec(&mut rng, 2)).collect();
        let low = Baseline::with_threshold(m.clone(), t1).unwrap().score_all(&data).unwrap();
        let high = Baseline::with_threshold(m, t1 + dt).unwrap().score_all(&data).unwrap();
        for (l, h) in low.iter().zip(&high) {
            prop_assert!(!h.is_anomalous || l.is_anomalous);
        }
    }
}
