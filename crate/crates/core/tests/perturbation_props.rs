use collinlab::augmentation::replicate_sample;
use collinlab::linalg::{euclidean_norm, Matrix};
use collinlab::perturbation::{
    monte_carlo_stability, perturb_design, perturb_vector, PerturbationConfig, PerturbationSummary,
};
use collinlab::regression::Dataset;
use collinlab::synthetic::{correlated_pair, random_dataset};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn perturbation_size_is_exact(
        x in prop::collection::vec(-1e3f64..1e3, 2..100),
        noise in prop::collection::vec(-5.0f64..5.0, 100),
        pct in 1e-4f64..0.5,
    ) {
        prop_assume!(euclidean_norm(&x) > 1e-6);
        let p = &noise[..x.len()];
        prop_assume!(euclidean_norm(p) > 1e-6);
        let xp = perturb_vector(&x, pct, p).unwrap();
        let diff: Vec<f64> = xp.iter().zip(&x).map(|(a, b)| a - b).collect();
        prop_assert!((euclidean_norm(&diff) / euclidean_norm(&x) - pct).abs() < 1e-12);
    }
}

#[test]
fn every_column_moves_by_pct_and_y_stays() {
    let data = random_dataset(25, 4, 1.0, 3).unwrap();
    let cfg = PerturbationConfig {
        pct: 0.03,
        ..Default::default()
    };
    for trial in 0..20 {
        let p = perturb_design(&data, &cfg, trial).unwrap();
        assert_eq!(p.y(), data.y());
        assert_eq!(p.x().column(0), data.x().column(0));
        for j in 1..4 {
            let (a, b) = (p.x().column(j), data.x().column(j));
            let diff: Vec<f64> = a.iter().zip(&b).map(|(u, v)| u - v).collect();
            assert!((euclidean_norm(&diff) / euclidean_norm(&b) - 0.03).abs() < 1e-12);
        }
    }
}

fn bits(s: &PerturbationSummary) -> Vec<u64> {
    s.shifts
        .iter()
        .chain([&s.mean, &s.sd, &s.min, &s.max])
        .map(|v| v.to_bits())
        .collect()
}

#[test]
fn sequential_and_parallel_runs_agree_bitwise() {
    let data = correlated_pair(40, 0.9, 1.0, 5).unwrap();
    let cfg = PerturbationConfig {
        trials: 500,
        seed: 99,
        ..Default::default()
    };
    let par = monte_carlo_stability(&data, &cfg).unwrap();
    let seq = monte_carlo_stability(
        &data,
        &PerturbationConfig {
            parallel: false,
            ..cfg.clone()
        },
    )
    .unwrap();
    assert_eq!(bits(&par), bits(&seq));
    assert_eq!(bits(&par), bits(&monte_carlo_stability(&data, &cfg).unwrap()));
    let other = monte_carlo_stability(&data, &PerturbationConfig { seed: 100, ..cfg }).unwrap();
    assert_ne!(bits(&par), bits(&other));
}

#[test]
fn column_order_does_not_change_shifts() {
    let data = random_dataset(30, 4, 1.0, 12).unwrap();
    let order = [0, 3, 1, 2];
    let cols: Vec<Vec<f64>> = order.iter().map(|&j| data.x().column(j)).collect();
    let names: Vec<String> = order.iter().map(|&j| data.names()[j].clone()).collect();
    let permuted = Dataset::new(data.y().to_vec(), Matrix::from_columns(&cols).unwrap(), names, true).unwrap();

    let cfg = PerturbationConfig {
        trials: 200,
        seed: 4,
        ..Default::default()
    };
    let a = monte_carlo_stability(&data, &cfg).unwrap();
    let b = monte_carlo_stability(&permuted, &cfg).unwrap();
    for (x, y) in a.shifts.iter().zip(&b.shifts) {
        assert!((x - y).abs() <= 1e-9 * x.max(1e-12), "{x} vs {y}");
    }
}

#[test]
fn replication_damps_but_does_not_hide_instability() {
    let data = correlated_pair(30, 0.99, 1.0, 2).unwrap();
    let cfg = PerturbationConfig {
        trials: 1000,
        seed: 8,
        ..Default::default()
    };
    let base = monte_carlo_stability(&data, &cfg).unwrap().mean;
    let doubled = monte_carlo_stability(&replicate_sample(&data, 2).unwrap(), &cfg)
        .unwrap()
        .mean;
    let ratio = base / doubled;
    assert!(ratio > 0.5 && ratio < 2.0, "{base} vs {doubled}");
}

#[test]
fn summary_statistics_are_consistent() {
    let data = correlated_pair(20, 0.5, 1.0, 1).unwrap();
    let s = monte_carlo_stability(
        &data,
        &PerturbationConfig {
            trials: 50,
            ..Default::default()
        },
    )
    .unwrap();
    assert_eq!(s.failed, 0);
    assert_eq!(s.shifts.len(), 50);
    let mean = s.shifts.iter().sum::<f64>() / 50.0;
    let var = s.shifts.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / 49.0;
    assert!((s.mean - mean).abs() < 1e-12 * mean);
    assert!((s.sd - var.sqrt()).abs() < 1e-12 * s.sd);
    assert!(s.min <= s.mean && s.mean <= s.max);
}

#[test]
fn zero_pct_leaves_coefficients_unchanged() {
    let data = random_dataset(15, 3, 1.0, 0).unwrap();
    let s = monte_carlo_stability(
        &data,
        &PerturbationConfig {
            pct: 0.0,
            trials: 10,
            ..Default::default()
        },
    )
    .unwrap();
    assert!(s.max < 1e-10);
}
