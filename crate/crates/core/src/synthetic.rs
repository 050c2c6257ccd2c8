//! Seeded synthetic datasets for demos and property tests.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::linalg::{dot, euclidean_norm, Matrix};
use crate::regression::Dataset;

fn normals(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| StandardNormal.sample(rng)).collect()
}

fn centered(v: &[f64]) -> Vec<f64> {
    let mean = v.iter().sum::<f64>() / v.len() as f64;
    v.iter().map(|x| x - mean).collect()
}

/// Intercept plus two regressors whose sample correlation is exactly `rho`.
///
/// Both regressors are centered with norm `√n`, so with `rho = 0` the
/// intercept and the two regressors are mutually orthogonal: the same seed
/// with `rho = 0` gives the orthogonalized version of the same draws. The
/// response is `1 + x1 + x2 + noise_sd · ε`.
pub fn correlated_pair(n: usize, rho: f64, noise_sd: f64, seed: u64) -> Result<Dataset> {
    if n < 4 {
        return Err(Error::InvalidArgument("need at least 4 observations".into()));
    }
    if !(rho > -1.0 && rho < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "correlation must be in (-1, 1), got {rho}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let z1 = centered(&normals(&mut rng, n));
    let z2 = centered(&normals(&mut rng, n));
    let eps = normals(&mut rng, n);

    let scale = (n as f64).sqrt();
    let u1: Vec<f64> = z1.iter().map(|v| v * scale / euclidean_norm(&z1)).collect();
    let proj = dot(&z2, &u1) / dot(&u1, &u1);
    let r2: Vec<f64> = z2.iter().zip(&u1).map(|(a, b)| a - proj * b).collect();
    let u2: Vec<f64> = r2.iter().map(|v| v * scale / euclidean_norm(&r2)).collect();

    let s = (1.0 - rho * rho).sqrt();
    let x1 = u1.clone();
    let x2: Vec<f64> = u1.iter().zip(&u2).map(|(a, b)| rho * a + s * b).collect();
    let y: Vec<f64> = (0..n).map(|i| 1.0 + x1[i] + x2[i] + noise_sd * eps[i]).collect();

    let reg = Matrix::from_columns(&[x1, x2])?;
    Dataset::with_intercept(y, &reg, &["x1".into(), "x2".into()])
}

/// Intercept plus `k − 1` standard normal regressors, coefficients drawn
/// uniformly from `[-2, 2]` and unit-variance noise scaled by `noise_sd`.
pub fn random_dataset(n: usize, k: usize, noise_sd: f64, seed: u64) -> Result<Dataset> {
    if k < 1 || n <= k {
        return Err(Error::TooFewObservations { n, k });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cols: Vec<Vec<f64>> = (1..k).map(|_| normals(&mut rng, n)).collect();
    let beta: Vec<f64> = (0..k).map(|_| rng.random_range(-2.0..2.0)).collect();
    let eps = normals(&mut rng, n);
    let y: Vec<f64> = (0..n)
        .map(|i| beta[0] + cols.iter().zip(&beta[1..]).map(|(c, b)| b * c[i]).sum::<f64>() + noise_sd * eps[i])
        .collect();
    let names: Vec<String> = (1..k).map(|j| format!("x{j}")).collect();
    if cols.is_empty() {
        let x = Matrix::new(n, 1, vec![1.0; n])?;
        return Dataset::new(y, x, vec![crate::regression::INTERCEPT_NAME.into()], true);
    }
    Dataset::with_intercept(y, &Matrix::from_columns(&cols)?, &names)
}
