//! Relative-norm data perturbation and Monte-Carlo coefficient stability.
//!
//! A column `x` is perturbed as `x + pct · p · ‖x‖ / ‖p‖` with a random
//! direction `p`, so the perturbed column sits at relative distance exactly
//! `pct` from the original. The response is never perturbed.
//!
//! Random streams: every `(seed, trial, column)` triple gets its own ChaCha8
//! substream. The trial index selects the ChaCha stream id and the column is
//! keyed by a 32-bit FNV-1a hash of its name, which selects a disjoint
//! 2³²-word window of that stream. Results therefore do not depend on
//! execution order, thread count or column position.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal, Uniform};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::euclidean_norm;
use crate::regression::{fit_ols, Dataset};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseKind {
    /// Independent standard normal entries.
    #[default]
    Normal,
    /// Independent entries uniform on `[-1, 1)`.
    Uniform,
    /// Independent entries uniform on `[0, 1)`, the output of a plain
    /// `rand()` call. The noise has a nonzero mean, so every perturbation
    /// also shifts the column level.
    UnitUniform,
}

impl NoiseKind {
    pub fn as_str(self) -> &'static str {
        match self {
            NoiseKind::Normal => "normal",
            NoiseKind::Uniform => "uniform",
            NoiseKind::UnitUniform => "unit_uniform",
        }
    }
}

impl std::str::FromStr for NoiseKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "normal" => Ok(NoiseKind::Normal),
            "uniform" => Ok(NoiseKind::Uniform),
            "unit_uniform" => Ok(NoiseKind::UnitUniform),
            other => Err(Error::InvalidArgument(format!(
                "unknown noise kind {other:?} (expected normal, uniform or unit_uniform)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerturbationConfig {
    /// Relative size of the perturbation; `0.01` is 1%.
    pub pct: f64,
    pub trials: usize,
    pub seed: u64,
    pub perturb_intercept: bool,
    pub noise: NoiseKind,
    /// Run trials on the rayon pool when the `parallel` feature is enabled.
    pub parallel: bool,
}

impl Default for PerturbationConfig {
    fn default() -> Self {
        Self {
            pct: 0.01,
            trials: 1000,
            seed: 0,
            perturb_intercept: false,
            noise: NoiseKind::Normal,
            parallel: true,
        }
    }
}

impl PerturbationConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.pct >= 0.0 && self.pct.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "perturbation size must be a finite non-negative fraction, got {}",
                self.pct
            )));
        }
        if self.trials == 0 {
            return Err(Error::InvalidArgument("at least one trial is required".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerturbationSummary {
    pub pct: f64,
    pub trials: usize,
    pub seed: u64,
    /// Trials whose perturbed design was rank deficient.
    pub failed: usize,
    /// Per successful trial, in percent, in trial order.
    pub shifts: Vec<f64>,
    pub mean: f64,
    pub sd: f64,
    pub min: f64,
    pub max: f64,
}

/// `x + pct · noise · ‖x‖ / ‖noise‖`.
pub fn perturb_vector(x: &[f64], pct: f64, noise: &[f64]) -> Result<Vec<f64>> {
    if x.len() != noise.len() {
        return Err(Error::DimensionMismatch(format!(
            "vector of length {} with noise of length {}",
            x.len(),
            noise.len()
        )));
    }
    let xn = euclidean_norm(x);
    if xn == 0.0 {
        return Err(Error::ZeroNorm("perturbed vector"));
    }
    let pn = euclidean_norm(noise);
    if pn == 0.0 {
        return Err(Error::ZeroNorm("noise vector"));
    }
    let scale = pct * xn / pn;
    Ok(x.iter().zip(noise).map(|(v, p)| v + scale * p).collect())
}

/// `100 · ‖β − β_p‖ / ‖β‖`.
pub fn coefficient_shift(beta: &[f64], beta_p: &[f64]) -> Result<f64> {
    if beta.len() != beta_p.len() {
        return Err(Error::DimensionMismatch(format!(
            "coefficient vectors of length {} and {}",
            beta.len(),
            beta_p.len()
        )));
    }
    let bn = euclidean_norm(beta);
    if bn == 0.0 {
        return Err(Error::ZeroNorm("coefficient vector"));
    }
    let diff: Vec<f64> = beta.iter().zip(beta_p).map(|(a, b)| a - b).collect();
    Ok(100.0 * euclidean_norm(&diff) / bn)
}

/// 32-bit FNV-1a, used to key per-column noise streams.
pub fn column_stream_key(name: &str) -> u32 {
    let mut h: u32 = 0x811c_9dc5;
    for b in name.bytes() {
        h ^= u32::from(b);
        h = h.wrapping_mul(0x0100_0193);
    }
    h
}

/// Generator for the noise of one column in one trial.
pub fn noise_stream(seed: u64, trial: u64, column_key: u32) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng.set_word_pos(u128::from(column_key) << 32);
    rng
}

pub fn draw_noise<R: Rng>(rng: &mut R, len: usize, kind: NoiseKind) -> Vec<f64> {
    match kind {
        NoiseKind::Normal => (0..len).map(|_| StandardNormal.sample(rng)).collect(),
        NoiseKind::Uniform => {
            let u = Uniform::new(-1.0, 1.0).expect("valid bounds");
            (0..len).map(|_| u.sample(rng)).collect()
        }
        NoiseKind::UnitUniform => (0..len).map(|_| rng.random::<f64>()).collect(),
    }
}

/// Perturbs every non-intercept column (and the intercept when asked) with
/// fresh noise for `trial`.
pub fn perturb_design(data: &Dataset, cfg: &PerturbationConfig, trial: u64) -> Result<Dataset> {
    let mut x = data.x().clone();
    let first = if data.has_intercept() && !cfg.perturb_intercept {
        1
    } else {
        0
    };
    for j in first..data.k() {
        let key = column_stream_key(&data.names()[j]);
        let mut rng = noise_stream(cfg.seed, trial, key);
        let noise = draw_noise(&mut rng, data.n(), cfg.noise);
        let col = perturb_vector(&x.column(j), cfg.pct, &noise)?;
        x.set_column(j, &col);
    }
    let mut out = data.with_design(x);
    if cfg.perturb_intercept && data.has_intercept() {
        // column 0 is no longer constant
        out = Dataset::from_parts_unchecked(out.y().to_vec(), out.x().clone(), out.names().to_vec(), false);
    }
    Ok(out)
}

fn run_trial(data: &Dataset, cfg: &PerturbationConfig, base: &[f64], trial: u64) -> Result<Option<f64>> {
    let perturbed = perturb_design(data, cfg, trial)?;
    match fit_ols(&perturbed) {
        Ok(fit) => coefficient_shift(base, &fit.beta).map(Some),
        Err(Error::RankDeficient { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

#[cfg(feature = "parallel")]
fn run_trials(data: &Dataset, cfg: &PerturbationConfig, base: &[f64]) -> Result<Vec<Option<f64>>> {
    use rayon::prelude::*;
    if cfg.parallel {
        (0..cfg.trials as u64)
            .into_par_iter()
            .map(|t| run_trial(data, cfg, base, t))
            .collect()
    } else {
        run_trials_sequential(data, cfg, base)
    }
}

#[cfg(not(feature = "parallel"))]
fn run_trials(data: &Dataset, cfg: &PerturbationConfig, base: &[f64]) -> Result<Vec<Option<f64>>> {
    run_trials_sequential(data, cfg, base)
}

fn run_trials_sequential(data: &Dataset, cfg: &PerturbationConfig, base: &[f64]) -> Result<Vec<Option<f64>>> {
    (0..cfg.trials as u64).map(|t| run_trial(data, cfg, base, t)).collect()
}

/// Repeats perturb-and-refit `cfg.trials` times and summarises the
/// coefficient shifts relative to the unperturbed fit.
pub fn monte_carlo_stability(data: &Dataset, cfg: &PerturbationConfig) -> Result<PerturbationSummary> {
    cfg.validate()?;
    let base = fit_ols(data)?;
    let outcomes = run_trials(data, cfg, &base.beta)?;

    let shifts: Vec<f64> = outcomes.iter().flatten().copied().collect();
    let failed = outcomes.len() - shifts.len();
    if shifts.is_empty() {
        return Err(Error::AllTrialsFailed(cfg.trials));
    }
    let m = shifts.len() as f64;
    let mean = shifts.iter().sum::<f64>() / m;
    let sd = if shifts.len() > 1 {
        (shifts.iter().map(|s| (s - mean) * (s - mean)).sum::<f64>() / (m - 1.0)).sqrt()
    } else {
        0.0
    };
    let min = shifts.iter().copied().fold(f64::INFINITY, f64::min);
    let max = shifts.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(PerturbationSummary {
        pct: cfg.pct,
        trials: cfg.trials,
        seed: cfg.seed,
        failed,
        shifts,
        mean,
        sd,
        min,
        max,
    })
}
