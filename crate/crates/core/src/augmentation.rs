//! Sample replication: stacking `h` identical copies of `(y, X)`.
//!
//! Replication leaves β̂, R², the VIFs and the condition number untouched
//! while every dispersion statistic rescales by a known factor. This module
//! predicts the replicated statistics in closed form, checks the prediction
//! against an actual re-fit, and computes how many copies are needed for
//! every coefficient to become individually significant.
//!
//! `h` always counts the total number of blocks, so `h = 1` is the original
//! sample and the replicated sample has `n · h` rows.

use serde::{Deserialize, Serialize};

use crate::dist::{normal_quantile, student_t_quantile};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::regression::{fit_ols, Dataset, FitResult};

/// Critical value used in place of `t_{nh−k}(1 − α/2)` when `α = 0.05`.
pub const T_APPROX_5PCT: f64 = 1.96;

pub fn replicate_sample(data: &Dataset, h: usize) -> Result<Dataset> {
    if h == 0 {
        return Err(Error::InvalidArgument("replication factor must be >= 1".into()));
    }
    Ok(Dataset::from_parts_unchecked(
        data.y().repeat(h),
        data.x().repeat_rows(h),
        data.names().to_vec(),
        data.has_intercept(),
    ))
}

/// Closed-form statistics of the fit on `h` stacked copies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AugmentedPrediction {
    pub h: usize,
    pub n: usize,
    pub beta: Vec<f64>,
    pub se: Vec<f64>,
    pub t_stats: Vec<f64>,
    pub sigma2_hat: f64,
    pub r2: f64,
    pub r2_adj: f64,
    pub f_stat: Option<f64>,
    pub scr: f64,
    pub sct: f64,
    pub cov: Matrix,
}

impl AugmentedPrediction {
    /// Base-fit shaped view, for feeding the usual reporting paths.
    pub fn to_fit(&self, base: &FitResult) -> FitResult {
        FitResult {
            names: base.names.clone(),
            beta: self.beta.clone(),
            se: self.se.clone(),
            t_stats: self.t_stats.clone(),
            sigma2_hat: self.sigma2_hat,
            r2: self.r2,
            r2_adj: self.r2_adj,
            f_stat: self.f_stat,
            scr: self.scr,
            sct: self.sct,
            n: self.n,
            k: base.k,
            has_intercept: base.has_intercept,
            cov: self.cov.clone(),
        }
    }
}

pub fn predict_augmented(fit: &FitResult, h: usize) -> Result<AugmentedPrediction> {
    if h == 0 {
        return Err(Error::InvalidArgument("replication factor must be >= 1".into()));
    }
    if h == 1 {
        return Ok(AugmentedPrediction {
            h,
            n: fit.n,
            beta: fit.beta.clone(),
            se: fit.se.clone(),
            t_stats: fit.t_stats.clone(),
            sigma2_hat: fit.sigma2_hat,
            r2: fit.r2,
            r2_adj: fit.r2_adj,
            f_stat: fit.f_stat,
            scr: fit.scr,
            sct: fit.sct,
            cov: fit.cov.clone(),
        });
    }
    let (n, k) = (fit.n as f64, fit.k as f64);
    let hf = h as f64;
    let big_n = n * hf;
    // (n − k) / (nh − k): the factor on the covariance matrix
    let shrink = (n - k) / (big_n - k);

    let cov = fit.cov.scale(shrink);
    let se: Vec<f64> = fit.se.iter().map(|s| s * shrink.sqrt()).collect();
    let t_stats: Vec<f64> = fit.t_stats.iter().map(|t| t / shrink.sqrt()).collect();
    let r2_adj = if fit.has_intercept && fit.k == 1 {
        0.0
    } else {
        1.0 - (1.0 - fit.r2) * (big_n - 1.0) / (big_n - k)
    };

    Ok(AugmentedPrediction {
        h,
        n: fit.n * h,
        beta: fit.beta.clone(),
        se,
        t_stats,
        sigma2_hat: hf * shrink * fit.sigma2_hat,
        r2: fit.r2,
        r2_adj,
        f_stat: fit.f_stat.map(|f| f / shrink),
        scr: hf * fit.scr,
        sct: hf * fit.sct,
        cov,
    })
}

/// Largest relative deviation between the closed-form prediction and the
/// literal re-fit, per statistic.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct IdentityDeviations {
    pub beta: f64,
    pub scr: f64,
    pub sct: f64,
    pub r2: f64,
    pub r2_adj: f64,
    pub sigma2_hat: f64,
    pub cov: f64,
    pub t_stats: f64,
    pub f_stat: f64,
}

impl IdentityDeviations {
    pub fn max(&self) -> f64 {
        [
            self.beta,
            self.scr,
            self.sct,
            self.r2,
            self.r2_adj,
            self.sigma2_hat,
            self.cov,
            self.t_stats,
            self.f_stat,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IdentityCheck {
    pub base: FitResult,
    pub predicted: AugmentedPrediction,
    pub refit: FitResult,
    pub deviations: IdentityDeviations,
}

fn rel_dev(got: f64, want: f64) -> f64 {
    if got == want {
        return 0.0;
    }
    (got - want).abs() / want.abs().max(f64::MIN_POSITIVE)
}

fn max_rel_dev(got: &[f64], want: &[f64]) -> f64 {
    got.iter().zip(want).map(|(g, w)| rel_dev(*g, *w)).fold(0.0, f64::max)
}

/// Fits the replicated sample and compares it against [`predict_augmented`].
pub fn verify_identities(data: &Dataset, h: usize) -> Result<IdentityCheck> {
    let base = fit_ols(data)?;
    let replicated = replicate_sample(data, h)?;
    let refit = fit_ols(&replicated)?;
    let predicted = predict_augmented(&base, h)?;

    let deviations = IdentityDeviations {
        beta: max_rel_dev(&refit.beta, &predicted.beta),
        scr: rel_dev(refit.scr, predicted.scr),
        sct: rel_dev(refit.sct, predicted.sct),
        r2: rel_dev(refit.r2, predicted.r2),
        r2_adj: rel_dev(refit.r2_adj, predicted.r2_adj),
        sigma2_hat: rel_dev(refit.sigma2_hat, predicted.sigma2_hat),
        cov: max_rel_dev(refit.cov.as_slice(), predicted.cov.as_slice()),
        t_stats: max_rel_dev(&refit.t_stats, &predicted.t_stats),
        f_stat: match (refit.f_stat, predicted.f_stat) {
            (Some(a), Some(b)) => rel_dev(a, b),
            _ => 0.0,
        },
    };
    Ok(IdentityCheck {
        base,
        predicted,
        refit,
        deviations,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientBound {
    pub name: String,
    pub index: usize,
    pub t_exp: f64,
    pub bound: f64,
    /// `⌈bound⌉`, at least 1.
    pub h: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AugmentationPlan {
    pub bounds: Vec<CoefficientBound>,
    /// Total copies needed under the normal approximation of the critical
    /// value: the maximum of the per-coefficient `h`.
    pub h_required: usize,
    /// Smallest `h` for which every selected coefficient beats the exact
    /// `t_{nh−k}(1 − α/2)` quantile. Usually `h_required` or slightly above;
    /// it can be below when `nh − k` is so large that the exact quantile
    /// drops under the normal approximation.
    pub h_exact: usize,
    pub alpha: f64,
    pub t_critical_approx: f64,
    /// Coefficients left out because their t ratio is below machine precision.
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CoefficientSet {
    /// Every coefficient except the intercept.
    #[default]
    Slopes,
    All,
}

/// Critical value standing in for `t_{nh−k}(1 − α/2)`: 1.96 at the 5% level,
/// the corresponding normal quantile otherwise.
pub fn approx_critical_value(alpha: f64) -> f64 {
    if (alpha - 0.05).abs() < 1e-12 {
        T_APPROX_5PCT
    } else {
        normal_quantile(1.0 - alpha / 2.0)
    }
}

/// `(1/n) · ((t_crit / t_exp)² · (n − k) + k)`: the number of total copies
/// at which the replicated t ratio reaches `t_crit`.
pub fn replication_bound(t_crit: f64, t_exp: f64, n: usize, k: usize) -> f64 {
    let ratio = t_crit / t_exp;
    (ratio * ratio * (n - k) as f64 + k as f64) / n as f64
}

pub fn required_replication(fit: &FitResult, alpha: f64, set: CoefficientSet) -> Result<AugmentationPlan> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidArgument(format!("alpha must be in (0, 1), got {alpha}")));
    }
    let t_crit = approx_critical_value(alpha);
    let start = match set {
        CoefficientSet::Slopes if fit.has_intercept => 1,
        _ => 0,
    };

    let mut bounds = Vec::new();
    let mut warnings = Vec::new();
    for i in start..fit.k {
        let t = fit.t_stats[i];
        let name = fit.names[i].clone();
        if t == 0.0 || !t.is_finite() {
            return Err(Error::DegenerateT(name));
        }
        if t < f64::EPSILON {
            warnings.push(format!("'{name}' excluded: t ratio {t:e} is below machine precision"));
            continue;
        }
        let bound = replication_bound(t_crit, t, fit.n, fit.k);
        bounds.push(CoefficientBound {
            name,
            index: i,
            t_exp: t,
            bound,
            h: (bound.ceil() as usize).max(1),
        });
    }

    let h_required = bounds.iter().map(|b| b.h).max().unwrap_or(1);
    let h_exact = exact_replication(fit, &bounds, alpha, h_required);
    Ok(AugmentationPlan {
        bounds,
        h_required,
        h_exact,
        alpha,
        t_critical_approx: t_crit,
        warnings,
    })
}

fn passes_exact(fit: &FitResult, bounds: &[CoefficientBound], alpha: f64, h: usize) -> bool {
    let (n, k) = (fit.n as f64, fit.k as f64);
    let df = n * h as f64 - k;
    let crit = student_t_quantile(1.0 - alpha / 2.0, df);
    let factor = (df / (n - k)).sqrt();
    bounds.iter().all(|b| b.t_exp * factor > crit)
}

fn exact_replication(fit: &FitResult, bounds: &[CoefficientBound], alpha: f64, from: usize) -> usize {
    // the replicated t grows like √h while the quantile decreases, so the
    // test is monotone in h and the answer is within a few steps of the
    // approximate one. It can lie below it: for very large nh − k the exact
    // quantile is smaller than 1.96.
    let mut h = from;
    if passes_exact(fit, bounds, alpha, h) {
        while h > 1 && passes_exact(fit, bounds, alpha, h - 1) {
            h -= 1;
        }
    } else {
        while !passes_exact(fit, bounds, alpha, h) {
            h += 1;
        }
    }
    h
}
