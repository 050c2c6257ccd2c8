//! Ordinary least squares with the usual table statistics.

use serde::{Deserialize, Serialize};

use crate::dist::student_t_quantile;
use crate::error::{Error, Result};
use crate::linalg::{euclidean_norm, Matrix, Qr};

pub const INTERCEPT_NAME: &str = "(Intercept)";

/// Response vector plus design matrix.
///
/// When `has_intercept` is set, column 0 of `x` is the constant column.
/// `n > k` is required to fit, not to construct.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    y: Vec<f64>,
    x: Matrix,
    names: Vec<String>,
    has_intercept: bool,
}

impl Dataset {
    pub fn new(y: Vec<f64>, x: Matrix, names: Vec<String>, has_intercept: bool) -> Result<Self> {
        if x.rows() != y.len() {
            return Err(Error::DimensionMismatch(format!(
                "design has {} rows but response has {}",
                x.rows(),
                y.len()
            )));
        }
        if names.len() != x.cols() {
            return Err(Error::DimensionMismatch(format!(
                "{} column names for {} columns",
                names.len(),
                x.cols()
            )));
        }
        if let Some(i) = y.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { row: i, col: 0 });
        }
        if has_intercept && (0..x.rows()).any(|i| x[(i, 0)] != 1.0) {
            return Err(Error::InvalidArgument(
                "intercept flag set but column 0 is not all ones".into(),
            ));
        }
        Ok(Self {
            y,
            x,
            names,
            has_intercept,
        })
    }

    /// Prepends a column of ones to `regressors` and names it
    /// [`INTERCEPT_NAME`].
    pub fn with_intercept(y: Vec<f64>, regressors: &Matrix, names: &[String]) -> Result<Self> {
        let x = Matrix::from_fn(regressors.rows(), regressors.cols() + 1, |i, j| {
            if j == 0 {
                1.0
            } else {
                regressors[(i, j - 1)]
            }
        });
        let mut all = Vec::with_capacity(names.len() + 1);
        all.push(INTERCEPT_NAME.to_string());
        all.extend_from_slice(names);
        Self::new(y, x, all, true)
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn x(&self) -> &Matrix {
        &self.x
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn has_intercept(&self) -> bool {
        self.has_intercept
    }

    pub fn n(&self) -> usize {
        self.y.len()
    }

    pub fn k(&self) -> usize {
        self.x.cols()
    }

    /// Indices of the columns that are not the intercept.
    pub fn regressor_indices(&self) -> std::ops::Range<usize> {
        let start = usize::from(self.has_intercept);
        start..self.k()
    }

    /// Same response and names, different design. Used by the perturbation
    /// code, which never touches `y`.
    pub(crate) fn with_design(&self, x: Matrix) -> Self {
        debug_assert_eq!(x.rows(), self.x.rows());
        debug_assert_eq!(x.cols(), self.x.cols());
        Self {
            y: self.y.clone(),
            x,
            names: self.names.clone(),
            has_intercept: self.has_intercept,
        }
    }

    pub(crate) fn from_parts_unchecked(y: Vec<f64>, x: Matrix, names: Vec<String>, has_intercept: bool) -> Self {
        Self {
            y,
            x,
            names,
            has_intercept,
        }
    }
}

/// Everything reported for one OLS fit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub names: Vec<String>,
    pub beta: Vec<f64>,
    pub se: Vec<f64>,
    /// Absolute t ratios `|β̂ᵢ / seᵢ|`.
    pub t_stats: Vec<f64>,
    pub sigma2_hat: f64,
    pub r2: f64,
    pub r2_adj: f64,
    /// Global F statistic; `None` for an intercept-only model.
    pub f_stat: Option<f64>,
    /// Residual sum of squares.
    pub scr: f64,
    /// Total sum of squares (centered when the model has an intercept).
    pub sct: f64,
    pub n: usize,
    pub k: usize,
    pub has_intercept: bool,
    pub cov: Matrix,
}

impl FitResult {
    /// `[k − 1, n − k]`.
    pub fn df(&self) -> [usize; 2] {
        [self.k - 1, self.n - self.k]
    }

    pub fn df_resid(&self) -> usize {
        self.n - self.k
    }
}

pub(crate) fn total_sum_of_squares(y: &[f64], centered: bool) -> f64 {
    if centered {
        let mean = y.iter().sum::<f64>() / y.len() as f64;
        y.iter().map(|v| (v - mean) * (v - mean)).sum()
    } else {
        y.iter().map(|v| v * v).sum()
    }
}

pub fn fit_ols(data: &Dataset) -> Result<FitResult> {
    let (n, k) = (data.n(), data.k());
    if n <= k {
        return Err(Error::TooFewObservations { n, k });
    }
    let qr = Qr::factor(data.x())?;
    let beta = qr.solve(data.y())?;
    let fitted = data.x().mul_vec(&beta)?;
    let resid: Vec<f64> = data.y().iter().zip(&fitted).map(|(y, f)| y - f).collect();
    let scr = euclidean_norm(&resid).powi(2);
    let sct = total_sum_of_squares(data.y(), data.has_intercept());

    let df_resid = (n - k) as f64;
    let sigma2_hat = scr / df_resid;
    let cov = qr.gram_inverse()?.scale(sigma2_hat);
    let se: Vec<f64> = (0..k).map(|i| cov[(i, i)].sqrt()).collect();
    let t_stats: Vec<f64> = beta.iter().zip(&se).map(|(b, s)| (b / s).abs()).collect();

    let intercept_only = data.has_intercept() && k == 1;
    let (r2, f_stat) = if intercept_only {
        (0.0, None)
    } else {
        if sct == 0.0 {
            return Err(Error::ConstantResponse);
        }
        let r2 = (1.0 - scr / sct).clamp(0.0, 1.0);
        let f = (r2 / (k - 1).max(1) as f64) / ((1.0 - r2) / df_resid);
        (r2, Some(f))
    };
    let r2_adj = 1.0 - (1.0 - r2) * (n as f64 - 1.0) / df_resid;

    Ok(FitResult {
        names: data.names().to_vec(),
        beta,
        se,
        t_stats,
        sigma2_hat,
        r2,
        r2_adj,
        f_stat,
        scr,
        sct,
        n,
        k,
        has_intercept: data.has_intercept(),
        cov,
    })
}

/// Confidence levels used for significance stars, lowest first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignificanceConfig {
    alpha_levels: Vec<f64>,
}

impl SignificanceConfig {
    pub fn new(alpha_levels: Vec<f64>) -> Result<Self> {
        if alpha_levels.is_empty() {
            return Err(Error::InvalidArgument("no confidence levels".into()));
        }
        if alpha_levels.iter().any(|&l| !(l > 0.0 && l < 1.0)) {
            return Err(Error::InvalidArgument(
                "confidence levels must lie strictly between 0 and 1".into(),
            ));
        }
        if alpha_levels.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidArgument(
                "confidence levels must be strictly increasing".into(),
            ));
        }
        Ok(Self { alpha_levels })
    }

    pub fn levels(&self) -> &[f64] {
        &self.alpha_levels
    }
}

impl Default for SignificanceConfig {
    fn default() -> Self {
        Self {
            alpha_levels: vec![0.90, 0.95, 0.99],
        }
    }
}

/// One star per confidence level passed by a two-sided t test on `n − k`
/// degrees of freedom.
pub fn significance_stars(fit: &FitResult, cfg: &SignificanceConfig) -> Vec<String> {
    let df = fit.df_resid() as f64;
    let critical: Vec<f64> = cfg
        .levels()
        .iter()
        .map(|l| student_t_quantile(1.0 - (1.0 - l) / 2.0, df))
        .collect();
    fit.t_stats
        .iter()
        .map(|&t| {
            let passed = critical.iter().rposition(|&c| t > c).map_or(0, |i| i + 1);
            "*".repeat(passed)
        })
        .collect()
}
