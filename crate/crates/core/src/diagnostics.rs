//! Measures of the degree of multicollinearity and their severity verdicts.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{symmetric_eigenvalues, unit_length_scale, Matrix, Qr};
use crate::regression::{fit_ols, total_sum_of_squares, Dataset, FitResult};

/// Threshold on `R²ᵢ` beyond which an auxiliary regression counts as exact.
pub const PERFECT_FIT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CnScaling {
    /// Columns scaled to unit Euclidean length before forming `XᵀX`.
    #[default]
    UnitLength,
    Raw,
}

impl CnScaling {
    pub fn as_str(self) -> &'static str {
        match self {
            CnScaling::UnitLength => "unit",
            CnScaling::Raw => "raw",
        }
    }
}

/// Variance inflation factors for every non-intercept column, each from the
/// auxiliary regression of that column on all the others.
pub fn vif(data: &Dataset) -> Result<Vec<f64>> {
    let regressors = data.regressor_indices();
    if regressors.len() < 2 {
        return Err(Error::TooFewRegressors {
            required: 2,
            found: regressors.len(),
        });
    }
    Qr::factor(data.x())?.ensure_full_rank()?;

    regressors
        .map(|i| {
            let r2 = auxiliary_r2(data, i)?;
            if r2 >= 1.0 - PERFECT_FIT_TOL {
                return Err(Error::PerfectFit(data.names()[i].clone()));
            }
            Ok(1.0 / (1.0 - r2))
        })
        .collect()
}

/// `R²` of column `i` regressed on the remaining columns of the design.
fn auxiliary_r2(data: &Dataset, i: usize) -> Result<f64> {
    let x = data.x();
    let target = x.column(i);
    let rest = x.without_column(i);
    let mut names = data.names().to_vec();
    names.remove(i);
    let aux = Dataset::new(target, rest, names, data.has_intercept())?;
    Ok(fit_ols(&aux)?.r2)
}

pub fn condition_number(data: &Dataset, scaling: CnScaling) -> Result<f64> {
    condition_number_of(data.x(), scaling)
}

/// `√(μ_max / μ_min)` of the cross-product matrix of `x`.
pub fn condition_number_of(x: &Matrix, scaling: CnScaling) -> Result<f64> {
    let eig = cross_product_eigenvalues(x, scaling)?;
    let max = eig[0];
    let min = *eig.last().unwrap_or(&max);
    if min <= 0.0 {
        return Err(Error::RankDeficient {
            rank: eig.iter().filter(|&&e| e > 0.0).count(),
            cols: eig.len(),
        });
    }
    Ok((max / min).sqrt())
}

/// Eigenvalues of `XᵀX` (or `X̃ᵀX̃` after unit-length scaling), largest first.
pub fn cross_product_eigenvalues(x: &Matrix, scaling: CnScaling) -> Result<Vec<f64>> {
    Qr::factor(x)?.ensure_full_rank()?;
    let m = match scaling {
        CnScaling::UnitLength => unit_length_scale(x)?,
        CnScaling::Raw => x.clone(),
    };
    symmetric_eigenvalues(&m.gram())
}

/// Pearson correlation matrix of the non-intercept columns.
pub fn correlation_matrix(data: &Dataset) -> Result<Matrix> {
    let cols: Vec<usize> = data.regressor_indices().collect();
    let n = data.n() as f64;
    let centered: Vec<Vec<f64>> = cols
        .iter()
        .map(|&j| {
            let c = data.x().column(j);
            let mean = c.iter().sum::<f64>() / n;
            c.into_iter().map(|v| v - mean).collect::<Vec<_>>()
        })
        .collect();
    let norms: Vec<f64> = centered
        .iter()
        .map(|c| c.iter().map(|v| v * v).sum::<f64>().sqrt())
        .collect();
    for (pos, &norm) in norms.iter().enumerate() {
        if norm == 0.0 {
            return Err(Error::ConstantColumn(data.names()[cols[pos]].clone()));
        }
    }
    let p = cols.len();
    let mut r = Matrix::identity(p);
    for a in 0..p {
        for b in (a + 1)..p {
            let dot: f64 = centered[a].iter().zip(&centered[b]).map(|(u, v)| u * v).sum();
            let v = dot / (norms[a] * norms[b]);
            r[(a, b)] = v;
            r[(b, a)] = v;
        }
    }
    Ok(r)
}

pub fn correlation_determinant(data: &Dataset) -> Result<f64> {
    let found = data.regressor_indices().len();
    if found < 2 {
        return Err(Error::TooFewRegressors { required: 2, found });
    }
    correlation_matrix(data)?.determinant()
}

/// Factors of `var(β̂ⱼ) = σ̂² / (n · var(Xⱼ) · (1 − R²ⱼ))` for one coefficient.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VarianceFactors {
    pub name: String,
    pub sigma2_hat: f64,
    pub n: usize,
    /// Population variance of the column (uncentered second moment when the
    /// model has no intercept).
    pub var_xj: f64,
    pub one_minus_r2j: f64,
}

impl VarianceFactors {
    pub fn reconstructed_variance(&self) -> f64 {
        self.sigma2_hat / (self.n as f64 * self.var_xj * self.one_minus_r2j)
    }
}

pub fn variance_decomposition(data: &Dataset, fit: &FitResult) -> Result<Vec<VarianceFactors>> {
    let n = data.n();
    data.regressor_indices()
        .map(|j| {
            let col = data.x().column(j);
            let var_xj = total_sum_of_squares(&col, data.has_intercept()) / n as f64;
            let r2j = if data.k() == 1 { 0.0 } else { auxiliary_r2(data, j)? };
            Ok(VarianceFactors {
                name: data.names()[j].clone(),
                sigma2_hat: fit.sigma2_hat,
                n,
                var_xj,
                one_minus_r2j: 1.0 - r2j,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CnVerdict {
    Light,
    Moderate,
    Strong,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VifVerdict {
    Ok,
    Problematic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VifFlag {
    pub name: String,
    pub verdict: VifVerdict,
    /// Set at or above the stricter secondary threshold.
    pub elevated: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdicts {
    pub cn: CnVerdict,
    pub vif: Vec<VifFlag>,
}

impl Verdicts {
    pub fn is_alarming(&self) -> bool {
        self.cn == CnVerdict::Strong || self.vif.iter().any(|f| f.verdict == VifVerdict::Problematic)
    }
}

/// Cut-offs for [`classify`]. CN in `[cn_moderate, cn_strong]` is moderate;
/// VIF at or above `vif_problematic` is problematic.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    pub cn_moderate: f64,
    pub cn_strong: f64,
    pub vif_problematic: f64,
    pub vif_elevated: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self {
            cn_moderate: 20.0,
            cn_strong: 30.0,
            vif_problematic: 10.0,
            vif_elevated: 4.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsReport {
    pub names: Vec<String>,
    pub vifs: Vec<f64>,
    pub cn: f64,
    pub cn_scaling: CnScaling,
    /// `None` with fewer than two regressors.
    pub corr_det: Option<f64>,
    pub var_decomp: Vec<VarianceFactors>,
    pub verdict: Verdicts,
}

pub fn classify_values(cn: f64, names: &[String], vifs: &[f64], th: &Thresholds) -> Verdicts {
    let cn_verdict = if cn < th.cn_moderate {
        CnVerdict::Light
    } else if cn <= th.cn_strong {
        CnVerdict::Moderate
    } else {
        CnVerdict::Strong
    };
    let vif = names
        .iter()
        .zip(vifs)
        .map(|(name, &v)| VifFlag {
            name: name.clone(),
            verdict: if v >= th.vif_problematic {
                VifVerdict::Problematic
            } else {
                VifVerdict::Ok
            },
            elevated: v >= th.vif_elevated,
        })
        .collect();
    Verdicts { cn: cn_verdict, vif }
}

pub fn classify(report: &DiagnosticsReport, th: &Thresholds) -> Verdicts {
    classify_values(report.cn, &report.names, &report.vifs, th)
}

/// Runs every measure on `data`. VIFs and the correlation determinant are
/// skipped (empty / `None`) when there are fewer than two regressors.
pub fn diagnose(data: &Dataset, fit: &FitResult, scaling: CnScaling, th: &Thresholds) -> Result<DiagnosticsReport> {
    let names: Vec<String> = data.regressor_indices().map(|j| data.names()[j].clone()).collect();
    let (vifs, corr_det) = if names.len() >= 2 {
        (vif(data)?, Some(correlation_determinant(data)?))
    } else {
        (Vec::new(), None)
    };
    let cn = condition_number(data, scaling)?;
    let var_decomp = variance_decomposition(data, fit)?;
    let verdict = classify_values(cn, &names, &vifs, th);
    Ok(DiagnosticsReport {
        names,
        vifs,
        cn,
        cn_scaling: scaling,
        corr_det,
        var_decomp,
        verdict,
    })
}
