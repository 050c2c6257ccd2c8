//! Serializable report and its JSON / Markdown renderings.
//!
//! JSON top-level keys: `header`, `fit`, `diagnostics`, `augmentation`,
//! `perturbation`, `york`. Absent sections are omitted rather than written
//! as `null`. Floats use the shortest representation that round-trips.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::augmentation::{AugmentationPlan, CoefficientBound, IdentityCheck, IdentityDeviations};
use crate::diagnostics::{DiagnosticsReport, VarianceFactors, VifFlag};
use crate::error::{Error, Result};
use crate::io::YorkAnalysis;
use crate::perturbation::PerturbationSummary;
use crate::regression::{significance_stars, FitResult, SignificanceConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Json,
    Markdown,
}

impl std::str::FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Format::Json),
            "markdown" | "md" => Ok(Format::Markdown),
            other => Err(Error::InvalidArgument(format!("unknown format '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Header {
    pub tool: String,
    pub version: String,
    pub command: String,
    /// Every option the command ran with, echoed verbatim.
    pub options: BTreeMap<String, serde_json::Value>,
}

impl Header {
    pub fn new(command: impl Into<String>) -> Self {
        Self {
            tool: "collinlab".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            options: BTreeMap::new(),
        }
    }

    pub fn option(mut self, key: &str, value: impl Into<serde_json::Value>) -> Self {
        self.options.insert(key.to_string(), value.into());
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitSection {
    pub names: Vec<String>,
    pub beta: Vec<f64>,
    pub se: Vec<f64>,
    pub t: Vec<f64>,
    pub stars: Vec<String>,
    pub r2: f64,
    pub r2_adj: f64,
    pub sigma2_hat: f64,
    pub f_stat: Option<f64>,
    /// `[k − 1, n − k]`.
    pub df: [usize; 2],
    pub n: usize,
}

impl FitSection {
    pub fn from_fit(fit: &FitResult, cfg: &SignificanceConfig) -> Self {
        Self {
            names: fit.names.clone(),
            beta: fit.beta.clone(),
            se: fit.se.clone(),
            t: fit.t_stats.clone(),
            stars: significance_stars(fit, cfg),
            r2: fit.r2,
            r2_adj: fit.r2_adj,
            sigma2_hat: fit.sigma2_hat,
            f_stat: fit.f_stat,
            df: fit.df(),
            n: fit.n,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerdictSection {
    pub cn: String,
    pub vif: Vec<VifFlag>,
    pub alarm: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsSection {
    pub names: Vec<String>,
    pub vif: Vec<f64>,
    pub cn: f64,
    pub cn_scaling: String,
    pub corr_det: Option<f64>,
    pub var_decomp: Vec<VarianceFactors>,
    pub verdicts: VerdictSection,
}

impl From<&DiagnosticsReport> for DiagnosticsSection {
    fn from(r: &DiagnosticsReport) -> Self {
        let cn = serde_json::to_value(r.verdict.cn)
            .ok()
            .and_then(|v| v.as_str().map(str::to_string))
            .unwrap_or_default();
        Self {
            names: r.names.clone(),
            vif: r.vifs.clone(),
            cn: r.cn,
            cn_scaling: r.cn_scaling.as_str().into(),
            corr_det: r.corr_det,
            var_decomp: r.var_decomp.clone(),
            verdicts: VerdictSection {
                cn,
                vif: r.verdict.vif.clone(),
                alarm: r.verdict.is_alarming(),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AugmentationSection {
    /// Total number of stacked copies.
    pub h: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub h_required: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub h_exact: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub t_critical_approx: Option<f64>,
    pub bounds: Vec<CoefficientBound>,
    pub predicted: FitSection,
    pub refit: FitSection,
    pub deviations: IdentityDeviations,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub warnings: Vec<String>,
}

impl AugmentationSection {
    pub fn new(check: &IdentityCheck, plan: Option<&AugmentationPlan>, cfg: &SignificanceConfig) -> Self {
        let predicted = check.predicted.to_fit(&check.base);
        Self {
            h: check.predicted.h,
            alpha: plan.map(|p| p.alpha),
            h_required: plan.map(|p| p.h_required),
            h_exact: plan.map(|p| p.h_exact),
            t_critical_approx: plan.map(|p| p.t_critical_approx),
            bounds: plan.map(|p| p.bounds.clone()).unwrap_or_default(),
            predicted: FitSection::from_fit(&predicted, cfg),
            refit: FitSection::from_fit(&check.refit, cfg),
            deviations: check.deviations,
            warnings: plan.map(|p| p.warnings.clone()).unwrap_or_default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerturbationSection {
    pub pct: f64,
    pub trials: usize,
    pub seed: u64,
    /// Replication applied before perturbing.
    pub h: usize,
    pub failed: usize,
    pub mean: f64,
    pub sd: f64,
    pub min: f64,
    pub max: f64,
}

impl PerturbationSection {
    pub fn new(s: &PerturbationSummary, h: usize) -> Self {
        Self {
            pct: s.pct,
            trials: s.trials,
            seed: s.seed,
            h,
            failed: s.failed,
            mean: s.mean,
            sd: s.sd,
            min: s.min,
            max: s.max,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub header: Header,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub fit: Option<FitSection>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub diagnostics: Option<DiagnosticsSection>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub augmentation: Option<AugmentationSection>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub perturbation: Option<PerturbationSection>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub york: Option<YorkAnalysis>,
}

impl Report {
    pub fn new(header: Header) -> Self {
        Self {
            header,
            fit: None,
            diagnostics: None,
            augmentation: None,
            perturbation: None,
            york: None,
        }
    }
}

pub fn export_report(report: &Report, format: Format) -> Vec<u8> {
    match format {
        Format::Json => {
            let mut out = serde_json::to_vec_pretty(report).expect("report serializes");
            out.push(b'\n');
            out
        }
        Format::Markdown => render_markdown(report).into_bytes(),
    }
}

pub fn parse_report(bytes: &[u8]) -> Result<Report> {
    serde_json::from_slice(bytes).map_err(|e| Error::InvalidArgument(format!("bad report json: {e}")))
}

/// Six significant digits, trailing zeros trimmed.
pub fn fmt_num(v: f64) -> String {
    if !v.is_finite() {
        return v.to_string();
    }
    if v == 0.0 {
        return "0".into();
    }
    let mag = v.abs().log10().floor() as i32;
    if !(-4..=9).contains(&mag) {
        return format!("{v:.5e}");
    }
    let decimals = (5 - mag).max(0) as usize;
    let s = format!("{v:.decimals$}");
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "n/a".into(), fmt_num)
}

/// Regression table in the usual layout: coefficient with stars, standard
/// error in parentheses beneath, then R², σ̂² and F.
pub fn fit_table(columns: &[(&str, &FitSection)]) -> String {
    let mut out = String::new();
    let Some((_, first)) = columns.first() else {
        return out;
    };
    out.push_str("| Variable |");
    for (title, _) in columns {
        let _ = write!(out, " {title} |");
    }
    out.push_str("\n|---|");
    out.push_str(&"---|".repeat(columns.len()));
    out.push('\n');
    for (i, name) in first.names.iter().enumerate() {
        let _ = write!(out, "| {name} |");
        for (_, fit) in columns {
            let _ = write!(out, " {}{} |", fmt_num(fit.beta[i]), escape_stars(&fit.stars[i]));
        }
        out.push_str("\n| |");
        for (_, fit) in columns {
            let _ = write!(out, " ({}) |", fmt_num(fit.se[i]));
        }
        out.push('\n');
    }
    let mut row = |label: &str, f: &dyn Fn(&FitSection) -> String| {
        let _ = write!(out, "| {label} |");
        for (_, fit) in columns {
            let _ = write!(out, " {} |", f(fit));
        }
        out.push('\n');
    };
    row("N", &|f| f.n.to_string());
    row("R²", &|f| fmt_num(f.r2));
    row("Adjusted R²", &|f| fmt_num(f.r2_adj));
    row("σ̂²", &|f| fmt_num(f.sigma2_hat));
    row("F", &|f| format!("{} (df {}, {})", fmt_opt(f.f_stat), f.df[0], f.df[1]));
    out
}

fn escape_stars(s: &str) -> String {
    s.replace('*', "\\*")
}

fn render_markdown(r: &Report) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# collinlab {}\n", r.header.command);
    if !r.header.options.is_empty() {
        let opts: Vec<String> = r.header.options.iter().map(|(k, v)| format!("{k}={v}")).collect();
        let _ = writeln!(out, "Options: {}\n", opts.join(", "));
    }

    match (&r.fit, &r.augmentation) {
        (Some(fit), Some(aug)) => {
            let t2 = format!("Replicated h={} (predicted)", aug.h);
            let t3 = format!("Replicated h={} (re-fit)", aug.h);
            out.push_str("## Estimation\n\n");
            out.push_str(&fit_table(&[("Base", fit), (&t2, &aug.predicted), (&t3, &aug.refit)]));
            out.push_str("\nSignificance: \\*\\*\\* 99%, \\*\\* 95%, \\* 90% (two-sided t on n − k df).\n\n");
        }
        (Some(fit), None) => {
            out.push_str("## Estimation\n\n");
            out.push_str(&fit_table(&[("Model", fit)]));
            out.push_str("\nSignificance: \\*\\*\\* 99%, \\*\\* 95%, \\* 90% (two-sided t on n − k df).\n\n");
        }
        _ => {}
    }

    if let Some(d) = &r.diagnostics {
        out.push_str("## Collinearity diagnostics\n\n");
        let _ = writeln!(
            out,
            "- Condition number ({} scaling): {} ({})",
            d.cn_scaling,
            fmt_num(d.cn),
            d.verdicts.cn
        );
        if let Some(det) = d.corr_det {
            let _ = writeln!(out, "- Determinant of the correlation matrix: {}", fmt_num(det));
        }
        if !d.vif.is_empty() {
            out.push_str("\n| Regressor | VIF | Verdict | 1 − R²ⱼ | var(Xⱼ) |\n|---|---|---|---|---|\n");
            for (i, name) in d.names.iter().enumerate() {
                let flag = &d.verdicts.vif[i];
                let verdict = serde_json::to_value(flag.verdict)
                    .ok()
                    .and_then(|v| v.as_str().map(str::to_string))
                    .unwrap_or_default();
                let verdict = if flag.elevated && verdict == "ok" {
                    "ok (above 4)".to_string()
                } else {
                    verdict
                };
                let vd = &d.var_decomp[i];
                let _ = writeln!(
                    out,
                    "| {name} | {} | {verdict} | {} | {} |",
                    fmt_num(d.vif[i]),
                    fmt_num(vd.one_minus_r2j),
                    fmt_num(vd.var_xj)
                );
            }
        }
        out.push('\n');
    }

    if let Some(a) = &r.augmentation {
        out.push_str("## Replication\n\n");
        let _ = writeln!(out, "- Copies stacked: h = {} (N = {})", a.h, a.refit.n);
        if let (Some(hr), Some(he), Some(alpha)) = (a.h_required, a.h_exact, a.alpha) {
            let _ = writeln!(
                out,
                "- Copies needed at α = {alpha}: {hr} with critical value {}, {he} with the exact t quantile",
                fmt_opt(a.t_critical_approx)
            );
        }
        if !a.bounds.is_empty() {
            out.push_str("\n| Coefficient | t | bound | h |\n|---|---|---|---|\n");
            for b in &a.bounds {
                let _ = writeln!(
                    out,
                    "| {} | {} | {} | {} |",
                    b.name,
                    fmt_num(b.t_exp),
                    fmt_num(b.bound),
                    b.h
                );
            }
        }
        let d = &a.deviations;
        out.push_str("\n| Identity | max relative deviation |\n|---|---|\n");
        for (label, v) in [
            ("β̂", d.beta),
            ("SCR", d.scr),
            ("SCT", d.sct),
            ("R²", d.r2),
            ("adjusted R²", d.r2_adj),
            ("σ̂²", d.sigma2_hat),
            ("cov(β̂)", d.cov),
            ("t", d.t_stats),
            ("F", d.f_stat),
        ] {
            let _ = writeln!(out, "| {label} | {v:.3e} |");
        }
        for w in &a.warnings {
            let _ = writeln!(out, "\nWarning: {w}");
        }
        out.push('\n');
    }

    if let Some(p) = &r.perturbation {
        out.push_str("## Perturbation\n\n");
        let _ = writeln!(
            out,
            "{} trials at {}% (seed {}, h = {}, {} failed)\n",
            p.trials,
            fmt_num(100.0 * p.pct),
            p.seed,
            p.h,
            p.failed
        );
        out.push_str("| mean | sd | min | max |\n|---|---|---|---|\n");
        let _ = writeln!(
            out,
            "| {}% | {}% | {}% | {}% |\n",
            fmt_num(p.mean),
            fmt_num(p.sd),
            fmt_num(p.min),
            fmt_num(p.max)
        );
    }

    if let Some(y) = &r.york {
        out.push_str("## York design\n\n");
        let _ = writeln!(out, "- m = {}, n = {}", y.m, y.n);
        let eig: Vec<String> = y.eigenvalues.iter().map(|e| format!("{e:.7}")).collect();
        let _ = writeln!(out, "- Eigenvalues of the unit-length X̃ᵀX̃: {}", eig.join(", "));
        let _ = writeln!(out, "- Condition number: {:.5}", y.cn);
    }
    out
}
