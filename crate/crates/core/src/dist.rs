//! Student t and normal quantiles.
//!
//! The t CDF is written in terms of the regularized incomplete beta function;
//! the quantile inverts it with a safeguarded Newton iteration.

use statrs::distribution::{ContinuousCDF, Normal};
use statrs::function::beta::beta_reg;
use statrs::function::gamma::ln_gamma;

/// `P(T ≤ t)` for Student's t with `df` degrees of freedom.
pub fn student_t_cdf(t: f64, df: f64) -> f64 {
    if t.is_nan() {
        return f64::NAN;
    }
    if t.is_infinite() {
        return if t > 0.0 { 1.0 } else { 0.0 };
    }
    let x = df / (df + t * t);
    let tail = 0.5 * beta_reg(0.5 * df, 0.5, x);
    if t > 0.0 {
        1.0 - tail
    } else {
        tail
    }
}

pub fn student_t_pdf(t: f64, df: f64) -> f64 {
    let ln_norm = ln_gamma(0.5 * (df + 1.0)) - ln_gamma(0.5 * df) - 0.5 * (df * std::f64::consts::PI).ln();
    (ln_norm - 0.5 * (df + 1.0) * (1.0 + t * t / df).ln()).exp()
}

/// Quantile `q` with `P(T ≤ q) = p`.
///
/// Panics if `p` is outside `(0, 1)` or `df < 1`.
pub fn student_t_quantile(p: f64, df: f64) -> f64 {
    assert!(p > 0.0 && p < 1.0, "probability must be in (0, 1), got {p}");
    assert!(df >= 1.0, "degrees of freedom must be >= 1, got {df}");
    if p == 0.5 {
        return 0.0;
    }
    if p < 0.5 {
        return -student_t_quantile(1.0 - p, df);
    }

    // bracket [0, hi] with CDF(hi) > p
    let mut lo = 0.0;
    let mut hi = normal_quantile(p).max(1.0);
    while student_t_cdf(hi, df) < p {
        lo = hi;
        hi *= 2.0;
    }

    let mut q = 0.5 * (lo + hi);
    for _ in 0..200 {
        let f = student_t_cdf(q, df) - p;
        if f.abs() < 1e-15 {
            break;
        }
        if f > 0.0 {
            hi = q;
        } else {
            lo = q;
        }
        let step = f / student_t_pdf(q, df);
        let newton = q - step;
        q = if newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if (hi - lo) < 1e-15 * hi.max(1.0) || step.abs() < 1e-15 * q.abs() {
            break;
        }
    }
    q
}

/// Standard normal quantile.
pub fn normal_quantile(p: f64) -> f64 {
    Normal::standard().inverse_cdf(p)
}
