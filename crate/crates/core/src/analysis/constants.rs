use crate::error::{param, Result};
use crate::seqgen::STRICT_THETA_LIMIT;

/// Constants that size seeds, gap bounds and the expansion/contraction checks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantsBundle {
    pub sigma: u8,
    pub theta_total: f64,
    pub theta_d: f64,
    pub gamma: f64,
    pub n: usize,
    pub delta: f64,
    /// `-log_sigma(1 - theta_T)`
    pub alpha: f64,
    pub c: f64,
    pub k: usize,
    /// `log_sigma(e)`
    pub beta: f64,
    pub t0: f64,
    pub c0: f64,
    pub xi: f64,
    pub g_n: f64,
    pub expansion_threshold: f64,
    pub contraction_block: usize,
    pub contraction_threshold: f64,
    /// Upper bound `3.15 * theta_T` on `C * alpha`.
    pub c_alpha_bound: f64,
    /// Set when `theta_T` is outside the proven range.
    pub theta_warning: bool,
}

impl ConstantsBundle {
    pub fn c_alpha(&self) -> f64 {
        self.c * self.alpha
    }

    /// Recomputes the `k`-dependent fields for a fixed seed length.
    pub fn with_k(mut self, k: usize) -> Self {
        let kf = k as f64;
        self.k = k;
        self.g_n = 50.0 * kf / (8.0 * (1.0 - self.theta_total).powi(k as i32)) * (self.n as f64).ln();
        self.expansion_threshold = (2.0 / self.beta + 1.0) * kf / self.t0;
        self.contraction_block = (21.0 * kf / self.beta).ceil() as usize;
        self.contraction_threshold = (1.0 - self.theta_d) * self.contraction_block as f64 / 2.0;
        self
    }
}

/// `C = 3/(1 - 2 alpha) + delta/alpha`, `k = round(C log_sigma n)`.
///
/// `theta_d` only feeds the contraction threshold. A zero `theta_T` drops the
/// `delta/alpha` term.
pub fn derive_constants(
    sigma: u8,
    theta_total: f64,
    theta_d: f64,
    gamma: f64,
    n: usize,
    delta: f64,
) -> Result<ConstantsBundle> {
    if sigma < 2 {
        return param(format!("alphabet size must be at least 2, got {sigma}"));
    }
    if !(0.0..1.0).contains(&theta_total) {
        return param(format!("theta_T must lie in [0, 1), got {theta_total}"));
    }
    if !(0.0..=theta_total).contains(&theta_d) {
        return param(format!("theta_d must lie in [0, theta_T], got {theta_d}"));
    }
    if !(gamma > 0.0 && gamma < 1.0) {
        return param(format!("gamma must lie in (0, 1), got {gamma}"));
    }
    if n < 2 {
        return param(format!("n must be at least 2, got {n}"));
    }
    if delta < 0.0 {
        return param(format!("delta must be non-negative, got {delta}"));
    }
    let ln_sigma = (sigma as f64).ln();
    let alpha = -(1.0 - theta_total).ln() / ln_sigma;
    if 1.0 - 2.0 * alpha <= 0.0 {
        return param(format!("theta_T = {theta_total} gives alpha >= 1/2"));
    }
    let c = 3.0 / (1.0 - 2.0 * alpha) + if alpha > 0.0 { delta / alpha } else { 0.0 };
    let k = (c * (n as f64).ln() / ln_sigma).round() as usize;
    let beta = 1.0 / ln_sigma;
    let t0 = 0.5 * (9.0 / (1.0 + 8.0 * gamma)).ln();
    let bundle = ConstantsBundle {
        sigma,
        theta_total,
        theta_d,
        gamma,
        n,
        delta,
        alpha,
        c,
        k,
        beta,
        t0,
        c0: t0.max(21.0 / beta),
        xi: 1.0 / n as f64,
        g_n: 0.0,
        expansion_threshold: 0.0,
        contraction_block: 0,
        contraction_threshold: 0.0,
        c_alpha_bound: 3.15 * theta_total,
        theta_warning: theta_total >= STRICT_THETA_LIMIT,
    };
    Ok(bundle.with_k(k))
}
