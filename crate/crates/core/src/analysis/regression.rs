use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegressionFit {
    pub slope: f64,
    pub intercept: f64,
    pub slope_se: f64,
    /// Two-sided 95% t-interval for the slope.
    pub slope_ci95: (f64, f64),
    pub r_squared: f64,
    pub n_points: usize,
}

impl RegressionFit {
    pub fn ci_contains(&self, v: f64) -> bool {
        self.slope_ci95.0 <= v && v <= self.slope_ci95.1
    }
}

/// Ordinary least squares of `y` on `x`.
pub fn ols(points: &[(f64, f64)]) -> Result<RegressionFit> {
    let n = points.len();
    if n < 3 {
        return Err(Error::Fit(format!("need at least 3 points, got {n}")));
    }
    if points.iter().any(|&(x, y)| !x.is_finite() || !y.is_finite()) {
        return Err(Error::Fit("non-finite input".into()));
    }
    let nf = n as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / nf;
    let my = points.iter().map(|p| p.1).sum::<f64>() / nf;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = points.iter().map(|p| (p.1 - my).powi(2)).sum();
    if sxx <= f64::EPSILON * mx.abs().max(1.0) * nf {
        return Err(Error::Fit("x values have no spread".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = points
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).powi(2))
        .sum();
    let slope_se = (sse / (nf - 2.0) / sxx).sqrt();
    let t = StudentsT::new(0.0, 1.0, nf - 2.0)
        .map_err(|e| Error::Fit(e.to_string()))?
        .inverse_cdf(0.975);
    let r_squared = if syy > 0.0 { 1.0 - sse / syy } else { 1.0 };
    Ok(RegressionFit {
        slope,
        intercept,
        slope_se,
        slope_ci95: (slope - t * slope_se, slope + t * slope_se),
        r_squared,
        n_points: n,
    })
}

/// OLS on `(ln x, ln y)`; every coordinate must be positive.
pub fn ols_loglog(points: &[(f64, f64)]) -> Result<RegressionFit> {
    if points.iter().any(|&(x, y)| !(x > 0.0 && y > 0.0)) {
        return Err(Error::Fit("log-log fit needs positive coordinates".into()));
    }
    let logged: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    ols(&logged)
}

/// Pearson correlation coefficient; `None` when either side is constant.
pub fn pearson(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let n = xs.len().min(ys.len());
    if n < 2 {
        return None;
    }
    let mx = xs[..n].iter().sum::<f64>() / n as f64;
    let my = ys[..n].iter().sum::<f64>() / n as f64;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for t in 0..n {
        let (dx, dy) = (xs[t] - mx, ys[t] - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    (sxx > 0.0 && syy > 0.0).then(|| sxy / (sxx * syy).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_power_law() {
        let pts: Vec<_> = [10.0, 100.0, 1000.0, 5000.0].iter().map(|&x: &f64| (x, x.powf(-0.5))).collect();
        let fit = ols_loglog(&pts).unwrap();
        assert!((fit.slope + 0.5).abs() < 1e-12);
        assert!(fit.slope_ci95.1 - fit.slope_ci95.0 < 1e-9);
    }

    #[test]
    fn straight_line() {
        let fit = ols(&[(0.0, 1.0), (1.0, 3.0), (2.0, 5.0), (4.0, 9.0)]).unwrap();
        assert!((fit.slope - 2.0).abs() < 1e-12);
        assert!((fit.intercept - 1.0).abs() < 1e-12);
        assert!((fit.r_squared - 1.0).abs() < 1e-12);
    }

    #[test]
    fn degenerate_inputs() {
        assert!(ols(&[(1.0, 1.0), (2.0, 2.0)]).is_err());
        assert!(ols(&[(1.0, 1.0), (1.0, 2.0), (1.0, 3.0)]).is_err());
        assert!(ols_loglog(&[(1.0, 0.0), (2.0, 1.0), (3.0, 1.0)]).is_err());
    }

    #[test]
    fn t_quantile() {
        // t_{0.975, 1} = 12.7062; residuals of (0,0),(1,1),(2,0) give se = 0.5.
        let fit = ols(&[(0.0, 0.0), (1.0, 1.0), (2.0, 0.0)]).unwrap();
        assert!((fit.slope_ci95.1 - 12.706_204_736 * fit.slope_se).abs() < 1e-6);
    }

    #[test]
    fn correlation() {
        assert!((pearson(&[1.0, 2.0, 3.0], &[2.0, 4.0, 6.5]).unwrap() - 0.997_948_72).abs() < 1e-8);
        assert_eq!(pearson(&[1.0, 1.0], &[1.0, 2.0]), None);
    }
}
