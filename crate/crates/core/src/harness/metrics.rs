//! Summary statistics over replay results.

use thiserror::Error;

#[derive(Debug, Clone, Copy, Error, PartialEq)]
pub enum MetricError {
    #[error("need at least 2 pairs, got {0}")]
    TooFewPairs(usize),
    #[error("one of the series has zero variance")]
    ZeroVariance,
    #[error("non-finite value in series")]
    NonFinite,
}

/// Pearson correlation of `(x, y)` pairs.
pub fn pearson(pairs: &[(f64, f64)]) -> Result<f64, MetricError> {
    let n = pairs.len();
    if n < 2 {
        return Err(MetricError::TooFewPairs(n));
    }
    if pairs.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
        return Err(MetricError::NonFinite);
    }
    let nf = n as f64;
    let mx = pairs.iter().map(|p| p.0).sum::<f64>() / nf;
    let my = pairs.iter().map(|p| p.1).sum::<f64>() / nf;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in pairs {
        let (dx, dy) = (x - mx, y - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(MetricError::ZeroVariance);
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

/// Relative latency reduction of `adaptive` against `baseline`, in percent.
pub fn latency_improvement(baseline: f64, adaptive: f64) -> f64 {
    if baseline == 0.0 {
        return 0.0;
    }
    (baseline - adaptive) / baseline * 100.0
}
