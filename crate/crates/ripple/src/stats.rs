//! Small statistics toolkit for the scaling studies: log-log least squares
//! with a slope standard error, and deterministic sample aggregation that is
//! independent of the order in which parallel workers deliver results.

use crate::error::{Error, Result};

/// Slope, intercept, and the standard error of the slope from an ordinary
/// least-squares fit of `ln(y)` against `ln(x)`.
#[derive(Clone, Copy, Debug)]
pub struct LogLogFit {
    pub slope: f64,
    pub intercept: f64,
    pub slope_stderr: f64,
}

/// Fit `y ~ C x^slope` on logarithmic axes. Requires at least four points
/// with strictly positive coordinates.
pub fn fit_loglog(points: &[(f64, f64)]) -> Result<LogLogFit> {
    if points.len() < 4 {
        return Err(Error::InvalidParameter {
            name: "points",
            reason: format!("log-log fit needs at least 4 points, got {}", points.len()),
        });
    }
    let mut logs = Vec::with_capacity(points.len());
    for &(x, y) in points {
        if !(x > 0.0) || !(y > 0.0) || !x.is_finite() || !y.is_finite() {
            return Err(Error::InvalidParameter {
                name: "points",
                reason: format!("log-log fit needs positive finite data, got ({x}, {y})"),
            });
        }
        logs.push((x.ln(), y.ln()));
    }
    let n = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidParameter {
            name: "points",
            reason: "log-log fit needs at least two distinct abscissae".into(),
        });
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let dof = (logs.len() as f64 - 2.0).max(1.0);
    let sse: f64 = logs
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).powi(2))
        .sum();
    Ok(LogLogFit {
        slope,
        intercept,
        slope_stderr: (sse / dof / sxx).sqrt(),
    })
}

/// Pairwise (cascade) summation. Deterministic for a fixed input order and
/// substantially more accurate than a running sum on long Monte Carlo
/// streams.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    match values.len() {
        0 => 0.0,
        1 => values[0],
        2 => values[0] + values[1],
        n => {
            let mid = n / 2;
            pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
        }
    }
}

/// Sample mean via pairwise summation.
pub fn mean(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    pairwise_sum(values) / values.len() as f64
}

/// Standard error of the mean (sample standard deviation over sqrt(n)).
pub fn stderr_of_mean(values: &[f64]) -> f64 {
    let n = values.len();
    if n < 2 {
        return f64::NAN;
    }
    let m = mean(values);
    let devs: Vec<f64> = values.iter().map(|v| (v - m).powi(2)).collect();
    (pairwise_sum(&devs) / (n as f64 - 1.0) / n as f64).sqrt()
}

/// Per-sample results delivered in arbitrary order, aggregated as if they
/// had arrived in index order. Parallel studies write through this so that
/// thread scheduling cannot perturb the reported statistics.
#[derive(Clone, Debug)]
pub struct IndexedSamples {
    slots: Vec<Option<f64>>,
}

impl IndexedSamples {
    pub fn new(count: usize) -> Self {
        IndexedSamples { slots: vec![None; count] }
    }

    pub fn set(&mut self, index: usize, value: f64) {
        self.slots[index] = Some(value);
    }

    pub fn is_complete(&self) -> bool {
        self.slots.iter().all(Option::is_some)
    }

    /// Values in index order. Panics if a slot was never filled.
    pub fn values(&self) -> Vec<f64> {
        self.slots
            .iter()
            .enumerate()
            .map(|(i, v)| v.unwrap_or_else(|| panic!("sample {i} missing")))
            .collect()
    }

    pub fn mean(&self) -> f64 {
        mean(&self.values())
    }

    pub fn stderr(&self) -> f64 {
        stderr_of_mean(&self.values())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_exact_power_law() {
        let pts: Vec<(f64, f64)> = (1..=6)
            .map(|i| {
                let x = 2.0f64.powi(-i);
                (x, 3.5 * x.powf(0.75))
            })
            .collect();
        let fit = fit_loglog(&pts).unwrap();
        assert!((fit.slope - 0.75).abs() < 1e-12);
        assert!((fit.intercept - 3.5f64.ln()).abs() < 1e-12);
        assert!(fit.slope_stderr < 1e-12);
    }

    #[test]
    fn slope_stderr_matches_textbook_formula() {
        // Perturb a power law and check stderr against a direct evaluation.
        let pts = [
            (1.0, 1.1),
            (2.0, 1.9),
            (4.0, 4.3),
            (8.0, 7.6),
            (16.0, 16.5),
        ];
        let fit = fit_loglog(&pts).unwrap();
        let logs: Vec<(f64, f64)> = pts.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
        let mx = logs.iter().map(|p| p.0).sum::<f64>() / 5.0;
        let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
        let sse: f64 = logs
            .iter()
            .map(|p| (p.1 - fit.intercept - fit.slope * p.0).powi(2))
            .sum();
        let expect = (sse / 3.0 / sxx).sqrt();
        assert!((fit.slope_stderr - expect).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(fit_loglog(&[(1.0, 1.0), (2.0, 2.0), (3.0, 3.0)]).is_err());
        assert!(fit_loglog(&[(1.0, 1.0), (2.0, -2.0), (3.0, 3.0), (4.0, 4.0)]).is_err());
        assert!(fit_loglog(&[(1.0, 1.0), (1.0, 2.0), (1.0, 3.0), (1.0, 4.0)]).is_err());
    }

    #[test]
    fn aggregation_is_order_independent() {
        let values: Vec<f64> = (0..257).map(|i| ((i * 37 % 101) as f64).sin() * 1e3).collect();
        let mut forward = IndexedSamples::new(values.len());
        let mut backward = IndexedSamples::new(values.len());
        for (i, &v) in values.iter().enumerate() {
            forward.set(i, v);
        }
        for (i, &v) in values.iter().enumerate().rev() {
            backward.set(i, v);
        }
        assert_eq!(forward.mean().to_bits(), backward.mean().to_bits());
        assert_eq!(forward.stderr().to_bits(), backward.stderr().to_bits());
        assert!(forward.is_complete());
    }

    #[test]
    fn pairwise_matches_naive_on_small_input() {
        let xs = [1.0, 2.0, 3.0, 4.0, 5.0];
        assert_eq!(pairwise_sum(&xs), 15.0);
        assert_eq!(pairwise_sum(&[]), 0.0);
        assert!((mean(&xs) - 3.0).abs() < 1e-15);
    }
}
