//! Run statistics in the shape of a results table: mean, standard
//! deviation and a 95% confidence interval for the mean.

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.96;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Summary {
    pub mean: f64,
    /// Sample standard deviation (N - 1 denominator).
    pub stddev: f64,
    pub ci95_low: f64,
    pub ci95_high: f64,
}

impl Summary {
    /// Normal-approximation interval `mean +/- 1.96 * stddev / sqrt(N)`.
    /// Needs at least two samples.
    pub fn of(xs: &[f64]) -> Option<Summary> {
        let n = xs.len();
        if n < 2 {
            return None;
        }
        let mean = xs.iter().sum::<f64>() / n as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        let stddev = var.sqrt();
        let half = Z95 * stddev / (n as f64).sqrt();
        Some(Summary {
            mean,
            stddev,
            ci95_low: mean - half,
            ci95_high: mean + half,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunStatistics {
    pub loss_mw: Summary,
    pub seconds: Summary,
}

impl RunStatistics {
    pub fn of(losses: &[f64], seconds: &[f64]) -> Option<RunStatistics> {
        Some(RunStatistics {
            loss_mw: Summary::of(losses)?,
            seconds: Summary::of(seconds)?,
        })
    }
}

/// Median of a non-empty sample.
pub fn median(xs: &[f64]) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}
