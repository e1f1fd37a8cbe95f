//! Shifted exponential moments for log-mean-exp estimation.

/// Accumulates `e^{x_i}` for a stream of log-values `x_i` without overflow.
///
/// Holds `shift = max x_i`, `sum = Σ e^{x_i - shift}` and the matching
/// second moment, so `ln mean e^{x}` and its delta-method standard error can
/// be read off at any point. Merging is associative, which is what makes
/// chunked parallel estimates independent of worker count.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpMoments {
    shift: f64,
    sum: f64,
    sum_sq: f64,
    count: u64,
}

impl Default for ExpMoments {
    fn default() -> Self {
        Self {
            shift: f64::NEG_INFINITY,
            sum: 0.0,
            sum_sq: 0.0,
            count: 0,
        }
    }
}

impl ExpMoments {
    pub fn from_slice(xs: &[f64]) -> Self {
        let shift = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        if shift.is_finite() {
            for &x in xs {
                let e = (x - shift).exp();
                sum += e;
                sum_sq += e * e;
            }
        }
        Self {
            shift,
            sum,
            sum_sq,
            count: xs.len() as u64,
        }
    }

    pub fn merge(self, other: Self) -> Self {
        if other.count == 0 {
            return self;
        }
        if self.count == 0 {
            return other;
        }
        let shift = self.shift.max(other.shift);
        let (sa, sb) = if shift.is_finite() {
            ((self.shift - shift).exp(), (other.shift - shift).exp())
        } else {
            (0.0, 0.0)
        };
        Self {
            shift,
            sum: self.sum * sa + other.sum * sb,
            sum_sq: self.sum_sq * sa * sa + other.sum_sq * sb * sb,
            count: self.count + other.count,
        }
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    /// `ln( (1/n) Σ e^{x_i} )`.
    pub fn log_mean(&self) -> f64 {
        if self.count == 0 || self.sum == 0.0 {
            return f64::NEG_INFINITY;
        }
        self.shift + (self.sum / self.count as f64).ln()
    }

    /// Standard error of [`ExpMoments::log_mean`] by the delta method:
    /// `sd(e^x) / (mean(e^x) sqrt(n))`.
    pub fn log_mean_stderr(&self) -> f64 {
        let n = self.count as f64;
        if self.count < 2 || self.sum == 0.0 {
            return f64::INFINITY;
        }
        let mean = self.sum / n;
        let var = ((self.sum_sq - n * mean * mean) / (n - 1.0)).max(0.0);
        var.sqrt() / (mean * n.sqrt())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_direct_computation() {
        let xs: Vec<f64> = (0..100).map(|i| -0.05 * i as f64).collect();
        let m = ExpMoments::from_slice(&xs);
        let ys: Vec<f64> = xs.iter().map(|x| x.exp()).collect();
        let mean = ys.iter().sum::<f64>() / 100.0;
        let var = ys.iter().map(|y| (y - mean).powi(2)).sum::<f64>() / 99.0;
        assert!((m.log_mean() - mean.ln()).abs() < 1e-14);
        assert!((m.log_mean_stderr() - var.sqrt() / mean / 10.0).abs() < 1e-12);
    }

    #[test]
    fn merge_is_order_insensitive_and_overflow_free() {
        let a: Vec<f64> = (0..50).map(|i| -3000.0 - i as f64).collect();
        let b: Vec<f64> = (0..70).map(|i| -2990.0 - 0.5 * i as f64).collect();
        let whole: Vec<f64> = a.iter().chain(b.iter()).copied().collect();
        let m1 = ExpMoments::from_slice(&a).merge(ExpMoments::from_slice(&b));
        let m2 = ExpMoments::from_slice(&whole);
        assert!((m1.log_mean() - m2.log_mean()).abs() < 1e-12);
        assert!(m1.log_mean().is_finite());
        assert_eq!(m1.count(), 120);
    }
}
