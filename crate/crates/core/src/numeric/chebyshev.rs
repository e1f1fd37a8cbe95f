//! Chebyshev interpolation of smooth scalar functions on an interval.

#[derive(Debug, Clone)]
pub struct Chebyshev {
    lo: f64,
    hi: f64,
    coeffs: Vec<f64>,
}

impl Chebyshev {
    /// Interpolates `values`, which must hold `f` sampled at [`Chebyshev::nodes`].
    pub fn from_values(lo: f64, hi: f64, values: &[f64]) -> Self {
        let n = values.len();
        let mut coeffs = vec![0.0; n];
        for (j, c) in coeffs.iter_mut().enumerate() {
            let mut s = 0.0;
            for (k, v) in values.iter().enumerate() {
                s += v * (std::f64::consts::PI * j as f64 * (k as f64 + 0.5) / n as f64).cos();
            }
            *c = 2.0 * s / n as f64;
        }
        coeffs[0] *= 0.5;
        Self { lo, hi, coeffs }
    }

    /// The `n` interpolation nodes on `[lo, hi]`.
    pub fn nodes(lo: f64, hi: f64, n: usize) -> Vec<f64> {
        (0..n)
            .map(|k| {
                let t = (std::f64::consts::PI * (k as f64 + 0.5) / n as f64).cos();
                0.5 * (lo + hi) + 0.5 * (hi - lo) * t
            })
            .collect()
    }

    pub fn fit<F: FnMut(f64) -> f64>(lo: f64, hi: f64, n: usize, mut f: F) -> Self {
        let values: Vec<f64> = Self::nodes(lo, hi, n).into_iter().map(&mut f).collect();
        Self::from_values(lo, hi, &values)
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    /// Magnitude of the trailing coefficients, a cheap truncation-error proxy.
    pub fn tail_magnitude(&self) -> f64 {
        self.coeffs.iter().rev().take(3).map(|c| c.abs()).sum()
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        if self.hi == self.lo {
            return self.coeffs[0];
        }
        let t = (2.0 * x - self.lo - self.hi) / (self.hi - self.lo);
        let t2 = 2.0 * t;
        let mut b1 = 0.0;
        let mut b2 = 0.0;
        for &c in self.coeffs[1..].iter().rev() {
            let b0 = c + t2 * b1 - b2;
            b2 = b1;
            b1 = b0;
        }
        self.coeffs[0] + t * b1 - b2
    }
}
