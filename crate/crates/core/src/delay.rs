//! Statistical delay bounds for a constant-rate arrival stream.
//!
//! For a service with effective capacity `C(θ)` and arrivals of `a` bits per
//! frame, any `θ` with `C(θ) > a` and `θ (C(θ) - a) ε ≤ 1` gives
//! `Pr{D > d} ≤ ε` for `d = -ln(θ (C(θ) - a) ε) / (θ a)`. The search below
//! picks the smallest such `d` over a log grid of θ, then polishes it with a
//! golden-section step around the best grid point.

use rayon::prelude::*;
use serde::Serialize;

use crate::ec::EcCurve;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ArrivalSpec {
    /// Bits per frame.
    pub a: f64,
    /// Target delay-violation probability.
    pub epsilon: f64,
}

impl ArrivalSpec {
    pub fn new(a: f64, epsilon: f64) -> Result<Self> {
        if !(a > 0.0 && a.is_finite()) {
            return Err(Error::invalid("delay.arrival", format!("must be positive, got {a}")));
        }
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(Error::invalid("delay.epsilon", format!("must lie in (0, 1), got {epsilon}")));
        }
        Ok(Self { a, epsilon })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DelayBound {
    /// Bound in frames; infinite when infeasible.
    pub d: f64,
    /// Minimizing QoS exponent; NaN when infeasible.
    pub theta_star: f64,
    /// `C(θ*)`.
    pub ec_at_theta: f64,
    pub feasible: bool,
}

impl DelayBound {
    fn infeasible() -> Self {
        Self {
            d: f64::INFINITY,
            theta_star: f64::NAN,
            ec_at_theta: f64::NAN,
            feasible: false,
        }
    }

    pub fn seconds(&self, frame: f64) -> f64 {
        self.d * frame
    }

    /// Smallest whole-frame delay the bound certifies.
    ///
    /// Service is frame-granular, so delays are integers and the bound is
    /// only guaranteed at integer thresholds: `Pr{D > n} <= ε` for every
    /// `n >= d`. A fractional `d` certifies `ceil(d)`, not `floor(d)`.
    pub fn frames(&self) -> f64 {
        self.d.ceil()
    }
}

/// `-ln(θ (C - a) ε) / (θ a)` when both constraints hold.
pub fn bound_at(theta: f64, ec: f64, arr: &ArrivalSpec) -> Option<f64> {
    let x = theta * (ec - arr.a) * arr.epsilon;
    if ec > arr.a && theta > 0.0 && x <= 1.0 {
        Some(-x.ln() / (theta * arr.a))
    } else {
        None
    }
}

/// Search settings for the free parameter θ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DelaySearch {
    pub theta_lo: f64,
    pub theta_hi: f64,
    pub grid_points: usize,
    /// Bracket width in `ln θ` at which the golden-section step stops.
    pub tolerance: f64,
}

impl Default for DelaySearch {
    fn default() -> Self {
        Self {
            theta_lo: 1e-8,
            theta_hi: 1e-1,
            grid_points: 200,
            tolerance: 1e-4,
        }
    }
}

/// Effective capacity tabulated on the search grid, reusable across
/// arrival rates.
#[derive(Debug, Clone, PartialEq)]
pub struct EcTable {
    pub thetas: Vec<f64>,
    pub ec: Vec<f64>,
    search: DelaySearch,
}

impl DelaySearch {
    pub fn validate(&self) -> Result<()> {
        if !(self.theta_lo > 0.0 && self.theta_hi > self.theta_lo) {
            return Err(Error::invalid("delay.theta_range", "need 0 < theta_lo < theta_hi"));
        }
        if self.grid_points < 2 {
            return Err(Error::invalid("delay.grid_points", "need at least two points"));
        }
        Ok(())
    }

    pub fn grid(&self) -> Vec<f64> {
        let (l, h) = (self.theta_lo.ln(), self.theta_hi.ln());
        let n = self.grid_points;
        (0..n)
            .map(|i| (l + (h - l) * i as f64 / (n - 1) as f64).exp())
            .collect()
    }

    pub fn tabulate<F>(&self, ec_fn: F) -> Result<EcTable>
    where
        F: Fn(f64) -> Result<f64> + Sync,
    {
        self.validate()?;
        let thetas = self.grid();
        let ec = thetas.par_iter().map(|&t| ec_fn(t)).collect::<Result<Vec<_>>>()?;
        Ok(EcTable {
            thetas,
            ec,
            search: *self,
        })
    }

    pub fn tabulate_curve<C: EcCurve + ?Sized>(&self, curve: &C) -> Result<EcTable> {
        self.tabulate(|t| curve.effective_capacity(t).map(|e| e.value))
    }
}

impl EcTable {
    /// Tightest bound; `ec_fn` is only called during the refinement step.
    pub fn bound<F>(&self, ec_fn: F, arr: &ArrivalSpec) -> Result<DelayBound>
    where
        F: Fn(f64) -> Result<f64>,
    {
        let mut best: Option<(usize, f64)> = None;
        for (i, (&t, &c)) in self.thetas.iter().zip(&self.ec).enumerate() {
            if let Some(d) = bound_at(t, c, arr) {
                if best.is_none_or(|(_, b)| d < b) {
                    best = Some((i, d));
                }
            }
        }
        let Some((i, d)) = best else {
            return Ok(DelayBound::infeasible());
        };
        let mut out = DelayBound {
            d,
            theta_star: self.thetas[i],
            ec_at_theta: self.ec[i],
            feasible: true,
        };

        let n = self.thetas.len();
        let mut lo = self.thetas[i.saturating_sub(1)].ln();
        let mut hi = self.thetas[(i + 1).min(n - 1)].ln();
        let mut eval = |x: f64| -> Result<f64> {
            let t = x.exp();
            let c = ec_fn(t)?;
            Ok(match bound_at(t, c, arr) {
                Some(d) => {
                    if d < out.d {
                        out = DelayBound {
                            d,
                            theta_star: t,
                            ec_at_theta: c,
                            feasible: true,
                        };
                    }
                    d
                }
                None => f64::INFINITY,
            })
        };
        let g = 0.5 * (5f64.sqrt() - 1.0);
        let mut x1 = hi - g * (hi - lo);
        let mut x2 = lo + g * (hi - lo);
        let mut f1 = eval(x1)?;
        let mut f2 = eval(x2)?;
        while hi - lo > self.search.tolerance {
            if f1 <= f2 {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = hi - g * (hi - lo);
                f1 = eval(x1)?;
            } else {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + g * (hi - lo);
                f2 = eval(x2)?;
            }
        }
        Ok(out)
    }

    /// Maximal runs of grid points satisfying both constraints, as
    /// `(θ_first, θ_last)` pairs.
    pub fn feasible_intervals(&self, arr: &ArrivalSpec) -> Vec<(f64, f64)> {
        let mut out = Vec::new();
        let mut start: Option<f64> = None;
        let mut last = 0.0;
        for (&t, &c) in self.thetas.iter().zip(&self.ec) {
            if bound_at(t, c, arr).is_some() {
                start.get_or_insert(t);
                last = t;
            } else if let Some(s) = start.take() {
                out.push((s, last));
            }
        }
        if let Some(s) = start {
            out.push((s, last));
        }
        out
    }
}

/// Tightest delay bound over the default θ search.
pub fn delay_bound<F>(ec_fn: F, arr: &ArrivalSpec) -> Result<DelayBound>
where
    F: Fn(f64) -> Result<f64> + Sync,
{
    DelaySearch::default().tabulate(&ec_fn)?.bound(&ec_fn, arr)
}

/// Grid intervals of θ where the bound is valid.
pub fn feasibility_range<F>(ec_fn: F, arr: &ArrivalSpec) -> Result<Vec<(f64, f64)>>
where
    F: Fn(f64) -> Result<f64> + Sync,
{
    Ok(DelaySearch::default().tabulate(ec_fn)?.feasible_intervals(arr))
}

#[cfg(test)]
mod tests {
    use super::*;

    // EC of a two-point service: R = 0 or 2m with equal probability.
    fn two_point(m: f64) -> impl Fn(f64) -> Result<f64> + Sync {
        move |t: f64| Ok(-(0.5 + 0.5 * (-2.0 * m * t).exp()).ln() / t)
    }

    #[test]
    fn returned_theta_satisfies_constraints() {
        let f = two_point(1000.0);
        for a in [100.0, 300.0, 600.0, 900.0] {
            let arr = ArrivalSpec::new(a, 1e-4).unwrap();
            let b = delay_bound(&f, &arr).unwrap();
            assert!(b.feasible);
            let c = f(b.theta_star).unwrap();
            assert!(c > a);
            assert!(b.theta_star <= 1.0 / (arr.epsilon * (c - a)) * (1.0 + 1e-12));
            assert!(b.d > 0.0);
        }
    }

    #[test]
    fn refinement_never_worse_than_grid() {
        let f = two_point(1000.0);
        let arr = ArrivalSpec::new(400.0, 1e-6).unwrap();
        let s = DelaySearch::default();
        let table = s.tabulate(&f).unwrap();
        let grid_best = table
            .thetas
            .iter()
            .zip(&table.ec)
            .filter_map(|(&t, &c)| bound_at(t, c, &arr))
            .fold(f64::INFINITY, f64::min);
        let b = table.bound(&f, &arr).unwrap();
        assert!(b.d <= grid_best);
        // Brute force on a much finer grid.
        let fine = DelaySearch {
            grid_points: 20_000,
            ..s
        }
        .tabulate(&f)
        .unwrap();
        let fine_best = fine
            .thetas
            .iter()
            .zip(&fine.ec)
            .filter_map(|(&t, &c)| bound_at(t, c, &arr))
            .fold(f64::INFINITY, f64::min);
        assert!((b.d / fine_best - 1.0).abs() < 1e-5, "{} vs {}", b.d, fine_best);
    }

    #[test]
    fn infeasible_when_arrival_exceeds_mean() {
        let f = two_point(1000.0);
        let arr = ArrivalSpec::new(1000.5, 1e-4).unwrap();
        let b = delay_bound(&f, &arr).unwrap();
        assert!(!b.feasible);
        assert!(feasibility_range(&f, &arr).unwrap().is_empty());
    }

    #[test]
    fn diverges_near_capacity() {
        let f = two_point(1000.0);
        let ds: Vec<f64> = [900.0, 990.0, 999.0]
            .iter()
            .map(|&a| delay_bound(&f, &ArrivalSpec::new(a, 1e-4).unwrap()).unwrap().d)
            .collect();
        assert!(ds[0] < ds[1] && ds[1] < ds[2]);
        assert!(ds[2] > 10.0 * ds[0]);
    }

    #[test]
    fn intervals_match_direct_check() {
        let f = two_point(1000.0);
        let arr = ArrivalSpec::new(500.0, 1e-3).unwrap();
        let table = DelaySearch::default().tabulate(&f).unwrap();
        let iv = table.feasible_intervals(&arr);
        for (&t, &c) in table.thetas.iter().zip(&table.ec) {
            let direct = c > arr.a && t <= 1.0 / (arr.epsilon * (c - arr.a));
            let inside = iv.iter().any(|&(s, e)| t >= s && t <= e);
            assert_eq!(direct, inside, "theta {t}");
        }
    }
}
