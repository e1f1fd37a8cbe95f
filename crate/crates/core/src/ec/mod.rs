//! Effective capacity of the RF and VLC links and the link-selection rule.
//!
//! Every estimator is exposed as an [`EcCurve`]: something that can report
//! `ln E[e^{-θR}]` for any θ and the mean rate for θ = 0. Effective
//! capacities, blockage mixtures, multi-user splits and delay bounds are all
//! built on that one interface.

mod blockage;
mod illumination;
mod rf;
mod vlc;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub use blockage::{effective_capacity_vlc_blockage, BlockageModel, Blocked};
pub use illumination::{
    illuminance_span, max_cell_radius, min_span_for_viewing_angle, viewing_angle_bound,
    IlluminationSpec,
};
pub use rf::{effective_capacity_rf, FadingAverage, RfDraws, RfEcCurve};
pub use vlc::{
    effective_capacity_vlc, vlc_mgf_closed_form, vlc_mgf_quadrature, MgfParams, VlcEcCurve,
    VlcRateModel,
};

/// How an expectation over the user position (and fading) is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    ClosedForm,
    Quadrature,
    MonteCarlo,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::ClosedForm => "closed-form",
            Method::Quadrature => "quadrature",
            Method::MonteCarlo => "monte-carlo",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "closed-form" => Ok(Method::ClosedForm),
            "quadrature" => Ok(Method::Quadrature),
            "monte-carlo" => Ok(Method::MonteCarlo),
            other => Err(Error::invalid(
                "method",
                format!("`{other}` is not one of closed-form, quadrature, monte-carlo"),
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Link {
    Rf,
    Vlc,
}

impl fmt::Display for Link {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Link::Rf => "RF",
            Link::Vlc => "VLC",
        })
    }
}

/// An effective capacity in bits per frame.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EcEstimate {
    pub value: f64,
    pub method: Method,
    /// Zero for deterministic methods.
    pub stderr: f64,
    pub theta: f64,
    /// Non-fatal precondition notes (low SNR, noisy estimate, ...).
    pub warnings: Vec<String>,
}

/// `ln E[e^{-θR}]` with its standard error.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LogMgf {
    pub value: f64,
    pub stderr: f64,
    pub warnings: Vec<String>,
}

impl LogMgf {
    pub fn exact(value: f64) -> Self {
        Self {
            value,
            ..Default::default()
        }
    }
}

/// Mean rate in bits per frame with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanRate {
    pub value: f64,
    pub stderr: f64,
}

/// Relative standard error of the MGF above which an estimate is flagged.
pub const NOISY_MGF: f64 = 0.01;

/// A service process summarized by its log moment generating function.
pub trait EcCurve: Send + Sync {
    fn method(&self) -> Method;

    /// `ln E[e^{-θR}]` for `θ > 0`.
    fn log_mgf(&self, theta: f64) -> Result<LogMgf>;

    fn mean_rate(&self) -> Result<MeanRate>;

    /// `-(1/θ) ln E[e^{-θR}]`, with θ = 0 answered by the mean rate.
    fn effective_capacity(&self, theta: f64) -> Result<EcEstimate> {
        if !(theta >= 0.0 && theta.is_finite()) {
            return Err(Error::invalid("theta", format!("must be nonnegative, got {theta}")));
        }
        if theta == 0.0 {
            let m = self.mean_rate()?;
            return Ok(EcEstimate {
                value: m.value,
                method: self.method(),
                stderr: m.stderr,
                theta,
                warnings: Vec::new(),
            });
        }
        let lm = self.log_mgf(theta)?;
        let mut warnings = lm.warnings;
        // For small errors the log stderr is the relative stderr of the MGF.
        if lm.stderr > NOISY_MGF {
            warnings.push(format!(
                "relative standard error of the MGF is {:.2}% (above {:.0}%)",
                100.0 * lm.stderr,
                100.0 * NOISY_MGF
            ));
        }
        Ok(EcEstimate {
            value: -lm.value / theta,
            method: self.method(),
            stderr: lm.stderr / theta,
            theta,
            warnings,
        })
    }
}

impl<C: EcCurve + ?Sized> EcCurve for Box<C> {
    fn method(&self) -> Method {
        (**self).method()
    }
    fn log_mgf(&self, theta: f64) -> Result<LogMgf> {
        (**self).log_mgf(theta)
    }
    fn mean_rate(&self) -> Result<MeanRate> {
        (**self).mean_rate()
    }
}

impl<C: EcCurve + ?Sized> EcCurve for &C {
    fn method(&self) -> Method {
        (**self).method()
    }
    fn log_mgf(&self, theta: f64) -> Result<LogMgf> {
        (**self).log_mgf(theta)
    }
    fn mean_rate(&self) -> Result<MeanRate> {
        (**self).mean_rate()
    }
}

/// Picks the link with the larger effective capacity; an exact tie goes to
/// VLC so that the RF spectrum is left for others.
pub fn select_link(ec_rf: &EcEstimate, ec_vlc: &EcEstimate) -> Result<Link> {
    let scale = ec_rf.theta.abs().max(ec_vlc.theta.abs());
    if (ec_rf.theta - ec_vlc.theta).abs() > 1e-12 * scale {
        return Err(Error::ThetaMismatch {
            left: ec_rf.theta,
            right: ec_vlc.theta,
        });
    }
    Ok(if ec_rf.value > ec_vlc.value {
        Link::Rf
    } else {
        Link::Vlc
    })
}

/// `ln(e^a + e^b)` without overflow; `-inf` terms are ignored.
pub(crate) fn log_add_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let m = a.max(b);
    m + ((a - m).exp() + (b - m).exp()).ln()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn est(value: f64, theta: f64) -> EcEstimate {
        EcEstimate {
            value,
            method: Method::Quadrature,
            stderr: 0.0,
            theta,
            warnings: vec![],
        }
    }

    #[test]
    fn tie_goes_to_vlc() {
        assert_eq!(select_link(&est(5.0, 1e-3), &est(5.0, 1e-3)).unwrap(), Link::Vlc);
        assert_eq!(select_link(&est(6.0, 1e-3), &est(5.0, 1e-3)).unwrap(), Link::Rf);
        assert_eq!(select_link(&est(4.0, 1e-3), &est(5.0, 1e-3)).unwrap(), Link::Vlc);
    }

    #[test]
    fn mismatched_theta_is_an_error() {
        assert!(matches!(
            select_link(&est(1.0, 1e-3), &est(1.0, 1e-4)),
            Err(Error::ThetaMismatch { .. })
        ));
    }

    #[test]
    fn method_round_trip() {
        for m in [Method::ClosedForm, Method::Quadrature, Method::MonteCarlo] {
            assert_eq!(m.as_str().parse::<Method>().unwrap(), m);
        }
        assert!("simpson".parse::<Method>().is_err());
    }

    #[test]
    fn log_add_exp_edges() {
        assert_eq!(log_add_exp(f64::NEG_INFINITY, -3.0), -3.0);
        assert!((log_add_exp(0.0, 0.0) - 2f64.ln()).abs() < 1e-15);
        assert!((log_add_exp(-1000.0, -1000.0) - (-1000.0 + 2f64.ln())).abs() < 1e-12);
    }
}

/// Sample count and seed of a Monte Carlo estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct McSettings {
    pub samples: usize,
    pub seed: crate::rng::StreamSeed,
}

impl Default for McSettings {
    fn default() -> Self {
        Self {
            samples: 1_000_000,
            seed: crate::rng::StreamSeed(0),
        }
    }
}
