use serde::{Deserialize, Serialize};

use super::{log_add_exp, EcCurve, EcEstimate, LogMgf, McSettings, MeanRate, Method, VlcEcCurve};
use crate::channel::{Geometry, QosSpec, VlcParams};
use crate::{Error, Result};

/// Frame-wise Bernoulli availability of the line of sight.
///
/// With probability `mu` the full rate is served, otherwise `omega` times it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlockageModel {
    pub mu: f64,
    pub omega: f64,
}

impl BlockageModel {
    pub fn new(mu: f64, omega: f64) -> Result<Self> {
        let b = Self { mu, omega };
        b.validate()?;
        Ok(b)
    }

    pub fn unblocked() -> Self {
        Self { mu: 1.0, omega: 0.0 }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.mu) {
            return Err(Error::invalid("blockage.mu", format!("must lie in [0, 1], got {}", self.mu)));
        }
        if !(self.omega >= 0.0 && self.omega < 1.0) {
            return Err(Error::invalid(
                "blockage.omega",
                format!("must lie in [0, 1), got {}", self.omega),
            ));
        }
        Ok(())
    }
}

/// A service process whose rate is thinned by random blockage.
#[derive(Debug, Clone)]
pub struct Blocked<C> {
    inner: C,
    model: BlockageModel,
}

impl<C: EcCurve> Blocked<C> {
    pub fn new(inner: C, model: BlockageModel) -> Result<Self> {
        model.validate()?;
        Ok(Self { inner, model })
    }

    pub fn inner(&self) -> &C {
        &self.inner
    }
}

impl<C: EcCurve> EcCurve for Blocked<C> {
    fn method(&self) -> Method {
        self.inner.method()
    }

    /// `ln[μ E e^{-θR} + (1-μ) E e^{-θΩR}]`.
    fn log_mgf(&self, theta: f64) -> Result<LogMgf> {
        let BlockageModel { mu, omega } = self.model;
        let mut out = LogMgf {
            value: f64::NEG_INFINITY,
            ..Default::default()
        };
        let mut terms = Vec::with_capacity(2);
        if mu > 0.0 {
            terms.push((mu.ln(), self.inner.log_mgf(theta)?));
        }
        if mu < 1.0 {
            let blocked = if omega == 0.0 {
                LogMgf::exact(0.0)
            } else {
                self.inner.log_mgf(theta * omega)?
            };
            terms.push(((-mu).ln_1p(), blocked));
        }
        for (w, lm) in &terms {
            out.value = log_add_exp(out.value, w + lm.value);
        }
        for (w, lm) in terms {
            // Each branch contributes its share of the mixture; adding the
            // shares' errors bounds the correlated case.
            out.stderr += (w + lm.value - out.value).exp() * lm.stderr;
            out.warnings.extend(lm.warnings);
        }
        out.warnings.dedup();
        Ok(out)
    }

    fn mean_rate(&self) -> Result<MeanRate> {
        let m = self.inner.mean_rate()?;
        let f = self.model.mu + (1.0 - self.model.mu) * self.model.omega;
        Ok(MeanRate {
            value: f * m.value,
            stderr: f * m.stderr,
        })
    }
}

pub fn effective_capacity_vlc_blockage(
    geom: &Geometry,
    vlc: &VlcParams,
    qos: &QosSpec,
    blk: BlockageModel,
    method: Method,
    mc: McSettings,
) -> Result<EcEstimate> {
    let curve = VlcEcCurve::new(geom, vlc, qos.frame, method, mc)?;
    Blocked::new(curve, blk)?.effective_capacity(qos.theta)
}
