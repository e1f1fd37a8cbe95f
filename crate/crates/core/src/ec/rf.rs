use std::f64::consts::LN_2;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::vlc::sample_mean;
use super::{EcCurve, EcEstimate, LogMgf, McSettings, MeanRate, Method};
use crate::channel::{
    rf_path_loss_db, rf_rate, sample_rf_fading, sample_user_point, Geometry, QosSpec, RfParams,
    RicianPower,
};
use crate::numeric::{integrate, Chebyshev, ExpMoments, QuadSettings};
use crate::rng::{Purpose, StreamSeed, CHUNK};
use crate::{Error, Result};

/// How the small-scale fading enters the RF expectation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FadingAverage {
    /// Plain Monte Carlo over joint (position, shadowing, fading) draws.
    Sampled,
    /// Monte Carlo over position and shadowing; the Rician fading is
    /// integrated out by quadrature for every draw.
    ///
    /// Once `θ` exceeds `ln 2 / (T B_r)` the MGF is dominated by deep fades
    /// with probability far below `1/n`, which plain sampling never sees.
    #[default]
    Integrated,
}

/// The per-frame draws behind an RF estimate.
#[derive(Debug, Clone)]
pub struct RfDraws {
    /// Rate of each frame with its sampled fading, bits per frame.
    pub rates: Vec<f64>,
    /// `ln(P Ω / σ²)` of each frame, Ω including the shadowing draw.
    pub ln_mean_snr: Vec<f64>,
}

impl RfDraws {
    /// Frames are drawn chunk-wise from [`Purpose::RfChannel`] substreams:
    /// position (radius, angle), shadowing, then the two fading quadratures.
    pub fn draw(geom: &Geometry, rf: &RfParams, frame: f64, samples: usize, seed: StreamSeed) -> Result<Self> {
        geom.validate()?;
        rf.validate()?;
        let chunks = samples.div_ceil(CHUNK);
        let parts: Vec<Result<(Vec<f64>, Vec<f64>)>> = (0..chunks)
            .into_par_iter()
            .map(|c| {
                let len = CHUNK.min(samples - c * CHUNK);
                let mut rng = seed.chunk(Purpose::RfChannel, c);
                let mut rates = Vec::with_capacity(len);
                let mut ln_s = Vec::with_capacity(len);
                let ln_p = (rf.power / rf.noise_power()).ln();
                for _ in 0..len {
                    let d0 = geom.rf_distance(sample_user_point(geom, &mut rng));
                    let f = sample_rf_fading(d0, rf, &mut rng)?;
                    rates.push(rf_rate(f.power(), rf, frame));
                    ln_s.push(ln_p - rf_path_loss_db(d0, rf, f.shadowing_db)? / 10.0);
                }
                Ok((rates, ln_s))
            })
            .collect();
        let mut rates = Vec::with_capacity(samples);
        let mut ln_mean_snr = Vec::with_capacity(samples);
        for p in parts {
            let (r, s) = p?;
            rates.extend(r);
            ln_mean_snr.extend(s);
        }
        Ok(Self { rates, ln_mean_snr })
    }
}

/// Effective capacity of the RF link for a user uniform on the VLC cell.
#[derive(Debug, Clone)]
pub struct RfEcCurve {
    rf: RfParams,
    frame: f64,
    average: FadingAverage,
    draws: Arc<RfDraws>,
    snr_range: (f64, f64),
}

impl RfEcCurve {
    pub fn new(
        geom: &Geometry,
        rf: &RfParams,
        frame: f64,
        mc: McSettings,
        average: FadingAverage,
    ) -> Result<Self> {
        if mc.samples < 2 {
            return Err(Error::invalid("samples", "Monte Carlo needs at least two samples"));
        }
        if !(frame > 0.0) {
            return Err(Error::invalid("qos.frame", "must be positive"));
        }
        let draws = RfDraws::draw(geom, rf, frame, mc.samples, mc.seed)?;
        let lo = draws.ln_mean_snr.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = draws.ln_mean_snr.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Ok(Self {
            rf: rf.clone(),
            frame,
            average,
            draws: Arc::new(draws),
            snr_range: (lo, hi),
        })
    }

    pub fn draws(&self) -> &RfDraws {
        &self.draws
    }

    pub fn fading_average(&self) -> FadingAverage {
        self.average
    }

    fn tb(&self) -> f64 {
        self.frame * self.rf.bandwidth
    }

    /// Interpolant over `ln s` of a fading expectation, refined until the
    /// Chebyshev tail is negligible.
    fn fit_over_snr<F>(&self, f: F) -> Result<Chebyshev>
    where
        F: Fn(f64) -> Result<f64> + Sync,
    {
        let (lo, hi) = self.snr_range;
        let mut n = 17;
        loop {
            let nodes = Chebyshev::nodes(lo, hi, n);
            let values = nodes.par_iter().map(|&x| f(x)).collect::<Result<Vec<f64>>>()?;
            let cheb = Chebyshev::from_values(lo, hi, &values);
            let scale = values.iter().fold(1.0f64, |m, v| m.max(v.abs()));
            if hi - lo < 1e-12 || cheb.tail_magnitude() <= 1e-12 * scale || n >= 513 {
                return Ok(cheb);
            }
            n = 2 * n - 1;
        }
    }

    fn integrated_log_mgf(&self, theta: f64) -> Result<LogMgf> {
        let fading = RicianPower::new(self.rf.rician_k)?;
        let kappa = theta * self.tb() / LN_2;
        let cheb = self.fit_over_snr(|ln_s| log_fading_mgf(&fading, ln_s.exp(), kappa))?;
        let m = self
            .draws
            .ln_mean_snr
            .par_chunks(CHUNK)
            .map(|c| {
                let xs: Vec<f64> = c.iter().map(|&x| cheb.eval(x)).collect();
                ExpMoments::from_slice(&xs)
            })
            .collect::<Vec<_>>()
            .into_iter()
            .fold(ExpMoments::default(), ExpMoments::merge);
        Ok(LogMgf {
            value: m.log_mean(),
            stderr: m.log_mean_stderr(),
            warnings: Vec::new(),
        })
    }

    fn integrated_mean(&self) -> Result<MeanRate> {
        let fading = RicianPower::new(self.rf.rician_k)?;
        let tb = self.tb();
        let cheb = self.fit_over_snr(|ln_s| Ok(tb * mean_fading_log2(&fading, ln_s.exp())?))?;
        let means: Vec<f64> = self.draws.ln_mean_snr.par_iter().map(|&x| cheb.eval(x)).collect();
        Ok(sample_mean(&means))
    }
}

/// Breakpoints that resolve the `g ≲ 1/s` region where deep fades live.
fn fading_breakpoints(s: f64) -> Vec<f64> {
    let mut pts = vec![0.0];
    let mut g = (1e-3 / s).min(1e-3);
    while g < 1.0 {
        pts.push(g);
        g *= 10.0;
    }
    pts.extend([1.0, 3.0, 10.0, 30.0, 80.0]);
    pts
}

const FADING_QUAD: QuadSettings = QuadSettings {
    abs_tol: 0.0,
    rel_tol: 1e-11,
    max_intervals: 4000,
};

/// `ln E_g[(1 + s g)^-κ]` over unit-mean Rician power `g`.
fn log_fading_mgf(fading: &RicianPower, s: f64, kappa: f64) -> Result<f64> {
    let i = integrate(
        |g| fading.pdf(g) * (-kappa * (s * g).ln_1p()).exp(),
        &fading_breakpoints(s),
        FADING_QUAD,
    )?;
    Ok(i.value.ln())
}

/// `E_g[log2(1 + s g)]`.
fn mean_fading_log2(fading: &RicianPower, s: f64) -> Result<f64> {
    let i = integrate(
        |g| fading.pdf(g) * (s * g).ln_1p() / LN_2,
        &fading_breakpoints(s),
        FADING_QUAD,
    )?;
    Ok(i.value)
}

impl EcCurve for RfEcCurve {
    fn method(&self) -> Method {
        Method::MonteCarlo
    }

    fn log_mgf(&self, theta: f64) -> Result<LogMgf> {
        if theta == 0.0 {
            return Ok(LogMgf::exact(0.0));
        }
        match self.average {
            FadingAverage::Integrated => self.integrated_log_mgf(theta),
            FadingAverage::Sampled => {
                let m = self
                    .draws
                    .rates
                    .par_chunks(CHUNK)
                    .map(|c| {
                        let xs: Vec<f64> = c.iter().map(|r| -theta * r).collect();
                        ExpMoments::from_slice(&xs)
                    })
                    .collect::<Vec<_>>()
                    .into_iter()
                    .fold(ExpMoments::default(), ExpMoments::merge);
                Ok(LogMgf {
                    value: m.log_mean(),
                    stderr: m.log_mean_stderr(),
                    warnings: Vec::new(),
                })
            }
        }
    }

    fn mean_rate(&self) -> Result<MeanRate> {
        match self.average {
            FadingAverage::Integrated => self.integrated_mean(),
            FadingAverage::Sampled => Ok(sample_mean(&self.draws.rates)),
        }
    }
}

/// Plain Monte Carlo effective capacity over joint fading, shadowing and
/// position draws.
pub fn effective_capacity_rf(
    geom: &Geometry,
    rf: &RfParams,
    qos: &QosSpec,
    num_samples: usize,
    seed: StreamSeed,
) -> Result<EcEstimate> {
    let mc = McSettings {
        samples: num_samples,
        seed,
    };
    let mut est = RfEcCurve::new(geom, rf, qos.frame, mc, FadingAverage::Sampled)?
        .effective_capacity(qos.theta)?;
    if num_samples < 10_000 {
        est.warnings
            .push(format!("{num_samples} samples is below the recommended 10^4"));
    }
    Ok(est)
}
