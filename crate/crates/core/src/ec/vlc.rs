use std::f64::consts::LN_2;
use std::sync::Arc;

use rayon::prelude::*;

use super::{log_add_exp, EcCurve, EcEstimate, LogMgf, McSettings, MeanRate, Method};
use crate::channel::{sample_user_position, Geometry, QosSpec, VlcLink, VlcParams};
use crate::numeric::{integrate, ExpMoments, QuadSettings};
use crate::rng::{Purpose, CHUNK};
use crate::{Error, Result};

/// Below this cell-edge SNR the high-SNR closed form is flagged.
pub const LOW_SNR: f64 = 10.0;

/// Which per-frame rate the position average is taken over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum VlcRateModel {
    /// `(T B/2) log2(1 + c²ζ)`.
    #[default]
    Exact,
    /// `(T B/2) log2(c²ζ)`, the rate the closed form integrates.
    HighSnr,
}

/// Shorthand constants of the closed-form MGF.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MgfParams {
    /// `c² P² α² / (ς² σ_v²)`.
    pub rho: f64,
    /// `θ T B_v / (2 ln 2)`.
    pub kappa: f64,
    /// `A D n² / (2π sin² ψ_C)`.
    pub omega: f64,
}

impl MgfParams {
    pub fn new(vlc: &VlcParams, qos: &QosSpec) -> Result<Self> {
        let link = VlcLink::new(1.0, vlc, qos.frame)?;
        Ok(Self {
            rho: link.rho(),
            kappa: qos.theta * link.half_tb / LN_2,
            omega: vlc.collection_factor(),
        })
    }
}

/// Effective capacity of the VLC link for a user placed uniformly on the
/// cell disk and redrawn every frame.
#[derive(Debug, Clone)]
pub struct VlcEcCurve {
    link: VlcLink,
    cell_radius_sq: f64,
    method: Method,
    model: VlcRateModel,
    quad: QuadSettings,
    samples: Option<Arc<Vec<f64>>>,
}

impl VlcEcCurve {
    /// `mc` is only consulted for [`Method::MonteCarlo`].
    pub fn new(
        geom: &Geometry,
        vlc: &VlcParams,
        frame: f64,
        method: Method,
        mc: McSettings,
    ) -> Result<Self> {
        Self::with_model(geom, vlc, frame, method, VlcRateModel::Exact, mc)
    }

    pub fn with_model(
        geom: &Geometry,
        vlc: &VlcParams,
        frame: f64,
        method: Method,
        model: VlcRateModel,
        mc: McSettings,
    ) -> Result<Self> {
        geom.validate()?;
        if !(frame > 0.0) {
            return Err(Error::invalid("qos.frame", "must be positive"));
        }
        let link = VlcLink::new(geom.vertical, vlc, frame)?;
        let mut curve = Self {
            link,
            cell_radius_sq: geom.cell_radius * geom.cell_radius,
            method,
            model,
            quad: QuadSettings::default(),
            samples: None,
        };
        if method == Method::MonteCarlo {
            curve.samples = Some(Arc::new(curve.draw_rates(geom.cell_radius, mc)?));
        }
        Ok(curve)
    }

    pub fn closed_form(geom: &Geometry, vlc: &VlcParams, frame: f64) -> Result<Self> {
        Self::new(geom, vlc, frame, Method::ClosedForm, McSettings::default())
    }

    pub fn quadrature(geom: &Geometry, vlc: &VlcParams, frame: f64) -> Result<Self> {
        Self::new(geom, vlc, frame, Method::Quadrature, McSettings::default())
    }

    pub fn monte_carlo(geom: &Geometry, vlc: &VlcParams, frame: f64, mc: McSettings) -> Result<Self> {
        Self::new(geom, vlc, frame, Method::MonteCarlo, mc)
    }

    pub fn link(&self) -> &VlcLink {
        &self.link
    }

    pub fn rate_model(&self) -> VlcRateModel {
        self.model
    }

    /// SNR at the outermost served point of the cell.
    pub fn edge_snr(&self) -> f64 {
        self.link.snr(self.served_radius_sq())
    }

    /// Per-frame rate at squared horizontal distance `u` under the chosen model.
    pub fn rate(&self, u: f64) -> f64 {
        match self.model {
            VlcRateModel::Exact => self.link.rate(u),
            VlcRateModel::HighSnr => {
                let l = self.link.ln_scaled_snr(u);
                if l == f64::NEG_INFINITY {
                    0.0
                } else {
                    self.link.half_tb * l / LN_2
                }
            }
        }
    }

    fn served_radius_sq(&self) -> f64 {
        self.cell_radius_sq.min(self.link.fov_radius_sq)
    }

    /// Fraction of the cell area inside the field of view.
    fn served_fraction(&self) -> f64 {
        if self.cell_radius_sq == 0.0 {
            1.0
        } else {
            self.served_radius_sq() / self.cell_radius_sq
        }
    }

    fn draw_rates(&self, cell_radius: f64, mc: McSettings) -> Result<Vec<f64>> {
        if mc.samples < 2 {
            return Err(Error::invalid("samples", "Monte Carlo needs at least two samples"));
        }
        let chunks = mc.samples.div_ceil(CHUNK);
        let parts: Vec<Vec<f64>> = (0..chunks)
            .into_par_iter()
            .map(|c| {
                let len = CHUNK.min(mc.samples - c * CHUNK);
                let mut rng = mc.seed.chunk(Purpose::UserPosition, c);
                (0..len)
                    .map(|_| {
                        let d = sample_user_position(cell_radius, &mut rng);
                        self.rate(d * d)
                    })
                    .collect()
            })
            .collect();
        Ok(parts.concat())
    }

    fn low_snr_warning(&self) -> Vec<String> {
        let z = self.edge_snr();
        if z < LOW_SNR {
            vec![format!(
                "cell-edge SNR {z:.3} is below {LOW_SNR}; the high-SNR approximation degrades"
            )]
        } else {
            Vec::new()
        }
    }

    fn closed_form_log_mgf(&self, theta: f64) -> LogMgf {
        let kappa = theta * self.link.half_tb / LN_2;
        let b2 = self.served_radius_sq();
        let dv2 = self.link.vertical * self.link.vertical;
        let g = self.link.gain_coeff;
        let p = kappa * (self.link.r + 3.0) + 1.0;
        let lead = -kappa * (self.link.rho() * g * g).ln();
        // (1/b²) ∫_0^{b²} (ρG²)^-κ (u + d_v²)^{κ(r+3)} du
        let inner = if b2 == 0.0 {
            lead + (p - 1.0) * dv2.ln()
        } else {
            let y = p * (b2 / dv2).ln_1p();
            lead + p * dv2.ln() + ln_expm1(y) - (b2 * p).ln()
        };
        let frac = self.served_fraction();
        let value = if frac < 1.0 {
            log_add_exp(frac.ln() + inner, (-frac).ln_1p())
        } else {
            inner
        };
        LogMgf {
            value,
            stderr: 0.0,
            warnings: self.low_snr_warning(),
        }
    }

    fn closed_form_mean(&self) -> f64 {
        let b2 = self.served_radius_sq();
        let dv2 = self.link.vertical * self.link.vertical;
        let g = self.link.gain_coeff;
        let mean_ln = if b2 / dv2 < 1e-8 {
            dv2.ln() + b2 / (2.0 * dv2)
        } else {
            let f = |w: f64| w * w.ln() - w;
            (f(b2 + dv2) - f(dv2)) / b2
        };
        let ln_snr = (self.link.rho() * g * g).ln() - (self.link.r + 3.0) * mean_ln;
        self.served_fraction() * self.link.half_tb * ln_snr / LN_2
    }

    fn quadrature_log_mgf(&self, theta: f64) -> Result<LogMgf> {
        let b2 = self.served_radius_sq();
        let frac = self.served_fraction();
        if b2 == 0.0 {
            return Ok(LogMgf::exact(-theta * self.rate(0.0)));
        }
        // Shift by the smallest rate so the integrand stays in (0, 1].
        let shift = if frac < 1.0 { 0.0 } else { self.rate(b2) };
        let i = integrate(
            |t| (-theta * (self.rate(t * b2) - shift)).exp(),
            &[0.0, 0.25, 0.5, 0.75, 1.0],
            self.quad,
        )?;
        let value = if frac < 1.0 {
            (frac * i.value + (1.0 - frac)).ln()
        } else {
            -theta * shift + i.value.ln()
        };
        Ok(LogMgf {
            value,
            stderr: 0.0,
            warnings: Vec::new(),
        })
    }

    fn quadrature_mean(&self) -> Result<f64> {
        let b2 = self.served_radius_sq();
        if b2 == 0.0 {
            return Ok(self.served_fraction() * self.rate(0.0));
        }
        let i = integrate(|t| self.rate(t * b2), &[0.0, 0.5, 1.0], self.quad)?;
        Ok(self.served_fraction() * i.value)
    }
}

impl EcCurve for VlcEcCurve {
    fn method(&self) -> Method {
        self.method
    }

    fn log_mgf(&self, theta: f64) -> Result<LogMgf> {
        if theta == 0.0 {
            return Ok(LogMgf::exact(0.0));
        }
        match self.method {
            Method::ClosedForm => Ok(self.closed_form_log_mgf(theta)),
            Method::Quadrature => self.quadrature_log_mgf(theta),
            Method::MonteCarlo => {
                let rates = self.samples.as_ref().expect("drawn at construction");
                let m = rates
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
        match self.method {
            Method::ClosedForm => Ok(MeanRate {
                value: self.closed_form_mean(),
                stderr: 0.0,
            }),
            Method::Quadrature => Ok(MeanRate {
                value: self.quadrature_mean()?,
                stderr: 0.0,
            }),
            Method::MonteCarlo => Ok(sample_mean(self.samples.as_ref().expect("drawn"))),
        }
    }
}

/// Mean and standard error with chunked partial sums reduced in order.
pub(crate) fn sample_mean(xs: &[f64]) -> MeanRate {
    let n = xs.len() as f64;
    let (s, s2) = xs
        .par_chunks(CHUNK)
        .map(|c| c.iter().fold((0.0, 0.0), |(a, b), x| (a + x, b + x * x)))
        .collect::<Vec<_>>()
        .into_iter()
        .fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    let mean = s / n;
    let var = ((s2 - n * mean * mean) / (n - 1.0)).max(0.0);
    MeanRate {
        value: mean,
        stderr: (var / n).sqrt(),
    }
}

/// `ln(e^y - 1)` for `y > 0`.
fn ln_expm1(y: f64) -> f64 {
    if y > 30.0 {
        y + (-(-y).exp()).ln_1p()
    } else {
        y.exp_m1().ln()
    }
}

/// Closed-form `ln E[e^{-θ R_v}]` under the high-SNR rate. Returned in log
/// form because the MGF underflows at strict QoS exponents.
pub fn vlc_mgf_closed_form(geom: &Geometry, vlc: &VlcParams, qos: &QosSpec) -> Result<LogMgf> {
    VlcEcCurve::closed_form(geom, vlc, qos.frame)?.log_mgf(qos.theta)
}

/// `ln E[e^{-θ R_v}]` by adaptive quadrature over the exact rate.
pub fn vlc_mgf_quadrature(geom: &Geometry, vlc: &VlcParams, qos: &QosSpec) -> Result<LogMgf> {
    VlcEcCurve::quadrature(geom, vlc, qos.frame)?.log_mgf(qos.theta)
}

pub fn effective_capacity_vlc(
    geom: &Geometry,
    vlc: &VlcParams,
    qos: &QosSpec,
    method: Method,
    mc: McSettings,
) -> Result<EcEstimate> {
    VlcEcCurve::new(geom, vlc, qos.frame, method, mc)?.effective_capacity(qos.theta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::StreamSeed;

    const T: f64 = 1e-4;

    fn cell(phi_deg: f64, dv: f64) -> (Geometry, VlcParams) {
        let vlc = VlcParams::reference(phi_deg);
        let geom = Geometry::new(dv, dv * phi_deg.to_radians().tan(), 0.0).unwrap();
        (geom, vlc)
    }

    #[test]
    fn exact_quadrature_reference_values() {
        // Reference values from an independent adaptive-quadrature script.
        let refs = [
            (30.0, 25067.7248044258, 26382.7449298256),
            (45.0, 18011.3900667482, 20390.4792817145),
            (60.0, 10012.2741125258, 13881.9144180549),
        ];
        for (phi, ec, mean) in refs {
            let (g, v) = cell(phi, 2.5);
            let c = VlcEcCurve::quadrature(&g, &v, T).unwrap();
            let e = c.effective_capacity(1e-3).unwrap().value;
            let m = c.mean_rate().unwrap().value;
            assert!((e / ec - 1.0).abs() < 1e-8, "phi={phi}: {e} vs {ec}");
            assert!((m / mean - 1.0).abs() < 1e-8, "phi={phi}: {m} vs {mean}");
        }
    }

    #[test]
    fn closed_form_matches_high_snr_quadrature() {
        for phi in [30.0, 45.0, 60.0] {
            for dv in [2.0, 2.5, 3.0] {
                let (g, v) = cell(phi, dv);
                let cf = VlcEcCurve::closed_form(&g, &v, T).unwrap();
                let q = VlcEcCurve::with_model(
                    &g,
                    &v,
                    T,
                    Method::Quadrature,
                    VlcRateModel::HighSnr,
                    McSettings::default(),
                )
                .unwrap();
                for th in [0.0, 1e-4, 1e-3, 1e-2] {
                    let a = cf.effective_capacity(th).unwrap().value;
                    let b = q.effective_capacity(th).unwrap().value;
                    assert!((a / b - 1.0).abs() < 1e-9, "phi={phi} dv={dv} th={th}: {a} vs {b}");
                }
            }
        }
    }

    #[test]
    fn zero_theta_and_point_cell() {
        let (g, v) = cell(45.0, 2.5);
        let lm = vlc_mgf_closed_form(&g, &v, &QosSpec::new(0.0, T).unwrap()).unwrap();
        assert_eq!(lm.value, 0.0);
        let point = g.with_cell_radius(0.0);
        let cf = VlcEcCurve::closed_form(&point, &v, T).unwrap();
        let hs = v.rate_constant.powi(2) * cf.link().snr(0.0);
        let center = cf.link().half_tb * hs.log2();
        let lm = cf.log_mgf(1e-3).unwrap().value;
        assert!((lm / (-1e-3 * center) - 1.0).abs() < 1e-12);
        let tiny = VlcEcCurve::closed_form(&g.with_cell_radius(1e-7), &v, T).unwrap();
        assert!((tiny.log_mgf(1e-3).unwrap().value / lm - 1.0).abs() < 1e-9);
    }

    #[test]
    fn low_snr_closed_form_overstates_mgf() {
        // log2(c²ζ) < log2(1 + c²ζ): the approximate rate is smaller, so its
        // MGF is larger and its effective capacity smaller.
        let (g, mut v) = cell(60.0, 2.5);
        v.optical_power = 0.05;
        let qos = QosSpec::new(1e-3, T).unwrap();
        let cf = vlc_mgf_closed_form(&g, &v, &qos).unwrap();
        let q = vlc_mgf_quadrature(&g, &v, &qos).unwrap();
        assert!(q.value < cf.value);
        assert!(!cf.warnings.is_empty());
    }

    #[test]
    fn monte_carlo_agrees_with_quadrature() {
        let (g, v) = cell(45.0, 2.5);
        let mc = McSettings {
            samples: 200_000,
            seed: StreamSeed(3),
        };
        let m = VlcEcCurve::monte_carlo(&g, &v, T, mc).unwrap();
        let q = VlcEcCurve::quadrature(&g, &v, T).unwrap();
        for th in [1e-4, 1e-3, 1e-2] {
            let a = m.effective_capacity(th).unwrap();
            let b = q.effective_capacity(th).unwrap();
            assert!(a.stderr > 0.0);
            assert!((a.value - b.value).abs() < 4.0 * a.stderr, "{th}: {a:?} vs {b:?}");
        }
    }

    #[test]
    fn fov_outside_serves_nothing() {
        let (g, mut v) = cell(45.0, 2.5);
        v.fov = 30f64.to_radians();
        let q = VlcEcCurve::quadrature(&g, &v, T).unwrap();
        let cf = VlcEcCurve::closed_form(&g, &v, T).unwrap();
        let inside = (30f64.to_radians().tan() / 45f64.to_radians().tan()).powi(2);
        // At a very strict exponent only the rate-zero region survives.
        let strict = q.log_mgf(1.0).unwrap().value;
        assert!((strict - (1.0 - inside).ln()).abs() < 1e-9);
        let strict = cf.log_mgf(1.0).unwrap().value;
        assert!((strict - (1.0 - inside).ln()).abs() < 1e-9);
    }
}
