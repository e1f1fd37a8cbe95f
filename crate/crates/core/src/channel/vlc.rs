use std::f64::consts::LN_2;

use super::{Geometry, VlcParams};
use crate::{Error, Result};

/// `r = -1 / log2(cos φ½)`.
pub fn lambertian_index(half_power_angle: f64) -> Result<f64> {
    let c = half_power_angle.cos();
    if !(half_power_angle > 0.0 && half_power_angle < std::f64::consts::FRAC_PI_2) || !(c > 0.0) {
        return Err(Error::Domain {
            what: "LED half-intensity angle (rad)",
            value: half_power_angle,
        });
    }
    Ok(-1.0 / c.log2())
}

/// Line-of-sight gain of a user at horizontal distance `d_h`.
///
/// The LED points down and the photodetector up, so the irradiance and
/// incidence angles coincide with `cos ψ = d_v / d_1`.
pub fn vlc_channel_gain(geom: &Geometry, d_h: f64, vlc: &VlcParams) -> Result<f64> {
    if !(d_h >= 0.0) {
        return Err(Error::Domain {
            what: "horizontal distance",
            value: d_h,
        });
    }
    let link = VlcLink::new(geom.vertical, vlc, 1.0)?;
    Ok(link.gain(d_h * d_h))
}

/// `ζ = (α P h)² / (ς² N_v B_v)`.
pub fn vlc_snr(gain: f64, vlc: &VlcParams) -> f64 {
    let s = vlc.responsivity * vlc.optical_power * gain;
    s * s / (vlc.optical_to_electrical.powi(2) * vlc.noise_power())
}

/// Bits per frame, `(T B_v / 2) log2(1 + c² ζ)`.
pub fn vlc_rate(snr: f64, vlc: &VlcParams, frame: f64) -> f64 {
    0.5 * frame * vlc.bandwidth * (vlc.rate_constant.powi(2) * snr).ln_1p() / LN_2
}

/// The VLC link seen from a fixed receiver plane, with every constant that
/// does not depend on the user position folded in.
///
/// Positions are passed as squared horizontal distances `u = d_h²`, which is
/// the variable the uniform user density is flat in.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VlcLink {
    /// Lambertian index.
    pub r: f64,
    /// `G = ω (r+1) d_v^(r+1)`, so that `h_v = G d_1^-(r+3)`.
    pub gain_coeff: f64,
    pub vertical: f64,
    /// Squared horizontal radius of the field of view.
    pub fov_radius_sq: f64,
    /// `(α P)² / (ς² σ_v²)`.
    pub snr_coeff: f64,
    /// `c²`.
    pub c2: f64,
    /// `T B_v / 2`.
    pub half_tb: f64,
}

impl VlcLink {
    pub fn new(vertical: f64, vlc: &VlcParams, frame: f64) -> Result<Self> {
        vlc.validate()?;
        if !(vertical > 0.0) {
            return Err(Error::invalid("geometry.vertical", "must be positive"));
        }
        let r = vlc.lambertian_index()?;
        let fov = vlc.fov_radius(vertical);
        Ok(Self {
            r,
            gain_coeff: vlc.collection_factor() * (r + 1.0) * vertical.powf(r + 1.0),
            vertical,
            fov_radius_sq: fov * fov,
            snr_coeff: vlc_snr(1.0, vlc),
            c2: vlc.rate_constant.powi(2),
            half_tb: 0.5 * frame * vlc.bandwidth,
        })
    }

    /// `ρ = c² (α P)² / (ς² σ_v²)`, the SNR scale of the high-SNR rate.
    pub fn rho(&self) -> f64 {
        self.c2 * self.snr_coeff
    }

    pub fn gain(&self, u: f64) -> f64 {
        if u > self.fov_radius_sq {
            return 0.0;
        }
        self.gain_coeff * (u + self.vertical * self.vertical).powf(-0.5 * (self.r + 3.0))
    }

    pub fn snr(&self, u: f64) -> f64 {
        let h = self.gain(u);
        self.snr_coeff * h * h
    }

    pub fn rate(&self, u: f64) -> f64 {
        self.half_tb * (self.c2 * self.snr(u)).ln_1p() / LN_2
    }

    /// `ln(c² ζ)` at squared distance `u`, finite only inside the field of view.
    pub fn ln_scaled_snr(&self, u: f64) -> f64 {
        if u > self.fov_radius_sq {
            return f64::NEG_INFINITY;
        }
        (self.rho() * self.gain_coeff * self.gain_coeff).ln()
            - (self.r + 3.0) * (u + self.vertical * self.vertical).ln()
    }
}

/// Distribution of `h_v²` for a user uniform on a disk of radius `d_c`
/// that lies entirely inside the field of view.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GainSquaredDistribution {
    r: f64,
    g2: f64,
    dv2: f64,
    dc2: f64,
}

impl GainSquaredDistribution {
    pub fn new(geom: &Geometry, vlc: &VlcParams) -> Result<Self> {
        geom.validate()?;
        let link = VlcLink::new(geom.vertical, vlc, 1.0)?;
        let dc2 = geom.cell_radius * geom.cell_radius;
        if !(dc2 > 0.0) {
            return Err(Error::invalid("geometry.cell_radius", "must be positive"));
        }
        if dc2 > link.fov_radius_sq {
            return Err(Error::invalid(
                "geometry.cell_radius",
                "cell extends beyond the photodetector field of view",
            ));
        }
        Ok(Self {
            r: link.r,
            g2: link.gain_coeff * link.gain_coeff,
            dv2: geom.vertical * geom.vertical,
            dc2,
        })
    }

    /// `ξ_min`, the squared gain at the cell edge.
    pub fn lower(&self) -> f64 {
        self.g2 * (self.dc2 + self.dv2).powf(-(self.r + 3.0))
    }

    /// `ξ_max`, the squared gain at the cell center.
    pub fn upper(&self) -> f64 {
        self.g2 * self.dv2.powf(-(self.r + 3.0))
    }

    pub fn pdf(&self, x: f64) -> f64 {
        if x < self.lower() || x > self.upper() {
            return 0.0;
        }
        let k = self.r + 3.0;
        self.g2.powf(1.0 / k) * x.powf(-(k + 1.0) / k) / (k * self.dc2)
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if x <= self.lower() {
            return 0.0;
        }
        if x >= self.upper() {
            return 1.0;
        }
        let u = (self.g2 / x).powf(1.0 / (self.r + 3.0)) - self.dv2;
        (1.0 - u / self.dc2).clamp(0.0, 1.0)
    }
}
