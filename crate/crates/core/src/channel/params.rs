use std::f64::consts::{E, PI};

use serde::{Deserialize, Serialize};

use crate::units::{db_to_linear, dbm_per_mhz_to_w_per_hz};
use crate::{Error, Result};

/// Physical parameters of the LED access point and the photodetector.
///
/// Angles are in radians; everything else is SI.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VlcParams {
    /// Photodetector area (m²).
    pub pd_area: f64,
    /// Photodetector field-of-view half angle (rad).
    pub fov: f64,
    /// LED half-intensity angle (rad).
    pub half_power_angle: f64,
    pub refractive_index: f64,
    /// Optical filter gain.
    pub filter_gain: f64,
    /// Photodetector responsivity (A/W).
    pub responsivity: f64,
    /// Ratio between average optical and average electrical power.
    pub optical_to_electrical: f64,
    /// Average emitted optical power (W).
    pub optical_power: f64,
    /// Modulation bandwidth (Hz).
    pub bandwidth: f64,
    /// Receiver noise spectral density (A²/Hz).
    pub noise_psd: f64,
    /// Constant `c` of the IM/DD rate expression.
    pub rate_constant: f64,
}

impl VlcParams {
    /// Reference indoor deployment with the given LED half-intensity angle.
    pub fn reference(half_power_angle_deg: f64) -> Self {
        Self {
            pd_area: 1e-4,
            fov: 90f64.to_radians(),
            half_power_angle: half_power_angle_deg.to_radians(),
            refractive_index: 1.5,
            filter_gain: 1.0,
            responsivity: 0.53,
            optical_to_electrical: 3.0,
            optical_power: 9.0,
            bandwidth: 40e6,
            noise_psd: 1e-21,
            rate_constant: (E / (2.0 * PI)).sqrt(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("vlc.pd_area", self.pd_area),
            ("vlc.refractive_index", self.refractive_index),
            ("vlc.filter_gain", self.filter_gain),
            ("vlc.responsivity", self.responsivity),
            ("vlc.optical_to_electrical", self.optical_to_electrical),
            ("vlc.optical_power", self.optical_power),
            ("vlc.bandwidth", self.bandwidth),
            ("vlc.noise_psd", self.noise_psd),
            ("vlc.rate_constant", self.rate_constant),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::invalid(name, format!("must be positive and finite, got {v}")));
            }
        }
        if !(self.half_power_angle > 0.0 && self.half_power_angle < PI / 2.0) {
            return Err(Error::invalid("vlc.half_power_angle", "must lie in (0, 90) degrees"));
        }
        if !(self.fov > 0.0 && self.fov <= PI / 2.0) {
            return Err(Error::invalid("vlc.fov", "must lie in (0, 90] degrees"));
        }
        Ok(())
    }

    pub fn lambertian_index(&self) -> Result<f64> {
        super::lambertian_index(self.half_power_angle)
    }

    /// Electrical noise power `N_v B_v` (A²).
    pub fn noise_power(&self) -> f64 {
        self.noise_psd * self.bandwidth
    }

    /// `A D n² / (2π sin²ψ_C)`, the receiver collection factor.
    pub fn collection_factor(&self) -> f64 {
        self.pd_area * self.filter_gain * self.refractive_index.powi(2)
            / (2.0 * PI * self.fov.sin().powi(2))
    }

    /// Horizontal distance beyond which the incidence angle exceeds the
    /// field of view, for a receiver plane `vertical` meters below the LED.
    pub fn fov_radius(&self, vertical: f64) -> f64 {
        if self.fov >= PI / 2.0 {
            f64::INFINITY
        } else {
            vertical * self.fov.tan()
        }
    }
}

/// Parameters of the RF access point and the indoor propagation model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RfParams {
    /// Channel bandwidth (Hz).
    pub bandwidth: f64,
    /// Average transmit power (W).
    pub power: f64,
    /// Rician factor, linear.
    pub rician_k: f64,
    pub path_loss_exponent: f64,
    /// Log-normal shadowing standard deviation (dB).
    pub shadowing_std_db: f64,
    /// Noise spectral density (W/Hz).
    pub noise_psd: f64,
    /// Path loss at the reference distance (dB).
    pub ref_path_loss_db: f64,
    /// Reference distance (m).
    pub ref_distance: f64,
}

impl RfParams {
    /// Reference indoor deployment: 20 MHz at 10 mW, K = 5 dB.
    pub fn reference() -> Self {
        Self {
            bandwidth: 20e6,
            power: 10e-3,
            rician_k: db_to_linear(5.0),
            path_loss_exponent: 1.6,
            shadowing_std_db: 1.8,
            noise_psd: dbm_per_mhz_to_w_per_hz(-114.0),
            ref_path_loss_db: 40.0,
            ref_distance: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("rf.bandwidth", self.bandwidth),
            ("rf.power", self.power),
            ("rf.path_loss_exponent", self.path_loss_exponent),
            ("rf.noise_psd", self.noise_psd),
            ("rf.ref_distance", self.ref_distance),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::invalid(name, format!("must be positive and finite, got {v}")));
            }
        }
        if !(self.rician_k >= 0.0 && self.rician_k.is_finite()) {
            return Err(Error::invalid("rf.rician_k", "must be nonnegative and finite"));
        }
        if !(self.shadowing_std_db >= 0.0 && self.shadowing_std_db.is_finite()) {
            return Err(Error::invalid("rf.shadowing_std_db", "must be nonnegative and finite"));
        }
        if !self.ref_path_loss_db.is_finite() {
            return Err(Error::invalid("rf.ref_path_loss_db", "must be finite"));
        }
        Ok(())
    }

    /// Thermal noise power `N_r B_r` (W).
    pub fn noise_power(&self) -> f64 {
        self.noise_psd * self.bandwidth
    }
}

/// Statistical QoS requirement and framing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QosSpec {
    /// QoS exponent (1/bit).
    pub theta: f64,
    /// Frame duration (s).
    pub frame: f64,
}

impl QosSpec {
    pub fn new(theta: f64, frame: f64) -> Result<Self> {
        if !(theta >= 0.0 && theta.is_finite()) {
            return Err(Error::invalid("qos.theta", format!("must be nonnegative, got {theta}")));
        }
        if !(frame > 0.0 && frame.is_finite()) {
            return Err(Error::invalid("qos.frame", format!("must be positive, got {frame}")));
        }
        Ok(Self { theta, frame })
    }

    pub fn from_db(theta_db: f64, frame: f64) -> Result<Self> {
        Self::new(crate::units::theta_from_db(theta_db), frame)
    }

    pub fn with_theta(self, theta: f64) -> Self {
        Self { theta, ..self }
    }
}
