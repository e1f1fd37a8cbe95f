//! Equal TDMA and FDMA resource splits among homogeneous users.
//!
//! TDMA gives each user the whole band and power for `T/N` of every frame;
//! FDMA gives each user `B/N` and `P/N` for the whole frame. Either way the
//! per-user capacity is reported in bits per original frame at the original
//! QoS exponent.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::channel::{RfParams, VlcParams};
use crate::ec::{EcCurve, EcEstimate, Link};
use crate::scenario::Scenario;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AccessScheme {
    Tdma,
    Fdma,
}

impl fmt::Display for AccessScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AccessScheme::Tdma => "tdma",
            AccessScheme::Fdma => "fdma",
        })
    }
}

impl FromStr for AccessScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "tdma" => Ok(AccessScheme::Tdma),
            "fdma" => Ok(AccessScheme::Fdma),
            _ => Err(Error::invalid("access.scheme", format!("`{s}` is not tdma or fdma"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AccessConfig {
    pub scheme: AccessScheme,
    pub users: u32,
}

impl AccessConfig {
    pub fn new(scheme: AccessScheme, users: u32) -> Result<Self> {
        if users == 0 {
            return Err(Error::invalid("access.users", "need at least one user"));
        }
        Ok(Self { scheme, users })
    }

    pub fn single() -> Self {
        Self {
            scheme: AccessScheme::Tdma,
            users: 1,
        }
    }
}

/// Per-user VLC parameters and frame share.
pub fn per_user_vlc_params(vlc: &VlcParams, frame: f64, cfg: AccessConfig) -> (VlcParams, f64) {
    let n = cfg.users as f64;
    match cfg.scheme {
        AccessScheme::Tdma => (vlc.clone(), frame / n),
        AccessScheme::Fdma => {
            let mut v = vlc.clone();
            v.bandwidth /= n;
            v.optical_power /= n;
            (v, frame)
        }
    }
}

/// Per-user RF parameters and frame share.
pub fn per_user_rf_params(rf: &RfParams, frame: f64, cfg: AccessConfig) -> (RfParams, f64) {
    let n = cfg.users as f64;
    match cfg.scheme {
        AccessScheme::Tdma => (rf.clone(), frame / n),
        AccessScheme::Fdma => {
            let mut r = rf.clone();
            r.bandwidth /= n;
            r.power /= n;
            (r, frame)
        }
    }
}

/// The service one user sees. Rates are per original frame either way, since
/// a `T/N` transmission window inside each frame carries `R/N` bits.
pub fn per_user_curve(link: Link, scenario: &Scenario, cfg: AccessConfig) -> Result<Box<dyn EcCurve>> {
    if cfg.users == 0 {
        return Err(Error::invalid("access.users", "need at least one user"));
    }
    let frame = scenario.qos.frame;
    Ok(match link {
        Link::Vlc => {
            let (v, t) = per_user_vlc_params(&scenario.vlc, frame, cfg);
            // The cell follows the full-power LED, not the per-user share.
            let radius = scenario.cell_radius_for(&scenario.vlc)?;
            Box::new(scenario.vlc_curve_with_radius(&v, t, radius)?)
        }
        Link::Rf => {
            let (r, t) = per_user_rf_params(&scenario.rf, frame, cfg);
            Box::new(scenario.rf_curve(&r, t, &scenario.geometry)?)
        }
    })
}

/// Per-user effective capacity at the scenario's QoS exponent.
pub fn per_user_ec(link: Link, scenario: &Scenario, cfg: AccessConfig) -> Result<EcEstimate> {
    per_user_curve(link, scenario, cfg)?.effective_capacity(scenario.qos.theta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::vlc_snr;

    #[test]
    fn single_user_is_identity() {
        let vlc = VlcParams::reference(45.0);
        let rf = RfParams::reference();
        for scheme in [AccessScheme::Tdma, AccessScheme::Fdma] {
            let cfg = AccessConfig::new(scheme, 1).unwrap();
            assert_eq!(per_user_vlc_params(&vlc, 1e-4, cfg), (vlc.clone(), 1e-4));
            assert_eq!(per_user_rf_params(&rf, 1e-4, cfg), (rf.clone(), 1e-4));
        }
    }

    #[test]
    fn fdma_snr_scaling() {
        let cfg = AccessConfig::new(AccessScheme::Fdma, 4).unwrap();
        let rf = RfParams::reference();
        let (r4, _) = per_user_rf_params(&rf, 1e-4, cfg);
        let snr = |r: &RfParams| r.power / r.noise_power();
        assert!((snr(&r4) / snr(&rf) - 1.0).abs() < 1e-12);

        let vlc = VlcParams::reference(45.0);
        let (v4, _) = per_user_vlc_params(&vlc, 1e-4, cfg);
        assert!((vlc_snr(1e-5, &v4) / vlc_snr(1e-5, &vlc) - 0.25).abs() < 1e-12);
    }

    #[test]
    fn zero_users_rejected() {
        assert!(AccessConfig::new(AccessScheme::Tdma, 0).is_err());
    }
}
