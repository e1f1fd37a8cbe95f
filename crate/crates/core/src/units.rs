//! Unit conversions used at the configuration boundary.
//!
//! Everything inside the library is SI and linear; decibel quantities are
//! converted exactly once, when a scenario is resolved.

/// Power ratio in dB to linear scale.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

/// Noise density in dBm/MHz to W/Hz.
pub fn dbm_per_mhz_to_w_per_hz(dbm_per_mhz: f64) -> f64 {
    db_to_linear(dbm_per_mhz) * 1e-3 / 1e6
}

/// QoS exponents quoted in dB are `10 log10(theta)` with theta in 1/bit.
pub fn theta_from_db(db: f64) -> f64 {
    db_to_linear(db)
}

pub fn theta_to_db(theta: f64) -> f64 {
    linear_to_db(theta)
}
