//! Geometry, channel gains and achievable rates of the RF and VLC links,
//! plus the seeded samplers for user placement and RF fading.

mod geometry;
mod params;
mod rf;
mod sampling;
mod vlc;

pub use geometry::{Geometry, UserPosition};
pub use params::{QosSpec, RfParams, VlcParams};
pub use rf::{
    large_scale_gain, rf_path_loss_db, rf_rate, sample_rf_fading, FadingSample, RicianPower,
};
pub use sampling::{sample_user_point, sample_user_position};
pub use vlc::{
    lambertian_index, vlc_channel_gain, vlc_rate, vlc_snr, GainSquaredDistribution, VlcLink,
};
