//! Effective-capacity analysis of a hybrid RF/VLC downlink.
//!
//! The crate computes per-frame rates of an indoor RF link (Rician fading,
//! log-normal shadowing) and a line-of-sight VLC link (Lambertian LED), turns
//! them into effective capacities under a QoS exponent θ, picks the serving
//! link, and derives statistical delay bounds. A discrete-time queue
//! simulator checks the asymptotic claims against sample paths.
//!
//! ```
//! use rfvlc::{EcCurve, Geometry, Method, VlcEcCurve, VlcParams};
//!
//! let vlc = VlcParams::reference(45.0);
//! let geom = Geometry::new(2.5, 2.5, 20.0).unwrap();
//! let curve = VlcEcCurve::quadrature(&geom, &vlc, 1e-4).unwrap();
//! let ec = curve.effective_capacity(1e-3).unwrap();
//! assert_eq!(ec.method, Method::Quadrature);
//! assert!(ec.value > 0.0);
//! ```

// `!(x > 0.0)` is used on purpose so that NaN inputs are rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod access;
pub mod channel;
pub mod delay;
pub mod ec;
mod error;
pub mod numeric;
pub mod queue;
pub mod rng;
pub mod scenario;
pub mod sweep;
pub mod units;

pub use access::{per_user_curve, per_user_ec, AccessConfig, AccessScheme};
pub use channel::{FadingSample, Geometry, QosSpec, RfParams, VlcParams};
pub use delay::{delay_bound, feasibility_range, ArrivalSpec, DelayBound, DelaySearch};
pub use ec::{
    select_link, BlockageModel, Blocked, EcCurve, EcEstimate, FadingAverage, IlluminationSpec,
    Link, LogMgf, McSettings, MeanRate, Method, RfEcCurve, VlcEcCurve,
};
pub use error::{Error, Result};
pub use queue::{QueueTrace, ServiceProcess, TailFit};
pub use rng::StreamSeed;
pub use scenario::{Diagnostics, Scenario};
pub use sweep::{run_sweep, Figure, SweepResult};
