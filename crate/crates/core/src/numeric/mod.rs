//! Numerical building blocks: adaptive quadrature, Chebyshev interpolation,
//! a scaled modified Bessel function and a log-domain moment accumulator.

mod bessel;
mod chebyshev;
mod moments;
mod quadrature;

pub use bessel::bessel_i0e;
pub use chebyshev::Chebyshev;
pub use moments::ExpMoments;
pub use quadrature::{integrate, Integral, QuadSettings};
