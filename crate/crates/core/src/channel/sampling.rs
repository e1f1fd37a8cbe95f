use std::f64::consts::TAU;

use rand::Rng;

use super::{Geometry, UserPosition};
use crate::rng::uniform;

/// Horizontal distance of a user placed uniformly on a disk of radius `d_c`.
pub fn sample_user_position<R: Rng + ?Sized>(d_c: f64, rng: &mut R) -> f64 {
    d_c * uniform(rng).sqrt()
}

/// Uniform point on the cell disk, radius drawn before the angle.
pub fn sample_user_point<R: Rng + ?Sized>(geom: &Geometry, rng: &mut R) -> UserPosition {
    let d_h = sample_user_position(geom.cell_radius, rng);
    let (s, c) = (TAU * uniform(rng)).sin_cos();
    UserPosition {
        x: d_h * c,
        y: d_h * s,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{Purpose, StreamSeed};

    #[test]
    fn second_moment_and_support() {
        let mut rng = StreamSeed(11).chunk(Purpose::UserPosition, 0);
        let d_c = 3.0;
        let n = 1_000_000;
        let mut m2 = 0.0;
        for _ in 0..n {
            let d = sample_user_position(d_c, &mut rng);
            assert!((0.0..=d_c).contains(&d));
            m2 += d * d;
        }
        assert!((m2 / n as f64 / (d_c * d_c / 2.0) - 1.0).abs() < 0.01);
        assert_eq!(sample_user_position(0.0, &mut rng), 0.0);
    }

    #[test]
    fn points_inside_disk() {
        let geom = Geometry::new(2.5, 1.7, 20.0).unwrap();
        let mut rng = StreamSeed(5).chunk(Purpose::UserPosition, 1);
        for _ in 0..10_000 {
            let p = sample_user_point(&geom, &mut rng);
            assert!(p.horizontal_distance() <= 1.7 + 1e-12);
        }
    }
}
