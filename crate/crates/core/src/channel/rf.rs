use std::f64::consts::LN_2;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use super::RfParams;
use crate::numeric::bessel_i0e;
use crate::{Error, Result};

/// `L = L_ref + 10 ϱ log10(d_0 / d_ref) + X_σ` in dB.
pub fn rf_path_loss_db(d0: f64, rf: &RfParams, shadowing_db: f64) -> Result<f64> {
    if !(d0 > 0.0) {
        return Err(Error::Domain {
            what: "RF link distance",
            value: d0,
        });
    }
    Ok(rf.ref_path_loss_db
        + 10.0 * rf.path_loss_exponent * (d0 / rf.ref_distance).log10()
        + shadowing_db)
}

/// Average channel power for a large-scale loss given in dB.
///
/// The propagation model writes this as `e^(-L/10)` rather than `10^(-L/10)`;
/// the natural-base form is kept deliberately so that rates stay on the
/// scale the reference scenario was calibrated for.
pub fn large_scale_gain(path_loss_db: f64) -> f64 {
    (-path_loss_db / 10.0).exp()
}

/// Bits per frame, `T B_r log2(1 + P |h|² / σ_r²)`.
pub fn rf_rate(channel_power: f64, rf: &RfParams, frame: f64) -> f64 {
    frame * rf.bandwidth * (rf.power * channel_power / rf.noise_power()).ln_1p() / LN_2
}

/// One frame of the RF channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FadingSample {
    /// Complex fading coefficient including the large-scale loss.
    pub h_r: Complex64,
    /// Shadowing draw `X_σ` (dB).
    pub shadowing_db: f64,
}

impl FadingSample {
    pub fn power(&self) -> f64 {
        self.h_r.norm_sqr()
    }
}

/// Draws shadowing and then Rician small-scale fading for a user `d0`
/// meters from the RF AP.
///
/// `h_r` has mean `sqrt(Ω K/(K+1))` and variance `Ω/(K+1)`, where
/// `Ω = e^(-L/10)` includes the fresh shadowing draw.
pub fn sample_rf_fading<R: Rng + ?Sized>(d0: f64, rf: &RfParams, rng: &mut R) -> Result<FadingSample> {
    let x: f64 = rng.sample(StandardNormal);
    let shadowing_db = rf.shadowing_std_db * x;
    let omega = large_scale_gain(rf_path_loss_db(d0, rf, shadowing_db)?);
    let g = RicianPower::new(rf.rician_k)?.sample_normalized(rng);
    Ok(FadingSample {
        h_r: g * omega.sqrt(),
        shadowing_db,
    })
}

/// Unit-mean Rician fading with factor `K`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RicianPower {
    k: f64,
}

impl RicianPower {
    pub fn new(k: f64) -> Result<Self> {
        if !(k >= 0.0 && k.is_finite()) {
            return Err(Error::invalid("rf.rician_k", "must be nonnegative and finite"));
        }
        Ok(Self { k })
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    /// A complex coefficient with `E|h|² = 1`.
    pub fn sample_normalized<R: Rng + ?Sized>(&self, rng: &mut R) -> Complex64 {
        let los = (self.k / (self.k + 1.0)).sqrt();
        let scatter = (0.5 / (self.k + 1.0)).sqrt();
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(los + scatter * re, scatter * im)
    }

    /// Density of `g = |h|²`, a scaled noncentral chi-square with two
    /// degrees of freedom.
    pub fn pdf(&self, g: f64) -> f64 {
        if g < 0.0 {
            return 0.0;
        }
        let k1 = self.k + 1.0;
        let z = 2.0 * (self.k * k1 * g).sqrt();
        // K + (K+1) g - z = (sqrt((K+1) g) - sqrt(K))²
        let e = ((k1 * g).sqrt() - self.k.sqrt()).powi(2);
        k1 * (-e).exp() * bessel_i0e(z)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{Purpose, StreamSeed};

    #[test]
    fn path_loss_examples() {
        let rf = RfParams::reference();
        assert!((rf_path_loss_db(1.0, &rf, 0.0).unwrap() - 40.0).abs() < 1e-12);
        assert!((rf_path_loss_db(10.0, &rf, 0.0).unwrap() - 56.0).abs() < 1e-12);
        assert!((rf_path_loss_db(10.0, &rf, 3.0).unwrap() - 59.0).abs() < 1e-12);
        assert!(rf_path_loss_db(0.0, &rf, 0.0).is_err());
    }

    #[test]
    fn rate_examples() {
        let rf = RfParams::reference();
        let t = 1e-4;
        assert_eq!(rf_rate(0.0, &rf, t), 0.0);
        let unit = rf.noise_power() / rf.power;
        assert!((rf_rate(unit, &rf, t) - t * rf.bandwidth).abs() < 1e-9);
        let g = large_scale_gain(56.0);
        let snr = rf.power * g / rf.noise_power();
        assert!((snr / 464430684.75025314 - 1.0).abs() < 1e-12);
        assert!((rf_rate(g, &rf, t) / 57_581.776_111_688_22 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rician_pdf_normalizes_with_unit_mean() {
        for k in [0.0, 1.0, 10f64.powf(0.5), 30.0] {
            let p = RicianPower::new(k).unwrap();
            let s = crate::numeric::QuadSettings {
                abs_tol: 1e-13,
                rel_tol: 1e-12,
                max_intervals: 2000,
            };
            let mass = crate::numeric::integrate(|g| p.pdf(g), &[0.0, 1.0, 5.0, 60.0], s).unwrap();
            let mean = crate::numeric::integrate(|g| g * p.pdf(g), &[0.0, 1.0, 5.0, 60.0], s).unwrap();
            assert!((mass.value - 1.0).abs() < 1e-9, "k={k} mass={}", mass.value);
            assert!((mean.value - 1.0).abs() < 1e-9, "k={k} mean={}", mean.value);
        }
    }

    #[test]
    fn large_k_concentrates() {
        let rf = RfParams {
            rician_k: 1e12,
            shadowing_std_db: 0.0,
            ..RfParams::reference()
        };
        let mut rng = StreamSeed(1).chunk(Purpose::RfChannel, 0);
        let omega = large_scale_gain(rf_path_loss_db(7.0, &rf, 0.0).unwrap());
        for _ in 0..100 {
            let s = sample_rf_fading(7.0, &rf, &mut rng).unwrap();
            assert!((s.power() / omega - 1.0).abs() < 1e-5);
        }
    }

    #[test]
    fn second_moment_matches_per_draw_average_power() {
        let rf = RfParams::reference();
        let mut rng = StreamSeed(7).chunk(Purpose::RfChannel, 0);
        let n = 1_000_000;
        let (mut emp, mut ana) = (0.0, 0.0);
        for _ in 0..n {
            let s = sample_rf_fading(12.0, &rf, &mut rng).unwrap();
            emp += s.power();
            ana += large_scale_gain(rf_path_loss_db(12.0, &rf, s.shadowing_db).unwrap());
        }
        assert!((emp / ana - 1.0).abs() < 0.01, "ratio {}", emp / ana);
    }

    #[test]
    fn deterministic_given_seed() {
        let rf = RfParams::reference();
        let draw = |seed| {
            let mut rng = StreamSeed(seed).chunk(Purpose::RfChannel, 2);
            (0..16)
                .map(|_| sample_rf_fading(5.0, &rf, &mut rng).unwrap().h_r)
                .collect::<Vec<_>>()
        };
        assert_eq!(draw(3), draw(3));
        assert_ne!(draw(3), draw(4));
    }
}
