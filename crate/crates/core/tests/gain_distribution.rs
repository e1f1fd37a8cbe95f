//! Kolmogorov-Smirnov check of the squared-gain law against sampled users.

use rfvlc::channel::{sample_user_position, GainSquaredDistribution, VlcLink};
use rfvlc::{Geometry, StreamSeed, VlcParams};
use rfvlc::rng::Purpose;

fn ks_statistic(geom: &Geometry, vlc: &VlcParams, n: usize) -> f64 {
    let link = VlcLink::new(geom.vertical, vlc, 1e-4).unwrap();
    let law = GainSquaredDistribution::new(geom, vlc).unwrap();
    let mut rng = StreamSeed(77).chunk(Purpose::Custom(1), 0);
    let mut x: Vec<f64> = (0..n)
        .map(|_| {
            let d = sample_user_position(geom.cell_radius, &mut rng);
            link.gain(d * d).powi(2)
        })
        .collect();
    x.sort_by(f64::total_cmp);
    let nf = n as f64;
    x.iter()
        .enumerate()
        .map(|(i, &v)| {
            let f = law.cdf(v);
            (f - i as f64 / nf).abs().max((f - (i + 1) as f64 / nf).abs())
        })
        .fold(0.0, f64::max)
}

#[test]
fn squared_gain_matches_sampled_positions() {
    // sqrt(n) D exceeds 1.95 with probability 0.001 under the null.
    let n = 1_000_000;
    for phi in [30.0, 45.0, 60.0] {
        let vlc = VlcParams::reference(phi);
        let g = Geometry::new(2.5, 2.5 * vlc.half_power_angle.tan(), 20.0).unwrap();
        let d = ks_statistic(&g, &vlc, n);
        assert!(d * (n as f64).sqrt() < 1.95, "φ½ = {phi}: sqrt(n) D = {}", d * (n as f64).sqrt());
    }
}

#[test]
fn pdf_integrates_to_cdf() {
    let vlc = VlcParams::reference(45.0);
    let g = Geometry::new(2.5, 2.5, 20.0).unwrap();
    let law = GainSquaredDistribution::new(&g, &vlc).unwrap();
    let (lo, hi) = (law.lower(), law.upper());
    let n = 20_000;
    let h = (hi - lo) / n as f64;
    // Composite Simpson.
    let mut s = law.pdf(lo) + law.pdf(hi);
    for i in 1..n {
        s += law.pdf(lo + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    let total = s * h / 3.0;
    assert!((total - 1.0).abs() < 1e-6, "{total}");
    assert!(law.cdf(lo) <= 1e-12 && (law.cdf(hi) - 1.0).abs() < 1e-12);
}
