use serde::{Deserialize, Serialize};

use crate::channel::{lambertian_index, VlcParams};
use crate::{Error, Result};

/// Admissible illuminance range across the cell, in lux.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IlluminationSpec {
    pub e_min: f64,
    pub e_max: f64,
}

impl IlluminationSpec {
    pub fn new(e_min: f64, e_max: f64) -> Result<Self> {
        let s = Self { e_min, e_max };
        s.validate()?;
        Ok(s)
    }

    /// A spec with `E_min = 1` and the given span.
    pub fn from_span(span: f64) -> Result<Self> {
        Self::new(1.0, span)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.e_min > 0.0 && self.e_min.is_finite()) {
            return Err(Error::invalid("illumination.e_min", "must be positive"));
        }
        if !(self.e_max >= self.e_min && self.e_max.is_finite()) {
            return Err(Error::invalid(
                "illumination.e_max",
                format!("must be at least e_min = {}", self.e_min),
            ));
        }
        Ok(())
    }

    pub fn span(&self) -> f64 {
        self.e_max / self.e_min
    }
}

/// Largest cell radius whose edge illuminance stays within the span:
/// `d_c = d_v sqrt(span^(2/(r+3)) - 1)`.
pub fn max_cell_radius(illum: &IlluminationSpec, vertical: f64, vlc: &VlcParams) -> Result<f64> {
    illum.validate()?;
    if !(vertical > 0.0) {
        return Err(Error::invalid("geometry.vertical", "must be positive"));
    }
    Ok(vertical * viewing_angle_bound(illum, vlc.lambertian_index()?))
}

/// `tan φ_max = sqrt(span^(2/(r+3)) - 1)` for Lambertian index `r`.
pub fn viewing_angle_bound(illum: &IlluminationSpec, r: f64) -> f64 {
    (illum.span().powf(2.0 / (r + 3.0)) - 1.0).max(0.0).sqrt()
}

/// Center-to-edge illuminance ratio of a cell of radius `d_c`.
pub fn illuminance_span(cell_radius: f64, vertical: f64, r: f64) -> f64 {
    (1.0 + (cell_radius / vertical).powi(2)).powf(0.5 * (r + 3.0))
}

/// Smallest span admitting a cell that reaches the LED half-intensity angle.
pub fn min_span_for_viewing_angle(half_power_angle: f64) -> Result<f64> {
    let r = lambertian_index(half_power_angle)?;
    Ok(half_power_angle.cos().powf(-(r + 3.0)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn viewing_angle_spans() {
        let want = [(30.0, 3.079201435678004), (45.0, 5.656_854_249_492_38), (60.0, 16.0)];
        for (phi, span) in want {
            let s = min_span_for_viewing_angle(f64::to_radians(phi)).unwrap();
            assert!((s / span - 1.0).abs() < 1e-12, "{phi}: {s}");
        }
    }

    #[test]
    fn radius_examples() {
        let vlc = VlcParams::reference(60.0);
        let spec = IlluminationSpec::from_span(16.0).unwrap();
        let dc = max_cell_radius(&spec, 2.5, &vlc).unwrap();
        assert!((dc - 2.5 * 3f64.sqrt()).abs() < 1e-12);
        let flat = IlluminationSpec::new(300.0, 300.0).unwrap();
        assert_eq!(max_cell_radius(&flat, 2.5, &vlc).unwrap(), 0.0);
        assert!(IlluminationSpec::new(500.0, 300.0).is_err());
    }

    #[test]
    fn radius_inverts_span() {
        let vlc = VlcParams::reference(45.0);
        let spec = IlluminationSpec::new(200.0, 700.0).unwrap();
        let dc = max_cell_radius(&spec, 2.5, &vlc).unwrap();
        let back = illuminance_span(dc, 2.5, 2.0);
        assert!((back / 3.5 - 1.0).abs() < 1e-12);
    }
}
