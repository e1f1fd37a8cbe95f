use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Placement of the two access points relative to the receiving plane.
///
/// The VLC AP sits at the origin pointing down, the RF AP at `(0, rf_offset, 0)`
/// and users live on the plane `z = -vertical` inside the VLC cell disk.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Geometry {
    /// Vertical AP-to-receiver distance `d_v` (m).
    pub vertical: f64,
    /// VLC cell radius `d_c` (m).
    pub cell_radius: f64,
    /// Horizontal offset `y_r` of the RF AP from the cell center (m).
    pub rf_offset: f64,
}

/// Horizontal user coordinates relative to the VLC cell center (m).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UserPosition {
    pub x: f64,
    pub y: f64,
}

impl UserPosition {
    pub fn horizontal_distance(&self) -> f64 {
        self.x.hypot(self.y)
    }
}

impl Geometry {
    pub fn new(vertical: f64, cell_radius: f64, rf_offset: f64) -> Result<Self> {
        let g = Self {
            vertical,
            cell_radius,
            rf_offset,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.vertical > 0.0 && self.vertical.is_finite()) {
            return Err(Error::invalid("geometry.vertical", "must be positive"));
        }
        if !(self.cell_radius >= 0.0 && self.cell_radius.is_finite()) {
            return Err(Error::invalid("geometry.cell_radius", "must be nonnegative"));
        }
        if !self.rf_offset.is_finite() {
            return Err(Error::invalid("geometry.rf_offset", "must be finite"));
        }
        Ok(())
    }

    pub fn with_cell_radius(self, cell_radius: f64) -> Self {
        Self { cell_radius, ..self }
    }

    pub fn with_rf_offset(self, rf_offset: f64) -> Self {
        Self { rf_offset, ..self }
    }

    /// Checks that a user at `pos` lies inside the cell.
    pub fn position(&self, x: f64, y: f64) -> Result<UserPosition> {
        let p = UserPosition { x, y };
        let d_h = p.horizontal_distance();
        if d_h > self.cell_radius * (1.0 + 1e-12) {
            return Err(Error::Domain {
                what: "horizontal user distance beyond the cell radius",
                value: d_h,
            });
        }
        Ok(p)
    }

    /// LED-to-photodetector distance `d_1` for horizontal distance `d_h`.
    pub fn vlc_distance(&self, d_h: f64) -> f64 {
        d_h.hypot(self.vertical)
    }

    /// Euclidean distance `d_0` from the user to the RF AP.
    pub fn rf_distance(&self, pos: UserPosition) -> f64 {
        let dy = pos.y - self.rf_offset;
        (pos.x * pos.x + dy * dy + self.vertical * self.vertical).sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn distances() {
        let g = Geometry::new(2.5, 2.5, 20.0).unwrap();
        assert!((g.vlc_distance(0.0) - 2.5).abs() < 1e-15);
        let p = g.position(0.0, 2.5).unwrap();
        assert!((g.rf_distance(p) - (17.5f64.powi(2) + 6.25).sqrt()).abs() < 1e-12);
        assert!(g.position(2.0, 2.0).is_err());
        assert!(Geometry::new(0.0, 1.0, 0.0).is_err());
        assert!(Geometry::new(1.0, -1.0, 0.0).is_err());
    }
}
