use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Radially symmetric parameter domains.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum DomainShape {
    /// `|z| < radius`.
    Disc { radius: f64 },
    /// `r_in < |z| < r_out`, with `|z| = r_out` included when the flag is set.
    Annulus {
        r_in: f64,
        r_out: f64,
        #[serde(default)]
        outer_included: bool,
    },
    /// `C \ {0}`.
    PuncturedPlane,
    /// `C`.
    Plane,
}

/// Polar grid resolution. `extent` bounds the sampled part of unbounded
/// domains and `inner` is the smallest sampled radius of the punctured plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GridHints {
    pub radial: usize,
    pub angular: usize,
    pub extent: f64,
    pub inner: f64,
}

impl Default for GridHints {
    fn default() -> Self {
        Self {
            radial: 24,
            angular: 32,
            extent: 4.0,
            inner: 0.01,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamDomain {
    #[serde(flatten)]
    pub shape: DomainShape,
    #[serde(default)]
    pub grid: GridHints,
}

/// A ring of the polar sampling grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ring {
    pub radius: f64,
    /// Lies on the topological boundary of the domain.
    pub boundary: bool,
}

impl ParamDomain {
    pub fn new(shape: DomainShape) -> Self {
        Self {
            shape,
            grid: GridHints::default(),
        }
    }

    pub fn disc(radius: f64) -> Self {
        Self::new(DomainShape::Disc { radius })
    }

    pub fn annulus(r_in: f64, r_out: f64, outer_included: bool) -> Self {
        Self::new(DomainShape::Annulus {
            r_in,
            r_out,
            outer_included,
        })
    }

    pub fn plane() -> Self {
        Self::new(DomainShape::Plane)
    }

    pub fn punctured_plane() -> Self {
        Self::new(DomainShape::PuncturedPlane)
    }

    pub fn with_grid(mut self, radial: usize, angular: usize) -> Self {
        self.grid.radial = radial;
        self.grid.angular = angular;
        self
    }

    pub fn with_extent(mut self, extent: f64) -> Self {
        self.grid.extent = extent;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidDomain(m));
        match self.shape {
            DomainShape::Disc { radius } if !(radius > 0.0 && radius.is_finite()) => {
                return bad(format!("disc radius must be positive, got {radius}"))
            }
            DomainShape::Annulus { r_in, r_out, .. } if !(r_in > 0.0 && r_in < r_out && r_out.is_finite()) => {
                return bad(format!("annulus needs 0 < r_in < r_out, got ({r_in}, {r_out})"))
            }
            _ => {}
        }
        if self.grid.radial < 8 || self.grid.angular < 8 {
            return bad(format!(
                "grid resolutions must be at least 8, got {}x{}",
                self.grid.radial, self.grid.angular
            ));
        }
        if self.is_unbounded() && !(self.grid.extent > 0.0 && self.grid.extent.is_finite()) {
            return bad("grid extent must be positive".into());
        }
        if matches!(self.shape, DomainShape::PuncturedPlane)
            && !(self.grid.inner > 0.0 && self.grid.inner < self.grid.extent)
        {
            return bad("punctured plane needs 0 < inner < extent".into());
        }
        Ok(())
    }

    pub fn is_unbounded(&self) -> bool {
        matches!(self.shape, DomainShape::Plane | DomainShape::PuncturedPlane)
    }

    pub fn is_simply_connected(&self) -> bool {
        matches!(self.shape, DomainShape::Disc { .. } | DomainShape::Plane)
    }

    /// Whether the polar grid has a vertex at the origin.
    pub fn has_center(&self) -> bool {
        self.is_simply_connected()
    }

    pub fn is_interior(&self, z: Complex64) -> bool {
        let r = z.norm();
        match self.shape {
            DomainShape::Disc { radius } => r < radius,
            DomainShape::Annulus { r_in, r_out, .. } => r > r_in && r < r_out,
            DomainShape::PuncturedPlane => r > 0.0,
            DomainShape::Plane => true,
        }
    }

    /// Membership in the domain together with its boundary.
    pub fn contains_closed(&self, z: Complex64) -> bool {
        let r = z.norm();
        let slack = 1e-12;
        match self.shape {
            DomainShape::Disc { radius } => r <= radius * (1.0 + slack),
            DomainShape::Annulus { r_in, r_out, .. } => r >= r_in * (1.0 - slack) && r <= r_out * (1.0 + slack),
            DomainShape::PuncturedPlane | DomainShape::Plane => true,
        }
    }

    /// Rings of the polar grid, innermost first. Bounded radial ranges that
    /// stay away from the origin are sampled geometrically, discs linearly.
    pub fn rings(&self) -> Vec<Ring> {
        let m = self.grid.radial;
        let linear = |outer: f64, boundary: bool| -> Vec<Ring> {
            (1..=m)
                .map(|k| Ring {
                    radius: outer * k as f64 / m as f64,
                    boundary: boundary && k == m,
                })
                .collect()
        };
        let geometric = |lo: f64, hi: f64, inner_b: bool, outer_b: bool| -> Vec<Ring> {
            let q = (hi / lo).ln() / (m - 1) as f64;
            (0..m)
                .map(|k| Ring {
                    radius: if k + 1 == m { hi } else { lo * (q * k as f64).exp() },
                    boundary: (k == 0 && inner_b) || (k + 1 == m && outer_b),
                })
                .collect()
        };
        match self.shape {
            DomainShape::Disc { radius } => linear(radius, true),
            DomainShape::Plane => linear(self.grid.extent, false),
            DomainShape::Annulus { r_in, r_out, .. } => geometric(r_in, r_out, true, true),
            DomainShape::PuncturedPlane => geometric(self.grid.inner, self.grid.extent, false, false),
        }
    }

    pub fn angles(&self) -> Vec<f64> {
        let n = self.grid.angular;
        (0..n).map(|j| TAU * j as f64 / n as f64).collect()
    }

    /// Circle generating the homology of a doubly connected domain.
    pub fn homology_circle(&self) -> Option<f64> {
        match self.shape {
            DomainShape::Annulus { r_in, r_out, .. } => Some((r_in * r_out).sqrt()),
            DomainShape::PuncturedPlane => Some((self.grid.inner * self.grid.extent).sqrt()),
            _ => None,
        }
    }

    /// Interior sample points used to validate Weierstrass data: every grid
    /// vertex off the domain boundary.
    pub fn interior_samples(&self) -> Vec<Complex64> {
        let angles = self.angles();
        let mut out = Vec::new();
        if self.has_center() {
            out.push(Complex64::new(0.0, 0.0));
        }
        for ring in self.rings().into_iter().filter(|r| !r.boundary) {
            out.extend(angles.iter().map(|&t| Complex64::from_polar(ring.radius, t)));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(ParamDomain::annulus(0.5, 0.1, false).validate().is_err());
        assert!(ParamDomain::disc(-1.0).validate().is_err());
        assert!(ParamDomain::disc(1.0).with_grid(4, 16).validate().is_err());
        assert!(ParamDomain::annulus(0.05, 1.0, true).validate().is_ok());
    }

    #[test]
    fn ring_layout() {
        let a = ParamDomain::annulus(0.05, 1.0, true).with_grid(10, 8);
        let rings = a.rings();
        assert_eq!(rings.len(), 10);
        assert!((rings[0].radius - 0.05).abs() < 1e-15 && rings[0].boundary);
        assert!((rings[9].radius - 1.0).abs() < 1e-15 && rings[9].boundary);
        let ratio = rings[1].radius / rings[0].radius;
        assert!((rings[5].radius / rings[4].radius - ratio).abs() < 1e-12);
        let d = ParamDomain::disc(2.0).with_grid(8, 8);
        assert_eq!(d.interior_samples().len(), 1 + 7 * 8);
    }

    #[test]
    fn json_shape() {
        let d: ParamDomain =
            serde_json::from_str(r#"{"type":"annulus","r_in":0.1,"r_out":1.0,"outer_included":true}"#).unwrap();
        assert_eq!(
            d.shape,
            DomainShape::Annulus {
                r_in: 0.1,
                r_out: 1.0,
                outer_included: true
            }
        );
        assert_eq!(d.grid, GridHints::default());
        let p: ParamDomain = serde_json::from_str(r#"{"type":"plane","grid":{"radial":12}}"#).unwrap();
        assert_eq!(p.grid.radial, 12);
        assert_eq!(p.grid.angular, GridHints::default().angular);
    }
}
