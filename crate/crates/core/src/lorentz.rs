//! Linear algebra of the Lorentz-Minkowski space R^3_1.
//!
//! The metric is `dx1^2 + dx2^2 - dx3^2`; the third coordinate is the
//! timelike axis. Besides the Lorentzian products, [`LVec3`] carries the
//! Euclidean quantities used by the graph and distance computations.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point or vector of R^3_1.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct LVec3 {
    pub x1: f64,
    pub x2: f64,
    pub x3: f64,
}

impl LVec3 {
    pub const ZERO: LVec3 = LVec3 {
        x1: 0.0,
        x2: 0.0,
        x3: 0.0,
    };

    pub const fn new(x1: f64, x2: f64, x3: f64) -> Self {
        Self { x1, x2, x3 }
    }

    pub fn from_array(a: [f64; 3]) -> Self {
        Self::new(a[0], a[1], a[2])
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x1, self.x2, self.x3]
    }

    /// Lorentzian inner product with `other`.
    pub fn minkowski(self, other: LVec3) -> f64 {
        minkowski_inner(self, other)
    }

    /// The Lorentzian "norm" squared, `x1^2 + x2^2 - x3^2`.
    pub fn lorentz_norm_sq(self) -> f64 {
        minkowski_inner(self, self)
    }

    pub fn euclid_dot(self, other: LVec3) -> f64 {
        self.x1 * other.x1 + self.x2 * other.x2 + self.x3 * other.x3
    }

    pub fn euclid_norm(self) -> f64 {
        self.euclid_dot(self).sqrt()
    }

    /// Euclidean norm of the orthogonal projection onto `{x3 = 0}`.
    pub fn horizontal_norm(self) -> f64 {
        self.x1.hypot(self.x2)
    }

    /// Orthogonal projection onto `{x3 = 0}`, as a complex number.
    pub fn horizontal(self) -> Complex64 {
        Complex64::new(self.x1, self.x2)
    }

    /// Reflection in the plane `{x3 = 0}`.
    pub fn reflect_x3(self) -> Self {
        Self::new(self.x1, self.x2, -self.x3)
    }

    pub fn cross(self, o: LVec3) -> Self {
        Self::new(
            self.x2 * o.x3 - self.x3 * o.x2,
            self.x3 * o.x1 - self.x1 * o.x3,
            self.x1 * o.x2 - self.x2 * o.x1,
        )
    }

    /// Unit vector in the Euclidean sense; zero stays zero.
    pub fn euclid_normalized(self) -> Self {
        let n = self.euclid_norm();
        if n == 0.0 {
            self
        } else {
            self * (1.0 / n)
        }
    }

    pub fn is_finite(self) -> bool {
        self.x1.is_finite() && self.x2.is_finite() && self.x3.is_finite()
    }

    pub fn max_abs_diff(self, o: LVec3) -> f64 {
        (self.x1 - o.x1)
            .abs()
            .max((self.x2 - o.x2).abs())
            .max((self.x3 - o.x3).abs())
    }
}

impl fmt::Display for LVec3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.x1, self.x2, self.x3)
    }
}

impl Add for LVec3 {
    type Output = LVec3;
    fn add(self, o: LVec3) -> LVec3 {
        LVec3::new(self.x1 + o.x1, self.x2 + o.x2, self.x3 + o.x3)
    }
}

impl AddAssign for LVec3 {
    fn add_assign(&mut self, o: LVec3) {
        *self = *self + o;
    }
}

impl Sub for LVec3 {
    type Output = LVec3;
    fn sub(self, o: LVec3) -> LVec3 {
        LVec3::new(self.x1 - o.x1, self.x2 - o.x2, self.x3 - o.x3)
    }
}

impl Neg for LVec3 {
    type Output = LVec3;
    fn neg(self) -> LVec3 {
        LVec3::new(-self.x1, -self.x2, -self.x3)
    }
}

impl Mul<f64> for LVec3 {
    type Output = LVec3;
    fn mul(self, s: f64) -> LVec3 {
        LVec3::new(self.x1 * s, self.x2 * s, self.x3 * s)
    }
}

impl Mul<LVec3> for f64 {
    type Output = LVec3;
    fn mul(self, v: LVec3) -> LVec3 {
        v * self
    }
}

/// `a.x1 b.x1 + a.x2 b.x2 - a.x3 b.x3`.
pub fn minkowski_inner(a: LVec3, b: LVec3) -> f64 {
    a.x1 * b.x1 + a.x2 * b.x2 - a.x3 * b.x3
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CausalClass {
    Spacelike,
    Timelike,
    Lightlike,
}

/// Causal character of `v`. The zero vector is spacelike; the lightlike test
/// is an exact comparison of the computed inner product with zero.
pub fn causal_character(v: LVec3) -> CausalClass {
    let q = v.lorentz_norm_sq();
    if v == LVec3::ZERO || q > 0.0 {
        CausalClass::Spacelike
    } else if q < 0.0 {
        CausalClass::Timelike
    } else {
        CausalClass::Lightlike
    }
}

/// Euclidean distance from `p` to the light cone `{x1^2 + x2^2 = x3^2}`.
pub fn dist_to_lightcone(p: LVec3) -> f64 {
    (p.horizontal_norm() - p.x3.abs()).abs() * std::f64::consts::FRAC_1_SQRT_2
}

/// A point of the extended complex plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtComplex {
    Finite(Complex64),
    Infinity,
}

impl From<Complex64> for ExtComplex {
    fn from(z: Complex64) -> Self {
        ExtComplex::Finite(z)
    }
}

/// Stereographic parameterization of the hyperbolic sphere
/// `{x1^2 + x2^2 - x3^2 = -1}`. The open unit disc maps onto the lower sheet
/// (`x3 <= -1`), its exterior and infinity onto the upper sheet.
pub fn stereographic(z: ExtComplex) -> Result<LVec3> {
    match z {
        ExtComplex::Infinity => Ok(LVec3::new(0.0, 0.0, 1.0)),
        ExtComplex::Finite(z) => {
            let m = z.norm_sqr();
            let d = 1.0 - m;
            if d == 0.0 {
                return Err(Error::UnitCircle(z));
            }
            Ok(LVec3::new(-2.0 * z.im / d, 2.0 * z.re / d, (m + 1.0) / (m - 1.0)))
        }
    }
}

/// Inverse of [`stereographic`]; `(0, 0, 1)` maps back to infinity.
pub fn inverse_stereographic(p: LVec3) -> ExtComplex {
    let d = 1.0 - p.x3;
    if d == 0.0 {
        ExtComplex::Infinity
    } else {
        ExtComplex::Finite(Complex64::new(p.x2, -p.x1) / d)
    }
}

/// Direction of `stereographic(g)` normalized in the Euclidean sense.
///
/// Extends continuously across `|g| = 1`, where the hyperbolic normal itself
/// escapes to infinity along the light cone.
pub fn euclidean_direction_of_normal(g: Complex64) -> LVec3 {
    LVec3::new(-2.0 * g.im, 2.0 * g.re, -(1.0 + g.norm_sqr())).euclid_normalized()
}

/// Unit normal on the round sphere attached to `g` for minimal surfaces in R^3:
/// `(2 Re g, 2 Im g, |g|^2 - 1) / (|g|^2 + 1)`.
pub fn sphere_gauss(g: Complex64) -> LVec3 {
    let m = g.norm_sqr();
    LVec3::new(2.0 * g.re, 2.0 * g.im, m - 1.0) * (1.0 / (m + 1.0))
}
