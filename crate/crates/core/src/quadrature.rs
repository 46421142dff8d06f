//! Path integrals of vector-valued holomorphic 1-forms.
//!
//! Edges are integrated by adaptive composite Simpson; closed circles by the
//! periodic trapezoid rule with repeated doubling.

use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C3 = [Complex64; 3];

pub const ZERO3: C3 = [Complex64::new(0.0, 0.0); 3];

/// Default absolute tolerance per edge.
pub const EDGE_TOL: f64 = 1e-10;
/// Default maximum bisection depth.
pub const MAX_DEPTH: u32 = 24;

/// A parameterized path `t in [0, 1] -> z(t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Path {
    /// Straight segment.
    Line { from: Complex64, to: Complex64 },
    /// Image of a straight segment under `exp`; radial segments and circular
    /// arcs about the origin are both of this form.
    Exp { from: Complex64, to: Complex64 },
}

impl Path {
    pub fn line(from: Complex64, to: Complex64) -> Self {
        Path::Line { from, to }
    }

    /// Arc of the circle `|z| = radius` from angle `t0` to `t1`.
    pub fn arc(radius: f64, t0: f64, t1: f64) -> Self {
        let s = radius.ln();
        Path::Exp {
            from: Complex64::new(s, t0),
            to: Complex64::new(s, t1),
        }
    }

    /// Radial segment at angle `theta` between two positive radii.
    pub fn radial(theta: f64, r0: f64, r1: f64) -> Self {
        if r0 > 0.0 && r1 > 0.0 {
            Path::Exp {
                from: Complex64::new(r0.ln(), theta),
                to: Complex64::new(r1.ln(), theta),
            }
        } else {
            Path::Line {
                from: Complex64::from_polar(r0, theta),
                to: Complex64::from_polar(r1, theta),
            }
        }
    }

    pub fn point(&self, t: f64) -> Complex64 {
        match *self {
            Path::Line { from, to } => from + (to - from) * t,
            Path::Exp { from, to } => (from + (to - from) * t).exp(),
        }
    }

    pub fn velocity(&self, t: f64) -> Complex64 {
        match *self {
            Path::Line { from, to } => to - from,
            Path::Exp { from, to } => (to - from) * (from + (to - from) * t).exp(),
        }
    }

    pub fn start(&self) -> Complex64 {
        self.point(0.0)
    }

    pub fn end(&self) -> Complex64 {
        self.point(1.0)
    }

    /// Rough length from a few chords.
    pub fn approx_length(&self) -> f64 {
        (0..8)
            .map(|k| (self.point((k + 1) as f64 / 8.0) - self.point(k as f64 / 8.0)).norm())
            .sum()
    }
}

#[derive(Debug, Clone, Copy)]
pub struct EdgeQuadrature {
    pub tol: f64,
    pub max_depth: u32,
}

impl Default for EdgeQuadrature {
    fn default() -> Self {
        Self {
            tol: EDGE_TOL,
            max_depth: MAX_DEPTH,
        }
    }
}

/// Integral and its estimated absolute error.
#[derive(Debug, Clone, Copy)]
pub struct PathIntegral {
    pub value: C3,
    pub error: f64,
    pub depth_exhausted: bool,
}

fn axpy(a: &C3, s: f64, b: &C3) -> C3 {
    [a[0] + b[0] * s, a[1] + b[1] * s, a[2] + b[2] * s]
}

fn scale(a: &C3, s: f64) -> C3 {
    [a[0] * s, a[1] * s, a[2] * s]
}

fn max_norm(a: &C3) -> f64 {
    a.iter().map(|c| c.norm()).fold(0.0, f64::max)
}

struct Simpson<'a, F> {
    f: &'a F,
    path: Path,
    max_depth: u32,
    error: f64,
    exhausted: bool,
}

impl<F> Simpson<'_, F>
where
    F: Fn(Complex64) -> Result<C3>,
{
    fn eval(&self, t: f64) -> Result<C3> {
        let z = self.path.point(t);
        let v = self.path.velocity(t);
        let phi = (self.f)(z)?;
        let out = [phi[0] * v, phi[1] * v, phi[2] * v];
        if out.iter().all(|c| c.is_finite()) {
            Ok(out)
        } else {
            Err(Error::Quadrature {
                from: self.path.start(),
                to: self.path.end(),
                reason: format!("non-finite integrand at z = {z}"),
            })
        }
    }

    fn panel(&self, a: f64, b: f64, fa: &C3, fm: &C3, fb: &C3) -> C3 {
        let w = (b - a) / 6.0;
        scale(&axpy(&axpy(fa, 4.0, fm), 1.0, fb), w)
    }

    #[allow(clippy::too_many_arguments)]
    fn recurse(&mut self, a: f64, b: f64, fa: C3, fm: C3, fb: C3, whole: C3, tol: f64, depth: u32) -> Result<C3> {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = self.eval(lm)?;
        let frm = self.eval(rm)?;
        let left = self.panel(a, m, &fa, &flm, &fm);
        let right = self.panel(m, b, &fm, &frm, &fb);
        let sum = axpy(&left, 1.0, &right);
        let delta = axpy(&sum, -1.0, &whole);
        let est = max_norm(&delta) / 15.0;
        if est <= tol || depth >= self.max_depth {
            if est > tol {
                self.exhausted = true;
            }
            self.error += est;
            return Ok(axpy(&sum, 1.0 / 15.0, &delta));
        }
        let l = self.recurse(a, m, fa, flm, fm, left, 0.5 * tol, depth + 1)?;
        let r = self.recurse(m, b, fm, frm, fb, right, 0.5 * tol, depth + 1)?;
        Ok(axpy(&l, 1.0, &r))
    }
}

/// Integrate the 1-form `f(z) dz` along `path` with adaptive Simpson, starting
/// from `panels` equal panels that share the tolerance.
pub fn integrate_path<F>(f: &F, path: Path, panels: usize, q: EdgeQuadrature) -> Result<PathIntegral>
where
    F: Fn(Complex64) -> Result<C3>,
{
    let panels = panels.max(1);
    let mut s = Simpson {
        f,
        path,
        max_depth: q.max_depth,
        error: 0.0,
        exhausted: false,
    };
    let mut total = ZERO3;
    let h = 1.0 / panels as f64;
    let mut fa = s.eval(0.0)?;
    for k in 0..panels {
        let a = k as f64 * h;
        let b = if k + 1 == panels { 1.0 } else { a + h };
        let fm = s.eval(0.5 * (a + b))?;
        let fb = s.eval(b)?;
        let whole = s.panel(a, b, &fa, &fm, &fb);
        let part = s.recurse(a, b, fa, fm, fb, whole, q.tol / panels as f64, 0)?;
        total = axpy(&total, 1.0, &part);
        fa = fb;
    }
    Ok(PathIntegral {
        value: total,
        error: s.error,
        depth_exhausted: s.exhausted,
    })
}

/// `∮ f(z) dz` over `|z| = radius`, counter-clockwise. The trapezoid rule is
/// doubled from 16 nodes until the change drops below `tol`.
pub fn circle_integral<F>(f: &F, radius: f64, tol: f64) -> Result<C3>
where
    F: Fn(Complex64) -> Result<C3>,
{
    let term = |t: f64| -> Result<C3> {
        let z = Complex64::from_polar(radius, t);
        let dz = Complex64::i() * z;
        let v = f(z)?;
        Ok([v[0] * dz, v[1] * dz, v[2] * dz])
    };
    let mut n = 16usize;
    let mut sum = ZERO3;
    for k in 0..n {
        sum = axpy(&sum, 1.0, &term(TAU * k as f64 / n as f64)?);
    }
    let mut prev = scale(&sum, TAU / n as f64);
    while n < (1 << 20) {
        // Add the midpoints of the current nodes.
        for k in 0..n {
            sum = axpy(&sum, 1.0, &term(TAU * (k as f64 + 0.5) / n as f64)?);
        }
        n *= 2;
        let cur = scale(&sum, TAU / n as f64);
        if max_norm(&axpy(&cur, -1.0, &prev)) < tol {
            return Ok(cur);
        }
        prev = cur;
    }
    Err(Error::Quadrature {
        from: Complex64::new(radius, 0.0),
        to: Complex64::new(radius, 0.0),
        reason: "trapezoid rule did not converge on the circle".into(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn polynomial_on_line() {
        let f = |z: Complex64| -> Result<C3> { Ok([z * z, c(1.0, 0.0), z]) };
        let r = integrate_path(&f, Path::line(c(0.0, 0.0), c(1.0, 1.0)), 1, Default::default()).unwrap();
        // ∫ z^2 = (1+i)^3/3
        let want = c(1.0, 1.0).powi(3) / 3.0;
        assert!((r.value[0] - want).norm() < 1e-14);
        assert!((r.value[1] - c(1.0, 1.0)).norm() < 1e-14);
    }

    #[test]
    fn reciprocal_along_arc_and_radius() {
        let f = |z: Complex64| -> Result<C3> { Ok([z.inv(), z.inv(), z.inv()]) };
        let arc = integrate_path(&f, Path::arc(0.5, 0.0, 1.0), 2, Default::default()).unwrap();
        assert!((arc.value[0] - c(0.0, 1.0)).norm() < 1e-10);
        let rad = integrate_path(&f, Path::radial(0.3, 0.1, 2.0), 2, Default::default()).unwrap();
        assert!((rad.value[0] - c(20f64.ln(), 0.0)).norm() < 1e-10);
        assert!(rad.error < 1e-9);
    }

    #[test]
    fn residues() {
        let f = |z: Complex64| -> Result<C3> { Ok([z.inv(), z.inv() * z.inv(), c(1.0, 0.0)]) };
        let p = circle_integral(&f, 0.5, 1e-12).unwrap();
        assert!((p[0] - c(0.0, TAU)).norm() < 1e-12);
        assert!(p[1].norm() < 1e-12);
        assert!(p[2].norm() < 1e-12);
    }

    #[test]
    fn pole_on_path_fails() {
        let f = |z: Complex64| -> Result<C3> { Ok([z.inv(), z, z]) };
        let err = integrate_path(&f, Path::line(c(-1.0, 0.0), c(1.0, 0.0)), 2, Default::default());
        assert!(matches!(err, Err(Error::Quadrature { .. })));
    }
}
