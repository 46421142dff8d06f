//! Weierstrass data `(g, phi_3 = f dz)` on a radially symmetric parameter
//! domain and the immersion `X = base + Re ∫ Φ`.
//!
//! Maximal data uses
//! `phi_1 = (i/2)(1/g - g) f`, `phi_2 = -(1/2)(1/g + g) f`, `phi_3 = f`,
//! which is null for the Lorentzian form `phi_1^2 + phi_2^2 - phi_3^2 = 0`.
//! Minimal data (the dual, stored with `f_min = i f_max`) uses
//! `phi_1 = (1/2)(1/g - g) f`, `phi_2 = (i/2)(1/g + g) f`, `phi_3 = f`.

mod domain;
mod mesh;
mod singularity;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use domain::{DomainShape, GridHints, ParamDomain, Ring};
pub use mesh::{polar_path, IntegrationOptions, MeshVertex, PointIntegral, SurfaceMesh, PATH_TOL};
pub use singularity::{classify_singularity, SingularityVerdict, Site};

use crate::error::{Error, Result};
use crate::expr::{self, eval_limit_with, AnalyticFn, EvalError, Expr};
use crate::lorentz::{sphere_gauss, stereographic, ExtComplex, LVec3};
use crate::quadrature::{circle_integral, C3};

/// Tolerance on real periods before the immersion is declared multivalued.
pub const PERIOD_TOL: f64 = 1e-8;
/// Smallest admissible conformal factor.
pub const MIN_LAMBDA_SQ: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SurfaceKind {
    Maximal,
    Minimal,
}

impl SurfaceKind {
    pub fn flipped(self) -> Self {
        match self {
            SurfaceKind::Maximal => SurfaceKind::Minimal,
            SurfaceKind::Minimal => SurfaceKind::Maximal,
        }
    }
}

/// First-order geometry at a point: conformal factor, normal and the
/// coordinate tangent vectors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Frame {
    pub lambda_sq: f64,
    /// `σ(g) ∈ ℍ²₋` for maximal data, the Euclidean unit normal for minimal.
    pub normal: LVec3,
    pub x_u: LVec3,
    pub x_v: LVec3,
}

#[derive(Debug, Clone)]
pub struct WeierstrassData {
    pub kind: SurfaceKind,
    pub domain: ParamDomain,
    pub g: AnalyticFn,
    pub f: AnalyticFn,
    pub basepoint: Complex64,
    pub base_value: LVec3,
    phi: [AnalyticFn; 3],
}

/// Validated maximal data.
pub fn make_weierstrass(
    domain: ParamDomain,
    g_text: &str,
    f_text: &str,
    basepoint: Complex64,
    base_value: LVec3,
) -> Result<WeierstrassData> {
    WeierstrassData::from_text(SurfaceKind::Maximal, domain, g_text, f_text, basepoint, base_value)
}

fn phi_exprs(kind: SurfaceKind, g: &Expr, f: &Expr) -> [Expr; 3] {
    let half = |c: Complex64| Expr::lit(c * 0.5);
    let inv_g = expr::div(Expr::real(1.0), g.clone());
    let (c1, c2) = match kind {
        SurfaceKind::Maximal => (Complex64::i(), Complex64::new(-1.0, 0.0)),
        SurfaceKind::Minimal => (Complex64::new(1.0, 0.0), Complex64::i()),
    };
    [
        expr::mul(expr::mul(half(c1), expr::sub(inv_g.clone(), g.clone())), f.clone()),
        expr::mul(expr::mul(half(c2), expr::add(inv_g, g.clone())), f.clone()),
        f.clone(),
    ]
}

fn is_finite3(v: &C3) -> bool {
    v.iter().all(|c| c.is_finite())
}

impl WeierstrassData {
    /// Validated data: the basepoint is interior, and at every interior grid
    /// sample `|g| < 1` (maximal only) and `Φ ≠ 0`.
    pub fn new(
        kind: SurfaceKind,
        domain: ParamDomain,
        g: AnalyticFn,
        f: AnalyticFn,
        basepoint: Complex64,
        base_value: LVec3,
    ) -> Result<Self> {
        domain.validate()?;
        if !domain.is_interior(basepoint) {
            return Err(Error::InvalidArgument(format!(
                "basepoint {basepoint} is not interior to the domain"
            )));
        }
        if !base_value.is_finite() {
            return Err(Error::InvalidArgument("base value must be finite".into()));
        }
        let data = Self::assemble(kind, domain, g, f, basepoint, base_value);
        data.validate()?;
        Ok(data)
    }

    pub fn from_text(
        kind: SurfaceKind,
        domain: ParamDomain,
        g_text: &str,
        f_text: &str,
        basepoint: Complex64,
        base_value: LVec3,
    ) -> Result<Self> {
        let g = AnalyticFn::parse(g_text)?;
        let f = AnalyticFn::parse(f_text)?;
        Self::new(kind, domain, g, f, basepoint, base_value)
    }

    fn assemble(
        kind: SurfaceKind,
        domain: ParamDomain,
        g: AnalyticFn,
        f: AnalyticFn,
        basepoint: Complex64,
        base_value: LVec3,
    ) -> Self {
        let phi = phi_exprs(kind, g.expr(), f.expr()).map(AnalyticFn::from_expr);
        Self {
            kind,
            domain,
            g,
            f,
            basepoint,
            base_value,
            phi,
        }
    }

    /// Re-runs the sample checks of [`new`](Self::new), e.g. after dualizing.
    pub fn validate(&self) -> Result<()> {
        let mut samples = self.domain.interior_samples();
        samples.push(self.basepoint);
        // The spacelike condition is checked everywhere before Φ is evaluated,
        // so that |g| >= 1 is reported even when Φ also has poles.
        if self.kind == SurfaceKind::Maximal {
            for &z in &samples {
                let modulus = match self.g.eval_limit(z) {
                    Ok(g) => g.norm(),
                    Err(EvalError::Pole { .. }) => f64::INFINITY,
                    Err(e) => return Err(e.into()),
                };
                if !(modulus < 1.0) {
                    return Err(Error::SpacelikeViolation { z, modulus });
                }
            }
        }
        for z in samples {
            let phi = self.phi_at(z)?;
            if phi.iter().map(|c| c.norm()).fold(0.0, f64::max) <= 1e-14 {
                return Err(Error::DegeneratePhi(z));
            }
        }
        Ok(())
    }

    /// The three coefficients of `Φ` as composed analytic functions.
    pub fn make_phi(&self) -> [AnalyticFn; 3] {
        self.phi.clone()
    }

    fn phi_raw(&self, z: Complex64) -> Result<C3, EvalError> {
        let g = self.g.eval(z)?;
        let f = self.f.eval(z)?;
        if g == Complex64::new(0.0, 0.0) {
            return Err(EvalError::Pole { pos: 0, z });
        }
        let inv = g.inv();
        let v = match self.kind {
            SurfaceKind::Maximal => [Complex64::i() * 0.5 * (inv - g) * f, -0.5 * (inv + g) * f, f],
            SurfaceKind::Minimal => [0.5 * (inv - g) * f, Complex64::i() * 0.5 * (inv + g) * f, f],
        };
        Ok(v)
    }

    /// `Φ(z)`, with removable singularities (zeros of `g` cancelled by zeros
    /// of `f`) filled in by their limits.
    pub fn phi_at(&self, z: Complex64) -> Result<C3> {
        match self.phi_raw(z) {
            Ok(v) if is_finite3(&v) => Ok(v),
            Ok(_) | Err(EvalError::Pole { .. }) => {
                let mut out = [Complex64::new(0.0, 0.0); 3];
                for (k, slot) in out.iter_mut().enumerate() {
                    *slot = eval_limit_with(|w| self.phi_raw(w).map(|p| p[k]), z)?;
                }
                Ok(out)
            }
            Err(e) => Err(e.into()),
        }
    }

    /// `Φ'(z)` from the symbolic derivatives.
    pub fn phi_derivative_at(&self, z: Complex64) -> Result<C3> {
        let mut out = [Complex64::new(0.0, 0.0); 3];
        for (slot, p) in out.iter_mut().zip(&self.phi) {
            *slot = p.eval_derivative(z)?;
        }
        Ok(out)
    }

    pub fn gauss_at(&self, z: Complex64) -> Result<Complex64> {
        Ok(self.g.eval_limit(z)?)
    }

    /// Conformal factor `λ²` of the induced metric `λ²|dz|²`.
    pub fn lambda_sq_at(&self, z: Complex64) -> Result<f64> {
        let g = self.gauss_at(z)?;
        let sign = match self.kind {
            SurfaceKind::Maximal => -1.0,
            SurfaceKind::Minimal => 1.0,
        };
        if g.norm() > 0.0 {
            if let Ok(f) = self.f.eval(z) {
                if f.is_finite() {
                    let r = g.norm();
                    let lam = 0.5 * f.norm() * (1.0 / r + sign * r);
                    return Ok(lam * lam);
                }
            }
        }
        let p = self.phi_at(z)?;
        Ok(0.5 * (p[0].norm_sqr() + p[1].norm_sqr() + sign * p[2].norm_sqr()))
    }

    pub fn frame_at(&self, z: Complex64) -> Result<Frame> {
        let phi = self.phi_at(z)?;
        let x_u = LVec3::new(phi[0].re, phi[1].re, phi[2].re);
        let x_v = LVec3::new(-phi[0].im, -phi[1].im, -phi[2].im);
        let lambda_sq = self.lambda_sq_at(z)?;
        if !(lambda_sq >= MIN_LAMBDA_SQ) {
            return Err(Error::DegenerateFrame { z, lambda_sq });
        }
        let g = self.gauss_at(z)?;
        let normal = match self.kind {
            SurfaceKind::Maximal => {
                stereographic(ExtComplex::Finite(g)).map_err(|_| Error::DegenerateFrame { z, lambda_sq })?
            }
            SurfaceKind::Minimal => sphere_gauss(g),
        };
        Ok(Frame {
            lambda_sq,
            normal,
            x_u,
            x_v,
        })
    }

    /// `∮ Φ dz` over `|z| = radius`.
    pub fn cycle_periods(&self, radius: f64) -> Result<C3> {
        if !(radius > 0.0) || !self.domain.contains_closed(Complex64::new(radius, 0.0)) {
            return Err(Error::InvalidArgument(format!(
                "circle |z| = {radius} is not inside the domain"
            )));
        }
        circle_integral(&|z| self.phi_at(z), radius, 1e-10)
    }

    /// Periods on `|z| = radius`, failing when a real part does not vanish.
    pub fn check_real_periods(&self, radius: f64) -> Result<C3> {
        let p = self.cycle_periods(radius)?;
        for (k, c) in p.iter().enumerate() {
            if c.re.abs() > PERIOD_TOL {
                return Err(Error::NonExactRealPart {
                    component: k + 1,
                    radius,
                    period: c.re,
                });
            }
        }
        Ok(p)
    }

    /// Checks the real periods on the generator of the domain's homology.
    pub fn check_exact(&self) -> Result<()> {
        if let Some(r) = self.domain.homology_circle() {
            self.check_real_periods(r)?;
        }
        Ok(())
    }

    /// Duality `f -> i f` between maximal and minimal data; `g` is kept.
    pub fn dualize(&self) -> Self {
        self.with_f(self.kind.flipped(), self.f.times_i())
    }

    /// Inverse of [`dualize`](Self::dualize): `f -> -i f`.
    pub fn undualize(&self) -> Self {
        self.with_f(self.kind.flipped(), self.f.scaled(-Complex64::i()))
    }

    fn with_f(&self, kind: SurfaceKind, f: AnalyticFn) -> Self {
        Self::assemble(
            kind,
            self.domain.clone(),
            self.g.clone(),
            f,
            self.basepoint,
            self.base_value,
        )
    }

    pub fn with_base(&self, basepoint: Complex64, base_value: LVec3) -> Self {
        let mut out = self.clone();
        out.basepoint = basepoint;
        out.base_value = base_value;
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn catenoid() -> WeierstrassData {
        make_weierstrass(
            ParamDomain::annulus(0.1, 1.0, false),
            "z",
            "1/z",
            c(0.5, 0.0),
            LVec3::ZERO,
        )
        .unwrap()
    }

    #[test]
    fn construction_examples() {
        assert!(make_weierstrass(ParamDomain::plane(), "0.2", "1", c(0.0, 0.0), LVec3::ZERO).is_ok());
        let _ = catenoid();
        let err = make_weierstrass(ParamDomain::disc(2.0), "z", "1", c(0.0, 0.0), LVec3::ZERO);
        assert!(matches!(err, Err(Error::SpacelikeViolation { .. })));
        let err = make_weierstrass(ParamDomain::disc(0.5), "z", "0", c(0.0, 0.0), LVec3::ZERO);
        assert!(matches!(err, Err(Error::DegeneratePhi(_))));
        let err = make_weierstrass(ParamDomain::disc(0.5), "z", "z +", c(0.0, 0.0), LVec3::ZERO);
        assert!(matches!(err, Err(Error::Parse(_))));
        let err = make_weierstrass(ParamDomain::disc(0.5), "z", "1", c(0.7, 0.0), LVec3::ZERO);
        assert!(matches!(err, Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn phi_examples() {
        let d = make_weierstrass(
            ParamDomain::annulus(0.1, 0.5, false),
            "z",
            "1",
            c(0.2, 0.0),
            LVec3::ZERO,
        )
        .unwrap();
        let p = d.make_phi();
        assert!((p[0].eval(c(2.0, 0.0)).unwrap() - c(0.0, -0.75)).norm() < 1e-15);
        let plane = make_weierstrass(ParamDomain::plane(), "0.2", "1", c(0.0, 0.0), LVec3::ZERO).unwrap();
        assert!(plane.make_phi().iter().all(|f| f.is_constant()));
    }

    #[test]
    fn composed_phi_matches_direct_evaluation() {
        let d = catenoid();
        let fns = d.make_phi();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let z = Complex64::from_polar(rng.gen_range(0.15..0.95), rng.gen_range(0.0..std::f64::consts::TAU));
            let direct = d.phi_at(z).unwrap();
            for k in 0..3 {
                assert!((fns[k].eval(z).unwrap() - direct[k]).norm() < 1e-13 * direct[k].norm().max(1.0));
            }
            let null = direct[0] * direct[0] + direct[1] * direct[1] - direct[2] * direct[2];
            assert!(null.norm() < 1e-10 * direct[2].norm_sqr());
        }
    }

    #[test]
    fn frame_at_catenoid() {
        let fr = catenoid().frame_at(c(0.5, 0.0)).unwrap();
        assert!((fr.lambda_sq - 2.25).abs() < 1e-14);
        assert!(fr.normal.max_abs_diff(LVec3::new(0.0, 4.0 / 3.0, -5.0 / 3.0)) < 1e-14);
        assert!(fr.x_u.max_abs_diff(LVec3::new(0.0, -2.5, 2.0)) < 1e-14);
        assert!(fr.x_v.max_abs_diff(LVec3::new(-1.5, 0.0, 0.0)) < 1e-14);
    }

    #[test]
    fn frame_contracts_random_points() {
        let data = [
            catenoid(),
            make_weierstrass(
                ParamDomain::disc(0.9),
                "z^2/2 + 0.1i",
                "exp(z)",
                c(0.0, 0.0),
                LVec3::ZERO,
            )
            .unwrap(),
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for d in &data {
            for _ in 0..100 {
                let z = Complex64::from_polar(rng.gen_range(0.2..0.85), rng.gen_range(0.0..std::f64::consts::TAU));
                let fr = d.frame_at(z).unwrap();
                let l = fr.lambda_sq;
                assert!((fr.x_u.lorentz_norm_sq() - l).abs() < 1e-10 * l);
                assert!((fr.x_v.lorentz_norm_sq() - l).abs() < 1e-10 * l);
                assert!(fr.x_u.minkowski(fr.x_v).abs() < 1e-10 * l);
                assert!(fr.x_u.minkowski(fr.normal).abs() < 1e-10 * l.sqrt() * fr.normal.euclid_norm());
                assert!(fr.x_v.minkowski(fr.normal).abs() < 1e-10 * l.sqrt() * fr.normal.euclid_norm());
                assert!((fr.normal.lorentz_norm_sq() + 1.0).abs() < 1e-9);
                assert!(fr.normal.x3 <= -1.0);
                // The Lorentzian sum |φ1|²+|φ2|²-|φ3|² is twice the conformal factor.
                let p = d.phi_at(z).unwrap();
                let s = p[0].norm_sqr() + p[1].norm_sqr() - p[2].norm_sqr();
                assert!((s - 2.0 * l).abs() < 1e-10 * l);
            }
        }
    }

    #[test]
    fn minimal_frame_is_euclidean_orthonormal() {
        let d = catenoid().dualize();
        assert_eq!(d.kind, SurfaceKind::Minimal);
        for z in [c(0.3, 0.2), c(-0.5, 0.4), c(0.1, -0.8)] {
            let fr = d.frame_at(z).unwrap();
            let l = fr.lambda_sq;
            assert!((fr.x_u.euclid_dot(fr.x_u) - l).abs() < 1e-12 * l);
            assert!((fr.x_v.euclid_dot(fr.x_v) - l).abs() < 1e-12 * l);
            assert!(fr.x_u.euclid_dot(fr.x_v).abs() < 1e-12 * l);
            let n = fr.x_u.cross(fr.x_v).euclid_normalized();
            assert!(n.max_abs_diff(fr.normal) < 1e-12);
            let p = d.phi_at(z).unwrap();
            let null = p[0] * p[0] + p[1] * p[1] + p[2] * p[2];
            assert!(null.norm() < 1e-12 * p[2].norm_sqr());
        }
    }

    #[test]
    fn periods() {
        let p = catenoid().cycle_periods(0.5).unwrap();
        assert!(p[0].norm() < 1e-10 && p[1].norm() < 1e-10);
        assert!((p[2] - c(0.0, std::f64::consts::TAU)).norm() < 1e-10);
        let d = make_weierstrass(
            ParamDomain::annulus(0.1, 2.0, false),
            "0.5",
            "1/z",
            c(1.0, 0.0),
            LVec3::ZERO,
        )
        .unwrap();
        let p = d.cycle_periods(1.0).unwrap();
        assert!((p[1] - c(0.0, -2.5 * std::f64::consts::PI)).norm() < 1e-10);
        // φ1 = (i/2)(2 - 0.5)/z has period (i/2)(1.5)(2πi) = -1.5π, a real period.
        assert!((p[0] - c(-1.5 * std::f64::consts::PI, 0.0)).norm() < 1e-10);
        assert!(matches!(
            d.check_exact(),
            Err(Error::NonExactRealPart { component: 1, .. })
        ));
        let plane = make_weierstrass(ParamDomain::plane(), "0.2", "1", c(0.0, 0.0), LVec3::ZERO).unwrap();
        assert!(plane.cycle_periods(1.0).unwrap().iter().all(|c| c.norm() < 1e-12));
    }

    #[test]
    fn duality() {
        let d = catenoid();
        let m = d.dualize();
        assert_eq!(m.g, d.g);
        let z = c(0.3, -0.4);
        assert!((m.f.eval(z).unwrap() - c(0.0, 1.0) / z).norm() < 1e-14);
        let dd = m.dualize();
        assert_eq!(dd.kind, SurfaceKind::Maximal);
        assert!((dd.f.eval(z).unwrap() + d.f.eval(z).unwrap()).norm() < 1e-14);
        let d4 = dd.dualize().dualize();
        assert_eq!(d4.f, d.f);
        assert_eq!(d.dualize().undualize().f.eval(z).unwrap(), d.f.eval(z).unwrap());
        // Re φ1, Re φ2 are shared by the pair.
        let (a, b) = (d.phi_at(z).unwrap(), m.phi_at(z).unwrap());
        assert!((a[0].re - b[0].re).abs() < 1e-14 && (a[1].re - b[1].re).abs() < 1e-14);
    }

    #[test]
    fn removable_zero_of_g() {
        let d = WeierstrassData::from_text(
            SurfaceKind::Minimal,
            ParamDomain::disc(0.5),
            "z",
            "z",
            c(0.0, 0.0),
            LVec3::ZERO,
        )
        .unwrap();
        let p = d.phi_at(c(0.0, 0.0)).unwrap();
        assert!((p[0] - c(0.5, 0.0)).norm() < 1e-7);
        assert!((p[1] - c(0.0, 0.5)).norm() < 1e-7);
        assert!(p[2].norm() < 1e-7);
    }
}
