//! Spacelike graphs over starlike regions: clearance from the light cone
//! along rays, monotonicity of that clearance, and the cone region test.
//!
//! A graph `S = {(p, u(p))}` over a region starlike about the origin is
//! described along each ray by `u_θ(t) = u(t e^{iθ})`. Its distance to the
//! light cone at the point over `t e^{iθ}` is
//! `f_θ(t) = min(|t - u_θ(t)|, |t + u_θ(t)|) / √2`.

use std::f64::consts::{FRAC_1_SQRT_2, TAU};
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lorentz::LVec3;
use crate::quadrature::{EdgeQuadrature, Path};
use crate::weierstrass::{DomainShape, SurfaceMesh, WeierstrassData};

/// Default ray cutoff for unbounded regions.
pub const DEFAULT_CUTOFF: f64 = 1e3;
/// Relative slack granted to sampled monotonicity checks.
pub const MONOTONE_TOL: f64 = 1e-9;
/// Boundary samples with `||u| - t|` below this are flagged, not failed.
pub const BOUNDARY_FLAG_TOL: f64 = 1e-9;

/// Radial extent `t_θ ∈ (0, ∞]` of a region starlike about the origin.
#[derive(Clone)]
pub enum RadialExtent {
    Unbounded,
    /// Values at `θ_k = 2πk/n`, interpolated linearly and periodically.
    Table(Vec<f64>),
    Function(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl std::fmt::Debug for RadialExtent {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RadialExtent::Unbounded => write!(f, "Unbounded"),
            RadialExtent::Table(v) => write!(f, "Table({} entries)", v.len()),
            RadialExtent::Function(_) => write!(f, "Function"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct StarlikeRegion {
    pub extent: RadialExtent,
}

const EXTENT_SCAN: usize = 720;

impl StarlikeRegion {
    pub fn entire() -> Self {
        Self {
            extent: RadialExtent::Unbounded,
        }
    }

    pub fn disc(radius: f64) -> Self {
        Self::from_fn(move |_| radius)
    }

    pub fn from_fn(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            extent: RadialExtent::Function(Arc::new(f)),
        }
    }

    pub fn from_table(values: Vec<f64>) -> Result<Self> {
        if values.len() < 3 || values.iter().any(|v| !(*v > 0.0)) {
            return Err(Error::InvalidArgument(
                "radial extent table needs at least 3 positive entries".into(),
            ));
        }
        Ok(Self {
            extent: RadialExtent::Table(values),
        })
    }

    pub fn t_theta(&self, theta: f64) -> f64 {
        match &self.extent {
            RadialExtent::Unbounded => f64::INFINITY,
            RadialExtent::Function(f) => f(theta.rem_euclid(TAU)),
            RadialExtent::Table(v) => {
                let n = v.len();
                let x = theta.rem_euclid(TAU) / TAU * n as f64;
                let k = (x.floor() as usize).min(n - 1);
                let s = x - k as f64;
                let (a, b) = (v[k], v[(k + 1) % n]);
                if a.is_infinite() || b.is_infinite() {
                    f64::INFINITY
                } else {
                    a + s * (b - a)
                }
            }
        }
    }

    /// Smallest extent over a fine scan of directions.
    pub fn min_extent(&self) -> f64 {
        let scan = (0..EXTENT_SCAN).map(|k| self.t_theta(TAU * k as f64 / EXTENT_SCAN as f64));
        let m = scan.fold(f64::INFINITY, f64::min);
        match &self.extent {
            RadialExtent::Table(v) => v.iter().copied().fold(m, f64::min),
            _ => m,
        }
    }

    pub fn is_bounded(&self) -> bool {
        match &self.extent {
            RadialExtent::Unbounded => false,
            RadialExtent::Table(v) => v.iter().all(|x| x.is_finite()),
            RadialExtent::Function(_) => {
                (0..EXTENT_SCAN).all(|k| self.t_theta(TAU * k as f64 / EXTENT_SCAN as f64).is_finite())
            }
        }
    }
}

/// Height function of a graph, normalized by `u(0) = 0`.
pub trait Height: Send + Sync {
    fn height(&self, p: Complex64) -> Result<f64>;

    /// Heights at `t e^{iθ}` for increasing `ts`; implementations may reuse
    /// work between consecutive samples.
    fn ray(&self, theta: f64, ts: &[f64]) -> Result<Vec<f64>> {
        ts.iter()
            .map(|&t| self.height(Complex64::from_polar(t, theta)))
            .collect()
    }
}

struct FnHeight<F>(F);

impl<F> Height for FnHeight<F>
where
    F: Fn(Complex64) -> f64 + Send + Sync,
{
    fn height(&self, p: Complex64) -> Result<f64> {
        let v = (self.0)(p);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::GraphExtraction(format!("height is not finite at {p}")))
        }
    }
}

#[derive(Clone)]
pub struct SpacelikeGraph {
    pub region: StarlikeRegion,
    height: Arc<dyn Height>,
}

impl std::fmt::Debug for SpacelikeGraph {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SpacelikeGraph").field("region", &self.region).finish()
    }
}

impl SpacelikeGraph {
    pub fn new(region: StarlikeRegion, height: Arc<dyn Height>) -> Self {
        Self { region, height }
    }

    pub fn from_fn(region: StarlikeRegion, u: impl Fn(Complex64) -> f64 + Send + Sync + 'static) -> Self {
        Self::new(region, Arc::new(FnHeight(u)))
    }

    pub fn height(&self, p: Complex64) -> Result<f64> {
        self.height.height(p)
    }

    pub fn ray(&self, theta: f64, ts: &[f64]) -> Result<Vec<f64>> {
        self.height.ray(theta, ts)
    }
}

/// `f_θ(t)`: Euclidean distance from `(t e^{iθ}, u)` to the light cone.
pub fn clearance(t: f64, u: f64) -> f64 {
    FRAC_1_SQRT_2 * (t - u).abs().min((t + u).abs())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProfileSample {
    pub theta: f64,
    pub t: f64,
    pub u: f64,
    /// Light-cone clearance `f_θ(t)`.
    pub f: f64,
    /// Lorentzian norm `t² - u²` of the graph point.
    pub n: f64,
}

/// Radii sampled along a ray: geometric over six decades below the cutoff
/// when the ray is unbounded, uniform up to `t_θ` otherwise.
pub fn ray_samples(t_theta: f64, samples: usize, cutoff: f64) -> Vec<f64> {
    let n = samples.max(2);
    if t_theta.is_finite() && t_theta <= cutoff {
        (1..=n).map(|k| t_theta * k as f64 / n as f64).collect()
    } else {
        let lo = (cutoff * 1e-6).ln();
        let hi = cutoff.ln();
        (0..n)
            .map(|k| {
                if k + 1 == n {
                    cutoff
                } else {
                    (lo + (hi - lo) * k as f64 / (n - 1) as f64).exp()
                }
            })
            .collect()
    }
}

pub fn lightcone_clearance_profile(
    graph: &SpacelikeGraph,
    theta: f64,
    samples: usize,
    cutoff: f64,
) -> Result<Vec<ProfileSample>> {
    if samples < 2 {
        return Err(Error::InvalidArgument("a profile needs at least 2 samples".into()));
    }
    if !(cutoff > 0.0) {
        return Err(Error::InvalidArgument("cutoff must be positive".into()));
    }
    let ts = ray_samples(graph.region.t_theta(theta), samples, cutoff);
    let us = graph.ray(theta, &ts)?;
    Ok(ts
        .iter()
        .zip(us)
        .map(|(&t, u)| ProfileSample {
            theta,
            t,
            u,
            f: clearance(t, u),
            n: t * t - u * u,
        })
        .collect())
}

#[derive(Debug, Clone, Copy)]
pub struct StarlikeOptions {
    pub delta: f64,
    pub rays: usize,
    pub samples: usize,
    pub cutoff: f64,
}

impl Default for StarlikeOptions {
    fn default() -> Self {
        Self {
            delta: 1.0,
            rays: 64,
            samples: 200,
            cutoff: DEFAULT_CUTOFF,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RayVerdict {
    pub theta: f64,
    /// `|u_θ(t)| < t` at every sample.
    pub spacelike: bool,
    /// `f_θ` non-decreasing.
    pub monotone: bool,
    /// `t² - u_θ(t)²` non-decreasing.
    pub norm_monotone: bool,
    pub min_slack: f64,
    pub min_slack_t: f64,
    /// Largest decrease of `f_θ` between consecutive samples (0 if none).
    pub worst_drop: f64,
    pub worst_drop_t: f64,
    /// Boundary samples lying on the light cone within tolerance.
    pub flagged: usize,
    pub f_delta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Properness {
    /// Bounded region: the graph is compact.
    TriviallySatisfied,
    /// Positive clearance at radius δ on an unbounded region.
    Certified,
    NotCertified,
}

#[derive(Debug, Clone, Serialize)]
pub struct StarlikeReport {
    pub delta: f64,
    pub rays: Vec<RayVerdict>,
    /// Every sample lies outside the light cone.
    pub ext_cone: bool,
    pub monotone: bool,
    pub norm_monotone: bool,
    pub lipschitz: bool,
    /// Largest `|u(p) - u(q)| / |p - q|` over sampled pairs.
    pub worst_lipschitz_ratio: f64,
    pub epsilon: f64,
    pub epsilon_theta: f64,
    pub properness: Properness,
    pub min_slack: f64,
    pub min_slack_at: [f64; 2],
    pub pass: bool,
}

struct RayData {
    verdict: RayVerdict,
    points: Vec<(Complex64, f64)>,
}

fn check_ray(graph: &SpacelikeGraph, theta: f64, opts: &StarlikeOptions) -> Result<RayData> {
    let t_max = graph.region.t_theta(theta);
    let profile = lightcone_clearance_profile(graph, theta, opts.samples, opts.cutoff)?;
    let f_delta = clearance(opts.delta, graph.height(Complex64::from_polar(opts.delta, theta))?);
    let mut v = RayVerdict {
        theta,
        spacelike: true,
        monotone: true,
        norm_monotone: true,
        min_slack: f64::INFINITY,
        min_slack_t: f64::NAN,
        worst_drop: 0.0,
        worst_drop_t: f64::NAN,
        flagged: 0,
        f_delta,
    };
    for (k, s) in profile.iter().enumerate() {
        let slack = s.t - s.u.abs();
        if slack < v.min_slack {
            v.min_slack = slack;
            v.min_slack_t = s.t;
        }
        let on_boundary = t_max.is_finite() && (s.t - t_max).abs() <= 1e-12 * t_max;
        if on_boundary && slack.abs() <= BOUNDARY_FLAG_TOL {
            v.flagged += 1;
        } else if slack <= 0.0 {
            v.spacelike = false;
        }
        if k > 0 {
            let prev = &profile[k - 1];
            let drop = prev.f - s.f;
            if drop > v.worst_drop {
                v.worst_drop = drop;
                v.worst_drop_t = s.t;
            }
            if drop > MONOTONE_TOL * (1.0 + prev.f) {
                v.monotone = false;
            }
            if prev.n - s.n > MONOTONE_TOL * (1.0 + prev.n.abs()) {
                v.norm_monotone = false;
            }
        }
    }
    let points = profile
        .iter()
        .map(|s| (Complex64::from_polar(s.t, theta), s.u))
        .collect();
    Ok(RayData { verdict: v, points })
}

fn lipschitz_ratio(a: &(Complex64, f64), b: &(Complex64, f64)) -> f64 {
    let d = (a.0 - b.0).norm();
    if d > 0.0 {
        (a.1 - b.1).abs() / d
    } else {
        0.0
    }
}

/// Checks, along `rays` equally spaced rays: strict spacelike bound
/// `|u_θ(t)| < t`, monotonicity of `f_θ` and of the Lorentzian norm, the
/// weak Lipschitz bound on neighboring samples, and the clearance
/// certificate `ε = min_θ f_θ(δ)`.
pub fn starlike_report(graph: &SpacelikeGraph, opts: &StarlikeOptions) -> Result<StarlikeReport> {
    let min_extent = graph.region.min_extent();
    if !(opts.delta > 0.0 && opts.delta < min_extent) {
        return Err(Error::InvalidArgument(format!(
            "delta = {} must lie in (0, {min_extent})",
            opts.delta
        )));
    }
    if opts.rays < 8 {
        return Err(Error::InvalidArgument("at least 8 rays are required".into()));
    }
    let thetas: Vec<f64> = (0..opts.rays).map(|j| TAU * j as f64 / opts.rays as f64).collect();
    let data: Vec<RayData> = thetas
        .par_iter()
        .map(|&th| check_ray(graph, th, opts))
        .collect::<Result<_>>()?;

    let mut worst_lipschitz_ratio: f64 = 0.0;
    for (j, ray) in data.iter().enumerate() {
        let next = &data[(j + 1) % data.len()];
        for (k, p) in ray.points.iter().enumerate() {
            if k > 0 {
                worst_lipschitz_ratio = worst_lipschitz_ratio.max(lipschitz_ratio(&ray.points[k - 1], p));
            }
            if let Some(q) = next.points.get(k) {
                worst_lipschitz_ratio = worst_lipschitz_ratio.max(lipschitz_ratio(p, q));
            }
        }
        // u(0) = 0 pairs with the first sample.
        if let Some(p) = ray.points.first() {
            worst_lipschitz_ratio = worst_lipschitz_ratio.max(lipschitz_ratio(&(Complex64::new(0.0, 0.0), 0.0), p));
        }
    }
    let lipschitz = worst_lipschitz_ratio <= 1.0 + 1e-9;

    let rays: Vec<RayVerdict> = data.into_iter().map(|d| d.verdict).collect();
    let (epsilon, epsilon_theta) = rays
        .iter()
        .map(|r| (r.f_delta, r.theta))
        .fold((f64::INFINITY, f64::NAN), |a, b| if b.0 < a.0 { b } else { a });
    let (min_slack, min_slack_at) = rays
        .iter()
        .map(|r| (r.min_slack, [r.theta, r.min_slack_t]))
        .fold((f64::INFINITY, [f64::NAN; 2]), |a, b| if b.0 < a.0 { b } else { a });
    let ext_cone = rays.iter().all(|r| r.spacelike);
    let monotone = rays.iter().all(|r| r.monotone);
    let norm_monotone = rays.iter().all(|r| r.norm_monotone);
    let properness = if graph.region.is_bounded() {
        Properness::TriviallySatisfied
    } else if epsilon > 0.0 {
        Properness::Certified
    } else {
        Properness::NotCertified
    };
    let pass = ext_cone && monotone && lipschitz && epsilon > 0.0;
    Ok(StarlikeReport {
        delta: opts.delta,
        rays,
        ext_cone,
        monotone,
        norm_monotone,
        lipschitz,
        worst_lipschitz_ratio,
        epsilon,
        epsilon_theta,
        properness,
        min_slack,
        min_slack_at,
        pass,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConePoint {
    pub point: LVec3,
    pub inside: bool,
    /// `‖(x1, x2)‖ tan α - |x3|`.
    pub margin: f64,
    /// `‖(x1, x2)‖² (1 - tan α)`, the lower bound on the Lorentzian norm used
    /// in the cone-region argument.
    pub norm_bound: f64,
    pub lorentz_norm_sq: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConeRegionReport {
    pub alpha: f64,
    pub points: Vec<ConePoint>,
    pub all_inside: bool,
    pub min_margin: f64,
}

/// Membership in `W_α = {|x3| ≤ ‖(x1, x2)‖ tan α}`.
pub fn cone_region_test(points: &[LVec3], alpha: f64) -> Result<ConeRegionReport> {
    if !(alpha > 0.0 && alpha < std::f64::consts::FRAC_PI_4) {
        return Err(Error::InvalidArgument(format!("alpha = {alpha} must lie in (0, π/4)")));
    }
    let tan = alpha.tan();
    let points: Vec<ConePoint> = points
        .iter()
        .map(|&p| {
            let r = p.horizontal_norm();
            let margin = r * tan - p.x3.abs();
            ConePoint {
                point: p,
                inside: margin >= 0.0,
                margin,
                norm_bound: r * r * (1.0 - tan),
                lorentz_norm_sq: p.lorentz_norm_sq(),
            }
        })
        .collect();
    Ok(ConeRegionReport {
        alpha,
        all_inside: points.iter().all(|p| p.inside),
        min_margin: points.iter().map(|p| p.margin).fold(f64::INFINITY, f64::min),
        points,
    })
}

/// Graph of a maximal immersion over its projection, obtained by inverting
/// `π₀ ∘ X` with Newton's method started from mesh vertices.
pub struct ImmersionGraph {
    data: WeierstrassData,
    /// Horizontal position of the graph center.
    origin: Complex64,
    height0: f64,
    seeds: Vec<(Complex64, LVec3)>,
}

const NEWTON_ITERS: usize = 60;

fn segment_clear_of_origin(a: Complex64, b: Complex64, r_min: f64) -> bool {
    let d = b - a;
    let t = if d.norm_sqr() > 0.0 {
        (-(a.conj() * d).re / d.norm_sqr()).clamp(0.0, 1.0)
    } else {
        0.0
    };
    (a + d * t).norm() > r_min
}

impl ImmersionGraph {
    /// `center` is a parameter in the closed domain whose image is the graph
    /// origin; `mesh` supplies starting points.
    pub fn new(data: WeierstrassData, mesh: &SurfaceMesh, center: Complex64) -> Result<Self> {
        let c = data.immersion_at(center)?.position;
        let max_l = mesh
            .vertices
            .iter()
            .filter(|v| v.lambda_sq.is_finite())
            .map(|v| v.lambda_sq)
            .fold(0.0, f64::max);
        let seeds: Vec<(Complex64, LVec3)> = mesh
            .vertices
            .iter()
            .filter(|v| v.interior && v.lambda_sq > 1e-8 * max_l)
            .map(|v| (v.param, v.position))
            .collect();
        if seeds.is_empty() {
            return Err(Error::GraphExtraction("mesh has no regular interior vertex".into()));
        }
        Ok(Self {
            data,
            origin: c.horizontal(),
            height0: c.x3,
            seeds,
        })
    }

    fn step_ok(&self, a: Complex64, b: Complex64) -> bool {
        let dom = &self.data.domain;
        if !dom.contains_closed(b) {
            return false;
        }
        match dom.shape {
            DomainShape::Annulus { r_in, .. } => segment_clear_of_origin(a, b, r_in * (1.0 - 1e-12)),
            DomainShape::PuncturedPlane => segment_clear_of_origin(a, b, 0.0),
            _ => true,
        }
    }

    /// Radial projection onto the closed domain.
    fn clamp(&self, z: Complex64) -> Complex64 {
        let r = z.norm();
        let (lo, hi) = match self.data.domain.shape {
            DomainShape::Disc { radius } => (0.0, radius),
            DomainShape::Annulus { r_in, r_out, .. } => (r_in, r_out),
            _ => return z,
        };
        if r > hi {
            z * (hi / r)
        } else if r < lo && r > 0.0 {
            z * (lo / r)
        } else {
            z
        }
    }

    fn nearest_seed(&self, target: Complex64) -> (Complex64, LVec3) {
        *self
            .seeds
            .iter()
            .min_by(|a, b| {
                let da = (a.1.horizontal() - target).norm();
                let db = (b.1.horizontal() - target).norm();
                da.total_cmp(&db)
            })
            .expect("seeds are non-empty")
    }

    /// Solves `π₀ X(z) = target` from `start`.
    fn invert(&self, target: Complex64, start: (Complex64, LVec3)) -> Result<(Complex64, LVec3)> {
        let q = EdgeQuadrature {
            tol: 1e-13,
            ..Default::default()
        };
        let tol = 1e-12 * (1.0 + target.norm());
        let (mut z, mut x) = start;
        let mut res = (target - x.horizontal()).norm();
        for _ in 0..NEWTON_ITERS {
            if res <= tol {
                return Ok((z, x));
            }
            let phi = self.data.phi_at(z)?;
            let (a, b, c, d) = (phi[0].re, -phi[0].im, phi[1].re, -phi[1].im);
            let det = a * d - b * c;
            if det.abs() < 1e-300 {
                break;
            }
            let r = target - x.horizontal();
            let du = (d * r.re - b * r.im) / det;
            let dv = (-c * r.re + a * r.im) / det;
            let step = Complex64::new(du, dv);
            let mut alpha = 1.0;
            let mut accepted = false;
            for _ in 0..40 {
                let zn = self.clamp(z + step * alpha);
                if zn != z && self.step_ok(z, zn) {
                    let (v, _) = self.data.integrate_along(Path::line(z, zn), q)?;
                    let xn = x + LVec3::new(v[0].re, v[1].re, v[2].re);
                    let rn = (target - xn.horizontal()).norm();
                    if rn < res {
                        z = zn;
                        x = xn;
                        res = rn;
                        accepted = true;
                        break;
                    }
                }
                alpha *= 0.5;
            }
            if !accepted {
                break;
            }
        }
        if res <= 1e-7 * (1.0 + target.norm()) {
            Ok((z, x))
        } else {
            Err(Error::GraphExtraction(format!(
                "could not invert the projection at {target} (residual {res:e})"
            )))
        }
    }

    fn solve(&self, p: Complex64, hint: Option<(Complex64, LVec3)>) -> Result<(Complex64, LVec3)> {
        let target = self.origin + p;
        if let Some(h) = hint {
            if let Ok(s) = self.invert(target, h) {
                return Ok(s);
            }
        }
        self.invert(target, self.nearest_seed(target))
    }
}

impl Height for ImmersionGraph {
    fn height(&self, p: Complex64) -> Result<f64> {
        if p.norm() == 0.0 {
            return Ok(0.0);
        }
        Ok(self.solve(p, None)?.1.x3 - self.height0)
    }

    fn ray(&self, theta: f64, ts: &[f64]) -> Result<Vec<f64>> {
        let mut hint = None;
        let mut out = Vec::with_capacity(ts.len());
        for &t in ts {
            if t == 0.0 {
                out.push(0.0);
                continue;
            }
            let s = self.solve(Complex64::from_polar(t, theta), hint)?;
            out.push(s.1.x3 - self.height0);
            hint = Some(s);
        }
        Ok(out)
    }
}

/// Number of boundary samples used to trace projected boundary curves.
const BOUNDARY_SAMPLES: usize = 1024;
const EXTENT_TABLE: usize = 720;
/// Relative shrink of traced extents, larger than the interpolation error of
/// the table, so that every point with `t ≤ t_θ` has a preimage.
const EXTENT_INSET: f64 = 1e-4;

/// Projection of the mesh onto the horizontal plane is injective when all
/// non-degenerate cells keep one orientation.
#[derive(Debug, Clone, Serialize)]
pub struct InjectivityReport {
    pub injective: bool,
    pub positive: usize,
    pub negative: usize,
    pub degenerate: usize,
    /// Faces whose orientation disagrees with the majority.
    pub overlapping: Vec<usize>,
}

pub fn projected_injectivity(mesh: &SurfaceMesh) -> InjectivityReport {
    let scale = mesh.scale().max(1e-300);
    let mut signs = Vec::with_capacity(mesh.faces.len());
    for face in &mesh.faces {
        let p: Vec<Complex64> = face.iter().map(|&i| mesh.vertices[i].position.horizontal()).collect();
        let mut area = 0.0;
        for k in 1..p.len() - 1 {
            let (a, b) = (p[k] - p[0], p[k + 1] - p[0]);
            area += 0.5 * (a.re * b.im - a.im * b.re);
        }
        signs.push(if area.abs() <= 1e-12 * scale * scale {
            0
        } else if area > 0.0 {
            1
        } else {
            -1
        });
    }
    let positive = signs.iter().filter(|&&s| s > 0).count();
    let negative = signs.iter().filter(|&&s| s < 0).count();
    let minority = if positive >= negative { -1 } else { 1 };
    let overlapping: Vec<usize> = signs
        .iter()
        .enumerate()
        .filter(|(_, &s)| s == minority)
        .map(|(i, _)| i)
        .collect();
    InjectivityReport {
        injective: overlapping.is_empty(),
        positive,
        negative,
        degenerate: signs.len() - positive - negative,
        overlapping,
    }
}

/// Distances from the origin to the polygon along `EXTENT_TABLE` rays;
/// `None` where a ray crosses the polygon more than once.
fn ray_hits(poly: &[Complex64], theta: f64) -> Vec<f64> {
    let dir = Complex64::from_polar(1.0, theta);
    let mut hits = Vec::new();
    for k in 0..poly.len() {
        let a = poly[k];
        let b = poly[(k + 1) % poly.len()];
        // Solve a + s (b - a) = t dir.
        let e = b - a;
        let den = dir.re * e.im - dir.im * e.re;
        if den == 0.0 {
            continue;
        }
        let t = (a.re * e.im - a.im * e.re) / den;
        let s = (a.re * dir.im - a.im * dir.re) / den;
        if t > 0.0 && (0.0..1.0).contains(&s) {
            hits.push(t);
        }
    }
    hits
}

/// The graph of a maximal immersion over its projection, centered at the
/// image of `center`. Boundary circles of the domain whose image does not
/// collapse bound the region; a region crossed twice by some ray is not
/// starlike and is rejected.
pub fn graph_from_immersion(data: &WeierstrassData, mesh: &SurfaceMesh, center: Complex64) -> Result<SpacelikeGraph> {
    let h = ImmersionGraph::new(data.clone(), mesh, center)?;
    let scale = mesh.scale();
    let mut polygons = Vec::new();
    for ring in data.domain.rings().into_iter().filter(|r| r.boundary) {
        let image = data.circle_image(ring.radius, BOUNDARY_SAMPLES)?;
        let poly: Vec<Complex64> = image.iter().map(|p| p.horizontal() - h.origin).collect();
        let diameter = poly
            .iter()
            .map(|a| poly.iter().map(|b| (a - b).norm()).fold(0.0, f64::max))
            .fold(0.0, f64::max);
        if diameter >= 1e-6 * scale {
            polygons.push(poly);
        }
    }
    let mut table = Vec::with_capacity(EXTENT_TABLE);
    for k in 0..EXTENT_TABLE {
        let theta = TAU * k as f64 / EXTENT_TABLE as f64;
        let hits: Vec<f64> = polygons.iter().flat_map(|p| ray_hits(p, theta)).collect();
        match hits.len() {
            0 => table.push(f64::INFINITY),
            1 => table.push(hits[0] * (1.0 - EXTENT_INSET)),
            _ => {
                return Err(Error::GraphExtraction(format!(
                    "projected boundary is crossed {} times by the ray at angle {theta:.4}: region is not starlike about the center",
                    hits.len()
                )))
            }
        }
    }
    let region = if table.iter().all(|t| t.is_infinite()) {
        StarlikeRegion::entire()
    } else {
        StarlikeRegion::from_table(table)?
    };
    Ok(SpacelikeGraph::new(region, Arc::new(h)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lorentz::dist_to_lightcone;
    use crate::weierstrass::{make_weierstrass, ParamDomain};

    #[test]
    fn profile_examples() {
        let plane = SpacelikeGraph::from_fn(StarlikeRegion::entire(), |_| 0.0);
        for s in lightcone_clearance_profile(&plane, 0.3, 50, DEFAULT_CUTOFF).unwrap() {
            assert!((s.f - s.t * FRAC_1_SQRT_2).abs() < 1e-12 * s.t);
        }
        let half = SpacelikeGraph::from_fn(StarlikeRegion::disc(5.0), |p| 0.5 * p.norm());
        let prof = lightcone_clearance_profile(&half, 1.0, 20, DEFAULT_CUTOFF).unwrap();
        assert!((prof.last().unwrap().t - 5.0).abs() < 1e-12);
        for s in prof {
            assert!((s.f - 0.25 * 2f64.sqrt() * s.t).abs() < 1e-12);
        }
        let cat = SpacelikeGraph::from_fn(StarlikeRegion::entire(), |p| -p.norm().asinh());
        let f = clearance(1.0, cat.height(Complex64::new(1.0, 0.0)).unwrap());
        let oracle = dist_to_lightcone(LVec3::new(1.0, 0.0, -1f64.asinh()));
        assert!((f - oracle).abs() < 1e-12);
        assert!((f - 0.083881541046317).abs() < 1e-14);
    }

    #[test]
    fn report_examples() {
        let opts = StarlikeOptions::default();
        let plane = SpacelikeGraph::from_fn(StarlikeRegion::entire(), |_| 0.0);
        let r = starlike_report(&plane, &opts).unwrap();
        assert!(r.pass);
        assert!((r.epsilon - FRAC_1_SQRT_2).abs() < 1e-12);
        assert_eq!(r.properness, Properness::Certified);

        let cat = SpacelikeGraph::from_fn(StarlikeRegion::entire(), |p| -p.norm().asinh());
        let r = starlike_report(&cat, &opts).unwrap();
        assert!(r.pass && r.norm_monotone);
        assert!((r.epsilon - 0.083881541046317).abs() < 1e-12);

        let light = SpacelikeGraph::from_fn(StarlikeRegion::entire(), |p| p.norm());
        let r = starlike_report(&light, &opts).unwrap();
        assert!(!r.ext_cone && !r.pass);

        let bounded = SpacelikeGraph::from_fn(StarlikeRegion::disc(2.0), |p| 0.3 * p.re);
        let r = starlike_report(&bounded, &opts).unwrap();
        assert_eq!(r.properness, Properness::TriviallySatisfied);
        assert!(starlike_report(&bounded, &StarlikeOptions { delta: 3.0, ..opts }).is_err());
    }

    #[test]
    fn cone_examples() {
        let pi8 = std::f64::consts::PI / 8.0;
        let r = cone_region_test(
            &[
                LVec3::new(3.0, 4.0, 2.0),
                LVec3::new(0.0, 0.0, 1.0),
                LVec3::new(1.0, 0.0, 0.0),
            ],
            pi8,
        )
        .unwrap();
        assert!(r.points[0].inside);
        assert!((r.points[0].margin - (5.0 * pi8.tan() - 2.0)).abs() < 1e-14);
        assert!((r.points[0].margin - 0.0711).abs() < 1e-4);
        assert!(!r.points[1].inside);
        assert!((r.points[2].margin - pi8.tan()).abs() < 1e-15);
        assert!(!r.all_inside);
        assert!(cone_region_test(&[], 1.0).is_err());
    }

    #[test]
    fn catenoid_graph_from_mesh() {
        let d = make_weierstrass(
            ParamDomain::annulus(0.05, 1.0, true).with_grid(16, 24),
            "z",
            "1/z",
            Complex64::new(0.5, 0.0),
            LVec3::new(0.0, 0.75, 0.5f64.ln()),
        )
        .unwrap();
        let mesh = d.integrate_immersion().unwrap();
        let g = graph_from_immersion(&d, &mesh, Complex64::new(1.0, 0.0)).unwrap();
        let want = 0.5 * (20.0 - 0.05);
        assert!((g.region.t_theta(0.7) - want).abs() < 1e-3 * want);
        for t in [0.3, 1.0, 4.0, 9.0] {
            let u = g.height(Complex64::from_polar(t, 1.1)).unwrap();
            assert!((u + f64::asinh(t)).abs() < 1e-8, "t = {t}: {u}");
        }
        let inj = projected_injectivity(&mesh);
        assert!(inj.injective);
    }
}
