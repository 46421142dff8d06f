use std::f64::consts::PI;
use std::fmt::Write as _;

use num_complex::Complex64;
use rayon::prelude::*;

use super::{SurfaceKind, WeierstrassData, MIN_LAMBDA_SQ};
use crate::error::{Error, Result};
use crate::lorentz::{euclidean_direction_of_normal, sphere_gauss, stereographic, ExtComplex, LVec3};
use crate::quadrature::{integrate_path, EdgeQuadrature, Path, C3, ZERO3};

/// Agreement required between the two spanning trees.
pub const PATH_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy)]
pub struct IntegrationOptions {
    pub quadrature: EdgeQuadrature,
    /// Integrate along a second spanning tree and record the discrepancy.
    pub verify_paths: bool,
}

impl Default for IntegrationOptions {
    fn default() -> Self {
        Self {
            quadrature: EdgeQuadrature::default(),
            verify_paths: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeshVertex {
    pub param: Complex64,
    pub position: LVec3,
    /// `∫ Φ` from the basepoint; `position = base_value + Re(integral)`.
    pub integral: C3,
    pub gauss: Complex64,
    pub lambda_sq: f64,
    /// `N₀ ∈ ℍ²₋` (maximal) or the unit normal (minimal); absent where the
    /// frame degenerates.
    pub normal: Option<LVec3>,
    /// Accumulated quadrature error estimate along the tree path.
    pub quad_error: f64,
    pub interior: bool,
}

/// Immersion sampled on the polar grid of the domain. Vertex 0 is the
/// origin when the grid has a center; ring vertices follow ring by ring.
#[derive(Debug, Clone)]
pub struct SurfaceMesh {
    pub kind: SurfaceKind,
    pub vertices: Vec<MeshVertex>,
    pub faces: Vec<Vec<usize>>,
    pub ring_radii: Vec<f64>,
    pub angular: usize,
    pub has_center: bool,
    /// Largest position difference between two spanning trees, if checked.
    pub path_discrepancy: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointIntegral {
    pub integral: C3,
    pub position: LVec3,
    pub error: f64,
}

fn add3(a: &C3, b: &C3) -> C3 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

fn re3(a: &C3) -> LVec3 {
    LVec3::new(a[0].re, a[1].re, a[2].re)
}

fn principal_angle(t: f64) -> f64 {
    let r = t.rem_euclid(2.0 * PI);
    if r > PI {
        r - 2.0 * PI
    } else {
        r
    }
}

/// Path from `from` to `to` along the radius through `from` and then the
/// shorter arc of `|z| = |to|`. Straight when either end is the origin.
pub fn polar_path(from: Complex64, to: Complex64) -> Vec<Path> {
    if from == to {
        return Vec::new();
    }
    if from.norm() == 0.0 || to.norm() == 0.0 {
        return vec![Path::line(from, to)];
    }
    let (r0, t0) = from.to_polar();
    let (r1, t1) = to.to_polar();
    let mut out = Vec::new();
    if r0 != r1 {
        out.push(Path::radial(t0, r0, r1));
    }
    let dt = principal_angle(t1 - t0);
    if dt != 0.0 {
        out.push(Path::arc(r1, t0, t0 + dt));
    }
    out
}

impl WeierstrassData {
    fn panels_for(&self, path: &Path) -> usize {
        let mid = path.point(0.5);
        let hint = match (self.phi_at(mid), self.phi_derivative_at(mid)) {
            (Ok(p), Ok(dp)) => {
                let size = p.iter().map(|c| c.norm()).fold(0.0, f64::max);
                let slope = dp.iter().map(|c| c.norm()).fold(0.0, f64::max);
                if size > 0.0 {
                    path.approx_length() * slope / size
                } else {
                    4.0
                }
            }
            _ => 4.0,
        };
        (hint.ceil() as usize).clamp(1, 64)
    }

    /// `∫ Φ` along one path with its error estimate.
    pub fn integrate_along(&self, path: Path, q: EdgeQuadrature) -> Result<(C3, f64)> {
        let r = integrate_path(&|z| self.phi_at(z), path, self.panels_for(&path), q)?;
        if r.depth_exhausted && r.error > 1e3 * q.tol {
            return Err(Error::Quadrature {
                from: path.start(),
                to: path.end(),
                reason: format!("bisection depth exhausted (error {:e})", r.error),
            });
        }
        Ok((r.value, r.error))
    }

    fn integrate_polar(&self, from: Complex64, to: Complex64, q: EdgeQuadrature) -> Result<(C3, f64)> {
        let mut acc = ZERO3;
        let mut err = 0.0;
        for p in polar_path(from, to) {
            let (v, e) = self.integrate_along(p, q)?;
            acc = add3(&acc, &v);
            err += e;
        }
        Ok((acc, err))
    }

    /// `X(z)` by integrating from the basepoint along a polar path.
    pub fn immersion_at(&self, z: Complex64) -> Result<PointIntegral> {
        self.immersion_at_with(z, EdgeQuadrature::default())
    }

    pub fn immersion_at_with(&self, z: Complex64, q: EdgeQuadrature) -> Result<PointIntegral> {
        if !self.domain.contains_closed(z) {
            return Err(Error::InvalidArgument(format!("{z} is outside the domain")));
        }
        let (integral, error) = self.integrate_polar(self.basepoint, z, q)?;
        Ok(PointIntegral {
            integral,
            position: self.base_value + re3(&integral),
            error,
        })
    }

    /// Images of `n` equally spaced points of `|z| = radius`, starting at
    /// angle 0 and integrated along consecutive arcs.
    pub fn circle_image(&self, radius: f64, n: usize) -> Result<Vec<LVec3>> {
        let q = EdgeQuadrature::default();
        let first = self.immersion_at(Complex64::new(radius, 0.0))?;
        let mut acc = first.integral;
        let mut out = vec![first.position];
        let step = 2.0 * PI / n as f64;
        for k in 1..n {
            let path = Path::arc(radius, step * (k - 1) as f64, step * k as f64);
            let r = integrate_path(&|z| self.phi_at(z), path, 2, q)?;
            acc = add3(&acc, &r.value);
            out.push(self.base_value + re3(&acc));
        }
        Ok(out)
    }

    pub fn integrate_immersion(&self) -> Result<SurfaceMesh> {
        self.integrate_immersion_with(IntegrationOptions::default())
    }

    pub fn integrate_immersion_with(&self, opts: IntegrationOptions) -> Result<SurfaceMesh> {
        self.check_exact()?;
        let grid = Grid::new(self);
        let q = opts.quadrature;
        let primary = grid.run(self, &grid.tree(false), q)?;
        let path_discrepancy = if opts.verify_paths {
            let alt = grid.run(self, &grid.tree(true), q)?;
            let d = primary
                .iter()
                .zip(&alt)
                .map(|(a, b)| re3(&a.0).max_abs_diff(re3(&b.0)))
                .fold(0.0, f64::max);
            Some(d)
        } else {
            None
        };
        let vertices: Vec<MeshVertex> = primary
            .par_iter()
            .enumerate()
            .map(|(idx, &(integral, quad_error))| {
                let (param, interior) = grid.vertex(idx);
                self.decorate(param, interior, integral, quad_error)
            })
            .collect();
        Ok(SurfaceMesh {
            kind: self.kind,
            vertices,
            faces: grid.faces(),
            ring_radii: grid.rings.iter().map(|r| r.radius).collect(),
            angular: grid.n,
            has_center: grid.center,
            path_discrepancy,
        })
    }

    fn decorate(&self, param: Complex64, interior: bool, integral: C3, quad_error: f64) -> MeshVertex {
        let gauss = self.gauss_at(param).unwrap_or(Complex64::new(f64::NAN, f64::NAN));
        let lambda_sq = self.lambda_sq_at(param).unwrap_or(f64::NAN);
        let normal = if gauss.is_finite() && lambda_sq >= MIN_LAMBDA_SQ {
            match self.kind {
                SurfaceKind::Maximal => stereographic(ExtComplex::Finite(gauss)).ok(),
                SurfaceKind::Minimal => Some(sphere_gauss(gauss)),
            }
        } else {
            None
        };
        MeshVertex {
            param,
            position: self.base_value + re3(&integral),
            integral,
            gauss,
            lambda_sq,
            normal,
            quad_error,
            interior,
        }
    }
}

/// A sequence of edges walked from an already integrated vertex.
struct Chain {
    start: usize,
    edges: Vec<(usize, Path)>,
}

struct Grid {
    rings: Vec<super::Ring>,
    angles: Vec<f64>,
    n: usize,
    center: bool,
    root: usize,
    basepoint: Complex64,
}

impl Grid {
    fn new(data: &WeierstrassData) -> Self {
        let rings = data.domain.rings();
        let angles = data.domain.angles();
        let n = angles.len();
        let center = data.domain.has_center();
        let mut g = Self {
            rings,
            angles,
            n,
            center,
            root: 0,
            basepoint: data.basepoint,
        };
        g.root = (0..g.len())
            .min_by(|&a, &b| {
                let da = (g.vertex(a).0 - data.basepoint).norm();
                let db = (g.vertex(b).0 - data.basepoint).norm();
                da.total_cmp(&db)
            })
            .unwrap_or(0);
        g
    }

    fn offset(&self) -> usize {
        usize::from(self.center)
    }

    fn len(&self) -> usize {
        self.offset() + self.rings.len() * self.n
    }

    fn index(&self, k: usize, j: usize) -> usize {
        self.offset() + k * self.n + (j % self.n)
    }

    /// Ring and spoke of a ring vertex; `None` for the center.
    fn ring_of(&self, idx: usize) -> Option<(usize, usize)> {
        if self.center && idx == 0 {
            None
        } else {
            let i = idx - self.offset();
            Some((i / self.n, i % self.n))
        }
    }

    fn vertex(&self, idx: usize) -> (Complex64, bool) {
        match self.ring_of(idx) {
            None => (Complex64::new(0.0, 0.0), true),
            Some((k, j)) => (
                Complex64::from_polar(self.rings[k].radius, self.angles[j]),
                !self.rings[k].boundary,
            ),
        }
    }

    fn arc_chain(&self, k: usize, j0: usize, backwards: bool) -> Chain {
        let r = self.rings[k].radius;
        let step = 2.0 * PI / self.n as f64;
        let edges = (1..self.n)
            .map(|s| {
                let (j, t0, t1) = if backwards {
                    let j = (j0 + self.n - s) % self.n;
                    let t1 = self.angles[j0] - step * s as f64;
                    (j, t1 + step, t1)
                } else {
                    let t1 = self.angles[j0] + step * s as f64;
                    ((j0 + s) % self.n, t1 - step, t1)
                };
                (self.index(k, j), Path::arc(r, t0, t1))
            })
            .collect();
        Chain {
            start: self.index(k, j0),
            edges,
        }
    }

    /// Radial chains from ring `k` outward and inward along spoke `j`.
    fn spoke_chains(&self, k: usize, j: usize) -> Vec<Chain> {
        let t = self.angles[j];
        let r = |k: usize| self.rings[k].radius;
        let out = Chain {
            start: self.index(k, j),
            edges: (k + 1..self.rings.len())
                .map(|m| (self.index(m, j), Path::radial(t, r(m - 1), r(m))))
                .collect(),
        };
        let inward = Chain {
            start: self.index(k, j),
            edges: (0..k)
                .rev()
                .map(|m| (self.index(m, j), Path::radial(t, r(m + 1), r(m))))
                .collect(),
        };
        vec![out, inward]
    }

    fn center_edge(&self, j: usize, outward: bool) -> (usize, Path) {
        let p = Complex64::from_polar(self.rings[0].radius, self.angles[j]);
        let zero = Complex64::new(0.0, 0.0);
        if outward {
            (self.index(0, j), Path::line(zero, p))
        } else {
            (0, Path::line(p, zero))
        }
    }

    /// Stages of chains; every chain starts at a vertex finished by an
    /// earlier stage. The alternative tree swaps the roles of arcs and spokes.
    fn tree(&self, alternative: bool) -> Vec<Vec<Chain>> {
        let mut stages = Vec::new();
        match (self.ring_of(self.root), alternative) {
            (None, false) => {
                let firsts = (0..self.n)
                    .map(|j| Chain {
                        start: 0,
                        edges: vec![self.center_edge(j, true)],
                    })
                    .collect();
                stages.push(firsts);
                stages.push((0..self.n).flat_map(|j| self.spoke_chains(0, j)).collect());
            }
            (None, true) => {
                stages.push(vec![Chain {
                    start: 0,
                    edges: vec![self.center_edge(0, true)],
                }]);
                stages.push(self.spoke_chains(0, 0));
                stages.push((0..self.rings.len()).map(|k| self.arc_chain(k, 0, true)).collect());
            }
            (Some((k0, j0)), false) => {
                stages.push(vec![self.arc_chain(k0, j0, false)]);
                stages.push((0..self.n).flat_map(|j| self.spoke_chains(k0, j)).collect());
                if self.center {
                    stages.push(vec![Chain {
                        start: self.index(0, j0),
                        edges: vec![self.center_edge(j0, false)],
                    }]);
                }
            }
            (Some((k0, j0)), true) => {
                stages.push(self.spoke_chains(k0, j0));
                stages.push((0..self.rings.len()).map(|k| self.arc_chain(k, j0, true)).collect());
                if self.center {
                    let j = (j0 + self.n / 2) % self.n;
                    stages.push(vec![Chain {
                        start: self.index(0, j),
                        edges: vec![self.center_edge(j, false)],
                    }]);
                }
            }
        }
        stages
    }

    fn run(&self, data: &WeierstrassData, stages: &[Vec<Chain>], q: EdgeQuadrature) -> Result<Vec<(C3, f64)>> {
        let mut values: Vec<Option<(C3, f64)>> = vec![None; self.len()];
        let root_param = self.vertex(self.root).0;
        values[self.root] = Some(data.integrate_polar(self.basepoint, root_param, q)?);
        for stage in stages {
            let done = &values;
            let results: Vec<Vec<(usize, C3, f64)>> = stage
                .par_iter()
                .map(|chain| {
                    let (mut acc, mut err) = done[chain.start].expect("chain starts at a finished vertex");
                    let mut out = Vec::with_capacity(chain.edges.len());
                    for &(v, path) in &chain.edges {
                        let (val, e) = data.integrate_along(path, q)?;
                        acc = add3(&acc, &val);
                        err += e;
                        out.push((v, acc, err));
                    }
                    Ok(out)
                })
                .collect::<Result<_>>()?;
            for (v, acc, err) in results.into_iter().flatten() {
                values[v] = Some((acc, err));
            }
        }
        values
            .into_iter()
            .enumerate()
            .map(|(i, v)| {
                v.ok_or_else(|| Error::InvalidArgument(format!("grid vertex {i} not reached by the spanning tree")))
            })
            .collect()
    }

    fn faces(&self) -> Vec<Vec<usize>> {
        let mut faces = Vec::new();
        if self.center {
            for j in 0..self.n {
                faces.push(vec![0, self.index(0, j), self.index(0, j + 1)]);
            }
        }
        for k in 0..self.rings.len().saturating_sub(1) {
            for j in 0..self.n {
                faces.push(vec![
                    self.index(k, j),
                    self.index(k + 1, j),
                    self.index(k + 1, j + 1),
                    self.index(k, j + 1),
                ]);
            }
        }
        faces
    }
}

impl SurfaceMesh {
    /// Index of the vertex on ring `k` (innermost first) and spoke `j`.
    pub fn index(&self, k: usize, j: usize) -> usize {
        usize::from(self.has_center) + k * self.angular + (j % self.angular)
    }

    pub fn ring(&self, k: usize) -> &[MeshVertex] {
        let start = self.index(k, 0);
        &self.vertices[start..start + self.angular]
    }

    /// Euclidean diagonal of the bounding box of the vertex positions.
    pub fn scale(&self) -> f64 {
        let mut lo = [f64::INFINITY; 3];
        let mut hi = [f64::NEG_INFINITY; 3];
        for v in &self.vertices {
            for (i, x) in v.position.to_array().into_iter().enumerate() {
                lo[i] = lo[i].min(x);
                hi[i] = hi[i].max(x);
            }
        }
        (0..3).map(|i| (hi[i] - lo[i]).powi(2)).sum::<f64>().sqrt()
    }

    pub fn max_quad_error(&self) -> f64 {
        self.vertices.iter().map(|v| v.quad_error).fold(0.0, f64::max)
    }

    /// Wavefront OBJ with one `vn` per vertex: the Euclidean direction of `N₀`
    /// for maximal surfaces and the Gauss map for minimal ones.
    pub fn to_obj(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# {} vertices, {} faces", self.vertices.len(), self.faces.len());
        for v in &self.vertices {
            let p = v.position;
            let _ = writeln!(s, "v {:.12} {:.12} {:.12}", p.x1, p.x2, p.x3);
        }
        for v in &self.vertices {
            let n = if !v.gauss.is_finite() {
                LVec3::new(0.0, 0.0, 1.0)
            } else {
                match self.kind {
                    SurfaceKind::Maximal => euclidean_direction_of_normal(v.gauss),
                    SurfaceKind::Minimal => sphere_gauss(v.gauss),
                }
            };
            let _ = writeln!(s, "vn {:.12} {:.12} {:.12}", n.x1, n.x2, n.x3);
        }
        for f in &self.faces {
            s.push('f');
            for &i in f {
                let _ = write!(s, " {0}//{0}", i + 1);
            }
            s.push('\n');
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weierstrass::{make_weierstrass, ParamDomain};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn catenoid_closed(z: Complex64) -> LVec3 {
        let (r, t) = z.to_polar();
        let a = 0.5 * (r - 1.0 / r);
        LVec3::new(a * t.sin(), -a * t.cos(), r.ln())
    }

    #[test]
    fn polar_paths() {
        let p = polar_path(c(0.5, 0.0), c(0.0, 0.8));
        assert_eq!(p.len(), 2);
        assert!((p[1].end() - c(0.0, 0.8)).norm() < 1e-15);
        assert!(polar_path(c(0.5, 0.0), c(0.5, 0.0)).is_empty());
        let p = polar_path(c(0.0, 0.0), c(0.3, 0.3));
        assert!(matches!(p[..], [Path::Line { .. }]));
    }

    #[test]
    fn catenoid_mesh_matches_closed_form() {
        let d = make_weierstrass(
            ParamDomain::annulus(0.1, 1.0, true).with_grid(12, 16),
            "z",
            "1/z",
            c(0.5, 0.0),
            catenoid_closed(c(0.5, 0.0)),
        )
        .unwrap();
        let m = d.integrate_immersion().unwrap();
        assert_eq!(m.vertices.len(), 12 * 16);
        assert_eq!(m.faces.len(), 11 * 16);
        for v in &m.vertices {
            assert!(
                v.position.max_abs_diff(catenoid_closed(v.param)) < 1e-9,
                "{:?}",
                v.param
            );
        }
        assert!(m.path_discrepancy.unwrap() < PATH_TOL);
        let p = d.immersion_at(c(0.5, 0.0)).unwrap();
        assert_eq!(p.position, d.base_value);
        let q = d.immersion_at(c(0.0, -0.3)).unwrap();
        assert!(q.position.max_abs_diff(catenoid_closed(c(0.0, -0.3))) < 1e-10);
        let obj = m.to_obj();
        assert_eq!(obj.lines().filter(|l| l.starts_with("vn ")).count(), m.vertices.len());
    }

    #[test]
    fn disc_mesh_with_center_root() {
        let d = make_weierstrass(
            ParamDomain::disc(0.8).with_grid(8, 12),
            "z/2",
            "z",
            c(0.0, 0.0),
            LVec3::ZERO,
        )
        .unwrap();
        let m = d.integrate_immersion().unwrap();
        assert_eq!(m.vertices.len(), 1 + 8 * 12);
        assert_eq!(m.vertices[0].position, LVec3::ZERO);
        assert!(m.path_discrepancy.unwrap() < PATH_TOL);
        // X3 = Re(z^2/2)
        for v in &m.vertices {
            assert!((v.position.x3 - 0.5 * (v.param * v.param).re).abs() < 1e-10);
        }
    }
}
