//! Superharmonicity of `h = log ‖X‖²` on maximal surfaces and discrete
//! harmonic measure on exhaustions of the parameter domain.
//!
//! Both work on a uniform grid in a chart `w` of the parameter domain:
//! `z = w` on discs and planes, `z = e^w` on annuli and the punctured plane.
//! Because the chart is conformal, the flat Laplacian in `z` is the flat
//! Laplacian in `w` divided by `|dz/dw|²`, and the intrinsic Laplacian of the
//! surface is the flat one divided by `λ²`, so signs agree in all three.

mod dirichlet;
mod harmonic;

use std::collections::VecDeque;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

pub use dirichlet::{solve_dirichlet, DirichletSolution, GridProblem, NodeRole, SolverOptions};
pub use harmonic::{
    annulus_harmonic_measure, harmonic_measure_sequence, harmonic_measure_sequence_with, ExhaustionSpec,
    ParabolicityReport, StageResult, Verdict,
};

use crate::error::{Error, Result};
use crate::lorentz::LVec3;
use crate::quadrature::{EdgeQuadrature, Path};
use crate::weierstrass::{DomainShape, SurfaceKind, WeierstrassData};

/// Default mask level, the compact core `{‖X‖² ≤ 2}` being excluded.
pub const DEFAULT_MASK: f64 = 2.0;
/// Largest tolerated positive value of the closed-form Laplacian.
pub const CLOSED_FORM_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ChartKind {
    /// `z = w` on a square.
    Rectangular,
    /// `z = e^w`, periodic in `Im w`.
    LogPolar,
}

#[derive(Debug, Clone, Copy)]
pub struct ChartSpec {
    pub nx: usize,
    pub ny: usize,
    pub mask_threshold: f64,
}

impl Default for ChartSpec {
    fn default() -> Self {
        Self {
            nx: 61,
            ny: 128,
            mask_threshold: DEFAULT_MASK,
        }
    }
}

impl ChartSpec {
    /// The grid with every spacing halved; nodes of `self` keep their
    /// positions at even indices.
    pub fn refined(&self, kind: ChartKind) -> Self {
        Self {
            nx: 2 * (self.nx - 1) + 1,
            ny: match kind {
                ChartKind::LogPolar => 2 * self.ny,
                ChartKind::Rectangular => 2 * (self.ny - 1) + 1,
            },
            mask_threshold: self.mask_threshold,
        }
    }
}

/// Maximal immersion sampled on a uniform chart grid. Node `(i, j)` sits at
/// `w = w0 + i hx + i j hy` and has index `i * ny + j`.
#[derive(Debug, Clone)]
pub struct ChartGrid {
    pub kind: ChartKind,
    pub nx: usize,
    pub ny: usize,
    pub w0: Complex64,
    pub hx: f64,
    pub hy: f64,
    pub periodic: bool,
    pub params: Vec<Complex64>,
    /// `None` off the domain or where the integration tree did not reach.
    pub x: Vec<Option<LVec3>>,
    pub lambda_sq: Vec<f64>,
    pub normal: Vec<Option<LVec3>>,
    pub mask: Vec<bool>,
    pub mask_threshold: f64,
}

pub fn chart_kind(shape: &DomainShape) -> ChartKind {
    match shape {
        DomainShape::Disc { .. } | DomainShape::Plane => ChartKind::Rectangular,
        DomainShape::Annulus { .. } | DomainShape::PuncturedPlane => ChartKind::LogPolar,
    }
}

impl ChartGrid {
    pub fn build(data: &WeierstrassData, spec: &ChartSpec) -> Result<Self> {
        if data.kind != SurfaceKind::Maximal {
            return Err(Error::InvalidArgument("chart grids need maximal data".into()));
        }
        if spec.nx < 3 || spec.ny < 3 {
            return Err(Error::InvalidArgument("chart grids need at least 3x3 nodes".into()));
        }
        if !(spec.mask_threshold > 0.0) {
            return Err(Error::InvalidArgument("mask threshold must be positive".into()));
        }
        let dom = &data.domain;
        let kind = chart_kind(&dom.shape);
        let (w0, hx, hy, periodic) = match dom.shape {
            DomainShape::Disc { radius } => square(radius, spec),
            DomainShape::Plane => square(dom.grid.extent, spec),
            DomainShape::Annulus { r_in, r_out, .. } => log_polar(r_in, r_out, spec),
            DomainShape::PuncturedPlane => log_polar(dom.grid.inner, dom.grid.extent, spec),
        };
        let (nx, ny) = (spec.nx, spec.ny);
        let w_at = |i: usize, j: usize| w0 + Complex64::new(hx * i as f64, hy * j as f64);
        let to_z = |w: Complex64| match kind {
            ChartKind::Rectangular => w,
            ChartKind::LogPolar => w.exp(),
        };
        let params: Vec<Complex64> = (0..nx * ny).map(|k| to_z(w_at(k / ny, k % ny))).collect();
        let inside: Vec<bool> = params.iter().map(|&z| dom.is_interior(z)).collect();

        let anchor = (0..params.len())
            .filter(|&k| inside[k])
            .min_by(|&a, &b| {
                (params[a] - data.basepoint)
                    .norm()
                    .total_cmp(&(params[b] - data.basepoint).norm())
            })
            .ok_or(Error::MaskEmpty)?;
        let q = EdgeQuadrature {
            tol: 1e-13,
            ..Default::default()
        };
        let mut x: Vec<Option<LVec3>> = vec![None; params.len()];
        x[anchor] = Some(data.immersion_at_with(params[anchor], q)?.position);

        // Breadth-first layers of a spanning tree over grid edges.
        let neighbors = |k: usize| -> Vec<(usize, Complex64)> {
            let (i, j) = (k / ny, k % ny);
            let mut out = Vec::with_capacity(4);
            if i > 0 {
                out.push(((i - 1) * ny + j, Complex64::new(-hx, 0.0)));
            }
            if i + 1 < nx {
                out.push(((i + 1) * ny + j, Complex64::new(hx, 0.0)));
            }
            if j > 0 || periodic {
                out.push((i * ny + (j + ny - 1) % ny, Complex64::new(0.0, -hy)));
            }
            if j + 1 < ny || periodic {
                out.push((i * ny + (j + 1) % ny, Complex64::new(0.0, hy)));
            }
            out
        };
        let mut seen = vec![false; params.len()];
        seen[anchor] = true;
        let mut frontier = VecDeque::from([anchor]);
        let mut layers: Vec<Vec<(usize, usize, Complex64)>> = Vec::new();
        while !frontier.is_empty() {
            let mut layer = Vec::new();
            for _ in 0..frontier.len() {
                let k = frontier.pop_front().expect("non-empty frontier");
                for (n, dw) in neighbors(k) {
                    if inside[n] && !seen[n] {
                        seen[n] = true;
                        layer.push((k, n, dw));
                        frontier.push_back(n);
                    }
                }
            }
            if !layer.is_empty() {
                layers.push(layer);
            }
        }
        for layer in layers {
            let done = &x;
            let vals: Vec<(usize, LVec3)> = layer
                .par_iter()
                .map(|&(parent, child, dw)| {
                    let w = w_at(parent / ny, parent % ny);
                    let path = match kind {
                        ChartKind::Rectangular => Path::line(w, w + dw),
                        ChartKind::LogPolar => Path::Exp { from: w, to: w + dw },
                    };
                    let (v, _) = data.integrate_along(path, q)?;
                    let base = done[parent].expect("parent integrated in an earlier layer");
                    Ok((child, base + LVec3::new(v[0].re, v[1].re, v[2].re)))
                })
                .collect::<Result<_>>()?;
            for (k, p) in vals {
                x[k] = Some(p);
            }
        }

        let frames: Vec<(f64, Option<LVec3>)> = params
            .par_iter()
            .zip(&x)
            .map(|(&z, p)| match p {
                Some(_) => match data.frame_at(z) {
                    Ok(fr) => (fr.lambda_sq, Some(fr.normal)),
                    Err(_) => (f64::NAN, None),
                },
                None => (f64::NAN, None),
            })
            .collect();
        let (lambda_sq, normal): (Vec<f64>, Vec<Option<LVec3>>) = frames.into_iter().unzip();
        let mask = x
            .iter()
            .zip(&normal)
            .map(|(p, n)| match (p, n) {
                (Some(p), Some(_)) => {
                    let v = p.lorentz_norm_sq();
                    v > 0.0 && v >= spec.mask_threshold
                }
                _ => false,
            })
            .collect();
        Ok(Self {
            kind,
            nx,
            ny,
            w0,
            hx,
            hy,
            periodic,
            params,
            x,
            lambda_sq,
            normal,
            mask,
            mask_threshold: spec.mask_threshold,
        })
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.ny + j
    }

    pub fn masked_count(&self) -> usize {
        self.mask.iter().filter(|&&m| m).count()
    }

    /// Largest `‖X‖²` over the integrated nodes.
    pub fn max_norm_sq(&self) -> f64 {
        self.x
            .iter()
            .flatten()
            .map(|p| p.lorentz_norm_sq())
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Indices of the four stencil neighbors, if all exist.
    fn stencil(&self, k: usize) -> Option<[usize; 4]> {
        let (i, j) = (k / self.ny, k % self.ny);
        if i == 0 || i + 1 == self.nx {
            return None;
        }
        let (jm, jp) = if self.periodic {
            ((j + self.ny - 1) % self.ny, (j + 1) % self.ny)
        } else if j == 0 || j + 1 == self.ny {
            return None;
        } else {
            (j - 1, j + 1)
        };
        Some([
            self.index(i - 1, j),
            self.index(i + 1, j),
            self.index(i, jm),
            self.index(i, jp),
        ])
    }

    /// `|dz/dw|²` at node `k`.
    fn chart_factor(&self, k: usize) -> f64 {
        match self.kind {
            ChartKind::Rectangular => 1.0,
            ChartKind::LogPolar => self.params[k].norm_sqr(),
        }
    }

    /// Tangent decomposition residuals at node `k`.
    pub fn tangent_residual(&self, data: &WeierstrassData, k: usize) -> Result<TangentResidual> {
        let x = self.x[k].ok_or_else(|| Error::InvalidArgument(format!("node {k} has no surface point")))?;
        tangent_residual_at(data, self.params[k], x)
    }
}

fn square(r: f64, spec: &ChartSpec) -> (Complex64, f64, f64, bool) {
    (
        Complex64::new(-r, -r),
        2.0 * r / (spec.nx - 1) as f64,
        2.0 * r / (spec.ny - 1) as f64,
        false,
    )
}

fn log_polar(lo: f64, hi: f64, spec: &ChartSpec) -> (Complex64, f64, f64, bool) {
    let (a, b) = (lo.ln(), hi.ln());
    (
        Complex64::new(a, 0.0),
        (b - a) / (spec.nx - 1) as f64,
        std::f64::consts::TAU / spec.ny as f64,
        true,
    )
}

/// `Δh = -4 λ² ⟨X, N₀⟩² / ⟨X, X⟩²`, the flat Laplacian of `log ‖X‖²`.
pub fn closed_form_laplacian(lambda_sq: f64, x: LVec3, n: LVec3) -> f64 {
    let xn = x.minkowski(n);
    let xx = x.lorentz_norm_sq();
    -4.0 * lambda_sq * xn * xn / (xx * xx)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NodeLaplacian {
    pub index: usize,
    pub param: Complex64,
    pub norm_sq: f64,
    pub fd: f64,
    pub closed: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SuperharmonicReport {
    pub kind: ChartKind,
    pub hx: f64,
    pub hy: f64,
    pub mask_threshold: f64,
    pub masked: usize,
    /// Masked nodes without a complete masked stencil.
    pub skipped: usize,
    pub nodes: Vec<NodeLaplacian>,
    pub max_closed: f64,
    /// `Δh_closed ≤ 0` at every node (up to the hard tolerance).
    pub closed_nonpositive: bool,
    pub max_abs_residual: f64,
}

/// Five-point Laplacian of `log ‖X‖²` against the closed form at every
/// masked node whose stencil is masked.
pub fn superharmonic_report(grid: &ChartGrid) -> Result<SuperharmonicReport> {
    let masked = grid.masked_count();
    if masked == 0 {
        return Err(Error::MaskEmpty);
    }
    let h = |k: usize| grid.x[k].expect("masked node").lorentz_norm_sq().ln();
    let nodes: Vec<NodeLaplacian> = (0..grid.params.len())
        .into_par_iter()
        .filter(|&k| grid.mask[k])
        .filter_map(|k| {
            let st = grid.stencil(k)?;
            if !st.iter().all(|&n| grid.mask[n]) {
                return None;
            }
            let hc = h(k);
            let lap_w = (h(st[0]) - 2.0 * hc + h(st[1])) / (grid.hx * grid.hx)
                + (h(st[2]) - 2.0 * hc + h(st[3])) / (grid.hy * grid.hy);
            let fd = lap_w / grid.chart_factor(k);
            let x = grid.x[k].expect("masked node");
            let closed = closed_form_laplacian(grid.lambda_sq[k], x, grid.normal[k].expect("masked node"));
            Some(NodeLaplacian {
                index: k,
                param: grid.params[k],
                norm_sq: x.lorentz_norm_sq(),
                fd,
                closed,
                residual: fd - closed,
            })
        })
        .collect();
    if nodes.is_empty() {
        return Err(Error::StencilCrossesMask);
    }
    let max_closed = nodes.iter().map(|n| n.closed).fold(f64::NEG_INFINITY, f64::max);
    Ok(SuperharmonicReport {
        kind: grid.kind,
        hx: grid.hx,
        hy: grid.hy,
        mask_threshold: grid.mask_threshold,
        masked,
        skipped: masked - nodes.len(),
        max_closed,
        closed_nonpositive: max_closed <= CLOSED_FORM_TOL,
        max_abs_residual: nodes.iter().map(|n| n.residual.abs()).fold(0.0, f64::max),
        nodes,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceLevel {
    pub nx: usize,
    pub ny: usize,
    pub hx: f64,
    pub hy: f64,
    /// Largest `|Δh_fd - Δh_closed|` over the nodes of the coarsest level.
    pub max_error: f64,
    pub max_closed: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceReport {
    pub levels: Vec<ConvergenceLevel>,
    /// `log2` of consecutive error ratios.
    pub orders: Vec<f64>,
    pub common_nodes: usize,
    pub closed_nonpositive: bool,
    pub pass: bool,
}

/// Below this the finite-difference error is at rounding level and the
/// observed order is not meaningful.
const ERROR_FLOOR: f64 = 1e-8;

/// Runs [`superharmonic_report`] on `levels` successively halved grids and
/// measures the order of the finite-difference error at the nodes of the
/// coarsest grid.
pub fn superharmonic_convergence(data: &WeierstrassData, spec: &ChartSpec, levels: usize) -> Result<ConvergenceReport> {
    if levels < 2 {
        return Err(Error::InvalidArgument("convergence needs at least two levels".into()));
    }
    let kind = chart_kind(&data.domain.shape);
    let mut specs = vec![*spec];
    for _ in 1..levels {
        let last = *specs.last().expect("non-empty");
        specs.push(last.refined(kind));
    }
    let reports: Vec<(ChartGrid, SuperharmonicReport)> = specs
        .iter()
        .map(|s| {
            let g = ChartGrid::build(data, s)?;
            let r = superharmonic_report(&g)?;
            Ok((g, r))
        })
        .collect::<Result<_>>()?;

    let coarse = &reports[0];
    let lookups: Vec<std::collections::HashMap<usize, f64>> = reports
        .iter()
        .map(|(_, r)| r.nodes.iter().map(|n| (n.index, n.residual)).collect())
        .collect();
    // Coarse nodes present at every level.
    let mut common = Vec::new();
    for n in &coarse.1.nodes {
        let (i, j) = (n.index / coarse.0.ny, n.index % coarse.0.ny);
        let mut idx = Vec::with_capacity(levels);
        for (l, (g, _)) in reports.iter().enumerate() {
            let f = 1usize << l;
            let k = g.index(i * f, j * f);
            if lookups[l].contains_key(&k) {
                idx.push(k);
            }
        }
        if idx.len() == levels {
            common.push(idx);
        }
    }
    if common.is_empty() {
        return Err(Error::StencilCrossesMask);
    }
    let levels_out: Vec<ConvergenceLevel> = reports
        .iter()
        .enumerate()
        .map(|(l, (g, r))| ConvergenceLevel {
            nx: g.nx,
            ny: g.ny,
            hx: g.hx,
            hy: g.hy,
            max_error: common.iter().map(|idx| lookups[l][&idx[l]].abs()).fold(0.0, f64::max),
            max_closed: r.max_closed,
        })
        .collect();
    let orders: Vec<f64> = levels_out
        .windows(2)
        .map(|w| (w[0].max_error / w[1].max_error).log2())
        .collect();
    let closed_nonpositive = reports.iter().all(|(_, r)| r.closed_nonpositive);
    let finest = levels_out.last().expect("non-empty").max_error;
    let pass = closed_nonpositive && (finest <= ERROR_FLOOR || orders.iter().all(|&o| o >= 1.8));
    Ok(ConvergenceReport {
        levels: levels_out,
        orders,
        common_nodes: common.len(),
        closed_nonpositive,
        pass,
    })
}

/// Closed-form `Δh` at a parameter point, with `X` integrated from the
/// basepoint.
pub fn laplacian_closed_at(data: &WeierstrassData, z: Complex64) -> Result<f64> {
    let x = data.immersion_at(z)?.position;
    let fr = data.frame_at(z)?;
    Ok(closed_form_laplacian(fr.lambda_sq, x, fr.normal))
}

/// Five-point flat Laplacian of `log ‖X‖²` at `z` with spacing `h`, the
/// stencil points being reached by short segments from `z`.
pub fn laplacian_fd_at(data: &WeierstrassData, z: Complex64, h: f64) -> Result<f64> {
    let q = EdgeQuadrature {
        tol: 1e-14,
        ..Default::default()
    };
    let x = data.immersion_at(z)?.position;
    let hval = |p: LVec3| p.lorentz_norm_sq().ln();
    let mut sum = -4.0 * hval(x);
    for d in [
        Complex64::new(h, 0.0),
        Complex64::new(-h, 0.0),
        Complex64::new(0.0, h),
        Complex64::new(0.0, -h),
    ] {
        let (v, _) = data.integrate_along(Path::line(z, z + d), q)?;
        sum += hval(x + LVec3::new(v[0].re, v[1].re, v[2].re));
    }
    Ok(sum / (h * h))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TangentResidual {
    /// Euclidean size of `X - (λ⁻²(⟨X,X_u⟩X_u + ⟨X,X_v⟩X_v) - ⟨X,N₀⟩N₀)`
    /// relative to the size of its terms.
    pub vector: f64,
    /// `⟨X,X⟩ - (λ⁻²(⟨X,X_u⟩² + ⟨X,X_v⟩²) - ⟨X,N₀⟩²)` relative to the size
    /// of its terms.
    pub scalar: f64,
}

/// Decomposition of the position vector in the frame `(X_u, X_v, N₀)`.
pub fn tangent_residual_at(data: &WeierstrassData, z: Complex64, x: LVec3) -> Result<TangentResidual> {
    if data.kind != SurfaceKind::Maximal {
        return Err(Error::InvalidArgument(
            "tangent decomposition needs maximal data".into(),
        ));
    }
    let fr = data.frame_at(z)?;
    let (a, b, c) = (x.minkowski(fr.x_u), x.minkowski(fr.x_v), x.minkowski(fr.normal));
    let inv = 1.0 / fr.lambda_sq;
    let tu = fr.x_u * (inv * a);
    let tv = fr.x_v * (inv * b);
    let tn = fr.normal * (-c);
    let rebuilt = tu + tv + tn;
    let vsize = x.euclid_norm() + tu.euclid_norm() + tv.euclid_norm() + tn.euclid_norm();
    let svec = inv * (a * a + b * b) - c * c;
    let ssize = x.lorentz_norm_sq().abs() + inv * (a * a + b * b) + c * c;
    Ok(TangentResidual {
        vector: if vsize > 0.0 {
            (x - rebuilt).euclid_norm() / vsize
        } else {
            0.0
        },
        scalar: if ssize > 0.0 {
            (x.lorentz_norm_sq() - svec).abs() / ssize
        } else {
            0.0
        },
    })
}

/// Tangent residuals at a point, integrating `X` from the basepoint.
pub fn tangent_decomposition_check(data: &WeierstrassData, z: Complex64) -> Result<TangentResidual> {
    let x = data.immersion_at(z)?.position;
    tangent_residual_at(data, z, x)
}
