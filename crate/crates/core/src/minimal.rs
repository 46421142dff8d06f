//! Minimal surfaces in R³ through their maximal duals.
//!
//! For minimal data the harmonic conjugate of `Y₃` is `X₃ = Im ∫ φ₃`, and
//! `dX₃ = N₂ dY₁ - N₁ dY₂`. Undualizing the data (`f -> -i f`) gives maximal
//! data whose immersion is `(Y₁, Y₂, X₃)`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{graph_from_immersion, projected_injectivity, starlike_report, StarlikeOptions, StarlikeReport};
use crate::lorentz::{sphere_gauss, LVec3};
use crate::parabolicity::{superharmonic_report, ChartGrid, ChartSpec, SuperharmonicReport};
use crate::quadrature::{EdgeQuadrature, Path};
use crate::weierstrass::{SurfaceKind, SurfaceMesh, WeierstrassData, PERIOD_TOL};

/// Unit normals must have Euclidean length 1 within this.
pub const NORMAL_TOL: f64 = 1e-9;

/// Minimal data with its integrated mesh.
#[derive(Debug, Clone)]
pub struct MinimalImmersion {
    pub data: WeierstrassData,
    pub mesh: SurfaceMesh,
}

impl MinimalImmersion {
    pub fn new(data: WeierstrassData) -> Result<Self> {
        if data.kind != SurfaceKind::Minimal {
            return Err(Error::InvalidArgument("expected minimal data".into()));
        }
        let mesh = data.integrate_immersion()?;
        for v in &mesh.vertices {
            if let Some(n) = v.normal {
                if (n.euclid_norm() - 1.0).abs() > NORMAL_TOL {
                    return Err(Error::DegenerateFrame {
                        z: v.param,
                        lambda_sq: v.lambda_sq,
                    });
                }
            }
        }
        Ok(Self { data, mesh })
    }
}

/// `X₃ + C` at every mesh vertex, with `X₃(p₀) = 0`.
#[derive(Debug, Clone, Serialize)]
pub struct ConjugateField {
    pub values: Vec<f64>,
    pub constant: f64,
    pub exact: bool,
    /// `(radius, Im ∮ φ₃)` on the checked cycles.
    pub period_defects: Vec<(f64, f64)>,
}

/// `Im ∮ φ₃` on the homology circle, if the domain has one.
fn conjugate_periods(data: &WeierstrassData) -> Result<Vec<(f64, f64)>> {
    match data.domain.homology_circle() {
        Some(r) => {
            let p = data.cycle_periods(r)?;
            Ok(vec![(r, p[2].im)])
        }
        None => Ok(Vec::new()),
    }
}

fn require_minimal(data: &WeierstrassData) -> Result<()> {
    if data.kind == SurfaceKind::Minimal {
        Ok(())
    } else {
        Err(Error::InvalidArgument("expected minimal data".into()))
    }
}

/// Conjugate `X₃` on the mesh of `imm`, failing with `NotExact` when
/// `φ₃` has an imaginary period.
pub fn harmonic_conjugate(imm: &MinimalImmersion) -> Result<ConjugateField> {
    let period_defects = conjugate_periods(&imm.data)?;
    for &(radius, period) in &period_defects {
        if period.abs() > PERIOD_TOL {
            return Err(Error::NotExact { radius, period });
        }
    }
    Ok(ConjugateField {
        values: imm.mesh.vertices.iter().map(|v| v.integral[2].im).collect(),
        constant: 0.0,
        exact: true,
        period_defects,
    })
}

/// `X₃(z) = Im ∫_{p₀}^z φ₃`.
pub fn conjugate_at(data: &WeierstrassData, z: Complex64) -> Result<f64> {
    require_minimal(data)?;
    Ok(data.immersion_at(z)?.integral[2].im)
}

/// Maximal data `(Y₁, Y₂, X₃ + c)` with `X₃(p₀) = 0`.
pub fn conjugate_dual(data: &WeierstrassData, c: f64) -> Result<WeierstrassData> {
    require_minimal(data)?;
    let b = data.base_value;
    let dual = data.undualize().with_base(data.basepoint, LVec3::new(b.x1, b.x2, c));
    dual.validate()?;
    Ok(dual)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PsiResidual {
    pub h: f64,
    /// `|ψ(∂_u) - ∂_u X₃|` and `|ψ(∂_v) - ∂_v X₃|` by centered differences.
    pub residual_u: f64,
    pub residual_v: f64,
    pub residual: f64,
    /// Distance between the normal from the exact tangents and the
    /// stereographic image of `g`.
    pub normal_mismatch: f64,
}

const STENCIL_QUAD: EdgeQuadrature = EdgeQuadrature {
    tol: 1e-15,
    max_depth: 40,
};

/// Checks `ψ = N₂ dY₁ - N₁ dY₂ = dX₃` at `z` with spacing `h`. `N` is the
/// normalized cross product of the difference quotients.
pub fn psi_check(data: &WeierstrassData, z: Complex64, h: f64) -> Result<PsiResidual> {
    require_minimal(data)?;
    if !(h > 0.0) {
        return Err(Error::InvalidArgument("step must be positive".into()));
    }
    let mut ints = [[Complex64::new(0.0, 0.0); 3]; 4];
    for (slot, d) in ints.iter_mut().zip(
        [h, -h]
            .iter()
            .flat_map(|&s| [Complex64::new(s, 0.0), Complex64::new(0.0, s)]),
    ) {
        if !data.domain.is_interior(z + d) {
            return Err(Error::InvalidArgument(format!("stencil of {z} leaves the domain")));
        }
        *slot = data.integrate_along(Path::line(z, z + d), STENCIL_QUAD)?.0;
    }
    // ints: +h, +ih, -h, -ih
    let diff = |a: &[Complex64; 3], b: &[Complex64; 3]| {
        let y = LVec3::new((a[0] - b[0]).re, (a[1] - b[1]).re, (a[2] - b[2]).re) * (0.5 / h);
        (y, (a[2] - b[2]).im * 0.5 / h)
    };
    let (yu, x3u) = diff(&ints[0], &ints[2]);
    let (yv, x3v) = diff(&ints[1], &ints[3]);
    let n = yu.cross(yv);
    if n.euclid_norm() == 0.0 {
        return Err(Error::DegenerateFrame { z, lambda_sq: 0.0 });
    }
    let n = n.euclid_normalized();
    let ru = (n.x2 * yu.x1 - n.x1 * yu.x2 - x3u).abs();
    let rv = (n.x2 * yv.x1 - n.x1 * yv.x2 - x3v).abs();
    let fr = data.frame_at(z)?;
    let exact = fr.x_u.cross(fr.x_v).euclid_normalized();
    let normal_mismatch = (exact - sphere_gauss(data.gauss_at(z)?)).euclid_norm();
    Ok(PsiResidual {
        h,
        residual_u: ru,
        residual_v: rv,
        residual: ru.max(rv),
        normal_mismatch,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PsiConvergence {
    pub coarse: PsiResidual,
    pub fine: PsiResidual,
    /// `log2(coarse / fine)`.
    pub order: f64,
}

/// [`psi_check`] at `h` and `h/2`.
pub fn psi_convergence(data: &WeierstrassData, z: Complex64, h: f64) -> Result<PsiConvergence> {
    let coarse = psi_check(data, z, h)?;
    let fine = psi_check(data, z, h / 2.0)?;
    Ok(PsiConvergence {
        coarse,
        fine,
        order: (coarse.residual / fine.residual).log2(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SlackNode {
    pub index: usize,
    pub param: Complex64,
    /// `‖π₀Y‖₀ - ε - |X₃ + C|`.
    pub slack: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundedConjugateReport {
    pub epsilon: f64,
    pub constant: f64,
    pub pass: bool,
    pub worst: SlackNode,
    /// Nodes with negative slack, worst first.
    pub violations: Vec<SlackNode>,
    /// Mean of `‖π₀Y‖₀` per ring, innermost first.
    pub ring_means: Vec<f64>,
    /// Ring means grow toward the outer boundary.
    pub growth: bool,
    /// On PASS: smallest `‖X‖² - ε(2‖π₀Y‖₀ - ε)` over the dual mesh.
    pub dual_margin: Option<f64>,
    pub dual_certified: Option<bool>,
    #[serde(skip)]
    pub dual: Option<WeierstrassData>,
}

const MAX_LISTED: usize = 100;

/// Checks `|X₃ + C| ≤ ‖π₀Y‖₀ - ε` at every mesh vertex with the constant
/// `C` minimizing the worst violation.
pub fn bounded_conjugate_criterion(imm: &MinimalImmersion, epsilon: f64) -> Result<BoundedConjugateReport> {
    if !(epsilon > 0.0) {
        return Err(Error::InvalidArgument("epsilon must be positive".into()));
    }
    let conj = harmonic_conjugate(imm)?;
    let verts = &imm.mesh.vertices;
    let p: Vec<f64> = verts.iter().map(|v| v.position.horizontal_norm()).collect();
    let a = conj
        .values
        .iter()
        .zip(&p)
        .map(|(x, p)| x - p)
        .fold(f64::NEG_INFINITY, f64::max);
    let b = conj
        .values
        .iter()
        .zip(&p)
        .map(|(x, p)| -x - p)
        .fold(f64::NEG_INFINITY, f64::max);
    let c = 0.5 * (b - a);
    let mut nodes: Vec<SlackNode> = verts
        .iter()
        .enumerate()
        .map(|(k, v)| SlackNode {
            index: k,
            param: v.param,
            slack: p[k] - epsilon - (conj.values[k] + c).abs(),
        })
        .collect();
    nodes.sort_by(|x, y| x.slack.total_cmp(&y.slack));
    let worst = nodes[0];
    let pass = worst.slack >= -1e-12;
    let violations: Vec<SlackNode> = nodes
        .iter()
        .take_while(|n| n.slack < -1e-12)
        .take(MAX_LISTED)
        .copied()
        .collect();

    let m = &imm.mesh;
    let offset = usize::from(m.has_center);
    let ring_means: Vec<f64> = (0..m.ring_radii.len())
        .map(|k| (0..m.angular).map(|j| p[offset + k * m.angular + j]).sum::<f64>() / m.angular as f64)
        .collect();
    let growth = ring_means.windows(2).all(|w| w[1] >= w[0]);

    let (dual, dual_margin, dual_certified) = if pass {
        let dual = conjugate_dual(&imm.data, c)?;
        let dm = dual.integrate_immersion()?;
        let margin = dm
            .vertices
            .par_iter()
            .map(|v| {
                let pp = v.position.horizontal_norm();
                v.position.lorentz_norm_sq() - epsilon * (2.0 * pp - epsilon)
            })
            .reduce(|| f64::INFINITY, f64::min);
        let scale = dm.scale().max(1.0);
        (Some(dual), Some(margin), Some(margin >= -1e-9 * scale * scale))
    } else {
        (None, None, None)
    };
    Ok(BoundedConjugateReport {
        epsilon,
        constant: c,
        pass,
        worst,
        violations,
        ring_means,
        growth,
        dual_margin,
        dual_certified,
        dual,
    })
}

#[derive(Debug, Clone, Copy)]
pub struct MinimalPipelineOptions {
    pub starlike: StarlikeOptions,
    pub chart: ChartSpec,
}

impl Default for MinimalPipelineOptions {
    fn default() -> Self {
        Self {
            starlike: StarlikeOptions::default(),
            chart: ChartSpec {
                nx: 41,
                ny: 41,
                mask_threshold: 1e-3,
            },
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct MinimalPipelineReport {
    pub injective: bool,
    pub starlike: StarlikeReport,
    pub superharmonic: SuperharmonicReport,
    pub pass: bool,
}

/// Simply connected minimal graph over a starlike region: build `X₃`, form
/// the maximal `(Y₁, Y₂, X₃)` and run the starlike and superharmonic checks.
pub fn minimal_starlike_pipeline(
    imm: &MinimalImmersion,
    opts: &MinimalPipelineOptions,
) -> Result<MinimalPipelineReport> {
    if !imm.data.domain.is_simply_connected() {
        return Err(Error::Precondition("the domain is not simply connected".into()));
    }
    let inj = projected_injectivity(&imm.mesh);
    if !inj.injective {
        return Err(Error::GraphExtraction(format!(
            "projected mesh is not injective: {} overlapping cells, first {:?}",
            inj.overlapping.len(),
            &inj.overlapping[..inj.overlapping.len().min(10)]
        )));
    }
    harmonic_conjugate(imm)?;
    let dual = conjugate_dual(&imm.data, 0.0)?;
    let dual_mesh = dual.integrate_immersion()?;
    let graph = graph_from_immersion(&dual, &dual_mesh, dual.basepoint)?;
    let mut so = opts.starlike;
    if graph.region.is_bounded() {
        so.delta = so.delta.min(0.5 * graph.region.min_extent());
    }
    let starlike = starlike_report(&graph, &so)?;
    let grid = ChartGrid::build(&dual, &opts.chart)?;
    let superharmonic = superharmonic_report(&grid)?;
    Ok(MinimalPipelineReport {
        injective: true,
        pass: starlike.pass && superharmonic.closed_nonpositive,
        starlike,
        superharmonic,
    })
}
