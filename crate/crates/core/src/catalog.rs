//! Built-in surfaces with closed-form immersions.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lorentz::LVec3;
use crate::parabolicity::{ExhaustionSpec, Verdict};
use crate::weierstrass::{ParamDomain, SingularityVerdict, Site, SurfaceKind, WeierstrassData};

pub const NAMES: [&str; 4] = ["plane", "lorentzian-catenoid", "enneper", "minimal-catenoid"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ExpectedOutcomes {
    pub starlike: Option<bool>,
    pub superharmonic: Option<bool>,
    pub parabolicity: Option<Verdict>,
    /// Whether `X₃` exists (minimal data only).
    pub conjugate_exact: Option<bool>,
}

#[derive(Debug, Clone)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub kind: SurfaceKind,
    pub data: WeierstrassData,
    pub reference: Option<fn(Complex64) -> LVec3>,
    pub singularities: Vec<(Site, SingularityVerdict)>,
    /// Parameter whose image is the center of the projected graph.
    pub graph_center: Option<Complex64>,
    pub exhaustion: Option<ExhaustionSpec>,
    pub expected: ExpectedOutcomes,
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// `X = Re(Φ z)` for `g = 0.2`, `f = 1`.
pub fn plane_reference(z: Complex64) -> LVec3 {
    LVec3::new(-2.4 * z.im, -2.6 * z.re, z.re)
}

pub fn catenoid_reference(z: Complex64) -> LVec3 {
    let (r, t) = z.to_polar();
    let a = 0.5 * (r - 1.0 / r);
    LVec3::new(a * t.sin(), -a * t.cos(), r.ln())
}

pub fn enneper_reference(z: Complex64) -> LVec3 {
    let z3 = z * z * z / 3.0;
    LVec3::new(
        (0.5 * (z - z3)).re,
        (Complex64::i() * 0.5 * (z + z3)).re,
        (0.5 * z * z).re,
    )
}

pub fn minimal_catenoid_reference(z: Complex64) -> LVec3 {
    let w = z.inv();
    LVec3::new((-0.5 * (w + z)).re, (Complex64::i() * 0.5 * (z - w)).re, z.norm().ln())
}

fn build(
    kind: SurfaceKind,
    domain: ParamDomain,
    g: &str,
    f: &str,
    p0: Complex64,
    reference: fn(Complex64) -> LVec3,
) -> Result<WeierstrassData> {
    WeierstrassData::from_text(kind, domain, g, f, p0, reference(p0))
}

pub fn get_catalog_surface(name: &str) -> Result<CatalogEntry> {
    let none = ExpectedOutcomes {
        starlike: None,
        superharmonic: None,
        parabolicity: None,
        conjugate_exact: None,
    };
    Ok(match name {
        "plane" => CatalogEntry {
            name: "plane",
            kind: SurfaceKind::Maximal,
            data: build(
                SurfaceKind::Maximal,
                ParamDomain::plane(),
                "0.2",
                "1",
                c(0.0, 0.0),
                plane_reference,
            )?,
            reference: Some(plane_reference),
            singularities: Vec::new(),
            graph_center: Some(c(0.0, 0.0)),
            exhaustion: Some(ExhaustionSpec::new(1.0, vec![10.0, 100.0, 1e3, 1e4], 2.0)),
            expected: ExpectedOutcomes {
                starlike: Some(true),
                superharmonic: Some(true),
                parabolicity: Some(Verdict::ParabolicEvidence),
                ..none
            },
        },
        "lorentzian-catenoid" => CatalogEntry {
            name: "lorentzian-catenoid",
            kind: SurfaceKind::Maximal,
            data: build(
                SurfaceKind::Maximal,
                ParamDomain::annulus(0.05, 1.0, true),
                "z",
                "1/z",
                c(0.5, 0.0),
                catenoid_reference,
            )?,
            reference: Some(catenoid_reference),
            singularities: vec![(
                Site::Loop { radius: 1.0 },
                SingularityVerdict::LightlikeLoop {
                    collapsed: true,
                    conelike: true,
                    covering_degree: 1,
                },
            )],
            graph_center: Some(c(1.0, 0.0)),
            // The collapsed loop is the fixed inner boundary; stages shrink
            // toward the end at z = 0.
            exhaustion: Some(ExhaustionSpec::new(1.0, vec![0.5, 0.25, 0.1, 0.05], 0.9)),
            expected: ExpectedOutcomes {
                starlike: Some(true),
                superharmonic: Some(true),
                parabolicity: Some(Verdict::ParabolicEvidence),
                ..none
            },
        },
        "enneper" => CatalogEntry {
            name: "enneper",
            kind: SurfaceKind::Minimal,
            data: build(
                SurfaceKind::Minimal,
                ParamDomain::disc(0.5),
                "z",
                "z",
                c(0.0, 0.0),
                enneper_reference,
            )?,
            reference: Some(enneper_reference),
            singularities: Vec::new(),
            graph_center: Some(c(0.0, 0.0)),
            exhaustion: None,
            expected: ExpectedOutcomes {
                conjugate_exact: Some(true),
                ..none
            },
        },
        "minimal-catenoid" => CatalogEntry {
            name: "minimal-catenoid",
            kind: SurfaceKind::Minimal,
            data: build(
                SurfaceKind::Minimal,
                ParamDomain::annulus(0.2, 5.0, false),
                "z",
                "1/z",
                c(1.0, 0.0),
                minimal_catenoid_reference,
            )?,
            reference: Some(minimal_catenoid_reference),
            singularities: Vec::new(),
            graph_center: None,
            exhaustion: None,
            expected: ExpectedOutcomes {
                conjugate_exact: Some(false),
                ..none
            },
        },
        other => return Err(Error::UnknownSurface(other.to_string())),
    })
}
