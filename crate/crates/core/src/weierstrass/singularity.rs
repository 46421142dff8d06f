use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{IntegrationOptions, WeierstrassData};
use crate::error::{Error, Result};
use crate::lorentz::LVec3;

const BRANCH_TOL: f64 = 1e-9;
const LIGHTLIKE_TOL: f64 = 1e-6;
const COLLAPSE_TOL: f64 = 1e-6;
const LOOP_SAMPLES: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Site {
    Point(Complex64),
    /// The circle `|z| = radius`.
    Loop {
        radius: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum SingularityVerdict {
    BranchPoint,
    LightlikeLoop {
        collapsed: bool,
        conelike: bool,
        covering_degree: i64,
    },
    Regular,
}

/// Classify a boundary point or boundary circle of the parameter domain.
///
/// A point is a branch point when `|g| < 1` and `f = 0` there. A circle
/// is lightlike when `|g| = 1` along it; it collapses when its image is a
/// single point (relative to the size of the sampled surface), and the
/// collapse is conelike when a nearby circle winds once around that point.
pub fn classify_singularity(data: &WeierstrassData, site: Site) -> Result<SingularityVerdict> {
    match site {
        Site::Point(z) => classify_point(data, z),
        Site::Loop { radius } => classify_loop(data, radius),
    }
}

fn classify_point(data: &WeierstrassData, z: Complex64) -> Result<SingularityVerdict> {
    if !data.domain.contains_closed(z) {
        return Err(Error::InvalidArgument(format!("{z} is outside the closed domain")));
    }
    let g = data.g.eval_limit(z)?.norm();
    let f = data.f.eval_limit(z)?.norm();
    if g < 1.0 - BRANCH_TOL {
        Ok(if f < BRANCH_TOL {
            SingularityVerdict::BranchPoint
        } else {
            SingularityVerdict::Regular
        })
    } else {
        Err(Error::Inconclusive(format!(
            "|g| = {g} at {z}: a single point on a lightlike curve cannot be classified"
        )))
    }
}

fn loop_points(radius: f64, n: usize) -> Vec<Complex64> {
    (0..n)
        .map(|k| Complex64::from_polar(radius, TAU * k as f64 / n as f64))
        .collect()
}

fn winding_number(points: &[Complex64]) -> i64 {
    let mut total = 0.0;
    for k in 0..points.len() {
        let a = points[k];
        let b = points[(k + 1) % points.len()];
        let mut d = (b / a).arg();
        if d > PI {
            d -= TAU;
        }
        total += d;
    }
    (total / TAU).round() as i64
}

fn classify_loop(data: &WeierstrassData, radius: f64) -> Result<SingularityVerdict> {
    if !(radius > 0.0) || !data.domain.contains_closed(Complex64::new(radius, 0.0)) {
        return Err(Error::InvalidArgument(format!(
            "circle |z| = {radius} is outside the closed domain"
        )));
    }
    let zs = loop_points(radius, LOOP_SAMPLES);
    let mut moduli = Vec::with_capacity(zs.len());
    for &z in &zs {
        moduli.push(data.g.eval_limit(z)?.norm());
        data.f.eval_limit(z)?;
    }
    let dev = moduli.iter().map(|m| (m - 1.0).abs()).fold(0.0, f64::max);
    let max_mod = moduli.iter().copied().fold(0.0, f64::max);
    if dev >= LIGHTLIKE_TOL {
        return if max_mod < 1.0 - LIGHTLIKE_TOL {
            Ok(SingularityVerdict::Regular)
        } else {
            Err(Error::Inconclusive(format!(
                "|g| on |z| = {radius} ranges up to {max_mod} but deviates from 1 by {dev:e}"
            )))
        };
    }

    let mesh = data.integrate_immersion_with(IntegrationOptions {
        verify_paths: false,
        ..Default::default()
    })?;
    let scale = mesh.scale();
    let image = data.circle_image(radius, LOOP_SAMPLES)?;
    let mut diameter: f64 = 0.0;
    for (i, a) in image.iter().enumerate() {
        for b in &image[i + 1..] {
            diameter = diameter.max((*a - *b).euclid_norm());
        }
    }
    let collapsed = diameter < COLLAPSE_TOL * scale;
    let covering_degree = if collapsed {
        let n = image.len() as f64;
        let center = image.iter().fold(LVec3::ZERO, |s, p| s + *p) * (1.0 / n);
        let inside = radius * 0.95;
        let near = if data.domain.contains_closed(Complex64::new(inside, 0.0)) {
            inside
        } else {
            radius * 1.05
        };
        let ring = data.circle_image(near, LOOP_SAMPLES)?;
        let planar: Vec<Complex64> = ring.iter().map(|p| (*p - center).horizontal()).collect();
        if planar.iter().any(|w| w.norm() == 0.0) {
            return Err(Error::Inconclusive(
                "nearby circle passes through the collapsed point".into(),
            ));
        }
        winding_number(&planar).abs()
    } else {
        0
    };
    Ok(SingularityVerdict::LightlikeLoop {
        collapsed,
        conelike: collapsed && covering_degree == 1,
        covering_degree,
    })
}
