use std::f64::consts::TAU;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::dirichlet::{solve_dirichlet, GridProblem, NodeRole, SolverOptions};
use crate::error::{Error, Result};

/// Extrapolated harmonic measure at or below this is parabolic evidence.
pub const PARABOLIC_LIMIT: f64 = 1e-3;
/// A limit this many solver tolerances above zero is hyperbolic evidence.
pub const HYPERBOLIC_FACTOR: f64 = 10.0;

/// Concentric exhaustion of a circular domain: the harmonic function is 0
/// on `|z| = inner_radius` and 1 on `|z| = stage`, evaluated at `|z| = probe`.
/// Stages may grow outward (`stage > inner`) or shrink inward.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExhaustionSpec {
    pub inner_radius: f64,
    pub stage_radii: Vec<f64>,
    /// Radius the stages approach; `0` or infinity when omitted.
    #[serde(default)]
    pub limit_radius: Option<f64>,
    pub probe: f64,
    #[serde(default = "default_nodes")]
    pub radial: usize,
    #[serde(default = "default_nodes")]
    pub angular: usize,
}

fn default_nodes() -> usize {
    256
}

impl ExhaustionSpec {
    pub fn new(inner_radius: f64, stage_radii: Vec<f64>, probe: f64) -> Self {
        Self {
            inner_radius,
            stage_radii,
            limit_radius: None,
            probe,
            radial: 256,
            angular: 256,
        }
    }

    pub fn with_limit(mut self, limit: f64) -> Self {
        self.limit_radius = Some(limit);
        self
    }

    pub fn with_grid(mut self, radial: usize, angular: usize) -> Self {
        self.radial = radial;
        self.angular = angular;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    ParabolicEvidence,
    HyperbolicEvidence,
    Inconclusive,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::ParabolicEvidence => "parabolic-evidence",
            Verdict::HyperbolicEvidence => "hyperbolic-evidence",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct StageResult {
    pub radius: f64,
    pub omega: f64,
    pub iterations: usize,
    pub residual: f64,
    pub max_principle: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ParabolicityReport {
    pub inner_radius: f64,
    pub probe: f64,
    pub stages: Vec<StageResult>,
    /// Least-squares fit `ω ≈ intercept + slope / |log(R / r₀)|`.
    pub slope: f64,
    pub intercept: f64,
    /// Fit evaluated at the limit radius.
    pub extrapolated: f64,
    /// `ω_k` non-increasing within solver tolerance.
    pub monotone: bool,
    pub max_principle: bool,
    pub solver_tol: f64,
    pub verdict: Verdict,
}

/// Harmonic measure at `probe` of the circle `|z| = outer` relative to
/// `|z| = inner`, on a grid uniform in `log |z|` and the angle.
pub fn annulus_harmonic_measure(
    inner: f64,
    outer: f64,
    probe: f64,
    radial: usize,
    angular: usize,
    opts: SolverOptions,
) -> Result<StageResult> {
    if !(inner > 0.0 && outer > 0.0 && probe > 0.0) || !(inner.is_finite() && outer.is_finite()) {
        return Err(Error::InvalidArgument("radii must be positive and finite".into()));
    }
    if radial < 3 || angular < 3 {
        return Err(Error::InvalidArgument(
            "harmonic measure grids need at least 3x3 nodes".into(),
        ));
    }
    let len = (outer / inner).ln().abs();
    let sp = (probe / inner).ln();
    if len == 0.0 || sp * (outer / inner).ln() <= 0.0 || sp.abs() >= len {
        return Err(Error::InvalidArgument(format!(
            "probe {probe} is not strictly between radii {inner} and {outer}"
        )));
    }
    let sp = sp.abs();
    let hx = len / (radial - 1) as f64;
    let roles = (0..radial * angular)
        .map(|k| match k / angular {
            0 => NodeRole::Fixed(0.0),
            i if i + 1 == radial => NodeRole::Fixed(1.0),
            _ => NodeRole::Unknown,
        })
        .collect();
    let problem = GridProblem {
        nx: radial,
        ny: angular,
        hx,
        hy: TAU / angular as f64,
        periodic_y: true,
        roles,
    };
    let sol = solve_dirichlet(&problem, opts)?;
    let i = ((sp / hx).floor() as usize).min(radial - 2);
    let t = sp / hx - i as f64;
    let omega = (1.0 - t) * sol.values[i * angular] + t * sol.values[(i + 1) * angular];
    Ok(StageResult {
        radius: outer,
        omega,
        iterations: sol.iterations,
        residual: sol.residual,
        max_principle: sol.max_principle,
    })
}

/// Harmonic measure for each stage of a nested exhaustion, a linear trend in
/// `1 / |log(R / r₀)|` and its value at the limit radius.
pub fn harmonic_measure_sequence(spec: &ExhaustionSpec) -> Result<ParabolicityReport> {
    harmonic_measure_sequence_with(spec, SolverOptions::default())
}

pub fn harmonic_measure_sequence_with(spec: &ExhaustionSpec, opts: SolverOptions) -> Result<ParabolicityReport> {
    let r0 = spec.inner_radius;
    if spec.stage_radii.len() < 3 {
        return Err(Error::InvalidArgument("an exhaustion needs at least 3 stages".into()));
    }
    if !(r0 > 0.0 && r0.is_finite()) {
        return Err(Error::InvalidArgument("inner radius must be positive".into()));
    }
    let outward = spec.stage_radii[0] > r0;
    let dist = |r: f64| (r / r0).ln().abs();
    for w in spec.stage_radii.windows(2) {
        if dist(w[1]) < dist(w[0]) || (w[1] > r0) != outward {
            return Err(Error::InvalidArgument("exhaustion stages are not nested".into()));
        }
    }
    let last = *spec.stage_radii.last().expect("at least 3 stages");
    let x_inf = match spec.limit_radius {
        None => 0.0,
        Some(l) if l == 0.0 || l.is_infinite() => 0.0,
        Some(l) => {
            if !(l > 0.0) || (l > r0) != outward || dist(l) < dist(last) {
                return Err(Error::InvalidArgument(format!(
                    "limit radius {l} is not beyond the stages"
                )));
            }
            1.0 / dist(l)
        }
    };

    let stages: Vec<StageResult> = spec
        .stage_radii
        .par_iter()
        .map(|&r| annulus_harmonic_measure(r0, r, spec.probe, spec.radial, spec.angular, opts))
        .collect::<Result<_>>()?;

    let xs: Vec<f64> = spec.stage_radii.iter().map(|&r| 1.0 / dist(r)).collect();
    let ws: Vec<f64> = stages.iter().map(|s| s.omega).collect();
    let n = xs.len() as f64;
    let (mx, mw) = (xs.iter().sum::<f64>() / n, ws.iter().sum::<f64>() / n);
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxw: f64 = xs.iter().zip(&ws).map(|(x, w)| (x - mx) * (w - mw)).sum();
    let degenerate = spec.stage_radii.windows(2).any(|w| dist(w[0]) == dist(w[1]));
    let (slope, intercept) = if sxx > 0.0 {
        (sxw / sxx, mw - sxw / sxx * mx)
    } else {
        (0.0, mw)
    };
    let extrapolated = intercept + slope * x_inf;

    let slack = 10.0 * opts.tol;
    let monotone = ws.windows(2).all(|w| w[1] <= w[0] + slack);
    let steps: Vec<f64> = ws.windows(2).map(|w| (w[0] - w[1]).abs()).collect();
    let settling = steps.windows(2).all(|s| s[1] <= s[0] + slack);
    let verdict = if degenerate {
        Verdict::Inconclusive
    } else if monotone && extrapolated <= PARABOLIC_LIMIT {
        Verdict::ParabolicEvidence
    } else if monotone && settling && extrapolated >= HYPERBOLIC_FACTOR * opts.tol {
        Verdict::HyperbolicEvidence
    } else {
        Verdict::Inconclusive
    };
    Ok(ParabolicityReport {
        inner_radius: r0,
        probe: spec.probe,
        max_principle: stages.iter().all(|s| s.max_principle),
        stages,
        slope,
        intercept,
        extrapolated,
        monotone,
        solver_tol: opts.tol,
        verdict,
    })
}
