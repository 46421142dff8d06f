use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NodeRole {
    Unknown,
    Fixed(f64),
    Outside,
}

/// Five-point Dirichlet problem on a uniform `nx × ny` grid, node `(i, j)`
/// at index `i * ny + j`, optionally periodic in `j`.
#[derive(Debug, Clone)]
pub struct GridProblem {
    pub nx: usize,
    pub ny: usize,
    pub hx: f64,
    pub hy: f64,
    pub periodic_y: bool,
    pub roles: Vec<NodeRole>,
}

#[derive(Debug, Clone, Copy)]
pub struct SolverOptions {
    /// Relative residual `‖b - Au‖ / ‖b‖`.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iter: 50_000,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DirichletSolution {
    /// Values at every node; `NaN` outside.
    pub values: Vec<f64>,
    pub iterations: usize,
    pub residual: f64,
    /// Unknowns stay within the range of the boundary data.
    pub max_principle: bool,
}

struct Operator {
    /// Unknown index of each grid node.
    slot: Vec<Option<usize>>,
    /// Grid node of each unknown.
    node: Vec<usize>,
    /// For each unknown, its unknown neighbors with weights.
    links: Vec<Vec<(usize, f64)>>,
    diag: f64,
}

impl Operator {
    fn apply(&self, u: &[f64], out: &mut [f64]) {
        out.par_iter_mut().enumerate().for_each(|(k, o)| {
            *o = self.diag * u[k] - self.links[k].iter().map(|&(n, w)| w * u[n]).sum::<f64>();
        });
    }
}

// Sequential so that results do not depend on the thread schedule.
fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Solves the discrete Laplace equation for the unknown nodes by conjugate
/// gradients. Every neighbor of an unknown must exist and not be outside.
pub fn solve_dirichlet(problem: &GridProblem, opts: SolverOptions) -> Result<DirichletSolution> {
    let (nx, ny) = (problem.nx, problem.ny);
    if problem.roles.len() != nx * ny {
        return Err(Error::InvalidArgument(format!(
            "{} roles for a {nx}x{ny} grid",
            problem.roles.len()
        )));
    }
    if !(problem.hx > 0.0 && problem.hy > 0.0) {
        return Err(Error::InvalidArgument("grid spacings must be positive".into()));
    }
    let (wx, wy) = (1.0 / (problem.hx * problem.hx), 1.0 / (problem.hy * problem.hy));
    let mut slot = vec![None; nx * ny];
    let mut node = Vec::new();
    for (k, r) in problem.roles.iter().enumerate() {
        if *r == NodeRole::Unknown {
            slot[k] = Some(node.len());
            node.push(k);
        }
    }
    let mut links = Vec::with_capacity(node.len());
    let mut b = vec![0.0; node.len()];
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for r in &problem.roles {
        if let NodeRole::Fixed(v) = r {
            lo = lo.min(*v);
            hi = hi.max(*v);
        }
    }
    for (s, &k) in node.iter().enumerate() {
        let (i, j) = (k / ny, k % ny);
        let mut nb = Vec::with_capacity(4);
        let mut push = |ii: Option<usize>, jj: Option<usize>, w: f64| -> Result<()> {
            let (Some(ii), Some(jj)) = (ii, jj) else {
                return Err(Error::InvalidArgument(format!(
                    "unknown node ({i}, {j}) lies on the grid edge"
                )));
            };
            let n = ii * ny + jj;
            match problem.roles[n] {
                NodeRole::Unknown => nb.push((slot[n].expect("unknown has a slot"), w)),
                NodeRole::Fixed(v) => b[s] += w * v,
                NodeRole::Outside => {
                    return Err(Error::InvalidArgument(format!(
                        "unknown node ({i}, {j}) borders an outside node"
                    )))
                }
            }
            Ok(())
        };
        push(i.checked_sub(1), Some(j), wx)?;
        push((i + 1 < nx).then_some(i + 1), Some(j), wx)?;
        let (jm, jp) = if problem.periodic_y {
            (Some((j + ny - 1) % ny), Some((j + 1) % ny))
        } else {
            (j.checked_sub(1), (j + 1 < ny).then_some(j + 1))
        };
        push(Some(i), jm, wy)?;
        push(Some(i), jp, wy)?;
        links.push(nb);
    }
    let op = Operator {
        slot,
        node,
        links,
        diag: 2.0 * (wx + wy),
    };

    let n = op.node.len();
    let mut u = vec![0.0; n];
    let bnorm = dot(&b, &b).sqrt();
    let mut iterations = 0;
    let mut residual = 0.0;
    if n > 0 && bnorm > 0.0 {
        let mut r = b.clone();
        let mut p = r.clone();
        let mut ap = vec![0.0; n];
        let mut rr = dot(&r, &r);
        residual = rr.sqrt() / bnorm;
        while residual > opts.tol {
            if iterations >= opts.max_iter {
                return Err(Error::NoConvergence { iterations, residual });
            }
            op.apply(&p, &mut ap);
            let alpha = rr / dot(&p, &ap);
            u.par_iter_mut().zip(&p).for_each(|(x, d)| *x += alpha * d);
            r.par_iter_mut().zip(&ap).for_each(|(x, d)| *x -= alpha * d);
            let next = dot(&r, &r);
            let beta = next / rr;
            rr = next;
            p.par_iter_mut().zip(&r).for_each(|(x, d)| *x = d + beta * *x);
            iterations += 1;
            residual = rr.sqrt() / bnorm;
        }
    }

    let slack = 1e-8 * (hi - lo).abs().max(1.0);
    let max_principle = u.iter().all(|&v| v >= lo - slack && v <= hi + slack);
    let values = problem
        .roles
        .iter()
        .enumerate()
        .map(|(k, r)| match r {
            NodeRole::Unknown => u[op.slot[k].expect("unknown has a slot")],
            NodeRole::Fixed(v) => *v,
            NodeRole::Outside => f64::NAN,
        })
        .collect();
    Ok(DirichletSolution {
        values,
        iterations,
        residual,
        max_principle,
    })
}
