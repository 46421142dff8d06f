use num_complex::Complex64;
use thiserror::Error;

use crate::expr::{EvalError, ParseError};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(#[from] ParseError),

    #[error("evaluation error: {0}")]
    Eval(#[from] EvalError),

    #[error("stereographic projection undefined on the unit circle (z = {0})")]
    UnitCircle(Complex64),

    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("spacelike violation: |g| = {modulus} >= 1 at z = {z}")]
    SpacelikeViolation { z: Complex64, modulus: f64 },

    #[error("Weierstrass triple vanishes at z = {0}")]
    DegeneratePhi(Complex64),

    #[error("real period of phi_{component} is {period:e} on |z| = {radius}: immersion is multivalued")]
    NonExactRealPart { component: usize, radius: f64, period: f64 },

    #[error("harmonic conjugate is not single valued: Im period {period} on |z| = {radius}")]
    NotExact { radius: f64, period: f64 },

    #[error("quadrature failed between {from} and {to}: {reason}")]
    Quadrature {
        from: Complex64,
        to: Complex64,
        reason: String,
    },

    #[error("degenerate frame at z = {z} (lambda^2 = {lambda_sq:e})")]
    DegenerateFrame { z: Complex64, lambda_sq: f64 },

    #[error("singularity classification inconclusive: {0}")]
    Inconclusive(String),

    #[error("mask is empty: no node satisfies the threshold")]
    MaskEmpty,

    #[error("no masked node has a complete 5-point stencil")]
    StencilCrossesMask,

    #[error("linear solver did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("graph extraction failed: {0}")]
    GraphExtraction(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("unknown catalog surface '{0}'")]
    UnknownSurface(String),
}
