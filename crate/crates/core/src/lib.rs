//! Maximal surfaces in the Lorentz-Minkowski space R^3_1 built from
//! Weierstrass data, their minimal duals in R^3, and numerical checks of the
//! machinery behind relative parabolicity: superharmonicity of the log
//! Lorentzian norm, spacelike graphs over starlike regions, cone regions and
//! harmonic measure on exhaustions.

// `!(x > 0.0)` style guards also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod catalog;
pub mod error;
pub mod expr;
pub mod graph;
pub mod lorentz;
pub mod minimal;
pub mod parabolicity;
pub mod quadrature;
pub mod weierstrass;

pub use error::{Error, Result};
pub use lorentz::{
    causal_character, dist_to_lightcone, minkowski_inner, stereographic, CausalClass, ExtComplex, LVec3,
};
pub use num_complex::Complex64;
