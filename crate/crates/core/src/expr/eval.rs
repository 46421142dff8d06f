use num_complex::Complex64;
use thiserror::Error;

use super::ast::{Expr, Node};

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum EvalError {
    #[error("pole: divisor vanishes (node at offset {pos}, z = {z})")]
    Pole { pos: usize, z: Complex64 },
    #[error("log(0) (node at offset {pos}, z = {z})")]
    LogZero { pos: usize, z: Complex64 },
}

/// Evaluate `e` at `z` under principal branches. Overflow follows IEEE
/// semantics; only exact zero divisors and `log(0)` are errors.
pub fn evaluate(e: &Expr, z: Complex64) -> Result<Complex64, EvalError> {
    use Node::*;
    Ok(match &e.node {
        Literal(c) => *c,
        I => Complex64::i(),
        Z => z,
        Neg(a) => -evaluate(a, z)?,
        Add(a, b) => evaluate(a, z)? + evaluate(b, z)?,
        Sub(a, b) => evaluate(a, z)? - evaluate(b, z)?,
        Mul(a, b) => evaluate(a, z)? * evaluate(b, z)?,
        Div(a, b) => {
            let num = evaluate(a, z)?;
            let den = evaluate(b, z)?;
            if den == Complex64::new(0.0, 0.0) {
                return Err(EvalError::Pole { pos: e.pos, z });
            }
            num / den
        }
        Pow(a, n) => {
            let base = evaluate(a, z)?;
            if *n < 0 && base == Complex64::new(0.0, 0.0) {
                return Err(EvalError::Pole { pos: e.pos, z });
            }
            base.powi(*n)
        }
        Exp(a) => evaluate(a, z)?.exp(),
        Log(a) => {
            let v = evaluate(a, z)?;
            if v == Complex64::new(0.0, 0.0) {
                return Err(EvalError::LogZero { pos: e.pos, z });
            }
            v.ln()
        }
    })
}
