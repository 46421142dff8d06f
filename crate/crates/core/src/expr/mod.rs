//! Complex-analytic expressions in one variable `z`.
//!
//! These carry the Gauss map `g` and the coefficient `f` of `phi_3 = f dz`.
//! The grammar is documented in [`parser`].

mod ast;
mod diff;
mod eval;
pub mod parser;

use std::f64::consts::TAU;
use std::fmt;

use num_complex::Complex64;

pub use ast::{Expr, Node, MAX_EXPONENT};
pub use diff::{differentiate, fold};
pub use eval::{evaluate, EvalError};
pub use parser::{parse, ParseError};

pub(crate) use diff::{add, div, mul, sub};

/// Radius (relative to `max(1, |z|)`) of the circles used to probe a point
/// where direct evaluation hits a zero divisor.
const PROBE_RADIUS: f64 = 1e-4;
const PROBE_POINTS: usize = 16;

/// An expression together with its symbolic derivative.
#[derive(Debug, Clone)]
pub struct AnalyticFn {
    source: String,
    value: Expr,
    derivative: Expr,
}

impl PartialEq for AnalyticFn {
    fn eq(&self, other: &Self) -> bool {
        self.value == other.value
    }
}

impl fmt::Display for AnalyticFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.source)
    }
}

impl AnalyticFn {
    pub fn parse(text: &str) -> Result<Self, ParseError> {
        let value = parse(text)?;
        let derivative = differentiate(&value);
        Ok(Self {
            source: text.trim().to_string(),
            value,
            derivative,
        })
    }

    pub fn from_expr(value: Expr) -> Self {
        let derivative = differentiate(&value);
        Self {
            source: value.to_string(),
            value,
            derivative,
        }
    }

    pub fn constant(c: Complex64) -> Self {
        Self::from_expr(Expr::lit(c))
    }

    /// Text this function was built from (or its printed form).
    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn expr(&self) -> &Expr {
        &self.value
    }

    pub fn derivative_expr(&self) -> &Expr {
        &self.derivative
    }

    pub fn is_constant(&self) -> bool {
        self.value.is_constant()
    }

    pub fn eval(&self, z: Complex64) -> Result<Complex64, EvalError> {
        evaluate(&self.value, z)
    }

    pub fn eval_derivative(&self, z: Complex64) -> Result<Complex64, EvalError> {
        evaluate(&self.derivative, z)
    }

    /// `i * self`, used by the maximal/minimal duality.
    pub fn times_i(&self) -> Self {
        Self::from_expr(mul(Expr::lit(Complex64::i()), self.value.clone()))
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        Self::from_expr(mul(Expr::lit(c), self.value.clone()))
    }

    /// Value at `z`, recovering the limit at removable singularities.
    ///
    /// When direct evaluation hits a zero divisor, the function is averaged
    /// over a small circle around `z` (mean value property); a genuine pole is
    /// detected by the growth of `max |f|` when the circle shrinks.
    pub fn eval_limit(&self, z: Complex64) -> Result<Complex64, EvalError> {
        eval_limit_with(|w| self.eval(w), z)
    }

    /// True when `z` looks like a pole: `max |f|` on circles of radius r and
    /// r/2 grows by more than half.
    pub fn probe_pole(&self, z: Complex64) -> bool {
        probe_growth(|w| self.eval(w), z).is_none_or(|g| g > 1.5)
    }
}

fn circle_values<F>(f: &F, z: Complex64, r: f64) -> Option<Vec<Complex64>>
where
    F: Fn(Complex64) -> Result<Complex64, EvalError>,
{
    (0..PROBE_POINTS)
        .map(|k| {
            let t = TAU * (k as f64 + 0.5) / PROBE_POINTS as f64;
            f(z + Complex64::from_polar(r, t)).ok()
        })
        .collect()
}

fn probe_radius(z: Complex64) -> f64 {
    PROBE_RADIUS * z.norm().max(1.0)
}

fn probe_growth<F>(f: F, z: Complex64) -> Option<f64>
where
    F: Fn(Complex64) -> Result<Complex64, EvalError>,
{
    let r = probe_radius(z);
    let outer = circle_values(&f, z, r)?;
    let inner = circle_values(&f, z, 0.5 * r)?;
    let max = |v: &[Complex64]| v.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let (mo, mi) = (max(&outer), max(&inner));
    if mo == 0.0 {
        Some(if mi == 0.0 { 1.0 } else { f64::INFINITY })
    } else {
        Some(mi / mo)
    }
}

/// [`AnalyticFn::eval_limit`] for an arbitrary holomorphic closure.
pub fn eval_limit_with<F>(f: F, z: Complex64) -> Result<Complex64, EvalError>
where
    F: Fn(Complex64) -> Result<Complex64, EvalError>,
{
    match f(z) {
        Ok(v) if v.is_finite() => Ok(v),
        Ok(_) | Err(EvalError::Pole { .. }) => {
            let err = EvalError::Pole { pos: 0, z };
            match probe_growth(&f, z) {
                Some(g) if g <= 1.5 => {
                    let vals = circle_values(&f, z, probe_radius(z)).ok_or(err)?;
                    Ok(vals.iter().sum::<Complex64>() / PROBE_POINTS as f64)
                }
                _ => Err(err),
            }
        }
        Err(e) => Err(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn parse_shapes() {
        let e = parse("i/2*(1/z - z)").unwrap();
        match &e.node {
            Node::Mul(l, _) => match &l.node {
                Node::Div(a, b) => {
                    assert!(matches!(a.node, Node::I));
                    assert_eq!(b.as_constant(), Some(c(2.0, 0.0)));
                }
                other => panic!("left operand should be a division, got {other:?}"),
            },
            other => panic!("root should be a product, got {other:?}"),
        }
        let e = parse("z^2 + 1").unwrap();
        assert_eq!(
            e,
            Expr::new(
                Node::Add(
                    Box::new(Expr::new(Node::Pow(Box::new(Expr::z()), 2), 0)),
                    Box::new(Expr::real(1.0))
                ),
                0
            )
        );
    }

    #[test]
    fn parse_errors() {
        let err = parse("z^^2").unwrap_err();
        assert_eq!(err.offset(), Some(2));
        assert!(matches!(err, ParseError::Syntax { .. }));
        assert!(matches!(
            parse("z^65"),
            Err(ParseError::ExponentRange { value: 65, .. })
        ));
        assert!(parse("z^-64").is_ok());
        assert!(matches!(parse("  "), Err(ParseError::Empty)));
        assert_eq!(parse("(z + 1").unwrap_err().offset(), Some(6));
        assert_eq!(parse("z + foo").unwrap_err().offset(), Some(4));
    }

    #[test]
    fn precedence() {
        // power binds tighter than unary minus, which binds tighter than *.
        let e = parse("-z^2").unwrap();
        assert_eq!(evaluate(&e, c(3.0, 0.0)).unwrap(), c(-9.0, 0.0));
        let e = parse("-2*3").unwrap();
        assert!(matches!(e.node, Node::Mul(..)));
        let e = parse("1 - 2 - 3").unwrap();
        assert_eq!(evaluate(&e, c(0.0, 0.0)).unwrap(), c(-4.0, 0.0));
        let e = parse("8/2/2").unwrap();
        assert_eq!(evaluate(&e, c(0.0, 0.0)).unwrap(), c(2.0, 0.0));
        let e = parse("0.3+0.1i").unwrap();
        assert_eq!(evaluate(&e, c(0.0, 0.0)).unwrap(), c(0.3, 0.1));
        let e = parse("z^(-2)").unwrap();
        assert_eq!(evaluate(&e, c(2.0, 0.0)).unwrap(), c(0.25, 0.0));
    }

    #[test]
    fn evaluation_examples() {
        let e = parse("i/2*(1/z - z)").unwrap();
        let v = evaluate(&e, c(2.0, 0.0)).unwrap();
        assert!((v - c(0.0, -0.75)).norm() < 1e-15);
        let e = parse("z^2").unwrap();
        assert_eq!(evaluate(&e, c(1.0, 1.0)).unwrap(), c(0.0, 2.0));
        let e = parse("1/z").unwrap();
        assert!(matches!(evaluate(&e, c(0.0, 0.0)), Err(EvalError::Pole { pos: 1, .. })));
        let e = parse("log(z)").unwrap();
        assert!(matches!(evaluate(&e, c(0.0, 0.0)), Err(EvalError::LogZero { .. })));
        // Principal branch.
        let v = evaluate(&e, c(-1.0, 0.0)).unwrap();
        assert!((v - c(0.0, std::f64::consts::PI)).norm() < 1e-15);
    }

    #[test]
    fn removable_singularities() {
        let f = AnalyticFn::parse("(1/z - z)*z").unwrap();
        let v = f.eval_limit(c(0.0, 0.0)).unwrap();
        assert!((v - c(1.0, 0.0)).norm() < 1e-7);
        assert!(!f.probe_pole(c(0.0, 0.0)));
        let g = AnalyticFn::parse("1/z").unwrap();
        assert!(g.eval_limit(c(0.0, 0.0)).is_err());
        assert!(g.probe_pole(c(0.0, 0.0)));
    }
}
