//! Symbolic differentiation with constant folding of literal subtrees.

use num_complex::Complex64;

use super::ast::{Expr, Node};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

fn lit(c: Complex64) -> Expr {
    Expr::lit(c)
}

fn is(e: &Expr, c: Complex64) -> bool {
    matches!(e.node, Node::Literal(v) if v == c)
}

fn literal(e: &Expr) -> Option<Complex64> {
    match e.node {
        Node::Literal(c) => Some(c),
        _ => None,
    }
}

pub(crate) fn neg(a: Expr) -> Expr {
    match a.node {
        Node::Literal(c) => lit(-c),
        Node::Neg(inner) => *inner,
        _ => Expr::new(Node::Neg(Box::new(a)), 0),
    }
}

pub(crate) fn add(a: Expr, b: Expr) -> Expr {
    match (literal(&a), literal(&b)) {
        (Some(x), Some(y)) => lit(x + y),
        (Some(x), _) if x == ZERO => b,
        (_, Some(y)) if y == ZERO => a,
        _ => Expr::new(Node::Add(Box::new(a), Box::new(b)), 0),
    }
}

pub(crate) fn sub(a: Expr, b: Expr) -> Expr {
    match (literal(&a), literal(&b)) {
        (Some(x), Some(y)) => lit(x - y),
        (Some(x), _) if x == ZERO => neg(b),
        (_, Some(y)) if y == ZERO => a,
        _ => Expr::new(Node::Sub(Box::new(a), Box::new(b)), 0),
    }
}

/// Product with literal factors moved to the left and merged.
pub(crate) fn mul(a: Expr, b: Expr) -> Expr {
    match (literal(&a), literal(&b)) {
        (Some(x), Some(y)) => return lit(x * y),
        (Some(x), _) if x == ZERO => return lit(ZERO),
        (_, Some(y)) if y == ZERO => return lit(ZERO),
        (Some(x), _) if x == ONE => return b,
        (_, Some(y)) if y == ONE => return a,
        (None, Some(_)) => return mul(b, a),
        _ => {}
    }
    if let Some(x) = literal(&a) {
        if x == -ONE {
            return neg(b);
        }
        // c1 * (c2 * e) -> (c1 c2) * e
        if let Node::Mul(l, r) = &b.node {
            if let Some(y) = literal(l) {
                return mul(lit(x * y), (**r).clone());
            }
        }
    }
    Expr::new(Node::Mul(Box::new(a), Box::new(b)), 0)
}

pub(crate) fn div(a: Expr, b: Expr) -> Expr {
    match (literal(&a), literal(&b)) {
        (Some(x), Some(y)) if y != ZERO => lit(x / y),
        (Some(x), _) if x == ZERO => lit(ZERO),
        (_, Some(y)) if y == ONE => a,
        _ => Expr::new(Node::Div(Box::new(a), Box::new(b)), 0),
    }
}

pub(crate) fn pow(a: Expr, n: i32) -> Expr {
    if n == 0 {
        return lit(ONE);
    }
    if n == 1 {
        return a;
    }
    match literal(&a) {
        Some(x) if x != ZERO || n > 0 => lit(x.powi(n)),
        _ => Expr::new(Node::Pow(Box::new(a), n), 0),
    }
}

/// Fold literal subtrees of an arbitrary tree (the `i` constant included).
pub fn fold(e: &Expr) -> Expr {
    use Node::*;
    match &e.node {
        Literal(_) | Z => e.clone(),
        I => lit(Complex64::i()),
        Neg(a) => neg(fold(a)),
        Add(a, b) => add(fold(a), fold(b)),
        Sub(a, b) => sub(fold(a), fold(b)),
        Mul(a, b) => mul(fold(a), fold(b)),
        Div(a, b) => div(fold(a), fold(b)),
        Pow(a, n) => pow(fold(a), *n),
        Exp(a) => {
            let a = fold(a);
            match literal(&a) {
                Some(c) => lit(c.exp()),
                None => Expr::new(Exp(Box::new(a)), 0),
            }
        }
        Log(a) => {
            let a = fold(a);
            match literal(&a) {
                Some(c) if c != ZERO => lit(c.ln()),
                _ => Expr::new(Log(Box::new(a)), 0),
            }
        }
    }
}

/// Derivative of `e` with respect to `z`.
pub fn differentiate(e: &Expr) -> Expr {
    use Node::*;
    if e.is_constant() {
        return lit(ZERO);
    }
    match &e.node {
        Literal(_) | I => lit(ZERO),
        Z => lit(ONE),
        Neg(a) => neg(differentiate(a)),
        Add(a, b) => add(differentiate(a), differentiate(b)),
        Sub(a, b) => sub(differentiate(a), differentiate(b)),
        Mul(a, b) => {
            let (a, b) = (fold(a), fold(b));
            add(mul(differentiate(&a), b.clone()), mul(a, differentiate(&b)))
        }
        Div(a, b) => {
            let (a, b) = (fold(a), fold(b));
            let db = differentiate(&b);
            if a.is_constant() {
                // c/b -> -c b' / b^2
                return div(neg(mul(a, db)), pow(b, 2));
            }
            let da = differentiate(&a);
            if is(&db, ZERO) {
                return div(da, b);
            }
            div(sub(mul(da, b.clone()), mul(a, db)), pow(b, 2))
        }
        Pow(a, n) => {
            let a = fold(a);
            let da = differentiate(&a);
            mul(mul(lit(Complex64::new(*n as f64, 0.0)), pow(a, n - 1)), da)
        }
        Exp(a) => {
            let a = fold(a);
            mul(differentiate(&a), Expr::new(Exp(Box::new(a)), 0))
        }
        Log(a) => {
            let a = fold(a);
            div(differentiate(&a), a)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    fn d(s: &str) -> String {
        differentiate(&parse(s).unwrap()).to_string()
    }

    #[test]
    fn textbook_forms() {
        assert_eq!(d("z^2"), "2*z");
        assert_eq!(d("1/z"), "(-1)/z^2");
        assert_eq!(d("exp(2*z)"), "2*exp(2*z)");
        assert_eq!(d("3"), "0");
        assert_eq!(d("i*z"), "1i");
    }

    #[test]
    fn constant_folding() {
        let e = fold(&parse("2*3 + i*i").unwrap());
        assert_eq!(e.as_constant(), Some(Complex64::new(5.0, 0.0)));
    }
}
