use std::fmt;

use num_complex::Complex64;

/// Inclusive bound on integer exponents accepted by the parser.
pub const MAX_EXPONENT: i32 = 64;

/// Expression node kinds.
#[derive(Debug, Clone)]
pub enum Node {
    Literal(Complex64),
    /// The imaginary unit `i`.
    I,
    /// The variable `z`.
    Z,
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i32),
    Exp(Box<Expr>),
    /// Principal branch of the logarithm.
    Log(Box<Expr>),
}

/// An expression tree. `pos` is the byte offset of the node in the source
/// text it was parsed from (zero for synthesized nodes); it does not take
/// part in equality.
#[derive(Debug, Clone)]
pub struct Expr {
    pub node: Node,
    pub pos: usize,
}

impl PartialEq for Expr {
    fn eq(&self, other: &Self) -> bool {
        use Node::*;
        match (&self.node, &other.node) {
            (Literal(a), Literal(b)) => a == b,
            (I, I) | (Z, Z) => true,
            (Neg(a), Neg(b)) | (Exp(a), Exp(b)) | (Log(a), Log(b)) => a == b,
            (Add(a, b), Add(c, d)) | (Sub(a, b), Sub(c, d)) | (Mul(a, b), Mul(c, d)) | (Div(a, b), Div(c, d)) => {
                a == c && b == d
            }
            (Pow(a, n), Pow(b, m)) => n == m && a == b,
            _ => false,
        }
    }
}

impl Expr {
    pub fn new(node: Node, pos: usize) -> Self {
        Self { node, pos }
    }

    pub fn lit(c: Complex64) -> Self {
        Self::new(Node::Literal(c), 0)
    }

    pub fn real(x: f64) -> Self {
        Self::lit(Complex64::new(x, 0.0))
    }

    pub fn z() -> Self {
        Self::new(Node::Z, 0)
    }

    pub fn i() -> Self {
        Self::new(Node::I, 0)
    }

    /// Value of the node if it is a constant leaf.
    pub fn as_constant(&self) -> Option<Complex64> {
        match self.node {
            Node::Literal(c) => Some(c),
            Node::I => Some(Complex64::i()),
            _ => None,
        }
    }

    /// True when the tree does not mention `z`.
    pub fn is_constant(&self) -> bool {
        use Node::*;
        match &self.node {
            Literal(_) | I => true,
            Z => false,
            Neg(a) | Exp(a) | Log(a) | Pow(a, _) => a.is_constant(),
            Add(a, b) | Sub(a, b) | Mul(a, b) | Div(a, b) => a.is_constant() && b.is_constant(),
        }
    }

    /// Replace every occurrence of `z` by `with`.
    pub fn substitute(&self, with: &Expr) -> Expr {
        use Node::*;
        let b = |e: &Expr| Box::new(e.substitute(with));
        let node = match &self.node {
            Z => return with.clone(),
            Literal(c) => Literal(*c),
            I => I,
            Neg(a) => Neg(b(a)),
            Add(x, y) => Add(b(x), b(y)),
            Sub(x, y) => Sub(b(x), b(y)),
            Mul(x, y) => Mul(b(x), b(y)),
            Div(x, y) => Div(b(x), b(y)),
            Pow(x, n) => Pow(b(x), *n),
            Exp(a) => Exp(b(a)),
            Log(a) => Log(b(a)),
        };
        Expr::new(node, self.pos)
    }

    pub fn node_count(&self) -> usize {
        use Node::*;
        match &self.node {
            Literal(_) | I | Z => 1,
            Neg(a) | Exp(a) | Log(a) | Pow(a, _) => 1 + a.node_count(),
            Add(a, b) | Sub(a, b) | Mul(a, b) | Div(a, b) => 1 + a.node_count() + b.node_count(),
        }
    }

    fn precedence(&self) -> u8 {
        use Node::*;
        match &self.node {
            Add(..) | Sub(..) => 1,
            Mul(..) | Div(..) => 2,
            Neg(_) => 3,
            Pow(..) => 4,
            Literal(c) if c.re < 0.0 || (c.re != 0.0 && c.im != 0.0) || c.im < 0.0 => 0,
            _ => 5,
        }
    }
}

fn fmt_f64(x: f64) -> String {
    // `{}` on f64 is the shortest representation that round-trips.
    format!("{x}")
}

fn fmt_literal(c: Complex64) -> String {
    if c.im == 0.0 {
        fmt_f64(c.re)
    } else if c.re == 0.0 && c.im >= 0.0 {
        format!("{}i", fmt_f64(c.im))
    } else {
        let sign = if c.im < 0.0 { "-" } else { "+" };
        format!("{}{}{}i", fmt_f64(c.re), sign, fmt_f64(c.im.abs()))
    }
}

struct Wrapped<'a>(&'a Expr, bool);

impl fmt::Display for Wrapped<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.1 {
            write!(f, "({})", self.0)
        } else {
            write!(f, "{}", self.0)
        }
    }
}

impl fmt::Display for Expr {
    /// Prints with the minimal parentheses needed for the parser to rebuild
    /// the same tree.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use Node::*;
        match &self.node {
            Literal(c) => write!(f, "{}", fmt_literal(*c)),
            I => write!(f, "i"),
            Z => write!(f, "z"),
            Neg(a) => write!(f, "-{}", Wrapped(a, a.precedence() < 3)),
            Add(a, b) => write!(
                f,
                "{} + {}",
                Wrapped(a, a.precedence() < 1),
                Wrapped(b, b.precedence() <= 1)
            ),
            Sub(a, b) => write!(
                f,
                "{} - {}",
                Wrapped(a, a.precedence() < 1),
                Wrapped(b, b.precedence() <= 1)
            ),
            Mul(a, b) => write!(
                f,
                "{}*{}",
                Wrapped(a, a.precedence() < 2),
                Wrapped(b, b.precedence() <= 2)
            ),
            Div(a, b) => write!(
                f,
                "{}/{}",
                Wrapped(a, a.precedence() < 2),
                Wrapped(b, b.precedence() <= 2)
            ),
            Pow(a, n) => write!(f, "{}^{}", Wrapped(a, a.precedence() < 5), n),
            Exp(a) => write!(f, "exp({a})"),
            Log(a) => write!(f, "log({a})"),
        }
    }
}
