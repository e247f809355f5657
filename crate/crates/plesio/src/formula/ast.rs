//! Expression trees for triply periodic trigonometric scalar fields.
//!
//! An [`Expr`] is a plain syntax tree over the variables `x`, `y`, `z` with
//! constants, the four arithmetic operators, unary negation and the two
//! trigonometric functions `sin` and `cos`. Trees are immutable values;
//! evaluation and differentiation never mutate them.

use std::fmt;

use nalgebra::Point3;
use thiserror::Error;

/// One of the three spatial variables.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    /// Index into a coordinate triple: x = 0, y = 1, z = 2.
    pub fn index(self) -> usize {
        match self {
            Axis::X => 0,
            Axis::Y => 1,
            Axis::Z => 2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Axis::X => "x",
            Axis::Y => "y",
            Axis::Z => "z",
        }
    }

    /// The cyclic successor: x -> y -> z -> x.
    pub fn next(self) -> Axis {
        match self {
            Axis::X => Axis::Y,
            Axis::Y => Axis::Z,
            Axis::Z => Axis::X,
        }
    }
}

/// Abstract syntax tree of a scalar field over (x, y, z).
///
/// Structural equality is the derived `PartialEq`: two trees are equal iff
/// they have the same shape node by node, with constants compared by value.
#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Constant(f64),
    Variable(Axis),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Sin(Box<Expr>),
    Cos(Box<Expr>),
}

/// Runtime failure while evaluating an expression.
#[derive(Clone, Debug, PartialEq, Error)]
pub enum EvalError {
    #[error("division by zero while evaluating expression")]
    DivisionByZero,
}

impl Expr {
    pub fn constant(v: f64) -> Expr {
        Expr::Constant(v)
    }

    pub fn var(axis: Axis) -> Expr {
        Expr::Variable(axis)
    }

    /// Evaluate at a point. The only runtime failure is an exact division by
    /// zero in a `Div` node; everything else follows IEEE 754 arithmetic.
    pub fn eval(&self, p: &Point3<f64>) -> Result<f64, EvalError> {
        Ok(match self {
            Expr::Constant(c) => *c,
            Expr::Variable(a) => p[a.index()],
            Expr::Neg(e) => -e.eval(p)?,
            Expr::Add(a, b) => a.eval(p)? + b.eval(p)?,
            Expr::Sub(a, b) => a.eval(p)? - b.eval(p)?,
            Expr::Mul(a, b) => a.eval(p)? * b.eval(p)?,
            Expr::Div(a, b) => {
                let den = b.eval(p)?;
                if den == 0.0 {
                    return Err(EvalError::DivisionByZero);
                }
                a.eval(p)? / den
            }
            Expr::Sin(e) => e.eval(p)?.sin(),
            Expr::Cos(e) => e.eval(p)?.cos(),
        })
    }

    /// Exact partial derivative with respect to `axis`, as a new tree.
    ///
    /// The result is lightly folded (`0 * u`, `u + 0`, ... are elided) so
    /// that repeated differentiation stays cheap to evaluate, but no general
    /// algebraic simplification is attempted.
    pub fn derivative(&self, axis: Axis) -> Expr {
        use smart::*;
        match self {
            Expr::Constant(_) => Expr::Constant(0.0),
            Expr::Variable(a) => Expr::Constant(if *a == axis { 1.0 } else { 0.0 }),
            Expr::Neg(e) => neg(e.derivative(axis)),
            Expr::Add(a, b) => add(a.derivative(axis), b.derivative(axis)),
            Expr::Sub(a, b) => sub(a.derivative(axis), b.derivative(axis)),
            Expr::Mul(a, b) => add(
                mul(a.derivative(axis), (**b).clone()),
                mul((**a).clone(), b.derivative(axis)),
            ),
            Expr::Div(a, b) => {
                // (a'b - ab') / b^2
                let num = sub(
                    mul(a.derivative(axis), (**b).clone()),
                    mul((**a).clone(), b.derivative(axis)),
                );
                div(num, mul((**b).clone(), (**b).clone()))
            }
            Expr::Sin(e) => mul(Expr::Cos(e.clone()), e.derivative(axis)),
            Expr::Cos(e) => mul(neg(Expr::Sin(e.clone())), e.derivative(axis)),
        }
    }

    /// Rename variables cyclically: x -> y -> z -> x, applied `shift` times.
    pub fn cycled(&self, shift: usize) -> Expr {
        let rot = |a: Axis| {
            let mut a = a;
            for _ in 0..(shift % 3) {
                a = a.next();
            }
            a
        };
        self.map_vars(&rot)
    }

    fn map_vars(&self, f: &impl Fn(Axis) -> Axis) -> Expr {
        match self {
            Expr::Constant(c) => Expr::Constant(*c),
            Expr::Variable(a) => Expr::Variable(f(*a)),
            Expr::Neg(e) => Expr::Neg(Box::new(e.map_vars(f))),
            Expr::Add(a, b) => Expr::Add(Box::new(a.map_vars(f)), Box::new(b.map_vars(f))),
            Expr::Sub(a, b) => Expr::Sub(Box::new(a.map_vars(f)), Box::new(b.map_vars(f))),
            Expr::Mul(a, b) => Expr::Mul(Box::new(a.map_vars(f)), Box::new(b.map_vars(f))),
            Expr::Div(a, b) => Expr::Div(Box::new(a.map_vars(f)), Box::new(b.map_vars(f))),
            Expr::Sin(e) => Expr::Sin(Box::new(e.map_vars(f))),
            Expr::Cos(e) => Expr::Cos(Box::new(e.map_vars(f))),
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 1,
            Expr::Mul(..) | Expr::Div(..) => 2,
            Expr::Neg(..) => 3,
            _ => 4,
        }
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        let prec = self.precedence();
        let parens = prec < min;
        if parens {
            write!(f, "(")?;
        }
        match self {
            Expr::Constant(c) => write!(f, "{c}")?,
            Expr::Variable(a) => write!(f, "{}", a.name())?,
            Expr::Neg(e) => {
                write!(f, "-")?;
                e.fmt_prec(f, 3)?;
            }
            Expr::Add(a, b) => {
                a.fmt_prec(f, 1)?;
                write!(f, "+")?;
                // right operand re-parenthesized so left-assoc parsing round-trips
                b.fmt_prec(f, 2)?;
            }
            Expr::Sub(a, b) => {
                a.fmt_prec(f, 1)?;
                write!(f, "-")?;
                b.fmt_prec(f, 2)?;
            }
            Expr::Mul(a, b) => {
                a.fmt_prec(f, 2)?;
                write!(f, "*")?;
                b.fmt_prec(f, 3)?;
            }
            Expr::Div(a, b) => {
                a.fmt_prec(f, 2)?;
                write!(f, "/")?;
                b.fmt_prec(f, 3)?;
            }
            Expr::Sin(e) => {
                write!(f, "sin(")?;
                e.fmt_prec(f, 0)?;
                write!(f, ")")?;
            }
            Expr::Cos(e) => {
                write!(f, "cos(")?;
                e.fmt_prec(f, 0)?;
                write!(f, ")")?;
            }
        }
        if parens {
            write!(f, ")")?;
        }
        Ok(())
    }
}

impl fmt::Display for Expr {
    /// Minimal-parentheses rendering; `crate::formula::parse` of the output
    /// reproduces the tree structurally.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}

/// Folding constructors used by differentiation. They elide additive and
/// multiplicative identities but never rewrite anything else.
pub(crate) mod smart {
    use super::Expr;

    pub fn is_zero(e: &Expr) -> bool {
        matches!(e, Expr::Constant(c) if *c == 0.0)
    }

    fn is_one(e: &Expr) -> bool {
        matches!(e, Expr::Constant(c) if *c == 1.0)
    }

    pub fn add(a: Expr, b: Expr) -> Expr {
        if is_zero(&a) {
            b
        } else if is_zero(&b) {
            a
        } else {
            Expr::Add(Box::new(a), Box::new(b))
        }
    }

    pub fn sub(a: Expr, b: Expr) -> Expr {
        if is_zero(&b) {
            a
        } else if is_zero(&a) {
            neg(b)
        } else {
            Expr::Sub(Box::new(a), Box::new(b))
        }
    }

    pub fn mul(a: Expr, b: Expr) -> Expr {
        if is_zero(&a) || is_zero(&b) {
            Expr::Constant(0.0)
        } else if is_one(&a) {
            b
        } else if is_one(&b) {
            a
        } else {
            Expr::Mul(Box::new(a), Box::new(b))
        }
    }

    pub fn div(a: Expr, b: Expr) -> Expr {
        if is_zero(&a) {
            Expr::Constant(0.0)
        } else if is_one(&b) {
            a
        } else {
            Expr::Div(Box::new(a), Box::new(b))
        }
    }

    pub fn neg(a: Expr) -> Expr {
        match a {
            Expr::Neg(inner) => *inner,
            e if is_zero(&e) => e,
            e => Expr::Neg(Box::new(e)),
        }
    }
}
