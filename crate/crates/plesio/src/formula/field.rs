//! A scalar field on a cubic period.

use std::f64::consts::TAU;

use nalgebra::{Point3, Vector3};

use super::ast::{Axis, EvalError, Expr};

/// A triply periodic scalar field: an expression together with the cubic
/// lattice constant it is sampled on.
///
/// The expression itself is written on the natural 2π cell; a field with a
/// different `period` is the same function with space rescaled, so that
/// `f(p + period·e_i) = f(p)` holds for each axis.
#[derive(Clone, Debug, PartialEq)]
pub struct PeriodicField {
    expr: Expr,
    period: f64,
    grad: [Expr; 3],
}

impl PeriodicField {
    /// Field on the default 2π period.
    pub fn new(expr: Expr) -> Self {
        Self::with_period(expr, TAU)
    }

    pub fn with_period(expr: Expr, period: f64) -> Self {
        assert!(period > 0.0, "period must be positive");
        let grad = [
            expr.derivative(Axis::X),
            expr.derivative(Axis::Y),
            expr.derivative(Axis::Z),
        ];
        PeriodicField { expr, period, grad }
    }

    pub fn expr(&self) -> &Expr {
        &self.expr
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    /// Same expression on another period.
    pub fn rescaled(&self, period: f64) -> PeriodicField {
        PeriodicField::with_period(self.expr.clone(), period)
    }

    fn to_natural(&self, p: &Point3<f64>) -> Point3<f64> {
        let s = TAU / self.period;
        Point3::new(p.x * s, p.y * s, p.z * s)
    }

    /// Field value at a point.
    pub fn evaluate(&self, p: &Point3<f64>) -> Result<f64, EvalError> {
        self.expr.eval(&self.to_natural(p))
    }

    /// Exact gradient at a point, via the symbolic partial derivatives.
    ///
    /// Agrees with central finite differences to O(h²).
    pub fn gradient(&self, p: &Point3<f64>) -> Result<Vector3<f64>, EvalError> {
        let q = self.to_natural(p);
        let s = TAU / self.period;
        Ok(Vector3::new(
            self.grad[0].eval(&q)? * s,
            self.grad[1].eval(&q)? * s,
            self.grad[2].eval(&q)? * s,
        ))
    }
}
