//! Lagrangians `f(t, x, r)` parsed from text.
//!
//! The second and third slots receive `x^σ(t)` and `x^Δ(t)`. Partial
//! derivatives `f_x` and `f_r` come from forward-mode dual numbers, one pass
//! per partial.

pub mod dual;
pub mod expr;

use std::fmt;

use crate::error::Result;
pub use dual::{Dual, Scalar};
pub use expr::{BinOp, Expr, Func, Var};

#[derive(Debug, Clone, PartialEq)]
pub struct Lagrangian {
    ast: Expr,
    source: String,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Partials {
    pub f: f64,
    pub f_x: f64,
    pub f_r: f64,
}

impl Lagrangian {
    pub fn parse(src: &str) -> Result<Self> {
        let ast = Expr::parse(src, &[Var::T, Var::X, Var::R])?;
        Ok(Lagrangian {
            ast,
            source: src.to_string(),
        })
    }

    pub fn from_expr(ast: Expr) -> Self {
        let source = ast.to_string();
        Lagrangian { ast, source }
    }

    pub fn ast(&self) -> &Expr {
        &self.ast
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    /// `c · f`.
    pub fn scaled(&self, c: f64) -> Self {
        Self::from_expr(Expr::Binary(
            BinOp::Mul,
            Box::new(Expr::Num(c)),
            Box::new(self.ast.clone()),
        ))
    }

    pub fn eval(&self, t: f64, x: f64, r: f64) -> Result<f64> {
        self.ast.eval(t, x, r)
    }

    pub fn eval_generic<S: Scalar>(&self, t: S, x: S, r: S) -> Result<S> {
        self.ast.eval(t, x, r)
    }

    /// `(f, f_x, f_r)` at a point.
    pub fn eval_partials(&self, t: f64, x: f64, r: f64) -> Result<Partials> {
        let (f, f_x) = self.with_x_tangent(t, x, r)?;
        let (_, f_r) = self.with_r_tangent(t, x, r)?;
        Ok(Partials { f, f_x, f_r })
    }

    /// `(f, f_x)` with `S`-valued inputs.
    pub fn with_x_tangent<S: Scalar>(&self, t: S, x: S, r: S) -> Result<(S, S)> {
        let v = self
            .ast
            .eval(Dual::lift(t), Dual::variable(x), Dual::lift(r))?;
        Ok((v.re, v.eps))
    }

    /// `(f, f_r)` with `S`-valued inputs.
    pub fn with_r_tangent<S: Scalar>(&self, t: S, x: S, r: S) -> Result<(S, S)> {
        let v = self
            .ast
            .eval(Dual::lift(t), Dual::lift(x), Dual::variable(r))?;
        Ok((v.re, v.eps))
    }
}

impl fmt::Display for Lagrangian {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.source)
    }
}
