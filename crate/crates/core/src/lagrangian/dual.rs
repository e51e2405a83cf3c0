//! Forward-mode dual numbers.
//!
//! `Dual<T>` is generic over its component type so duals can be nested:
//! `Dual<Dual<f64>>` carries mixed second derivatives, which the
//! Euler-Lagrange Jacobian needs (derivatives of `f_r` with respect to the
//! trajectory).

use std::ops::{Add, Div, Mul, Neg, Sub};

/// Arithmetic the expression evaluator needs.
pub trait Scalar:
    Copy
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn constant(v: f64) -> Self;
    fn primal(&self) -> f64;
    /// True when any tangent component (at any nesting level) is nonzero.
    fn has_tangent(&self) -> bool;
    fn sin(self) -> Self;
    fn cos(self) -> Self;
    fn exp(self) -> Self;
    fn ln(self) -> Self;
    fn sqrt(self) -> Self;
    fn powi(self, n: i32) -> Self;

    fn abs(self) -> Self {
        if self.primal() < 0.0 {
            -self
        } else {
            self
        }
    }
}

impl Scalar for f64 {
    fn constant(v: f64) -> Self {
        v
    }
    fn primal(&self) -> f64 {
        *self
    }
    fn has_tangent(&self) -> bool {
        false
    }
    fn sin(self) -> Self {
        f64::sin(self)
    }
    fn cos(self) -> Self {
        f64::cos(self)
    }
    fn exp(self) -> Self {
        f64::exp(self)
    }
    fn ln(self) -> Self {
        f64::ln(self)
    }
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    fn powi(self, n: i32) -> Self {
        f64::powi(self, n)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dual<T> {
    pub re: T,
    pub eps: T,
}

impl<T: Scalar> Dual<T> {
    pub fn new(re: T, eps: T) -> Self {
        Dual { re, eps }
    }

    /// A variable: tangent seeded with 1.
    pub fn variable(re: T) -> Self {
        Dual {
            re,
            eps: T::constant(1.0),
        }
    }

    pub fn lift(re: T) -> Self {
        Dual {
            re,
            eps: T::constant(0.0),
        }
    }
}

impl<T: Scalar> Add for Dual<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Dual::new(self.re + o.re, self.eps + o.eps)
    }
}

impl<T: Scalar> Sub for Dual<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Dual::new(self.re - o.re, self.eps - o.eps)
    }
}

impl<T: Scalar> Mul for Dual<T> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Dual::new(self.re * o.re, self.eps * o.re + self.re * o.eps)
    }
}

impl<T: Scalar> Div for Dual<T> {
    type Output = Self;
    fn div(self, o: Self) -> Self {
        let q = self.re / o.re;
        Dual::new(q, (self.eps - q * o.eps) / o.re)
    }
}

impl<T: Scalar> Neg for Dual<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Dual::new(-self.re, -self.eps)
    }
}

impl<T: Scalar> Scalar for Dual<T> {
    fn constant(v: f64) -> Self {
        Dual::lift(T::constant(v))
    }
    fn primal(&self) -> f64 {
        self.re.primal()
    }
    fn has_tangent(&self) -> bool {
        self.re.has_tangent() || self.eps.has_tangent() || self.eps.primal() != 0.0
    }
    fn sin(self) -> Self {
        Dual::new(self.re.sin(), self.eps * self.re.cos())
    }
    fn cos(self) -> Self {
        Dual::new(self.re.cos(), -(self.eps * self.re.sin()))
    }
    fn exp(self) -> Self {
        let e = self.re.exp();
        Dual::new(e, self.eps * e)
    }
    fn ln(self) -> Self {
        Dual::new(self.re.ln(), self.eps / self.re)
    }
    fn sqrt(self) -> Self {
        let s = self.re.sqrt();
        Dual::new(s, self.eps / (T::constant(2.0) * s))
    }
    fn powi(self, n: i32) -> Self {
        if n == 0 {
            return Dual::constant(1.0);
        }
        let lower = self.re.powi(n - 1);
        Dual::new(lower * self.re, self.eps * T::constant(n as f64) * lower)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chain_rule() {
        let x = Dual::variable(0.7f64);
        let y = (x * x).sin();
        assert!((y.re - 0.49f64.sin()).abs() < 1e-15);
        assert!((y.eps - 2.0 * 0.7 * 0.49f64.cos()).abs() < 1e-15);
    }

    #[test]
    fn quotient_and_powi() {
        let x = Dual::variable(2.0f64);
        let y = Dual::constant(1.0) / x;
        assert_eq!(y.eps, -0.25);
        let c = x.powi(3);
        assert_eq!((c.re, c.eps), (8.0, 12.0));
        let z = Dual::variable(0.0f64).powi(2);
        assert_eq!((z.re, z.eps), (0.0, 0.0));
    }

    #[test]
    fn nested_second_derivative() {
        // d²/dx² x³ at 2 = 12
        let x = Dual::new(Dual::variable(2.0f64), Dual::constant(1.0));
        let y = x.powi(3);
        assert_eq!(y.eps.eps, 12.0);
        assert_eq!(y.eps.re, 12.0);
        assert!(x.has_tangent());
        assert!(!Dual::<f64>::constant(3.0).has_tangent());
    }
}
