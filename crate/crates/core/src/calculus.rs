//! Delta derivative, delta integral and the strong/weak sup-norms over grid
//! functions.
//!
//! At a right-scattered point everything is exact: `x^Δ(t)` is the forward
//! quotient over the jump and `∫_t^{σ(t)} g = μ(t) g(t)`. On dense intervals
//! the derivative is a central difference between neighbouring nodes
//! (one-sided at interval ends and registered break points) and the
//! integral is the composite trapezoid rule.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::timescale::TimeScale;

/// A real function sampled at every node of a time scale.
///
/// Break points mark nodes where the delta derivative does not exist (the
/// finitely many corners allowed for piecewise smooth trajectories). They
/// only change anything at dense nodes; at a right-scattered node the
/// forward quotient is always the derivative.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    scale: Arc<TimeScale>,
    values: Vec<f64>,
    breaks: Vec<usize>,
    name: Option<String>,
}

impl GridFunction {
    pub fn from_values(scale: Arc<TimeScale>, values: Vec<f64>) -> Result<Self> {
        if values.len() != scale.len() {
            return Err(Error::LengthMismatch {
                expected: scale.len(),
                got: values.len(),
            });
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteValue {
                t: scale.node(i),
                value: values[i],
            });
        }
        Ok(GridFunction {
            scale,
            values,
            breaks: Vec::new(),
            name: None,
        })
    }

    pub fn from_fn(scale: Arc<TimeScale>, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = scale.nodes().iter().map(|&t| f(t)).collect();
        Self::from_values(scale, values)
    }

    pub fn constant(scale: Arc<TimeScale>, c: f64) -> Result<Self> {
        Self::from_fn(scale, |_| c)
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    /// Registers `t` as a point where the delta derivative does not exist.
    pub fn with_break(mut self, t: f64) -> Result<Self> {
        let i = self.scale.require_node(t)?;
        if let Err(pos) = self.breaks.binary_search(&i) {
            self.breaks.insert(pos, i);
        }
        Ok(self)
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn scale(&self) -> &Arc<TimeScale> {
        &self.scale
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, i: usize) -> f64 {
        self.values[i]
    }

    /// Node indices of registered break points, ascending.
    pub fn breaks(&self) -> &[usize] {
        &self.breaks
    }

    pub fn is_break(&self, i: usize) -> bool {
        self.breaks.binary_search(&i).is_ok()
    }

    pub fn at(&self, t: f64) -> Result<f64> {
        Ok(self.values[self.scale.require_node(t)?])
    }

    /// `x^σ = x ∘ σ`.
    pub fn shifted(&self) -> GridFunction {
        let values = (0..self.values.len())
            .map(|i| self.values[self.scale.sigma_index(i)])
            .collect();
        GridFunction {
            scale: Arc::clone(&self.scale),
            values,
            breaks: self.breaks.clone(),
            name: None,
        }
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<GridFunction> {
        let mut out = Self::from_values(
            Arc::clone(&self.scale),
            self.values.iter().map(|&v| f(v)).collect(),
        )?;
        out.breaks = self.breaks.clone();
        Ok(out)
    }

    /// Pointwise combination of two functions on the same scale; breaks of
    /// both operands are kept.
    pub fn zip_with(
        &self,
        other: &GridFunction,
        f: impl Fn(f64, f64) -> f64,
    ) -> Result<GridFunction> {
        if !Arc::ptr_eq(&self.scale, &other.scale) && self.scale != other.scale {
            return Err(Error::InvalidParameter(
                "grid functions live on different scales".into(),
            ));
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&a, &b)| f(a, b))
            .collect();
        let mut out = Self::from_values(Arc::clone(&self.scale), values)?;
        out.breaks = self.breaks.clone();
        for &b in &other.breaks {
            if let Err(pos) = out.breaks.binary_search(&b) {
                out.breaks.insert(pos, b);
            }
        }
        Ok(out)
    }

    /// The delta derivative as a grid function. The left-scattered maximum
    /// (outside `T^κ`) gets 0; break points get their right limit.
    pub fn delta(&self) -> Result<GridFunction> {
        let n = self.values.len();
        let values = (0..n)
            .map(|i| match derivative_at(self, i) {
                Ok(d) => d.value,
                Err(Error::AtScaleMaximum { .. }) => 0.0,
                Err(_) => unreachable!("node indices are always in range"),
            })
            .collect();
        GridFunction::from_values(Arc::clone(&self.scale), values)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DerivativeKind {
    /// Forward quotient over a jump, `μ(t) > 0`.
    ExactScattered,
    /// Finite-difference estimate at a right-dense node.
    DenseApprox,
    LeftLimit,
    RightLimit,
    /// Registered break at a dense node; `value` holds the right limit.
    UndefinedAtBreak,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivativeValue {
    pub value: f64,
    pub kind: DerivativeKind,
}

fn quotient(x: &GridFunction, a: usize, b: usize) -> f64 {
    let nodes = x.scale.nodes();
    (x.values[b] - x.values[a]) / (nodes[b] - nodes[a])
}

/// Delta derivative at node `i`.
pub(crate) fn derivative_at(x: &GridFunction, i: usize) -> Result<DerivativeValue> {
    let s = &*x.scale;
    let last = s.len() - 1;
    if !s.cell_is_dense(i) {
        if i < last {
            return Ok(DerivativeValue {
                value: quotient(x, i, i + 1),
                kind: DerivativeKind::ExactScattered,
            });
        }
        // At a left-dense maximum only the left limit is available.
        if s.node_is_left_dense(i) {
            return Ok(DerivativeValue {
                value: quotient(x, i - 1, i),
                kind: DerivativeKind::DenseApprox,
            });
        }
        return Err(Error::AtScaleMaximum { t: s.node(i) });
    }
    if x.is_break(i) {
        return Ok(DerivativeValue {
            value: quotient(x, i, i + 1),
            kind: DerivativeKind::UndefinedAtBreak,
        });
    }
    let value = if s.node_is_left_dense(i) {
        quotient(x, i - 1, i + 1)
    } else {
        quotient(x, i, i + 1)
    };
    Ok(DerivativeValue {
        value,
        kind: DerivativeKind::DenseApprox,
    })
}

pub(crate) fn left_derivative_at(x: &GridFunction, i: usize) -> Result<DerivativeValue> {
    if i == 0 {
        return Err(Error::InvalidParameter(format!(
            "no left limit at the scale minimum {}",
            x.scale.node(0)
        )));
    }
    Ok(DerivativeValue {
        value: quotient(x, i - 1, i),
        kind: DerivativeKind::LeftLimit,
    })
}

pub(crate) fn right_derivative_at(x: &GridFunction, i: usize) -> Result<DerivativeValue> {
    if i + 1 >= x.scale.len() {
        return Err(Error::AtScaleMaximum { t: x.scale.node(i) });
    }
    Ok(DerivativeValue {
        value: quotient(x, i, i + 1),
        kind: DerivativeKind::RightLimit,
    })
}

/// `x^Δ(t)` for `t ∈ T^κ`.
pub fn delta_derivative(x: &GridFunction, t: f64) -> Result<DerivativeValue> {
    derivative_at(x, x.scale.require_node(t)?)
}

/// Left limit `x^Δ(t-)`, taken as the backward quotient to the previous node.
pub fn delta_derivative_left(x: &GridFunction, t: f64) -> Result<DerivativeValue> {
    left_derivative_at(x, x.scale.require_node(t)?)
}

/// Right limit `x^Δ(t+)`, the forward quotient to the next node.
pub fn delta_derivative_right(x: &GridFunction, t: f64) -> Result<DerivativeValue> {
    right_derivative_at(x, x.scale.require_node(t)?)
}

/// Sums the cells between nodes `i0` and `i1`: `μ(t_i) start(i)` over jumps
/// and `h (start(i) + end(i+1)) / 2` over dense cells. `end` should give the
/// left limit, which differs from the value at breaks and at the
/// right-scattered end of a dense interval.
pub(crate) fn integrate_cells(
    scale: &TimeScale,
    i0: usize,
    i1: usize,
    mut start: impl FnMut(usize) -> Result<f64>,
    mut end: impl FnMut(usize) -> Result<f64>,
) -> Result<f64> {
    let nodes = scale.nodes();
    let mut total = 0.0;
    for i in i0..i1 {
        let h = nodes[i + 1] - nodes[i];
        total += if scale.cell_is_dense(i) {
            0.5 * h * (start(i)? + end(i + 1)?)
        } else {
            h * start(i)?
        };
    }
    Ok(total)
}

/// `∫_c^d g(t) Δt`.
pub fn delta_integral(g: &GridFunction, c: f64, d: f64) -> Result<f64> {
    let ic = g.scale.require_node(c)?;
    let id = g.scale.require_node(d)?;
    if ic > id {
        return Err(Error::ReversedBounds { c, d });
    }
    integrate_cells(
        &g.scale,
        ic,
        id,
        |i| Ok(g.values[i]),
        |i| Ok(left_value(g, i)),
    )
}

/// Value approaching node `i` from the left inside a dense interval. At a
/// break, or where the interval ends on a right-scattered point, the stored
/// value can differ from the left limit, so it is extrapolated linearly from
/// the two previous nodes.
fn left_value(g: &GridFunction, i: usize) -> f64 {
    let s = &*g.scale;
    let jump_follows = !s.cell_is_dense(i) && i + 1 < s.len();
    if (g.is_break(i) || jump_follows) && i >= 2 && s.cell_is_dense(i - 2) {
        let (t0, t1, t2) = (s.node(i - 2), s.node(i - 1), s.node(i));
        let slope = (g.values[i - 1] - g.values[i - 2]) / (t1 - t0);
        g.values[i - 1] + slope * (t2 - t1)
    } else {
        g.values[i]
    }
}

/// Strong norm `‖x‖₀ = sup_{t ∈ [t0,t1]^κ} |x^σ(t)|`.
pub fn norm_strong(x: &GridFunction, t0: f64, t1: f64) -> Result<f64> {
    let s = &*x.scale;
    Ok(s.kappa_points(t0, t1)?
        .iter()
        .map(|p| x.values[s.sigma_index(p.index)].abs())
        .fold(0.0, f64::max))
}

/// Weak norm `‖x‖₁ = ‖x‖₀ + sup |x^Δ(t)|`, the second sup skipping the
/// registered break points where `x^Δ` does not exist.
pub fn norm_weak(x: &GridFunction, t0: f64, t1: f64) -> Result<f64> {
    let strong = norm_strong(x, t0, t1)?;
    let mut slope_sup: f64 = 0.0;
    for p in x.scale.kappa_points(t0, t1)? {
        let d = derivative_at(x, p.index)?;
        if d.kind != DerivativeKind::UndefinedAtBreak {
            slope_sup = slope_sup.max(d.value.abs());
        }
    }
    Ok(strong + slope_sup)
}
