//! The basic problem: minimize `L[x] = ∫_{t0}^{t1} f(t, x^σ(t), x^Δ(t)) Δt`
//! over trajectories with `x(t0) = α`, `x(t1) = β`.

pub mod search;
mod solver;
pub mod tridiagonal;

use std::sync::Arc;

use crate::calculus::{self, derivative_at, left_derivative_at, GridFunction};
use crate::error::{Error, Result};
use crate::lagrangian::Lagrangian;
use crate::timescale::TimeScale;

pub use search::{search_spike_counterexample, search_weak_ball, SpikeWitness, WeakBallOutcome};
pub use solver::{solve_el_discrete, Solution, SolveOptions};

/// Boundary tolerance for [`is_admissible`].
pub const ADMISSIBILITY_TOL: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct VariationalProblem {
    scale: Arc<TimeScale>,
    domain: Arc<TimeScale>,
    t0: f64,
    t1: f64,
    lagrangian: Lagrangian,
    alpha: f64,
    beta: f64,
}

impl VariationalProblem {
    pub fn new(
        scale: impl Into<Arc<TimeScale>>,
        t0: f64,
        t1: f64,
        lagrangian: Lagrangian,
        alpha: f64,
        beta: f64,
    ) -> Result<Self> {
        let scale = scale.into();
        if !(alpha.is_finite() && beta.is_finite()) {
            return Err(Error::InvalidParameter(
                "boundary values must be finite".into(),
            ));
        }
        let i0 = scale.require_node(t0)?;
        let i1 = scale.require_node(t1)?;
        if i0 >= i1 {
            return Err(Error::EmptyInterval { t0, t1 });
        }
        let (t0, t1) = (scale.node(i0), scale.node(i1));
        let domain = Arc::new(scale.restrict(t0, t1)?);
        Ok(VariationalProblem {
            scale,
            domain,
            t0,
            t1,
            lagrangian,
            alpha,
            beta,
        })
    }

    pub fn scale(&self) -> &Arc<TimeScale> {
        &self.scale
    }

    /// `[t0, t1] ∩ T`; trajectories live here.
    pub fn domain(&self) -> &Arc<TimeScale> {
        &self.domain
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn t1(&self) -> f64 {
        self.t1
    }

    pub fn lagrangian(&self) -> &Lagrangian {
        &self.lagrangian
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Same problem with a different Lagrangian.
    pub fn with_lagrangian(&self, lagrangian: Lagrangian) -> Self {
        VariationalProblem {
            lagrangian,
            ..self.clone()
        }
    }

    pub fn trajectory(&self, values: Vec<f64>) -> Result<Trajectory> {
        Ok(Trajectory::new(GridFunction::from_values(
            Arc::clone(&self.domain),
            values,
        )?))
    }

    pub fn trajectory_from_fn(&self, f: impl Fn(f64) -> f64) -> Result<Trajectory> {
        Ok(Trajectory::new(GridFunction::from_fn(
            Arc::clone(&self.domain),
            f,
        )?))
    }

    pub fn zero_trajectory(&self) -> Trajectory {
        self.trajectory_from_fn(|_| 0.0).expect("zero is finite")
    }

    /// Straight line from `(t0, α)` to `(t1, β)`.
    pub fn linear_interpolant(&self) -> Result<Trajectory> {
        let (t0, t1, a, b) = (self.t0, self.t1, self.alpha, self.beta);
        let mut x = self.trajectory_from_fn(|t| a + (b - a) * (t - t0) / (t1 - t0))?;
        let n = x.len();
        x.set(0, a);
        x.set(n - 1, b);
        Ok(x)
    }

    fn check(&self, x: &Trajectory) -> Result<()> {
        if Arc::ptr_eq(x.grid().scale(), &self.domain) || **x.grid().scale() == *self.domain {
            Ok(())
        } else {
            Err(Error::InvalidParameter(
                "trajectory is not defined on the problem's interval [t0, t1]".into(),
            ))
        }
    }

    fn kappa_end(&self) -> usize {
        let n = self.domain.len();
        if self.domain.node_is_left_dense(n - 1) {
            n - 1
        } else {
            n - 2
        }
    }
}

/// A candidate `x ∈ C¹_prd` on `[t0, t1] ∩ T`. Break points (registered on
/// the grid function) mark where `x^Δ` does not exist.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    x: GridFunction,
}

impl Trajectory {
    pub fn new(x: GridFunction) -> Self {
        Trajectory { x }
    }

    pub fn grid(&self) -> &GridFunction {
        &self.x
    }

    pub fn into_grid(self) -> GridFunction {
        self.x
    }

    pub fn values(&self) -> &[f64] {
        self.x.values()
    }

    pub fn len(&self) -> usize {
        self.x.values().len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.values().is_empty()
    }

    pub fn with_break(self, t: f64) -> Result<Self> {
        Ok(Trajectory {
            x: self.x.with_break(t)?,
        })
    }

    pub fn break_points(&self) -> Vec<f64> {
        self.x
            .breaks()
            .iter()
            .map(|&i| self.x.scale().node(i))
            .collect()
    }

    fn set(&mut self, i: usize, v: f64) {
        let mut values = self.x.values().to_vec();
        values[i] = v;
        let mut grid =
            GridFunction::from_values(Arc::clone(self.x.scale()), values).expect("finite value");
        for &b in self.x.breaks() {
            grid = grid
                .with_break(self.x.scale().node(b))
                .expect("node of the same scale");
        }
        self.x = grid;
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Admissibility {
    pub admissible: bool,
    pub reasons: Vec<String>,
}

pub fn is_admissible(p: &VariationalProblem, x: &Trajectory) -> Admissibility {
    let mut reasons = Vec::new();
    if p.check(x).is_err() {
        reasons.push("trajectory is defined on a different scale".to_string());
        return Admissibility {
            admissible: false,
            reasons,
        };
    }
    let v = x.values();
    let (left, right) = (v[0], v[v.len() - 1]);
    if (left - p.alpha).abs() > ADMISSIBILITY_TOL {
        reasons.push(format!(
            "left boundary: x({}) = {left}, expected {}",
            p.t0, p.alpha
        ));
    }
    if (right - p.beta).abs() > ADMISSIBILITY_TOL {
        reasons.push(format!(
            "right boundary: x({}) = {right}, expected {}",
            p.t1, p.beta
        ));
    }
    Admissibility {
        admissible: reasons.is_empty(),
        reasons,
    }
}

/// `L[x]`. Dense cells are integrated with the trapezoid rule; across a
/// registered break the cell ending there uses the left limit of `x^Δ` and
/// the cell starting there uses the right limit.
pub fn functional(p: &VariationalProblem, x: &Trajectory) -> Result<f64> {
    p.check(x)?;
    let s = &*p.domain;
    let g = &x.x;
    let f = &p.lagrangian;
    let integrand = |i: usize, slope: f64| f.eval(s.node(i), g.get(s.sigma_index(i)), slope);
    calculus::integrate_cells(
        s,
        0,
        s.len() - 1,
        |i| integrand(i, derivative_at(g, i)?.value),
        |i| {
            if !s.cell_is_dense(i) && i + 1 < s.len() {
                // dense interval ending on a right-scattered point: σ jumps
                // away, but the left limit has x^σ = x and the backward slope
                return f.eval(s.node(i), g.get(i), left_derivative_at(g, i)?.value);
            }
            let slope = if g.is_break(i) {
                left_derivative_at(g, i)?.value
            } else {
                derivative_at(g, i)?.value
            };
            integrand(i, slope)
        },
    )
}

/// Euler-Lagrange residual `f_r^Δ(t) - f_x(t)` along a trajectory, at the
/// points where the composite derivative exists.
#[derive(Debug, Clone, PartialEq)]
pub struct ElResidual {
    pub points: Vec<f64>,
    pub values: Vec<f64>,
}

impl ElResidual {
    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

pub fn el_residual(p: &VariationalProblem, x: &Trajectory) -> Result<ElResidual> {
    p.check(x)?;
    let s = &*p.domain;
    let n = s.len();
    if n < 3 {
        return Err(Error::InsufficientPoints { found: n });
    }
    let g = &x.x;
    let kend = p.kappa_end();
    let mut f_r = vec![0.0; n];
    let mut f_x = vec![0.0; n];
    for i in 0..=kend {
        let slope = derivative_at(g, i)?.value;
        let part = p
            .lagrangian
            .eval_partials(s.node(i), g.get(s.sigma_index(i)), slope)?;
        f_r[i] = part.f_r;
        f_x[i] = part.f_x;
    }
    let mut fr_grid = GridFunction::from_values(Arc::clone(&p.domain), f_r)?;
    for &b in g.breaks() {
        fr_grid = fr_grid.with_break(s.node(b))?;
    }
    let mut out = ElResidual {
        points: Vec::new(),
        values: Vec::new(),
    };
    for (i, fx) in f_x.iter().enumerate().take(kend + 1) {
        let defined = s.cell_is_dense(i) || i == n - 1 || i < kend;
        if !defined {
            continue;
        }
        let d = derivative_at(&fr_grid, i)?.value;
        out.points.push(s.node(i));
        out.values.push(d - fx);
    }
    Ok(out)
}

/// The base trajectory with `d` added at `σ(t_at)`: a spike that keeps
/// `‖·‖₀` small while making `x^Δ` as large as `d / μ`.
pub fn spike_perturbation(
    p: &VariationalProblem,
    base: &Trajectory,
    t_at: f64,
    d: f64,
) -> Result<Trajectory> {
    p.check(base)?;
    if d == 0.0 || !d.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "spike height must be finite and nonzero, got {d}"
        )));
    }
    let s = &*p.domain;
    let i = s.require_node(t_at)?;
    let n = s.len();
    if i == 0 || i == n - 1 {
        return Err(Error::InvalidSpikeLocation(format!(
            "{t_at} is not inside (t0, t1)"
        )));
    }
    if s.cell_is_dense(i) {
        return Err(Error::InvalidSpikeLocation(format!(
            "{t_at} is right-dense"
        )));
    }
    let j = i + 1;
    if j == n - 1 {
        return Err(Error::InvalidSpikeLocation(format!("σ({t_at}) = t1")));
    }
    if s.cell_is_dense(j) {
        return Err(Error::InvalidSpikeLocation(format!(
            "σ({t_at}) = {} is right-dense",
            s.node(j)
        )));
    }
    let mut x = base.clone();
    x.set(j, base.values()[j] + d);
    Ok(x)
}
