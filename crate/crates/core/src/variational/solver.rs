//! Damped Newton solve of the discrete Euler-Lagrange equations.
//!
//! On nodes `t_0 < ... < t_{n-1}` with slopes `r_k = (x_{k+1} - x_k) / μ_k`,
//! the residual at `t_i` is `(f_r[i+1] - f_r[i]) / μ_i - f_x[i]` for
//! `i = 0..n-2`, where `f_·[k]` is evaluated at `(t_k, x_{k+1}, r_k)`. That
//! gives `n - 2` equations in the `n - 2` interior unknowns. Residual `i`
//! only touches `x_i, x_{i+1}, x_{i+2}`, so the Jacobian is tridiagonal and
//! three dual-number passes with unknowns seeded modulo 3 recover it.

use super::{tridiagonal, Trajectory, VariationalProblem};
use crate::error::{Error, Result};
use crate::lagrangian::{Dual, Scalar};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    pub max_iter: usize,
    /// Convergence threshold on the residual max-norm.
    pub tol: f64,
    pub max_halvings: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            max_iter: 100,
            tol: 1e-10,
            max_halvings: 30,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub trajectory: Trajectory,
    pub iterations: usize,
    pub residual: f64,
}

fn residual<S: Scalar>(p: &VariationalProblem, x: &[S]) -> Result<Vec<S>> {
    let nodes = p.domain.nodes();
    let n = nodes.len();
    let f = &p.lagrangian;
    let mut f_r = Vec::with_capacity(n - 1);
    let mut f_x = Vec::with_capacity(n - 1);
    for k in 0..n - 1 {
        let mu = S::constant(nodes[k + 1] - nodes[k]);
        let t = S::constant(nodes[k]);
        let slope = (x[k + 1] - x[k]) / mu;
        f_r.push(f.with_r_tangent(t, x[k + 1], slope)?.1);
        f_x.push(f.with_x_tangent(t, x[k + 1], slope)?.1);
    }
    Ok((0..n - 2)
        .map(|i| (f_r[i + 1] - f_r[i]) / S::constant(nodes[i + 1] - nodes[i]) - f_x[i])
        .collect())
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, e| m.max(e.abs()))
}

/// Solves `el_residual = 0` for the interior values with `x(t0) = α` and
/// `x(t1) = β` pinned. Starts from `x_init` or the linear interpolant.
pub fn solve_el_discrete(
    p: &VariationalProblem,
    x_init: Option<&Trajectory>,
    opts: SolveOptions,
) -> Result<Solution> {
    if !p.domain.is_discrete() {
        return Err(Error::DenseScale);
    }
    let n = p.domain.len();
    if n < 3 {
        return Err(Error::InsufficientPoints { found: n });
    }
    let mut x: Vec<f64> = match x_init {
        Some(init) => {
            p.check(init)?;
            init.values().to_vec()
        }
        None => p.linear_interpolant()?.values().to_vec(),
    };
    x[0] = p.alpha;
    x[n - 1] = p.beta;
    let m = n - 2;

    let mut e = residual(p, &x)?;
    let mut norm = max_abs(&e);
    let mut iterations = 0;
    while norm > opts.tol {
        if iterations == opts.max_iter {
            return Err(Error::NonConvergence {
                iterations,
                residual: norm,
                best: x,
            });
        }
        iterations += 1;

        let mut lower = vec![0.0; m.saturating_sub(1)];
        let mut diag = vec![0.0; m];
        let mut upper = vec![0.0; m.saturating_sub(1)];
        for color in 0..3 {
            let seeded: Vec<Dual<f64>> = x
                .iter()
                .enumerate()
                .map(|(j, &v)| {
                    let unknown = j >= 1 && j <= m && (j - 1) % 3 == color;
                    Dual::new(v, if unknown { 1.0 } else { 0.0 })
                })
                .collect();
            let de = residual(p, &seeded)?;
            for (i, ei) in de.iter().enumerate() {
                for u in i.saturating_sub(1)..=(i + 1).min(m - 1) {
                    if u % 3 != color {
                        continue;
                    }
                    match u as isize - i as isize {
                        -1 => lower[i - 1] = ei.eps,
                        0 => diag[i] = ei.eps,
                        _ => upper[i] = ei.eps,
                    }
                }
            }
        }
        let rhs: Vec<f64> = e.iter().map(|v| -v).collect();
        let dx =
            tridiagonal::solve(&lower, &diag, &upper, &rhs).ok_or(Error::SingularJacobian {
                iteration: iterations,
            })?;

        let mut step = 1.0;
        let mut accepted = None;
        for _ in 0..=opts.max_halvings {
            let mut trial = x.clone();
            for (u, d) in dx.iter().enumerate() {
                trial[u + 1] += step * d;
            }
            if let Ok(te) = residual(p, &trial) {
                let tn = max_abs(&te);
                if tn.is_finite() && tn < norm {
                    accepted = Some((trial, te, tn));
                    break;
                }
            }
            step *= 0.5;
        }
        match accepted {
            Some((trial, te, tn)) => {
                x = trial;
                e = te;
                norm = tn;
            }
            None => {
                return Err(Error::NonConvergence {
                    iterations,
                    residual: norm,
                    best: x,
                })
            }
        }
    }

    Ok(Solution {
        trajectory: p.trajectory(x)?,
        iterations,
        residual: norm,
    })
}
