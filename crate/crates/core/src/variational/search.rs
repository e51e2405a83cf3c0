//! Falsification searches for local minimality.
//!
//! Neither search can prove a minimum. [`search_spike_counterexample`]
//! tries to break strong minimality with a spike that is small in `‖·‖₀`
//! but steep; [`search_weak_ball`] samples admissible perturbations inside
//! a `‖·‖₁` ball.

use rand::Rng;

use super::{functional, spike_perturbation, Trajectory, VariationalProblem};
use crate::calculus::{norm_weak, GridFunction};
use crate::error::Result;

#[derive(Debug, Clone, PartialEq)]
pub struct SpikeWitness {
    pub t_at: f64,
    pub d: f64,
    /// `d / μ(σ(t_at))`.
    pub ratio: f64,
    pub functional: f64,
    pub baseline: f64,
    pub trajectory: Trajectory,
}

/// Looks for a spike of height `|d| = δ / 2` at some right-scattered
/// `t_at` with `|d| / μ(σ(t_at)) > 1` that lowers the functional below its
/// value at `base`. Candidates are tried from the right end inwards, `+d`
/// before `-d`.
pub fn search_spike_counterexample(
    p: &VariationalProblem,
    base: &Trajectory,
    delta: f64,
) -> Result<Option<SpikeWitness>> {
    let baseline = functional(p, base)?;
    let s = p.domain();
    let n = s.len();
    let height = 0.5 * delta;
    for i in (1..n.saturating_sub(2)).rev() {
        if s.cell_is_dense(i) || s.cell_is_dense(i + 1) {
            continue;
        }
        let mu_next = s.mu_at(i + 1);
        if height / mu_next <= 1.0 {
            continue;
        }
        for d in [height, -height] {
            let x = spike_perturbation(p, base, s.node(i), d)?;
            let value = functional(p, &x)?;
            if value < baseline {
                return Ok(Some(SpikeWitness {
                    t_at: s.node(i),
                    d,
                    ratio: d.abs() / mu_next,
                    functional: value,
                    baseline,
                    trajectory: x,
                }));
            }
        }
    }
    Ok(None)
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeakBallOutcome {
    pub trials: usize,
    /// Smallest `L[base + η] - L[base]` seen.
    pub min_difference: f64,
    /// First perturbed trajectory that lowered the functional by more than
    /// `1e-12`, if any.
    pub witness: Option<Trajectory>,
}

/// Samples `trials` admissible perturbations `η` (zero at both ends) with
/// `‖η‖₁ < radius` and compares `L[base + η]` with `L[base]`.
pub fn search_weak_ball<R: Rng + ?Sized>(
    p: &VariationalProblem,
    base: &Trajectory,
    radius: f64,
    trials: usize,
    rng: &mut R,
) -> Result<WeakBallOutcome> {
    let baseline = functional(p, base)?;
    let s = p.domain();
    let n = s.len();
    let (t0, t1) = (p.t0(), p.t1());
    let mut out = WeakBallOutcome {
        trials: 0,
        min_difference: f64::INFINITY,
        witness: None,
    };
    for _ in 0..trials {
        let mut eta: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        eta[0] = 0.0;
        eta[n - 1] = 0.0;
        let norm = norm_weak(&GridFunction::from_values(s.clone(), eta.clone())?, t0, t1)?;
        if norm == 0.0 {
            continue;
        }
        let scale = radius * rng.gen_range(0.0..1.0) / norm;
        let values = base
            .values()
            .iter()
            .zip(&eta)
            .map(|(b, e)| b + scale * e)
            .collect();
        let x = p.trajectory(values)?;
        let diff = functional(p, &x)? - baseline;
        out.trials += 1;
        out.min_difference = out.min_difference.min(diff);
        if diff < -1e-12 && out.witness.is_none() {
            out.witness = Some(x);
        }
    }
    Ok(out)
}
