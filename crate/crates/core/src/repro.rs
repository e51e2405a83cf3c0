//! Built-in reproductions with their expected outcomes.
//!
//! * `example-3.2`: `f = r² - r⁴` on the harmonic scale. The zero
//!   trajectory is a weak local minimum but not a strong one.
//! * `discrete-z`: `f = r²` on `{0, ..., 4}`, where the extremal is `x(t) = t`.
//! * `q-scale`: delta calculus on `{1, 2, 4, 8, 16}`.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::calculus::{delta_derivative, delta_integral, GridFunction};
use crate::error::{Error, Result};
use crate::lagrangian::Lagrangian;
use crate::report::CheckResult;
use crate::timescale::TimeScale;
use crate::variational::{
    functional, search_spike_counterexample, solve_el_discrete, spike_perturbation, SolveOptions,
    VariationalProblem,
};
use crate::weierstrass::{
    check_convexity_condition, excess_samples, uniform_grid, weierstrass_scan, ConvexitySamples,
    DEFAULT_TOL,
};

pub const EXAMPLES: [&str; 3] = ["example-3.2", "discrete-z", "q-scale"];

/// Runs one reproduction, or all of them for `"all"`.
pub fn run(id: &str) -> Result<Vec<CheckResult>> {
    match id {
        "all" => Ok(EXAMPLES
            .iter()
            .flat_map(|e| run(e).unwrap_or_default())
            .collect()),
        "example-3.2" => Ok(example_3_2()),
        "discrete-z" => Ok(discrete_z()),
        "q-scale" => Ok(q_scale()),
        other => Err(Error::InvalidParameter(format!(
            "unknown example id {other:?}; expected one of {}, all",
            EXAMPLES.join(", ")
        ))),
    }
}

/// Turns a check body into a [`CheckResult`]; errors count as failures.
fn check(example: &str, name: &str, body: impl FnOnce() -> Result<(bool, String)>) -> CheckResult {
    let (passed, detail) = body().unwrap_or_else(|e| (false, format!("error: {e}")));
    CheckResult {
        example: example.into(),
        name: name.into(),
        passed,
        detail,
    }
}

fn ms(d: Duration) -> f64 {
    d.as_secs_f64() * 1e3
}

/// `f = r² - r⁴`, `[0, 1]`, `x(0) = x(1) = 0` on the harmonic scale.
pub fn example_3_2_problem(n_max: usize) -> Result<VariationalProblem> {
    VariationalProblem::new(
        TimeScale::harmonic(n_max)?,
        0.0,
        1.0,
        Lagrangian::parse("r^2 - r^4")?,
        0.0,
        0.0,
    )
}

/// Random admissible trajectory with every slope in `[-1, 1]`. Slopes are
/// drawn independently, then the side carrying the larger `Σ μ r` is
/// shrunk so the trajectory returns to zero.
pub fn random_unit_slope_trajectory<R: Rng + ?Sized>(
    p: &VariationalProblem,
    rng: &mut R,
) -> Result<Vec<f64>> {
    let nodes = p.domain().nodes();
    let mu: Vec<f64> = nodes.windows(2).map(|w| w[1] - w[0]).collect();
    let mut slopes: Vec<f64> = mu.iter().map(|_| rng.gen_range(-1.0..=1.0)).collect();
    let pos: f64 = mu
        .iter()
        .zip(&slopes)
        .filter(|(_, s)| **s > 0.0)
        .map(|(m, s)| m * s)
        .sum();
    let neg: f64 = mu
        .iter()
        .zip(&slopes)
        .filter(|(_, s)| **s < 0.0)
        .map(|(m, s)| -m * s)
        .sum();
    let (shrink_pos, factor) = if pos > neg {
        (true, neg / pos)
    } else {
        (false, if neg > 0.0 { pos / neg } else { 1.0 })
    };
    for s in &mut slopes {
        if (*s > 0.0) == shrink_pos && *s != 0.0 {
            *s *= factor;
        }
    }
    let mut x = Vec::with_capacity(nodes.len());
    x.push(p.alpha());
    for (m, s) in mu.iter().zip(&slopes) {
        x.push(x.last().unwrap() + m * s);
    }
    *x.last_mut().unwrap() = p.beta();
    Ok(x)
}

fn example_3_2() -> Vec<CheckResult> {
    const ID: &str = "example-3.2";
    let mut out = Vec::new();

    out.push(check(ID, "zero trajectory has L = 0 (n_max = 50)", || {
        let p = example_3_2_problem(50)?;
        let l = functional(&p, &p.zero_trajectory())?;
        Ok((l.abs() <= 1e-14, format!("L = {l:e}")))
    }));

    out.push(check(
        ID,
        "spike t = 1/3, d = 1 gives L = -210 - 6 = -216",
        || {
            let p = example_3_2_problem(50)?;
            let start = Instant::now();
            let x = spike_perturbation(&p, &p.zero_trajectory(), 1.0 / 3.0, 1.0)?;
            let l = functional(&p, &x)?;
            let elapsed = start.elapsed();
            let s = p.domain();
            let i = s.require_node(1.0 / 3.0)?;
            let (mu0, mu1) = (s.mu_at(i), s.mu_at(i + 1));
            let oracle = |mu: f64, d: f64| mu * ((d / mu).powi(2) - (d / mu).powi(4));
            let (a, b) = (oracle(mu0, 1.0), oracle(mu1, -1.0));
            // the same two terms as the library integrates them
            let integrand = |c: f64, d: f64| -> Result<f64> {
                let f = p.lagrangian();
                let g = x.grid();
                let dx = g.delta()?;
                let sig = g.shifted();
                let values = (0..s.len())
                    .map(|k| f.eval(s.node(k), sig.get(k), dx.get(k)))
                    .collect::<Result<Vec<f64>>>()?;
                delta_integral(&GridFunction::from_values(s.clone(), values)?, c, d)
            };
            let (la, lb) = (integrand(1.0 / 3.0, 0.5)?, integrand(0.5, 1.0)?);
            let ok = (l + 216.0).abs() <= 1e-9
                && (a + 210.0).abs() <= 1e-9
                && (b + 6.0).abs() <= 1e-9
                && (la - a).abs() <= 1e-9
                && (lb - b).abs() <= 1e-9
                && elapsed < Duration::from_millis(1);
            Ok((
                ok,
                format!(
                    "L = {l}, terms {la} + {lb}, oracle {a} + {b}, {:.3} ms",
                    ms(elapsed)
                ),
            ))
        },
    ));

    out.push(check(
        ID,
        "spike search beats every δ in {0.5, 0.1, 0.01} (n_max = 200)",
        || {
            let p = example_3_2_problem(200)?;
            let zero = p.zero_trajectory();
            let start = Instant::now();
            let mut ok = true;
            let mut found = Vec::new();
            for delta in [0.5, 0.1, 0.01] {
                match search_spike_counterexample(&p, &zero, delta)? {
                    Some(w) => {
                        ok &= w.d.abs() < delta && w.ratio > 1.0 && w.functional < 0.0;
                        found.push(format!(
                            "δ={delta}: t={:.6} d={} L={:.3e}",
                            w.t_at, w.d, w.functional
                        ));
                    }
                    None => {
                        ok = false;
                        found.push(format!("δ={delta}: none"));
                    }
                }
            }
            let elapsed = start.elapsed();
            ok &= elapsed < Duration::from_millis(10);
            Ok((ok, format!("{}; {:.3} ms", found.join("; "), ms(elapsed))))
        },
    ));

    out.push(check(
        ID,
        "1000 random trajectories with |x^Δ| <= 1 have L >= -1e-12",
        || {
            let p = example_3_2_problem(50)?;
            let mut rng = ChaCha8Rng::seed_from_u64(0x32);
            let start = Instant::now();
            let mut worst = f64::INFINITY;
            for _ in 0..1000 {
                let x = p.trajectory(random_unit_slope_trajectory(&p, &mut rng)?)?;
                worst = worst.min(functional(&p, &x)?);
            }
            let elapsed = start.elapsed();
            let ok = worst >= -1e-12 && elapsed < Duration::from_secs(1);
            Ok((ok, format!("min L = {worst:e}, {:.1} ms", ms(elapsed))))
        },
    ));

    out.push(check(
        ID,
        "scan of zero trajectory: E = -12 at q = ±2 on every right-scattered point",
        || {
            let p = example_3_2_problem(50)?;
            let zero = p.zero_trajectory();
            let grid = uniform_grid(-5.0, 5.0, 41);
            let samples = excess_samples(&p, &zero, &grid)?;
            let violations = weierstrass_scan(&p, &zero, &grid, DEFAULT_TOL)?;
            let s = p.domain();
            let mut points = 0;
            let mut ok = true;
            for pt in s.kappa_points(p.t0(), p.t1())? {
                if s.mu_at(pt.index) == 0.0 {
                    continue;
                }
                points += 1;
                for q in [-2.0, 2.0] {
                    let hit = |v: &[crate::weierstrass::ExcessSample]| {
                        v.iter()
                            .any(|e| e.t == pt.t && e.q == q && (e.e + 12.0).abs() <= 1e-12)
                    };
                    ok &= hit(&samples) && hit(&violations);
                }
            }
            Ok((
                ok && points > 0,
                format!("{points} points, {} violations", violations.len()),
            ))
        },
    ));

    out.push(check(ID, "convexity check finds a counterexample", || {
        let p = example_3_2_problem(50)?;
        let c = ConvexitySamples::default();
        let r = check_convexity_condition(&p, &c.x, &c.r, &c.gamma)?;
        let detail = match &r.counterexample {
            Some(w) => format!(
                "t={:.6} r1={} r2={} γ={}: {} <= {} fails",
                w.t, w.r1, w.r2, w.gamma, w.lhs, w.rhs
            ),
            None => "no counterexample".into(),
        };
        Ok((!r.ok && r.counterexample.is_some(), detail))
    }));

    out
}

fn discrete_z() -> Vec<CheckResult> {
    const ID: &str = "discrete-z";
    let mut out = Vec::new();
    let problem = || {
        VariationalProblem::new(
            TimeScale::uniform(0.0, 4.0, 1.0)?,
            0.0,
            4.0,
            Lagrangian::parse("r^2")?,
            0.0,
            4.0,
        )
    };

    out.push(check(
        ID,
        "solver returns x(t) = t with EL residual <= 1e-10",
        || {
            let p = problem()?;
            let sol = solve_el_discrete(&p, None, SolveOptions::default())?;
            let err = p
                .domain()
                .nodes()
                .iter()
                .zip(sol.trajectory.values())
                .fold(0.0f64, |m, (t, x)| m.max((t - x).abs()));
            let res = crate::variational::el_residual(&p, &sol.trajectory)?.max_abs();
            Ok((
                err <= 1e-12 && res <= 1e-10,
                format!(
                    "max |x - t| = {err:e}, residual {res:e}, {} iterations",
                    sol.iterations
                ),
            ))
        },
    ));

    out.push(check(
        ID,
        "scan over q in [-10, 10] (41 points) finds no violation",
        || {
            let p = problem()?;
            let sol = solve_el_discrete(&p, None, SolveOptions::default())?;
            let grid = uniform_grid(-10.0, 10.0, 41);
            let violations = weierstrass_scan(&p, &sol.trajectory, &grid, DEFAULT_TOL)?;
            let samples = excess_samples(&p, &sol.trajectory, &grid)?;
            let closed_form = samples
                .iter()
                .fold(0.0f64, |m, s| m.max((s.e - (s.q - s.r).powi(2)).abs()));
            Ok((
                violations.is_empty() && closed_form <= 1e-12,
                format!(
                    "{} samples, {} violations, max |E - (q-r)^2| = {closed_form:e}",
                    samples.len(),
                    violations.len()
                ),
            ))
        },
    ));

    out
}

fn q_scale() -> Vec<CheckResult> {
    const ID: &str = "q-scale";
    let mut out = Vec::new();

    out.push(check(ID, "x = t^2 has x^Δ = (q+1)t = 3t", || {
        let s = std::sync::Arc::new(TimeScale::geometric(1.0, 16.0, 2.0)?);
        let x = GridFunction::from_fn(s.clone(), |t| t * t)?;
        let mut err = 0.0f64;
        for &t in &s.nodes()[..s.len() - 1] {
            err = err.max((delta_derivative(&x, t)?.value - 3.0 * t).abs());
        }
        Ok((
            err <= 1e-12,
            format!("max error {err:e} over {} points", s.len() - 1),
        ))
    }));

    out.push(check(ID, "functional of f = 1 is Σ (q-1)t = 15", || {
        let p = VariationalProblem::new(
            TimeScale::geometric(1.0, 16.0, 2.0)?,
            1.0,
            16.0,
            Lagrangian::parse("1")?,
            0.0,
            0.0,
        )?;
        let l = functional(&p, &p.zero_trajectory())?;
        Ok(((l - 15.0).abs() <= 1e-12, format!("L = {l}")))
    }));

    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_reproductions_pass() {
        let checks = run("all").unwrap();
        assert_eq!(checks.len(), 10);
        for c in &checks {
            assert!(c.passed, "{}: {} ({})", c.example, c.name, c.detail);
        }
    }

    #[test]
    fn unknown_id() {
        assert!(run("example-9").is_err());
    }

    #[test]
    fn random_trajectories_are_admissible() {
        let p = example_3_2_problem(20).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let x = random_unit_slope_trajectory(&p, &mut rng).unwrap();
            assert_eq!(x[0], 0.0);
            assert_eq!(*x.last().unwrap(), 0.0);
            let nodes = p.domain().nodes();
            for k in 0..x.len() - 1 {
                assert!(((x[k + 1] - x[k]) / (nodes[k + 1] - nodes[k])).abs() <= 1.0 + 1e-9);
            }
        }
    }
}
