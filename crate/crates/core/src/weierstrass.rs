//! Weierstrass necessary condition for strong local minima on time scales.
//!
//! If `f` satisfies the μ-weighted convexity hypothesis
//! `μ(t) f(t, x, γ r1 + (1-γ) r2) <= μ(t) (γ f(t, x, r1) + (1-γ) f(t, x, r2))`
//! and `x̄` is a strong local minimum, then the excess function
//! `E(t, x, r, q) = f(t, x, q) - f(t, x, r) - (q - r) f_r(t, x, r)` is
//! nonnegative along `(t, x̄^σ(t), x̄^Δ(t))` for every `q`. At right-dense
//! points the hypothesis is vacuous (`μ = 0`); at right-scattered points it
//! is plain convexity in `r`.
//!
//! The checks here are sampled: a violation of the condition under a
//! satisfied hypothesis shows the candidate is *not* a strong minimum,
//! while a clean scan proves nothing.

use serde::{Deserialize, Serialize};

use crate::calculus::{derivative_at, left_derivative_at, right_derivative_at};
use crate::error::{Error, Result};
use crate::lagrangian::Lagrangian;
use crate::variational::{el_residual, Trajectory, VariationalProblem};

/// Default threshold below which an excess value counts as a violation.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Slack allowed in the sampled convexity inequality.
pub const CONVEXITY_SLACK: f64 = 1e-10;

/// Number of points in the default comparison-slope grid.
pub const DEFAULT_Q_COUNT: usize = 41;

/// `E(t, x, r, q)`.
pub fn excess(l: &Lagrangian, t: f64, x: f64, r: f64, q: f64) -> Result<f64> {
    let (f_r_val, f_r) = l.with_r_tangent(t, x, r)?;
    let f_q = l.eval(t, x, q)?;
    Ok(f_q - f_r_val - (q - r) * f_r)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SlopeKind {
    TwoSided,
    Left,
    Right,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExcessSample {
    pub t: f64,
    pub x_sigma: f64,
    pub r: f64,
    pub q: f64,
    #[serde(rename = "E")]
    pub e: f64,
    pub slope_kind: SlopeKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvexityCounterexample {
    pub t: f64,
    pub x: f64,
    pub r1: f64,
    pub r2: f64,
    pub gamma: f64,
    /// `f(t, x, γ r1 + (1-γ) r2)`.
    pub lhs: f64,
    /// `γ f(t, x, r1) + (1-γ) f(t, x, r2)`.
    pub rhs: f64,
}

/// Outcome of the sampled convexity check. `ok` means "no violation
/// found", not "convex".
#[derive(Debug, Clone, PartialEq)]
pub struct ConvexityReport {
    pub ok: bool,
    pub counterexample: Option<ConvexityCounterexample>,
    /// Number of inequality instances evaluated.
    pub checked: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvexitySamples {
    pub x: Vec<f64>,
    pub r: Vec<f64>,
    pub gamma: Vec<f64>,
}

impl Default for ConvexitySamples {
    fn default() -> Self {
        ConvexitySamples {
            x: vec![-2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0],
            r: (-10..=10).map(|k| k as f64 * 0.5).collect(),
            gamma: vec![0.25, 0.5, 0.75],
        }
    }
}

/// Tests the convexity hypothesis at every right-scattered point of
/// `[t0, t1]^κ` over all sampled `(x, r1, r2, γ)`; stops at the first
/// violation.
pub fn check_convexity_condition(
    p: &VariationalProblem,
    x_samples: &[f64],
    r_samples: &[f64],
    gamma_samples: &[f64],
) -> Result<ConvexityReport> {
    if x_samples.is_empty() || r_samples.is_empty() || gamma_samples.is_empty() {
        return Err(Error::InvalidParameter(
            "convexity sample lists must be nonempty".into(),
        ));
    }
    if let Some(g) = gamma_samples.iter().find(|g| !(0.0..=1.0).contains(*g)) {
        return Err(Error::InvalidParameter(format!(
            "γ = {g} is outside [0, 1]"
        )));
    }
    let f = p.lagrangian();
    let s = p.domain();
    let mut checked = 0;
    for pt in s.kappa_points(p.t0(), p.t1())? {
        if pt.dense || s.mu_at(pt.index) == 0.0 {
            continue;
        }
        let t = pt.t;
        for &x in x_samples {
            let f_at: Vec<f64> = r_samples
                .iter()
                .map(|&r| f.eval(t, x, r))
                .collect::<Result<_>>()?;
            for (a, &r1) in r_samples.iter().enumerate() {
                for (b, &r2) in r_samples.iter().enumerate().skip(a + 1) {
                    for &gamma in gamma_samples {
                        let lhs = f.eval(t, x, gamma * r1 + (1.0 - gamma) * r2)?;
                        let rhs = gamma * f_at[a] + (1.0 - gamma) * f_at[b];
                        checked += 1;
                        if lhs > rhs + CONVEXITY_SLACK {
                            return Ok(ConvexityReport {
                                ok: false,
                                counterexample: Some(ConvexityCounterexample {
                                    t,
                                    x,
                                    r1,
                                    r2,
                                    gamma,
                                    lhs,
                                    rhs,
                                }),
                                checked,
                            });
                        }
                    }
                }
            }
        }
    }
    Ok(ConvexityReport {
        ok: true,
        counterexample: None,
        checked,
    })
}

/// Slopes used for the scan at each point of `[t0, t1]^κ`: the two-sided
/// `x^Δ(t)`, both one-sided limits at registered breaks, and the left limit
/// at a left-dense `t1`.
fn scan_slopes(p: &VariationalProblem, x: &Trajectory) -> Result<Vec<(usize, f64, SlopeKind)>> {
    let s = p.domain();
    let g = x.grid();
    let last = s.len() - 1;
    let mut out = Vec::new();
    for pt in s.kappa_points(p.t0(), p.t1())? {
        let i = pt.index;
        if i == last {
            out.push((i, left_derivative_at(g, i)?.value, SlopeKind::Left));
        } else if pt.dense && g.is_break(i) {
            if i > 0 {
                out.push((i, left_derivative_at(g, i)?.value, SlopeKind::Left));
            }
            out.push((i, right_derivative_at(g, i)?.value, SlopeKind::Right));
        } else {
            out.push((i, derivative_at(g, i)?.value, SlopeKind::TwoSided));
        }
    }
    Ok(out)
}

/// Observed slopes `x^Δ` along the candidate (one-sided ones included).
pub fn candidate_slopes(p: &VariationalProblem, x: &Trajectory) -> Result<Vec<f64>> {
    Ok(scan_slopes(p, x)?.into_iter().map(|(_, r, _)| r).collect())
}

/// `DEFAULT_Q_COUNT` points spread uniformly over `mean ± 5 sd` of the
/// observed slopes (sd taken as 1 when all slopes agree), merged with the
/// slopes themselves.
pub fn default_q_grid(slopes: &[f64]) -> Vec<f64> {
    let n = slopes.len().max(1) as f64;
    let mean = slopes.iter().sum::<f64>() / n;
    let var = slopes.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / n;
    let sd = if var > 0.0 { var.sqrt() } else { 1.0 };
    let mut grid = uniform_grid(mean - 5.0 * sd, mean + 5.0 * sd, DEFAULT_Q_COUNT);
    grid.extend_from_slice(slopes);
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    grid
}

/// `count` evenly spaced points from `lo` to `hi` inclusive.
pub fn uniform_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let h = (hi - lo) / (count - 1) as f64;
            let mut g: Vec<f64> = (0..count).map(|k| lo + k as f64 * h).collect();
            g[count - 1] = hi;
            g
        }
    }
}

/// Every excess sample along the candidate, ordered by `(t, slope, q)`.
pub fn excess_samples(
    p: &VariationalProblem,
    x: &Trajectory,
    q_grid: &[f64],
) -> Result<Vec<ExcessSample>> {
    if q_grid.is_empty() {
        return Err(Error::InvalidParameter("q grid must be nonempty".into()));
    }
    let s = p.domain();
    let g = x.grid();
    let f = p.lagrangian();
    let mut out = Vec::new();
    for (i, r, kind) in scan_slopes(p, x)? {
        let t = s.node(i);
        let x_sigma = g.get(s.sigma_index(i));
        for &q in q_grid {
            out.push(ExcessSample {
                t,
                x_sigma,
                r,
                q,
                e: excess(f, t, x_sigma, r, q)?,
                slope_kind: kind,
            });
        }
    }
    Ok(out)
}

/// Samples with `E < -tol`.
pub fn weierstrass_scan(
    p: &VariationalProblem,
    x: &Trajectory,
    q_grid: &[f64],
    tol: f64,
) -> Result<Vec<ExcessSample>> {
    if tol.is_nan() || tol < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "tolerance must be nonnegative, got {tol}"
        )));
    }
    let mut v = excess_samples(p, x, q_grid)?;
    v.retain(|s| s.e < -tol);
    Ok(v)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    ConsistentWithStrongMin,
    NecessaryConditionViolated,
    HypothesisNotMet,
}

impl Verdict {
    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::ConsistentWithStrongMin => 0,
            Verdict::NecessaryConditionViolated => 3,
            Verdict::HypothesisNotMet => 4,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::ConsistentWithStrongMin => "consistent-with-strong-min",
            Verdict::NecessaryConditionViolated => "necessary-condition-violated",
            Verdict::HypothesisNotMet => "hypothesis-not-met",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisOptions {
    pub convexity: ConvexitySamples,
    pub tol: f64,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        AnalysisOptions {
            convexity: ConvexitySamples::default(),
            tol: DEFAULT_TOL,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisReport {
    pub el_max_residual: f64,
    pub convexity: ConvexityReport,
    pub weierstrass_violations: Vec<ExcessSample>,
    pub verdict: Verdict,
}

/// Runs the Euler-Lagrange residual, the convexity check and the excess
/// scan. `q_grid = None` uses [`default_q_grid`] over the candidate's
/// slopes.
pub fn classify_candidate(
    p: &VariationalProblem,
    x: &Trajectory,
    q_grid: Option<&[f64]>,
    opts: &AnalysisOptions,
) -> Result<AnalysisReport> {
    let el_max_residual = el_residual(p, x)?.max_abs();
    let samples = &opts.convexity;
    let convexity = check_convexity_condition(p, &samples.x, &samples.r, &samples.gamma)?;
    let default_grid;
    let q_grid = match q_grid {
        Some(g) => g,
        None => {
            default_grid = default_q_grid(&candidate_slopes(p, x)?);
            &default_grid
        }
    };
    let weierstrass_violations = weierstrass_scan(p, x, q_grid, opts.tol)?;
    let verdict = if !convexity.ok {
        Verdict::HypothesisNotMet
    } else if !weierstrass_violations.is_empty() {
        Verdict::NecessaryConditionViolated
    } else {
        Verdict::ConsistentWithStrongMin
    };
    Ok(AnalysisReport {
        el_max_residual,
        convexity,
        weierstrass_violations,
        verdict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::timescale::TimeScale;
    use crate::variational::{solve_el_discrete, SolveOptions};
    use proptest::prelude::*;

    fn problem(scale: TimeScale, src: &str, alpha: f64, beta: f64) -> VariationalProblem {
        let (a, b) = (scale.min(), scale.max());
        VariationalProblem::new(scale, a, b, Lagrangian::parse(src).unwrap(), alpha, beta).unwrap()
    }

    #[test]
    fn excess_examples() {
        let l = Lagrangian::parse("r^2 - r^4").unwrap();
        assert_eq!(excess(&l, 0.0, 0.0, 0.0, 2.0).unwrap(), -12.0);
        assert_eq!(excess(&l, 0.3, 1.0, 0.7, 0.7).unwrap(), 0.0);
        let sq = Lagrangian::parse("r^2").unwrap();
        assert_eq!(excess(&sq, 0.0, 0.0, 1.5, -0.5).unwrap(), 4.0);
    }

    #[test]
    fn convexity_examples() {
        let p = problem(TimeScale::harmonic(10).unwrap(), "r^2 - r^4", 0.0, 0.0);
        let rep = check_convexity_condition(&p, &[0.0], &[-2.0, 2.0], &[0.5]).unwrap();
        assert!(!rep.ok);
        let c = rep.counterexample.unwrap();
        assert_eq!(
            (c.r1, c.r2, c.gamma, c.lhs, c.rhs),
            (-2.0, 2.0, 0.5, 0.0, -12.0)
        );

        let q = problem(TimeScale::harmonic(10).unwrap(), "r^2", 0.0, 0.0);
        let s = ConvexitySamples::default();
        assert!(
            check_convexity_condition(&q, &s.x, &s.r, &s.gamma)
                .unwrap()
                .ok
        );

        let dense = problem(
            TimeScale::dense(0.0, 1.0, 20).unwrap(),
            "r^2 - r^4",
            0.0,
            0.0,
        );
        let rep = check_convexity_condition(&dense, &s.x, &s.r, &s.gamma).unwrap();
        assert!(rep.ok);
        assert_eq!(rep.checked, 0);

        assert!(check_convexity_condition(&q, &[], &s.r, &s.gamma).is_err());
        assert!(check_convexity_condition(&q, &s.x, &s.r, &[1.5]).is_err());
    }

    #[test]
    fn example_scan_violations() {
        let p = problem(TimeScale::harmonic(10).unwrap(), "r^2 - r^4", 0.0, 0.0);
        let v = weierstrass_scan(&p, &p.zero_trajectory(), &[-2.0, 0.0, 2.0], DEFAULT_TOL).unwrap();
        assert_eq!(v.len(), 2 * 10);
        assert!(v.iter().all(|s| s.e == -12.0 && s.q.abs() == 2.0));
    }

    #[test]
    fn quadratic_extremal_scans_clean() {
        let p = problem(TimeScale::uniform(0.0, 4.0, 1.0).unwrap(), "r^2", 0.0, 4.0);
        let x = p.trajectory_from_fn(|t| t).unwrap();
        let grid = uniform_grid(-10.0, 10.0, 41);
        assert!(weierstrass_scan(&p, &x, &grid, DEFAULT_TOL)
            .unwrap()
            .is_empty());
        assert!(weierstrass_scan(&p, &x, &[1.0], 0.0).unwrap().is_empty());
        let rep = classify_candidate(&p, &x, None, &AnalysisOptions::default()).unwrap();
        assert_eq!(rep.verdict, Verdict::ConsistentWithStrongMin);
        assert_eq!(rep.el_max_residual, 0.0);
    }

    #[test]
    fn classification_outcomes() {
        let p = problem(TimeScale::harmonic(10).unwrap(), "r^2 - r^4", 0.0, 0.0);
        let rep = classify_candidate(&p, &p.zero_trajectory(), None, &AnalysisOptions::default())
            .unwrap();
        assert_eq!(rep.verdict, Verdict::HypothesisNotMet);
        assert!(!rep.weierstrass_violations.is_empty());
        assert_eq!(rep.verdict.exit_code(), 4);

        let q = problem(TimeScale::uniform(0.0, 4.0, 1.0).unwrap(), "r^2", 0.0, 4.0);
        let bent = q.trajectory(vec![0.0, 2.0, 2.0, 3.0, 4.0]).unwrap();
        let rep = classify_candidate(&q, &bent, None, &AnalysisOptions::default()).unwrap();
        assert!(rep.el_max_residual > 0.0);
        assert_eq!(rep.verdict, Verdict::ConsistentWithStrongMin);
    }

    #[test]
    fn non_convex_on_dense_scale_is_violated() {
        // Hypothesis vacuous on a dense scale; E < 0 then certifies failure.
        let p = problem(
            TimeScale::dense(0.0, 1.0, 20).unwrap(),
            "r^2 - r^4",
            0.0,
            0.0,
        );
        let rep = classify_candidate(&p, &p.zero_trajectory(), None, &AnalysisOptions::default())
            .unwrap();
        assert_eq!(rep.verdict, Verdict::NecessaryConditionViolated);
        assert_eq!(rep.verdict.exit_code(), 3);
    }

    #[test]
    fn break_points_scan_both_sides() {
        let p = problem(TimeScale::dense(0.0, 1.0, 4).unwrap(), "r^2", 0.0, 0.0);
        let tent = p
            .trajectory_from_fn(|t| 0.5 - (t - 0.5).abs())
            .unwrap()
            .with_break(0.5)
            .unwrap();
        let all = excess_samples(&p, &tent, &[0.0]).unwrap();
        let at_mid: Vec<_> = all.iter().filter(|s| s.t == 0.5).collect();
        assert_eq!(at_mid.len(), 2);
        assert_eq!((at_mid[0].slope_kind, at_mid[0].r), (SlopeKind::Left, 1.0));
        assert_eq!(
            (at_mid[1].slope_kind, at_mid[1].r),
            (SlopeKind::Right, -1.0)
        );
        let last = all.last().unwrap();
        assert_eq!((last.t, last.slope_kind), (1.0, SlopeKind::Left));
    }

    #[test]
    fn default_grid_covers_spread() {
        let g = default_q_grid(&[0.0, 0.0]);
        assert_eq!(g.len(), 41);
        assert_eq!((g[0], g[40]), (-5.0, 5.0));
        assert!(g.contains(&2.0) && g.contains(&-2.0));
        let g = default_q_grid(&[1.0, 3.0, 0.3]);
        assert!(g.contains(&0.3));
    }

    #[test]
    fn discrete_special_case() {
        let p = problem(
            TimeScale::uniform(0.0, 6.0, 1.0).unwrap(),
            "(r - x)^2 + 0.5*r^2",
            1.0,
            -1.0,
        );
        let sol = solve_el_discrete(&p, None, SolveOptions::default()).unwrap();
        let grid = uniform_grid(-10.0, 10.0, 81);
        let all = excess_samples(&p, &sol.trajectory, &grid).unwrap();
        let xs = sol.trajectory.values();
        for s in &all {
            let k = s.t as usize;
            assert_eq!(s.x_sigma, xs[k + 1]);
            assert!((s.r - (xs[k + 1] - xs[k])).abs() < 1e-12);
            assert!(s.e >= -1e-10);
        }
    }

    fn quadratic_in_r() -> impl Strategy<Value = Lagrangian> {
        (0.0f64..3.0, -3.0f64..3.0, -3.0f64..3.0, -2.0f64..2.0).prop_map(|(a, b, c, d)| {
            Lagrangian::parse(&format!("{a}*r^2 + {b}*r*x + {c}*sin(t)*r + {d}*x^3 + t")).unwrap()
        })
    }

    proptest! {
        #[test]
        fn diagonal_excess_vanishes(t in -3.0f64..3.0, x in -3.0f64..3.0, r in -3.0f64..3.0) {
            let l = Lagrangian::parse("exp(r/2)*cos(x) + t*r^3 - sqrt(1 + x^2 + r^2)").unwrap();
            prop_assert!(excess(&l, t, x, r, r).unwrap().abs() <= 1e-12);
        }

        #[test]
        fn convex_quadratics_never_violate(l in quadratic_in_r(), vals in prop::collection::vec(-3.0f64..3.0, 9)) {
            let p = problem(TimeScale::harmonic(8).unwrap(), "r^2", 0.0, 0.0).with_lagrangian(l);
            let r: Vec<f64> = (-6..=6).map(|k| k as f64).collect();
            prop_assert!(check_convexity_condition(&p, &[-1.0, 0.0, 1.0], &r, &[0.25, 0.5]).unwrap().ok);
            let x = p.trajectory(vals).unwrap();
            let grid = uniform_grid(-20.0, 20.0, 41);
            let all = excess_samples(&p, &x, &grid).unwrap();
            prop_assert!(all.iter().all(|s| s.e >= -1e-10));
        }

        #[test]
        fn scaling_covariance(c in 0.1f64..10.0, vals in prop::collection::vec(-2.0f64..2.0, 9)) {
            let p = problem(TimeScale::harmonic(8).unwrap(), "r^2 - r^4 + x*r", 0.0, 0.0);
            let pc = p.with_lagrangian(p.lagrangian().scaled(c));
            let x = p.trajectory(vals).unwrap();
            let grid = uniform_grid(-3.0, 3.0, 13);
            let base = excess_samples(&p, &x, &grid).unwrap();
            let scaled = excess_samples(&pc, &x, &grid).unwrap();
            for (a, b) in base.iter().zip(&scaled) {
                prop_assert!((b.e - c * a.e).abs() <= 1e-9 * (c * a.e).abs().max(1.0));
            }
            let tol = 1e-3;
            let v1: Vec<(f64, f64)> = weierstrass_scan(&p, &x, &grid, tol).unwrap().iter().map(|s| (s.t, s.q)).collect();
            let v2: Vec<(f64, f64)> = weierstrass_scan(&pc, &x, &grid, c * tol).unwrap().iter().map(|s| (s.t, s.q)).collect();
            prop_assert_eq!(v1, v2);
        }
    }
}
