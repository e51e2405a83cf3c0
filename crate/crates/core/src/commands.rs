//! The `tscv` subcommands as library functions.
//!
//! Each command returns the human-readable text, the machine-readable
//! report and the process exit code, so the binary only parses arguments
//! and does I/O.

use std::fmt::Write as _;
use std::path::Path;

use thiserror::Error;

use crate::calculus::{norm_strong, norm_weak};
use crate::error::Error;
use crate::problem::{LoadedProblem, ProblemError, ProblemFile, ScanSpec};
use crate::report::{CheckResult, Provenance, RunReport, ScaleRow, SolutionReport};
use crate::repro;
use crate::timescale::{Origin, Side};
use crate::variational::{
    functional, solve_el_discrete, Solution, SolveOptions, Trajectory, VariationalProblem,
};
use crate::weierstrass::{
    classify_candidate, uniform_grid, AnalysisOptions, SlopeKind, DEFAULT_Q_COUNT,
};

/// Rows printed by `inspect` before the table is cut.
pub const INSPECT_ROW_CAP: usize = 200;
/// Violations listed in text output; the report carries all of them.
const VIOLATION_LINES: usize = 10;

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_NON_CONVERGENCE: i32 = 2;

/// Command-line overrides of problem-file settings.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub q_min: Option<f64>,
    pub q_max: Option<f64>,
    pub q_count: Option<usize>,
    pub tol: Option<f64>,
    pub resolution: Option<usize>,
    pub max_iter: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub text: String,
    pub report: RunReport,
    pub exit_code: i32,
}

#[derive(Debug, Error)]
pub enum CommandError {
    #[error(transparent)]
    Problem(#[from] ProblemError),
    #[error(transparent)]
    Run(#[from] Error),
    #[error("missing trajectory: `{0}` needs a `trajectory` field in the problem file")]
    MissingTrajectory(&'static str),
    #[error("{0}")]
    Usage(String),
}

fn load(path: &Path, o: &Overrides) -> Result<LoadedProblem, CommandError> {
    if o.resolution == Some(0) {
        return Err(CommandError::Usage("--resolution must be positive".into()));
    }
    Ok(ProblemFile::load(path)?.build(o.resolution)?)
}

fn provenance(command: &str, path: &Path) -> Provenance {
    Provenance::now(command, Some(&path.display().to_string()))
}

/// Up to ten significant digits, trailing zeros dropped.
pub fn fmt_num(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    let a = v.abs();
    if !(1e-4..1e10).contains(&a) {
        return format!("{v:.6e}");
    }
    let decimals = (9 - a.log10().floor() as i32).max(0) as usize;
    let s = format!("{v:.decimals$}");
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

fn side_name(side: Side, dir: &str) -> String {
    format!("{dir}-{side}")
}

pub fn inspect(path: &Path, o: &Overrides) -> Result<Outcome, CommandError> {
    let lp = load(path, o)?;
    let p = &lp.problem;
    let scale = p.scale();
    let domain = p.domain();
    let harmonic = matches!(scale.origin(), Origin::Harmonic { .. });

    let mut rows = Vec::with_capacity(domain.len());
    for &t in domain.nodes() {
        let class = scale.classify(t)?;
        let right = if t == scale.max() {
            "maximum".to_string()
        } else {
            side_name(class.right, "right")
        };
        let left = if t == scale.min() {
            "minimum".to_string()
        } else {
            side_name(class.left, "left")
        };
        rows.push(ScaleRow {
            t,
            sigma: scale.sigma(t)?,
            rho: scale.rho(t)?,
            mu: scale.mu(t)?,
            right,
            left,
        });
    }

    let mut text = String::new();
    let _ = writeln!(
        text,
        "time scale on [{}, {}]: {} points",
        fmt_num(p.t0()),
        fmt_num(p.t1()),
        domain.len()
    );
    let _ = writeln!(
        text,
        "{:>18} {:>18} {:>18} {:>18}  class",
        "t", "sigma", "rho", "mu"
    );
    let mut printed = 0;
    let mut elided = 0;
    let mut footnote = false;
    let mut i = 0;
    while i < rows.len() {
        let row = &rows[i];
        let interval = scale
            .intervals()
            .iter()
            .find(|(lo, hi)| row.t >= *lo && row.t <= *hi && row.t < *hi)
            .copied();
        let line = match interval {
            Some((lo, hi)) => {
                let start = i;
                while i < rows.len() && rows[i].t <= hi {
                    i += 1;
                }
                let (a, b) = (rows[start].t, rows[i - 1].t);
                let part = if a > lo || b < hi {
                    format!(" of [{}, {}]", fmt_num(lo), fmt_num(hi))
                } else {
                    String::new()
                };
                format!(
                    "{:>37} dense, μ=0 ({} quadrature nodes{part})",
                    format!("[{}, {}]", fmt_num(a), fmt_num(b)),
                    i - start
                )
            }
            None => {
                i += 1;
                if harmonic && row.t == 0.0 {
                    footnote = true;
                    format!(
                        "{:>18} {:>18} {:>18} {:>18}  right-dense*, {}",
                        "0",
                        "0*",
                        fmt_num(row.rho),
                        "—",
                        row.left
                    )
                } else {
                    format!(
                        "{:>18} {:>18} {:>18} {:>18}  {}, {}",
                        fmt_num(row.t),
                        fmt_num(row.sigma),
                        fmt_num(row.rho),
                        fmt_num(row.mu),
                        row.right,
                        row.left
                    )
                }
            }
        };
        if printed < INSPECT_ROW_CAP {
            text.push_str(&line);
            text.push('\n');
            printed += 1;
        } else {
            elided += 1;
        }
    }
    if elided > 0 {
        let _ = writeln!(
            text,
            "... {elided} more rows elided (full table via --report)"
        );
    }
    if footnote {
        let _ = writeln!(
            text,
            "* 0 is the accumulation point of the harmonic scale; computations step from 0 to the smallest stored point"
        );
    }

    let mut report = RunReport::new(provenance("inspect", path));
    report.scale_table = Some(rows);
    Ok(Outcome {
        text,
        report,
        exit_code: EXIT_OK,
    })
}

struct Basics {
    functional: f64,
    strong: f64,
    weak: f64,
}

fn basics(p: &VariationalProblem, x: &Trajectory) -> Result<Basics, Error> {
    Ok(Basics {
        functional: functional(p, x)?,
        strong: norm_strong(x.grid(), p.t0(), p.t1())?,
        weak: norm_weak(x.grid(), p.t0(), p.t1())?,
    })
}

fn write_basics(text: &mut String, report: &mut RunReport, b: &Basics) {
    let _ = writeln!(text, "functional      {}", fmt_num(b.functional));
    let _ = writeln!(text, "norm (strong)   {}", fmt_num(b.strong));
    let _ = writeln!(text, "norm (weak)     {}", fmt_num(b.weak));
    report.functional_value = Some(b.functional);
    report.norm_strong = Some(b.strong);
    report.norm_weak = Some(b.weak);
}

pub fn eval(path: &Path, o: &Overrides) -> Result<Outcome, CommandError> {
    let lp = load(path, o)?;
    let x = lp
        .trajectory
        .as_ref()
        .ok_or(CommandError::MissingTrajectory("eval"))?;
    let mut report = RunReport::new(provenance("eval", path));
    let mut text = String::new();
    write_basics(&mut text, &mut report, &basics(&lp.problem, x)?);
    Ok(Outcome {
        text,
        report,
        exit_code: EXIT_OK,
    })
}

fn solve_options(o: &Overrides) -> SolveOptions {
    let mut opts = SolveOptions::default();
    if let Some(m) = o.max_iter {
        opts.max_iter = m;
    }
    opts
}

fn solution_report(
    p: &VariationalProblem,
    converged: bool,
    iterations: usize,
    residual: f64,
    x: &[f64],
) -> SolutionReport {
    SolutionReport {
        converged,
        iterations,
        residual,
        t: p.domain().nodes().to_vec(),
        x: x.to_vec(),
    }
}

/// Solves, or returns the finished non-convergence outcome.
fn solve_or_report(
    lp: &LoadedProblem,
    o: &Overrides,
    command: &str,
    path: &Path,
) -> Result<std::result::Result<Solution, Outcome>, CommandError> {
    let p = &lp.problem;
    match solve_el_discrete(p, lp.trajectory.as_ref(), solve_options(o)) {
        Ok(sol) => Ok(Ok(sol)),
        Err(Error::NonConvergence {
            iterations,
            residual,
            best,
        }) => {
            let mut report = RunReport::new(provenance(command, path));
            report.solution = Some(solution_report(p, false, iterations, residual, &best));
            let mut text = String::new();
            let _ = writeln!(text, "Newton iteration did not converge");
            let _ = writeln!(text, "iterations      {iterations}");
            let _ = writeln!(
                text,
                "residual        {} (target {})",
                fmt_num(residual),
                fmt_num(solve_options(o).tol)
            );
            let _ = writeln!(
                text,
                "best iterate written to the report; try another initial trajectory or --max-iter"
            );
            Ok(Err(Outcome {
                text,
                report,
                exit_code: EXIT_NON_CONVERGENCE,
            }))
        }
        Err(e) => Err(e.into()),
    }
}

pub fn solve(path: &Path, o: &Overrides) -> Result<Outcome, CommandError> {
    let lp = load(path, o)?;
    let p = &lp.problem;
    let sol = match solve_or_report(&lp, o, "solve", path)? {
        Ok(sol) => sol,
        Err(outcome) => return Ok(outcome),
    };
    let mut report = RunReport::new(provenance("solve", path));
    let mut text = String::new();
    let _ = writeln!(text, "converged in {} iterations", sol.iterations);
    let _ = writeln!(text, "EL residual     {}", fmt_num(sol.residual));
    write_basics(&mut text, &mut report, &basics(p, &sol.trajectory)?);
    let _ = writeln!(text, "{:>18} {:>22}", "t", "x");
    for (t, x) in p
        .domain()
        .nodes()
        .iter()
        .zip(sol.trajectory.values())
        .take(INSPECT_ROW_CAP)
    {
        let _ = writeln!(text, "{:>18} {:>22}", fmt_num(*t), fmt_num(*x));
    }
    if p.domain().len() > INSPECT_ROW_CAP {
        let _ = writeln!(
            text,
            "... {} more rows elided",
            p.domain().len() - INSPECT_ROW_CAP
        );
    }
    report.el_max_residual = Some(sol.residual);
    report.solution = Some(solution_report(
        p,
        true,
        sol.iterations,
        sol.residual,
        sol.trajectory.values(),
    ));
    Ok(Outcome {
        text,
        report,
        exit_code: EXIT_OK,
    })
}

/// The explicit scan grid, if flags or the file give one. Flags win.
pub fn q_grid(scan: &ScanSpec, o: &Overrides) -> Result<Option<Vec<f64>>, CommandError> {
    let lo = o.q_min.or(scan.q_min);
    let hi = o.q_max.or(scan.q_max);
    let count = o.q_count.or(scan.q_count).unwrap_or(DEFAULT_Q_COUNT);
    if count == 0 {
        return Err(CommandError::Usage("--q-count must be positive".into()));
    }
    match (lo, hi) {
        (Some(lo), Some(hi)) if lo <= hi => Ok(Some(uniform_grid(lo, hi, count))),
        (Some(lo), Some(hi)) => Err(CommandError::Usage(format!(
            "q_max {hi} is below q_min {lo}"
        ))),
        (None, None) => Ok(None),
        _ => Err(CommandError::Usage(
            "q_min and q_max must be given together".into(),
        )),
    }
}

fn slope_kind_name(k: SlopeKind) -> &'static str {
    match k {
        SlopeKind::TwoSided => "two-sided",
        SlopeKind::Left => "left",
        SlopeKind::Right => "right",
    }
}

pub fn analyze(path: &Path, o: &Overrides) -> Result<Outcome, CommandError> {
    let lp = load(path, o)?;
    let p = &lp.problem;
    let grid = q_grid(&lp.scan, o)?;
    let tol = o
        .tol
        .or(lp.scan.tol)
        .unwrap_or(crate::weierstrass::DEFAULT_TOL);
    if tol.is_nan() || tol < 0.0 {
        return Err(CommandError::Usage(format!(
            "--tol must be nonnegative, got {tol}"
        )));
    }

    let mut report = RunReport::new(provenance("analyze", path));
    let mut text = String::new();
    let x = match &lp.trajectory {
        Some(x) => x.clone(),
        None => {
            if !p.domain().is_discrete() {
                return Err(CommandError::MissingTrajectory(
                    "analyze on a scale with dense intervals",
                ));
            }
            let sol = match solve_or_report(&lp, o, "analyze", path)? {
                Ok(sol) => sol,
                Err(outcome) => return Ok(outcome),
            };
            let _ = writeln!(
                text,
                "no trajectory given; solved the Euler-Lagrange equations in {} iterations",
                sol.iterations
            );
            report.solution = Some(solution_report(
                p,
                true,
                sol.iterations,
                sol.residual,
                sol.trajectory.values(),
            ));
            sol.trajectory
        }
    };

    write_basics(&mut text, &mut report, &basics(p, &x)?);
    let opts = AnalysisOptions {
        tol,
        ..AnalysisOptions::default()
    };
    let a = classify_candidate(p, &x, grid.as_deref(), &opts)?;

    let _ = writeln!(text, "EL residual     {}", fmt_num(a.el_max_residual));
    match &a.convexity.counterexample {
        Some(c) => {
            let _ = writeln!(
                text,
                "convexity       fails at t = {}, x = {}: r1 = {}, r2 = {}, γ = {} gives {} > {}",
                fmt_num(c.t),
                fmt_num(c.x),
                fmt_num(c.r1),
                fmt_num(c.r2),
                fmt_num(c.gamma),
                fmt_num(c.lhs),
                fmt_num(c.rhs)
            );
        }
        None => {
            let _ = writeln!(
                text,
                "convexity       no violation found ({} samples)",
                a.convexity.checked
            );
        }
    }
    let v = &a.weierstrass_violations;
    let _ = writeln!(
        text,
        "excess scan     {} samples with E < -{}",
        v.len(),
        fmt_num(tol)
    );
    if !v.is_empty() {
        let _ = writeln!(
            text,
            "{:>18} {:>14} {:>14} {:>14} {:>16}  slope",
            "t", "x_sigma", "r", "q", "E"
        );
        for s in v.iter().take(VIOLATION_LINES) {
            let _ = writeln!(
                text,
                "{:>18} {:>14} {:>14} {:>14} {:>16}  {}",
                fmt_num(s.t),
                fmt_num(s.x_sigma),
                fmt_num(s.r),
                fmt_num(s.q),
                fmt_num(s.e),
                slope_kind_name(s.slope_kind)
            );
        }
        if v.len() > VIOLATION_LINES {
            let _ = writeln!(text, "... {} more in the report", v.len() - VIOLATION_LINES);
        }
    }
    let _ = writeln!(text, "verdict         {}", a.verdict.as_str());

    report.el_max_residual = Some(a.el_max_residual);
    report.convexity_ok = Some(a.convexity.ok);
    report.convexity_counterexample = a.convexity.counterexample.clone();
    report.weierstrass_violations = Some(a.weierstrass_violations.clone());
    report.verdict = Some(a.verdict);
    Ok(Outcome {
        text,
        report,
        exit_code: a.verdict.exit_code(),
    })
}

pub fn repro(id: &str) -> Result<Outcome, CommandError> {
    let checks: Vec<CheckResult> = repro::run(id)?;
    let mut text = String::new();
    for c in &checks {
        let _ = writeln!(
            text,
            "{} {}: {} ({})",
            if c.passed { "PASS" } else { "FAIL" },
            c.example,
            c.name,
            c.detail
        );
    }
    let failed = checks.iter().filter(|c| !c.passed).count();
    let _ = writeln!(text, "{} passed, {} failed", checks.len() - failed, failed);
    let mut report = RunReport::new(Provenance::now(&format!("repro {id}"), None));
    report.checks = Some(checks);
    Ok(Outcome {
        text,
        report,
        exit_code: if failed == 0 { EXIT_OK } else { EXIT_ERROR },
    })
}
