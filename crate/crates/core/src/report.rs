//! Machine-readable run reports.
//!
//! A [`RunReport`] serializes to JSON with fixed field names. Fields a
//! command does not produce are omitted, so parsing a report and writing it
//! again reproduces the same bytes.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::weierstrass::{ConvexityCounterexample, ExcessSample, Verdict};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Provenance {
    pub command: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub file: Option<String>,
    /// RFC 3339, UTC, whole seconds.
    pub timestamp: String,
    pub tool_version: String,
}

impl Provenance {
    pub fn now(command: &str, file: Option<&str>) -> Self {
        Provenance {
            command: command.to_string(),
            file: file.map(str::to_string),
            timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }
}

/// One row of the scale table written by `inspect`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScaleRow {
    pub t: f64,
    pub sigma: f64,
    pub rho: f64,
    pub mu: f64,
    /// `"right-scattered"`, `"right-dense"` or `"maximum"`.
    pub right: String,
    pub left: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolutionReport {
    pub converged: bool,
    pub iterations: usize,
    pub residual: f64,
    pub t: Vec<f64>,
    pub x: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckResult {
    pub example: String,
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunReport {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub functional_value: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub norm_strong: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub norm_weak: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub el_max_residual: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub convexity_ok: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub convexity_counterexample: Option<ConvexityCounterexample>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weierstrass_violations: Option<Vec<ExcessSample>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verdict: Option<Verdict>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solution: Option<SolutionReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale_table: Option<Vec<ScaleRow>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub checks: Option<Vec<CheckResult>>,
    pub provenance: Provenance,
}

impl RunReport {
    pub fn new(provenance: Provenance) -> Self {
        RunReport {
            functional_value: None,
            norm_strong: None,
            norm_weak: None,
            el_max_residual: None,
            convexity_ok: None,
            convexity_counterexample: None,
            weierstrass_violations: None,
            verdict: None,
            solution: None,
            scale_table: None,
            checks: None,
            provenance,
        }
    }

    /// Pretty-printed JSON. Fails if any number is NaN or infinite.
    pub fn to_json(&self) -> Result<String> {
        self.check_finite()?;
        serde_json::to_string_pretty(self).map_err(|e| Error::InvalidParameter(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidParameter(e.to_string()))
    }

    fn check_finite(&self) -> Result<()> {
        let mut scalars: Vec<(f64, f64)> = [
            self.functional_value,
            self.norm_strong,
            self.norm_weak,
            self.el_max_residual,
        ]
        .into_iter()
        .flatten()
        .map(|v| (f64::NAN, v))
        .collect();
        if let Some(c) = &self.convexity_counterexample {
            scalars.extend([c.t, c.x, c.r1, c.r2, c.gamma, c.lhs, c.rhs].map(|v| (c.t, v)));
        }
        for s in self.weierstrass_violations.iter().flatten() {
            scalars.extend([s.x_sigma, s.r, s.q, s.e].map(|v| (s.t, v)));
        }
        if let Some(sol) = &self.solution {
            scalars.push((f64::NAN, sol.residual));
            scalars.extend(sol.t.iter().zip(&sol.x).map(|(&t, &x)| (t, x)));
        }
        for row in self.scale_table.iter().flatten() {
            scalars.extend([row.sigma, row.rho, row.mu].map(|v| (row.t, v)));
        }
        match scalars.into_iter().find(|(_, v)| !v.is_finite()) {
            Some((t, value)) => Err(Error::NonFiniteValue { t, value }),
            None => Ok(()),
        }
    }
}
