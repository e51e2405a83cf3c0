//! JSON problem files.
//!
//! ```json
//! {
//!   "scale": {"kind": "harmonic", "n_max": 50},
//!   "t0": 0, "t1": 1,
//!   "lagrangian": "r^2 - r^4",
//!   "alpha": 0, "beta": 0,
//!   "trajectory": {"kind": "expr", "formula": "0"},
//!   "scan": {"q_min": -5, "q_max": 5, "q_count": 41, "tol": 1e-9}
//! }
//! ```
//!
//! `scale` is one segment or a list of segments. Errors name the offending
//! field.

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::calculus::GridFunction;
use crate::error::Error;
use crate::lagrangian::{Expr, Lagrangian, Var};
use crate::timescale::{Segment, TimeScale, DEFAULT_RESOLUTION};
use crate::variational::{Trajectory, VariationalProblem};

macro_rules! segment_spec {
    ($($(#[$vm:meta])* $variant:ident { $($(#[$fm:meta])* $field:ident: $ty:ty),* $(,)? }),* $(,)?) => {
        #[derive(Debug, Clone, PartialEq, Serialize)]
        #[serde(tag = "kind", rename_all = "lowercase")]
        pub enum SegmentSpec {
            $($(#[$vm])* $variant { $($(#[$fm])* $field: $ty),* }),*
        }

        // Externally tagged twin: serde buffers internally tagged content,
        // which hides the path of an error inside a segment.
        #[derive(Deserialize)]
        #[serde(rename_all = "lowercase", deny_unknown_fields)]
        enum SegmentRepr {
            $(
                $variant { $($(#[$fm])* $field: $ty),* }
            ),*
        }

        impl From<SegmentRepr> for SegmentSpec {
            fn from(r: SegmentRepr) -> Self {
                match r {
                    $(SegmentRepr::$variant { $($field),* } => SegmentSpec::$variant { $($field),* }),*
                }
            }
        }
    };
}

segment_spec! {
    Harmonic { n_max: usize },
    Uniform { start: f64, end: f64, step: f64 },
    Geometric { min: f64, max: f64, ratio: f64 },
    Dense {
        lo: f64,
        hi: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        resolution: Option<usize>,
    },
    Points { values: Vec<f64> },
}

impl<'de> Deserialize<'de> for SegmentSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error as _;
        let mut value = serde_json::Value::deserialize(d)?;
        let obj = value
            .as_object_mut()
            .ok_or_else(|| D::Error::custom("a segment must be an object with a `kind` field"))?;
        let kind = match obj.remove("kind") {
            Some(serde_json::Value::String(k)) => k,
            Some(_) => return Err(D::Error::custom("`kind` must be a string")),
            None => return Err(D::Error::missing_field("kind")),
        };
        let tagged = serde_json::Value::Object([(kind, value)].into_iter().collect());
        serde_path_to_error::deserialize::<_, SegmentRepr>(tagged)
            .map(SegmentSpec::from)
            .map_err(|e| {
                // drop the leading variant name from the path
                let path = e.path().to_string();
                let rest = path.split_once('.').map(|(_, r)| r.to_string());
                match rest {
                    Some(r) => D::Error::custom(format!("at {r}: {}", e.into_inner())),
                    None => D::Error::custom(e.into_inner()),
                }
            })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum ScaleSpec {
    One(SegmentSpec),
    Many(Vec<SegmentSpec>),
}

impl<'de> Deserialize<'de> for ScaleSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error as _;
        match serde_json::Value::deserialize(d)? {
            serde_json::Value::Array(items) => items
                .into_iter()
                .enumerate()
                .map(|(i, v)| {
                    SegmentSpec::deserialize(v).map_err(|e| {
                        let msg = e.to_string();
                        match msg.strip_prefix("at ") {
                            Some(rest) => D::Error::custom(format!("at [{i}].{rest}")),
                            None => D::Error::custom(format!("at [{i}]: {msg}")),
                        }
                    })
                })
                .collect::<Result<Vec<_>, _>>()
                .map(ScaleSpec::Many),
            v => SegmentSpec::deserialize(v)
                .map(ScaleSpec::One)
                .map_err(D::Error::custom),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum TrajectorySpec {
    /// Formula in `t`, sampled at every node of `[t0, t1]`.
    Expr {
        formula: String,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        breaks: Vec<f64>,
    },
    /// Samples, linearly interpolated onto the nodes.
    Samples {
        points: Vec<f64>,
        values: Vec<f64>,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        breaks: Vec<f64>,
    },
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q_min: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q_max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q_count: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub scale: ScaleSpec,
    pub t0: f64,
    pub t1: f64,
    pub lagrangian: String,
    pub alpha: f64,
    pub beta: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trajectory: Option<TrajectorySpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scan: Option<ScanSpec>,
}

#[derive(Debug, Error)]
pub enum ProblemError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{field}: {msg} (line {line}, column {column})")]
    Parse {
        field: String,
        msg: String,
        line: usize,
        column: usize,
    },
    #[error("{field}: {source}")]
    Invalid {
        field: String,
        #[source]
        source: Error,
    },
}

fn invalid(field: impl Into<String>) -> impl FnOnce(Error) -> ProblemError {
    let field = field.into();
    move |source| ProblemError::Invalid { field, source }
}

/// A problem file turned into library objects.
#[derive(Debug, Clone)]
pub struct LoadedProblem {
    pub problem: VariationalProblem,
    pub trajectory: Option<Trajectory>,
    pub scan: ScanSpec,
}

impl ProblemFile {
    pub fn from_json(text: &str) -> Result<Self, ProblemError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let field = match e.path().to_string() {
                p if p == "." => "<root>".to_string(),
                p => p,
            };
            let inner = e.into_inner();
            let suffix = format!(" at line {} column {}", inner.line(), inner.column());
            let msg = inner.to_string();
            ProblemError::Parse {
                field,
                msg: msg.strip_suffix(&suffix).unwrap_or(&msg).to_string(),
                line: inner.line(),
                column: inner.column(),
            }
        })
    }

    pub fn load(path: &std::path::Path) -> Result<Self, ProblemError> {
        let text = std::fs::read_to_string(path).map_err(|source| ProblemError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn segments(&self) -> Vec<&SegmentSpec> {
        match &self.scale {
            ScaleSpec::One(s) => vec![s],
            ScaleSpec::Many(v) => v.iter().collect(),
        }
    }

    /// Builds the scale; `resolution` overrides every dense segment.
    pub fn build_scale(&self, resolution: Option<usize>) -> Result<TimeScale, ProblemError> {
        let specs = self.segments();
        let many = matches!(self.scale, ScaleSpec::Many(_));
        let field = |i: usize| {
            if many {
                format!("scale[{i}]")
            } else {
                "scale".to_string()
            }
        };
        let mut segments = Vec::new();
        let mut harmonic = None;
        for (i, spec) in specs.iter().enumerate() {
            let seg = match **spec {
                SegmentSpec::Harmonic { n_max } => {
                    let h = TimeScale::harmonic(n_max).map_err(invalid(field(i)))?;
                    harmonic = Some(h.clone());
                    h.segments()[0].clone()
                }
                SegmentSpec::Uniform { start, end, step } => Segment::Uniform { start, end, step },
                SegmentSpec::Geometric { min, max, ratio } => {
                    Segment::Geometric { min, max, ratio }
                }
                SegmentSpec::Dense {
                    lo,
                    hi,
                    resolution: r,
                } => Segment::Dense {
                    lo,
                    hi,
                    resolution: resolution.or(r).unwrap_or(DEFAULT_RESOLUTION),
                },
                SegmentSpec::Points { ref values } => Segment::Points(values.clone()),
            };
            // validate each segment alone so the error points at it
            TimeScale::from_segments(vec![seg.clone()]).map_err(invalid(field(i)))?;
            segments.push(seg);
        }
        match (specs.len(), harmonic) {
            (1, Some(h)) => Ok(h),
            _ => TimeScale::from_segments(segments).map_err(invalid("scale")),
        }
    }

    pub fn build(&self, resolution: Option<usize>) -> Result<LoadedProblem, ProblemError> {
        let scale = Arc::new(self.build_scale(resolution)?);
        let lagrangian = Lagrangian::parse(&self.lagrangian).map_err(invalid("lagrangian"))?;
        for (name, t) in [("t0", self.t0), ("t1", self.t1)] {
            scale.require_node(t).map_err(invalid(name))?;
        }
        let problem =
            VariationalProblem::new(scale, self.t0, self.t1, lagrangian, self.alpha, self.beta)
                .map_err(invalid("t1"))?;
        let trajectory = match &self.trajectory {
            Some(spec) => Some(build_trajectory(&problem, spec)?),
            None => None,
        };
        let scan = self.scan.clone().unwrap_or_default();
        if let Some(tol) = scan.tol {
            if tol.is_nan() || tol < 0.0 {
                return Err(ProblemError::Invalid {
                    field: "scan.tol".into(),
                    source: Error::InvalidParameter(format!(
                        "tolerance must be nonnegative, got {tol}"
                    )),
                });
            }
        }
        if let (Some(lo), Some(hi)) = (scan.q_min, scan.q_max) {
            if lo > hi {
                return Err(ProblemError::Invalid {
                    field: "scan.q_max".into(),
                    source: Error::InvalidParameter(format!("q_max {hi} is below q_min {lo}")),
                });
            }
        }
        if scan.q_count == Some(0) {
            return Err(ProblemError::Invalid {
                field: "scan.q_count".into(),
                source: Error::InvalidParameter("q_count must be positive".into()),
            });
        }
        Ok(LoadedProblem {
            problem,
            trajectory,
            scan,
        })
    }
}

fn build_trajectory(
    p: &VariationalProblem,
    spec: &TrajectorySpec,
) -> Result<Trajectory, ProblemError> {
    let domain = Arc::clone(p.domain());
    let (grid, breaks) = match spec {
        TrajectorySpec::Expr { formula, breaks } => {
            let expr = Expr::parse(formula, &[Var::T]).map_err(invalid("trajectory.formula"))?;
            let values = domain
                .nodes()
                .iter()
                .map(|&t| expr.eval(t, 0.0, 0.0))
                .collect::<Result<Vec<f64>, Error>>()
                .map_err(invalid("trajectory.formula"))?;
            let grid =
                GridFunction::from_values(domain, values).map_err(invalid("trajectory.formula"))?;
            (grid, breaks)
        }
        TrajectorySpec::Samples {
            points,
            values,
            breaks,
        } => {
            if points.len() != values.len() {
                return Err(ProblemError::Invalid {
                    field: "trajectory.values".into(),
                    source: Error::LengthMismatch {
                        expected: points.len(),
                        got: values.len(),
                    },
                });
            }
            if points.is_empty() || points.windows(2).any(|w| w[1] <= w[0]) {
                return Err(ProblemError::Invalid {
                    field: "trajectory.points".into(),
                    source: Error::InvalidParameter(
                        "sample points must be nonempty and strictly increasing".into(),
                    ),
                });
            }
            let values = domain
                .nodes()
                .iter()
                .map(|&t| interpolate(points, values, t))
                .collect::<Result<Vec<f64>, Error>>()
                .map_err(invalid("trajectory.points"))?;
            let grid =
                GridFunction::from_values(domain, values).map_err(invalid("trajectory.values"))?;
            (grid, breaks)
        }
    };
    let mut grid = grid;
    for (k, &b) in breaks.iter().enumerate() {
        grid = grid
            .with_break(b)
            .map_err(invalid(format!("trajectory.breaks[{k}]")))?;
    }
    Ok(Trajectory::new(grid))
}

fn interpolate(points: &[f64], values: &[f64], t: f64) -> Result<f64, Error> {
    use crate::timescale::MEMBERSHIP_TOL;
    let k = points.partition_point(|&p| p < t - MEMBERSHIP_TOL);
    if k < points.len() && (points[k] - t).abs() <= MEMBERSHIP_TOL {
        return Ok(values[k]);
    }
    if k == 0 || k == points.len() {
        return Err(Error::InvalidParameter(format!(
            "samples do not cover t = {t}"
        )));
    }
    let (a, b) = (points[k - 1], points[k]);
    let w = (t - a) / (b - a);
    Ok(values[k - 1] * (1.0 - w) + values[k] * w)
}
