//! Bounded time scales built from computable segments.
//!
//! A [`TimeScale`] is a finite union of discrete point sets, uniform grids
//! `{start, start + h, ..., end}`, geometric grids `{m, m q, ..., m q^k}` and
//! dense intervals `[lo, hi]`. Jump operators and graininess are exact: on a
//! dense interval `σ(t) = ρ(t) = t`, everywhere else they return the
//! neighbouring realized point.
//!
//! Every scale also carries a list of *nodes*: all discrete points plus the
//! quadrature nodes of each dense interval. Grid functions store one value
//! per node.

use std::fmt;

use crate::error::{Error, Result};

/// Absolute tolerance for point membership and node deduplication.
pub const MEMBERSHIP_TOL: f64 = 1e-12;

/// Default number of quadrature subintervals per dense interval.
pub const DEFAULT_RESOLUTION: usize = 1000;

#[derive(Debug, Clone, PartialEq)]
pub enum Segment {
    /// Strictly increasing, nonempty list of isolated points.
    Points(Vec<f64>),
    /// `{start + k step : k = 0..n}` with `end = start + n step`.
    Uniform { start: f64, end: f64, step: f64 },
    /// `{min ratio^k : k = 0..n}` with `max = min ratio^n`.
    Geometric { min: f64, max: f64, ratio: f64 },
    /// The closed real interval `[lo, hi]`, sampled with `resolution` cells.
    Dense { lo: f64, hi: f64, resolution: usize },
}

impl Segment {
    fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidSegment(msg));
        match *self {
            Segment::Points(ref pts) => {
                if pts.is_empty() {
                    return bad("point list is empty".into());
                }
                if let Some(p) = pts.iter().find(|p| !p.is_finite()) {
                    return bad(format!("non-finite point {p}"));
                }
                if let Some(w) = pts.windows(2).find(|w| w[1] <= w[0]) {
                    return bad(format!(
                        "points must be strictly increasing ({} then {})",
                        w[0], w[1]
                    ));
                }
            }
            Segment::Uniform { start, end, step } => {
                if !(start.is_finite() && end.is_finite() && step.is_finite()) {
                    return bad("uniform bounds must be finite".into());
                }
                if step <= 0.0 {
                    return bad(format!("uniform step must be positive, got {step}"));
                }
                if end < start {
                    return bad(format!("uniform end {end} is below start {start}"));
                }
                let n = ((end - start) / step).round();
                if ((end - start) - n * step).abs() > MEMBERSHIP_TOL * (end - start).abs().max(1.0)
                {
                    return bad(format!(
                        "uniform span {} is not an integer multiple of step {step}",
                        end - start
                    ));
                }
            }
            Segment::Geometric { min, max, ratio } => {
                if !(min.is_finite() && max.is_finite() && ratio.is_finite()) {
                    return bad("geometric parameters must be finite".into());
                }
                if min <= 0.0 {
                    return bad(format!("geometric min must be positive, got {min}"));
                }
                if ratio <= 1.0 {
                    return bad(format!("geometric ratio must exceed 1, got {ratio}"));
                }
                if max < min {
                    return bad(format!("geometric max {max} is below min {min}"));
                }
                let k = geometric_exponent(min, max, ratio);
                let reached = min * ratio.powi(k as i32);
                if (reached - max).abs() > MEMBERSHIP_TOL * max {
                    return bad(format!(
                        "geometric max {max} is not min * ratio^k for integer k"
                    ));
                }
            }
            Segment::Dense { lo, hi, resolution } => {
                if !(lo.is_finite() && hi.is_finite()) {
                    return bad("dense bounds must be finite".into());
                }
                if lo >= hi {
                    return bad(format!("dense interval needs lo < hi, got [{lo}, {hi}]"));
                }
                if resolution == 0 {
                    return bad("dense resolution must be positive".into());
                }
            }
        }
        Ok(())
    }

    /// Smallest and largest point of the segment.
    pub fn bounds(&self) -> (f64, f64) {
        match *self {
            Segment::Points(ref pts) => (pts[0], pts[pts.len() - 1]),
            Segment::Uniform { start, end, .. } => (start, end),
            Segment::Geometric { min, max, .. } => (min, max),
            Segment::Dense { lo, hi, .. } => (lo, hi),
        }
    }

    /// Realized points: every discrete point, or the quadrature nodes of a
    /// dense interval.
    fn realize(&self) -> Vec<f64> {
        match *self {
            Segment::Points(ref pts) => pts.clone(),
            Segment::Uniform { start, end, step } => {
                let n = ((end - start) / step).round() as usize;
                let mut pts: Vec<f64> = (0..n).map(|k| start + k as f64 * step).collect();
                pts.push(end);
                pts
            }
            Segment::Geometric { min, max, ratio } => {
                let n = geometric_exponent(min, max, ratio);
                let mut pts: Vec<f64> = (0..n).map(|k| min * ratio.powi(k as i32)).collect();
                pts.push(max);
                pts
            }
            Segment::Dense { lo, hi, resolution } => {
                let h = (hi - lo) / resolution as f64;
                let mut pts: Vec<f64> = (0..resolution).map(|k| lo + k as f64 * h).collect();
                pts.push(hi);
                pts
            }
        }
    }

    fn is_dense(&self) -> bool {
        matches!(self, Segment::Dense { .. })
    }
}

fn geometric_exponent(min: f64, max: f64, ratio: f64) -> usize {
    ((max / min).ln() / ratio.ln()).round().max(0.0) as usize
}

/// Where a scale came from; constructors that truncate an infinite scale
/// record the truncation here.
#[derive(Debug, Clone, PartialEq)]
pub enum Origin {
    /// `{1/n : 1 <= n <= n_max} ∪ {0}`.
    Harmonic {
        n_max: usize,
    },
    Custom,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Scattered,
    Dense,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Side::Scattered => f.write_str("scattered"),
            Side::Dense => f.write_str("dense"),
        }
    }
}

/// Left/right classification of a point. Boundary conventions: the minimum
/// is left-dense and the maximum right-dense, since `ρ(min) = min` and
/// `σ(max) = max`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PointClass {
    pub right: Side,
    pub left: Side,
}

/// A node returned by [`TimeScale::kappa_points`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalePoint {
    pub index: usize,
    pub t: f64,
    /// True when the node starts a dense quadrature cell (`μ(t) = 0`).
    pub dense: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimeScale {
    segments: Vec<Segment>,
    intervals: Vec<(f64, f64)>,
    nodes: Vec<f64>,
    /// `nodes[i]` lies in `[lo, hi)` of some dense interval.
    cell_dense: Vec<bool>,
    /// `nodes[i]` lies in `(lo, hi]` of some dense interval.
    left_dense: Vec<bool>,
    origin: Origin,
}

impl TimeScale {
    /// Builds a scale from segments. Segment ranges may touch at a shared
    /// endpoint but must not overlap.
    pub fn from_segments(segments: Vec<Segment>) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::InvalidSegment(
                "a time scale needs at least one segment".into(),
            ));
        }
        for seg in &segments {
            seg.validate()?;
        }
        let mut segments = segments;
        segments.sort_by(|a, b| a.bounds().0.total_cmp(&b.bounds().0));
        for w in segments.windows(2) {
            let (_, prev_hi) = w[0].bounds();
            let (next_lo, _) = w[1].bounds();
            if next_lo < prev_hi - MEMBERSHIP_TOL {
                return Err(Error::InvalidSegment(format!(
                    "segments overlap: one ends at {prev_hi}, the next starts at {next_lo}"
                )));
            }
        }

        let intervals: Vec<(f64, f64)> = segments
            .iter()
            .filter(|s| s.is_dense())
            .map(Segment::bounds)
            .collect();

        // Interval endpoints win over nearby discrete points so that dense
        // bounds stay exact.
        let mut raw: Vec<(f64, bool)> = segments
            .iter()
            .flat_map(|s| {
                let dense = s.is_dense();
                s.realize().into_iter().map(move |t| (t, dense))
            })
            .collect();
        raw.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut nodes: Vec<f64> = Vec::with_capacity(raw.len());
        let mut from_dense: Vec<bool> = Vec::with_capacity(raw.len());
        for (t, dense) in raw {
            match nodes.last_mut() {
                Some(last) if (t - *last).abs() <= MEMBERSHIP_TOL => {
                    let flag = from_dense.last_mut().expect("parallel vectors");
                    if dense && !*flag {
                        *last = t;
                        *flag = true;
                    }
                }
                _ => {
                    nodes.push(t);
                    from_dense.push(dense);
                }
            }
        }

        let max = *nodes.last().expect("at least one node");
        let cell_dense = nodes
            .iter()
            .map(|&t| {
                t < max
                    && intervals
                        .iter()
                        .any(|&(lo, hi)| t >= lo - MEMBERSHIP_TOL && t < hi - MEMBERSHIP_TOL)
            })
            .collect();
        let left_dense = nodes
            .iter()
            .map(|&t| {
                intervals
                    .iter()
                    .any(|&(lo, hi)| t > lo + MEMBERSHIP_TOL && t <= hi + MEMBERSHIP_TOL)
            })
            .collect();

        Ok(TimeScale {
            segments,
            intervals,
            nodes,
            cell_dense,
            left_dense,
            origin: Origin::Custom,
        })
    }

    /// `{1/n : 1 <= n <= n_max} ∪ {0}`, a truncation of the harmonic scale.
    pub fn harmonic(n_max: usize) -> Result<Self> {
        if n_max < 2 {
            return Err(Error::InvalidParameter(format!(
                "harmonic n_max must be >= 2, got {n_max}"
            )));
        }
        let mut pts = vec![0.0];
        pts.extend((1..=n_max).rev().map(|n| 1.0 / n as f64));
        let mut scale = Self::from_segments(vec![Segment::Points(pts)])?;
        scale.origin = Origin::Harmonic { n_max };
        Ok(scale)
    }

    /// Window `{start, start + step, ..., end}` of `hℤ` shifted to `start`.
    pub fn uniform(start: f64, end: f64, step: f64) -> Result<Self> {
        Self::from_segments(vec![Segment::Uniform { start, end, step }])
    }

    /// Window `{min, min q, ..., max}` of a quantum scale `q^ℕ₀`.
    pub fn geometric(min: f64, max: f64, ratio: f64) -> Result<Self> {
        Self::from_segments(vec![Segment::Geometric { min, max, ratio }])
    }

    pub fn points(values: Vec<f64>) -> Result<Self> {
        Self::from_segments(vec![Segment::Points(values)])
    }

    pub fn dense(lo: f64, hi: f64, resolution: usize) -> Result<Self> {
        Self::from_segments(vec![Segment::Dense { lo, hi, resolution }])
    }

    pub fn union(&self, other: &TimeScale) -> Result<Self> {
        let mut segments = self.segments.clone();
        segments.extend(other.segments.iter().cloned());
        Self::from_segments(segments)
    }

    /// `[t0, t1] ∩ T` as a scale of its own. Dense intervals that are cut
    /// keep roughly the same node spacing.
    pub fn restrict(&self, t0: f64, t1: f64) -> Result<Self> {
        self.require_member(t0)?;
        self.require_member(t1)?;
        if t0 >= t1 {
            return Err(Error::EmptyInterval { t0, t1 });
        }
        let inside = |t: f64| t >= t0 - MEMBERSHIP_TOL && t <= t1 + MEMBERSHIP_TOL;
        let mut segments = Vec::new();
        for seg in &self.segments {
            match *seg {
                Segment::Dense { lo, hi, resolution } => {
                    let (a, b) = (lo.max(t0), hi.min(t1));
                    if b - a > MEMBERSHIP_TOL {
                        let frac = (b - a) / (hi - lo);
                        let res = ((resolution as f64 * frac).round() as usize).max(1);
                        segments.push(Segment::Dense {
                            lo: a,
                            hi: b,
                            resolution: res,
                        });
                    } else if (b - a).abs() <= MEMBERSHIP_TOL {
                        segments.push(Segment::Points(vec![a]));
                    }
                }
                _ => {
                    let pts: Vec<f64> = seg.realize().into_iter().filter(|&t| inside(t)).collect();
                    if !pts.is_empty() {
                        segments.push(Segment::Points(pts));
                    }
                }
            }
        }
        // Drop isolated points that coincide with a kept dense endpoint.
        let dense: Vec<(f64, f64)> = segments
            .iter()
            .filter(|s| s.is_dense())
            .map(Segment::bounds)
            .collect();
        let segments = segments
            .into_iter()
            .filter_map(|s| match s {
                Segment::Points(pts) => {
                    let pts: Vec<f64> = pts
                        .into_iter()
                        .filter(|&t| {
                            !dense.iter().any(|&(lo, hi)| {
                                t >= lo - MEMBERSHIP_TOL && t <= hi + MEMBERSHIP_TOL
                            })
                        })
                        .collect();
                    (!pts.is_empty()).then_some(Segment::Points(pts))
                }
                other => Some(other),
            })
            .collect();
        let mut scale = Self::from_segments(segments)?;
        scale.origin = self.origin.clone();
        Ok(scale)
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn origin(&self) -> &Origin {
        &self.origin
    }

    /// Dense intervals `(lo, hi)` in increasing order.
    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.intervals
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn min(&self) -> f64 {
        self.nodes[0]
    }

    pub fn max(&self) -> f64 {
        self.nodes[self.nodes.len() - 1]
    }

    pub fn node(&self, i: usize) -> f64 {
        self.nodes[i]
    }

    /// True when the scale has no dense intervals.
    pub fn is_discrete(&self) -> bool {
        self.intervals.is_empty()
    }

    /// Whether the step from node `i` to node `i + 1` is a dense quadrature
    /// cell rather than a jump.
    pub fn cell_is_dense(&self, i: usize) -> bool {
        self.cell_dense[i]
    }

    pub fn node_is_left_dense(&self, i: usize) -> bool {
        self.left_dense[i]
    }

    /// Index of the node within [`MEMBERSHIP_TOL`] of `t`, if any.
    pub fn index_of(&self, t: f64) -> Option<usize> {
        if !t.is_finite() {
            return None;
        }
        let pos = self.nodes.partition_point(|&n| n < t);
        [pos.checked_sub(1), Some(pos)]
            .into_iter()
            .flatten()
            .filter(|&i| i < self.nodes.len())
            .find(|&i| (self.nodes[i] - t).abs() <= MEMBERSHIP_TOL)
    }

    /// Index of `t`, or `PointNotInScale`.
    pub fn require_node(&self, t: f64) -> Result<usize> {
        self.index_of(t).ok_or(Error::PointNotInScale { t })
    }

    fn in_dense_interior(&self, t: f64) -> bool {
        self.intervals.iter().any(|&(lo, hi)| t > lo && t < hi)
    }

    pub fn contains(&self, t: f64) -> bool {
        self.index_of(t).is_some() || self.in_dense_interior(t)
    }

    fn require_member(&self, t: f64) -> Result<()> {
        if self.contains(t) {
            Ok(())
        } else {
            Err(Error::PointNotInScale { t })
        }
    }

    /// Forward jump `σ(t) = inf{s ∈ T : s > t}`, with `σ(max T) = max T`.
    pub fn sigma(&self, t: f64) -> Result<f64> {
        match self.index_of(t) {
            Some(i) => Ok(self.nodes[self.sigma_index(i)]),
            None if self.in_dense_interior(t) => Ok(t),
            None => Err(Error::PointNotInScale { t }),
        }
    }

    /// Backward jump `ρ(t) = sup{s ∈ T : s < t}`, with `ρ(min T) = min T`.
    pub fn rho(&self, t: f64) -> Result<f64> {
        match self.index_of(t) {
            Some(i) => Ok(self.nodes[self.rho_index(i)]),
            None if self.in_dense_interior(t) => Ok(t),
            None => Err(Error::PointNotInScale { t }),
        }
    }

    /// Graininess `μ(t) = σ(t) - t`.
    pub fn mu(&self, t: f64) -> Result<f64> {
        match self.index_of(t) {
            Some(i) => Ok(self.mu_at(i)),
            None if self.in_dense_interior(t) => Ok(0.0),
            None => Err(Error::PointNotInScale { t }),
        }
    }

    /// Node index of `σ(nodes[i])`.
    pub fn sigma_index(&self, i: usize) -> usize {
        if self.cell_dense[i] || i + 1 == self.nodes.len() {
            i
        } else {
            i + 1
        }
    }

    /// Node index of `ρ(nodes[i])`.
    pub fn rho_index(&self, i: usize) -> usize {
        if self.left_dense[i] || i == 0 {
            i
        } else {
            i - 1
        }
    }

    /// Graininess at node `i`.
    pub fn mu_at(&self, i: usize) -> f64 {
        self.nodes[self.sigma_index(i)] - self.nodes[i]
    }

    pub fn classify(&self, t: f64) -> Result<PointClass> {
        let sigma = self.sigma(t)?;
        let rho = self.rho(t)?;
        let side = |scattered: bool| {
            if scattered {
                Side::Scattered
            } else {
                Side::Dense
            }
        };
        Ok(PointClass {
            right: side(sigma > t),
            left: side(rho < t),
        })
    }

    /// Nodes of `[t0, t1]^κ`: every node in `[t0, t1]`, minus `t1` when
    /// `t1` is left-scattered.
    pub fn kappa_points(&self, t0: f64, t1: f64) -> Result<Vec<ScalePoint>> {
        let i0 = self.require_node(t0)?;
        let i1 = self.require_node(t1)?;
        if i0 >= i1 {
            return Err(Error::EmptyInterval { t0, t1 });
        }
        let end = if self.left_dense[i1] { i1 } else { i1 - 1 };
        Ok((i0..=end)
            .map(|i| ScalePoint {
                index: i,
                t: self.nodes[i],
                dense: self.cell_dense[i] && i < i1,
            })
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn z4() -> TimeScale {
        TimeScale::uniform(0.0, 3.0, 1.0).unwrap()
    }

    #[test]
    fn sigma_rho_on_integers() {
        let t = z4();
        assert_eq!(t.sigma(2.0).unwrap(), 3.0);
        assert_eq!(t.rho(2.0).unwrap(), 1.0);
        assert_eq!(t.sigma(3.0).unwrap(), 3.0);
        assert_eq!(t.rho(0.0).unwrap(), 0.0);
        for k in 0..3 {
            assert_eq!(t.mu(k as f64).unwrap(), 1.0);
        }
    }

    #[test]
    fn harmonic_neighbours() {
        let h = TimeScale::harmonic(10).unwrap();
        assert_eq!(h.len(), 11);
        assert_eq!(h.min(), 0.0);
        assert_eq!(h.max(), 1.0);
        assert_eq!(h.sigma(1.0 / 3.0).unwrap(), 0.5);
        assert!((h.mu(1.0 / 3.0).unwrap() - 1.0 / 6.0).abs() < 1e-15);
        assert_eq!(h.origin(), &Origin::Harmonic { n_max: 10 });
        let c = h.classify(0.5).unwrap();
        assert_eq!((c.right, c.left), (Side::Scattered, Side::Scattered));
    }

    #[test]
    fn harmonic_small_enumerations() {
        assert_eq!(
            TimeScale::harmonic(3).unwrap().nodes(),
            &[0.0, 1.0 / 3.0, 0.5, 1.0]
        );
        assert_eq!(TimeScale::harmonic(2).unwrap().nodes(), &[0.0, 0.5, 1.0]);
        assert!(matches!(
            TimeScale::harmonic(1),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn harmonic_graininess_closed_form() {
        let h = TimeScale::harmonic(60).unwrap();
        for n in 2..=60usize {
            let t = 1.0 / n as f64;
            let mu = h.mu(t).unwrap();
            assert!((mu - 1.0 / (n * (n - 1)) as f64).abs() < 1e-12);
            assert!((mu - t * t / (1.0 - t)).abs() < 1e-12);
        }
    }

    #[test]
    fn geometric_jumps() {
        let q = TimeScale::geometric(1.0, 8.0, 2.0).unwrap();
        assert_eq!(q.nodes(), &[1.0, 2.0, 4.0, 8.0]);
        assert_eq!(q.rho(4.0).unwrap(), 2.0);
        let q3 = TimeScale::geometric(1.0, 81.0, 3.0).unwrap();
        assert_eq!(q3.mu(9.0).unwrap(), 18.0);
        for &t in &q3.nodes()[..q3.len() - 1] {
            assert_eq!(q3.sigma(t).unwrap(), 3.0 * t);
            assert_eq!(q3.mu(t).unwrap(), 2.0 * t);
        }
    }

    #[test]
    fn dense_interval_is_exact() {
        let d = TimeScale::dense(0.0, 1.0, 10).unwrap();
        assert_eq!(d.sigma(1.0).unwrap(), 1.0);
        assert_eq!(d.rho(0.0).unwrap(), 0.0);
        assert_eq!(d.sigma(0.5).unwrap(), 0.5);
        assert_eq!(d.sigma(0.123).unwrap(), 0.123);
        assert_eq!(d.mu(0.123).unwrap(), 0.0);
        let c = d.classify(0.5).unwrap();
        assert_eq!((c.right, c.left), (Side::Dense, Side::Dense));
    }

    #[test]
    fn isolated_minimum_before_interval() {
        let s = TimeScale::points(vec![0.0])
            .unwrap()
            .union(&TimeScale::dense(1.0, 2.0, 4).unwrap())
            .unwrap();
        let c = s.classify(0.0).unwrap();
        assert_eq!((c.right, c.left), (Side::Scattered, Side::Dense));
        assert_eq!(s.sigma(0.0).unwrap(), 1.0);
        assert_eq!(s.rho(1.0).unwrap(), 0.0);
        assert_eq!(s.classify(1.0).unwrap().right, Side::Dense);
        assert_eq!(s.classify(1.0).unwrap().left, Side::Scattered);
    }

    #[test]
    fn membership_errors() {
        let t = z4();
        assert_eq!(t.sigma(0.5), Err(Error::PointNotInScale { t: 0.5 }));
        assert!(t.sigma(2.0 + 1e-13).is_ok());
        assert!(t.kappa_points(2.0, 1.0).is_err());
    }

    #[test]
    fn kappa_sets() {
        let ts: Vec<f64> = z4()
            .kappa_points(0.0, 3.0)
            .unwrap()
            .iter()
            .map(|p| p.t)
            .collect();
        assert_eq!(ts, vec![0.0, 1.0, 2.0]);

        let d = TimeScale::dense(0.0, 1.0, 8).unwrap();
        let k = d.kappa_points(0.0, 1.0).unwrap();
        assert_eq!(k.len(), 9);
        assert_eq!(k.last().unwrap().t, 1.0);
        assert!(k[..8].iter().all(|p| p.dense));

        let h = TimeScale::harmonic(10).unwrap();
        let k = h.kappa_points(0.0, 1.0).unwrap();
        assert_eq!(k.len(), 10);
        assert!(k.iter().all(|p| p.t < 1.0 && !p.dense));
    }

    #[test]
    fn invalid_segments() {
        assert!(TimeScale::uniform(0.0, 1.05, 0.1).is_err());
        assert!(TimeScale::geometric(1.0, 10.0, 2.0).is_err());
        assert!(TimeScale::geometric(1.0, 8.0, 1.0).is_err());
        assert!(TimeScale::points(vec![1.0, 1.0]).is_err());
        assert!(TimeScale::dense(1.0, 1.0, 10).is_err());
        assert!(TimeScale::from_segments(vec![]).is_err());
        let a = TimeScale::dense(0.0, 2.0, 4).unwrap();
        let b = TimeScale::dense(1.0, 3.0, 4).unwrap();
        assert!(a.union(&b).is_err());
    }

    #[test]
    fn touching_segments_share_endpoint() {
        let s = TimeScale::dense(0.0, 1.0, 4)
            .unwrap()
            .union(&TimeScale::uniform(1.0, 3.0, 1.0).unwrap())
            .unwrap();
        assert_eq!(s.len(), 7);
        assert_eq!(s.sigma(1.0).unwrap(), 2.0);
        assert_eq!(s.classify(1.0).unwrap().left, Side::Dense);
        let k = s.kappa_points(0.0, 3.0).unwrap();
        assert_eq!(k.last().unwrap().t, 2.0);
    }

    #[test]
    fn restrict_window() {
        let s = TimeScale::dense(0.0, 2.0, 100)
            .unwrap()
            .union(&TimeScale::points(vec![3.0, 5.0]).unwrap())
            .unwrap();
        let w = s.restrict(1.0, 3.0).unwrap();
        assert_eq!(w.min(), 1.0);
        assert_eq!(w.max(), 3.0);
        assert_eq!(w.len(), 52);
        assert_eq!(w.sigma(2.0).unwrap(), 3.0);
        let h = TimeScale::harmonic(5).unwrap().restrict(0.25, 1.0).unwrap();
        assert_eq!(h.nodes(), &[0.25, 1.0 / 3.0, 0.5, 1.0]);
        assert_eq!(h.origin(), &Origin::Harmonic { n_max: 5 });
    }

    fn arb_discrete_scale() -> impl Strategy<Value = TimeScale> {
        (any::<i8>(), prop::collection::vec(0.01f64..3.0, 1..30)).prop_map(|(start, gaps)| {
            let mut t = start as f64;
            let mut pts = vec![t];
            for g in gaps {
                t += g;
                pts.push(t);
            }
            TimeScale::points(pts).unwrap()
        })
    }

    fn arb_mixed_scale() -> impl Strategy<Value = TimeScale> {
        (arb_discrete_scale(), 0.5f64..4.0, 1usize..20).prop_map(|(d, len, res)| {
            let lo = d.max() + 0.5;
            d.union(&TimeScale::dense(lo, lo + len, res).unwrap())
                .unwrap()
                .union(&TimeScale::points(vec![lo + len + 1.0]).unwrap())
                .unwrap()
        })
    }

    proptest! {
        #[test]
        fn jump_operator_bracketing(s in arb_mixed_scale()) {
            for (i, &t) in s.nodes().iter().enumerate() {
                let sig = s.sigma(t).unwrap();
                let rho = s.rho(t).unwrap();
                prop_assert!(s.rho(sig).unwrap() <= t);
                prop_assert!(t <= s.sigma(rho).unwrap());
                prop_assert!(s.mu(t).unwrap() >= 0.0);
                let isolated = !s.cell_is_dense(i) && !s.node_is_left_dense(i) && i > 0 && i + 1 < s.len();
                if isolated {
                    prop_assert_eq!(s.rho(sig).unwrap(), t);
                    prop_assert_eq!(s.sigma(rho).unwrap(), t);
                }
            }
            prop_assert_eq!(s.mu(s.max()).unwrap(), 0.0);
        }

        #[test]
        fn sigma_is_monotone(s in arb_mixed_scale()) {
            let sig: Vec<f64> = s.nodes().iter().map(|&t| s.sigma(t).unwrap()).collect();
            prop_assert!(sig.windows(2).all(|w| w[0] <= w[1]));
        }
    }
}
