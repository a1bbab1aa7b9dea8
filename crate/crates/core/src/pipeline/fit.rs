//! Total-least-squares line fits and the one-or-two segment border model.

use serde::{Deserialize, Serialize};

use super::PipelineError;
use crate::geom::{wrap_line_angle_deg, Point2};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitParams {
    /// 1 or 2.
    pub max_segments: usize,
    /// Two segments must cut the RMS residual to at most this fraction.
    pub corner_residual_ratio: f64,
    /// Minimum angle between the two lines of a corner, degrees.
    pub min_corner_angle_deg: f64,
}

impl Default for FitParams {
    fn default() -> Self {
        Self {
            max_segments: 2,
            corner_residual_ratio: 0.5,
            min_corner_angle_deg: 20.0,
        }
    }
}

/// Infinite line through `point` along unit `direction`, with the RMS
/// orthogonal distance of the points it was fitted to.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Line {
    pub point: Point2,
    pub direction: Point2,
    pub rms: f64,
}

impl Line {
    /// Direction angle in (-90, 90] degrees.
    pub fn angle_deg(&self) -> f64 {
        wrap_line_angle_deg(self.direction.y.atan2(self.direction.x).to_degrees())
    }

    pub fn signed_distance(&self, p: Point2) -> f64 {
        (p - self.point).dot(self.direction.perp())
    }

    pub fn project(&self, p: Point2) -> f64 {
        (p - self.point).dot(self.direction)
    }

    pub fn at(&self, s: f64) -> Point2 {
        self.point + self.direction * s
    }

    pub fn intersect(&self, other: &Line) -> Option<Point2> {
        let denom = self.direction.cross(other.direction);
        if denom.abs() < 1e-12 {
            return None;
        }
        let s = (other.point - self.point).cross(other.direction) / denom;
        Some(self.at(s))
    }

    fn sum_sq(&self, pts: &[Point2]) -> f64 {
        pts.iter().map(|&p| self.signed_distance(p).powi(2)).sum()
    }
}

/// Orthogonal regression: the line through the mean along the major axis
/// of the scatter matrix.
pub fn fit_line(points: &[Point2]) -> Result<Line, PipelineError> {
    if points.len() < 2 {
        return Err(PipelineError::InsufficientMarkers(points.len()));
    }
    let n = points.len() as f64;
    let mean = points.iter().fold(Point2::ORIGIN, |a, &p| a + p) * (1.0 / n);
    let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
    for &p in points {
        let d = p - mean;
        sxx += d.x * d.x;
        syy += d.y * d.y;
        sxy += d.x * d.y;
    }
    let theta = 0.5 * (2.0 * sxy).atan2(sxx - syy);
    let mut direction = Point2::new(theta.cos(), theta.sin());
    // keep the direction angle in (-90, 90]
    if direction.x < 0.0 || (direction.x == 0.0 && direction.y < 0.0) {
        direction = direction * -1.0;
    }
    let mut line = Line {
        point: mean,
        direction,
        rms: 0.0,
    };
    line.rms = (line.sum_sq(points) / n).sqrt();
    Ok(line)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub start: Point2,
    pub end: Point2,
}

impl Segment {
    pub fn angle_deg(&self) -> f64 {
        let d = self.end - self.start;
        wrap_line_angle_deg(d.y.atan2(d.x).to_degrees())
    }

    pub fn length(&self) -> f64 {
        self.start.distance(self.end)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PiecewiseLinearFit {
    /// One segment, or two joined at `vertex` (first ends where second starts).
    pub segments: Vec<Segment>,
    /// RMS orthogonal distance of the markers to the fit, mm.
    pub residual: f64,
    pub vertex: Option<Point2>,
    /// Line(s) behind the segments, same order.
    #[serde(skip)]
    pub lines: Vec<Line>,
}

impl PiecewiseLinearFit {
    /// Angle at the vertex between the two segments, degrees in (0, 180).
    pub fn opening_angle_deg(&self) -> Option<f64> {
        let [a, b] = self.segments.as_slice() else {
            return None;
        };
        let u = (a.start - a.end).normalized();
        let v = (b.end - b.start).normalized();
        Some(u.dot(v).clamp(-1.0, 1.0).acos().to_degrees())
    }

    /// Angle between the two fitted lines, degrees in [0, 90].
    pub fn line_angle_deg(&self) -> Option<f64> {
        let [a, b] = self.lines.as_slice() else {
            return None;
        };
        Some(
            a.direction
                .dot(b.direction)
                .abs()
                .clamp(0.0, 1.0)
                .acos()
                .to_degrees(),
        )
    }
}

struct TwoLineFit {
    first_points: Vec<Point2>,
    second_points: Vec<Point2>,
    first: Line,
    second: Line,
    vertex: Point2,
    residual: f64,
}

/// Fits one segment, or two when a corner explains the markers much better.
///
/// Two segments are tried by splitting the markers, ordered along the single
/// line, at every position leaving at least two markers per side. The best
/// split is kept only if its residual is at most
/// `corner_residual_ratio * residual_1` and its lines meet at an angle of at
/// least `min_corner_angle_deg`.
pub fn fit_piecewise(
    markers: &[Point2],
    params: &FitParams,
) -> Result<PiecewiseLinearFit, PipelineError> {
    let single = fit_line(markers)?;
    let mut order: Vec<Point2> = markers.to_vec();
    order.sort_by(|a, b| single.project(*a).total_cmp(&single.project(*b)));

    if params.max_segments >= 2 && markers.len() >= 4 {
        if let Some(two) = best_two_line_fit(&order) {
            let angle = two
                .first
                .direction
                .dot(two.second.direction)
                .abs()
                .clamp(0.0, 1.0)
                .acos()
                .to_degrees();
            if two.residual <= params.corner_residual_ratio * single.rms
                && angle >= params.min_corner_angle_deg
            {
                let far = |line: &Line, pts: &[Point2]| {
                    let s_v = line.project(two.vertex);
                    let s = pts
                        .iter()
                        .map(|&p| line.project(p))
                        .max_by(|a, b| (a - s_v).abs().total_cmp(&(b - s_v).abs()))
                        .expect("non-empty side");
                    line.at(s)
                };
                let a = far(&two.first, &two.first_points);
                let b = far(&two.second, &two.second_points);
                return Ok(PiecewiseLinearFit {
                    segments: vec![
                        Segment {
                            start: a,
                            end: two.vertex,
                        },
                        Segment {
                            start: two.vertex,
                            end: b,
                        },
                    ],
                    residual: two.residual,
                    vertex: Some(two.vertex),
                    lines: vec![two.first, two.second],
                });
            }
        }
    }

    let (lo, hi) = order
        .iter()
        .map(|&p| single.project(p))
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), s| {
            (lo.min(s), hi.max(s))
        });
    Ok(PiecewiseLinearFit {
        segments: vec![Segment {
            start: single.at(lo),
            end: single.at(hi),
        }],
        residual: single.rms,
        vertex: None,
        lines: vec![single],
    })
}

fn best_two_line_fit(order: &[Point2]) -> Option<TwoLineFit> {
    let n = order.len();
    let mut best: Option<TwoLineFit> = None;
    for split in 2..=n - 2 {
        let (left, right) = order.split_at(split);
        let (Ok(first), Ok(second)) = (fit_line(left), fit_line(right)) else {
            continue;
        };
        let Some(vertex) = first.intersect(&second) else {
            continue;
        };
        let residual = ((first.sum_sq(left) + second.sum_sq(right)) / n as f64).sqrt();
        if best.as_ref().is_none_or(|b| residual < b.residual) {
            best = Some(TwoLineFit {
                first_points: left.to_vec(),
                second_points: right.to_vec(),
                first,
                second,
                vertex,
                residual,
            });
        }
    }
    best
}
