use serde::Serialize;

use super::fit::Line;
use super::{ClusterSplit, EdgeMarker, PiecewiseLinearFit};
use crate::frame_codec::Frame;
use crate::geom::Point2;
use crate::hexgrid::SensorGrid;

/// What the dark/bright border looks like.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FeatureKind {
    StraightEdge {
        angle_deg: f64,
    },
    Corner {
        vertex: Point2,
        opening_angle_deg: f64,
    },
    /// Thin dark stripe bordered on both sides, e.g. a cable.
    Band {
        angle_deg: f64,
        /// Shadow area divided by the length of the band inside the grid.
        width_mm: f64,
        /// Distance between the mean marker offsets on either side.
        marker_separation_mm: f64,
    },
    None,
}

impl FeatureKind {
    pub fn name(&self) -> &'static str {
        match self {
            FeatureKind::StraightEdge { .. } => "straight_edge",
            FeatureKind::Corner { .. } => "corner",
            FeatureKind::Band { .. } => "band",
            FeatureKind::None => "none",
        }
    }

    pub fn is_none(&self) -> bool {
        matches!(self, FeatureKind::None)
    }
}

/// Decides the feature kind from the border fit.
///
/// Two segments make a corner. A single line with markers on both sides of
/// the dark cluster (the dark centroid lies strictly between the two marker
/// subsets) is a band. Anything else with a fit is a straight edge.
///
/// Band width comes from the shadow rather than the markers, which sit
/// roughly a row pitch apart whatever the cable width: each cell's darkening
/// relative to the bright-cluster mean, times its footprint area, summed and
/// divided by the length of the fitted line inside the footprint union.
pub fn classify(
    frame: &Frame,
    grid: &SensorGrid,
    split: &ClusterSplit,
    centroid: Option<Point2>,
    markers: &[EdgeMarker],
    fit: Option<&PiecewiseLinearFit>,
) -> FeatureKind {
    let (Some(centroid), Some(fit)) = (centroid, fit) else {
        return FeatureKind::None;
    };
    match (fit.segments.as_slice(), fit.vertex) {
        ([_, _], Some(vertex)) => FeatureKind::Corner {
            vertex,
            opening_angle_deg: fit.opening_angle_deg().expect("two segments"),
        },
        ([seg], _) => {
            let line = &fit.lines[0];
            let angle_deg = seg.angle_deg();
            match marker_separation(line, centroid, markers) {
                Some(marker_separation_mm) => FeatureKind::Band {
                    angle_deg,
                    width_mm: shadow_width(frame, grid, split, line),
                    marker_separation_mm,
                },
                None => FeatureKind::StraightEdge { angle_deg },
            }
        }
        _ => FeatureKind::None,
    }
}

fn marker_separation(line: &Line, centroid: Point2, markers: &[EdgeMarker]) -> Option<f64> {
    let (mut pos, mut n_pos, mut neg, mut n_neg) = (0.0, 0usize, 0.0, 0usize);
    for m in markers {
        let d = line.signed_distance(m.position);
        if d > 0.0 {
            pos += d;
            n_pos += 1;
        } else if d < 0.0 {
            neg += d;
            n_neg += 1;
        }
    }
    if n_pos == 0 || n_neg == 0 {
        return None;
    }
    let (hi, lo) = (pos / n_pos as f64, neg / n_neg as f64);
    let c = line.signed_distance(centroid);
    (lo < c && c < hi).then_some(hi - lo)
}

const CHORD_STEP_MM: f64 = 0.01;

/// Length of `line` inside the union of cell footprints.
pub fn chord_length(grid: &SensorGrid, line: &Line) -> f64 {
    let (lo, hi) = grid.bounds();
    let reach = lo.distance(hi) + grid.spec().pitch_x + grid.spec().pitch_y;
    let n = (2.0 * reach / CHORD_STEP_MM).ceil() as usize;
    let s0 = line.project(Point2::new((lo.x + hi.x) / 2.0, (lo.y + hi.y) / 2.0)) - reach;
    (0..n)
        .filter(|&i| grid.footprint_contains(line.at(s0 + (i as f64 + 0.5) * CHORD_STEP_MM)))
        .count() as f64
        * CHORD_STEP_MM
}

fn shadow_width(frame: &Frame, grid: &SensorGrid, split: &ClusterSplit, line: &Line) -> f64 {
    let bright = split
        .bright
        .iter()
        .map(|&i| f64::from(frame.values[i]))
        .sum::<f64>()
        / split.bright.len() as f64;
    let (hx, hy) = grid.footprint_half();
    let shadow: f64 = frame
        .values
        .iter()
        .map(|&v| ((bright - f64::from(v)) / bright).max(0.0))
        .sum::<f64>()
        * 4.0
        * hx
        * hy;
    let chord = chord_length(grid, line);
    if chord > 0.0 {
        shadow / chord
    } else {
        0.0
    }
}
