//! Per-frame feature extraction.
//!
//! 1. [`gap_threshold`] splits the values at the largest step of the sorted
//!    list and sets λ to the mean of the two cluster means.
//! 2. [`dark_centroid`] takes the complement-weighted mean of the dark cells.
//! 3. [`edge_markers`] interpolates along every neighbor pair crossing λ.
//! 4. [`fit_piecewise`] fits one or two line segments to the markers and
//!    [`classify`] names the result.
//!
//! Every stage is a pure function of its inputs.

mod centroid;
mod classify;
pub mod fit;
mod markers;
mod threshold;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::frame_codec::Frame;
use crate::geom::Point2;
use crate::hexgrid::SensorGrid;

pub use centroid::dark_centroid;
pub use classify::{classify, FeatureKind};
pub use fit::{fit_line, fit_piecewise, FitParams, Line, PiecewiseLinearFit, Segment};
pub use markers::{edge_markers, EdgeMarker};
pub use threshold::{gap_threshold, ClusterSplit};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PipelineError {
    #[error("no distinct dark and bright clusters (largest step {largest})")]
    NoSplit { largest: u8 },
    #[error("dark cluster is empty")]
    EmptyDark,
    #[error("all dark-cell weights are zero")]
    ZeroWeight,
    #[error("need at least 2 edge markers, got {0}")]
    InsufficientMarkers(usize),
    #[error("frame has {got} values but the grid has {expected} cells")]
    FrameSize { expected: usize, got: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PipelineParams {
    /// Smallest step accepted as a dark/bright boundary, reported units.
    pub min_gap: u8,
    pub fit: FitParams,
}

impl Default for PipelineParams {
    fn default() -> Self {
        Self {
            min_gap: 8,
            fit: FitParams::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EdgeFeatures {
    pub split: Option<ClusterSplit>,
    pub centroid: Option<Point2>,
    pub markers: Vec<EdgeMarker>,
    pub fit: Option<PiecewiseLinearFit>,
    pub kind: FeatureKind,
}

impl EdgeFeatures {
    pub fn empty() -> Self {
        Self {
            split: None,
            centroid: None,
            markers: Vec::new(),
            fit: None,
            kind: FeatureKind::None,
        }
    }

    pub fn lambda(&self) -> Option<f64> {
        self.split.as_ref().map(|s| s.lambda)
    }
}

/// Runs all stages on one frame. A frame without distinct clusters yields
/// empty features with kind `none`; too few markers leave the fit empty.
pub fn process(
    frame: &Frame,
    grid: &SensorGrid,
    params: &PipelineParams,
) -> Result<EdgeFeatures, PipelineError> {
    if frame.values.len() != grid.len() {
        return Err(PipelineError::FrameSize {
            expected: grid.len(),
            got: frame.values.len(),
        });
    }
    let split = match gap_threshold(frame, params.min_gap) {
        Ok(s) => s,
        Err(PipelineError::NoSplit { .. }) => return Ok(EdgeFeatures::empty()),
        Err(e) => return Err(e),
    };
    let centroid = dark_centroid(frame, &split, grid)?;
    let markers = edge_markers(frame, split.lambda, grid);
    let points: Vec<Point2> = markers.iter().map(|m| m.position).collect();
    let fit = match fit_piecewise(&points, &params.fit) {
        Ok(f) => Some(f),
        Err(PipelineError::InsufficientMarkers(_)) => None,
        Err(e) => return Err(e),
    };
    let kind = classify(frame, grid, &split, Some(centroid), &markers, fit.as_ref());
    Ok(EdgeFeatures {
        split: Some(split),
        centroid: Some(centroid),
        markers,
        fit,
        kind,
    })
}

/// One line of the feature JSONL export.
#[derive(Debug, Clone, Serialize)]
pub struct FeatureRecord {
    pub seq: u16,
    pub timestamp_ms: u32,
    pub lambda: Option<f64>,
    pub dark: Vec<usize>,
    pub centroid_mm: Option<Point2>,
    pub markers_mm: Vec<Point2>,
    /// Segments as `[start, end]` endpoint pairs.
    pub fit: Option<Vec<[Point2; 2]>>,
    /// Flattened: `kind` plus the kind's own fields.
    #[serde(flatten)]
    pub kind: FeatureKind,
    pub params: PipelineParams,
}

impl FeatureRecord {
    pub fn new(frame: &Frame, features: &EdgeFeatures, params: &PipelineParams) -> Self {
        Self {
            seq: frame.seq,
            timestamp_ms: frame.timestamp_ms,
            lambda: features.lambda(),
            dark: features
                .split
                .as_ref()
                .map(|s| s.dark.clone())
                .unwrap_or_default(),
            centroid_mm: features.centroid,
            markers_mm: features.markers.iter().map(|m| m.position).collect(),
            fit: features
                .fit
                .as_ref()
                .map(|f| f.segments.iter().map(|s| [s.start, s.end]).collect()),
            kind: features.kind,
            params: *params,
        }
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("record serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hexgrid::GridSpec;

    #[test]
    fn uniform_frame_is_none() {
        let grid = SensorGrid::new(GridSpec::default()).unwrap();
        let f = process(
            &Frame::from_values(vec![255; 32]),
            &grid,
            &PipelineParams::default(),
        )
        .unwrap();
        assert_eq!(f, EdgeFeatures::empty());
    }

    #[test]
    fn wrong_frame_size() {
        let grid = SensorGrid::new(GridSpec::default()).unwrap();
        assert!(matches!(
            process(
                &Frame::from_values(vec![0; 6]),
                &grid,
                &PipelineParams::default()
            ),
            Err(PipelineError::FrameSize {
                expected: 32,
                got: 6
            })
        ));
    }

    #[test]
    fn record_json_shape() {
        let grid = SensorGrid::new(GridSpec::default()).unwrap();
        // bottom two rows dark
        let values: Vec<u8> = (0..32).map(|i| if i < 8 { 10 } else { 250 }).collect();
        let frame = Frame::from_values(values);
        let params = PipelineParams::default();
        let feats = process(&frame, &grid, &params).unwrap();
        assert_eq!(feats.kind.name(), "straight_edge");
        let v: serde_json::Value =
            serde_json::from_str(&FeatureRecord::new(&frame, &feats, &params).to_json_line())
                .unwrap();
        assert_eq!(v["kind"], "straight_edge");
        assert!(v["angle_deg"].is_number());
        assert_eq!(v["dark"].as_array().unwrap().len(), 8);
        assert_eq!(v["centroid_mm"].as_array().unwrap().len(), 2);
        assert_eq!(v["fit"][0].as_array().unwrap().len(), 2);
        assert_eq!(v["params"]["min_gap"], 8);
    }
}
