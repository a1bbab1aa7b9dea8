use super::{ClusterSplit, PipelineError};
use crate::frame_codec::Frame;
use crate::geom::Point2;
use crate::hexgrid::SensorGrid;

/// Weighted mean of dark-cell centres, each weighted by `255 - value`.
pub fn dark_centroid(
    frame: &Frame,
    split: &ClusterSplit,
    grid: &SensorGrid,
) -> Result<Point2, PipelineError> {
    if split.dark.is_empty() {
        return Err(PipelineError::EmptyDark);
    }
    let mut sum = Point2::ORIGIN;
    let mut total = 0.0;
    for &i in &split.dark {
        let w = f64::from(255 - frame.values[i]);
        sum = sum + grid.centre(i) * w;
        total += w;
    }
    if total == 0.0 {
        return Err(PipelineError::ZeroWeight);
    }
    Ok(sum * (1.0 / total))
}
