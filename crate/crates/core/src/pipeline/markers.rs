use serde::Serialize;

use crate::frame_codec::Frame;
use crate::geom::Point2;
use crate::hexgrid::SensorGrid;

/// Point between two neighboring cell centres where the linearly
/// interpolated value equals the threshold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EdgeMarker {
    pub position: Point2,
    /// Linear indices of the two source cells.
    pub cells: (usize, usize),
    /// Parametric position along `centre(cells.0) -> centre(cells.1)`.
    pub t: f64,
}

/// Places a marker on every neighbor pair whose values straddle `lambda`.
///
/// A cell whose value equals `lambda` exactly gets a single marker at its own
/// centre, however many pairs it belongs to.
pub fn edge_markers(frame: &Frame, lambda: f64, grid: &SensorGrid) -> Vec<EdgeMarker> {
    let value = |i: usize| f64::from(frame.values[i]);
    let mut on_level = vec![false; grid.len()];
    let mut out = Vec::new();
    for (a, b) in grid.neighbor_pairs() {
        let (v1, v2) = (value(a), value(b));
        if (v1 - lambda) * (v2 - lambda) < 0.0 {
            let t = (lambda - v1) / (v2 - v1);
            out.push(EdgeMarker {
                position: grid.centre(a).lerp(grid.centre(b), t),
                cells: (a, b),
                t,
            });
            continue;
        }
        for (cell, t) in [(a, 0.0), (b, 1.0)] {
            if value(cell) == lambda && !on_level[cell] {
                on_level[cell] = true;
                out.push(EdgeMarker {
                    position: grid.centre(cell),
                    cells: (a, b),
                    t,
                });
            }
        }
    }
    out
}
