use serde::Serialize;

use super::PipelineError;
use crate::frame_codec::Frame;

/// Partition of a frame into a dark (shadowed) and a bright cluster.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClusterSplit {
    /// Average of the dark and bright cluster means, reported units.
    pub lambda: f64,
    /// Linear indices of dark cells, ascending.
    pub dark: Vec<usize>,
    /// Linear indices of bright cells, ascending.
    pub bright: Vec<usize>,
    /// Size of the step the split was placed at.
    pub gap: u8,
}

impl ClusterSplit {
    pub fn is_dark(&self, index: usize) -> bool {
        self.dark.binary_search(&index).is_ok()
    }
}

/// Splits the frame at the largest step between adjacent sorted values.
///
/// Cells at or below the low side of the step are dark. Equal maximal steps
/// resolve to the lowest-valued one. A largest step below `min_gap` (or a
/// zero step) yields [`PipelineError::NoSplit`].
pub fn gap_threshold(frame: &Frame, min_gap: u8) -> Result<ClusterSplit, PipelineError> {
    let values = &frame.values;
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by_key(|&i| (values[i], i));

    let mut best: Option<(usize, u8)> = None;
    for (k, w) in order.windows(2).enumerate() {
        let step = values[w[1]] - values[w[0]];
        if best.is_none_or(|(_, g)| step > g) {
            best = Some((k, step));
        }
    }
    let largest = best.map_or(0, |(_, g)| g);
    let (cut, gap) = match best {
        Some((k, g)) if g > 0 && g >= min_gap => (k + 1, g),
        _ => return Err(PipelineError::NoSplit { largest }),
    };

    let mean =
        |idx: &[usize]| idx.iter().map(|&i| f64::from(values[i])).sum::<f64>() / idx.len() as f64;
    let lambda = (mean(&order[..cut]) + mean(&order[cut..])) / 2.0;

    let mut dark = order[..cut].to_vec();
    let mut bright = order[cut..].to_vec();
    dark.sort_unstable();
    bright.sort_unstable();
    Ok(ClusterSplit {
        lambda,
        dark,
        bright,
        gap,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn frame(values: &[u8]) -> Frame {
        Frame::from_values(values.to_vec())
    }

    #[test]
    fn six_cell_example() {
        let s = gap_threshold(&frame(&[235, 8, 240, 10, 238, 12]), 8).unwrap();
        assert_eq!(s.dark, vec![1, 3, 5]);
        assert_eq!(s.bright, vec![0, 2, 4]);
        assert_eq!(s.gap, 223);
        let expected = (10.0 + (235.0 + 238.0 + 240.0) / 3.0) / 2.0;
        assert!((s.lambda - expected).abs() < 1e-12);
        assert!((s.lambda - 123.833_333_333_333_33).abs() < 1e-9);
    }

    #[test]
    fn uniform_frame_has_no_split() {
        assert!(matches!(
            gap_threshold(&frame(&[128; 32]), 8),
            Err(PipelineError::NoSplit { largest: 0 })
        ));
        // zero step never splits, even with the floor disabled
        assert!(gap_threshold(&frame(&[7; 4]), 0).is_err());
    }

    #[test]
    fn equal_steps_take_the_lowest() {
        let s = gap_threshold(&frame(&[200, 0, 100]), 8).unwrap();
        assert_eq!(s.dark, vec![1]);
        assert_eq!(s.bright, vec![0, 2]);
        assert!((s.lambda - 75.0).abs() < 1e-12);
    }

    #[test]
    fn small_gap_below_floor() {
        assert!(matches!(
            gap_threshold(&frame(&[100, 104, 107]), 8),
            Err(PipelineError::NoSplit { largest: 4 })
        ));
        assert!(gap_threshold(&frame(&[100, 104, 107]), 4).is_ok());
    }
}
