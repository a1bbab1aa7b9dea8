//! Frame logs (`.tfl`): back-to-back 44-octet frames, no separators.

use std::fs;
use std::io::{BufRead, Write};
use std::path::Path;

use serde::Serialize;

use super::{decode, encode, CodecError, Frame, RawFrame, FRAME_LEN};

/// Readout rate of the device stream.
pub const NOMINAL_RATE_HZ: f64 = 55.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LogWarning {
    /// Frame `index` has an earlier timestamp than its predecessor.
    NonMonotonicTime { index: usize, prev_ms: u32, ms: u32 },
}

impl std::fmt::Display for LogWarning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            LogWarning::NonMonotonicTime { index, prev_ms, ms } => write!(
                f,
                "frame {index} has timestamp {ms} ms, earlier than the previous {prev_ms} ms"
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct FrameLog {
    pub frames: Vec<RawFrame>,
    pub warnings: Vec<LogWarning>,
}

impl FrameLog {
    pub fn from_bytes(bytes: &[u8]) -> Result<Self, CodecError> {
        let trailing = bytes.len() % FRAME_LEN;
        if trailing != 0 {
            return Err(CodecError::TruncatedLog {
                frames: bytes.len() / FRAME_LEN,
                trailing,
            });
        }
        let frames = bytes
            .chunks_exact(FRAME_LEN)
            .enumerate()
            .map(|(index, chunk)| {
                decode(chunk).map_err(|e| CodecError::InLog {
                    index,
                    source: Box::new(e),
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        let warnings = frames
            .windows(2)
            .enumerate()
            .filter(|(_, w)| w[1].timestamp_ms < w[0].timestamp_ms)
            .map(|(i, w)| LogWarning::NonMonotonicTime {
                index: i + 1,
                prev_ms: w[0].timestamp_ms,
                ms: w[1].timestamp_ms,
            })
            .collect();
        Ok(Self { frames, warnings })
    }

    pub fn to_bytes(frames: &[RawFrame]) -> Vec<u8> {
        let mut out = Vec::with_capacity(frames.len() * FRAME_LEN);
        for f in frames {
            out.extend_from_slice(&encode(f));
        }
        out
    }
}

pub fn read_log(path: impl AsRef<Path>) -> Result<FrameLog, CodecError> {
    FrameLog::from_bytes(&fs::read(path)?)
}

pub fn write_log(path: impl AsRef<Path>, frames: &[RawFrame]) -> Result<(), CodecError> {
    fs::write(path, FrameLog::to_bytes(frames))?;
    Ok(())
}

#[derive(Serialize, serde::Deserialize)]
struct JsonFrame {
    seq: u16,
    timestamp_ms: u32,
    values: Vec<u8>,
}

/// One JSON object per frame: `seq`, `timestamp_ms`, `values` (linear index order).
pub fn write_jsonl<W: Write>(mut out: W, frames: &[Frame]) -> Result<(), CodecError> {
    for f in frames {
        let line = serde_json::to_string(&JsonFrame {
            seq: f.seq,
            timestamp_ms: f.timestamp_ms,
            values: f.values.clone(),
        })
        .expect("plain struct serializes");
        writeln!(out, "{line}")?;
    }
    Ok(())
}

pub fn read_jsonl<R: BufRead>(input: R) -> Result<Vec<Frame>, CodecError> {
    let mut out = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let jf: JsonFrame = serde_json::from_str(&line).map_err(|e| CodecError::Jsonl {
            line: i + 1,
            message: e.to_string(),
        })?;
        out.push(Frame {
            seq: jf.seq,
            timestamp_ms: jf.timestamp_ms,
            values: jf.values,
        });
    }
    Ok(out)
}

/// Timestamp of the `index`-th frame of a stream starting at `start_ms`,
/// rounded to the nearest millisecond.
pub fn stream_timestamp_ms(start_ms: u32, index: usize) -> u32 {
    let offset = (index as f64 * 1000.0 / NOMINAL_RATE_HZ).round() as u32;
    start_ms.wrapping_add(offset)
}
