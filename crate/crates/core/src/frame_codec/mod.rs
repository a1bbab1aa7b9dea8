//! Wire format for one 32-cell readout and the complemented frame the rest of
//! the crate works with.
//!
//! A frame is 44 octets:
//!
//! ```text
//! 0..4   magic "TFRM"
//! 4      version (1)
//! 5..7   seq, u16 little-endian
//! 7..11  timestamp_ms, u32 little-endian
//! 11..43 raw ADC samples, slot = code * 4 + pin
//! 43     XOR of octets 0..43
//! ```
//!
//! Raw samples follow the device convention (more light, lower value). The
//! host complements them once, in [`complement`], so downstream code sees high
//! values for high IR transmission.

mod latest;
mod log;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hexgrid::{CellId, ANALOG_PINS, CELL_COUNT, DEMUX_CODES};

pub use latest::LatestFrame;
pub use log::{
    read_jsonl, read_log, stream_timestamp_ms, write_jsonl, write_log, FrameLog, LogWarning,
    NOMINAL_RATE_HZ,
};

pub const MAGIC: [u8; 4] = *b"TFRM";
pub const VERSION: u8 = 1;
pub const FRAME_LEN: usize = 44;
const PAYLOAD_OFFSET: usize = 11;

#[derive(Debug, Error)]
pub enum CodecError {
    #[error("frame must be {FRAME_LEN} octets, got {0}")]
    FrameLength(usize),
    #[error("bad magic {0:02x?}")]
    BadMagic([u8; 4]),
    #[error("unsupported frame version {0}")]
    BadVersion(u8),
    #[error("checksum mismatch: computed {computed:#04x}, stored {stored:#04x}")]
    BadChecksum { computed: u8, stored: u8 },
    #[error("log ends with a partial frame ({trailing} trailing octets after {frames} frames)")]
    TruncatedLog { frames: usize, trailing: usize },
    #[error("frame {index} in log: {source}")]
    InLog {
        index: usize,
        #[source]
        source: Box<CodecError>,
    },
    #[error("jsonl line {line}: {message}")]
    Jsonl { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// One readout as it comes off the wire.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RawFrame {
    pub adc: [u8; CELL_COUNT],
    pub seq: u16,
    pub timestamp_ms: u32,
}

/// One readout in the reported convention: `values[i] = 255 - adc[i]`, with
/// `i` the linear cell index.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Frame {
    pub seq: u16,
    pub timestamp_ms: u32,
    pub values: Vec<u8>,
}

impl Frame {
    /// A frame with no sequence or timing information, handy for tests and
    /// for grids other than the device's.
    pub fn from_values(values: Vec<u8>) -> Self {
        Self {
            seq: 0,
            timestamp_ms: 0,
            values,
        }
    }
}

/// Payload slot carrying the sample of `(code, pin)`.
pub fn payload_slot(code: usize, pin: usize) -> usize {
    code * ANALOG_PINS + pin
}

/// Inverse of [`payload_slot`].
pub fn slot_address(slot: usize) -> (usize, usize) {
    (slot / ANALOG_PINS, slot % ANALOG_PINS)
}

fn checksum(bytes: &[u8]) -> u8 {
    bytes.iter().fold(0, |acc, b| acc ^ b)
}

pub fn encode(frame: &RawFrame) -> [u8; FRAME_LEN] {
    let mut out = [0u8; FRAME_LEN];
    out[0..4].copy_from_slice(&MAGIC);
    out[4] = VERSION;
    out[5..7].copy_from_slice(&frame.seq.to_le_bytes());
    out[7..11].copy_from_slice(&frame.timestamp_ms.to_le_bytes());
    out[PAYLOAD_OFFSET..PAYLOAD_OFFSET + CELL_COUNT].copy_from_slice(&frame.adc);
    out[FRAME_LEN - 1] = checksum(&out[..FRAME_LEN - 1]);
    out
}

pub fn decode(bytes: &[u8]) -> Result<RawFrame, CodecError> {
    if bytes.len() != FRAME_LEN {
        return Err(CodecError::FrameLength(bytes.len()));
    }
    let magic: [u8; 4] = bytes[0..4].try_into().expect("length checked");
    if magic != MAGIC {
        return Err(CodecError::BadMagic(magic));
    }
    if bytes[4] != VERSION {
        return Err(CodecError::BadVersion(bytes[4]));
    }
    let computed = checksum(&bytes[..FRAME_LEN - 1]);
    let stored = bytes[FRAME_LEN - 1];
    if computed != stored {
        return Err(CodecError::BadChecksum { computed, stored });
    }
    let mut adc = [0u8; CELL_COUNT];
    adc.copy_from_slice(&bytes[PAYLOAD_OFFSET..PAYLOAD_OFFSET + CELL_COUNT]);
    Ok(RawFrame {
        adc,
        seq: u16::from_le_bytes([bytes[5], bytes[6]]),
        timestamp_ms: u32::from_le_bytes(bytes[7..11].try_into().expect("length checked")),
    })
}

/// Cell sampled by payload slot `slot` on the device.
fn slot_cell(slot: usize) -> CellId {
    let (code, pin) = slot_address(slot);
    debug_assert!(code < DEMUX_CODES);
    CellId::new(code, pin)
}

/// Converts a raw readout to the reported convention.
pub fn complement(raw: &RawFrame) -> Frame {
    let mut values = vec![0u8; CELL_COUNT];
    for (slot, &v) in raw.adc.iter().enumerate() {
        values[slot_cell(slot).index(ANALOG_PINS)] = 255 - v;
    }
    Frame {
        seq: raw.seq,
        timestamp_ms: raw.timestamp_ms,
        values,
    }
}

/// Inverse of [`complement`] for full 32-cell frames; `None` for any other size.
pub fn uncomplement(frame: &Frame) -> Option<RawFrame> {
    if frame.values.len() != CELL_COUNT {
        return None;
    }
    let mut adc = [0u8; CELL_COUNT];
    for (slot, a) in adc.iter_mut().enumerate() {
        *a = 255 - frame.values[slot_cell(slot).index(ANALOG_PINS)];
    }
    Some(RawFrame {
        adc,
        seq: frame.seq,
        timestamp_ms: frame.timestamp_ms,
    })
}
