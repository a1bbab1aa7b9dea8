//! Geometry and topology of the hexagonally packed 32-cell sensor array.
//!
//! Cells sit on an offset-row lattice: row `r`, column `c` has its centre at
//! `(c * pitch_x + [r odd] * odd_row_offset * pitch_x, r * pitch_y)`. The
//! default pitches stretch the lattice so the centres span the 38 x 30 mm
//! sensorised area, which makes the cells anisotropic hexagons.
//!
//! Rows are addressed by the 3-bit DEMUX code and columns by the analog pin,
//! so a `(code, pin)` readout address is simply `(row, col)`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geom::Point2;
use crate::kv;

/// Number of DEMUX selection codes per analog channel.
pub const DEMUX_CODES: usize = 8;
/// Number of analog readout channels.
pub const ANALOG_PINS: usize = 4;
/// Cells on the device.
pub const CELL_COUNT: usize = DEMUX_CODES * ANALOG_PINS;

/// Width of the sensorised area spanned by the cell centres, mm.
pub const SENSORISED_WIDTH_MM: f64 = 38.0;
/// Height of the sensorised area spanned by the cell centres, mm.
pub const SENSORISED_HEIGHT_MM: f64 = 30.0;
/// Density quoted on the device datasheet, cells per cm². Metadata only;
/// 32 cells over 38 x 30 mm works out to about 2.81 / cm².
pub const REPORTED_DENSITY_PER_CM2: f64 = 3.21;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GridError {
    #[error("grid must have at least one row and one column (got {rows} x {cols})")]
    ZeroDimension { rows: usize, cols: usize },
    #[error("pitches must be positive and finite (got {pitch_x} x {pitch_y} mm)")]
    InvalidPitch { pitch_x: f64, pitch_y: f64 },
    #[error("odd-row offset must lie in [0, 1) (got {0})")]
    InvalidOffset(f64),
    #[error("readout address (code {code}, pin {pin}) is out of range")]
    AddressRange { code: usize, pin: usize },
    #[error(transparent)]
    Config(#[from] kv::KvError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub rows: usize,
    pub cols: usize,
    pub pitch_x: f64,
    pub pitch_y: f64,
    /// Horizontal shift of odd rows, as a fraction of `pitch_x`.
    pub odd_row_offset: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        let odd_row_offset = 0.5;
        Self {
            rows: DEMUX_CODES,
            cols: ANALOG_PINS,
            pitch_x: SENSORISED_WIDTH_MM / (ANALOG_PINS as f64 - 1.0 + odd_row_offset),
            pitch_y: SENSORISED_HEIGHT_MM / (DEMUX_CODES as f64 - 1.0),
            odd_row_offset,
        }
    }
}

impl GridSpec {
    pub fn cell_count(&self) -> usize {
        self.rows * self.cols
    }

    pub fn validate(&self) -> Result<(), GridError> {
        if self.rows == 0 || self.cols == 0 {
            return Err(GridError::ZeroDimension {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let ok = |v: f64| v.is_finite() && v > 0.0;
        if !ok(self.pitch_x) || !ok(self.pitch_y) {
            return Err(GridError::InvalidPitch {
                pitch_x: self.pitch_x,
                pitch_y: self.pitch_y,
            });
        }
        if !(0.0..1.0).contains(&self.odd_row_offset) {
            return Err(GridError::InvalidOffset(self.odd_row_offset));
        }
        Ok(())
    }

    /// Parses the flat `key = value` block (`rows`, `cols`, `pitch_x_mm`,
    /// `pitch_y_mm`, `odd_row_offset`). Missing keys keep their defaults.
    pub fn from_kv(text: &str) -> Result<Self, GridError> {
        let mut spec = GridSpec::default();
        for e in kv::parse(text)? {
            match e.key.as_str() {
                "rows" => spec.rows = e.parse()?,
                "cols" => spec.cols = e.parse()?,
                "pitch_x_mm" => spec.pitch_x = e.parse()?,
                "pitch_y_mm" => spec.pitch_y = e.parse()?,
                "odd_row_offset" => spec.odd_row_offset = e.parse()?,
                _ => {
                    return Err(kv::KvError::UnknownKey {
                        line: e.line,
                        key: e.key,
                    }
                    .into())
                }
            }
        }
        spec.validate()?;
        Ok(spec)
    }

    pub fn to_kv(&self) -> String {
        kv::render([
            ("rows", self.rows.to_string()),
            ("cols", self.cols.to_string()),
            ("pitch_x_mm", self.pitch_x.to_string()),
            ("pitch_y_mm", self.pitch_y.to_string()),
            ("odd_row_offset", self.odd_row_offset.to_string()),
        ])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CellId {
    pub row: usize,
    pub col: usize,
}

impl CellId {
    pub const fn new(row: usize, col: usize) -> Self {
        Self { row, col }
    }

    pub fn index(self, cols: usize) -> usize {
        self.row * cols + self.col
    }

    pub fn from_index(index: usize, cols: usize) -> Self {
        Self {
            row: index / cols,
            col: index % cols,
        }
    }
}

/// Maps a readout address to the cell it samples.
pub fn address_to_cell(code: usize, pin: usize, spec: &GridSpec) -> Result<CellId, GridError> {
    if code >= DEMUX_CODES || pin >= ANALOG_PINS || code >= spec.rows || pin >= spec.cols {
        return Err(GridError::AddressRange { code, pin });
    }
    Ok(CellId::new(code, pin))
}

/// Immutable cell layout: centres plus lattice adjacency.
#[derive(Debug, Clone, PartialEq)]
pub struct SensorGrid {
    spec: GridSpec,
    centres: Vec<Point2>,
    neighbors: Vec<Vec<usize>>,
}

impl SensorGrid {
    pub fn new(spec: GridSpec) -> Result<Self, GridError> {
        build_grid(spec)
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn len(&self) -> usize {
        self.centres.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centres.is_empty()
    }

    pub fn cell(&self, index: usize) -> CellId {
        CellId::from_index(index, self.spec.cols)
    }

    pub fn index(&self, cell: CellId) -> usize {
        cell.index(self.spec.cols)
    }

    pub fn centres(&self) -> &[Point2] {
        &self.centres
    }

    pub fn centre(&self, index: usize) -> Point2 {
        self.centres[index]
    }

    /// Linear indices of the cells adjacent to `index`, ascending.
    pub fn neighbors(&self, index: usize) -> &[usize] {
        &self.neighbors[index]
    }

    /// Every unordered neighbor pair once, as `(a, b)` with `a < b`.
    pub fn neighbor_pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.neighbors
            .iter()
            .enumerate()
            .flat_map(|(a, ns)| ns.iter().filter(move |&&b| b > a).map(move |&b| (a, b)))
    }

    /// Size of the box spanned by the cell centres.
    pub fn extent(&self) -> (f64, f64) {
        let (min, max) = self.bounds();
        (max.x - min.x, max.y - min.y)
    }

    /// Min and max corners of the box spanned by the cell centres.
    pub fn bounds(&self) -> (Point2, Point2) {
        let mut min = Point2::new(f64::INFINITY, f64::INFINITY);
        let mut max = Point2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for c in &self.centres {
            min.x = min.x.min(c.x);
            min.y = min.y.min(c.y);
            max.x = max.x.max(c.x);
            max.y = max.y.max(c.y);
        }
        (min, max)
    }

    /// Half-width and half-height of the rectangular footprint around each
    /// centre. Footprints tile the plane.
    pub fn footprint_half(&self) -> (f64, f64) {
        (self.spec.pitch_x / 2.0, self.spec.pitch_y / 2.0)
    }

    /// Whether `p` lies inside the union of cell footprints.
    pub fn footprint_contains(&self, p: Point2) -> bool {
        let (hx, hy) = self.footprint_half();
        let row = ((p.y + hy) / self.spec.pitch_y).floor();
        if row < 0.0 || row >= self.spec.rows as f64 {
            return false;
        }
        let shift = if row as usize % 2 == 1 {
            self.spec.odd_row_offset * self.spec.pitch_x
        } else {
            0.0
        };
        let col = ((p.x - shift + hx) / self.spec.pitch_x).floor();
        col >= 0.0 && col < self.spec.cols as f64
    }
}

/// Lays out cell centres and computes lattice adjacency.
///
/// Two cells are neighbors when they are horizontally adjacent in the same
/// row, or sit in adjacent rows with a horizontal offset smaller than one
/// column pitch. For the default half-pitch offset that gives the six
/// hexagonal neighbors of every interior cell.
pub fn build_grid(spec: GridSpec) -> Result<SensorGrid, GridError> {
    spec.validate()?;
    let n = spec.cell_count();
    let centres: Vec<Point2> = (0..n)
        .map(|i| {
            let CellId { row, col } = CellId::from_index(i, spec.cols);
            let shift = if row % 2 == 1 {
                spec.odd_row_offset
            } else {
                0.0
            };
            Point2::new(
                (col as f64 + shift) * spec.pitch_x,
                row as f64 * spec.pitch_y,
            )
        })
        .collect();

    let tol = spec.pitch_x * 1e-9;
    let mut neighbors = vec![Vec::new(); n];
    for a in 0..n {
        let ca = CellId::from_index(a, spec.cols);
        for b in 0..n {
            if a == b {
                continue;
            }
            let cb = CellId::from_index(b, spec.cols);
            let adjacent = match ca.row.abs_diff(cb.row) {
                0 => ca.col.abs_diff(cb.col) == 1,
                1 => (centres[a].x - centres[b].x).abs() < spec.pitch_x - tol,
                _ => false,
            };
            if adjacent {
                neighbors[a].push(b);
            }
        }
    }
    Ok(SensorGrid {
        spec,
        centres,
        neighbors,
    })
}
