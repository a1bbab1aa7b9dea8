//! Data pipeline and tracing controller for a 32-cell optoelectronic tactile
//! fingertip.
//!
//! One finger carries IR emitters, the other photodiodes on the same
//! hexagonal layout; anything grasped between them casts a shadow on the
//! receiver grid. This crate covers the path from raw readouts to control:
//!
//! - [`hexgrid`]: cell layout, adjacency and readout addressing.
//! - [`frame_codec`]: the 44-octet wire frame, complementing and `.tfl` logs.
//! - [`pipeline`]: gap threshold, dark centroid, edge markers, border fit and
//!   feature classification.
//! - [`simulator`]: occlusion scenes rendered into frames.
//! - [`tracer`]: proportional edge/cable following in closed loop with the
//!   simulator.
//! - [`report`]: ASCII and SVG views of frames and traces.

pub mod frame_codec;
pub mod geom;
pub mod hexgrid;
pub mod kv;
pub mod pipeline;
pub mod report;
pub mod simulator;
pub mod tracer;

pub use frame_codec::{complement, decode, encode, Frame, RawFrame};
pub use geom::{Point2, Pose2};
pub use hexgrid::{build_grid, CellId, GridSpec, SensorGrid};
pub use pipeline::{process, EdgeFeatures, FeatureKind, PipelineParams};
pub use simulator::{render, Material, Scene, SensorModel, Shape};
pub use tracer::{trace, ControllerConfig, TaskKind, TraceResult};
