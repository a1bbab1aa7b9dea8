//! Closed-loop tracing of cloth edges and cables against the simulator.
//!
//! Each iteration renders the frame seen at the current gripper pose, runs
//! the pipeline, nudges the gripper sideways to hold the dark centroid at
//! `setpoint_y`, optionally steers along a cable, and advances `step_mm`
//! along the heading. The gripper is an idealised planar point; its pose is
//! reported at the grid centre.

use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geom::{Point2, Pose2};
use crate::hexgrid::SensorGrid;
use crate::pipeline::{process, EdgeFeatures, FeatureKind, PipelineError, PipelineParams};
use crate::simulator::{frame_seed, render, scene_at_pose, Scene, SensorModel};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TraceError {
    #[error(
        "start frame shows no feature; the template must place the traced feature on the grid"
    )]
    BadTemplate,
    #[error("invalid controller config: {0}")]
    Config(String),
    #[error(transparent)]
    Pipeline(#[from] PipelineError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TaskKind {
    ClothEdge,
    ClothCorner,
    Cable,
}

impl FromStr for TaskKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "cloth_edge" => Ok(TaskKind::ClothEdge),
            "cloth_corner" => Ok(TaskKind::ClothCorner),
            "cable" => Ok(TaskKind::Cable),
            other => Err(format!(
                "unknown task {other:?} (expected cloth_edge, cloth_corner or cable)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ControllerConfig {
    /// Lateral correction per mm of centroid error.
    pub k_p: f64,
    /// Target dark-centroid height in the grid, mm.
    pub setpoint_y: f64,
    /// Advance along the heading per iteration, mm.
    pub step_mm: f64,
    pub max_steps: usize,
    /// Heading change per degree of band angle (cable task only).
    pub k_heading: f64,
    /// Consecutive featureless frames before giving up.
    pub lost_after: usize,
}

impl Default for ControllerConfig {
    fn default() -> Self {
        Self {
            k_p: 0.5,
            setpoint_y: 15.0,
            step_mm: 5.0,
            max_steps: 60,
            k_heading: 0.5,
            lost_after: 3,
        }
    }
}

impl ControllerConfig {
    /// Cloth tasks hold a dark centroid of 10 mm. Cloth below an edge can
    /// never centre its shadow at mid-grid; at 10 mm the edge sits in the
    /// upper half, where the centroid still responds to edge height.
    pub const CLOTH_SETPOINT_Y: f64 = 10.0;

    pub fn for_task(task: TaskKind) -> Self {
        match task {
            TaskKind::ClothEdge | TaskKind::ClothCorner => Self {
                setpoint_y: Self::CLOTH_SETPOINT_Y,
                ..Self::default()
            },
            TaskKind::Cable => Self::default(),
        }
    }

    pub fn validate(&self) -> Result<(), TraceError> {
        if self.k_p.is_nan() || self.k_p < 0.0 {
            return Err(TraceError::Config(format!(
                "k_p must be >= 0, got {}",
                self.k_p
            )));
        }
        if self.step_mm.is_nan() || self.step_mm <= 0.0 {
            return Err(TraceError::Config(format!(
                "step_mm must be > 0, got {}",
                self.step_mm
            )));
        }
        if self.lost_after == 0 {
            return Err(TraceError::Config("lost_after must be >= 1".into()));
        }
        Ok(())
    }
}

/// Lateral correction for one control update: `k_p * (setpoint - centroid)`.
///
/// Positive means the feature should move up the grid, which the tracer
/// achieves by moving the gripper the other way.
pub fn control_step(centroid_y: f64, config: &ControllerConfig) -> f64 {
    config.k_p * (config.setpoint_y - centroid_y)
}

/// Gripper pose in the world, taken at the grid centre.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TracePose {
    pub x: f64,
    pub y: f64,
    pub heading_deg: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum TraceEvent {
    /// Vertex in grid and world coordinates.
    CornerDetected {
        step: usize,
        vertex: Point2,
        vertex_world: Point2,
    },
    LostContact {
        step: usize,
    },
    Completed {
        step: usize,
    },
}

impl TraceEvent {
    pub fn step(&self) -> usize {
        match *self {
            TraceEvent::CornerDetected { step, .. }
            | TraceEvent::LostContact { step }
            | TraceEvent::Completed { step } => step,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceStep {
    pub step: usize,
    pub pose: TracePose,
    /// `setpoint_y - centroid_y`, when a centroid exists.
    pub centroid_error: Option<f64>,
    pub lateral_correction: f64,
    pub features: EdgeFeatures,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceResult {
    pub task: TaskKind,
    pub steps: Vec<TraceStep>,
    /// Observations in order; the last one is the terminal event.
    pub events: Vec<TraceEvent>,
    /// Pose after the last step.
    pub final_pose: TracePose,
}

impl TraceResult {
    pub fn terminal(&self) -> &TraceEvent {
        self.events.last().expect("trace always ends with an event")
    }

    pub fn trajectory(&self) -> Vec<TracePose> {
        self.steps
            .iter()
            .map(|s| s.pose)
            .chain(std::iter::once(self.final_pose))
            .collect()
    }

    pub fn centroid_errors(&self) -> Vec<Option<f64>> {
        self.steps.iter().map(|s| s.centroid_error).collect()
    }
}

fn grid_centre(grid: &SensorGrid) -> Point2 {
    let (lo, hi) = grid.bounds();
    (lo + hi) * 0.5
}

fn tool_pose(origin: &Pose2, centre: Point2) -> TracePose {
    let p = origin.apply(centre);
    TracePose {
        x: p.x,
        y: p.y,
        heading_deg: origin.rotation_deg,
    }
}

/// Runs the closed loop from the identity gripper pose.
///
/// Ends with `corner_detected` (cloth-corner task only), `lost_contact` after
/// `lost_after` featureless frames in a row, or `completed` after
/// `max_steps` iterations. Corners seen during other tasks are reported but
/// do not stop the trace.
pub fn trace(
    task: TaskKind,
    template: &Scene,
    config: &ControllerConfig,
    grid: &SensorGrid,
    model: &SensorModel,
    params: &PipelineParams,
) -> Result<TraceResult, TraceError> {
    config.validate()?;
    let centre = grid_centre(grid);
    let mut origin = Pose2::IDENTITY;
    let mut steps = Vec::new();
    let mut events = Vec::new();
    let mut featureless = 0usize;
    let mut terminal = None;

    for step in 0..config.max_steps {
        let scene = scene_at_pose(template, &origin);
        let frame = render(
            &scene,
            grid,
            &model.with_seed(frame_seed(model.seed, step as u64)),
        );
        let features = process(&frame, grid, params)?;
        if step == 0 && features.kind.is_none() {
            return Err(TraceError::BadTemplate);
        }

        let pose = tool_pose(&origin, centre);
        let centroid_error = features.centroid.map(|c| config.setpoint_y - c.y);
        let correction = features.centroid.map_or(0.0, |c| control_step(c.y, config));
        let kind = features.kind;
        steps.push(TraceStep {
            step,
            pose,
            centroid_error,
            lateral_correction: correction,
            features,
        });

        if kind.is_none() {
            featureless += 1;
            if featureless >= config.lost_after {
                terminal = Some(TraceEvent::LostContact { step });
                break;
            }
        } else {
            featureless = 0;
        }

        if let FeatureKind::Corner { vertex, .. } = kind {
            let event = TraceEvent::CornerDetected {
                step,
                vertex,
                vertex_world: origin.apply(vertex),
            };
            if task == TaskKind::ClothCorner {
                terminal = Some(event);
                break;
            }
            events.push(event);
        }

        // move the gripper opposite to the desired feature shift
        origin.translation =
            origin.translation + Point2::new(0.0, -correction).rotated_deg(origin.rotation_deg);
        if task == TaskKind::Cable {
            if let FeatureKind::Band { angle_deg, .. } = kind {
                let turn = config.k_heading * angle_deg;
                let about_centre = Pose2 {
                    translation: centre - centre.rotated_deg(turn),
                    rotation_deg: turn,
                };
                origin = origin.compose(&about_centre);
            }
        }
        origin.translation =
            origin.translation + Point2::new(config.step_mm, 0.0).rotated_deg(origin.rotation_deg);
    }

    events.push(terminal.unwrap_or(TraceEvent::Completed {
        step: config.max_steps,
    }));
    Ok(TraceResult {
        task,
        steps,
        events,
        final_pose: tool_pose(&origin, centre),
    })
}
