use serde::Serialize;
use thiserror::Error;

use crate::geom::{Point2, Pose2};

#[derive(Debug, Error)]
pub enum SceneError {
    #[error("transmission of `{name}` must lie in [0, 1] (got {tau})")]
    Transmission { name: String, tau: f64 },
    #[error("strip width must be positive (got {0} mm)")]
    StripWidth(f64),
    #[error("wedge boundaries at {from_deg} and {to_deg} degrees are parallel")]
    ParallelWedge { from_deg: f64, to_deg: f64 },
    #[error("wavelength must be positive (got {0} mm)")]
    Wavelength(f64),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// A material layer characterised by how much IR it lets through.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Material {
    pub name: String,
    /// Transmission coefficient, 1 = fully transparent.
    pub tau: f64,
}

impl Material {
    pub fn new(name: impl Into<String>, tau: f64) -> Result<Self, SceneError> {
        let name = name.into();
        if !(0.0..=1.0).contains(&tau) {
            return Err(SceneError::Transmission { name, tau });
        }
        Ok(Self { name, tau })
    }

    pub fn opaque() -> Self {
        Self {
            name: "opaque".into(),
            tau: 0.0,
        }
    }

    /// The five reference materials, least to most translucent. Only their
    /// ordering is meaningful.
    pub fn defaults() -> Vec<Material> {
        [
            ("cardboard", 0.02),
            ("towel", 0.15),
            ("paper", 0.35),
            ("napkin", 0.55),
            ("ziplock", 0.85),
        ]
        .into_iter()
        .map(|(n, t)| Material {
            name: n.into(),
            tau: t,
        })
        .collect()
    }

    /// Looks up a default material, `opaque` or `clear` by name.
    pub fn named(name: &str) -> Option<Material> {
        match name {
            "opaque" => Some(Material::opaque()),
            "clear" => Some(Material {
                name: "clear".into(),
                tau: 1.0,
            }),
            _ => Material::defaults().into_iter().find(|m| m.name == name),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Left,
    Right,
}

/// Parametric occluder in scene coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum Shape {
    /// Everything on `side` of the line through `point` heading `angle_deg`.
    HalfPlane {
        point: Point2,
        angle_deg: f64,
        side: Side,
    },
    /// Band of `width` mm centred on the line through `point` heading `angle_deg`.
    Strip {
        point: Point2,
        angle_deg: f64,
        width: f64,
    },
    /// Region swept counter-clockwise from the ray at `from_deg` to the ray
    /// at `to_deg`, both starting at `vertex`.
    Wedge {
        vertex: Point2,
        from_deg: f64,
        to_deg: f64,
    },
}

fn sweep_deg(from_deg: f64, to_deg: f64) -> f64 {
    (to_deg - from_deg).rem_euclid(360.0)
}

impl Shape {
    pub fn validate(&self) -> Result<(), SceneError> {
        match *self {
            Shape::Strip { width, .. } if width.is_nan() || width <= 0.0 => {
                Err(SceneError::StripWidth(width))
            }
            Shape::Wedge {
                from_deg, to_deg, ..
            } => {
                let sweep = sweep_deg(from_deg, to_deg);
                if sweep < 1e-9 || (sweep - 180.0).abs() < 1e-9 || 360.0 - sweep < 1e-9 {
                    Err(SceneError::ParallelWedge { from_deg, to_deg })
                } else {
                    Ok(())
                }
            }
            _ => Ok(()),
        }
    }

    pub fn contains(&self, p: Point2) -> bool {
        match *self {
            Shape::HalfPlane {
                point,
                angle_deg,
                side,
            } => {
                let s = Point2::from_angle_deg(angle_deg).cross(p - point);
                match side {
                    Side::Left => s > 0.0,
                    Side::Right => s < 0.0,
                }
            }
            Shape::Strip {
                point,
                angle_deg,
                width,
            } => Point2::from_angle_deg(angle_deg).cross(p - point).abs() <= width / 2.0,
            Shape::Wedge {
                vertex,
                from_deg,
                to_deg,
            } => {
                let v = p - vertex;
                let a = Point2::from_angle_deg(from_deg);
                let b = Point2::from_angle_deg(to_deg);
                let convex = a.cross(v) >= 0.0 && v.cross(b) >= 0.0;
                if sweep_deg(from_deg, to_deg) < 180.0 {
                    convex
                } else {
                    // reflex: complement of the convex wedge from `to` to `from`
                    !(b.cross(v) > 0.0 && v.cross(a) > 0.0)
                }
            }
        }
    }
}

/// Lateral sinusoidal displacement of the whole scene: a scene point
/// `(x, y)` shows the template content found at `(x, y - a sin(2π x / λ + φ))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LateralWave {
    pub amplitude_mm: f64,
    pub wavelength_mm: f64,
    pub phase_deg: f64,
}

impl LateralWave {
    pub fn offset_at(&self, x: f64) -> f64 {
        self.amplitude_mm
            * (std::f64::consts::TAU * x / self.wavelength_mm + self.phase_deg.to_radians()).sin()
    }
}

/// Occluders plus the transform placing scene coordinates into grid
/// coordinates (`grid = pose.apply(scene)`).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Scene {
    pub shapes: Vec<(Shape, Material)>,
    pub pose: Pose2,
    pub wave: Option<LateralWave>,
}

impl Default for Scene {
    fn default() -> Self {
        Self::empty()
    }
}

impl Scene {
    pub fn empty() -> Self {
        Self {
            shapes: Vec::new(),
            pose: Pose2::IDENTITY,
            wave: None,
        }
    }

    pub fn with(mut self, shape: Shape, material: Material) -> Self {
        self.shapes.push((shape, material));
        self
    }

    pub fn validate(&self) -> Result<(), SceneError> {
        for (shape, m) in &self.shapes {
            shape.validate()?;
            Material::new(m.name.clone(), m.tau)?;
        }
        if let Some(w) = &self.wave {
            if w.wavelength_mm.is_nan() || w.wavelength_mm <= 0.0 {
                return Err(SceneError::Wavelength(w.wavelength_mm));
            }
        }
        Ok(())
    }

    /// Maps a grid point to scene (template) coordinates, undoing the wave.
    pub fn to_scene(&self, grid_point: Point2) -> Point2 {
        let mut p = self.pose.inverse().apply(grid_point);
        if let Some(w) = &self.wave {
            p.y -= w.offset_at(p.x);
        }
        p
    }

    /// Product of the transmissions of every shape covering `grid_point`.
    pub fn transmission_at(&self, grid_point: Point2) -> f64 {
        let p = self.to_scene(grid_point);
        self.shapes
            .iter()
            .filter(|(s, _)| s.contains(p))
            .map(|(_, m)| m.tau)
            .product()
    }
}

/// Places a world-frame template relative to a gripper at `gripper` (the
/// world pose of the grid origin and x-axis).
pub fn scene_at_pose(template: &Scene, gripper: &Pose2) -> Scene {
    Scene {
        pose: gripper.inverse().compose(&template.pose),
        ..template.clone()
    }
}
