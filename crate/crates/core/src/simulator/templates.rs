//! World-frame task scenes for the tracer. The gripper starts at the
//! identity pose, so at step 0 world and grid coordinates coincide.

use super::{LateralWave, Material, Scene, Shape, Side};
use crate::geom::Point2;
use crate::hexgrid::SENSORISED_WIDTH_MM;

/// Height of the cloth edge at the start pose, mm: just below the top row, so
/// a few mm of upward drift leaves the sensor fully covered and featureless.
pub const CLOTH_EDGE_Y_MM: f64 = 29.0;

/// How far the cloth corner lies beyond the sensor's leading (largest x)
/// cell centre at the start pose, mm.
pub const CORNER_AHEAD_MM: f64 = 120.0;

fn cloth() -> Material {
    Material::named("towel").expect("default material")
}

/// Cloth filling the half-plane below `edge_y`, edge along +x.
pub fn cloth_edge(edge_y: f64) -> Scene {
    Scene::empty().with(
        Shape::HalfPlane {
            point: Point2::new(0.0, edge_y),
            angle_deg: 0.0,
            side: Side::Right,
        },
        cloth(),
    )
}

/// [`cloth_edge`] whose edge wanders sideways as a sine along x.
pub fn drifting_cloth_edge(edge_y: f64, amplitude_mm: f64, wavelength_mm: f64) -> Scene {
    Scene {
        wave: Some(LateralWave {
            amplitude_mm,
            wavelength_mm,
            phase_deg: 0.0,
        }),
        ..cloth_edge(edge_y)
    }
}

/// Cloth below `edge_y` ending at `corner_x`: a 90° corner at
/// `(corner_x, edge_y)` ahead of the gripper.
pub fn cloth_corner(edge_y: f64, corner_x: f64) -> Scene {
    Scene::empty().with(
        Shape::Wedge {
            vertex: Point2::new(corner_x, edge_y),
            from_deg: 180.0,
            to_deg: 270.0,
        },
        cloth(),
    )
}

/// Opaque cable of `width_mm` through `point` at `angle_deg`.
pub fn cable(point: Point2, angle_deg: f64, width_mm: f64) -> Scene {
    Scene::empty().with(
        Shape::Strip {
            point,
            angle_deg,
            width: width_mm,
        },
        Material::opaque(),
    )
}

/// 3 mm cable across the grid centre along +x.
pub fn cable_3mm() -> Scene {
    cable(Point2::new(19.0, 15.0), 0.0, 3.0)
}

/// Built-in templates by name: `cloth_edge`, `cloth_corner`, `cable_3mm`.
pub fn by_name(name: &str) -> Option<Scene> {
    match name {
        "cloth_edge" => Some(cloth_edge(CLOTH_EDGE_Y_MM)),
        "cloth_corner" => Some(cloth_corner(
            CLOTH_EDGE_Y_MM,
            SENSORISED_WIDTH_MM + CORNER_AHEAD_MM,
        )),
        "cable_3mm" => Some(cable_3mm()),
        _ => None,
    }
}
