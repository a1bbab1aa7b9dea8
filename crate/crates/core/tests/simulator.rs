use std::path::PathBuf;

use proptest::prelude::*;
use tactile_core::geom::{Point2, Pose2};
use tactile_core::hexgrid::{GridSpec, SensorGrid};
use tactile_core::simulator::{
    format_scene, parse_scene, read_scene, render, render_stream, scene_at_pose, templates,
    SceneError, Side,
};
use tactile_core::{process, FeatureKind, Material, PipelineParams, Scene, SensorModel, Shape};

fn grid() -> SensorGrid {
    SensorGrid::new(GridSpec::default()).unwrap()
}

fn scenes_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenes")
}

fn edge(angle_deg: f64) -> Scene {
    Scene::empty().with(
        Shape::HalfPlane {
            point: Point2::new(19.0, 15.0),
            angle_deg,
            side: Side::Right,
        },
        Material::opaque(),
    )
}

fn edge_angle(scene: &Scene) -> f64 {
    let g = grid();
    let f = process(
        &render(scene, &g, &SensorModel::default()),
        &g,
        &PipelineParams::default(),
    )
    .unwrap();
    match f.kind {
        FeatureKind::StraightEdge { angle_deg } => angle_deg,
        other => panic!("expected a straight edge, got {other:?}"),
    }
}

#[test]
fn shipped_scene_files_match_templates() {
    for name in ["cloth_edge", "cloth_corner", "cable_3mm"] {
        let from_file = read_scene(scenes_dir().join(format!("{name}.scene"))).unwrap();
        assert_eq!(from_file, templates::by_name(name).unwrap(), "{name}");
    }
}

#[test]
fn scene_text_roundtrip() {
    let scene = Scene {
        pose: Pose2::new(1.5, -2.0, 12.0),
        wave: templates::drifting_cloth_edge(20.0, 5.0, 200.0).wave,
        ..Scene::empty()
    }
    .with(
        Shape::Wedge {
            vertex: Point2::new(3.0, 4.0),
            from_deg: 10.0,
            to_deg: 250.0,
        },
        Material::new("felt", 0.3).unwrap(),
    )
    .with(
        Shape::Strip {
            point: Point2::ORIGIN,
            angle_deg: -20.0,
            width: 2.5,
        },
        Material::opaque(),
    );
    assert_eq!(parse_scene(&format_scene(&scene)).unwrap(), scene);
}

#[test]
fn scene_parse_errors_name_the_line() {
    let err = parse_scene("strip 1 2 3 4 opaque\nblob 1 2\n").unwrap_err();
    assert!(matches!(err, SceneError::Parse { line: 2, .. }), "{err}");
    assert!(parse_scene("strip 1 2 3 -4 opaque").is_err());
    assert!(parse_scene("halfplane 0 0 0 up towel").is_err());
    assert!(parse_scene("strip 0 0 0 3 silk").is_err());
    assert!(parse_scene("material glass 1.5").is_err());
    assert!(read_scene("/nonexistent/x.scene").is_err());
}

#[test]
fn rendering_is_deterministic_per_seed() {
    let g = grid();
    let model = SensorModel {
        noise_sigma: 3.0,
        seed: 42,
        ..SensorModel::default()
    };
    let scene = templates::cable_3mm();
    assert_eq!(render(&scene, &g, &model), render(&scene, &g, &model));
    assert_ne!(
        render(&scene, &g, &model).values,
        render(&scene, &g, &model.with_seed(43)).values
    );
    let a = render_stream(&scene, &g, &model, 5, 100);
    assert_eq!(a, render_stream(&scene, &g, &model, 5, 100));
    assert_eq!(
        a.iter().map(|f| f.seq).collect::<Vec<_>>(),
        vec![0, 1, 2, 3, 4]
    );
    assert_eq!(a[0].timestamp_ms, 100);
}

#[test]
fn supersampled_coverage_of_half_covered_cells() {
    // an opaque edge through the middle row's centres darkens it to half
    let g = grid();
    let scene = Scene::empty().with(
        Shape::HalfPlane {
            point: Point2::new(0.0, 3.0 * 30.0 / 7.0),
            angle_deg: 0.0,
            side: Side::Right,
        },
        Material::opaque(),
    );
    let f = render(&scene, &g, &SensorModel::default());
    for col in 0..4 {
        assert_eq!(f.values[col], 0);
        assert_eq!(f.values[12 + col], 128, "127.5 rounds up");
        assert_eq!(f.values[28 + col], 255);
    }
}

#[test]
fn scene_pose_rotation_turns_edge_the_same_way() {
    let base = edge_angle(&edge(0.0));
    for theta in [-20.0, 10.0, 25.0] {
        let turned = Scene {
            pose: Pose2 {
                translation: Point2::new(19.0, 15.0) - Point2::new(19.0, 15.0).rotated_deg(theta),
                rotation_deg: theta,
            },
            ..edge(0.0)
        };
        assert!(
            (edge_angle(&turned) - base - theta).abs() < 3.0,
            "theta {theta}"
        );
    }
}

#[test]
fn gripper_rotation_turns_edge_the_other_way() {
    let base = edge_angle(&edge(0.0));
    for theta in [-20.0, 10.0, 25.0] {
        let c = Point2::new(19.0, 15.0);
        let gripper = Pose2 {
            translation: c - c.rotated_deg(theta),
            rotation_deg: theta,
        };
        let seen = edge_angle(&scene_at_pose(&edge(0.0), &gripper));
        assert!((seen - base + theta).abs() < 3.0, "theta {theta}: {seen}");
    }
}

#[test]
fn gripper_translation_shifts_dark_region_back() {
    let g = grid();
    let scene = templates::cable(Point2::new(19.0, 15.0), 0.0, 6.0);
    let centroid = |s: &Scene| {
        process(
            &render(s, &g, &SensorModel::default()),
            &g,
            &PipelineParams::default(),
        )
        .unwrap()
        .centroid
        .unwrap()
    };
    let moved = scene_at_pose(&scene, &Pose2::new(0.0, 4.0, 0.0));
    let shift = centroid(&moved) - centroid(&scene);
    assert!((shift.y + 4.0).abs() < 30.0 / 7.0 / 2.0, "{shift:?}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn more_transmission_never_darkens(
        angle in -90.0f64..90.0,
        y in 5.0f64..25.0,
        t1 in 0.0f64..1.0,
        t2 in 0.0f64..1.0,
    ) {
        let (lo, hi) = if t1 <= t2 { (t1, t2) } else { (t2, t1) };
        let g = grid();
        let shape = Shape::Strip { point: Point2::new(19.0, y), angle_deg: angle, width: 4.0 };
        let model = SensorModel { samples_per_cell: 16, ..SensorModel::default() };
        let a = render(&Scene::empty().with(shape, Material::new("a", lo).unwrap()), &g, &model);
        let b = render(&Scene::empty().with(shape, Material::new("b", hi).unwrap()), &g, &model);
        for (va, vb) in a.values.iter().zip(&b.values) {
            prop_assert!(va <= vb);
        }
    }

    #[test]
    fn translating_scene_moves_centroid_back(dx in -4.0f64..4.0, dy in -3.0f64..3.0) {
        // an opaque cross: a horizontal strip over a wider vertical one
        let g = grid();
        let blob = |c: Point2| Scene::empty()
            .with(Shape::Strip { point: c, angle_deg: 0.0, width: 6.0 }, Material::opaque())
            .with(Shape::Strip { point: c, angle_deg: 90.0, width: 14.0 }, Material::opaque());
        let model = SensorModel { samples_per_cell: 64, ..SensorModel::default() };
        let centroid = |s: &Scene| {
            process(&render(s, &g, &model), &g, &PipelineParams::default()).unwrap().centroid.unwrap()
        };
        let c0 = centroid(&blob(Point2::new(19.0, 15.0)));
        let moved = scene_at_pose(&blob(Point2::new(19.0, 15.0)), &Pose2::new(dx, dy, 0.0));
        let d = centroid(&moved) - c0;
        prop_assert!((d.x + dx).abs() <= 38.0 / 3.5 / 2.0, "{d:?}");
        prop_assert!((d.y + dy).abs() <= 30.0 / 7.0 / 2.0, "{d:?}");
    }
}
