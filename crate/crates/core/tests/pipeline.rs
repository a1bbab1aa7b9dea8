use proptest::prelude::*;
use tactile_core::geom::Point2;
use tactile_core::hexgrid::{GridSpec, SensorGrid};
use tactile_core::pipeline::{
    dark_centroid, edge_markers, fit_piecewise, gap_threshold, process, FitParams, PipelineError,
};
use tactile_core::simulator::{render, templates};
use tactile_core::{FeatureKind, Frame, Material, PipelineParams, Scene, SensorModel, Shape};

fn grid() -> SensorGrid {
    SensorGrid::new(GridSpec::default()).unwrap()
}

fn frame_strategy() -> impl Strategy<Value = Vec<u8>> {
    prop::collection::vec(any::<u8>(), 32)
}

fn cross(o: Point2, a: Point2, b: Point2) -> f64 {
    (a - o).cross(b - o)
}

/// Andrew's monotone chain; counter-clockwise, collinear points dropped.
fn convex_hull(mut pts: Vec<Point2>) -> Vec<Point2> {
    pts.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let mut hull: Vec<Point2> = Vec::new();
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &Point2>> = if pass == 0 {
            Box::new(pts.iter())
        } else {
            Box::new(pts.iter().rev())
        };
        for &p in iter {
            while hull.len() >= start + 2
                && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0
            {
                hull.pop();
            }
            hull.push(p);
        }
        hull.pop();
    }
    hull
}

fn inside_hull(hull: &[Point2], p: Point2, tol: f64) -> bool {
    match hull.len() {
        0 => false,
        1 => hull[0].distance(p) <= tol,
        2 => {
            let (a, b) = (hull[0], hull[1]);
            let d = (b - a).normalized();
            let s = (p - a).dot(d);
            (p - a).cross(d).abs() <= tol && s >= -tol && s <= a.distance(b) + tol
        }
        n => (0..n).all(|i| {
            let (a, b) = (hull[i], hull[(i + 1) % n]);
            (b - a).cross(p - a) >= -tol * a.distance(b)
        }),
    }
}

proptest! {
    #[test]
    fn split_separates_values(values in frame_strategy()) {
        let f = Frame::from_values(values);
        if let Ok(s) = gap_threshold(&f, 8) {
            let max_dark = s.dark.iter().map(|&i| f.values[i]).max().unwrap();
            let min_bright = s.bright.iter().map(|&i| f.values[i]).min().unwrap();
            prop_assert!(max_dark < min_bright);
            prop_assert_eq!(s.dark.len() + s.bright.len(), 32);
        }
    }

    #[test]
    fn centroid_inside_hull_of_dark_centres(values in frame_strategy()) {
        let g = grid();
        let f = Frame::from_values(values);
        let Ok(s) = gap_threshold(&f, 1) else { return Ok(()) };
        match dark_centroid(&f, &s, &g) {
            Ok(c) => {
                let hull = convex_hull(s.dark.iter().map(|&i| g.centre(i)).collect());
                prop_assert!(inside_hull(&hull, c, 1e-9), "{c:?} outside {hull:?}");
            }
            Err(e) => prop_assert_eq!(e, PipelineError::ZeroWeight),
        }
    }

    #[test]
    fn shifting_all_values_keeps_partition(values in prop::collection::vec(20u8..200, 32), k in 0u8..55) {
        let f = Frame::from_values(values.clone());
        let shifted = Frame::from_values(values.iter().map(|v| v + k).collect());
        match (gap_threshold(&f, 8), gap_threshold(&shifted, 8)) {
            (Ok(a), Ok(b)) => {
                prop_assert_eq!(&a.dark, &b.dark);
                prop_assert!((b.lambda - a.lambda - k as f64).abs() < 1e-9);
            }
            (Err(_), Err(_)) => {}
            _ => prop_assert!(false, "split existence changed"),
        }
    }

    #[test]
    fn markers_reproduce_lambda(values in frame_strategy()) {
        let g = grid();
        let f = Frame::from_values(values);
        let Ok(s) = gap_threshold(&f, 8) else { return Ok(()) };
        for m in edge_markers(&f, s.lambda, &g) {
            let (a, b) = m.cells;
            let (va, vb) = (f.values[a] as f64, f.values[b] as f64);
            prop_assert!((va + m.t * (vb - va) - s.lambda).abs() < 1e-9);
            prop_assert!((0.0..=1.0).contains(&m.t));
        }
    }

    #[test]
    fn collinear_markers_fit_exactly(
        angle in -89.0f64..89.0,
        offset in -10.0f64..10.0,
        ts in prop::collection::vec(-20.0f64..20.0, 2..12),
    ) {
        let d = Point2::from_angle_deg(angle);
        let pts: Vec<Point2> = ts.iter().map(|&t| Point2::new(0.0, offset) + d * t).collect();
        prop_assume!(ts.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
            - ts.iter().cloned().fold(f64::INFINITY, f64::min) > 1e-3);
        let params = FitParams { max_segments: 1, ..FitParams::default() };
        let fit = fit_piecewise(&pts, &params).unwrap();
        prop_assert!(fit.residual < 1e-9);
        prop_assert_eq!(fit.segments.len(), 1);
    }

    #[test]
    fn corners_always_have_two_segments(values in frame_strategy()) {
        let f = process(&Frame::from_values(values), &grid(), &PipelineParams::default()).unwrap();
        if let FeatureKind::Corner { .. } = f.kind {
            prop_assert_eq!(f.fit.unwrap().segments.len(), 2);
        }
        prop_assert_eq!(f.centroid.is_some(), f.split.as_ref().is_some_and(|s| !s.dark.is_empty()));
    }
}

#[test]
fn line_along_y_equals_2x() {
    let pts: Vec<Point2> = (0..6)
        .map(|i| Point2::new(i as f64, 2.0 * i as f64))
        .collect();
    let fit = fit_piecewise(&pts, &FitParams::default()).unwrap();
    assert_eq!(fit.segments.len(), 1);
    assert!(fit.residual < 1e-12);
    assert!((fit.segments[0].angle_deg() - 2f64.atan().to_degrees()).abs() < 1e-9);
    assert_eq!(
        fit_piecewise(&pts[..1], &FitParams::default()),
        Err(PipelineError::InsufficientMarkers(1))
    );
}

#[test]
fn markers_on_wedge_boundary_give_corner() {
    // points along the two rays of a right-angle wedge at (19, 15)
    let v = Point2::new(19.0, 15.0);
    let mut pts = Vec::new();
    for i in 1..=6 {
        let s = i as f64 * 2.5;
        pts.push(v + Point2::from_angle_deg(180.0) * s);
        pts.push(v + Point2::from_angle_deg(270.0) * s);
    }
    let fit = fit_piecewise(&pts, &FitParams::default()).unwrap();
    assert_eq!(fit.segments.len(), 2);
    assert!(fit.vertex.unwrap().distance(v) < 2.0);
    assert!((fit.opening_angle_deg().unwrap() - 90.0).abs() < 3.0);
}

#[test]
fn uniform_frame_is_none() {
    let f = process(
        &Frame::from_values(vec![200; 32]),
        &grid(),
        &PipelineParams::default(),
    )
    .unwrap();
    assert_eq!(f.kind, FeatureKind::None);
    assert!(f.centroid.is_none() && f.markers.is_empty());
}

#[test]
fn cable_band_width_tracks_strip_width() {
    let g = grid();
    for width in [2.0, 3.0, 5.0] {
        let scene = templates::cable(Point2::new(19.0, 15.0), 10.0, width);
        let f = process(
            &render(&scene, &g, &SensorModel::default()),
            &g,
            &PipelineParams::default(),
        )
        .unwrap();
        let FeatureKind::Band { width_mm, .. } = f.kind else {
            panic!("width {width}: {:?}", f.kind);
        };
        assert!(
            (width_mm - width).abs() < 1.0,
            "width {width}: got {width_mm}"
        );
    }
}

#[test]
fn noisy_edges_stay_straight() {
    let g = grid();
    let scene = Scene::empty().with(
        Shape::HalfPlane {
            point: Point2::new(19.0, 15.0),
            angle_deg: 10.0,
            side: tactile_core::simulator::Side::Right,
        },
        Material::opaque(),
    );
    let mut straight = 0;
    for seed in 0..20 {
        let model = SensorModel {
            noise_sigma: SensorModel::REALISTIC_NOISE_SIGMA,
            seed,
            ..SensorModel::default()
        };
        let f = process(&render(&scene, &g, &model), &g, &PipelineParams::default()).unwrap();
        if let FeatureKind::StraightEdge { angle_deg } = f.kind {
            assert!((angle_deg - 10.0).abs() < 5.0, "seed {seed}: {angle_deg}");
            straight += 1;
        }
    }
    assert!(straight >= 18, "only {straight}/20 straight");
}
