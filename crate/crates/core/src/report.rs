//! Text and SVG views of frames and traces.

use std::fmt::Write as _;

use crate::frame_codec::Frame;
use crate::geom::Point2;
use crate::hexgrid::SensorGrid;
use crate::pipeline::{EdgeFeatures, FeatureKind};
use crate::simulator::Scene;
use crate::tracer::{TraceEvent, TraceResult};

const CELL_WIDTH: usize = 6;

/// Plain-text heatmap: one line per grid row, top row first, odd rows
/// indented half a cell. Dark cells carry a `*`. A blank line and a summary
/// line follow.
pub fn ascii_frame(frame: &Frame, grid: &SensorGrid, features: &EdgeFeatures) -> String {
    let spec = grid.spec();
    let mut out = String::new();
    for row in (0..spec.rows).rev() {
        let mut line = String::new();
        if row % 2 == 1 && spec.odd_row_offset > 0.0 {
            line.push_str(&" ".repeat(CELL_WIDTH / 2));
        }
        for col in 0..spec.cols {
            let i = row * spec.cols + col;
            let dark = features.split.as_ref().is_some_and(|s| s.is_dark(i));
            let _ = write!(
                line,
                "{:>4}{} ",
                frame.values[i],
                if dark { '*' } else { ' ' }
            );
        }
        out.push_str(line.trim_end());
        out.push('\n');
    }
    out.push('\n');
    out.push_str(&summary(features));
    out.push('\n');
    out
}

fn fmt_point(p: Point2) -> String {
    format!("({:.2}, {:.2})", p.x, p.y)
}

/// One-line description of the features.
pub fn summary(features: &EdgeFeatures) -> String {
    let mut s = String::new();
    match features.lambda() {
        Some(l) => {
            let _ = write!(s, "lambda={l:.2}");
        }
        None => s.push_str("lambda=-"),
    }
    if let Some(c) = features.centroid {
        let _ = write!(s, " centroid={}", fmt_point(c));
    }
    let _ = write!(s, " markers={}", features.markers.len());
    let _ = match features.kind {
        FeatureKind::StraightEdge { angle_deg } => {
            write!(s, " kind=straight_edge angle={angle_deg:.1}")
        }
        FeatureKind::Corner {
            vertex,
            opening_angle_deg,
        } => write!(
            s,
            " kind=corner vertex={} opening={opening_angle_deg:.1}",
            fmt_point(vertex)
        ),
        FeatureKind::Band {
            angle_deg,
            width_mm,
            ..
        } => write!(s, " kind=band angle={angle_deg:.1} width={width_mm:.2}"),
        FeatureKind::None => write!(s, " kind=none"),
    };
    s
}

const PX_PER_MM: f64 = 10.0;

/// SVG heatmap with λ, centroid, markers and fit overlaid. Grid y points up.
pub fn frame_svg(frame: &Frame, grid: &SensorGrid, features: &EdgeFeatures) -> String {
    let (w, h) = (grid.spec().pitch_x, grid.spec().pitch_y);
    let (lo, hi) = grid.bounds();
    let margin = w;
    let min = Point2::new(lo.x - margin, lo.y - margin);
    let max = Point2::new(hi.x + margin, hi.y + margin);
    let (vw, vh) = ((max.x - min.x) * PX_PER_MM, (max.y - min.y) * PX_PER_MM);
    let map = |p: Point2| ((p.x - min.x) * PX_PER_MM, (max.y - p.y) * PX_PER_MM);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{vw:.0}" height="{vh:.0}" viewBox="0 0 {vw:.1} {vh:.1}">"#
    );
    let _ = writeln!(s, r##"<rect width="100%" height="100%" fill="#203040"/>"##);
    let hex = [
        (0.0, 2.0 / 3.0),
        (0.5, 1.0 / 3.0),
        (0.5, -1.0 / 3.0),
        (0.0, -2.0 / 3.0),
        (-0.5, -1.0 / 3.0),
        (-0.5, 1.0 / 3.0),
    ];
    let _ = writeln!(s, r#"<g id="cells">"#);
    for (i, &c) in grid.centres().iter().enumerate() {
        let v = frame.values[i];
        let pts: Vec<String> = hex
            .iter()
            .map(|&(dx, dy)| {
                let (x, y) = map(c + Point2::new(dx * w, dy * h));
                format!("{x:.1},{y:.1}")
            })
            .collect();
        let dark = features.split.as_ref().is_some_and(|sp| sp.is_dark(i));
        let stroke = if dark { "#e04040" } else { "#808080" };
        let _ = writeln!(
            s,
            r#"<polygon class="cell" data-index="{i}" points="{}" fill="rgb({v},{v},{v})" stroke="{stroke}"/>"#,
            pts.join(" ")
        );
        let (x, y) = map(c);
        let text = if v > 127 { "#000" } else { "#fff" };
        let _ = writeln!(
            s,
            r#"<text x="{x:.1}" y="{:.1}" font-size="12" text-anchor="middle" fill="{text}">{v}</text>"#,
            y + 4.0
        );
    }
    let _ = writeln!(s, "</g>");

    let _ = writeln!(s, r#"<g id="markers">"#);
    for m in &features.markers {
        let (x, y) = map(m.position);
        let _ = writeln!(
            s,
            r##"<circle class="marker" cx="{x:.1}" cy="{y:.1}" r="4" fill="#40c0ff"/>"##
        );
    }
    let _ = writeln!(s, "</g>");

    if let Some(fit) = &features.fit {
        let mut pts = vec![fit.segments[0].start];
        pts.extend(fit.segments.iter().map(|seg| seg.end));
        let pts: Vec<String> = pts
            .iter()
            .map(|&p| {
                let (x, y) = map(p);
                format!("{x:.1},{y:.1}")
            })
            .collect();
        let _ = writeln!(
            s,
            r##"<polyline id="fit" points="{}" fill="none" stroke="#ffd040" stroke-width="3"/>"##,
            pts.join(" ")
        );
    }
    if let Some(c) = features.centroid {
        let (x, y) = map(c);
        let _ = writeln!(
            s,
            r##"<path id="centroid" d="M{:.1},{y:.1}H{:.1}M{x:.1},{:.1}V{:.1}" stroke="#ff4080" stroke-width="3"/>"##,
            x - 8.0,
            x + 8.0,
            y - 8.0,
            y + 8.0
        );
    }
    let _ = writeln!(
        s,
        r##"<text id="summary" x="6" y="16" font-size="13" fill="#fff">{}</text>"##,
        summary(features)
    );
    s.push_str("</svg>\n");
    s
}

/// World-frame overlay of a trace: the template's transmission map (2 mm
/// raster), the tool-centre trajectory and any corner detections.
pub fn trace_svg(result: &TraceResult, template: &Scene, grid: &SensorGrid) -> String {
    const RASTER_MM: f64 = 2.0;
    let traj = result.trajectory();
    let (lo, hi) = grid.bounds();
    let reach = lo.distance(hi) / 2.0 + grid.spec().pitch_x;
    let mut min = Point2::new(f64::INFINITY, f64::INFINITY);
    let mut max = Point2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
    for p in &traj {
        min = Point2::new(min.x.min(p.x - reach), min.y.min(p.y - reach));
        max = Point2::new(max.x.max(p.x + reach), max.y.max(p.y + reach));
    }
    let scale = 4.0;
    let (vw, vh) = ((max.x - min.x) * scale, (max.y - min.y) * scale);
    let map = |p: Point2| ((p.x - min.x) * scale, (max.y - p.y) * scale);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{vw:.0}" height="{vh:.0}" viewBox="0 0 {vw:.1} {vh:.1}">"#
    );
    let _ = writeln!(s, r##"<rect width="100%" height="100%" fill="#ffffff"/>"##);
    let _ = writeln!(s, r#"<g id="scene">"#);
    let nx = ((max.x - min.x) / RASTER_MM).ceil() as usize;
    let ny = ((max.y - min.y) / RASTER_MM).ceil() as usize;
    let cell = RASTER_MM * scale;
    for j in 0..ny {
        for i in 0..nx {
            let p = Point2::new(
                min.x + (i as f64 + 0.5) * RASTER_MM,
                max.y - (j as f64 + 0.5) * RASTER_MM,
            );
            let t = template.transmission_at(p);
            if t < 1.0 {
                let v = (255.0 * (0.35 + 0.65 * t)).round() as u8;
                let _ = writeln!(
                    s,
                    r#"<rect x="{:.1}" y="{:.1}" width="{cell:.1}" height="{cell:.1}" fill="rgb({v},{v},{v})"/>"#,
                    i as f64 * cell,
                    j as f64 * cell
                );
            }
        }
    }
    let _ = writeln!(s, "</g>");
    let pts: Vec<String> = traj
        .iter()
        .map(|p| {
            let (x, y) = map(Point2::new(p.x, p.y));
            format!("{x:.1},{y:.1}")
        })
        .collect();
    let _ = writeln!(
        s,
        r##"<polyline id="trajectory" points="{}" fill="none" stroke="#d02020" stroke-width="2"/>"##,
        pts.join(" ")
    );
    for e in &result.events {
        if let TraceEvent::CornerDetected { vertex_world, .. } = e {
            let (x, y) = map(*vertex_world);
            let _ = writeln!(
                s,
                r##"<circle class="corner" cx="{x:.1}" cy="{y:.1}" r="6" fill="none" stroke="#2060ff" stroke-width="2"/>"##
            );
        }
    }
    let terminal = match result.terminal() {
        TraceEvent::CornerDetected { step, .. } => format!("corner_detected at step {step}"),
        TraceEvent::LostContact { step } => format!("lost_contact at step {step}"),
        TraceEvent::Completed { step } => format!("completed at step {step}"),
    };
    let _ = writeln!(
        s,
        r##"<text id="terminal" x="6" y="16" font-size="13" fill="#000">{terminal}</text>"##
    );
    s.push_str("</svg>\n");
    s
}
