//! Plain-text scene files.
//!
//! ```text
//! # comments run to end of line
//! pose = <tx_mm> <ty_mm> <rotation_deg>          # optional, default 0 0 0
//! wave = <amplitude_mm> <wavelength_mm> [<phase_deg>]   # optional
//! material <name> <tau>                         # define or override a material
//! halfplane <x> <y> <angle_deg> <left|right> <material|tau>
//! strip     <x> <y> <angle_deg> <width_mm>    <material|tau>
//! wedge     <x> <y> <from_deg> <to_deg>       <material|tau>
//! ```
//!
//! Shapes are listed in order. A material may be one defined earlier in the
//! file, one of the built-ins (`cardboard`, `towel`, `paper`, `napkin`,
//! `ziplock`, `opaque`, `clear`) or a bare transmission value.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use super::scene::{LateralWave, Material, Scene, SceneError, Shape, Side};
use crate::geom::{Point2, Pose2};
use crate::kv;

fn perr(line: usize, message: impl Into<String>) -> SceneError {
    SceneError::Parse {
        line,
        message: message.into(),
    }
}

fn nums(line: usize, fields: &[&str]) -> Result<Vec<f64>, SceneError> {
    fields
        .iter()
        .map(|f| {
            f.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| perr(line, format!("expected a number, got {f:?}")))
        })
        .collect()
}

pub fn parse_scene(text: &str) -> Result<Scene, SceneError> {
    let mut scene = Scene::empty();
    let mut materials: HashMap<String, Material> = HashMap::new();

    let resolve = |materials: &HashMap<String, Material>, line: usize, token: &str| {
        if let Some(m) = materials
            .get(token)
            .cloned()
            .or_else(|| Material::named(token))
        {
            return Ok(m);
        }
        let tau: f64 = token
            .parse()
            .map_err(|_| perr(line, format!("unknown material {token:?}")))?;
        Material::new(format!("tau={token}"), tau)
    };

    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = kv::strip_comment(raw);
        if line.is_empty() {
            continue;
        }
        if let Some((key, value)) = line.split_once('=') {
            let fields: Vec<&str> = value.split_whitespace().collect();
            match key.trim() {
                "pose" => match nums(line_no, &fields)?.as_slice() {
                    &[x, y, r] => scene.pose = Pose2::new(x, y, r),
                    _ => return Err(perr(line_no, "pose needs <tx> <ty> <rotation_deg>")),
                },
                "wave" => match nums(line_no, &fields)?.as_slice() {
                    &[a, l] | &[a, l, _] => {
                        scene.wave = Some(LateralWave {
                            amplitude_mm: a,
                            wavelength_mm: l,
                            phase_deg: fields.get(2).map_or(Ok(0.0), |p| {
                                p.parse().map_err(|_| perr(line_no, "bad phase"))
                            })?,
                        })
                    }
                    _ => return Err(perr(line_no, "wave needs <amplitude> <wavelength> [phase]")),
                },
                other => return Err(perr(line_no, format!("unknown key `{other}`"))),
            }
            continue;
        }

        let fields: Vec<&str> = line.split_whitespace().collect();
        let (kw, args) = fields.split_first().expect("non-empty line");
        match (*kw, args) {
            ("material", [name, tau]) => {
                let tau = nums(line_no, &[tau])?[0];
                let m = Material::new(*name, tau).map_err(|e| perr(line_no, e.to_string()))?;
                materials.insert(name.to_string(), m);
            }
            ("halfplane", [x, y, a, side, mat]) => {
                let v = nums(line_no, &[x, y, a])?;
                let side = match *side {
                    "left" => Side::Left,
                    "right" => Side::Right,
                    s => {
                        return Err(perr(
                            line_no,
                            format!("side must be left or right, got {s:?}"),
                        ))
                    }
                };
                let shape = Shape::HalfPlane {
                    point: Point2::new(v[0], v[1]),
                    angle_deg: v[2],
                    side,
                };
                scene
                    .shapes
                    .push((shape, resolve(&materials, line_no, mat)?));
            }
            ("strip", [x, y, a, w, mat]) => {
                let v = nums(line_no, &[x, y, a, w])?;
                let shape = Shape::Strip {
                    point: Point2::new(v[0], v[1]),
                    angle_deg: v[2],
                    width: v[3],
                };
                scene
                    .shapes
                    .push((shape, resolve(&materials, line_no, mat)?));
            }
            ("wedge", [x, y, from, to, mat]) => {
                let v = nums(line_no, &[x, y, from, to])?;
                let shape = Shape::Wedge {
                    vertex: Point2::new(v[0], v[1]),
                    from_deg: v[2],
                    to_deg: v[3],
                };
                scene
                    .shapes
                    .push((shape, resolve(&materials, line_no, mat)?));
            }
            ("material" | "halfplane" | "strip" | "wedge", _) => {
                return Err(perr(line_no, format!("wrong number of fields for `{kw}`")))
            }
            _ => return Err(perr(line_no, format!("unknown statement `{kw}`"))),
        }
        if let Some((shape, _)) = scene.shapes.last() {
            shape.validate().map_err(|e| perr(line_no, e.to_string()))?;
        }
    }
    scene.validate()?;
    Ok(scene)
}

pub fn read_scene(path: impl AsRef<Path>) -> Result<Scene, SceneError> {
    parse_scene(&std::fs::read_to_string(path)?)
}

/// Writes a scene back in the text format. Materials are emitted as
/// `material` lines so non-default values survive the round trip.
pub fn format_scene(scene: &Scene) -> String {
    let mut out = String::new();
    let p = &scene.pose;
    if *p != Pose2::IDENTITY {
        let _ = writeln!(
            out,
            "pose = {} {} {}",
            p.translation.x, p.translation.y, p.rotation_deg
        );
    }
    if let Some(w) = &scene.wave {
        let _ = writeln!(
            out,
            "wave = {} {} {}",
            w.amplitude_mm, w.wavelength_mm, w.phase_deg
        );
    }
    let mut seen: Vec<&str> = Vec::new();
    for (_, m) in &scene.shapes {
        if !seen.contains(&m.name.as_str()) && !m.name.starts_with("tau=") {
            seen.push(&m.name);
            let _ = writeln!(out, "material {} {}", m.name, m.tau);
        }
    }
    for (shape, m) in &scene.shapes {
        let mat = if m.name.starts_with("tau=") {
            m.tau.to_string()
        } else {
            m.name.clone()
        };
        let _ = match shape {
            Shape::HalfPlane {
                point,
                angle_deg,
                side,
            } => writeln!(
                out,
                "halfplane {} {} {} {} {}",
                point.x,
                point.y,
                angle_deg,
                match side {
                    Side::Left => "left",
                    Side::Right => "right",
                },
                mat
            ),
            Shape::Strip {
                point,
                angle_deg,
                width,
            } => writeln!(
                out,
                "strip {} {} {} {} {}",
                point.x, point.y, angle_deg, width, mat
            ),
            Shape::Wedge {
                vertex,
                from_deg,
                to_deg,
            } => writeln!(
                out,
                "wedge {} {} {} {} {}",
                vertex.x, vertex.y, from_deg, to_deg, mat
            ),
        };
    }
    out
}

/// Materials file for sweeps: `name = tau` per line, order preserved.
pub fn parse_materials(text: &str) -> Result<Vec<Material>, SceneError> {
    let entries = kv::parse(text).map_err(|e| perr(0, e.to_string()))?;
    entries
        .iter()
        .map(|e| {
            let tau: f64 = e.parse().map_err(|err| perr(e.line, err.to_string()))?;
            Material::new(e.key.clone(), tau).map_err(|err| perr(e.line, err.to_string()))
        })
        .collect()
}
