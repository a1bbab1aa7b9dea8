//! Synthetic frames from 2-D occlusion scenes.
//!
//! Each cell integrates the transmission of the scene over a rectangular
//! footprint (one pitch wide, one pitch high) with a stratified sample grid.
//! Occluders stack multiplicatively. Gaussian read noise is optional and
//! seeded per call, so rendering is a pure function of its inputs.

mod scene;
mod scene_file;
pub mod templates;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::frame_codec::{stream_timestamp_ms, Frame};
use crate::geom::Point2;
use crate::hexgrid::SensorGrid;

pub use scene::{scene_at_pose, LateralWave, Material, Scene, SceneError, Shape, Side};
pub use scene_file::{format_scene, parse_materials, parse_scene, read_scene};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SensorModel {
    pub full_scale: u8,
    /// Standard deviation of additive read noise, reported units.
    pub noise_sigma: f64,
    /// Samples per footprint; rounded up to the next square for a regular
    /// stratified pattern. Values below 1 are treated as 1.
    pub samples_per_cell: usize,
    pub seed: u64,
}

impl Default for SensorModel {
    fn default() -> Self {
        Self {
            full_scale: 255,
            noise_sigma: 0.0,
            samples_per_cell: 64,
            seed: 0,
        }
    }
}

impl SensorModel {
    /// Noise level used for robustness checks. Not a measured value.
    pub const REALISTIC_NOISE_SIGMA: f64 = 3.0;

    pub fn with_seed(self, seed: u64) -> Self {
        Self { seed, ..self }
    }
}

/// Seed for the `index`-th frame of a stream rendered with `seed`.
pub fn frame_seed(seed: u64, index: u64) -> u64 {
    seed ^ (index.wrapping_add(1)).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

fn sample_offsets(grid: &SensorGrid, samples: usize) -> Vec<Point2> {
    let side = (samples.max(1) as f64).sqrt().ceil() as usize;
    let (w, h) = (grid.spec().pitch_x, grid.spec().pitch_y);
    let mut out = Vec::with_capacity(side * side);
    for j in 0..side {
        for i in 0..side {
            out.push(Point2::new(
                ((i as f64 + 0.5) / side as f64 - 0.5) * w,
                ((j as f64 + 0.5) / side as f64 - 0.5) * h,
            ));
        }
    }
    out
}

/// Mean transmission over each cell's footprint, in linear cell order.
pub fn coverage(scene: &Scene, grid: &SensorGrid, samples_per_cell: usize) -> Vec<f64> {
    let offsets = sample_offsets(grid, samples_per_cell);
    grid.centres()
        .iter()
        .map(|&c| {
            offsets
                .iter()
                .map(|&o| scene.transmission_at(c + o))
                .sum::<f64>()
                / offsets.len() as f64
        })
        .collect()
}

/// Renders one frame in the reported convention (255 = unobstructed).
pub fn render(scene: &Scene, grid: &SensorGrid, model: &SensorModel) -> Frame {
    let full = f64::from(model.full_scale);
    let mut noise = (model.noise_sigma > 0.0).then(|| {
        (
            ChaCha8Rng::seed_from_u64(model.seed),
            Normal::new(0.0, model.noise_sigma).expect("positive sigma"),
        )
    });
    let values = coverage(scene, grid, model.samples_per_cell)
        .into_iter()
        .map(|t| {
            let n = noise.as_mut().map_or(0.0, |(rng, dist)| dist.sample(rng));
            (full * t + n).round().clamp(0.0, full) as u8
        })
        .collect();
    Frame::from_values(values)
}

/// Renders `count` frames of a static scene as a 55 Hz stream. Frame `i`
/// gets `seq = i` (wrapping) and its own noise seed.
pub fn render_stream(
    scene: &Scene,
    grid: &SensorGrid,
    model: &SensorModel,
    count: usize,
    start_ms: u32,
) -> Vec<Frame> {
    (0..count)
        .map(|i| {
            let m = model.with_seed(frame_seed(model.seed, i as u64));
            Frame {
                seq: i as u16,
                timestamp_ms: stream_timestamp_ms(start_ms, i),
                ..render(scene, grid, &m)
            }
        })
        .collect()
}

/// Scene covering the whole grid with one material.
pub fn full_cover(material: Material) -> Scene {
    Scene::empty().with(
        Shape::HalfPlane {
            point: Point2::new(0.0, -1.0e6),
            angle_deg: 0.0,
            side: Side::Left,
        },
        material,
    )
}

/// Mean cell value with each material covering the whole grid.
pub fn material_sweep(
    materials: &[Material],
    grid: &SensorGrid,
    model: &SensorModel,
) -> Vec<(String, f64)> {
    materials
        .iter()
        .map(|m| {
            let frame = render(&full_cover(m.clone()), grid, model);
            let mean =
                frame.values.iter().map(|&v| f64::from(v)).sum::<f64>() / frame.values.len() as f64;
            (m.name.clone(), mean)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hexgrid::GridSpec;

    fn grid() -> SensorGrid {
        SensorGrid::new(GridSpec::default()).unwrap()
    }

    #[test]
    fn empty_scene_is_bright() {
        let f = render(&Scene::empty(), &grid(), &SensorModel::default());
        assert_eq!(f.values, vec![255; 32]);
    }

    #[test]
    fn full_opaque_cover_is_dark() {
        let f = render(
            &full_cover(Material::opaque()),
            &grid(),
            &SensorModel::default(),
        );
        assert_eq!(f.values, vec![0; 32]);
    }

    #[test]
    fn bisected_cell_reads_half() {
        let g = grid();
        let c = g.centre(13);
        let scene = Scene::empty().with(
            Shape::HalfPlane {
                point: c,
                angle_deg: 90.0,
                side: Side::Left,
            },
            Material::opaque(),
        );
        let model = SensorModel {
            samples_per_cell: 256,
            ..SensorModel::default()
        };
        let v = render(&scene, &g, &model).values[13];
        assert!((i32::from(v) - 128).abs() <= 3, "{v}");
    }

    #[test]
    fn noise_is_seeded() {
        let g = grid();
        let model = SensorModel {
            noise_sigma: 3.0,
            seed: 42,
            ..SensorModel::default()
        };
        let scene = full_cover(Material::named("paper").unwrap());
        assert_eq!(render(&scene, &g, &model), render(&scene, &g, &model));
        assert_ne!(
            render(&scene, &g, &model),
            render(&scene, &g, &model.with_seed(43))
        );
    }

    #[test]
    fn sweep_examples() {
        let g = grid();
        let m = SensorModel::default();
        let mats = vec![
            Material::new("a", 0.3).unwrap(),
            Material::new("b", 0.3).unwrap(),
            Material::new("clear", 1.0).unwrap(),
        ];
        let out = material_sweep(&mats, &g, &m);
        assert_eq!(out[0].1, out[1].1);
        assert_eq!(out[2].1, 255.0);
    }

    #[test]
    fn stream_metadata() {
        let frames = render_stream(&Scene::empty(), &grid(), &SensorModel::default(), 4, 1000);
        let ts: Vec<u32> = frames.iter().map(|f| f.timestamp_ms).collect();
        assert_eq!(ts, vec![1000, 1018, 1036, 1055]);
        assert_eq!(frames[3].seq, 3);
    }
}
