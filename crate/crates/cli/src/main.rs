//! `tactile`: simulate, process, trace, render and sweep from the command line.
//!
//! Exit codes: 0 on success, 1 for usage errors, 2 for data errors.

use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use tactile_core::frame_codec::{read_log, uncomplement, write_log};
use tactile_core::hexgrid::{GridSpec, SensorGrid};
use tactile_core::kv;
use tactile_core::pipeline::{process, FeatureRecord, PipelineParams};
use tactile_core::report;
use tactile_core::simulator::{
    material_sweep, parse_materials, read_scene, render, render_stream, templates, Material, Scene,
    SensorModel,
};
use tactile_core::tracer::{trace, ControllerConfig, TaskKind};
use tactile_core::{complement, Frame};

#[derive(Parser)]
#[command(
    name = "tactile",
    version,
    about = "Tactile fingertip simulator and feature pipeline"
)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

/// Flags shared by every command. Each may also be set in the `--config`
/// file under the same name without the dashes; flags win.
#[derive(Args, Default)]
struct Common {
    /// Flat `key = value` file supplying defaults for any flag.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Grid layout file (rows, cols, pitch_x_mm, pitch_y_mm, odd_row_offset).
    #[arg(long, global = true)]
    grid: Option<PathBuf>,
    #[arg(long, global = true)]
    scene: Option<PathBuf>,
    #[arg(long, global = true)]
    frames: Option<usize>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    kp: Option<f64>,
    #[arg(long, global = true)]
    setpoint: Option<f64>,
    #[arg(long = "step-mm", global = true)]
    step_mm: Option<f64>,
    #[arg(long = "max-steps", global = true)]
    max_steps: Option<usize>,
    #[arg(long = "noise-sigma", global = true)]
    noise_sigma: Option<f64>,
    #[arg(long = "samples-per-cell", global = true)]
    samples_per_cell: Option<usize>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Ascii,
    Svg,
}

#[derive(Subcommand)]
enum Command {
    /// Render a scene into a binary frame log.
    Simulate {
        /// Built-in scene instead of --scene: cloth_edge, cloth_corner, cable_3mm.
        #[arg(long)]
        template: Option<String>,
        #[arg(long, short)]
        out: PathBuf,
    },
    /// Run the feature pipeline over every frame of a log, one JSON line each.
    Process {
        input: PathBuf,
        /// Defaults to stdout.
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Closed-loop trace; writes steps.jsonl, events.jsonl and trace.svg.
    Trace {
        #[arg(long)]
        task: TaskKind,
        /// Built-in scene instead of --scene; defaults to the task's own.
        #[arg(long)]
        template: Option<String>,
        #[arg(long = "out-dir")]
        out_dir: PathBuf,
    },
    /// Heatmap of one frame from a log, or of a scene rendered once.
    Render {
        /// Frame log; omit to render --scene or --template instead.
        input: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        index: usize,
        #[arg(long)]
        template: Option<String>,
        /// Defaults to stdout.
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Mean value with each material covering the grid, one line per material.
    Sweep {
        /// `name = tau` lines; defaults to the five reference materials.
        #[arg(long)]
        materials: Option<PathBuf>,
    },
}

enum Failure {
    Usage(String),
    Data(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Data(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Data(anyhow::Error::new(e).context("writing output"))
    }
}

type CmdResult = Result<(), Failure>;

fn usage<T>(msg: impl Into<String>) -> Result<T, Failure> {
    Err(Failure::Usage(msg.into()))
}

/// Fills every flag left unset from the config file.
fn merge_config(mut c: Common) -> Result<Common, Failure> {
    let Some(path) = c.config.clone() else {
        return Ok(c);
    };
    let text =
        fs::read_to_string(&path).with_context(|| format!("reading config {}", path.display()))?;
    let entries = kv::parse(&text).with_context(|| format!("in config {}", path.display()))?;
    for e in entries {
        let bad =
            |e: kv::KvError| anyhow::Error::new(e).context(format!("in config {}", path.display()));
        match e.key.as_str() {
            "grid" => c.grid = c.grid.or_else(|| Some(PathBuf::from(&e.value))),
            "scene" => c.scene = c.scene.or_else(|| Some(PathBuf::from(&e.value))),
            "frames" => c.frames = c.frames.or(Some(e.parse().map_err(bad)?)),
            "seed" => c.seed = c.seed.or(Some(e.parse().map_err(bad)?)),
            "kp" => c.kp = c.kp.or(Some(e.parse().map_err(bad)?)),
            "setpoint" => c.setpoint = c.setpoint.or(Some(e.parse().map_err(bad)?)),
            "step-mm" => c.step_mm = c.step_mm.or(Some(e.parse().map_err(bad)?)),
            "max-steps" => c.max_steps = c.max_steps.or(Some(e.parse().map_err(bad)?)),
            "noise-sigma" => c.noise_sigma = c.noise_sigma.or(Some(e.parse().map_err(bad)?)),
            "samples-per-cell" => {
                c.samples_per_cell = c.samples_per_cell.or(Some(e.parse().map_err(bad)?))
            }
            "format" => {
                let f = Format::from_str(&e.value, true).map_err(|_| {
                    bad(kv::KvError::BadValue {
                        line: e.line,
                        key: e.key.clone(),
                        value: e.value.clone(),
                    })
                })?;
                c.format = c.format.or(Some(f));
            }
            _ => {
                return Err(bad(kv::KvError::UnknownKey {
                    line: e.line,
                    key: e.key,
                })
                .into())
            }
        }
    }
    Ok(c)
}

impl Common {
    fn grid(&self) -> anyhow::Result<SensorGrid> {
        let spec = match &self.grid {
            Some(p) => {
                let text = fs::read_to_string(p)
                    .with_context(|| format!("reading grid file {}", p.display()))?;
                GridSpec::from_kv(&text).with_context(|| format!("in grid file {}", p.display()))?
            }
            None => GridSpec::default(),
        };
        Ok(SensorGrid::new(spec)?)
    }

    fn model(&self) -> Result<SensorModel, Failure> {
        let d = SensorModel::default();
        let m = SensorModel {
            noise_sigma: self.noise_sigma.unwrap_or(d.noise_sigma),
            samples_per_cell: self.samples_per_cell.unwrap_or(d.samples_per_cell),
            seed: self.seed.unwrap_or(d.seed),
            ..d
        };
        if m.noise_sigma.is_nan() || m.noise_sigma < 0.0 {
            return usage(format!("--noise-sigma must be >= 0, got {}", m.noise_sigma));
        }
        if m.samples_per_cell == 0 {
            return usage("--samples-per-cell must be >= 1");
        }
        Ok(m)
    }

    /// `--template` wins over `--scene`; `fallback` names a built-in to use
    /// when neither is given.
    fn scene(&self, template: Option<&str>, fallback: Option<&str>) -> Result<Scene, Failure> {
        if let Some(name) = template.or(if self.scene.is_none() { fallback } else { None }) {
            return match templates::by_name(name) {
                Some(s) => Ok(s),
                None => usage(format!(
                    "unknown template {name:?} (expected cloth_edge, cloth_corner or cable_3mm)"
                )),
            };
        }
        match &self.scene {
            Some(p) => Ok(read_scene(p).with_context(|| format!("scene {}", p.display()))?),
            None => usage("a scene is required: pass --scene FILE or --template NAME"),
        }
    }
}

fn output(path: Option<&Path>) -> anyhow::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            fs::File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn cmd_simulate(c: &Common, template: Option<&str>, out: &Path) -> CmdResult {
    let scene = c.scene(template, None)?;
    let Some(count) = c.frames else {
        return usage("--frames is required");
    };
    let grid = c.grid()?;
    let frames = render_stream(&scene, &grid, &c.model()?, count, 0);
    let raw: Vec<_> = frames
        .iter()
        .map(|f| uncomplement(f).context("frame does not fit the wire format"))
        .collect::<anyhow::Result<_>>()?;
    write_log(out, &raw).with_context(|| format!("writing {}", out.display()))?;
    Ok(())
}

fn load_frames(input: &Path) -> anyhow::Result<Vec<Frame>> {
    let log = read_log(input).with_context(|| format!("reading {}", input.display()))?;
    for w in &log.warnings {
        eprintln!("warning: {}: {w}", input.display());
    }
    Ok(log.frames.iter().map(complement).collect())
}

fn cmd_process(c: &Common, input: &Path, out: Option<&Path>) -> CmdResult {
    let grid = c.grid()?;
    let params = PipelineParams::default();
    let frames = load_frames(input)?;
    let lines: Vec<String> = frames
        .par_iter()
        .map(|f| {
            let features = process(f, &grid, &params)?;
            Ok(FeatureRecord::new(f, &features, &params).to_json_line())
        })
        .collect::<anyhow::Result<_>>()?;
    let mut w = output(out)?;
    for l in lines {
        writeln!(w, "{l}").context("writing output")?;
    }
    w.flush().context("writing output")?;
    Ok(())
}

fn cmd_trace(c: &Common, task: TaskKind, template: Option<&str>, out_dir: &Path) -> CmdResult {
    let fallback = match task {
        TaskKind::ClothEdge => "cloth_edge",
        TaskKind::ClothCorner => "cloth_corner",
        TaskKind::Cable => "cable_3mm",
    };
    let scene = c.scene(template, Some(fallback))?;
    let d = ControllerConfig::for_task(task);
    let config = ControllerConfig {
        k_p: c.kp.unwrap_or(d.k_p),
        setpoint_y: c.setpoint.unwrap_or(d.setpoint_y),
        step_mm: c.step_mm.unwrap_or(d.step_mm),
        max_steps: c.max_steps.unwrap_or(d.max_steps),
        ..d
    };
    if let Err(e) = config.validate() {
        return usage(e.to_string());
    }
    let grid = c.grid()?;
    let result = trace(
        task,
        &scene,
        &config,
        &grid,
        &c.model()?,
        &PipelineParams::default(),
    )
    .context("trace failed")?;

    fs::create_dir_all(out_dir).with_context(|| format!("creating {}", out_dir.display()))?;
    let mut steps = output(Some(&out_dir.join("steps.jsonl")))?;
    for s in &result.steps {
        writeln!(
            steps,
            "{}",
            serde_json::to_string(s).context("serializing step")?
        )?;
    }
    steps.flush()?;
    let mut events = output(Some(&out_dir.join("events.jsonl")))?;
    for e in &result.events {
        writeln!(
            events,
            "{}",
            serde_json::to_string(e).context("serializing event")?
        )?;
    }
    events.flush()?;
    let svg = out_dir.join("trace.svg");
    fs::write(&svg, report::trace_svg(&result, &scene, &grid))
        .with_context(|| format!("writing {}", svg.display()))?;
    println!(
        "{}",
        serde_json::to_string(result.terminal()).context("serializing event")?
    );
    Ok(())
}

fn cmd_render(
    c: &Common,
    input: Option<&Path>,
    index: usize,
    template: Option<&str>,
    out: Option<&Path>,
) -> CmdResult {
    let grid = c.grid()?;
    let frame = match input {
        Some(p) => {
            let mut frames = load_frames(p)?;
            if index >= frames.len() {
                return Err(anyhow!(
                    "{} has {} frames, no index {index}",
                    p.display(),
                    frames.len()
                )
                .into());
            }
            frames.swap_remove(index)
        }
        None => render(&c.scene(template, None)?, &grid, &c.model()?),
    };
    let features =
        process(&frame, &grid, &PipelineParams::default()).context("processing frame")?;
    let text = match c.format.unwrap_or(Format::Ascii) {
        Format::Ascii => report::ascii_frame(&frame, &grid, &features),
        Format::Svg => report::frame_svg(&frame, &grid, &features),
    };
    let mut w = output(out)?;
    w.write_all(text.as_bytes()).context("writing output")?;
    w.flush().context("writing output")?;
    Ok(())
}

fn cmd_sweep(c: &Common, materials: Option<&Path>) -> CmdResult {
    let list = match materials {
        Some(p) => {
            let text = fs::read_to_string(p)
                .with_context(|| format!("reading materials {}", p.display()))?;
            parse_materials(&text).with_context(|| format!("in materials {}", p.display()))?
        }
        None => Material::defaults(),
    };
    let grid = c.grid()?;
    let mut w = output(None)?;
    writeln!(w, "{:<12} {:>5} {:>8}", "material", "tau", "mean")?;
    for ((name, mean), m) in material_sweep(&list, &grid, &c.model()?).iter().zip(&list) {
        writeln!(w, "{name:<12} {:>5.2} {mean:>8.2}", m.tau)?;
    }
    w.flush()?;
    Ok(())
}

fn run(cli: Cli) -> CmdResult {
    let c = merge_config(cli.common)?;
    match &cli.command {
        Command::Simulate { template, out } => cmd_simulate(&c, template.as_deref(), out),
        Command::Process { input, out } => cmd_process(&c, input, out.as_deref()),
        Command::Trace {
            task,
            template,
            out_dir,
        } => cmd_trace(&c, *task, template.as_deref(), out_dir),
        Command::Render {
            input,
            index,
            template,
            out,
        } => cmd_render(
            &c,
            input.as_deref(),
            *index,
            template.as_deref(),
            out.as_deref(),
        ),
        Command::Sweep { materials } => cmd_sweep(&c, materials.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Data(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
