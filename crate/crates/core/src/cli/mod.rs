//! The `cropload` command line: `estimate`, `evaluate-geometry`,
//! `evaluate-seg` and `synth`.
//!
//! Exit status is 0 on success, 1 when an input cannot be read or validated,
//! and 2 when `estimate` ran but produced no successful measurement.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use crate::cloud_geom::{backproject, AxisMode, PointCloud};
use crate::eval::{evaluate_segmentation, geometry_report, Quantity};
use crate::frame_io::{
    load_annotations, load_depth, load_intrinsics, load_measurements, load_truth,
    write_atomic, write_measurements, BitMask, CameraIntrinsics, DepthFrame, FrameAnnotations,
    InstanceClass, MeasurementRow,
};
use crate::limb_metrics::{measure_limb, perturb_mask, MeasureConfig, SpanMethod};
use crate::synth::{orchard_scene_set, render_frame, write_frame_set, OrchardParams, SceneSpec};

/// Largest accepted `--perturb-mask` radius in pixels.
pub const MAX_PERTURB_PX: i32 = 10;

#[derive(Debug, Parser)]
#[command(name = "cropload", version, about = "Branch diameter and crop-load estimation from RGB-D frames")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// More log output on stderr (-v info, -vv debug).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    pub verbose: u8,
    /// Worker threads; 0 uses one per core.
    #[arg(long, default_value_t = 0, global = true)]
    pub jobs: usize,
    /// Leave the timestamp out of JSON reports.
    #[arg(long, global = true)]
    pub no_timestamp: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Measure every branch instance and write a measurement CSV.
    Estimate(EstimateArgs),
    /// Compare a measurement CSV with a caliper truth CSV.
    EvaluateGeometry(EvaluateGeometryArgs),
    /// Score predicted instance masks against truth masks.
    EvaluateSeg(EvaluateSegArgs),
    /// Render synthetic trunk and branch frames with known geometry.
    Synth(SynthArgs),
}

#[derive(Debug, Args)]
pub struct MeasureArgs {
    /// Distance from the junction to the measurement locus along the branch.
    #[arg(long, default_value_t = 30.0)]
    pub offset_mm: f64,
    /// Initial slab half-width.
    #[arg(long, default_value_t = 5.0)]
    pub slab_mm: f64,
    /// Largest slab half-width tried before giving up.
    #[arg(long, default_value_t = 15.0)]
    pub slab_max_mm: f64,
    /// Points a slab needs before the diameter is measured.
    #[arg(long, default_value_t = 15)]
    pub min_slab_points: usize,
    #[arg(long, default_value_t = 2.5)]
    pub span_low_pct: f64,
    #[arg(long, default_value_t = 97.5)]
    pub span_high_pct: f64,
    /// `extrapolated` or `percentile`.
    #[arg(long, default_value = "extrapolated")]
    pub span_method: SpanMethod,
    /// `metric` or `standardized`.
    #[arg(long, default_value = "metric")]
    pub axis_mode: AxisMode,
    /// Fruit per cm² of limb cross-section.
    #[arg(long, default_value_t = 6.0)]
    pub density: f64,
}

impl MeasureArgs {
    pub fn config(&self) -> MeasureConfig {
        MeasureConfig {
            junction_offset_mm: self.offset_mm,
            slab_half_width_mm: self.slab_mm,
            slab_max_half_width_mm: self.slab_max_mm,
            min_slab_points: self.min_slab_points,
            span_low_pct: self.span_low_pct,
            span_high_pct: self.span_high_pct,
            span_method: self.span_method,
            fruit_density_per_cm2: self.density,
            axis_mode: self.axis_mode,
        }
    }
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    #[arg(long)]
    pub intrinsics: PathBuf,
    /// Directory holding `<frame_id>.png` 16-bit depth images.
    #[arg(long)]
    pub depth_dir: PathBuf,
    /// One annotation JSON file or a directory of them.
    #[arg(long)]
    pub annotations: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Dilate (positive) or erode (negative) branch masks by this many pixels.
    #[arg(long, default_value_t = 0, allow_negative_numbers = true,
          value_parser = clap::value_parser!(i32).range(-(MAX_PERTURB_PX as i64)..=MAX_PERTURB_PX as i64))]
    pub perturb_mask: i32,
    #[command(flatten)]
    pub measure: MeasureArgs,
}

#[derive(Debug, Args)]
pub struct EvaluateGeometryArgs {
    /// Measurement CSV written by `estimate`.
    #[arg(long)]
    pub pred: PathBuf,
    /// Caliper truth CSV.
    #[arg(long)]
    pub truth: PathBuf,
    #[arg(long, default_value = "diameter")]
    pub quantity: Quantity,
    /// Fruit density used when truth rows carry no crop load.
    #[arg(long, default_value_t = 6.0)]
    pub density: f64,
    /// Report JSON.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct EvaluateSegArgs {
    /// Predicted annotations: one JSON file or a directory of them.
    #[arg(long)]
    pub pred: PathBuf,
    /// Truth annotations: one JSON file or a directory of them.
    #[arg(long)]
    pub truth: PathBuf,
    #[arg(long, default_value_t = 0.5)]
    pub iou_threshold: f64,
    /// Report JSON.
    #[arg(long)]
    pub out: PathBuf,
    /// Precision-recall CSV; defaults to `<out>.pr.csv`.
    #[arg(long)]
    pub pr_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// Output directory; receives intrinsics.json, depth/, annotations/ and truth.csv.
    #[arg(long)]
    pub out: PathBuf,
    /// Render this scene instead of generated orchard frames.
    #[arg(long)]
    pub scene: Option<PathBuf>,
    /// Total branches across the generated frames, at most five per frame.
    #[arg(long, default_value_t = 3)]
    pub branches: usize,
    #[arg(long, default_value_t = 2.0)]
    pub noise_mm: f64,
    /// Put a flat backdrop at this depth behind the tree.
    #[arg(long)]
    pub backdrop_mm: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

/// Result of a subcommand that did not hit an input error.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Success,
    /// Ran to completion but nothing could be measured.
    Empty,
}

impl Outcome {
    pub fn exit_code(self) -> u8 {
        match self {
            Outcome::Success => 0,
            Outcome::Empty => 2,
        }
    }
}

/// Parses `std::env::args`, runs the command and maps the result to an exit
/// status.
pub fn main_entry() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // Usage errors are input errors; help and version are not errors.
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    init_logging(cli.verbose);
    match run(&cli) {
        Ok(outcome) => ExitCode::from(outcome.exit_code()),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn init_logging(verbose: u8) {
    let level = match verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    let _ = env_logger::Builder::new()
        .filter_level(level)
        .format_timestamp(None)
        .try_init();
}

pub fn run(cli: &Cli) -> anyhow::Result<Outcome> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.jobs)
        .build()
        .context("starting worker pool")?;
    let timestamp = (!cli.no_timestamp).then(unix_now);
    pool.install(|| match &cli.command {
        Command::Estimate(a) => run_estimate(a),
        Command::EvaluateGeometry(a) => run_evaluate_geometry(a, timestamp),
        Command::EvaluateSeg(a) => run_evaluate_seg(a, timestamp),
        Command::Synth(a) => run_synth(a),
    })
}

fn unix_now() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

/// Loads one annotation file, or every `*.json` in a directory in file-name
/// order.
pub fn load_annotation_set(path: &Path) -> anyhow::Result<Vec<FrameAnnotations>> {
    let files = if path.is_dir() {
        let mut files: Vec<PathBuf> = std::fs::read_dir(path)
            .with_context(|| format!("reading {}", path.display()))?
            .map(|e| e.map(|e| e.path()))
            .collect::<std::io::Result<_>>()
            .with_context(|| format!("reading {}", path.display()))?;
        files.retain(|p| p.extension().is_some_and(|x| x == "json"));
        files.sort();
        files
    } else {
        vec![path.to_path_buf()]
    };
    let frames: Vec<FrameAnnotations> = files
        .iter()
        .map(|f| load_annotations(f).with_context(|| format!("loading {}", f.display())))
        .collect::<anyhow::Result<_>>()?;
    let mut ids: Vec<&str> = frames.iter().map(|f| f.frame_id.as_str()).collect();
    ids.sort_unstable();
    if let Some(w) = ids.windows(2).find(|w| w[0] == w[1]) {
        bail!("frame id {} appears twice under {}", w[0], path.display());
    }
    Ok(frames)
}

/// Measures every branch instance of one frame. The trunk cloud is the union
/// of all trunk instances. Per-branch failures become rows with an error.
pub fn measure_frame(
    depth: &DepthFrame,
    intrinsics: &CameraIntrinsics,
    frame: &FrameAnnotations,
    config: &MeasureConfig,
    perturb_px: i32,
) -> crate::Result<Vec<MeasurementRow>> {
    let trunk_clouds = frame
        .of_class(InstanceClass::Trunk)
        .map(|t| backproject(depth, intrinsics, &t.mask))
        .collect::<crate::Result<Vec<_>>>()?;
    let trunk = PointCloud::concat(&trunk_clouds);

    let mut rows = Vec::new();
    for b in frame.of_class(InstanceClass::Branch) {
        let mask: BitMask = if perturb_px == 0 { b.mask.clone() } else { perturb_mask(&b.mask, perturb_px) };
        let cloud = backproject(depth, intrinsics, &mask)?;
        let row = match measure_limb(&b.instance_id, &cloud, &trunk, config) {
            Ok(m) => MeasurementRow {
                frame_id: frame.frame_id.clone(),
                instance_id: m.instance_id.clone(),
                diameter_mm: Some(m.diameter_mm),
                lcsa_cm2: Some(m.lcsa_cm2),
                crop_load: Some(m.crop_load),
                slab_point_count: Some(m.slab_point_count),
                flags: m.flags_string(),
                error: String::new(),
            },
            Err(e) => {
                log::info!("{}/{}: {e}", frame.frame_id, b.instance_id);
                MeasurementRow::failed(&frame.frame_id, &b.instance_id, e)
            }
        };
        rows.push(row);
    }
    Ok(rows)
}

fn run_estimate(a: &EstimateArgs) -> anyhow::Result<Outcome> {
    let config = a.measure.config();
    config.validate().context("invalid measurement options")?;
    let intrinsics = load_intrinsics(&a.intrinsics)
        .with_context(|| format!("loading {}", a.intrinsics.display()))?;
    let frames = load_annotation_set(&a.annotations)?;

    let per_frame: Vec<Vec<MeasurementRow>> = frames
        .par_iter()
        .map(|frame| -> anyhow::Result<Vec<MeasurementRow>> {
            let path = a.depth_dir.join(format!("{}.png", frame.frame_id));
            if (frame.width, frame.height) != (intrinsics.width, intrinsics.height) {
                bail!(
                    "annotations for {} are {}x{} but the camera is {}x{}",
                    frame.frame_id, frame.width, frame.height, intrinsics.width, intrinsics.height
                );
            }
            let depth = load_depth(&path, &intrinsics)
                .with_context(|| format!("loading {}", path.display()))?;
            measure_frame(&depth, &intrinsics, frame, &config, a.perturb_mask)
                .with_context(|| format!("measuring {}", path.display()))
        })
        .collect::<anyhow::Result<_>>()?;

    let mut rows: Vec<MeasurementRow> = per_frame.into_iter().flatten().collect();
    rows.sort_by(|x, y| x.key().cmp(&y.key()));
    write_measurements(&a.out, &rows).with_context(|| format!("writing {}", a.out.display()))?;

    let ok = rows.iter().filter(|r| r.is_ok()).count();
    log::info!("{ok} of {} branches measured", rows.len());
    if ok == 0 {
        eprintln!("no branch could be measured ({} rows written to {})", rows.len(), a.out.display());
        return Ok(Outcome::Empty);
    }
    Ok(Outcome::Success)
}

fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> anyhow::Result<()> {
    let mut bytes = serde_json::to_vec_pretty(value)?;
    bytes.push(b'\n');
    write_atomic(path, &bytes).with_context(|| format!("writing {}", path.display()))
}

fn run_evaluate_geometry(a: &EvaluateGeometryArgs, timestamp: Option<u64>) -> anyhow::Result<Outcome> {
    let pred = load_measurements(&a.pred).with_context(|| format!("loading {}", a.pred.display()))?;
    let truth = load_truth(&a.truth).with_context(|| format!("loading {}", a.truth.display()))?;
    let mut report = geometry_report(&pred, &truth, a.quantity, a.density).with_context(|| {
        format!("comparing {} with {}", a.pred.display(), a.truth.display())
    })?;
    report.generated_at = timestamp;
    write_json(&a.out, &report)?;
    log::info!("{}: n = {}, rmse = {:.4}, mae = {:.4}", a.quantity, report.n, report.rmse, report.mae);
    Ok(Outcome::Success)
}

fn pr_csv(rows: &[crate::eval::PrRow]) -> anyhow::Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["threshold", "precision", "recall"])?;
    for r in rows {
        w.write_record([r.threshold.to_string(), r.precision.to_string(), r.recall.to_string()])?;
    }
    Ok(w.into_inner()?)
}

fn run_evaluate_seg(a: &EvaluateSegArgs, timestamp: Option<u64>) -> anyhow::Result<Outcome> {
    if !(a.iou_threshold > 0.0 && a.iou_threshold <= 1.0) {
        bail!("--iou-threshold must lie in (0, 1], got {}", a.iou_threshold);
    }
    let pred = load_annotation_set(&a.pred)?;
    let truth = load_annotation_set(&a.truth)?;
    let mut report = evaluate_segmentation(&pred, &truth, a.iou_threshold).with_context(|| {
        format!("comparing {} with {}", a.pred.display(), a.truth.display())
    })?;
    report.generated_at = timestamp;
    let pr_path = a.pr_out.clone().unwrap_or_else(|| {
        let mut s = a.out.clone().into_os_string();
        s.push(".pr.csv");
        PathBuf::from(s)
    });
    let pr = pr_csv(&report.pr_table)?;
    write_json(&a.out, &report)?;
    write_atomic(&pr_path, &pr).with_context(|| format!("writing {}", pr_path.display()))?;
    Ok(Outcome::Success)
}

fn run_synth(a: &SynthArgs) -> anyhow::Result<Outcome> {
    let scenes: Vec<SceneSpec> = match &a.scene {
        Some(path) => {
            let bytes = std::fs::read(path).with_context(|| format!("reading {}", path.display()))?;
            let scene: SceneSpec = serde_json::from_slice(&bytes)
                .with_context(|| format!("parsing {}", path.display()))?;
            vec![scene]
        }
        None => {
            if a.branches == 0 {
                bail!("--branches must be at least 1");
            }
            let params = OrchardParams {
                depth_noise_sigma_mm: a.noise_mm,
                backdrop_mm: a.backdrop_mm,
                ..OrchardParams::default()
            };
            orchard_scene_set(a.branches, &params, a.seed)
        }
    };
    let intrinsics = scenes[0].intrinsics.clone();
    if scenes.iter().any(|s| s.intrinsics != intrinsics) {
        bail!("all scenes must share one camera");
    }
    let frames = scenes
        .iter()
        .map(|s| render_frame(s).with_context(|| format!("rendering {}", s.frame_id)))
        .collect::<anyhow::Result<Vec<_>>>()?;
    write_frame_set(&a.out, &intrinsics, &frames)
        .with_context(|| format!("writing under {}", a.out.display()))?;

    let truth: Vec<_> = frames.iter().flat_map(|f| f.truth.iter()).collect();
    println!("{} frames, {} branches written to {}", frames.len(), truth.len(), a.out.display());
    for t in truth {
        println!("{},{},{:.3}", t.frame_id, t.instance_id, t.diameter_mm);
    }
    Ok(Outcome::Success)
}
