//! `grisom` command-line front end.
//!
//! Exit status: 0 on success, 2 when the arguments are rejected, 1 when a run
//! fails at runtime.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use grisom::analysis::{Spaces, DEFAULT_DISK_RADIUS_FACTOR, DEFAULT_THRESHOLD};
use grisom::som::NeighborhoodKind;
use grisom::GrisomError;

/// Self-organizing maps on Euclidean, hyperbolic and spherical manifolds.
#[derive(Debug, Parser)]
#[command(name = "grisom", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Sweep the slab half-width and locate the stability limit of a map.
    Stability(StabilityArgs),
    /// Generate a regular map and write its nodes and edges.
    Tessellate(TessellateArgs),
    /// Draw uniform samples from one of the input distributions.
    Sample(SampleArgs),
    /// Print closed-form stability limits of the flat lattices.
    Analytic(AnalyticArgs),
    /// Solve a travelling-salesman problem with a ring map.
    Tsp(TspArgs),
}

#[derive(Debug, Args)]
struct StabilityArgs {
    /// Map and feature geometry.
    #[arg(long, value_parser = parse_spaces)]
    spaces: Spaces,
    /// Polygon size of the tiling.
    #[arg(long)]
    p: u32,
    /// Polygons meeting at each vertex.
    #[arg(long)]
    q: u32,
    /// Neighbourhood function.
    #[arg(long, value_parser = parse_neighborhood)]
    neighborhood: NeighborhoodKind,
    /// Learning rate.
    #[arg(long)]
    epsilon: f64,
    /// Gaussian width (GAUSS only).
    #[arg(long, default_value_t = 0.0)]
    sigma: f64,
    /// First slab half-width.
    #[arg(long)]
    s_start: f64,
    /// Half-width increment.
    #[arg(long)]
    s_step: f64,
    /// Number of half-widths.
    #[arg(long)]
    s_count: usize,
    /// Snapshots averaged per half-width.
    #[arg(long)]
    measurements: usize,
    /// Adaptations between snapshots.
    #[arg(long)]
    interval: usize,
    /// Grid side (flat maps) or number of layers (hyperbolic maps).
    #[arg(long)]
    size: usize,
    /// Base random seed.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Output directory (default: <data root>/<run name>).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
    /// Sample-disk margin beyond the outermost node, in edge lengths.
    #[arg(long, default_value_t = DEFAULT_DISK_RADIUS_FACTOR)]
    disk_radius_factor: f64,
    /// Normalized deviation that marks the stability limit.
    #[arg(long, default_value_t = DEFAULT_THRESHOLD)]
    threshold: f64,
}

#[derive(Debug, Args)]
#[command(group(clap::ArgGroup::new("truncation").required(true).args(["max_level", "max_radius", "grid"])))]
struct TessellateArgs {
    /// Map and feature geometry (selects flat or hyperbolic maps, and periodicity).
    #[arg(long, value_parser = parse_spaces)]
    spaces: Spaces,
    /// Polygon size of the tiling.
    #[arg(long)]
    p: u32,
    /// Polygons meeting at each vertex.
    #[arg(long)]
    q: u32,
    /// Keep expansion levels 0..=L.
    #[arg(long)]
    max_level: Option<usize>,
    /// Keep nodes within this map distance of the origin.
    #[arg(long)]
    max_radius: Option<f64>,
    /// N × N grid of unit area (flat maps only).
    #[arg(long)]
    grid: Option<usize>,
    /// Output directory (default: <data root>/<run name>).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SampleArgs {
    /// Distribution: EUCL_BOX, HYP_SLAB or HYP_DISK_STRIP.
    #[arg(long, value_parser = parse_distribution)]
    dist: DistributionKind,
    /// Half-width of the extra dimension.
    #[arg(long)]
    s: f64,
    /// Disk radius (hyperbolic) or in-plane half-extent of the box.
    #[arg(long)]
    radius: f64,
    /// Number of samples.
    #[arg(long)]
    count: usize,
    /// Random seed.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Output directory (default: <data root>/<run name>).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct AnalyticArgs {
    /// Polygon size of the lattice (with --q; omit both for the whole table).
    #[arg(long, requires = "q")]
    p: Option<u32>,
    /// Polygons meeting at each vertex.
    #[arg(long, requires = "p")]
    q: Option<u32>,
    /// GAUSS, GAUSS_LARGE, GAUSS_SMALL, NN or VQ (requires --p and --q).
    #[arg(long, requires = "p")]
    neighborhood: Option<String>,
    /// Gaussian width in edge lengths; with GAUSS it selects the long-range limit.
    #[arg(long)]
    sigma: Option<f64>,
}

#[derive(Debug, Args)]
#[command(group(clap::ArgGroup::new("input").required(true).args(["problem", "cities"])))]
struct TspArgs {
    /// Built-in problem: barbarossa, obama or ksenu.
    #[arg(long)]
    problem: Option<String>,
    /// CSV file with a header and rows `name,c0,c1`.
    #[arg(long)]
    cities: Option<PathBuf>,
    /// World of a --cities file: EUCL, DISK or GEO (latitude, longitude in degrees).
    #[arg(long, default_value = "GEO", value_parser = parse_world)]
    world: World,
    /// Factor applied to reported lengths (default: earth radius in km on GEO, else 1).
    #[arg(long)]
    length_scale: Option<f64>,
    /// Ring size.
    #[arg(long)]
    neurons: Option<usize>,
    /// Adaptation steps.
    #[arg(long)]
    steps: Option<usize>,
    /// Learning rate.
    #[arg(long)]
    epsilon: Option<f64>,
    /// Random seed.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Output directory (default: <data root>/<run name>).
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Input distributions of the `sample` subcommand.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum DistributionKind {
    EuclBox,
    HypSlab,
    HypDiskStrip,
}

impl DistributionKind {
    fn as_str(self) -> &'static str {
        match self {
            DistributionKind::EuclBox => "EUCL_BOX",
            DistributionKind::HypSlab => "HYP_SLAB",
            DistributionKind::HypDiskStrip => "HYP_DISK_STRIP",
        }
    }
}

/// Feature spaces of user-supplied TSP instances.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum World {
    Eucl,
    Disk,
    Geo,
}

fn parse_spaces(s: &str) -> Result<Spaces, String> {
    s.parse().map_err(|e: GrisomError| e.to_string())
}

fn parse_neighborhood(s: &str) -> Result<NeighborhoodKind, String> {
    s.parse().map_err(|e: GrisomError| e.to_string())
}

fn parse_distribution(s: &str) -> Result<DistributionKind, String> {
    match s.to_ascii_uppercase().as_str() {
        "EUCL_BOX" => Ok(DistributionKind::EuclBox),
        "HYP_SLAB" => Ok(DistributionKind::HypSlab),
        "HYP_DISK_STRIP" => Ok(DistributionKind::HypDiskStrip),
        other => Err(format!("unknown distribution '{other}' (expected EUCL_BOX, HYP_SLAB or HYP_DISK_STRIP)")),
    }
}

fn parse_world(s: &str) -> Result<World, String> {
    match s.to_ascii_uppercase().as_str() {
        "EUCL" => Ok(World::Eucl),
        "DISK" => Ok(World::Disk),
        "GEO" => Ok(World::Geo),
        other => Err(format!("unknown world '{other}' (expected EUCL, DISK or GEO)")),
    }
}

/// Arguments that parse but cannot be used; reported with exit status 2.
#[derive(Debug)]
pub struct UsageError {
    flag: &'static str,
    message: String,
}

impl UsageError {
    pub fn new(flag: &'static str, message: impl Into<String>) -> Self {
        Self { flag, message: message.into() }
    }
}

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "invalid value for '{}': {}", self.flag, self.message)
    }
}

impl std::error::Error for UsageError {}

/// Exit status of a failed run: 2 for rejected arguments, 1 otherwise.
fn exit_status(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<UsageError>().is_some() {
        return 2;
    }
    match err.downcast_ref::<GrisomError>() {
        Some(GrisomError::InvalidArgument(_) | GrisomError::Domain(_) | GrisomError::Unsupported(_)) => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let result = match cli.command {
        Command::Stability(a) => commands::stability(a),
        Command::Tessellate(a) => commands::tessellate(a),
        Command::Sample(a) => commands::sample(a),
        Command::Analytic(a) => commands::analytic(a),
        Command::Tsp(a) => commands::tsp(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_status(&e))
        }
    }
}
