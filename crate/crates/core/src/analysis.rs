//! Snapshot analyzers and the stability sweep.
//!
//! A sweep starts, for each slab half-width `s`, from the flat equilibrium of
//! a map, trains it on samples of the `s`-dependent distribution, averages
//! periodic snapshots of the neuron representatives and measures how far the
//! averaged state has left the flat hyperplane. The stability limit `s*` is
//! where the normalized deviation `ū₃/s` jumps.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, GrisomError, Result};
use crate::geometry::{Model, Space};
use crate::io::{format_float, write_float_table, write_json, write_state_features};
use crate::sampling::{Distribution, Sampler};
use crate::som::{init_flat_equilibrium, NeighborhoodKind, NeighborhoodSpec, SomState};
use crate::tessellation::{euclidean_grid, hyperbolic_tiling, lattice_box, SchlaefliSymbol, Tiling};

/// Default threshold on `ū₃/s` separating the flat from the folded regime.
pub const DEFAULT_THRESHOLD: f64 = 0.1;

/// Combination of map and feature geometry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[allow(non_camel_case_types)]
pub enum Spaces {
    /// Flat grid in flat 3-space.
    EUCL_EUCL,
    /// Periodic flat grid in 3-space with the same periodic in-plane axes.
    EUCL_EUCL_PERIODIC,
    /// Hyperbolic tiling (Poincaré coordinates) in flat 3-space.
    EUCL_DISK,
    /// Hyperbolic tiling in the Poincaré ball.
    DISK_DISK,
}

impl Spaces {
    /// Identifier used on the command line and in run names.
    pub fn as_str(&self) -> &'static str {
        match self {
            Spaces::EUCL_EUCL => "EUCL_EUCL",
            Spaces::EUCL_EUCL_PERIODIC => "EUCL_EUCL_PERIODIC",
            Spaces::EUCL_DISK => "EUCL_DISK",
            Spaces::DISK_DISK => "DISK_DISK",
        }
    }

    /// Whether the map is a hyperbolic tiling.
    pub fn hyperbolic_map(&self) -> bool {
        matches!(self, Spaces::EUCL_DISK | Spaces::DISK_DISK)
    }
}

impl FromStr for Spaces {
    type Err = GrisomError;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "EUCL_EUCL" => Ok(Spaces::EUCL_EUCL),
            "EUCL_EUCL_PERIODIC" => Ok(Spaces::EUCL_EUCL_PERIODIC),
            "EUCL_DISK" => Ok(Spaces::EUCL_DISK),
            "DISK_DISK" => Ok(Spaces::DISK_DISK),
            other => Err(invalid(format!(
                "unknown spaces '{other}' (expected EUCL_EUCL, EUCL_EUCL_PERIODIC, EUCL_DISK or DISK_DISK)"
            ))),
        }
    }
}

impl std::fmt::Display for Spaces {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Default sample-disk margin beyond the outermost node, in units of the edge
/// length: half an edge, so the disk ends where the outer nodes' cells end.
pub const DEFAULT_DISK_RADIUS_FACTOR: f64 = 0.5;

/// Parameters of a stability sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    /// Map and feature geometry.
    pub spaces: Spaces,
    /// Tiling of the map.
    pub schlaefli: SchlaefliSymbol,
    /// Neighbourhood shape.
    pub neighborhood: NeighborhoodKind,
    /// Gaussian width (Gauss only).
    pub sigma: f64,
    /// Learning rate.
    pub epsilon: f64,
    /// First slab half-width.
    pub s_start: f64,
    /// Slab half-width increment.
    pub s_step: f64,
    /// Number of half-widths.
    pub s_count: usize,
    /// Snapshots averaged per half-width.
    pub measurements_per_s: usize,
    /// Adaptations between snapshots.
    pub adapt_interval: usize,
    /// Grid side `N` (flat maps) or number of layers (hyperbolic maps).
    pub size: usize,
    /// Base seed; half-width `i` uses stream `i`.
    pub seed: u64,
    /// Hyperbolic sample-disk radius = outermost node radius + factor × edge length.
    pub disk_radius_factor: f64,
}

impl SweepConfig {
    /// Half-width of sweep point `i`.
    pub fn s_value(&self, i: usize) -> f64 {
        self.s_start + i as f64 * self.s_step
    }

    /// Run name: the parameters joined by underscores.
    pub fn run_name(&self) -> String {
        format!(
            "{}_{}_{}_{}_{}_{}_{}_{}_{}_{}_{}_{}",
            self.spaces,
            self.schlaefli.p(),
            self.schlaefli.q(),
            self.size,
            self.neighborhood,
            self.epsilon,
            self.sigma,
            self.s_start,
            self.s_step,
            self.s_count,
            self.measurements_per_s,
            self.adapt_interval
        )
    }

    /// Checks ranges and combinations.
    pub fn validate(&self) -> Result<()> {
        if self.s_count == 0 || self.measurements_per_s == 0 || self.adapt_interval == 0 || self.size == 0 {
            return Err(invalid("s_count, measurements, interval and size must all be at least 1"));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(invalid(format!("ε = {} must lie in (0, 1)", self.epsilon)));
        }
        if !(self.s_start >= 0.0 && self.s_step >= 0.0 && self.s_start.is_finite() && self.s_step.is_finite()) {
            return Err(invalid("s_start and s_step must be finite and nonnegative"));
        }
        if self.neighborhood == NeighborhoodKind::Gauss && !(self.sigma > 0.0) {
            return Err(invalid(format!("σ = {} must be positive for a Gaussian neighbourhood", self.sigma)));
        }
        if self.spaces.hyperbolic_map() != self.schlaefli.is_hyperbolic() {
            return Err(invalid(format!(
                "{} needs a {} symbol, got {}",
                self.spaces,
                if self.spaces.hyperbolic_map() { "hyperbolic" } else { "Euclidean" },
                self.schlaefli
            )));
        }
        if !(self.disk_radius_factor >= 0.0 && self.disk_radius_factor.is_finite()) {
            return Err(invalid("disk radius factor must be finite and nonnegative"));
        }
        Ok(())
    }
}

/// Result of one sweep point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    /// Slab half-width.
    pub s: f64,
    /// Mean absolute extra-dimension deviation `ū₃` of the averaged state.
    pub mean_deviation: f64,
    /// `ū₃ / s` (0 when `s = 0`).
    pub normalized_deviation: f64,
    /// Mean distance between each sample and its winner's representative.
    pub mean_rep_error: f64,
}

/// Everything a sweep point produces.
#[derive(Debug, Clone)]
pub struct SweepPoint {
    /// Summary record.
    pub record: SweepRecord,
    /// Averaged feature coordinates, neuron after neuron.
    pub mean_state: Vec<f64>,
}

/// Map, feature space and sample geometry shared by all points of a sweep.
#[derive(Debug, Clone)]
pub struct SweepSetup {
    /// The map.
    pub tiling: Tiling,
    /// Feature space.
    pub feature_space: Space,
    /// Neighbourhood with `d_NN` taken from the tiling.
    pub neighborhood: NeighborhoodSpec,
    /// In-plane sample intervals (flat maps).
    pub box_intervals: Vec<(f64, f64)>,
    /// Sample-disk radius (hyperbolic maps).
    pub disk_radius: f64,
}

impl SweepSetup {
    /// Builds the map and sample geometry for `config`.
    pub fn new(config: &SweepConfig) -> Result<Self> {
        config.validate()?;
        let sym = config.schlaefli;
        let (tiling, feature_space, box_intervals, disk_radius) = match config.spaces {
            Spaces::EUCL_EUCL | Spaces::EUCL_EUCL_PERIODIC => {
                let periodic = config.spaces == Spaces::EUCL_EUCL_PERIODIC;
                let tiling = euclidean_grid(sym, config.size, true, periodic)?;
                let [lx, ly] = lattice_box(sym, config.size, tiling.edge_length())?;
                let fs = if periodic {
                    Space::periodic_euclidean(vec![Some(lx), Some(ly), None])?
                } else {
                    Space::euclidean(3)?
                };
                (tiling, fs, vec![(-0.5 * lx, 0.5 * lx), (-0.5 * ly, 0.5 * ly)], 0.0)
            }
            Spaces::EUCL_DISK | Spaces::DISK_DISK => {
                let tiling = hyperbolic_tiling(sym, config.size)?;
                let r_outer = tiling
                    .nodes()
                    .iter()
                    .map(|p| tiling.space().dist(&[0.0, 0.0], p.coords()))
                    .fold(0.0, f64::max);
                let radius = r_outer + config.disk_radius_factor * tiling.edge_length();
                let fs = if config.spaces == Spaces::DISK_DISK { Space::poincare_ball(3)? } else { Space::euclidean(3)? };
                (tiling, fs, Vec::new(), radius)
            }
        };
        let neighborhood = NeighborhoodSpec::of_kind(config.neighborhood, config.sigma, tiling.edge_length())?;
        Ok(Self { tiling, feature_space, neighborhood, box_intervals, disk_radius })
    }

    /// Sample distribution for half-width `s`.
    pub fn distribution(&self, spaces: Spaces, s: f64) -> Result<Distribution> {
        match spaces {
            Spaces::EUCL_EUCL | Spaces::EUCL_EUCL_PERIODIC => Distribution::eucl_box(&self.box_intervals, s),
            Spaces::EUCL_DISK => Distribution::hyp_disk_strip(self.disk_radius, s),
            Spaces::DISK_DISK => Distribution::hyp_slab(self.disk_radius, s),
        }
    }

    /// Fresh flat equilibrium.
    pub fn initial_state(&self) -> Result<SomState> {
        init_flat_equilibrium(&self.tiling, self.feature_space.clone(), self.neighborhood)
    }
}

/// Running per-neuron mean of snapshots.
///
/// Non-periodic flat spaces use the arithmetic mean; otherwise the
/// inductive geodesic mean `mₙ = γ(mₙ₋₁, xₙ; 1/n)` is used, which is exact
/// in flat space and follows the nearest periodic image on a torus.
#[derive(Debug, Clone)]
pub struct StreamingMean {
    space: Space,
    dim: usize,
    count: u64,
    mean: Vec<f64>,
}

impl StreamingMean {
    /// Empty mean over states of `neurons` representatives in `space`.
    pub fn new(space: Space, neurons: usize) -> Self {
        let dim = space.dimension();
        Self { space, dim, count: 0, mean: vec![0.0; neurons * dim] }
    }

    /// Adds one snapshot (feature coordinates, neuron after neuron).
    pub fn push(&mut self, snapshot: &[f64]) -> Result<()> {
        if snapshot.len() != self.mean.len() {
            return Err(invalid("snapshot size does not match the mean state"));
        }
        self.count += 1;
        if self.count == 1 {
            self.mean.copy_from_slice(snapshot);
            return Ok(());
        }
        let t = 1.0 / self.count as f64;
        let arithmetic = self.space.model() == Model::EuclideanCartesian && self.space.periodic_wrap().is_none();
        for (m, x) in self.mean.chunks_exact_mut(self.dim).zip(snapshot.chunks_exact(self.dim)) {
            if arithmetic {
                for (mi, xi) in m.iter_mut().zip(x) {
                    *mi += (xi - *mi) * t;
                }
            } else {
                self.space.move_toward(m, x, t)?;
            }
        }
        Ok(())
    }

    /// Number of snapshots pushed.
    pub fn count(&self) -> u64 {
        self.count
    }

    /// Current mean state.
    pub fn mean(&self) -> &[f64] {
        &self.mean
    }
}

/// Mean over neurons of `|z(mean_r) − z(ref_r)|`, with `z` the signed
/// extra-dimension distance of the feature space.
pub fn mean_extra_dim_error(mean_state: &[f64], reference_state: &[f64], feature_space: &Space) -> Result<f64> {
    if mean_state.len() != reference_state.len() {
        return Err(invalid("mean and reference states differ in size"));
    }
    let dim = feature_space.dimension();
    if dim == 0 || mean_state.len() % dim != 0 || mean_state.is_empty() {
        return Err(invalid("state size is not a positive multiple of the feature dimension"));
    }
    let n = mean_state.len() / dim;
    let mut sum = 0.0;
    for (m, r) in mean_state.chunks_exact(dim).zip(reference_state.chunks_exact(dim)) {
        let zm = feature_space.signed_extra_dim_coords(m)?;
        let zr = feature_space.signed_extra_dim_coords(r)?;
        sum += (zm - zr).abs();
    }
    Ok(sum / n as f64)
}

/// Mean feature distance between samples and the winner representatives
/// they were presented to.
pub fn mean_rep_error(samples: &[Vec<f64>], winner_positions: &[Vec<f64>], feature_space: &Space) -> Result<f64> {
    if samples.len() != winner_positions.len() || samples.is_empty() {
        return Err(invalid("need equally many (and at least one) samples and winner positions"));
    }
    let total: f64 = samples.iter().zip(winner_positions).map(|(s, w)| feature_space.dist(s, w)).sum();
    Ok(total / samples.len() as f64)
}

/// Runs sweep point `index` of `config`.
pub fn run_point(config: &SweepConfig, setup: &SweepSetup, index: usize) -> Result<SweepPoint> {
    let s = config.s_value(index);
    let mut state = setup.initial_state()?;
    let reference = state.features_flat().to_vec();
    let mut sampler = Sampler::with_stream(setup.distribution(config.spaces, s)?, config.seed, index as u64)?;
    let mut mean = StreamingMean::new(setup.feature_space.clone(), state.len());
    let mut input = vec![0.0; setup.feature_space.dimension()];
    let mut rep_sum = 0.0;
    for _ in 0..config.measurements_per_s {
        for _ in 0..config.adapt_interval {
            sampler.sample_into(&mut input)?;
            let (_, err) = state.adapt_with_error(&input, config.epsilon)?;
            rep_sum += err;
        }
        mean.push(state.features_flat())?;
    }
    let mean_deviation = mean_extra_dim_error(mean.mean(), &reference, &setup.feature_space)?;
    let steps = (config.measurements_per_s * config.adapt_interval) as f64;
    Ok(SweepPoint {
        record: SweepRecord {
            s,
            mean_deviation,
            normalized_deviation: if s > 0.0 { mean_deviation / s } else { 0.0 },
            mean_rep_error: rep_sum / steps,
        },
        mean_state: mean.mean().to_vec(),
    })
}

/// Runs every sweep point in parallel on the current rayon pool.
pub fn run_sweep_points(config: &SweepConfig) -> Result<(SweepSetup, Vec<SweepPoint>)> {
    let setup = SweepSetup::new(config)?;
    let points = (0..config.s_count)
        .into_par_iter()
        .map(|i| run_point(config, &setup, i))
        .collect::<Result<Vec<_>>>()?;
    Ok((setup, points))
}

/// Runs a sweep and returns one record per half-width.
pub fn run_sweep(config: &SweepConfig) -> Result<Vec<SweepRecord>> {
    Ok(run_sweep_points(config)?.1.into_iter().map(|p| p.record).collect())
}

/// Stability limit with its bracketing uncertainty.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StabilityLimit {
    /// Midpoint of the bracketing interval.
    pub s_star: f64,
    /// Half the bracketing interval.
    pub uncertainty: f64,
}

/// Locates the first interval in which `ū₃/s` rises from below `threshold`
/// to at or above it.
pub fn estimate_stability_limit(records: &[SweepRecord], threshold: f64) -> Result<StabilityLimit> {
    let mut sorted = records.to_vec();
    sorted.sort_by(|a, b| a.s.total_cmp(&b.s));
    for w in sorted.windows(2) {
        if w[0].normalized_deviation < threshold && w[1].normalized_deviation >= threshold {
            return Ok(StabilityLimit { s_star: 0.5 * (w[0].s + w[1].s), uncertainty: 0.5 * (w[1].s - w[0].s) });
        }
    }
    Err(GrisomError::NoTransition(format!(
        "normalized deviation never crosses {threshold} from below within s ∈ [{}, {}]",
        sorted.first().map_or(f64::NAN, |r| r.s),
        sorted.last().map_or(f64::NAN, |r| r.s)
    )))
}

/// Run metadata written next to the sweep output.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepManifest {
    /// Sweep parameters.
    pub config: SweepConfig,
    /// Library version.
    pub code_version: String,
    /// Base seed (repeated for convenience).
    pub seed: u64,
    /// Edge length of the map.
    pub d_nn: f64,
    /// Sample-disk radius of hyperbolic maps (0 for flat maps).
    pub disk_radius: f64,
}

/// Writes `errors.csv`, one `mean_state_<s>.csv` per point and `config.json` into `dir`.
pub fn write_sweep_outputs(dir: &Path, config: &SweepConfig, setup: &SweepSetup, points: &[SweepPoint]) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let header = ["s", "mean_deviation", "normalized_deviation", "mean_rep_error"].map(String::from);
    write_float_table(
        &dir.join("errors.csv"),
        &header,
        points.iter().map(|p| {
            let r = p.record;
            vec![r.s, r.mean_deviation, r.normalized_deviation, r.mean_rep_error]
        }),
    )?;
    let state = setup.initial_state()?;
    for p in points {
        let path = dir.join(format!("mean_state_{}.csv", format_float(p.record.s)));
        write_state_features(&path, &state, &p.mean_state)?;
    }
    let manifest = SweepManifest {
        config: config.clone(),
        code_version: env!("CARGO_PKG_VERSION").to_string(),
        seed: config.seed,
        d_nn: setup.tiling.edge_length(),
        disk_radius: setup.disk_radius,
    };
    write_json(&dir.join("config.json"), &manifest)
}

/// Output directory `root/<run name>`.
pub fn run_directory(root: &Path, config: &SweepConfig) -> PathBuf {
    root.join(config.run_name())
}
