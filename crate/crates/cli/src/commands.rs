//! Subcommand implementations.

use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{Context, Result};
use grisom::analysis::{
    estimate_stability_limit, run_directory, run_sweep_points, write_sweep_outputs, Spaces, SweepConfig,
};
use grisom::analytic::{analytic_table, stability_limit, AnalyticCase, AnalyticNeighborhood};
use grisom::io::{format_float, write_float_table, write_json, write_tiling};
use grisom::sampling::{Distribution, Sampler};
use grisom::som::NeighborhoodKind;
use grisom::tessellation::{euclidean_grid, generate_tiling_at_origin, half_edge_length, SchlaefliSymbol, Truncation};
use grisom::tsp::{builtin, solve, write_tsp_outputs, TspProblem, EARTH_RADIUS_KM};
use grisom::{GrisomError, Space};
use serde_json::{json, Value};

use crate::{AnalyticArgs, DistributionKind, SampleArgs, StabilityArgs, TessellateArgs, TspArgs, UsageError, World};

/// Root under which default output directories are created.
fn data_root() -> PathBuf {
    std::env::var_os("GRISOM_DATA_DIR").map_or_else(|| PathBuf::from("data"), PathBuf::from)
}

fn unix_seconds() -> f64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0.0, |d| d.as_secs_f64())
}

/// Everything needed to repeat a run: the exact argument list plus the resolved parameters.
struct RunManifest {
    subcommand: &'static str,
    parameters: Value,
    seed: Option<u64>,
    started: f64,
}

impl RunManifest {
    fn start(subcommand: &'static str, parameters: Value, seed: Option<u64>) -> Self {
        Self { subcommand, parameters, seed, started: unix_seconds() }
    }

    fn finish(self, dir: &Path) -> Result<()> {
        let manifest = json!({
            "subcommand": self.subcommand,
            "argv": std::env::args().collect::<Vec<_>>(),
            "parameters": self.parameters,
            "seed": self.seed,
            "code_version": env!("CARGO_PKG_VERSION"),
            "started_unix": self.started,
            "finished_unix": unix_seconds(),
            "output_dir": dir,
        });
        write_json(&dir.join("manifest.json"), &manifest).context("writing manifest.json")
    }
}

fn symbol(p: u32, q: u32) -> Result<SchlaefliSymbol> {
    SchlaefliSymbol::new(p, q).map_err(|e| UsageError::new("--p/--q", e.to_string()).into())
}

/// Rejects a map symbol whose curvature does not match the requested spaces.
fn check_spaces(spaces: Spaces, sym: SchlaefliSymbol) -> Result<()> {
    if spaces.hyperbolic_map() != sym.is_hyperbolic() {
        let kind = if sym.is_hyperbolic() { "hyperbolic" } else { "flat" };
        return Err(UsageError::new("--spaces", format!("{spaces} does not accept the {kind} tiling {sym}")).into());
    }
    Ok(())
}

fn check_positive(flag: &'static str, value: f64) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(UsageError::new(flag, format!("{value} must be positive and finite")).into())
    }
}

fn check_count(flag: &'static str, value: usize) -> Result<()> {
    if value == 0 {
        return Err(UsageError::new(flag, "must be at least 1").into());
    }
    Ok(())
}

pub fn stability(a: StabilityArgs) -> Result<()> {
    let sym = symbol(a.p, a.q)?;
    check_spaces(a.spaces, sym)?;
    if !(a.epsilon > 0.0 && a.epsilon <= 1.0) {
        return Err(UsageError::new("--epsilon", format!("{} must lie in (0, 1]", a.epsilon)).into());
    }
    if a.neighborhood == NeighborhoodKind::Gauss {
        check_positive("--sigma", a.sigma)?;
    }
    if !(a.s_start >= 0.0 && a.s_start.is_finite()) {
        return Err(UsageError::new("--s-start", format!("{} must be non-negative", a.s_start)).into());
    }
    if a.s_count > 1 {
        check_positive("--s-step", a.s_step)?;
    }
    check_count("--s-count", a.s_count)?;
    check_count("--measurements", a.measurements)?;
    check_count("--interval", a.interval)?;
    check_count("--size", a.size)?;
    if a.spaces == Spaces::EUCL_EUCL_PERIODIC && a.size % 2 == 1 {
        return Err(UsageError::new("--size", "periodic grids need an even size").into());
    }
    if !(a.disk_radius_factor >= 0.0 && a.disk_radius_factor.is_finite()) {
        return Err(UsageError::new("--disk-radius-factor", "must be non-negative").into());
    }
    check_positive("--threshold", a.threshold)?;
    if let Some(threads) = a.threads {
        check_count("--threads", threads)?;
        rayon::ThreadPoolBuilder::new().num_threads(threads).build_global().context("starting worker threads")?;
    }

    let config = SweepConfig {
        spaces: a.spaces,
        schlaefli: sym,
        neighborhood: a.neighborhood,
        sigma: a.sigma,
        epsilon: a.epsilon,
        s_start: a.s_start,
        s_step: a.s_step,
        s_count: a.s_count,
        measurements_per_s: a.measurements,
        adapt_interval: a.interval,
        size: a.size,
        seed: a.seed,
        disk_radius_factor: a.disk_radius_factor,
    };
    config.validate()?;
    let dir = a.out.unwrap_or_else(|| run_directory(&data_root(), &config));
    let manifest = RunManifest::start("stability", json!({ "config": config, "threshold": a.threshold }), Some(a.seed));

    let (setup, points) = run_sweep_points(&config)?;
    write_sweep_outputs(&dir, &config, &setup, &points).with_context(|| format!("writing {}", dir.display()))?;
    manifest.finish(&dir)?;

    for p in &points {
        println!("s = {}  normalized deviation = {}", format_float(p.record.s), format_float(p.record.normalized_deviation));
    }
    let records: Vec<_> = points.iter().map(|p| p.record).collect();
    match estimate_stability_limit(&records, a.threshold) {
        Ok(l) => println!("s* = {} ± {}", format_float(l.s_star), format_float(l.uncertainty)),
        Err(GrisomError::NoTransition(msg)) => println!("no stability limit found: {msg}"),
        Err(e) => return Err(e.into()),
    }
    println!("output: {}", dir.display());
    Ok(())
}

pub fn tessellate(a: TessellateArgs) -> Result<()> {
    let sym = symbol(a.p, a.q)?;
    check_spaces(a.spaces, sym)?;
    let periodic = a.spaces == Spaces::EUCL_EUCL_PERIODIC;
    let edge = if sym.is_hyperbolic() { 2.0 * half_edge_length(sym)? } else { 1.0 };
    let (tiling, tag) = match (a.max_level, a.max_radius, a.grid) {
        (_, _, Some(n)) => {
            if sym.is_hyperbolic() {
                return Err(UsageError::new("--grid", "grids exist only for flat tilings").into());
            }
            check_count("--grid", n)?;
            if periodic && n % 2 == 1 {
                return Err(UsageError::new("--grid", "periodic grids need an even size").into());
            }
            (euclidean_grid(sym, n, true, periodic)?, format!("N{n}"))
        }
        _ if periodic => {
            return Err(UsageError::new("--spaces", "EUCL_EUCL_PERIODIC maps are built with --grid").into());
        }
        (Some(level), _, _) => (generate_tiling_at_origin(sym, edge, Truncation::MaxLevel(level))?, format!("L{level}")),
        (_, Some(radius), _) => {
            check_positive("--max-radius", radius)?;
            (generate_tiling_at_origin(sym, edge, Truncation::MaxRadius(radius))?, format!("R{radius}"))
        }
        (None, None, None) => unreachable!("clap requires one truncation flag"),
    };
    let dir = a.out.unwrap_or_else(|| data_root().join(format!("tessellate_{}_{}_{}_{tag}", a.spaces, a.p, a.q)));
    let manifest = RunManifest::start(
        "tessellate",
        json!({ "spaces": a.spaces.as_str(), "p": a.p, "q": a.q, "max_level": a.max_level, "max_radius": a.max_radius, "grid": a.grid }),
        None,
    );
    write_tiling(&dir, &tiling).with_context(|| format!("writing {}", dir.display()))?;
    manifest.finish(&dir)?;
    println!(
        "{} nodes, {} edges, edge length {}, layers {:?}",
        tiling.len(),
        tiling.adjacency().len(),
        format_float(tiling.edge_length()),
        tiling.layer_sizes()
    );
    println!("output: {}", dir.display());
    Ok(())
}

pub fn sample(a: SampleArgs) -> Result<()> {
    check_positive("--radius", a.radius)?;
    check_count("--count", a.count)?;
    if !(a.s >= 0.0 && a.s.is_finite()) {
        return Err(UsageError::new("--s", format!("{} must be non-negative", a.s)).into());
    }
    let dist = match a.dist {
        DistributionKind::EuclBox => Distribution::eucl_box(&[(-a.radius, a.radius); 2], a.s),
        DistributionKind::HypSlab => {
            if a.s > a.radius {
                return Err(UsageError::new("--s", format!("slab half-width {} exceeds the disk radius {}", a.s, a.radius)).into());
            }
            Distribution::hyp_slab(a.radius, a.s)
        }
        DistributionKind::HypDiskStrip => Distribution::hyp_disk_strip(a.radius, a.s),
    }?;
    let dir = a.out.unwrap_or_else(|| {
        data_root().join(format!("sample_{}_{}_{}_{}_{}", a.dist.as_str(), a.s, a.radius, a.count, a.seed))
    });
    let manifest = RunManifest::start(
        "sample",
        json!({ "dist": a.dist.as_str(), "s": a.s, "radius": a.radius, "count": a.count }),
        Some(a.seed),
    );
    let dim = dist.dimension();
    let mut sampler = Sampler::new(dist, a.seed)?;
    let mut rows = Vec::with_capacity(a.count);
    let mut buf = vec![0.0; dim];
    for _ in 0..a.count {
        sampler.sample_into(&mut buf)?;
        rows.push(buf.clone());
    }
    std::fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    let header: Vec<String> = (0..dim).map(|i| format!("x{i}")).collect();
    write_float_table(&dir.join("samples.csv"), &header, rows)?;
    manifest.finish(&dir)?;
    let stats = sampler.stats();
    if stats.proposals > 0 {
        println!("rejection acceptance rate {}", format_float(stats.acceptance_rate()));
    }
    println!("{} samples, output: {}", a.count, dir.display());
    Ok(())
}

/// `GAUSS` picks the long-range regime when a width is given and the short-range one otherwise.
fn analytic_neighborhood(name: &str, sigma: Option<f64>) -> Result<AnalyticNeighborhood> {
    if name.eq_ignore_ascii_case("GAUSS") {
        return Ok(if sigma.is_some() { AnalyticNeighborhood::GaussLarge } else { AnalyticNeighborhood::GaussSmall });
    }
    name.parse().map_err(|e: GrisomError| UsageError::new("--neighborhood", e.to_string()).into())
}

pub fn analytic(a: AnalyticArgs) -> Result<()> {
    let sigma = a.sigma.unwrap_or(1.0);
    check_positive("--sigma", sigma)?;
    let rows = analytic_table()?;
    match (a.p.zip(a.q), a.neighborhood) {
        (Some((p, q)), Some(name)) => {
            let n = analytic_neighborhood(&name, a.sigma)?;
            let case = AnalyticCase::new(symbol(p, q)?, n, sigma)
                .map_err(|e| UsageError::new("--p/--q", e.to_string()))?;
            println!("{}", format_float(stability_limit(&case)?));
        }
        (selected, _) => {
            let selected = selected.map(|(p, q)| symbol(p, q)).transpose()?;
            if let Some(sym) = selected {
                if !rows.iter().any(|r| r.map == sym) {
                    return Err(UsageError::new("--p/--q", format!("no closed-form limits for {sym}")).into());
                }
            }
            println!("p,q,gauss_large_per_sigma,gauss_small,nn,vq");
            for r in rows.iter().filter(|r| selected.map_or(true, |s| s == r.map)) {
                println!(
                    "{},{},{},{},{},{}",
                    r.map.p(),
                    r.map.q(),
                    format_float(r.gauss_large_per_sigma),
                    format_float(r.gauss_small),
                    format_float(r.nn),
                    format_float(r.vq)
                );
            }
        }
    }
    Ok(())
}

/// Reads `name,c0,c1` rows (with a header) into a problem.
fn read_cities(path: &Path, world: World) -> Result<TspProblem> {
    let space = match world {
        World::Eucl => Space::euclidean(2)?,
        World::Disk => Space::poincare_ball(2)?,
        World::Geo => Space::geographic(),
    };
    let mut reader = csv::Reader::from_path(path).with_context(|| format!("reading {}", path.display()))?;
    let mut cities = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record?;
        let field = |i: usize| -> Result<f64> {
            let raw = record.get(i).ok_or_else(|| UsageError::new("--cities", format!("row {} has fewer than 3 fields", line + 1)))?;
            raw.trim()
                .parse()
                .map_err(|_| UsageError::new("--cities", format!("row {}: '{raw}' is not a number", line + 1)).into())
        };
        cities.push((record.get(0).unwrap_or_default().trim().to_string(), [field(1)?, field(2)?]));
    }
    let named: Vec<(&str, [f64; 2])> = cities.iter().map(|(n, c)| (n.as_str(), *c)).collect();
    let mut problem = TspProblem::from_coordinates(space, &named).map_err(|e| UsageError::new("--cities", e.to_string()))?;
    if world == World::Geo {
        problem.length_scale = EARTH_RADIUS_KM;
    }
    Ok(problem)
}

pub fn tsp(a: TspArgs) -> Result<()> {
    let (mut problem, name) = match (&a.problem, &a.cities) {
        (Some(name), _) => (builtin(name).map_err(|e| UsageError::new("--problem", e.to_string()))?, name.to_ascii_lowercase()),
        (None, Some(path)) => {
            let stem = path.file_stem().map_or_else(|| "cities".to_string(), |s| s.to_string_lossy().into_owned());
            (read_cities(path, a.world)?, stem)
        }
        (None, None) => unreachable!("clap requires --problem or --cities"),
    };
    if let Some(n) = a.neurons {
        check_count("--neurons", n)?;
        problem.neurons = n;
    }
    if let Some(steps) = a.steps {
        check_count("--steps", steps)?;
        problem.steps = steps;
    }
    if let Some(eps) = a.epsilon {
        check_positive("--epsilon", eps)?;
        problem.epsilon = eps;
    }
    if let Some(scale) = a.length_scale {
        check_positive("--length-scale", scale)?;
        problem.length_scale = scale;
    }
    problem.validate()?;
    let dir = a.out.unwrap_or_else(|| data_root().join(format!("tsp_{name}_{}", a.seed)));
    let manifest = RunManifest::start("tsp", json!({ "problem": problem }), Some(a.seed));
    let solution = solve(&problem, a.seed)?;
    write_tsp_outputs(&dir, &problem, &solution).with_context(|| format!("writing {}", dir.display()))?;
    manifest.finish(&dir)?;
    let tour: Vec<&str> = solution.order.iter().map(|&c| problem.cities[c].name.as_str()).collect();
    println!("tour: {}", tour.join(" -> "));
    println!("length: {}", format_float(solution.total_length));
    println!("output: {}", dir.display());
    Ok(())
}
