//! Regular tilings of the Euclidean and hyperbolic planes, used as map spaces.
//!
//! A tiling is grown from the origin by the symmetry group generated by the
//! half-turns about the midpoints of the `q` edges leaving the origin: every
//! node is the image of the origin under a word in these involutions. Nodes
//! are produced breadth first, layer by layer, and a candidate closer than a
//! quarter edge to an existing node is treated as that node.

use std::collections::{HashMap, HashSet, VecDeque};
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, GrisomError, Result};
use crate::geometry::{EuclideanIsometry, Isometry, MobiusIsometry, Model, Point, Space};

/// Deepest expansion level allowed for hyperbolic tilings in double precision.
pub const MAX_HYPERBOLIC_LEVEL: usize = 8;

/// Regular tiling `(p, q)`: `p`-gonal Voronoi cells, `q` cells meeting at a node,
/// so every interior node has `q` neighbours.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SchlaefliSymbol {
    p: u32,
    q: u32,
}

/// Curvature class of a Schläfli symbol.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Curvature {
    /// `1/p + 1/q > 1/2`.
    Spherical,
    /// `1/p + 1/q = 1/2`.
    Euclidean,
    /// `1/p + 1/q < 1/2`.
    Hyperbolic,
}

impl SchlaefliSymbol {
    /// Builds `(p, q)` with `p, q ≥ 3`.
    pub fn new(p: u32, q: u32) -> Result<Self> {
        if p < 3 || q < 3 {
            return Err(invalid(format!("Schläfli symbol ({p},{q}) needs p, q ≥ 3")));
        }
        Ok(Self { p, q })
    }

    /// Polygon vertex count of a cell.
    pub fn p(&self) -> u32 {
        self.p
    }

    /// Number of cells meeting at a node (node degree).
    pub fn q(&self) -> u32 {
        self.q
    }

    /// Curvature class, decided in integer arithmetic: `(p−2)(q−2)` vs `4`.
    pub fn curvature(&self) -> Curvature {
        let k = (self.p - 2) * (self.q - 2);
        match k.cmp(&4) {
            std::cmp::Ordering::Less => Curvature::Spherical,
            std::cmp::Ordering::Equal => Curvature::Euclidean,
            std::cmp::Ordering::Greater => Curvature::Hyperbolic,
        }
    }

    /// Whether the tiling lives in the Euclidean plane.
    pub fn is_euclidean(&self) -> bool {
        self.curvature() == Curvature::Euclidean
    }

    /// Whether the tiling lives in the hyperbolic plane.
    pub fn is_hyperbolic(&self) -> bool {
        self.curvature() == Curvature::Hyperbolic
    }
}

impl std::fmt::Display for SchlaefliSymbol {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({},{})", self.p, self.q)
    }
}

/// Half the edge length of a hyperbolic tiling: `acosh(cos(π/p) / sin(π/q))`.
pub fn half_edge_length(sym: SchlaefliSymbol) -> Result<f64> {
    if !sym.is_hyperbolic() {
        return Err(invalid(format!("edge length of {sym} is not determined by the symbol")));
    }
    let (p, q) = (sym.p as f64, sym.q as f64);
    Ok(((PI / p).cos() / (PI / q).sin()).acosh())
}

fn check_edge(sym: SchlaefliSymbol, edge_length: f64) -> Result<()> {
    if !(edge_length > 0.0 && edge_length.is_finite()) {
        return Err(invalid(format!("edge length {edge_length} must be positive")));
    }
    match sym.curvature() {
        Curvature::Spherical => Err(GrisomError::Unsupported(format!("spherical tiling {sym}"))),
        Curvature::Euclidean => Ok(()),
        Curvature::Hyperbolic => {
            let expected = 2.0 * half_edge_length(sym)?;
            if ((edge_length - expected) / expected).abs() > 1e-9 {
                return Err(invalid(format!(
                    "hyperbolic {sym} tiling has edge length {expected}, not {edge_length}"
                )));
            }
            Ok(())
        }
    }
}

/// The `q` half-turns about the midpoints of the edges leaving the origin,
/// edge `i` pointing in direction `2πi/q`.
pub fn symmetry_generators(sym: SchlaefliSymbol, edge_length: f64) -> Result<Vec<Isometry>> {
    check_edge(sym, edge_length)?;
    let q = sym.q as usize;
    let mut gens = Vec::with_capacity(q);
    for i in 0..q {
        let angle = 2.0 * PI * i as f64 / q as f64;
        if sym.is_hyperbolic() {
            // The midpoint lies at hyperbolic distance edge/2, i.e. Poincaré radius tanh(edge/4).
            let m = Complex64::from_polar((0.25 * edge_length).tanh(), angle);
            let to_mid = MobiusIsometry::translation(m)?;
            let half_turn = to_mid.compose(&MobiusIsometry::rotation(PI)).compose(&to_mid.inverse());
            gens.push(Isometry::Mobius(half_turn));
        } else {
            let m = [0.5 * edge_length * angle.cos(), 0.5 * edge_length * angle.sin()];
            let rot = EuclideanIsometry::rotation_2d(PI);
            let shift = EuclideanIsometry::translation(&[2.0 * m[0], 2.0 * m[1]]);
            gens.push(Isometry::Euclidean(shift.compose(&rot)?));
        }
    }
    Ok(gens)
}

/// How an infinite tiling is cut down to a finite map.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Truncation {
    /// Keep expansion levels `0..=L`.
    MaxLevel(usize),
    /// Keep nodes within map distance `R` of the origin.
    MaxRadius(f64),
    /// `N × N` periodic grid (Euclidean symbols only).
    PeriodicGrid(usize),
}

/// A finite regular map: node positions, undirected adjacency and expansion layers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tiling {
    symbol: SchlaefliSymbol,
    space: Space,
    nodes: Vec<Point>,
    adjacency: Vec<(usize, usize)>,
    edge_length: f64,
    layer: Vec<usize>,
    periodic_wrap: Option<[f64; 2]>,
}

impl Tiling {
    /// Schläfli symbol of the tiling.
    pub fn symbol(&self) -> SchlaefliSymbol {
        self.symbol
    }

    /// Map space (periodic for periodic grids).
    pub fn space(&self) -> &Space {
        &self.space
    }

    /// Node positions in breadth-first order.
    pub fn nodes(&self) -> &[Point] {
        &self.nodes
    }

    /// Undirected edges `(a, b)` with `a < b`, sorted.
    pub fn adjacency(&self) -> &[(usize, usize)] {
        &self.adjacency
    }

    /// Nearest-neighbour distance.
    pub fn edge_length(&self) -> f64 {
        self.edge_length
    }

    /// Expansion layer of every node (origin = 0).
    pub fn layers(&self) -> &[usize] {
        &self.layer
    }

    /// Box side lengths of a periodic grid.
    pub fn periodic_wrap(&self) -> Option<[f64; 2]> {
        self.periodic_wrap
    }

    /// Number of nodes.
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    /// Whether the tiling has no nodes (never true for generated tilings).
    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Number of nodes in each layer.
    pub fn layer_sizes(&self) -> Vec<usize> {
        let depth = self.layer.iter().max().map_or(0, |m| m + 1);
        let mut sizes = vec![0; depth];
        for &l in &self.layer {
            sizes[l] += 1;
        }
        sizes
    }

    /// Neighbour lists derived from the adjacency.
    pub fn neighbors(&self) -> Vec<Vec<usize>> {
        let mut nb = vec![Vec::new(); self.nodes.len()];
        for &(a, b) in &self.adjacency {
            nb[a].push(b);
            nb[b].push(a);
        }
        nb
    }
}

/// Spatial hash over 2D coordinates for duplicate lookup.
struct CellGrid {
    cell: f64,
    map: HashMap<(i64, i64), Vec<usize>>,
}

impl CellGrid {
    fn new(cell: f64) -> Self {
        Self { cell, map: HashMap::new() }
    }

    fn key(&self, x: &[f64]) -> (i64, i64) {
        ((x[0] / self.cell).floor() as i64, (x[1] / self.cell).floor() as i64)
    }

    fn insert(&mut self, x: &[f64], id: usize) {
        let k = self.key(x);
        self.map.entry(k).or_default().push(id);
    }

    fn candidates<'a>(&'a self, x: &[f64]) -> impl Iterator<Item = usize> + 'a {
        let (kx, ky) = self.key(x);
        (-1..=1)
            .flat_map(move |dx| (-1..=1).map(move |dy| (kx + dx, ky + dy)))
            .filter_map(move |k| self.map.get(&k))
            .flatten()
            .copied()
    }
}

struct Growth {
    coords: Vec<[f64; 2]>,
    trafos: Vec<Isometry>,
    layer: Vec<usize>,
    edges: HashSet<(usize, usize)>,
}

/// Breadth-first growth through `levels` layers. The last layer is expanded
/// once more without creating nodes, so edges inside it are recorded.
fn grow(sym: SchlaefliSymbol, edge_length: f64, levels: usize, space: &Space) -> Result<Growth> {
    let gens = symmetry_generators(sym, edge_length)?;
    let identity = if sym.is_hyperbolic() {
        Isometry::Mobius(MobiusIsometry::identity())
    } else {
        Isometry::Euclidean(EuclideanIsometry::identity(2))
    };
    // Cells of one eighth edge in model coordinates. In the Poincaré disk this
    // is an upper bound for the coordinate size of a quarter-edge ball, and
    // true duplicates coincide up to rounding, so the 3×3 neighbourhood of a
    // cell always contains them.
    let cell_size = if sym.is_hyperbolic() { (edge_length / 8.0).tanh() } else { edge_length / 8.0 };
    let tol = edge_length / 4.0;
    let mut grid = CellGrid::new(cell_size);
    let mut g = Growth { coords: vec![[0.0, 0.0]], trafos: vec![identity], layer: vec![0], edges: HashSet::new() };
    grid.insert(&[0.0, 0.0], 0);
    let mut frontier: Vec<usize> = vec![0];
    for level in 0..=levels {
        let mut next = Vec::new();
        for &node in &frontier {
            for gen in &gens {
                let t = g.trafos[node].compose(gen)?;
                let c = t.apply_coords(&[0.0, 0.0]);
                let found = grid.candidates(&c).find(|&k| space.dist(&g.coords[k], &c) < tol);
                let target = match found {
                    Some(k) => k,
                    None if level < levels => {
                        let id = g.coords.len();
                        g.coords.push([c[0], c[1]]);
                        g.trafos.push(t);
                        g.layer.push(level + 1);
                        grid.insert(&c, id);
                        next.push(id);
                        id
                    }
                    None => continue,
                };
                if target != node {
                    g.edges.insert((node.min(target), node.max(target)));
                }
            }
        }
        frontier = next;
        if frontier.is_empty() {
            break;
        }
    }
    Ok(g)
}

fn map_space(sym: SchlaefliSymbol) -> Result<Space> {
    if sym.is_hyperbolic() {
        Space::poincare_ball(2)
    } else {
        Space::euclidean(2)
    }
}

/// Generates a finite tiling around `seed_origin` (a 2D Euclidean or Poincaré
/// point matching the symbol's geometry). The tiling is grown around the
/// coordinate origin and then moved rigidly onto `seed_origin`.
pub fn generate_tiling(
    sym: SchlaefliSymbol,
    edge_length: f64,
    truncation: Truncation,
    seed_origin: &Point,
) -> Result<Tiling> {
    check_edge(sym, edge_length)?;
    let space = map_space(sym)?;
    space.check(seed_origin)?;
    if let Truncation::PeriodicGrid(n) = truncation {
        if !sym.is_euclidean() {
            return Err(invalid("periodic grids exist only for Euclidean symbols"));
        }
        let mut t = lattice_grid(sym, n, edge_length, true)?;
        if seed_origin.coords().iter().any(|&c| c != 0.0) {
            for p in &mut t.nodes {
                let c: Vec<f64> = p.coords().iter().zip(seed_origin.coords()).map(|(a, b)| a + b).collect();
                *p = Point::euclidean(c);
            }
        }
        return Ok(t);
    }
    let (levels, radius) = match truncation {
        Truncation::MaxLevel(l) => {
            if sym.is_hyperbolic() && l > MAX_HYPERBOLIC_LEVEL {
                return Err(GrisomError::Precision(format!(
                    "hyperbolic expansion beyond level {MAX_HYPERBOLIC_LEVEL} cannot separate neighbours from duplicates in double precision"
                )));
            }
            (l, None)
        }
        Truncation::MaxRadius(r) => {
            if !(r >= 0.0 && r.is_finite()) {
                return Err(invalid(format!("radius {r} must be finite and nonnegative")));
            }
            (levels_for_radius(sym, edge_length, r, &space)?, Some(r))
        }
        Truncation::PeriodicGrid(_) => unreachable!(),
    };
    let g = grow(sym, edge_length, levels, &space)?;
    let keep: Vec<usize> = match radius {
        None => (0..g.coords.len()).collect(),
        Some(r) => {
            let lim = r * (1.0 + 1e-9);
            (0..g.coords.len()).filter(|&k| space.dist(&[0.0, 0.0], &g.coords[k]) <= lim).collect()
        }
    };
    let mut new_index = vec![usize::MAX; g.coords.len()];
    for (i, &k) in keep.iter().enumerate() {
        new_index[k] = i;
    }
    let mut adjacency: Vec<(usize, usize)> = g
        .edges
        .iter()
        .filter(|(a, b)| new_index[*a] != usize::MAX && new_index[*b] != usize::MAX)
        .map(|&(a, b)| (new_index[a], new_index[b]))
        .collect();
    adjacency.sort_unstable();
    let shift = origin_shift(sym, seed_origin)?;
    let nodes = keep
        .iter()
        .map(|&k| {
            let c = g.coords[k];
            match &shift {
                Some(t) => space.point(t.apply_coords(&c)),
                None => space.point(c.to_vec()),
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Tiling {
        symbol: sym,
        space,
        nodes,
        adjacency,
        edge_length,
        layer: keep.iter().map(|&k| g.layer[k]).collect(),
        periodic_wrap: None,
    })
}

fn origin_shift(sym: SchlaefliSymbol, seed: &Point) -> Result<Option<Isometry>> {
    let c = seed.coords();
    if c[0] == 0.0 && c[1] == 0.0 {
        return Ok(None);
    }
    Ok(Some(if sym.is_hyperbolic() {
        Isometry::Mobius(MobiusIsometry::translation(Complex64::new(c[0], c[1]))?)
    } else {
        Isometry::Euclidean(EuclideanIsometry::translation(c))
    }))
}

/// Number of layers to grow so that every node within `radius` is produced:
/// grow until a whole layer lies beyond the radius, then two more layers,
/// since layers of hyperbolic tilings overlap radially.
fn levels_for_radius(sym: SchlaefliSymbol, edge: f64, radius: f64, space: &Space) -> Result<usize> {
    let cap = if sym.is_hyperbolic() { MAX_HYPERBOLIC_LEVEL } else { usize::MAX / 2 };
    let mut levels = 1;
    loop {
        let g = grow(sym, edge, levels, space)?;
        let min_outer = (0..g.coords.len())
            .filter(|&k| g.layer[k] == levels)
            .map(|k| space.dist(&[0.0, 0.0], &g.coords[k]))
            .fold(f64::INFINITY, f64::min);
        if min_outer > radius {
            let total = levels + 2;
            if total > cap {
                return Err(GrisomError::Precision(format!(
                    "radius {radius} needs {total} hyperbolic levels; at most {MAX_HYPERBOLIC_LEVEL} are supported"
                )));
            }
            return Ok(total);
        }
        levels += 1;
        if levels > cap {
            return Err(GrisomError::Precision(format!(
                "radius {radius} exceeds what {MAX_HYPERBOLIC_LEVEL} hyperbolic levels can cover"
            )));
        }
    }
}

/// Edge length of the `N × N` flat grid whose period cell has the standard
/// area: `1/N` for (4,4), `2/(3^{1/4} N)` for (3,6), `2/(27^{1/4} N)` for (6,3).
pub fn normalized_edge_length(sym: SchlaefliSymbol, n: usize) -> Result<f64> {
    let n = n as f64;
    match (sym.p, sym.q) {
        (4, 4) => Ok(1.0 / n),
        (3, 6) => Ok(2.0 / (3f64.powf(0.25) * n)),
        (6, 3) => Ok(2.0 / (27f64.powf(0.25) * n)),
        _ => Err(invalid(format!("{sym} is not a Euclidean symbol"))),
    }
}

/// `N × N` grid of a flat regular map, centred on the origin.
///
/// With `normalize_area` the edge length is [`normalized_edge_length`],
/// otherwise 1. Periodic grids wrap both axes with the lattice period box and
/// require even `N`.
pub fn euclidean_grid(sym: SchlaefliSymbol, n: usize, normalize_area: bool, periodic: bool) -> Result<Tiling> {
    if !sym.is_euclidean() {
        return Err(invalid(format!("{sym} is not a Euclidean symbol")));
    }
    let d = if normalize_area { normalized_edge_length(sym, n)? } else { 1.0 };
    lattice_grid(sym, n, d, periodic)
}

/// Box side lengths of an `N × N` lattice with edge `d`.
pub fn lattice_box(sym: SchlaefliSymbol, n: usize, d: f64) -> Result<[f64; 2]> {
    let n = n as f64;
    let h = 0.5 * 3f64.sqrt();
    match (sym.p, sym.q) {
        (4, 4) => Ok([n * d, n * d]),
        (3, 6) => Ok([n * d, h * n * d]),
        (6, 3) => Ok([1.5 * n * d, h * n * d]),
        _ => Err(invalid(format!("{sym} is not a Euclidean symbol"))),
    }
}

fn lattice_grid(sym: SchlaefliSymbol, n: usize, d: f64, periodic: bool) -> Result<Tiling> {
    if n < 2 {
        return Err(invalid(format!("grid size N = {n} must be at least 2")));
    }
    if periodic && n % 2 == 1 {
        return Err(invalid(format!("periodic {sym} grids need an even size, got N = {n}")));
    }
    let size = lattice_box(sym, n, d)?;
    let h = 0.5 * 3f64.sqrt();
    let mut raw = Vec::with_capacity(n * n);
    for row in 0..n {
        for col in 0..n {
            let (m, r) = (col as f64, row as f64);
            let odd = (row % 2) as f64;
            let x = match (sym.p, sym.q) {
                (4, 4) => m,
                (3, 6) => m + 0.5 * odd,
                _ => 3.0 * (col / 2) as f64 + (col % 2) as f64 + 1.5 * odd,
            };
            let y = if sym.p == 4 { r } else { h * r };
            raw.push([d * x, d * y]);
        }
    }
    // Centre the point cloud (for periodic grids, the period box) on the origin.
    let (cx, cy) = if periodic {
        let mut lo = [f64::INFINITY; 2];
        for p in &raw {
            lo[0] = lo[0].min(p[0]);
            lo[1] = lo[1].min(p[1]);
        }
        let spread_x = raw.iter().map(|p| p[0]).fold(f64::NEG_INFINITY, f64::max) - lo[0];
        let spread_y = raw.iter().map(|p| p[1]).fold(f64::NEG_INFINITY, f64::max) - lo[1];
        (lo[0] + 0.5 * spread_x, lo[1] + 0.5 * spread_y)
    } else {
        let k = raw.len() as f64;
        (raw.iter().map(|p| p[0]).sum::<f64>() / k, raw.iter().map(|p| p[1]).sum::<f64>() / k)
    };
    let coords: Vec<[f64; 2]> = raw.iter().map(|p| [p[0] - cx, p[1] - cy]).collect();
    let space = if periodic {
        Space::periodic_euclidean(vec![Some(size[0]), Some(size[1])])?
    } else {
        Space::euclidean(2)?
    };
    let mut adjacency = Vec::new();
    for a in 0..coords.len() {
        for b in a + 1..coords.len() {
            if (space.dist(&coords[a], &coords[b]) - d).abs() <= 1e-6 * d {
                adjacency.push((a, b));
            }
        }
    }
    // Layers: hop distance from the node nearest the centre.
    let centre = (0..coords.len())
        .min_by(|&a, &b| {
            let da = coords[a][0].hypot(coords[a][1]);
            let db = coords[b][0].hypot(coords[b][1]);
            da.total_cmp(&db)
        })
        .unwrap_or(0);
    let mut nb = vec![Vec::new(); coords.len()];
    for &(a, b) in &adjacency {
        nb[a].push(b);
        nb[b].push(a);
    }
    let mut layer = vec![usize::MAX; coords.len()];
    layer[centre] = 0;
    let mut queue = VecDeque::from([centre]);
    while let Some(k) = queue.pop_front() {
        for &j in &nb[k] {
            if layer[j] == usize::MAX {
                layer[j] = layer[k] + 1;
                queue.push_back(j);
            }
        }
    }
    let nodes = coords.iter().map(|c| Point::euclidean(c.to_vec())).collect();
    Ok(Tiling {
        symbol: sym,
        space,
        nodes,
        adjacency,
        edge_length: d,
        layer,
        periodic_wrap: if periodic { Some(size) } else { None },
    })
}

/// Convenience: tiling around the coordinate origin.
pub fn generate_tiling_at_origin(sym: SchlaefliSymbol, edge_length: f64, truncation: Truncation) -> Result<Tiling> {
    let origin = if sym.is_hyperbolic() { Point::poincare(vec![0.0, 0.0])? } else { Point::euclidean(vec![0.0, 0.0]) };
    generate_tiling(sym, edge_length, truncation, &origin)
}

/// Hyperbolic tiling with its intrinsic edge length, truncated at `levels`.
pub fn hyperbolic_tiling(sym: SchlaefliSymbol, levels: usize) -> Result<Tiling> {
    let edge = 2.0 * half_edge_length(sym)?;
    generate_tiling_at_origin(sym, edge, Truncation::MaxLevel(levels))
}

impl Tiling {
    /// Model of the node coordinates.
    pub fn model(&self) -> Model {
        self.space.model()
    }
}
