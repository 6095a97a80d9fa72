//! Self-organizing maps with arbitrary map and feature geometries.
//!
//! Each neuron has a fixed position in the map space and a representative in
//! the feature space. A training step finds the neuron whose representative
//! is nearest to the input (the winner) and moves every representative along
//! the feature-space geodesic toward the input by the fraction `ε·h(d)`,
//! where `d` is the map distance to the winner and `h` the neighbourhood
//! function.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, GrisomError, Result};
use crate::geometry::{Model, Point, Space};
use crate::tessellation::Tiling;

/// Shape of the neighbourhood function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum NeighborhoodKind {
    /// `h(d) = exp(−d² / 2σ²)`.
    Gauss,
    /// `h = 1` for the winner and its nearest neighbours, else 0.
    NN,
    /// `h = 1` for the winner only (vector quantization).
    VQ,
}

impl std::str::FromStr for NeighborhoodKind {
    type Err = GrisomError;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "GAUSS" => Ok(NeighborhoodKind::Gauss),
            "NN" => Ok(NeighborhoodKind::NN),
            "VQ" => Ok(NeighborhoodKind::VQ),
            other => Err(invalid(format!("unknown neighbourhood '{other}' (expected GAUSS, NN or VQ)"))),
        }
    }
}

impl std::fmt::Display for NeighborhoodKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            NeighborhoodKind::Gauss => "GAUSS",
            NeighborhoodKind::NN => "NN",
            NeighborhoodKind::VQ => "VQ",
        })
    }
}

/// Default relative tolerance for recognising nearest neighbours.
pub const DEFAULT_NN_TOLERANCE: f64 = 1e-6;

/// Neighbourhood function with its parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NeighborhoodSpec {
    /// Shape.
    pub kind: NeighborhoodKind,
    /// Width of the Gaussian.
    pub sigma: f64,
    /// Nearest-neighbour map distance.
    pub d_nn: f64,
    /// Relative tolerance when matching `d_nn`.
    pub tolerance: f64,
}

impl NeighborhoodSpec {
    /// Gaussian of width `sigma > 0`.
    pub fn gauss(sigma: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(invalid(format!("σ = {sigma} must be positive")));
        }
        Ok(Self { kind: NeighborhoodKind::Gauss, sigma, d_nn: 0.0, tolerance: DEFAULT_NN_TOLERANCE })
    }

    /// Nearest-neighbour function for neighbour distance `d_nn > 0`.
    pub fn nn(d_nn: f64) -> Result<Self> {
        if !(d_nn > 0.0 && d_nn.is_finite()) {
            return Err(invalid(format!("d_NN = {d_nn} must be positive")));
        }
        Ok(Self { kind: NeighborhoodKind::NN, sigma: 0.0, d_nn, tolerance: DEFAULT_NN_TOLERANCE })
    }

    /// Winner-only function.
    pub fn vq() -> Self {
        Self { kind: NeighborhoodKind::VQ, sigma: 0.0, d_nn: 0.0, tolerance: DEFAULT_NN_TOLERANCE }
    }

    /// Builds a spec of the given kind; `sigma` is used by Gauss, `d_nn` by NN.
    pub fn of_kind(kind: NeighborhoodKind, sigma: f64, d_nn: f64) -> Result<Self> {
        match kind {
            NeighborhoodKind::Gauss => Self::gauss(sigma),
            NeighborhoodKind::NN => Self::nn(d_nn),
            NeighborhoodKind::VQ => Ok(Self::vq()),
        }
    }

    /// `h(d)` for a map distance `d ≥ 0`; `h(0) = 1` for every kind.
    #[inline]
    pub fn value(&self, map_distance: f64) -> f64 {
        match self.kind {
            NeighborhoodKind::Gauss => (-map_distance * map_distance / (2.0 * self.sigma * self.sigma)).exp(),
            NeighborhoodKind::NN => {
                if map_distance == 0.0 || (map_distance - self.d_nn).abs() <= self.tolerance * self.d_nn {
                    1.0
                } else {
                    0.0
                }
            }
            NeighborhoodKind::VQ => {
                if map_distance == 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }
}

/// A neuron: fixed map position and current feature representative.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Neuron {
    /// Position in the map space.
    pub map_point: Point,
    /// Representative in the feature space.
    pub feature_point: Point,
}

/// State of a map: neurons, spaces and neighbourhood.
#[derive(Debug, Clone)]
pub struct SomState {
    map_space: Space,
    feature_space: Space,
    neighborhood: NeighborhoodSpec,
    map_points: Vec<Point>,
    dim: usize,
    features: Vec<f64>,
    map_dist: Vec<f64>,
    table: Vec<Vec<(usize, f64)>>,
    clamped: u64,
}

impl SomState {
    /// Builds a map from explicit map points and feature representatives.
    pub fn new(
        map_space: Space,
        map_points: Vec<Point>,
        feature_space: Space,
        features: Vec<Point>,
        neighborhood: NeighborhoodSpec,
    ) -> Result<Self> {
        if map_points.is_empty() {
            return Err(GrisomError::InvalidState("a map needs at least one neuron".into()));
        }
        if map_points.len() != features.len() {
            return Err(invalid("one feature representative per map point is required"));
        }
        for p in &map_points {
            map_space.check(p)?;
        }
        for f in &features {
            feature_space.check(f)?;
        }
        let n = map_points.len();
        let mut map_dist = vec![0.0; n * n];
        for a in 0..n {
            for b in a + 1..n {
                let d = map_space.dist(map_points[a].coords(), map_points[b].coords());
                map_dist[a * n + b] = d;
                map_dist[b * n + a] = d;
            }
        }
        let dim = feature_space.dimension();
        let flat = features.iter().flat_map(|f| f.coords().iter().copied()).collect();
        let mut state = Self {
            map_space,
            feature_space,
            neighborhood,
            map_points,
            dim,
            features: flat,
            map_dist,
            table: Vec::new(),
            clamped: 0,
        };
        state.rebuild_table();
        Ok(state)
    }

    fn rebuild_table(&mut self) {
        let n = self.len();
        self.table = (0..n)
            .map(|w| {
                (0..n)
                    .filter_map(|r| {
                        let h = self.neighborhood.value(self.map_dist[w * n + r]);
                        (h > 0.0).then_some((r, h))
                    })
                    .collect()
            })
            .collect();
    }

    /// Number of neurons.
    pub fn len(&self) -> usize {
        self.map_points.len()
    }

    /// Always false: states hold at least one neuron.
    pub fn is_empty(&self) -> bool {
        self.map_points.is_empty()
    }

    /// Map space.
    pub fn map_space(&self) -> &Space {
        &self.map_space
    }

    /// Feature space.
    pub fn feature_space(&self) -> &Space {
        &self.feature_space
    }

    /// Neighbourhood function used by [`SomState::adapt`].
    pub fn neighborhood(&self) -> &NeighborhoodSpec {
        &self.neighborhood
    }

    /// Replaces the neighbourhood function.
    pub fn set_neighborhood(&mut self, spec: NeighborhoodSpec) {
        self.neighborhood = spec;
        self.rebuild_table();
    }

    /// Map position of neuron `i`.
    pub fn map_point(&self, i: usize) -> &Point {
        &self.map_points[i]
    }

    /// Feature coordinates of neuron `i`.
    pub fn feature(&self, i: usize) -> &[f64] {
        &self.features[i * self.dim..(i + 1) * self.dim]
    }

    /// All feature coordinates, neuron after neuron.
    pub fn features_flat(&self) -> &[f64] {
        &self.features
    }

    /// Feature representative of neuron `i` as a point.
    pub fn feature_point(&self, i: usize) -> Point {
        self.feature_space.point(self.feature(i).to_vec()).expect("representatives stay valid")
    }

    /// Copies of all neurons.
    pub fn neurons(&self) -> Vec<Neuron> {
        (0..self.len())
            .map(|i| Neuron { map_point: self.map_points[i].clone(), feature_point: self.feature_point(i) })
            .collect()
    }

    /// Map distance between neurons `a` and `b`.
    pub fn map_distance(&self, a: usize, b: usize) -> f64 {
        self.map_dist[a * self.len() + b]
    }

    /// How many times `ε·h` exceeded 1 and was clamped.
    pub fn clamp_count(&self) -> u64 {
        self.clamped
    }

    /// Overwrites the representative of neuron `i`.
    pub fn set_feature(&mut self, i: usize, p: &Point) -> Result<()> {
        self.feature_space.check(p)?;
        let dim = self.dim;
        self.features[i * dim..(i + 1) * dim].copy_from_slice(p.coords());
        Ok(())
    }

    /// Index of the first neuron with minimal feature distance to `input`.
    pub fn find_winner(&self, input: &[f64]) -> usize {
        let mut best = 0;
        let mut best_key = f64::INFINITY;
        for (i, w) in self.features.chunks_exact(self.dim).enumerate() {
            let k = self.feature_space.distance_key(w, input);
            if k < best_key {
                best_key = k;
                best = i;
            }
        }
        best
    }

    /// Validating form of [`SomState::find_winner`].
    pub fn find_winner_point(&self, input: &Point) -> Result<usize> {
        self.feature_space.check(input)?;
        Ok(self.find_winner(input.coords()))
    }

    /// One training step with the configured neighbourhood; returns the winner.
    pub fn adapt(&mut self, input: &[f64], epsilon: f64) -> Result<usize> {
        check_epsilon(epsilon)?;
        let winner = self.find_winner(input);
        self.update_around(winner, input, epsilon)?;
        Ok(winner)
    }

    /// Like [`SomState::adapt`], also returning the feature distance between
    /// the input and the winner's representative before the update.
    pub fn adapt_with_error(&mut self, input: &[f64], epsilon: f64) -> Result<(usize, f64)> {
        check_epsilon(epsilon)?;
        let winner = self.find_winner(input);
        let err = self.feature_space.dist(self.feature(winner), input);
        self.update_around(winner, input, epsilon)?;
        Ok((winner, err))
    }

    fn update_around(&mut self, winner: usize, input: &[f64], epsilon: f64) -> Result<()> {
        let dim = self.dim;
        for k in 0..self.table[winner].len() {
            let (r, h) = self.table[winner][k];
            let mut coeff = epsilon * h;
            if coeff == 0.0 {
                continue;
            }
            if coeff > 1.0 {
                coeff = 1.0;
                self.clamped += 1;
            }
            self.feature_space.move_toward(&mut self.features[r * dim..(r + 1) * dim], input, coeff)?;
        }
        Ok(())
    }

    /// Validating form of [`SomState::adapt`].
    pub fn adapt_point(&mut self, input: &Point, epsilon: f64) -> Result<usize> {
        self.feature_space.check(input)?;
        self.adapt(input.coords(), epsilon)
    }

    /// One training step with an explicit neighbourhood (e.g. a shrinking
    /// Gaussian); the stored neighbourhood is left unchanged.
    pub fn adapt_with(&mut self, input: &[f64], epsilon: f64, spec: &NeighborhoodSpec) -> Result<usize> {
        check_epsilon(epsilon)?;
        let winner = self.find_winner(input);
        let (n, dim) = (self.len(), self.dim);
        for r in 0..n {
            let mut coeff = epsilon * spec.value(self.map_dist[winner * n + r]);
            if coeff == 0.0 {
                continue;
            }
            if coeff > 1.0 {
                coeff = 1.0;
                self.clamped += 1;
            }
            self.feature_space.move_toward(&mut self.features[r * dim..(r + 1) * dim], input, coeff)?;
        }
        Ok(winner)
    }
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(invalid(format!("ε = {epsilon} must lie in (0, 1]")));
    }
    Ok(())
}

/// Flat equilibrium of a map on a tiling: every representative equals its
/// node's coordinates, extended by a zero extra coordinate when the feature
/// space has one more dimension than the map.
///
/// Poincaré node coordinates are reused verbatim in a Euclidean feature
/// space (the disk embedded in the plane `z = 0`).
pub fn init_flat_equilibrium(tiling: &Tiling, feature_space: Space, neighborhood: NeighborhoodSpec) -> Result<SomState> {
    let map_dim = tiling.space().dimension();
    let fdim = feature_space.dimension();
    if fdim != map_dim && fdim != map_dim + 1 {
        return Err(invalid(format!(
            "feature dimension {fdim} must equal the map dimension {map_dim} or exceed it by one"
        )));
    }
    if feature_space.model() != Model::EuclideanCartesian && feature_space.model() != Model::PoincareBall {
        return Err(invalid("flat equilibria need a Euclidean or Poincaré feature space"));
    }
    let features = tiling
        .nodes()
        .iter()
        .map(|p| {
            let mut c = p.coords().to_vec();
            c.resize(fdim, 0.0);
            feature_space.point(c)
        })
        .collect::<Result<Vec<_>>>()?;
    SomState::new(tiling.space().clone(), tiling.nodes().to_vec(), feature_space, features, neighborhood)
}
