//! Travelling-salesman tours from a ring of neurons.
//!
//! A closed chain of neurons (the map is a circle of circumference 1) is
//! trained on the city positions with a Gaussian neighbourhood whose width
//! shrinks geometrically from ten neuron spacings to a fiftieth of that. The
//! tour visits the cities in the ring order of their winning neurons. Works in
//! the plane, on the sphere (geographic coordinates) and in the Poincaré disk.

use std::f64::consts::TAU;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::analysis::StreamingMean;
use crate::error::{invalid, GrisomError, Result};
use crate::geometry::{geographic_to_unit, mobius_add, unit_to_geographic, Model, Point, Space};
use crate::io::{csv_writer, format_float};
use crate::som::{NeighborhoodSpec, SomState};

/// Default number of neurons on the ring.
pub const DEFAULT_NEURONS: usize = 50;
/// Default number of adaptation steps.
pub const DEFAULT_STEPS: usize = 10_000;
/// Default learning rate.
pub const DEFAULT_EPSILON: f64 = 0.1;
/// Mean earth radius in kilometres.
pub const EARTH_RADIUS_KM: f64 = 6371.0;

/// Initial neighbourhood width in neuron spacings.
const SIGMA_START_SPACINGS: f64 = 10.0;
/// Ratio of final to initial neighbourhood width.
const SIGMA_DECAY: f64 = 0.02;
/// Radius of the initial circle relative to the cities' spread.
const INIT_RADIUS_FRACTION: f64 = 0.1;

/// A named city.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct City {
    /// Display name.
    pub name: String,
    /// Position in the problem's feature space.
    pub position: Point,
}

/// A travelling-salesman instance and solver settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TspProblem {
    /// Feature space: 2-D Euclidean, 2-D Poincaré disk or geographic sphere.
    pub feature_space: Space,
    /// Cities to visit.
    pub cities: Vec<City>,
    /// Ring size.
    pub neurons: usize,
    /// Adaptation steps.
    pub steps: usize,
    /// Learning rate.
    pub epsilon: f64,
    /// Factor converting space distances to reported lengths (earth radius on the sphere).
    pub length_scale: f64,
}

impl TspProblem {
    /// Problem with default solver settings and unit length scale.
    pub fn new(feature_space: Space, cities: Vec<City>) -> Result<Self> {
        let p = Self {
            feature_space,
            cities,
            neurons: DEFAULT_NEURONS,
            steps: DEFAULT_STEPS,
            epsilon: DEFAULT_EPSILON,
            length_scale: 1.0,
        };
        p.validate()?;
        Ok(p)
    }

    /// Builds cities from `(name, coordinates)` pairs in `space` (geographic
    /// coordinates are `(latitude, longitude)` in degrees).
    pub fn from_coordinates(space: Space, cities: &[(&str, [f64; 2])]) -> Result<Self> {
        let cities = cities
            .iter()
            .map(|(name, c)| {
                let position = match space.model() {
                    Model::Geographic => Point::geographic_deg(c[0], c[1])?,
                    _ => space.point(c.to_vec())?,
                };
                Ok(City { name: name.to_string(), position })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(space, cities)
    }

    /// Checks sizes, parameters and that every city lives in the feature space.
    pub fn validate(&self) -> Result<()> {
        match self.feature_space.model() {
            Model::EuclideanCartesian | Model::PoincareBall if self.feature_space.dimension() == 2 => {}
            Model::Geographic => {}
            _ => {
                return Err(GrisomError::Unsupported(
                    "tours need a 2-D Euclidean, 2-D Poincaré or geographic feature space".into(),
                ))
            }
        }
        if self.feature_space.periodic_wrap().is_some() {
            return Err(GrisomError::Unsupported("periodic feature spaces are not supported for tours".into()));
        }
        if self.cities.len() < 3 {
            return Err(invalid("a tour needs at least 3 cities"));
        }
        if self.neurons < self.cities.len() {
            return Err(invalid(format!("{} neurons cannot separate {} cities", self.neurons, self.cities.len())));
        }
        if self.steps == 0 {
            return Err(invalid("need at least one adaptation step"));
        }
        if !(self.epsilon > 0.0 && self.epsilon <= 1.0) {
            return Err(invalid(format!("ε = {} must lie in (0, 1]", self.epsilon)));
        }
        if !(self.length_scale > 0.0 && self.length_scale.is_finite()) {
            return Err(invalid("length scale must be positive"));
        }
        for c in &self.cities {
            self.feature_space.check(&c.position)?;
        }
        Ok(())
    }

    /// Neighbourhood width at step `m`, in ring units (circumference 1).
    pub fn sigma_at(&self, m: usize) -> f64 {
        SIGMA_START_SPACINGS / self.neurons as f64 * SIGMA_DECAY.powf(m as f64 / self.steps as f64)
    }
}

/// Built-in instance: five cities on a flat map in pixel coordinates.
pub fn barbarossa() -> TspProblem {
    TspProblem::from_coordinates(
        Space::euclidean(2).expect("2-D space"),
        &[
            ("Frankfurt", [201.0, -298.0]),
            ("Roma", [334.0, -708.0]),
            ("Jerusalem", [1100.0, -1095.0]),
            ("Gallipoli", [790.0, -772.0]),
            ("Buda", [540.0, -445.0]),
        ],
    )
    .expect("valid built-in problem")
}

/// Built-in instance: six capitals on the globe, lengths in kilometres.
pub fn obama() -> TspProblem {
    let mut p = TspProblem::from_coordinates(
        Space::geographic(),
        &[
            ("Washington D.C.", [38.0, -77.0]),
            ("Berlin", [52.0, 13.0]),
            ("Jerusalem", [31.0, 35.0]),
            ("Moskow", [55.0, 37.0]),
            ("Nairobi", [-1.0, 36.0]),
            ("Beijing", [39.0, 116.0]),
        ],
    )
    .expect("valid built-in problem");
    p.length_scale = EARTH_RADIUS_KM;
    p
}

/// Built-in instance: four galaxies in the Poincaré disk.
pub fn ksenu() -> TspProblem {
    TspProblem::from_coordinates(
        Space::poincare_ball(2).expect("2-D disk"),
        &[("Milky Way", [0.0, 0.0]), ("M31", [-0.4, 0.8]), ("NGC 6822", [0.1, 0.65]), ("Sombrero Galaxy", [-0.8, -0.4])],
    )
    .expect("valid built-in problem")
}

/// Looks up a built-in problem by name.
pub fn builtin(name: &str) -> Result<TspProblem> {
    match name.to_ascii_lowercase().as_str() {
        "barbarossa" => Ok(barbarossa()),
        "obama" => Ok(obama()),
        "ksenu" => Ok(ksenu()),
        other => Err(invalid(format!("unknown problem '{other}' (expected barbarossa, obama or ksenu)"))),
    }
}

/// A solved tour.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TspSolution {
    /// City indices in visiting order.
    pub order: Vec<usize>,
    /// Length of the leg leaving each city of `order` (scaled).
    pub legs: Vec<f64>,
    /// Closed-tour length (scaled).
    pub total_length: f64,
    /// Final neuron coordinates in ring order.
    pub path: Vec<Vec<f64>>,
    /// Winning neuron of each city (by city index).
    pub winners: Vec<usize>,
}

/// Canonical city order: by coordinates, so training does not depend on labels.
fn canonical_order(problem: &TspProblem) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..problem.cities.len()).collect();
    idx.sort_by(|&a, &b| {
        let (ca, cb) = (problem.cities[a].position.coords(), problem.cities[b].position.coords());
        ca.iter().zip(cb).map(|(x, y)| x.total_cmp(y)).find(|o| o.is_ne()).unwrap_or(std::cmp::Ordering::Equal)
    });
    idx
}

/// Point at distance `r` from `center` in direction `theta`.
fn offset_point(space: &Space, center: &[f64], r: f64, theta: f64) -> Result<Vec<f64>> {
    let (s, c) = theta.sin_cos();
    match space.model() {
        Model::EuclideanCartesian => Ok(vec![center[0] + r * c, center[1] + r * s]),
        Model::PoincareBall => {
            let t = (0.5 * r).tanh();
            Ok(mobius_add(center, &[t * c, t * s]))
        }
        Model::Geographic => {
            let u = geographic_to_unit(center[0], center[1]);
            let (slat, clat) = center[0].sin_cos();
            let (slon, clon) = center[1].sin_cos();
            let east = [-slon, clon, 0.0];
            let north = [-slat * clon, -slat * slon, clat];
            let (sr, cr) = r.sin_cos();
            let v: [f64; 3] = std::array::from_fn(|i| cr * u[i] + sr * (c * east[i] + s * north[i]));
            let (lat, lon) = unit_to_geographic(v);
            Ok(vec![lat, lon])
        }
        Model::HyperbolicSpherical => Err(GrisomError::Unsupported("tours in hyperbolic-spherical coordinates".into())),
    }
}

/// Initial ring: a small circle around the cities' geodesic mean.
fn initial_ring(problem: &TspProblem, order: &[usize]) -> Result<Vec<Point>> {
    let space = &problem.feature_space;
    let mut mean = StreamingMean::new(space.clone(), 1);
    for &i in order {
        mean.push(problem.cities[i].position.coords())?;
    }
    let center = mean.mean().to_vec();
    let spread = order.iter().map(|&i| space.dist(&center, problem.cities[i].position.coords())).fold(0.0, f64::max);
    let radius = INIT_RADIUS_FRACTION * spread.max(f64::MIN_POSITIVE);
    (0..problem.neurons)
        .map(|j| space.point(offset_point(space, &center, radius, TAU * j as f64 / problem.neurons as f64)?))
        .collect()
}

/// Trains the ring with `seed` and extracts the tour.
pub fn solve(problem: &TspProblem, seed: u64) -> Result<TspSolution> {
    problem.validate()?;
    let space = &problem.feature_space;
    let order = canonical_order(problem);
    let n = problem.neurons;
    let ring = Space::periodic_euclidean(vec![Some(1.0)])?;
    let map_points = (0..n).map(|j| Point::euclidean(vec![j as f64 / n as f64])).collect();
    let mut state = SomState::new(ring, map_points, space.clone(), initial_ring(problem, &order)?, NeighborhoodSpec::gauss(1.0)?)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for m in 0..problem.steps {
        let city = order[rng.random_range(0..order.len())];
        let spec = NeighborhoodSpec::gauss(problem.sigma_at(m))?;
        state.adapt_with(problem.cities[city].position.coords(), problem.epsilon, &spec)?;
    }
    let winners: Vec<usize> = problem.cities.iter().map(|c| state.find_winner(c.position.coords())).collect();
    let mut rank = vec![0; order.len()];
    for (r, &i) in order.iter().enumerate() {
        rank[i] = r;
    }
    let mut tour: Vec<usize> = (0..problem.cities.len()).collect();
    tour.sort_by_key(|&i| (winners[i], rank[i]));
    let legs: Vec<f64> = (0..tour.len())
        .map(|k| {
            let (a, b) = (tour[k], tour[(k + 1) % tour.len()]);
            problem.length_scale * space.dist(problem.cities[a].position.coords(), problem.cities[b].position.coords())
        })
        .collect();
    Ok(TspSolution {
        total_length: legs.iter().sum(),
        order: tour,
        legs,
        path: (0..n).map(|j| state.feature(j).to_vec()).collect(),
        winners,
    })
}

/// Space distance from `p` to the geodesic segment `a → b` (golden-section search on the parameter).
pub fn distance_to_segment(space: &Space, a: &[f64], b: &[f64], p: &[f64]) -> Result<f64> {
    const COARSE: usize = 256;
    let f = |t: f64| -> Result<f64> { Ok(space.dist(&space.geodesic_coords(a, b, t)?, p)) };
    let (mut best_t, mut best) = (0.0, f64::INFINITY);
    for i in 0..=COARSE {
        let t = i as f64 / COARSE as f64;
        let v = f(t)?;
        if v < best {
            best = v;
            best_t = t;
        }
    }
    let (mut lo, mut hi) = ((best_t - 1.0 / COARSE as f64).max(0.0), (best_t + 1.0 / COARSE as f64).min(1.0));
    let g = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..60 {
        let (x1, x2) = (hi - g * (hi - lo), lo + g * (hi - lo));
        if f(x1)? < f(x2)? {
            hi = x2;
        } else {
            lo = x1;
        }
    }
    Ok(best.min(f(0.5 * (lo + hi))?))
}

/// Largest distance (scaled) of any neuron from the nearest tour leg.
pub fn max_neuron_offset(problem: &TspProblem, solution: &TspSolution) -> Result<f64> {
    let space = &problem.feature_space;
    let k = solution.order.len();
    let mut worst: f64 = 0.0;
    for p in &solution.path {
        let mut nearest = f64::INFINITY;
        for i in 0..k {
            let a = problem.cities[solution.order[i]].position.coords();
            let b = problem.cities[solution.order[(i + 1) % k]].position.coords();
            nearest = nearest.min(distance_to_segment(space, a, b, p)?);
        }
        worst = worst.max(nearest);
    }
    Ok(worst * problem.length_scale)
}

/// Writes `tour.csv` (order, city, leg_length) and `path.csv` (neuron, coordinates) into `dir`.
pub fn write_tsp_outputs(dir: &Path, problem: &TspProblem, solution: &TspSolution) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let mut w = csv_writer(&dir.join("tour.csv"))?;
    w.write_record(["order", "city", "leg_length"])?;
    for (k, (&c, &leg)) in solution.order.iter().zip(&solution.legs).enumerate() {
        w.write_record([k.to_string(), problem.cities[c].name.clone(), format_float(leg)])?;
    }
    w.flush()?;
    let mut w = csv_writer(&dir.join("path.csv"))?;
    let dim = problem.feature_space.dimension();
    let mut header = vec!["neuron".to_string()];
    header.extend((0..dim).map(|i| format!("x{i}")));
    w.write_record(&header)?;
    for (j, p) in solution.path.iter().enumerate() {
        let mut rec = vec![j.to_string()];
        rec.extend(p.iter().map(|&c| format_float(c)));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}
