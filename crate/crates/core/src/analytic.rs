//! Closed-form stability limits of flat regular maps in a thin 3-D slab.
//!
//! Near the flat equilibrium each Fourier mode `k` of the extra-dimension
//! deviation fluctuates with variance `ε·D₃₃(k) / (2·Re B₃₃(k))`. For every
//! lattice and neighbourhood the denominator has the form `A − s²·C(k)`, so the
//! mode becomes unstable at `s(k) = √(A / C(k))` and the stability limit is
//! `s* = inf_k s(k)`. Lengths are in units of the map edge length.

use std::f64::consts::{E, PI};
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, GrisomError, Result};
use crate::tessellation::{generate_tiling_at_origin, SchlaefliSymbol, Truncation};

/// Neighbourhood regimes with closed-form limits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AnalyticNeighborhood {
    /// Gaussian with width much larger than the edge length.
    GaussLarge,
    /// Gaussian with width much smaller than the edge length.
    GaussSmall,
    /// Winner and nearest neighbours with equal weight.
    NN,
    /// Winner only.
    VQ,
}

impl AnalyticNeighborhood {
    /// All regimes in table order.
    pub const ALL: [AnalyticNeighborhood; 4] =
        [AnalyticNeighborhood::GaussLarge, AnalyticNeighborhood::GaussSmall, AnalyticNeighborhood::NN, AnalyticNeighborhood::VQ];
}

impl FromStr for AnalyticNeighborhood {
    type Err = GrisomError;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().replace(['-', '_'], "").as_str() {
            "GAUSSLARGE" => Ok(Self::GaussLarge),
            "GAUSSSMALL" => Ok(Self::GaussSmall),
            "NN" => Ok(Self::NN),
            "VQ" => Ok(Self::VQ),
            other => Err(invalid(format!("unknown analytic neighbourhood '{other}'"))),
        }
    }
}

impl fmt::Display for AnalyticNeighborhood {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::GaussLarge => "GaussLarge",
            Self::GaussSmall => "GaussSmall",
            Self::NN => "NN",
            Self::VQ => "VQ",
        })
    }
}

/// One lattice/neighbourhood combination.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnalyticCase {
    /// Euclidean symbol: (4,4), (3,6) or (6,3).
    pub map: SchlaefliSymbol,
    /// Neighbourhood regime.
    pub neighborhood: AnalyticNeighborhood,
    /// Gaussian width in edge units (used by [`AnalyticNeighborhood::GaussLarge`] only).
    pub sigma: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Lattice {
    Square,
    Triangular,
    Honeycomb,
}

impl AnalyticCase {
    /// Builds a case, rejecting non-Euclidean symbols and bad widths.
    pub fn new(map: SchlaefliSymbol, neighborhood: AnalyticNeighborhood, sigma: f64) -> Result<Self> {
        let case = Self { map, neighborhood, sigma };
        case.lattice()?;
        if neighborhood == AnalyticNeighborhood::GaussLarge && !(sigma > 0.0 && sigma.is_finite()) {
            return Err(invalid(format!("σ = {sigma} must be positive and finite")));
        }
        Ok(case)
    }

    fn lattice(&self) -> Result<Lattice> {
        match (self.map.p(), self.map.q()) {
            (4, 4) => Ok(Lattice::Square),
            (3, 6) => Ok(Lattice::Triangular),
            (6, 3) => Ok(Lattice::Honeycomb),
            _ => Err(GrisomError::Unsupported(format!("no closed-form stability limit for the {} map", self.map))),
        }
    }
}

/// `κ(k) = cos k₁ + cos k₂` of the square lattice.
pub fn kappa_square(k: [f64; 2]) -> f64 {
    k[0].cos() + k[1].cos()
}

/// `κ̃(k) = cos k₁ + cos(k₁/2 + √3/2·k₂) + cos(k₁/2 − √3/2·k₂)`, the lattice
/// sum over the six neighbours of the triangular lattice (halved).
pub fn kappa_triangular(k: [f64; 2]) -> f64 {
    let h = 0.5 * 3f64.sqrt() * k[1];
    k[0].cos() + (0.5 * k[0] + h).cos() + (0.5 * k[0] - h).cos()
}

/// Complex lattice sum over the three neighbours of a honeycomb node; its
/// real part equals [`kappa_triangular`].
pub fn kappa_honeycomb(k: [f64; 2]) -> Complex64 {
    let h = 0.5 * 3f64.sqrt() * k[1];
    Complex64::from_polar(1.0, k[0]) + Complex64::from_polar(1.0, -0.5 * k[0] + h) + Complex64::from_polar(1.0, -0.5 * k[0] - h)
}

/// Coefficients `(A, C(k))` of the denominator `A − s²·C(k)`.
fn denominator_terms(case: &AnalyticCase, k: [f64; 2]) -> Result<(f64, f64)> {
    let lattice = case.lattice()?;
    Ok(match case.neighborhood {
        AnalyticNeighborhood::GaussLarge => {
            let k2 = k[0] * k[0] + k[1] * k[1];
            (3.0, k2 * (-0.5 * k2 * case.sigma * case.sigma).exp())
        }
        AnalyticNeighborhood::GaussSmall | AnalyticNeighborhood::VQ => {
            let c = match lattice {
                Lattice::Square => 2.0 * (2.0 - kappa_square(k)),
                Lattice::Triangular | Lattice::Honeycomb => 4.0 / 3.0 * (3.0 - kappa_triangular(k)),
            };
            if case.neighborhood == AnalyticNeighborhood::GaussSmall {
                (3.0, c)
            } else {
                (1.0, c / 3.0)
            }
        }
        AnalyticNeighborhood::NN => match lattice {
            Lattice::Square => {
                let kap = kappa_square(k);
                (5.0, (1.0 + 2.0 * kap) * 2.0 / 3.0 * (2.0 - kap))
            }
            Lattice::Triangular => {
                let kap = kappa_triangular(k);
                (7.0, (1.0 + 2.0 * kap) * 4.0 / 9.0 * (3.0 - kap))
            }
            Lattice::Honeycomb => {
                let x = kappa_honeycomb(k).re;
                (4.0, (1.0 + x) * 4.0 / 9.0 * (3.0 - x))
            }
        },
    })
}

/// Denominator `A − s²·C(k)` of the mode variance (positive while the mode is stable).
pub fn stability_denominator(case: &AnalyticCase, k: [f64; 2], s: f64) -> Result<f64> {
    let (a, c) = denominator_terms(case, k)?;
    Ok(a - s * s * c)
}

/// Half-width at which mode `k` turns unstable, or `None` if it never does.
pub fn critical_s(case: &AnalyticCase, k: [f64; 2]) -> Result<Option<f64>> {
    let (a, c) = denominator_terms(case, k)?;
    Ok(if c > 0.0 { Some((a / c).sqrt()) } else { None })
}

/// Closed-form stability limit `s*` in edge units.
pub fn stability_limit(case: &AnalyticCase) -> Result<f64> {
    let lattice = case.lattice()?;
    Ok(match (case.neighborhood, lattice) {
        (AnalyticNeighborhood::GaussLarge, _) => case.sigma * (1.5 * E).sqrt(),
        (AnalyticNeighborhood::NN, Lattice::Square) => (12.0f64 / 5.0).sqrt(),
        (AnalyticNeighborhood::NN, Lattice::Triangular) => (18.0f64 / 7.0).sqrt(),
        (AnalyticNeighborhood::NN, Lattice::Honeycomb) => 1.5,
        (_, Lattice::Square) => (3.0f64 / 8.0).sqrt(),
        _ => 0.5f64.sqrt(),
    })
}

/// Variance of a mode amplitude, or the instability marker.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Fluctuation {
    /// `⟨û₃(k)²⟩` of a stable mode.
    Stable(f64),
    /// The denominator is not positive: the mode grows.
    Unstable,
}

/// `⟨û₃(k)²⟩ = ε·D₃₃ / (2·Re B₃₃)` for mode `k`, half-width `s` and learning rate `ε`.
pub fn fluctuation_u3(case: &AnalyticCase, k: [f64; 2], s: f64, epsilon: f64) -> Result<Fluctuation> {
    if !(s > 0.0 && epsilon > 0.0) {
        return Err(invalid("s and ε must be positive"));
    }
    let den = stability_denominator(case, k, s)?;
    if den <= 0.0 {
        return Ok(Fluctuation::Unstable);
    }
    let k2 = k[0] * k[0] + k[1] * k[1];
    let num = match case.neighborhood {
        AnalyticNeighborhood::GaussLarge | AnalyticNeighborhood::GaussSmall => {
            let sigma = case.sigma;
            PI * sigma * sigma * s * s * (-k2 * sigma * sigma).exp()
        }
        AnalyticNeighborhood::VQ => s * s / 6.0,
        AnalyticNeighborhood::NN => {
            let h2 = match case.lattice()? {
                Lattice::Square => (1.0 + 2.0 * kappa_square(k)).powi(2),
                Lattice::Triangular => (1.0 + 2.0 * kappa_triangular(k)).powi(2),
                Lattice::Honeycomb => (1.0 + kappa_honeycomb(k)).norm_sqr(),
            };
            s * s * h2 / 6.0
        }
    };
    Ok(Fluctuation::Stable(epsilon * num / den))
}

/// Result of the numeric search for the least stable mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NumericLimit {
    /// `inf_k s(k)`.
    pub s_star: f64,
    /// Minimizing wave vector.
    pub k: [f64; 2],
}

/// Points per axis of the coarse k-grid.
pub const K_GRID: usize = 512;

/// Minimizes `s(k)` on a `K_GRID × K_GRID` grid followed by a compass search.
///
/// The square lattice searches `[−π, π]²`, the hexagonal lattices the box
/// `[−4π/3, 4π/3]²` enclosing their Brillouin zone, and the continuum
/// Gaussian case `[−K, K]²` with `K = max(π, 4/σ)`.
pub fn numeric_stability_limit(case: &AnalyticCase) -> Result<NumericLimit> {
    let half = match (case.neighborhood, case.lattice()?) {
        (AnalyticNeighborhood::GaussLarge, _) => PI.max(4.0 / case.sigma),
        (_, Lattice::Square) => PI,
        // The hexagonal Brillouin zone reaches 4π/3 along k₁; [−π, π]² would miss its corners.
        _ => 4.0 * PI / 3.0,
    };
    let eval = |k: [f64; 2]| -> f64 { critical_s(case, k).ok().flatten().unwrap_or(f64::INFINITY) };
    let step = 2.0 * half / (K_GRID - 1) as f64;
    let (mut best, mut best_k) = (f64::INFINITY, [0.0, 0.0]);
    for i in 0..K_GRID {
        for j in 0..K_GRID {
            let k = [-half + i as f64 * step, -half + j as f64 * step];
            let v = eval(k);
            if v < best {
                best = v;
                best_k = k;
            }
        }
    }
    if !best.is_finite() {
        return Err(GrisomError::NoTransition(format!("no unstable mode found for {:?}", case)));
    }
    let mut h = step;
    while h > 1e-13 {
        let mut improved = false;
        for (dx, dy) in [(h, 0.0), (-h, 0.0), (0.0, h), (0.0, -h), (h, h), (-h, -h), (h, -h), (-h, h)] {
            let k = [(best_k[0] + dx).clamp(-half, half), (best_k[1] + dy).clamp(-half, half)];
            let v = eval(k);
            if v < best {
                best = v;
                best_k = k;
                improved = true;
            }
        }
        if !improved {
            h *= 0.5;
        }
    }
    Ok(NumericLimit { s_star: best, k: best_k })
}

/// One row of the analytic table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnalyticRow {
    /// Lattice.
    pub map: SchlaefliSymbol,
    /// `s*/σ` for the long-range Gaussian.
    pub gauss_large_per_sigma: f64,
    /// Short-range Gaussian limit.
    pub gauss_small: f64,
    /// Nearest-neighbour limit.
    pub nn: f64,
    /// Vector-quantization limit.
    pub vq: f64,
}

/// Stability limits of the three flat lattices.
pub fn analytic_table() -> Result<Vec<AnalyticRow>> {
    [(4, 4), (3, 6), (6, 3)]
        .into_iter()
        .map(|(p, q)| {
            let map = SchlaefliSymbol::new(p, q)?;
            let lim = |n| stability_limit(&AnalyticCase::new(map, n, 1.0)?);
            Ok(AnalyticRow {
                map,
                gauss_large_per_sigma: lim(AnalyticNeighborhood::GaussLarge)?,
                gauss_small: lim(AnalyticNeighborhood::GaussSmall)?,
                nn: lim(AnalyticNeighborhood::NN)?,
                vq: lim(AnalyticNeighborhood::VQ)?,
            })
        })
        .collect()
}

/// Per-cell centroid shifts in units of `s²·d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CentroidShifts {
    /// Cell of the displaced node.
    pub center: f64,
    /// Cells of its nearest neighbours, counter-clockwise from the +x axis.
    pub neighbors: Vec<f64>,
    /// In-plane positions of those neighbours.
    pub neighbor_positions: Vec<[f64; 2]>,
}

impl CentroidShifts {
    /// Mean of the neighbour coefficients.
    pub fn neighbor_mean(&self) -> f64 {
        self.neighbors.iter().sum::<f64>() / self.neighbors.len() as f64
    }
}

const ORACLE_BATCH: usize = 1 << 16;

/// Monte Carlo estimate of how the extra-dimension centroids of the Voronoi
/// cells move when one node of a unit-edge flat lattice is lifted by `d`.
///
/// Samples are uniform in a box around the lifted node times `[−s, s]`; the
/// perturbed and unperturbed tessellations are evaluated on the same samples,
/// so only samples that change cells contribute. Batches use independent
/// streams of `seed` and run in parallel.
pub fn centroid_shift_oracle(map: SchlaefliSymbol, s: f64, d: f64, samples: u64, seed: u64) -> Result<CentroidShifts> {
    let (circumradius, cell_area) = match (map.p(), map.q()) {
        (4, 4) => (0.5f64.sqrt(), 1.0),
        (3, 6) => (1.0 / 3f64.sqrt(), 0.5 * 3f64.sqrt()),
        (6, 3) => (1.0, 0.75 * 3f64.sqrt()),
        _ => return Err(GrisomError::Unsupported(format!("no centroid oracle for the {map} map"))),
    };
    if !(s > 0.0 && s.is_finite() && d.is_finite() && d.abs() <= 0.01) {
        return Err(invalid("need s > 0 and |d| ≤ 0.01 edge lengths"));
    }
    if samples == 0 {
        return Err(invalid("need at least one sample"));
    }
    let tiling = generate_tiling_at_origin(map, 1.0, Truncation::MaxRadius(3.0))?;
    let nodes: Vec<[f64; 2]> = tiling.nodes().iter().map(|p| [p.coords()[0], p.coords()[1]]).collect();
    let center = nodes
        .iter()
        .position(|n| n[0].hypot(n[1]) < 1e-9)
        .ok_or_else(|| GrisomError::InvalidState("lattice has no node at the origin".into()))?;
    let mut neighbors: Vec<usize> =
        (0..nodes.len()).filter(|&i| ((nodes[i][0].hypot(nodes[i][1])) - 1.0).abs() < 1e-6).collect();
    neighbors.sort_by(|&a, &b| {
        let ang = |i: usize| nodes[i][1].atan2(nodes[i][0]).rem_euclid(2.0 * PI - 1e-9);
        ang(a).total_cmp(&ang(b))
    });
    let others: Vec<(usize, [f64; 2])> = (0..nodes.len()).filter(|&i| i != center).map(|i| (i, nodes[i])).collect();
    let b = circumradius + 0.05;
    let batches = samples.div_ceil(ORACLE_BATCH as u64);
    let delta = (0..batches)
        .into_par_iter()
        .map(|batch| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(batch);
            let n = (samples - batch * ORACLE_BATCH as u64).min(ORACLE_BATCH as u64);
            let mut acc = vec![0.0; nodes.len()];
            for _ in 0..n {
                let x = [b * (2.0 * rng.random::<f64>() - 1.0), b * (2.0 * rng.random::<f64>() - 1.0)];
                let z = s * (2.0 * rng.random::<f64>() - 1.0);
                let (mut other, mut m) = (usize::MAX, f64::INFINITY);
                for &(i, p) in &others {
                    let dd = (x[0] - p[0]).powi(2) + (x[1] - p[1]).powi(2);
                    if dd < m {
                        m = dd;
                        other = i;
                    }
                }
                let r2 = x[0] * x[0] + x[1] * x[1];
                let before = r2 < m;
                let after = r2 - 2.0 * z * d + d * d < m;
                if before != after {
                    let sign = if after { 1.0 } else { -1.0 };
                    acc[center] += sign * z;
                    acc[other] -= sign * z;
                }
            }
            acc
        })
        .reduce(
            || vec![0.0; nodes.len()],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        );
    let expected_per_cell = samples as f64 * cell_area / (4.0 * b * b);
    let scale = if d == 0.0 { 0.0 } else { 1.0 / (expected_per_cell * s * s * d) };
    Ok(CentroidShifts {
        center: delta[center] * scale,
        neighbors: neighbors.iter().map(|&i| delta[i] * scale).collect(),
        neighbor_positions: neighbors.iter().map(|&i| nodes[i]).collect(),
    })
}
