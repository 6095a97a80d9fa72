//! Uniform sample distributions for stability experiments.
//!
//! * [`Distribution::EuclBox`] — independent uniforms on a Cartesian box.
//! * [`Distribution::HypSlab3D`] — uniform (w.r.t. hyperbolic volume) on the
//!   part of the hyperbolic slab `{dist(x, plane) ≤ s}` that projects onto the
//!   disk of radius `R` in the plane; emitted in Poincaré-ball coordinates.
//! * [`Distribution::HypDiskEuclStrip`] — uniform on a hyperbolic disk of
//!   radius `R` times a Euclidean interval `[−s, s]`; the disk coordinates are
//!   Poincaré coordinates reused as Cartesian ones.
//!
//! The slab radius `r` follows the unnormalized density (volume element
//! without the constant `4π`)
//!
//! ```text
//! ρ₁(r) = sinh² r                                        0 ≤ r ≤ s
//! ρ₂(r) = sinh s · sinh r                                s < r ≤ R
//! ρ₃(r) = sinh r · (sinh s − √(cosh² r / cosh² R − 1))   R < r ≤ R_max
//! ```
//!
//! with `cosh R_max = cosh s · cosh R`. The middle piece is drawn by exact
//! inversion, the outer pieces by rejection under piecewise-linear hulls.

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, GrisomError, Result};
use crate::geometry::{Point, Space};

/// Default number of knots of the piecewise-linear dominating densities.
pub const DEFAULT_KNOTS: usize = 32;

/// Relative inflation of the dominating hulls.
pub const HULL_INFLATION: f64 = 0.015;

/// Minimum acceptance rate tolerated by rejection sampling.
pub const MIN_ACCEPTANCE: f64 = 1e-3;

/// Proposals drawn before the acceptance rate is checked.
const WARM_UP: u64 = 1000;

/// A sample distribution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Distribution {
    /// Product of uniform intervals, one per axis; the last axis is the extra dimension.
    EuclBox {
        /// `(low, high)` per axis.
        intervals: Vec<(f64, f64)>,
    },
    /// Three-dimensional hyperbolic slab of half-width `s` over the disk of radius `radius`.
    HypSlab3D {
        /// Disk radius `R` (hyperbolic).
        radius: f64,
        /// Slab half-width `s` (hyperbolic), `s ≤ R`.
        s: f64,
        /// Knot count of each dominating hull.
        knots: usize,
    },
    /// Hyperbolic disk of radius `radius` times the Euclidean interval `[−s, s]`.
    HypDiskEuclStrip {
        /// Disk radius `R` (hyperbolic).
        radius: f64,
        /// Strip half-width `s` (Euclidean).
        s: f64,
    },
}

impl Distribution {
    /// Box with the given map-dimension intervals and `[−s, s]` appended as the extra axis.
    pub fn eucl_box(map_intervals: &[(f64, f64)], s: f64) -> Result<Self> {
        let mut intervals = map_intervals.to_vec();
        intervals.push((-s, s));
        let d = Distribution::EuclBox { intervals };
        d.validate()?;
        Ok(d)
    }

    /// Hyperbolic slab with the default knot count.
    pub fn hyp_slab(radius: f64, s: f64) -> Result<Self> {
        let d = Distribution::HypSlab3D { radius, s, knots: DEFAULT_KNOTS };
        d.validate()?;
        Ok(d)
    }

    /// Hyperbolic disk times a Euclidean strip.
    pub fn hyp_disk_strip(radius: f64, s: f64) -> Result<Self> {
        let d = Distribution::HypDiskEuclStrip { radius, s };
        d.validate()?;
        Ok(d)
    }

    /// Checks the parameters.
    pub fn validate(&self) -> Result<()> {
        match self {
            Distribution::EuclBox { intervals } => {
                if intervals.is_empty() {
                    return Err(invalid("box needs at least one axis"));
                }
                for &(lo, hi) in intervals {
                    if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
                        return Err(invalid(format!("invalid box interval [{lo}, {hi}]")));
                    }
                }
                Ok(())
            }
            Distribution::HypSlab3D { radius, s, knots } => {
                check_radius(*radius)?;
                if !(*s >= 0.0 && s <= radius) {
                    return Err(invalid(format!("slab half-width s = {s} must satisfy 0 ≤ s ≤ R = {radius}")));
                }
                if *knots < 2 {
                    return Err(invalid("dominating hulls need at least 2 knots"));
                }
                Ok(())
            }
            Distribution::HypDiskEuclStrip { radius, s } => {
                check_radius(*radius)?;
                if !(*s >= 0.0 && s.is_finite()) {
                    return Err(invalid(format!("strip half-width s = {s} must be finite and nonnegative")));
                }
                Ok(())
            }
        }
    }

    /// Dimension of the emitted points.
    pub fn dimension(&self) -> usize {
        match self {
            Distribution::EuclBox { intervals } => intervals.len(),
            _ => 3,
        }
    }

    /// Space the samples live in.
    pub fn space(&self) -> Result<Space> {
        match self {
            Distribution::HypSlab3D { .. } => Space::poincare_ball(3),
            _ => Space::euclidean(self.dimension()),
        }
    }
}

fn check_radius(r: f64) -> Result<()> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(invalid(format!("disk radius {r} must be positive and finite")));
    }
    if (0.5 * r).tanh() >= 1.0 {
        return Err(GrisomError::Overflow(format!("disk radius {r} reaches the ideal boundary")));
    }
    Ok(())
}

/// `R_max = acosh(cosh s · cosh R)`, the largest radius reached by the slab.
pub fn slab_max_radius(radius: f64, s: f64) -> f64 {
    (s.cosh() * radius.cosh()).acosh()
}

/// Unnormalized radial density of the slab, `ρ(r)` (zero outside `[0, R_max]`).
pub fn slab_radial_density(radius: f64, s: f64, r: f64) -> f64 {
    if r < 0.0 {
        0.0
    } else if r <= s {
        r.sinh().powi(2)
    } else if r <= radius {
        s.sinh() * r.sinh()
    } else {
        let c = r.cosh() / radius.cosh();
        let inner = (c * c - 1.0).max(0.0).sqrt();
        (r.sinh() * (s.sinh() - inner)).max(0.0)
    }
}

/// Masses `(F₁, F₂, F₃)` of the three radial pieces (closed forms).
pub fn slab_segment_masses(radius: f64, s: f64) -> [f64; 3] {
    let (sh, ch) = (s.sinh(), s.cosh());
    let f1 = 0.25 * ((2.0 * s).sinh() - 2.0 * s);
    let f2 = sh * (radius.cosh() - ch);
    // ∫ sinh r·√(cosh²r/C² − 1) dr over (R, R_max] = (C/2)(sinh s cosh s − s), C = cosh R.
    let f3 = radius.cosh() * (0.5 * sh * ch - sh + 0.5 * s);
    [f1, f2, f3.max(0.0)]
}

/// Unnormalized cumulative radial mass of the slab, `∫₀^r ρ`.
pub fn slab_radial_cdf(radius: f64, s: f64, r: f64) -> f64 {
    let [f1, f2, f3] = slab_segment_masses(radius, s);
    let r_max = slab_max_radius(radius, s);
    if r <= 0.0 {
        0.0
    } else if r <= s {
        0.25 * ((2.0 * r).sinh() - 2.0 * r)
    } else if r <= radius {
        f1 + s.sinh() * (r.cosh() - s.cosh())
    } else if r < r_max {
        let big_c = radius.cosh();
        let c = r.cosh();
        let root = (c * c - big_c * big_c).max(0.0).sqrt();
        let prim = 0.5 * (c * root - big_c * big_c * ((c + root) / big_c).ln()) / big_c;
        f1 + f2 + s.sinh() * (c - big_c) - prim
    } else {
        f1 + f2 + f3
    }
}

/// Piecewise-linear density on `[knots[0], knots[n−1]]`, sampled by exact inversion.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseLinear {
    knots: Vec<f64>,
    values: Vec<f64>,
    cumulative: Vec<f64>,
}

impl PiecewiseLinear {
    /// Builds the density from knot positions (strictly increasing) and nonnegative values.
    pub fn new(knots: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if knots.len() < 2 || knots.len() != values.len() {
            return Err(invalid("piecewise-linear density needs ≥ 2 knots and one value per knot"));
        }
        if knots.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(invalid("knots must be strictly increasing"));
        }
        if values.iter().any(|v| !(*v >= 0.0 && v.is_finite())) {
            return Err(invalid("density values must be finite and nonnegative"));
        }
        let mut cumulative = Vec::with_capacity(knots.len());
        cumulative.push(0.0);
        for i in 0..knots.len() - 1 {
            let area = 0.5 * (values[i] + values[i + 1]) * (knots[i + 1] - knots[i]);
            cumulative.push(cumulative[i] + area);
        }
        if !(cumulative[knots.len() - 1] > 0.0) {
            return Err(invalid("piecewise-linear density has zero mass"));
        }
        Ok(Self { knots, values, cumulative })
    }

    /// Hull dominating `f` on `[a, b]`: each knot carries the larger of the
    /// upper bounds of its two adjacent intervals (given by `interval_bound`),
    /// so the linear interpolant is at least the bound on every interval; the
    /// result is inflated by `1 + inflation`.
    pub fn dominating(
        a: f64,
        b: f64,
        knots: usize,
        inflation: f64,
        interval_bound: impl Fn(f64, f64) -> f64,
    ) -> Result<Self> {
        let n = knots.max(2);
        let xs: Vec<f64> = (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect();
        let bounds: Vec<f64> = xs.windows(2).map(|w| interval_bound(w[0], w[1])).collect();
        let values = (0..n)
            .map(|i| {
                let left = if i > 0 { bounds[i - 1] } else { 0.0 };
                let right = if i + 1 < n { bounds[i] } else { 0.0 };
                left.max(right) * (1.0 + inflation)
            })
            .collect();
        Self::new(xs, values)
    }

    /// Density value at `x` (zero outside the support).
    pub fn density(&self, x: f64) -> f64 {
        let n = self.knots.len();
        if x < self.knots[0] || x > self.knots[n - 1] {
            return 0.0;
        }
        let i = self.knots.partition_point(|&k| k <= x).clamp(1, n - 1) - 1;
        let t = (x - self.knots[i]) / (self.knots[i + 1] - self.knots[i]);
        self.values[i] + t * (self.values[i + 1] - self.values[i])
    }

    /// Total mass.
    pub fn total(&self) -> f64 {
        self.cumulative[self.cumulative.len() - 1]
    }

    /// Draws one variate.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let target = rng.random::<f64>() * self.total();
        let i = self.cumulative.partition_point(|&c| c <= target).clamp(1, self.knots.len() - 1) - 1;
        let (a, b) = (self.knots[i], self.knots[i + 1]);
        let (ga, gb) = (self.values[i], self.values[i + 1]);
        let area = self.cumulative[i + 1] - self.cumulative[i];
        let u = ((target - self.cumulative[i]) / area).clamp(0.0, 1.0);
        // Solve ga·t + (gb − ga)·t²/2 = u·(ga + gb)/2 for t ∈ [0, 1] without cancellation.
        let denom = ga + (ga * ga + u * (gb * gb - ga * ga)).max(0.0).sqrt();
        let t = if denom > 0.0 { (u * (ga + gb) / denom).clamp(0.0, 1.0) } else { u };
        a + (b - a) * t
    }
}

/// Proposal and acceptance counters of a rejection sampler.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RejectionStats {
    /// Candidates drawn.
    pub proposals: u64,
    /// Candidates accepted.
    pub accepted: u64,
}

impl RejectionStats {
    /// Fraction of accepted candidates (1 before any proposal).
    pub fn acceptance_rate(&self) -> f64 {
        if self.proposals == 0 {
            1.0
        } else {
            self.accepted as f64 / self.proposals as f64
        }
    }
}

/// Inversion method: returns `F⁻¹(U)` for a uniform `U`.
pub fn inverse_cdf_sample<R: Rng + ?Sized>(cdf_inverse: impl Fn(f64) -> f64, rng: &mut R) -> f64 {
    cdf_inverse(rng.random::<f64>())
}

/// Rejection method: draws `X` from `dominating`, accepts when `U·g(X) ≤ f(X)`.
///
/// Fails with [`GrisomError::Efficiency`] once the acceptance rate recorded in
/// `stats` has dropped below [`MIN_ACCEPTANCE`] after a warm-up period.
pub fn rejection_sample<R: Rng + ?Sized>(
    target_density: impl Fn(f64) -> f64,
    dominating: &PiecewiseLinear,
    rng: &mut R,
    stats: &mut RejectionStats,
) -> Result<f64> {
    loop {
        let x = dominating.sample(rng);
        let g = dominating.density(x);
        stats.proposals += 1;
        if rng.random::<f64>() * g <= target_density(x) {
            stats.accepted += 1;
            return Ok(x);
        }
        if stats.proposals >= WARM_UP && stats.acceptance_rate() < MIN_ACCEPTANCE {
            return Err(GrisomError::Efficiency(format!(
                "acceptance rate {:.2e} below {MIN_ACCEPTANCE:e}; the dominating density is misconfigured",
                stats.acceptance_rate()
            )));
        }
    }
}

/// Precomputed radial tables of the hyperbolic slab.
#[derive(Debug, Clone)]
struct SlabTables {
    radius: f64,
    s: f64,
    r_max: f64,
    masses: [f64; 3],
    inner_hull: Option<PiecewiseLinear>,
    outer_hull: Option<PiecewiseLinear>,
}

impl SlabTables {
    fn new(radius: f64, s: f64, knots: usize) -> Result<Self> {
        let r_max = slab_max_radius(radius, s);
        let masses = slab_segment_masses(radius, s);
        let inner_hull = if s > 0.0 {
            // sinh² is increasing: its maximum on [a, b] is at b.
            Some(PiecewiseLinear::dominating(0.0, s, knots, HULL_INFLATION, |_, b| b.sinh().powi(2))?)
        } else {
            None
        };
        let outer_hull = if s > 0.0 && r_max > radius {
            let (ss, cr) = (s.sinh(), radius.cosh());
            // sinh r·sinh s increases and the subtracted term increases, so
            // max on [a, b] ≤ sinh b·sinh s − sinh a·√(cosh²a/C² − 1).
            Some(PiecewiseLinear::dominating(radius, r_max, knots, HULL_INFLATION, move |a, b| {
                let c = a.cosh() / cr;
                b.sinh() * ss - a.sinh() * (c * c - 1.0).max(0.0).sqrt()
            })?)
        } else {
            None
        };
        Ok(Self { radius, s, r_max, masses, inner_hull, outer_hull })
    }
}

/// Seeded sample generator for a [`Distribution`].
///
/// The stream is ChaCha8 keyed by `seed` with stream number `stream`, so
/// `(seed, stream)` pairs give independent reproducible sequences.
#[derive(Debug, Clone)]
pub struct Sampler {
    dist: Distribution,
    rng: ChaCha8Rng,
    slab: Option<SlabTables>,
    stats: RejectionStats,
}

impl Sampler {
    /// Sampler on stream 0 of `seed`.
    pub fn new(dist: Distribution, seed: u64) -> Result<Self> {
        Self::with_stream(dist, seed, 0)
    }

    /// Sampler on stream `stream` of `seed`.
    pub fn with_stream(dist: Distribution, seed: u64, stream: u64) -> Result<Self> {
        dist.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        let slab = match &dist {
            Distribution::HypSlab3D { radius, s, knots } => Some(SlabTables::new(*radius, *s, *knots)?),
            _ => None,
        };
        Ok(Self { dist, rng, slab, stats: RejectionStats::default() })
    }

    /// The distribution sampled.
    pub fn distribution(&self) -> &Distribution {
        &self.dist
    }

    /// Rejection counters accumulated so far.
    pub fn stats(&self) -> RejectionStats {
        self.stats
    }

    /// Mutable access to the generator, e.g. for auxiliary random choices.
    pub fn rng_mut(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    /// Draws one point.
    pub fn sample(&mut self) -> Result<Point> {
        let mut out = vec![0.0; self.dist.dimension()];
        self.sample_into(&mut out)?;
        match self.dist {
            Distribution::HypSlab3D { .. } => Point::poincare(out),
            _ => Ok(Point::euclidean(out)),
        }
    }

    /// Draws one point into `out` (length = distribution dimension).
    pub fn sample_into(&mut self, out: &mut [f64]) -> Result<()> {
        match &self.dist {
            Distribution::EuclBox { intervals } => {
                for (o, &(lo, hi)) in out.iter_mut().zip(intervals) {
                    *o = lo + (hi - lo) * self.rng.random::<f64>();
                }
                Ok(())
            }
            Distribution::HypDiskEuclStrip { radius, s } => {
                let ch = radius.cosh() - 1.0;
                let r = inverse_cdf_sample(|u| (1.0 + u * ch).acosh(), &mut self.rng);
                let theta = TAU * self.rng.random::<f64>();
                let rho = (0.5 * r).tanh();
                out[0] = rho * theta.cos();
                out[1] = rho * theta.sin();
                out[2] = s * (2.0 * self.rng.random::<f64>() - 1.0);
                Ok(())
            }
            Distribution::HypSlab3D { .. } => self.sample_slab(out),
        }
    }

    fn sample_slab(&mut self, out: &mut [f64]) -> Result<()> {
        let tables = self.slab.as_ref().expect("slab tables exist for slab distributions");
        let (radius, s) = (tables.radius, tables.s);
        let theta = TAU * self.rng.random::<f64>();
        if s == 0.0 {
            // Degenerate slab: uniform on the hyperbolic disk inside the plane.
            let ch = radius.cosh() - 1.0;
            let r = inverse_cdf_sample(|u| (1.0 + u * ch).acosh(), &mut self.rng);
            let rho = (0.5 * r).tanh();
            out[0] = rho * theta.cos();
            out[1] = rho * theta.sin();
            out[2] = 0.0;
            return Ok(());
        }
        let [f1, f2, f3] = tables.masses;
        let pick = self.rng.random::<f64>() * (f1 + f2 + f3);
        let (r, cos_phi) = if pick < f1 {
            let hull = tables.inner_hull.as_ref().expect("inner hull exists for s > 0");
            let r = rejection_sample(|x| x.sinh().powi(2), hull, &mut self.rng, &mut self.stats)?;
            (r, 2.0 * self.rng.random::<f64>() - 1.0)
        } else if pick < f1 + f2 || tables.outer_hull.is_none() {
            let (cs, ss, cr) = (s.cosh(), s.sinh(), radius.cosh());
            let r = inverse_cdf_sample(|u| (cs + u * (cr - cs)).acosh(), &mut self.rng);
            let hi = (ss / r.sinh()).min(1.0);
            (r, hi * (2.0 * self.rng.random::<f64>() - 1.0))
        } else {
            let hull = tables.outer_hull.as_ref().expect("checked above");
            let r = rejection_sample(|x| slab_radial_density(radius, s, x), hull, &mut self.rng, &mut self.stats)?;
            let sr = r.sinh();
            let c = r.cosh() / radius.cosh();
            let lo = ((c * c - 1.0).max(0.0).sqrt() / sr).min(1.0);
            let hi = (s.sinh() / sr).min(1.0).max(lo);
            let mag = lo + (hi - lo) * self.rng.random::<f64>();
            let sign = if self.rng.random::<bool>() { 1.0 } else { -1.0 };
            (r.min(tables.r_max), sign * mag)
        };
        let rho = (0.5 * r).tanh();
        let sin_phi = (1.0 - cos_phi * cos_phi).max(0.0).sqrt();
        out[0] = rho * sin_phi * theta.cos();
        out[1] = rho * sin_phi * theta.sin();
        out[2] = rho * cos_phi;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn masses_match_cdf_limits() {
        let (radius, s) = (2.0, 1.0);
        let [f1, f2, f3] = slab_segment_masses(radius, s);
        assert_relative_eq!(slab_radial_cdf(radius, s, s), f1, max_relative = 1e-14);
        assert_relative_eq!(slab_radial_cdf(radius, s, radius), f1 + f2, max_relative = 1e-14);
        let rmax = slab_max_radius(radius, s);
        assert_relative_eq!(slab_radial_cdf(radius, s, rmax * (1.0 - 1e-12)), f1 + f2 + f3, max_relative = 1e-6);
        assert_relative_eq!(rmax, 2.44443, epsilon = 1e-5);
    }

    #[test]
    fn constant_hull_never_rejects() {
        let hull = PiecewiseLinear::new(vec![0.0, 1.0], vec![1.0, 1.0]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut stats = RejectionStats::default();
        for _ in 0..1000 {
            rejection_sample(|_| 1.0, &hull, &mut rng, &mut stats).unwrap();
        }
        assert_eq!(stats.proposals, stats.accepted);
    }

    #[test]
    fn identity_inverse() {
        let mut a = ChaCha8Rng::seed_from_u64(9);
        let mut b = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..10 {
            assert_eq!(inverse_cdf_sample(|u| u, &mut a), b.random::<f64>());
        }
    }

    #[test]
    fn bad_dominator_is_reported() {
        let hull = PiecewiseLinear::new(vec![0.0, 1.0], vec![1.0, 1.0]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut stats = RejectionStats::default();
        let r = (0..10_000).try_for_each(|_| rejection_sample(|x| 1e-6 * x, &hull, &mut rng, &mut stats).map(|_| ()));
        assert!(matches!(r, Err(GrisomError::Efficiency(_))));
    }

    #[test]
    fn slab_support() {
        let mut sm = Sampler::new(Distribution::hyp_slab(2.0, 1.0).unwrap(), 1).unwrap();
        let space = Space::poincare_ball(3).unwrap();
        let rmax = slab_max_radius(2.0, 1.0);
        for _ in 0..20_000 {
            let p = sm.sample().unwrap();
            let r = space.dist(&[0.0; 3], p.coords());
            assert!(r <= rmax * (1.0 + 1e-12));
            assert!(space.signed_extra_dim_coords(p.coords()).unwrap().abs() <= 1.0 + 1e-9);
        }
        assert!(sm.stats().acceptance_rate() > 0.85);
    }
}
