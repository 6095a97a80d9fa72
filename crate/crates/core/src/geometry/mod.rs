//! Points, spaces, metrics and geodesics for the Euclidean, hyperbolic and
//! spherical models.
//!
//! [`Space`] is the central type: it bundles a metric, a geodesic
//! interpolator and (where defined) the signed distance to the hyperplane
//! whose last coordinate vanishes. Hot loops use the slice-based methods
//! (`dist`, `distance_key`, `move_toward`); the [`Point`]-based methods
//! validate their inputs first.

mod ball;
mod euclidean;
mod isometry;
mod mobius;
mod trig;

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use serde::{Deserialize, Serialize};

pub use ball::{ball_geodesic, mobius_add, poincare_distance, BallIsometry, BallOp};
pub use euclidean::EuclideanIsometry;
pub use isometry::Isometry;
pub use mobius::MobiusIsometry;
pub use trig::{equidistant_radius, hyp_law_of_cosines_angle, hyp_law_of_cosines_side, hyp_law_of_sines_r};

use crate::error::{domain, invalid, GrisomError, Result};
use ball::{norm_sq, poincare_delta};

/// Coordinate model of a point or space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Model {
    /// Cartesian coordinates of flat space, optionally with periodic axes.
    EuclideanCartesian,
    /// Poincaré ball (disk in two dimensions) of curvature −1.
    PoincareBall,
    /// Geodesic polar coordinates `(r, φ, θ)` of three-dimensional hyperbolic space.
    HyperbolicSpherical,
    /// `(latitude, longitude)` in radians on the unit sphere.
    Geographic,
}

/// A coordinate tuple tagged with its model. Constructors enforce the model's
/// coordinate domain, so every `Point` is valid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Point {
    model: Model,
    coords: Vec<f64>,
}

impl Point {
    /// Cartesian point.
    pub fn euclidean(coords: impl Into<Vec<f64>>) -> Self {
        Self { model: Model::EuclideanCartesian, coords: coords.into() }
    }

    /// Poincaré-ball point; the Euclidean norm must be strictly below one.
    pub fn poincare(coords: impl Into<Vec<f64>>) -> Result<Self> {
        let coords = coords.into();
        let n2 = norm_sq(&coords);
        if !(n2 < 1.0) {
            return Err(domain(format!("Poincaré point has squared norm {n2} ≥ 1")));
        }
        Ok(Self { model: Model::PoincareBall, coords })
    }

    /// Hyperbolic point in geodesic polar coordinates; `θ` is reduced to `[0, 2π)`.
    pub fn hyperbolic_spherical(r: f64, phi: f64, theta: f64) -> Result<Self> {
        if !(r >= 0.0 && r.is_finite()) {
            return Err(domain(format!("radius r = {r} must be finite and nonnegative")));
        }
        if !(0.0..=PI).contains(&phi) {
            return Err(domain(format!("polar angle φ = {phi} must lie in [0, π]")));
        }
        if !theta.is_finite() {
            return Err(domain("azimuth θ must be finite"));
        }
        let mut theta = theta.rem_euclid(TAU);
        if theta >= TAU {
            theta = 0.0;
        }
        Ok(Self { model: Model::HyperbolicSpherical, coords: vec![r, phi, theta] })
    }

    /// Point on the unit sphere; longitude is reduced to `[−π, π)`.
    pub fn geographic(lat: f64, lon: f64) -> Result<Self> {
        if !(-FRAC_PI_2..=FRAC_PI_2).contains(&lat) {
            return Err(domain(format!("latitude {lat} must lie in [−π/2, π/2]")));
        }
        if !lon.is_finite() {
            return Err(domain("longitude must be finite"));
        }
        Ok(Self { model: Model::Geographic, coords: vec![lat, wrap_longitude(lon)] })
    }

    /// Geographic point from degrees.
    pub fn geographic_deg(lat: f64, lon: f64) -> Result<Self> {
        Self::geographic(lat.to_radians(), lon.to_radians())
    }

    /// Coordinate model.
    pub fn model(&self) -> Model {
        self.model
    }

    /// Number of coordinates.
    pub fn dimension(&self) -> usize {
        self.coords.len()
    }

    /// Raw coordinates.
    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    /// Consumes the point, returning its coordinates.
    pub fn into_coords(self) -> Vec<f64> {
        self.coords
    }
}

fn wrap_longitude(lon: f64) -> f64 {
    let l = (lon + PI).rem_euclid(TAU) - PI;
    if l >= PI {
        -PI
    } else {
        l
    }
}

/// Unit vector of a `(latitude, longitude)` pair.
pub fn geographic_to_unit(lat: f64, lon: f64) -> [f64; 3] {
    let (sl, cl) = lat.sin_cos();
    let (so, co) = lon.sin_cos();
    [cl * co, cl * so, sl]
}

/// `(latitude, longitude)` of a nonzero vector, longitude in `[−π, π)`.
pub fn unit_to_geographic(u: [f64; 3]) -> (f64, f64) {
    let lat = u[2].atan2(u[0].hypot(u[1]));
    (lat, wrap_longitude(u[1].atan2(u[0])))
}

fn central_angle(u: &[f64; 3], v: &[f64; 3]) -> f64 {
    let cross = [u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0]];
    let dot = u[0] * v[0] + u[1] * v[1] + u[2] * v[2];
    (cross[0] * cross[0] + cross[1] * cross[1] + cross[2] * cross[2]).sqrt().atan2(dot)
}

/// Converts geodesic polar coordinates to the Poincaré ball:
/// `u = tanh(r/2)·(sin φ cos θ, sin φ sin θ, cos φ)`.
pub fn to_poincare(p: &Point) -> Result<Point> {
    if p.model() != Model::HyperbolicSpherical {
        return Err(invalid("to_poincare expects a HyperbolicSpherical point"));
    }
    let (r, phi, theta) = (p.coords[0], p.coords[1], p.coords[2]);
    let rho = (0.5 * r).tanh();
    if rho >= 1.0 {
        return Err(GrisomError::Overflow(format!("radius {r} maps onto the ideal boundary in double precision")));
    }
    let (sp, cp) = phi.sin_cos();
    let (st, ct) = theta.sin_cos();
    Point::poincare(vec![rho * sp * ct, rho * sp * st, rho * cp])
}

/// Inverse of [`to_poincare`]; the origin maps to `(0, π/2, 0)`.
pub fn from_poincare(p: &Point) -> Result<Point> {
    if p.model() != Model::PoincareBall || p.dimension() != 3 {
        return Err(invalid("from_poincare expects a three-dimensional PoincareBall point"));
    }
    let u = &p.coords;
    let rho = norm_sq(u).sqrt();
    if rho == 0.0 {
        return Point::hyperbolic_spherical(0.0, FRAC_PI_2, 0.0);
    }
    let r = 2.0 * rho.atanh();
    let phi = (u[0].hypot(u[1])).atan2(u[2]);
    Point::hyperbolic_spherical(r, phi, u[1].atan2(u[0]))
}

/// An immutable metric space with geodesic interpolation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Space {
    model: Model,
    dimension: usize,
    periodic_wrap: Option<Vec<Option<f64>>>,
}

impl Space {
    /// Flat space of the given dimension.
    pub fn euclidean(dimension: usize) -> Result<Self> {
        if dimension == 0 {
            return Err(invalid("dimension must be at least 1"));
        }
        Ok(Self { model: Model::EuclideanCartesian, dimension, periodic_wrap: None })
    }

    /// Flat space in which axis `i` is periodic with period `periods[i]` when that entry is `Some`.
    pub fn periodic_euclidean(periods: Vec<Option<f64>>) -> Result<Self> {
        if periods.is_empty() {
            return Err(invalid("dimension must be at least 1"));
        }
        if let Some(bad) = periods.iter().flatten().find(|l| !(l.is_finite() && **l > 0.0)) {
            return Err(invalid(format!("period {bad} must be positive and finite")));
        }
        Ok(Self { model: Model::EuclideanCartesian, dimension: periods.len(), periodic_wrap: Some(periods) })
    }

    /// Poincaré ball of the given dimension.
    pub fn poincare_ball(dimension: usize) -> Result<Self> {
        if dimension == 0 {
            return Err(invalid("dimension must be at least 1"));
        }
        Ok(Self { model: Model::PoincareBall, dimension, periodic_wrap: None })
    }

    /// Unit sphere in geographic coordinates.
    pub fn geographic() -> Self {
        Self { model: Model::Geographic, dimension: 2, periodic_wrap: None }
    }

    /// Three-dimensional hyperbolic space in geodesic polar coordinates.
    pub fn hyperbolic_spherical() -> Self {
        Self { model: Model::HyperbolicSpherical, dimension: 3, periodic_wrap: None }
    }

    /// Coordinate model.
    pub fn model(&self) -> Model {
        self.model
    }

    /// Number of coordinates of a point.
    pub fn dimension(&self) -> usize {
        self.dimension
    }

    /// Per-axis periods of a periodic Euclidean space.
    pub fn periodic_wrap(&self) -> Option<&[Option<f64>]> {
        self.periodic_wrap.as_deref()
    }

    /// Builds a point of this space from raw coordinates, validating it.
    pub fn point(&self, coords: Vec<f64>) -> Result<Point> {
        if coords.len() != self.dimension {
            return Err(invalid(format!("expected {} coordinates, got {}", self.dimension, coords.len())));
        }
        match self.model {
            Model::EuclideanCartesian => Ok(Point::euclidean(coords)),
            Model::PoincareBall => Point::poincare(coords),
            Model::HyperbolicSpherical => Point::hyperbolic_spherical(coords[0], coords[1], coords[2]),
            Model::Geographic => Point::geographic(coords[0], coords[1]),
        }
    }

    /// Checks that `p` belongs to this space.
    pub fn check(&self, p: &Point) -> Result<()> {
        if p.model != self.model || p.dimension() != self.dimension {
            return Err(invalid(format!(
                "point in {:?}^{} does not belong to {:?}^{}",
                p.model,
                p.dimension(),
                self.model,
                self.dimension
            )));
        }
        Ok(())
    }

    /// Distance between two points of this space.
    pub fn distance(&self, a: &Point, b: &Point) -> Result<f64> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.dist(a.coords(), b.coords()))
    }

    /// Minimal-image displacement `b − a` of a periodic space (plain difference otherwise).
    #[inline]
    fn displacement(&self, a: &[f64], b: &[f64], i: usize) -> f64 {
        let d = b[i] - a[i];
        match &self.periodic_wrap {
            Some(w) => match w[i] {
                Some(l) => d - l * (d / l).round(),
                None => d,
            },
            None => d,
        }
    }

    /// Distance between raw coordinate slices assumed valid for this space.
    #[inline]
    pub fn dist(&self, a: &[f64], b: &[f64]) -> f64 {
        match self.model {
            Model::EuclideanCartesian => self.distance_key(a, b).sqrt(),
            Model::PoincareBall => poincare_distance(a, b),
            Model::Geographic => {
                central_angle(&geographic_to_unit(a[0], a[1]), &geographic_to_unit(b[0], b[1]))
            }
            Model::HyperbolicSpherical => {
                let (pa, pb) = (spherical_to_ball(a), spherical_to_ball(b));
                poincare_distance(&pa, &pb)
            }
        }
    }

    /// A strictly increasing function of [`Space::dist`] that is cheaper to
    /// evaluate; used for winner search.
    #[inline]
    pub fn distance_key(&self, a: &[f64], b: &[f64]) -> f64 {
        match self.model {
            Model::EuclideanCartesian => {
                if self.periodic_wrap.is_none() {
                    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
                } else {
                    (0..a.len()).map(|i| self.displacement(a, b, i).powi(2)).sum()
                }
            }
            Model::PoincareBall => poincare_delta(a, b),
            _ => self.dist(a, b),
        }
    }

    /// Point at parameter `t ∈ [0, 1]` on the geodesic from `a` to `b`.
    ///
    /// `t = 0` and `t = 1` return `a` and `b` exactly. When `a = b` the
    /// geodesic is degenerate and `a` is returned.
    pub fn geodesic_point(&self, a: &Point, b: &Point, t: f64) -> Result<Point> {
        self.check(a)?;
        self.check(b)?;
        if !(0.0..=1.0).contains(&t) {
            return Err(invalid(format!("geodesic parameter t = {t} must lie in [0, 1]")));
        }
        let coords = self.geodesic_coords(a.coords(), b.coords(), t)?;
        Ok(Point { model: self.model, coords })
    }

    /// Slice form of [`Space::geodesic_point`] without input validation.
    pub fn geodesic_coords(&self, a: &[f64], b: &[f64], t: f64) -> Result<Vec<f64>> {
        if t == 0.0 {
            return Ok(a.to_vec());
        }
        if t == 1.0 {
            return Ok(b.to_vec());
        }
        match self.model {
            Model::EuclideanCartesian => {
                Ok((0..a.len()).map(|i| a[i] + t * self.displacement(a, b, i)).collect())
            }
            Model::PoincareBall => Ok(ball_geodesic(a, b, t)),
            Model::Geographic => geographic_geodesic(a, b, t),
            Model::HyperbolicSpherical => {
                let (pa, pb) = (spherical_to_ball(a), spherical_to_ball(b));
                let m = Point { model: Model::PoincareBall, coords: ball_geodesic(&pa, &pb, t) };
                Ok(from_poincare(&m)?.coords)
            }
        }
    }

    /// Moves `w` in place to parameter `t` on the geodesic from `w` to `v`.
    #[inline]
    pub fn move_toward(&self, w: &mut [f64], v: &[f64], t: f64) -> Result<()> {
        if t == 0.0 {
            return Ok(());
        }
        if self.model == Model::EuclideanCartesian && t != 1.0 {
            for i in 0..w.len() {
                let d = self.displacement(w, v, i);
                w[i] += t * d;
            }
            return Ok(());
        }
        let y = self.geodesic_coords(w, v, t)?;
        w.copy_from_slice(&y);
        Ok(())
    }

    /// Signed distance of `p` to the hyperplane `{last coordinate = 0}`, with
    /// the sign of the last coordinate.
    ///
    /// The foot point is the geodesic midpoint of `p` and its mirror image in
    /// the hyperplane, which is exact for both supported models.
    pub fn signed_extra_dim_distance(&self, p: &Point) -> Result<f64> {
        self.check(p)?;
        self.signed_extra_dim_coords(p.coords())
    }

    /// Slice form of [`Space::signed_extra_dim_distance`].
    pub fn signed_extra_dim_coords(&self, p: &[f64]) -> Result<f64> {
        if self.dimension < 2 {
            return Err(invalid("extra-dimension distance needs dimension ≥ 2"));
        }
        let n = p.len() - 1;
        match self.model {
            Model::EuclideanCartesian => Ok(p[n]),
            Model::PoincareBall => {
                if p[n] == 0.0 {
                    return Ok(0.0);
                }
                let mut mirror = p.to_vec();
                mirror[n] = -p[n];
                let foot = ball_geodesic(p, &mirror, 0.5);
                Ok(poincare_distance(p, &foot).copysign(p[n]))
            }
            _ => Err(GrisomError::Unsupported(format!(
                "extra-dimension distance is not defined for {:?}",
                self.model
            ))),
        }
    }
}

fn spherical_to_ball(x: &[f64]) -> [f64; 3] {
    let rho = (0.5 * x[0]).tanh();
    let (sp, cp) = x[1].sin_cos();
    let (st, ct) = x[2].sin_cos();
    [rho * sp * ct, rho * sp * st, rho * cp]
}

fn geographic_geodesic(a: &[f64], b: &[f64], t: f64) -> Result<Vec<f64>> {
    let u = geographic_to_unit(a[0], a[1]);
    let v = geographic_to_unit(b[0], b[1]);
    let omega = central_angle(&u, &v);
    if omega == 0.0 {
        return Ok(a.to_vec());
    }
    if omega > PI - 1e-12 {
        return Err(GrisomError::AmbiguousGeodesic("antipodal points have no unique great circle".into()));
    }
    let so = omega.sin();
    let wa = ((1.0 - t) * omega).sin() / so;
    let wb = (t * omega).sin() / so;
    let m = [wa * u[0] + wb * v[0], wa * u[1] + wb * v[1], wa * u[2] + wb * v[2]];
    let (lat, lon) = unit_to_geographic(m);
    Ok(vec![lat, lon])
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn poincare_distance_example() {
        let s = Space::poincare_ball(2).unwrap();
        let a = Point::poincare(vec![0.0, 0.0]).unwrap();
        let b = Point::poincare(vec![0.5, 0.0]).unwrap();
        assert_eq!(s.distance(&a, &a).unwrap(), 0.0);
        let d = s.distance(&a, &b).unwrap();
        assert_relative_eq!(d, 2.0 * 0.5f64.atanh(), max_relative = 1e-14);
        assert_relative_eq!(d, (1.0 + 2.0 * 0.25 / 0.75f64).acosh(), max_relative = 1e-14);
    }

    #[test]
    fn washington_berlin() {
        let s = Space::geographic();
        let w = Point::geographic_deg(38.0, -77.0).unwrap();
        let b = Point::geographic_deg(52.0, 13.0).unwrap();
        let d = s.distance(&w, &b).unwrap();
        let oracle = (38f64.to_radians().sin() * 52f64.to_radians().sin()).acos();
        assert_relative_eq!(d, oracle, max_relative = 1e-12);
        assert_relative_eq!(d, 1.06426, epsilon = 1e-5);
    }

    #[test]
    fn rejects_boundary_and_mismatch() {
        assert!(matches!(Point::poincare(vec![1.0, 0.0]), Err(GrisomError::Domain(_))));
        let s = Space::poincare_ball(2).unwrap();
        let e = Point::euclidean(vec![0.0, 0.0]);
        assert!(matches!(s.distance(&e, &e), Err(GrisomError::InvalidArgument(_))));
    }

    #[test]
    fn euclidean_geodesic_is_linear() {
        let s = Space::euclidean(3).unwrap();
        let p = s
            .geodesic_point(&Point::euclidean(vec![0.0, 0.0, 0.0]), &Point::euclidean(vec![2.0, 0.0, 0.0]), 0.25)
            .unwrap();
        assert_eq!(p.coords(), &[0.5, 0.0, 0.0]);
    }

    #[test]
    fn periodic_wraps_to_nearest_image() {
        let s = Space::periodic_euclidean(vec![Some(1.0), Some(1.0), None]).unwrap();
        let a = [0.45, 0.0, 0.0];
        let b = [-0.45, 0.0, 0.3];
        assert_relative_eq!(s.dist(&a, &b), (0.01f64 + 0.09).sqrt(), max_relative = 1e-12);
        let m = s.geodesic_coords(&a, &b, 0.5).unwrap();
        assert_relative_eq!(m[0], 0.5, max_relative = 1e-12);
    }

    #[test]
    fn spherical_conversion_examples() {
        let o = to_poincare(&Point::hyperbolic_spherical(0.0, FRAC_PI_2, 0.0).unwrap()).unwrap();
        assert_eq!(o.coords(), &[0.0, 0.0, 0.0]);
        let p = to_poincare(&Point::hyperbolic_spherical(2.0, FRAC_PI_2, 0.0).unwrap()).unwrap();
        assert_relative_eq!(p.coords()[0], 1f64.tanh(), max_relative = 1e-15);
        assert!(p.coords()[1].abs() < 1e-16 && p.coords()[2].abs() < 1e-15);
        let far = Point::hyperbolic_spherical(40.0, 1.0, 1.0).unwrap();
        assert!(matches!(to_poincare(&far), Err(GrisomError::Overflow(_))));
    }

    #[test]
    fn extra_dim_distance() {
        let e = Space::euclidean(3).unwrap();
        assert_eq!(e.signed_extra_dim_distance(&Point::euclidean(vec![0.3, -0.2, 0.7])).unwrap(), 0.7);
        let b = Space::poincare_ball(3).unwrap();
        let d = b.signed_extra_dim_distance(&Point::poincare(vec![0.0, 0.0, 0.5]).unwrap()).unwrap();
        assert_relative_eq!(d, 2.0 * 0.5f64.atanh(), max_relative = 1e-13);
        let z = b.signed_extra_dim_distance(&Point::poincare(vec![0.3, 0.2, 0.0]).unwrap()).unwrap();
        assert_eq!(z, 0.0);
    }

    #[test]
    fn antipodal_is_ambiguous() {
        let s = Space::geographic();
        let a = Point::geographic(0.0, 0.0).unwrap();
        let b = Point::geographic(0.0, PI).unwrap();
        assert!(matches!(s.geodesic_point(&a, &b, 0.5), Err(GrisomError::AmbiguousGeodesic(_))));
    }
}
