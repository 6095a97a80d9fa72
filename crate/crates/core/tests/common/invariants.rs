//! Geometry invariants phrased as proptest properties, so that both the
//! `geometry` test suite and the acceptance runner can drive them.

use std::f64::consts::{FRAC_PI_2, PI};

use grisom::geometry::{
    equidistant_radius, from_poincare, geographic_to_unit, hyp_law_of_cosines_angle, hyp_law_of_cosines_side,
    hyp_law_of_sines_r, poincare_distance, to_poincare, unit_to_geographic, BallIsometry, EuclideanIsometry,
    MobiusIsometry,
};
use grisom::{Isometry, Point, Space};
use num_complex::Complex64;
use proptest::prelude::*;
use proptest::test_runner::TestCaseError;

/// Absolute-plus-relative tolerance for distances of order one.
pub const DIST_TOL: f64 = 1e-9;

/// Tolerance for transform round trips.
pub const ROUND_TRIP_TOL: f64 = 1e-10;

pub type Check = std::result::Result<(), TestCaseError>;

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
}

macro_rules! check_close {
    ($a:expr, $b:expr, $tol:expr, $what:expr) => {{
        let (a, b) = ($a, $b);
        prop_assert!(close(a, b, $tol), "{}: {} vs {} (diff {:e})", $what, a, b, (a - b).abs());
    }};
}

/// A point of the open unit disk with radius at most `max_r`.
pub fn disk_point(max_r: f64) -> impl Strategy<Value = [f64; 2]> {
    (0.0..max_r, -PI..PI).prop_map(|(r, t)| [r * t.cos(), r * t.sin()])
}

/// A point of the open unit 3-ball with radius at most `max_r`.
pub fn ball_point(max_r: f64) -> impl Strategy<Value = Vec<f64>> {
    (0.0..max_r, -1.0..1.0f64, -PI..PI).prop_map(|(r, c, t)| {
        let s = (1.0 - c * c).sqrt();
        vec![r * s * t.cos(), r * s * t.sin(), r * c]
    })
}

/// A random disk isometry `T_{a,p,g}`.
pub fn mobius_isometry() -> impl Strategy<Value = MobiusIsometry> {
    (-PI..PI, disk_point(0.8), any::<bool>()).prop_map(|(angle, p, conj)| {
        MobiusIsometry::new(Complex64::from_polar(1.0, angle), Complex64::new(p[0], p[1]), conj).unwrap()
    })
}

/// A random word of main rotations, reflections and translations of the 3-ball.
pub fn ball_isometry() -> impl Strategy<Value = BallIsometry> {
    let op = prop_oneof![
        (0usize..3, 1usize..3, -PI..PI)
            .prop_map(|(i, k, a)| BallIsometry::main_rotation(3, i, (i + k) % 3, a).unwrap()),
        (0usize..3).prop_map(|axis| BallIsometry::reflection(3, axis).unwrap()),
        ball_point(0.6).prop_map(|p| BallIsometry::translation(&p).unwrap()),
    ];
    prop::collection::vec(op, 1..6).prop_map(|ops| {
        ops.iter().fold(BallIsometry::identity(3), |acc, t| acc.compose(t).unwrap())
    })
}

/// A random rigid motion of 3-space.
pub fn euclidean_isometry() -> impl Strategy<Value = EuclideanIsometry> {
    (0usize..3, 1usize..3, -PI..PI, prop::collection::vec(-10.0..10.0f64, 3), any::<bool>()).prop_map(
        |(i, k, angle, shift, mirror)| {
            let mut t = EuclideanIsometry::main_rotation(3, i, (i + k) % 3, angle).unwrap();
            if mirror {
                t = t.compose(&EuclideanIsometry::main_reflection(3, &[i]).unwrap()).unwrap();
            }
            EuclideanIsometry::translation(&shift).compose(&t).unwrap()
        },
    )
}

/// `(latitude, longitude)` in radians.
pub fn geographic_coords() -> impl Strategy<Value = (f64, f64)> {
    (-1.55..1.55f64, -PI..PI)
}

/// Disk isometries preserve the hyperbolic distance.
pub fn disk_isometry_preserves_distance(t: &MobiusIsometry, a: [f64; 2], b: [f64; 2]) -> Check {
    check_close!(poincare_distance(&t.apply(a), &t.apply(b)), poincare_distance(&a, &b), DIST_TOL, "disk distance");
    Ok(())
}

/// Ball isometries preserve the hyperbolic distance.
pub fn ball_isometry_preserves_distance(t: &BallIsometry, a: &[f64], b: &[f64]) -> Check {
    check_close!(poincare_distance(&t.apply(a), &t.apply(b)), poincare_distance(a, b), DIST_TOL, "ball distance");
    Ok(())
}

/// Rigid motions preserve the Euclidean distance.
pub fn euclidean_isometry_preserves_distance(t: &EuclideanIsometry, a: &[f64], b: &[f64]) -> Check {
    let space = Space::euclidean(3).unwrap();
    check_close!(space.dist(&t.apply(a), &t.apply(b)), space.dist(a, b), DIST_TOL, "euclidean distance");
    Ok(())
}

/// `T⁻¹(T(x)) = x` for the model-tagged isometry wrapper, and `T∘T⁻¹ = id`.
pub fn isometry_inverse_round_trip(t: &BallIsometry, x: &[f64]) -> Check {
    let iso = Isometry::Ball(t.clone());
    let p = Point::poincare(x.to_vec()).unwrap();
    let back = iso.inverse().apply(&iso.apply(&p).unwrap()).unwrap();
    let composed = iso.compose(&iso.inverse()).unwrap().apply(&p).unwrap();
    for ((&b, &c), &xi) in back.coords().iter().zip(composed.coords()).zip(x) {
        check_close!(b, xi, ROUND_TRIP_TOL, "inverse round trip");
        check_close!(c, xi, ROUND_TRIP_TOL, "compose with inverse");
    }
    Ok(())
}

/// The geodesic point at parameter `t` splits the distance additively and
/// proportionally: `d(a, g) + d(g, b) = d(a, b)` and `d(a, g) = t·d(a, b)`.
pub fn geodesic_is_additive(space: &Space, a: &[f64], b: &[f64], t: f64) -> Check {
    let g = space.geodesic_coords(a, b, t).unwrap();
    let d = space.dist(a, b);
    let (da, db) = (space.dist(a, &g), space.dist(&g, b));
    check_close!(da + db, d, DIST_TOL, "geodesic additivity");
    check_close!(da, t * d, DIST_TOL, "geodesic proportionality");
    Ok(())
}

/// Geodesic polar coordinates survive the round trip through the Poincaré ball.
pub fn spherical_round_trip(r: f64, phi: f64, theta: f64) -> Check {
    let p = Point::hyperbolic_spherical(r, phi, theta).unwrap();
    let q = from_poincare(&to_poincare(&p).unwrap()).unwrap();
    let c = q.coords();
    check_close!(c[0], r, ROUND_TRIP_TOL, "r");
    check_close!(c[1], phi, ROUND_TRIP_TOL, "φ");
    let dtheta = (c[2] - theta + PI).rem_euclid(2.0 * PI) - PI;
    check_close!(dtheta, 0.0, ROUND_TRIP_TOL, "θ");
    // Distances agree between the two models.
    let origin = Point::hyperbolic_spherical(0.0, FRAC_PI_2, 0.0).unwrap();
    let d = Space::hyperbolic_spherical().distance(&origin, &p).unwrap();
    check_close!(d, r, DIST_TOL, "distance to origin");
    Ok(())
}

/// `(latitude, longitude)` survive the round trip through the unit sphere,
/// and the central angle matches the haversine formula.
pub fn geographic_round_trip(a: (f64, f64), b: (f64, f64)) -> Check {
    let (lat, lon) = unit_to_geographic(geographic_to_unit(a.0, a.1));
    check_close!(lat, a.0, ROUND_TRIP_TOL, "latitude");
    check_close!(lon, a.1, ROUND_TRIP_TOL, "longitude");
    let hav = |x: f64| (0.5 * x).sin().powi(2);
    let h = hav(b.0 - a.0) + a.0.cos() * b.0.cos() * hav(b.1 - a.1);
    let haversine = 2.0 * h.sqrt().min(1.0).asin();
    check_close!(Space::geographic().dist(&[a.0, a.1], &[b.0, b.1]), haversine, 1e-8, "haversine");
    Ok(())
}

/// The side law of cosines agrees with the disk metric on a triangle built
/// with one vertex at the origin.
pub fn law_of_cosines_matches_metric(a: f64, b: f64, gamma: f64) -> Check {
    let pa = [(0.5 * a).tanh(), 0.0];
    let pb = [(0.5 * b).tanh() * gamma.cos(), (0.5 * b).tanh() * gamma.sin()];
    check_close!(hyp_law_of_cosines_side(a, b, gamma).unwrap(), poincare_distance(&pa, &pb), DIST_TOL, "side");
    Ok(())
}

/// Degenerate angles give `|a − b|` and `a + b`; tiny triangles obey the
/// Euclidean law of cosines.
pub fn law_of_cosines_limits(a: f64, b: f64, gamma: f64) -> Check {
    check_close!(hyp_law_of_cosines_side(a, b, 0.0).unwrap(), (a - b).abs(), DIST_TOL, "γ = 0");
    check_close!(hyp_law_of_cosines_side(a, b, PI).unwrap(), a + b, DIST_TOL, "γ = π");
    let scale = 1e-5;
    let c = hyp_law_of_cosines_side(scale * a, scale * b, gamma).unwrap() / scale;
    let euclid = (a * a + b * b - 2.0 * a * b * gamma.cos()).max(0.0).sqrt();
    check_close!(c, euclid, 1e-8, "Euclidean limit");
    Ok(())
}

/// Sides obtained from the angles satisfy the side law of cosines and the law of sines.
pub fn angle_law_consistency(alpha: f64, beta: f64, gamma: f64) -> Check {
    let a = hyp_law_of_cosines_angle(beta, gamma, alpha).unwrap();
    let b = hyp_law_of_cosines_angle(gamma, alpha, beta).unwrap();
    let c = hyp_law_of_cosines_angle(alpha, beta, gamma).unwrap();
    check_close!(hyp_law_of_cosines_side(a, b, gamma).unwrap(), c, 1e-7, "angle vs side form");
    check_close!(hyp_law_of_sines_r(a, alpha, beta).unwrap(), b, 1e-7, "law of sines");
    Ok(())
}

/// A point at distance `equidistant_radius(θ, d)` from the origin in direction
/// `θ` has distance `d` from the real-axis geodesic; small `d` gives `d / sin θ`.
pub fn equidistant_matches_metric(theta: f64, d: f64) -> Check {
    let r = equidistant_radius(theta, d).unwrap();
    let rho = (0.5 * r).tanh();
    let disk = Space::poincare_ball(2).unwrap();
    let h = disk.signed_extra_dim_coords(&[rho * theta.cos(), rho * theta.sin()]).unwrap();
    check_close!(h, d, DIST_TOL, "equidistant");
    let eps = 1e-6;
    check_close!(equidistant_radius(theta, eps * d).unwrap() / eps, d / theta.sin(), 1e-6, "Euclidean limit");
    Ok(())
}
