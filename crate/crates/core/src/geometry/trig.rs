//! Hyperbolic triangle laws and equidistant curves (curvature −1).

use std::f64::consts::PI;

use crate::error::{domain, Result};

fn check_side(name: &str, x: f64) -> Result<()> {
    if !(x >= 0.0 && x.is_finite()) {
        return Err(domain(format!("side {name} = {x} must be finite and nonnegative")));
    }
    Ok(())
}

fn check_angle_open(name: &str, x: f64) -> Result<()> {
    if !(x > 0.0 && x < PI) {
        return Err(domain(format!("angle {name} = {x} must lie in (0, π)")));
    }
    Ok(())
}

/// Side `c` opposite the angle `gamma` enclosed by sides `a` and `b`:
/// `cosh c = cosh a·cosh b − sinh a·sinh b·cos γ`.
///
/// Evaluated through the cancellation-free identity
/// `cosh c − 1 = 2 sinh²((a−b)/2) + 2 sinh a·sinh b·sin²(γ/2)`, so the
/// Euclidean small-triangle limit is exact to working precision. `γ` may take
/// the degenerate values `0` and `π`.
pub fn hyp_law_of_cosines_side(a: f64, b: f64, gamma: f64) -> Result<f64> {
    check_side("a", a)?;
    check_side("b", b)?;
    if !(0.0..=PI).contains(&gamma) {
        return Err(domain(format!("angle γ = {gamma} must lie in [0, π]")));
    }
    let half_diff = (0.5 * (a - b)).sinh();
    let half_gamma = (0.5 * gamma).sin();
    let x = 2.0 * half_diff * half_diff + 2.0 * a.sinh() * b.sinh() * half_gamma * half_gamma;
    if !(x >= 0.0) {
        return Err(domain("law of cosines yields cosh c < 1"));
    }
    if !x.is_finite() {
        return Err(domain("law of cosines overflows double precision"));
    }
    // cosh c − 1 = 2 sinh²(c/2)
    Ok(2.0 * (0.5 * x).sqrt().asinh())
}

/// Side opposite `gamma` in the triangle with angles `alpha`, `beta`, `gamma`:
/// `cosh c = (cos γ + cos α·cos β) / (sin α·sin β)`.
///
/// In hyperbolic geometry the three angles determine the triangle; they must
/// satisfy `α + β + γ < π` for the result to exist.
pub fn hyp_law_of_cosines_angle(alpha: f64, beta: f64, gamma: f64) -> Result<f64> {
    check_angle_open("α", alpha)?;
    check_angle_open("β", beta)?;
    check_angle_open("γ", gamma)?;
    let cosh_c = (gamma.cos() + alpha.cos() * beta.cos()) / (alpha.sin() * beta.sin());
    if !(cosh_c >= 1.0) {
        return Err(domain(format!("angles ({alpha}, {beta}, {gamma}) give cosh c = {cosh_c} < 1")));
    }
    Ok(cosh_c.acosh())
}

/// Side opposite `target_angle`, given the side `s_opposite` opposite `angle`:
/// `sinh r / sin(target) = sinh s / sin(angle)`.
pub fn hyp_law_of_sines_r(s_opposite: f64, angle: f64, target_angle: f64) -> Result<f64> {
    check_side("s", s_opposite)?;
    check_angle_open("angle", angle)?;
    check_angle_open("target", target_angle)?;
    Ok((s_opposite.sinh() * target_angle.sin() / angle.sin()).asinh())
}

/// Distance `r` from a point of a geodesic to the equidistant curve at distance
/// `d`, measured along a geodesic that leaves at angle `theta`:
/// `sinh r = sinh d / sin θ`.
pub fn equidistant_radius(theta: f64, d: f64) -> Result<f64> {
    check_angle_open("θ", theta)?;
    check_side("d", d)?;
    Ok((d.sinh() / theta.sin()).asinh())
}
