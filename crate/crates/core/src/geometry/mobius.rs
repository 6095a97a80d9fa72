//! Orientation-preserving and reversing isometries of the Poincaré disk written
//! in complex form, `z ↦ (a·g(z) + p) / (conj(p)·a·g(z) + 1)` with `|a| = 1`,
//! `|p| < 1` and `g` either the identity or complex conjugation.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// A disk isometry `T_{a,p,g}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MobiusIsometry {
    a: Complex64,
    p: Complex64,
    conj: bool,
}

impl MobiusIsometry {
    /// Builds `T_{a,p,g}`. `a` is normalized to unit modulus; `|p|` must be below one.
    pub fn new(a: Complex64, p: Complex64, conj: bool) -> Result<Self> {
        let norm = a.norm();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(domain("rotation factor must be a nonzero finite complex number"));
        }
        if !(p.norm() < 1.0) {
            return Err(domain(format!("translation parameter |p| = {} must be below 1", p.norm())));
        }
        Ok(Self { a: a / norm, p, conj })
    }

    /// The identity map.
    pub fn identity() -> Self {
        Self { a: Complex64::new(1.0, 0.0), p: Complex64::new(0.0, 0.0), conj: false }
    }

    /// Rotation about the origin by `angle` radians.
    pub fn rotation(angle: f64) -> Self {
        Self { a: Complex64::from_polar(1.0, angle), p: Complex64::new(0.0, 0.0), conj: false }
    }

    /// Translation mapping the origin onto `p`.
    pub fn translation(p: Complex64) -> Result<Self> {
        Self::new(Complex64::new(1.0, 0.0), p, false)
    }

    /// Translation that moves the origin a hyperbolic distance `dist` in direction `angle`.
    pub fn translation_by_distance(dist: f64, angle: f64) -> Result<Self> {
        let r = (0.5 * dist).tanh();
        Self::translation(Complex64::from_polar(r, angle))
    }

    /// Reflection in the real axis (complex conjugation).
    pub fn conjugation() -> Self {
        Self { a: Complex64::new(1.0, 0.0), p: Complex64::new(0.0, 0.0), conj: true }
    }

    /// Unit-modulus rotation factor `a`.
    pub fn rotation_factor(&self) -> Complex64 {
        self.a
    }

    /// Image of the origin, `p`.
    pub fn translation_part(&self) -> Complex64 {
        self.p
    }

    /// Whether the map reverses orientation.
    pub fn is_conjugating(&self) -> bool {
        self.conj
    }

    /// Applies the map to a complex point.
    pub fn apply_complex(&self, z: Complex64) -> Complex64 {
        let gz = if self.conj { z.conj() } else { z };
        let az = self.a * gz;
        (az + self.p) / (self.p.conj() * az + 1.0)
    }

    /// Applies the map to a point given as `[x, y]`.
    pub fn apply(&self, x: [f64; 2]) -> [f64; 2] {
        let w = self.apply_complex(Complex64::new(x[0], x[1]));
        [w.re, w.im]
    }

    /// Returns `self ∘ other`, i.e. the map applying `other` first.
    pub fn compose(&self, other: &Self) -> Self {
        // Conjugating first flips the parameters of the inner map.
        let (a2, p2) = if self.conj { (other.a.conj(), other.p.conj()) } else { (other.a, other.p) };
        let denom = self.p.conj() * self.a * p2 + 1.0;
        let p = (self.a * p2 + self.p) / denom;
        let a = (self.a * a2 + self.p * p2.conj() * a2) / denom;
        Self { a: a / a.norm(), p, conj: self.conj != other.conj }
    }

    /// Returns the inverse map.
    pub fn inverse(&self) -> Self {
        let g = Self { a: Complex64::new(1.0, 0.0), p: Complex64::new(0.0, 0.0), conj: self.conj };
        let rot = Self { a: self.a.conj(), p: Complex64::new(0.0, 0.0), conj: false };
        let trans = Self { a: Complex64::new(1.0, 0.0), p: -self.p, conj: false };
        g.compose(&rot.compose(&trans))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn quarter_turn_maps_real_axis_to_imaginary_axis() {
        let t = MobiusIsometry::rotation(std::f64::consts::FRAC_PI_2);
        let y = t.apply([0.5, 0.0]);
        assert_abs_diff_eq!(y[0], 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(y[1], 0.5, epsilon = 1e-15);
    }

    #[test]
    fn translation_then_inverse_is_identity() {
        let t = MobiusIsometry::translation(Complex64::new(0.3, 0.0)).unwrap();
        let id = t.compose(&t.inverse());
        let y = id.apply([0.2, 0.1]);
        assert_abs_diff_eq!(y[0], 0.2, epsilon = 1e-12);
        assert_abs_diff_eq!(y[1], 0.1, epsilon = 1e-12);
    }

    #[test]
    fn composition_matches_sequential_application_with_conjugations() {
        let t1 = MobiusIsometry::new(Complex64::from_polar(1.0, 0.7), Complex64::new(0.2, -0.4), true).unwrap();
        let t2 = MobiusIsometry::new(Complex64::from_polar(1.0, -1.9), Complex64::new(-0.5, 0.1), false).unwrap();
        for (c1, c2) in [(t1, t2), (t2, t1), (t1, t1), (t2, t2)] {
            let z = Complex64::new(0.13, -0.31);
            let direct = c1.apply_complex(c2.apply_complex(z));
            let composed = c1.compose(&c2).apply_complex(z);
            assert_abs_diff_eq!(direct.re, composed.re, epsilon = 1e-13);
            assert_abs_diff_eq!(direct.im, composed.im, epsilon = 1e-13);
        }
    }

    #[test]
    fn rejects_translation_outside_the_disk() {
        assert!(MobiusIsometry::translation(Complex64::new(1.0, 0.0)).is_err());
    }
}
