//! The n-dimensional Poincaré ball: distance, isometries built from main
//! rotations, axis reflections and Möbius translations, and geodesic
//! interpolation by reduction to a two-dimensional disk.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::mobius::MobiusIsometry;
use crate::error::{domain, invalid, Result};

/// Squared Euclidean norm.
#[inline]
pub(crate) fn norm_sq(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum()
}

/// `‖a − b‖² / ((1 − ‖a‖²)(1 − ‖b‖²))`, which equals `sinh²(d/2)`.
#[inline]
pub(crate) fn poincare_delta(a: &[f64], b: &[f64]) -> f64 {
    let diff: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
    diff / ((1.0 - norm_sq(a)) * (1.0 - norm_sq(b)))
}

/// Hyperbolic distance between two points of the ball.
///
/// Evaluated as `2·asinh(√δ)`, which is algebraically identical to
/// `acosh(1 + 2δ)` but keeps full relative precision for nearby points.
#[inline]
pub fn poincare_distance(a: &[f64], b: &[f64]) -> f64 {
    2.0 * poincare_delta(a, b).sqrt().asinh()
}

/// Möbius (gyrovector) addition `a ⊕ x`, the ball translation taking the origin to `a`.
pub fn mobius_add(a: &[f64], x: &[f64]) -> Vec<f64> {
    let ax: f64 = a.iter().zip(x).map(|(u, v)| u * v).sum();
    let aa = norm_sq(a);
    let xx = norm_sq(x);
    let ca = 1.0 + 2.0 * ax + xx;
    let cx = 1.0 - aa;
    let den = 1.0 + 2.0 * ax + aa * xx;
    a.iter().zip(x).map(|(u, v)| (ca * u + cx * v) / den).collect()
}

/// Elementary ball isometry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum BallOp {
    /// Rotation by `angle` in the plane of axes `i`, `j`:
    /// `x_i ← cos·x_i − sin·x_j`, `x_j ← sin·x_i + cos·x_j`.
    MainRotation { i: usize, j: usize, angle: f64 },
    /// Reflection negating one axis.
    Reflection { axis: usize },
    /// Möbius translation taking the origin to `p`.
    Translation { p: Vec<f64> },
}

impl BallOp {
    fn apply_in_place(&self, x: &mut Vec<f64>) {
        match self {
            BallOp::MainRotation { i, j, angle } => rotate_in_place(x, *i, *j, *angle),
            BallOp::Reflection { axis } => x[*axis] = -x[*axis],
            BallOp::Translation { p } => *x = mobius_add(p, x),
        }
    }

    fn inverse(&self) -> BallOp {
        match self {
            BallOp::MainRotation { i, j, angle } => BallOp::MainRotation { i: *i, j: *j, angle: -angle },
            BallOp::Reflection { axis } => BallOp::Reflection { axis: *axis },
            BallOp::Translation { p } => BallOp::Translation { p: p.iter().map(|v| -v).collect() },
        }
    }
}

#[inline]
fn rotate_in_place(x: &mut [f64], i: usize, j: usize, angle: f64) {
    let (s, c) = angle.sin_cos();
    let (xi, xj) = (x[i], x[j]);
    x[i] = c * xi - s * xj;
    x[j] = s * xi + c * xj;
}

/// Rotates so that `x[i]` becomes zero and `x[i+1]` becomes `hypot(x[i], x[i+1]) ≥ 0`;
/// returns the rotation angle `atan2(x[i], x[i+1])`.
#[inline]
fn sweep_axis(x: &mut [f64], i: usize) -> f64 {
    let angle = x[i].atan2(x[i + 1]);
    let h = x[i].hypot(x[i + 1]);
    x[i] = 0.0;
    x[i + 1] = h;
    angle
}

/// A ball isometry stored as a word of elementary operations (first entry applied first).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BallIsometry {
    dim: usize,
    ops: Vec<BallOp>,
}

impl BallIsometry {
    /// Identity of the `dim`-ball.
    pub fn identity(dim: usize) -> Self {
        Self { dim, ops: Vec::new() }
    }

    /// Main rotation in the plane of axes `i` and `j`.
    pub fn main_rotation(dim: usize, i: usize, j: usize, angle: f64) -> Result<Self> {
        if i >= dim || j >= dim || i == j {
            return Err(invalid(format!("main rotation axes ({i}, {j}) invalid in dimension {dim}")));
        }
        Ok(Self { dim, ops: vec![BallOp::MainRotation { i, j, angle }] })
    }

    /// Reflection negating axis `axis`.
    pub fn reflection(dim: usize, axis: usize) -> Result<Self> {
        if axis >= dim {
            return Err(invalid(format!("reflection axis {axis} invalid in dimension {dim}")));
        }
        Ok(Self { dim, ops: vec![BallOp::Reflection { axis }] })
    }

    /// Möbius translation taking the origin to `p` (`‖p‖ < 1`).
    pub fn translation(p: &[f64]) -> Result<Self> {
        if !(norm_sq(p) < 1.0) {
            return Err(domain("translation target must lie inside the unit ball"));
        }
        Ok(Self { dim: p.len(), ops: vec![BallOp::Translation { p: p.to_vec() }] })
    }

    /// Embeds a disk isometry acting on the plane of the first two axes.
    pub fn from_mobius(t: &MobiusIsometry) -> Self {
        let mut ops = Vec::with_capacity(3);
        if t.is_conjugating() {
            ops.push(BallOp::Reflection { axis: 1 });
        }
        ops.push(BallOp::MainRotation { i: 0, j: 1, angle: t.rotation_factor().arg() });
        let p = t.translation_part();
        ops.push(BallOp::Translation { p: vec![p.re, p.im] });
        Self { dim: 2, ops }
    }

    /// Dimension of the ball acted on.
    pub fn dimension(&self) -> usize {
        self.dim
    }

    /// The elementary operations, first-applied first.
    pub fn ops(&self) -> &[BallOp] {
        &self.ops
    }

    /// Applies the isometry to a coordinate slice.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut y = x.to_vec();
        for op in &self.ops {
            op.apply_in_place(&mut y);
        }
        y
    }

    /// Returns `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(invalid("cannot compose ball isometries of different dimension"));
        }
        let mut ops = other.ops.clone();
        ops.extend(self.ops.iter().cloned());
        Ok(Self { dim: self.dim, ops })
    }

    /// Returns the inverse isometry.
    pub fn inverse(&self) -> Self {
        Self { dim: self.dim, ops: self.ops.iter().rev().map(BallOp::inverse).collect() }
    }
}

/// Point at parameter `t` on the geodesic from `a` to `b` in the Poincaré ball.
///
/// Both points are swept by main rotations into the plane of the last two
/// axes (`a` onto the last axis), `a` is translated to the origin, the image
/// of `b` is rescaled to Poincaré radius `tanh(t·d/2)`, and every transform
/// is undone. `t = 0` and `t = 1` return the endpoints bit-for-bit.
pub fn ball_geodesic(a: &[f64], b: &[f64], t: f64) -> Vec<f64> {
    if t == 0.0 {
        return a.to_vec();
    }
    if t == 1.0 {
        return b.to_vec();
    }
    if a.len() == 1 {
        let y = ball_geodesic(&[a[0], 0.0], &[b[0], 0.0], t);
        return vec![y[0]];
    }
    let n = a.len();
    let dist = poincare_distance(a, b);
    if dist == 0.0 {
        return a.to_vec();
    }
    let mut angles: Vec<(usize, f64)> = Vec::with_capacity(2 * n);
    let mut p1 = a.to_vec();
    let mut p2 = b.to_vec();
    for i in 0..n - 1 {
        let angle = sweep_axis(&mut p1, i);
        rotate_in_place(&mut p2, i, i + 1, angle);
        angles.push((i, angle));
    }
    for i in 0..n - 2 {
        let angle = sweep_axis(&mut p2, i);
        angles.push((i, angle));
    }
    let pp1 = Complex64::new(p1[n - 2], p1[n - 1]);
    let pp2 = Complex64::new(p2[n - 2], p2[n - 1]);
    let mut w = (pp2 - pp1) / (-pp1.conj() * pp2 + 1.0);
    let modulus = w.norm();
    if modulus == 0.0 {
        return a.to_vec();
    }
    w *= (0.5 * t * dist).tanh() / modulus;
    let w = (w + pp1) / (pp1.conj() * w + 1.0);
    p2[n - 2] = w.re;
    p2[n - 1] = w.im;
    for &(i, angle) in angles.iter().rev() {
        rotate_in_place(&mut p2, i, i + 1, -angle);
    }
    p2
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    /// Independent closed form: `a ⊕ (tanh(t·atanh‖u‖)/‖u‖ · u)` with `u = (−a) ⊕ b`.
    fn gyro_geodesic(a: &[f64], b: &[f64], t: f64) -> Vec<f64> {
        let neg: Vec<f64> = a.iter().map(|v| -v).collect();
        let u = mobius_add(&neg, b);
        let r = norm_sq(&u).sqrt();
        let scale = (t * r.atanh()).tanh() / r;
        let v: Vec<f64> = u.iter().map(|x| x * scale).collect();
        mobius_add(a, &v)
    }

    #[test]
    fn origin_to_half_midpoint() {
        let m = ball_geodesic(&[0.0, 0.0], &[0.5, 0.0], 0.5);
        assert_relative_eq!(m[0], (3f64.ln() / 4.0).tanh(), max_relative = 1e-12);
        assert!(m[1].abs() < 1e-15);
    }

    #[test]
    fn agrees_with_gyrovector_formula_in_three_dimensions() {
        let a = [0.3, -0.2, 0.5];
        let b = [-0.6, 0.1, -0.35];
        for &t in &[0.1, 0.37, 0.5, 0.9] {
            let x = ball_geodesic(&a, &b, t);
            let y = gyro_geodesic(&a, &b, t);
            for k in 0..3 {
                assert_relative_eq!(x[k], y[k], epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn distance_matches_arccosh_form() {
        let a = [0.1, 0.2, -0.3];
        let b = [-0.4, 0.0, 0.25];
        let delta = poincare_delta(&a, &b);
        assert_relative_eq!(poincare_distance(&a, &b), (1.0 + 2.0 * delta).acosh(), max_relative = 1e-13);
    }

    #[test]
    fn isometry_word_inverse_roundtrip() {
        let t = BallIsometry::translation(&[0.2, -0.1, 0.3])
            .unwrap()
            .compose(&BallIsometry::main_rotation(3, 0, 2, 0.8).unwrap())
            .unwrap()
            .compose(&BallIsometry::reflection(3, 1).unwrap())
            .unwrap();
        let x = [0.05, 0.4, -0.2];
        let y = t.inverse().apply(&t.apply(&x));
        for k in 0..3 {
            assert_relative_eq!(x[k], y[k], epsilon = 1e-14);
        }
    }

    #[test]
    fn mobius_embedding_matches_complex_form() {
        let m = MobiusIsometry::new(Complex64::from_polar(1.0, 1.1), Complex64::new(0.3, -0.2), true).unwrap();
        let b = BallIsometry::from_mobius(&m);
        let x = [0.25, 0.4];
        let y1 = m.apply(x);
        let y2 = b.apply(&x);
        assert_relative_eq!(y1[0], y2[0], epsilon = 1e-14);
        assert_relative_eq!(y1[1], y2[1], epsilon = 1e-14);
    }
}
