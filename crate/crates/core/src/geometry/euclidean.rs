//! Isometries of Euclidean space `x ↦ Q·x + t` with `Q` orthonormal.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// A Euclidean motion; reflections are carried by `det Q = −1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EuclideanIsometry {
    rotation: DMatrix<f64>,
    translation: DVector<f64>,
}

impl EuclideanIsometry {
    /// The identity in `dim` dimensions.
    pub fn identity(dim: usize) -> Self {
        Self { rotation: DMatrix::identity(dim, dim), translation: DVector::zeros(dim) }
    }

    /// Builds `x ↦ Q·x + t`; `Q` must be square and orthonormal within `1e−9`.
    pub fn new(rotation: DMatrix<f64>, translation: DVector<f64>) -> Result<Self> {
        let n = rotation.nrows();
        if rotation.ncols() != n || translation.len() != n {
            return Err(invalid("rotation must be square and match the translation length"));
        }
        let defect = (rotation.transpose() * &rotation - DMatrix::<f64>::identity(n, n)).amax();
        if !(defect <= 1e-9) {
            return Err(invalid(format!("matrix is not orthonormal (defect {defect:e})")));
        }
        Ok(Self { rotation, translation })
    }

    /// Pure translation by `offset`.
    pub fn translation(offset: &[f64]) -> Self {
        let n = offset.len();
        Self { rotation: DMatrix::identity(n, n), translation: DVector::from_column_slice(offset) }
    }

    /// Rotation by `angle` in the plane spanned by axes `i` and `j` (a Givens rotation).
    pub fn main_rotation(dim: usize, i: usize, j: usize, angle: f64) -> Result<Self> {
        if i >= dim || j >= dim || i == j {
            return Err(invalid(format!("main rotation axes ({i}, {j}) invalid in dimension {dim}")));
        }
        let mut q = DMatrix::identity(dim, dim);
        let (s, c) = angle.sin_cos();
        q[(i, i)] = c;
        q[(i, j)] = -s;
        q[(j, i)] = s;
        q[(j, j)] = c;
        Ok(Self { rotation: q, translation: DVector::zeros(dim) })
    }

    /// Planar rotation about the origin (dimension 2).
    pub fn rotation_2d(angle: f64) -> Self {
        Self::main_rotation(2, 0, 1, angle).expect("axes 0 and 1 exist in the plane")
    }

    /// Reflection negating every listed axis.
    pub fn main_reflection(dim: usize, axes: &[usize]) -> Result<Self> {
        let mut q = DMatrix::<f64>::identity(dim, dim);
        for &a in axes {
            if a >= dim {
                return Err(invalid(format!("reflection axis {a} invalid in dimension {dim}")));
            }
            q[(a, a)] = -q[(a, a)];
        }
        Ok(Self { rotation: q, translation: DVector::zeros(dim) })
    }

    /// Dimension of the space acted on.
    pub fn dimension(&self) -> usize {
        self.translation.len()
    }

    /// Orthonormal linear part.
    pub fn rotation_matrix(&self) -> &DMatrix<f64> {
        &self.rotation
    }

    /// Translation part (image of the origin).
    pub fn translation_vector(&self) -> &DVector<f64> {
        &self.translation
    }

    /// Applies the map to a coordinate slice of matching dimension.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let v = &self.rotation * DVector::from_column_slice(x) + &self.translation;
        v.iter().copied().collect()
    }

    /// Returns `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if self.dimension() != other.dimension() {
            return Err(invalid("cannot compose Euclidean isometries of different dimension"));
        }
        Ok(Self {
            rotation: &self.rotation * &other.rotation,
            translation: &self.rotation * &other.translation + &self.translation,
        })
    }

    /// Returns the inverse motion.
    pub fn inverse(&self) -> Self {
        let qt = self.rotation.transpose();
        let t = -(&qt * &self.translation);
        Self { rotation: qt, translation: t }
    }
}
