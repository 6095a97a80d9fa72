//! Model-tagged isometries acting on [`Point`]s.

use serde::{Deserialize, Serialize};

use super::ball::BallIsometry;
use super::euclidean::EuclideanIsometry;
use super::mobius::MobiusIsometry;
use super::{Model, Point};
use crate::error::{invalid, Result};

/// A distance-preserving map of one of the supported models.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Isometry {
    /// Euclidean motion of Cartesian space.
    Euclidean(EuclideanIsometry),
    /// Complex-form isometry of the Poincaré disk.
    Mobius(MobiusIsometry),
    /// Word of main rotations, reflections and translations of the Poincaré ball.
    Ball(BallIsometry),
}

impl Isometry {
    /// Model the isometry acts on.
    pub fn model(&self) -> Model {
        match self {
            Isometry::Euclidean(_) => Model::EuclideanCartesian,
            Isometry::Mobius(_) | Isometry::Ball(_) => Model::PoincareBall,
        }
    }

    /// Dimension of the space acted on.
    pub fn dimension(&self) -> usize {
        match self {
            Isometry::Euclidean(t) => t.dimension(),
            Isometry::Mobius(_) => 2,
            Isometry::Ball(t) => t.dimension(),
        }
    }

    /// Applies the isometry to raw coordinates of matching dimension.
    pub fn apply_coords(&self, x: &[f64]) -> Vec<f64> {
        match self {
            Isometry::Euclidean(t) => t.apply(x),
            Isometry::Mobius(t) => t.apply([x[0], x[1]]).to_vec(),
            Isometry::Ball(t) => t.apply(x),
        }
    }

    /// Applies the isometry to a point.
    pub fn apply(&self, p: &Point) -> Result<Point> {
        if p.model() != self.model() || p.dimension() != self.dimension() {
            return Err(invalid(format!(
                "isometry on {:?}^{} cannot act on a {:?}^{} point",
                self.model(),
                self.dimension(),
                p.model(),
                p.dimension()
            )));
        }
        let y = self.apply_coords(p.coords());
        match self.model() {
            Model::EuclideanCartesian => Ok(Point::euclidean(y)),
            _ => Point::poincare(y),
        }
    }

    /// Returns `self ∘ other` (apply `other` first).
    pub fn compose(&self, other: &Isometry) -> Result<Isometry> {
        match (self, other) {
            (Isometry::Euclidean(a), Isometry::Euclidean(b)) => Ok(Isometry::Euclidean(a.compose(b)?)),
            (Isometry::Mobius(a), Isometry::Mobius(b)) => Ok(Isometry::Mobius(a.compose(b))),
            (Isometry::Ball(a), Isometry::Ball(b)) => Ok(Isometry::Ball(a.compose(b)?)),
            (Isometry::Mobius(a), Isometry::Ball(b)) => {
                Ok(Isometry::Ball(BallIsometry::from_mobius(a).compose(b)?))
            }
            (Isometry::Ball(a), Isometry::Mobius(b)) => {
                Ok(Isometry::Ball(a.compose(&BallIsometry::from_mobius(b))?))
            }
            _ => Err(invalid("cannot compose isometries of different models")),
        }
    }

    /// Returns the inverse isometry.
    pub fn inverse(&self) -> Isometry {
        match self {
            Isometry::Euclidean(t) => Isometry::Euclidean(t.inverse()),
            Isometry::Mobius(t) => Isometry::Mobius(t.inverse()),
            Isometry::Ball(t) => Isometry::Ball(t.inverse()),
        }
    }
}

impl From<EuclideanIsometry> for Isometry {
    fn from(t: EuclideanIsometry) -> Self {
        Isometry::Euclidean(t)
    }
}

impl From<MobiusIsometry> for Isometry {
    fn from(t: MobiusIsometry) -> Self {
        Isometry::Mobius(t)
    }
}

impl From<BallIsometry> for Isometry {
    fn from(t: BallIsometry) -> Self {
        Isometry::Ball(t)
    }
}
