//! Self-organizing maps on Euclidean, hyperbolic and spherical manifolds.
//!
//! The crate is organised in layers:
//!
//! * [`geometry`] — points, metrics, geodesics, isometries and trig laws;
//! * [`tessellation`] — regular Euclidean and hyperbolic tilings used as map spaces;
//! * [`sampling`] — uniform samplers on flat boxes, hyperbolic slabs and disk × strip products;
//! * [`som`] — winner search and geodesic adaptation;
//! * [`analysis`] — snapshot analyzers and stability sweeps;
//! * [`analytic`] — closed-form stability limits for regular flat maps;
//! * [`tsp`] — ring maps solving travelling-salesman problems on curved worlds.

// `!(x > 0.0)`-style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod analytic;
pub mod error;
pub mod geometry;
pub mod io;
pub mod sampling;
pub mod som;
pub mod tessellation;
pub mod tsp;

pub use error::{GrisomError, Result};
pub use geometry::{Isometry, Model, Point, Space};
