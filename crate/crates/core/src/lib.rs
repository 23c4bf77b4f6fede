//! Detecting a planted star in `G(n, m)`.
//!
//! Exact samplers for the null and planted models, the exact likelihood ratio
//! and the max-degree test, hypergeometric numerics for vertex degrees, the
//! random energy model analogue, and a seeded Monte Carlo harness.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod graphmodels;
pub mod harness;
pub mod hypergeom;
pub mod logspace;
pub mod lrt;
pub mod rem;
pub mod special;
pub mod streams;

pub use error::{Error, Result};
pub use graphmodels::{DegreeVector, ModelParams, PlantedSample, Window};
pub use hypergeom::HypergeomParams;
pub use logspace::LogValue;
pub use lrt::{Decision, TestOutcome};
pub use rem::RemParams;
pub use special::Real;

pub type LogValue64 = LogValue<f64>;
pub type LogValue32 = LogValue<f32>;
