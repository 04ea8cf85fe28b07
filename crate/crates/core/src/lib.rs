//! Knowledge graph embedding with annular sectors in polar coordinates.
//!
//! Entities are points given by a modulus and a phase per dimension. Each
//! relation owns a head sector and a tail sector, and a triple scores well
//! when both of its (mutually bumped) entity points fall inside them.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod checkpoint;
pub mod data;
pub mod error;
pub mod eval;
pub mod geometry;
pub mod model;
pub mod parallel;
pub mod rng;
pub mod selftest;
pub mod synthetic;
pub mod training;

pub use data::{Dataset, Split, Triple, Vocabulary};
pub use error::{Error, Result};
pub use model::{init_params, AblationConfig, ModelParams, Norm};
pub use parallel::Workers;
pub use synthetic::{generate_pattern_kg, Pattern, PatternSpec};
pub use training::TrainConfig;
