#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod compare;
pub mod config;
pub mod engine;
pub mod error;
pub mod gas;
pub mod geometry;
pub mod riemann;
pub mod scalar;
pub mod wave;

pub use error::{Error, Result};
pub use scalar::Real;

pub type State = gas::State<f64>;
pub type Params = gas::SimilarityParams<f64>;
