//! Extreme Learning Tree: a random nonlinear feature expansion feeding
//! an extremely randomized tree, whose one-hot leaf indices are read out
//! by an L2-regularized linear observer. Ships with ridge, ELM and CART
//! baselines and a repeated-split benchmark harness.

pub mod benchmark;
pub mod config;
pub mod dataset;
pub mod error;
pub mod feature_map;
pub mod linalg;
pub mod models;
pub mod observer;
pub mod seeds;
pub mod split;
pub mod surface;
pub mod tree;

pub use error::{EltError, Result};
