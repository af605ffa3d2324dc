//! Random nonlinear feature expansion: frozen i.i.d. weights and biases
//! with a fixed elementwise activation, the untrained first stage of the
//! pipeline.
//!
//! Weights are standard normal, biases uniform on [-1, 1], both drawn
//! from a ChaCha8 generator seeded explicitly, so a map is reproducible
//! bit-for-bit across builds and platforms.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{EltError, Result};
use crate::linalg::DataMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Activation {
    Tanh,
    Sigmoid,
    Identity,
}

impl Activation {
    #[inline]
    pub fn apply(self, v: f64) -> f64 {
        match self {
            Activation::Tanh => v.tanh(),
            Activation::Sigmoid => 1.0 / (1.0 + (-v).exp()),
            Activation::Identity => v,
        }
    }
}

impl fmt::Display for Activation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Activation::Tanh => "tanh",
            Activation::Sigmoid => "sigmoid",
            Activation::Identity => "identity",
        };
        f.write_str(s)
    }
}

impl FromStr for Activation {
    type Err = EltError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tanh" => Ok(Activation::Tanh),
            "sigmoid" => Ok(Activation::Sigmoid),
            "identity" => Ok(Activation::Identity),
            other => Err(EltError::InvalidArgument(format!(
                "unknown activation '{other}' (expected tanh, sigmoid or identity)"
            ))),
        }
    }
}

/// Frozen random projection mapping `input_dim` raw features to
/// `hidden_dim` nonlinear features.
#[derive(Debug, Clone)]
pub struct RandomFeatureMap {
    weights: DataMatrix,
    biases: Vec<f64>,
    activation: Activation,
    seed: u64,
}

impl RandomFeatureMap {
    /// Draws a fresh map: weights i.i.d. N(0, 1) in row-major order,
    /// then biases i.i.d. U[-1, 1], all from `ChaCha8Rng::seed_from_u64(seed)`.
    pub fn new(input_dim: usize, hidden_dim: usize, activation: Activation, seed: u64) -> Result<Self> {
        if input_dim == 0 || hidden_dim == 0 {
            return Err(EltError::InvalidArgument(format!(
                "feature map dimensions must be >= 1, got {input_dim}x{hidden_dim}"
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let values: Vec<f64> = (0..input_dim * hidden_dim)
            .map(|_| rng.sample(StandardNormal))
            .collect();
        let biases: Vec<f64> = (0..hidden_dim).map(|_| rng.gen_range(-1.0..=1.0)).collect();
        let weights = DataMatrix::from_vec(input_dim, hidden_dim, values)?;
        Ok(Self { weights, biases, activation, seed })
    }

    /// Rebuilds a map from stored parts (model loading, tests).
    pub fn from_parts(weights: DataMatrix, biases: Vec<f64>, activation: Activation, seed: u64) -> Result<Self> {
        if biases.len() != weights.cols() {
            return Err(EltError::Shape(format!(
                "{} biases for {} hidden units",
                biases.len(),
                weights.cols()
            )));
        }
        Ok(Self { weights, biases, activation, seed })
    }

    pub fn input_dim(&self) -> usize {
        self.weights.rows()
    }

    pub fn hidden_dim(&self) -> usize {
        self.weights.cols()
    }

    pub fn weights(&self) -> &DataMatrix {
        &self.weights
    }

    pub fn biases(&self) -> &[f64] {
        &self.biases
    }

    pub fn activation(&self) -> Activation {
        self.activation
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Computes `g(X W + b)` row by row.
    pub fn transform(&self, x: &DataMatrix) -> Result<DataMatrix> {
        if x.cols() != self.input_dim() {
            return Err(EltError::Shape(format!(
                "map expects {} input features, got {}",
                self.input_dim(),
                x.cols()
            )));
        }
        let mut out = x.matmul(&self.weights)?;
        for r in 0..out.rows() {
            for c in 0..out.cols() {
                let v = self.activation.apply(out.get(r, c) + self.biases[c]);
                out.set(r, c, v);
            }
        }
        Ok(out)
    }
}
