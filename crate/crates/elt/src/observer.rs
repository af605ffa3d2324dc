//! Leaf one-hot encoding and the ridge-fitted linear observer that maps
//! leaf memberships to class scores. Prediction is argmax with ties
//! broken toward the lowest class index.

use crate::error::{EltError, Result};
use crate::linalg::{ridge_solve, DataMatrix, RidgeSolution};

/// n x width indicator matrix, one 1.0 per row.
#[derive(Debug, Clone)]
pub struct OneHotEncoding {
    width: usize,
    matrix: DataMatrix,
}

impl OneHotEncoding {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn matrix(&self) -> &DataMatrix {
        &self.matrix
    }
}

/// Encodes `indices` into an n x width indicator matrix.
pub fn one_hot(indices: &[usize], width: usize) -> Result<OneHotEncoding> {
    let mut matrix = DataMatrix::zeros(indices.len(), width);
    for (r, &idx) in indices.iter().enumerate() {
        if idx >= width {
            return Err(EltError::InvalidArgument(format!(
                "index {idx} at row {r} exceeds one-hot width {width}"
            )));
        }
        matrix.set(r, idx, 1.0);
    }
    Ok(OneHotEncoding { width, matrix })
}

/// Class labels together with their one-hot form.
#[derive(Debug, Clone)]
pub struct ClassTargets {
    class_count: usize,
    labels: Vec<usize>,
    one_hot: DataMatrix,
}

impl ClassTargets {
    pub fn new(labels: Vec<usize>, class_count: usize) -> Result<Self> {
        let enc = one_hot(&labels, class_count)?;
        Ok(Self { class_count, labels, one_hot: enc.matrix })
    }

    /// Infers the class count as max label + 1.
    pub fn from_labels(labels: Vec<usize>) -> Result<Self> {
        let class_count = labels.iter().max().map_or(0, |m| m + 1);
        if class_count == 0 {
            return Err(EltError::InvalidArgument("no labels given".into()));
        }
        Self::new(labels, class_count)
    }

    pub fn class_count(&self) -> usize {
        self.class_count
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn one_hot(&self) -> &DataMatrix {
        &self.one_hot
    }
}

/// Fits the linear observer from a leaf encoding to one-hot targets.
pub fn fit_observer(leaf_encoding: &OneHotEncoding, targets: &ClassTargets, lambda: f64) -> Result<RidgeSolution> {
    ridge_solve(leaf_encoding.matrix(), targets.one_hot(), lambda)
}

/// Argmax class per encoded row; ties go to the lowest class index.
pub fn predict_classes(solution: &RidgeSolution, encoding: &OneHotEncoding) -> Result<Vec<usize>> {
    if encoding.width() != solution.beta.rows() {
        return Err(EltError::Shape(format!(
            "encoding width {} does not match observer input width {}",
            encoding.width(),
            solution.beta.rows()
        )));
    }
    let scores = encoding.matrix().matmul(&solution.beta)?;
    Ok((0..scores.rows()).map(|r| argmax(scores.row(r))).collect())
}

/// Index of the strictly largest entry, first on ties.
pub fn argmax(row: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in row.iter().enumerate().skip(1) {
        if v > row[best] {
            best = i;
        }
    }
    best
}
