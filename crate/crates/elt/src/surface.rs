//! Decision-surface and leaf-structure grid exports. A regular grid is
//! laid over two chosen raw features, padded by 0.5 on each side, with
//! every other feature pinned to its training mean; the model is
//! evaluated at each grid point and the result written as CSV.

use crate::dataset::Dataset;
use crate::error::{EltError, Result};
use crate::linalg::DataMatrix;
use crate::models::{FittedModel, ModelKind};

/// Grid over features (i, j): the assembled evaluation matrix plus the
/// (f1, f2) coordinates per row, f1 varying slowest.
pub fn build_grid(
    model: &FittedModel,
    dataset: &Dataset,
    feature_pair: (usize, usize),
    resolution: usize,
) -> Result<(DataMatrix, Vec<(f64, f64)>)> {
    let (fi, fj) = feature_pair;
    let d = dataset.n_features();
    if fi == fj {
        return Err(EltError::InvalidArgument(format!("feature pair must be distinct, got ({fi}, {fj})")));
    }
    if fi >= d || fj >= d {
        return Err(EltError::InvalidArgument(format!(
            "feature pair ({fi}, {fj}) out of range for {d} features"
        )));
    }
    if d != model.input_dim() {
        return Err(EltError::Shape(format!(
            "dataset has {d} features but the model expects {}",
            model.input_dim()
        )));
    }
    if resolution < 2 {
        return Err(EltError::InvalidArgument("grid resolution must be >= 2".into()));
    }
    let means: Vec<f64> = (0..d)
        .map(|c| (0..dataset.n_samples()).map(|r| dataset.x.get(r, c)).sum::<f64>() / dataset.n_samples() as f64)
        .collect();
    let range = |c: usize| {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for r in 0..dataset.n_samples() {
            lo = lo.min(dataset.x.get(r, c));
            hi = hi.max(dataset.x.get(r, c));
        }
        (lo - 0.5, hi + 0.5)
    };
    let (lo_i, hi_i) = range(fi);
    let (lo_j, hi_j) = range(fj);
    let step = |lo: f64, hi: f64, k: usize| lo + (hi - lo) * k as f64 / (resolution - 1) as f64;

    let mut values = Vec::with_capacity(resolution * resolution * d);
    let mut coords = Vec::with_capacity(resolution * resolution);
    for a in 0..resolution {
        let v1 = step(lo_i, hi_i, a);
        for b in 0..resolution {
            let v2 = step(lo_j, hi_j, b);
            for (c, &m) in means.iter().enumerate() {
                values.push(if c == fi {
                    v1
                } else if c == fj {
                    v2
                } else {
                    m
                });
            }
            coords.push((v1, v2));
        }
    }
    Ok((DataMatrix::from_vec(resolution * resolution, d, values)?, coords))
}

/// CSV rows `f1,f2,predicted_class` over the grid.
pub fn export_decision_surface(
    model: &FittedModel,
    dataset: &Dataset,
    feature_pair: (usize, usize),
    resolution: usize,
) -> Result<String> {
    let (grid, coords) = build_grid(model, dataset, feature_pair, resolution)?;
    let preds = model.predict(&grid)?;
    let mut out = String::from("f1,f2,predicted_class\n");
    for ((f1, f2), p) in coords.into_iter().zip(preds) {
        out.push_str(&format!("{f1:?},{f2:?},{p}\n"));
    }
    Ok(out)
}

/// CSV rows `f1,f2,leaf_index` over the grid; ELT models only.
pub fn export_leaf_structure(
    model: &FittedModel,
    dataset: &Dataset,
    feature_pair: (usize, usize),
    resolution: usize,
) -> Result<String> {
    if model.kind() != ModelKind::Elt {
        return Err(EltError::InvalidArgument(format!(
            "leaf structure export needs an elt model, got {}",
            model.kind()
        )));
    }
    let (grid, coords) = build_grid(model, dataset, feature_pair, resolution)?;
    let leaves = model.leaf_indices(&grid)?;
    let mut out = String::from("f1,f2,leaf_index\n");
    for ((f1, f2), l) in coords.into_iter().zip(leaves) {
        out.push_str(&format!("{f1:?},{f2:?},{l}\n"));
    }
    Ok(out)
}
