//! Seeded train/test splitting, stratified by default.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::dataset::Dataset;
use crate::error::{EltError, Result};

/// Splits per class: round(fraction * class size) rows to train, the
/// remainder to test, membership and within-split order seeded-shuffled.
pub fn stratified_split(dataset: &Dataset, train_fraction: f64, seed: u64) -> Result<(Dataset, Dataset)> {
    check_fraction(train_fraction)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut train_idx = Vec::new();
    let mut test_idx = Vec::new();
    for class in 0..dataset.class_count() {
        let mut members: Vec<usize> =
            (0..dataset.n_samples()).filter(|&i| dataset.labels[i] == class).collect();
        if members.len() < 2 {
            return Err(EltError::InvalidArgument(format!(
                "class '{}' has {} sample(s); stratified splitting needs at least 2 per class",
                dataset.class_names[class],
                members.len()
            )));
        }
        members.shuffle(&mut rng);
        let n_train = (train_fraction * members.len() as f64).round() as usize;
        train_idx.extend_from_slice(&members[..n_train]);
        test_idx.extend_from_slice(&members[n_train..]);
    }
    train_idx.shuffle(&mut rng);
    test_idx.shuffle(&mut rng);
    Ok((dataset.select(&train_idx), dataset.select(&test_idx)))
}

/// The literal unstratified protocol: one global shuffle, first
/// round(fraction * n) rows to train.
pub fn random_split(dataset: &Dataset, train_fraction: f64, seed: u64) -> Result<(Dataset, Dataset)> {
    check_fraction(train_fraction)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..dataset.n_samples()).collect();
    order.shuffle(&mut rng);
    let n_train = (train_fraction * order.len() as f64).round() as usize;
    Ok((dataset.select(&order[..n_train]), dataset.select(&order[n_train..])))
}

fn check_fraction(f: f64) -> Result<()> {
    if !(f > 0.0 && f < 1.0) {
        return Err(EltError::InvalidArgument(format!(
            "train fraction must be in (0, 1), got {f}"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::bundled_iris;

    #[test]
    fn iris_split_sizes() {
        let iris = bundled_iris();
        let (train, test) = stratified_split(&iris, 0.7, 1).unwrap();
        assert_eq!(train.n_samples(), 105);
        assert_eq!(test.n_samples(), 45);
        for c in 0..3 {
            assert_eq!(train.labels.iter().filter(|&&l| l == c).count(), 35);
            assert_eq!(test.labels.iter().filter(|&&l| l == c).count(), 15);
        }
    }

    #[test]
    fn different_seeds_same_sizes_different_membership() {
        let iris = bundled_iris();
        let (a_train, _) = stratified_split(&iris, 0.7, 1).unwrap();
        let (b_train, _) = stratified_split(&iris, 0.7, 2).unwrap();
        assert_eq!(a_train.n_samples(), b_train.n_samples());
        let rows = |d: &Dataset| {
            let mut v: Vec<String> = (0..d.n_samples()).map(|r| format!("{:?}", d.x.row(r))).collect();
            v.sort();
            v
        };
        assert_ne!(rows(&a_train), rows(&b_train));
    }

    #[test]
    fn union_and_disjointness() {
        // a small synthetic dataset with distinguishable rows
        let x = crate::linalg::DataMatrix::from_vec(30, 1, (0..30).map(|i| i as f64).collect()).unwrap();
        let ds = Dataset {
            name: "t".into(),
            x,
            labels: (0..30).map(|i| i % 3).collect(),
            class_names: vec!["a".into(), "b".into(), "c".into()],
            feature_names: vec!["f0".into()],
        };
        for seed in 0..5 {
            for (train, test) in [
                stratified_split(&ds, 0.6, seed).unwrap(),
                random_split(&ds, 0.6, seed).unwrap(),
            ] {
                let mut seen: Vec<i64> = Vec::new();
                for d in [&train, &test] {
                    for r in 0..d.n_samples() {
                        seen.push(d.x.get(r, 0) as i64);
                    }
                }
                seen.sort();
                assert_eq!(seen, (0..30).collect::<Vec<i64>>());
            }
        }
    }

    #[test]
    fn tiny_class_rejected() {
        let x = crate::linalg::DataMatrix::from_vec(3, 1, vec![1.0, 2.0, 3.0]).unwrap();
        let ds = Dataset {
            name: "t".into(),
            x,
            labels: vec![0, 0, 1],
            class_names: vec!["a".into(), "b".into()],
            feature_names: vec!["f0".into()],
        };
        assert!(stratified_split(&ds, 0.7, 0).is_err());
    }

    #[test]
    fn bad_fraction_rejected() {
        let iris = bundled_iris();
        assert!(stratified_split(&iris, 0.0, 0).is_err());
        assert!(stratified_split(&iris, 1.0, 0).is_err());
    }
}
