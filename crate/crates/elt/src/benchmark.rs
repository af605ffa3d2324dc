//! Repeated random-split benchmark: for each run, derive a fresh seed,
//! split once, fit every requested method on the same train split and
//! score it on the same test split. Mean and population standard
//! deviation over runs go into the report.

use crate::config::RunConfig;
use crate::dataset::Dataset;
use crate::error::{EltError, Result};
use crate::models::{fit_cart, fit_elm_classifier, fit_elt, fit_ridge_classifier, FittedModel, ModelKind};
use crate::observer::ClassTargets;
use crate::seeds::derive_seed;
use crate::split::{random_split, stratified_split};

#[derive(Debug, Clone)]
pub struct MethodReport {
    pub method: ModelKind,
    /// Test accuracy per run, in percent, ordered by run index.
    pub accuracies: Vec<f64>,
    pub mean: f64,
    pub std: f64,
}

#[derive(Debug, Clone)]
pub struct ExperimentReport {
    pub methods: Vec<MethodReport>,
    pub repetitions: usize,
    pub master_seed: u64,
    pub stratified: bool,
}

/// Percentage of exact class matches.
pub fn accuracy(predicted: &[usize], actual: &[usize]) -> f64 {
    let hits = predicted.iter().zip(actual).filter(|(p, a)| p == a).count();
    100.0 * hits as f64 / actual.len() as f64
}

fn mean_and_population_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Fits one method on a training dataset with seeds derived from
/// `run_seed`. Stream ids keep the randomness of the split, the map and
/// the tree independent of each other.
pub fn fit_method(method: ModelKind, train: &Dataset, config: &RunConfig, run_seed: u64) -> Result<FittedModel> {
    let targets = ClassTargets::new(train.labels.clone(), train.class_count())?;
    match method {
        ModelKind::Elt => {
            let mut cfg = config.elt.clone();
            cfg.map_seed = derive_seed(run_seed, 1);
            cfg.tree.seed = derive_seed(run_seed, 2);
            fit_elt(&train.x, &targets, &cfg)
        }
        ModelKind::Ridge => fit_ridge_classifier(&train.x, &targets, config.ridge_lambda),
        ModelKind::Elm => {
            let mut cfg = config.elm.clone();
            cfg.seed = derive_seed(run_seed, 3);
            fit_elm_classifier(&train.x, &targets, &cfg)
        }
        ModelKind::Cart => fit_cart(&train.x, &targets, &config.cart),
    }
}

pub fn run_benchmark(
    dataset: &Dataset,
    methods: &[ModelKind],
    config: &RunConfig,
    repetitions: usize,
    master_seed: u64,
    stratified: bool,
) -> Result<ExperimentReport> {
    if repetitions < 1 {
        return Err(EltError::InvalidArgument("repetitions must be >= 1".into()));
    }
    let mut per_method: Vec<Vec<f64>> = vec![Vec::with_capacity(repetitions); methods.len()];
    for run in 0..repetitions {
        let run_seed = derive_seed(master_seed, run as u64);
        let split_seed = derive_seed(run_seed, 0);
        let (train, test) = if stratified {
            stratified_split(dataset, config.train_fraction, split_seed)
        } else {
            random_split(dataset, config.train_fraction, split_seed)
        }
        .map_err(|e| EltError::InvalidArgument(format!("run {run}: {e}")))?;
        for (mi, &method) in methods.iter().enumerate() {
            let model = fit_method(method, &train, config, run_seed)
                .map_err(|e| EltError::InvalidArgument(format!("run {run}, {method}: {e}")))?;
            let preds = model.predict(&test.x)?;
            per_method[mi].push(accuracy(&preds, &test.labels));
        }
    }
    let methods = methods
        .iter()
        .zip(per_method)
        .map(|(&method, accuracies)| {
            let (mean, std) = mean_and_population_std(&accuracies);
            MethodReport { method, accuracies, mean, std }
        })
        .collect();
    Ok(ExperimentReport { methods, repetitions, master_seed, stratified })
}

impl ExperimentReport {
    /// Report CSV: one row per method, six-decimal fixed format so
    /// identical runs produce identical bytes.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("method,mean_acc,std_acc,reps,master_seed\n");
        for m in &self.methods {
            out.push_str(&format!(
                "{},{:.6},{:.6},{},{}\n",
                m.method, m.mean, m.std, self.repetitions, self.master_seed
            ));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::bundled_iris;

    #[test]
    fn single_repetition_zero_std() {
        let iris = bundled_iris();
        let report = run_benchmark(&iris, &[ModelKind::Cart], &RunConfig::default(), 1, 7, true).unwrap();
        assert_eq!(report.methods[0].accuracies.len(), 1);
        assert_eq!(report.methods[0].std, 0.0);
    }

    #[test]
    fn reproducible_byte_identical_reports() {
        let iris = bundled_iris();
        let cfg = RunConfig::default();
        let a = run_benchmark(&iris, &[ModelKind::Elt, ModelKind::Ridge], &cfg, 5, 99, true).unwrap();
        let b = run_benchmark(&iris, &[ModelKind::Elt, ModelKind::Ridge], &cfg, 5, 99, true).unwrap();
        assert_eq!(a.to_csv(), b.to_csv());
        assert_eq!(a.methods[0].accuracies, b.methods[0].accuracies);
    }

    #[test]
    fn std_recomputable_from_per_run_vector() {
        let iris = bundled_iris();
        let report = run_benchmark(&iris, &[ModelKind::Ridge], &RunConfig::default(), 10, 3, true).unwrap();
        let m = &report.methods[0];
        let (mean, std) = mean_and_population_std(&m.accuracies);
        assert!((mean - m.mean).abs() < 1e-9);
        assert!((std - m.std).abs() < 1e-9);
        assert!(m.accuracies.iter().all(|&a| (0.0..=100.0).contains(&a)));
    }

    #[test]
    fn elm_capacity_sweep_wide_beats_trivial() {
        let iris = bundled_iris();
        let mut wide = RunConfig::default();
        wide.elm.hidden_dim = 100;
        let mut narrow = RunConfig::default();
        narrow.elm.hidden_dim = 1;
        let acc = |cfg: &RunConfig| {
            run_benchmark(&iris, &[ModelKind::Elm], cfg, 20, 17, true).unwrap().methods[0].mean
        };
        assert!(acc(&wide) >= acc(&narrow));
    }

    #[test]
    fn constant_prediction_on_balanced_iris_test_splits() {
        // every stratified test split holds 15 of each class, so a
        // constant predictor scores exactly one third
        let iris = bundled_iris();
        for seed in 0..10 {
            let (_, test) = stratified_split(&iris, 0.7, seed).unwrap();
            let preds = vec![0usize; test.n_samples()];
            let acc = accuracy(&preds, &test.labels);
            assert!((acc - 100.0 / 3.0).abs() < 1e-9);
        }
    }
}
