//! Trainable classifiers behind one fit/predict contract: the extreme
//! learning tree pipeline plus the ridge, ELM and CART baselines.
//!
//! Every model except CART standardizes inputs per feature with
//! training-set statistics; CART is scale-invariant and sees raw values.

pub mod cart;

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use crate::error::{EltError, Result};
use crate::feature_map::{Activation, RandomFeatureMap};
use crate::linalg::{ridge_solve, DataMatrix, RidgeSolution};
use crate::observer::{argmax, fit_observer, one_hot, predict_classes, ClassTargets};
use crate::seeds::derive_seed;
use crate::tree::{build_tree, RandomTree, TreeConfig};
use cart::{build_cart, cart_from_text, cart_predict, cart_to_text, CartNode};

/// Per-feature mean and standard deviation from training data.
/// Features with (near) zero spread keep a unit divisor so constant
/// columns pass through without blowing up.
#[derive(Debug, Clone, PartialEq)]
pub struct Standardization {
    means: Vec<f64>,
    stds: Vec<f64>,
}

impl Standardization {
    pub fn fit(x: &DataMatrix) -> Self {
        let n = x.rows() as f64;
        let d = x.cols();
        let mut means = vec![0.0; d];
        for r in 0..x.rows() {
            for (m, v) in means.iter_mut().zip(x.row(r)) {
                *m += v;
            }
        }
        for m in &mut means {
            *m /= n;
        }
        let mut stds = vec![0.0; d];
        for r in 0..x.rows() {
            for c in 0..d {
                let dv = x.get(r, c) - means[c];
                stds[c] += dv * dv;
            }
        }
        for s in &mut stds {
            *s = (*s / n).sqrt();
            if *s < 1e-12 {
                *s = 1.0;
            }
        }
        Self { means, stds }
    }

    pub fn identity(d: usize) -> Self {
        Self { means: vec![0.0; d], stds: vec![1.0; d] }
    }

    pub fn apply(&self, x: &DataMatrix) -> Result<DataMatrix> {
        if x.cols() != self.means.len() {
            return Err(EltError::Shape(format!(
                "standardization expects {} features, got {}",
                self.means.len(),
                x.cols()
            )));
        }
        let mut out = x.clone();
        for r in 0..out.rows() {
            for c in 0..out.cols() {
                out.set(r, c, (x.get(r, c) - self.means[c]) / self.stds[c]);
            }
        }
        Ok(out)
    }

    pub fn means(&self) -> &[f64] {
        &self.means
    }

    pub fn stds(&self) -> &[f64] {
        &self.stds
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    Elt,
    Ridge,
    Elm,
    Cart,
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ModelKind::Elt => "elt",
            ModelKind::Ridge => "ridge",
            ModelKind::Elm => "elm",
            ModelKind::Cart => "cart",
        };
        f.write_str(s)
    }
}

impl FromStr for ModelKind {
    type Err = EltError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "elt" => Ok(ModelKind::Elt),
            "ridge" => Ok(ModelKind::Ridge),
            "elm" => Ok(ModelKind::Elm),
            "cart" => Ok(ModelKind::Cart),
            other => Err(EltError::InvalidArgument(format!(
                "unknown method '{other}' (expected elt, ridge, elm or cart)"
            ))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct EltConfig {
    pub hidden_dim: usize,
    pub activation: Activation,
    pub map_seed: u64,
    pub tree: TreeConfig,
    pub lambda: f64,
}

impl Default for EltConfig {
    fn default() -> Self {
        // defaults calibrated on the Iris benchmark: a nearly
        // sample-pure tree (min node size 1) over 20 hidden features
        Self {
            hidden_dim: 20,
            activation: Activation::Tanh,
            map_seed: 0,
            tree: TreeConfig { min_node_size: 1, ..TreeConfig::default() },
            lambda: 1e-3,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ElmConfig {
    pub hidden_dim: usize,
    pub activation: Activation,
    pub seed: u64,
    /// Candidate lambdas for 5-fold cross-validation on the training split.
    pub lambda_grid: Vec<f64>,
    pub cv_folds: usize,
}

impl Default for ElmConfig {
    fn default() -> Self {
        Self {
            hidden_dim: 10,
            activation: Activation::Tanh,
            seed: 0,
            lambda_grid: vec![1e-4, 1e-3, 1e-2, 1e-1, 1.0],
            cv_folds: 5,
        }
    }
}

#[derive(Debug, Clone)]
pub struct CartConfig {
    pub min_leaf: usize,
}

impl Default for CartConfig {
    fn default() -> Self {
        Self { min_leaf: 1 }
    }
}

#[derive(Debug, Clone)]
pub enum ModelParts {
    Elt {
        map: RandomFeatureMap,
        tree: RandomTree,
        observer: RidgeSolution,
    },
    Ridge {
        solution: RidgeSolution,
    },
    Elm {
        map: RandomFeatureMap,
        solution: RidgeSolution,
    },
    Cart {
        root: CartNode,
    },
}

/// A trained classifier, immutable after fit.
#[derive(Debug, Clone)]
pub struct FittedModel {
    parts: ModelParts,
    standardization: Standardization,
    class_count: usize,
    input_dim: usize,
}

/// Full ELT pipeline: standardize, random feature map, extremely
/// randomized tree, one-hot leaf encoding, ridge observer.
pub fn fit_elt(x: &DataMatrix, targets: &ClassTargets, config: &EltConfig) -> Result<FittedModel> {
    check_xy(x, targets)?;
    let standardization = Standardization::fit(x);
    let map = RandomFeatureMap::new(x.cols(), config.hidden_dim, config.activation, config.map_seed)?;
    let hidden = map.transform(&standardization.apply(x)?)?;
    let tree = build_tree(&hidden, &config.tree)?;
    let encoding = one_hot(tree.training_leaves(), tree.leaf_count())?;
    let observer = fit_observer(&encoding, targets, config.lambda)?;
    Ok(FittedModel {
        parts: ModelParts::Elt { map, tree, observer },
        standardization,
        class_count: targets.class_count(),
        input_dim: x.cols(),
    })
}

/// Least-squares classifier on standardized inputs plus an intercept
/// column, argmax over one-hot targets. The intercept is penalized like
/// every other coefficient.
pub fn fit_ridge_classifier(x: &DataMatrix, targets: &ClassTargets, lambda: f64) -> Result<FittedModel> {
    check_xy(x, targets)?;
    let standardization = Standardization::fit(x);
    let design = standardization.apply(x)?.with_intercept();
    let solution = ridge_solve(&design, targets.one_hot(), lambda)?;
    Ok(FittedModel {
        parts: ModelParts::Ridge { solution },
        standardization,
        class_count: targets.class_count(),
        input_dim: x.cols(),
    })
}

/// ELM baseline: wide random map, then a ridge readout whose lambda is
/// picked from `lambda_grid` by cross-validation on the training split.
pub fn fit_elm_classifier(x: &DataMatrix, targets: &ClassTargets, config: &ElmConfig) -> Result<FittedModel> {
    check_xy(x, targets)?;
    if config.lambda_grid.is_empty() {
        return Err(EltError::InvalidArgument("ELM lambda grid is empty".into()));
    }
    let standardization = Standardization::fit(x);
    let map = RandomFeatureMap::new(x.cols(), config.hidden_dim, config.activation, config.seed)?;
    let design = map.transform(&standardization.apply(x)?)?.with_intercept();
    let lambda = select_lambda_cv(&design, targets, config)?;
    let solution = ridge_solve(&design, targets.one_hot(), lambda)?;
    Ok(FittedModel {
        parts: ModelParts::Elm { map, solution },
        standardization,
        class_count: targets.class_count(),
        input_dim: x.cols(),
    })
}

/// Greedy Gini CART on raw inputs.
pub fn fit_cart(x: &DataMatrix, targets: &ClassTargets, config: &CartConfig) -> Result<FittedModel> {
    check_xy(x, targets)?;
    let root = build_cart(x, targets.labels(), targets.class_count(), config.min_leaf)?;
    Ok(FittedModel {
        parts: ModelParts::Cart { root },
        standardization: Standardization::identity(x.cols()),
        class_count: targets.class_count(),
        input_dim: x.cols(),
    })
}

fn check_xy(x: &DataMatrix, targets: &ClassTargets) -> Result<()> {
    if x.rows() != targets.labels().len() {
        return Err(EltError::Shape(format!(
            "{} samples but {} labels",
            x.rows(),
            targets.labels().len()
        )));
    }
    if x.rows() == 0 {
        return Err(EltError::InvalidArgument("cannot fit on zero samples".into()));
    }
    Ok(())
}

/// Deterministic k-fold CV accuracy per lambda; ties pick the earlier
/// grid entry. Folds come from a seeded shuffle of the row indices.
fn select_lambda_cv(design: &DataMatrix, targets: &ClassTargets, config: &ElmConfig) -> Result<f64> {
    let n = design.rows();
    let folds = config.cv_folds.min(n);
    if folds < 2 || config.lambda_grid.len() == 1 {
        return Ok(config.lambda_grid[0]);
    }
    use rand::seq::SliceRandom;
    use rand::SeedableRng;
    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(derive_seed(config.seed, 0x666f6c64));
    order.shuffle(&mut rng);

    let mut best: Option<(f64, f64)> = None; // (accuracy, lambda)
    for &lambda in &config.lambda_grid {
        let mut hits = 0usize;
        let mut total = 0usize;
        for f in 0..folds {
            let val: Vec<usize> = order.iter().copied().skip(f).step_by(folds).collect();
            let train: Vec<usize> = order.iter().copied().filter(|i| !val.contains(i)).collect();
            if train.is_empty() || val.is_empty() {
                continue;
            }
            let d_train = design.select_rows(&train);
            let t_train = targets.one_hot().select_rows(&train);
            let sol = ridge_solve(&d_train, &t_train, lambda)?;
            let scores = design.select_rows(&val).matmul(&sol.beta)?;
            for (k, &i) in val.iter().enumerate() {
                if argmax(scores.row(k)) == targets.labels()[i] {
                    hits += 1;
                }
            }
            total += val.len();
        }
        let acc = if total == 0 { 0.0 } else { hits as f64 / total as f64 };
        let better = match best {
            None => true,
            Some((best_acc, _)) => acc > best_acc,
        };
        if better {
            best = Some((acc, lambda));
        }
    }
    Ok(best.map(|(_, l)| l).unwrap_or(config.lambda_grid[0]))
}

impl FittedModel {
    pub fn kind(&self) -> ModelKind {
        match &self.parts {
            ModelParts::Elt { .. } => ModelKind::Elt,
            ModelParts::Ridge { .. } => ModelKind::Ridge,
            ModelParts::Elm { .. } => ModelKind::Elm,
            ModelParts::Cart { .. } => ModelKind::Cart,
        }
    }

    pub fn class_count(&self) -> usize {
        self.class_count
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn standardization(&self) -> &Standardization {
        &self.standardization
    }

    pub fn parts(&self) -> &ModelParts {
        &self.parts
    }

    /// Class index per row of `x`.
    pub fn predict(&self, x: &DataMatrix) -> Result<Vec<usize>> {
        if x.cols() != self.input_dim {
            return Err(EltError::Shape(format!(
                "model expects {} features, got {}",
                self.input_dim,
                x.cols()
            )));
        }
        match &self.parts {
            ModelParts::Elt { observer, .. } => {
                let leaves = self.leaf_indices(x)?;
                let encoding = one_hot(&leaves, observer.beta.rows())?;
                predict_classes(observer, &encoding)
            }
            ModelParts::Ridge { solution } => {
                let design = self.standardization.apply(x)?.with_intercept();
                let scores = design.matmul(&solution.beta)?;
                Ok((0..scores.rows()).map(|r| argmax(scores.row(r))).collect())
            }
            ModelParts::Elm { map, solution } => {
                let design = map.transform(&self.standardization.apply(x)?)?.with_intercept();
                let scores = design.matmul(&solution.beta)?;
                Ok((0..scores.rows()).map(|r| argmax(scores.row(r))).collect())
            }
            ModelParts::Cart { root } => {
                Ok((0..x.rows()).map(|r| cart_predict(root, x.row(r))).collect())
            }
        }
    }

    /// Leaf index per row of `x`; only meaningful for the ELT.
    pub fn leaf_indices(&self, x: &DataMatrix) -> Result<Vec<usize>> {
        match &self.parts {
            ModelParts::Elt { map, tree, .. } => {
                let hidden = map.transform(&self.standardization.apply(x)?)?;
                (0..hidden.rows()).map(|r| tree.assign_leaf(hidden.row(r))).collect()
            }
            _ => Err(EltError::InvalidArgument(format!(
                "leaf indices are only defined for elt models, this is {}",
                self.kind()
            ))),
        }
    }

    /// Plain-text model envelope, round-trips exactly through
    /// `from_text` (floats are printed in shortest round-trip form).
    pub fn to_text(&self) -> String {
        let mut out = String::from("elt-model v1\n");
        out.push_str(&format!("kind {}\n", self.kind()));
        out.push_str(&format!("classes {}\n", self.class_count));
        out.push_str(&format!("features {}\n", self.input_dim));
        out.push_str(&format!("means {}\n", join_floats(self.standardization.means())));
        out.push_str(&format!("stds {}\n", join_floats(self.standardization.stds())));
        match &self.parts {
            ModelParts::Elt { map, tree, observer } => {
                push_map(&mut out, map);
                out.push_str(&format!("lambda {:?}\n", observer.lambda));
                push_beta(&mut out, &observer.beta);
                push_tree_text(&mut out, &tree.to_text());
            }
            ModelParts::Ridge { solution } => {
                out.push_str(&format!("lambda {:?}\n", solution.lambda));
                push_beta(&mut out, &solution.beta);
            }
            ModelParts::Elm { map, solution } => {
                push_map(&mut out, map);
                out.push_str(&format!("lambda {:?}\n", solution.lambda));
                push_beta(&mut out, &solution.beta);
            }
            ModelParts::Cart { root } => {
                push_tree_text(&mut out, &cart_to_text(root));
            }
        }
        out
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }

    pub fn from_text(text: &str) -> Result<FittedModel> {
        let mut reader = EnvelopeReader::new(text);
        let header = reader.line()?;
        if header != "elt-model v1" {
            return Err(reader.err("expected 'elt-model v1' header"));
        }
        let kind: ModelKind = reader.field("kind")?.parse()?;
        let class_count: usize = parse_num(reader.field("classes")?, &reader)?;
        let input_dim: usize = parse_num(reader.field("features")?, &reader)?;
        let means = parse_floats(reader.field("means")?, &reader)?;
        let stds = parse_floats(reader.field("stds")?, &reader)?;
        if means.len() != input_dim || stds.len() != input_dim {
            return Err(reader.err("standardization length does not match feature count"));
        }
        let standardization = Standardization { means, stds };
        let parts = match kind {
            ModelKind::Elt => {
                let map = reader.read_map()?;
                let lambda: f64 = parse_num(reader.field("lambda")?, &reader)?;
                let beta = reader.read_beta()?;
                let tree_text = reader.read_tree_text()?;
                let tree = RandomTree::from_text(&tree_text, map.hidden_dim())?;
                ModelParts::Elt { map, tree, observer: RidgeSolution { beta, lambda } }
            }
            ModelKind::Ridge => {
                let lambda: f64 = parse_num(reader.field("lambda")?, &reader)?;
                let beta = reader.read_beta()?;
                ModelParts::Ridge { solution: RidgeSolution { beta, lambda } }
            }
            ModelKind::Elm => {
                let map = reader.read_map()?;
                let lambda: f64 = parse_num(reader.field("lambda")?, &reader)?;
                let beta = reader.read_beta()?;
                ModelParts::Elm { map, solution: RidgeSolution { beta, lambda } }
            }
            ModelKind::Cart => {
                let tree_text = reader.read_tree_text()?;
                ModelParts::Cart { root: cart_from_text(&tree_text)? }
            }
        };
        Ok(FittedModel { parts, standardization, class_count, input_dim })
    }

    pub fn load(path: &Path) -> Result<FittedModel> {
        let text = std::fs::read_to_string(path)?;
        FittedModel::from_text(&text)
    }
}

fn join_floats(vals: &[f64]) -> String {
    vals.iter().map(|v| format!("{v:?}")).collect::<Vec<_>>().join(" ")
}

fn push_map(out: &mut String, map: &RandomFeatureMap) {
    out.push_str(&format!(
        "map {} {} {} {}\n",
        map.input_dim(),
        map.hidden_dim(),
        map.activation(),
        map.seed()
    ));
    out.push_str(&format!("weights {}\n", join_floats(map.weights().values())));
    out.push_str(&format!("biases {}\n", join_floats(map.biases())));
}

fn push_beta(out: &mut String, beta: &DataMatrix) {
    out.push_str(&format!("beta {} {}\n", beta.rows(), beta.cols()));
    out.push_str(&join_floats(beta.values()));
    out.push('\n');
}

fn push_tree_text(out: &mut String, tree_text: &str) {
    out.push_str(&format!("tree {}\n", tree_text.lines().count()));
    out.push_str(tree_text);
}

struct EnvelopeReader<'a> {
    lines: std::str::Lines<'a>,
    lineno: usize,
}

fn parse_num<T: FromStr>(s: &str, reader: &EnvelopeReader) -> Result<T> {
    s.parse().map_err(|_| reader.err(&format!("bad numeric value '{s}'")))
}

fn parse_floats(s: &str, reader: &EnvelopeReader) -> Result<Vec<f64>> {
    s.split_whitespace()
        .map(|t| t.parse().map_err(|_| reader.err(&format!("bad float '{t}'"))))
        .collect()
}

impl<'a> EnvelopeReader<'a> {
    fn new(text: &'a str) -> Self {
        Self { lines: text.lines(), lineno: 0 }
    }

    fn err(&self, msg: &str) -> EltError {
        EltError::Parse { line: self.lineno, message: msg.to_string() }
    }

    fn line(&mut self) -> Result<&'a str> {
        self.lineno += 1;
        self.lines.next().ok_or_else(|| self.err("unexpected end of model file"))
    }

    /// Reads a line of the form `<key> <rest>` and returns the rest.
    fn field(&mut self, key: &str) -> Result<&'a str> {
        let line = self.line()?;
        line.strip_prefix(key)
            .and_then(|r| r.strip_prefix(' '))
            .ok_or_else(|| self.err(&format!("expected '{key} ...' line, got '{line}'")))
    }

    fn read_map(&mut self) -> Result<RandomFeatureMap> {
        let header = self.field("map")?;
        let parts: Vec<&str> = header.split_whitespace().collect();
        if parts.len() != 4 {
            return Err(self.err("map line needs input_dim hidden_dim activation seed"));
        }
        let input_dim: usize = parse_num(parts[0], self)?;
        let hidden_dim: usize = parse_num(parts[1], self)?;
        let activation: Activation = parts[2].parse()?;
        let seed: u64 = parse_num(parts[3], self)?;
        let weights = parse_floats(self.field("weights")?, self)?;
        let biases = parse_floats(self.field("biases")?, self)?;
        let weights = DataMatrix::from_vec(input_dim, hidden_dim, weights)?;
        RandomFeatureMap::from_parts(weights, biases, activation, seed)
    }

    fn read_beta(&mut self) -> Result<DataMatrix> {
        let header = self.field("beta")?;
        let mut dims = header.split_whitespace();
        let rows: usize = parse_num(dims.next().ok_or_else(|| self.err("beta missing rows"))?, self)?;
        let cols: usize = parse_num(dims.next().ok_or_else(|| self.err("beta missing cols"))?, self)?;
        let values = parse_floats(self.line()?, self)?;
        DataMatrix::from_vec(rows, cols, values)
    }

    fn read_tree_text(&mut self) -> Result<String> {
        let count: usize = parse_num(self.field("tree")?, self)?;
        let mut text = String::new();
        for _ in 0..count {
            text.push_str(self.line()?);
            text.push('\n');
        }
        Ok(text)
    }
}
