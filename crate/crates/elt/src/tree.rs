//! Extremely randomized binary tree over hidden features.
//!
//! Each node is split on a uniformly random feature at a uniformly
//! random threshold inside that feature's open range over the node's
//! samples. Splits leaving either side under the minimum node size are
//! rejected and redrawn (feature and threshold together) up to
//! `max_split_attempts` times, after which the node becomes a leaf.
//! Nodes at the maximum depth, or holding fewer than twice the minimum
//! size, become leaves outright. Leaves are indexed depth-first, left
//! before right.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{EltError, Result};
use crate::linalg::DataMatrix;

#[derive(Debug, Clone)]
pub struct TreeConfig {
    pub min_node_size: usize,
    pub max_depth: usize,
    pub max_split_attempts: usize,
    pub seed: u64,
}

impl Default for TreeConfig {
    fn default() -> Self {
        Self { min_node_size: 3, max_depth: 15, max_split_attempts: 30, seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TreeNode {
    Internal {
        feature: usize,
        threshold: f64,
        left: Box<TreeNode>,
        right: Box<TreeNode>,
    },
    Leaf {
        index: usize,
    },
}

/// Immutable fitted tree. `training_leaves` records, for each training
/// row, the leaf it was placed in during construction; it is not part
/// of the serialized form.
#[derive(Debug, Clone)]
pub struct RandomTree {
    root: TreeNode,
    leaf_count: usize,
    feature_dim: usize,
    training_leaves: Vec<usize>,
}

struct Builder<'a> {
    features: &'a DataMatrix,
    config: &'a TreeConfig,
    rng: ChaCha8Rng,
    next_leaf: usize,
    training_leaves: Vec<usize>,
}

impl<'a> Builder<'a> {
    fn leaf(&mut self, samples: &[usize]) -> TreeNode {
        let index = self.next_leaf;
        self.next_leaf += 1;
        for &s in samples {
            self.training_leaves[s] = index;
        }
        TreeNode::Leaf { index }
    }

    fn build(&mut self, samples: Vec<usize>, depth: usize) -> TreeNode {
        let cfg = self.config;
        if depth == cfg.max_depth || samples.len() < 2 * cfg.min_node_size {
            return self.leaf(&samples);
        }
        let m = self.features.cols();
        for _ in 0..cfg.max_split_attempts {
            let feature = self.rng.gen_range(0..m);
            let mut lo = f64::INFINITY;
            let mut hi = f64::NEG_INFINITY;
            for &s in &samples {
                let v = self.features.get(s, feature);
                lo = lo.min(v);
                hi = hi.max(v);
            }
            if !(hi > lo) {
                // constant feature at this node: failed attempt
                continue;
            }
            let threshold = self.rng.gen_range(lo..hi);
            if threshold <= lo {
                continue;
            }
            let (left_set, right_set): (Vec<usize>, Vec<usize>) =
                samples.iter().partition(|&&s| self.features.get(s, feature) <= threshold);
            if left_set.len() < cfg.min_node_size || right_set.len() < cfg.min_node_size {
                continue;
            }
            let left = Box::new(self.build(left_set, depth + 1));
            let right = Box::new(self.build(right_set, depth + 1));
            return TreeNode::Internal { feature, threshold, left, right };
        }
        self.leaf(&samples)
    }
}

/// Grows a tree over the rows of `features`.
pub fn build_tree(features: &DataMatrix, config: &TreeConfig) -> Result<RandomTree> {
    if features.rows() == 0 {
        return Err(EltError::InvalidArgument("cannot build a tree on an empty feature matrix".into()));
    }
    if config.min_node_size < 1 || config.max_split_attempts < 1 {
        return Err(EltError::InvalidArgument(
            "min_node_size and max_split_attempts must be >= 1".into(),
        ));
    }
    let mut builder = Builder {
        features,
        config,
        rng: ChaCha8Rng::seed_from_u64(config.seed),
        next_leaf: 0,
        training_leaves: vec![0; features.rows()],
    };
    let root = builder.build((0..features.rows()).collect(), 0);
    Ok(RandomTree {
        root,
        leaf_count: builder.next_leaf,
        feature_dim: features.cols(),
        training_leaves: builder.training_leaves,
    })
}

impl RandomTree {
    pub fn leaf_count(&self) -> usize {
        self.leaf_count
    }

    pub fn feature_dim(&self) -> usize {
        self.feature_dim
    }

    pub fn root(&self) -> &TreeNode {
        &self.root
    }

    /// Leaf index assigned to each training row at build time.
    pub fn training_leaves(&self) -> &[usize] {
        &self.training_leaves
    }

    /// Longest root-to-leaf path.
    pub fn depth(&self) -> usize {
        fn walk(node: &TreeNode) -> usize {
            match node {
                TreeNode::Leaf { .. } => 0,
                TreeNode::Internal { left, right, .. } => 1 + walk(left).max(walk(right)),
            }
        }
        walk(&self.root)
    }

    /// Descends the tree: value <= threshold goes left.
    pub fn assign_leaf(&self, sample: &[f64]) -> Result<usize> {
        if sample.len() != self.feature_dim {
            return Err(EltError::Shape(format!(
                "sample has {} features, tree expects {}",
                sample.len(),
                self.feature_dim
            )));
        }
        if sample.iter().any(|v| !v.is_finite()) {
            return Err(EltError::NonFinite("sample passed to assign_leaf".into()));
        }
        let mut node = &self.root;
        loop {
            match node {
                TreeNode::Leaf { index } => return Ok(*index),
                TreeNode::Internal { feature, threshold, left, right } => {
                    node = if sample[*feature] <= *threshold { left } else { right };
                }
            }
        }
    }

    /// Number of rows of `features` landing in each leaf.
    pub fn leaf_populations(&self, features: &DataMatrix) -> Result<Vec<usize>> {
        let mut counts = vec![0usize; self.leaf_count];
        for r in 0..features.rows() {
            counts[self.assign_leaf(features.row(r))?] += 1;
        }
        Ok(counts)
    }

    /// Pre-order plain-text form, one node per line:
    /// `I <feature> <threshold>` or `L <index>`.
    pub fn to_text(&self) -> String {
        fn walk(node: &TreeNode, out: &mut String) {
            match node {
                TreeNode::Leaf { index } => out.push_str(&format!("L {index}\n")),
                TreeNode::Internal { feature, threshold, left, right } => {
                    out.push_str(&format!("I {feature} {threshold:?}\n"));
                    walk(left, out);
                    walk(right, out);
                }
            }
        }
        let mut s = String::new();
        walk(&self.root, &mut s);
        s
    }

    /// Parses the `to_text` format. The training-row record is not part
    /// of the text form and comes back empty.
    pub fn from_text(text: &str, feature_dim: usize) -> Result<RandomTree> {
        fn parse<'a>(
            lines: &mut impl Iterator<Item = (usize, &'a str)>,
            max_leaf: &mut usize,
        ) -> Result<TreeNode> {
            let (lineno, line) = lines
                .next()
                .ok_or_else(|| EltError::Parse { line: 0, message: "unexpected end of tree text".into() })?;
            let bad = |msg: &str| EltError::Parse { line: lineno, message: msg.to_string() };
            let mut parts = line.split_whitespace();
            match parts.next() {
                Some("L") => {
                    let index: usize = parts
                        .next()
                        .ok_or_else(|| bad("leaf line missing index"))?
                        .parse()
                        .map_err(|_| bad("bad leaf index"))?;
                    *max_leaf = (*max_leaf).max(index + 1);
                    Ok(TreeNode::Leaf { index })
                }
                Some("I") => {
                    let feature: usize = parts
                        .next()
                        .ok_or_else(|| bad("internal line missing feature"))?
                        .parse()
                        .map_err(|_| bad("bad feature index"))?;
                    let threshold: f64 = parts
                        .next()
                        .ok_or_else(|| bad("internal line missing threshold"))?
                        .parse()
                        .map_err(|_| bad("bad threshold"))?;
                    let left = Box::new(parse(lines, max_leaf)?);
                    let right = Box::new(parse(lines, max_leaf)?);
                    Ok(TreeNode::Internal { feature, threshold, left, right })
                }
                _ => Err(bad("expected 'I' or 'L' node line")),
            }
        }
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l))
            .filter(|(_, l)| !l.trim().is_empty());
        let mut max_leaf = 0;
        let root = parse(&mut lines, &mut max_leaf)?;
        if let Some((lineno, _)) = lines.next() {
            return Err(EltError::Parse { line: lineno, message: "trailing lines after tree".into() });
        }
        Ok(RandomTree { root, leaf_count: max_leaf, feature_dim, training_leaves: Vec::new() })
    }
}
