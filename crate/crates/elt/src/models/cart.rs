//! Greedy CART classifier: exhaustive Gini-impurity split search over
//! midpoints between consecutive distinct sorted feature values, grown
//! until nodes are pure or too small. No pruning, no feature
//! subsampling. The tie rule everywhere is lowest index first.

use crate::error::{EltError, Result};
use crate::linalg::DataMatrix;

#[derive(Debug, Clone, PartialEq)]
pub enum CartNode {
    Internal {
        feature: usize,
        threshold: f64,
        left: Box<CartNode>,
        right: Box<CartNode>,
    },
    Leaf {
        class: usize,
    },
}

fn gini(counts: &[usize], total: usize) -> f64 {
    let n = total as f64;
    1.0 - counts.iter().map(|&c| (c as f64 / n).powi(2)).sum::<f64>()
}

fn majority(counts: &[usize]) -> usize {
    let mut best = 0;
    for (i, &c) in counts.iter().enumerate().skip(1) {
        if c > counts[best] {
            best = i;
        }
    }
    best
}

struct Candidate {
    score: f64,
    feature: usize,
    threshold: f64,
}

fn best_split(
    x: &DataMatrix,
    labels: &[usize],
    samples: &[usize],
    class_count: usize,
    min_leaf: usize,
) -> Option<Candidate> {
    let n = samples.len();
    let mut total_counts = vec![0usize; class_count];
    for &s in samples {
        total_counts[labels[s]] += 1;
    }
    let mut best: Option<Candidate> = None;
    let mut sorted: Vec<usize> = samples.to_vec();
    for feature in 0..x.cols() {
        sorted.sort_by(|&a, &b| x.get(a, feature).total_cmp(&x.get(b, feature)));
        let mut left_counts = vec![0usize; class_count];
        for pos in 1..n {
            left_counts[labels[sorted[pos - 1]]] += 1;
            let prev = x.get(sorted[pos - 1], feature);
            let cur = x.get(sorted[pos], feature);
            if cur == prev {
                continue;
            }
            let (nl, nr) = (pos, n - pos);
            if nl < min_leaf || nr < min_leaf {
                continue;
            }
            let right_counts: Vec<usize> =
                total_counts.iter().zip(&left_counts).map(|(t, l)| t - l).collect();
            let score = (nl as f64 * gini(&left_counts, nl) + nr as f64 * gini(&right_counts, nr))
                / n as f64;
            let better = match &best {
                None => true,
                Some(b) => score < b.score,
            };
            if better {
                best = Some(Candidate { score, feature, threshold: (prev + cur) / 2.0 });
            }
        }
    }
    best
}

fn grow(
    x: &DataMatrix,
    labels: &[usize],
    samples: Vec<usize>,
    class_count: usize,
    min_leaf: usize,
) -> CartNode {
    let mut counts = vec![0usize; class_count];
    for &s in &samples {
        counts[labels[s]] += 1;
    }
    let n = samples.len();
    let node_gini = gini(&counts, n);
    let pure = counts.iter().filter(|&&c| c > 0).count() <= 1;
    if pure || n < 2 * min_leaf {
        return CartNode::Leaf { class: majority(&counts) };
    }
    match best_split(x, labels, &samples, class_count, min_leaf) {
        Some(c) if c.score < node_gini - 1e-12 => {
            let (left_set, right_set): (Vec<usize>, Vec<usize>) =
                samples.into_iter().partition(|&s| x.get(s, c.feature) <= c.threshold);
            CartNode::Internal {
                feature: c.feature,
                threshold: c.threshold,
                left: Box::new(grow(x, labels, left_set, class_count, min_leaf)),
                right: Box::new(grow(x, labels, right_set, class_count, min_leaf)),
            }
        }
        _ => CartNode::Leaf { class: majority(&counts) },
    }
}

pub fn build_cart(x: &DataMatrix, labels: &[usize], class_count: usize, min_leaf: usize) -> Result<CartNode> {
    if x.rows() == 0 {
        return Err(EltError::InvalidArgument("cannot fit a tree on zero samples".into()));
    }
    if x.rows() != labels.len() {
        return Err(EltError::Shape(format!(
            "{} samples but {} labels",
            x.rows(),
            labels.len()
        )));
    }
    Ok(grow(x, labels, (0..x.rows()).collect(), class_count, min_leaf.max(1)))
}

pub fn cart_predict(root: &CartNode, sample: &[f64]) -> usize {
    let mut node = root;
    loop {
        match node {
            CartNode::Leaf { class } => return *class,
            CartNode::Internal { feature, threshold, left, right } => {
                node = if sample[*feature] <= *threshold { left } else { right };
            }
        }
    }
}

/// Pre-order text form, `I <feature> <threshold>` / `L <class>`.
pub fn cart_to_text(root: &CartNode) -> String {
    fn walk(node: &CartNode, out: &mut String) {
        match node {
            CartNode::Leaf { class } => out.push_str(&format!("L {class}\n")),
            CartNode::Internal { feature, threshold, left, right } => {
                out.push_str(&format!("I {feature} {threshold:?}\n"));
                walk(left, out);
                walk(right, out);
            }
        }
    }
    let mut s = String::new();
    walk(root, &mut s);
    s
}

pub fn cart_from_text(text: &str) -> Result<CartNode> {
    fn parse<'a>(lines: &mut impl Iterator<Item = (usize, &'a str)>) -> Result<CartNode> {
        let (lineno, line) = lines
            .next()
            .ok_or_else(|| EltError::Parse { line: 0, message: "unexpected end of tree text".into() })?;
        let bad = |msg: &str| EltError::Parse { line: lineno, message: msg.to_string() };
        let mut parts = line.split_whitespace();
        match parts.next() {
            Some("L") => Ok(CartNode::Leaf {
                class: parts
                    .next()
                    .ok_or_else(|| bad("leaf missing class"))?
                    .parse()
                    .map_err(|_| bad("bad class index"))?,
            }),
            Some("I") => {
                let feature = parts
                    .next()
                    .ok_or_else(|| bad("missing feature"))?
                    .parse()
                    .map_err(|_| bad("bad feature index"))?;
                let threshold = parts
                    .next()
                    .ok_or_else(|| bad("missing threshold"))?
                    .parse()
                    .map_err(|_| bad("bad threshold"))?;
                let left = Box::new(parse(lines)?);
                let right = Box::new(parse(lines)?);
                Ok(CartNode::Internal { feature, threshold, left, right })
            }
            _ => Err(bad("expected 'I' or 'L' node line")),
        }
    }
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| !l.trim().is_empty());
    parse(&mut lines)
}
