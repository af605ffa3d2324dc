//! CSV ingestion into a `Dataset`: numeric features plus one label
//! column whose values are mapped to class indices in first-appearance
//! order.

use std::path::Path;

use crate::error::{EltError, Result};
use crate::linalg::DataMatrix;

#[derive(Debug, Clone)]
pub struct Dataset {
    pub name: String,
    pub x: DataMatrix,
    pub labels: Vec<usize>,
    pub class_names: Vec<String>,
    pub feature_names: Vec<String>,
}

impl Dataset {
    pub fn n_samples(&self) -> usize {
        self.x.rows()
    }

    pub fn n_features(&self) -> usize {
        self.x.cols()
    }

    pub fn class_count(&self) -> usize {
        self.class_names.len()
    }

    /// Sub-dataset with the given rows, in the given order.
    pub fn select(&self, indices: &[usize]) -> Dataset {
        Dataset {
            name: self.name.clone(),
            x: self.x.select_rows(indices),
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
            class_names: self.class_names.clone(),
            feature_names: self.feature_names.clone(),
        }
    }
}

/// How to find the label column: by header name or zero-based index.
#[derive(Debug, Clone)]
pub enum LabelColumn {
    Name(String),
    Index(usize),
}

impl LabelColumn {
    /// Parses a CLI-style spec: a non-negative integer is an index,
    /// anything else a column name.
    pub fn parse(spec: &str) -> LabelColumn {
        match spec.parse::<usize>() {
            Ok(i) => LabelColumn::Index(i),
            Err(_) => LabelColumn::Name(spec.to_string()),
        }
    }
}

pub fn load_csv(path: &Path, label: &LabelColumn, header: bool) -> Result<Dataset> {
    let text = std::fs::read_to_string(path)?;
    let name = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    parse_csv(&text, name, label, header)
}

/// Loads a label-free CSV as a bare feature matrix.
pub fn load_features_csv(path: &Path, header: bool) -> Result<DataMatrix> {
    let text = std::fs::read_to_string(path)?;
    let mut rows = Vec::new();
    let mut width = None;
    for (lineno, line) in text.lines().enumerate().skip(if header { 1 } else { 0 }) {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        match width {
            None => width = Some(fields.len()),
            Some(w) if w != fields.len() => {
                return Err(EltError::Parse {
                    line: lineno + 1,
                    message: format!("expected {w} fields, got {}", fields.len()),
                })
            }
            _ => {}
        }
        for f in fields {
            let v: f64 = f.parse().map_err(|_| EltError::Parse {
                line: lineno + 1,
                message: format!("non-numeric feature value '{f}'"),
            })?;
            rows.push(v);
        }
    }
    let width = width.ok_or(EltError::Parse { line: 1, message: "empty file".into() })?;
    DataMatrix::from_vec(rows.len() / width, width, rows)
}

fn parse_csv(text: &str, name: String, label: &LabelColumn, header: bool) -> Result<Dataset> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()).peekable();

    let (header_fields, label_idx) = if header {
        let (lineno, line) = lines.next().ok_or(EltError::Parse { line: 1, message: "empty file".into() })?;
        let fields: Vec<String> = line.split(',').map(|s| s.trim().to_string()).collect();
        let idx = match label {
            LabelColumn::Name(n) => fields.iter().position(|f| f == n).ok_or_else(|| EltError::Parse {
                line: lineno + 1,
                message: format!("label column '{n}' not found in header"),
            })?,
            LabelColumn::Index(i) => *i,
        };
        if idx >= fields.len() {
            return Err(EltError::Parse {
                line: lineno + 1,
                message: format!("label column index {idx} out of range for {} columns", fields.len()),
            });
        }
        (Some(fields), idx)
    } else {
        let idx = match label {
            LabelColumn::Name(n) => {
                return Err(EltError::Parse {
                    line: 1,
                    message: format!("label column '{n}' given by name but the file has no header"),
                })
            }
            LabelColumn::Index(i) => *i,
        };
        (None, idx)
    };

    let mut width = None;
    let mut values = Vec::new();
    let mut labels = Vec::new();
    let mut class_names: Vec<String> = Vec::new();
    for (lineno, line) in lines {
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        match width {
            None => {
                if label_idx >= fields.len() {
                    return Err(EltError::Parse {
                        line: lineno + 1,
                        message: format!(
                            "label column index {label_idx} out of range for {} columns",
                            fields.len()
                        ),
                    });
                }
                width = Some(fields.len());
            }
            Some(w) if w != fields.len() => {
                return Err(EltError::Parse {
                    line: lineno + 1,
                    message: format!("ragged row: expected {w} fields, got {}", fields.len()),
                })
            }
            _ => {}
        }
        for (i, f) in fields.iter().enumerate() {
            if i == label_idx {
                let class = match class_names.iter().position(|c| c == f) {
                    Some(c) => c,
                    None => {
                        class_names.push(f.to_string());
                        class_names.len() - 1
                    }
                };
                labels.push(class);
            } else {
                let v: f64 = f.parse().map_err(|_| EltError::Parse {
                    line: lineno + 1,
                    message: format!("non-numeric feature value '{f}' in column {i}"),
                })?;
                values.push(v);
            }
        }
    }
    let width = width.ok_or(EltError::Parse { line: 1, message: "no data rows".into() })?;
    let n_features = width - 1;
    let feature_names = match header_fields {
        Some(fields) => fields
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != label_idx)
            .map(|(_, f)| f.clone())
            .collect(),
        None => (0..n_features).map(|i| format!("f{i}")).collect(),
    };
    let x = DataMatrix::from_vec(labels.len(), n_features, values)?;
    Ok(Dataset { name, x, labels, class_names, feature_names })
}

/// The Iris dataset bundled with the crate (150 samples, 4 features,
/// 3 classes of 50; values as distributed with scikit-learn, originally
/// Fisher 1936 via the UCI repository).
pub fn bundled_iris() -> Dataset {
    let text = include_str!("../data/iris.csv");
    parse_csv(text, "iris".into(), &LabelColumn::Name("species".into()), true)
        .expect("bundled iris.csv is well-formed")
}
