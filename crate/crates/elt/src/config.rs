//! Run configuration: every tunable default in one place, overridable
//! from a flat `key = value` text file.

use std::path::Path;

use crate::error::{EltError, Result};
use crate::models::{CartConfig, EltConfig, ElmConfig};

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub elt: EltConfig,
    pub elm: ElmConfig,
    pub ridge_lambda: f64,
    pub cart: CartConfig,
    pub train_fraction: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            elt: EltConfig::default(),
            elm: ElmConfig::default(),
            ridge_lambda: 1e-2,
            cart: CartConfig::default(),
            train_fraction: 0.7,
        }
    }
}

impl RunConfig {
    /// Applies overrides from a `key = value` file; `#` starts a
    /// comment, blank lines are ignored.
    pub fn load_overrides(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path)?;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or(EltError::Parse {
                line: lineno + 1,
                message: format!("expected 'key = value', got '{raw}'"),
            })?;
            self.set(key.trim(), value.trim()).map_err(|e| EltError::Parse {
                line: lineno + 1,
                message: e.to_string(),
            })?;
        }
        Ok(())
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        fn num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
            value.parse().map_err(|_| EltError::InvalidArgument(format!("bad value '{value}' for {key}")))
        }
        match key {
            "elt.hidden_dim" => self.elt.hidden_dim = num(key, value)?,
            "elt.activation" => self.elt.activation = value.parse()?,
            "elt.lambda" => self.elt.lambda = num(key, value)?,
            "elt.min_node_size" => self.elt.tree.min_node_size = num(key, value)?,
            "elt.max_depth" => self.elt.tree.max_depth = num(key, value)?,
            "elt.max_split_attempts" => self.elt.tree.max_split_attempts = num(key, value)?,
            "elm.hidden_dim" => self.elm.hidden_dim = num(key, value)?,
            "elm.activation" => self.elm.activation = value.parse()?,
            "elm.cv_folds" => self.elm.cv_folds = num(key, value)?,
            "ridge.lambda" => self.ridge_lambda = num(key, value)?,
            "cart.min_leaf" => self.cart.min_leaf = num(key, value)?,
            "train_fraction" => self.train_fraction = num(key, value)?,
            other => {
                return Err(EltError::InvalidArgument(format!("unknown config key '{other}'")));
            }
        }
        Ok(())
    }
}
