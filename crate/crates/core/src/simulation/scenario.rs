//! Scenario definitions and their TOML form.
//!
//! A scenario file describes a grid: every combination of `beta` and `k` is
//! run as its own [`ScenarioSpec`] with the shared settings.
//!
//! ```toml
//! name = "fixed_eq"
//! model = "t_test"            # or "regression"
//! beta = [0.0, 0.1, 0.2, 0.3]
//! k = [2, 5, 10]
//! partition = "eq"            # "eq", "uneq" or "random"
//! n = 1000                    # or n = { min = 800, max = 10000 }
//! replicates = 200
//! seed = 20240501
//!
//! [uneq_weights]              # optional, overrides the built-in presets
//! 3 = [0.2, 0.3, 0.5]
//! ```

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Smallest sub-study the partitioner will produce.
pub const MIN_PART_SIZE: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Model {
    /// Group indicator regressor with alternating 0/1 allocation.
    #[serde(rename = "t_test")]
    TwoSampleTTest,
    /// Gaussian regressor with variance 1/4.
    #[serde(rename = "regression")]
    SimpleRegression,
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Model::TwoSampleTTest => "t_test",
            Model::SimpleRegression => "regression",
        })
    }
}

/// How the N observations are split into K studies.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Partition {
    Equal,
    /// Squared weights ω²_k, one per study, summing to one.
    Unequal(Vec<f64>),
    /// Uniform over all compositions of N into K parts of at least
    /// [`MIN_PART_SIZE`] observations.
    Random,
}

impl Partition {
    pub fn label(&self) -> &'static str {
        match self {
            Partition::Equal => "eq",
            Partition::Unequal(_) => "uneq",
            Partition::Random => "random",
        }
    }

    /// Built-in unequal allocations for K = 2, 5 and 10.
    pub fn unequal_preset(k: usize) -> Option<Vec<f64>> {
        match k {
            2 => Some(vec![0.7, 0.3]),
            5 => Some(vec![0.05, 0.1, 0.15, 0.3, 0.4]),
            10 => Some(vec![0.05, 0.05, 0.05, 0.05, 0.05, 0.05, 0.1, 0.2, 0.2, 0.2]),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SampleSize {
    Fixed(usize),
    /// Drawn uniformly from {min, …, max} for every replicate.
    Range { min: usize, max: usize },
}

impl SampleSize {
    pub fn min(self) -> usize {
        match self {
            SampleSize::Fixed(n) => n,
            SampleSize::Range { min, .. } => min,
        }
    }
}

impl fmt::Display for SampleSize {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SampleSize::Fixed(n) => write!(f, "{n}"),
            SampleSize::Range { min, max } => write!(f, "{min}..{max}"),
        }
    }
}

/// One simulation cell: a single β and K.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioSpec {
    pub name: String,
    pub model: Model,
    pub beta: f64,
    pub k: usize,
    pub partition: Partition,
    pub n: SampleSize,
    pub replicates: usize,
    pub seed: u64,
}

impl ScenarioSpec {
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Config(format!("scenario '{}': {msg}", self.name)));
        if !self.beta.is_finite() {
            return fail(format!("beta must be finite, got {}", self.beta));
        }
        if self.k < 2 {
            return fail(format!("K must be at least 2, got {}", self.k));
        }
        if self.replicates == 0 {
            return fail("replicates must be at least 1".into());
        }
        if let SampleSize::Range { min, max } = self.n {
            if min > max {
                return fail(format!("n range is empty ({min} > {max})"));
            }
        }
        if self.n.min() < MIN_PART_SIZE * self.k {
            return fail(format!(
                "N = {} cannot hold {} studies of at least {MIN_PART_SIZE} observations",
                self.n.min(),
                self.k
            ));
        }
        if let Partition::Unequal(w) = &self.partition {
            if w.len() != self.k {
                return fail(format!("{} unequal weights given for K = {}", w.len(), self.k));
            }
            if w.iter().any(|&x| !(x > 0.0) || !x.is_finite()) {
                return fail(format!("unequal weights must be positive, got {w:?}"));
            }
            let total: f64 = w.iter().sum();
            if (total - 1.0).abs() > 1e-9 {
                return fail(format!("unequal weights sum to {total}, not 1"));
            }
        }
        Ok(())
    }
}

/// The on-disk grid description.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    name: String,
    model: Model,
    beta: Vec<f64>,
    k: Vec<usize>,
    partition: String,
    n: SampleSize,
    replicates: usize,
    seed: u64,
    #[serde(default)]
    uneq_weights: BTreeMap<String, Vec<f64>>,
}

/// Parses a scenario grid and expands it into validated cells, ordered by
/// β then K.
pub fn parse_scenarios(text: &str) -> Result<Vec<ScenarioSpec>> {
    let file: ScenarioFile = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
    if file.beta.is_empty() || file.k.is_empty() {
        return Err(Error::Config("beta and k must each list at least one value".into()));
    }
    let mut custom = BTreeMap::new();
    for (key, w) in file.uneq_weights {
        let k: usize = key
            .parse()
            .map_err(|_| Error::Config(format!("uneq_weights key '{key}' is not a study count")))?;
        custom.insert(k, w);
    }
    let mut specs = Vec::with_capacity(file.beta.len() * file.k.len());
    for &beta in &file.beta {
        for &k in &file.k {
            let partition = match file.partition.to_ascii_lowercase().as_str() {
                "eq" => Partition::Equal,
                "random" => Partition::Random,
                "uneq" => Partition::Unequal(
                    custom
                        .get(&k)
                        .cloned()
                        .or_else(|| Partition::unequal_preset(k))
                        .ok_or_else(|| Error::Config(format!("no unequal weights for K = {k}; add them under [uneq_weights]")))?,
                ),
                other => return Err(Error::Config(format!("partition must be eq, uneq or random, got '{other}'"))),
            };
            let spec = ScenarioSpec {
                name: file.name.clone(),
                model: file.model,
                beta,
                k,
                partition,
                n: file.n,
                replicates: file.replicates,
                seed: file.seed,
            };
            spec.validate()?;
            specs.push(spec);
        }
    }
    Ok(specs)
}

pub fn load_scenarios(path: impl AsRef<Path>) -> Result<Vec<ScenarioSpec>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_scenarios(&text)
}
