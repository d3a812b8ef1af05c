//! Exact two-sample test based on the statistic L, the number of the first
//! k order-statistic comparisons in which X is smaller than Y.
//!
//! Under the null hypothesis that all observations are c.i.i.d., L has the
//! exact law computed in [`crate::counting`], whatever the common
//! distribution.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use num_traits::Zero;
use serde_json::{json, Value};
use thiserror::Error;

use crate::counting::{cdf, pmf_any_order, survival, CountingError, Orientation, PmfTable};
use crate::exactmath::{Count, ExactProb};
use crate::montecarlo::{observed_l_of, SimulationError};

/// Convention used for two-sided p-values; carried in every report.
pub const TWO_SIDED_CONVENTION: &str =
    "sum of pmf(j) over all j with pmf(j) <= pmf(observed_l), capped at 1";

#[derive(Debug, Error)]
pub enum InferenceError {
    #[error("exact tie between X({rank}) and Y({rank}) at value {value}; jitter or rank-transform the data before testing")]
    Tie { rank: usize, value: f64 },
    #[error(transparent)]
    Spec(#[from] CountingError),
    #[error("k = {k} exceeds the smaller sample size {limit}")]
    DepthTooLarge { k: usize, limit: usize },
    #[error("sample value at position {index} is not finite")]
    NonFinite { index: usize },
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}:{line}: {message}")]
    Parse { path: PathBuf, line: usize, message: String },
    #[error("unknown alternative {0:?}; expected less, greater or two-sided")]
    UnknownAlternative(String),
}

impl From<SimulationError> for InferenceError {
    fn from(e: SimulationError) -> Self {
        match e {
            SimulationError::Tie { rank, value } => InferenceError::Tie { rank, value },
            SimulationError::DepthTooLarge { k, limit } => InferenceError::DepthTooLarge { k, limit },
            SimulationError::NonFinite { index } => InferenceError::NonFinite { index },
            other => unreachable!("not produced by observed_l: {other}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Alternative {
    /// Small L is evidence: p = Pr(L ≤ l).
    Less,
    /// Large L is evidence: p = Pr(L ≥ l).
    Greater,
    TwoSided,
}

impl Alternative {
    pub fn name(self) -> &'static str {
        match self {
            Alternative::Less => "less",
            Alternative::Greater => "greater",
            Alternative::TwoSided => "two-sided",
        }
    }
}

impl fmt::Display for Alternative {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Alternative {
    type Err = InferenceError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "less" => Ok(Alternative::Less),
            "greater" => Ok(Alternative::Greater),
            "two-sided" | "two_sided" | "twosided" => Ok(Alternative::TwoSided),
            _ => Err(InferenceError::UnknownAlternative(s.to_string())),
        }
    }
}

/// Exact p-value of an observed `l` under `table`.
pub fn p_value(table: &PmfTable, observed: usize, alternative: Alternative) -> ExactProb {
    match alternative {
        Alternative::Greater => survival(table, observed as i64),
        Alternative::Less => cdf(table, observed as i64),
        Alternative::TwoSided => {
            let threshold = table.prob(observed);
            let mass: Count = table
                .probs()
                .iter()
                .zip(table.counts())
                .filter(|(p, _)| **p <= threshold)
                .map(|(_, c)| c)
                .sum();
            let mass = mass.min(table.total().clone());
            ExactProb::new(mass, table.total().clone()).expect("mass capped at total")
        }
    }
}

/// Size of the rejection region {l : p(l) ≤ alpha}, i.e. the exact level the
/// test attains at nominal `alpha`.
pub fn attained_level(table: &PmfTable, alpha: f64, alternative: Alternative) -> ExactProb {
    let mass: Count = (0..=table.k())
        .filter(|&l| p_value(table, l, alternative).to_f64() <= alpha)
        .map(|l| table.counts()[l].clone())
        .sum();
    if mass.is_zero() {
        return ExactProb::zero();
    }
    ExactProb::new(mass, table.total().clone()).expect("region mass bounded by total")
}

#[derive(Debug, Clone, PartialEq)]
pub struct TestReport {
    pub observed_l: usize,
    pub alternative: Alternative,
    pub p_value: ExactProb,
    pub pmf_used: PmfTable,
}

impl TestReport {
    pub fn m(&self) -> usize {
        self.pmf_used.m()
    }

    pub fn n(&self) -> usize {
        self.pmf_used.n()
    }

    pub fn k(&self) -> usize {
        self.pmf_used.k()
    }

    pub fn reduction(&self) -> Orientation {
        self.pmf_used.orientation()
    }

    pub fn to_json(&self, digits: usize) -> Value {
        json!({
            "m": self.m(),
            "n": self.n(),
            "k": self.k(),
            "observed_l": self.observed_l,
            "alternative": self.alternative.name(),
            "p_value": self.p_value.to_string(),
            "p_value_decimal": self.p_value.to_decimal(digits),
            "reduction": self.reduction().as_str(),
            "two_sided_convention": TWO_SIDED_CONVENTION,
            "pmf": self.pmf_used.to_json(),
        })
    }
}

/// Run the exact test. Samples keep their labels; when |x| > |y| the null law
/// is obtained from the swapped sizes by l ↦ k − l.
pub fn run_test(
    x_sample: &[f64],
    y_sample: &[f64],
    k: usize,
    alternative: Alternative,
) -> Result<TestReport, InferenceError> {
    if let Some(index) = x_sample.iter().chain(y_sample).position(|v| !v.is_finite()) {
        return Err(InferenceError::NonFinite { index });
    }
    let observed = observed_l_of(x_sample, y_sample, k)?;
    let table = pmf_any_order(x_sample.len(), y_sample.len(), k)?;
    Ok(TestReport {
        observed_l: observed,
        alternative,
        p_value: p_value(&table, observed, alternative),
        pmf_used: table,
    })
}

/// Parse a sample: one number per line; blank lines and lines starting with
/// `#` are skipped. `origin` labels diagnostics.
pub fn parse_sample(text: &str, origin: &Path) -> Result<Vec<f64>, InferenceError> {
    let mut values = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let parse_err = |message: String| InferenceError::Parse {
            path: origin.to_path_buf(),
            line: i + 1,
            message,
        };
        let v: f64 = line
            .parse()
            .map_err(|_| parse_err(format!("not a decimal number: {line:?}")))?;
        if !v.is_finite() {
            return Err(parse_err(format!("value is not finite: {line:?}")));
        }
        values.push(v);
    }
    Ok(values)
}

pub fn read_sample_file(path: &Path) -> Result<Vec<f64>, InferenceError> {
    let text = fs::read_to_string(path).map_err(|source| InferenceError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_sample(&text, path)
}
