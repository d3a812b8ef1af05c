//! Closed-form path counts and the exact distribution of the comparison
//! statistic L = #{i ≤ k : X(i) < Y(i)}.
//!
//! `count_terminal(x, y, l)` is the number of paths ending at (x, y) with
//! horizontal exceedance l. `count_k_exceedance(spec, l)` is the number of
//! paths in Γ(m, n) whose first k horizontal edges include exactly l below
//! the diagonal. Dividing by C(m + n, m) gives Pr(L = l).

use std::fmt::Write as _;

use num_traits::Zero;
use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::exactmath::{ballot, binomial, catalan, Count, ExactProb};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CountingError {
    #[error("invalid comparison parameters: need 0 < k <= m <= n, got m = {m}, n = {n}, k = {k}")]
    InvalidSpec { m: usize, n: usize, k: usize },
    #[error("l = {l} exceeds k = {k}")]
    LevelOutOfRange { l: usize, k: usize },
    #[error("internal consistency failure: counts sum to {sum}, expected C(m+n, m) = {expected}")]
    SumMismatch { sum: String, expected: String },
}

/// Validated (m, n, k) with 0 < k ≤ m ≤ n.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ComparisonSpec {
    m: usize,
    n: usize,
    k: usize,
}

impl ComparisonSpec {
    pub fn new(m: usize, n: usize, k: usize) -> Result<Self, CountingError> {
        if k == 0 || k > m || m > n {
            return Err(CountingError::InvalidSpec { m, n, k });
        }
        Ok(Self { m, n, k })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// |Γ(m, n)| = C(m + n, m).
    pub fn total_paths(&self) -> Count {
        binomial((self.m + self.n) as u64, self.m as i64)
    }
}

/// Σ_{i = lo}^{hi} C_i · b(x − i, y − i), for x > y.
fn last_crossing_sum(x: u64, y: u64, lo: u64, hi: u64) -> Count {
    (lo..=hi)
        .map(|i| catalan(i) * ballot(x - i, y - i).expect("x - i > y - i"))
        .sum()
}

/// Number of paths ending at (x, y) with horizontal exceedance `l`.
pub fn count_terminal(x: u64, y: u64, l: u64) -> Count {
    use std::cmp::Ordering;
    match x.cmp(&y) {
        Ordering::Equal if l <= x => catalan(x),
        Ordering::Equal => Count::zero(),
        Ordering::Greater if x - y <= l && l <= x => last_crossing_sum(x, y, x - l, y),
        Ordering::Greater => Count::zero(),
        // Reflection through y = x: exceedances l and max(x, y) − l swap.
        Ordering::Less if l <= y => count_terminal(y, x, y - l),
        Ordering::Less => Count::zero(),
    }
}

/// Precomputed pieces of the k-exceedance formula for a fixed spec.
///
/// `terms[j][i]` holds C_i · b(k − 1 − i, j − i) for 0 ≤ i ≤ j < k − 1, so the
/// inner last-crossing sums become partial sums over a row.
struct KExceedanceKernel {
    spec: ComparisonSpec,
    terms: Vec<Vec<Count>>,
    catalan_k_minus_1: Count,
}

impl KExceedanceKernel {
    fn new(spec: ComparisonSpec) -> Self {
        let k = spec.k as u64;
        let catalans: Vec<Count> = (0..k).map(catalan).collect();
        let terms = (0..k.saturating_sub(1))
            .map(|j| {
                (0..=j)
                    .map(|i| &catalans[i as usize] * ballot(k - 1 - i, j - i).expect("k - 1 > j"))
                    .collect()
            })
            .collect();
        Self { spec, terms, catalan_k_minus_1: catalans[(k - 1) as usize].clone() }
    }

    fn row_sum(&self, j: usize, from: usize) -> Count {
        self.terms[j].get(from..).map(|t| t.iter().sum()).unwrap_or_else(Count::zero)
    }

    /// Paths that first reach the line y = k at (j, k).
    fn top_exit(&self, j: usize, l: usize) -> Count {
        let ComparisonSpec { m, n, k } = self.spec;
        let tail = binomial((m + n - k - j) as u64, (n - k) as i64);
        if j == k - 1 {
            tail * &self.catalan_k_minus_1
        } else {
            tail * self.row_sum(j, l)
        }
    }

    /// Paths that first reach the line x = k at (k, j).
    fn right_exit(&self, j: usize, l: usize) -> Count {
        let ComparisonSpec { m, n, k } = self.spec;
        let tail = binomial((m + n - k - j) as u64, (m - k) as i64);
        if j == k - 1 {
            tail * &self.catalan_k_minus_1
        } else {
            tail * self.row_sum(j, k - l)
        }
    }

    fn count(&self, l: usize) -> Count {
        let k = self.spec.k;
        let top: Count = (0..k).filter(|&j| j >= l).map(|j| self.top_exit(j, l)).sum();
        let right: Count = (0..k).filter(|&j| j + l >= k).map(|j| self.right_exit(j, l)).sum();
        top + right
    }
}

/// Number of paths in Γ(m, n) with k-horizontal exceedance `l`.
pub fn count_k_exceedance(spec: &ComparisonSpec, l: usize) -> Result<Count, CountingError> {
    if l > spec.k {
        return Err(CountingError::LevelOutOfRange { l, k: spec.k });
    }
    Ok(KExceedanceKernel::new(*spec).count(l))
}

/// Which labeling the table is reported in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    /// The caller's X has the smaller (or equal) size.
    Direct,
    /// The caller's X is larger; computed on the swapped spec with l ↦ k − l.
    Reflected,
}

impl Orientation {
    pub fn as_str(self) -> &'static str {
        match self {
            Orientation::Direct => "direct",
            Orientation::Reflected => "reflected",
        }
    }
}

/// Exact distribution of L for one spec.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PmfTable {
    spec: ComparisonSpec,
    orientation: Orientation,
    total: Count,
    counts: Vec<Count>,
    probs: Vec<ExactProb>,
}

impl PmfTable {
    fn from_counts(
        spec: ComparisonSpec,
        orientation: Orientation,
        counts: Vec<Count>,
    ) -> Result<Self, CountingError> {
        let total = spec.total_paths();
        let sum: Count = counts.iter().sum();
        if sum != total {
            return Err(CountingError::SumMismatch {
                sum: sum.to_string(),
                expected: total.to_string(),
            });
        }
        let probs = counts
            .iter()
            .map(|c| ExactProb::new(c.clone(), total.clone()).expect("count bounded by total"))
            .collect();
        Ok(Self { spec, orientation, total, counts, probs })
    }

    /// The canonical spec (m ≤ n) the counts were computed from.
    pub fn spec(&self) -> ComparisonSpec {
        self.spec
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    /// Size of the caller's X sample.
    pub fn m(&self) -> usize {
        match self.orientation {
            Orientation::Direct => self.spec.m,
            Orientation::Reflected => self.spec.n,
        }
    }

    /// Size of the caller's Y sample.
    pub fn n(&self) -> usize {
        match self.orientation {
            Orientation::Direct => self.spec.n,
            Orientation::Reflected => self.spec.m,
        }
    }

    pub fn k(&self) -> usize {
        self.spec.k
    }

    pub fn total(&self) -> &Count {
        &self.total
    }

    pub fn counts(&self) -> &[Count] {
        &self.counts
    }

    pub fn probs(&self) -> &[ExactProb] {
        &self.probs
    }

    pub fn prob(&self, l: usize) -> ExactProb {
        self.probs.get(l).cloned().unwrap_or_else(ExactProb::zero)
    }

    /// The same distribution relabeled by l ↦ k − l.
    pub fn reflected(&self) -> Self {
        let orientation = match self.orientation {
            Orientation::Direct => Orientation::Reflected,
            Orientation::Reflected => Orientation::Direct,
        };
        Self {
            spec: self.spec,
            orientation,
            total: self.total.clone(),
            counts: self.counts.iter().rev().cloned().collect(),
            probs: self.probs.iter().rev().cloned().collect(),
        }
    }

    pub fn to_json(&self) -> Value {
        let counts: Map<String, Value> = self
            .counts
            .iter()
            .enumerate()
            .map(|(l, c)| (l.to_string(), Value::String(c.to_string())))
            .collect();
        let probs: Map<String, Value> = self
            .probs
            .iter()
            .enumerate()
            .map(|(l, p)| (l.to_string(), Value::String(p.to_string())))
            .collect();
        let mut out = json!({
            "m": self.m(),
            "n": self.n(),
            "k": self.k(),
            "total": self.total.to_string(),
            "counts": counts,
            "probs": probs,
        });
        if self.orientation == Orientation::Reflected {
            out["reduction"] = json!(self.orientation.as_str());
        }
        out
    }

    pub fn to_csv(&self, digits: usize) -> String {
        let mut out = String::from("l,count,prob_exact,prob_decimal\n");
        for (l, (c, p)) in self.counts.iter().zip(&self.probs).enumerate() {
            writeln!(out, "{l},{c},{p},{}", p.to_decimal(digits)).expect("writing to a String");
        }
        out
    }
}

/// Exact PMF of L for `spec`. Fails if the counts do not sum to C(m + n, m).
pub fn pmf(spec: &ComparisonSpec) -> Result<PmfTable, CountingError> {
    let kernel = KExceedanceKernel::new(*spec);
    let counts = (0..=spec.k).map(|l| kernel.count(l)).collect();
    PmfTable::from_counts(*spec, Orientation::Direct, counts)
}

/// PMF for arbitrary sample sizes. When `m > n` the swapped spec is used
/// and the result relabeled by l ↦ k − l.
pub fn pmf_any_order(m: usize, n: usize, k: usize) -> Result<PmfTable, CountingError> {
    if m <= n {
        pmf(&ComparisonSpec::new(m, n, k)?)
    } else {
        let swapped = ComparisonSpec::new(n, m, k).map_err(|_| CountingError::InvalidSpec { m, n, k })?;
        Ok(pmf(&swapped)?.reflected())
    }
}

/// Pr(L ≤ l).
pub fn cdf(table: &PmfTable, l: i64) -> ExactProb {
    if l < 0 {
        return ExactProb::zero();
    }
    if l as usize >= table.k() {
        return ExactProb::one();
    }
    let mass: Count = table.counts[..=l as usize].iter().sum();
    ExactProb::new(mass, table.total.clone()).expect("partial sum bounded by total")
}

/// Pr(L ≥ l).
pub fn survival(table: &PmfTable, l: i64) -> ExactProb {
    if l <= 0 {
        return ExactProb::one();
    }
    if l as usize > table.k() {
        return ExactProb::zero();
    }
    let mass: Count = table.counts[l as usize..].iter().sum();
    ExactProb::new(mass, table.total.clone()).expect("partial sum bounded by total")
}
