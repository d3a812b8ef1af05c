//! Seeded simulation of the two-sample experiment: draw m + n c.i.i.d.
//! values, sort each side, and count the first k rank-wise wins of X.
//!
//! Randomness comes from ChaCha8. Trials are grouped into fixed-size lanes;
//! lane `i` uses stream `i` of the generator seeded with the caller's seed,
//! so results do not depend on how many threads run the lanes.

use std::fmt;
use std::str::FromStr;

use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, Open01, Pareto, StandardNormal};
use rayon::prelude::*;
use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::counting::ComparisonSpec;
use crate::exactmath::{Count, ExactProb};

/// Name of the generator, as reported by the CLI.
pub const RNG_ALGORITHM: &str = "ChaCha8 (rand_chacha), stream per lane";

/// Trials per lane.
const LANE_TRIALS: u64 = 1 << 14;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimulationError {
    #[error("tie between X({rank}) and Y({rank}) at value {value}")]
    Tie { rank: usize, value: f64 },
    #[error("k = {k} exceeds min(m, n) = {limit}")]
    DepthTooLarge { k: usize, limit: usize },
    #[error("sample contains a non-finite value at position {index}")]
    NonFinite { index: usize },
    #[error("trials must be positive")]
    NoTrials,
    #[error("unknown distribution {0:?}; expected uniform, exponential, normal or pareto")]
    UnknownDistribution(String),
}

/// Continuous source laws for the simulation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SourceDistribution {
    /// Uniform on the open interval (0, 1).
    Uniform,
    /// Exponential with rate 1.
    Exponential,
    /// Standard normal.
    Normal,
    /// Pareto with shape 2 and scale 1.
    Pareto,
}

impl SourceDistribution {
    pub const ALL: [SourceDistribution; 4] = [
        SourceDistribution::Uniform,
        SourceDistribution::Exponential,
        SourceDistribution::Normal,
        SourceDistribution::Pareto,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SourceDistribution::Uniform => "uniform",
            SourceDistribution::Exponential => "exponential",
            SourceDistribution::Normal => "normal",
            SourceDistribution::Pareto => "pareto",
        }
    }

    fn sample<R: Rng + ?Sized>(self, rng: &mut R) -> f64 {
        match self {
            SourceDistribution::Uniform => Open01.sample(rng),
            SourceDistribution::Exponential => Exp1.sample(rng),
            SourceDistribution::Normal => StandardNormal.sample(rng),
            SourceDistribution::Pareto => Pareto::new(1.0, 2.0)
                .expect("valid pareto parameters")
                .sample(rng),
        }
    }

    fn fill<R: Rng + ?Sized>(self, rng: &mut R, out: &mut [f64]) {
        for v in out {
            *v = self.sample(rng);
        }
    }
}

impl fmt::Display for SourceDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SourceDistribution {
    type Err = SimulationError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|d| d.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| SimulationError::UnknownDistribution(s.to_string()))
    }
}

/// One realization of the two samples.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSystem {
    x_values: Vec<f64>,
    y_values: Vec<f64>,
}

impl SampleSystem {
    pub fn new(x_values: Vec<f64>, y_values: Vec<f64>) -> Result<Self, SimulationError> {
        if let Some(index) = x_values.iter().chain(&y_values).position(|v| !v.is_finite()) {
            return Err(SimulationError::NonFinite { index });
        }
        Ok(Self { x_values, y_values })
    }

    pub fn x_values(&self) -> &[f64] {
        &self.x_values
    }

    pub fn y_values(&self) -> &[f64] {
        &self.y_values
    }
}

pub fn draw_system(dist: SourceDistribution, m: usize, n: usize, seed: u64) -> SampleSystem {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x_values = vec![0.0; m];
    let mut y_values = vec![0.0; n];
    dist.fill(&mut rng, &mut x_values);
    dist.fill(&mut rng, &mut y_values);
    SampleSystem { x_values, y_values }
}

/// Count of i ≤ k with X(i) < Y(i). Both slices must already be sorted.
fn wins_sorted(xs: &[f64], ys: &[f64], k: usize) -> Result<usize, SimulationError> {
    let mut wins = 0;
    for (rank, (x, y)) in xs[..k].iter().zip(&ys[..k]).enumerate() {
        if x == y {
            return Err(SimulationError::Tie { rank: rank + 1, value: *x });
        }
        if x < y {
            wins += 1;
        }
    }
    Ok(wins)
}

/// Raw-slice form of [`observed_l`].
pub fn observed_l_of(x: &[f64], y: &[f64], k: usize) -> Result<usize, SimulationError> {
    let limit = x.len().min(y.len());
    if k > limit {
        return Err(SimulationError::DepthTooLarge { k, limit });
    }
    let mut xs = x.to_vec();
    let mut ys = y.to_vec();
    xs.sort_by(f64::total_cmp);
    ys.sort_by(f64::total_cmp);
    wins_sorted(&xs, &ys, k)
}

/// Number of the first `k` order-statistic comparisons won by X.
pub fn observed_l(system: &SampleSystem, k: usize) -> Result<usize, SimulationError> {
    observed_l_of(&system.x_values, &system.y_values, k)
}

fn lane_rng(seed: u64, lane: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(lane);
    rng
}

#[derive(Debug, Clone, Default)]
struct Tally {
    counts: Vec<u64>,
    ties: u64,
}

impl Tally {
    fn merge(mut self, other: Tally) -> Tally {
        if self.counts.len() < other.counts.len() {
            self.counts.resize(other.counts.len(), 0);
        }
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        self.ties += other.ties;
        self
    }
}

fn run_lane(spec: &ComparisonSpec, dist: SourceDistribution, seed: u64, lane: u64, trials: u64) -> Tally {
    let mut rng = lane_rng(seed, lane);
    let mut xs = vec![0.0; spec.m()];
    let mut ys = vec![0.0; spec.n()];
    let mut tally = Tally { counts: vec![0; spec.k() + 1], ties: 0 };
    for _ in 0..trials {
        loop {
            dist.fill(&mut rng, &mut xs);
            dist.fill(&mut rng, &mut ys);
            xs.sort_unstable_by(f64::total_cmp);
            ys.sort_unstable_by(f64::total_cmp);
            match wins_sorted(&xs, &ys, spec.k()) {
                Ok(l) => {
                    tally.counts[l] += 1;
                    break;
                }
                // redraw the whole trial from the continuing lane stream
                Err(_) => tally.ties += 1,
            }
        }
    }
    tally
}

/// Empirical distribution of L from repeated simulated experiments.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulatedPmf {
    pub spec: ComparisonSpec,
    pub dist: SourceDistribution,
    pub trials: u64,
    pub seed: u64,
    pub counts: Vec<u64>,
    pub ties_resampled: u64,
}

impl SimulatedPmf {
    pub fn frequency(&self, l: usize) -> f64 {
        self.counts.get(l).copied().unwrap_or(0) as f64 / self.trials as f64
    }

    pub fn frequencies(&self) -> Vec<f64> {
        (0..self.counts.len()).map(|l| self.frequency(l)).collect()
    }

    /// Frequencies as exact fractions count / trials.
    pub fn exact_frequencies(&self) -> Vec<ExactProb> {
        self.counts
            .iter()
            .map(|&c| ExactProb::new(Count::from(c), Count::from(self.trials)).expect("count <= trials"))
            .collect()
    }

    /// Largest |frequency − reference| over all cells.
    pub fn max_abs_deviation(&self, reference: &[ExactProb]) -> f64 {
        reference
            .iter()
            .enumerate()
            .map(|(l, p)| (self.frequency(l) - p.to_f64()).abs())
            .fold(0.0, f64::max)
    }

    pub fn to_json(&self, digits: usize) -> Value {
        let exact = self.exact_frequencies();
        let counts: Map<String, Value> = self
            .counts
            .iter()
            .enumerate()
            .map(|(l, c)| (l.to_string(), Value::String(c.to_string())))
            .collect();
        let probs: Map<String, Value> = exact
            .iter()
            .enumerate()
            .map(|(l, p)| (l.to_string(), Value::String(p.to_string())))
            .collect();
        let decimals: Map<String, Value> = exact
            .iter()
            .enumerate()
            .map(|(l, p)| (l.to_string(), Value::String(p.to_decimal(digits))))
            .collect();
        json!({
            "m": self.spec.m(),
            "n": self.spec.n(),
            "k": self.spec.k(),
            "total": self.trials.to_string(),
            "counts": counts,
            "probs": probs,
            "probs_decimal": decimals,
            "metadata": {
                "trials": self.trials.to_string(),
                "dist": self.dist.name(),
                "seed": self.seed.to_string(),
                "ties_resampled": self.ties_resampled.to_string(),
                "rng": RNG_ALGORITHM,
            },
        })
    }
}

/// Simulate `trials` experiments and tabulate L.
pub fn simulate_pmf(
    spec: &ComparisonSpec,
    dist: SourceDistribution,
    trials: u64,
    seed: u64,
) -> Result<SimulatedPmf, SimulationError> {
    if trials == 0 {
        return Err(SimulationError::NoTrials);
    }
    let lanes = trials.div_ceil(LANE_TRIALS);
    let tally = (0..lanes)
        .into_par_iter()
        .map(|lane| {
            let start = lane * LANE_TRIALS;
            let size = LANE_TRIALS.min(trials - start);
            run_lane(spec, dist, seed, lane, size)
        })
        .reduce(Tally::default, Tally::merge);
    Ok(SimulatedPmf {
        spec: *spec,
        dist,
        trials,
        seed,
        counts: tally.counts,
        ties_resampled: tally.ties,
    })
}

/// For each index j, the frequency with which X_j is the `rank`-th smallest
/// of `size` draws (1-based rank).
pub fn rank_position_frequencies(
    dist: SourceDistribution,
    size: usize,
    rank: usize,
    trials: u64,
    seed: u64,
) -> Vec<f64> {
    assert!(rank >= 1 && rank <= size, "rank must lie in 1..=size");
    let lanes = trials.div_ceil(LANE_TRIALS);
    let counts = (0..lanes)
        .into_par_iter()
        .map(|lane| {
            let mut rng = lane_rng(seed, lane);
            let size_lane = LANE_TRIALS.min(trials - lane * LANE_TRIALS);
            let mut values = vec![0.0; size];
            let mut order: Vec<usize> = (0..size).collect();
            let mut counts = vec![0u64; size];
            for _ in 0..size_lane {
                dist.fill(&mut rng, &mut values);
                order.sort_unstable_by(|&a, &b| values[a].total_cmp(&values[b]));
                counts[order[rank - 1]] += 1;
            }
            counts
        })
        .reduce(
            || vec![0u64; size],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        );
    counts.into_iter().map(|c| c as f64 / trials as f64).collect()
}

/// Six binomial standard deviations of a proportion estimated from `trials`.
pub fn six_sigma_tolerance(p: &ExactProb, trials: u64) -> f64 {
    let p = p.as_rational().to_f64().unwrap_or(0.0);
    6.0 * (p * (1.0 - p) / trials as f64).sqrt()
}
