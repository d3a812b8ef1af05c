//! Monotone lattice paths over {East, North}, their exceedance statistics,
//! the path ↔ walk mapping, and exhaustive enumeration of Γ(m, n).
//!
//! Edge classification: a horizontal edge (a, b) → (a + 1, b) lies below
//! the diagonal iff b ≤ a; a vertical edge (a, b) → (a, b + 1) lies above the
//! diagonal iff b ≥ a.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_traits::Zero;
use serde_json::{Map, Value};
use thiserror::Error;

use crate::exactmath::{binomial, Count};

/// Default bound on m + n for exhaustive enumeration.
pub const DEFAULT_ENUMERATION_CAP: usize = 26;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PathError {
    #[error("empty path text")]
    Empty,
    #[error("invalid step character {found:?} at index {index}; expected 'R' or 'U'")]
    InvalidStep { index: usize, found: char },
    #[error("k = {k} exceeds min(m, n) = {limit} for a path ending at ({m}, {n})")]
    DepthTooLarge { k: usize, limit: usize, m: usize, n: usize },
    #[error("prefix length {requested} exceeds walk length {length}")]
    PrefixTooLong { requested: usize, length: usize },
    #[error("invalid enumeration parameters: need 0 < k <= m <= n, got m = {m}, n = {n}, k = {k}")]
    InvalidParameters { m: usize, n: usize, k: usize },
    #[error("m + n = {total} exceeds the enumeration cap of {cap}")]
    CapExceeded { total: usize, cap: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Step {
    /// (1, 0), written `R`.
    East,
    /// (0, 1), written `U`.
    North,
}

impl Step {
    pub fn symbol(self) -> char {
        match self {
            Step::East => 'R',
            Step::North => 'U',
        }
    }

    pub fn flipped(self) -> Step {
        match self {
            Step::East => Step::North,
            Step::North => Step::East,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LatticePath {
    steps: Vec<Step>,
}

impl LatticePath {
    pub fn new(steps: Vec<Step>) -> Self {
        Self { steps }
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// (number of East steps, number of North steps).
    pub fn terminal(&self) -> (usize, usize) {
        let east = self.steps.iter().filter(|&&s| s == Step::East).count();
        (east, self.steps.len() - east)
    }

    /// Mirror image through y = x.
    pub fn reflected(&self) -> Self {
        Self::new(self.steps.iter().map(|s| s.flipped()).collect())
    }

    pub fn exceedance(&self, k: usize) -> Result<ExceedanceProfile, PathError> {
        let (m, n) = self.terminal();
        let limit = m.min(n);
        if k > limit {
            return Err(PathError::DepthTooLarge { k, limit, m, n });
        }
        Ok(profile_of_steps(&self.steps, k))
    }

    pub fn to_walk(&self) -> WalkView {
        WalkView::from_steps(&self.steps)
    }
}

/// Parse an `R`/`U` string.
pub fn parse_path(text: &str) -> Result<LatticePath, PathError> {
    if text.is_empty() {
        return Err(PathError::Empty);
    }
    text.chars()
        .enumerate()
        .map(|(index, c)| match c {
            'R' => Ok(Step::East),
            'U' => Ok(Step::North),
            found => Err(PathError::InvalidStep { index, found }),
        })
        .collect::<Result<Vec<_>, _>>()
        .map(LatticePath::new)
}

pub fn format_path(path: &LatticePath) -> String {
    path.steps.iter().map(|s| s.symbol()).collect()
}

impl fmt::Display for LatticePath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_path(self))
    }
}

impl FromStr for LatticePath {
    type Err = PathError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_path(s)
    }
}

/// Horizontal/vertical exceedance of a path, overall and over the first `k`
/// edges of each orientation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ExceedanceProfile {
    pub he: usize,
    pub ve: usize,
    pub he_k: usize,
    pub ve_k: usize,
    pub k: usize,
}

fn profile_of_steps(steps: &[Step], k: usize) -> ExceedanceProfile {
    let (mut a, mut b) = (0usize, 0usize);
    let mut profile = ExceedanceProfile { he: 0, ve: 0, he_k: 0, ve_k: 0, k };
    for &step in steps {
        match step {
            Step::East => {
                if b <= a {
                    profile.he += 1;
                    if a < k {
                        profile.he_k += 1;
                    }
                }
                a += 1;
            }
            Step::North => {
                if b >= a {
                    profile.ve += 1;
                    if b < k {
                        profile.ve_k += 1;
                    }
                }
                b += 1;
            }
        }
    }
    profile
}

/// HE_k only; the enumeration hot path.
fn he_k_of_steps(steps: &[Step], k: usize) -> usize {
    let (mut a, mut b) = (0usize, 0usize);
    let mut he_k = 0;
    for &step in steps {
        if a >= k {
            break;
        }
        match step {
            Step::East => {
                if b <= a {
                    he_k += 1;
                }
                a += 1;
            }
            Step::North => b += 1,
        }
    }
    he_k
}

/// ±1 walk on the integers: East → +1, North → −1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WalkView {
    increments: Vec<i8>,
    positions: Vec<i64>,
}

impl WalkView {
    fn from_steps(steps: &[Step]) -> Self {
        let increments: Vec<i8> = steps
            .iter()
            .map(|s| match s {
                Step::East => 1,
                Step::North => -1,
            })
            .collect();
        let mut positions = Vec::with_capacity(increments.len() + 1);
        positions.push(0i64);
        let mut here = 0i64;
        for &d in &increments {
            here += i64::from(d);
            positions.push(here);
        }
        Self { increments, positions }
    }

    pub fn increments(&self) -> &[i8] {
        &self.increments
    }

    pub fn positions(&self) -> &[i64] {
        &self.positions
    }

    pub fn len(&self) -> usize {
        self.increments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.increments.is_empty()
    }

    pub fn final_position(&self) -> i64 {
        *self.positions.last().expect("positions always holds the origin")
    }
}

pub fn to_walk(path: &LatticePath) -> WalkView {
    path.to_walk()
}

/// Number of the first `num_steps` steps lying above zero. A step from p to
/// p' counts iff its midpoint is positive, i.e. p + p' > 0.
pub fn time_above_zero(walk: &WalkView, num_steps: usize) -> Result<usize, PathError> {
    if num_steps > walk.len() {
        return Err(PathError::PrefixTooLong { requested: num_steps, length: walk.len() });
    }
    Ok(walk.positions[..=num_steps]
        .windows(2)
        .filter(|w| w[0] + w[1] > 0)
        .count())
}

/// Every path in Γ(m, n), in lexicographic order with R < U.
pub struct PathIter {
    steps: Vec<Step>,
    done: bool,
}

impl PathIter {
    pub fn new(m: usize, n: usize) -> Self {
        let mut steps = vec![Step::East; m];
        steps.extend(std::iter::repeat_n(Step::North, n));
        Self { steps, done: false }
    }

    /// Advance to the lexicographic successor; false when exhausted.
    fn advance(steps: &mut [Step]) -> bool {
        // Rightmost R that has a U somewhere after it.
        let len = steps.len();
        let mut i = len;
        let mut seen_north = false;
        while i > 0 {
            i -= 1;
            match steps[i] {
                Step::North => seen_north = true,
                Step::East if seen_north => {
                    steps[i] = Step::North;
                    let tail = &mut steps[i + 1..];
                    let easts = tail.iter().filter(|&&s| s == Step::East).count() + 1;
                    for (j, s) in tail.iter_mut().enumerate() {
                        *s = if j < easts { Step::East } else { Step::North };
                    }
                    return true;
                }
                Step::East => {}
            }
        }
        false
    }

    fn for_each_steps(mut self, mut visit: impl FnMut(&[Step])) {
        if self.done {
            return;
        }
        loop {
            visit(&self.steps);
            if !Self::advance(&mut self.steps) {
                break;
            }
        }
    }
}

impl Iterator for PathIter {
    type Item = LatticePath;

    fn next(&mut self) -> Option<LatticePath> {
        if self.done {
            return None;
        }
        let current = LatticePath::new(self.steps.clone());
        if !Self::advance(&mut self.steps) {
            self.done = true;
        }
        Some(current)
    }
}

pub fn all_paths(m: usize, n: usize) -> PathIter {
    PathIter::new(m, n)
}

/// Histogram keyed by exceedance value; absent keys read as zero.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Histogram(BTreeMap<usize, Count>);

impl Histogram {
    pub fn get(&self, l: usize) -> Count {
        self.0.get(&l).cloned().unwrap_or_else(Count::zero)
    }

    pub fn total(&self) -> Count {
        self.0.values().sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &Count)> {
        self.0.iter().map(|(&l, c)| (l, c))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// JSON object with string keys and decimal-string counts.
    pub fn to_json(&self) -> Value {
        let map: Map<String, Value> = self
            .0
            .iter()
            .map(|(l, c)| (l.to_string(), Value::String(c.to_string())))
            .collect();
        Value::Object(map)
    }

    fn from_tallies(tallies: impl IntoIterator<Item = (usize, u64)>) -> Self {
        Self(tallies.into_iter().map(|(l, c)| (l, Count::from(c))).collect())
    }
}

fn check_cap(total: usize, cap: usize) -> Result<(), PathError> {
    if total > cap {
        return Err(PathError::CapExceeded { total, cap });
    }
    Ok(())
}

/// Brute-force histogram of HE_k over all of Γ(m, n). Every l in 0..=k is
/// present, zero counts included.
pub fn enumerate_exceedance_histogram(
    m: usize,
    n: usize,
    k: usize,
    cap: usize,
) -> Result<Histogram, PathError> {
    if k == 0 || k > m || m > n {
        return Err(PathError::InvalidParameters { m, n, k });
    }
    check_cap(m + n, cap)?;
    let mut tallies = vec![0u64; k + 1];
    PathIter::new(m, n).for_each_steps(|steps| tallies[he_k_of_steps(steps, k)] += 1);
    let hist = Histogram::from_tallies(tallies.into_iter().enumerate());
    debug_assert_eq!(hist.total(), binomial((m + n) as u64, m as i64));
    Ok(hist)
}

/// Brute-force histogram of HE over all paths ending at (x, y). Only
/// exceedance values that occur are present.
pub fn enumerate_terminal_histogram(x: usize, y: usize, cap: usize) -> Result<Histogram, PathError> {
    check_cap(x + y, cap)?;
    let mut tallies: BTreeMap<usize, u64> = BTreeMap::new();
    PathIter::new(x, y).for_each_steps(|steps| {
        *tallies.entry(profile_of_steps(steps, 0).he).or_default() += 1;
    });
    Ok(Histogram::from_tallies(tallies))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hist(pairs: &[(usize, u64)]) -> Histogram {
        Histogram::from_tallies(pairs.iter().copied())
    }

    #[test]
    fn parse_examples() {
        let p = parse_path("RUURRRRURU").unwrap();
        assert_eq!(p.terminal(), (6, 4));
        assert_eq!(parse_path("R").unwrap().terminal(), (1, 0));
        assert_eq!(
            parse_path("RXU"),
            Err(PathError::InvalidStep { index: 1, found: 'X' })
        );
        assert_eq!(parse_path(""), Err(PathError::Empty));
        assert_eq!("RRU".parse::<LatticePath>().unwrap().to_string(), "RRU");
    }

    #[test]
    fn worked_example_exceedances() {
        let p = parse_path("RUURRRRURU").unwrap();
        let e = p.exceedance(4).unwrap();
        assert_eq!((e.he, e.ve, e.he_k, e.ve_k), (5, 1, 3, 1));
    }

    #[test]
    fn small_exceedances() {
        let e = parse_path("RRU").unwrap().exceedance(1).unwrap();
        assert_eq!((e.he, e.ve, e.he_k, e.ve_k), (2, 0, 1, 0));
        let e = parse_path("URR").unwrap().exceedance(1).unwrap();
        assert_eq!((e.he, e.ve, e.he_k, e.ve_k), (1, 1, 0, 1));
        assert_eq!(
            parse_path("RRU").unwrap().exceedance(2),
            Err(PathError::DepthTooLarge { k: 2, limit: 1, m: 2, n: 1 })
        );
    }

    #[test]
    fn walk_examples() {
        let w = parse_path("RUURRRRURU").unwrap().to_walk();
        assert_eq!(w.increments(), &[1, -1, -1, 1, 1, 1, 1, -1, 1, -1]);
        assert_eq!(w.final_position(), 2);
        assert_eq!(time_above_zero(&w, 8).unwrap(), 6);
        assert_eq!(time_above_zero(&w, 0).unwrap(), 0);
        assert_eq!(
            time_above_zero(&w, 11),
            Err(PathError::PrefixTooLong { requested: 11, length: 10 })
        );

        let w = parse_path("R").unwrap().to_walk();
        assert_eq!((w.increments(), w.final_position()), (&[1i8][..], 1));
        let w = parse_path("UU").unwrap().to_walk();
        assert_eq!((w.increments(), w.final_position()), (&[-1i8, -1][..], -2));
        let w = parse_path("RRUU").unwrap().to_walk();
        assert_eq!(w.positions(), &[0, 1, 2, 1, 0]);
        assert_eq!(time_above_zero(&w, 4).unwrap(), 4);
    }

    #[test]
    fn enumeration_order_and_count() {
        let all: Vec<String> = all_paths(2, 2).map(|p| p.to_string()).collect();
        assert_eq!(all, ["RRUU", "RURU", "RUUR", "URRU", "URUR", "UURR"]);
        assert_eq!(all_paths(0, 3).count(), 1);
        assert_eq!(all_paths(7, 5).count(), 792);
    }

    #[test]
    fn exceedance_histograms() {
        assert_eq!(
            enumerate_exceedance_histogram(2, 2, 1, DEFAULT_ENUMERATION_CAP).unwrap(),
            hist(&[(0, 3), (1, 3)])
        );
        assert_eq!(
            enumerate_exceedance_histogram(2, 3, 2, DEFAULT_ENUMERATION_CAP).unwrap(),
            hist(&[(0, 5), (1, 3), (2, 2)])
        );
        assert_eq!(
            enumerate_exceedance_histogram(2, 2, 2, DEFAULT_ENUMERATION_CAP).unwrap(),
            hist(&[(0, 2), (1, 2), (2, 2)])
        );
    }

    #[test]
    fn terminal_histograms() {
        let cap = DEFAULT_ENUMERATION_CAP;
        assert_eq!(enumerate_terminal_histogram(2, 1, cap).unwrap(), hist(&[(1, 1), (2, 2)]));
        assert_eq!(
            enumerate_terminal_histogram(3, 3, cap).unwrap(),
            hist(&[(0, 5), (1, 5), (2, 5), (3, 5)])
        );
        assert_eq!(enumerate_terminal_histogram(1, 2, cap).unwrap(), hist(&[(0, 2), (1, 1)]));
    }

    #[test]
    fn enumeration_rejections() {
        assert_eq!(
            enumerate_exceedance_histogram(20, 20, 5, DEFAULT_ENUMERATION_CAP),
            Err(PathError::CapExceeded { total: 40, cap: 26 })
        );
        assert!(enumerate_exceedance_histogram(3, 2, 1, 26).is_err());
        assert!(enumerate_exceedance_histogram(2, 3, 0, 26).is_err());
        assert!(enumerate_exceedance_histogram(2, 3, 3, 26).is_err());
        assert!(enumerate_terminal_histogram(9, 9, 17).is_err());
        let msg = PathError::CapExceeded { total: 40, cap: 26 }.to_string();
        assert!(msg.contains("26"));
    }

    #[test]
    fn histogram_json_uses_string_values() {
        let h = hist(&[(0, 5), (1, 3)]);
        assert_eq!(h.to_json().to_string(), r#"{"0":"5","1":"3"}"#);
    }

    #[test]
    fn exhaustive_exceedance_identities() {
        for total in 0..=12usize {
            for m in 0..=total {
                let n = total - m;
                for path in all_paths(m, n) {
                    let full = path.exceedance(0).unwrap();
                    assert_eq!(full.he + full.ve, m.max(n), "{path}");
                    for k in 0..=m.min(n) {
                        let e = path.exceedance(k).unwrap();
                        assert_eq!(e.he_k + e.ve_k, k, "{path} k={k}");
                        assert!(e.he_k <= e.he && e.ve_k <= e.ve);
                        assert_eq!(he_k_of_steps(path.steps(), k), e.he_k);
                    }
                }
            }
        }
    }

    #[test]
    fn reflection_swaps_exceedances() {
        for total in 0..=10usize {
            for m in 0..=total {
                let n = total - m;
                for path in all_paths(m, n) {
                    let mirror = path.reflected();
                    assert_eq!(mirror.terminal(), (n, m));
                    let (a, b) = (path.exceedance(0).unwrap(), mirror.exceedance(0).unwrap());
                    assert_eq!((b.he, b.ve), (a.ve, a.he), "{path}");
                }
            }
        }
    }

    #[test]
    fn format_inverts_parse() {
        for total in 1..=8usize {
            for m in 0..=total {
                for path in all_paths(m, total - m) {
                    assert_eq!(parse_path(&format_path(&path)).unwrap(), path);
                }
            }
        }
    }
}
