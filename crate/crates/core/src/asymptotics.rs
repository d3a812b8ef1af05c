//! Rescaled views of the exact distribution for studying its large-k shape:
//! the density k·Pr(L = l) on the grid l/k, method-of-moments beta fits, and
//! comparison with the arcsine law in the case m = n = 2k.
//!
//! Everything here is descriptive output. No limit is asserted.

use std::f64::consts::PI;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde_json::{json, Value};
use statrs::function::beta::ln_beta;
use thiserror::Error;

use crate::counting::{pmf, ComparisonSpec, CountingError, PmfTable};
use crate::exactmath::significant_decimal;

/// Significant digits used when rendering densities.
pub const DENSITY_DIGITS: usize = 15;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AsymptoticsError {
    #[error("the rescaled distribution has zero variance; no beta fit exists")]
    ZeroVariance,
    #[error("variance {variance} is at least mean·(1 − mean) = {bound}; no beta law has these moments")]
    NoBetaFit { variance: f64, bound: f64 },
    #[error("x = {0} lies outside [0, 1]")]
    Domain(f64),
    #[error(transparent)]
    Spec(#[from] CountingError),
}

fn ratio(num: usize, den: usize) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Points (l/k, k·Pr(L = l)) for l = 0..=k, held exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct RescaledDensity {
    pub spec: ComparisonSpec,
    pub points: Vec<(BigRational, BigRational)>,
}

impl RescaledDensity {
    pub fn from_table(table: &PmfTable) -> Self {
        let k = table.k();
        let scale = BigRational::from_integer(BigInt::from(k));
        let points = table
            .probs()
            .iter()
            .enumerate()
            .map(|(l, p)| (ratio(l, k), p.as_rational() * &scale))
            .collect();
        Self { spec: table.spec(), points }
    }

    /// Riemann mass (1/k)·Σ density.
    pub fn mass(&self) -> BigRational {
        let sum: BigRational = self.points.iter().map(|(_, d)| d.clone()).sum();
        sum / BigRational::from_integer(BigInt::from(self.spec.k()))
    }

    /// Point masses Pr(L = l) recovered from the densities.
    fn weights(&self) -> impl Iterator<Item = (&BigRational, BigRational)> + '_ {
        let k = BigRational::from_integer(BigInt::from(self.spec.k()));
        self.points.iter().map(move |(x, d)| (x, d / &k))
    }

    /// Exact mean and variance of x = L/k.
    pub fn moments(&self) -> (BigRational, BigRational) {
        let mut mean = BigRational::zero();
        let mut second = BigRational::zero();
        for (x, w) in self.weights() {
            mean += x * &w;
            second += x * x * &w;
        }
        let variance = second - &mean * &mean;
        (mean, variance)
    }

    /// Grid CDF values F(l/k) = Pr(L ≤ l).
    pub fn grid_cdf(&self) -> Vec<BigRational> {
        let mut acc = BigRational::zero();
        self.weights()
            .map(|(_, w)| {
                acc += w;
                acc.clone()
            })
            .collect()
    }

    pub fn rendered(&self) -> Vec<(String, String)> {
        self.points
            .iter()
            .map(|(x, d)| (significant_decimal(x, DENSITY_DIGITS), significant_decimal(d, DENSITY_DIGITS)))
            .collect()
    }
}

pub fn rescaled_pmf(spec: &ComparisonSpec) -> Result<RescaledDensity, AsymptoticsError> {
    Ok(RescaledDensity::from_table(&pmf(spec)?))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BetaFit {
    pub alpha: f64,
    pub beta_param: f64,
    pub mean: f64,
    pub variance: f64,
}

impl BetaFit {
    /// Mean and variance of Beta(alpha, beta_param).
    pub fn implied_moments(&self) -> (f64, f64) {
        let s = self.alpha + self.beta_param;
        (self.alpha / s, self.alpha * self.beta_param / (s * s * (s + 1.0)))
    }

    pub fn pdf(&self, x: f64) -> f64 {
        if !(0.0..=1.0).contains(&x) {
            return 0.0;
        }
        let (a, b) = (self.alpha, self.beta_param);
        if x == 0.0 || x == 1.0 {
            let edge_shape = if x == 0.0 { a } else { b };
            return match edge_shape.partial_cmp(&1.0) {
                Some(std::cmp::Ordering::Less) => f64::INFINITY,
                Some(std::cmp::Ordering::Equal) => (-ln_beta(a, b)).exp(),
                _ => 0.0,
            };
        }
        ((a - 1.0) * x.ln() + (b - 1.0) * (1.0 - x).ln() - ln_beta(a, b)).exp()
    }
}

/// Method-of-moments beta fit to the law of L/k.
pub fn beta_moment_fit(density: &RescaledDensity) -> Result<BetaFit, AsymptoticsError> {
    let (mean, variance) = density.moments();
    if variance.is_zero() {
        return Err(AsymptoticsError::ZeroVariance);
    }
    let mean = mean.to_f64().expect("mean in [0, 1]");
    let variance = variance.to_f64().expect("variance in [0, 1/4]");
    let bound = mean * (1.0 - mean);
    // two-point laws on {0, 1} sit on the boundary
    if variance >= bound {
        return Err(AsymptoticsError::NoBetaFit { variance, bound });
    }
    let common = bound / variance - 1.0;
    Ok(BetaFit {
        alpha: mean * common,
        beta_param: (1.0 - mean) * common,
        mean,
        variance,
    })
}

/// Arcsine(1/2, 1/2) density and distribution function at `x`. The density
/// is +∞ at both endpoints.
pub fn arcsine_reference(x: f64) -> Result<(f64, f64), AsymptoticsError> {
    if !(0.0..=1.0).contains(&x) {
        return Err(AsymptoticsError::Domain(x));
    }
    let cdf = 2.0 / PI * x.sqrt().asin();
    let pdf = if x == 0.0 || x == 1.0 {
        f64::INFINITY
    } else {
        1.0 / (PI * (x * (1.0 - x)).sqrt())
    };
    Ok((pdf, cdf))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricCaseRow {
    pub k: usize,
    /// Largest |F(l/k) − arcsine cdf(l/k)| over the grid.
    pub sup_distance: f64,
    /// Absent when the moments are not those of any beta law (k = 1).
    pub fit: Option<BetaFit>,
    /// Whether the distance shrank relative to the previous row.
    pub decreased: Option<bool>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricCaseTable {
    pub rows: Vec<SymmetricCaseRow>,
}

impl SymmetricCaseTable {
    /// True when every row's distance is no larger than its predecessor's.
    pub fn monotone_non_increasing(&self) -> bool {
        self.rows.windows(2).all(|w| w[1].sup_distance <= w[0].sup_distance)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,m,n,sup_cdf_distance,beta_alpha,beta_beta,decreased\n");
        for r in &self.rows {
            let decreased = match r.decreased {
                Some(true) => "yes",
                Some(false) => "no",
                None => "",
            };
            let (alpha, beta) = match &r.fit {
                Some(f) => (render_f64(f.alpha), render_f64(f.beta_param)),
                None => (String::new(), String::new()),
            };
            writeln!(
                out,
                "{},{},{},{},{alpha},{beta},{decreased}",
                r.k,
                2 * r.k,
                2 * r.k,
                render_f64(r.sup_distance),
            )
            .expect("writing to a String");
        }
        out
    }

    pub fn to_json(&self) -> Value {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| {
                json!({
                    "k": r.k,
                    "m": 2 * r.k,
                    "n": 2 * r.k,
                    "sup_cdf_distance": r.sup_distance,
                    "beta_alpha": r.fit.map(|f| f.alpha),
                    "beta_beta": r.fit.map(|f| f.beta_param),
                    "decreased": r.decreased,
                })
            })
            .collect();
        json!({
            "rows": rows,
            "monotone_non_increasing": self.monotone_non_increasing(),
        })
    }
}

fn sup_distance_to_arcsine(density: &RescaledDensity) -> f64 {
    density
        .grid_cdf()
        .iter()
        .zip(&density.points)
        .map(|(f, (x, _))| {
            let x = x.to_f64().expect("grid point in [0, 1]");
            let (_, reference) = arcsine_reference(x).expect("grid point in [0, 1]");
            (f.to_f64().expect("cdf in [0, 1]") - reference).abs()
        })
        .fold(0.0, f64::max)
}

/// Compare sizes (2k, 2k) at depth k with the arcsine law for each k. Rows come
/// back sorted by k with duplicates removed.
pub fn symmetric_case_table(k_values: &[usize]) -> Result<SymmetricCaseTable, AsymptoticsError> {
    let mut ks = k_values.to_vec();
    ks.sort_unstable();
    ks.dedup();
    let mut rows = ks
        .par_iter()
        .map(|&k| {
            let density = rescaled_pmf(&ComparisonSpec::new(2 * k, 2 * k, k)?)?;
            Ok(SymmetricCaseRow {
                k,
                sup_distance: sup_distance_to_arcsine(&density),
                fit: match beta_moment_fit(&density) {
                    Ok(fit) => Some(fit),
                    Err(AsymptoticsError::NoBetaFit { .. }) => None,
                    Err(e) => return Err(e),
                },
                decreased: None,
            })
        })
        .collect::<Result<Vec<_>, AsymptoticsError>>()?;
    for i in 1..rows.len() {
        rows[i].decreased = Some(rows[i].sup_distance < rows[i - 1].sup_distance);
    }
    Ok(SymmetricCaseTable { rows })
}

/// Plain decimal with [`DENSITY_DIGITS`] significant digits; `inf` for +∞.
pub fn render_f64(v: f64) -> String {
    match BigRational::from_float(v) {
        Some(r) => significant_decimal(&r, DENSITY_DIGITS),
        None if v > 0.0 => "inf".to_string(),
        None if v < 0.0 => "-inf".to_string(),
        None => "nan".to_string(),
    }
}

/// CSV with columns x, density, beta_fit_density, arcsine_density. The
/// arcsine column is filled only for specs of the form (2k, 2k, k).
pub fn density_csv(density: &RescaledDensity, fit: Option<&BetaFit>) -> String {
    let spec = density.spec;
    let arcsine = spec.m() == spec.n() && spec.m() == 2 * spec.k();
    let mut out = String::from("x,density,beta_fit_density,arcsine_density\n");
    for ((x_text, d_text), (x, _)) in density.rendered().into_iter().zip(&density.points) {
        let xf = x.to_f64().expect("grid point in [0, 1]");
        let beta = fit.map(|f| render_f64(f.pdf(xf))).unwrap_or_default();
        let arc = if arcsine {
            render_f64(arcsine_reference(xf).expect("grid point in [0, 1]").0)
        } else {
            String::new()
        };
        writeln!(out, "{x_text},{d_text},{beta},{arc}").expect("writing to a String");
    }
    out
}
