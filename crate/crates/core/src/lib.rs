//! Exact distribution of the number of bottom-k order-statistic comparisons
//! won by one of two c.i.i.d. samples.
//!
//! Sorting X (size m) and Y (size n) and comparing X(i) against Y(i) for
//! i = 1..k gives a statistic L whose law depends only on (m, n, k). Its
//! distribution is computed exactly by counting lattice paths by
//! k-horizontal exceedance, cross-checked by brute-force enumeration and
//! Monte Carlo simulation, and used as the null law of an exact two-sample
//! test.

pub mod asymptotics;
pub mod counting;
pub mod exactmath;
pub mod inference;
pub mod montecarlo;
pub mod paths;

pub use counting::{cdf, count_k_exceedance, count_terminal, pmf, ComparisonSpec, PmfTable};
pub use exactmath::{ballot, binomial, catalan, Count, ExactProb};
pub use paths::{parse_path, LatticePath, Step};
