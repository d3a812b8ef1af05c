//! Exact combinatorial primitives: binomials, Catalan and ballot numbers,
//! and a reduced rational type for probabilities.

use std::fmt;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// Arbitrary-precision nonnegative count.
pub type Count = BigUint;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExactMathError {
    #[error("ballot number b({x}, {y}) is only defined for x > y (or x = y = 0)")]
    BallotDomain { x: u64, y: u64 },
    #[error("probability denominator must be positive")]
    ZeroDenominator,
    #[error("probability {num}/{den} lies outside [0, 1]")]
    OutOfRange { num: String, den: String },
}

/// Binomial coefficient C(a, b). Zero when `b < 0` or `b > a`.
pub fn binomial(a: u64, b: i64) -> Count {
    if b < 0 || b as u64 > a {
        return Count::zero();
    }
    let b = (b as u64).min(a - b as u64);
    let mut acc = Count::one();
    for i in 0..b {
        // acc * (a - i) is always divisible by i + 1 here
        acc *= a - i;
        acc /= i + 1;
    }
    acc
}

fn exact_div(numerator: Count, divisor: &Count) -> Count {
    let (q, r) = numerator.div_rem(divisor);
    assert!(r.is_zero(), "inexact division in combinatorial identity");
    q
}

/// The i-th Catalan number, C(2i, i) / (i + 1).
pub fn catalan(i: u64) -> Count {
    exact_div(binomial(2 * i, i as i64), &Count::from(i + 1))
}

/// Ballot number b(x, y): monotone paths from the origin to (x, y) that stay
/// strictly below the diagonal after leaving the origin.
///
/// Defined for x > y; b(0, 0) = 1 for the empty path.
pub fn ballot(x: u64, y: u64) -> Result<Count, ExactMathError> {
    if x == 0 && y == 0 {
        return Ok(Count::one());
    }
    if x <= y {
        return Err(ExactMathError::BallotDomain { x, y });
    }
    let scaled = binomial(x + y, y as i64) * (x - y);
    Ok(exact_div(scaled, &Count::from(x + y)))
}

/// Exact probability in lowest terms.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ExactProb(BigRational);

impl ExactProb {
    pub fn new(numerator: Count, denominator: Count) -> Result<Self, ExactMathError> {
        if denominator.is_zero() {
            return Err(ExactMathError::ZeroDenominator);
        }
        if numerator > denominator {
            return Err(ExactMathError::OutOfRange {
                num: numerator.to_string(),
                den: denominator.to_string(),
            });
        }
        Ok(Self(BigRational::new(
            BigInt::from(numerator),
            BigInt::from(denominator),
        )))
    }

    pub fn zero() -> Self {
        Self(BigRational::zero())
    }

    pub fn one() -> Self {
        Self(BigRational::one())
    }

    pub fn from_rational(value: BigRational) -> Result<Self, ExactMathError> {
        if value.is_negative() || value > BigRational::one() {
            return Err(ExactMathError::OutOfRange {
                num: value.numer().to_string(),
                den: value.denom().to_string(),
            });
        }
        Ok(Self(value))
    }

    pub fn numerator(&self) -> Count {
        self.0.numer().magnitude().clone()
    }

    pub fn denominator(&self) -> Count {
        self.0.denom().magnitude().clone()
    }

    pub fn as_rational(&self) -> &BigRational {
        &self.0
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    /// Decimal rendering rounded half-up to `digits` fractional digits,
    /// with trailing zeros removed.
    pub fn to_decimal(&self, digits: usize) -> String {
        fixed_decimal(&self.0, digits)
    }

    /// `self + other`, capped at one.
    pub fn saturating_add(&self, other: &Self) -> Self {
        let sum = &self.0 + &other.0;
        Self(sum.min(BigRational::one()))
    }
}

impl fmt::Display for ExactProb {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}

fn pow10(exp: usize) -> BigInt {
    num_traits::pow(BigInt::from(10u32), exp)
}

fn round_half_up(value: &BigRational) -> BigInt {
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    if value.is_negative() {
        -(value.abs() + half).floor().to_integer()
    } else {
        (value + half).floor().to_integer()
    }
}

fn place_point(magnitude: &BigInt, frac_digits: usize, negative: bool) -> String {
    let mut digits = magnitude.to_str_radix(10);
    if frac_digits > 0 {
        if digits.len() <= frac_digits {
            digits = format!("{}{}", "0".repeat(frac_digits + 1 - digits.len()), digits);
        }
        let split = digits.len() - frac_digits;
        digits = format!("{}.{}", &digits[..split], &digits[split..]);
        let trimmed = digits.trim_end_matches('0').trim_end_matches('.');
        digits = trimmed.to_string();
    }
    if negative && digits.chars().any(|c| c != '0' && c != '.') {
        format!("-{digits}")
    } else {
        digits
    }
}

/// Round `value` to `digits` fractional digits; trailing zeros trimmed.
pub fn fixed_decimal(value: &BigRational, digits: usize) -> String {
    let scaled = value * BigRational::from_integer(pow10(digits));
    let rounded = round_half_up(&scaled);
    let negative = rounded.sign() == Sign::Minus;
    place_point(&rounded.abs(), digits, negative)
}

/// Round `value` to `sig` significant digits; trailing zeros trimmed.
pub fn significant_decimal(value: &BigRational, sig: usize) -> String {
    assert!(sig > 0, "at least one significant digit");
    if value.is_zero() {
        return "0".to_string();
    }
    let negative = value.is_negative();
    let mag = value.abs();
    // Decimal exponent e with 10^e <= mag < 10^(e+1).
    let num_len = mag.numer().to_str_radix(10).len() as i64;
    let den_len = mag.denom().to_str_radix(10).len() as i64;
    let mut exp = num_len - den_len;
    let ten_pow = |e: i64| -> BigRational {
        if e >= 0 {
            BigRational::from_integer(pow10(e as usize))
        } else {
            BigRational::new(BigInt::one(), pow10((-e) as usize))
        }
    };
    if mag < ten_pow(exp) {
        exp -= 1;
    }
    let mut scale = sig as i64 - 1 - exp;
    let mut rounded = round_half_up(&(&mag * ten_pow(scale)));
    if rounded >= pow10(sig) {
        // rounding carried into a new leading digit
        scale -= 1;
        rounded = round_half_up(&(&mag * ten_pow(scale)));
    }
    if scale >= 0 {
        place_point(&rounded, scale as usize, negative)
    } else {
        let whole = rounded * pow10((-scale) as usize);
        place_point(&whole, 0, negative)
    }
}
