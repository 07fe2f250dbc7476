//! Exact non-negative weights.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// An exact rational weight. Negative values are rejected wherever weights
/// enter the model, so every stored weight is non-negative and reduced.
pub type Weight = BigRational;

pub fn int(v: i64) -> Weight {
    Weight::from_integer(BigInt::from(v))
}

pub fn ratio(num: i64, den: i64) -> Weight {
    Weight::new(BigInt::from(num), BigInt::from(den))
}

pub fn zero() -> Weight {
    Weight::zero()
}

pub fn one() -> Weight {
    Weight::one()
}

pub fn is_positive(w: &Weight) -> bool {
    w.is_positive()
}

/// Parses `p`, `p/q` or a decimal-free integer literal into a weight.
pub fn parse(token: &str) -> Result<Weight> {
    let bad = || Error::invalid(format!("malformed rational {token:?}"));
    let w = match token.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().map_err(|_| bad())?;
            let q: BigInt = q.trim().parse().map_err(|_| bad())?;
            if q.is_zero() {
                return Err(Error::invalid(format!("zero denominator in {token:?}")));
            }
            Weight::new(p, q)
        }
        None => Weight::from_integer(token.trim().parse().map_err(|_| bad())?),
    };
    if w.is_negative() {
        return Err(Error::invalid(format!("negative weight {token:?}")));
    }
    Ok(w)
}

/// Lowest-terms rendering; integers print without a denominator unless
/// `explicit_denominator` is set.
pub fn format(w: &Weight, explicit_denominator: bool) -> String {
    if explicit_denominator && w.is_integer() {
        format!("{}/1", w.numer())
    } else {
        w.to_string()
    }
}

pub fn pow(w: &Weight, exp: usize) -> Weight {
    num_traits::pow(w.clone(), exp)
}
