//! Exact rational helpers shared by every engine.
//!
//! All values are `BigRational`. Square roots only ever appear as bounds:
//! `sqrt_floor`/`sqrt_ceil` return rationals with a power-of-two
//! denominator that bracket the true root.

use num_bigint::{BigInt, BigUint, Sign};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Q = BigRational;

/// Bits of fractional precision used for rational square-root bounds.
pub const SQRT_BITS: u32 = 60;

pub fn q(num: i64, den: i64) -> Q {
    Q::new(BigInt::from(num), BigInt::from(den))
}

pub fn qi(num: i64) -> Q {
    Q::from_integer(BigInt::from(num))
}

/// Parses `"p/q"` or `"p"`; the denominator must be positive.
pub fn parse_q(s: &str) -> Result<Q> {
    let s = s.trim();
    let bad = || Error::Parse(format!("invalid rational {s:?}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if !d.is_positive() {
                return Err(Error::Parse(format!("denominator must be positive in {s:?}")));
            }
            Ok(Q::new(n, d))
        }
        None => {
            let n: BigInt = s.parse().map_err(|_| bad())?;
            Ok(Q::from_integer(n))
        }
    }
}

/// Canonical wire form: reduced `"p/q"`, or `"p"` when the denominator is one.
pub fn fmt_q(v: &Q) -> String {
    if v.denom().is_one() {
        v.numer().to_string()
    } else {
        format!("{}/{}", v.numer(), v.denom())
    }
}

pub fn to_f64(v: &Q) -> f64 {
    v.to_f64().unwrap_or_else(|| {
        // fall back to a scaled integer division for huge numerators
        let scale = BigInt::from(1u64) << 64u32;
        let scaled = (v.numer() * &scale) / v.denom();
        scaled.to_f64().unwrap_or(f64::NAN) / 2f64.powi(64)
    })
}

/// sign with sign(0) = +1.
pub fn sign_pos(v: &Q) -> Q {
    if v.is_negative() {
        -Q::one()
    } else {
        Q::one()
    }
}

/// Exact square root when `v` is the square of a rational.
pub fn exact_sqrt(v: &Q) -> Option<Q> {
    if v.is_negative() {
        return None;
    }
    let n = v.numer().magnitude();
    let d = v.denom().magnitude();
    let rn = n.sqrt();
    let rd = d.sqrt();
    if &(&rn * &rn) == n && &(&rd * &rd) == d {
        Some(Q::new(BigInt::from_biguint(Sign::Plus, rn), BigInt::from_biguint(Sign::Plus, rd)))
    } else {
        None
    }
}

fn scaled_isqrt(v: &Q, bits: u32) -> (BigUint, bool) {
    // floor(sqrt(v) * 2^bits) and whether it is exact
    let scaled = (v.numer().magnitude() << (2 * bits as usize)) / v.denom().magnitude();
    let exact_div = (v.numer().magnitude() << (2 * bits as usize)) % v.denom().magnitude();
    let r = scaled.sqrt();
    let exact = exact_div.is_zero() && &r * &r == scaled;
    (r, exact)
}

/// Largest multiple of 2^-bits that is <= sqrt(v).
pub fn sqrt_floor(v: &Q, bits: u32) -> Q {
    assert!(!v.is_negative(), "sqrt of negative rational");
    if let Some(r) = exact_sqrt(v) {
        return r;
    }
    let (r, _) = scaled_isqrt(v, bits);
    Q::new(BigInt::from_biguint(Sign::Plus, r), BigInt::one() << bits as usize)
}

/// Smallest multiple of 2^-bits that is >= sqrt(v) (exact roots are returned as is).
pub fn sqrt_ceil(v: &Q, bits: u32) -> Q {
    assert!(!v.is_negative(), "sqrt of negative rational");
    if let Some(r) = exact_sqrt(v) {
        return r;
    }
    let (r, exact) = scaled_isqrt(v, bits);
    let r = if exact { r } else { r + BigUint::one() };
    Q::new(BigInt::from_biguint(Sign::Plus, r), BigInt::one() << bits as usize)
}

/// Compares `a` with `sqrt(s)` exactly (s >= 0).
pub fn cmp_with_sqrt(a: &Q, s: &Q) -> std::cmp::Ordering {
    use std::cmp::Ordering;
    if a.is_negative() {
        return if s.is_zero() && a.is_zero() { Ordering::Equal } else { Ordering::Less };
    }
    (a * a).cmp(s)
}

pub fn abs(v: &Q) -> Q {
    v.abs()
}
