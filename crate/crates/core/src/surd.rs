//! Values `a + b√2 + c√δ` with rational `a, b, c, δ`, compared through
//! rational enclosures.

use std::cmp::Ordering;
use std::fmt;

use num_traits::{Signed, Zero};

use crate::rational::{self, fmt_q, Q};

/// Closed rational interval.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interval {
    pub lo: Q,
    pub hi: Q,
}

impl Interval {
    pub fn point(v: Q) -> Self {
        Interval { lo: v.clone(), hi: v }
    }

    pub fn width(&self) -> Q {
        &self.hi - &self.lo
    }

    /// Enclosure of `√v`; exact roots give a point.
    pub fn sqrt(v: &Q, bits: u32) -> Self {
        Interval { lo: rational::sqrt_floor(v, bits), hi: rational::sqrt_ceil(v, bits) }
    }

    /// Enclosure of `k · self`.
    pub fn scale(&self, k: &Q) -> Self {
        if k.is_negative() {
            Interval { lo: k * &self.hi, hi: k * &self.lo }
        } else {
            Interval { lo: k * &self.lo, hi: k * &self.hi }
        }
    }

    pub fn add(&self, other: &Interval) -> Self {
        Interval { lo: &self.lo + &other.lo, hi: &self.hi + &other.hi }
    }

    /// Certain ordering of every point against `r`, or `None` if `r` is inside.
    pub fn cmp_q(&self, r: &Q) -> Option<Ordering> {
        if &self.hi < r {
            Some(Ordering::Less)
        } else if &self.lo > r {
            Some(Ordering::Greater)
        } else if self.lo == self.hi {
            Some(Ordering::Equal)
        } else {
            None
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Surd {
    pub a: Q,
    pub b: Q,
    pub c: Q,
    pub delta: Q,
}

impl Surd {
    pub fn rational(a: Q) -> Self {
        Surd { a, b: Q::zero(), c: Q::zero(), delta: Q::zero() }
    }

    /// Enclosure no wider than `width`. `√2` is never rational, so the result
    /// is a point only when `b = 0` and `√δ` is exact or unused.
    pub fn enclose(&self, width: &Q) -> Interval {
        let mut bits = 32;
        loop {
            let iv = Interval::point(self.a.clone())
                .add(&Interval::sqrt(&rational::qi(2), bits).scale(&self.b))
                .add(&Interval::sqrt(&self.delta, bits).scale(&self.c));
            if &iv.width() <= width || bits >= 256 {
                return iv;
            }
            bits += 16;
        }
    }

    /// Certified ordering of this value against `r` at enclosure `width`.
    pub fn cmp_q(&self, r: &Q, width: &Q) -> Option<Ordering> {
        self.enclose(width).cmp_q(r)
    }

    pub fn to_f64(&self) -> f64 {
        rational::to_f64(&self.a)
            + rational::to_f64(&self.b) * std::f64::consts::SQRT_2
            + rational::to_f64(&self.c) * rational::to_f64(&self.delta).sqrt()
    }
}

impl fmt::Display for Surd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + {}·√2 + {}·√({})", fmt_q(&self.a), fmt_q(&self.b), fmt_q(&self.c), fmt_q(&self.delta))
    }
}

/// Default enclosure width for surd comparisons, `10⁻¹²`.
pub fn default_width() -> Q {
    rational::q(1, 1_000_000_000_000)
}
