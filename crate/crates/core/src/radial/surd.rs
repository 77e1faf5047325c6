//! Sums of square roots of rationals with certified sign decisions.
//!
//! Radial distances are `‖x-y‖` or `‖x‖ + ‖y‖`, so every quantity compared
//! by the radial checks is a rational combination of square roots of
//! rationals. Equality is decided exactly by reducing radicands to
//! squarefree integers; strict comparisons fall back to interval
//! evaluation with increasing precision.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::ops::{Add, Neg, Sub};

use num_bigint::{BigInt, Sign};
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::rational::Rational;

const MIN_BITS: u64 = 64;
const MAX_BITS: u64 = 16_384;
const TRIAL_DIVISION_LIMIT: u64 = 200_000;

/// `Σ coefficient · sqrt(radicand)` with nonnegative radicands.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SurdSum {
    terms: Vec<(Rational, Rational)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
#[error("sign of a square-root sum could not be certified within {MAX_BITS} bits")]
pub struct Undecided;

impl SurdSum {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn rational(value: Rational) -> Self {
        Self {
            terms: vec![(value, Rational::one())],
        }
    }

    /// `sqrt(radicand)`; panics on a negative radicand.
    pub fn sqrt(radicand: Rational) -> Self {
        assert!(!radicand.is_negative(), "negative radicand");
        Self {
            terms: vec![(Rational::one(), radicand)],
        }
    }

    pub fn terms(&self) -> &[(Rational, Rational)] {
        &self.terms
    }

    /// Groups terms by squarefree radicand. The flag is false when some
    /// radicand could not be fully factored.
    fn reduced(&self) -> (BTreeMap<BigInt, Rational>, bool) {
        let mut out: BTreeMap<BigInt, Rational> = BTreeMap::new();
        let mut complete = true;
        for (c, q) in &self.terms {
            if c.is_zero() || q.is_zero() {
                continue;
            }
            // sqrt(n/d) = sqrt(n*d)/d
            let m = q.numer() * q.denom();
            let (square_root_part, squarefree, full) = squarefree_split(&m);
            complete &= full;
            let coeff = c * Rational::new(square_root_part, q.denom().clone());
            *out.entry(squarefree).or_insert_with(Rational::zero) += coeff;
        }
        out.retain(|_, c| !c.is_zero());
        (out, complete)
    }

    /// Certified sign of the sum.
    pub fn signum(&self) -> Result<Ordering, Undecided> {
        let (reduced, _) = self.reduced();
        if reduced.is_empty() {
            return Ok(Ordering::Equal);
        }
        let mut bits = MIN_BITS;
        while bits <= MAX_BITS {
            let (lo, hi) = bounds(&reduced, bits);
            if lo.is_positive() {
                return Ok(Ordering::Greater);
            }
            if hi.is_negative() {
                return Ok(Ordering::Less);
            }
            bits *= 2;
        }
        Err(Undecided)
    }

    pub fn is_zero(&self) -> bool {
        self.reduced().0.is_empty()
    }

    pub fn try_cmp(&self, other: &SurdSum) -> Result<Ordering, Undecided> {
        (self.clone() - other.clone()).signum()
    }

    /// Rational enclosure `[lo, hi]` of the value, `bits` of precision per term.
    pub fn enclosure(&self, bits: u64) -> (Rational, Rational) {
        bounds(&self.reduced().0, bits)
    }

    pub fn to_f64(&self) -> f64 {
        let (lo, hi) = self.enclosure(64);
        ((lo + hi) / Rational::from_integer(2.into()))
            .to_f64()
            .unwrap_or(f64::NAN)
    }

    /// The value when it is rational, e.g. `‖x-y‖` for a Pythagorean difference.
    pub fn as_rational(&self) -> Option<Rational> {
        let (reduced, _) = self.reduced();
        match reduced.len() {
            0 => Some(Rational::zero()),
            1 => reduced
                .get(&BigInt::one())
                .cloned(),
            _ => None,
        }
    }
}

fn bounds(reduced: &BTreeMap<BigInt, Rational>, bits: u64) -> (Rational, Rational) {
    let scale = BigInt::one() << bits;
    let mut lo = Rational::zero();
    let mut hi = Rational::zero();
    for (s, c) in reduced {
        let shifted: BigInt = s << (2 * bits);
        let floor = shifted.sqrt();
        let exact = &floor * &floor == shifted;
        let r_lo = Rational::new(floor.clone(), scale.clone());
        let r_hi = if exact {
            r_lo.clone()
        } else {
            Rational::new(floor + 1, scale.clone())
        };
        if c.is_positive() {
            lo += c * &r_lo;
            hi += c * &r_hi;
        } else {
            lo += c * &r_hi;
            hi += c * &r_lo;
        }
    }
    (lo, hi)
}

/// Writes `m = k² · s` and returns `(k, s, fully_factored)`.
fn squarefree_split(m: &BigInt) -> (BigInt, BigInt, bool) {
    debug_assert!(m.sign() != Sign::Minus);
    let mut rest = m.clone();
    let mut k = BigInt::one();
    let mut s = BigInt::one();
    let mut p: u64 = 2;
    while BigInt::from(p) * BigInt::from(p) <= rest {
        if p > TRIAL_DIVISION_LIMIT {
            let root = rest.sqrt();
            if &root * &root == rest {
                return (k * root, s, true);
            }
            return (k, s * rest, false);
        }
        let bp = BigInt::from(p);
        let mut e = 0u32;
        while (&rest % &bp).is_zero() {
            rest /= &bp;
            e += 1;
        }
        if e > 0 {
            k *= bp.pow(e / 2);
            if e % 2 == 1 {
                s *= &bp;
            }
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if rest > BigInt::one() {
        s *= rest;
    }
    (k, s, true)
}

impl Add for SurdSum {
    type Output = SurdSum;
    fn add(mut self, rhs: SurdSum) -> SurdSum {
        self.terms.extend(rhs.terms);
        self
    }
}

impl Neg for SurdSum {
    type Output = SurdSum;
    fn neg(mut self) -> SurdSum {
        for (c, _) in &mut self.terms {
            *c = -c.clone();
        }
        self
    }
}

impl Sub for SurdSum {
    type Output = SurdSum;
    fn sub(self, rhs: SurdSum) -> SurdSum {
        self + (-rhs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    #[test]
    fn exact_zero_detection() {
        // sqrt(8) - 2 sqrt(2) = 0
        let a = SurdSum::sqrt(int(8)) - SurdSum::sqrt(int(2)) - SurdSum::sqrt(int(2));
        assert!(a.is_zero());
        assert_eq!(a.signum(), Ok(Ordering::Equal));
        // sqrt(1/2) = sqrt(2)/2
        let b = SurdSum::sqrt(ratio(1, 2)) + SurdSum::sqrt(ratio(1, 2)) - SurdSum::sqrt(int(2));
        assert!(b.is_zero());
    }

    #[test]
    fn strict_signs() {
        // sqrt(2) + sqrt(3) vs sqrt(10): 3.146 > 3.162? no, less
        let a = SurdSum::sqrt(int(2)) + SurdSum::sqrt(int(3)) - SurdSum::sqrt(int(10));
        assert_eq!(a.signum(), Ok(Ordering::Less));
        let b = SurdSum::sqrt(int(5)) - SurdSum::rational(int(2));
        assert_eq!(b.signum(), Ok(Ordering::Greater));
        // a near-cancellation that needs more than double precision
        let x = int(1_000_000_000_000_000_001i64);
        let c = SurdSum::sqrt(x.clone()) - SurdSum::rational(int(1_000_000_000));
        assert_eq!(c.signum(), Ok(Ordering::Greater));
    }

    #[test]
    fn rational_values() {
        assert_eq!(SurdSum::sqrt(ratio(9, 4)).as_rational(), Some(ratio(3, 2)));
        assert_eq!(SurdSum::sqrt(int(2)).as_rational(), None);
        assert!((SurdSum::sqrt(int(2)).to_f64() - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn squarefree() {
        let (k, s, full) = squarefree_split(&BigInt::from(72));
        assert_eq!((k, s, full), (BigInt::from(6), BigInt::from(2), true));
        let (k, s, _) = squarefree_split(&BigInt::from(1));
        assert_eq!((k, s), (BigInt::one(), BigInt::one()));
    }
}
