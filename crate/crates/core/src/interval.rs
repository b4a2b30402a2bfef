//! Closed intervals with dyadic endpoints and outward-rounded arithmetic.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::dyadic::{Dyadic, Round, RoundingContext};
use crate::error::NumericError;

/// A compact interval `[lo, hi]` with `lo <= hi`.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Interval {
    lo: Dyadic,
    hi: Dyadic,
}

/// Width, magnitude and the two set distances of a pair of intervals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntervalMetrics {
    pub width: Dyadic,
    pub magnitude: Dyadic,
    pub hausdorff: Dyadic,
    pub separation: Dyadic,
}

pub fn interval_metrics(i: &Interval, j: &Interval) -> IntervalMetrics {
    IntervalMetrics {
        width: i.width(),
        magnitude: i.mag(),
        hausdorff: i.hausdorff(j),
        separation: i.separation(j),
    }
}

impl Interval {
    /// Panics if `lo > hi`; see [`Interval::try_new`].
    pub fn new(lo: Dyadic, hi: Dyadic) -> Self {
        assert!(lo <= hi, "interval endpoints out of order: {lo:?} > {hi:?}");
        Interval { lo, hi }
    }

    pub fn try_new(lo: Dyadic, hi: Dyadic) -> Result<Self, NumericError> {
        if lo > hi {
            return Err(NumericError::InvalidInterval);
        }
        Ok(Interval { lo, hi })
    }

    pub fn point(x: Dyadic) -> Self {
        Interval { lo: x.clone(), hi: x }
    }

    pub fn from_i64(lo: i64, hi: i64) -> Self {
        Interval::new(Dyadic::from_i64(lo), Dyadic::from_i64(hi))
    }

    /// Symmetric interval `[-r, r]`.
    pub fn symmetric(r: Dyadic) -> Self {
        let r = r.abs();
        Interval::new(-&r, r)
    }

    pub fn lo(&self) -> &Dyadic {
        &self.lo
    }

    pub fn hi(&self) -> &Dyadic {
        &self.hi
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn width(&self) -> Dyadic {
        &self.hi - &self.lo
    }

    pub fn mid(&self) -> Dyadic {
        (&self.lo + &self.hi).half()
    }

    pub fn radius(&self) -> Dyadic {
        self.width().half()
    }

    /// `max(|lo|, |hi|)`.
    pub fn mag(&self) -> Dyadic {
        self.lo.abs().max(self.hi.abs())
    }

    /// Smallest absolute value attained, zero if the interval straddles zero.
    pub fn mig(&self) -> Dyadic {
        if self.contains_zero() {
            Dyadic::zero()
        } else {
            self.lo.abs().min(self.hi.abs())
        }
    }

    pub fn contains(&self, x: &Dyadic) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn contains_zero(&self) -> bool {
        !self.lo.is_positive() && !self.hi.is_negative()
    }

    pub fn is_subset_of(&self, other: &Interval) -> bool {
        other.lo <= self.lo && self.hi <= other.hi
    }

    /// Strictly positive lower endpoint.
    pub fn is_positive(&self) -> bool {
        self.lo.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.hi.is_negative()
    }

    pub fn hull(&self, other: &Interval) -> Interval {
        Interval {
            lo: self.lo.clone().min(other.lo.clone()),
            hi: self.hi.clone().max(other.hi.clone()),
        }
    }

    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        let lo = self.lo.clone().max(other.lo.clone());
        let hi = self.hi.clone().min(other.hi.clone());
        (lo <= hi).then_some(Interval { lo, hi })
    }

    /// Hausdorff distance `max(|lo - lo'|, |hi - hi'|)`.
    pub fn hausdorff(&self, other: &Interval) -> Dyadic {
        let a = (&self.lo - &other.lo).abs();
        let b = (&self.hi - &other.hi).abs();
        a.clone().max(b.clone())
    }

    /// Gap between the two intervals, zero when they meet.
    pub fn separation(&self, other: &Interval) -> Dyadic {
        if self.hi < other.lo {
            &other.lo - &self.hi
        } else if other.hi < self.lo {
            &self.lo - &other.hi
        } else {
            Dyadic::zero()
        }
    }

    /// Round the endpoints outward to the context precision.
    pub fn round_out(&self, ctx: &RoundingContext) -> Interval {
        self.round_out_prec(ctx.precision_bits)
    }

    pub fn round_out_prec(&self, prec: u32) -> Interval {
        Interval {
            lo: self.lo.round(prec, Round::Down),
            hi: self.hi.round(prec, Round::Up),
        }
    }

    fn from_exact(lo: Dyadic, hi: Dyadic, prec: u32) -> Interval {
        Interval {
            lo: lo.round(prec, Round::Down),
            hi: hi.round(prec, Round::Up),
        }
    }

    pub fn neg(&self) -> Interval {
        Interval {
            lo: -&self.hi,
            hi: -&self.lo,
        }
    }

    pub fn add(&self, other: &Interval, ctx: &RoundingContext) -> Interval {
        self.add_prec(other, ctx.precision_bits)
    }

    pub fn add_prec(&self, other: &Interval, prec: u32) -> Interval {
        Interval::from_exact(&self.lo + &other.lo, &self.hi + &other.hi, prec)
    }

    pub fn sub(&self, other: &Interval, ctx: &RoundingContext) -> Interval {
        self.sub_prec(other, ctx.precision_bits)
    }

    pub fn sub_prec(&self, other: &Interval, prec: u32) -> Interval {
        Interval::from_exact(&self.lo - &other.hi, &self.hi - &other.lo, prec)
    }

    pub fn mul(&self, other: &Interval, ctx: &RoundingContext) -> Interval {
        self.mul_prec(other, ctx.precision_bits)
    }

    pub fn mul_prec(&self, other: &Interval, prec: u32) -> Interval {
        if self.is_point() && other.is_point() {
            let p = &self.lo * &other.lo;
            return Interval::from_exact(p.clone(), p, prec);
        }
        let cands = [
            &self.lo * &other.lo,
            &self.lo * &other.hi,
            &self.hi * &other.lo,
            &self.hi * &other.hi,
        ];
        let lo = cands.iter().min().unwrap().clone();
        let hi = cands.iter().max().unwrap().clone();
        Interval::from_exact(lo, hi, prec)
    }

    pub fn scale(&self, k: &Dyadic, ctx: &RoundingContext) -> Interval {
        self.mul(&Interval::point(k.clone()), ctx)
    }

    pub fn div(&self, other: &Interval, ctx: &RoundingContext) -> Result<Interval, NumericError> {
        self.div_prec(other, ctx.precision_bits)
    }

    pub fn div_prec(&self, other: &Interval, prec: u32) -> Result<Interval, NumericError> {
        if other.contains_zero() {
            return Err(NumericError::DivisionByZeroInterval);
        }
        let mut lo: Option<Dyadic> = None;
        let mut hi: Option<Dyadic> = None;
        for a in [&self.lo, &self.hi] {
            for b in [&other.lo, &other.hi] {
                let l = a.div_round(b, prec, Round::Down);
                let h = a.div_round(b, prec, Round::Up);
                lo = Some(match lo {
                    Some(x) if x <= l => x,
                    _ => l,
                });
                hi = Some(match hi {
                    Some(x) if x >= h => x,
                    _ => h,
                });
            }
        }
        Ok(Interval {
            lo: lo.unwrap(),
            hi: hi.unwrap(),
        })
    }

    pub fn sqr(&self, ctx: &RoundingContext) -> Interval {
        self.powi_nonneg(2, ctx.precision_bits)
    }

    /// Integer power; negative exponents divide and fail on zero-containing bases.
    pub fn powi(&self, k: i32, ctx: &RoundingContext) -> Result<Interval, NumericError> {
        self.powi_prec(k, ctx.precision_bits)
    }

    pub fn powi_prec(&self, k: i32, prec: u32) -> Result<Interval, NumericError> {
        if k >= 0 {
            return Ok(self.powi_nonneg(k as u32, prec));
        }
        let p = self.powi_nonneg(k.unsigned_abs(), prec + 4);
        Interval::point(Dyadic::one()).div_prec(&p, prec)
    }

    fn powi_nonneg(&self, k: u32, prec: u32) -> Interval {
        if k == 0 {
            return Interval::point(Dyadic::one());
        }
        let a = self.lo.pow(k);
        let b = self.hi.pow(k);
        if k % 2 == 1 {
            return Interval::from_exact(a, b, prec);
        }
        if self.contains_zero() {
            let hi = a.clone().max(b.clone());
            Interval::from_exact(Dyadic::zero(), hi, prec)
        } else if self.lo.is_positive() {
            Interval::from_exact(a, b, prec)
        } else {
            Interval::from_exact(b, a, prec)
        }
    }

    /// Approximate endpoints, for display and sampling only.
    pub fn to_f64_pair(&self) -> (f64, f64) {
        (self.lo.to_f64(), self.hi.to_f64())
    }
}

impl fmt::Debug for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:?}, {:?}]", self.lo, self.hi)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use proptest::prelude::*;

    fn iv(a: i64, b: i64) -> Interval {
        Interval::from_i64(a, b)
    }

    fn ctx() -> RoundingContext {
        RoundingContext::new(53)
    }

    #[test]
    fn basic_arithmetic() {
        assert_eq!(iv(1, 2).add(&iv(3, 4), &ctx()), iv(4, 6));
        // min/max over the four endpoint products: -4, -3, 6, 8
        assert_eq!(iv(-1, 2).mul(&iv(3, 4), &ctx()), iv(-4, 8));
        assert_eq!(iv(1, 2).sub(&iv(3, 4), &ctx()), iv(-3, -1));
        assert_eq!(
            iv(1, 1).div(&iv(-1, 1), &ctx()),
            Err(NumericError::DivisionByZeroInterval)
        );
    }

    #[test]
    fn metrics() {
        assert_eq!(iv(1, 2).width(), Dyadic::from_i64(1));
        assert_eq!(iv(-5, 2).mag(), Dyadic::from_i64(5));
        assert_eq!(iv(0, 2).hausdorff(&iv(1, 5)), Dyadic::from_i64(3));
        assert_eq!(iv(0, 1).separation(&iv(2, 5)), Dyadic::from_i64(1));
        assert_eq!(iv(0, 3).separation(&iv(2, 5)), Dyadic::zero());
        let m = interval_metrics(&iv(0, 2), &iv(1, 5));
        assert_eq!(m.hausdorff, Dyadic::from_i64(3));
    }

    #[test]
    fn even_powers_are_tight() {
        assert_eq!(iv(-2, 1).powi(2, &ctx()).unwrap(), iv(0, 4));
        assert_eq!(iv(-3, -2).powi(2, &ctx()).unwrap(), iv(4, 9));
        assert_eq!(iv(-2, 1).powi(3, &ctx()).unwrap(), iv(-8, 1));
        assert!(iv(-1, 1).powi(-1, &ctx()).is_err());
    }

    fn dy(m: i64, e: i64) -> Dyadic {
        Dyadic::new(BigInt::from(m), e)
    }

    fn arb_interval() -> impl Strategy<Value = Interval> {
        (any::<i32>(), 0i64..1 << 20, -20i64..5)
            .prop_map(|(a, w, e)| Interval::new(dy(a as i64, e), dy(a as i64 + w, e)))
    }

    proptest! {
        #[test]
        fn inclusion_monotone(i in arb_interval(), j in arb_interval(), s in 0u32..=64, t in 0u32..=64, p in 4u32..60) {
            let ctx = RoundingContext::new(p);
            let pick = |iv: &Interval, s: u32| {
                let w = iv.width();
                iv.lo() + &(&w * &dy(s as i64, -6))
            };
            let (a, b) = (pick(&i, s), pick(&j, t));
            prop_assert!(i.add(&j, &ctx).contains(&(&a + &b)));
            prop_assert!(i.sub(&j, &ctx).contains(&(&a - &b)));
            prop_assert!(i.mul(&j, &ctx).contains(&(&a * &b)));
            if !j.contains_zero() {
                let q = i.div(&j, &ctx).unwrap();
                // q contains a/b  <=>  q.lo*b <= a <= q.hi*b for b>0 (reversed for b<0)
                let (l, h) = (q.lo() * &b, q.hi() * &b);
                let (l, h) = if b.is_positive() { (l, h) } else { (h, l) };
                prop_assert!(l <= a && a <= h);
            }
        }

        #[test]
        fn finer_precision_is_nested(i in arb_interval(), j in arb_interval(), p in 4u32..40, k in 0u32..20) {
            let coarse = RoundingContext::new(p);
            let fine = RoundingContext::new(p + k);
            prop_assert!(i.mul(&j, &fine).is_subset_of(&i.mul(&j, &coarse)));
            prop_assert!(i.add(&j, &fine).is_subset_of(&i.add(&j, &coarse)));
            if !j.contains_zero() {
                prop_assert!(i.div(&j, &fine).unwrap().is_subset_of(&i.div(&j, &coarse).unwrap()));
            }
        }

        #[test]
        fn excess_width_bounded(i in arb_interval(), j in arb_interval(), p in 8u32..40) {
            let ctx = RoundingContext::new(p);
            let exact = i.mul(&j, &RoundingContext::new(4000));
            let rounded = i.mul(&j, &ctx);
            let excess = &rounded.width() - &exact.width();
            // 2 * 2^(1-p) * |result|
            let bound = &rounded.mag() * &Dyadic::pow2(2 - p as i64);
            prop_assert!(excess <= bound);
        }
    }
}
