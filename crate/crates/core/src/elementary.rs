//! Certified enclosures of `exp`, `sin`, `cos` and `pi` with dyadic endpoints.
//!
//! Point values come from truncated Taylor series evaluated in interval
//! arithmetic at a few guard bits above the requested precision, with the
//! truncation remainder added outward. Interval arguments are handled by
//! monotonicity (exp) or by locating the extrema inside the argument (sin,
//! cos).

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use crate::dyadic::{Dyadic, Round};
use crate::interval::Interval;

const GUARD: u32 = 24;
const PI_CACHE_BITS: u32 = 1200;

fn machin_atan_inv(k: i64, prec: u32) -> Interval {
    // atan(1/k) = sum_j (-1)^j / ((2j+1) k^(2j+1)); alternating and decreasing
    let mut sum = Interval::point(Dyadic::zero());
    let kk = Dyadic::from_i64(k * k);
    let mut pow = Dyadic::from_i64(k);
    let eps = Dyadic::pow2(-(prec as i64) - 4);
    let mut j = 0i64;
    loop {
        let den = &pow * &Dyadic::from_i64(2 * j + 1);
        let one = Dyadic::one();
        let term = Interval::new(
            one.div_round(&den, prec, Round::Down),
            one.div_round(&den, prec, Round::Up),
        );
        let term = if j % 2 == 0 { term } else { term.neg() };
        sum = sum.add_prec(&term, prec);
        if term.mag() < eps {
            let tail = Interval::symmetric(term.mag());
            return sum.add_prec(&tail, prec);
        }
        pow = &pow * &kk;
        j += 1;
    }
}

fn compute_pi(prec: u32) -> Interval {
    let wp = prec + GUARD;
    let a = machin_atan_inv(5, wp);
    let b = machin_atan_inv(239, wp);
    let a16 = a.mul_prec(&Interval::point(Dyadic::from_i64(16)), wp);
    let b4 = b.mul_prec(&Interval::point(Dyadic::from_i64(4)), wp);
    a16.sub_prec(&b4, wp).round_out_prec(prec)
}

/// Enclosure of pi with endpoints rounded to `prec` bits.
pub fn pi(prec: u32) -> Interval {
    static CACHE: OnceLock<Interval> = OnceLock::new();
    if prec <= PI_CACHE_BITS {
        CACHE.get_or_init(|| compute_pi(PI_CACHE_BITS)).round_out_prec(prec)
    } else {
        compute_pi(prec)
    }
}

/// Enclosure of `exp(x)` for a dyadic point.
pub fn exp_point(x: &Dyadic, prec: u32) -> Interval {
    if x.is_zero() {
        return Interval::point(Dyadic::one());
    }
    // |x| / 2^s <= 1/2
    let s = (x.ilog2() + 2).max(0);
    let wp = prec + GUARD + s as u32;
    let r = x.shl(-s);
    let ri = Interval::point(r);
    let mut sum = Interval::point(Dyadic::one());
    let mut term = Interval::point(Dyadic::one());
    let eps = Dyadic::pow2(-(wp as i64) - 2);
    let mut k = 1i64;
    loop {
        term = term
            .mul_prec(&ri, wp)
            .div_prec(&Interval::point(Dyadic::from_i64(k)), wp)
            .expect("nonzero divisor");
        sum = sum.add_prec(&term, wp);
        if k >= 2 && term.mag() < eps {
            // remainder <= |r|^(k+1)/(k+1)! * e^|r| <= |term|
            sum = sum.add_prec(&Interval::symmetric(term.mag()), wp);
            break;
        }
        k += 1;
    }
    for _ in 0..s {
        sum = sum.powi_prec(2, wp).expect("nonnegative power");
    }
    sum.round_out_prec(prec)
}

/// Enclosure of `exp` over an interval.
pub fn exp(x: &Interval, prec: u32) -> Interval {
    let lo = exp_point(x.lo(), prec);
    if x.is_point() {
        return lo;
    }
    let hi = exp_point(x.hi(), prec);
    Interval::new(lo.lo().clone(), hi.hi().clone())
}

/// Taylor series of sin (odd = true) or cos around zero on a small interval.
fn trig_series(r: &Interval, odd: bool, wp: u32) -> Interval {
    let r2 = r.powi_prec(2, wp).expect("square");
    let mut term = if odd { r.clone() } else { Interval::point(Dyadic::one()) };
    let mut sum = term.clone();
    let eps = Dyadic::pow2(-(wp as i64) - 2);
    let mut j = if odd { 1i64 } else { 0 };
    loop {
        let den = Dyadic::from_i64((j + 1) * (j + 2));
        term = term
            .mul_prec(&r2, wp)
            .div_prec(&Interval::point(den), wp)
            .expect("nonzero divisor")
            .neg();
        sum = sum.add_prec(&term, wp);
        j += 2;
        if term.mag() < eps {
            // alternating with decreasing terms once |r| < 1
            sum = sum.add_prec(&Interval::symmetric(term.mag()), wp);
            return sum;
        }
    }
}

fn unit() -> Interval {
    Interval::from_i64(-1, 1)
}

/// Enclosure of `sin(x)` (or `cos(x)` when `cosine`) at a dyadic point.
fn trig_point(x: &Dyadic, cosine: bool, prec: u32) -> Interval {
    if x.is_zero() {
        return Interval::point(if cosine { Dyadic::one() } else { Dyadic::zero() });
    }
    let mag_bits = x.ilog2().max(0);
    if mag_bits > 60 {
        return unit();
    }
    let wp = prec + GUARD + mag_bits as u32;
    let half_pi = {
        let p = pi(wp + 8);
        Interval::new(p.lo().half(), p.hi().half())
    };
    let k = x
        .div_round(&half_pi.mid(), 64 + mag_bits as u32, Round::Nearest)
        .round_integer();
    let kd = Dyadic::from_bigint(k.clone());
    let r = Interval::point(x.clone()).sub_prec(&half_pi.mul_prec(&Interval::point(kd), wp), wp);
    let quadrant = (k % BigInt::from(4)).to_i64().unwrap().rem_euclid(4);
    let quadrant = if cosine { (quadrant + 1) % 4 } else { quadrant };
    let v = match quadrant {
        0 => trig_series(&r, true, wp),
        1 => trig_series(&r, false, wp),
        2 => trig_series(&r, true, wp).neg(),
        _ => trig_series(&r, false, wp).neg(),
    };
    let v = v.round_out_prec(prec);
    v.intersect(&unit()).unwrap_or_else(unit)
}

pub fn sin_point(x: &Dyadic, prec: u32) -> Interval {
    trig_point(x, false, prec)
}

pub fn cos_point(x: &Dyadic, prec: u32) -> Interval {
    trig_point(x, true, prec)
}

/// Enclosure over an interval: hull of the endpoint values plus any extremum
/// whose location might fall inside the argument.
fn trig_interval(x: &Interval, cosine: bool, prec: u32) -> Interval {
    if x.is_point() {
        return trig_point(x.lo(), cosine, prec);
    }
    if x.width() >= Dyadic::from_i64(7) || x.mag().ilog2() > 60 {
        return unit();
    }
    let mut out = trig_point(x.lo(), cosine, prec).hull(&trig_point(x.hi(), cosine, prec));
    let wp = prec + GUARD;
    let p = pi(wp);
    let half_pi = Interval::new(p.lo().half(), p.hi().half());
    // extrema of sin at pi/2 + k*pi, of cos at k*pi; value (-1)^k
    let offset = if cosine {
        Interval::point(Dyadic::zero())
    } else {
        half_pi
    };
    let pm = p.mid();
    let k_of = |v: &Dyadic| -> BigInt { (v - &offset.mid()).div_round(&pm, 64, Round::Nearest).floor() };
    let k_lo: BigInt = k_of(x.lo()) - 1;
    let k_hi: BigInt = k_of(x.hi()) + 2;
    let mut k = k_lo;
    while k <= k_hi {
        let kd = Dyadic::from_bigint(k.clone());
        let c = offset.add_prec(&p.mul_prec(&Interval::point(kd), wp), wp);
        if c.hi() >= x.lo() && c.lo() <= x.hi() {
            let even = (&k % BigInt::from(2)) == BigInt::from(0);
            let v = Dyadic::from_i64(if even { 1 } else { -1 });
            out = out.hull(&Interval::point(v));
        }
        k += 1;
    }
    out.intersect(&unit()).unwrap_or_else(unit)
}

pub fn sin(x: &Interval, prec: u32) -> Interval {
    trig_interval(x, false, prec)
}

pub fn cos(x: &Interval, prec: u32) -> Interval {
    trig_interval(x, true, prec)
}
