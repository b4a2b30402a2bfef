//! Exact binary rationals `m * 2^e` and the rounding rules used to keep them
//! at a bounded precision.
//!
//! A [`Dyadic`] is always stored in canonical form: the mantissa is either
//! zero (with exponent zero) or odd. Ring operations are exact; division and
//! square roots are only available through [`Dyadic::div_round`] and
//! [`Dyadic::sqrt_round`], which take an explicit precision and direction.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::ParseDyadicError;

/// Direction used when a value has to be rounded to a finite precision.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Round {
    /// Toward negative infinity.
    Down,
    /// Toward positive infinity.
    Up,
    /// Away from zero.
    Outward,
    /// Toward zero.
    Inward,
    /// To nearest, ties away from zero.
    Nearest,
}

/// Rounding mode of a [`RoundingContext`]. Intervals are always rounded
/// outward; the mode only governs directed scalar operations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RoundingMode {
    Outward,
    TowardNegative,
    TowardPositive,
}

impl From<RoundingMode> for Round {
    fn from(mode: RoundingMode) -> Self {
        match mode {
            RoundingMode::Outward => Round::Outward,
            RoundingMode::TowardNegative => Round::Down,
            RoundingMode::TowardPositive => Round::Up,
        }
    }
}

/// Target relative precision for rounded operations, plus the ceiling that
/// precision escalation may not exceed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RoundingContext {
    pub precision_bits: u32,
    pub mode: RoundingMode,
    pub max_precision_bits: u32,
}

impl RoundingContext {
    pub const DEFAULT_PRECISION: u32 = 64;
    pub const DEFAULT_CEILING: u32 = 4096;

    pub fn new(precision_bits: u32) -> Self {
        assert!(precision_bits >= 2, "precision must be at least 2 bits");
        RoundingContext {
            precision_bits,
            mode: RoundingMode::Outward,
            max_precision_bits: Self::DEFAULT_CEILING.max(precision_bits),
        }
    }

    pub fn with_mode(mut self, mode: RoundingMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_ceiling(mut self, max_precision_bits: u32) -> Self {
        self.max_precision_bits = max_precision_bits.max(self.precision_bits);
        self
    }

    pub fn with_precision(mut self, precision_bits: u32) -> Self {
        self.precision_bits = precision_bits.max(2);
        self.max_precision_bits = self.max_precision_bits.max(self.precision_bits);
        self
    }

    /// Next step of the escalation schedule, or `None` once the ceiling is hit.
    pub fn escalated(&self) -> Option<Self> {
        if self.precision_bits >= self.max_precision_bits {
            return None;
        }
        let next = (self.precision_bits * 2).min(self.max_precision_bits);
        Some(self.with_precision(next))
    }

    /// Precision adapted to a box of width `w`: absolute rounding errors must
    /// shrink with the box, so every halving of the width buys one more bit.
    pub fn adapted_to_width(&self, w: &Dyadic) -> Self {
        if w.is_zero() {
            return *self;
        }
        let extra = (-w.ilog2()).max(0) as u32;
        let p = (self.precision_bits + extra).min(self.max_precision_bits);
        self.with_precision(p)
    }

    pub fn round(&self) -> Round {
        self.mode.into()
    }
}

impl Default for RoundingContext {
    fn default() -> Self {
        RoundingContext::new(Self::DEFAULT_PRECISION)
    }
}

/// An exact binary rational `mantissa * 2^exponent`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Dyadic {
    mantissa: BigInt,
    exponent: i64,
}

impl Dyadic {
    pub fn new(mantissa: BigInt, exponent: i64) -> Self {
        if mantissa.is_zero() {
            return Dyadic::zero();
        }
        let tz = mantissa.trailing_zeros().unwrap_or(0);
        if tz == 0 {
            return Dyadic { mantissa, exponent };
        }
        Dyadic {
            mantissa: mantissa >> tz,
            exponent: exponent + tz as i64,
        }
    }

    pub fn zero() -> Self {
        Dyadic {
            mantissa: BigInt::zero(),
            exponent: 0,
        }
    }

    pub fn one() -> Self {
        Dyadic::from_i64(1)
    }

    pub fn from_i64(v: i64) -> Self {
        Dyadic::new(BigInt::from(v), 0)
    }

    pub fn from_bigint(v: BigInt) -> Self {
        Dyadic::new(v, 0)
    }

    /// `2^e`.
    pub fn pow2(e: i64) -> Self {
        Dyadic {
            mantissa: BigInt::one(),
            exponent: e,
        }
    }

    /// `num / 2^shift`.
    pub fn ratio_pow2(num: i64, shift: i64) -> Self {
        Dyadic::new(BigInt::from(num), -shift)
    }

    /// Exact conversion of a finite `f64`.
    pub fn from_f64(v: f64) -> Option<Self> {
        if !v.is_finite() {
            return None;
        }
        if v == 0.0 {
            return Some(Dyadic::zero());
        }
        let bits = v.to_bits();
        let sign = if bits >> 63 == 0 { 1i64 } else { -1 };
        let exp_bits = ((bits >> 52) & 0x7ff) as i64;
        let frac = (bits & ((1u64 << 52) - 1)) as i64;
        let (m, e) = if exp_bits == 0 {
            (frac, -1074)
        } else {
            (frac | (1i64 << 52), exp_bits - 1075)
        };
        Some(Dyadic::new(BigInt::from(sign * m), e))
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.mantissa
    }

    pub fn exponent(&self) -> i64 {
        self.exponent
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.mantissa.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        self.mantissa.is_positive()
    }

    pub fn signum(&self) -> i32 {
        match self.mantissa.sign() {
            Sign::Minus => -1,
            Sign::NoSign => 0,
            Sign::Plus => 1,
        }
    }

    pub fn abs(&self) -> Self {
        Dyadic {
            mantissa: self.mantissa.abs(),
            exponent: self.exponent,
        }
    }

    /// Number of significant bits in the mantissa.
    pub fn bits(&self) -> u64 {
        self.mantissa.bits()
    }

    /// `floor(log2 |x|)`; undefined (returns `i64::MIN`) for zero.
    pub fn ilog2(&self) -> i64 {
        if self.is_zero() {
            return i64::MIN;
        }
        self.exponent + self.mantissa.bits() as i64 - 1
    }

    /// Exact multiplication by `2^k`.
    pub fn shl(&self, k: i64) -> Self {
        if self.is_zero() {
            return Dyadic::zero();
        }
        Dyadic {
            mantissa: self.mantissa.clone(),
            exponent: self.exponent + k,
        }
    }

    pub fn half(&self) -> Self {
        self.shl(-1)
    }

    pub fn is_integer(&self) -> bool {
        self.is_zero() || self.exponent >= 0
    }

    /// Integer value if `self` is an integer.
    pub fn to_bigint(&self) -> Option<BigInt> {
        if !self.is_integer() {
            return None;
        }
        if self.is_zero() {
            return Some(BigInt::zero());
        }
        Some(&self.mantissa << self.exponent as usize)
    }

    pub fn floor(&self) -> BigInt {
        if self.is_integer() {
            return self.to_bigint().unwrap();
        }
        let shift = (-self.exponent) as usize;
        // BigInt's right shift rounds toward negative infinity
        &self.mantissa >> shift
    }

    pub fn ceil(&self) -> BigInt {
        -(self.neg().floor())
    }

    /// Nearest integer, ties away from zero.
    pub fn round_integer(&self) -> BigInt {
        let h = Dyadic::pow2(-1);
        if self.is_negative() {
            -((&self.abs() + &h).floor())
        } else {
            (self + &h).floor()
        }
    }

    pub fn pow(&self, k: u32) -> Self {
        if k == 0 {
            return Dyadic::one();
        }
        Dyadic {
            mantissa: num_traits::pow(self.mantissa.clone(), k as usize),
            exponent: self.exponent * k as i64,
        }
    }

    /// Round to at most `prec` significant bits in direction `dir`.
    pub fn round(&self, prec: u32, dir: Round) -> Self {
        let bits = self.mantissa.bits();
        if bits <= prec as u64 {
            return self.clone();
        }
        let shift = bits - prec as u64;
        let neg = self.is_negative();
        let mag = self.mantissa.magnitude();
        let truncated: BigUint = mag >> shift as usize;
        let exact = mag.trailing_zeros().unwrap_or(0) >= shift;
        let away = if exact {
            false
        } else {
            match dir {
                Round::Down => neg,
                Round::Up => !neg,
                Round::Outward => true,
                Round::Inward => false,
                Round::Nearest => mag.bit(shift - 1),
            }
        };
        let mag = if away { truncated + BigUint::one() } else { truncated };
        let sign = if neg { Sign::Minus } else { Sign::Plus };
        Dyadic::new(BigInt::from_biguint(sign, mag), self.exponent + shift as i64)
    }

    /// `self / rhs` rounded to `prec` bits in direction `dir`.
    ///
    /// Panics when `rhs` is zero.
    pub fn div_round(&self, rhs: &Dyadic, prec: u32, dir: Round) -> Self {
        assert!(!rhs.is_zero(), "division by zero dyadic");
        if self.is_zero() {
            return Dyadic::zero();
        }
        let neg = self.is_negative() != rhs.is_negative();
        let a = self.mantissa.magnitude();
        let b = rhs.mantissa.magnitude();
        let want = prec as i64 + 2 + b.bits() as i64 - a.bits() as i64;
        let s = want.max(0) as usize;
        let num: BigUint = a << s;
        let (q, r) = num.div_rem(b);
        let mut exponent = self.exponent - rhs.exponent - s as i64;
        let mut q = q;
        if !r.is_zero() {
            // sticky bit keeps the inexact quotient strictly between grid points
            q = (q << 1usize) + BigUint::one();
            exponent -= 1;
        }
        let sign = if neg { Sign::Minus } else { Sign::Plus };
        Dyadic::new(BigInt::from_biguint(sign, q), exponent).round(prec, dir)
    }

    /// Square root rounded to `prec` bits; only `Down`/`Up` style directions
    /// are meaningful for this non-negative result.
    ///
    /// Panics for negative input.
    pub fn sqrt_round(&self, prec: u32, dir: Round) -> Self {
        assert!(!self.is_negative(), "square root of negative dyadic");
        if self.is_zero() {
            return Dyadic::zero();
        }
        let mut m = self.mantissa.magnitude().clone();
        let mut e = self.exponent;
        if e.rem_euclid(2) != 0 {
            m <<= 1usize;
            e -= 1;
        }
        let need = 2 * (prec as i64 + 2);
        let extra = (need - m.bits() as i64).max(0);
        let extra = extra + (extra & 1);
        m <<= extra as usize;
        e -= extra;
        let s = m.sqrt();
        let exact = &s * &s == m;
        let mut root = Dyadic::new(BigInt::from_biguint(Sign::Plus, s.clone()), e / 2);
        if !exact {
            let up = matches!(dir, Round::Up | Round::Outward);
            if up {
                root = Dyadic::new(BigInt::from_biguint(Sign::Plus, s + BigUint::one()), e / 2);
            }
        }
        root.round(prec, dir)
    }

    /// Nearest `f64` (approximate; for display and non-certified estimates).
    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let r = self.round(60, Round::Nearest);
        let m = r.mantissa.to_i64().unwrap_or(0) as f64;
        ldexp(m, r.exponent)
    }

    /// Normative text encoding: sign, hexadecimal mantissa, decimal exponent,
    /// e.g. `-0x3p-2` for `-3/4`.
    pub fn to_hex_string(&self) -> String {
        let sign = if self.is_negative() { "-" } else { "" };
        format!(
            "{}0x{}p{}",
            sign,
            self.mantissa.magnitude().to_str_radix(16),
            self.exponent
        )
    }

    pub fn parse_hex(s: &str) -> Result<Self, ParseDyadicError> {
        let err = || ParseDyadicError(s.to_string());
        let (neg, rest) = match s.strip_prefix('-') {
            Some(r) => (true, r),
            None => (false, s),
        };
        let rest = rest.strip_prefix("0x").ok_or_else(err)?;
        let (m, e) = rest.split_once('p').ok_or_else(err)?;
        let mag = BigUint::parse_bytes(m.as_bytes(), 16).ok_or_else(err)?;
        let exponent: i64 = e.parse().map_err(|_| err())?;
        let sign = if neg { Sign::Minus } else { Sign::Plus };
        Ok(Dyadic::new(BigInt::from_biguint(sign, mag), exponent))
    }

    /// Exact decimal expansion (every dyadic has a finite one).
    pub fn to_decimal_exact(&self) -> String {
        if self.exponent >= 0 || self.is_zero() {
            return self.to_bigint().unwrap().to_string();
        }
        let k = (-self.exponent) as u32;
        // m / 2^k = m * 5^k / 10^k
        let scaled = self.mantissa.abs() * num_traits::pow(BigInt::from(5), k as usize);
        let digits = scaled.to_string();
        let k = k as usize;
        let padded = if digits.len() <= k {
            format!("{}{}", "0".repeat(k - digits.len() + 1), digits)
        } else {
            digits
        };
        let (int, frac) = padded.split_at(padded.len() - k);
        let frac = frac.trim_end_matches('0');
        let sign = if self.is_negative() { "-" } else { "" };
        if frac.is_empty() {
            format!("{sign}{int}")
        } else {
            format!("{sign}{int}.{frac}")
        }
    }

    /// Parses a decimal literal such as `-1.375` or `2e-3`, returning the
    /// exact rational `numerator / 10^scale` (scale may be zero).
    pub fn parse_decimal_rational(s: &str) -> Result<(BigInt, u32), ParseDyadicError> {
        let err = || ParseDyadicError(s.to_string());
        let (mant, exp10) = match s.find(['e', 'E']) {
            Some(pos) => {
                let e: i32 = s[pos + 1..].parse().map_err(|_| err())?;
                (&s[..pos], e)
            }
            None => (s, 0),
        };
        let (neg, mant) = match mant.strip_prefix('-') {
            Some(r) => (true, r),
            None => (false, mant.strip_prefix('+').unwrap_or(mant)),
        };
        let (int, frac) = mant.split_once('.').unwrap_or((mant, ""));
        if int.is_empty() && frac.is_empty() {
            return Err(err());
        }
        if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
            return Err(err());
        }
        let digits = format!("{int}{frac}");
        let mut num: BigInt = digits.parse().map_err(|_| err())?;
        let mut scale = frac.len() as i32 - exp10;
        if scale < 0 {
            num *= num_traits::pow(BigInt::from(10), (-scale) as usize);
            scale = 0;
        }
        if neg {
            num = -num;
        }
        Ok((num, scale as u32))
    }

    /// Decimal literal to dyadic: exact when the literal is dyadic, otherwise
    /// rounded to `prec` bits in direction `dir`. The flag reports exactness.
    pub fn from_decimal(s: &str, prec: u32, dir: Round) -> Result<(Self, bool), ParseDyadicError> {
        let (num, scale) = Dyadic::parse_decimal_rational(s)?;
        let den = num_traits::pow(BigInt::from(10), scale as usize);
        let n = Dyadic::from_bigint(num);
        let d = Dyadic::from_bigint(den);
        // exact iff 5^scale divides the numerator
        let five = num_traits::pow(BigInt::from(5), scale as usize);
        if n.to_bigint().unwrap().is_multiple_of(&five) {
            let q = n.to_bigint().unwrap() / five;
            return Ok((Dyadic::new(q, -(scale as i64)), true));
        }
        Ok((n.div_round(&d, prec, dir), false))
    }
}

fn ldexp(m: f64, e: i64) -> f64 {
    let mut x = m;
    let mut e = e;
    while e > 1000 {
        x *= 2f64.powi(1000);
        e -= 1000;
        if x.is_infinite() {
            return x;
        }
    }
    while e < -1000 {
        x *= 2f64.powi(-1000);
        e += 1000;
        if x == 0.0 {
            return x;
        }
    }
    x * 2f64.powi(e as i32)
}

impl Default for Dyadic {
    fn default() -> Self {
        Dyadic::zero()
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let (sa, sb) = (self.signum(), other.signum());
        if sa != sb {
            return sa.cmp(&sb);
        }
        if sa == 0 {
            return Ordering::Equal;
        }
        // same sign: compare magnitudes by leading bit first
        let (la, lb) = (self.ilog2(), other.ilog2());
        if la != lb {
            let mag = la.cmp(&lb);
            return if sa > 0 { mag } else { mag.reverse() };
        }
        (self - other).signum().cmp(&0)
    }
}

fn align(a: &Dyadic, b: &Dyadic) -> (BigInt, BigInt, i64) {
    let e = a.exponent.min(b.exponent);
    let ma = &a.mantissa << (a.exponent - e) as usize;
    let mb = &b.mantissa << (b.exponent - e) as usize;
    (ma, mb, e)
}

impl Add for &Dyadic {
    type Output = Dyadic;
    fn add(self, rhs: &Dyadic) -> Dyadic {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        let (a, b, e) = align(self, rhs);
        Dyadic::new(a + b, e)
    }
}

impl Sub for &Dyadic {
    type Output = Dyadic;
    fn sub(self, rhs: &Dyadic) -> Dyadic {
        if rhs.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return -rhs;
        }
        let (a, b, e) = align(self, rhs);
        Dyadic::new(a - b, e)
    }
}

impl Mul for &Dyadic {
    type Output = Dyadic;
    fn mul(self, rhs: &Dyadic) -> Dyadic {
        if self.is_zero() || rhs.is_zero() {
            return Dyadic::zero();
        }
        // product of odd mantissas is odd: already canonical
        Dyadic {
            mantissa: &self.mantissa * &rhs.mantissa,
            exponent: self.exponent + rhs.exponent,
        }
    }
}

impl Neg for &Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        Dyadic {
            mantissa: -&self.mantissa,
            exponent: self.exponent,
        }
    }
}

impl Neg for Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        Dyadic {
            mantissa: -self.mantissa,
            exponent: self.exponent,
        }
    }
}

macro_rules! forward_owned {
    ($($tr:ident :: $m:ident),*) => {$(
        impl $tr for Dyadic {
            type Output = Dyadic;
            fn $m(self, rhs: Dyadic) -> Dyadic { (&self).$m(&rhs) }
        }
        impl $tr<&Dyadic> for Dyadic {
            type Output = Dyadic;
            fn $m(self, rhs: &Dyadic) -> Dyadic { (&self).$m(rhs) }
        }
    )*};
}
forward_owned!(Add::add, Sub::sub, Mul::mul);

impl From<i64> for Dyadic {
    fn from(v: i64) -> Self {
        Dyadic::from_i64(v)
    }
}

impl fmt::Debug for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_hex_string())
    }
}

/// Human-readable rendering; the hex form is the normative one.
impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_f64())
    }
}

impl FromStr for Dyadic {
    type Err = ParseDyadicError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        if t.contains("0x") {
            return Dyadic::parse_hex(t);
        }
        match Dyadic::from_decimal(t, 64, Round::Nearest)? {
            (d, true) => Ok(d),
            _ => Err(ParseDyadicError(s.to_string())),
        }
    }
}

impl Serialize for Dyadic {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_hex_string())
    }
}

impl<'de> Deserialize<'de> for Dyadic {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        Dyadic::parse_hex(&s).map_err(serde::de::Error::custom)
    }
}
