use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Environment variable read by [`PrecisionContext::from_env`].
pub const DIGITS_ENV_VAR: &str = "CAUCHY_SPECTRAL_DIGITS";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PrecisionMode {
    Machine,
    Extended,
}

/// Requested working precision for extended-precision assembly.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrecisionContext {
    pub significant_digits: u32,
    pub mode: PrecisionMode,
    /// Let assembly routines raise the digit count when the requested
    /// precision cannot survive their cancellation. When false they fail
    /// with `PrecisionExhausted` instead.
    pub auto_raise: bool,
}

impl Default for PrecisionContext {
    fn default() -> Self {
        PrecisionContext { significant_digits: 50, mode: PrecisionMode::Extended, auto_raise: true }
    }
}

impl PrecisionContext {
    pub fn new(significant_digits: u32, mode: PrecisionMode) -> Result<Self> {
        if significant_digits < 15 {
            return Err(Error::InvalidArgument(format!(
                "at least 15 significant digits are required, got {significant_digits}"
            )));
        }
        Ok(PrecisionContext { significant_digits, mode, auto_raise: true })
    }

    pub fn machine() -> Self {
        PrecisionContext { significant_digits: 15, mode: PrecisionMode::Machine, auto_raise: false }
    }

    /// Default context with the digit count taken from `CAUCHY_SPECTRAL_DIGITS` when set.
    pub fn from_env() -> Result<Self> {
        match std::env::var(DIGITS_ENV_VAR) {
            Ok(s) => {
                let d: u32 = s
                    .trim()
                    .parse()
                    .map_err(|_| Error::InvalidArgument(format!("{DIGITS_ENV_VAR}={s:?} is not an integer")))?;
                Self::new(d, PrecisionMode::Extended)
            }
            Err(_) => Ok(Self::default()),
        }
    }

    pub fn with_auto_raise(mut self, on: bool) -> Self {
        self.auto_raise = on;
        self
    }

    /// Mantissa bits used for the requested digits (plus guard bits).
    pub fn bits(&self) -> u64 {
        match self.mode {
            PrecisionMode::Machine => 53,
            PrecisionMode::Extended => digits_to_bits(self.significant_digits),
        }
    }

    /// Unit roundoff of one operation.
    pub fn unit_roundoff(&self) -> f64 {
        match self.mode {
            PrecisionMode::Machine => f64::EPSILON / 2.0,
            PrecisionMode::Extended => 2f64.powi(-(self.bits() as i32).min(1070)),
        }
    }

    pub fn from_f64(&self, x: f64) -> ExtFloat {
        ExtFloat::from_f64(x, self.bits())
    }

    pub fn from_int(&self, n: &BigInt) -> ExtFloat {
        ExtFloat::from_bigint(n.clone(), self.bits())
    }

    pub fn from_ratio(&self, num: &BigInt, den: &BigInt) -> ExtFloat {
        ExtFloat::from_ratio(num, den, self.bits())
    }

    /// Γ(a + 1/2)/Γ(a + 1) for integer a ≥ 0, divided by √π: C(2a, a)/4^a exactly, then rounded.
    pub fn half_gamma_ratio(&self, a: u64) -> ExtFloat {
        let num = binomial(2 * a, a);
        let den = BigInt::one() << (2 * a);
        self.from_ratio(&num, &den)
    }
}

fn digits_to_bits(d: u32) -> u64 {
    (d as f64 * std::f64::consts::LOG2_10).ceil() as u64 + 8
}

/// Exact binomial coefficient.
pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// Binary floating point number `mantissa · 2^exponent` with a bounded
/// mantissa length, rounded to nearest after every operation.
#[derive(Clone, PartialEq, Eq)]
pub struct ExtFloat {
    mantissa: BigInt,
    exponent: i64,
    bits: u64,
}

impl fmt::Debug for ExtFloat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ExtFloat({:e} @ {} bits)", self.to_f64(), self.bits)
    }
}

impl ExtFloat {
    pub fn zero(bits: u64) -> Self {
        ExtFloat { mantissa: BigInt::zero(), exponent: 0, bits }
    }

    pub fn from_bigint(m: BigInt, bits: u64) -> Self {
        Self::normalized(m, 0, bits)
    }

    /// Exact conversion (every f64 fits in 53 bits), then rounded to `bits`.
    pub fn from_f64(x: f64, bits: u64) -> Self {
        assert!(x.is_finite(), "cannot convert {x} to ExtFloat");
        if x == 0.0 {
            return Self::zero(bits);
        }
        let raw = x.to_bits();
        let sign = if raw >> 63 == 1 { -1 } else { 1 };
        let exp = ((raw >> 52) & 0x7ff) as i64;
        let frac = raw & ((1u64 << 52) - 1);
        let (m, e) = if exp == 0 { (frac, -1074) } else { (frac | (1u64 << 52), exp - 1075) };
        Self::normalized(BigInt::from(m) * sign, e, bits)
    }

    pub fn from_ratio(num: &BigInt, den: &BigInt, bits: u64) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        if num.is_zero() {
            return Self::zero(bits);
        }
        let shift = bits as i64 + 2 + den.bits() as i64 - num.bits() as i64;
        let q = if shift >= 0 { (num << shift as usize).div_floor(den) } else { num.div_floor(&(den << (-shift) as usize)) };
        Self::normalized(q, -shift, bits)
    }

    fn normalized(m: BigInt, e: i64, bits: u64) -> Self {
        let len = m.bits();
        if len <= bits {
            return ExtFloat { mantissa: m, exponent: e, bits };
        }
        let excess = len - bits;
        let (sign, mag) = (m.sign(), m.magnitude().clone());
        // round half away from zero
        let half = BigUint::one() << (excess - 1);
        let mut r: BigUint = (mag + half) >> excess;
        let mut e = e + excess as i64;
        if r.bits() > bits {
            r >>= 1u32;
            e += 1;
        }
        ExtFloat { mantissa: BigInt::from_biguint(sign, r), exponent: e, bits }
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa.is_zero()
    }

    pub fn neg(&self) -> Self {
        ExtFloat { mantissa: -self.mantissa.clone(), exponent: self.exponent, bits: self.bits }
    }

    pub fn abs(&self) -> Self {
        ExtFloat { mantissa: self.mantissa.abs(), exponent: self.exponent, bits: self.bits }
    }

    pub fn add(&self, other: &Self) -> Self {
        let bits = self.bits.max(other.bits);
        if self.is_zero() {
            return Self::normalized(other.mantissa.clone(), other.exponent, bits);
        }
        if other.is_zero() {
            return Self::normalized(self.mantissa.clone(), self.exponent, bits);
        }
        let (hi, lo) = if self.exponent >= other.exponent { (self, other) } else { (other, self) };
        let gap = (hi.exponent - lo.exponent) as u64;
        // lo is far below the rounding position of hi
        let hi_top = hi.exponent + hi.mantissa.bits() as i64;
        let lo_top = lo.exponent + lo.mantissa.bits() as i64;
        if hi_top - lo_top > bits as i64 + 4 {
            // nudge by one sticky unit so that ties still round correctly
            let m = (&hi.mantissa << 3usize) + lo.mantissa.signum();
            return Self::normalized(m, hi.exponent - 3, bits);
        }
        let m = (&hi.mantissa << gap as usize) + &lo.mantissa;
        Self::normalized(m, lo.exponent, bits)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let bits = self.bits.max(other.bits);
        Self::normalized(&self.mantissa * &other.mantissa, self.exponent + other.exponent, bits)
    }

    /// Multiplication by an exact integer.
    pub fn mul_int(&self, k: &BigInt) -> Self {
        Self::normalized(&self.mantissa * k, self.exponent, self.bits)
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        if other.is_zero() {
            return Err(Error::Domain("division by zero in extended precision".into()));
        }
        let bits = self.bits.max(other.bits);
        if self.is_zero() {
            return Ok(Self::zero(bits));
        }
        let shift = bits as i64 + 2 + other.mantissa.bits() as i64 - self.mantissa.bits() as i64;
        let shift = shift.max(0);
        let q = (&self.mantissa << shift as usize) / &other.mantissa;
        Ok(Self::normalized(q, self.exponent - other.exponent - shift, bits))
    }

    /// Multiplication by 2^k (exact).
    pub fn ldexp(&self, k: i64) -> Self {
        ExtFloat { mantissa: self.mantissa.clone(), exponent: self.exponent + k, bits: self.bits }
    }

    /// Nearest double (up to one extra rounding in the last bit).
    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let len = self.mantissa.bits() as i64;
        let drop = (len - 64).max(0);
        let top = (&self.mantissa >> drop as usize).to_i128().unwrap_or(0) as f64;
        ldexp(top, self.exponent + drop)
    }

    /// log₂|x| (−∞ for zero).
    pub fn log2_abs(&self) -> f64 {
        if self.is_zero() {
            return f64::NEG_INFINITY;
        }
        let len = self.mantissa.bits() as i64;
        let drop = (len - 64).max(0);
        let top = (self.mantissa.magnitude() >> drop as usize).to_u64().unwrap_or(u64::MAX) as f64;
        top.log2() + (self.exponent + drop) as f64
    }

    pub fn sign(&self) -> Sign {
        self.mantissa.sign()
    }
}

impl PartialOrd for ExtFloat {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        let d = self.sub(other);
        Some(match d.sign() {
            Sign::Minus => Ordering::Less,
            Sign::NoSign => Ordering::Equal,
            Sign::Plus => Ordering::Greater,
        })
    }
}

fn ldexp(x: f64, k: i64) -> f64 {
    let mut x = x;
    let mut k = k;
    while k > 1000 {
        x *= 2f64.powi(1000);
        k -= 1000;
        if x.is_infinite() {
            return x;
        }
    }
    while k < -1000 {
        x *= 2f64.powi(-1000);
        k += 1000;
        if x == 0.0 {
            return x;
        }
    }
    x * 2f64.powi(k as i32)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn default_is_fifty_digits_extended() {
        let c = PrecisionContext::default();
        assert_eq!(c.significant_digits, 50);
        assert_eq!(c.mode, PrecisionMode::Extended);
        assert!(c.bits() >= 166);
    }

    #[test]
    fn rejects_too_few_digits() {
        assert!(PrecisionContext::new(14, PrecisionMode::Extended).is_err());
    }

    #[test]
    fn third_times_three() {
        let c = PrecisionContext::default();
        let third = c.from_ratio(&BigInt::from(1), &BigInt::from(3));
        let one = third.mul(&c.from_f64(3.0));
        let err = one.sub(&c.from_f64(1.0));
        assert!(err.log2_abs() < -(c.bits() as f64) + 3.0);
    }

    #[test]
    fn survives_cancellation_that_defeats_doubles() {
        // (1e30 + 1) − 1e30 = 1
        let c = PrecisionContext::default();
        let big = c.from_f64(1e30);
        let r = big.add(&c.from_f64(1.0)).sub(&big);
        assert_eq!(r.to_f64(), 1.0);
    }

    #[test]
    fn half_gamma_ratio_matches_gamma() {
        // Γ(5/2)/(Γ(3)√π) = (3/4)/2 = 3/8
        let c = PrecisionContext::default();
        assert_eq!(c.half_gamma_ratio(2).to_f64(), 0.375);
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(10, 3), BigInt::from(120));
        assert_eq!(binomial(4, 7), BigInt::zero());
    }

    proptest! {
        #[test]
        fn roundtrip_f64(x in -1e300f64..1e300) {
            let c = PrecisionContext::default();
            prop_assert_eq!(c.from_f64(x).to_f64(), x);
        }

        #[test]
        fn arithmetic_agrees_with_f64(a in -1e6f64..1e6, b in 1e-3f64..1e6) {
            let c = PrecisionContext::default();
            let (ea, eb) = (c.from_f64(a), c.from_f64(b));
            let tol = |v: f64| 4.0 * f64::EPSILON * v.abs().max(f64::MIN_POSITIVE);
            prop_assert!((ea.add(&eb).to_f64() - (a + b)).abs() <= tol(a + b));
            prop_assert!((ea.sub(&eb).to_f64() - (a - b)).abs() <= tol(a - b));
            prop_assert!((ea.mul(&eb).to_f64() - a * b).abs() <= tol(a * b));
            prop_assert!((ea.div(&eb).unwrap().to_f64() - a / b).abs() <= tol(a / b));
        }
    }
}
