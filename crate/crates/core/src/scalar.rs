//! Arithmetic backends: exact rationals and binary64.

use std::fmt;

use num::bigint::Sign;
use num::{BigInt, BigRational, Integer, One, Signed, ToPrimitive, Zero};

/// Exact rational number used throughout the exact backend.
pub type Rational = BigRational;

/// Absolute slack used by the binary64 backend for `<=` and zero tests.
pub const FLOAT_TOL: f64 = 1e-9;

/// Continued-fraction snapping tolerance when converting floats to rationals.
pub const SNAP_TOL: f64 = 1e-12;

/// Common interface of the two arithmetic backends.
pub trait Scalar: Clone + fmt::Debug + fmt::Display + PartialEq + PartialOrd + Signed + Send + Sync + 'static {
    /// True when arithmetic is exact.
    const EXACT: bool;

    fn from_i64(v: i64) -> Self;
    fn ratio(n: i64, d: i64) -> Self;
    fn to_f64(&self) -> f64;
    fn to_rational(&self) -> Rational;
    fn from_rational(r: &Rational) -> Self;
    /// Best-effort conversion from a float (snapped for the exact backend).
    fn from_f64(x: f64) -> Self;

    /// `self <= other`, with slack `FLOAT_TOL * max(1, |other|)` for floats.
    fn approx_le(&self, other: &Self) -> bool;
    fn approx_zero(&self) -> bool;

    fn approx_lt(&self, other: &Self) -> bool {
        !other.approx_le(self)
    }
    fn approx_eq(&self, other: &Self) -> bool {
        self.approx_le(other) && other.approx_le(self)
    }

    /// Non-negative real `n`-th root, `None` when not representable.
    fn nth_root(&self, n: u32) -> Option<Self>;
    /// Real power `self^p` for `self >= 0`, `None` when not representable.
    fn powf(&self, p: f64) -> Option<Self>;

    /// Inner product of two coordinate slices of equal length.
    fn dot(a: &[Self], b: &[Self]) -> Self {
        a.iter().zip(b).fold(Self::zero(), |acc, (x, y)| acc + x.clone() * y.clone())
    }

    fn sum(xs: &[Self]) -> Self {
        xs.iter().fold(Self::zero(), |acc, x| acc + x.clone())
    }

    fn powi(&self, e: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..e {
            acc = acc * self.clone();
        }
        acc
    }
}

/// `sum n_i / d_i` with a single reduction at the end.
fn sum_fractions(terms: impl Iterator<Item = (BigInt, BigInt)>) -> Rational {
    let mut num = BigInt::zero();
    let mut den = BigInt::one();
    for (n, d) in terms {
        if d == den {
            num += n;
        } else {
            let l = den.lcm(&d);
            num = num * (&l / &den) + n * (&l / &d);
            den = l;
        }
    }
    Rational::new(num, den)
}

impl Scalar for Rational {
    const EXACT: bool = true;

    fn from_i64(v: i64) -> Self {
        Rational::from_integer(BigInt::from(v))
    }
    fn ratio(n: i64, d: i64) -> Self {
        Rational::new(BigInt::from(n), BigInt::from(d))
    }
    fn to_f64(&self) -> f64 {
        rational_to_f64(self)
    }
    fn to_rational(&self) -> Rational {
        self.clone()
    }
    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }
    fn from_f64(x: f64) -> Self {
        snap(x)
    }
    fn approx_le(&self, other: &Self) -> bool {
        self <= other
    }
    fn approx_zero(&self) -> bool {
        self.is_zero()
    }
    /// Accumulates over a common denominator and reduces once.
    fn dot(a: &[Self], b: &[Self]) -> Self {
        sum_fractions(
            a.iter()
                .zip(b)
                .filter(|(x, y)| !x.is_zero() && !y.is_zero())
                .map(|(x, y)| (x.numer() * y.numer(), x.denom() * y.denom())),
        )
    }

    fn sum(xs: &[Self]) -> Self {
        sum_fractions(xs.iter().filter(|x| !x.is_zero()).map(|x| (x.numer().clone(), x.denom().clone())))
    }

    fn nth_root(&self, n: u32) -> Option<Self> {
        if self.is_negative() || n == 0 {
            return None;
        }
        let num = exact_int_root(self.numer(), n)?;
        let den = exact_int_root(self.denom(), n)?;
        Some(Rational::new(num, den))
    }
    fn powf(&self, p: f64) -> Option<Self> {
        if p.fract() == 0.0 && p >= 0.0 && p <= u32::MAX as f64 {
            Some(Scalar::powi(self, p as u32))
        } else {
            None
        }
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn from_i64(v: i64) -> Self {
        v as f64
    }
    fn ratio(n: i64, d: i64) -> Self {
        n as f64 / d as f64
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn to_rational(&self) -> Rational {
        snap(*self)
    }
    fn from_rational(r: &Rational) -> Self {
        rational_to_f64(r)
    }
    fn from_f64(x: f64) -> Self {
        x
    }
    fn approx_le(&self, other: &Self) -> bool {
        *self <= *other + FLOAT_TOL * other.abs().max(1.0)
    }
    fn approx_zero(&self) -> bool {
        self.abs() <= FLOAT_TOL
    }
    fn nth_root(&self, n: u32) -> Option<Self> {
        if *self < 0.0 || n == 0 {
            None
        } else {
            Some(f64::powf(*self, 1.0 / n as f64))
        }
    }
    fn powf(&self, p: f64) -> Option<Self> {
        Some(f64::powf(*self, p))
    }
}

fn exact_int_root(v: &BigInt, n: u32) -> Option<BigInt> {
    let r = v.nth_root(n);
    if num::pow(r.clone(), n as usize) == *v {
        Some(r)
    } else {
        None
    }
}

/// Converts a rational to the nearest-ish binary64 value, robust to huge parts.
pub fn rational_to_f64(r: &Rational) -> f64 {
    if let (Some(n), Some(d)) = (r.numer().to_f64(), r.denom().to_f64()) {
        if n.is_finite() && d.is_finite() && d != 0.0 {
            return n / d;
        }
    }
    let nb = r.numer().bits() as i64;
    let db = r.denom().bits() as i64;
    let shift = nb - db - 60;
    let scaled = if shift >= 0 {
        r.numer() / (r.denom() << (shift as usize))
    } else {
        (r.numer() << ((-shift) as usize)) / r.denom()
    };
    scaled.to_f64().unwrap_or(f64::NAN) * 2f64.powi(shift as i32)
}

/// Simplest rational within `SNAP_TOL` of `x`, found from continued-fraction convergents.
pub fn snap(x: f64) -> Rational {
    snap_with(x, SNAP_TOL)
}

pub fn snap_with(x: f64, tol: f64) -> Rational {
    if !x.is_finite() {
        return Rational::zero();
    }
    let neg = x < 0.0;
    let ax = x.abs();
    let (mut h0, mut h1) = (BigInt::zero(), BigInt::one());
    let (mut k0, mut k1) = (BigInt::one(), BigInt::zero());
    let mut rem = ax;
    for _ in 0..64 {
        let a = rem.floor();
        let ai = BigInt::from(a as u64);
        let h2 = &ai * &h1 + &h0;
        let k2 = &ai * &k1 + &k0;
        h0 = std::mem::replace(&mut h1, h2);
        k0 = std::mem::replace(&mut k1, k2);
        let approx = h1.to_f64().unwrap_or(f64::INFINITY) / k1.to_f64().unwrap_or(1.0);
        if (approx - ax).abs() <= tol * ax.max(1.0) {
            break;
        }
        let frac = rem - a;
        if frac <= 0.0 {
            break;
        }
        rem = 1.0 / frac;
        if !rem.is_finite() {
            break;
        }
    }
    let r = Rational::new(h1, k1);
    if neg {
        -r
    } else {
        r
    }
}

/// Formats a rational as `p/q` (or `p` for integers).
pub fn format_rational(r: &Rational) -> String {
    r.to_string()
}

/// Parses `p/q`, `p`, or a decimal literal into an exact rational.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(Rational::new(n, d));
    }
    if let Ok(n) = s.parse::<BigInt>() {
        return Some(Rational::from_integer(n));
    }
    parse_decimal(s)
}

fn parse_decimal(s: &str) -> Option<Rational> {
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (sign, body) = match mantissa.strip_prefix('-') {
        Some(rest) => (-1, rest),
        None => (1, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits: BigInt = format!("{}{}", int_part, frac_part).parse().ok()?;
    let scale = exp - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let mut r = Rational::from_integer(digits * sign);
    if scale >= 0 {
        r *= Rational::from_integer(num::pow(ten, scale as usize));
    } else {
        r /= Rational::from_integer(num::pow(ten, (-scale) as usize));
    }
    Some(r)
}

/// Exact floor of a rational.
pub fn floor_int(r: &Rational) -> BigInt {
    r.numer().div_floor(r.denom())
}

/// Exact ceiling of a rational.
pub fn ceil_int(r: &Rational) -> BigInt {
    -((-r.numer()).div_floor(r.denom()))
}

/// Sign of a scalar as -1, 0, or 1 in the same backend.
pub fn sign_of<S: Scalar>(x: &S) -> S {
    if x.is_zero() {
        S::zero()
    } else if x.is_positive() {
        S::one()
    } else {
        -S::one()
    }
}

pub fn is_negative_int(v: &BigInt) -> bool {
    v.sign() == Sign::Minus
}
