//! Exact arithmetic in `Q(sqrt(d))` for squarefree `d`.
//!
//! Every constant attached to the existence criteria (`C_q`, `l_q(k)`,
//! `Delta_q`, probabilities, admissibility sums) is a number of the form
//! `(u + v sqrt(q)) / w`. Storing the squarefree part `d` of `q` instead of
//! `q` itself lets perfect squares collapse to rationals, and the sign of
//! `u + v sqrt(d)` is decided by integer squaring, so no comparison ever
//! goes through floating point.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// `(u + v sqrt(d)) / w` in lowest terms with `w > 0`; `d == 1` exactly
/// when `v == 0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AlgebraicNumber {
    u: BigInt,
    v: BigInt,
    w: BigInt,
    d: u64,
}

/// Writes `n = s^2 * d` with `d` squarefree and returns `(s, d)`.
pub fn squarefree_decomposition(mut n: u64) -> (u64, u64) {
    let mut s = 1u64;
    let mut d = 1u64;
    let mut p = 2u64;
    while p * p <= n {
        let mut e = 0;
        while n % p == 0 {
            n /= p;
            e += 1;
        }
        s *= p.pow(e / 2);
        if e % 2 == 1 {
            d *= p;
        }
        p += 1;
    }
    (s, d * n)
}

impl AlgebraicNumber {
    fn normalized(u: BigInt, v: BigInt, w: BigInt, d: u64) -> Self {
        assert!(!w.is_zero(), "zero denominator");
        let (mut u, mut v, mut w, mut d) = (u, v, w, d);
        if d == 1 {
            u += &v;
            v = BigInt::zero();
        }
        if v.is_zero() {
            d = 1;
        }
        if w.is_negative() {
            u = -u;
            v = -v;
            w = -w;
        }
        let g = u.gcd(&v).gcd(&w);
        if !g.is_one() && !g.is_zero() {
            u /= &g;
            v /= &g;
            w /= &g;
        }
        AlgebraicNumber { u, v, w, d }
    }

    pub fn from_int(n: impl Into<BigInt>) -> Self {
        Self::normalized(n.into(), BigInt::zero(), BigInt::one(), 1)
    }

    pub fn from_ratio(num: impl Into<BigInt>, den: impl Into<BigInt>) -> Self {
        Self::normalized(num.into(), BigInt::zero(), den.into(), 1)
    }

    pub fn from_rational(r: &BigRational) -> Self {
        Self::from_ratio(r.numer().clone(), r.denom().clone())
    }

    /// `(u + v sqrt(n)) / w` for any `n >= 1` (not necessarily squarefree).
    pub fn new(u: impl Into<BigInt>, v: impl Into<BigInt>, w: impl Into<BigInt>, n: u64) -> Self {
        let (s, d) = squarefree_decomposition(n);
        Self::normalized(u.into(), v.into() * BigInt::from(s), w.into(), d)
    }

    pub fn sqrt_of(n: u64) -> Self {
        Self::new(0, 1, 1, n)
    }

    /// `q^{e/2}` for any integer `e`.
    pub fn half_power(q: u64, e: i64) -> Self {
        let base = BigInt::from(q);
        let half = e.div_euclid(2);
        let odd = e.rem_euclid(2) == 1;
        let mut r = if half >= 0 {
            Self::from_int(base.pow(half as u32))
        } else {
            Self::from_ratio(BigInt::one(), base.pow((-half) as u32))
        };
        if odd {
            r = r * Self::sqrt_of(q);
        }
        r
    }

    pub fn zero() -> Self {
        Self::from_int(0)
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    pub fn parts(&self) -> (&BigInt, &BigInt, &BigInt, u64) {
        (&self.u, &self.v, &self.w, self.d)
    }

    pub fn is_rational(&self) -> bool {
        self.v.is_zero()
    }

    pub fn to_rational(&self) -> Option<BigRational> {
        self.is_rational()
            .then(|| BigRational::new(self.u.clone(), self.w.clone()))
    }

    pub fn is_zero(&self) -> bool {
        self.u.is_zero() && self.v.is_zero()
    }

    fn common_radicand(&self, other: &Self) -> u64 {
        match (self.d, other.d) {
            (1, d) | (d, 1) => d,
            (a, b) if a == b => a,
            (a, b) => panic!("mixing sqrt({a}) and sqrt({b})"),
        }
    }

    /// Exact sign of the number.
    pub fn signum(&self) -> Ordering {
        let su = self.u.sign();
        let sv = self.v.sign();
        match (su, sv) {
            (Sign::NoSign, s) | (s, Sign::NoSign) => sign_to_ord(s),
            (Sign::Plus, Sign::Plus) => Ordering::Greater,
            (Sign::Minus, Sign::Minus) => Ordering::Less,
            (Sign::Plus, Sign::Minus) => {
                let lhs = &self.u * &self.u;
                let rhs = &self.v * &self.v * BigInt::from(self.d);
                lhs.cmp(&rhs)
            }
            (Sign::Minus, Sign::Plus) => {
                let lhs = &self.v * &self.v * BigInt::from(self.d);
                let rhs = &self.u * &self.u;
                lhs.cmp(&rhs)
            }
        }
    }

    pub fn conjugate(&self) -> Self {
        Self::normalized(self.u.clone(), -self.v.clone(), self.w.clone(), self.d)
    }

    pub fn checked_recip(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero("algebraic reciprocal"));
        }
        // w / (u + v sqrt d) = w (u - v sqrt d) / (u^2 - d v^2)
        let norm = &self.u * &self.u - &self.v * &self.v * BigInt::from(self.d);
        Ok(Self::normalized(
            &self.w * &self.u,
            -(&self.w * &self.v),
            norm,
            self.d,
        ))
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self> {
        Ok(self.clone() * other.checked_recip()?)
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..e {
            acc = acc * self.clone();
        }
        acc
    }

    /// Greatest integer not exceeding the number.
    pub fn floor(&self) -> BigInt {
        if self.is_rational() {
            return self.u.div_floor(&self.w);
        }
        // s = floor(v sqrt d); sqrt d is irrational here.
        let r = (&self.v * &self.v * BigInt::from(self.d)).sqrt();
        let s = if self.v.is_negative() { -r - 1 } else { r };
        let base = (&self.u + &s).div_floor(&self.w);
        let next: BigInt = &base + BigInt::one();
        if *self >= Self::from_int(next.clone()) {
            next
        } else {
            base
        }
    }

    pub fn ceil(&self) -> BigInt {
        -(-self.clone()).floor()
    }

    /// Decimal rendering rounded half up to `digits` places.
    pub fn to_decimal(&self, digits: u32) -> String {
        let scale = BigInt::from(10).pow(digits);
        let scaled = self.clone() * Self::from_int(scale.clone()) + Self::from_ratio(1, 2);
        let n = scaled.floor();
        let neg = n.is_negative();
        let abs = n.abs();
        let int_part = &abs / &scale;
        let frac = (&abs % &scale).to_string();
        let mut out = String::new();
        if neg {
            out.push('-');
        }
        out.push_str(&int_part.to_string());
        if digits > 0 {
            out.push('.');
            for _ in frac.len()..digits as usize {
                out.push('0');
            }
            out.push_str(&frac);
        }
        out
    }

    pub fn to_f64(&self) -> f64 {
        self.to_decimal(17).parse().unwrap_or(f64::NAN)
    }
}

fn sign_to_ord(s: Sign) -> Ordering {
    match s {
        Sign::Minus => Ordering::Less,
        Sign::NoSign => Ordering::Equal,
        Sign::Plus => Ordering::Greater,
    }
}

impl Add for AlgebraicNumber {
    type Output = AlgebraicNumber;
    fn add(self, rhs: Self) -> Self {
        let d = self.common_radicand(&rhs);
        Self::normalized(
            &self.u * &rhs.w + &rhs.u * &self.w,
            &self.v * &rhs.w + &rhs.v * &self.w,
            &self.w * &rhs.w,
            d,
        )
    }
}

impl Neg for AlgebraicNumber {
    type Output = AlgebraicNumber;
    fn neg(self) -> Self {
        Self::normalized(-self.u, -self.v, self.w, self.d)
    }
}

impl Sub for AlgebraicNumber {
    type Output = AlgebraicNumber;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl Mul for AlgebraicNumber {
    type Output = AlgebraicNumber;
    fn mul(self, rhs: Self) -> Self {
        let d = self.common_radicand(&rhs);
        let dd = BigInt::from(d);
        Self::normalized(
            &self.u * &rhs.u + &self.v * &rhs.v * &dd,
            &self.u * &rhs.v + &self.v * &rhs.u,
            &self.w * &rhs.w,
            d,
        )
    }
}

impl PartialOrd for AlgebraicNumber {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for AlgebraicNumber {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.clone() - other.clone()).signum()
    }
}

impl From<i64> for AlgebraicNumber {
    fn from(n: i64) -> Self {
        Self::from_int(n)
    }
}

impl From<BigInt> for AlgebraicNumber {
    fn from(n: BigInt) -> Self {
        Self::from_int(n)
    }
}

impl fmt::Display for AlgebraicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_rational() {
            return if self.w.is_one() {
                write!(f, "{}", self.u)
            } else {
                write!(f, "{}/{}", self.u, self.w)
            };
        }
        let surd = match (&self.v, self.v.abs().is_one()) {
            (_, true) => format!("sqrt({})", self.d),
            (v, false) => format!("{}*sqrt({})", v.abs(), self.d),
        };
        let body = if self.u.is_zero() {
            if self.v.is_negative() {
                format!("-{surd}")
            } else {
                surd
            }
        } else {
            let op = if self.v.is_negative() { '-' } else { '+' };
            format!("{}{op}{surd}", self.u)
        };
        if self.w.is_one() {
            write!(f, "{body}")
        } else {
            write!(f, "({body})/{}", self.w)
        }
    }
}

fn parse_int(s: &str) -> Result<BigInt> {
    s.trim()
        .parse::<BigInt>()
        .map_err(|_| Error::invalid(format!("bad integer {s:?}")))
}

/// Parses `a`, `a/b`, `u+v*sqrt(n)`, `v*sqrt(n)`, `-sqrt(n)` and
/// `(...)/w`, the forms produced by `Display`.
impl FromStr for AlgebraicNumber {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() {
            return Err(Error::invalid("empty number"));
        }
        if let Some(rest) = s.strip_prefix('(') {
            let close = rest
                .rfind(')')
                .ok_or_else(|| Error::invalid(format!("unbalanced parentheses in {text:?}")))?;
            let inner: AlgebraicNumber = rest[..close].parse()?;
            let tail = &rest[close + 1..];
            return match tail.strip_prefix('/') {
                Some(den) => inner.checked_div(&Self::from_int(parse_int(den)?)),
                None if tail.is_empty() => Ok(inner),
                None => Err(Error::invalid(format!("unexpected {tail:?} in {text:?}"))),
            };
        }
        if !s.contains("sqrt") {
            return match s.split_once('/') {
                Some((n, d)) => {
                    let d = parse_int(d)?;
                    if d.is_zero() {
                        return Err(Error::DivisionByZero("rational literal"));
                    }
                    Ok(Self::from_ratio(parse_int(n)?, d))
                }
                None => Ok(Self::from_int(parse_int(&s)?)),
            };
        }
        // Split into signed terms at +/- that are not the leading sign.
        let mut terms = Vec::new();
        let mut start = 0;
        for (i, ch) in s.char_indices() {
            if i > 0 && (ch == '+' || ch == '-') {
                terms.push(&s[start..i]);
                start = i;
            }
        }
        terms.push(&s[start..]);
        let mut acc = Self::zero();
        for term in terms {
            let (neg, body) = match term.as_bytes()[0] {
                b'-' => (true, &term[1..]),
                b'+' => (false, &term[1..]),
                _ => (false, term),
            };
            let value = if let Some(pos) = body.find("sqrt(") {
                let coef = match body[..pos].strip_suffix('*') {
                    Some(c) => parse_int(c)?,
                    None if pos == 0 => BigInt::one(),
                    None => return Err(Error::invalid(format!("bad term {term:?}"))),
                };
                let radicand = body[pos + 5..]
                    .strip_suffix(')')
                    .ok_or_else(|| Error::invalid(format!("bad term {term:?}")))?;
                let n: u64 = radicand
                    .parse()
                    .map_err(|_| Error::invalid(format!("bad radicand {radicand:?}")))?;
                if n == 0 {
                    Self::zero()
                } else {
                    Self::new(0, coef, 1, n)
                }
            } else {
                Self::from_int(parse_int(body)?)
            };
            acc = acc + if neg { -value } else { value };
        }
        Ok(acc)
    }
}

impl Serialize for AlgebraicNumber {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for AlgebraicNumber {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn n(s: &str) -> AlgebraicNumber {
        s.parse().unwrap()
    }

    #[test]
    fn display_and_parse() {
        for s in ["6-4*sqrt(2)", "287/288", "-sqrt(3)", "(1+sqrt(5))/2", "0", "3*sqrt(2)", "-7/3"] {
            assert_eq!(n(s).to_string(), s);
        }
        assert_eq!(n("sqrt(8)").to_string(), "2*sqrt(2)");
        assert_eq!(n("sqrt(16)").to_string(), "4");
        assert!("1/0".parse::<AlgebraicNumber>().is_err());
        assert!("sqrt(2".parse::<AlgebraicNumber>().is_err());
        assert!("x".parse::<AlgebraicNumber>().is_err());
    }

    #[test]
    fn perfect_squares_collapse() {
        let r = AlgebraicNumber::sqrt_of(16);
        assert!(r.is_rational());
        assert_eq!(r, AlgebraicNumber::from_int(4));
        assert_eq!(AlgebraicNumber::half_power(16, 3), AlgebraicNumber::from_int(64));
        assert_eq!(AlgebraicNumber::half_power(2, 5).to_string(), "4*sqrt(2)");
        assert_eq!(AlgebraicNumber::half_power(4, -1).to_string(), "1/2");
    }

    #[test]
    fn field_operations() {
        let a = n("1+sqrt(2)");
        let inv = a.checked_recip().unwrap();
        assert_eq!(inv.to_string(), "-1+sqrt(2)");
        assert_eq!(a.clone() * inv, AlgebraicNumber::one());
        assert!(AlgebraicNumber::zero().checked_recip().is_err());
        assert_eq!(a.conjugate().to_string(), "1-sqrt(2)");
    }

    #[test]
    fn sign_close_to_one() {
        // l_2(4) = (6 - 4 sqrt 2) * 4 / sqrt 2 = 12 sqrt 2 - 16 < 1
        let c = n("6-4*sqrt(2)").checked_div(&AlgebraicNumber::sqrt_of(2)).unwrap();
        let l = c * AlgebraicNumber::from_int(4);
        assert_eq!(l.to_string(), "-16+12*sqrt(2)");
        assert!(l < AlgebraicNumber::one());
        assert!(l > n("97/100"));
    }

    #[test]
    fn floor_and_ceil() {
        assert_eq!(n("sqrt(2)").floor(), BigInt::from(1));
        assert_eq!(n("-sqrt(2)").floor(), BigInt::from(-2));
        assert_eq!(n("-sqrt(2)").ceil(), BigInt::from(-1));
        assert_eq!(n("(3+sqrt(5))/2").floor(), BigInt::from(2));
        assert_eq!(n("7/2").ceil(), BigInt::from(4));
        assert_eq!(n("-7/2").floor(), BigInt::from(-4));
        assert_eq!(n("4").ceil(), BigInt::from(4));
    }

    #[test]
    fn decimal_rendering() {
        assert_eq!(n("sqrt(2)").to_decimal(12), "1.414213562373");
        assert_eq!(n("-1/3").to_decimal(4), "-0.3333");
        assert_eq!(n("2/3").to_decimal(3), "0.667");
        assert_eq!(n("5").to_decimal(2), "5.00");
    }

    #[test]
    fn squarefree_parts() {
        assert_eq!(squarefree_decomposition(72), (6, 2));
        assert_eq!(squarefree_decomposition(256), (16, 1));
        assert_eq!(squarefree_decomposition(27), (3, 3));
        assert_eq!(squarefree_decomposition(1), (1, 1));
    }
}
