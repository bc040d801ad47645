//! Probability of drawing a dimension-zero divisor, and leading-term
//! asymptotics for families with prescribed place densities `beta_m`.
//!
//! Admissibility and thresholds are decided exactly. The logarithmic
//! estimates are floating point rendered to 12 digits; they ignore the
//! `o(g)` terms and never feed an existence certificate.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::criteria::{l_q, general_applicable};
use crate::error::{Error, Result};
use crate::quadratic::AlgebraicNumber;

pub const DECIMAL_DIGITS: usize = 12;
/// Margins closer to zero than this are reported as indeterminate.
pub const SIGN_TOLERANCE: f64 = 1e-9;
const HEURISTIC: &str = "leading-term heuristic; o(g) terms are not modeled";

/// `1 - 1/l_q(k)`, a lower bound on the chance that a uniformly drawn class
/// of degree `g - k` has dimension zero.
pub fn draw_probability(q: u64, k: usize) -> Result<AlgebraicNumber> {
    crate::field::prime_power(q)?;
    if !general_applicable(q, k) {
        return Err(Error::NotApplicable(format!("l_{q}({k}) < 1")));
    }
    Ok(AlgebraicNumber::one() - l_q(q, k).checked_recip()?)
}

/// Asymptotic densities `beta_m = lim B_m / g`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BetaSequence {
    pub q: u64,
    pub entries: BTreeMap<usize, AlgebraicNumber>,
}

impl BetaSequence {
    pub fn new(q: u64, entries: BTreeMap<usize, AlgebraicNumber>) -> Result<Self> {
        crate::field::prime_power(q)?;
        for (&m, b) in &entries {
            if m == 0 {
                return Err(Error::invalid("place degrees start at 1"));
            }
            if b.signum().is_lt() {
                return Err(Error::invalid(format!("beta_{m} = {b} is negative")));
            }
        }
        let seq = BetaSequence { q, entries };
        if !seq.is_admissible() {
            return Err(Error::invalid(format!(
                "sum m beta_m / (q^(m/2) - 1) = {} exceeds 1",
                seq.weil_sum()
            )));
        }
        Ok(seq)
    }

    /// Parses `"m:value,m:value"`, values in the `AlgebraicNumber` syntax
    /// (`1/3`, `sqrt(2)-1`, ...). An empty string is the zero sequence.
    pub fn parse(q: u64, text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (m, v) = part
                .split_once(':')
                .ok_or_else(|| Error::invalid(format!("expected m:value, got {part:?}")))?;
            let m: usize = m
                .trim()
                .parse()
                .map_err(|_| Error::invalid(format!("bad degree {m:?}")))?;
            let v: AlgebraicNumber = v.parse()?;
            if entries.insert(m, v).is_some() {
                return Err(Error::invalid(format!("beta_{m} given twice")));
            }
        }
        Self::new(q, entries)
    }

    /// `sum m beta_m / (q^{m/2} - 1)`
    pub fn weil_sum(&self) -> AlgebraicNumber {
        self.weighted_sum(|m| AlgebraicNumber::half_power(self.q, m as i64))
    }

    /// `sum m beta_m / (q^m - 1)`
    pub fn threshold(&self) -> AlgebraicNumber {
        self.weighted_sum(|m| AlgebraicNumber::half_power(self.q, 2 * m as i64))
    }

    fn weighted_sum(&self, power: impl Fn(usize) -> AlgebraicNumber) -> AlgebraicNumber {
        self.entries.iter().fold(AlgebraicNumber::zero(), |acc, (&m, b)| {
            let den = power(m) - AlgebraicNumber::one();
            let term = (AlgebraicNumber::from_int(m as i64) * b.clone())
                .checked_div(&den)
                .expect("q^(m/2) > 1");
            acc + term
        })
    }

    pub fn is_admissible(&self) -> bool {
        self.weil_sum() <= AlgebraicNumber::one()
    }

    /// `sum beta_m log_q(q^m / (q^m - 1))` in floating point.
    pub fn log_excess(&self) -> f64 {
        let lq = (self.q as f64).ln();
        self.entries
            .iter()
            .map(|(&m, b)| {
                let x = (self.q as f64).powi(m as i32).recip();
                b.to_f64() * -(-x).ln_1p() / lq
            })
            .sum()
    }
}

/// A floating-point value kept only as its fixed-precision rendering.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Estimate {
    pub decimal: String,
    pub precision: usize,
}

impl Estimate {
    fn new(value: f64) -> Self {
        Estimate { decimal: format!("{value:.DECIMAL_DIGITS$}"), precision: DECIMAL_DIGITS }
    }

    pub fn value(&self) -> f64 {
        self.decimal.parse().unwrap_or(f64::NAN)
    }
}

/// `g (1 + sum beta_m log_q(q^m/(q^m-1)))`
pub fn asymptotic_h_estimate(beta: &BetaSequence, g: u64) -> Estimate {
    Estimate::new(g as f64 * (1.0 + beta.log_excess()))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AEstimate {
    pub degree: u64,
    /// `g sum m beta_m / (q^m - 1)`, exact.
    pub threshold: AlgebraicNumber,
    pub threshold_cleared: bool,
    pub estimate: Option<Estimate>,
}

/// `a + g sum beta_m log_q(q^m/(q^m-1))`, only when `a` clears the threshold.
pub fn asymptotic_a_estimate(beta: &BetaSequence, a: u64, g: u64) -> AEstimate {
    let threshold = beta.threshold() * AlgebraicNumber::from_int(g as i64);
    let cleared = AlgebraicNumber::from_int(a as i64) >= threshold;
    AEstimate {
        degree: a,
        threshold,
        threshold_cleared: cleared,
        estimate: cleared.then(|| Estimate::new(a as f64 + g as f64 * beta.log_excess())),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MarginSign {
    Positive,
    Negative,
    Indeterminate,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AsymptoticReport {
    pub q: u64,
    pub g: u64,
    pub epsilon: AlgebraicNumber,
    pub l: AlgebraicNumber,
    pub log_q_h: Estimate,
    pub log_q_l: Estimate,
    pub log_q_a: AEstimate,
    /// `sum m beta_m / (q^m - 1)`, exact.
    pub threshold: AlgebraicNumber,
    pub margin: Option<Estimate>,
    pub sign: MarginSign,
    pub note: String,
}

/// Leading-term comparison of `log_q h` with `log_q l + log_q A` at degree
/// `ceil(g (1 - epsilon))`.
pub fn asymptotic_margin(
    beta: &BetaSequence,
    epsilon: &BigRational,
    l: &BigRational,
    g: u64,
) -> Result<AsymptoticReport> {
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    if !epsilon.is_positive() || *epsilon >= half {
        return Err(Error::invalid(format!("epsilon = {epsilon} outside (0, 1/2)")));
    }
    if *l < BigRational::one() {
        return Err(Error::invalid(format!("l = {l} must be at least 1")));
    }
    let q = beta.q;
    let scaled = BigRational::from_integer(BigInt::from(g)) * (BigRational::one() - epsilon);
    let degree = scaled
        .numer()
        .div_ceil(scaled.denom())
        .to_u64()
        .ok_or_else(|| Error::invalid("degree overflow"))?;
    let log_q_h = asymptotic_h_estimate(beta, g);
    let log_q_l = Estimate::new(l.to_f64().unwrap_or(f64::INFINITY).ln() / (q as f64).ln());
    let log_q_a = asymptotic_a_estimate(beta, degree, g);
    let h_raw = g as f64 * (1.0 + beta.log_excess());
    let l_raw = l.to_f64().unwrap_or(f64::INFINITY).ln() / (q as f64).ln();
    let margin_raw = log_q_a
        .threshold_cleared
        .then(|| h_raw - l_raw - (degree as f64 + g as f64 * beta.log_excess()));
    let sign = match margin_raw {
        Some(m) if m > SIGN_TOLERANCE => MarginSign::Positive,
        Some(m) if m < -SIGN_TOLERANCE => MarginSign::Negative,
        _ => MarginSign::Indeterminate,
    };
    let margin = margin_raw.map(Estimate::new);
    Ok(AsymptoticReport {
        q,
        g,
        epsilon: AlgebraicNumber::from_rational(epsilon),
        l: AlgebraicNumber::from_rational(l),
        log_q_h,
        log_q_l,
        log_q_a,
        threshold: beta.threshold(),
        margin,
        sign,
        note: HEURISTIC.into(),
    })
}

/// Checks `threshold <= weil_sum / (sqrt q + 1) < 1/2` exactly.
pub fn threshold_chain_holds(beta: &BetaSequence) -> bool {
    let s = AlgebraicNumber::sqrt_of(beta.q) + AlgebraicNumber::one();
    let middle = beta.weil_sum().checked_div(&s).expect("sqrt q + 1 > 0");
    let half = AlgebraicNumber::from_ratio(1, 2);
    beta.threshold() <= middle && middle < half
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    #[test]
    fn probabilities() {
        assert_eq!(draw_probability(16, 3).unwrap().to_string(), "287/288");
        assert_eq!(draw_probability(256, 1).unwrap().to_string(), "224/225");
        assert!(draw_probability(4, 1).unwrap().is_zero());
        assert!(draw_probability(2, 4).is_err());
        let p = draw_probability(2, 5).unwrap();
        assert!(!p.is_rational());
        assert_eq!(p.to_decimal(12).len(), 14);
    }

    #[test]
    fn beta_parsing_and_admissibility() {
        let b = BetaSequence::parse(2, "1:sqrt(2)-1").unwrap();
        assert_eq!(b.weil_sum(), AlgebraicNumber::one());
        assert!(BetaSequence::parse(4, "1:1").is_ok());
        assert!(BetaSequence::parse(4, "1:2").is_err());
        assert!(BetaSequence::parse(4, "1:-1/2").is_err());
        assert!(BetaSequence::parse(4, "0:1").is_err());
        assert!(BetaSequence::parse(4, "1:1/4,1:1/4").is_err());
        assert!(BetaSequence::parse(4, "").unwrap().entries.is_empty());
    }

    #[test]
    fn estimates() {
        let empty = BetaSequence::parse(2, "").unwrap();
        assert_eq!(asymptotic_h_estimate(&empty, 10).decimal, "10.000000000000");
        let a = asymptotic_a_estimate(&empty, 5, 10);
        assert!(a.threshold_cleared);
        assert_eq!(a.estimate.unwrap().value(), 5.0);

        let dv = BetaSequence::parse(4, "1:1").unwrap();
        let h = asymptotic_h_estimate(&dv, 100);
        assert!((h.value() - 120.7518749639).abs() < 1e-9, "{}", h.decimal);
        let a = asymptotic_a_estimate(&dv, 60, 100);
        assert_eq!(a.threshold.to_string(), "100/3");
        assert!((a.estimate.unwrap().value() - 80.7518749639).abs() < 1e-9);
        let below = asymptotic_a_estimate(&dv, 33, 100);
        assert!(!below.threshold_cleared && below.estimate.is_none());
    }

    #[test]
    fn margins() {
        let empty = BetaSequence::parse(2, "").unwrap();
        let r = asymptotic_margin(&empty, &rat(1, 4), &rat(1, 1), 100).unwrap();
        assert_eq!(r.margin.unwrap().decimal, "25.000000000000");
        assert_eq!(r.sign, MarginSign::Positive);
        let dv = BetaSequence::parse(4, "1:1").unwrap();
        let r = asymptotic_margin(&dv, &rat(1, 10), &rat(2, 1), 1000).unwrap();
        // 1000 - 1/2 - 900
        assert!((r.margin.unwrap().value() - 99.5).abs() < 1e-9);
        assert!(asymptotic_margin(&dv, &rat(3, 5), &rat(1, 1), 10).is_err());
        assert!(asymptotic_margin(&dv, &rat(0, 1), &rat(1, 1), 10).is_err());
        assert!(asymptotic_margin(&dv, &rat(1, 4), &rat(1, 2), 10).is_err());
    }

    #[test]
    fn margin_sign_near_zero_is_indeterminate() {
        // g = 1, epsilon just under 1/2: ceil(1 - eps) = 1, margin 1 - 1 = 0.
        let empty = BetaSequence::parse(3, "").unwrap();
        let r = asymptotic_margin(&empty, &rat(49, 100), &rat(1, 1), 1).unwrap();
        assert_eq!(r.sign, MarginSign::Indeterminate);
    }

    #[test]
    fn threshold_chain() {
        for (q, text) in [(2, "1:sqrt(2)-1"), (4, "1:1"), (4, "1:1/2,2:1/8"), (9, "2:1"), (3, "")] {
            let b = BetaSequence::parse(q, text).unwrap();
            assert!(threshold_chain_holds(&b), "q={q} beta={text}");
        }
    }
}
