//! Existence criteria for dimension-zero divisors of degree `n = g - k`.
//!
//! Each criterion yields a [`CriterionResult`]; [`verdict`] evaluates all of
//! them for one `k`, attaches the exact hyperelliptic count when available,
//! and refuses to return a certified bound that exceeds it.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::divisors::{effective_count_gk, effective_count_series};
use crate::error::{Error, Result};
use crate::hyperelliptic::{h_gk0_closed, h_n0_via_sum};
use crate::quadratic::AlgebraicNumber;
use crate::zeta::{qpow, LPolynomial};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Conclusion {
    Exists,
    Unknown,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CriterionResult {
    pub name: String,
    pub applicable: bool,
    /// Degree the criterion speaks about.
    pub degree: usize,
    pub conclusion: Conclusion,
    /// Lower bound on `h_{degree,0}`; present only when existence is certified.
    #[serde(with = "crate::numstr::opt")]
    pub bound: Option<BigInt>,
    pub justification: String,
}

impl CriterionResult {
    fn exists(name: &str, degree: usize, bound: BigInt, justification: impl Into<String>) -> Self {
        debug_assert!(bound >= BigInt::one());
        CriterionResult {
            name: name.into(),
            applicable: true,
            degree,
            conclusion: Conclusion::Exists,
            bound: Some(bound),
            justification: justification.into(),
        }
    }

    fn unknown(name: &str, degree: usize, applicable: bool, justification: impl Into<String>) -> Self {
        CriterionResult {
            name: name.into(),
            applicable,
            degree,
            conclusion: Conclusion::Unknown,
            bound: None,
            justification: justification.into(),
        }
    }

    pub fn certifies(&self, degree: usize) -> bool {
        self.degree == degree && self.conclusion == Conclusion::Exists
    }
}

// ---------------------------------------------------------------------------
// Constants
// ---------------------------------------------------------------------------

/// `C_q = (sqrt q - 1)^2 / sqrt q`, doubled when `k >= 2`.
pub fn c_q(q: u64, k: usize) -> AlgebraicNumber {
    let s = AlgebraicNumber::sqrt_of(q);
    let t = s.clone() - AlgebraicNumber::one();
    let base = (t.clone() * t).checked_div(&s).expect("sqrt q > 0");
    if k >= 2 {
        base * AlgebraicNumber::from_int(2)
    } else {
        base
    }
}

/// `l_q(k) = C_q q^{k/2}`
pub fn l_q(q: u64, k: usize) -> AlgebraicNumber {
    c_q(q, k) * AlgebraicNumber::half_power(q, k as i64)
}

/// `q^{(g-k)/2}` for `k >= 2`, `2 q^{(g-1)/2}` for `k = 1`.
pub fn delta_q(q: u64, g: usize, k: usize) -> Result<AlgebraicNumber> {
    if k < 1 || k > g {
        return Err(Error::invalid(format!("Delta needs 1 <= k <= g, got k = {k}, g = {g}")));
    }
    let e = (g - k) as i64;
    Ok(if k == 1 {
        AlgebraicNumber::half_power(q, e) * AlgebraicNumber::from_int(2)
    } else {
        AlgebraicNumber::half_power(q, e)
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Constants {
    pub c_q: AlgebraicNumber,
    pub l_q: AlgebraicNumber,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<AlgebraicNumber>,
}

pub fn constants(q: u64, k: usize, g: Option<usize>) -> Result<Constants> {
    if k < 1 {
        return Err(Error::invalid("k must be at least 1"));
    }
    Ok(Constants {
        c_q: c_q(q, k),
        l_q: l_q(q, k),
        delta: g.map(|g| delta_q(q, g, k)).transpose()?,
    })
}

/// `l_q(k) >= 1`, decided exactly.
pub fn general_applicable(q: u64, k: usize) -> bool {
    k >= 1 && l_q(q, k) >= AlgebraicNumber::one()
}

/// Least `k >= 1` with `l_q(k) >= 1`.
pub fn kmin(q: u64) -> Result<usize> {
    crate::field::prime_power(q)?;
    Ok((1..).find(|&k| general_applicable(q, k)).expect("l_q(k) grows without bound"))
}

/// Least `k >= 1` with `l_q(k) >= l`, i.e. `C_q^2 q^k >= l^2`.
pub fn ratio_threshold(q: u64, l: &BigRational) -> Result<usize> {
    crate::field::prime_power(q)?;
    if *l < BigRational::one() {
        return Err(Error::invalid(format!("ratio must be at least 1, got {l}")));
    }
    let target = AlgebraicNumber::from_rational(l);
    Ok((1..).find(|&k| l_q(q, k) >= target).expect("l_q(k) grows without bound"))
}

// ---------------------------------------------------------------------------
// Criteria
// ---------------------------------------------------------------------------

fn check_k(l: &LPolynomial, k: usize) -> Result<()> {
    let g = l.genus();
    if k < 1 || k > g {
        return Err(Error::invalid(format!("k = {k} outside 1..={g}")));
    }
    Ok(())
}

/// `ceil(h (1 - 1/l_q(k)) + Delta_q)`.
pub fn general_bound_value(q: u64, g: usize, k: usize, h: &BigInt) -> Result<BigInt> {
    if !general_applicable(q, k) {
        return Err(Error::NotApplicable(format!("l_{q}({k}) < 1")));
    }
    let l = l_q(q, k);
    let one_minus = AlgebraicNumber::one() - l.checked_recip()?;
    let value = AlgebraicNumber::from_int(h.clone()) * one_minus + delta_q(q, g, k)?;
    Ok(value.ceil())
}

/// The certified version of [`general_bound_value`]. `Delta_q` comes from the
/// `A_0 = 1` term of the central-value sum, which is only separate from the
/// `A_{g-k}` term when `k < g`; at `k = g` it is dropped. Keeping it there
/// overstates the count (an elliptic curve over F_4 with `h = 1` would get
/// `h_{0,0} >= 2`).
pub fn general_bound(l: &LPolynomial, k: usize) -> Result<CriterionResult> {
    check_k(l, k)?;
    let (q, g) = (l.q(), l.genus());
    let h = l.class_number();
    let (bound, why) = if k < g {
        (
            general_bound_value(q, g, k, &h)?,
            format!("l_q(k) = {} >= 1, so h_(n,0) >= ceil(h(1 - 1/l_q(k)) + Delta_q)", l_q(q, k)),
        )
    } else {
        if !general_applicable(q, k) {
            return Err(Error::NotApplicable(format!("l_{q}({k}) < 1")));
        }
        let value = AlgebraicNumber::from_int(h) * (AlgebraicNumber::one() - l_q(q, k).checked_recip()?);
        (
            value.ceil(),
            format!("l_q(k) = {} >= 1, so h_(0,0) >= ceil(h(1 - 1/l_q(k))); no Delta at degree 0", l_q(q, k)),
        )
    };
    if bound < BigInt::one() {
        return Ok(CriterionResult::unknown("general", g - k, true, format!("bound {bound} certifies nothing")));
    }
    Ok(CriterionResult::exists("general", g - k, bound, why))
}

/// Existence whenever `A_n < h`, with `h_{n,0} >= h - A_n`.
pub fn effective_count_bound(l: &LPolynomial, n: usize, a_n: &BigInt) -> CriterionResult {
    let h = l.class_number();
    if *a_n < h {
        CriterionResult::exists(
            "effective_count",
            n,
            &h - a_n,
            format!("A_{n} = {a_n} < h = {h}, so not every class is effective"),
        )
    } else {
        CriterionResult::unknown(
            "effective_count",
            n,
            true,
            format!("A_{n} = {a_n} >= h = {h}; inconclusive"),
        )
    }
}

/// Coefficient criterion: `q^{-k+1} S_1 + S_2 >= 0` (strict when `q = 2`)
/// with `S_1 = sum_{i<=g+k-1} a_i`, `S_2 = sum_{i<=g-k} a_i`.
pub fn coefficient_sum_bound(l: &LPolynomial, k: usize) -> Result<CriterionResult> {
    check_k(l, k)?;
    let (q, g) = (l.q(), l.genus() as i64);
    let ki = k as i64;
    let s1 = l.coeff_sum(0, g + ki - 1);
    let s2 = l.coeff_sum(0, g - ki);
    let cleared = s1 + qpow(q, k - 1) * s2;
    let holds = if q == 2 { cleared.is_positive() } else { !cleared.is_negative() };
    let n = g as usize - k;
    if !holds {
        return Ok(CriterionResult::unknown(
            "coefficient_sums",
            n,
            true,
            format!("q^(k-1) * (condition) = {cleared} fails"),
        ));
    }
    let a = effective_count_gk(l, k)?;
    let bound = l.class_number() - &a;
    if bound < BigInt::one() {
        return Err(Error::consistency(format!(
            "coefficient condition holds but h - A_{n} = {bound}"
        )));
    }
    Ok(CriterionResult::exists(
        "coefficient_sums",
        n,
        bound,
        format!("q^(k-1) * (condition) = {cleared}; bound h - A_{n} from the L coefficients"),
    ))
}

fn binomial(n: usize, k: usize) -> BigInt {
    (0..k).fold(BigInt::one(), |acc, i| acc * BigInt::from(n - i) / BigInt::from(i + 1))
}

/// `(1 + q t)^{2g}` over `F_{q^2}`.
pub fn maximal_lpoly(q: u64, g: usize) -> Result<LPolynomial> {
    let a = (0..=g).map(|i| binomial(2 * g, i) * qpow(q, i)).collect();
    LPolynomial::new(q * q, g, a)
}

/// `(1 + q t^2)^g` over `F_q`.
pub fn descent_lpoly(q: u64, g: usize) -> Result<LPolynomial> {
    let a = (0..=g)
        .map(|i| if i % 2 == 0 { binomial(g, i / 2) * qpow(q, i / 2) } else { BigInt::zero() })
        .collect();
    LPolynomial::new(q, g, a)
}

fn rational_ceil(r: &BigRational) -> BigInt {
    r.numer().div_ceil(r.denom())
}

/// Coefficient-criterion bound written with binomial sums for the maximal
/// field over `F_{q^2}` (`L = (1 + q t)^{2g}`).
pub fn maximal_bound(q: u64, g: usize, k: usize) -> Result<BigInt> {
    if k < 1 || k > g {
        return Err(Error::invalid(format!("k = {k} outside 1..={g}")));
    }
    let r = |v: BigInt| BigRational::from_integer(v);
    let h = r(BigInt::from(q + 1).pow(2 * g as u32));
    let s1: BigInt = (0..=g + k - 1).map(|i| binomial(2 * g, i) * qpow(q, i)).sum();
    let s2: BigInt = (0..=g - k).map(|i| binomial(2 * g, i) * qpow(q, i)).sum();
    let qq = qpow(q, 2);
    let inner = (&h - r(s1)) / r(qpow(q, 2 * k - 2)) - r(s2);
    Ok(rational_ceil(&(h - inner / r(qq - 1))))
}

/// The same bound for the descent over `F_q` (`L = (1 + q t^2)^g`).
pub fn descent_bound(q: u64, g: usize, k: usize) -> Result<BigInt> {
    if k < 1 || k > g {
        return Err(Error::invalid(format!("k = {k} outside 1..={g}")));
    }
    let r = |v: BigInt| BigRational::from_integer(v);
    let h = r(BigInt::from(q + 1).pow(g as u32));
    let s1: BigInt = (0..=(g + k - 1) / 2).map(|i| binomial(g, i) * qpow(q, i)).sum();
    let s2: BigInt = (0..=(g - k) / 2).map(|i| binomial(g, i) * qpow(q, i)).sum();
    let inner = (&h - r(s1)) / r(qpow(q, k - 1)) - r(s2);
    Ok(rational_ceil(&(h - inner / r(BigInt::from(q - 1)))))
}

/// Existence at degree `gamma - 1` from the p-rank `gamma`.
pub fn prank_criterion(l: &LPolynomial) -> Result<CriterionResult> {
    let gamma = l.p_rank(l.characteristic())?;
    if gamma == 0 {
        return Err(Error::NotApplicable("p-rank 0 certifies no degree".into()));
    }
    Ok(CriterionResult::exists(
        "p_rank",
        gamma - 1,
        BigInt::one(),
        format!("p-rank {gamma}: a dimension-zero divisor of degree {} exists", gamma - 1),
    ))
}

/// Criteria driven by the number of rational places, for degree `g - k`.
/// Induction from degree `g - 1` is included when one of these certifies it.
pub fn b1_criteria(l: &LPolynomial, b1: u64, k: usize) -> Result<Vec<CriterionResult>> {
    check_k(l, k)?;
    let (q, g) = (l.q(), l.genus());
    let n = g - k;
    let mut out = Vec::new();
    let non_special = |name: &str, ok: bool, cond: String| {
        if ok {
            CriterionResult::exists(name, g - 1, BigInt::one(), format!("{cond}: a non-special divisor of degree g-1 exists"))
        } else {
            CriterionResult::unknown(name, g - 1, false, format!("needs {cond}"))
        }
    };
    out.push(non_special(
        "non_special_large_q",
        q >= 4 && g >= 2,
        format!("q >= 4 and g >= 2 (q = {q}, g = {g})"),
    ));
    out.push(non_special(
        "many_rational_places",
        b1 > g as u64,
        format!("B_1 >= g + 1 (B_1 = {b1}, g + 1 = {})", g + 1),
    ));
    let three = q == 2 && g >= 3 && b1 >= 3;
    out.push(if three && k >= 2 {
        CriterionResult::exists(
            "three_rational_places",
            n,
            BigInt::one(),
            format!("q = 2, g = {g} >= 3, B_1 = {b1} >= 3: degree g-k exists for k >= 2"),
        )
    } else {
        CriterionResult::unknown(
            "three_rational_places",
            n,
            three,
            format!("needs q = 2, g >= 3, B_1 >= 3 and k >= 2 (q = {q}, g = {g}, B_1 = {b1}, k = {k})"),
        )
    });
    if k > 1 {
        let sources: Vec<CriterionResult> = out.clone();
        out.push(induction(b1, n, &sources));
    }
    Ok(out)
}

/// Subtracting a rational place from a dimension-zero divisor keeps it
/// dimension zero, and `[D] -> [D - P]` is a bijection on classes, so any
/// certified degree `m > n` certifies `n` with the same bound.
pub fn induction(b1: u64, n: usize, sources: &[CriterionResult]) -> CriterionResult {
    let best = sources
        .iter()
        .filter(|c| c.conclusion == Conclusion::Exists && c.degree > n)
        .max_by(|a, b| a.bound.cmp(&b.bound));
    match (b1, best) {
        (0, _) => CriterionResult::unknown("induction", n, false, "no rational place"),
        (_, Some(src)) => CriterionResult::exists(
            "induction",
            n,
            src.bound.clone().expect("certified results carry a bound"),
            format!("B_1 = {b1} > 0 and degree {} certified by {}", src.degree, src.name),
        ),
        (_, None) => CriterionResult::unknown("induction", n, true, "no higher degree certified"),
    }
}

// ---------------------------------------------------------------------------
// Verdict
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExistenceVerdict {
    pub q: u64,
    pub g: usize,
    pub k: usize,
    pub n: usize,
    pub criteria: Vec<CriterionResult>,
    #[serde(with = "crate::numstr::opt")]
    pub best_bound: Option<BigInt>,
    #[serde(with = "crate::numstr::opt")]
    pub exact: Option<BigInt>,
    /// `Some` when existence is decided (by a certificate or an exact count).
    pub exists: Option<bool>,
    pub notes: Vec<String>,
}

/// Evaluates every criterion at degree `g - k`. Fails with a consistency
/// error if any certified bound exceeds the exact count.
pub fn verdict(l: &LPolynomial, k: usize, b1: Option<u64>, hyperelliptic: bool) -> Result<ExistenceVerdict> {
    check_k(l, k)?;
    let (q, g) = (l.q(), l.genus());
    let n = g - k;
    let h = l.class_number();
    let mut criteria = Vec::new();
    let mut notes = Vec::new();

    criteria.push(match general_bound(l, k) {
        Ok(c) => c,
        Err(Error::NotApplicable(why)) => CriterionResult::unknown("general", n, false, why),
        Err(e) => return Err(e),
    });
    criteria.push(effective_count_bound(l, n, &effective_count_series(l, n)));
    criteria.push(coefficient_sum_bound(l, k)?);
    match prank_criterion(l) {
        Ok(c) => criteria.push(c),
        Err(Error::NotApplicable(why)) => {
            criteria.push(CriterionResult::unknown("p_rank", n, false, why))
        }
        Err(e) => return Err(e),
    }
    if let Some(b1) = b1 {
        let mut extra = b1_criteria(l, b1, k)?;
        extra.retain(|c| c.name != "induction");
        criteria.extend(extra);
        if k > 1 {
            let ind = induction(b1, n, &criteria);
            criteria.push(ind);
        }
    }

    let exact = if k == g {
        notes.push("degree 0: a class has dimension zero exactly when it is not principal".into());
        Some(&h - 1)
    } else if hyperelliptic {
        let via_sum = h_n0_via_sum(l, n)?;
        if g >= 2 {
            let closed = h_gk0_closed(l, k)?;
            if closed.value != via_sum {
                return Err(Error::consistency(format!(
                    "closed form gives {}, class sum gives {via_sum}",
                    closed.value
                )));
            }
            if closed.outside_stated_hypothesis {
                notes.push("genus 2 lies outside the originally stated range of the closed form".into());
            }
        }
        Some(via_sum)
    } else {
        None
    };

    let best_bound = best_certified(n, &criteria, exact.as_ref())?;
    let exists = match (&exact, &best_bound) {
        (Some(e), _) => Some(e.is_positive()),
        (None, Some(_)) => Some(true),
        (None, None) => None,
    };
    Ok(ExistenceVerdict { q, g, k, n, criteria, best_bound, exact, exists, notes })
}

/// Largest certified bound at degree `n`, rejecting any above `exact`.
pub fn best_certified(n: usize, criteria: &[CriterionResult], exact: Option<&BigInt>) -> Result<Option<BigInt>> {
    let best = criteria
        .iter()
        .filter(|c| c.certifies(n))
        .filter_map(|c| c.bound.clone())
        .max();
    if let (Some(e), Some(b)) = (exact, &best) {
        if b > e {
            let who: Vec<&str> = criteria
                .iter()
                .filter(|c| c.certifies(n) && c.bound.as_ref().is_some_and(|x| x > e))
                .map(|c| c.name.as_str())
                .collect();
            return Err(Error::consistency(format!(
                "certified bound {b} exceeds exact h_({n},0) = {e} ({})",
                who.join(", ")
            )));
        }
    }
    Ok(best)
}
