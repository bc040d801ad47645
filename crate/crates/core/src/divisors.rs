//! Effective divisor counts `A_n`, computed three ways: from the
//! L-polynomial by the zeta series, from the closed form at degree `g-k`,
//! and from place counts alone.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::curve::PlaceTable;
use crate::error::{Error, Result};
use crate::quadratic::AlgebraicNumber;
use crate::zeta::{qpow, LPolynomial};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CountSource {
    Series,
    ClosedForm,
    Oracle,
}

/// `A_0..A_max` from one source.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DivisorCountTable {
    pub q: u64,
    pub g: usize,
    #[serde(rename = "A", with = "crate::numstr::vec")]
    pub counts: Vec<BigInt>,
    pub source: CountSource,
}

impl DivisorCountTable {
    pub fn series(l: &LPolynomial, max_n: usize) -> Self {
        DivisorCountTable {
            q: l.q(),
            g: l.genus(),
            counts: (0..=max_n).map(|n| effective_count_series(l, n)).collect(),
            source: CountSource::Series,
        }
    }

    /// `A_0..A_{g-1}` from the degree-shift formula.
    pub fn closed_form(l: &LPolynomial) -> Result<Self> {
        let g = l.genus();
        let counts = (0..g)
            .map(|n| effective_count_gk(l, g - n))
            .collect::<Result<_>>()?;
        Ok(DivisorCountTable { q: l.q(), g, counts, source: CountSource::ClosedForm })
    }

    pub fn oracle(pt: &PlaceTable, g: usize, max_n: usize) -> Result<Self> {
        Ok(DivisorCountTable {
            q: pt.q,
            g,
            counts: oracle_series(pt, max_n)?,
            source: CountSource::Oracle,
        })
    }

    /// `A_n`, with `A_n = 0` for negative `n`.
    pub fn get(&self, n: i64) -> BigInt {
        if n < 0 {
            return BigInt::zero();
        }
        self.counts
            .get(n as usize)
            .cloned()
            .unwrap_or_else(|| panic!("A_{n} beyond table of length {}", self.counts.len()))
    }
}

/// `A_n = sum_{i<=n} (q^{n-i+1} - 1)/(q - 1) a_i`
pub fn effective_count_series(l: &LPolynomial, n: usize) -> BigInt {
    let q = l.q();
    (0..=n)
        .map(|i| {
            let geom = (qpow(q, n - i + 1) - 1) / BigInt::from(q - 1);
            geom * l.coeff(i as i64)
        })
        .sum()
}

/// `A_{g-k}` via `(q-1) q^{k-1} A_{g-k} = (h - S_1) - q^{k-1} S_2` with
/// `S_1 = sum_{i<=g+k-1} a_i` and `S_2 = sum_{i<=g-k} a_i`.
pub fn effective_count_gk(l: &LPolynomial, k: usize) -> Result<BigInt> {
    let g = l.genus();
    if k < 1 || k > g {
        return Err(Error::invalid(format!("k = {k} outside 1..={g}")));
    }
    let q = l.q();
    let (g, k) = (g as i64, k as i64);
    let s1 = l.coeff_sum(0, g + k - 1);
    let s2 = l.coeff_sum(0, g - k);
    let qk = qpow(q, (k - 1) as usize);
    let num = (l.class_number() - s1) - &qk * s2;
    let den = BigInt::from(q - 1) * qk;
    let (a, r) = num.div_rem(&den);
    if !r.is_zero() {
        return Err(Error::consistency(format!(
            "A_{} not integral ({num}/{den}); L is not a valid zeta numerator",
            g - k
        )));
    }
    Ok(a)
}

fn binomial(n: &BigInt, k: usize) -> BigInt {
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * (n - BigInt::from(i)) / BigInt::from(i + 1);
    }
    acc
}

/// Coefficients of `prod_d (1 - t^d)^{-B_d}` up to `t^{max_n}`, using only
/// place counts.
pub fn oracle_series(pt: &PlaceTable, max_n: usize) -> Result<Vec<BigInt>> {
    if pt.b_counts.len() < max_n {
        return Err(Error::invalid(format!(
            "place counts known to degree {}, need {max_n}",
            pt.b_counts.len()
        )));
    }
    let mut series = vec![BigInt::zero(); max_n + 1];
    series[0] = BigInt::one();
    for d in 1..=max_n {
        let b = BigInt::from(pt.b_counts[d - 1]);
        if b.is_zero() {
            continue;
        }
        // (1 - t^d)^{-B} = sum_j C(B+j-1, j) t^{dj}
        let factor: Vec<BigInt> = (0..=max_n / d)
            .map(|j| binomial(&(&b + BigInt::from(j) - 1), j))
            .collect();
        let mut next = vec![BigInt::zero(); max_n + 1];
        for (i, si) in series.iter().enumerate() {
            if si.is_zero() {
                continue;
            }
            for (j, fj) in factor.iter().enumerate() {
                let idx = i + d * j;
                if idx > max_n {
                    break;
                }
                next[idx] += si * fj;
            }
        }
        series = next;
    }
    Ok(series)
}

pub fn effective_count_oracle(pt: &PlaceTable, n: usize) -> Result<BigInt> {
    Ok(oracle_series(pt, n)?.swap_remove(n))
}

/// Multiplies the truncated zeta series by `(1-t)(1-qt)`, then completes
/// the L-polynomial by the functional equation. Any supplied `A_n` beyond
/// `n = g` is cross-checked against the completed polynomial.
pub fn lpoly_from_effective_counts(q: u64, g: usize, counts: &[BigInt]) -> Result<LPolynomial> {
    if g == 0 {
        return Err(Error::invalid("genus must be at least 1"));
    }
    if counts.len() < g + 1 {
        return Err(Error::invalid(format!("need A_0..A_{g}, got {} values", counts.len())));
    }
    let at = |i: i64| if i < 0 { BigInt::zero() } else { counts[i as usize].clone() };
    let qb = BigInt::from(q);
    let a: Vec<BigInt> = (0..counts.len() as i64)
        .map(|i| at(i) - (&qb + 1) * at(i - 1) + &qb * at(i - 2))
        .collect();
    let l = LPolynomial::new(q, g, a[..=g].to_vec())?;
    for (i, ai) in a.iter().enumerate().skip(g + 1) {
        if *ai != l.coeff(i as i64) {
            return Err(Error::consistency(format!(
                "effective counts give a_{i} = {ai}, functional equation requires {}",
                l.coeff(i as i64)
            )));
        }
    }
    Ok(l)
}

/// Indices `n` where `A_n >= m A_{n-1} - m(m-1)/2 A_{n-2}` fails.
pub fn check_b1_recurrence(counts: &[BigInt], m: u64) -> Vec<usize> {
    let m = BigInt::from(m);
    let two = BigInt::from(2);
    (2..counts.len())
        .filter(|&n| {
            let rhs = &two * &m * &counts[n - 1] - &m * (&m - 1) * &counts[n - 2];
            &two * &counts[n] < rhs
        })
        .collect()
}

/// Indices `0 <= n <= 2g-2` where
/// `A_n = q^{n+1-g} A_{2g-2-n} + h (q^{n+1-g} - 1)/(q - 1)` fails.
pub fn count_symmetry_violations(l: &LPolynomial, counts: &[BigInt]) -> Vec<usize> {
    let g = l.genus() as i64;
    let q = BigRational::from_integer(BigInt::from(l.q()));
    let h = BigRational::from_integer(l.class_number());
    let one = BigRational::one();
    (0..=(2 * g - 2))
        .filter(|&n| {
            let qe = pow_signed(&q, n + 1 - g);
            let lhs = BigRational::from_integer(counts[n as usize].clone());
            let rhs = &qe * BigRational::from_integer(counts[(2 * g - 2 - n) as usize].clone())
                + &h * (&qe - &one) / (&q - &one);
            lhs != rhs
        })
        .map(|n| n as usize)
        .collect()
}

fn pow_signed(x: &BigRational, e: i64) -> BigRational {
    let p = num_traits::pow(x.clone(), e.unsigned_abs() as usize);
    if e < 0 {
        p.recip()
    } else {
        p
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CentralValue {
    pub lhs: AlgebraicNumber,
    pub rhs: AlgebraicNumber,
    pub holds: bool,
}

/// `2 sum_{n=0}^{g-2} q^{(g-1-n)/2} A_n + A_{g-1} <= h / (sqrt(q) - 1)^2`,
/// decided exactly. It follows from `L(q^{-1/2}) >= 0`.
pub fn central_value_check(l: &LPolynomial) -> CentralValue {
    let g = l.genus();
    let q = l.q();
    let a = DivisorCountTable::series(l, g.saturating_sub(1));
    let mut lhs = AlgebraicNumber::from_int(a.get(g as i64 - 1));
    for n in 0..g.saturating_sub(1) {
        let term = AlgebraicNumber::half_power(q, (g - 1 - n) as i64)
            * AlgebraicNumber::from_int(a.get(n as i64) * 2);
        lhs = lhs + term;
    }
    let s = AlgebraicNumber::sqrt_of(q) - AlgebraicNumber::one();
    let rhs = AlgebraicNumber::from_int(l.class_number())
        .checked_div(&(s.clone() * s))
        .expect("sqrt(q) != 1 for q >= 2");
    let holds = lhs <= rhs;
    CentralValue { lhs, rhs, holds }
}

/// Sanity check shared by the validators: all counts are nonnegative and
/// `A_0 = 1`.
pub fn counts_well_formed(counts: &[BigInt]) -> bool {
    counts.first().is_some_and(|a| a.is_one()) && counts.iter().all(|a| !a.is_negative())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lp(q: u64, a: &[i64]) -> LPolynomial {
        let g = (a.len() - 1) / 2;
        LPolynomial::new(q, g, a.iter().map(|&v| BigInt::from(v)).collect()).unwrap()
    }

    fn big(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    const X7: [i64; 7] = [1, -2, 2, -2, 4, -8, 8];

    #[test]
    fn series_examples() {
        let l = lp(2, &X7);
        let t = DivisorCountTable::series(&l, 4);
        assert_eq!(t.counts, big(&[1, 1, 3, 5, 13]));
        let f1 = lp(2, &[1, -1, 0, 1, -3, 2, 0, -8, 16]);
        assert_eq!(effective_count_series(&f1, 2), BigInt::from(4));
        assert_eq!(effective_count_series(&f1, 3), BigInt::from(9));
    }

    #[test]
    fn closed_form_matches_series() {
        let l = lp(2, &X7);
        assert_eq!(effective_count_gk(&l, 1).unwrap(), BigInt::from(3));
        let desc = lp(3, &[1, 0, 9, 0, 27, 0, 27]);
        assert_eq!(effective_count_gk(&desc, 2).unwrap(), BigInt::from(4));
        for l in [l, desc, lp(2, &[1, -1, 1, -3, 2, -4, 8])] {
            let cf = DivisorCountTable::closed_form(&l).unwrap();
            let s = DivisorCountTable::series(&l, l.genus() - 1);
            assert_eq!(cf.counts, s.counts);
        }
        assert!(effective_count_gk(&lp(2, &X7), 0).is_err());
        assert!(effective_count_gk(&lp(2, &X7), 4).is_err());
    }

    #[test]
    fn corrupted_l_is_not_integral() {
        // a_2 should be 3 a_0; h = 5, S_1 = S_2 = 1, and 3/2 is not integral.
        let bad = LPolynomial::new_unchecked(3, 1, big(&[1, 0, 4]));
        assert!(effective_count_gk(&bad, 1).unwrap_err().is_consistency());
    }

    #[test]
    fn oracle_examples() {
        let pt = PlaceTable::from_place_counts(2, vec![3, 0]);
        assert_eq!(effective_count_oracle(&pt, 2).unwrap(), BigInt::from(6));
        assert_eq!(effective_count_oracle(&pt, 0).unwrap(), BigInt::one());
        let n: Vec<u64> = lp(2, &X7)
            .predicted_counts(4)
            .iter()
            .map(|v| v.try_into().unwrap())
            .collect();
        let b = crate::curve::places_from_points(&n).unwrap();
        assert_eq!(b[..3], [1, 2, 2]);
        let pt = PlaceTable::from_place_counts(2, b);
        assert_eq!(oracle_series(&pt, 4).unwrap(), big(&[1, 1, 3, 5, 13]));
        assert!(oracle_series(&pt, 5).is_err());
    }

    #[test]
    fn l_from_effective_counts() {
        let l = lpoly_from_effective_counts(2, 3, &big(&[1, 1, 3, 5])).unwrap();
        assert_eq!(l, lp(2, &X7));
        let e = lpoly_from_effective_counts(3, 1, &big(&[1, 1])).unwrap();
        assert_eq!(e.coeffs(), &big(&[1, -3, 3])[..]);
        assert!(lpoly_from_effective_counts(2, 0, &big(&[1, 3])).is_err());
        // A_4 off by one contradicts the functional equation.
        assert!(lpoly_from_effective_counts(2, 3, &big(&[1, 1, 3, 5, 14])).is_err());
        assert!(lpoly_from_effective_counts(2, 3, &big(&[1, 1, 3, 5, 13])).is_ok());
    }

    #[test]
    fn b1_recurrence() {
        assert!(check_b1_recurrence(&big(&[1, 1, 3, 5, 13]), 1).is_empty());
        assert_eq!(check_b1_recurrence(&big(&[1, 3, 2]), 1), vec![2]);
        // three rational places: A_2 >= 3*3 - 3*1 = 6
        assert!(check_b1_recurrence(&big(&[1, 3, 6]), 3).is_empty());
        assert_eq!(check_b1_recurrence(&big(&[1, 3, 5]), 3), vec![2]);
    }

    #[test]
    fn functional_identities() {
        for l in [lp(2, &X7), lp(3, &[1, 0, 9, 0, 27, 0, 27]), lp(2, &[1, -1, 0, 1, -3, 2, 0, -8, 16])] {
            let t = DivisorCountTable::series(&l, 2 * l.genus() - 2);
            assert!(count_symmetry_violations(&l, &t.counts).is_empty());
            assert!(central_value_check(&l).holds);
        }
        let l = lp(2, &X7);
        let mut t = DivisorCountTable::series(&l, 4).counts;
        t[1] += 1;
        assert!(!count_symmetry_violations(&l, &t).is_empty());
    }
}
