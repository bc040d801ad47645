//! Exact counts of divisor classes by degree and dimension on hyperelliptic
//! function fields.
//!
//! For `0 <= n <= g` and `i >= 1`,
//! `h_{n,i} = A_{n-2i+2} - (q+1) A_{n-2i} + q A_{n-2i-2}`; the dimension-zero
//! count is what remains of `h`. Above `g` the same expression breaks down
//! (it makes `h_{2g-2,0}` negative already for genus 3), so rows `g < n <= 2g-2`
//! are obtained from row `2g-2-n` by Riemann-Roch: `D -> K - D` shifts the
//! dimension by `n + 1 - g`. The telescoped closed form at `n = g-k` is
//! evaluated separately from the L coefficients so the two can be compared.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::divisors::DivisorCountTable;
use crate::error::{Error, Result};
use crate::zeta::{qpow, LPolynomial};

/// `h_{n,i}` for one degree `n`, over every `i` with a nonzero count.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DimensionClassTable {
    pub q: u64,
    pub g: usize,
    pub n: usize,
    #[serde(with = "bigmap")]
    pub h_ni: BTreeMap<usize, BigInt>,
}

mod bigmap {
    use std::collections::BTreeMap;

    use num_bigint::BigInt;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(m: &BTreeMap<usize, BigInt>, s: S) -> Result<S::Ok, S::Error> {
        m.iter()
            .map(|(k, v)| (k.to_string(), v.to_string()))
            .collect::<BTreeMap<_, _>>()
            .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BTreeMap<usize, BigInt>, D::Error> {
        BTreeMap::<String, String>::deserialize(d)?
            .into_iter()
            .map(|(k, v)| {
                Ok((
                    k.parse().map_err(serde::de::Error::custom)?,
                    v.parse().map_err(serde::de::Error::custom)?,
                ))
            })
            .collect()
    }
}

fn check_degree(l: &LPolynomial, n: usize) -> Result<()> {
    let g = l.genus();
    if g == 0 || n > 2 * g - 2 {
        return Err(Error::invalid(format!(
            "degree {n} outside 0..=2g-2 for genus {g}"
        )));
    }
    Ok(())
}

fn hni_from_table(a: &DivisorCountTable, q: u64, n: usize, i: usize) -> BigInt {
    let n = n as i64;
    let i = i as i64;
    let qb = BigInt::from(q);
    a.get(n - 2 * i + 2) - (&qb + 1) * a.get(n - 2 * i) + qb * a.get(n - 2 * i - 2)
}

pub fn hni_recurrence(l: &LPolynomial, n: usize, i: usize) -> Result<BigInt> {
    check_degree(l, n)?;
    if n > l.genus() {
        return Err(Error::NotApplicable(format!(
            "the recurrence holds for n <= g = {}; row {n} comes from duality",
            l.genus()
        )));
    }
    if i == 0 {
        return Err(Error::invalid("i = 0 is the dimension-zero count; use h_n0_via_sum"));
    }
    let a = DivisorCountTable::series(l, n);
    let v = hni_from_table(&a, l.q(), n, i);
    if v.is_negative() {
        return Err(Error::consistency(format!(
            "h_({n},{i}) = {v} is negative; the field is not hyperelliptic or L is wrong"
        )));
    }
    Ok(v)
}

/// The full row `h_{n,0}, h_{n,1}, ...` with both sum identities checked.
pub fn dimension_class_table(l: &LPolynomial, n: usize) -> Result<DimensionClassTable> {
    check_degree(l, n)?;
    let (q, g) = (l.q(), l.genus());
    let a = DivisorCountTable::series(l, n);
    if n > g {
        let dual = dimension_class_table(l, 2 * g - 2 - n)?;
        let shift = n + 1 - g;
        let h_ni = dual.h_ni.into_iter().map(|(i, v)| (i + shift, v)).collect();
        let table = DimensionClassTable { q, g, n, h_ni };
        table.verify(l, &a)?;
        return Ok(table);
    }
    let mut h_ni = BTreeMap::new();
    let mut positive_dim = BigInt::zero();
    // A_{n-2i+2} vanishes once 2i > n + 2.
    for i in 1..=(n / 2 + 1) {
        let v = hni_from_table(&a, q, n, i);
        if v.is_negative() {
            return Err(Error::consistency(format!("h_({n},{i}) = {v} is negative")));
        }
        positive_dim += &v;
        if !v.is_zero() {
            h_ni.insert(i, v);
        }
    }
    let h0 = l.class_number() - positive_dim;
    if h0.is_negative() {
        return Err(Error::consistency(format!("h_({n},0) = {h0} is negative")));
    }
    h_ni.insert(0, h0);
    let table = DimensionClassTable { q, g, n, h_ni };
    table.verify(l, &a)?;
    Ok(table)
}

impl DimensionClassTable {
    pub fn get(&self, i: usize) -> BigInt {
        self.h_ni.get(&i).cloned().unwrap_or_default()
    }

    fn verify(&self, l: &LPolynomial, a: &DivisorCountTable) -> Result<()> {
        let total: BigInt = self.h_ni.values().sum();
        if total != l.class_number() {
            return Err(Error::consistency(format!(
                "sum of h_({},i) is {total}, class number is {}",
                self.n,
                l.class_number()
            )));
        }
        let weighted: BigInt = self
            .h_ni
            .iter()
            .map(|(&i, v)| (qpow(self.q, i) - 1) / BigInt::from(self.q - 1) * v)
            .sum();
        if weighted != a.get(self.n as i64) {
            return Err(Error::consistency(format!(
                "weighted sum at degree {} is {weighted}, A_n is {}",
                self.n,
                a.get(self.n as i64)
            )));
        }
        Ok(())
    }
}

/// `h_{n,0} = h - sum_{i>=1} h_{n,i}`.
pub fn h_n0_via_sum(l: &LPolynomial, n: usize) -> Result<BigInt> {
    Ok(dimension_class_table(l, n)?.get(0))
}

/// Closed form value of `h_{g-k,0}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClosedFormValue {
    #[serde(with = "crate::numstr")]
    pub value: BigInt,
    /// Set for genus 2, where the formula is used outside the range it was
    /// originally stated for.
    pub outside_stated_hypothesis: bool,
}

/// `sum_{i=g-k+1}^{g} a_i + sum_{i=g-k}^{g-1} q^{g-i} a_i
///  + (q^k - 1) sum_{i=0}^{g-k-1} q^{g-i-k} a_i`
pub fn h_gk0_closed(l: &LPolynomial, k: usize) -> Result<ClosedFormValue> {
    let g = l.genus();
    if g < 2 {
        return Err(Error::NotApplicable(format!("closed form needs genus >= 2, got {g}")));
    }
    if k < 1 || k > g {
        return Err(Error::invalid(format!("k = {k} outside 1..={g}")));
    }
    let q = l.q();
    let a = |i: usize| l.coeff(i as i64);
    let first: BigInt = (g - k + 1..=g).map(a).sum();
    let second: BigInt = (g - k..g).map(|i| qpow(q, g - i) * a(i)).sum();
    let third: BigInt = (0..g - k).map(|i| qpow(q, g - i - k) * a(i)).sum();
    let value = first + second + (qpow(q, k) - 1) * third;
    Ok(ClosedFormValue { value, outside_stated_hypothesis: g == 2 })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DistinguisherReport {
    pub k: usize,
    pub n: usize,
    pub hyperelliptic: bool,
    #[serde(with = "crate::numstr::opt")]
    pub exact: Option<BigInt>,
    pub note: String,
}

/// Reports `h_{g-k,0}` only when the caller asserts hyperellipticity. Two
/// fields can share an L-polynomial and still differ here, so nothing is
/// inferred from `L` alone.
pub fn same_lpoly_distinguisher(l: &LPolynomial, k: usize, hyperelliptic: bool) -> Result<DistinguisherReport> {
    let g = l.genus();
    if k < 1 || k > g {
        return Err(Error::invalid(format!("k = {k} outside 1..={g}")));
    }
    let n = g - k;
    if !hyperelliptic {
        return Ok(DistinguisherReport {
            k,
            n,
            hyperelliptic,
            exact: None,
            note: "not declared hyperelliptic: the exact count is not determined by L, use the criteria".into(),
        });
    }
    let exact = h_n0_via_sum(l, n)?;
    Ok(DistinguisherReport {
        k,
        n,
        hyperelliptic,
        exact: Some(exact),
        note: "valid only for hyperelliptic fields; another field with the same L may differ".into(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lp(q: u64, a: &[i64]) -> LPolynomial {
        let g = (a.len() - 1) / 2;
        LPolynomial::new(q, g, a.iter().map(|&v| BigInt::from(v)).collect()).unwrap()
    }

    const X7: [i64; 7] = [1, -2, 2, -2, 4, -8, 8];

    #[test]
    fn recurrence_examples() {
        let l = lp(2, &X7);
        assert_eq!(hni_recurrence(&l, 3, 1).unwrap(), BigInt::from(2));
        assert_eq!(hni_recurrence(&l, 3, 2).unwrap(), BigInt::from(1));
        assert_eq!(hni_recurrence(&l, 0, 2).unwrap(), BigInt::zero());
        assert_eq!(hni_recurrence(&l, 0, 1).unwrap(), BigInt::from(1));
        assert!(hni_recurrence(&l, 5, 1).is_err());
        assert!(matches!(hni_recurrence(&l, 4, 1), Err(Error::NotApplicable(_))));
        assert!(hni_recurrence(&l, 2, 0).is_err());
    }

    #[test]
    fn dimension_zero_counts() {
        let l = lp(2, &X7);
        assert_eq!(h_n0_via_sum(&l, 3).unwrap(), BigInt::zero());
        assert_eq!(h_n0_via_sum(&l, 2).unwrap(), BigInt::from(2));
        assert_eq!(h_n0_via_sum(&l, 0).unwrap(), BigInt::from(2));
        for k in 1..=3 {
            let c = h_gk0_closed(&l, k).unwrap();
            assert_eq!(c.value, h_n0_via_sum(&l, 3 - k).unwrap());
            assert!(!c.outside_stated_hypothesis);
        }
    }

    #[test]
    fn rows_above_genus_by_duality() {
        let l = lp(2, &X7);
        // Degree 4 = 2g-2: the canonical class has dimension 3, the other
        // two classes dimension 2.
        let t = dimension_class_table(&l, 4).unwrap();
        assert_eq!(t.get(0), BigInt::zero());
        assert_eq!(t.get(2), BigInt::from(2));
        assert_eq!(t.get(3), BigInt::from(1));
        let f1 = lp(2, &[1, -1, 0, 1, -3, 2, 0, -8, 16]);
        for n in 0..=6 {
            dimension_class_table(&f1, n).unwrap();
        }
    }

    #[test]
    fn genus_two_cases() {
        // y^2 + y = x^5 + x^3 + 1 over F_2, h = 1
        let l = lp(2, &[1, -2, 2, -4, 4]);
        assert_eq!(l.class_number(), BigInt::from(1));
        assert_eq!(h_n0_via_sum(&l, 1).unwrap(), BigInt::zero());
        assert_eq!(h_n0_via_sum(&l, 0).unwrap(), BigInt::zero());
        let c = h_gk0_closed(&l, 1).unwrap();
        assert!(c.outside_stated_hypothesis);
        assert_eq!(c.value, BigInt::zero());
    }

    #[test]
    fn closed_form_rejects_genus_one() {
        assert!(matches!(h_gk0_closed(&lp(3, &[1, -3, 3]), 1), Err(Error::NotApplicable(_))));
    }

    #[test]
    fn distinguisher_modes() {
        let l = lp(2, &[1, -1, 0, 1, -3, 2, 0, -8, 16]);
        let r = same_lpoly_distinguisher(&l, 1, true).unwrap();
        assert_eq!(r.exact, Some(h_n0_via_sum(&l, 3).unwrap()));
        assert_eq!(same_lpoly_distinguisher(&l, 1, false).unwrap().exact, None);
    }

    #[test]
    fn table_serializes_with_string_values() {
        let t = dimension_class_table(&lp(2, &X7), 3).unwrap();
        let json = serde_json::to_string(&t).unwrap();
        assert!(json.contains(r#""h_ni":{"0":"0","1":"2","2":"1"}"#), "{json}");
        assert_eq!(serde_json::from_str::<DimensionClassTable>(&json).unwrap(), t);
    }
}
