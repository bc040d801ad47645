//! L-polynomials: construction from point counts, validation, class
//! number and p-rank.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::divisors;
use crate::error::{Error, Result};
use crate::field::prime_power;

/// Numerator `L(t) = a_0 + a_1 t + ... + a_{2g} t^{2g}` of the zeta function.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LPolynomial {
    q: u64,
    g: usize,
    #[serde(with = "crate::numstr::vec")]
    a: Vec<BigInt>,
}

/// JSON input form: `a` holds either `a_0..a_g` or `a_0..a_{2g}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LpolyInput {
    pub q: u64,
    pub g: usize,
    #[serde(with = "crate::numstr::vec")]
    pub a: Vec<BigInt>,
}

pub(crate) fn qpow(q: u64, e: usize) -> BigInt {
    BigInt::from(q).pow(e as u32)
}

impl LPolynomial {
    /// Builds and checks an L-polynomial. `a` may stop at `a_g`, in which
    /// case the upper half is filled in by the functional equation.
    pub fn new(q: u64, g: usize, a: Vec<BigInt>) -> Result<Self> {
        prime_power(q)?;
        let l = if a.len() == g + 1 {
            let mut full = a;
            for i in 1..=g {
                let v = qpow(q, i) * &full[g - i];
                full.push(v);
            }
            LPolynomial { q, g, a: full }
        } else if a.len() == 2 * g + 1 {
            LPolynomial { q, g, a }
        } else {
            return Err(Error::invalid(format!(
                "expected {} or {} coefficients for genus {g}, got {}",
                g + 1,
                2 * g + 1,
                a.len()
            )));
        };
        let failed: Vec<_> = l.structural_checks().into_iter().filter(|c| !c.passed).collect();
        if let Some(c) = failed.first() {
            return Err(Error::invalid(format!("{}: {}", c.name, c.detail)));
        }
        Ok(l)
    }

    /// Skips every check. Used to build deliberately corrupted inputs for
    /// the validators.
    pub fn new_unchecked(q: u64, g: usize, a: Vec<BigInt>) -> Self {
        LPolynomial { q, g, a }
    }

    pub fn from_input(input: &LpolyInput) -> Result<Self> {
        Self::new(input.q, input.g, input.a.clone())
    }

    pub fn parse(text: &str) -> Result<Self> {
        let input: LpolyInput =
            serde_json::from_str(text).map_err(|e| Error::invalid(format!("L-polynomial JSON: {e}")))?;
        Self::from_input(&input)
    }

    pub fn to_input(&self) -> LpolyInput {
        LpolyInput { q: self.q, g: self.g, a: self.a.clone() }
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn genus(&self) -> usize {
        self.g
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.a
    }

    /// `a_i`, zero outside `0..=2g`.
    pub fn coeff(&self, i: i64) -> BigInt {
        if i < 0 {
            return BigInt::zero();
        }
        self.a.get(i as usize).cloned().unwrap_or_default()
    }

    /// `sum_{i=lo}^{hi} a_i` with empty ranges giving zero.
    pub fn coeff_sum(&self, lo: i64, hi: i64) -> BigInt {
        (lo.max(0)..=hi).map(|i| self.coeff(i)).sum()
    }

    pub fn class_number(&self) -> BigInt {
        self.a.iter().sum()
    }

    /// Degree of `L mod p`, where `p` is the characteristic.
    pub fn p_rank(&self, p: u64) -> Result<usize> {
        if p < 2 || self.q % p != 0 || prime_power(self.q)?.0 as u64 != p {
            return Err(Error::invalid(format!("{p} is not the characteristic of F_{}", self.q)));
        }
        let pb = BigInt::from(p);
        // a_0 = 1 keeps the reduction nonzero on valid input.
        self.a
            .iter()
            .rposition(|c| !c.mod_floor(&pb).is_zero())
            .ok_or_else(|| Error::consistency("L reduces to zero mod p"))
    }

    pub fn characteristic(&self) -> u64 {
        prime_power(self.q).map(|(p, _)| p as u64).expect("q validated on construction")
    }

    /// Ordinary means p-rank equal to the genus, i.e. `p` does not divide `a_g`.
    pub fn is_ordinary(&self) -> bool {
        let p = BigInt::from(self.characteristic());
        !self.coeff(self.g as i64).mod_floor(&p).is_zero()
    }

    /// `N_m` for `m = 1..=count`, recovered from the power sums `S_m` of the
    /// reciprocal roots via Newton's identities.
    pub fn predicted_counts(&self, count: usize) -> Vec<BigInt> {
        let mut s: Vec<BigInt> = vec![BigInt::zero()];
        let mut out = Vec::with_capacity(count);
        for m in 1..=count {
            // S_m = -m a_m - sum_{j=1}^{m-1} S_j a_{m-j}
            let mut v = -BigInt::from(m) * self.coeff(m as i64);
            for j in 1..m {
                v -= &s[j] * self.coeff((m - j) as i64);
            }
            out.push(qpow(self.q, m) + 1 - &v);
            s.push(v);
        }
        out
    }

    fn structural_checks(&self) -> Vec<Check> {
        let mut out = Vec::new();
        let len_ok = self.a.len() == 2 * self.g + 1;
        out.push(Check::new(
            "length",
            len_ok,
            format!("{} coefficients for genus {}", self.a.len(), self.g),
        ));
        if !len_ok {
            return out;
        }
        out.push(Check::new("a_0", self.a[0].is_one(), format!("a_0 = {}", self.a[0])));
        let bad: Vec<usize> = (0..=self.g)
            .filter(|&i| self.a[2 * self.g - i] != qpow(self.q, self.g - i) * &self.a[i])
            .collect();
        out.push(Check::new(
            "functional equation",
            bad.is_empty(),
            if bad.is_empty() {
                "a_{2g-i} = q^{g-i} a_i for all i".to_string()
            } else {
                format!("fails at i = {bad:?}")
            },
        ));
        let h = self.class_number();
        out.push(Check::new("class number", h.is_positive(), format!("h = {h}")));
        out
    }
}

/// One named validation result.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: &str, passed: bool, detail: impl Into<String>) -> Self {
        Check { name: name.to_string(), passed, detail: detail.into() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub checks: Vec<Check>,
}

impl Diagnostics {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> Vec<&str> {
        self.checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect()
    }
}

/// Runs every structural check plus the effective-divisor inequality, and
/// reports each by name instead of stopping at the first failure.
pub fn validate_lpoly(l: &LPolynomial) -> Diagnostics {
    let mut checks = l.structural_checks();
    if checks.iter().all(|c| c.passed) && l.g >= 1 {
        let z = divisors::central_value_check(l);
        checks.push(Check::new(
            "central_value",
            z.holds,
            format!("{} <= {}", z.lhs.to_decimal(6), z.rhs.to_decimal(6)),
        ));
    }
    Diagnostics { checks }
}

/// Newton recurrence `m a_m = -sum_{j=1}^m S_j a_{m-j}` with
/// `S_m = q^m + 1 - N_m`, then the functional equation.
pub fn lpoly_from_counts(q: u64, g: usize, n_counts: &[u64]) -> Result<LPolynomial> {
    if n_counts.len() < g {
        return Err(Error::invalid(format!("need {g} point counts, got {}", n_counts.len())));
    }
    let s: Vec<BigInt> = (1..=g)
        .map(|m| qpow(q, m) + 1 - BigInt::from(n_counts[m - 1]))
        .collect();
    let mut a = vec![BigInt::one()];
    for m in 1..=g {
        let acc: BigInt = (1..=m).map(|j| &s[j - 1] * &a[m - j]).sum();
        let (quot, rem) = (-acc).div_rem(&BigInt::from(m));
        if !rem.is_zero() {
            return Err(Error::consistency(format!(
                "Newton recurrence not integral at a_{m}; point counts are inconsistent"
            )));
        }
        a.push(quot);
    }
    LPolynomial::new(q, g, a)
}

/// `ceil(q^{g-1} (q-1)^2 / ((q+1)(g+1)))`
pub fn class_number_floor(q: u64, g: usize) -> Result<BigInt> {
    if g == 0 {
        return Err(Error::invalid("lower bound needs g >= 1"));
    }
    let num = qpow(q, g - 1) * BigInt::from(q - 1).pow(2);
    let den = BigInt::from(q + 1) * BigInt::from(g + 1);
    Ok(num.div_ceil(&den))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZetaSummary {
    pub lpoly: LPolynomial,
    #[serde(with = "crate::numstr")]
    pub h: BigInt,
    pub p_rank: usize,
    pub ordinary: bool,
    #[serde(with = "crate::numstr::opt")]
    pub h_floor: Option<BigInt>,
}

impl ZetaSummary {
    pub fn new(l: &LPolynomial) -> Result<Self> {
        let p_rank = l.p_rank(l.characteristic())?;
        let ordinary = l.is_ordinary();
        if ordinary != (p_rank == l.g) {
            return Err(Error::consistency(format!(
                "p-rank {p_rank} disagrees with divisibility of a_g"
            )));
        }
        Ok(ZetaSummary {
            lpoly: l.clone(),
            h: l.class_number(),
            p_rank,
            ordinary,
            h_floor: (l.g >= 1).then(|| class_number_floor(l.q, l.g)).transpose()?,
        })
    }
}
