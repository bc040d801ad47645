//! Dense univariate polynomials over a [`FieldCtx`].
//!
//! A polynomial is a `Vec<FieldElement>`, constant term first, with no
//! trailing zeros; the zero polynomial is the empty vector.

use crate::error::{Error, Result};
use crate::field::{FieldCtx, FieldElement};

pub type Poly = Vec<FieldElement>;

/// Polynomial operations bound to a coefficient field.
#[derive(Clone, Copy, Debug)]
pub struct PolyRing<'a> {
    k: &'a FieldCtx,
}

impl<'a> PolyRing<'a> {
    pub fn new(k: &'a FieldCtx) -> Self {
        PolyRing { k }
    }

    pub fn field(&self) -> &'a FieldCtx {
        self.k
    }

    pub fn trim(&self, mut a: Poly) -> Poly {
        while a.last().is_some_and(|c| c.is_zero()) {
            a.pop();
        }
        a
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self, a: &[FieldElement]) -> Option<usize> {
        a.len().checked_sub(1)
    }

    pub fn constant(&self, c: FieldElement) -> Poly {
        self.trim(vec![c])
    }

    /// `x - c`
    pub fn linear(&self, c: &FieldElement) -> Poly {
        vec![self.k.neg(c), self.k.one()]
    }

    pub fn add(&self, a: &[FieldElement], b: &[FieldElement]) -> Poly {
        let n = a.len().max(b.len());
        let zero = self.k.zero();
        let out = (0..n)
            .map(|i| self.k.add(a.get(i).unwrap_or(&zero), b.get(i).unwrap_or(&zero)))
            .collect();
        self.trim(out)
    }

    pub fn sub(&self, a: &[FieldElement], b: &[FieldElement]) -> Poly {
        let n = a.len().max(b.len());
        let zero = self.k.zero();
        let out = (0..n)
            .map(|i| self.k.sub(a.get(i).unwrap_or(&zero), b.get(i).unwrap_or(&zero)))
            .collect();
        self.trim(out)
    }

    pub fn scale(&self, a: &[FieldElement], c: &FieldElement) -> Poly {
        self.trim(a.iter().map(|x| self.k.mul(x, c)).collect())
    }

    pub fn mul(&self, a: &[FieldElement], b: &[FieldElement]) -> Poly {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![self.k.zero(); a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                out[i + j] = self.k.add(&out[i + j], &self.k.mul(x, y));
            }
        }
        self.trim(out)
    }

    /// Quotient and remainder; errors on division by the zero polynomial.
    pub fn divrem(&self, a: &[FieldElement], b: &[FieldElement]) -> Result<(Poly, Poly)> {
        let db = self.degree(b).ok_or(Error::DivisionByZero("polynomial division"))?;
        let lead_inv = self.k.inv(&b[db])?;
        let mut r: Poly = a.to_vec();
        if r.len() <= db {
            return Ok((Vec::new(), self.trim(r)));
        }
        let mut q = vec![self.k.zero(); r.len() - db];
        while r.len() > db {
            let top = r.len() - 1;
            let c = self.k.mul(&r[top], &lead_inv);
            let shift = top - db;
            for (i, bc) in b.iter().enumerate() {
                r[shift + i] = self.k.sub(&r[shift + i], &self.k.mul(&c, bc));
            }
            q[shift] = c;
            r.pop();
        }
        Ok((self.trim(q), self.trim(r)))
    }

    pub fn rem(&self, a: &[FieldElement], b: &[FieldElement]) -> Result<Poly> {
        Ok(self.divrem(a, b)?.1)
    }

    pub fn monic(&self, a: &[FieldElement]) -> Poly {
        match a.last() {
            None => Vec::new(),
            Some(lead) => {
                let inv = self.k.inv(lead).expect("leading coefficient is nonzero");
                self.scale(a, &inv)
            }
        }
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, a: &[FieldElement], b: &[FieldElement]) -> Poly {
        let (mut x, mut y) = (a.to_vec(), b.to_vec());
        while !y.is_empty() {
            let r = self.rem(&x, &y).expect("divisor is nonzero");
            x = y;
            y = r;
        }
        self.monic(&x)
    }

    pub fn derivative(&self, a: &[FieldElement]) -> Poly {
        let out = a
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| self.k.mul(c, &self.k.from_int(i as i64)))
            .collect();
        self.trim(out)
    }

    pub fn eval(&self, a: &[FieldElement], x: &FieldElement) -> FieldElement {
        self.k.eval_poly(a, x)
    }

    /// `a(x + c)`
    pub fn shift(&self, a: &[FieldElement], c: &FieldElement) -> Poly {
        let lin = vec![c.clone(), self.k.one()];
        let mut out: Poly = Vec::new();
        for coef in a.iter().rev() {
            out = self.add(&self.mul(&out, &lin), std::slice::from_ref(coef));
        }
        out
    }

    /// Coefficients reversed at a fixed length: `x^deg * a(1/x)`.
    pub fn reversed(&self, a: &[FieldElement]) -> Poly {
        let mut r = a.to_vec();
        r.reverse();
        r
    }

    /// `base^e mod m`
    pub fn powmod(&self, base: &[FieldElement], mut e: u128, m: &[FieldElement]) -> Result<Poly> {
        let mut acc = self.rem(&[self.k.one()], m)?;
        let mut b = self.rem(base, m)?;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.rem(&self.mul(&acc, &b), m)?;
            }
            e >>= 1;
            if e > 0 {
                b = self.rem(&self.mul(&b, &b), m)?;
            }
        }
        Ok(acc)
    }

    pub fn is_squarefree(&self, a: &[FieldElement]) -> bool {
        let d = self.derivative(a);
        if d.is_empty() {
            return self.degree(a).unwrap_or(0) == 0;
        }
        self.gcd(a, &d).len() == 1
    }

    /// Rabin's irreducibility test for a polynomial of degree >= 1.
    pub fn is_irreducible(&self, a: &[FieldElement]) -> bool {
        let Some(d) = self.degree(a) else { return false };
        if d == 0 {
            return false;
        }
        if d == 1 {
            return true;
        }
        let q = self.k.size() as u128;
        let x = vec![self.k.zero(), self.k.one()];
        // x^(q^j) mod a for j = 0..=d, by repeated q-th powers.
        let mut frob = vec![self.rem(&x, a).expect("nonzero modulus")];
        for _ in 0..d {
            let last = frob.last().unwrap();
            frob.push(self.powmod(last, q, a).expect("nonzero modulus"));
        }
        if self.sub(&frob[d], &x).iter().any(|c| !c.is_zero()) {
            return false;
        }
        for r in prime_factors(d) {
            let t = self.sub(&frob[d / r], &x);
            if self.gcd(a, &t).len() != 1 {
                return false;
            }
        }
        true
    }

    /// Every monic polynomial of degree exactly `d`, in index order.
    pub fn monic_polys(&self, d: usize) -> impl Iterator<Item = Poly> + '_ {
        let q = self.k.size();
        let count = q.checked_pow(d as u32).unwrap_or(u64::MAX);
        (0..count).map(move |mut idx| {
            let mut out = Vec::with_capacity(d + 1);
            for _ in 0..d {
                out.push(self.k.element(idx % q));
                idx /= q;
            }
            out.push(self.k.one());
            out
        })
    }

    pub fn monic_irreducibles(&self, d: usize) -> impl Iterator<Item = Poly> + '_ {
        self.monic_polys(d).filter(move |p| self.is_irreducible(p))
    }

    /// Factorization into monic irreducibles with multiplicity, by trial
    /// division. Suitable for the low degrees that appear in curve models.
    pub fn factor(&self, a: &[FieldElement]) -> Vec<(Poly, usize)> {
        let mut rest = self.monic(a);
        let mut out = Vec::new();
        let mut d = 1;
        while self.degree(&rest).unwrap_or(0) >= 2 * d {
            for p in self.monic_irreducibles(d).collect::<Vec<_>>() {
                let mut mult = 0;
                loop {
                    let (q, r) = self.divrem(&rest, &p).expect("nonzero divisor");
                    if !r.is_empty() {
                        break;
                    }
                    rest = q;
                    mult += 1;
                }
                if mult > 0 {
                    out.push((p, mult));
                }
            }
            d += 1;
        }
        if self.degree(&rest).unwrap_or(0) >= 1 {
            match out.iter_mut().find(|(p, _)| *p == rest) {
                Some(entry) => entry.1 += 1,
                None => out.push((rest, 1)),
            }
        }
        out
    }
}

fn prime_factors(mut n: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::make_field;

    fn poly(k: &FieldCtx, cs: &[i64]) -> Poly {
        PolyRing::new(k).trim(cs.iter().map(|&c| k.from_int(c)).collect())
    }

    #[test]
    fn irreducible_counts_match_necklace_formula() {
        // Number of monic irreducibles of degree d over F_q.
        let k = make_field(2, 1).unwrap();
        let r = PolyRing::new(&k);
        let counts: Vec<usize> = (1..=6).map(|d| r.monic_irreducibles(d).count()).collect();
        assert_eq!(counts, vec![2, 1, 2, 3, 6, 9]);
        let k3 = make_field(3, 1).unwrap();
        let r3 = PolyRing::new(&k3);
        let counts3: Vec<usize> = (1..=3).map(|d| r3.monic_irreducibles(d).count()).collect();
        assert_eq!(counts3, vec![3, 3, 8]);
        let k4 = make_field(2, 2).unwrap();
        let r4 = PolyRing::new(&k4);
        assert_eq!(r4.monic_irreducibles(2).count(), 6);
    }

    #[test]
    fn divrem_and_gcd() {
        let k = make_field(3, 1).unwrap();
        let r = PolyRing::new(&k);
        let a = poly(&k, &[2, 0, 1]); // x^2 - 1
        let b = poly(&k, &[1, 1]); // x + 1
        let (q, rem) = r.divrem(&a, &b).unwrap();
        assert!(rem.is_empty());
        assert_eq!(q, poly(&k, &[2, 1]));
        assert_eq!(r.gcd(&a, &poly(&k, &[2, 1])), poly(&k, &[2, 1]));
        assert!(r.divrem(&a, &[]).is_err());
    }

    #[test]
    fn factorization_reassembles() {
        let k = make_field(2, 1).unwrap();
        let r = PolyRing::new(&k);
        // x^4 + x^3 + x^2 = x^2 (x^2 + x + 1)
        let h = poly(&k, &[0, 0, 1, 1, 1]);
        let f = r.factor(&h);
        assert_eq!(f, vec![(poly(&k, &[0, 1]), 2), (poly(&k, &[1, 1, 1]), 1)]);
        let prod = f.iter().fold(poly(&k, &[1]), |acc, (p, m)| {
            (0..*m).fold(acc, |acc, _| r.mul(&acc, p))
        });
        assert_eq!(prod, h);
    }

    #[test]
    fn shift_and_squarefree() {
        let k = make_field(3, 1).unwrap();
        let r = PolyRing::new(&k);
        let f = poly(&k, &[2, 2, 0, 1]); // x^3 + 2x + 2
        assert!(r.is_squarefree(&f));
        let g = r.mul(&f, &f);
        assert!(!r.is_squarefree(&g));
        let s = r.shift(&f, &k.from_int(1));
        for x in k.elements() {
            assert_eq!(r.eval(&s, &x), r.eval(&f, &k.add(&x, &k.one())));
        }
    }
}
