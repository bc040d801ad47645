//! Prime and extension field arithmetic for the small fields used in
//! exhaustive point counting.
//!
//! Elements of `F_{p^n}` are dense coefficient vectors over `F_p`, reduced
//! modulo a fixed monic irreducible polynomial. The modulus chosen by
//! [`make_field`] is the lexicographically smallest monic irreducible of
//! degree `n` when coefficient lists are compared constant term first, so
//! every run on every platform builds the same field.

use std::fmt;

use crate::error::{Error, Result};

/// Default cap on the number of field elements a context may have.
pub const DEFAULT_ENUMERATION_LIMIT: u64 = 1 << 24;

/// An element of `F_{p^n}`: `n` residues mod `p`, constant term first.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldElement {
    coeffs: Vec<u32>,
}

impl FieldElement {
    pub fn coeffs(&self) -> &[u32] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    /// The residue of an element that lies in the prime field.
    pub fn as_prime(&self) -> Option<u32> {
        if self.coeffs[1..].iter().all(|&c| c == 0) {
            Some(self.coeffs[0])
        } else {
            None
        }
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.len() == 1 {
            return write!(f, "{}", self.coeffs[0]);
        }
        write!(f, "[")?;
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "]")
    }
}

/// A finite field `F_{p^n}` with a fixed irreducible modulus.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldCtx {
    p: u32,
    n: usize,
    modulus: Vec<u32>,
    size: u64,
}

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Splits `q = p^n` into `(p, n)`; errors if `q` is not a prime power.
pub fn prime_power(q: u64) -> Result<(u32, usize)> {
    if q < 2 {
        return Err(Error::invalid(format!("{q} is not a prime power")));
    }
    let mut p = 2u64;
    while q % p != 0 {
        p += 1;
    }
    let mut rest = q;
    let mut n = 0;
    while rest % p == 0 {
        rest /= p;
        n += 1;
    }
    if rest != 1 || p > u32::MAX as u64 {
        return Err(Error::invalid(format!("{q} is not a prime power")));
    }
    Ok((p as u32, n))
}

fn checked_size(p: u32, n: usize, limit: u64) -> Result<u64> {
    let mut size: u128 = 1;
    for _ in 0..n {
        size *= p as u128;
        if size > limit as u128 {
            return Err(Error::LimitExceeded { size, limit });
        }
    }
    Ok(size as u64)
}

/// Builds the canonical `F_{p^n}` under the default enumeration limit.
pub fn make_field(p: u32, n: usize) -> Result<FieldCtx> {
    make_field_with_limit(p, n, DEFAULT_ENUMERATION_LIMIT)
}

pub fn make_field_with_limit(p: u32, n: usize, limit: u64) -> Result<FieldCtx> {
    if !is_prime(p as u64) {
        return Err(Error::invalid(format!("{p} is not prime")));
    }
    if n < 1 {
        return Err(Error::invalid("extension degree must be at least 1"));
    }
    let size = checked_size(p, n, limit)?;
    let modulus = smallest_irreducible(p, n);
    Ok(FieldCtx { p, n, modulus, size })
}

/// Builds `F_p[x]/(modulus)` for a caller-supplied monic irreducible.
pub fn field_with_modulus(p: u32, modulus: &[u32]) -> Result<FieldCtx> {
    if !is_prime(p as u64) {
        return Err(Error::invalid(format!("{p} is not prime")));
    }
    if modulus.len() < 2 || *modulus.last().unwrap() != 1 {
        return Err(Error::invalid("modulus must be monic of degree >= 1"));
    }
    if modulus.iter().any(|&c| c >= p) {
        return Err(Error::invalid("modulus coefficients must lie in [0, p)"));
    }
    if !fp_is_irreducible(p, modulus) {
        return Err(Error::invalid("modulus is reducible"));
    }
    let n = modulus.len() - 1;
    let size = checked_size(p, n, DEFAULT_ENUMERATION_LIMIT)?;
    Ok(FieldCtx {
        p,
        n,
        modulus: modulus.to_vec(),
        size,
    })
}

// --- F_p[x] helpers on raw coefficient vectors (constant term first) ---

fn fp_trim(v: &mut Vec<u32>) {
    while v.len() > 1 && *v.last().unwrap() == 0 {
        v.pop();
    }
}

/// Remainder of `a` modulo the monic `m`.
fn fp_rem(p: u32, a: &[u32], m: &[u32]) -> Vec<u32> {
    let p64 = p as u64;
    let mut r = a.to_vec();
    let dm = m.len() - 1;
    while r.len() > dm {
        let lead = *r.last().unwrap() as u64;
        let shift = r.len() - 1 - dm;
        if lead != 0 {
            for (i, &mc) in m.iter().enumerate() {
                let idx = shift + i;
                r[idx] = ((r[idx] as u64 + p64 - lead * mc as u64 % p64) % p64) as u32;
            }
        }
        r.pop();
    }
    if r.is_empty() {
        r.push(0);
    }
    fp_trim(&mut r);
    r
}

/// Trial division by every monic polynomial of degree `1..=deg/2`.
fn fp_is_irreducible(p: u32, m: &[u32]) -> bool {
    let deg = m.len() - 1;
    if deg == 1 {
        return true;
    }
    for d in 1..=deg / 2 {
        let count = (p as u64).pow(d as u32);
        for idx in 0..count {
            let mut divisor = Vec::with_capacity(d + 1);
            let mut rest = idx;
            for _ in 0..d {
                divisor.push((rest % p as u64) as u32);
                rest /= p as u64;
            }
            divisor.push(1);
            let r = fp_rem(p, m, &divisor);
            if r.len() == 1 && r[0] == 0 {
                return false;
            }
        }
    }
    true
}

fn smallest_irreducible(p: u32, n: usize) -> Vec<u32> {
    // Candidates in lexicographic order of (c_0, ..., c_{n-1}): c_0 is the
    // most significant digit.
    let total = (p as u64).pow(n as u32);
    for idx in 0..total {
        let mut coeffs = vec![0u32; n + 1];
        let mut rest = idx;
        for i in (0..n).rev() {
            coeffs[i] = (rest % p as u64) as u32;
            rest /= p as u64;
        }
        coeffs[n] = 1;
        if fp_is_irreducible(p, &coeffs) {
            return coeffs;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

impl FieldCtx {
    pub fn p(&self) -> u32 {
        self.p
    }

    /// Extension degree over the prime field.
    pub fn degree(&self) -> usize {
        self.n
    }

    /// Number of elements, `p^n`.
    pub fn size(&self) -> u64 {
        self.size
    }

    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement {
            coeffs: vec![0; self.n],
        }
    }

    pub fn one(&self) -> FieldElement {
        self.from_int(1)
    }

    /// The class of `x` in `F_p[x]/(modulus)`.
    pub fn generator(&self) -> FieldElement {
        if self.n == 1 {
            // F_p[x]/(x - c): x reduces to the root of the modulus.
            let c = (self.p - self.modulus[0]) % self.p;
            return self.from_int(c as i64);
        }
        let mut coeffs = vec![0; self.n];
        coeffs[1] = 1;
        FieldElement { coeffs }
    }

    pub fn from_int(&self, c: i64) -> FieldElement {
        let mut coeffs = vec![0; self.n];
        coeffs[0] = c.rem_euclid(self.p as i64) as u32;
        FieldElement { coeffs }
    }

    /// Element from a coefficient vector (length at most `n`), reducing
    /// each entry mod `p`.
    pub fn from_coeffs(&self, cs: &[i64]) -> Result<FieldElement> {
        if cs.len() > self.n {
            return Err(Error::invalid(format!(
                "element has {} coefficients but the field has degree {}",
                cs.len(),
                self.n
            )));
        }
        let mut coeffs = vec![0; self.n];
        for (slot, &c) in coeffs.iter_mut().zip(cs) {
            *slot = c.rem_euclid(self.p as i64) as u32;
        }
        Ok(FieldElement { coeffs })
    }

    /// The element whose base-`p` digits (least significant first) are
    /// its coefficients.
    pub fn element(&self, mut index: u64) -> FieldElement {
        let mut coeffs = vec![0; self.n];
        for c in coeffs.iter_mut() {
            *c = (index % self.p as u64) as u32;
            index /= self.p as u64;
        }
        FieldElement { coeffs }
    }

    pub fn index_of(&self, a: &FieldElement) -> u64 {
        a.coeffs
            .iter()
            .rev()
            .fold(0u64, |acc, &c| acc * self.p as u64 + c as u64)
    }

    pub fn elements(&self) -> impl Iterator<Item = FieldElement> + '_ {
        (0..self.size).map(move |i| self.element(i))
    }

    pub fn contains(&self, a: &FieldElement) -> bool {
        a.coeffs.len() == self.n && a.coeffs.iter().all(|&c| c < self.p)
    }

    pub fn add(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        let coeffs = a
            .coeffs
            .iter()
            .zip(&b.coeffs)
            .map(|(&x, &y)| ((x as u64 + y as u64) % self.p as u64) as u32)
            .collect();
        FieldElement { coeffs }
    }

    pub fn neg(&self, a: &FieldElement) -> FieldElement {
        let coeffs = a
            .coeffs
            .iter()
            .map(|&x| if x == 0 { 0 } else { self.p - x })
            .collect();
        FieldElement { coeffs }
    }

    pub fn sub(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        self.add(a, &self.neg(b))
    }

    pub fn mul(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        let p = self.p as u64;
        let n = self.n;
        if n == 1 {
            return FieldElement {
                coeffs: vec![((a.coeffs[0] as u64 * b.coeffs[0] as u64) % p) as u32],
            };
        }
        let mut prod = vec![0u64; 2 * n - 1];
        for (i, &x) in a.coeffs.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.coeffs.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x as u64 * y as u64) % p;
            }
        }
        // Reduce by the monic modulus from the top down.
        for k in (n..2 * n - 1).rev() {
            let lead = prod[k];
            if lead == 0 {
                continue;
            }
            prod[k] = 0;
            for i in 0..n {
                let idx = k - n + i;
                prod[idx] = (prod[idx] + (p - lead) * self.modulus[i] as u64) % p;
            }
        }
        FieldElement {
            coeffs: prod[..n].iter().map(|&c| c as u32).collect(),
        }
    }

    pub fn square(&self, a: &FieldElement) -> FieldElement {
        self.mul(a, a)
    }

    /// Square-and-multiply exponentiation.
    pub fn pow(&self, a: &FieldElement, mut e: u128) -> FieldElement {
        let mut base = a.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.square(&base);
            }
        }
        acc
    }

    pub fn inv(&self, a: &FieldElement) -> Result<FieldElement> {
        if a.is_zero() {
            return Err(Error::DivisionByZero("field inversion"));
        }
        Ok(self.pow(a, self.size as u128 - 2))
    }

    pub fn div(&self, a: &FieldElement, b: &FieldElement) -> Result<FieldElement> {
        Ok(self.mul(a, &self.inv(b)?))
    }

    pub fn frobenius(&self, a: &FieldElement) -> FieldElement {
        self.pow(a, self.p as u128)
    }

    /// Trace down to the prime field: `a + a^p + ... + a^{p^{n-1}}`.
    pub fn absolute_trace(&self, a: &FieldElement) -> u32 {
        let mut acc = a.clone();
        let mut conj = a.clone();
        for _ in 1..self.n {
            conj = self.frobenius(&conj);
            acc = self.add(&acc, &conj);
        }
        acc.as_prime()
            .expect("absolute trace always lands in the prime field")
    }

    /// Unique square root in characteristic 2 (`a^{q/2}`).
    pub fn sqrt_char2(&self, a: &FieldElement) -> FieldElement {
        debug_assert_eq!(self.p, 2);
        self.pow(a, (self.size / 2) as u128)
    }

    /// Quadratic character by Euler's criterion; `0` for the zero element.
    /// Odd characteristic only.
    pub fn quadratic_character(&self, a: &FieldElement) -> i8 {
        debug_assert!(self.p != 2);
        if a.is_zero() {
            return 0;
        }
        let e = self.pow(a, ((self.size - 1) / 2) as u128);
        if e == self.one() {
            1
        } else {
            -1
        }
    }

    /// Number of `y` in the field with `y^2 + h_val*y = f_val`.
    pub fn quadratic_root_count(&self, h_val: &FieldElement, f_val: &FieldElement) -> Result<u8> {
        if self.p == 2 {
            if h_val.is_zero() {
                return Ok(1);
            }
            let h2 = self.square(h_val);
            let c = self.div(f_val, &h2)?;
            Ok(if self.absolute_trace(&c) == 0 { 2 } else { 0 })
        } else {
            if !h_val.is_zero() {
                return Err(Error::Unsupported(
                    "odd characteristic models must have h = 0".into(),
                ));
            }
            Ok((1 + self.quadratic_character(f_val)) as u8)
        }
    }

    /// Evaluates a polynomial given by its coefficients (constant first).
    pub fn eval_poly(&self, coeffs: &[FieldElement], x: &FieldElement) -> FieldElement {
        coeffs
            .iter()
            .rev()
            .fold(self.zero(), |acc, c| self.add(&self.mul(&acc, x), c))
    }
}

/// An embedding `F_{p^a} -> F_{p^b}` with `a | b`, fixed by sending the
/// source generator to the first root (in index order) of the source
/// modulus inside the target.
#[derive(Clone, Debug)]
pub struct FieldEmbedding {
    src: FieldCtx,
    dst: FieldCtx,
    gen_powers: Vec<FieldElement>,
}

impl FieldEmbedding {
    pub fn new(src: &FieldCtx, dst: &FieldCtx) -> Result<Self> {
        if src.p != dst.p || dst.n % src.n != 0 {
            return Err(Error::invalid(format!(
                "no embedding of F_{}^{} into F_{}^{}",
                src.p, src.n, dst.p, dst.n
            )));
        }
        let modulus: Vec<FieldElement> = src
            .modulus
            .iter()
            .map(|&c| dst.from_int(c as i64))
            .collect();
        let image = if src.n == 1 {
            dst.from_int(((src.p - src.modulus[0]) % src.p) as i64)
        } else if src.n == dst.n && src.modulus == dst.modulus {
            dst.generator()
        } else {
            dst.elements()
                .find(|x| dst.eval_poly(&modulus, x).is_zero())
                .ok_or_else(|| Error::consistency("source modulus has no root in target"))?
        };
        let mut gen_powers = Vec::with_capacity(src.n);
        let mut cur = dst.one();
        for _ in 0..src.n {
            gen_powers.push(cur.clone());
            cur = dst.mul(&cur, &image);
        }
        Ok(FieldEmbedding {
            src: src.clone(),
            dst: dst.clone(),
            gen_powers,
        })
    }

    pub fn source(&self) -> &FieldCtx {
        &self.src
    }

    pub fn target(&self) -> &FieldCtx {
        &self.dst
    }

    pub fn map(&self, a: &FieldElement) -> FieldElement {
        let mut acc = self.dst.zero();
        for (&c, g) in a.coeffs.iter().zip(&self.gen_powers) {
            if c != 0 {
                acc = self.dst.add(&acc, &self.dst.mul(&self.dst.from_int(c as i64), g));
            }
        }
        acc
    }
}
