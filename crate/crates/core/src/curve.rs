//! Quadratic curve models `y^2 + h(x) y = f(x)` over `F_q`, and point and
//! place counting on their smooth projective models.
//!
//! In odd characteristic only `y^2 = f(x)` with squarefree `f` is accepted.
//! In characteristic 2 the function field is `F_q(x)(z)` with
//! `z^2 + z = f/h^2`, and the behaviour of every place of `F_q(x)` is read
//! off the Laurent expansion of `f/h^2` after Artin–Schreier reduction. This
//! is exact even when the affine model has singular points, so genus and
//! place counts always refer to the function field itself.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{
    make_field_with_limit, prime_power, FieldCtx, FieldElement, FieldEmbedding,
    DEFAULT_ENUMERATION_LIMIT,
};
use crate::poly::{Poly, PolyRing};

// ---------------------------------------------------------------------------
// JSON description
// ---------------------------------------------------------------------------

/// A coefficient in a curve description: an integer (prime-field constant)
/// or an integer vector of length at most `n` for `q = p^n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Coeff {
    Scalar(i64),
    Vector(Vec<i64>),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RightHandSide {
    Poly(Vec<Coeff>),
    Rational { num: Vec<Coeff>, den: Vec<Coeff> },
}

/// On-disk curve description.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurveDescription {
    pub q: u64,
    #[serde(default = "default_model")]
    pub model: String,
    #[serde(default)]
    pub h: Vec<Coeff>,
    pub f: RightHandSide,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub genus: Option<usize>,
}

fn default_model() -> String {
    "quadratic".to_string()
}

// ---------------------------------------------------------------------------
// Local analysis
// ---------------------------------------------------------------------------

/// Behaviour of the quadratic extension over a point of the projective
/// line defined over the field in which the analysis is carried out.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LocalType {
    /// One point above; `different` is the exponent of the different
    /// (pole order + 1 in characteristic 2, 1 in odd characteristic).
    Ramified { different: u32 },
    /// Two points above if `residue` gives a solvable fibre equation,
    /// none otherwise.
    Unramified { residue: FieldElement },
}

/// Where a fibre sits on the projective line.
#[derive(Clone, Debug)]
pub enum Locus<'a> {
    Finite(&'a FieldElement),
    Infinity,
}

/// How a place of `F_q(x)` decomposes in the curve's function field.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Splitting {
    Split,
    Inert,
    Ramified,
}

impl Splitting {
    fn of_local(k: &FieldCtx, t: &LocalType) -> Splitting {
        match t {
            LocalType::Ramified { .. } => Splitting::Ramified,
            LocalType::Unramified { residue } => {
                if residue_is_solvable(k, residue) {
                    Splitting::Split
                } else {
                    Splitting::Inert
                }
            }
        }
    }
}

fn residue_is_solvable(k: &FieldCtx, residue: &FieldElement) -> bool {
    if k.p() == 2 {
        k.absolute_trace(residue) == 0
    } else {
        k.quadratic_character(residue) == 1
    }
}

/// Number of points of the smooth model above a fibre defined over `k`.
pub fn fibre_count(k: &FieldCtx, t: &LocalType) -> u64 {
    match Splitting::of_local(k, t) {
        Splitting::Split => 2,
        Splitting::Inert => 0,
        Splitting::Ramified => 1,
    }
}

/// Leading part of `t^shift * num(t) / unit(t)^2` for exponents
/// `shift..=0` (empty when `shift > 0`), with `unit(0) != 0`.
fn laurent_head(
    k: &FieldCtx,
    num: &[FieldElement],
    unit: &[FieldElement],
    shift: i64,
) -> BTreeMap<i64, FieldElement> {
    let mut out = BTreeMap::new();
    if shift > 0 {
        return out;
    }
    let terms = (-shift) as usize + 1;
    let ring = PolyRing::new(k);
    let den = ring.mul(unit, unit);
    let d0_inv = k.inv(&den[0]).expect("unit has a nonzero constant term");
    let mut work: Vec<FieldElement> = (0..terms)
        .map(|i| num.get(i).cloned().unwrap_or_else(|| k.zero()))
        .collect();
    for i in 0..terms {
        let c = k.mul(&work[i], &d0_inv);
        for (j, dj) in den.iter().enumerate().skip(1) {
            if i + j < terms {
                work[i + j] = k.sub(&work[i + j], &k.mul(&c, dj));
            }
        }
        out.insert(shift + i as i64, c);
    }
    out
}

/// Artin–Schreier reduction of a Laurent head in characteristic 2.
fn reduce_char2(k: &FieldCtx, mut coeffs: BTreeMap<i64, FieldElement>) -> LocalType {
    loop {
        let lowest = coeffs
            .iter()
            .find(|(&e, c)| e < 0 && !c.is_zero())
            .map(|(&e, c)| (e, c.clone()));
        match lowest {
            None => {
                let residue = coeffs.get(&0).cloned().unwrap_or_else(|| k.zero());
                return LocalType::Unramified { residue };
            }
            Some((e, _)) if e % 2 != 0 => {
                return LocalType::Ramified {
                    different: (-e) as u32 + 1,
                };
            }
            Some((e, c)) => {
                // z -> z + s t^{e/2} with s^2 = c removes the t^e term.
                coeffs.insert(e, k.zero());
                let s = k.sqrt_char2(&c);
                let slot = coeffs.entry(e / 2).or_insert_with(|| k.zero());
                *slot = k.add(slot, &s);
            }
        }
    }
}

/// Local type of `y^2 + h y = f` at a point of `P^1(k)`; `f` and `h` must
/// already have coefficients in `k`.
pub fn local_type(k: &FieldCtx, f: &[FieldElement], h: &[FieldElement], at: Locus<'_>) -> LocalType {
    let ring = PolyRing::new(k);
    if k.p() != 2 {
        return match at {
            Locus::Finite(x0) => {
                let v = ring.eval(f, x0);
                if v.is_zero() {
                    LocalType::Ramified { different: 1 }
                } else {
                    LocalType::Unramified { residue: v }
                }
            }
            Locus::Infinity => {
                let deg = f.len() - 1;
                if deg % 2 == 1 {
                    LocalType::Ramified { different: 1 }
                } else {
                    LocalType::Unramified {
                        residue: f[deg].clone(),
                    }
                }
            }
        };
    }
    match at {
        Locus::Finite(x0) => {
            let hv = ring.eval(h, x0);
            if !hv.is_zero() {
                let fv = ring.eval(f, x0);
                let residue = k.mul(&fv, &k.inv(&k.square(&hv)).expect("nonzero"));
                return LocalType::Unramified { residue };
            }
            let fs = ring.shift(f, x0);
            let hs = ring.shift(h, x0);
            let e = hs.iter().position(|c| !c.is_zero()).expect("h is nonzero");
            let head = laurent_head(k, &fs, &hs[e..], -2 * e as i64);
            reduce_char2(k, head)
        }
        Locus::Infinity => {
            let df = f.len() as i64 - 1;
            let dh = h.len() as i64 - 1;
            let fr = ring.reversed(f);
            let hr = ring.reversed(h);
            let head = laurent_head(k, &fr, &hr, 2 * dh - df);
            reduce_char2(k, head)
        }
    }
}

// ---------------------------------------------------------------------------
// Curve model
// ---------------------------------------------------------------------------

/// Structure of the places above `x = infinity`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "type")]
pub enum InfinityType {
    /// One rational place; `different` as in [`LocalType::Ramified`].
    OneRamified { different: u32 },
    /// Two rational places.
    Split,
    /// One place of degree 2.
    Inert,
}

/// A validated quadratic model with derived genus.
#[derive(Clone, Debug)]
pub struct CurveModel {
    field: FieldCtx,
    h: Poly,
    f: Poly,
    genus: usize,
    infinity: InfinityType,
    affine_smooth: bool,
    limit: u64,
}

fn coeff_to_element(k: &FieldCtx, c: &Coeff) -> Result<FieldElement> {
    match c {
        Coeff::Scalar(v) => Ok(k.from_int(*v)),
        Coeff::Vector(vs) => k.from_coeffs(vs),
    }
}

fn coeffs_to_poly(k: &FieldCtx, cs: &[Coeff]) -> Result<Poly> {
    let ring = PolyRing::new(k);
    let v = cs
        .iter()
        .map(|c| coeff_to_element(k, c))
        .collect::<Result<Vec<_>>>()?;
    Ok(ring.trim(v))
}

fn element_to_coeff(k: &FieldCtx, a: &FieldElement) -> Coeff {
    if k.degree() == 1 {
        Coeff::Scalar(a.coeffs()[0] as i64)
    } else {
        Coeff::Vector(a.coeffs().iter().map(|&c| c as i64).collect())
    }
}

/// Parses and validates a JSON curve description.
pub fn parse_curve(text: &str) -> Result<CurveModel> {
    let desc: CurveDescription =
        serde_json::from_str(text).map_err(|e| Error::invalid(format!("curve JSON: {e}")))?;
    CurveModel::from_description(&desc)
}

impl CurveModel {
    pub fn from_description(desc: &CurveDescription) -> Result<CurveModel> {
        Self::from_description_with_limit(desc, DEFAULT_ENUMERATION_LIMIT)
    }

    pub fn from_description_with_limit(desc: &CurveDescription, limit: u64) -> Result<CurveModel> {
        if desc.model != "quadratic" {
            return Err(Error::Unsupported(format!("model type {:?}", desc.model)));
        }
        let (p, n) = prime_power(desc.q)?;
        let k = make_field_with_limit(p, n, limit)?;
        let ring = PolyRing::new(&k);
        let h = coeffs_to_poly(&k, &desc.h)?;
        let (h, f) = match &desc.f {
            RightHandSide::Poly(cs) => (h, coeffs_to_poly(&k, cs)?),
            RightHandSide::Rational { num, den } => {
                let num = coeffs_to_poly(&k, num)?;
                let den = coeffs_to_poly(&k, den)?;
                if den.is_empty() {
                    return Err(Error::invalid("zero denominator in f"));
                }
                // Y = den * y turns y^2 + h y = num/den into
                // Y^2 + den*h Y = den*num.
                (ring.mul(&den, &h), ring.mul(&den, &num))
            }
        };
        let model = Self::from_polys_with_limit(k, h, f, limit)?;
        if let Some(g) = desc.genus {
            if g != model.genus {
                return Err(Error::invalid(format!(
                    "declared genus {g} but the model has genus {}",
                    model.genus
                )));
            }
        }
        Ok(model)
    }

    pub fn from_polys(field: FieldCtx, h: Poly, f: Poly) -> Result<CurveModel> {
        Self::from_polys_with_limit(field, h, f, DEFAULT_ENUMERATION_LIMIT)
    }

    pub fn from_polys_with_limit(field: FieldCtx, h: Poly, f: Poly, limit: u64) -> Result<CurveModel> {
        let ring = PolyRing::new(&field);
        let h = ring.trim(h);
        let f = ring.trim(f);
        if f.is_empty() {
            return Err(Error::invalid("f must be nonzero"));
        }
        let (genus, affine_smooth) = if field.p() == 2 {
            if h.is_empty() {
                return Err(Error::Unsupported(
                    "characteristic 2 requires h != 0 (y^2 = f is inseparable)".into(),
                ));
            }
            (genus_char2(&field, &f, &h)?, affine_smooth_char2(&ring, &f, &h))
        } else {
            if !h.is_empty() {
                return Err(Error::Unsupported(
                    "odd characteristic supports only y^2 = f(x)".into(),
                ));
            }
            if !ring.is_squarefree(&f) {
                return Err(Error::invalid("f is not squarefree: the model is singular"));
            }
            let d = f.len() - 1;
            if d < 3 {
                return Err(Error::invalid(format!("deg f = {d} gives genus 0")));
            }
            ((d - 1) / 2, true)
        };
        let infinity = match local_type(&field, &f, &h, Locus::Infinity) {
            LocalType::Ramified { different } => InfinityType::OneRamified { different },
            t => match Splitting::of_local(&field, &t) {
                Splitting::Split => InfinityType::Split,
                _ => InfinityType::Inert,
            },
        };
        Ok(CurveModel {
            field,
            h,
            f,
            genus,
            infinity,
            affine_smooth,
            limit,
        })
    }

    pub fn field(&self) -> &FieldCtx {
        &self.field
    }

    pub fn q(&self) -> u64 {
        self.field.size()
    }

    pub fn characteristic(&self) -> u32 {
        self.field.p()
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn h_poly(&self) -> &[FieldElement] {
        &self.h
    }

    pub fn f_poly(&self) -> &[FieldElement] {
        &self.f
    }

    pub fn infinity(&self) -> InfinityType {
        self.infinity
    }

    /// Whether the affine model `y^2 + h y = f` is nonsingular.
    pub fn affine_smooth(&self) -> bool {
        self.affine_smooth
    }

    pub fn enumeration_limit(&self) -> u64 {
        self.limit
    }

    /// The normalized polynomial model as a description.
    pub fn to_description(&self) -> CurveDescription {
        let conv = |p: &[FieldElement]| p.iter().map(|c| element_to_coeff(&self.field, c)).collect();
        CurveDescription {
            q: self.q(),
            model: default_model(),
            h: conv(&self.h),
            f: RightHandSide::Poly(conv(&self.f)),
            genus: Some(self.genus),
        }
    }

    fn extension(&self, m: usize) -> Result<(FieldCtx, Poly, Poly)> {
        if m == 0 {
            return Err(Error::invalid("extension degree must be at least 1"));
        }
        let ext = make_field_with_limit(self.field.p(), self.field.degree() * m, self.limit)?;
        let emb = FieldEmbedding::new(&self.field, &ext)?;
        let f = self.f.iter().map(|c| emb.map(c)).collect();
        let h = self.h.iter().map(|c| emb.map(c)).collect();
        Ok((ext, f, h))
    }

    /// Number of points of the smooth projective model over `F_{q^m}`.
    pub fn count_points(&self, m: usize) -> Result<u64> {
        let (ext, f, h) = self.extension(m)?;
        let ring = PolyRing::new(&ext);
        let mut total = 0u64;
        for x in ext.elements() {
            let hv = ring.eval(&h, &x);
            if ext.p() != 2 || !hv.is_zero() {
                let fv = ring.eval(&f, &x);
                total += ext.quadratic_root_count(&hv, &fv)? as u64;
            } else {
                total += fibre_count(&ext, &local_type(&ext, &f, &h, Locus::Finite(&x)));
            }
        }
        total += fibre_count(&ext, &local_type(&ext, &f, &h, Locus::Infinity));
        Ok(total)
    }

    /// `N_1..N_D` and `B_1..B_D` via Möbius inversion of point counts.
    pub fn place_counts(&self, max_degree: usize) -> Result<PlaceTable> {
        let n_counts = (1..=max_degree)
            .map(|m| self.count_points(m))
            .collect::<Result<Vec<_>>>()?;
        let b_counts = places_from_points(&n_counts)?;
        Ok(PlaceTable {
            q: self.q(),
            max_degree,
            n_counts,
            b_counts,
            places: None,
        })
    }

    /// Lists every place of degree at most `max_degree` explicitly, one
    /// monic irreducible of `F_q[x]` at a time, and checks the totals
    /// against [`CurveModel::place_counts`].
    pub fn enumerate_places(&self, max_degree: usize) -> Result<PlaceTable> {
        let mut table = self.place_counts(max_degree)?;
        let ring = PolyRing::new(&self.field);
        let mut records = Vec::new();
        let mut b = vec![0u64; max_degree];
        let tally = |split: Splitting, d: usize, b: &mut Vec<u64>| -> Vec<usize> {
            let degs = match split {
                Splitting::Split => vec![d, d],
                Splitting::Inert => vec![2 * d],
                Splitting::Ramified => vec![d],
            };
            for &e in &degs {
                if e <= max_degree {
                    b[e - 1] += 1;
                }
            }
            degs
        };

        let inf = match self.infinity {
            InfinityType::OneRamified { .. } => Splitting::Ramified,
            InfinityType::Split => Splitting::Split,
            InfinityType::Inert => Splitting::Inert,
        };
        let degs = tally(inf, 1, &mut b);
        records.push(PlaceRecord {
            base: PlaceBase::Infinity,
            splitting: inf,
            place_degrees: degs,
        });

        for d in 1..=max_degree {
            for p in ring.monic_irreducibles(d).collect::<Vec<_>>() {
                let split = self.classify_finite(&p)?;
                let degs = tally(split, d, &mut b);
                records.push(PlaceRecord {
                    base: PlaceBase::Finite(
                        p.iter().map(|c| element_to_coeff(&self.field, c)).collect(),
                    ),
                    splitting: split,
                    place_degrees: degs,
                });
            }
        }
        if b != table.b_counts {
            return Err(Error::consistency(format!(
                "explicit places give B = {b:?} but point counts give B = {:?}",
                table.b_counts
            )));
        }
        table.places = Some(records);
        Ok(table)
    }

    /// Decomposition of the place of `F_q(x)` given by the monic
    /// irreducible `p`, computed in the residue field `F_q[x]/(p)`.
    fn classify_finite(&self, p: &[FieldElement]) -> Result<Splitting> {
        let k = &self.field;
        let ring = PolyRing::new(k);
        let d = p.len() - 1;
        let qd = (k.size() as u128).pow(d as u32);
        if k.p() != 2 {
            let fr = ring.rem(&self.f, p)?;
            if fr.is_empty() {
                return Ok(Splitting::Ramified);
            }
            let chi = ring.powmod(&fr, (qd - 1) / 2, p)?;
            return Ok(if chi == vec![k.one()] {
                Splitting::Split
            } else {
                Splitting::Inert
            });
        }
        let hr = ring.rem(&self.h, p)?;
        if hr.is_empty() {
            // Above a root of h: work at an explicit root in F_{q^d}.
            let (ext, f, h) = self.extension(d)?;
            let pe: Poly = {
                let emb = FieldEmbedding::new(k, &ext)?;
                p.iter().map(|c| emb.map(c)).collect()
            };
            let ering = PolyRing::new(&ext);
            let root = ext
                .elements()
                .find(|x| ering.eval(&pe, x).is_zero())
                .ok_or_else(|| Error::consistency("irreducible factor without a root"))?;
            let t = local_type(&ext, &f, &h, Locus::Finite(&root));
            return Ok(Splitting::of_local(&ext, &t));
        }
        // residue f / h^2 in F_q[x]/(p), then its trace down to F_q.
        let h2 = ring.rem(&ring.mul(&hr, &hr), p)?;
        let h2_inv = ring.powmod(&h2, qd - 2, p)?;
        let c = ring.rem(&ring.mul(&self.f, &h2_inv), p)?;
        let mut trace: Poly = Vec::new();
        let mut conj = c;
        for _ in 0..d {
            trace = ring.add(&trace, &conj);
            conj = ring.powmod(&conj, k.size() as u128, p)?;
        }
        if trace.len() > 1 {
            return Err(Error::consistency("relative trace is not a constant"));
        }
        let t = trace.first().cloned().unwrap_or_else(|| k.zero());
        Ok(if k.absolute_trace(&t) == 0 {
            Splitting::Split
        } else {
            Splitting::Inert
        })
    }
}

fn affine_smooth_char2(ring: &PolyRing<'_>, f: &[FieldElement], h: &[FieldElement]) -> bool {
    // Singular points lie over common roots of h and h'^2 f + f'^2.
    let dh = ring.derivative(h);
    let df = ring.derivative(f);
    let crit = ring.add(&ring.mul(&ring.mul(&dh, &dh), f), &ring.mul(&df, &df));
    ring.gcd(h, &crit).len() == 1
}

/// Riemann–Hurwitz for `z^2 + z = f/h^2`: `2g + 2 = sum of d_P deg P`.
fn genus_char2(k: &FieldCtx, f: &[FieldElement], h: &[FieldElement]) -> Result<usize> {
    let ring = PolyRing::new(k);
    let mut total: u64 = 0;
    for (p, _) in ring.factor(h) {
        let d = p.len() - 1;
        let ext = make_field_with_limit(k.p(), k.degree() * d, DEFAULT_ENUMERATION_LIMIT)?;
        let emb = FieldEmbedding::new(k, &ext)?;
        let (fe, he, pe): (Poly, Poly, Poly) = (
            f.iter().map(|c| emb.map(c)).collect(),
            h.iter().map(|c| emb.map(c)).collect(),
            p.iter().map(|c| emb.map(c)).collect(),
        );
        let ering = PolyRing::new(&ext);
        let root = ext
            .elements()
            .find(|x| ering.eval(&pe, x).is_zero())
            .ok_or_else(|| Error::consistency("irreducible factor without a root"))?;
        if let LocalType::Ramified { different } = local_type(&ext, &fe, &he, Locus::Finite(&root)) {
            total += different as u64 * d as u64;
        }
    }
    if let LocalType::Ramified { different } = local_type(k, f, h, Locus::Infinity) {
        total += different as u64;
    }
    match total {
        0 => Err(Error::invalid(
            "the model is unramified everywhere: not a geometrically irreducible curve",
        )),
        2 => Err(Error::invalid("the model has genus 0")),
        t if t % 2 == 1 => Err(Error::consistency("odd different degree")),
        t => Ok((t / 2 - 1) as usize),
    }
}

// ---------------------------------------------------------------------------
// Place tables
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlaceBase {
    Infinity,
    /// Monic irreducible of `F_q[x]`, constant term first.
    Finite(Vec<Coeff>),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlaceRecord {
    pub base: PlaceBase,
    pub splitting: Splitting,
    pub place_degrees: Vec<usize>,
}

/// Point counts `N_1..N_D` and place counts `B_1..B_D`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlaceTable {
    pub q: u64,
    pub max_degree: usize,
    pub n_counts: Vec<u64>,
    pub b_counts: Vec<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub places: Option<Vec<PlaceRecord>>,
}

impl PlaceTable {
    /// Table from place counts alone (for oracle inputs).
    pub fn from_place_counts(q: u64, b_counts: Vec<u64>) -> PlaceTable {
        let n_counts = (1..=b_counts.len())
            .map(|m| {
                divisors(m)
                    .into_iter()
                    .map(|d| d as u64 * b_counts[d - 1])
                    .sum()
            })
            .collect();
        PlaceTable {
            q,
            max_degree: b_counts.len(),
            n_counts,
            b_counts,
            places: None,
        }
    }

    pub fn b1(&self) -> Option<u64> {
        self.b_counts.first().copied()
    }
}

pub fn mobius(mut n: usize) -> i64 {
    let mut result = 1;
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            n /= d;
            if n % d == 0 {
                return 0;
            }
            result = -result;
        }
        d += 1;
    }
    if n > 1 {
        result = -result;
    }
    result
}

fn divisors(m: usize) -> Vec<usize> {
    (1..=m).filter(|d| m % d == 0).collect()
}

/// `B_m = (1/m) sum_{d|m} mu(d) N_{m/d}`, asserting integrality and
/// nonnegativity.
pub fn places_from_points(n_counts: &[u64]) -> Result<Vec<u64>> {
    (1..=n_counts.len())
        .map(|m| {
            let s: i128 = divisors(m)
                .into_iter()
                .map(|d| mobius(d) as i128 * n_counts[m / d - 1] as i128)
                .sum();
            if s < 0 || s % m as i128 != 0 {
                Err(Error::consistency(format!(
                    "Möbius inversion at degree {m} gives {s}/{m}"
                )))
            } else {
                Ok((s / m as i128) as u64)
            }
        })
        .collect()
}
