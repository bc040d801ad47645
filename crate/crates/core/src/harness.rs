//! End-to-end verification of corpus entries.
//!
//! Each entry is pushed through two independent paths: point counts to L by
//! Newton's identities, and place counts to effective divisor counts to L.
//! Every identity between them is then checked, followed by the recorded
//! expectations.

use std::fs;
use std::path::{Path, PathBuf};

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::criteria::{verdict, Conclusion};
use crate::curve::{places_from_points, CurveDescription, CurveModel, PlaceTable};
use crate::divisors::{
    check_b1_recurrence, counts_well_formed, lpoly_from_effective_counts, oracle_series,
    count_symmetry_violations, central_value_check, DivisorCountTable,
};
use crate::error::{Error, Result};
use crate::hyperelliptic::{dimension_class_table, h_gk0_closed};
use crate::zeta::{lpoly_from_counts, validate_lpoly, Check, LPolynomial, LpolyInput};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    /// Stated in the literature and reproduced here.
    Published,
    /// Computed by this library along an independent path.
    Derived,
    /// Stated in the literature but contradicted by recomputation; the
    /// check passes only while the recomputed value still differs.
    PublishedUnreproduced,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EntryInput {
    Curve(CurveDescription),
    Lpoly(LpolyInput),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Quantity {
    Genus { value: usize },
    ClassNumber {
        #[serde(with = "crate::numstr")]
        value: BigInt,
    },
    Lpoly {
        #[serde(with = "crate::numstr::vec")]
        value: Vec<BigInt>,
    },
    EffectiveCount {
        n: usize,
        #[serde(with = "crate::numstr")]
        value: BigInt,
    },
    DimensionZero {
        n: usize,
        #[serde(with = "crate::numstr")]
        value: BigInt,
    },
    Ordinary { value: bool },
    PRank { value: usize },
    /// A certified lower bound on `h_{g-k,0}` from the named criterion.
    Bound {
        criterion: String,
        k: usize,
        #[serde(with = "crate::numstr")]
        value: BigInt,
    },
    /// Whether a dimension-zero divisor of degree `n` is known to exist.
    Exists { n: usize, value: bool },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Expectation {
    #[serde(flatten)]
    pub quantity: Quantity,
    pub provenance: Provenance,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusEntry {
    pub label: String,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub description: String,
    pub input: EntryInput,
    /// Curve inputs are quadratic models and hence hyperelliptic when
    /// `g >= 2`; L inputs must say so explicitly.
    #[serde(default)]
    pub hyperelliptic: bool,
    #[serde(default)]
    pub expected: Vec<Expectation>,
}

/// Adds `delta` to `a_index` of the computed L before the downstream checks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fault {
    pub index: usize,
    pub delta: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub label: String,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub genus: Option<usize>,
    #[serde(with = "crate::numstr::opt", skip_serializing_if = "Option::is_none", default)]
    pub class_number: Option<BigInt>,
    pub checks: Vec<Check>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusSummary {
    pub entries: usize,
    pub failures: usize,
    pub passed: bool,
    pub reports: Vec<VerifyReport>,
}

struct Recorder {
    checks: Vec<Check>,
}

impl Recorder {
    fn push(&mut self, name: &str, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check::new(name, passed, detail));
    }

    fn push_result(&mut self, name: &str, r: Result<String>) {
        match r {
            Ok(detail) => self.push(name, true, detail),
            Err(e) => self.push(name, false, e.to_string()),
        }
    }
}

/// Degree up to which places are enumerated: enough for `A_0..A_{2g-2}`
/// and for rebuilding L from `A_0..A_g`.
pub fn oracle_depth(g: usize) -> usize {
    g.max(2 * g.saturating_sub(1)).max(1)
}

fn to_u64(v: &[BigInt]) -> Result<Vec<u64>> {
    v.iter()
        .map(|x| x.to_u64().ok_or_else(|| Error::consistency(format!("count {x} out of range"))))
        .collect()
}

/// Point counts, place counts and the genus, from the curve itself or from
/// the counts an L-polynomial predicts.
fn source_data(entry: &CorpusEntry, rec: &mut Recorder) -> Result<(LPolynomial, PlaceTable, usize)> {
    match &entry.input {
        EntryInput::Curve(desc) => {
            let curve = CurveModel::from_description(desc)?;
            let g = curve.genus();
            let depth = oracle_depth(g);
            let by_mobius = curve.place_counts(depth)?;
            let explicit = curve.enumerate_places(depth);
            rec.push_result(
                "place_counts",
                explicit.and_then(|t| {
                    if t.b_counts == by_mobius.b_counts {
                        Ok(format!("B_1..B_{depth} = {:?} by both methods", t.b_counts))
                    } else {
                        Err(Error::consistency(format!(
                            "enumerated places {:?} vs Möbius {:?}",
                            t.b_counts, by_mobius.b_counts
                        )))
                    }
                }),
            );
            let l = lpoly_from_counts(curve.q(), g, &by_mobius.n_counts)?;
            Ok((l, by_mobius, g))
        }
        EntryInput::Lpoly(input) => {
            let l = LPolynomial::from_input(input)?;
            let depth = oracle_depth(input.g);
            let n = to_u64(&l.predicted_counts(depth))?;
            let b = places_from_points(&n)?;
            rec.push("place_counts", true, format!("B_1..B_{depth} = {b:?} from predicted counts"));
            Ok((l, PlaceTable::from_place_counts(input.q, b), input.g))
        }
    }
}

pub fn verify_curve(entry: &CorpusEntry) -> VerifyReport {
    verify_with_fault(entry, None)
}

pub fn verify_with_fault(entry: &CorpusEntry, fault: Option<Fault>) -> VerifyReport {
    let mut rec = Recorder { checks: Vec::new() };
    let (mut l, places, g) = match source_data(entry, &mut rec) {
        Ok(v) => v,
        Err(e) => {
            rec.push("input", false, e.to_string());
            return finish(entry, rec, None, None);
        }
    };
    if let Some(f) = fault {
        let mut a = l.coeffs().to_vec();
        if let Some(c) = a.get_mut(f.index) {
            *c += f.delta;
        }
        l = LPolynomial::new_unchecked(l.q(), l.genus(), a);
    }
    let q = l.q();
    let hyperelliptic = entry.hyperelliptic || matches!(entry.input, EntryInput::Curve(_));

    // Oracle path: places -> A series -> L.
    let depth = oracle_depth(g);
    let oracle = oracle_series(&places, depth);
    rec.push_result(
        "lpoly_oracle",
        oracle.clone().and_then(|a| {
            let rebuilt = lpoly_from_effective_counts(q, g, &a)?;
            if rebuilt == l {
                Ok("L from effective counts equals L from point counts".into())
            } else {
                Err(Error::consistency(format!(
                    "oracle L {:?} vs point-count L {:?}",
                    rebuilt.coeffs(),
                    l.coeffs()
                )))
            }
        }),
    );

    let diag = validate_lpoly(&l);
    for c in &diag.checks {
        rec.checks.push(c.clone());
    }

    let series = DivisorCountTable::series(&l, 2 * g.max(1) - 2);
    rec.push(
        "counts_well_formed",
        counts_well_formed(&series.counts),
        format!("A_0..A_{} = {:?}", series.counts.len() - 1, strs(&series.counts)),
    );
    let z1 = count_symmetry_violations(&l, &series.counts);
    rec.push("count_symmetry", z1.is_empty(), format!("violations at n = {z1:?}"));
    if !diag.checks.iter().any(|c| c.name == "central_value") {
        let z2 = central_value_check(&l);
        rec.push("central_value", z2.holds, format!("{} <= {}", z2.lhs, z2.rhs));
    }

    rec.push_result("three_way_counts", three_way(&l, &series, oracle));

    let b1 = places.b1().unwrap_or(0);
    let mut recurrence_bad = check_b1_recurrence(&series.counts, b1.min(1));
    recurrence_bad.extend(check_b1_recurrence(&series.counts, b1));
    rec.push(
        "b1_recurrence",
        recurrence_bad.is_empty(),
        format!("B_1 = {b1}, violations at n = {recurrence_bad:?}"),
    );

    if hyperelliptic {
        rec.push_result("hyperelliptic_exact", hyperelliptic_checks(&l));
    }
    rec.push_result("bound_soundness", soundness(&l, b1, hyperelliptic));

    for exp in &entry.expected {
        let (name, r) = evaluate(exp, &l, g, b1, hyperelliptic);
        let r = r.and_then(|(matches, detail)| {
            let want_match = exp.provenance != Provenance::PublishedUnreproduced;
            if matches == want_match {
                Ok(detail)
            } else if want_match {
                Err(Error::consistency(format!("mismatch: {detail}")))
            } else {
                Err(Error::consistency(format!("unexpectedly reproduced: {detail}")))
            }
        });
        rec.push_result(&name, r);
    }
    finish(entry, rec, Some(g), Some(l.class_number()))
}

fn finish(entry: &CorpusEntry, rec: Recorder, genus: Option<usize>, h: Option<BigInt>) -> VerifyReport {
    VerifyReport {
        label: entry.label.clone(),
        passed: rec.checks.iter().all(|c| c.passed),
        genus,
        class_number: h,
        checks: rec.checks,
    }
}

fn strs(v: &[BigInt]) -> Vec<String> {
    v.iter().map(|x| x.to_string()).collect()
}

fn three_way(l: &LPolynomial, series: &DivisorCountTable, oracle: Result<Vec<BigInt>>) -> Result<String> {
    let g = l.genus();
    let oracle = oracle?;
    for (n, a) in series.counts.iter().enumerate() {
        if oracle.get(n) != Some(a) {
            return Err(Error::consistency(format!(
                "A_{n}: series {a}, oracle {:?}",
                oracle.get(n).map(|x| x.to_string())
            )));
        }
    }
    let closed = DivisorCountTable::closed_form(l)?;
    for (n, a) in closed.counts.iter().enumerate() {
        if *a != series.counts[n] {
            return Err(Error::consistency(format!(
                "A_{n}: closed form {a}, series {}",
                series.counts[n]
            )));
        }
    }
    Ok(format!(
        "series, closed form (n < {g}) and oracle agree on A_0..A_{}",
        series.counts.len() - 1
    ))
}

fn hyperelliptic_checks(l: &LPolynomial) -> Result<String> {
    let g = l.genus();
    let h = l.class_number();
    if g == 0 {
        return Ok("genus 0: nothing to check".into());
    }
    for n in 0..=(2 * g - 2) {
        dimension_class_table(l, n)?;
    }
    let h00 = dimension_class_table(l, 0)?.get(0);
    if h00 != &h - 1 {
        return Err(Error::consistency(format!("h_(0,0) = {h00}, expected h - 1 = {}", &h - 1)));
    }
    if g >= 2 {
        let hg0 = dimension_class_table(l, g)?.get(0);
        if hg0 != BigInt::from(0) {
            return Err(Error::consistency(format!("h_({g},0) = {hg0}, expected 0")));
        }
        for k in 1..=g {
            let closed = h_gk0_closed(l, k)?.value;
            let via_sum = dimension_class_table(l, g - k)?.get(0);
            if closed != via_sum {
                return Err(Error::consistency(format!(
                    "k = {k}: closed form {closed}, class sum {via_sum}"
                )));
            }
        }
    }
    Ok(format!("class tables consistent for n = 0..={}", 2 * g - 2))
}

fn soundness(l: &LPolynomial, b1: u64, hyperelliptic: bool) -> Result<String> {
    let mut certified = 0;
    for k in 1..=l.genus() {
        let v = verdict(l, k, Some(b1), hyperelliptic)?;
        certified += v.criteria.iter().filter(|c| c.certifies(v.n)).count();
    }
    Ok(format!("{certified} certified bounds, none above an exact count"))
}

fn evaluate(
    exp: &Expectation,
    l: &LPolynomial,
    g: usize,
    b1: u64,
    hyperelliptic: bool,
) -> (String, Result<(bool, String)>) {
    let cmp = |name: String, got: String, want: String| -> (String, Result<(bool, String)>) {
        let detail = format!("computed {got}, recorded {want}");
        (name, Ok((got == want, detail)))
    };
    match &exp.quantity {
        Quantity::Genus { value } => cmp("expect genus".into(), g.to_string(), value.to_string()),
        Quantity::ClassNumber { value } => {
            cmp("expect h".into(), l.class_number().to_string(), value.to_string())
        }
        Quantity::Lpoly { value } => {
            cmp("expect L".into(), strs(l.coeffs()).join(","), strs(value).join(","))
        }
        Quantity::EffectiveCount { n, value } => cmp(
            format!("expect A_{n}"),
            crate::divisors::effective_count_series(l, *n).to_string(),
            value.to_string(),
        ),
        Quantity::DimensionZero { n, value } => {
            let name = format!("expect h_({n},0)");
            match dimension_class_table(l, *n) {
                Ok(t) => cmp(name, t.get(0).to_string(), value.to_string()),
                Err(e) => (name, Err(e)),
            }
        }
        Quantity::Ordinary { value } => {
            cmp("expect ordinary".into(), l.is_ordinary().to_string(), value.to_string())
        }
        Quantity::PRank { value } => {
            let name = "expect p-rank".to_string();
            match l.p_rank(l.characteristic()) {
                Ok(r) => cmp(name, r.to_string(), value.to_string()),
                Err(e) => (name, Err(e)),
            }
        }
        Quantity::Bound { criterion, k, value } => {
            let name = format!("expect {criterion} bound at k = {k}");
            let got = verdict(l, *k, Some(b1), false).map(|v| {
                v.criteria
                    .iter()
                    .find(|c| c.name == *criterion && c.certifies(v.n))
                    .and_then(|c| c.bound.clone())
                    .map_or("none".to_string(), |b| b.to_string())
            });
            match got {
                Ok(got) => cmp(name, got, value.to_string()),
                Err(e) => (name, Err(e)),
            }
        }
        Quantity::Exists { n, value } => {
            let name = format!("expect existence at degree {n}");
            // Degree >= g always has dimension >= 1.
            let got = if *n >= g {
                Ok(Some(false))
            } else {
                verdict(l, g - n, Some(b1), hyperelliptic).map(|v| {
                    v.exists.or_else(|| {
                        v.criteria
                            .iter()
                            .any(|c| c.certifies(*n) && c.conclusion == Conclusion::Exists)
                            .then_some(true)
                    })
                })
            };
            match got {
                Ok(got) => cmp(name, format!("{got:?}"), format!("{:?}", Some(*value))),
                Err(e) => (name, Err(e)),
            }
        }
    }
}

pub fn run_corpus(entries: &[CorpusEntry]) -> CorpusSummary {
    let reports: Vec<VerifyReport> = entries.iter().map(verify_curve).collect();
    let failures = reports.iter().filter(|r| !r.passed).count();
    CorpusSummary { entries: reports.len(), failures, passed: failures == 0, reports }
}

/// Directory of the corpus files shipped with the crate.
pub fn bundled_corpus_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus")
}

pub fn parse_corpus(text: &str) -> Result<Vec<CorpusEntry>> {
    serde_json::from_str(text).map_err(|e| Error::invalid(format!("corpus JSON: {e}")))
}

/// Reads one corpus file, or every `*.json` file of a directory in name
/// order.
pub fn load_corpus(path: &Path) -> Result<Vec<CorpusEntry>> {
    let read = |p: &Path| {
        fs::read_to_string(p).map_err(|e| Error::invalid(format!("{}: {e}", p.display())))
    };
    if path.is_dir() {
        let mut files: Vec<PathBuf> = fs::read_dir(path)
            .map_err(|e| Error::invalid(format!("{}: {e}", path.display())))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "json"))
            .collect();
        files.sort();
        let mut out = Vec::new();
        for f in files {
            out.extend(parse_corpus(&read(&f)?)?);
        }
        Ok(out)
    } else {
        parse_corpus(&read(path)?)
    }
}
