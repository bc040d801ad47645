//! Acceptance checks, one line each. Runs as a plain binary so the lines
//! show up in ordinary `cargo test` output; exits non-zero on any failure.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_bigint::BigInt;

use zerodim::criteria::{coefficient_sum_bound, kmin, l_q, general_bound, general_bound_value};
use zerodim::curve::{parse_curve, CurveModel};
use zerodim::density::draw_probability;
use zerodim::divisors::effective_count_series;
use zerodim::harness::{
    bundled_corpus_dir, load_corpus, verify_curve, verify_with_fault, CorpusEntry, Fault,
    VerifyReport,
};
use zerodim::hyperelliptic::h_n0_via_sum;
use zerodim::quadratic::AlgebraicNumber;
use zerodim::zeta::{class_number_floor, lpoly_from_counts, LPolynomial};

type Outcome = Result<String, String>;
/// Name, time budget in milliseconds, check.
type Criterion = (&'static str, u64, fn() -> Outcome);

fn big(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

fn lpoly_of(json: &str) -> Result<LPolynomial, String> {
    let c: CurveModel = parse_curve(json).map_err(|e| e.to_string())?;
    let n = c.place_counts(c.genus()).map_err(|e| e.to_string())?;
    lpoly_from_counts(c.q(), c.genus(), &n.n_counts).map_err(|e| e.to_string())
}

/// Collects sub-checks, failing the whole criterion if any one fails.
struct Tally {
    notes: Vec<String>,
    failed: Vec<String>,
}

impl Tally {
    fn new() -> Self {
        Tally { notes: Vec::new(), failed: Vec::new() }
    }

    fn eq<T: PartialEq + std::fmt::Display>(&mut self, what: &str, got: T, want: T) {
        if got == want {
            self.notes.push(format!("{what} = {got}"));
        } else {
            self.failed.push(format!("{what} = {got}, expected {want}"));
        }
    }

    fn holds(&mut self, what: &str, ok: bool) {
        if ok {
            self.notes.push(what.to_string());
        } else {
            self.failed.push(format!("not {what}"));
        }
    }

    fn finish(self) -> Outcome {
        if self.failed.is_empty() {
            Ok(self.notes.join("; "))
        } else if self.notes.is_empty() {
            Err(self.failed.join("; "))
        } else {
            Err(format!("{} (holding: {})", self.failed.join("; "), self.notes.join("; ")))
        }
    }
}

fn lpoly_reproduction() -> Outcome {
    let l = lpoly_of(r#"{"q": 2, "h": [1], "f": [1, 0, 0, 0, 0, 0, 1, 1]}"#)?;
    let want = big(&[1, -2, 2, -2, 4, -8, 8]);
    if l.coeffs() == want.as_slice() {
        Ok("y^2 + y = x^7 + x^6 + 1 gives 1 - 2t + 2t^2 - 2t^3 + 4t^4 - 8t^5 + 8t^6".into())
    } else {
        Err(format!("got {:?}", l.coeffs()))
    }
}

fn stated_values() -> Outcome {
    let f1 = lpoly_of(r#"{"q": 2, "h": [0, 1, 0, 1, 1], "f": [1, 0, 0, 0, 0, 0, 1, 0, 0, 0, 1]}"#)?;
    let f2 = lpoly_of(r#"{"q": 2, "h": [0, 0, 1, 1, 1], "f": [0, 0, 0, 1, 0, 0, 0, 1, 0, 0, 1]}"#)?;
    let mut t = Tally::new();
    t.eq("F_1 h", f1.class_number(), BigInt::from(8));
    t.eq("F_1 A_2", effective_count_series(&f1, 2), BigInt::from(9));
    t.eq("F_2 h", f2.class_number(), BigInt::from(10));
    t.eq("F_2 A_3", effective_count_series(&f2, 3), BigInt::from(13));
    t.holds("F_1 ordinary", f1.is_ordinary());
    t.holds("F_2 ordinary", f2.is_ordinary());
    t.notes.push(format!("computed genera {} and {}", f1.genus(), f2.genus()));
    t.finish()
}

fn small_genus() -> Outcome {
    let mut t = Tally::new();
    let e = lpoly_of(r#"{"q": 3, "f": [2, 2, 0, 1]}"#)?;
    t.eq("h(y^2 = x^3 + 2x + 2)", e.class_number(), BigInt::from(1));
    let x5 = lpoly_of(r#"{"q": 2, "h": [1], "f": [1, 0, 0, 1, 0, 1]}"#)?;
    t.eq("h(y^2 + y = x^5 + x^3 + 1)", x5.class_number(), BigInt::from(1));
    let exact = |l: &LPolynomial, n| h_n0_via_sum(l, n).map_err(|e| e.to_string());
    t.eq("its h_(1,0)", exact(&x5, 1)?, BigInt::from(0));
    t.eq("its h_(0,0)", exact(&x5, 0)?, BigInt::from(0));
    let r = lpoly_of(r#"{"q": 2, "h": [1], "f": {"num": [1, 1, 0, 0, 1], "den": [0, 1]}}"#)?;
    t.eq("h_(1,0) of y^2 + y = (x^4 + x + 1)/x", exact(&r, 1)?, BigInt::from(0));
    t.finish()
}

fn kmin_thresholds() -> Outcome {
    let mut t = Tally::new();
    let k = |q| kmin(q).map_err(|e| e.to_string());
    t.eq("kmin(2)", k(2)?, 5);
    t.eq("kmin(3)", k(3)?, 2);
    for q in [4, 5, 7, 8, 9, 16, 25, 256] {
        t.eq(&format!("kmin({q})"), k(q)?, 1);
    }
    let within = |x: AlgebraicNumber, lo: i64, hi: i64| {
        x >= AlgebraicNumber::from_ratio(lo, 100) && x < AlgebraicNumber::from_ratio(hi, 100)
    };
    t.holds(&format!("l_2(5) = {} in [1.37, 1.38)", l_q(2, 5).to_decimal(6)), within(l_q(2, 5), 137, 138));
    t.holds(&format!("l_3(2) = {} in [1.85, 1.86)", l_q(3, 2).to_decimal(6)), within(l_q(3, 2), 185, 186));
    t.finish()
}

fn probabilities() -> Outcome {
    let mut t = Tally::new();
    let p = |q, k| draw_probability(q, k).map_err(|e| e.to_string());
    t.eq("p(16, 3)", p(16, 3)?, AlgebraicNumber::from_ratio(287, 288));
    t.eq("p(256, 1)", p(256, 1)?, AlgebraicNumber::from_ratio(224, 225));
    t.holds("both rational", p(16, 3)?.is_rational() && p(256, 1)?.is_rational());
    t.finish()
}

fn descent_bounds() -> Outcome {
    let l = LPolynomial::new(3, 3, big(&[1, 0, 9, 0])).map_err(|e| e.to_string())?;
    let mut t = Tally::new();
    t.eq("h", l.class_number(), BigInt::from(64));
    let bound = |k| -> Result<String, String> {
        let c = coefficient_sum_bound(&l, k).map_err(|e| e.to_string())?;
        Ok(c.bound.map_or("none".into(), |b| b.to_string()))
    };
    t.eq("coefficient-sum bound on h_(2,0)", bound(1)?, "42".to_string());
    t.eq("coefficient-sum bound on h_(1,0)", bound(2)?, "60".to_string());
    let general = general_bound(&l, 2).map_err(|e| e.to_string())?;
    let general = general.bound.ok_or("general criterion certified nothing")?;
    t.holds(
        &format!("general bound on h_(1,0) is {general}, not the recorded 12"),
        general != BigInt::from(12),
    );
    t.finish()
}

fn corpus() -> Result<Vec<CorpusEntry>, String> {
    load_corpus(&bundled_corpus_dir()).map_err(|e| e.to_string())
}

/// Requires the named checks to be present and passing in every report.
fn checks_pass(reports: &[VerifyReport], names: &[&str]) -> Outcome {
    let mut bad = Vec::new();
    let mut seen = 0;
    for r in reports {
        for name in names {
            match r.checks.iter().find(|c| c.name == *name) {
                Some(c) if c.passed => seen += 1,
                Some(c) => bad.push(format!("{}: {} ({})", r.label, name, c.detail)),
                None => bad.push(format!("{}: {} missing", r.label, name)),
            }
        }
    }
    if bad.is_empty() {
        Ok(format!("{seen} checks over {} entries", reports.len()))
    } else {
        Err(bad.join("; "))
    }
}

fn oracle_equivalence() -> Outcome {
    let reports: Vec<_> = corpus()?.iter().map(verify_curve).collect();
    checks_pass(
        &reports,
        &["place_counts", "lpoly_oracle", "count_symmetry", "central_value", "three_way_counts"],
    )
}

fn hyperelliptic_exactness() -> Outcome {
    let reports: Vec<_> = corpus()?
        .iter()
        .filter(|e| e.hyperelliptic || matches!(e.input, zerodim::harness::EntryInput::Curve(_)))
        .map(verify_curve)
        .collect();
    checks_pass(&reports, &["hyperelliptic_exact"])
}

fn bound_soundness() -> Outcome {
    let entries = corpus()?;
    let hyper: Vec<_> = entries
        .iter()
        .filter(|e| e.hyperelliptic || matches!(e.input, zerodim::harness::EntryInput::Curve(_)))
        .map(verify_curve)
        .collect();
    let sound = checks_pass(&hyper, &["bound_soundness"])?;
    let mut injected = 0;
    let mut missed = Vec::new();
    for e in &entries {
        let Some(g) = verify_curve(e).genus else {
            return Err(format!("{}: no genus", e.label));
        };
        for index in 0..=2 * g {
            for delta in [-2, -1, 1, 2] {
                injected += 1;
                if verify_with_fault(e, Some(Fault { index, delta })).passed {
                    missed.push(format!("{} a_{index} {delta:+}", e.label));
                }
            }
        }
    }
    if missed.is_empty() {
        Ok(format!("{sound}; {injected} injected faults all caught"))
    } else {
        Err(format!("undetected faults: {}", missed.join(", ")))
    }
}

fn large_genus_gap() -> Outcome {
    let mut cases = 0;
    for q in [2u64, 3, 4] {
        for g in 21..=40 {
            let h = class_number_floor(q, g).map_err(|e| e.to_string())?;
            let bound = general_bound_value(q, g, g, &h).map_err(|e| e.to_string())?;
            if &h - 1 <= bound {
                return Err(format!("q = {q}, g = {g}: h - 1 = {} <= {bound}", &h - 1));
            }
            cases += 1;
        }
    }
    Ok(format!("h - 1 exceeds the general bound in all {cases} cases"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("L-polynomial reproduction", 100, lpoly_reproduction),
        ("stated class numbers and effective counts of F_1, F_2", 2000, stated_values),
        ("small-genus exceptional cases", 500, small_genus),
        ("kmin thresholds", 100, kmin_thresholds),
        ("exact draw probabilities", 100, probabilities),
        ("Hermitian descent bounds", 100, descent_bounds),
        ("oracle equivalence", 5000, oracle_equivalence),
        ("hyperelliptic exactness", 1000, hyperelliptic_exactness),
        ("bound soundness and fault detection", 2000, bound_soundness),
        ("general bound versus h - 1 for g > 20", 500, large_genus_gap),
    ];
    let mut failures = 0;
    let total = Instant::now();
    for (i, (name, budget_ms, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let elapsed = start.elapsed();
        let slow = elapsed > Duration::from_millis(*budget_ms);
        let (tag, detail) = match (&outcome, slow) {
            (Ok(d), false) => ("PASS", d.clone()),
            (Ok(d), true) => ("FAIL", format!("over the {budget_ms} ms budget; {d}")),
            (Err(d), _) => ("FAIL", d.clone()),
        };
        if tag == "FAIL" {
            failures += 1;
        }
        println!("{tag} {:>2} {name} [{:.3} s]: {detail}", i + 1, elapsed.as_secs_f64());
    }
    println!(
        "{} of {} criteria passed in {:.3} s",
        criteria.len() - failures,
        criteria.len(),
        total.elapsed().as_secs_f64()
    );
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
