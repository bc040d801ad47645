use std::collections::BTreeMap;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use zerodim::criteria::{kmin, l_q, verdict};
use zerodim::curve::{places_from_points, CurveDescription, CurveModel, PlaceTable};
use zerodim::density::{
    asymptotic_h_estimate, asymptotic_margin, draw_probability, threshold_chain_holds,
    BetaSequence,
};
use zerodim::divisors::DivisorCountTable;
use zerodim::error::{Error, Result};
use zerodim::harness::{bundled_corpus_dir, load_corpus, run_corpus};
use zerodim::hyperelliptic::{dimension_class_table, same_lpoly_distinguisher};
use zerodim::numstr::parse_rational;
use zerodim::zeta::{lpoly_from_counts, validate_lpoly, LPolynomial, LpolyInput, ZetaSummary};

const DIGITS: u32 = 12;

#[derive(Parser)]
#[command(name = "zerodim", version, about = "Dimension-zero divisors on curves over finite fields")]
struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Table,
}

/// A curve description or an L-polynomial, as a file path or inline JSON.
#[derive(Args)]
#[group(required = true, multiple = false)]
struct Input {
    #[arg(long)]
    curve: Option<String>,
    #[arg(long)]
    lpoly: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// L-polynomial, class number, p-rank and the class number floor.
    Lpoly(#[command(flatten)] Input),
    /// Point and place counts up to a degree.
    Places {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        max_degree: usize,
    },
    /// Effective divisor counts A_0..A_n.
    Counts {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        n: usize,
        /// Count from the places instead of the L coefficients.
        #[arg(long)]
        oracle: bool,
    },
    /// Every existence criterion at degree g - k.
    Exists {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        k: usize,
        /// Number of rational places; read off the curve when omitted.
        #[arg(long)]
        b1: Option<u64>,
        /// Treat an L-polynomial input as coming from a hyperelliptic field.
        #[arg(long)]
        hyperelliptic: bool,
    },
    /// Exact dimension-class counts at degree g - k for hyperelliptic fields.
    Exact {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        hyperelliptic: bool,
    },
    /// Lower bound on the chance that a random class of degree g - k has dimension zero.
    Density {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        k: usize,
    },
    /// Leading-term estimates for a family with place densities beta.
    Asymptotic {
        #[arg(long)]
        q: u64,
        /// Densities as "m:value,...", e.g. "1:1/10,2:1/20".
        #[arg(long)]
        beta: String,
        #[arg(long)]
        g: u64,
        #[arg(long, requires = "l")]
        epsilon: Option<String>,
        #[arg(long, requires = "epsilon")]
        l: Option<String>,
    },
    /// Run the verification pipeline over a corpus.
    Verify {
        /// Corpus file or directory; defaults to the bundled corpus.
        #[arg(long)]
        corpus: Option<PathBuf>,
    },
    /// Least k for which the general criterion applies over F_q.
    Kmin {
        #[arg(long)]
        q: u64,
    },
}

enum Loaded {
    Curve(Box<CurveModel>),
    Lpoly(LPolynomial),
}

impl Loaded {
    fn lpoly(&self) -> Result<LPolynomial> {
        match self {
            Loaded::Curve(c) => {
                let n = c.place_counts(c.genus().max(1))?;
                lpoly_from_counts(c.q(), c.genus(), &n.n_counts)
            }
            Loaded::Lpoly(l) => Ok(l.clone()),
        }
    }

    fn places(&self, max_degree: usize) -> Result<PlaceTable> {
        match self {
            Loaded::Curve(c) => c.place_counts(max_degree),
            Loaded::Lpoly(l) => {
                let n: Vec<u64> = l
                    .predicted_counts(max_degree)
                    .iter()
                    .map(|v| u64::try_from(v).map_err(|_| Error::invalid(format!("count {v} out of range"))))
                    .collect::<Result<_>>()?;
                Ok(PlaceTable::from_place_counts(l.q(), places_from_points(&n)?))
            }
        }
    }

    fn is_curve(&self) -> bool {
        matches!(self, Loaded::Curve(_))
    }
}

fn read_source(text: &str) -> Result<String> {
    if text.trim_start().starts_with('{') {
        return Ok(text.to_string());
    }
    fs::read_to_string(text).map_err(|e| Error::invalid(format!("{text}: {e}")))
}

fn load(input: &Input) -> Result<Loaded> {
    if let Some(c) = &input.curve {
        let desc: CurveDescription = serde_json::from_str(&read_source(c)?)
            .map_err(|e| Error::invalid(format!("curve JSON: {e}")))?;
        return Ok(Loaded::Curve(Box::new(CurveModel::from_description(&desc)?)));
    }
    let text = read_source(input.lpoly.as_deref().expect("clap enforces one input"))?;
    let parsed: LpolyInput =
        serde_json::from_str(&text).map_err(|e| Error::invalid(format!("L-polynomial JSON: {e}")))?;
    let l = LPolynomial::from_input(&parsed)?;
    let diag = validate_lpoly(&l);
    if !diag.passed() {
        return Err(Error::invalid(format!("L-polynomial fails {}", diag.failures().join(", "))));
    }
    Ok(Loaded::Lpoly(l))
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable output")
}

fn run(command: &Command) -> Result<(Value, bool)> {
    let ok = |v: Value| Ok((v, true));
    match command {
        Command::Lpoly(input) => ok(to_value(&ZetaSummary::new(&load(input)?.lpoly()?)?)),
        Command::Places { input, max_degree } => {
            if *max_degree == 0 {
                return Err(Error::invalid("--max-degree must be at least 1"));
            }
            ok(to_value(&load(input)?.places(*max_degree)?))
        }
        Command::Counts { input, n, oracle } => {
            let loaded = load(input)?;
            let l = loaded.lpoly()?;
            let table = if *oracle {
                let places = loaded.places((*n).max(1))?;
                let table = DivisorCountTable::oracle(&places, l.genus(), *n)?;
                if table.counts != DivisorCountTable::series(&l, *n).counts {
                    return Err(Error::consistency("oracle and series counts disagree"));
                }
                table
            } else {
                DivisorCountTable::series(&l, *n)
            };
            ok(to_value(&table))
        }
        Command::Exists { input, k, b1, hyperelliptic } => {
            let loaded = load(input)?;
            let l = loaded.lpoly()?;
            let b1 = match b1 {
                Some(b) => Some(*b),
                None if loaded.is_curve() => loaded.places(1)?.b1(),
                None => None,
            };
            let hyper = *hyperelliptic || loaded.is_curve();
            ok(to_value(&verdict(&l, *k, b1, hyper)?))
        }
        Command::Exact { input, k, hyperelliptic } => {
            let loaded = load(input)?;
            let l = loaded.lpoly()?;
            let hyper = *hyperelliptic || loaded.is_curve();
            let report = same_lpoly_distinguisher(&l, *k, hyper)?;
            let table = if hyper { Some(dimension_class_table(&l, report.n)?) } else { None };
            ok(json!({ "report": to_value(&report), "classes": to_value(&table) }))
        }
        Command::Density { q, k } => {
            let p = draw_probability(*q, *k)?;
            let l = l_q(*q, *k);
            ok(json!({
                "q": q,
                "k": k,
                "l_q": l.to_string(),
                "l_q_decimal": l.to_decimal(DIGITS),
                "probability": p.to_string(),
                "probability_decimal": p.to_decimal(DIGITS),
            }))
        }
        Command::Asymptotic { q, beta, g, epsilon, l } => {
            let beta = BetaSequence::parse(*q, beta)?;
            let base = json!({
                "q": q,
                "g": g,
                "weil_sum": beta.weil_sum().to_string(),
                "threshold": beta.threshold().to_string(),
                "threshold_chain": threshold_chain_holds(&beta),
                "log_q_h": to_value(&asymptotic_h_estimate(&beta, *g)),
            });
            match (epsilon, l) {
                (Some(e), Some(l)) => {
                    let report = asymptotic_margin(&beta, &parse_rational(e)?, &parse_rational(l)?, *g)?;
                    let mut v = to_value(&report);
                    v["weil_sum"] = base["weil_sum"].clone();
                    v["threshold_chain"] = base["threshold_chain"].clone();
                    ok(v)
                }
                _ => ok(base),
            }
        }
        Command::Verify { corpus } => {
            let path = corpus.clone().unwrap_or_else(bundled_corpus_dir);
            let summary = run_corpus(&load_corpus(&path)?);
            let passed = summary.passed;
            Ok((to_value(&summary), passed))
        }
        Command::Kmin { q } => {
            let k = kmin(*q)?;
            let l = l_q(*q, k);
            ok(json!({
                "q": q,
                "kmin": k,
                "l_q": l.to_string(),
                "l_q_decimal": l.to_decimal(DIGITS),
            }))
        }
    }
}

/// Flattens nested objects into dotted keys, one aligned row each.
fn table(v: &Value) -> String {
    fn walk(prefix: &str, v: &Value, rows: &mut BTreeMap<String, String>, order: &mut Vec<String>) {
        let mut put = |k: String, s: String| {
            order.push(k.clone());
            rows.insert(k, s);
        };
        match v {
            Value::Object(m) => {
                for (k, x) in m {
                    let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                    walk(&key, x, rows, order);
                }
            }
            Value::Array(xs) if xs.is_empty() => put(prefix.to_string(), "-".into()),
            Value::Array(xs) if xs.iter().all(|x| !x.is_object() && !x.is_array()) => {
                put(prefix.to_string(), xs.iter().map(scalar).collect::<Vec<_>>().join(" "))
            }
            Value::Array(xs) => {
                for (i, x) in xs.iter().enumerate() {
                    walk(&format!("{prefix}[{i}]"), x, rows, order);
                }
            }
            other => put(prefix.to_string(), scalar(other)),
        }
    }
    fn scalar(v: &Value) -> String {
        match v {
            Value::String(s) => s.clone(),
            Value::Null => "-".into(),
            other => other.to_string(),
        }
    }
    let mut rows = BTreeMap::new();
    let mut order = Vec::new();
    walk("", v, &mut rows, &mut order);
    let width = order.iter().map(|k| k.len()).max().unwrap_or(0);
    order
        .iter()
        .map(|k| format!("{k:<width$}  {}\n", rows[k]))
        .collect()
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli.command) {
        Ok((value, passed)) => {
            match cli.format {
                Format::Json => println!("{}", serde_json::to_string_pretty(&value).expect("valid JSON")),
                Format::Table => print!("{}", table(&value)),
            }
            if passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(2)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_consistency() { 2 } else { 1 })
        }
    }
}
