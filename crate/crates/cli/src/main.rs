use std::fs;
use std::io::{self, Write};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use kgred::io::{
    gram_to_csv, gram_to_json, gram_to_latex, metric_from_json, metric_to_json, poly_to_json,
    weyl_to_json, MetricJson,
};
use kgred::poly::apply_box;
use kgred::projector::project_word;
use kgred::rmatrix::{gram_agreement, gram_table, gram_table_on_demand, GramTable};
use kgred::scalars::rat;
use kgred::states::{
    descend_to_constant, harmonic_basis, lift_and_apply, mixed_monomial_sum, ordered_monomial_sum,
    sorted_words, state_explicit, Word,
};
use kgred::zalgebra::{verify_presentation, Status};
use kgred::{Error, Metric, Poly};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

#[derive(Parser, Debug)]
#[command(name = "kgred", version, about = "Harmonic states, their reduction algebra and its Gram form")]
struct Cli {
    /// `euclidean:n`, `minkowski:n`, `random:n`, `random-diagonal:n` or `file:path`
    #[arg(long, global = true, default_value = "euclidean:3")]
    metric: String,
    #[arg(long, global = true, value_enum, default_value_t = Format::Plain)]
    format: Format,
    /// Seed for random metrics and random test data.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Latex,
    Plain,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Suite {
    Relations,
    MonomialLemma,
    DualPath,
    Gram,
    Lift,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Print the state of a word of 1-based indices.
    State { word: Vec<i64> },
    /// Run a property suite and print a JSON report.
    Verify {
        #[arg(value_enum)]
        suite: Suite,
        #[arg(long, default_value_t = 4)]
        max_deg: usize,
        #[arg(long, default_value_t = 4)]
        l: usize,
        #[arg(long, default_value_t = 3)]
        r: usize,
    },
    /// Gram table on the sorted words of length r.
    Gram {
        #[arg(long)]
        r: usize,
        /// Compute entries one at a time instead of from dense tensors.
        #[arg(long)]
        on_demand: bool,
        /// CSV instead of --format.
        #[arg(long)]
        csv: bool,
    },
}

enum Failure {
    Usage(String),
    Property(Value),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn parse_metric(source: &str, seed: u64) -> Result<Metric, Failure> {
    let (kind, arg) = source
        .split_once(':')
        .ok_or_else(|| Failure::Usage(format!("bad metric `{source}`, expected kind:arg")))?;
    if kind == "file" {
        let text = fs::read_to_string(arg).map_err(|e| Failure::Usage(format!("{arg}: {e}")))?;
        let j: MetricJson = serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("{arg}: {e}")))?;
        return Ok(metric_from_json(&j)?);
    }
    let n: usize = arg
        .parse()
        .map_err(|_| Failure::Usage(format!("bad dimension `{arg}`")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(match kind {
        "random" => Metric::random(n, &mut rng)?,
        "random-diagonal" => Metric::random_diagonal(n, &mut rng)?,
        _ => Metric::preset(kind, n)?,
    })
}

fn cmd_state(m: &Metric, word: &[i64], format: Format) -> Result<String, Failure> {
    let w = Word::from_one_based(word)?;
    w.check(m)?;
    let s = state_explicit(m, w.indices())?;
    let b = apply_box(m, &s)?;
    if !b.is_zero() {
        return Err(Failure::Property(json!({
            "word": w,
            "state": poly_to_json(&s),
            "box": poly_to_json(&b),
        })));
    }
    Ok(match format {
        Format::Plain => s.to_string(),
        Format::Latex => s.to_latex(),
        Format::Json => serde_json::to_string_pretty(&json!({ "word": w, "state": poly_to_json(&s) })).unwrap(),
    })
}

#[derive(Serialize)]
struct Check {
    name: String,
    status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness: Option<Value>,
}

impl Check {
    fn value(name: String, witness: Option<Value>) -> Value {
        let status = if witness.is_none() { Status::Pass } else { Status::Fail };
        serde_json::to_value(Check { name, status, witness }).unwrap()
    }
}

fn monomial_lemma(m: &Metric, max_l: usize) -> Result<Vec<Value>, Error> {
    let mut out = Vec::new();
    for l in 0..=max_l {
        let mut cases = 0;
        let mut witness = None;
        'words: for w in sorted_words(m.n(), l) {
            for d in -(l as i64)..=(l as i64) {
                cases += 1;
                let mixed = mixed_monomial_sum(m, &w, d)?;
                let ordered = ordered_monomial_sum(m, &w, d)?;
                if mixed != ordered {
                    witness = Some(json!({
                        "word": Word::new(w.clone()),
                        "d": d,
                        "mixed": weyl_to_json(&mixed),
                        "ordered": weyl_to_json(&ordered),
                    }));
                    break 'words;
                }
            }
        }
        out.push(Check::value(format!("l={l} ({cases} cases)"), witness));
    }
    Ok(out)
}

fn dual_path(m: &Metric, max_l: usize) -> Result<Vec<Value>, Error> {
    let mut out = Vec::new();
    for l in 0..=max_l {
        let words = sorted_words(m.n(), l);
        let mut witness = None;
        for w in &words {
            let s = state_explicit(m, w)?;
            let p = project_word(m, w)?;
            if s != p {
                witness = Some(json!({
                    "word": Word::new(w.clone()),
                    "closed_form": poly_to_json(&s),
                    "projector": poly_to_json(&p),
                }));
                break;
            }
        }
        out.push(Check::value(format!("l={l} ({} words)", words.len()), witness));
    }
    Ok(out)
}

fn gram_suite(m: &Metric, max_r: usize) -> Result<Vec<Value>, Error> {
    let mut out = Vec::new();
    for r in 0..=max_r {
        let rep = gram_agreement(m, r, m.is_diagonal())?;
        let name = format!(
            "r={r} ({} pairs{})",
            rep.pairs,
            if rep.engine_checked { ", engine" } else { "" }
        );
        let witness = (!rep.passed()).then(|| serde_json::to_value(&rep).unwrap());
        out.push(Check::value(name, witness));
    }
    Ok(out)
}

fn lift_suite(m: &Metric, max_deg: usize, seed: u64) -> Result<Vec<Value>, Error> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for d in 0..=max_deg {
        let basis = harmonic_basis(m, d)?;
        let mut witness = None;
        let mut made = 0;
        while made < 25 && witness.is_none() {
            let mut phi = Poly::zero(m.n());
            for b in &basis {
                phi = &phi + &b.scale(&rat(rng.gen_range(-5..=5), rng.gen_range(1..=3)));
            }
            if phi.is_zero() {
                continue;
            }
            made += 1;
            let lifted = lift_and_apply(m, &phi)?;
            let (e, v) = descend_to_constant(&phi)?;
            if lifted != phi || phi.partial_multi(&e) != Poly::constant(m.n(), v) {
                witness = Some(json!({ "phi": poly_to_json(&phi), "lifted": poly_to_json(&lifted) }));
            }
        }
        out.push(Check::value(format!("degree {d} ({made} polynomials)"), witness));
    }
    Ok(out)
}

fn cmd_verify(m: &Metric, suite: Suite, max_deg: usize, l: usize, r: usize, seed: u64) -> Result<String, Failure> {
    let (name, checks) = match suite {
        Suite::Relations => {
            let rep = verify_presentation(m, max_deg)?;
            let checks = rep.iter().map(|c| serde_json::to_value(c).unwrap()).collect();
            ("relations", checks)
        }
        Suite::MonomialLemma => ("monomial-lemma", monomial_lemma(m, l)?),
        Suite::DualPath => ("dual-path", dual_path(m, l)?),
        Suite::Gram => ("gram", gram_suite(m, r)?),
        Suite::Lift => ("lift", lift_suite(m, max_deg, seed)?),
    };
    let passed = checks.iter().all(|c| c["status"] == "pass");
    let report = json!({
        "suite": name,
        "metric": metric_to_json(m),
        "passed": passed,
        "checks": checks,
    });
    if passed {
        Ok(serde_json::to_string_pretty(&report).unwrap())
    } else {
        Err(Failure::Property(report))
    }
}

fn render_gram(g: &GramTable, format: Format) -> String {
    match format {
        Format::Json => serde_json::to_string_pretty(&gram_to_json(g)).unwrap(),
        Format::Latex => gram_to_latex(g),
        Format::Plain => {
            let mut lines = Vec::new();
            for (a, row) in g.words.iter().zip(&g.entries) {
                for (b, e) in g.words.iter().zip(row) {
                    lines.push(format!("{} {} {e}", Word::new(a.clone()), Word::new(b.clone())));
                }
            }
            lines.join("\n")
        }
    }
}

fn cmd_gram(m: &Metric, r: usize, on_demand: bool, csv: bool, format: Format) -> Result<String, Failure> {
    let g = if on_demand {
        gram_table_on_demand(m, r)?
    } else {
        gram_table(m, r).map_err(|e| match e {
            Error::RankTooLarge(_) => Failure::Usage(format!("{e}; rerun with --on-demand")),
            e => e.into(),
        })?
    };
    if csv {
        return Ok(gram_to_csv(&g)?.trim_end().to_string());
    }
    Ok(render_gram(&g, format))
}

fn run(cli: &Cli) -> Result<String, Failure> {
    let m = parse_metric(&cli.metric, cli.seed)?;
    match &cli.cmd {
        Cmd::State { word } => cmd_state(&m, word, cli.format),
        Cmd::Verify { suite, max_deg, l, r } => cmd_verify(&m, *suite, *max_deg, *l, *r, cli.seed),
        Cmd::Gram { r, on_demand, csv } => cmd_gram(&m, *r, *on_demand, *csv, cli.format),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut stdout = io::stdout().lock();
    // a closed pipe is not an error worth reporting
    match run(&cli) {
        Ok(out) => {
            let _ = writeln!(stdout, "{out}");
            ExitCode::SUCCESS
        }
        Err(Failure::Property(w)) => {
            let _ = writeln!(stdout, "{}", serde_json::to_string_pretty(&w).unwrap());
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
