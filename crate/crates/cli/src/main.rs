use std::collections::BTreeMap;
use std::fmt::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use archproof::dsl::{parse_architecture_with, parse_query_for};
use archproof::leakage::{Experiment, ExperimentRow};
use archproof::prover::{derive_with, explain, ProverConfig, ProverError};
use archproof::report::{corpus_table, expected_table};
use archproof::semantics::{
    covering_trace, eval_property_semantic, format_trace, is_compatible, sample_traces, SemanticBudget,
    SemanticOutcome,
};
use archproof::{check_consistency, Architecture};
use clap::{Parser, Subcommand};
use serde_json::json;

mod json_out;

const OK: u8 = 0;
const NEGATIVE: u8 = 1;
const INPUT: u8 = 2;
const BUDGET: u8 = 3;

#[derive(Parser)]
#[command(name = "archproof", version, about = "Privacy architecture checker")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse an architecture and check its consistency.
    Check {
        path: PathBuf,
        #[arg(long, value_delimiter = ',')]
        param: Vec<String>,
        #[arg(long)]
        json: bool,
    },
    /// Decide a property with the privacy logic.
    Prove {
        path: PathBuf,
        query: String,
        #[arg(long, value_delimiter = ',')]
        param: Vec<String>,
        /// Print the derivation.
        #[arg(long)]
        explain: bool,
        #[arg(long)]
        json: bool,
    },
    /// Execute the architecture: covering trace, samples, or a semantic check.
    Simulate {
        path: PathBuf,
        #[arg(long, value_delimiter = ',')]
        param: Vec<String>,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 40)]
        max_len: usize,
        /// Property to evaluate against executions.
        #[arg(long)]
        eval: Option<String>,
        #[arg(long)]
        json: bool,
    },
    /// Access table of the four verification architectures.
    Corpus {
        #[arg(long)]
        json: bool,
    },
    /// Run the quantization attack and print one CSV row per seed.
    Attack {
        #[arg(long = "N", default_value_t = 8)]
        n: usize,
        #[arg(long = "Q", default_value_t = 16)]
        q: usize,
        #[arg(long = "C", default_value_t = 2)]
        c: usize,
        #[arg(long, default_value_t = 256)]
        budget: u64,
        /// Queries between two permutations of the database labels.
        #[arg(long = "B")]
        b: Option<u64>,
        /// Number of permutation epochs; overrides --budget when --B is set.
        #[arg(long)]
        epochs: Option<u64>,
        #[arg(long, default_value_t = 20)]
        seeds: u64,
    },
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Failure {
            code: INPUT,
            message: message.into(),
        }
    }
}

impl From<ProverError> for Failure {
    fn from(e: ProverError) -> Self {
        let code = match e {
            ProverError::BudgetExceeded { .. } => BUDGET,
            ProverError::InvalidQuery(_) => INPUT,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

type Outcome = Result<(String, u8), Failure>;

fn params(raw: &[String]) -> Result<BTreeMap<String, u64>, Failure> {
    raw.iter()
        .filter(|s| !s.is_empty())
        .map(|s| {
            let (k, v) = s
                .split_once('=')
                .ok_or_else(|| Failure::input(format!("parameter `{s}` is not of the form name=value")))?;
            let v = v
                .trim()
                .parse::<u64>()
                .map_err(|_| Failure::input(format!("parameter `{k}` needs a natural number, got `{v}`")))?;
            Ok((k.trim().to_owned(), v))
        })
        .collect()
}

fn load(path: &Path, raw: &[String]) -> Result<Architecture, Failure> {
    let text =
        std::fs::read_to_string(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    parse_architecture_with(&text, &params(raw)?).map_err(|e| Failure::input(format!("{}:{e}", path.display())))
}

fn check(path: &Path, raw: &[String], as_json: bool) -> Outcome {
    let a = load(path, raw)?;
    let r = check_consistency(&a);
    let code = if r.is_consistent() { OK } else { NEGATIVE };
    let out = if as_json {
        let v = json!({
            "consistent": r.is_consistent(),
            "bound": r.bound.map(|b| b.to_string()),
            "violations": r.violations.iter().map(ToString::to_string).collect::<Vec<_>>(),
        });
        json_out::pretty(&v)
    } else {
        r.to_string()
    };
    Ok((out, code))
}

fn prove(path: &Path, query: &str, raw: &[String], show: bool, as_json: bool) -> Outcome {
    let a = load(path, raw)?;
    let q = parse_query_for(query, &a).map_err(|e| Failure::input(format!("query:{e}")))?;
    let v = derive_with(&a, &q, ProverConfig::from_env())?;
    let code = if v.derivable { OK } else { NEGATIVE };
    let out = if as_json {
        json_out::pretty(&json_out::verdict(&v, show))
    } else if show {
        explain(&v)
    } else {
        format!(
            "query: {}\nverdict: {}\n",
            v.query,
            if v.derivable { "derivable" } else { "not derivable" }
        )
    };
    Ok((out, code))
}

struct SimArgs<'a> {
    samples: Option<usize>,
    seed: u64,
    max_len: usize,
    eval: Option<&'a str>,
    json: bool,
}

fn simulate(path: &Path, raw: &[String], s: SimArgs<'_>) -> Outcome {
    let a = load(path, raw)?;
    if let Some(query) = s.eval {
        let q = parse_query_for(query, &a).map_err(|e| Failure::input(format!("query:{e}")))?;
        let budget = SemanticBudget {
            samples: s.samples.unwrap_or(SemanticBudget::default().samples),
            max_len: s.max_len,
            seed: s.seed,
            ..SemanticBudget::default()
        };
        let v = eval_property_semantic(&a, &q, &budget);
        let code = match v.outcome {
            SemanticOutcome::Witnessed | SemanticOutcome::WitnessedUpToBudget => OK,
            SemanticOutcome::Refuted => NEGATIVE,
            SemanticOutcome::Inconclusive => BUDGET,
        };
        let out = if s.json {
            json_out::pretty(&json!({
                "query": q.to_string(),
                "outcome": v.outcome.to_string(),
                "samples": budget.samples,
                "seed": budget.seed,
                "trace": v.trace.as_ref().map(|t| json_out::trace(t)),
            }))
        } else {
            let mut out = format!("query: {q}\noutcome: {}\n", v.outcome);
            if let Some(t) = &v.trace {
                out.push_str("trace:\n");
                out.push_str(&format_trace(t));
            }
            out
        };
        return Ok((out, code));
    }
    let traces = match s.samples {
        Some(k) => sample_traces(&a, k, s.max_len, s.seed),
        None => vec![covering_trace(&a).map_err(|e| Failure {
            code: NEGATIVE,
            message: e.to_string(),
        })?],
    };
    if traces.iter().any(|t| is_compatible(&a, t).is_err()) {
        return Err(Failure {
            code: NEGATIVE,
            message: "generated an incompatible trace".into(),
        });
    }
    let out = if s.json {
        json_out::pretty(&json!({ "traces": traces.iter().map(|t| json_out::trace(t)).collect::<Vec<_>>() }))
    } else {
        let mut out = String::new();
        for (i, t) in traces.iter().enumerate() {
            let _ = writeln!(out, "# trace {}", i + 1);
            out.push_str(&format_trace(t));
        }
        out
    };
    Ok((out, OK))
}

fn corpus(as_json: bool) -> Outcome {
    let rows = corpus_table()?;
    let matches = rows == expected_table();
    let code = if matches { OK } else { NEGATIVE };
    let out = if as_json {
        json_out::pretty(&json!({
            "rows": rows.iter().map(json_out::row).collect::<Vec<_>>(),
            "matches_reference": matches,
        }))
    } else {
        let mut out = String::new();
        for r in &rows {
            let _ = writeln!(out, "{r}");
        }
        let _ = writeln!(out, "matches reference: {}", if matches { "yes" } else { "no" });
        out
    };
    Ok((out, code))
}

fn attack(e: Experiment, seeds: u64) -> Outcome {
    let mut out = format!("{}\n", ExperimentRow::HEADER);
    let mut accs = Vec::new();
    for seed in 0..seeds {
        let r = e.run(seed).map_err(|err| Failure::input(err.to_string()))?;
        accs.push(r.accuracy);
        let _ = writeln!(out, "{r}");
    }
    if !accs.is_empty() {
        let m = e.median_accuracy(seeds).map_err(|err| Failure::input(err.to_string()))?;
        let _ = writeln!(out, "# median accuracy {m:.4}");
    }
    Ok((out, OK))
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Check { path, param, json } => check(&path, &param, json),
        Command::Prove {
            path,
            query,
            param,
            explain,
            json,
        } => prove(&path, &query, &param, explain, json),
        Command::Simulate {
            path,
            param,
            samples,
            seed,
            max_len,
            eval,
            json,
        } => simulate(
            &path,
            &param,
            SimArgs {
                samples,
                seed,
                max_len,
                eval: eval.as_deref(),
                json,
            },
        ),
        Command::Corpus { json } => corpus(json),
        Command::Attack {
            n,
            q,
            c,
            budget,
            b,
            epochs,
            seeds,
        } => {
            if n == 0 || q == 0 || c == 0 || c > n || b == Some(0) {
                return Err(Failure::input("need N >= 1, Q >= 1, 1 <= C <= N and B >= 1"));
            }
            let budget = match (b, epochs) {
                (Some(b), Some(e)) => b * e,
                _ => budget,
            };
            attack(Experiment { n, q, c, budget, b }, seeds)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok((out, code)) => {
            print!("{out}");
            ExitCode::from(code)
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
