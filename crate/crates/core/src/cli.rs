//! Command-line front end.
//!
//! Each run prints one JSON document: the result's fields plus a `config`
//! object recording the invocation, so the output says how to reproduce it.
//! Keys are sorted and rationals are `"num/den"` strings, which makes the
//! output byte-stable for a given invocation.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::beliefs::hierarchy_distribution;
use crate::counterexample::{
    build_g_p, build_u_l, check_ui, decode_tuple, default_epsilon, event_e_check, hoeffding_experiment,
    induction_constants, sample_chain, stirling_check, u_l_support_size, ui_formula_crosscheck, verify_separation,
    alpha, ChainSpec, CrosscheckScope, DEFAULT_BUDGET,
};
use crate::distance::{compare, value_distance, witness_payoff};
use crate::error::Error;
use crate::exactlp::Rational;
use crate::game_value::bayesian_value;
use crate::structures::{InfoStructure, PayoffStructure};
use crate::weak_metric::weak_distance;

pub const BUDGET_ENV: &str = "INFOSTRUCT_BUDGET";

const AFTER_HELP: &str = "\
Environment:
  INFOSTRUCT_BUDGET  work-unit cap for exhaustive scans and LP solves (same as --budget;
                     default 50000000). Runs that would exceed it are refused.

Exit status:
  0  success
  1  malformed input, invariant violation or other domain error
  2  refused because the budget is too small";

#[derive(Debug, Parser)]
#[command(name = "infostruct", version, about = "Exact values, distances and belief hierarchies of finite information structures")]
#[command(after_help = AFTER_HELP)]
pub struct Cli {
    /// Work-unit cap for exhaustive scans and LP solves
    #[arg(long, global = true, env = BUDGET_ENV)]
    pub budget: Option<u128>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write the document to this file instead of stdout
    #[arg(short, long, global = true)]
    pub output: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    /// One `key: value` line per top-level field
    Human,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Value of the Bayesian game with optimal strategies
    Value { u: PathBuf, g: PathBuf },
    /// Value-based distance with the optimal garblings of both directions
    Distance {
        u: PathBuf,
        v: PathBuf,
        /// Also write a payoff structure attaining the forward deviation
        #[arg(long)]
        witness: Option<PathBuf>,
    },
    /// Informativeness order with garbling witnesses
    Compare { u: PathBuf, v: PathBuf },
    /// Joint law of the state and both players' beliefs of the given order
    Beliefs {
        u: PathBuf,
        #[arg(long)]
        order: usize,
    },
    /// Bracket on the weak distance from its first terms
    Weakdist {
        u: PathBuf,
        v: PathBuf,
        #[arg(long)]
        terms: u64,
    },
    /// Markov-chain structures
    #[command(subcommand)]
    Cx(Cx),
}

#[derive(Debug, Subcommand)]
pub enum Cx {
    /// Sample a chain with N states
    Sample {
        #[arg(long = "n")]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Exhaustive check of the incentive conditions up to level lmax
    CheckUi {
        chain: PathBuf,
        #[arg(long)]
        lmax: usize,
        /// Violations listed per condition; the level counts are always complete
        #[arg(long, default_value_t = 20)]
        max_listed: usize,
    },
    /// Information structure of the first l rounds
    BuildU {
        chain: PathBuf,
        #[arg(long)]
        l: usize,
    },
    /// Reporting payoff structure for p rounds
    BuildG {
        chain: PathBuf,
        #[arg(long)]
        p: usize,
        /// Defaults to 1/(10(N+1)^2 + 1)
        #[arg(long)]
        epsilon: Option<Rational>,
    },
    /// Exact value of the reporting game against its bound
    Verify {
        chain: PathBuf,
        #[arg(long)]
        l: usize,
        #[arg(long)]
        p: usize,
        #[arg(long)]
        epsilon: Option<Rational>,
    },
    /// Monte Carlo tails of the overlap statistics
    Hoeffding {
        #[arg(long = "n")]
        n: usize,
        #[arg(long)]
        gamma: Rational,
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Conditional probabilities against their closed forms
    Crosscheck {
        chain: PathBuf,
        #[arg(long)]
        lmax: usize,
        /// Sample this many random cases instead of enumerating
        #[arg(long)]
        cases: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Scan of the overlap event over all index tuples (sampled past the budget)
    EventE {
        chain: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Step margins of the backward induction
    Constants {
        /// Defaults to 1/25
        #[arg(long)]
        alpha: Option<Rational>,
    },
    /// Exact check of the factorial bounds for n = 1..=nmax
    Stirling {
        #[arg(long, default_value_t = 50)]
        nmax: u32,
    },
    /// Signal tuple of a tuple id
    Decode {
        #[arg(long = "n")]
        n: usize,
        #[arg(long)]
        len: usize,
        id: usize,
    },
}

/// Everything needed to repeat a run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunConfig {
    pub subcommand: String,
    pub inputs: Vec<String>,
    pub output: Option<String>,
    pub flags: BTreeMap<String, String>,
    pub budget: u128,
    pub format: Format,
}

#[derive(Debug)]
pub enum CliError {
    Domain(String),
    Budget(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Domain(_) => 1,
            CliError::Budget(_) => 2,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Domain(m) | CliError::Budget(m) => f.write_str(m),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::BudgetExceeded { .. } => CliError::Budget(e.to_string()),
            _ => CliError::Domain(e.to_string()),
        }
    }
}

fn path_str(p: &Path) -> String {
    p.display().to_string()
}

fn flags<const K: usize>(pairs: [(&str, Option<String>); K]) -> BTreeMap<String, String> {
    pairs.into_iter().filter_map(|(k, v)| v.map(|v| (k.to_string(), v))).collect()
}

impl Cli {
    pub fn config(&self) -> RunConfig {
        let s = |x: &dyn ToString| Some(x.to_string());
        let (subcommand, inputs, flags) = match &self.command {
            Command::Value { u, g } => ("value", vec![u, g], BTreeMap::new()),
            Command::Distance { u, v, witness } => {
                ("distance", vec![u, v], flags([("witness", witness.as_deref().map(path_str))]))
            }
            Command::Compare { u, v } => ("compare", vec![u, v], BTreeMap::new()),
            Command::Beliefs { u, order } => ("beliefs", vec![u], flags([("order", s(order))])),
            Command::Weakdist { u, v, terms } => ("weakdist", vec![u, v], flags([("terms", s(terms))])),
            Command::Cx(cx) => match cx {
                Cx::Sample { n, seed } => ("cx sample", vec![], flags([("n", s(n)), ("seed", s(seed))])),
                Cx::CheckUi { chain, lmax, max_listed } => {
                    ("cx check-ui", vec![chain], flags([("lmax", s(lmax)), ("max_listed", s(max_listed))]))
                }
                Cx::BuildU { chain, l } => ("cx build-u", vec![chain], flags([("l", s(l))])),
                Cx::BuildG { chain, p, epsilon } => {
                    ("cx build-g", vec![chain], flags([("p", s(p)), ("epsilon", epsilon.as_ref().map(|e| e.to_string()))]))
                }
                Cx::Verify { chain, l, p, epsilon } => (
                    "cx verify",
                    vec![chain],
                    flags([("l", s(l)), ("p", s(p)), ("epsilon", epsilon.as_ref().map(|e| e.to_string()))]),
                ),
                Cx::Hoeffding { n, gamma, trials, seed } => (
                    "cx hoeffding",
                    vec![],
                    flags([("n", s(n)), ("gamma", s(gamma)), ("trials", s(trials)), ("seed", s(seed))]),
                ),
                Cx::Crosscheck { chain, lmax, cases, seed } => (
                    "cx crosscheck",
                    vec![chain],
                    flags([("lmax", s(lmax)), ("cases", cases.map(|c| c.to_string())), ("seed", s(seed))]),
                ),
                Cx::EventE { chain, seed } => ("cx event-e", vec![chain], flags([("seed", s(seed))])),
                Cx::Constants { alpha } => ("cx constants", vec![], flags([("alpha", alpha.as_ref().map(|a| a.to_string()))])),
                Cx::Stirling { nmax } => ("cx stirling", vec![], flags([("nmax", s(nmax))])),
                Cx::Decode { n, len, id } => ("cx decode", vec![], flags([("n", s(n)), ("len", s(len)), ("id", s(id))])),
            },
        };
        RunConfig {
            subcommand: subcommand.to_string(),
            inputs: inputs.into_iter().map(|p| path_str(p)).collect(),
            output: self.output.as_deref().map(path_str),
            flags,
            budget: self.budget.unwrap_or(DEFAULT_BUDGET),
            format: self.format,
        }
    }
}

/// Reads and validates a JSON input; parse errors carry line and column.
pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Domain(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Domain(format!("{}: {e}", path.display())))
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("result types serialize to JSON")
}

fn within_budget(what: &str, needed: u128, budget: u128) -> Result<(), CliError> {
    if needed > budget {
        return Err(Error::BudgetExceeded { what: what.to_string(), needed, limit: budget }.into());
    }
    Ok(())
}

/// Runs a parsed command and returns the result document, without `config`.
pub fn execute(cli: &Cli) -> Result<Value, CliError> {
    let budget = cli.budget.unwrap_or(DEFAULT_BUDGET);
    let chain = |p: &Path| read_json::<ChainSpec>(p);
    let out = match &cli.command {
        Command::Value { u, g } => {
            let u: InfoStructure = read_json(u)?;
            let g: PayoffStructure = read_json(g)?;
            to_value(&bayesian_value(&u, &g)?)
        }
        Command::Distance { u, v, witness } => {
            let u: InfoStructure = read_json(u)?;
            let v: InfoStructure = read_json(v)?;
            let report = value_distance(&u, &v)?;
            if let Some(path) = witness {
                write_document(path, &to_value(&witness_payoff(&u, &v)?))?;
            }
            to_value(&report)
        }
        Command::Compare { u, v } => to_value(&compare(&read_json(u)?, &read_json(v)?)?),
        Command::Beliefs { u, order } => to_value(&hierarchy_distribution(&read_json(u)?, *order)?),
        Command::Weakdist { u, v, terms } => to_value(&weak_distance(&read_json(u)?, &read_json(v)?, *terms)?),
        Command::Cx(cx) => match cx {
            Cx::Sample { n, seed } => to_value(&sample_chain(*n, *seed)?),
            Cx::CheckUi { chain: c, lmax, max_listed } => {
                let mut report = check_ui(&chain(c)?, *lmax, budget)?;
                let total = report.total_violations();
                for list in report.violations.values_mut() {
                    list.truncate(*max_listed);
                }
                let mut v = to_value(&report);
                v["passes"] = Value::Bool(total == 0);
                v["total_violations"] = total.into();
                v
            }
            Cx::BuildU { chain: c, l } => {
                let c = chain(c)?;
                if *l == 0 {
                    return Err(CliError::Domain("l must be at least 1".into()));
                }
                within_budget(&format!("support of u^{l}"), u_l_support_size(c.n(), *l), budget)?;
                to_value(&build_u_l(&c, *l)?)
            }
            Cx::BuildG { chain: c, p, epsilon } => {
                let c = chain(c)?;
                let cells = (c.n() as u128).checked_pow(2 * *p as u32).unwrap_or(u128::MAX).saturating_mul(2);
                within_budget(&format!("payoff entries of g^{p}"), cells, budget)?;
                let eps = epsilon.clone().unwrap_or_else(|| default_epsilon(c.n()));
                to_value(&build_g_p(&c, *p, &eps)?)
            }
            Cx::Verify { chain: c, l, p, epsilon } => {
                let c = chain(c)?;
                let eps = epsilon.clone().unwrap_or_else(|| default_epsilon(c.n()));
                to_value(&verify_separation(&c, *l, *p, &eps, budget)?)
            }
            Cx::Hoeffding { n, gamma, trials, seed } => {
                // one bitmask pass over N columns per statistic and trial
                within_budget("hoeffding trials", (*trials as u128).saturating_mul((*n as u128).pow(2)), budget)?;
                to_value(&hoeffding_experiment(*n, gamma, *trials, *seed)?)
            }
            Cx::Crosscheck { chain: c, lmax, cases, seed } => {
                let scope = match cases {
                    Some(cases) => CrosscheckScope::Sampled { l_max: *lmax, cases: *cases, seed: *seed },
                    None => CrosscheckScope::Exhaustive { l_max: *lmax },
                };
                to_value(&ui_formula_crosscheck(&chain(c)?, scope, budget)?)
            }
            Cx::EventE { chain: c, seed } => to_value(&event_e_check(&chain(c)?, budget, *seed)?),
            Cx::Constants { alpha: a } => {
                let c = induction_constants(&a.clone().unwrap_or_else(alpha));
                let mut v = to_value(&c);
                v["hold"] = Value::Bool(c.hold());
                v
            }
            Cx::Stirling { nmax } => {
                let rows = stirling_check(*nmax);
                serde_json::json!({ "all_hold": rows.iter().all(|r| r.lower && r.upper), "rows": rows })
            }
            Cx::Decode { n, len, id } => {
                if *n < 2 || *len == 0 {
                    return Err(CliError::Domain("need N >= 2 and len >= 1".into()));
                }
                let max = (*n as u128).checked_pow(*len as u32).unwrap_or(u128::MAX);
                if *id as u128 >= max {
                    return Err(CliError::Domain(format!("id {id} out of range for {len} signals over {n} states")));
                }
                serde_json::json!({ "N": n, "id": id, "tuple": decode_tuple(*n, *len, *id) })
            }
        },
    };
    Ok(out)
}

/// The result with the run configuration attached under `config`.
pub fn document(cli: &Cli) -> Result<Value, CliError> {
    let mut out = execute(cli)?;
    let config = to_value(&cli.config());
    match &mut out {
        Value::Object(map) => {
            map.insert("config".to_string(), config);
        }
        other => {
            out = serde_json::json!({ "result": other.take(), "config": config });
        }
    }
    Ok(out)
}

fn write_document(path: &Path, doc: &Value) -> Result<(), CliError> {
    fs::write(path, render(doc, Format::Json)).map_err(|e| CliError::Domain(format!("cannot write {}: {e}", path.display())))
}

pub fn render(doc: &Value, format: Format) -> String {
    match format {
        Format::Json => serde_json::to_string_pretty(doc).expect("values serialize") + "\n",
        Format::Human => {
            let mut s = String::new();
            if let Value::Object(map) = doc {
                for (k, v) in map.iter().filter(|(k, _)| k.as_str() != "config") {
                    let line = match v {
                        Value::String(x) => x.clone(),
                        Value::Array(a) if serde_json::to_string(v).map_or(0, |t| t.len()) > 100 => format!("[{} items]", a.len()),
                        Value::Object(o) if serde_json::to_string(v).map_or(0, |t| t.len()) > 100 => format!("{{{} fields}}", o.len()),
                        _ => v.to_string(),
                    };
                    s.push_str(&format!("{k}: {line}\n"));
                }
            }
            s
        }
    }
}

/// Parses `args`, runs, prints and returns the exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // usage errors are input errors; 2 is reserved for budget refusals
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let result = document(&cli).and_then(|doc| {
        let text = render(&doc, cli.format);
        match &cli.output {
            Some(path) => fs::write(path, text).map_err(|e| CliError::Domain(format!("cannot write {}: {e}", path.display()))),
            None => {
                print!("{text}");
                Ok(())
            }
        }
    });
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
