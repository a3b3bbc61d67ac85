mod input;
mod render;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use ccdim_core::calibration::check;
use ccdim_core::ccdim::{construct_embedding_surrogate, report};
use ccdim_core::ranking::ranking_report;
use ccdim_core::surrogate::NormalSets;
use ccdim_core::linalg::format_rational;
use ccdim_core::{Error as CoreError, HPolytope, RatVector, Rational};
use clap::{Parser, ValueEnum};
use serde_json::{json, Value};

use input::{load_loss, load_points, load_surrogate, ranking_kind, Surrogate, UsageError};
use render::{decimal_copy, render_report};

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Verb {
    /// Write a generated loss matrix.
    Lossgen,
    /// Trigger sets of every prediction, with vertices.
    Triggers,
    /// Upper and lower bounds on the calibration dimension.
    Bounds,
    /// Positive normal sets of a surrogate at given points.
    Normals,
    /// Calibration verdict of a surrogate for a loss.
    Check,
    /// Affine-embedding surrogate in affdim dimensions.
    Construct,
    /// Ranking loss family with its bounds report.
    Ranking,
}

/// Exact polyhedral analysis of multiclass losses and convex surrogates.
///
/// JSON goes to stdout, or to --out with a text table on stdout.
#[derive(Debug, Parser)]
#[command(name = "ccdim", version)]
struct Cli {
    verb: Verb,
    /// Loss generator name (zero-one, ordinal, hamming, abstain, ndcg, pd,
    /// map) or a JSON/CSV file.
    #[arg(long)]
    loss: Option<String>,
    /// Number of classes.
    #[arg(long)]
    n: Option<usize>,
    /// Number of bits or documents.
    #[arg(long)]
    r: Option<usize>,
    /// Relevance levels (ndcg).
    #[arg(long)]
    s: Option<usize>,
    /// Insensitivity width for the eps surrogate, e.g. 1/4.
    #[arg(long)]
    eps: Option<String>,
    /// Surrogate name (cs, abs, eps, embed) or a JSON file.
    #[arg(long)]
    surrogate: Option<String>,
    /// JSON array of surrogate points; defaults to the surrogate's own.
    #[arg(long)]
    points: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Add approximate decimal renderings of fractions.
    #[arg(long)]
    decimal: bool,
}

fn strings(v: &[Rational]) -> Vec<String> {
    v.iter().map(format_rational).collect()
}

fn string_rows(rows: &[RatVector]) -> Vec<Vec<String>> {
    rows.iter().map(|r| strings(r)).collect()
}

pub struct Sizes {
    pub n: Option<usize>,
    pub r: Option<usize>,
    pub s: Option<usize>,
}

fn require<'a>(value: &'a Option<String>, flag: &str, verb: Verb) -> Result<&'a str> {
    value
        .as_deref()
        .ok_or_else(|| UsageError(format!("{verb:?} needs --{flag}").to_lowercase()).into())
}

fn run(cli: &Cli) -> Result<Value> {
    let sizes = Sizes { n: cli.n, r: cli.r, s: cli.s };
    let loss = || -> Result<_> { load_loss(require(&cli.loss, "loss", cli.verb)?, &sizes) };
    let value = match cli.verb {
        Verb::Lossgen => serde_json::to_value(loss()?)?,
        Verb::Triggers => {
            let l = loss()?;
            let mut sets = Vec::new();
            for (t, q) in l.trigger_sets()?.iter().enumerate() {
                sets.push(json!({
                    "label": l.col_labels().get(t),
                    "polytope": q,
                    "vertices": string_rows(q.vertices()?),
                }));
            }
            json!({ "trigger_sets": sets, "columns": l.validate_columns()? })
        }
        Verb::Bounds => serde_json::to_value(report(&loss()?)?)?,
        Verb::Normals => {
            let l = cli.loss.as_ref().map(|_| loss()).transpose()?;
            let s = load_surrogate(require(&cli.surrogate, "surrogate", cli.verb)?, &sizes, l.as_ref(), cli.eps.as_deref())?;
            let dyn_s: &dyn NormalSets = match &s {
                Surrogate::Piecewise(p) => p,
                Surrogate::Embedding(e) => e,
            };
            let points = match &cli.points {
                Some(path) => load_points(path)?,
                None => dyn_s.default_points(),
            };
            let mut results = Vec::new();
            for u in &points {
                let mut entry = match &s {
                    Surrogate::Piecewise(p) => serde_json::to_value(p.positive_normal_set(u)?)?,
                    Surrogate::Embedding(e) => json!({
                        "point_u": strings(u),
                        "point_z": strings(&e.evaluate(u)?),
                        "polytope": e.positive_normal_set(u)?,
                    }),
                };
                let poly: HPolytope = serde_json::from_value(entry["polytope"].clone())?;
                entry["vertices"] = json!(string_rows(poly.vertices()?));
                results.push(entry);
            }
            json!({ "normal_sets": results })
        }
        Verb::Check => {
            let l = loss()?;
            let s = load_surrogate(require(&cli.surrogate, "surrogate", cli.verb)?, &sizes, Some(&l), cli.eps.as_deref())?;
            let dyn_s: &dyn NormalSets = match &s {
                Surrogate::Piecewise(p) => p,
                Surrogate::Embedding(e) => e,
            };
            let points = match &cli.points {
                Some(path) => load_points(path)?,
                None => dyn_s.default_points(),
            };
            serde_json::to_value(check(&l, dyn_s, &points)?)?
        }
        Verb::Construct => serde_json::to_value(construct_embedding_surrogate(&loss()?)?)?,
        Verb::Ranking => {
            let name = require(&cli.loss, "loss", cli.verb)?;
            let kind = ranking_kind(name).ok_or_else(|| UsageError(format!("{name:?} is not a ranking loss (ndcg, pd, map)")))?;
            let r = cli.r.ok_or_else(|| UsageError("ranking needs --r".into()))?;
            serde_json::to_value(ranking_report(kind, r, cli.s)?)?
        }
    };
    Ok(value)
}

/// 2 for inputs the analysis cannot handle (caps, budgets, unbounded or
/// infeasible sets), 1 for everything malformed.
fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<CoreError>() {
        Some(
            CoreError::CapExceeded(_)
            | CoreError::BudgetExceeded { .. }
            | CoreError::Unbounded
            | CoreError::OutsideDomain
            | CoreError::Inconsistent(_),
        ) => 2,
        _ => 1,
    }
}

fn emit(cli: &Cli, value: Value) -> Result<()> {
    let value = if cli.decimal {
        let approx = decimal_copy(&value);
        match value {
            Value::Object(mut map) => {
                map.insert("approximate_decimal".into(), approx);
                Value::Object(map)
            }
            other => other,
        }
    } else {
        value
    };
    let mut text = serde_json::to_string_pretty(&value)?;
    text.push('\n');
    match &cli.out {
        Some(path) => {
            fs::write(path, &text).with_context(|| format!("cannot write {}", path.display()))?;
            let shown = match &value {
                Value::Object(map) => {
                    let mut map = map.clone();
                    map.remove("approximate_decimal");
                    Value::Object(map)
                }
                other => other.clone(),
            };
            print!("{}", render_report(&shown, cli.decimal));
        }
        None => print!("{text}"),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli).and_then(|v| emit(&cli, v)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
