//! Loading losses, surrogates and point lists from names or files.

use std::fs;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use ccdim_core::linalg::parse_rational;
use ccdim_core::losses::{abstain, hamming, ordinal, zero_one};
use ccdim_core::ranking::{map_loss, ndcg_loss, pd_loss, RankingKind};
use ccdim_core::surrogate::{absolute, crammer_singer, eps_insensitive};
use ccdim_core::{LinearEmbedSurrogate, LossMatrix, PLSurrogate, RatVector, Rational};
use serde_json::Value;

use crate::Sizes;

/// Marks errors caused by the command line itself rather than the analysis.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    anyhow!(UsageError(msg.into()))
}

fn need(value: Option<usize>, flag: &str, what: &str) -> Result<usize> {
    value.ok_or_else(|| usage(format!("{what} needs --{flag}")))
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

/// Canonical generator name, or `None` when `name` is not a generator.
fn generator(name: &str) -> Option<&'static str> {
    Some(match name.to_ascii_lowercase().as_str() {
        "zero-one" | "0-1" | "01" | "zeroone" => "zero-one",
        "ordinal" | "ord" => "ordinal",
        "hamming" | "ham" => "hamming",
        "abstain" => "abstain",
        "ndcg" => "ndcg",
        "pd" => "pd",
        "map" => "map",
        _ => return None,
    })
}

pub fn ranking_kind(name: &str) -> Option<RankingKind> {
    match generator(name)? {
        "ndcg" => Some(RankingKind::Ndcg),
        "pd" => Some(RankingKind::Pd),
        "map" => Some(RankingKind::Map),
        _ => None,
    }
}

/// A named generator, or a JSON / CSV file.
pub fn load_loss(spec: &str, sizes: &Sizes) -> Result<LossMatrix> {
    if let Some(name) = generator(spec) {
        let loss = match name {
            "zero-one" => zero_one(need(sizes.n, "n", name)?)?,
            "ordinal" => ordinal(need(sizes.n, "n", name)?)?,
            "abstain" => abstain(need(sizes.n, "n", name)?)?,
            "hamming" => hamming(need(sizes.r, "r", name)?)?,
            "ndcg" => ndcg_loss(need(sizes.r, "r", name)?, need(sizes.s, "s", name)?)?,
            "pd" => pd_loss(need(sizes.r, "r", name)?, None)?,
            "map" => map_loss(need(sizes.r, "r", name)?)?,
            _ => unreachable!(),
        };
        return Ok(loss);
    }
    let path = Path::new(spec);
    if !path.is_file() {
        bail!(usage(format!("{spec:?} is neither a known loss nor a readable file")));
    }
    let text = read(path)?;
    let is_csv = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv"));
    if is_csv {
        Ok(LossMatrix::from_csv(&text).with_context(|| format!("bad CSV in {spec}"))?)
    } else {
        serde_json::from_str(&text).with_context(|| format!("bad loss JSON in {spec}"))
    }
}

pub enum Surrogate {
    Piecewise(PLSurrogate),
    Embedding(LinearEmbedSurrogate),
}

/// `cs`, `abs`, `eps`, `embed` (built from the loss) or a surrogate JSON
/// file. The number of classes defaults to that of the loss.
pub fn load_surrogate(spec: &str, sizes: &Sizes, loss: Option<&LossMatrix>, eps: Option<&str>) -> Result<Surrogate> {
    let n = || -> Result<usize> {
        sizes
            .n
            .or(loss.map(LossMatrix::n))
            .ok_or_else(|| usage(format!("surrogate {spec:?} needs --n or --loss")))
    };
    let s = match spec.to_ascii_lowercase().as_str() {
        "cs" | "crammer-singer" => Surrogate::Piecewise(crammer_singer(n()?)?),
        "abs" | "absolute" => Surrogate::Piecewise(absolute(n()?)?),
        "eps" | "eps-insensitive" => {
            let eps = eps.ok_or_else(|| usage("surrogate eps needs --eps"))?;
            let eps = parse_rational(eps).map_err(|e| usage(e.to_string()))?;
            Surrogate::Piecewise(eps_insensitive(n()?, &eps)?)
        }
        "embed" | "embedding" => {
            let loss = loss.ok_or_else(|| usage("surrogate embed needs --loss"))?;
            Surrogate::Embedding(ccdim_core::ccdim::construct_embedding_surrogate(loss)?)
        }
        _ => {
            let path = Path::new(spec);
            if !path.is_file() {
                bail!(usage(format!("{spec:?} is neither a known surrogate nor a readable file")));
            }
            let text = read(path)?;
            Surrogate::Piecewise(serde_json::from_str(&text).with_context(|| format!("bad surrogate JSON in {spec}"))?)
        }
    };
    Ok(s)
}

fn rational(v: &Value) -> Result<Rational> {
    let text = match v {
        Value::String(s) => s.clone(),
        Value::Number(n) => n.to_string(),
        other => bail!(usage(format!("expected a rational, found {other}"))),
    };
    parse_rational(&text).map_err(|e| usage(e.to_string()))
}

/// A JSON array of points, each an array of rationals (strings like
/// `"1/2"` or plain numbers).
pub fn load_points(path: &str) -> Result<Vec<RatVector>> {
    let text = read(Path::new(path))?;
    let value: Value = serde_json::from_str(&text).with_context(|| format!("bad points JSON in {path}"))?;
    let Value::Array(rows) = value else {
        bail!(usage(format!("{path}: expected an array of points")));
    };
    rows.iter()
        .map(|row| match row {
            Value::Array(xs) => xs.iter().map(rational).collect(),
            other => Err(usage(format!("{path}: expected a point array, found {other}"))),
        })
        .collect()
}
