//! Subset-ranking losses as loss matrices over permutations: NDCG, pairwise
//! disagreement and mean average precision.
//!
//! Permutations map documents to positions, `sigma(i)` being the position
//! of document `i`, both one-based. They are enumerated in lexicographic
//! order of the mapping and labelled by its one-line notation.

use itertools::Itertools;
use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::ccdim::{self, CCDimReport, ReportOptions};
use crate::error::{Error, Result};
use crate::linalg::{int, rat, serde_rational, RatMatrix, RatVector, Rational};
use crate::losses::LossMatrix;

/// Largest number of documents accepted by the generators.
pub const MAX_DOCS: usize = 5;
/// Largest number of NDCG relevance vectors `s^r`.
pub const MAX_NDCG_ROWS: usize = 64;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Permutation {
    mapping: Vec<usize>,
}

impl Permutation {
    pub fn new(mapping: Vec<usize>) -> Result<Self> {
        let r = mapping.len();
        let mut seen = vec![false; r];
        for &m in &mapping {
            if m == 0 || m > r || seen[m - 1] {
                return Err(Error::InvalidInput(format!("{mapping:?} is not a permutation")));
            }
            seen[m - 1] = true;
        }
        Ok(Self { mapping })
    }

    pub fn r(&self) -> usize {
        self.mapping.len()
    }

    /// Position of zero-based document `i`.
    pub fn position(&self, i: usize) -> usize {
        self.mapping[i]
    }

    pub fn label(&self) -> String {
        self.mapping.iter().map(|m| m.to_string()).join("")
    }
}

fn check_docs(r: usize) -> Result<()> {
    if r == 0 {
        return Err(Error::InvalidInput("need at least one document".into()));
    }
    if r > MAX_DOCS {
        return Err(Error::CapExceeded(format!("r = {r} exceeds the limit of {MAX_DOCS} documents")));
    }
    Ok(())
}

/// All `r!` permutations in lexicographic order.
pub fn permutations(r: usize) -> Result<Vec<Permutation>> {
    check_docs(r)?;
    Ok((1..=r)
        .permutations(r)
        .map(|mapping| Permutation { mapping })
        .collect())
}

/// Directed acyclic graph on documents `1..=r`; edge `(i, j)` prefers `i`
/// over `j`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DAGEdgeList {
    r: usize,
    edges: Vec<(usize, usize)>,
}

impl DAGEdgeList {
    pub fn new(r: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        for (k, &(i, j)) in edges.iter().enumerate() {
            if i == j || i == 0 || j == 0 || i > r || j > r {
                return Err(Error::InvalidInput(format!("bad edge ({i}, {j}) for r = {r}")));
            }
            if edges[..k].contains(&(i, j)) {
                return Err(Error::InvalidInput(format!("duplicate edge ({i}, {j})")));
            }
        }
        // Kahn's algorithm.
        let mut indegree = vec![0usize; r + 1];
        for &(_, j) in &edges {
            indegree[j] += 1;
        }
        let mut ready: Vec<usize> = (1..=r).filter(|&v| indegree[v] == 0).collect();
        let mut visited = 0;
        while let Some(v) = ready.pop() {
            visited += 1;
            for &(i, j) in &edges {
                if i == v {
                    indegree[j] -= 1;
                    if indegree[j] == 0 {
                        ready.push(j);
                    }
                }
            }
        }
        if visited != r {
            return Err(Error::InvalidInput("graph has a cycle".into()));
        }
        Ok(Self { r, edges })
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        self.edges.contains(&(i, j))
    }

    pub fn label(&self) -> String {
        if self.edges.is_empty() {
            return "{}".into();
        }
        format!("{{{}}}", self.edges.iter().map(|(i, j)| format!("{i}>{j}")).join(","))
    }
}

/// The `r(r-1)` graphs with a single edge, ordered by edge.
pub fn single_edge_dags(r: usize) -> Result<Vec<DAGEdgeList>> {
    check_docs(r)?;
    (1..=r)
        .cartesian_product(1..=r)
        .filter(|(i, j)| i != j)
        .map(|e| DAGEdgeList::new(r, vec![e]))
        .collect()
}

/// Every DAG on `r <= 4` labelled vertices.
pub fn all_dags(r: usize) -> Result<Vec<DAGEdgeList>> {
    check_docs(r)?;
    if r > 4 {
        return Err(Error::CapExceeded(format!("enumerating all DAGs needs r <= 4, got {r}")));
    }
    let pairs: Vec<(usize, usize)> = (1..=r).cartesian_product(1..=r).filter(|(i, j)| i != j).collect();
    let mut out = Vec::new();
    for mask in 0u32..(1 << pairs.len()) {
        let edges: Vec<(usize, usize)> = (0..pairs.len()).filter(|b| mask >> b & 1 == 1).map(|b| pairs[b]).collect();
        if let Ok(g) = DAGEdgeList::new(r, edges) {
            out.push(g);
        }
    }
    Ok(out)
}

fn check_dags(r: usize, dags: &[DAGEdgeList]) -> Result<()> {
    if dags.is_empty() {
        return Err(Error::InvalidInput("need at least one graph".into()));
    }
    if let Some(g) = dags.iter().find(|g| g.r != r) {
        return Err(Error::DimensionMismatch { expected: r, got: g.r });
    }
    Ok(())
}

fn ranking_matrix(
    rows: usize,
    perms: &[Permutation],
    f: impl Fn(usize, &Permutation) -> Rational,
) -> Result<RatMatrix> {
    RatMatrix::from_rows(
        perms.len(),
        (0..rows).map(|y| perms.iter().map(|s| f(y, s)).collect()).collect(),
    )
}

/// Number of edges `(i, j)` of the graph ranked in the wrong order.
pub fn pd_loss(r: usize, dags: Option<Vec<DAGEdgeList>>) -> Result<LossMatrix> {
    let dags = match dags {
        Some(d) => d,
        None => single_edge_dags(r)?,
    };
    check_docs(r)?;
    check_dags(r, &dags)?;
    let perms = permutations(r)?;
    let m = ranking_matrix(dags.len(), &perms, |y, s| {
        let wrong = dags[y]
            .edges
            .iter()
            .filter(|&&(i, j)| s.position(i - 1) > s.position(j - 1))
            .count();
        int(wrong as i64)
    })?;
    LossMatrix::new(m)?.with_labels(
        dags.iter().map(DAGEdgeList::label).collect(),
        perms.iter().map(Permutation::label).collect(),
    )
}

/// Pairwise disagreement with the per-graph constant removed:
/// `sum_{j < i} (1((i,j) in G) - 1((j,i) in G)) 1(sigma(i) > sigma(j))`.
/// Entries may be negative.
pub fn pd_loss_tilde(r: usize, dags: Option<Vec<DAGEdgeList>>) -> Result<LossMatrix> {
    let dags = match dags {
        Some(d) => d,
        None => single_edge_dags(r)?,
    };
    check_docs(r)?;
    check_dags(r, &dags)?;
    let perms = permutations(r)?;
    let m = ranking_matrix(dags.len(), &perms, |y, s| {
        let g = &dags[y];
        let mut total = 0i64;
        for i in 1..=r {
            for j in 1..i {
                if s.position(i - 1) > s.position(j - 1) {
                    total += g.contains(i, j) as i64 - g.contains(j, i) as i64;
                }
            }
        }
        int(total)
    })?;
    LossMatrix::new_signed(m)?.with_labels(
        dags.iter().map(DAGEdgeList::label).collect(),
        perms.iter().map(Permutation::label).collect(),
    )
}

/// Nonzero binary relevance vectors in increasing binary order, document 1
/// being the most significant bit.
pub fn binary_relevance_vectors(r: usize) -> Result<Vec<Vec<u8>>> {
    check_docs(r)?;
    Ok((1u32..(1 << r))
        .map(|m| (0..r).map(|i| (m >> (r - 1 - i) & 1) as u8).collect())
        .collect())
}

fn relevance_label(y: &[u8]) -> String {
    y.iter().map(|v| v.to_string()).join("")
}

/// Index pairs `(i, j)` with `i <= j`, zero-based, in lexicographic order.
fn upper_pairs(r: usize) -> Vec<(usize, usize)> {
    (0..r).flat_map(|i| (i..r).map(move |j| (i, j))).collect()
}

/// `1 - (1/|y|) sum_{j <= i} y_i y_j / max(sigma(i), sigma(j))`.
pub fn map_loss(r: usize) -> Result<LossMatrix> {
    let ys = binary_relevance_vectors(r)?;
    let perms = permutations(r)?;
    let pairs = upper_pairs(r);
    let m = ranking_matrix(ys.len(), &perms, |row, s| {
        let y = &ys[row];
        let size = int(y.iter().map(|&v| v as i64).sum());
        let gain: Rational = pairs
            .iter()
            .filter(|&&(i, j)| y[i] == 1 && y[j] == 1)
            .map(|&(i, j)| rat(1, s.position(i).max(s.position(j)) as i64))
            .sum();
        Rational::one() - gain / size
    })?;
    LossMatrix::new(m)?.with_labels(
        ys.iter().map(|y| relevance_label(y)).collect(),
        perms.iter().map(Permutation::label).collect(),
    )
}

/// `A` (`(2^r - 1) x r(r+1)/2`) and `B` (`r(r+1)/2 x r!`) with
/// `e e^T - A B` equal to the MAP loss matrix.
pub fn map_factors(r: usize) -> Result<(RatMatrix, RatMatrix)> {
    let ys = binary_relevance_vectors(r)?;
    let perms = permutations(r)?;
    let pairs = upper_pairs(r);
    let a = RatMatrix::from_rows(
        pairs.len(),
        ys.iter()
            .map(|y| {
                let size: i64 = y.iter().map(|&v| v as i64).sum();
                pairs.iter().map(|&(i, j)| rat((y[i] * y[j]) as i64, size)).collect()
            })
            .collect(),
    )?;
    let b = RatMatrix::from_rows(
        perms.len(),
        pairs
            .iter()
            .map(|&(i, j)| perms.iter().map(|s| rat(1, s.position(i).max(s.position(j)) as i64)).collect())
            .collect(),
    )?;
    Ok((a, b))
}

/// Position discounts `w_j = 1/log2(j + 1)` for `j = 1..=5`, written in terms
/// of `l3 = log2 3` and `l5 = log2 5`: `1, 1/l3, 1/2, 1/l5, 1/(1 + l3)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Discounts {
    #[serde(with = "serde_rational")]
    pub log2_3: Rational,
    #[serde(with = "serde_rational")]
    pub log2_5: Rational,
    /// True when the logarithms are rational approximations of the real values.
    pub approximate: bool,
}

impl Discounts {
    /// Substitutes rational values for the two logarithms. The discounts stay
    /// strictly decreasing only for `1 < l3 < 2 < l5 < 1 + l3`.
    pub fn substitute(log2_3: Rational, log2_5: Rational) -> Result<Self> {
        let two = int(2);
        if !(Rational::one() < log2_3 && log2_3 < two && two < log2_5 && log2_5 < &log2_3 + Rational::one()) {
            return Err(Error::InvalidInput("discount substitution must keep the discounts decreasing".into()));
        }
        Ok(Self {
            log2_3,
            log2_5,
            approximate: false,
        })
    }

    /// The true logarithms rounded to the nearest multiple of `2^-128`.
    pub fn approximate_128() -> Self {
        Self {
            log2_3: log2_approx(3),
            log2_5: log2_approx(5),
            approximate: true,
        }
    }

    pub fn weights(&self, r: usize) -> RatVector {
        let one = Rational::one();
        let all = [
            one.clone(),
            &one / &self.log2_3,
            rat(1, 2),
            &one / &self.log2_5,
            &one / (&one + &self.log2_3),
        ];
        all[..r].to_vec()
    }
}

/// `atanh(1/k)` summed until the remainder is below `2^-200`.
fn atanh_inv(k: i64) -> Rational {
    let k = BigInt::from(k);
    let k2 = &k * &k;
    let tiny = Rational::new(BigInt::one(), BigInt::one() << 200);
    let mut power = k.clone();
    let mut sum = Rational::zero();
    let mut i: i64 = 0;
    loop {
        let term = Rational::new(BigInt::one(), BigInt::from(2 * i + 1) * &power);
        if term < tiny {
            return sum;
        }
        sum += term;
        power *= &k2;
        i += 1;
    }
}

/// `log2 m` for `m` in `{3, 5}` to within `2^-128`, via
/// `ln 2 = 2 atanh(1/3)`, `ln(3/2) = 2 atanh(1/5)`, `ln(5/4) = 2 atanh(1/9)`.
fn log2_approx(m: u32) -> Rational {
    let ln2 = atanh_inv(3);
    let exact = match m {
        3 => Rational::one() + atanh_inv(5) / &ln2,
        5 => int(2) + atanh_inv(9) / &ln2,
        _ => unreachable!("only log2 3 and log2 5 are needed"),
    };
    let scale = Rational::from_integer(BigInt::one() << 128);
    let scaled = (exact * &scale + rat(1, 2)).floor();
    scaled / scale
}

/// All relevance vectors in `{0..s-1}^r`, in lexicographic order.
pub fn relevance_vectors(r: usize, s: usize) -> Result<Vec<Vec<u8>>> {
    check_docs(r)?;
    if s < 2 {
        return Err(Error::InvalidInput("need at least two relevance levels".into()));
    }
    let rows = (s as u128).checked_pow(r as u32).unwrap_or(u128::MAX);
    if rows > MAX_NDCG_ROWS as u128 {
        return Err(Error::CapExceeded(format!("s^r = {rows} exceeds {MAX_NDCG_ROWS}")));
    }
    Ok((0..r)
        .map(|_| 0..s as u8)
        .multi_cartesian_product()
        .collect())
}

/// NDCG loss under the given discounts, normalized by the ideal DCG.
/// The all-zero relevance vector has loss 0 for every permutation.
pub fn ndcg_loss_with(r: usize, s: usize, discounts: &Discounts) -> Result<LossMatrix> {
    let ys = relevance_vectors(r, s)?;
    let perms = permutations(r)?;
    let w = discounts.weights(r);
    let gains: Vec<Vec<Rational>> = ys
        .iter()
        .map(|y| y.iter().map(|&v| int((1i64 << v) - 1)).collect())
        .collect();
    let ideal: Vec<Rational> = gains
        .iter()
        .map(|g| {
            let mut sorted = g.clone();
            sorted.sort_by(|a, b| b.cmp(a));
            sorted.iter().zip(&w).map(|(a, b)| a * b).sum()
        })
        .collect();
    let m = ranking_matrix(ys.len(), &perms, |row, sigma| {
        if ideal[row].is_zero() {
            return Rational::zero();
        }
        let dcg: Rational = gains[row]
            .iter()
            .enumerate()
            .map(|(i, g)| g * &w[sigma.position(i) - 1])
            .sum();
        Rational::one() - dcg / &ideal[row]
    })?;
    LossMatrix::new(m)?.with_labels(
        ys.iter().map(|y| relevance_label(y)).collect(),
        perms.iter().map(Permutation::label).collect(),
    )
}

/// NDCG loss under 128-bit approximations of the true discounts.
pub fn ndcg_loss(r: usize, s: usize) -> Result<LossMatrix> {
    ndcg_loss_with(r, s, &Discounts::approximate_128())
}

/// Rank and affine dimension of the NDCG matrix with the logarithms treated
/// as free symbols, estimated as the maximum over seeded random
/// substitutions (exact values never exceed it).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct GenericDims {
    pub rank: usize,
    pub affdim: usize,
    pub substitutions: usize,
}

pub fn ndcg_generic_dims(r: usize, s: usize, seed: u64) -> Result<GenericDims> {
    const TRIALS: usize = 4;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut rank, mut affdim) = (0, 0);
    for _ in 0..TRIALS {
        let den: i64 = rng.gen_range(1_000..1_000_000);
        let l3 = Rational::one() + rat(rng.gen_range(1..den), den);
        // l5 strictly inside (2, 1 + l3).
        let gap = &l3 - Rational::one();
        let frac = rat(rng.gen_range(1..den), den);
        let l5 = int(2) + gap * frac;
        let loss = ndcg_loss_with(r, s, &Discounts::substitute(l3, l5)?)?;
        rank = rank.max(loss.entries().rank());
        affdim = affdim.max(ccdim::affine_dim(&loss)?);
    }
    Ok(GenericDims {
        rank,
        affdim,
        substitutions: TRIALS,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RankingKind {
    Ndcg,
    Pd,
    Map,
}

/// Known closed-form bounds for the loss family.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ClosedFormBounds {
    pub upper: Option<usize>,
    pub lower: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RankingReport {
    pub kind: RankingKind,
    pub r: usize,
    pub s: Option<usize>,
    /// The matrix the report was computed on.
    pub loss: LossMatrix,
    pub report: CCDimReport,
    pub closed_form: ClosedFormBounds,
    /// Rank of the centered pairwise matrix (PD only).
    pub centered_rank: Option<usize>,
    /// Ranks of the MAP factors `A` and `B`.
    pub factor_ranks: Option<(usize, usize)>,
    /// Symbol-generic dimensions (NDCG only).
    pub generic: Option<GenericDims>,
    pub discounts: Option<Discounts>,
    /// Entries depend on rounded logarithms.
    pub approximate: bool,
}

/// Builds the loss for `kind` and bounds its calibration dimension.
///
/// PD is analysed on the single-edge graphs with the uncentered loss, whose
/// columns are rearrangements of each other; restricting the label set can
/// only lower the dimension, so its lower bound carries over.
pub fn ranking_report(kind: RankingKind, r: usize, s: Option<usize>) -> Result<RankingReport> {
    let quick = ReportOptions {
        search: false,
        ..ReportOptions::default()
    };
    let pairs = r * r.saturating_sub(1) / 2;
    match kind {
        RankingKind::Pd => {
            let loss = pd_loss(r, None)?;
            let centered_rank = pd_loss_tilde(r, None)?.entries().rank();
            let report = ccdim::report_with(&loss, quick)?;
            Ok(RankingReport {
                kind,
                r,
                s: None,
                loss,
                report,
                closed_form: ClosedFormBounds {
                    upper: Some(pairs),
                    lower: Some(pairs.saturating_sub(2)),
                },
                centered_rank: Some(centered_rank),
                factor_ranks: None,
                generic: None,
                discounts: None,
                approximate: false,
            })
        }
        RankingKind::Map => {
            let loss = map_loss(r)?;
            let (a, b) = map_factors(r)?;
            let report = ccdim::report_with(&loss, quick)?;
            Ok(RankingReport {
                kind,
                r,
                s: None,
                loss,
                report,
                closed_form: ClosedFormBounds {
                    upper: Some(r * (r + 1) / 2),
                    lower: Some(pairs.saturating_sub(4)),
                },
                centered_rank: None,
                factor_ranks: Some((a.rank(), b.rank())),
                generic: None,
                discounts: None,
                approximate: false,
            })
        }
        RankingKind::Ndcg => {
            let s = s.unwrap_or(2);
            let discounts = Discounts::approximate_128();
            let loss = ndcg_loss_with(r, s, &discounts)?;
            let report = ccdim::report_with(&loss, quick)?;
            Ok(RankingReport {
                kind,
                r,
                s: Some(s),
                loss,
                report,
                closed_form: ClosedFormBounds {
                    upper: Some(r),
                    lower: None,
                },
                centered_rank: None,
                factor_ranks: None,
                generic: Some(ndcg_generic_dims(r, s, 0)?),
                discounts: Some(discounts),
                approximate: true,
            })
        }
    }
}
