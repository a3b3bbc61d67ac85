//! Bounds on the convex calibration dimension of a loss matrix and the
//! affine-embedding surrogate that attains the affine-dimension bound.

use std::collections::BTreeSet;

use itertools::Itertools;
use num_traits::Zero;
use serde::Serialize;

use crate::calibration::uniform_on;
use crate::error::{Error, Result};
use crate::linalg::{barycenter, serde_rational, sub_vec, RatMatrix, RatVector, Rational};
use crate::losses::LossMatrix;
use crate::polytope::{HPolytope, DEFAULT_VERTEX_BUDGET};
use crate::surrogate::LinearEmbedSurrogate;

/// Column differences `l_t - l_1` for `t >= 2`, as columns of an `n x (k-1)` matrix.
fn column_differences(loss: &LossMatrix) -> Result<RatMatrix> {
    let base = loss.column(0);
    let diffs: Vec<RatVector> = (1..loss.k()).map(|t| sub_vec(&loss.column(t), &base)).collect();
    RatMatrix::from_columns(loss.n(), &diffs)
}

/// Dimension of the affine hull of the columns.
pub fn affine_dim(loss: &LossMatrix) -> Result<usize> {
    Ok(column_differences(loss)?.rank())
}

/// `min(affdim, n - 1)`.
pub fn upper_bound(loss: &LossMatrix) -> Result<usize> {
    Ok(affine_dim(loss)?.min(loss.n() - 1))
}

/// Lower bound `||p||_0 - mu - 1` at one probability vector.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LowerBoundAt {
    pub bound: usize,
    #[serde(with = "serde_rational::vec")]
    pub p: RatVector,
    /// Smallest column in the Bayes argmin.
    pub t: usize,
    /// Dimension of the smallest face of the (support-restricted) trigger set
    /// containing `p`.
    pub mu: usize,
    pub support: usize,
}

/// Evaluates the bound at `p`, restricting to the support of `p` and
/// checking that every minimizing column gives the same face dimension.
pub fn lower_bound_at(loss: &LossMatrix, p: &[Rational]) -> Result<LowerBoundAt> {
    let argmin = loss.bayes_argmin(p)?;
    let support: Vec<usize> = (0..p.len()).filter(|&i| !p[i].is_zero()).collect();
    let restricted = LossMatrix::new_signed(loss.entries().select_rows(&support))?;
    let ps: RatVector = support.iter().map(|&i| p[i].clone()).collect();
    let mut mu: Option<usize> = None;
    for &t in &argmin {
        let m = restricted.trigger_set(t)?.feasible_subspace_dim(&ps)?;
        match mu {
            None => mu = Some(m),
            Some(prev) if prev != m => {
                return Err(Error::Inconsistent(format!(
                    "face dimension differs across minimizers: {prev} vs {m}"
                )))
            }
            _ => {}
        }
    }
    let mu = mu.expect("argmin is non-empty");
    Ok(LowerBoundAt {
        bound: support.len().saturating_sub(mu + 1),
        p: p.to_vec(),
        t: argmin[0],
        mu,
        support: support.len(),
    })
}

/// Best lower bound over a deterministic candidate set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LowerBoundSearch {
    pub best: LowerBoundAt,
    pub candidates: usize,
    /// False when some vertex enumeration exceeded its budget and was skipped.
    pub exhaustive: bool,
}

/// Tries the uniform vector, every trigger-set vertex, and the barycenters of
/// pairwise and triple intersections of trigger sets.
pub fn lower_bound_search(loss: &LossMatrix) -> Result<LowerBoundSearch> {
    lower_bound_search_with_budget(loss, DEFAULT_VERTEX_BUDGET)
}

pub fn lower_bound_search_with_budget(loss: &LossMatrix, budget: u128) -> Result<LowerBoundSearch> {
    let n = loss.n();
    let all: Vec<usize> = (0..n).collect();
    let mut seen: BTreeSet<RatVector> = BTreeSet::new();
    let mut order: Vec<RatVector> = Vec::new();
    let mut push = |p: RatVector, order: &mut Vec<RatVector>| {
        if seen.insert(p.clone()) {
            order.push(p);
        }
    };
    push(uniform_on(n, &all), &mut order);
    let mut exhaustive = true;
    let triggers = loss.trigger_sets()?;
    for q in &triggers {
        match q.vertices_with_budget(budget) {
            Ok(vs) => vs.iter().for_each(|v| push(v.clone(), &mut order)),
            Err(Error::BudgetExceeded { .. }) => exhaustive = false,
            Err(e) => return Err(e),
        }
    }
    for size in [2, 3] {
        for combo in (0..triggers.len()).combinations(size) {
            let mut inter = triggers[combo[0]].clone();
            for &t in &combo[1..] {
                inter = inter.intersect(&triggers[t])?;
            }
            if inter.is_empty() {
                continue;
            }
            match inter.vertices_with_budget(budget) {
                Ok(vs) => push(barycenter(vs), &mut order),
                Err(Error::BudgetExceeded { .. }) => exhaustive = false,
                Err(e) => return Err(e),
            }
        }
    }
    let mut best: Option<LowerBoundAt> = None;
    for p in &order {
        let at = lower_bound_at(loss, p)?;
        if best.as_ref().is_none_or(|b| at.bound > b.bound) {
            best = Some(at);
        }
    }
    Ok(LowerBoundSearch {
        best: best.expect("uniform candidate always present"),
        candidates: order.len(),
        exhaustive,
    })
}

/// Whether some `p` in the relative interior of the simplex gives every
/// column the same expected loss; then `affdim - 1` is a lower bound.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Tightness {
    pub tight: bool,
    #[serde(with = "serde_rational::option_vec")]
    pub witness: Option<RatVector>,
    /// `affdim - 1` when tight.
    pub implied_lower_bound: Option<usize>,
}

pub fn tightness_check(loss: &LossMatrix) -> Result<Tightness> {
    let n = loss.n();
    let base = loss.column(0);
    let eq: Vec<(RatVector, Rational)> = (1..loss.k())
        .map(|t| sub_vec(&loss.column(t), &base))
        .filter(|d| d.iter().any(|x| !x.is_zero()))
        .map(|d| (d, Rational::zero()))
        .collect();
    let poly = HPolytope::simplex(n)?.with_constraints(vec![], eq)?;
    let uniform = uniform_on(n, &(0..n).collect::<Vec<_>>());
    let witness = if poly.contains_point(&uniform)? {
        Some(uniform)
    } else {
        poly.strict_interior_point(&(0..n).collect::<Vec<_>>())?
    };
    let implied = match &witness {
        Some(_) => Some(affine_dim(loss)?.saturating_sub(1)),
        None => None,
    };
    Ok(Tightness {
        tight: witness.is_some(),
        witness,
        implied_lower_bound: implied,
    })
}

/// True iff every column is a rearrangement of the first.
pub fn permutation_columns_check(loss: &LossMatrix) -> bool {
    let sorted = |t: usize| {
        let mut c = loss.column(t);
        c.sort();
        c
    };
    let first = sorted(0);
    (1..loss.k()).all(|t| sorted(t) == first)
}

/// `psi(u) = M u + l_1` where the columns of `M` are the first linearly
/// independent differences `l_t - l_1` in column order, and anchor `u_t`
/// solves `M u_t = l_t - l_1`.
pub fn construct_embedding_surrogate(loss: &LossMatrix) -> Result<LinearEmbedSurrogate> {
    let n = loss.n();
    let base = loss.column(0);
    let mut basis: Vec<RatVector> = Vec::new();
    for t in 1..loss.k() {
        let v = sub_vec(&loss.column(t), &base);
        let mut trial = basis.clone();
        trial.push(v.clone());
        if RatMatrix::from_columns(n, &trial)?.rank() == trial.len() {
            basis = trial;
        }
    }
    let map = RatMatrix::from_columns(n, &basis)?;
    let map = if basis.is_empty() { RatMatrix::zeros(n, 0) } else { map };
    let mut anchors = Vec::with_capacity(loss.k());
    for t in 0..loss.k() {
        let target = sub_vec(&loss.column(t), &base);
        let u = map
            .solve(&target)?
            .ok_or_else(|| Error::Inconsistent(format!("column {t} outside the affine hull")))?;
        anchors.push(u);
    }
    let translation: RatVector = base.iter().map(|x| -x).collect();
    let surrogate = LinearEmbedSurrogate::new(map, translation, anchors)?;
    for (t, u) in surrogate.anchors().iter().enumerate() {
        if surrogate.evaluate(u)? != loss.column(t) {
            return Err(Error::Inconsistent(format!("anchor {t} does not reproduce its column")));
        }
    }
    Ok(surrogate)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CCDimReport {
    pub n: usize,
    pub k: usize,
    pub affdim: usize,
    pub rank: usize,
    pub upper_bound: usize,
    /// Best lower bound found; the true value may be larger.
    pub lower_bound: usize,
    pub lower_witness: LowerBoundAt,
    /// Number of candidates tried by the search, if it ran.
    pub search_candidates: Option<usize>,
    pub search_exhaustive: Option<bool>,
    pub tightness: Tightness,
    pub perm_columns: bool,
}

#[derive(Clone, Copy, Debug)]
pub struct ReportOptions {
    /// Run the candidate search; otherwise only the uniform vector and the
    /// tightness witness are evaluated.
    pub search: bool,
    pub budget: u128,
}

impl Default for ReportOptions {
    fn default() -> Self {
        Self {
            search: true,
            budget: DEFAULT_VERTEX_BUDGET,
        }
    }
}

pub fn report(loss: &LossMatrix) -> Result<CCDimReport> {
    report_with(loss, ReportOptions::default())
}

pub fn report_with(loss: &LossMatrix, opts: ReportOptions) -> Result<CCDimReport> {
    let n = loss.n();
    let affdim = affine_dim(loss)?;
    let rank = loss.entries().rank();
    let tightness = tightness_check(loss)?;
    let (mut best, candidates, exhaustive) = if opts.search {
        let s = lower_bound_search_with_budget(loss, opts.budget)?;
        (s.best, Some(s.candidates), Some(s.exhaustive))
    } else {
        (lower_bound_at(loss, &uniform_on(n, &(0..n).collect::<Vec<_>>()))?, None, None)
    };
    if let Some(w) = &tightness.witness {
        let at = lower_bound_at(loss, w)?;
        if at.bound > best.bound {
            best = at;
        }
    }
    let lower = best.bound.max(tightness.implied_lower_bound.unwrap_or(0));
    Ok(CCDimReport {
        n,
        k: loss.k(),
        affdim,
        rank,
        upper_bound: affdim.min(n - 1),
        lower_bound: lower,
        lower_witness: best,
        search_candidates: candidates,
        search_exhaustive: exhaustive,
        tightness,
        perm_columns: permutation_columns_check(loss),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{int_vec, rat_vec};
    use crate::losses::{abstain, hamming, ordinal, zero_one};

    #[test]
    fn affine_dimensions() {
        assert_eq!(affine_dim(&hamming(2).unwrap()).unwrap(), 2);
        assert_eq!(affine_dim(&ordinal(3).unwrap()).unwrap(), 2);
        let single = LossMatrix::new(RatMatrix::from_i64(&[&[1], &[2]])).unwrap();
        assert_eq!(affine_dim(&single).unwrap(), 0);
        assert_eq!(upper_bound(&zero_one(3).unwrap()).unwrap(), 2);
        assert_eq!(upper_bound(&hamming(3).unwrap()).unwrap(), 3);
    }

    #[test]
    fn zero_one_lower_bounds() {
        let l = zero_one(3).unwrap();
        let at = lower_bound_at(&l, &rat_vec(&[(1, 3), (1, 3), (1, 3)])).unwrap();
        assert_eq!((at.bound, at.mu), (2, 0));
        let l5 = zero_one(5).unwrap();
        assert_eq!(lower_bound_at(&l5, &uniform_on(5, &[0, 1, 2, 3, 4])).unwrap().bound, 4);
        let at = lower_bound_at(&ordinal(3).unwrap(), &int_vec(&[1, 0, 0])).unwrap();
        assert_eq!((at.support, at.bound), (1, 0));
    }

    #[test]
    fn searches() {
        assert_eq!(lower_bound_search(&zero_one(4).unwrap()).unwrap().best.bound, 3);
        let s = lower_bound_search(&abstain(3).unwrap()).unwrap();
        assert_eq!(s.best.bound, 1);
        assert!(s.exhaustive);
        let single = LossMatrix::new(RatMatrix::from_i64(&[&[1], &[2]])).unwrap();
        assert_eq!(lower_bound_search(&single).unwrap().best.bound, 0);
    }

    #[test]
    fn tightness_and_permutations() {
        let t = tightness_check(&zero_one(4).unwrap()).unwrap();
        assert!(t.tight);
        assert_eq!(t.witness.unwrap(), uniform_on(4, &[0, 1, 2, 3]));
        let not = LossMatrix::new(RatMatrix::from_i64(&[&[0, 1], &[0, 2]])).unwrap();
        assert!(!tightness_check(&not).unwrap().tight);
        assert!(permutation_columns_check(&zero_one(4).unwrap()));
        assert!(!permutation_columns_check(&ordinal(3).unwrap()));
    }

    #[test]
    fn embedding_surrogates() {
        let e = construct_embedding_surrogate(&zero_one(3).unwrap()).unwrap();
        assert_eq!(e.d(), 2);
        assert_eq!(e.anchors(), &[int_vec(&[0, 0]), int_vec(&[1, 0]), int_vec(&[0, 1])]);
        let mid = rat_vec(&[(1, 2), (0, 1)]);
        assert_eq!(e.evaluate(&mid).unwrap(), rat_vec(&[(1, 2), (1, 2), (1, 1)]));
        assert!(e.evaluate(&int_vec(&[1, 1])).is_err());
        let single = LossMatrix::new(RatMatrix::from_i64(&[&[1], &[2]])).unwrap();
        let e = construct_embedding_surrogate(&single).unwrap();
        assert_eq!(e.d(), 0);
        assert_eq!(e.evaluate(&[]).unwrap(), int_vec(&[1, 2]));
        let e = construct_embedding_surrogate(&hamming(2).unwrap()).unwrap();
        assert_eq!((e.d(), e.anchors().len()), (2, 4));
    }

    #[test]
    fn full_report() {
        let r = report(&zero_one(3).unwrap()).unwrap();
        assert_eq!((r.upper_bound, r.lower_bound, r.affdim, r.rank), (2, 2, 2, 3));
        assert!(r.perm_columns && r.tightness.tight);
    }
}
