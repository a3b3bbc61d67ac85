//! Necessary and sufficient calibration tests for a surrogate against a loss
//! matrix, evaluated on a finite list of surrogate points.
//!
//! A point `u` contributes the normal set `N = N(psi(u))`. The necessary test
//! fails when some `N` lies in no trigger set. The sufficient test needs every
//! `N` inside some trigger set and the `N`s to cover the simplex; coverage is
//! certified either by every trigger set sitting inside one `N`, or by an
//! explicit decomposition of the simplex into cells each inside one `N`.

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{serde_rational, RatVector, Rational};
use crate::losses::LossMatrix;
use crate::lp::{LpStatus, Sense};
use crate::polytope::HPolytope;
use crate::surrogate::NormalSets;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CalibrationStatus {
    Calibrated,
    NotCalibrated,
    Undetermined,
}

/// One analysed surrogate point.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PointAnalysis {
    #[serde(with = "serde_rational::vec")]
    pub u: RatVector,
    #[serde(with = "serde_rational::vec")]
    pub z: RatVector,
    pub normal_set: HPolytope,
    /// Trigger sets (column indices) containing the normal set.
    pub contained_in: Vec<usize>,
}

/// A point whose normal set escapes every trigger set.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Violation {
    pub point: usize,
    /// For each column `t`, a point of the normal set outside `Q_t`.
    #[serde(with = "serde_rational::vec_vec")]
    pub escapes: Vec<RatVector>,
}

/// Binary space partition of the simplex whose leaves each lie in one
/// normal set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoverTree {
    Leaf {
        covered_by: usize,
    },
    Split {
        #[serde(with = "serde_rational::vec")]
        normal: RatVector,
        #[serde(with = "serde_rational")]
        offset: Rational,
        below: Box<CoverTree>,
        above: Box<CoverTree>,
    },
}

impl CoverTree {
    pub fn leaves(&self) -> usize {
        match self {
            CoverTree::Leaf { .. } => 1,
            CoverTree::Split { below, above, .. } => below.leaves() + above.leaves(),
        }
    }
}

/// Evidence that the analysed normal sets cover the simplex.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CoverageCertificate {
    /// `(t, j)`: trigger set `Q_t` lies inside normal set `N_j`.
    TriggerContainment { pairs: Vec<(usize, usize)> },
    CellDecomposition { tree: CoverTree },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CalibrationVerdict {
    pub status: CalibrationStatus,
    pub points: Vec<PointAnalysis>,
    pub violations: Vec<Violation>,
    /// Least trigger index containing each normal set, when all have one.
    pub assignment: Option<Vec<usize>>,
    pub certificate: Option<CoverageCertificate>,
    /// A simplex point outside every analysed normal set.
    #[serde(with = "serde_rational::option_vec")]
    pub uncovered: Option<RatVector>,
}

fn analyze<S: NormalSets + ?Sized>(loss: &LossMatrix, surrogate: &S, points: &[RatVector]) -> Result<(Vec<HPolytope>, Vec<PointAnalysis>)> {
    if surrogate.n() != loss.n() {
        return Err(Error::DimensionMismatch {
            expected: loss.n(),
            got: surrogate.n(),
        });
    }
    let triggers = loss.trigger_sets()?;
    let mut out = Vec::with_capacity(points.len());
    for u in points {
        let z = surrogate.value(u)?;
        let normal_set = surrogate.normal_set(u)?;
        let mut contained_in = Vec::new();
        for (t, q) in triggers.iter().enumerate() {
            if q.contains_polytope(&normal_set)? {
                contained_in.push(t);
            }
        }
        out.push(PointAnalysis {
            u: u.clone(),
            z,
            normal_set,
            contained_in,
        });
    }
    Ok((triggers, out))
}

fn violations(triggers: &[HPolytope], points: &[PointAnalysis]) -> Result<Vec<Violation>> {
    let mut out = Vec::new();
    for (j, pa) in points.iter().enumerate() {
        if !pa.contained_in.is_empty() {
            continue;
        }
        let mut escapes = Vec::with_capacity(triggers.len());
        for q in triggers {
            let v = q
                .containment_violation(&pa.normal_set)?
                .ok_or_else(|| Error::Inconsistent("containment flipped between checks".into()))?;
            escapes.push(v);
        }
        out.push(Violation { point: j, escapes });
    }
    Ok(out)
}

/// Fails (not calibrated) when a normal set lies in no trigger set;
/// otherwise the answer is undetermined.
pub fn necessary_check<S: NormalSets + ?Sized>(
    loss: &LossMatrix,
    surrogate: &S,
    points: &[RatVector],
) -> Result<CalibrationVerdict> {
    let (triggers, points) = analyze(loss, surrogate, points)?;
    let violations = violations(&triggers, &points)?;
    let status = if violations.is_empty() {
        CalibrationStatus::Undetermined
    } else {
        CalibrationStatus::NotCalibrated
    };
    let assignment = assignment(&points);
    Ok(CalibrationVerdict {
        status,
        points,
        violations,
        assignment,
        certificate: None,
        uncovered: None,
    })
}

fn assignment(points: &[PointAnalysis]) -> Option<Vec<usize>> {
    points.iter().map(|p| p.contained_in.first().copied()).collect()
}

/// Certifies calibration when every normal set lies in a trigger set and the
/// normal sets cover the simplex. Never answers not-calibrated.
pub fn sufficient_check<S: NormalSets + ?Sized>(
    loss: &LossMatrix,
    surrogate: &S,
    points: &[RatVector],
) -> Result<CalibrationVerdict> {
    let (triggers, points) = analyze(loss, surrogate, points)?;
    let violations = violations(&triggers, &points)?;
    let assignment = assignment(&points);
    let mut verdict = CalibrationVerdict {
        status: CalibrationStatus::Undetermined,
        points,
        violations,
        assignment,
        certificate: None,
        uncovered: None,
    };
    if verdict.assignment.is_none() {
        return Ok(verdict);
    }
    let normals: Vec<&HPolytope> = verdict.points.iter().map(|p| &p.normal_set).collect();
    match coverage(&triggers, &normals, loss.n())? {
        Ok(cert) => {
            verdict.status = CalibrationStatus::Calibrated;
            verdict.certificate = Some(cert);
        }
        Err(p) => verdict.uncovered = Some(p),
    }
    Ok(verdict)
}

/// Runs the necessary test, and the sufficient test when the first passes.
pub fn check<S: NormalSets + ?Sized>(loss: &LossMatrix, surrogate: &S, points: &[RatVector]) -> Result<CalibrationVerdict> {
    let verdict = sufficient_check(loss, surrogate, points)?;
    if !verdict.violations.is_empty() {
        return Ok(CalibrationVerdict {
            status: CalibrationStatus::NotCalibrated,
            ..verdict
        });
    }
    Ok(verdict)
}

/// Certificate that the normal sets cover the simplex, or an uncovered point.
pub fn coverage(
    triggers: &[HPolytope],
    normals: &[&HPolytope],
    n: usize,
) -> Result<std::result::Result<CoverageCertificate, RatVector>> {
    let mut pairs = Vec::new();
    for (t, q) in triggers.iter().enumerate() {
        match normals.iter().position(|nj| nj.contains_polytope(q).unwrap_or(false)) {
            Some(j) => pairs.push((t, j)),
            None => break,
        }
    }
    if pairs.len() == triggers.len() {
        return Ok(Ok(CoverageCertificate::TriggerContainment { pairs }));
    }
    let simplex = HPolytope::simplex(n)?;
    Ok(cover(&simplex, normals)?.map(|tree| CoverageCertificate::CellDecomposition { tree }))
}

/// Splits `region` along facet hyperplanes of the normal sets until every
/// piece lies in one of them. When no hyperplane cuts a piece that no normal
/// set contains, the piece meets their union only in lower-dimensional
/// slices, so its relative interior holds an uncovered point.
fn cover(region: &HPolytope, normals: &[&HPolytope]) -> Result<std::result::Result<CoverTree, RatVector>> {
    for (j, nj) in normals.iter().enumerate() {
        if nj.contains_polytope(region)? {
            return Ok(Ok(CoverTree::Leaf { covered_by: j }));
        }
    }
    for nj in normals {
        let mut halfspaces = nj.inequalities();
        for (a, b) in nj.equalities() {
            halfspaces.push((a.iter().map(|x| -x).collect(), -b.clone()));
            halfspaces.push((a, b));
        }
        for (a, b) in halfspaces {
            if cuts(region, &a, &b)? {
                let below = region.with_constraints(vec![(a.clone(), b.clone())], vec![])?;
                let above = region.with_constraints(vec![(a.iter().map(|x| -x).collect(), -b.clone())], vec![])?;
                let below_tree = match cover(&below, normals)? {
                    Ok(t) => t,
                    Err(p) => return Ok(Err(p)),
                };
                let above_tree = match cover(&above, normals)? {
                    Ok(t) => t,
                    Err(p) => return Ok(Err(p)),
                };
                return Ok(Ok(CoverTree::Split {
                    normal: a,
                    offset: b,
                    below: Box::new(below_tree),
                    above: Box::new(above_tree),
                }));
            }
        }
    }
    let all: Vec<usize> = (0..region.ineq().rows()).collect();
    let p = region
        .strict_interior_point(&all)?
        .or_else(|| region.any_point())
        .ok_or_else(|| Error::Inconsistent("empty cell in cover tree".into()))?;
    Ok(Err(p))
}

/// `min a.x < b < max a.x` over the region.
fn cuts(region: &HPolytope, a: &[Rational], b: &Rational) -> Result<bool> {
    let hi = region.lp(a, Sense::Maximize)?;
    let lo = region.lp(a, Sense::Minimize)?;
    match (hi.status, lo.status) {
        (LpStatus::Feasible, LpStatus::Feasible) => Ok(hi.optimum.expect("opt") > *b && lo.optimum.expect("opt") < *b),
        _ => Ok(false),
    }
}

/// Re-checks a coverage certificate from scratch.
pub fn verify_certificate(triggers: &[HPolytope], normals: &[&HPolytope], cert: &CoverageCertificate, n: usize) -> Result<bool> {
    match cert {
        CoverageCertificate::TriggerContainment { pairs } => {
            if pairs.len() != triggers.len() || pairs.iter().enumerate().any(|(i, &(t, _))| i != t) {
                return Ok(false);
            }
            for &(t, j) in pairs {
                let Some(nj) = normals.get(j) else { return Ok(false) };
                if !nj.contains_polytope(&triggers[t])? {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        CoverageCertificate::CellDecomposition { tree } => verify_tree(&HPolytope::simplex(n)?, normals, tree),
    }
}

fn verify_tree(region: &HPolytope, normals: &[&HPolytope], tree: &CoverTree) -> Result<bool> {
    match tree {
        CoverTree::Leaf { covered_by } => match normals.get(*covered_by) {
            Some(nj) => nj.contains_polytope(region),
            None => Ok(false),
        },
        CoverTree::Split {
            normal,
            offset,
            below,
            above,
        } => {
            let lo = region.with_constraints(vec![(normal.clone(), offset.clone())], vec![])?;
            let hi = region.with_constraints(vec![(normal.iter().map(|x| -x).collect(), -offset.clone())], vec![])?;
            Ok(verify_tree(&lo, normals, below)? && verify_tree(&hi, normals, above)?)
        }
    }
}

/// Prediction attached to each analysed point: the least column whose
/// trigger set contains the point's normal set.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PredictionTable {
    pub entries: Vec<PredictionEntry>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PredictionEntry {
    #[serde(with = "serde_rational::vec")]
    pub u: RatVector,
    pub prediction: usize,
    pub label: String,
}

pub fn build_pred(loss: &LossMatrix, verdict: &CalibrationVerdict) -> Result<PredictionTable> {
    let mut entries = Vec::with_capacity(verdict.points.len());
    for (j, pa) in verdict.points.iter().enumerate() {
        let t = *pa
            .contained_in
            .first()
            .ok_or_else(|| Error::InvalidInput(format!("point {j} has no containing trigger set")))?;
        entries.push(PredictionEntry {
            u: pa.u.clone(),
            prediction: t,
            label: loss.col_labels()[t].clone(),
        });
    }
    Ok(PredictionTable { entries })
}

/// The probability vector with equal mass on `support`.
pub fn uniform_on(n: usize, support: &[usize]) -> RatVector {
    let mut p = vec![Rational::zero(); n];
    let w = Rational::one() / Rational::from_integer((support.len() as i64).into());
    for &i in support {
        p[i] = w.clone();
    }
    p
}
