//! Convex surrogates: piecewise-linear (max of affine pieces), the quadratic
//! universal surrogate, and affine embeddings of a loss matrix.

use std::sync::OnceLock;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::linalg::{dot, int, rat, serde_rational, RatMatrix, RatVector, Rational};
use crate::losses::check_distribution;
use crate::lp::{self, LpStatus, Sense};
use crate::polytope::{HPolytope, DEFAULT_VERTEX_BUDGET};

/// `w . u + c`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AffinePiece {
    #[serde(with = "serde_rational::vec")]
    pub w: RatVector,
    #[serde(with = "serde_rational")]
    pub c: Rational,
}

impl AffinePiece {
    pub fn new(w: RatVector, c: Rational) -> Self {
        Self { w, c }
    }

    pub fn eval(&self, u: &[Rational]) -> Rational {
        dot(&self.w, u) + &self.c
    }
}

/// Where a surrogate is defined.
#[derive(Clone, Debug, PartialEq)]
pub enum Domain {
    Free,
    Polytope(HPolytope),
}

impl Domain {
    pub fn contains(&self, u: &[Rational]) -> Result<bool> {
        match self {
            Domain::Free => Ok(true),
            Domain::Polytope(p) => p.contains_point(u),
        }
    }
}

impl Serialize for Domain {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Domain::Free => serializer.serialize_str("free"),
            Domain::Polytope(p) => p.serialize(serializer),
        }
    }
}

impl<'de> Deserialize<'de> for Domain {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let value = serde_json::Value::deserialize(deserializer)?;
        match value {
            serde_json::Value::String(s) if s == "free" => Ok(Domain::Free),
            serde_json::Value::String(s) => Err(serde::de::Error::custom(format!("unknown domain {s:?}"))),
            other => serde_json::from_value(other).map(Domain::Polytope).map_err(serde::de::Error::custom),
        }
    }
}

/// Surrogate whose positive normal sets can be computed at a point.
pub trait NormalSets {
    /// Number of class labels.
    fn n(&self) -> usize;

    /// `psi(u)`.
    fn value(&self, u: &[Rational]) -> Result<RatVector>;

    /// The set of `p` in the simplex for which `psi(u)` minimizes `p . z`
    /// over the surrogate's range.
    fn normal_set(&self, u: &[Rational]) -> Result<HPolytope>;

    /// Points to analyse when the caller gives none.
    fn default_points(&self) -> Vec<RatVector>;
}

/// `psi_y(u) = max_i (w_{y,i} . u + c_{y,i})` on a polyhedral domain.
#[derive(Clone, Debug, PartialEq)]
pub struct PLSurrogate {
    n: usize,
    d: usize,
    components: Vec<Vec<AffinePiece>>,
    domain: Domain,
}

/// Positive normal set at one point together with the matrices that
/// describe it: `p = B q` for `q` in the simplex with `A q` in minus the
/// domain's normal cone.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NormalSetResult {
    #[serde(with = "serde_rational::vec")]
    pub point_u: RatVector,
    #[serde(with = "serde_rational::vec")]
    pub point_z: RatVector,
    /// `d x s` active-piece gradients.
    pub a: RatMatrix,
    /// `n x s` class indicators of the active pieces.
    pub b: RatMatrix,
    /// Normals of the domain constraints tight at `u`, one per row.
    pub domain_normals: RatMatrix,
    pub polytope: HPolytope,
}

impl PLSurrogate {
    pub fn new(n: usize, d: usize, components: Vec<Vec<AffinePiece>>, domain: Domain) -> Result<Self> {
        if components.len() != n || n == 0 {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: components.len(),
            });
        }
        for pieces in &components {
            if pieces.is_empty() {
                return Err(Error::InvalidInput("every component needs at least one piece".into()));
            }
            for piece in pieces {
                if piece.w.len() != d {
                    return Err(Error::DimensionMismatch {
                        expected: d,
                        got: piece.w.len(),
                    });
                }
            }
        }
        if let Domain::Polytope(p) = &domain {
            if p.dim() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    got: p.dim(),
                });
            }
        }
        let s = Self {
            n,
            d,
            components,
            domain,
        };
        s.check_nonnegative()?;
        Ok(s)
    }

    /// Minimizes each component over the domain by LP in `(u, t)`.
    fn check_nonnegative(&self) -> Result<()> {
        let (dom_ineq, dom_eq) = match &self.domain {
            Domain::Free => (Vec::new(), Vec::new()),
            Domain::Polytope(p) => (p.inequalities(), p.equalities()),
        };
        let lift = |(mut a, b): (RatVector, Rational)| {
            a.push(Rational::zero());
            (a, b)
        };
        for (y, pieces) in self.components.iter().enumerate() {
            let mut ineq: Vec<(RatVector, Rational)> = dom_ineq.iter().cloned().map(lift).collect();
            for piece in pieces {
                let mut row = piece.w.clone();
                row.push(-Rational::one());
                ineq.push((row, -piece.c.clone()));
            }
            let eq = dom_eq.iter().cloned().map(lift).collect();
            let aux = HPolytope::from_constraints(self.d + 1, ineq, eq)?;
            let mut obj = vec![Rational::zero(); self.d + 1];
            obj[self.d] = Rational::one();
            let r = aux.lp(&obj, Sense::Minimize)?;
            match r.status {
                LpStatus::Infeasible => return Err(Error::InvalidInput("surrogate domain is empty".into())),
                LpStatus::Unbounded => {
                    return Err(Error::InvalidInput(format!("component {} is unbounded below", y + 1)))
                }
                LpStatus::Feasible => {
                    if r.optimum.expect("optimum").is_negative() {
                        return Err(Error::InvalidInput(format!("component {} takes negative values", y + 1)));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn components(&self) -> &[Vec<AffinePiece>] {
        &self.components
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    fn check_point(&self, u: &[Rational]) -> Result<()> {
        if u.len() != self.d {
            return Err(Error::DimensionMismatch {
                expected: self.d,
                got: u.len(),
            });
        }
        if !self.domain.contains(u)? {
            return Err(Error::OutsideDomain);
        }
        Ok(())
    }

    pub fn evaluate(&self, u: &[Rational]) -> Result<RatVector> {
        self.check_point(u)?;
        Ok(self.components.iter().map(|pieces| max_piece(pieces, u)).collect())
    }

    /// Indices of the pieces of component `y` attaining the max at `u`.
    pub fn active_pieces(&self, y: usize, u: &[Rational]) -> Result<Vec<usize>> {
        self.check_point(u)?;
        let pieces = self.components.get(y).ok_or(Error::OutOfRange {
            index: y,
            size: self.n,
        })?;
        let best = max_piece(pieces, u);
        Ok((0..pieces.len()).filter(|&i| pieces[i].eval(u) == best).collect())
    }

    /// Distinct gradients of the active pieces of `psi_y` at `u`; their
    /// convex hull is the subdifferential.
    pub fn subdifferential_vertices(&self, y: usize, u: &[Rational]) -> Result<Vec<RatVector>> {
        let mut grads: Vec<RatVector> = Vec::new();
        for i in self.active_pieces(y, u)? {
            let w = &self.components[y][i].w;
            if !grads.contains(w) {
                grads.push(w.clone());
            }
        }
        Ok(grads)
    }

    /// Assembles `A`, `B` and the tight domain normals at `u`.
    fn normal_system(&self, u: &[Rational]) -> Result<(RatMatrix, RatMatrix, RatMatrix)> {
        let mut a_cols: Vec<RatVector> = Vec::new();
        let mut b_cols: Vec<RatVector> = Vec::new();
        for y in 0..self.n {
            for g in self.subdifferential_vertices(y, u)? {
                a_cols.push(g);
                let mut e = vec![Rational::zero(); self.n];
                e[y] = Rational::one();
                b_cols.push(e);
            }
        }
        let a = RatMatrix::from_columns(self.d, &a_cols)?;
        let b = RatMatrix::from_columns(self.n, &b_cols)?;
        let normals = match &self.domain {
            Domain::Free => RatMatrix::zeros(0, self.d),
            Domain::Polytope(p) => p.ineq().select_rows(&p.active_rows(u)?),
        };
        Ok((a, b, normals))
    }

    /// Constraints on `(q, lambda)`: `q, lambda >= 0`, `W (A q + G^T lambda) = 0`
    /// where `W` spans the directions allowed by the domain's equalities.
    fn multiplier_constraints(
        &self,
        a: &RatMatrix,
        normals: &RatMatrix,
    ) -> Result<(Vec<(RatVector, Rational)>, Vec<(RatVector, Rational)>)> {
        let s = a.cols();
        let m = normals.rows();
        let w_rows = match &self.domain {
            Domain::Polytope(p) if p.eq().rows() > 0 => p.eq().null_space_basis(),
            _ => RatMatrix::identity(self.d).row_vecs(),
        };
        let mut ineq = Vec::new();
        for i in 0..s + m {
            let mut row = vec![Rational::zero(); s + m];
            row[i] = -Rational::one();
            ineq.push((row, Rational::zero()));
        }
        let mut eq = Vec::new();
        for w in &w_rows {
            let mut row: RatVector = (0..s).map(|j| dot(w, &a.column(j))).collect();
            row.extend((0..m).map(|i| dot(w, normals.row(i))));
            if row.iter().any(|x| !x.is_zero()) {
                eq.push((row, Rational::zero()));
            }
        }
        Ok((ineq, eq))
    }

    pub fn positive_normal_set(&self, u: &[Rational]) -> Result<NormalSetResult> {
        let z = self.evaluate(u)?;
        let (a, b, normals) = self.normal_system(u)?;
        let s = a.cols();
        let (ineq, mut eq) = self.multiplier_constraints(&a, &normals)?;
        let mut sum = vec![Rational::one(); s];
        sum.resize(s + normals.rows(), Rational::zero());
        eq.push((sum, Rational::one()));
        let qpoly = HPolytope::from_constraints(s + normals.rows(), ineq, eq)?;
        let images: Vec<RatVector> = qpoly
            .basic_feasible_points(DEFAULT_VERTEX_BUDGET)?
            .iter()
            .map(|x| b.mul_vec(&x[..s]))
            .collect::<Result<_>>()?;
        let polytope = HPolytope::from_points(self.n, &images)?;
        Ok(NormalSetResult {
            point_u: u.to_vec(),
            point_z: z,
            a,
            b,
            domain_normals: normals,
            polytope,
        })
    }

    /// Whether `p` lies in the positive normal set at `u`, by LP feasibility
    /// of the multiplier system with `B q = p`.
    pub fn normal_membership(&self, u: &[Rational], p: &[Rational]) -> Result<bool> {
        check_distribution(p, self.n)?;
        self.check_point(u)?;
        let (a, b, normals) = self.normal_system(u)?;
        let width = a.cols() + normals.rows();
        let (ineq, mut eq) = self.multiplier_constraints(&a, &normals)?;
        for y in 0..self.n {
            let mut row = b.row(y).to_vec();
            row.resize(width, Rational::zero());
            eq.push((row, p[y].clone()));
        }
        let sys = HPolytope::from_constraints(width, ineq, eq)?;
        Ok(!sys.is_empty())
    }

    /// Grid over the domain (or the box `[lo, hi]^d` for a free domain).
    pub fn grid(&self, lo: &Rational, hi: &Rational, step: &Rational) -> Result<Vec<RatVector>> {
        let axis = axis_points(lo, hi, step);
        let mut pts: Vec<RatVector> = vec![Vec::new()];
        for _ in 0..self.d {
            pts = pts
                .into_iter()
                .flat_map(|p| {
                    axis.iter().map(move |x| {
                        let mut q = p.clone();
                        q.push(x.clone());
                        q
                    })
                })
                .collect();
        }
        let mut out = Vec::new();
        for p in pts {
            if self.domain.contains(&p)? {
                out.push(p);
            }
        }
        Ok(out)
    }

    /// Scalar surrogates: the label points `1..n`, every kink of a component
    /// and midpoints between consecutive ones. Vector surrogates: the unit
    /// vectors followed by the origin. Points outside the domain are dropped.
    pub fn default_points(&self) -> Vec<RatVector> {
        let candidates: Vec<RatVector> = if self.d == 1 {
            let mut xs: Vec<Rational> = (1..=self.n as i64).map(int).collect();
            for pieces in &self.components {
                for (i, p) in pieces.iter().enumerate() {
                    for q in &pieces[i + 1..] {
                        if p.w[0] == q.w[0] {
                            continue;
                        }
                        let x = (&q.c - &p.c) / (&p.w[0] - &q.w[0]);
                        let u = [x.clone()];
                        let top = max_piece(pieces, &u);
                        if p.eval(&u) == top && q.eval(&u) == top {
                            xs.push(x);
                        }
                    }
                }
            }
            xs.sort();
            xs.dedup();
            let mids: Vec<Rational> = xs.windows(2).map(|w| (&w[0] + &w[1]) / int(2)).collect();
            xs.extend(mids);
            xs.sort();
            xs.dedup();
            xs.into_iter().map(|x| vec![x]).collect()
        } else {
            let mut pts: Vec<RatVector> = RatMatrix::identity(self.d).row_vecs();
            pts.push(vec![Rational::zero(); self.d]);
            pts
        };
        candidates
            .into_iter()
            .filter(|u| self.domain.contains(u).unwrap_or(false))
            .collect()
    }
}

impl NormalSets for PLSurrogate {
    fn n(&self) -> usize {
        self.n
    }

    fn value(&self, u: &[Rational]) -> Result<RatVector> {
        self.evaluate(u)
    }

    fn normal_set(&self, u: &[Rational]) -> Result<HPolytope> {
        Ok(self.positive_normal_set(u)?.polytope)
    }

    fn default_points(&self) -> Vec<RatVector> {
        PLSurrogate::default_points(self)
    }
}

fn max_piece(pieces: &[AffinePiece], u: &[Rational]) -> Rational {
    pieces.iter().map(|p| p.eval(u)).max().expect("non-empty pieces")
}

fn axis_points(lo: &Rational, hi: &Rational, step: &Rational) -> Vec<Rational> {
    assert!(step.is_positive(), "grid step must be positive");
    let mut out = Vec::new();
    let mut x = lo.clone();
    while &x <= hi {
        out.push(x.clone());
        x += step;
    }
    out
}

/// `psi_y(u) = max(0, max_{y' != y} 1 - u_y + u_y')` on `R^n`.
pub fn crammer_singer(n: usize) -> Result<PLSurrogate> {
    if n < 2 {
        return Err(Error::InvalidInput("Crammer-Singer surrogate needs n >= 2".into()));
    }
    let components = (0..n)
        .map(|y| {
            let mut pieces = vec![AffinePiece::new(vec![Rational::zero(); n], Rational::zero())];
            for other in (0..n).filter(|&o| o != y) {
                let mut w = vec![Rational::zero(); n];
                w[y] = -Rational::one();
                w[other] = Rational::one();
                pieces.push(AffinePiece::new(w, Rational::one()));
            }
            pieces
        })
        .collect();
    PLSurrogate::new(n, n, components, Domain::Free)
}

/// `psi_y(u) = |u - y|` on `R`.
pub fn absolute(n: usize) -> Result<PLSurrogate> {
    eps_insensitive(n, &Rational::zero())
}

/// `psi_y(u) = max(|u - y| - eps, 0)` on `R`; with `eps = 0` this is the
/// absolute surrogate.
pub fn eps_insensitive(n: usize, eps: &Rational) -> Result<PLSurrogate> {
    if n == 0 {
        return Err(Error::InvalidInput("need at least one class".into()));
    }
    if eps.is_negative() || *eps >= rat(1, 2) {
        return Err(Error::InvalidInput(format!("eps must lie in [0, 1/2), got {eps}")));
    }
    let components = (1..=n as i64)
        .map(|y| {
            let mut pieces = vec![
                AffinePiece::new(vec![Rational::one()], -int(y) - eps),
                AffinePiece::new(vec![-Rational::one()], int(y) - eps),
            ];
            if eps.is_positive() {
                pieces.push(AffinePiece::new(vec![Rational::zero()], Rational::zero()));
            }
            pieces
        })
        .collect();
    PLSurrogate::new(n, 1, components, Domain::Free)
}

#[derive(Serialize, Deserialize)]
struct PLRepr {
    n: usize,
    d: usize,
    components: Vec<Vec<AffinePiece>>,
    domain: Domain,
}

impl Serialize for PLSurrogate {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        PLRepr {
            n: self.n,
            d: self.d,
            components: self.components.clone(),
            domain: self.domain.clone(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for PLSurrogate {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let r = PLRepr::deserialize(deserializer)?;
        PLSurrogate::new(r.n, r.d, r.components, r.domain).map_err(serde::de::Error::custom)
    }
}

/// `psi_y(u) = 1(y != n) (u_y - 1)^2 + sum_{j < n, j != y} u_j^2` on
/// `{u >= 0 : sum u <= 1}` in `R^(n-1)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadraticProbSurrogate {
    n: usize,
}

impl QuadraticProbSurrogate {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidInput("quadratic surrogate needs n >= 2".into()));
        }
        Ok(Self { n })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.n - 1
    }

    fn check_point(&self, u: &[Rational]) -> Result<()> {
        if u.len() != self.d() {
            return Err(Error::DimensionMismatch {
                expected: self.d(),
                got: u.len(),
            });
        }
        if u.iter().any(Signed::is_negative) || u.iter().sum::<Rational>() > Rational::one() {
            return Err(Error::OutsideDomain);
        }
        Ok(())
    }

    /// `psi_y(u)` for zero-based class `y`.
    pub fn evaluate(&self, y: usize, u: &[Rational]) -> Result<Rational> {
        self.check_point(u)?;
        if y >= self.n {
            return Err(Error::OutOfRange { index: y, size: self.n });
        }
        Ok(u.iter()
            .enumerate()
            .map(|(j, x)| if j == y { (x - Rational::one()) * (x - Rational::one()) } else { x * x })
            .sum())
    }

    /// The first `n - 1` coordinates of `p`.
    pub fn minimizer(&self, p: &[Rational]) -> Result<RatVector> {
        check_distribution(p, self.n)?;
        Ok(p[..self.n - 1].to_vec())
    }

    /// `sum_{j < n} p_j (1 - p_j)`, the minimum of `sum_y p_y psi_y`.
    pub fn min_inner_risk(&self, p: &[Rational]) -> Result<Rational> {
        check_distribution(p, self.n)?;
        Ok(p[..self.n - 1].iter().map(|x| x * (Rational::one() - x)).sum())
    }

    /// `sum_y p_y psi_y(u)`.
    pub fn inner_risk(&self, p: &[Rational], u: &[Rational]) -> Result<Rational> {
        check_distribution(p, self.n)?;
        let mut total = Rational::zero();
        for (y, py) in p.iter().enumerate() {
            total += py * self.evaluate(y, u)?;
        }
        Ok(total)
    }
}

/// `psi(u) = M u - r` on the convex hull of anchor points, built so that
/// `psi(anchor_t) = l_t`.
#[derive(Clone, Debug, Serialize)]
pub struct LinearEmbedSurrogate {
    n: usize,
    d: usize,
    map_matrix: RatMatrix,
    #[serde(with = "serde_rational::vec")]
    translation: RatVector,
    #[serde(with = "serde_rational::vec_vec")]
    anchors: Vec<RatVector>,
    /// Columns `psi(anchor_t)`, which span the range of the surrogate.
    #[serde(skip)]
    columns: Vec<RatVector>,
    #[serde(skip)]
    domain: OnceLock<HPolytope>,
}

impl LinearEmbedSurrogate {
    /// Checks that every anchor maps to a nonnegative vector.
    pub fn new(map_matrix: RatMatrix, translation: RatVector, anchors: Vec<RatVector>) -> Result<Self> {
        let n = map_matrix.rows();
        let d = map_matrix.cols();
        if translation.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: translation.len(),
            });
        }
        if anchors.is_empty() {
            return Err(Error::InvalidInput("need at least one anchor".into()));
        }
        let mut columns = Vec::with_capacity(anchors.len());
        for u in &anchors {
            if u.len() != d {
                return Err(Error::DimensionMismatch { expected: d, got: u.len() });
            }
            let z: RatVector = map_matrix
                .mul_vec(u)?
                .iter()
                .zip(&translation)
                .map(|(a, b)| a - b)
                .collect();
            if z.iter().any(Signed::is_negative) {
                return Err(Error::InvalidInput("embedding takes negative values at an anchor".into()));
            }
            columns.push(z);
        }
        Ok(Self {
            n,
            d,
            map_matrix,
            translation,
            anchors,
            columns,
            domain: OnceLock::new(),
        })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn map_matrix(&self) -> &RatMatrix {
        &self.map_matrix
    }

    pub fn translation(&self) -> &[Rational] {
        &self.translation
    }

    pub fn anchors(&self) -> &[RatVector] {
        &self.anchors
    }

    /// H-representation of the convex hull of the anchors.
    pub fn domain(&self) -> Result<&HPolytope> {
        if let Some(p) = self.domain.get() {
            return Ok(p);
        }
        let hull = HPolytope::from_points(self.d, &self.anchors)?;
        Ok(self.domain.get_or_init(|| hull))
    }

    /// Convex weights on the anchors reproducing `u`, if `u` is in the hull.
    pub fn hull_weights(&self, u: &[Rational]) -> Result<Option<RatVector>> {
        if u.len() != self.d {
            return Err(Error::DimensionMismatch {
                expected: self.d,
                got: u.len(),
            });
        }
        let k = self.anchors.len();
        let ineq = RatMatrix::from_rows(
            k,
            (0..k)
                .map(|i| {
                    let mut r = vec![Rational::zero(); k];
                    r[i] = -Rational::one();
                    r
                })
                .collect(),
        )?;
        let mut eq_rows: Vec<RatVector> = (0..self.d).map(|j| self.anchors.iter().map(|a| a[j].clone()).collect()).collect();
        eq_rows.push(vec![Rational::one(); k]);
        let mut eq_b = u.to_vec();
        eq_b.push(Rational::one());
        let eq = RatMatrix::from_rows(k, eq_rows)?;
        let r = lp::solve(&vec![Rational::zero(); k], Sense::Minimize, &ineq, &vec![Rational::zero(); k], &eq, &eq_b);
        Ok(r.witness)
    }

    pub fn evaluate(&self, u: &[Rational]) -> Result<RatVector> {
        if self.hull_weights(u)?.is_none() {
            return Err(Error::OutsideDomain);
        }
        Ok(self
            .map_matrix
            .mul_vec(u)?
            .iter()
            .zip(&self.translation)
            .map(|(a, b)| a - b)
            .collect())
    }

    /// `{p in simplex : p . psi(u) <= p . psi(anchor_t) for all t}`; the range
    /// of an affine map on a polytope is the hull of the anchor images.
    pub fn positive_normal_set(&self, u: &[Rational]) -> Result<HPolytope> {
        let z = self.evaluate(u)?;
        let rows = self
            .columns
            .iter()
            .map(|c| z.iter().zip(c).map(|(a, b)| a - b).collect::<RatVector>())
            .filter(|r| r.iter().any(|x| !x.is_zero()))
            .map(|r| (r, Rational::zero()))
            .collect();
        HPolytope::simplex(self.n)?.with_constraints(rows, vec![])
    }
}

impl NormalSets for LinearEmbedSurrogate {
    fn n(&self) -> usize {
        self.n
    }

    fn value(&self, u: &[Rational]) -> Result<RatVector> {
        self.evaluate(u)
    }

    fn normal_set(&self, u: &[Rational]) -> Result<HPolytope> {
        self.positive_normal_set(u)
    }

    fn default_points(&self) -> Vec<RatVector> {
        self.anchors.clone()
    }
}
