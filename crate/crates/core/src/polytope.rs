//! H-represented polyhedra: membership, LP, vertex enumeration, containment.

use std::fmt;
use std::sync::OnceLock;

use itertools::Itertools;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::linalg::{dot, normalize_direction, serde_rational, sub_vec, RatMatrix, RatVector, Rational};
use crate::lp::{self, LpResult, LpStatus, Sense};

/// Default cap on the number of constraint subsets examined by vertex
/// enumeration.
pub const DEFAULT_VERTEX_BUDGET: u128 = 2_000_000;

/// `{q : ineq q <= ineq_b, eq q = eq_b}`.
pub struct HPolytope {
    dim: usize,
    ineq: RatMatrix,
    ineq_b: RatVector,
    eq: RatMatrix,
    eq_b: RatVector,
    vertex_cache: OnceLock<Vec<RatVector>>,
}

impl Clone for HPolytope {
    fn clone(&self) -> Self {
        let vertex_cache = OnceLock::new();
        if let Some(v) = self.vertex_cache.get() {
            let _ = vertex_cache.set(v.clone());
        }
        Self {
            dim: self.dim,
            ineq: self.ineq.clone(),
            ineq_b: self.ineq_b.clone(),
            eq: self.eq.clone(),
            eq_b: self.eq_b.clone(),
            vertex_cache,
        }
    }
}

/// Structural equality of the constraint lists (not set equality; see
/// [`HPolytope::equals_polytope`]).
impl PartialEq for HPolytope {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim
            && self.ineq == other.ineq
            && self.ineq_b == other.ineq_b
            && self.eq == other.eq
            && self.eq_b == other.eq_b
    }
}

impl fmt::Debug for HPolytope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "HPolytope(dim={}) {{", self.dim)?;
        for (i, b) in self.ineq_b.iter().enumerate() {
            let row = self.ineq.row(i).iter().map(|x| x.to_string()).join(", ");
            writeln!(f, "  [{row}] <= {b}")?;
        }
        for (i, b) in self.eq_b.iter().enumerate() {
            let row = self.eq.row(i).iter().map(|x| x.to_string()).join(", ");
            writeln!(f, "  [{row}] == {b}")?;
        }
        write!(f, "}}")
    }
}

impl HPolytope {
    pub fn new(
        dim: usize,
        ineq: RatMatrix,
        ineq_b: RatVector,
        eq: RatMatrix,
        eq_b: RatVector,
    ) -> Result<Self> {
        for (m, b) in [(&ineq, &ineq_b), (&eq, &eq_b)] {
            if m.cols() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: m.cols(),
                });
            }
            if m.rows() != b.len() {
                return Err(Error::DimensionMismatch {
                    expected: m.rows(),
                    got: b.len(),
                });
            }
        }
        Ok(Self {
            dim,
            ineq,
            ineq_b,
            eq,
            eq_b,
            vertex_cache: OnceLock::new(),
        })
    }

    /// Builds from `(row, rhs)` pairs.
    pub fn from_constraints(
        dim: usize,
        ineq: Vec<(RatVector, Rational)>,
        eq: Vec<(RatVector, Rational)>,
    ) -> Result<Self> {
        let (ia, ib): (Vec<_>, Vec<_>) = ineq.into_iter().unzip();
        let (ea, eb): (Vec<_>, Vec<_>) = eq.into_iter().unzip();
        Self::new(
            dim,
            RatMatrix::from_rows(dim, ia)?,
            ib,
            RatMatrix::from_rows(dim, ea)?,
            eb,
        )
    }

    /// The empty set in `Q^dim`.
    pub fn empty(dim: usize) -> Self {
        Self::from_constraints(dim, vec![(vec![Rational::zero(); dim], -Rational::one())], vec![])
            .expect("widths agree")
    }

    /// The probability simplex `{p >= 0 : sum p = 1}`.
    pub fn simplex(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInput("simplex dimension must be at least 1".into()));
        }
        let ineq = (0..n)
            .map(|i| {
                let mut row = vec![Rational::zero(); n];
                row[i] = -Rational::one();
                (row, Rational::zero())
            })
            .collect();
        Self::from_constraints(n, ineq, vec![(vec![Rational::one(); n], Rational::one())])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn ineq(&self) -> &RatMatrix {
        &self.ineq
    }

    pub fn ineq_b(&self) -> &[Rational] {
        &self.ineq_b
    }

    pub fn eq(&self) -> &RatMatrix {
        &self.eq
    }

    pub fn eq_b(&self) -> &[Rational] {
        &self.eq_b
    }

    pub fn inequalities(&self) -> Vec<(RatVector, Rational)> {
        self.ineq.row_vecs().into_iter().zip(self.ineq_b.iter().cloned()).collect()
    }

    pub fn equalities(&self) -> Vec<(RatVector, Rational)> {
        self.eq.row_vecs().into_iter().zip(self.eq_b.iter().cloned()).collect()
    }

    /// Adds constraints, returning a new polytope.
    pub fn with_constraints(
        &self,
        ineq: Vec<(RatVector, Rational)>,
        eq: Vec<(RatVector, Rational)>,
    ) -> Result<Self> {
        let mut all_ineq = self.inequalities();
        all_ineq.extend(ineq);
        let mut all_eq = self.equalities();
        all_eq.extend(eq);
        Self::from_constraints(self.dim, all_ineq, all_eq)
    }

    pub fn intersect(&self, other: &HPolytope) -> Result<Self> {
        self.check_dim(other.dim)?;
        self.with_constraints(other.inequalities(), other.equalities())
    }

    fn check_dim(&self, got: usize) -> Result<()> {
        if got != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got,
            });
        }
        Ok(())
    }

    pub fn contains_point(&self, q: &[Rational]) -> Result<bool> {
        self.check_dim(q.len())?;
        let ineq_ok = (0..self.ineq.rows()).all(|i| dot(self.ineq.row(i), q) <= self.ineq_b[i]);
        let eq_ok = (0..self.eq.rows()).all(|i| dot(self.eq.row(i), q) == self.eq_b[i]);
        Ok(ineq_ok && eq_ok)
    }

    /// Exact LP over the polytope.
    pub fn lp(&self, objective: &[Rational], sense: Sense) -> Result<LpResult> {
        self.check_dim(objective.len())?;
        Ok(lp::solve(objective, sense, &self.ineq, &self.ineq_b, &self.eq, &self.eq_b))
    }

    pub fn is_empty(&self) -> bool {
        let zero = vec![Rational::zero(); self.dim];
        !self.lp(&zero, Sense::Minimize).expect("dims agree").is_feasible()
    }

    /// Some point of the polytope, if any.
    pub fn any_point(&self) -> Option<RatVector> {
        let zero = vec![Rational::zero(); self.dim];
        self.lp(&zero, Sense::Minimize).expect("dims agree").witness
    }

    /// True when every coordinate is bounded above and below (or the set is empty).
    pub fn is_bounded(&self) -> bool {
        for i in 0..self.dim {
            let mut c = vec![Rational::zero(); self.dim];
            c[i] = Rational::one();
            for sense in [Sense::Minimize, Sense::Maximize] {
                match self.lp(&c, sense).expect("dims agree").status {
                    LpStatus::Unbounded => return false,
                    LpStatus::Infeasible => return true,
                    LpStatus::Feasible => {}
                }
            }
        }
        true
    }

    /// Exact vertex set, sorted lexicographically. Errors on unbounded input.
    pub fn vertices(&self) -> Result<&[RatVector]> {
        self.vertices_with_budget(DEFAULT_VERTEX_BUDGET)
    }

    pub fn vertices_with_budget(&self, budget: u128) -> Result<&[RatVector]> {
        if let Some(v) = self.vertex_cache.get() {
            return Ok(v);
        }
        if !self.is_bounded() {
            return Err(Error::Unbounded);
        }
        let computed = self.basic_feasible_points(budget)?;
        Ok(self.vertex_cache.get_or_init(|| computed))
    }

    /// Vertices of a pointed polyhedron, bounded or not: every feasible basic
    /// solution, deduplicated and sorted. Does not check boundedness.
    pub fn basic_feasible_points(&self, budget: u128) -> Result<Vec<RatVector>> {
        // Parametrize the affine hull of the equalities: q = x0 + N z.
        let Some(x0) = self.eq.solve(&self.eq_b)? else {
            return Ok(Vec::new());
        };
        let basis = self.eq.null_space_basis();
        let free = basis.len();
        // Inequalities in z: (A N) z <= b - A x0.
        let rows: Vec<(RatVector, Rational)> = (0..self.ineq.rows())
            .map(|i| {
                let a = self.ineq.row(i);
                let coeffs: RatVector = basis.iter().map(|v| dot(a, v)).collect();
                (coeffs, &self.ineq_b[i] - dot(a, &x0))
            })
            .collect();
        let lift = |z: &[Rational]| -> RatVector {
            let mut q = x0.clone();
            for (zi, v) in z.iter().zip(&basis) {
                for (qj, vj) in q.iter_mut().zip(v) {
                    *qj += zi * vj;
                }
            }
            q
        };
        let feasible = |z: &[Rational]| rows.iter().all(|(a, b)| dot(a, z) <= *b);

        if free == 0 {
            return Ok(if feasible(&[]) { vec![x0] } else { Vec::new() });
        }
        // Rows that are identically zero in z never help pin a vertex.
        let useful: Vec<usize> = (0..rows.len()).filter(|&i| !rows[i].0.iter().all(Zero::is_zero)).collect();
        if rows.iter().any(|(a, b)| a.iter().all(Zero::is_zero) && b.is_negative()) {
            return Ok(Vec::new());
        }
        let needed = binomial(useful.len() as u128, free as u128);
        if needed > budget {
            return Err(Error::BudgetExceeded { needed, budget });
        }
        let mut out: Vec<RatVector> = Vec::new();
        for subset in useful.iter().copied().combinations(free) {
            let m = RatMatrix::from_rows(free, subset.iter().map(|&i| rows[i].0.clone()).collect())?;
            let rhs: RatVector = subset.iter().map(|&i| rows[i].1.clone()).collect();
            let (_, pivots) = m.rref();
            if pivots.len() < free {
                continue;
            }
            let Some(z) = m.solve(&rhs)? else { continue };
            if feasible(&z) {
                out.push(lift(&z));
            }
        }
        out.sort();
        out.dedup();
        Ok(out)
    }

    /// `other ⊆ self`, decided by maximizing each of `self`'s constraint
    /// functionals over `other`. Errors if one of those LPs is unbounded.
    pub fn contains_polytope(&self, other: &HPolytope) -> Result<bool> {
        Ok(self.containment_violation(other)?.is_none())
    }

    /// A point of `other` outside `self`, or `None` when `other ⊆ self`.
    pub fn containment_violation(&self, other: &HPolytope) -> Result<Option<RatVector>> {
        self.check_dim(other.dim)?;
        if other.is_empty() {
            return Ok(None);
        }
        let mut checks: Vec<(RatVector, Rational, Sense)> = Vec::new();
        for (a, b) in self.inequalities() {
            checks.push((a, b, Sense::Maximize));
        }
        for (a, b) in self.equalities() {
            checks.push((a.clone(), b.clone(), Sense::Maximize));
            checks.push((a, b, Sense::Minimize));
        }
        for (a, b, sense) in checks {
            let r = other.lp(&a, sense)?;
            match r.status {
                LpStatus::Unbounded => return Err(Error::Unbounded),
                LpStatus::Infeasible => return Ok(None),
                LpStatus::Feasible => {
                    let v = r.optimum.expect("feasible LP has optimum");
                    let violated = match sense {
                        Sense::Maximize => v > b,
                        Sense::Minimize => v < b,
                    };
                    if violated {
                        return Ok(r.witness);
                    }
                }
            }
        }
        Ok(None)
    }

    pub fn equals_polytope(&self, other: &HPolytope) -> Result<bool> {
        Ok(self.contains_polytope(other)? && other.contains_polytope(self)?)
    }

    /// Maximizes a common slack `eps <= 1` on the selected inequality rows and
    /// returns the optimal point when `eps > 0`.
    pub fn strict_interior_point(&self, strict_rows: &[usize]) -> Result<Option<RatVector>> {
        for &i in strict_rows {
            if i >= self.ineq.rows() {
                return Err(Error::OutOfRange {
                    index: i,
                    size: self.ineq.rows(),
                });
            }
        }
        let d = self.dim + 1;
        let mut ineq: Vec<(RatVector, Rational)> = Vec::new();
        for i in 0..self.ineq.rows() {
            let mut row = self.ineq.row(i).to_vec();
            row.push(if strict_rows.contains(&i) {
                Rational::one()
            } else {
                Rational::zero()
            });
            ineq.push((row, self.ineq_b[i].clone()));
        }
        let mut cap = vec![Rational::zero(); d];
        cap[self.dim] = Rational::one();
        ineq.push((cap.clone(), Rational::one()));
        let eq = self
            .equalities()
            .into_iter()
            .map(|(mut a, b)| {
                a.push(Rational::zero());
                (a, b)
            })
            .collect();
        let aux = HPolytope::from_constraints(d, ineq, eq)?;
        let r = aux.lp(&cap, Sense::Maximize)?;
        match (r.optimum, r.witness) {
            (Some(eps), Some(mut w)) if eps.is_positive() => {
                w.pop();
                Ok(Some(w))
            }
            _ => Ok(None),
        }
    }

    /// Indices of the inequality rows tight at `q`.
    pub fn active_rows(&self, q: &[Rational]) -> Result<Vec<usize>> {
        self.check_dim(q.len())?;
        Ok((0..self.ineq.rows()).filter(|&i| dot(self.ineq.row(i), q) == self.ineq_b[i]).collect())
    }

    /// Dimension of the smallest face containing `q`: nullity of the active
    /// inequality rows stacked on the equality rows.
    pub fn feasible_subspace_dim(&self, q: &[Rational]) -> Result<usize> {
        if !self.contains_point(q)? {
            return Err(Error::OutsideDomain);
        }
        let active = self.active_rows(q)?;
        let stack = self.ineq.select_rows(&active).vstack(&self.eq)?;
        Ok(stack.nullity())
    }

    /// H-representation of the convex hull of finitely many points, via the
    /// affine hull plus facet enumeration over point subsets.
    pub fn from_points(dim: usize, points: &[RatVector]) -> Result<Self> {
        for p in points {
            if p.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: p.len(),
                });
            }
        }
        let mut pts = points.to_vec();
        pts.sort();
        pts.dedup();
        if pts.is_empty() {
            return Ok(Self::empty(dim));
        }
        let p0 = pts[0].clone();
        let diffs: Vec<RatVector> = pts[1..].iter().map(|p| sub_vec(p, &p0)).collect();
        let normals = RatMatrix::from_rows(dim, diffs.clone())?.null_space_basis();
        let eq: Vec<(RatVector, Rational)> = normals
            .iter()
            .map(|h| (h.clone(), dot(h, &p0)))
            .collect();
        let affine_dim = dim - normals.len();

        let mut facets: Vec<(RatVector, Rational)> = Vec::new();
        if affine_dim > 0 {
            for subset in (0..pts.len()).combinations(affine_dim) {
                let base = &pts[subset[0]];
                let mut rows: Vec<RatVector> = normals.clone();
                rows.extend(subset[1..].iter().map(|&i| sub_vec(&pts[i], base)));
                let m = RatMatrix::from_rows(dim, rows)?;
                let ns = m.null_space_basis();
                if ns.len() != 1 {
                    continue;
                }
                let c = &ns[0];
                let off = dot(c, base);
                let (mut below, mut above) = (false, false);
                for p in &pts {
                    let v = dot(c, p);
                    if v < off {
                        below = true;
                    } else if v > off {
                        above = true;
                    }
                }
                let (c, off) = match (below, above) {
                    (true, false) => (c.clone(), off),
                    (false, true) => (c.iter().map(|x| -x).collect::<RatVector>(), -off),
                    _ => continue,
                };
                let lead = c.iter().find(|x| !x.is_zero()).expect("nonzero normal").abs();
                let c = normalize_direction(&c);
                let off = off / lead;
                if !facets.iter().any(|(fc, fo)| *fc == c && *fo == off) {
                    facets.push((c, off));
                }
            }
        }
        facets.sort();
        let poly = Self::from_constraints(dim, facets, eq)?;
        let _ = poly.vertex_cache.set(Self::hull_vertices(&poly, pts));
        Ok(poly)
    }

    /// Points of `pts` that are vertices of `poly`, i.e. whose active
    /// constraints pin them down.
    fn hull_vertices(poly: &HPolytope, pts: Vec<RatVector>) -> Vec<RatVector> {
        pts.into_iter()
            .filter(|p| {
                let active = poly.active_rows(p).expect("dims agree");
                let stack = poly
                    .ineq
                    .select_rows(&active)
                    .vstack(&poly.eq)
                    .expect("dims agree");
                stack.rank() == poly.dim
            })
            .collect()
    }
}

pub(crate) fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul(n - i) / (i + 1);
    }
    acc
}

#[derive(Serialize, Deserialize)]
struct HPolytopeRepr {
    dim: usize,
    #[serde(with = "serde_rational::vec_vec")]
    ineq: Vec<RatVector>,
    #[serde(with = "serde_rational::vec")]
    ineq_b: RatVector,
    #[serde(with = "serde_rational::vec_vec")]
    eq: Vec<RatVector>,
    #[serde(with = "serde_rational::vec")]
    eq_b: RatVector,
}

impl Serialize for HPolytope {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        HPolytopeRepr {
            dim: self.dim,
            ineq: self.ineq.row_vecs(),
            ineq_b: self.ineq_b.clone(),
            eq: self.eq.row_vecs(),
            eq_b: self.eq_b.clone(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for HPolytope {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let r = HPolytopeRepr::deserialize(deserializer)?;
        let build = || -> Result<Self> {
            Self::new(
                r.dim,
                RatMatrix::from_rows(r.dim, r.ineq.clone())?,
                r.ineq_b.clone(),
                RatMatrix::from_rows(r.dim, r.eq.clone())?,
                r.eq_b.clone(),
            )
        };
        build().map_err(serde::de::Error::custom)
    }
}
