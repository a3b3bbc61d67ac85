//! Exact two-phase simplex over the rationals.
//!
//! Variables are free unless a constraint row of the form `-c * x_i <= 0`
//! (with `c > 0`) marks them nonnegative, in which case the row is absorbed
//! into the variable bound instead of becoming a slack row. Anti-cycling is
//! Bland's rule: lowest-index entering column, lowest-index leaving basic
//! variable among ratio ties.

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::linalg::{dot, serde_rational, RatMatrix, RatVector, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sense {
    Minimize,
    Maximize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LpStatus {
    /// An optimum exists and was attained.
    Feasible,
    Infeasible,
    Unbounded,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LpResult {
    pub status: LpStatus,
    #[serde(with = "serde_rational::option")]
    pub optimum: Option<Rational>,
    #[serde(with = "serde_rational::option_vec")]
    pub witness: Option<RatVector>,
}

impl LpResult {
    fn infeasible() -> Self {
        Self {
            status: LpStatus::Infeasible,
            optimum: None,
            witness: None,
        }
    }

    fn unbounded() -> Self {
        Self {
            status: LpStatus::Unbounded,
            optimum: None,
            witness: None,
        }
    }

    pub fn is_feasible(&self) -> bool {
        self.status == LpStatus::Feasible
    }
}

/// Optimizes `objective . x` subject to `ineq_a x <= ineq_b`, `eq_a x = eq_b`.
pub fn solve(
    objective: &[Rational],
    sense: Sense,
    ineq_a: &RatMatrix,
    ineq_b: &[Rational],
    eq_a: &RatMatrix,
    eq_b: &[Rational],
) -> LpResult {
    let dim = objective.len();
    debug_assert_eq!(ineq_a.cols(), dim);
    debug_assert_eq!(eq_a.cols(), dim);

    // Detect sign bounds so they do not cost a split variable and a slack.
    let mut nonneg = vec![false; dim];
    let mut general_rows = Vec::new();
    for i in 0..ineq_a.rows() {
        let row = ineq_a.row(i);
        let nz: Vec<usize> = (0..dim).filter(|&j| !row[j].is_zero()).collect();
        if nz.len() == 1 && row[nz[0]].is_negative() && ineq_b[i].is_zero() {
            nonneg[nz[0]] = true;
        } else if nz.is_empty() {
            if ineq_b[i].is_negative() {
                return LpResult::infeasible();
            }
        } else {
            general_rows.push(i);
        }
    }

    // Column layout: one column per nonnegative variable, two per free one,
    // then one slack per general inequality row.
    let mut var_cols: Vec<(usize, Option<usize>)> = Vec::with_capacity(dim);
    let mut ncols = 0;
    for &nn in &nonneg {
        if nn {
            var_cols.push((ncols, None));
            ncols += 1;
        } else {
            var_cols.push((ncols, Some(ncols + 1)));
            ncols += 2;
        }
    }
    let slack_start = ncols;
    ncols += general_rows.len();
    let m = general_rows.len() + eq_a.rows();
    let art_start = ncols;
    let total = ncols + m;

    let mut rows: Vec<Vec<Rational>> = Vec::with_capacity(m);
    let push_row = |coeffs: &[Rational], slack: Option<usize>, rhs: &Rational, rows: &mut Vec<Vec<Rational>>| {
        let mut r = vec![Rational::zero(); total + 1];
        for (j, c) in coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let (p, n) = var_cols[j];
            r[p] = c.clone();
            if let Some(n) = n {
                r[n] = -c.clone();
            }
        }
        if let Some(s) = slack {
            r[s] = Rational::one();
        }
        r[total] = rhs.clone();
        if rhs.is_negative() {
            for v in r.iter_mut() {
                *v = -v.clone();
            }
        }
        let idx = rows.len();
        r[art_start + idx] = Rational::one();
        rows.push(r);
    };
    for (k, &i) in general_rows.iter().enumerate() {
        push_row(ineq_a.row(i), Some(slack_start + k), &ineq_b[i], &mut rows);
    }
    for i in 0..eq_a.rows() {
        push_row(eq_a.row(i), None, &eq_b[i], &mut rows);
    }

    let mut tab = Tableau {
        rows,
        basis: (art_start..art_start + m).collect(),
        width: total,
    };

    // Phase 1: minimize the sum of artificials.
    let mut phase1_cost = vec![Rational::zero(); total];
    for c in phase1_cost.iter_mut().skip(art_start) {
        *c = Rational::one();
    }
    let ok = tab.optimize(&phase1_cost, total);
    debug_assert!(ok, "phase one is bounded below by zero");
    let infeas: Rational = tab
        .basis
        .iter()
        .enumerate()
        .filter(|(_, &b)| b >= art_start)
        .map(|(i, _)| tab.rows[i][total].clone())
        .sum();
    if infeas.is_positive() {
        return LpResult::infeasible();
    }
    tab.drive_out_artificials(art_start);

    // Phase 2.
    let mut cost = vec![Rational::zero(); total];
    for (j, c) in objective.iter().enumerate() {
        let c = match sense {
            Sense::Minimize => c.clone(),
            Sense::Maximize => -c.clone(),
        };
        let (p, n) = var_cols[j];
        cost[p] = c.clone();
        if let Some(n) = n {
            cost[n] = -c;
        }
    }
    if !tab.optimize(&cost, art_start) {
        return LpResult::unbounded();
    }

    let mut values = vec![Rational::zero(); total];
    for (i, &b) in tab.basis.iter().enumerate() {
        values[b] = tab.rows[i][total].clone();
    }
    let x: RatVector = var_cols
        .iter()
        .map(|&(p, n)| match n {
            Some(n) => &values[p] - &values[n],
            None => values[p].clone(),
        })
        .collect();
    LpResult {
        status: LpStatus::Feasible,
        optimum: Some(dot(objective, &x)),
        witness: Some(x),
    }
}

struct Tableau {
    rows: Vec<Vec<Rational>>,
    basis: Vec<usize>,
    /// Number of structural + slack + artificial columns; column `width`
    /// holds the right-hand side.
    width: usize,
}

impl Tableau {
    /// Runs simplex iterations minimizing `cost`, with entering columns
    /// restricted to `0..allowed`. Returns false on unboundedness.
    fn optimize(&mut self, cost: &[Rational], allowed: usize) -> bool {
        loop {
            let entering = (0..allowed).find(|&j| {
                if self.basis.contains(&j) {
                    return false;
                }
                let mut reduced = cost[j].clone();
                for (i, &b) in self.basis.iter().enumerate() {
                    if !cost[b].is_zero() && !self.rows[i][j].is_zero() {
                        reduced -= &cost[b] * &self.rows[i][j];
                    }
                }
                reduced.is_negative()
            });
            let Some(col) = entering else {
                return true;
            };
            let mut leave: Option<(usize, Rational)> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][col];
                if !a.is_positive() {
                    continue;
                }
                let ratio = &self.rows[i][self.width] / a;
                leave = match leave {
                    None => Some((i, ratio)),
                    Some((li, lr)) => {
                        if ratio < lr || (ratio == lr && self.basis[i] < self.basis[li]) {
                            Some((i, ratio))
                        } else {
                            Some((li, lr))
                        }
                    }
                };
            }
            let Some((row, _)) = leave else {
                return false;
            };
            self.pivot(row, col);
        }
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let inv = self.rows[r][c].recip();
        for v in self.rows[r].iter_mut() {
            if !v.is_zero() {
                *v = &*v * &inv;
            }
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let factor = row[c].clone();
            for (v, p) in row.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *v -= &factor * p;
                }
            }
        }
        self.basis[r] = c;
    }

    fn drive_out_artificials(&mut self, art_start: usize) {
        let mut i = 0;
        while i < self.rows.len() {
            if self.basis[i] < art_start {
                i += 1;
                continue;
            }
            match (0..art_start).find(|&j| !self.rows[i][j].is_zero()) {
                Some(j) => {
                    self.pivot(i, j);
                    i += 1;
                }
                None => {
                    // Redundant equality: the row is zero on all real columns.
                    self.rows.remove(i);
                    self.basis.remove(i);
                }
            }
        }
    }
}
