//! Loss matrices, their trigger probability sets and Bayes geometry.
//!
//! Indices are zero-based throughout the library: class `y` is row `y`,
//! prediction `t` is column `t`. Labels carry the human-facing names.

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::linalg::{dot, int, parse_rational, rat, serde_rational, sub_vec, RatMatrix, RatVector, Rational};
use crate::lp::Sense;
use crate::polytope::HPolytope;

/// An `n x k` loss matrix: entry `(y, t)` is the loss of predicting `t`
/// when the label is `y`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LossMatrix {
    entries: RatMatrix,
    row_labels: Vec<String>,
    col_labels: Vec<String>,
    /// Negative entries allowed (row-shifted matrices such as centered
    /// pairwise losses).
    signed: bool,
}

fn numbered(count: usize) -> Vec<String> {
    (1..=count).map(|i| i.to_string()).collect()
}

impl LossMatrix {
    /// A nonnegative loss matrix with labels `1..n` and `1..k`.
    pub fn new(entries: RatMatrix) -> Result<Self> {
        if entries.rows() == 0 || entries.cols() == 0 {
            return Err(Error::InvalidInput("loss matrix needs at least one row and one column".into()));
        }
        if !entries.is_nonnegative() {
            return Err(Error::InvalidInput("loss entries must be nonnegative".into()));
        }
        Ok(Self {
            row_labels: numbered(entries.rows()),
            col_labels: numbered(entries.cols()),
            entries,
            signed: false,
        })
    }

    /// Like [`LossMatrix::new`] but permits negative entries.
    pub fn new_signed(entries: RatMatrix) -> Result<Self> {
        if entries.rows() == 0 || entries.cols() == 0 {
            return Err(Error::InvalidInput("loss matrix needs at least one row and one column".into()));
        }
        Ok(Self {
            row_labels: numbered(entries.rows()),
            col_labels: numbered(entries.cols()),
            entries,
            signed: true,
        })
    }

    pub fn with_labels(mut self, row_labels: Vec<String>, col_labels: Vec<String>) -> Result<Self> {
        if row_labels.len() != self.n() {
            return Err(Error::DimensionMismatch {
                expected: self.n(),
                got: row_labels.len(),
            });
        }
        if col_labels.len() != self.k() {
            return Err(Error::DimensionMismatch {
                expected: self.k(),
                got: col_labels.len(),
            });
        }
        self.row_labels = row_labels;
        self.col_labels = col_labels;
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.entries.rows()
    }

    pub fn k(&self) -> usize {
        self.entries.cols()
    }

    pub fn entries(&self) -> &RatMatrix {
        &self.entries
    }

    pub fn entry(&self, y: usize, t: usize) -> &Rational {
        &self.entries[(y, t)]
    }

    pub fn column(&self, t: usize) -> RatVector {
        self.entries.column(t)
    }

    pub fn columns(&self) -> Vec<RatVector> {
        (0..self.k()).map(|t| self.column(t)).collect()
    }

    pub fn row_labels(&self) -> &[String] {
        &self.row_labels
    }

    pub fn col_labels(&self) -> &[String] {
        &self.col_labels
    }

    pub fn is_signed(&self) -> bool {
        self.signed
    }

    fn check_column(&self, t: usize) -> Result<()> {
        if t >= self.k() {
            return Err(Error::OutOfRange {
                index: t,
                size: self.k(),
            });
        }
        Ok(())
    }

    /// Errors unless `p` is a probability vector of length `n`.
    pub fn check_distribution(&self, p: &[Rational]) -> Result<()> {
        check_distribution(p, self.n())
    }

    /// `p . l_t` for every column.
    pub fn expected_losses(&self, p: &[Rational]) -> Result<RatVector> {
        self.check_distribution(p)?;
        Ok((0..self.k()).map(|t| dot(p, &self.column(t))).collect())
    }

    /// All columns attaining `min_t p . l_t`, in increasing order.
    pub fn bayes_argmin(&self, p: &[Rational]) -> Result<Vec<usize>> {
        let risks = self.expected_losses(p)?;
        let best = risks.iter().min().expect("k >= 1").clone();
        Ok((0..self.k()).filter(|&t| risks[t] == best).collect())
    }

    pub fn regret(&self, p: &[Rational], t: usize) -> Result<Rational> {
        self.check_column(t)?;
        let risks = self.expected_losses(p)?;
        let best = risks.iter().min().expect("k >= 1");
        Ok(&risks[t] - best)
    }

    /// `{p in simplex : p . (l_t - l_t') <= 0 for all t'}`.
    pub fn trigger_set(&self, t: usize) -> Result<HPolytope> {
        self.check_column(t)?;
        let lt = self.column(t);
        let rows: Vec<(RatVector, Rational)> = (0..self.k())
            .filter(|&s| s != t)
            .map(|s| sub_vec(&lt, &self.column(s)))
            .filter(|d| d.iter().any(|x| !x.is_zero()))
            .map(|d| (d, Rational::zero()))
            .collect();
        HPolytope::simplex(self.n())?.with_constraints(rows, vec![])
    }

    pub fn trigger_sets(&self) -> Result<Vec<HPolytope>> {
        (0..self.k()).map(|t| self.trigger_set(t)).collect()
    }

    /// For each column, whether some `p` makes it the unique minimizer.
    /// Decided by maximizing a common strict margin.
    pub fn validate_columns(&self) -> Result<Vec<ColumnVerdict>> {
        let n = self.n();
        let mut out = Vec::with_capacity(self.k());
        for t in 0..self.k() {
            // Variables (p, eps): p . (l_t - l_s) + eps <= 0, eps <= 1.
            let lt = self.column(t);
            let mut ineq: Vec<(RatVector, Rational)> = Vec::new();
            for s in (0..self.k()).filter(|&s| s != t) {
                let mut row = sub_vec(&lt, &self.column(s));
                row.push(Rational::one());
                ineq.push((row, Rational::zero()));
            }
            for i in 0..n {
                let mut row = vec![Rational::zero(); n + 1];
                row[i] = -Rational::one();
                ineq.push((row, Rational::zero()));
            }
            let mut cap = vec![Rational::zero(); n + 1];
            cap[n] = Rational::one();
            ineq.push((cap.clone(), Rational::one()));
            let mut sum = vec![Rational::one(); n + 1];
            sum[n] = Rational::zero();
            let aux = HPolytope::from_constraints(n + 1, ineq, vec![(sum, Rational::one())])?;
            let r = aux.lp(&cap, Sense::Maximize)?;
            let witness = match (r.optimum, r.witness) {
                (Some(eps), Some(mut w)) if eps.is_positive() => {
                    w.pop();
                    Some(w)
                }
                _ => None,
            };
            out.push(ColumnVerdict {
                column: t,
                valid: witness.is_some(),
                witness,
            });
        }
        Ok(out)
    }

    /// Parses CSV text: one row per class, exact rationals or decimals.
    /// A first record that does not parse as numbers is taken as column labels.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .comment(Some(b'#'))
            .from_reader(text.as_bytes());
        let mut header: Option<Vec<String>> = None;
        let mut rows: Vec<RatVector> = Vec::new();
        for (i, record) in reader.records().enumerate() {
            let record = record.map_err(|e| Error::InvalidInput(format!("csv: {e}")))?;
            let parsed: Result<RatVector> = record.iter().map(parse_rational).collect();
            match parsed {
                Ok(row) => rows.push(row),
                Err(_) if i == 0 => header = Some(record.iter().map(str::to_string).collect()),
                Err(e) => return Err(e),
            }
        }
        let cols = rows.first().map_or(0, Vec::len);
        let entries = RatMatrix::from_rows(cols, rows)?;
        let loss = Self::new(entries)?;
        match header {
            Some(h) => {
                let rows = loss.row_labels.clone();
                loss.with_labels(rows, h)
            }
            None => Ok(loss),
        }
    }
}

/// Errors unless `p` is a probability vector of length `n`.
pub fn check_distribution(p: &[Rational], n: usize) -> Result<()> {
    if p.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: p.len(),
        });
    }
    if p.iter().any(Signed::is_negative) || p.iter().sum::<Rational>() != Rational::one() {
        return Err(Error::NotADistribution);
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColumnVerdict {
    pub column: usize,
    pub valid: bool,
    #[serde(with = "serde_rational::option_vec")]
    pub witness: Option<RatVector>,
}

/// `1(t != y)`.
pub fn zero_one(n: usize) -> Result<LossMatrix> {
    build(n, n, |y, t| if y == t { int(0) } else { int(1) })
}

/// `|t - y|`.
pub fn ordinal(n: usize) -> Result<LossMatrix> {
    build(n, n, |y, t| int((t as i64 - y as i64).abs()))
}

/// Hamming distance between `r`-bit binary representations of labels.
pub fn hamming(r: usize) -> Result<LossMatrix> {
    if r == 0 || r > 10 {
        return Err(Error::InvalidInput(format!("hamming loss needs 1 <= r <= 10, got {r}")));
    }
    let n = 1usize << r;
    let loss = build(n, n, |y, t| int((y ^ t).count_ones() as i64))?;
    let labels: Vec<String> = (0..n).map(|v| format!("{v:0r$b}")).collect();
    loss.with_labels(labels.clone(), labels)
}

/// 0-1 loss plus an abstain column of constant cost 1/2.
pub fn abstain(n: usize) -> Result<LossMatrix> {
    let loss = build(n, n + 1, |y, t| {
        if t == n {
            rat(1, 2)
        } else if y == t {
            int(0)
        } else {
            int(1)
        }
    })?;
    let mut cols: Vec<String> = numbered(n);
    cols.push("abstain".into());
    let rows = numbered(n);
    loss.with_labels(rows, cols)
}

fn build(n: usize, k: usize, f: impl Fn(usize, usize) -> Rational) -> Result<LossMatrix> {
    if n == 0 {
        return Err(Error::InvalidInput("need at least one class".into()));
    }
    let rows = (0..n).map(|y| (0..k).map(|t| f(y, t)).collect()).collect();
    LossMatrix::new(RatMatrix::from_rows(k, rows)?)
}

#[derive(Serialize, Deserialize)]
struct LossRepr {
    n: usize,
    k: usize,
    #[serde(with = "serde_rational::vec_vec")]
    entries: Vec<RatVector>,
    #[serde(default)]
    row_labels: Vec<String>,
    #[serde(default)]
    col_labels: Vec<String>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    signed: bool,
}

impl Serialize for LossMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        LossRepr {
            n: self.n(),
            k: self.k(),
            entries: self.entries.row_vecs(),
            row_labels: self.row_labels.clone(),
            col_labels: self.col_labels.clone(),
            signed: self.signed,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for LossMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let r = LossRepr::deserialize(deserializer)?;
        let build = move || -> Result<Self> {
            if r.entries.len() != r.n {
                return Err(Error::DimensionMismatch {
                    expected: r.n,
                    got: r.entries.len(),
                });
            }
            let m = RatMatrix::from_rows(r.k, r.entries)?;
            let mut loss = if r.signed {
                LossMatrix::new_signed(m)?
            } else {
                LossMatrix::new(m)?
            };
            if !r.row_labels.is_empty() || !r.col_labels.is_empty() {
                let rows = if r.row_labels.is_empty() { loss.row_labels.clone() } else { r.row_labels };
                let cols = if r.col_labels.is_empty() { loss.col_labels.clone() } else { r.col_labels };
                loss = loss.with_labels(rows, cols)?;
            }
            Ok(loss)
        };
        build().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{int_vec, rat_vec};

    #[test]
    fn named_losses_match_tables() {
        assert_eq!(
            zero_one(3).unwrap().entries(),
            &RatMatrix::from_i64(&[&[0, 1, 1], &[1, 0, 1], &[1, 1, 0]])
        );
        assert_eq!(zero_one(1).unwrap().entries(), &RatMatrix::from_i64(&[&[0]]));
        assert_eq!(
            ordinal(3).unwrap().entries(),
            &RatMatrix::from_i64(&[&[0, 1, 2], &[1, 0, 1], &[2, 1, 0]])
        );
        assert_eq!(ordinal(4).unwrap().entry(0, 3), &int(3));
        assert_eq!(
            hamming(2).unwrap().entries(),
            &RatMatrix::from_i64(&[&[0, 1, 1, 2], &[1, 0, 2, 1], &[1, 2, 0, 1], &[2, 1, 1, 0]])
        );
        assert_eq!(hamming(3).unwrap().entry(0, 7), &int(3));
        let ab = abstain(3).unwrap();
        assert_eq!((ab.n(), ab.k()), (3, 4));
        assert!((0..3).all(|y| ab.entry(y, 3) == &rat(1, 2) && ab.entry(y, y) == &int(0)));
        assert!(zero_one(0).is_err());
    }

    #[test]
    fn negative_entries_rejected() {
        let m = RatMatrix::from_i64(&[&[0, -1]]);
        assert!(LossMatrix::new(m.clone()).is_err());
        assert!(LossMatrix::new_signed(m).unwrap().is_signed());
    }

    #[test]
    fn bayes_and_regret() {
        let l = zero_one(3).unwrap();
        let p = rat_vec(&[(3, 5), (1, 5), (1, 5)]);
        assert_eq!(l.bayes_argmin(&p).unwrap(), vec![0]);
        assert_eq!(l.regret(&p, 1).unwrap(), rat(2, 5));
        assert_eq!(l.regret(&p, 0).unwrap(), int(0));
        let u = rat_vec(&[(1, 3), (1, 3), (1, 3)]);
        assert_eq!(l.bayes_argmin(&u).unwrap(), vec![0, 1, 2]);
        let o = ordinal(3).unwrap();
        assert_eq!(o.bayes_argmin(&rat_vec(&[(2, 5), (1, 5), (2, 5)])).unwrap(), vec![1]);
        assert_eq!(o.regret(&int_vec(&[1, 0, 0]), 2).unwrap(), int(2));
        assert_eq!(l.bayes_argmin(&int_vec(&[1, 1, 0])).unwrap_err(), Error::NotADistribution);
        assert!(l.regret(&u, 3).is_err());
    }

    #[test]
    fn column_validation() {
        let l = zero_one(3).unwrap();
        assert!(l.validate_columns().unwrap().iter().all(|v| v.valid));
        let dup = LossMatrix::new(RatMatrix::from_i64(&[&[0, 0, 1], &[1, 1, 0]])).unwrap();
        let v = dup.validate_columns().unwrap();
        assert_eq!(v.iter().map(|c| c.valid).collect::<Vec<_>>(), vec![false, false, true]);
        let ab = abstain(3).unwrap().validate_columns().unwrap();
        assert!(ab[3].valid);
        let w = ab[3].witness.clone().unwrap();
        let risks = abstain(3).unwrap().expected_losses(&w).unwrap();
        assert!((0..3).all(|t| risks[3] < risks[t]));
    }

    #[test]
    fn csv_import() {
        let l = LossMatrix::from_csv("a,b\n0, 0.5\n1,1/4\n").unwrap();
        assert_eq!(l.col_labels(), &["a".to_string(), "b".to_string()]);
        assert_eq!(l.entry(0, 1), &rat(1, 2));
        assert_eq!(l.entry(1, 1), &rat(1, 4));
        assert!(LossMatrix::from_csv("0,1\n1\n").is_err());
        assert!(LossMatrix::from_csv("0,-1\n").is_err());
    }

    #[test]
    fn json_round_trip() {
        let l = abstain(2).unwrap();
        let text = serde_json::to_string(&l).unwrap();
        let back: LossMatrix = serde_json::from_str(&text).unwrap();
        assert_eq!(back, l);
        let plain: LossMatrix = serde_json::from_str(r#"{"n":1,"k":2,"entries":[["0","1/2"]]}"#).unwrap();
        assert_eq!(plain.col_labels(), &["1".to_string(), "2".to_string()]);
        assert!(serde_json::from_str::<LossMatrix>(r#"{"n":2,"k":2,"entries":[["0","1"]]}"#).is_err());
    }
}
