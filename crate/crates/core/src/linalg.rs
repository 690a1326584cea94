//! Exact linear algebra over the rationals.
//!
//! Elimination is fraction-free: every row is scaled to a primitive integer
//! vector and rows are combined by cross-multiplication, never division. The
//! pivot of a row is its first nonzero column. Rationals only appear during
//! back-substitution, when solution vectors are read off the echelon form.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::scalar::{self, Scalar};

type IntRow = BTreeMap<usize, BigInt>;

fn primitive(row: &mut IntRow) {
    let mut g = BigInt::zero();
    for v in row.values() {
        g = g.gcd(v);
        if g.is_one() {
            break;
        }
    }
    let lead_negative = row.values().next().is_some_and(|v| v.is_negative());
    if lead_negative {
        g = -g;
    }
    if !g.is_zero() && !g.is_one() {
        for v in row.values_mut() {
            *v = &*v / &g;
        }
    }
}

fn to_int_row(terms: impl IntoIterator<Item = (usize, Scalar)>) -> IntRow {
    let terms: Vec<(usize, Scalar)> = terms.into_iter().filter(|(_, c)| !c.is_zero()).collect();
    let lcm = terms.iter().fold(BigInt::one(), |acc, (_, c)| acc.lcm(c.denom()));
    let mut row = IntRow::new();
    for (col, c) in terms {
        let v = c.numer() * (&lcm / c.denom());
        let slot = row.entry(col).or_insert_with(BigInt::zero);
        *slot += v;
    }
    row.retain(|_, v| !v.is_zero());
    row
}

/// Incremental row-echelon form of an (optionally inhomogeneous) system
/// `Σ a_c x_c = r` over `columns` unknowns. The right-hand side lives in the
/// extra column `columns`.
#[derive(Debug, Clone)]
pub struct Echelon {
    columns: usize,
    pivots: BTreeMap<usize, IntRow>,
    inconsistent: bool,
}

impl Echelon {
    pub fn new(columns: usize) -> Self {
        Self { columns, pivots: BTreeMap::new(), inconsistent: false }
    }

    pub fn columns(&self) -> usize {
        self.columns
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn is_consistent(&self) -> bool {
        !self.inconsistent
    }

    pub fn pivot_columns(&self) -> impl Iterator<Item = usize> + '_ {
        self.pivots.keys().copied()
    }

    /// Adds the equation `Σ coeff·x_col = rhs`. Returns `true` when the row
    /// was independent of those already present.
    pub fn push(&mut self, terms: impl IntoIterator<Item = (usize, Scalar)>, rhs: &Scalar) -> bool {
        let rhs_col = self.columns;
        let mut row = to_int_row(terms.into_iter().chain(std::iter::once((rhs_col, rhs.clone()))));
        debug_assert!(row.keys().all(|c| *c <= rhs_col));
        primitive(&mut row);
        loop {
            let Some((&lead, lead_val)) = row.iter().next() else {
                return false;
            };
            if lead == rhs_col {
                self.inconsistent = true;
                self.pivots.insert(rhs_col, row);
                return true;
            }
            let Some(pivot) = self.pivots.get(&lead) else {
                self.pivots.insert(lead, row);
                return true;
            };
            let lead_val = lead_val.clone();
            let pivot_lead = pivot[&lead].clone();
            let mut next = IntRow::new();
            for (c, v) in &row {
                next.insert(*c, v * &pivot_lead);
            }
            for (c, v) in pivot {
                let slot = next.entry(*c).or_insert_with(BigInt::zero);
                *slot -= v * &lead_val;
            }
            next.retain(|_, v| !v.is_zero());
            primitive(&mut next);
            row = next;
        }
    }

    fn back_substitute(&self, seed: &BTreeMap<usize, Scalar>, with_rhs: bool) -> Vec<Scalar> {
        let mut x = vec![scalar::zero(); self.columns];
        for (c, v) in seed {
            x[*c] = v.clone();
        }
        for (&p, row) in self.pivots.iter().rev() {
            if p == self.columns {
                continue;
            }
            let mut acc = scalar::zero();
            for (&c, v) in row.range(p + 1..) {
                if c == self.columns {
                    if with_rhs {
                        acc += Scalar::from_integer(v.clone());
                    }
                } else if !x[c].is_zero() {
                    acc -= &x[c] * Scalar::from_integer(v.clone());
                }
            }
            x[p] = acc / Scalar::from_integer(row[&p].clone());
        }
        x
    }

    /// One solution of the inhomogeneous system, free variables set to zero.
    pub fn particular(&self) -> Option<Vec<Scalar>> {
        self.is_consistent().then(|| self.back_substitute(&BTreeMap::new(), true))
    }

    /// Basis of the homogeneous solutions: one vector per free column, in
    /// column order, each scaled so its first nonzero coordinate is 1.
    pub fn kernel(&self) -> Vec<Vec<Scalar>> {
        (0..self.columns)
            .filter(|c| !self.pivots.contains_key(c))
            .map(|free| {
                let seed = BTreeMap::from([(free, scalar::one())]);
                let mut v = self.back_substitute(&seed, false);
                normalize_first_nonzero(&mut v);
                v
            })
            .collect()
    }
}

pub fn normalize_first_nonzero(v: &mut [Scalar]) {
    if let Some(first) = v.iter().find(|c| !c.is_zero()).cloned() {
        for c in v.iter_mut() {
            *c /= &first;
        }
    }
}

/// A dense exact matrix.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Matrix {
    pub rows: usize,
    pub cols: usize,
    #[serde(with = "entries")]
    pub entries: Vec<Vec<Scalar>>,
}

mod entries {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use crate::scalar::{self, Scalar};

    pub fn serialize<S: Serializer>(m: &[Vec<Scalar>], s: S) -> Result<S::Ok, S::Error> {
        let text: Vec<Vec<String>> = m.iter().map(|r| r.iter().map(scalar::format).collect()).collect();
        text.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Vec<Scalar>>, D::Error> {
        let text = Vec::<Vec<String>>::deserialize(d)?;
        text.iter().map(|r| r.iter().map(|t| scalar::parse(t).map_err(serde::de::Error::custom)).collect()).collect()
    }
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, entries: vec![vec![scalar::zero(); cols]; rows] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.entries[i][i] = scalar::one();
        }
        m
    }

    pub fn get(&self, r: usize, c: usize) -> &Scalar {
        &self.entries[r][c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Scalar) {
        self.entries[r][c] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().flatten().all(|v| v.is_zero())
    }

    pub fn mul(&self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.cols, rhs.rows, "dimension mismatch");
        let mut out = Matrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self.entries[i][k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = &rhs.entries[k][j];
                    if !b.is_zero() {
                        out.entries[i][j] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn add_scaled(&mut self, rhs: &Matrix, factor: &Scalar) {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "dimension mismatch");
        for (r, rr) in self.entries.iter_mut().zip(&rhs.entries) {
            for (a, b) in r.iter_mut().zip(rr) {
                *a += b * factor;
            }
        }
    }

    pub fn apply(&self, v: &[Scalar]) -> Vec<Scalar> {
        assert_eq!(self.cols, v.len(), "dimension mismatch");
        self.entries.iter().map(|r| r.iter().zip(v).fold(scalar::zero(), |acc, (a, b)| acc + a * b)).collect()
    }

    pub fn echelon(&self) -> Echelon {
        let mut ech = Echelon::new(self.cols);
        for r in &self.entries {
            ech.push(r.iter().cloned().enumerate(), &scalar::zero());
        }
        ech
    }

    pub fn kernel(&self) -> Vec<Vec<Scalar>> {
        self.echelon().kernel()
    }

    pub fn rank(&self) -> usize {
        self.echelon().rank()
    }

    /// Stacks matrices with equal column counts on top of each other.
    pub fn vstack<'a>(cols: usize, parts: impl IntoIterator<Item = &'a Matrix>) -> Matrix {
        let mut entries = Vec::new();
        for p in parts {
            assert_eq!(p.cols, cols, "dimension mismatch");
            entries.extend(p.entries.iter().cloned());
        }
        Matrix { rows: entries.len(), cols, entries }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{frac, int};

    fn m(rows: &[&[i64]]) -> Matrix {
        let entries: Vec<Vec<Scalar>> = rows.iter().map(|r| r.iter().map(|v| int(*v)).collect()).collect();
        Matrix { rows: entries.len(), cols: entries[0].len(), entries }
    }

    #[test]
    fn kernel_of_rank_one() {
        let a = m(&[&[1, 2, 3], &[2, 4, 6]]);
        let k = a.kernel();
        assert_eq!(k.len(), 2);
        for v in &k {
            assert!(a.apply(v).iter().all(|x| x.is_zero()));
        }
        assert_eq!(k[0], vec![int(1), frac(-1, 2), int(0)]);
    }

    #[test]
    fn full_rank_has_trivial_kernel() {
        assert!(m(&[&[2, 1], &[1, 3]]).kernel().is_empty());
        assert_eq!(Matrix::identity(4).rank(), 4);
    }

    #[test]
    fn inhomogeneous_solution_and_infeasibility() {
        let mut ech = Echelon::new(2);
        ech.push([(0, int(1)), (1, int(1))], &int(3));
        ech.push([(0, int(1)), (1, int(-1))], &int(1));
        assert_eq!(ech.particular().unwrap(), vec![int(2), int(1)]);
        ech.push([(0, int(2)), (1, int(2))], &int(7));
        assert!(!ech.is_consistent());
        assert!(ech.particular().is_none());
    }

    #[test]
    fn fractional_coefficients() {
        let mut ech = Echelon::new(2);
        ech.push([(0, frac(1, 3)), (1, frac(-1, 2))], &scalar::zero());
        let k = ech.kernel();
        assert_eq!(k, vec![vec![int(1), frac(2, 3)]]);
    }

    #[test]
    fn empty_system_kernel_is_everything() {
        assert_eq!(Echelon::new(3).kernel().len(), 3);
    }
}
