//! Exact rational linear algebra on sparse rows: rank and reduced row
//! echelon form, enough for the dimension oracle, relation deduplication and
//! homology ranks. Rows are sorted `(column, coefficient)` pairs.

use num_rational::BigRational;
use num_traits::Zero;
use std::collections::BTreeMap;

pub type SparseRow = Vec<(usize, BigRational)>;

fn normalize(mut row: SparseRow) -> SparseRow {
    row.retain(|(_, c)| !c.is_zero());
    row.sort_by_key(|(j, _)| *j);
    row
}

fn add_scaled(a: &SparseRow, b: &SparseRow, factor: &BigRational) -> SparseRow {
    let mut acc: BTreeMap<usize, BigRational> = a.iter().cloned().collect();
    for (j, c) in b {
        let e = acc.entry(*j).or_insert_with(BigRational::zero);
        *e += c * factor;
    }
    acc.into_iter().filter(|(_, c)| !c.is_zero()).collect()
}

/// Incremental echelon form: rows are reduced against pivots as they arrive.
#[derive(Default)]
pub struct Echelon {
    /// pivot column -> reduced row (with that pivot scaled to 1)
    pivots: BTreeMap<usize, SparseRow>,
}

impl Echelon {
    pub fn new() -> Self {
        Echelon { pivots: BTreeMap::new() }
    }

    /// Reduce a row against the current pivots.
    pub fn reduce(&self, row: SparseRow) -> SparseRow {
        let mut row = normalize(row);
        loop {
            let Some((j, c)) = row.first().cloned() else { return row };
            match self.pivots.get(&j) {
                Some(p) => row = add_scaled(&row, p, &-c),
                None => return row,
            }
        }
    }

    /// Insert a row; returns true when it enlarged the span.
    pub fn insert(&mut self, row: SparseRow) -> bool {
        let row = self.reduce(row);
        let Some((j, c)) = row.first().cloned() else { return false };
        let inv = c.recip();
        let row: SparseRow = row.into_iter().map(|(k, v)| (k, v * &inv)).collect();
        // Back-substitute into earlier pivots so the form stays reduced.
        let cols: Vec<usize> = self.pivots.keys().cloned().collect();
        for pj in cols {
            let p = self.pivots.get(&pj).unwrap();
            if let Some(pos) = p.iter().position(|(k, _)| *k == j) {
                let factor = -p[pos].1.clone();
                let updated = add_scaled(p, &row, &factor);
                self.pivots.insert(pj, updated);
            }
        }
        self.pivots.insert(j, row);
        true
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// The reduced rows, by ascending pivot column.
    pub fn rows(&self) -> Vec<SparseRow> {
        self.pivots.values().cloned().collect()
    }
}

/// Rank of a list of sparse rows.
pub fn rank(rows: impl IntoIterator<Item = SparseRow>) -> usize {
    let mut e = Echelon::new();
    for r in rows {
        e.insert(r);
    }
    e.rank()
}

/// Reduced row echelon form: independent spanning rows, each monic at its
/// pivot, fully reduced, ordered by pivot column.
pub fn rref(rows: impl IntoIterator<Item = SparseRow>) -> Vec<SparseRow> {
    let mut e = Echelon::new();
    for r in rows {
        e.insert(r);
    }
    e.rows()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    #[test]
    fn rank_of_dependent_rows() {
        let rows = vec![
            vec![(0, q(1)), (1, q(2))],
            vec![(0, q(2)), (1, q(4))],
            vec![(1, q(1)), (2, q(1))],
        ];
        assert_eq!(rank(rows), 2);
    }

    #[test]
    fn rref_is_reduced() {
        let rows = vec![vec![(0, q(2)), (1, q(2))], vec![(1, q(3)), (2, q(3))]];
        let r = rref(rows);
        assert_eq!(r.len(), 2);
        // first row pivot at 0, eliminated at column 1
        assert_eq!(r[0], vec![(0, q(1)), (2, q(-1))]);
        assert_eq!(r[1], vec![(1, q(1)), (2, q(1))]);
    }
}
