//! Gaussian elimination over a subfield of a tower.
//!
//! Subfield scalars are ordinary tower elements; closure under the tower
//! operations keeps every intermediate inside the subfield.

use crate::gf::{Fe, FieldTower, Subfield, TraceBasis};

pub fn rank(tw: &FieldTower, mut rows: Vec<Vec<Fe>>) -> usize {
    let cols = rows.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows.len()).find(|&r| !rows[r][c].is_zero()) else {
            continue;
        };
        rows.swap(rank, p);
        let inv = tw.inv(rows[rank][c]).expect("nonzero pivot");
        let pivot_row: Vec<Fe> = rows[rank].iter().map(|&x| tw.mul(x, inv)).collect();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && !row[c].is_zero() {
                let f = row[c];
                for (x, &y) in row.iter_mut().zip(&pivot_row) {
                    *x = tw.sub(*x, tw.mul(f, y));
                }
            }
        }
        rows[rank] = pivot_row;
        rank += 1;
    }
    rank
}

/// Inverse of a square matrix, `None` when singular.
pub fn invert(tw: &FieldTower, m: &[Vec<Fe>]) -> Option<Vec<Vec<Fe>>> {
    let n = m.len();
    let mut a: Vec<Vec<Fe>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { Fe::ONE } else { Fe::ZERO }));
            r
        })
        .collect();
    for c in 0..n {
        let p = (c..n).find(|&r| !a[r][c].is_zero())?;
        a.swap(c, p);
        let inv = tw.inv(a[c][c]).ok()?;
        for x in a[c].iter_mut() {
            *x = tw.mul(*x, inv);
        }
        let pivot_row = a[c].clone();
        for (r, row) in a.iter_mut().enumerate() {
            if r != c && !row[c].is_zero() {
                let f = row[c];
                for (x, &y) in row.iter_mut().zip(&pivot_row) {
                    *x = tw.sub(*x, tw.mul(f, y));
                }
            }
        }
    }
    Some(a.into_iter().map(|r| r[n..].to_vec()).collect())
}

struct Row {
    pivot: usize,
    coords: Vec<Fe>,
    // this row as a combination of the chosen input vectors
    combo: Vec<Fe>,
}

/// Incremental echelon form of vectors in `F_q^u`, viewed over a subfield by
/// expanding each entry into its `t` trace coordinates.
pub struct SpanEchelon<'a> {
    tw: &'a FieldTower,
    reference: TraceBasis,
    rows: Vec<Row>,
}

impl<'a> SpanEchelon<'a> {
    pub fn new(tw: &'a FieldTower, sub: Subfield) -> Self {
        SpanEchelon { tw, reference: tw.default_basis(sub), rows: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    fn expand(&self, v: &[Fe]) -> Vec<Fe> {
        v.iter().flat_map(|&x| self.tw.traces_of(x, &self.reference)).collect()
    }

    // Reduces `coords` against the rows; returns the accumulated combination
    // `lambda` such that coords_in - coords_out = sum lambda_m * chosen_m.
    fn reduce(&self, coords: &mut [Fe]) -> Vec<Fe> {
        let tw = self.tw;
        let mut acc = vec![Fe::ZERO; self.rows.len()];
        for row in &self.rows {
            let f = coords[row.pivot];
            if f.is_zero() {
                continue;
            }
            for (x, &y) in coords.iter_mut().zip(&row.coords) {
                *x = tw.sub(*x, tw.mul(f, y));
            }
            for (a, &c) in acc.iter_mut().zip(&row.combo) {
                *a = tw.add(*a, tw.mul(f, c));
            }
        }
        acc
    }

    /// Coefficients over the chosen vectors if `v` lies in the span.
    pub fn express(&self, v: &[Fe]) -> Option<Vec<Fe>> {
        let mut coords = self.expand(v);
        let acc = self.reduce(&mut coords);
        coords.iter().all(|x| x.is_zero()).then_some(acc)
    }

    /// Adds `v` to the chosen set when independent (returns `None`);
    /// otherwise returns its coefficients over the chosen vectors.
    pub fn insert(&mut self, v: &[Fe]) -> Option<Vec<Fe>> {
        let tw = self.tw;
        let mut coords = self.expand(v);
        let acc = self.reduce(&mut coords);
        let Some(pivot) = coords.iter().position(|x| !x.is_zero()) else {
            return Some(acc);
        };
        // coords = v - sum acc_m c_m, and v becomes chosen vector number n.
        let n = self.rows.len();
        let inv = tw.inv(coords[pivot]).expect("nonzero pivot");
        let mut combo: Vec<Fe> = acc.iter().map(|&a| tw.neg(tw.mul(a, inv))).collect();
        combo.push(inv);
        for row in &mut self.rows {
            row.combo.push(Fe::ZERO);
        }
        let coords = coords.iter().map(|&x| tw.mul(x, inv)).collect();
        self.rows.push(Row { pivot, coords, combo });
        debug_assert_eq!(self.rows[n].combo.len(), n + 1);
        None
    }
}
