//! Dense linear algebra over a finite field: row reduction, rank, kernels.

use crate::finitefield::{Elem, FieldDesc};

pub type Matrix = Vec<Vec<Elem>>;

/// Reduced row echelon form in place; returns the pivot columns. Zero rows
/// are dropped, so the result has exactly `rank` rows.
pub fn rref(f: &FieldDesc, m: &mut Matrix) -> Vec<usize> {
    let cols = m.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..cols {
        let Some(pr) = (row..m.len()).find(|&r| m[r][col] != 0) else {
            continue;
        };
        m.swap(row, pr);
        let inv = f.inv(m[row][col]).unwrap();
        for x in m[row].iter_mut() {
            *x = f.mul(*x, inv);
        }
        let pivot_row = m[row].clone();
        for (r, other) in m.iter_mut().enumerate() {
            if r == row || other[col] == 0 {
                continue;
            }
            let factor = other[col];
            for (o, &p) in other.iter_mut().zip(&pivot_row) {
                *o = f.sub(*o, f.mul(factor, p));
            }
        }
        pivots.push(col);
        row += 1;
        if row == m.len() {
            break;
        }
    }
    m.truncate(row);
    pivots
}

pub fn rank(f: &FieldDesc, rows: &[Vec<Elem>]) -> usize {
    let mut m = rows.to_vec();
    rref(f, &mut m).len()
}

/// Canonical basis of the row space (its RREF).
pub fn row_space(f: &FieldDesc, rows: &[Vec<Elem>]) -> Matrix {
    let mut m = rows.to_vec();
    rref(f, &mut m);
    m
}

/// Basis of `{x : m x = 0}` for an `r x n` matrix, returned in RREF.
pub fn kernel(f: &FieldDesc, m: &[Vec<Elem>], n: usize) -> Matrix {
    let mut a = m.to_vec();
    let pivots = rref(f, &mut a);
    let mut basis = Vec::new();
    for free in (0..n).filter(|c| !pivots.contains(c)) {
        let mut v = vec![0; n];
        v[free] = 1;
        for (row, &pc) in a.iter().zip(&pivots) {
            v[pc] = f.neg(row[free]);
        }
        basis.push(v);
    }
    row_space(f, &basis)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dot(f: &FieldDesc, a: &[Elem], b: &[Elem]) -> Elem {
        a.iter().zip(b).fold(0, |acc, (&x, &y)| f.add(acc, f.mul(x, y)))
    }

    #[test]
    fn rank_and_kernel_over_gf3() {
        let f = FieldDesc::prime(3).unwrap();
        let m = vec![vec![1, 2, 0, 1], vec![2, 1, 0, 2], vec![0, 0, 1, 1]];
        assert_eq!(rank(&f, &m), 2);
        let k = kernel(&f, &m, 4);
        assert_eq!(k.len(), 2);
        for v in &k {
            for row in &m {
                assert_eq!(dot(&f, row, v), 0);
            }
        }
    }

    #[test]
    fn rref_is_canonical() {
        let f = FieldDesc::prime(5).unwrap();
        let a = vec![vec![1, 2, 3], vec![2, 4, 1]];
        let b = vec![vec![3, 1, 4], vec![0, 0, 0], vec![1, 2, 3]];
        assert_eq!(row_space(&f, &a), row_space(&f, &b));
    }
}
