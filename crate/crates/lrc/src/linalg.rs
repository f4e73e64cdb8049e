//! Dense row-major linear algebra over a `galois::Field`.

use crate::galois::Field;

/// Reduced row echelon form in place; returns the rank and pivot columns.
pub fn rref(field: &Field, rows: &mut Vec<Vec<u32>>) -> (usize, Vec<usize>) {
    if rows.is_empty() {
        return (0, Vec::new());
    }
    let ncols = rows[0].len();
    let mut pivots = Vec::new();
    let mut r = 0usize;
    for c in 0..ncols {
        let Some(pr) = (r..rows.len()).find(|&i| rows[i][c] != 0) else {
            continue;
        };
        rows.swap(r, pr);
        let inv = field.inv(rows[r][c]);
        if inv != 1 {
            for x in rows[r].iter_mut() {
                *x = field.mul(*x, inv);
            }
        }
        for i in 0..rows.len() {
            if i != r && rows[i][c] != 0 {
                let factor = rows[i][c];
                for j in 0..ncols {
                    let sub = field.mul(factor, rows[r][j]);
                    rows[i][j] = field.sub(rows[i][j], sub);
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    rows.truncate(r);
    (r, pivots)
}

pub fn rank(field: &Field, rows: &[Vec<u32>]) -> usize {
    let mut copy: Vec<Vec<u32>> = rows.to_vec();
    rref(field, &mut copy).0
}

pub fn transpose(rows: &[Vec<u32>], ncols: usize) -> Vec<Vec<u32>> {
    let mut out = vec![vec![0u32; rows.len()]; ncols];
    for (i, row) in rows.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            out[j][i] = v;
        }
    }
    out
}

/// Basis of {v : M v = 0} for M given by rows of width `ncols`.
pub fn kernel_basis(field: &Field, rows: &[Vec<u32>], ncols: usize) -> Vec<Vec<u32>> {
    let mut m: Vec<Vec<u32>> = rows.to_vec();
    let (rank, pivots) = rref(field, &mut m);
    let pivot_set: std::collections::BTreeSet<usize> = pivots.iter().copied().collect();
    let free: Vec<usize> = (0..ncols).filter(|c| !pivot_set.contains(c)).collect();
    let mut basis = Vec::with_capacity(free.len());
    for &fc in &free {
        let mut v = vec![0u32; ncols];
        v[fc] = 1;
        for (pi, &pc) in pivots.iter().enumerate().take(rank) {
            // pivot row pi: x_pc = -sum(coeffs * free vars)
            v[pc] = field.neg(m[pi][fc]);
        }
        basis.push(v);
    }
    basis
}

/// Solve A x = b for one solution, rows of A given with width `ncols`.
pub fn solve(field: &Field, a: &[Vec<u32>], b: &[u32], ncols: usize) -> Option<Vec<u32>> {
    let mut aug: Vec<Vec<u32>> = a
        .iter()
        .zip(b)
        .map(|(row, &bi)| {
            let mut r = row.clone();
            r.push(bi);
            r
        })
        .collect();
    let (rank, pivots) = rref(field, &mut aug);
    // inconsistent if a pivot lands in the augmented column
    if pivots.last() == Some(&ncols) {
        return None;
    }
    let mut x = vec![0u32; ncols];
    for (pi, &pc) in pivots.iter().enumerate().take(rank) {
        x[pc] = aug[pi][ncols];
    }
    Some(x)
}

/// Row-space equality via canonical RREF comparison.
pub fn same_row_space(field: &Field, a: &[Vec<u32>], b: &[Vec<u32>]) -> bool {
    let mut ra = a.to_vec();
    let mut rb = b.to_vec();
    rref(field, &mut ra);
    rref(field, &mut rb);
    ra == rb
}
