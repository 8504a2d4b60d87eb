//! Dense linear algebra over a finite field, row-major.

use crate::field_tower::{Fe, FqField};

pub type Mat = Vec<Vec<Fe>>;

pub fn zeros(rows: usize, cols: usize) -> Mat {
    vec![vec![Fe::ZERO; cols]; rows]
}

pub fn identity(n: usize) -> Mat {
    let mut m = zeros(n, n);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = Fe::ONE;
    }
    m
}

pub fn mat_mul(k: &FqField, a: &Mat, b: &Mat) -> Mat {
    let cols = b.first().map_or(0, Vec::len);
    let mut out = zeros(a.len(), cols);
    for (i, row) in a.iter().enumerate() {
        for (l, &x) in row.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for j in 0..cols {
                out[i][j] = k.add(out[i][j], k.mul(x, b[l][j]));
            }
        }
    }
    out
}

pub fn mat_vec(k: &FqField, a: &Mat, v: &[Fe]) -> Vec<Fe> {
    a.iter()
        .map(|row| {
            row.iter()
                .zip(v)
                .fold(Fe::ZERO, |acc, (&x, &y)| k.add(acc, k.mul(x, y)))
        })
        .collect()
}

pub fn mat_pow(k: &FqField, a: &Mat, e: u32) -> Mat {
    let mut out = identity(a.len());
    for _ in 0..e {
        out = mat_mul(k, &out, a);
    }
    out
}

pub fn is_zero(a: &Mat) -> bool {
    a.iter().all(|r| r.iter().all(|x| x.is_zero()))
}

/// Reduced row echelon form and pivot columns.
pub fn rref(k: &FqField, a: &Mat) -> (Mat, Vec<usize>) {
    let mut m = a.clone();
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = k.inv(m[r][c]).expect("nonzero pivot");
        for x in m[r].iter_mut() {
            *x = k.mul(*x, inv);
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c];
                for j in 0..cols {
                    let t = k.mul(f, m[r][j]);
                    m[i][j] = k.sub(m[i][j], t);
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows {
            break;
        }
    }
    (m, pivots)
}

pub fn rank(k: &FqField, a: &Mat) -> usize {
    rref(k, a).1.len()
}

/// A basis of `{v : a v = 0}`.
pub fn nullspace(k: &FqField, a: &Mat) -> Vec<Vec<Fe>> {
    let cols = a.first().map_or(0, Vec::len);
    let (m, pivots) = rref(k, a);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Fe::ZERO; cols];
            v[f] = Fe::ONE;
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = k.neg(m[row][f]);
            }
            v
        })
        .collect()
}

/// Some `x` with `a x = b`, free variables set to zero.
pub fn solve(k: &FqField, a: &Mat, b: &[Fe]) -> Option<Vec<Fe>> {
    let cols = a.first().map_or(0, Vec::len);
    let aug: Mat = a
        .iter()
        .zip(b)
        .map(|(row, &y)| row.iter().copied().chain(std::iter::once(y)).collect())
        .collect();
    let (m, pivots) = rref(k, &aug);
    if pivots.contains(&cols) {
        return None;
    }
    let mut x = vec![Fe::ZERO; cols];
    for (row, &pc) in pivots.iter().enumerate() {
        x[pc] = m[row][cols];
    }
    Some(x)
}

/// Columns of `a` as vectors.
pub fn columns(a: &Mat) -> Vec<Vec<Fe>> {
    let cols = a.first().map_or(0, Vec::len);
    (0..cols).map(|j| a.iter().map(|r| r[j]).collect()).collect()
}

/// Whether every vector of `vs` lies in the column span of `a`.
pub fn in_column_span(k: &FqField, a: &Mat, vs: &[Vec<Fe>]) -> bool {
    vs.iter().all(|v| solve(k, a, v).is_some())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solve_and_nullspace() {
        let k = FqField::new(3, 1).unwrap();
        let f = |x: i64| k.from_int(x);
        let a = vec![vec![f(1), f(2), f(0)], vec![f(2), f(2), f(0)]];
        assert_eq!(rank(&k, &a), 2);
        let ns = nullspace(&k, &a);
        assert_eq!(ns.len(), 1);
        assert!(mat_vec(&k, &a, &ns[0]).iter().all(|x| x.is_zero()));
        let x = solve(&k, &a, &[f(1), f(1)]).unwrap();
        assert_eq!(mat_vec(&k, &a, &x), vec![f(1), f(1)]);
        let sing = vec![vec![f(1), f(1)], vec![f(2), f(2)]];
        assert!(solve(&k, &sing, &[f(1), f(0)]).is_none());
    }
}
