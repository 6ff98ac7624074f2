//! Exact integer Smith normal form for sparse incidence matrices.
//!
//! Unit pivots are eliminated sparsely (Markowitz order); whatever remains
//! is reduced densely with checked `i128` arithmetic.

use crate::error::{Error, Result};
use nalgebra_sparse::CsrMatrix;
use std::collections::BTreeMap;

/// Invariant factors of an integer matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmithForm {
    pub rows: usize,
    pub cols: usize,
    /// Nonzero invariant factors in divisibility order.
    pub factors: Vec<i64>,
}

impl SmithForm {
    pub fn rank(&self) -> usize {
        self.factors.len()
    }

    /// Invariant factors greater than one.
    pub fn torsion(&self) -> Vec<i64> {
        self.factors.iter().copied().filter(|&f| f > 1).collect()
    }
}

/// Smith normal form of a sparse integer matrix.
pub fn smith_normal_form(m: &CsrMatrix<i64>) -> Result<SmithForm> {
    let mut rows: Vec<BTreeMap<usize, i64>> = m
        .row_iter()
        .map(|r| {
            r.col_indices()
                .iter()
                .zip(r.values())
                .filter(|(_, &v)| v != 0)
                .map(|(&c, &v)| (c, v))
                .collect()
        })
        .collect();
    smith_from_rows(&mut rows, m.nrows(), m.ncols())
}

/// Smith normal form of a dense integer matrix given row-major.
pub fn smith_normal_form_dense(rows: usize, cols: usize, data: &[i64]) -> Result<SmithForm> {
    let mut r: Vec<BTreeMap<usize, i64>> = (0..rows)
        .map(|i| {
            (0..cols)
                .filter(|&j| data[i * cols + j] != 0)
                .map(|j| (j, data[i * cols + j]))
                .collect()
        })
        .collect();
    smith_from_rows(&mut r, rows, cols)
}

fn smith_from_rows(rows: &mut [BTreeMap<usize, i64>], nrows: usize, ncols: usize) -> Result<SmithForm> {
    let mut col_rows: Vec<BTreeMap<usize, ()>> = vec![BTreeMap::new(); ncols];
    for (i, r) in rows.iter().enumerate() {
        for &c in r.keys() {
            col_rows[c].insert(i, ());
        }
    }
    let mut alive = vec![true; nrows];
    let mut unit_count = 0usize;

    loop {
        // Cheapest unit pivot by Markowitz cost.
        let mut best: Option<(usize, usize, usize)> = None;
        for (i, r) in rows.iter().enumerate() {
            if !alive[i] || r.is_empty() {
                continue;
            }
            let rc = r.len() - 1;
            for (&c, &v) in r {
                if v.abs() == 1 {
                    let cost = rc * (col_rows[c].len() - 1);
                    if best.is_none_or(|b| cost < b.2) {
                        best = Some((i, c, cost));
                    }
                }
            }
            if matches!(best, Some((_, _, 0))) {
                break;
            }
        }
        let Some((p, c, _)) = best else { break };
        let s = rows[p][&c];
        let pivot_row = std::mem::take(&mut rows[p]);
        alive[p] = false;
        for &cc in pivot_row.keys() {
            col_rows[cc].remove(&p);
        }
        let targets: Vec<usize> = col_rows[c].keys().copied().collect();
        for r in targets {
            let a = rows[r][&c];
            let factor = a.checked_mul(s).ok_or(Error::IntegerOverflow)?;
            for (&cc, &pv) in &pivot_row {
                let delta = factor.checked_mul(pv).ok_or(Error::IntegerOverflow)?;
                let entry = rows[r].entry(cc).or_insert(0);
                *entry = entry.checked_sub(delta).ok_or(Error::IntegerOverflow)?;
                if *entry == 0 {
                    rows[r].remove(&cc);
                    col_rows[cc].remove(&r);
                } else {
                    col_rows[cc].insert(r, ());
                }
            }
        }
        // Column operations clear the rest of the pivot row without touching
        // other rows, since column `c` is now zero outside the pivot.
        col_rows[c].clear();
        unit_count += 1;
    }

    let rest_rows: Vec<usize> = (0..nrows).filter(|&i| alive[i] && !rows[i].is_empty()).collect();
    let mut rest_cols: Vec<usize> = rest_rows.iter().flat_map(|&i| rows[i].keys().copied()).collect();
    rest_cols.sort_unstable();
    rest_cols.dedup();
    let mut dense = vec![vec![0i128; rest_cols.len()]; rest_rows.len()];
    for (a, &i) in rest_rows.iter().enumerate() {
        for (&c, &v) in &rows[i] {
            let b = rest_cols.binary_search(&c).unwrap();
            dense[a][b] = v as i128;
        }
    }
    let mut factors = vec![1i64; unit_count];
    for f in dense_smith(dense)? {
        factors.push(i64::try_from(f).map_err(|_| Error::IntegerOverflow)?);
    }
    factors.sort_unstable();
    Ok(SmithForm {
        rows: nrows,
        cols: ncols,
        factors,
    })
}

fn gcd(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn dense_smith(mut a: Vec<Vec<i128>>) -> Result<Vec<i128>> {
    let m = a.len();
    let n = a.first().map_or(0, |r| r.len());
    let mut diag = Vec::new();
    let mut t = 0;
    while t < m.min(n) {
        // Smallest nonzero magnitude in the trailing block.
        let mut piv: Option<(usize, usize)> = None;
        for i in t..m {
            for j in t..n {
                if a[i][j] != 0 && piv.is_none_or(|(pi, pj)| a[i][j].abs() < a[pi][pj].abs()) {
                    piv = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = piv else { break };
        a.swap(t, pi);
        for row in a.iter_mut() {
            row.swap(t, pj);
        }
        loop {
            let p = a[t][t];
            let mut clean = true;
            for i in t + 1..m {
                let q = a[i][t] / p;
                if q != 0 {
                    for j in t..n {
                        let d = q.checked_mul(a[t][j]).ok_or(Error::IntegerOverflow)?;
                        a[i][j] = a[i][j].checked_sub(d).ok_or(Error::IntegerOverflow)?;
                    }
                }
                if a[i][t] != 0 {
                    clean = false;
                }
            }
            for j in t + 1..n {
                let q = a[t][j] / p;
                if q != 0 {
                    for row in a.iter_mut().skip(t) {
                        let d = q.checked_mul(row[t]).ok_or(Error::IntegerOverflow)?;
                        row[j] = row[j].checked_sub(d).ok_or(Error::IntegerOverflow)?;
                    }
                }
                if a[t][j] != 0 {
                    clean = false;
                }
            }
            if clean {
                break;
            }
            // Move the smallest remainder in row/column t to the pivot.
            let mut best = (t, t);
            for i in t..m {
                if a[i][t] != 0 && a[i][t].abs() < a[best.0][best.1].abs() {
                    best = (i, t);
                }
            }
            for j in t..n {
                if a[t][j] != 0 && a[t][j].abs() < a[best.0][best.1].abs() {
                    best = (t, j);
                }
            }
            a.swap(t, best.0);
            for row in a.iter_mut() {
                row.swap(t, best.1);
            }
        }
        diag.push(a[t][t].abs());
        t += 1;
    }
    // Enforce the divisibility chain: (a, b) -> (gcd, lcm).
    for i in 0..diag.len() {
        for j in i + 1..diag.len() {
            let g = gcd(diag[i], diag[j]);
            let l = (diag[i] / g).checked_mul(diag[j]).ok_or(Error::IntegerOverflow)?;
            diag[i] = g;
            diag[j] = l;
        }
    }
    Ok(diag)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Determinantal divisors: d_k = gcd of all k×k minors; factors are d_k / d_{k-1}.
    fn oracle_factors(m: usize, n: usize, a: &[i64]) -> Vec<i64> {
        fn det(mat: &[Vec<i128>]) -> i128 {
            let k = mat.len();
            if k == 0 {
                return 1;
            }
            let mut s = 0;
            for j in 0..k {
                let minor: Vec<Vec<i128>> = mat[1..]
                    .iter()
                    .map(|r| r.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, &v)| v).collect())
                    .collect();
                let sign = if j % 2 == 0 { 1 } else { -1 };
                s += sign * mat[0][j] * det(&minor);
            }
            s
        }
        fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
            if k == 0 {
                return vec![vec![]];
            }
            let mut out = vec![];
            for last in k - 1..n {
                for mut s in subsets(last, k - 1) {
                    s.push(last);
                    out.push(s);
                }
            }
            out
        }
        let mut divisors = vec![1i128];
        for k in 1..=m.min(n) {
            let mut g = 0i128;
            for rs in subsets(m, k) {
                for cs in subsets(n, k) {
                    let sub: Vec<Vec<i128>> = rs
                        .iter()
                        .map(|&r| cs.iter().map(|&c| a[r * n + c] as i128).collect())
                        .collect();
                    g = gcd(g, det(&sub));
                }
            }
            if g == 0 {
                break;
            }
            divisors.push(g);
        }
        divisors.windows(2).map(|w| (w[1] / w[0]) as i64).collect()
    }

    #[test]
    fn known_example() {
        let a = [2, 4, 4, -6, 6, 12, 10, -4, -16];
        let s = smith_normal_form_dense(3, 3, &a).unwrap();
        assert_eq!(s.factors, vec![2, 6, 12]);
    }

    #[test]
    fn zero_matrix() {
        let s = smith_normal_form_dense(2, 3, &[0; 6]).unwrap();
        assert_eq!(s.rank(), 0);
    }

    proptest! {
        #[test]
        fn matches_determinantal_divisors(
            m in 1usize..4, n in 1usize..4,
            seed in proptest::collection::vec(-4i64..5, 16),
        ) {
            let a: Vec<i64> = seed[..m * n].to_vec();
            let s = smith_normal_form_dense(m, n, &a).unwrap();
            prop_assert_eq!(s.factors, oracle_factors(m, n, &a));
        }
    }
}
