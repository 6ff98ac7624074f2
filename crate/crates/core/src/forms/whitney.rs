//! Lowest-order Whitney forms: local mass matrices and pointwise evaluation.

use crate::mesh::{local_subsets, SimplicialComplex};
use crate::scalar::Real;

/// Determinant of a small row-major `k × k` matrix.
pub(crate) fn det_small<T: Real>(a: &[T], k: usize) -> T {
    match k {
        0 => T::one(),
        1 => a[0],
        2 => a[0] * a[3] - a[1] * a[2],
        3 => {
            a[0] * (a[4] * a[8] - a[5] * a[7]) - a[1] * (a[3] * a[8] - a[5] * a[6]) + a[2] * (a[3] * a[7] - a[4] * a[6])
        }
        _ => {
            let mut s = T::zero();
            for j in 0..k {
                let mut minor = Vec::with_capacity((k - 1) * (k - 1));
                for r in 1..k {
                    for c in 0..k {
                        if c != j {
                            minor.push(a[r * k + c]);
                        }
                    }
                }
                let term = a[j] * det_small(&minor, k - 1);
                s = if j % 2 == 0 { s + term } else { s - term };
            }
            s
        }
    }
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

fn without(s: &[usize], i: usize) -> Vec<usize> {
    s.iter().enumerate().filter(|&(k, _)| k != i).map(|(_, &v)| v).collect()
}

/// Local Whitney mass matrix of degree `q` on cell `c`, indexed by the
/// local q-faces in lexicographic order.
pub fn local_mass<T: Real>(complex: &SimplicialComplex<T>, c: usize, q: usize) -> Vec<T> {
    let n = complex.dim();
    let faces = local_subsets(n + 1, q + 1);
    let g = complex.grad_lambda(c);
    let mut gram = vec![T::zero(); (n + 1) * (n + 1)];
    for a in 0..=n {
        for b in 0..=n {
            let mut s = T::zero();
            for r in 0..n {
                s += g[a * n + r] * g[b * n + r];
            }
            gram[a * (n + 1) + b] = s;
        }
    }
    let vol = complex.volume(c);
    // ∫ λ_a λ_b = |T| (1 + δ_ab) / ((n+1)(n+2))
    let base = vol / T::lit(((n + 1) * (n + 2)) as f64);
    let qf = T::lit(factorial(q) * factorial(q));
    let m = faces.len();
    let mut out = vec![T::zero(); m * m];
    let mut sub = vec![T::zero(); q * q];
    for (i, s) in faces.iter().enumerate() {
        for (j, t) in faces.iter().enumerate().skip(i) {
            let mut acc = T::zero();
            for a in 0..=q {
                let sa = without(s, a);
                for b in 0..=q {
                    let tb = without(t, b);
                    for (r, &x) in sa.iter().enumerate() {
                        for (cc, &y) in tb.iter().enumerate() {
                            sub[r * q + cc] = gram[x * (n + 1) + y];
                        }
                    }
                    let integral = if s[a] == t[b] { base + base } else { base };
                    let term = integral * det_small(&sub, q);
                    acc = if (a + b) % 2 == 0 { acc + term } else { acc - term };
                }
            }
            out[i * m + j] = acc * qf;
            out[j * m + i] = acc * qf;
        }
    }
    out
}

/// Components of `dλ_{c_1} ∧ … ∧ dλ_{c_q}` on the basis `dx_I`, `I` running
/// over increasing q-index tuples in lexicographic order.
fn wedge_components<T: Real>(g: &[T], n: usize, idx: &[usize], multi: &[Vec<usize>]) -> Vec<T> {
    let q = idx.len();
    let mut sub = vec![T::zero(); q * q];
    multi
        .iter()
        .map(|cols| {
            for (r, &k) in idx.iter().enumerate() {
                for (cc, &l) in cols.iter().enumerate() {
                    sub[r * q + cc] = g[k * n + l];
                }
            }
            det_small(&sub, q)
        })
        .collect()
}

/// Components of the degree-`q` Whitney form of cell `c` for the given
/// values on the local q-faces, at barycentric point `bary`; basis `dx_I`
/// in lexicographic order of `I`.
pub fn local_components<T: Real>(
    complex: &SimplicialComplex<T>,
    c: usize,
    q: usize,
    face_values: &[T],
    bary: &[T],
) -> Vec<T> {
    let n = complex.dim();
    let g = complex.grad_lambda(c);
    let multi = local_subsets(n, q);
    let qf = T::lit(factorial(q));
    let mut out = vec![T::zero(); multi.len()];
    for (s, &u) in local_subsets(n + 1, q + 1).iter().zip(face_values) {
        if u == T::zero() {
            continue;
        }
        for i in 0..=q {
            let w = wedge_components(g, n, &without(s, i), &multi);
            let coef = if i % 2 == 0 {
                u * bary[s[i]] * qf
            } else {
                -u * bary[s[i]] * qf
            };
            for (o, x) in out.iter_mut().zip(w) {
                *o += coef * x;
            }
        }
    }
    out
}

/// Reorders `dx_I` components into the standard proxy: scalars for
/// degrees 0 and N, vectors for degree 1, and the curl convention for
/// 2-forms in three dimensions.
pub fn to_proxy<T: Real>(n: usize, q: usize, comps: Vec<T>) -> Vec<T> {
    if n == 3 && q == 2 {
        // (dx12, dx13, dx23) -> (ω23, −ω13, ω12)
        vec![comps[2], -comps[1], comps[0]]
    } else {
        comps
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::box_mesh;

    #[test]
    fn small_determinants() {
        let a: [f64; 16] = [
            2.0, 0.0, 1.0, 1.0, 3.0, 0.0, 0.0, 1.0, 4.0, 0.5, 0.0, 1.0, 0.0, 2.0, 1.0, 1.0,
        ];
        // Expansion along the first row checked by hand for the 3x3 block.
        assert!((det_small::<f64>(&[2.0, 0.0, 1.0, 1.0, 3.0, 0.0, 0.0, 1.0, 4.0], 3) - 25.0).abs() < 1e-14);
        let d4 = det_small(&a, 4);
        let m = nalgebra::DMatrix::from_row_slice(4, 4, &a);
        assert!((d4 - m.determinant()).abs() < 1e-12);
    }

    #[test]
    fn scalar_mass_is_p1_mass() {
        let m = box_mesh::<f64>(2, 1).unwrap();
        let loc = local_mass(&m, 0, 0);
        let v = m.volume(0);
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { v / 6.0 } else { v / 12.0 };
                assert!((loc[i * 3 + j] - want).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn top_degree_mass_is_inverse_volume() {
        for dim in 2..=3 {
            let m = box_mesh::<f64>(dim, 1).unwrap();
            let loc = local_mass(&m, 0, dim);
            assert!((loc[0] - 1.0 / m.volume(0)).abs() < 1e-12);
        }
    }
}
