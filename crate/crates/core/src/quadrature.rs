//! Grundmann–Möller quadrature on simplices.

use crate::scalar::Real;

/// Quadrature rule in barycentric coordinates; weights sum to one and are
/// multiplied by the cell volume at the call site.
#[derive(Clone, Debug)]
pub struct SimplexRule<T> {
    pub dim: usize,
    pub points: Vec<Vec<T>>,
    pub weights: Vec<T>,
}

fn compositions(total: usize, parts: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if parts == 1 {
        prefix.push(total);
        out.push(prefix.clone());
        prefix.pop();
        return;
    }
    for k in 0..=total {
        prefix.push(k);
        compositions(total - k, parts - 1, prefix, out);
        prefix.pop();
    }
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

impl<T: Real> SimplexRule<T> {
    /// Rule exact for polynomials of degree `2s + 1` on an `n`-simplex.
    pub fn grundmann_moeller(n: usize, s: usize) -> Self {
        let d = 2 * s + 1;
        let mut points = Vec::new();
        let mut weights = Vec::new();
        for i in 0..=s {
            let denom = (d + n - 2 * i) as f64;
            let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
            let w = sign * 2f64.powi(-(2 * s as i32)) * denom.powi(d as i32) / (factorial(i) * factorial(d + n - i))
                * factorial(n);
            let mut betas = Vec::new();
            compositions(s - i, n + 1, &mut Vec::new(), &mut betas);
            for beta in betas {
                points.push(beta.iter().map(|&b| T::lit((2 * b + 1) as f64 / denom)).collect());
                weights.push(T::lit(w));
            }
        }
        Self {
            dim: n,
            points,
            weights,
        }
    }

    /// Smallest rule exact for polynomials of the given degree.
    pub fn of_degree(n: usize, degree: usize) -> Self {
        Self::grundmann_moeller(n, degree.saturating_sub(1).div_ceil(2))
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}
