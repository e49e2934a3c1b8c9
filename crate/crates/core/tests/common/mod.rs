//! Oracles shared by the integration tests. None of these go through the
//! library's recurrence, root finder or tableau factorisation.

#![allow(dead_code)]

use nalgebra::{DMatrix, SymmetricEigen};

/// Gauss-Legendre on `[0, 1]` by the Golub-Welsch eigenvalue method.
pub fn golub_welsch(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut jac = DMatrix::<f64>::zeros(n, n);
    for i in 1..n {
        let k = i as f64;
        let beta = k / (4.0 * k * k - 1.0).sqrt();
        jac[(i, i - 1)] = beta;
        jac[(i - 1, i)] = beta;
    }
    let eig = SymmetricEigen::new(jac);
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let t = eig.eigenvalues[i];
            let v0 = eig.eigenvectors[(0, i)];
            (0.5 * (t + 1.0), v0 * v0)
        })
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    pairs.into_iter().unzip()
}

/// Monomial coefficients (ascending) of the shifted orthonormal Legendre
/// polynomials up to `n`, by Gram-Schmidt with exact monomial moments
/// `∫₀¹ x^{i+j} = 1/(i+j+1)`. Only well-conditioned for small `n`.
pub fn gram_schmidt(n: usize) -> Vec<Vec<f64>> {
    let inner = |a: &[f64], b: &[f64]| -> f64 {
        let mut s = 0.0;
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                s += x * y / (i + j + 1) as f64;
            }
        }
        s
    };
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for d in 0..=n {
        let mut v = vec![0.0; d + 1];
        v[d] = 1.0;
        for _ in 0..2 {
            for b in &basis {
                let c = inner(&v, b);
                for (i, bi) in b.iter().enumerate() {
                    v[i] -= c * bi;
                }
            }
        }
        let norm = inner(&v, &v).sqrt();
        v.iter_mut().for_each(|x| *x /= norm);
        basis.push(v);
    }
    basis
}

pub fn poly_eval(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
}

pub fn poly_integral(coeffs: &[f64], x: f64) -> f64 {
    coeffs
        .iter()
        .enumerate()
        .map(|(i, c)| c * x.powi(i as i32 + 1) / (i as f64 + 1.0))
        .sum()
}

/// Collocation tableau on `nodes`: `a_ij = ∫₀^{c_i} ℓ_j`, `b_j = ∫₀¹ ℓ_j`,
/// with `ℓ_j` the Lagrange basis, integrated exactly in monomial form.
pub fn collocation_tableau(nodes: &[f64]) -> (DMatrix<f64>, Vec<f64>) {
    let s = nodes.len();
    let lagrange: Vec<Vec<f64>> = (0..s)
        .map(|j| {
            let mut coeffs = vec![1.0];
            let mut denom = 1.0;
            for (m, &cm) in nodes.iter().enumerate() {
                if m == j {
                    continue;
                }
                let mut next = vec![0.0; coeffs.len() + 1];
                for (i, &c) in coeffs.iter().enumerate() {
                    next[i + 1] += c;
                    next[i] -= cm * c;
                }
                coeffs = next;
                denom *= nodes[j] - cm;
            }
            coeffs.iter().map(|c| c / denom).collect()
        })
        .collect();
    let a = DMatrix::from_fn(s, s, |i, j| poly_integral(&lagrange[j], nodes[i]));
    let b = (0..s).map(|j| poly_integral(&lagrange[j], 1.0)).collect();
    (a, b)
}

/// Classical RK4 with `n` steps, for reference trajectories.
pub fn rk4(f: impl Fn(&[f64]) -> Vec<f64>, y0: &[f64], t_span: f64, n: usize) -> Vec<f64> {
    let h = t_span / n as f64;
    let mut y = y0.to_vec();
    let axpy = |y: &[f64], a: f64, k: &[f64]| -> Vec<f64> { y.iter().zip(k).map(|(u, v)| u + a * v).collect() };
    for _ in 0..n {
        let k1 = f(&y);
        let k2 = f(&axpy(&y, 0.5 * h, &k1));
        let k3 = f(&axpy(&y, 0.5 * h, &k2));
        let k4 = f(&axpy(&y, h, &k3));
        for i in 0..y.len() {
            y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
    }
    y
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}
