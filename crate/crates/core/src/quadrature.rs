//! Quadrature rules on `[0, 1]`: Gauss-Legendre and interpolatory rules on
//! arbitrary distinct abscissae, each carrying its order `q` (exact on
//! polynomials of degree `< q`).

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::legendre::LegendreBasis;

/// Exactness threshold used when probing the order of an interpolatory rule.
pub const ORDER_PROBE_TOL: f64 = 1e-12;

const MIN_GAP: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    order: usize,
}

impl QuadratureRule {
    /// Number of abscissae `k`.
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Order `q`: the rule integrates every polynomial of degree `< q` exactly.
    pub fn order(&self) -> usize {
        self.order
    }

    /// Order of the quadrature error on the `j`-th Fourier coefficient, `q − j`.
    pub fn error_order(&self, j: usize) -> usize {
        self.order.saturating_sub(j)
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&c, &b)| b * f(c))
            .sum()
    }

    /// `k`-point Gauss-Legendre rule on `[0, 1]`.
    pub fn gauss(k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidAbscissae("a rule needs at least one node".into()));
        }
        let mut nodes = vec![0.0; k];
        let mut weights = vec![0.0; k];
        let half = k.div_ceil(2);
        for i in 0..half {
            // roots of L_k on [-1, 1], largest first
            let mut t = (std::f64::consts::PI * (i as f64 + 0.75) / (k as f64 + 0.5)).cos();
            let mut converged = false;
            for _ in 0..100 {
                let (p, dp) = legendre_and_derivative(k, t);
                let dt = p / dp;
                t -= dt;
                if dt.abs() <= 4.0 * f64::EPSILON {
                    converged = true;
                    break;
                }
            }
            if !converged || !t.is_finite() {
                return Err(Error::RootFinding { degree: k });
            }
            if k % 2 == 1 && i == half - 1 {
                t = 0.0;
            }
            let (_, dp) = legendre_and_derivative(k, t);
            let w = 1.0 / ((1.0 - t * t) * dp * dp);
            let x = 0.5 * (1.0 - t);
            nodes[i] = x;
            nodes[k - 1 - i] = if k % 2 == 1 && i == half - 1 { 0.5 } else { 1.0 - x };
            weights[i] = w;
            weights[k - 1 - i] = w;
        }
        Ok(Self {
            nodes,
            weights,
            order: 2 * k,
        })
    }

    /// Interpolatory rule on the given abscissae, weights obtained by moment
    /// matching in the Legendre basis: `Σ_i b_i P_j(c_i) = δ_{j0}`, `j < k`.
    ///
    /// The abscissae are sorted; they must lie in `(0, 1)` and be pairwise
    /// separated by more than `1e-10`.
    pub fn interpolatory(abscissae: &[f64]) -> Result<Self> {
        let k = abscissae.len();
        if k == 0 {
            return Err(Error::InvalidAbscissae("a rule needs at least one node".into()));
        }
        let mut nodes = abscissae.to_vec();
        if let Some(&bad) = nodes.iter().find(|&&c| !(c > 0.0 && c < 1.0)) {
            return Err(Error::InvalidAbscissae(format!("{bad} is not inside (0, 1)")));
        }
        nodes.sort_by(f64::total_cmp);
        if let Some(w) = nodes.windows(2).find(|w| w[1] - w[0] <= MIN_GAP) {
            return Err(Error::InvalidAbscissae(format!(
                "abscissae {} and {} are (nearly) coincident",
                w[0], w[1]
            )));
        }

        let basis = LegendreBasis::new(2 * k);
        let values: Vec<Vec<f64>> = nodes
            .iter()
            .map(|&c| {
                let mut v = vec![0.0; 2 * k + 1];
                basis.fill_values(c, &mut v);
                v
            })
            .collect();
        let moments = DMatrix::from_fn(k, k, |j, i| values[i][j]);
        let mut rhs = DVector::zeros(k);
        rhs[0] = 1.0;
        let weights = moments
            .clone()
            .lu()
            .solve(&rhs)
            .ok_or_else(|| Error::InvalidAbscissae("singular moment system".into()))?;
        let residual = (&moments * &weights - &rhs).amax();
        if !residual.is_finite() || residual > 1e-10 {
            return Err(Error::InvalidAbscissae(format!(
                "ill-conditioned moment system (residual {residual:e})"
            )));
        }

        let mut order = k;
        for d in k..2 * k {
            let moment: f64 = weights.iter().zip(&values).map(|(w, v)| w * v[d]).sum();
            if moment.abs() <= ORDER_PROBE_TOL {
                order = d + 1;
            } else {
                break;
            }
        }
        Ok(Self {
            nodes,
            weights: weights.iter().copied().collect(),
            order,
        })
    }
}

/// Standard (unshifted) Legendre `L_n(t)` and its derivative on `(-1, 1)`.
fn legendre_and_derivative(n: usize, t: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = t;
    for j in 1..n {
        let jf = j as f64;
        let p2 = ((2.0 * jf + 1.0) * t * p1 - jf * p0) / (jf + 1.0);
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { 1.0 } else { p1 };
    let dp = n as f64 * (t * p - p0) / (t * t - 1.0);
    (p, dp)
}
