//! The HBVM(k,s) method data used by the steppers, and the per-step
//! polynomial it produces.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::legendre::LegendreBasis;
use crate::quadrature::QuadratureRule;
use crate::tableau::ButcherTableau;

/// HBVM(k,s): a `k`-point quadrature and a degree-`s` Legendre expansion.
#[derive(Debug, Clone, PartialEq)]
pub struct Hbvm {
    rule: QuadratureRule,
    s: usize,
    // row-major k × s tables
    values: Vec<f64>,
    integrals: Vec<f64>,
    weighted_values: Vec<f64>,
}

impl Hbvm {
    pub fn new(rule: QuadratureRule, s: usize) -> Result<Self> {
        let k = rule.len();
        if s == 0 || s > k {
            return Err(Error::InvalidDegree { k, s });
        }
        let basis = LegendreBasis::new(s + 1);
        let mut values = vec![0.0; k * s];
        let mut integrals = vec![0.0; k * s];
        let mut weighted_values = vec![0.0; k * s];
        let mut v = vec![0.0; s];
        for (i, (&c, &b)) in rule.nodes().iter().zip(rule.weights()).enumerate() {
            basis.fill_values(c, &mut v);
            basis.fill_integrals(c, &mut integrals[i * s..(i + 1) * s]);
            for j in 0..s {
                values[i * s + j] = v[j];
                weighted_values[i * s + j] = b * v[j];
            }
        }
        Ok(Self {
            rule,
            s,
            values,
            integrals,
            weighted_values,
        })
    }

    /// HBVM(k,s) on Gauss-Legendre abscissae.
    pub fn gauss(k: usize, s: usize) -> Result<Self> {
        Self::new(QuadratureRule::gauss(k)?, s)
    }

    pub fn stages(&self) -> usize {
        self.rule.len()
    }

    pub fn degree(&self) -> usize {
        self.s
    }

    pub fn rule(&self) -> &QuadratureRule {
        &self.rule
    }

    pub fn abscissae(&self) -> &[f64] {
        self.rule.nodes()
    }

    pub fn tableau(&self) -> ButcherTableau {
        ButcherTableau::new(&self.rule, self.s).expect("validated at construction")
    }

    /// `P_0(c_i)..P_{s-1}(c_i)`.
    pub fn values_at(&self, i: usize) -> &[f64] {
        &self.values[i * self.s..(i + 1) * self.s]
    }

    /// `∫₀^{c_i} P_0 .. ∫₀^{c_i} P_{s-1}`.
    pub fn integrals_at(&self, i: usize) -> &[f64] {
        &self.integrals[i * self.s..(i + 1) * self.s]
    }

    pub(crate) fn weighted_values_at(&self, i: usize) -> &[f64] {
        &self.weighted_values[i * self.s..(i + 1) * self.s]
    }

    /// `𝒫_sᵀ Ω ℐ_s`, the `s × s` matrix coupling Fourier coefficients in the
    /// linearised γ̂ equations.
    pub(crate) fn coupling_matrix(&self) -> DMatrix<f64> {
        let s = self.s;
        DMatrix::from_fn(s, s, |j, l| {
            (0..self.stages())
                .map(|i| self.weighted_values_at(i)[j] * self.integrals_at(i)[l])
                .sum()
        })
    }

    pub fn label(&self) -> String {
        format!("HBVM({},{})", self.stages(), self.s)
    }
}

/// Dense output of one step: `u(ch) = y_left + h Σ_j ∫₀^c P_j · γ̂_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct StepPolynomial {
    y_left: Vec<f64>,
    h: f64,
    // s blocks of length m
    gamma: Vec<f64>,
}

impl StepPolynomial {
    pub fn new(y_left: Vec<f64>, h: f64, gamma: Vec<f64>) -> Self {
        debug_assert!(y_left.is_empty() || gamma.len().is_multiple_of(y_left.len()));
        Self { y_left, h, gamma }
    }

    pub fn dim(&self) -> usize {
        self.y_left.len()
    }

    pub fn degree(&self) -> usize {
        if self.y_left.is_empty() {
            0
        } else {
            self.gamma.len() / self.y_left.len()
        }
    }

    pub fn y_left(&self) -> &[f64] {
        &self.y_left
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    /// Coefficient block `γ̂_j`.
    pub fn gamma(&self, j: usize) -> &[f64] {
        let m = self.dim();
        &self.gamma[j * m..(j + 1) * m]
    }

    pub fn gamma_flat(&self) -> &[f64] {
        &self.gamma
    }

    /// Value at `y_left + h γ̂_0`, the right end of the step.
    pub fn end_value(&self) -> Vec<f64> {
        self.y_left
            .iter()
            .zip(self.gamma(0))
            .map(|(y, g)| y + self.h * g)
            .collect()
    }

    /// `u(ch)` for `c ∈ [0, 1]`.
    pub fn eval(&self, c: f64) -> Result<Vec<f64>> {
        if !(0.0..=1.0).contains(&c) {
            return Err(Error::OutsideUnitInterval(c));
        }
        if c == 0.0 {
            return Ok(self.y_left.clone());
        }
        let s = self.degree();
        let basis = LegendreBasis::new(s + 1);
        let mut ints = vec![0.0; s];
        basis.fill_integrals(c, &mut ints);
        let mut out = vec![0.0; self.dim()];
        self.eval_with_integrals(&ints, &mut out);
        Ok(out)
    }

    /// `u(ch)` given precomputed `∫₀^c P_j`, `j < s`.
    pub fn eval_with_integrals(&self, integrals: &[f64], out: &mut [f64]) {
        let m = self.dim();
        out.copy_from_slice(&self.y_left);
        for (j, &w) in integrals.iter().enumerate() {
            let g = &self.gamma[j * m..(j + 1) * m];
            for (o, &gj) in out.iter_mut().zip(g) {
                *o += self.h * w * gj;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn table_shapes() {
        let m = Hbvm::gauss(4, 2).unwrap();
        assert_eq!(m.stages(), 4);
        assert_eq!(m.degree(), 2);
        assert_eq!(m.values_at(3).len(), 2);
        assert_eq!(m.values_at(0)[0], 1.0);
        assert_abs_diff_eq!(m.integrals_at(1)[0], m.abscissae()[1], epsilon = 1e-16);
        assert!(Hbvm::gauss(2, 3).is_err());
        assert_eq!(m.label(), "HBVM(4,2)");
    }

    #[test]
    fn coupling_matrix_is_x_s_for_exact_quadrature() {
        let m = Hbvm::gauss(5, 3).unwrap();
        let x = m.tableau().structure().x_s.clone();
        assert!((m.coupling_matrix() - x).amax() < 1e-14);
    }

    #[test]
    fn step_polynomial_endpoints() {
        let p = StepPolynomial::new(vec![1.0, -2.0], 0.3, vec![0.5, 1.0, -0.25, 4.0, 0.1, 0.2]);
        assert_eq!(p.degree(), 3);
        assert_eq!(p.eval(0.0).unwrap(), vec![1.0, -2.0]);
        let end = p.eval(1.0).unwrap();
        let expect = p.end_value();
        for (a, b) in end.iter().zip(&expect) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-15 * (1.0 + b.abs()));
        }
        assert_abs_diff_eq!(expect[0], 1.0 + 0.3 * 0.5, epsilon = 1e-16);
        assert!(p.eval(1.2).is_err());
    }
}
