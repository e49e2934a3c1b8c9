//! HBVM(k,s) Butcher tableau, `A = ℐ_s 𝒫_sᵀ Ω`, and the structure matrices
//! behind it.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::legendre::{xi, LegendreBasis};
use crate::quadrature::QuadratureRule;

/// Matrices built from a quadrature rule and a degree `s`.
///
/// * `p_s[i][j] = P_j(c_i)`, `k × s`
/// * `i_s[i][j] = ∫₀^{c_i} P_j`, `k × s`
/// * `omega = diag(b)`
/// * `p_s1`: as `p_s` with one more column, `k × (s+1)`
/// * `xhat`: `(s+1) × s` with `ξ_0` in the corner, `ξ_{j+1}` below and
///   `−ξ_j` above the diagonal, so that `ℐ_s = 𝒫_{s+1} X̂_s`
/// * `x_s`: top `s × s` block of `xhat`
#[derive(Debug, Clone, PartialEq)]
pub struct StructureMatrices {
    pub p_s: DMatrix<f64>,
    pub i_s: DMatrix<f64>,
    pub omega: DMatrix<f64>,
    pub p_s1: DMatrix<f64>,
    pub xhat: DMatrix<f64>,
    pub x_s: DMatrix<f64>,
}

impl StructureMatrices {
    pub fn new(rule: &QuadratureRule, s: usize) -> Result<Self> {
        let k = rule.len();
        if s == 0 || s > k {
            return Err(Error::InvalidDegree { k, s });
        }
        let basis = LegendreBasis::new(s + 1);
        let mut p_s1 = DMatrix::zeros(k, s + 1);
        let mut i_s = DMatrix::zeros(k, s);
        let mut vals = vec![0.0; s + 1];
        let mut ints = vec![0.0; s];
        for (i, &c) in rule.nodes().iter().enumerate() {
            basis.fill_values(c, &mut vals);
            basis.fill_integrals(c, &mut ints);
            for j in 0..=s {
                p_s1[(i, j)] = vals[j];
            }
            for j in 0..s {
                i_s[(i, j)] = ints[j];
            }
        }
        let p_s = p_s1.columns(0, s).into_owned();
        let omega = DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(rule.weights()));
        let xhat = xhat_matrix(s);
        let x_s = xhat.rows(0, s).into_owned();
        Ok(Self {
            p_s,
            i_s,
            omega,
            p_s1,
            xhat,
            x_s,
        })
    }
}

/// The `(s+1) × s` matrix carrying the integral recurrence in the Legendre basis.
pub fn xhat_matrix(s: usize) -> DMatrix<f64> {
    let mut x = DMatrix::zeros(s + 1, s);
    if s == 0 {
        return x;
    }
    x[(0, 0)] = xi(0);
    for j in 0..s {
        x[(j + 1, j)] = xi(j + 1);
        if j > 0 {
            x[(j - 1, j)] = -xi(j);
        }
    }
    x
}

#[derive(Debug, Clone, PartialEq)]
pub struct ButcherTableau {
    s: usize,
    order: usize,
    c: Vec<f64>,
    b: Vec<f64>,
    a: DMatrix<f64>,
    structure: StructureMatrices,
}

impl ButcherTableau {
    pub fn new(rule: &QuadratureRule, s: usize) -> Result<Self> {
        let structure = StructureMatrices::new(rule, s)?;
        let a = &structure.i_s * structure.p_s.transpose() * &structure.omega;
        Ok(Self {
            s,
            order: rule.order(),
            c: rule.nodes().to_vec(),
            b: rule.weights().to_vec(),
            a,
            structure,
        })
    }

    /// HBVM(k,s) on `k` Gauss-Legendre nodes.
    pub fn gauss(k: usize, s: usize) -> Result<Self> {
        Self::new(&QuadratureRule::gauss(k)?, s)
    }

    pub fn stages(&self) -> usize {
        self.c.len()
    }

    pub fn degree(&self) -> usize {
        self.s
    }

    /// Order `q` of the underlying quadrature.
    pub fn quadrature_order(&self) -> usize {
        self.order
    }

    pub fn c(&self) -> &[f64] {
        &self.c
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    pub fn a(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn structure(&self) -> &StructureMatrices {
        &self.structure
    }

    /// Max-norm residuals of the W-transformation identities.
    ///
    /// These are only expected to vanish when `q >= 2s`; otherwise the
    /// returned numbers document the violation.
    pub fn w_transformation_residuals(&self) -> WTransformReport {
        let m = &self.structure;
        let s = self.s;
        let pt_omega = m.p_s.transpose() * &m.omega;

        let orthonormality = (&pt_omega * &m.p_s - DMatrix::<f64>::identity(s, s)).amax();
        let mut target = DMatrix::zeros(s, s + 1);
        for j in 0..s {
            target[(j, j)] = 1.0;
        }
        let mixed = (&pt_omega * &m.p_s1 - target).amax();
        let x_recovery = (&pt_omega * &self.a * &m.p_s - &m.x_s).amax();
        let factorization = (&m.i_s - &m.p_s1 * &m.xhat).amax();
        let factored_a = &m.p_s1 * &m.xhat * &pt_omega;
        let factored_tableau = (&factored_a - &self.a).amax();
        let row_sum = self
            .a
            .row_iter()
            .zip(&self.c)
            .map(|(row, &c)| (row.sum() - c).abs())
            .fold(0.0, f64::max);
        WTransformReport {
            orthonormality,
            mixed,
            x_recovery,
            factorization,
            factored_tableau,
            row_sum,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WTransformReport {
    /// `|𝒫_sᵀΩ𝒫_s − I_s|`
    pub orthonormality: f64,
    /// `|𝒫_sᵀΩ𝒫_{s+1} − [I_s 0]|`
    pub mixed: f64,
    /// `|𝒫_sᵀΩ A 𝒫_s − X_s|`
    pub x_recovery: f64,
    /// `|ℐ_s − 𝒫_{s+1}X̂_s|`
    pub factorization: f64,
    /// `|𝒫_{s+1}X̂_s𝒫_sᵀΩ − A|`
    pub factored_tableau: f64,
    /// `|A𝟙 − c|`
    pub row_sum: f64,
}

impl WTransformReport {
    pub fn max(&self) -> f64 {
        [
            self.orthonormality,
            self.mixed,
            self.x_recovery,
            self.factorization,
            self.factored_tableau,
            self.row_sum,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}
