//! Nonlinear iterations for one HBVM step.
//!
//! The unknowns are the `s` Fourier coefficient blocks `γ̂_j ∈ R^m`, which
//! satisfy
//!
//! ```text
//! γ̂_j = Σ_i b_i P_j(c_i) f(u(c_i h)),   u(c_i h) = y + h Σ_l ∫₀^{c_i} P_l · γ̂_l
//! ```
//!
//! An iteration stops once `h · max|Δγ̂| <= atol + rtol · (1 + max|y|)`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::method::Hbvm;
use crate::tableau::ButcherTableau;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum IterationScheme {
    #[default]
    FixedPoint,
    /// Newton with the Jacobian frozen at the left end of the step.
    SimplifiedNewton,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InitialGuess {
    #[default]
    Zero,
    /// Start from the previous step's coefficients.
    CarryOver,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverSettings {
    pub scheme: IterationScheme,
    pub rtol: f64,
    pub atol: f64,
    pub max_iter: usize,
    pub initial_guess: InitialGuess,
}

impl Default for SolverSettings {
    fn default() -> Self {
        Self {
            scheme: IterationScheme::FixedPoint,
            rtol: 1e-14,
            atol: 1e-16,
            max_iter: 100,
            initial_guess: InitialGuess::Zero,
        }
    }
}

impl SolverSettings {
    /// Iterate to the round-off plateau; used for long benchmark runs.
    pub fn round_off() -> Self {
        Self {
            rtol: 1e-17,
            atol: 1e-19,
            max_iter: 200,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rtol > 0.0 && self.rtol.is_finite()) {
            return Err(Error::InvalidSettings(format!("rtol must be positive, got {}", self.rtol)));
        }
        if !(self.atol > 0.0 && self.atol.is_finite()) {
            return Err(Error::InvalidSettings(format!("atol must be positive, got {}", self.atol)));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidSettings("max_iter must be at least 1".into()));
        }
        Ok(())
    }

    /// Absolute stopping threshold for a step starting at `y`.
    pub fn threshold(&self, y: &[f64]) -> f64 {
        self.atol + self.rtol * (1.0 + max_abs(y))
    }
}

pub(crate) fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |acc, x| acc.max(x.abs()))
}

fn check_finite(v: &[f64]) -> Result<()> {
    if v.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite)
    }
}

// A stalled update within this factor of the threshold counts as converged:
// the iteration has hit its round-off floor.
const PLATEAU_FACTOR: f64 = 100.0;

/// Solves for `γ̂` (flattened, `s` blocks of `m`).
///
/// `field(i, u, out)` evaluates the vector field at stage `i` with current
/// value `u`; the DDE stepper closes over the (already known) delayed values.
pub(crate) fn solve_gamma_with<F>(
    method: &Hbvm,
    y_prev: &[f64],
    h: f64,
    settings: &SolverSettings,
    guess: Option<&[f64]>,
    jacobian: Option<DMatrix<f64>>,
    mut field: F,
) -> Result<(Vec<f64>, usize)>
where
    F: FnMut(usize, &[f64], &mut [f64]) -> Result<()>,
{
    settings.validate()?;
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::InvalidMesh(format!("step size must be positive, got {h}")));
    }
    let m = y_prev.len();
    let s = method.degree();
    let k = method.stages();
    let mut gamma = match guess {
        Some(g) if g.len() == s * m => g.to_vec(),
        _ => vec![0.0; s * m],
    };
    let tol = settings.threshold(y_prev);

    let newton = match settings.scheme {
        IterationScheme::FixedPoint => None,
        IterationScheme::SimplifiedNewton => {
            let jac = jacobian.ok_or_else(|| {
                Error::InvalidSettings("simplified Newton needs a Jacobian".into())
            })?;
            if jac.shape() != (m, m) {
                return Err(Error::Dimension { expected: m, got: jac.nrows() });
            }
            let coupling = method.coupling_matrix();
            let n = s * m;
            let mut g = DMatrix::<f64>::identity(n, n);
            for j in 0..s {
                for l in 0..s {
                    let w = h * coupling[(j, l)];
                    for a in 0..m {
                        for b in 0..m {
                            g[(j * m + a, l * m + b)] -= w * jac[(a, b)];
                        }
                    }
                }
            }
            let lu = g.lu();
            if !lu.is_invertible() {
                return Err(Error::Singular("simplified Newton matrix"));
            }
            Some(lu)
        }
    };

    let mut u = vec![0.0; m];
    let mut f = vec![0.0; m];
    let mut image = vec![0.0; s * m];
    let mut prev_err = f64::INFINITY;
    for it in 1..=settings.max_iter {
        image.iter_mut().for_each(|x| *x = 0.0);
        for i in 0..k {
            u.copy_from_slice(y_prev);
            for (l, &w) in method.integrals_at(i).iter().enumerate() {
                for (ua, ga) in u.iter_mut().zip(&gamma[l * m..(l + 1) * m]) {
                    *ua += h * w * ga;
                }
            }
            field(i, &u, &mut f)?;
            check_finite(&f)?;
            for (j, &bp) in method.weighted_values_at(i).iter().enumerate() {
                for (ia, fa) in image[j * m..(j + 1) * m].iter_mut().zip(&f) {
                    *ia += bp * fa;
                }
            }
        }
        let err = match &newton {
            None => {
                let err = h * gamma
                    .iter()
                    .zip(&image)
                    .fold(0.0f64, |acc, (g, n)| acc.max((n - g).abs()));
                std::mem::swap(&mut gamma, &mut image);
                err
            }
            Some(lu) => {
                let residual = DVector::from_iterator(
                    s * m,
                    image.iter().zip(&gamma).map(|(n, g)| n - g),
                );
                let delta = lu.solve(&residual).ok_or(Error::Singular("simplified Newton matrix"))?;
                for (g, d) in gamma.iter_mut().zip(delta.iter()) {
                    *g += d;
                }
                h * delta.amax()
            }
        };
        if !err.is_finite() {
            return Err(Error::NonFinite);
        }
        if err <= tol || (err >= prev_err && err <= PLATEAU_FACTOR * tol) {
            return Ok((gamma, it));
        }
        prev_err = err;
    }
    Err(Error::NoConvergence {
        iterations: settings.max_iter,
        residual: prev_err,
    })
}

/// Solves the stage equations `Y_i = y + h Σ_ℓ a_iℓ f(Y_ℓ)` (`k` blocks of
/// `m`, flattened). Returns the stages and the iteration count.
pub(crate) fn solve_stages_with<F>(
    tableau: &ButcherTableau,
    y_prev: &[f64],
    h: f64,
    settings: &SolverSettings,
    jacobian: Option<DMatrix<f64>>,
    mut field: F,
) -> Result<(Vec<f64>, usize)>
where
    F: FnMut(&[f64], &mut [f64]) -> Result<()>,
{
    settings.validate()?;
    let m = y_prev.len();
    let k = tableau.stages();
    let a = tableau.a();
    let mut stages: Vec<f64> = (0..k).flat_map(|_| y_prev.iter().copied()).collect();
    let tol = settings.threshold(y_prev);

    let newton = match settings.scheme {
        IterationScheme::FixedPoint => None,
        IterationScheme::SimplifiedNewton => {
            let jac = jacobian.ok_or_else(|| {
                Error::InvalidSettings("simplified Newton needs a Jacobian".into())
            })?;
            let n = k * m;
            let mut g = DMatrix::<f64>::identity(n, n);
            for i in 0..k {
                for l in 0..k {
                    for p in 0..m {
                        for q in 0..m {
                            g[(i * m + p, l * m + q)] -= h * a[(i, l)] * jac[(p, q)];
                        }
                    }
                }
            }
            let lu = g.lu();
            if !lu.is_invertible() {
                return Err(Error::Singular("stage Newton matrix"));
            }
            Some(lu)
        }
    };

    let mut fvals = vec![0.0; k * m];
    let mut next = vec![0.0; k * m];
    let mut prev_err = f64::INFINITY;
    for it in 1..=settings.max_iter {
        for l in 0..k {
            field(&stages[l * m..(l + 1) * m], &mut fvals[l * m..(l + 1) * m])?;
        }
        check_finite(&fvals)?;
        for i in 0..k {
            for p in 0..m {
                let mut acc = y_prev[p];
                for l in 0..k {
                    acc += h * a[(i, l)] * fvals[l * m + p];
                }
                next[i * m + p] = acc;
            }
        }
        let err = match &newton {
            None => {
                let err = stages
                    .iter()
                    .zip(&next)
                    .fold(0.0f64, |acc, (y, n)| acc.max((n - y).abs()));
                std::mem::swap(&mut stages, &mut next);
                err
            }
            Some(lu) => {
                let residual =
                    DVector::from_iterator(k * m, next.iter().zip(&stages).map(|(n, y)| n - y));
                let delta = lu.solve(&residual).ok_or(Error::Singular("stage Newton matrix"))?;
                for (y, d) in stages.iter_mut().zip(delta.iter()) {
                    *y += d;
                }
                delta.amax()
            }
        };
        if !err.is_finite() {
            return Err(Error::NonFinite);
        }
        if err <= tol || (err >= prev_err && err <= PLATEAU_FACTOR * tol) {
            return Ok((stages, it));
        }
        prev_err = err;
    }
    Err(Error::NoConvergence {
        iterations: settings.max_iter,
        residual: prev_err,
    })
}
