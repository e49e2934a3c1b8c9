//! HBVM(k,s) for autonomous ODEs `ẏ = f(y)` on a uniform mesh.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::method::{Hbvm, StepPolynomial};
use crate::report::RunReport;
use crate::solver::{solve_gamma_with, solve_stages_with, InitialGuess, SolverSettings};
use crate::tableau::ButcherTableau;

pub trait OdeProblem {
    fn dim(&self) -> usize;

    fn rhs(&self, y: &[f64], dy: &mut [f64]) -> Result<()>;

    /// `∂f/∂y`, if available. Only simplified Newton uses it.
    fn jacobian(&self, _y: &[f64]) -> Option<DMatrix<f64>> {
        None
    }
}

impl<P: OdeProblem + ?Sized> OdeProblem for &P {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn rhs(&self, y: &[f64], dy: &mut [f64]) -> Result<()> {
        (**self).rhs(y, dy)
    }
    fn jacobian(&self, y: &[f64]) -> Option<DMatrix<f64>> {
        (**self).jacobian(y)
    }
}

impl<P: OdeProblem + ?Sized> OdeProblem for Box<P> {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn rhs(&self, y: &[f64], dy: &mut [f64]) -> Result<()> {
        (**self).rhs(y, dy)
    }
    fn jacobian(&self, y: &[f64]) -> Option<DMatrix<f64>> {
        (**self).jacobian(y)
    }
}

/// An [`OdeProblem`] from a closure.
pub struct FnOde<F> {
    dim: usize,
    f: F,
}

impl<F> FnOde<F>
where
    F: Fn(&[f64], &mut [f64]),
{
    pub fn new(dim: usize, f: F) -> Self {
        Self { dim, f }
    }
}

impl<F> OdeProblem for FnOde<F>
where
    F: Fn(&[f64], &mut [f64]),
{
    fn dim(&self) -> usize {
        self.dim
    }

    fn rhs(&self, y: &[f64], dy: &mut [f64]) -> Result<()> {
        (self.f)(y, dy);
        Ok(())
    }
}

/// Converged Fourier coefficients for one step.
#[derive(Debug, Clone, PartialEq)]
pub struct GammaSolution {
    /// `s` blocks of length `m`.
    pub gamma: Vec<f64>,
    pub iterations: usize,
}

fn check_dim(problem: &impl OdeProblem, y: &[f64]) -> Result<()> {
    if y.len() != problem.dim() {
        return Err(Error::Dimension {
            expected: problem.dim(),
            got: y.len(),
        });
    }
    Ok(())
}

pub fn solve_gamma(
    problem: &impl OdeProblem,
    method: &Hbvm,
    y_prev: &[f64],
    h: f64,
    settings: &SolverSettings,
    guess: Option<&[f64]>,
) -> Result<GammaSolution> {
    check_dim(problem, y_prev)?;
    let jac = match settings.scheme {
        crate::solver::IterationScheme::SimplifiedNewton => problem.jacobian(y_prev),
        crate::solver::IterationScheme::FixedPoint => None,
    };
    let (gamma, iterations) = solve_gamma_with(method, y_prev, h, settings, guess, jac, |_, u, out| {
        problem.rhs(u, out)
    })?;
    Ok(GammaSolution { gamma, iterations })
}

/// Stage formulation `Y_i = y + h Σ a_iℓ f(Y_ℓ)`; `k` blocks of `m`.
///
/// Equivalent to [`solve_gamma`] but of dimension `k` instead of `s`; kept
/// for cross-validation.
pub fn solve_stages(
    problem: &impl OdeProblem,
    tableau: &ButcherTableau,
    y_prev: &[f64],
    h: f64,
    settings: &SolverSettings,
) -> Result<(Vec<f64>, usize)> {
    check_dim(problem, y_prev)?;
    let jac = match settings.scheme {
        crate::solver::IterationScheme::SimplifiedNewton => problem.jacobian(y_prev),
        crate::solver::IterationScheme::FixedPoint => None,
    };
    solve_stages_with(tableau, y_prev, h, settings, jac, |u, out| problem.rhs(u, out))
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepOutcome {
    pub y_next: Vec<f64>,
    pub polynomial: StepPolynomial,
    pub iterations: usize,
}

/// One step: `y_next = y_prev + h γ̂_0`.
pub fn step(
    problem: &impl OdeProblem,
    method: &Hbvm,
    y_prev: &[f64],
    h: f64,
    settings: &SolverSettings,
    guess: Option<&[f64]>,
) -> Result<StepOutcome> {
    let sol = solve_gamma(problem, method, y_prev, h, settings, guess)?;
    let polynomial = StepPolynomial::new(y_prev.to_vec(), h, sol.gamma);
    Ok(StepOutcome {
        y_next: polynomial.end_value(),
        polynomial,
        iterations: sol.iterations,
    })
}

/// `n_steps` uniform steps from `t0` to `t_end`.
pub fn integrate(
    problem: &impl OdeProblem,
    method: &Hbvm,
    y0: &[f64],
    t0: f64,
    t_end: f64,
    n_steps: usize,
    settings: &SolverSettings,
) -> Result<RunReport> {
    if n_steps == 0 {
        return Err(Error::InvalidMesh("at least one step is required".into()));
    }
    if !t0.is_finite() || !t_end.is_finite() || t_end <= t0 {
        return Err(Error::InvalidMesh(format!("empty time span [{t0}, {t_end}]")));
    }
    check_dim(problem, y0)?;
    settings.validate()?;
    let h = (t_end - t0) / n_steps as f64;
    let mut report = RunReport::empty(t0, h);
    report.states.reserve(n_steps + 1);
    report.states.push(y0.to_vec());
    for n in 1..=n_steps {
        let guess = match settings.initial_guess {
            InitialGuess::CarryOver => report.segments.last().map(|p| p.gamma_flat()),
            InitialGuess::Zero => None,
        };
        let y_prev = &report.states[n - 1];
        let out = step(problem, method, y_prev, h, settings, guess).map_err(|e| Error::StepFailed {
            step: n,
            source: Box::new(e),
        })?;
        report.states.push(out.y_next);
        report.iterations.push(out.iterations);
        report.segments.push(out.polynomial);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::IterationScheme;
    use approx::assert_abs_diff_eq;

    struct Linear(f64);

    impl OdeProblem for Linear {
        fn dim(&self) -> usize {
            1
        }
        fn rhs(&self, y: &[f64], dy: &mut [f64]) -> Result<()> {
            dy[0] = self.0 * y[0];
            Ok(())
        }
        fn jacobian(&self, _y: &[f64]) -> Option<DMatrix<f64>> {
            Some(DMatrix::from_element(1, 1, self.0))
        }
    }

    #[test]
    fn zero_field_converges_immediately() {
        let zero = FnOde::new(3, |_: &[f64], dy: &mut [f64]| dy.fill(0.0));
        let method = Hbvm::gauss(3, 2).unwrap();
        let y = [1.0, -2.0, 3.5];
        let sol = solve_gamma(&zero, &method, &y, 0.3, &SolverSettings::default(), None).unwrap();
        assert_eq!(sol.iterations, 1);
        assert!(sol.gamma.iter().all(|&g| g == 0.0));
        let out = step(&zero, &method, &y, 0.3, &SolverSettings::default(), None).unwrap();
        assert_eq!(out.y_next, y.to_vec());
        let (stages, _) = solve_stages(&zero, &method.tableau(), &y, 0.3, &SolverSettings::default()).unwrap();
        for i in 0..3 {
            assert_eq!(&stages[i * 3..(i + 1) * 3], &y);
        }
    }

    #[test]
    fn implicit_midpoint_on_linear_problem() {
        let lambda = 1.0;
        let h = 0.1;
        let method = Hbvm::gauss(1, 1).unwrap();
        for scheme in [IterationScheme::FixedPoint, IterationScheme::SimplifiedNewton] {
            let settings = SolverSettings { scheme, ..Default::default() };
            let sol = solve_gamma(&Linear(lambda), &method, &[1.0], h, &settings, None).unwrap();
            assert_abs_diff_eq!(sol.gamma[0], lambda / (1.0 - h * lambda / 2.0), epsilon = 1e-14);
            let out = step(&Linear(lambda), &method, &[1.0], h, &settings, None).unwrap();
            assert_abs_diff_eq!(out.y_next[0], 1.05 / 0.95, epsilon = 1e-15);
            assert_abs_diff_eq!(out.y_next[0], 1.105263157894737, epsilon = 1e-15);
        }
    }

    #[test]
    fn newton_converges_in_one_iteration_on_linear_problems() {
        // The frozen Jacobian is exact, so the first update solves the system.
        let method = Hbvm::gauss(4, 2).unwrap();
        let settings = SolverSettings {
            scheme: IterationScheme::SimplifiedNewton,
            ..Default::default()
        };
        let sol = solve_gamma(&Linear(-30.0), &method, &[1.0], 0.5, &settings, None).unwrap();
        assert!(sol.iterations <= 2, "{}", sol.iterations);
    }

    #[test]
    fn gauss2_stages_on_linear_problem() {
        // (I - h λ A) Y = y 𝟙
        let lambda = -0.7;
        let h = 0.2;
        let tab = ButcherTableau::gauss(2, 2).unwrap();
        let a = tab.a();
        let m = nalgebra::Matrix2::new(
            1.0 - h * lambda * a[(0, 0)],
            -h * lambda * a[(0, 1)],
            -h * lambda * a[(1, 0)],
            1.0 - h * lambda * a[(1, 1)],
        );
        let exact = m.lu().solve(&nalgebra::Vector2::new(1.0, 1.0)).unwrap();
        let (stages, _) = solve_stages(&Linear(lambda), &tab, &[1.0], h, &SolverSettings::default()).unwrap();
        assert_abs_diff_eq!(stages[0], exact[0], epsilon = 1e-14);
        assert_abs_diff_eq!(stages[1], exact[1], epsilon = 1e-14);
    }

    #[test]
    fn single_step_integration_matches_step() {
        let method = Hbvm::gauss(2, 2).unwrap();
        let settings = SolverSettings::default();
        let rep = integrate(&Linear(-1.0), &method, &[1.0], 0.0, 0.25, 1, &settings).unwrap();
        let out = step(&Linear(-1.0), &method, &[1.0], 0.25, &settings, None).unwrap();
        assert_eq!(rep.states[1], out.y_next);
        assert_eq!(rep.segments[0], out.polynomial);
        assert_eq!(rep.steps(), 1);
    }

    #[test]
    fn carry_over_changes_only_iteration_counts() {
        let method = Hbvm::gauss(3, 3).unwrap();
        let zero = SolverSettings::default();
        let carry = SolverSettings { initial_guess: InitialGuess::CarryOver, ..zero };
        let a = integrate(&Linear(-1.0), &method, &[1.0], 0.0, 2.0, 40, &zero).unwrap();
        let b = integrate(&Linear(-1.0), &method, &[1.0], 0.0, 2.0, 40, &carry).unwrap();
        assert!(b.total_iterations() < a.total_iterations());
        for (x, y) in a.states.iter().zip(&b.states) {
            assert_abs_diff_eq!(x[0], y[0], epsilon = 1e-14);
        }
    }

    #[test]
    fn bad_inputs() {
        let method = Hbvm::gauss(2, 2).unwrap();
        let s = SolverSettings::default();
        assert!(integrate(&Linear(1.0), &method, &[1.0], 0.0, 1.0, 0, &s).is_err());
        assert!(integrate(&Linear(1.0), &method, &[1.0], 1.0, 1.0, 4, &s).is_err());
        assert!(matches!(
            integrate(&Linear(1.0), &method, &[1.0, 2.0], 0.0, 1.0, 4, &s),
            Err(Error::Dimension { .. })
        ));
    }

    #[test]
    fn failing_step_is_indexed() {
        // blows up in finite time; fixed point eventually fails
        let blowup = FnOde::new(1, |y: &[f64], dy: &mut [f64]| dy[0] = y[0] * y[0]);
        let method = Hbvm::gauss(2, 2).unwrap();
        let err = integrate(&blowup, &method, &[1.0], 0.0, 2.0, 10, &SolverSettings::default()).unwrap_err();
        match err {
            Error::StepFailed { step, .. } => assert!((1..=10).contains(&step)),
            other => panic!("unexpected {other:?}"),
        }
    }
}
