//! Constant-delay DDEs `ẏ(t) = f(y(t), y(t − τ))` on a mesh commensurable
//! with the delay (`τ = ν h`).
//!
//! Because `τ` is a whole number of steps, the delayed argument of step `n`
//! at abscissa `c_i` is `u_{n−ν}(c_i h)`: either the pre-history (when
//! `n − ν ≤ 0`) or the stored polynomial of an earlier step evaluated at the
//! same `c_i`. The delayed block is therefore known before the step's
//! nonlinear iteration starts.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::method::{Hbvm, StepPolynomial};
use crate::report::RunReport;
use crate::solver::{solve_gamma_with, InitialGuess, IterationScheme, SolverSettings};

pub trait DdeProblem {
    fn dim(&self) -> usize;

    fn delay(&self) -> f64;

    /// `f(y, w)` with `w = y(t − τ)`.
    fn rhs(&self, y: &[f64], delayed: &[f64], dy: &mut [f64]) -> Result<()>;

    /// Pre-history `φ(t)` for `t ∈ [t0 − τ, t0]`.
    fn history(&self, t: f64, out: &mut [f64]);

    /// `y_0`; defaults to `φ(t0)`.
    fn initial_value(&self, t0: f64) -> Vec<f64> {
        let mut y = vec![0.0; self.dim()];
        self.history(t0, &mut y);
        y
    }

    /// `∂f/∂y` at `(y, w)`, used by simplified Newton.
    fn jacobian_current(&self, _y: &[f64], _delayed: &[f64]) -> Option<DMatrix<f64>> {
        None
    }
}

impl<P: DdeProblem + ?Sized> DdeProblem for &P {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn delay(&self) -> f64 {
        (**self).delay()
    }
    fn rhs(&self, y: &[f64], delayed: &[f64], dy: &mut [f64]) -> Result<()> {
        (**self).rhs(y, delayed, dy)
    }
    fn history(&self, t: f64, out: &mut [f64]) {
        (**self).history(t, out)
    }
    fn initial_value(&self, t0: f64) -> Vec<f64> {
        (**self).initial_value(t0)
    }
    fn jacobian_current(&self, y: &[f64], delayed: &[f64]) -> Option<DMatrix<f64>> {
        (**self).jacobian_current(y, delayed)
    }
}

impl<P: DdeProblem + ?Sized> DdeProblem for Box<P> {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn delay(&self) -> f64 {
        (**self).delay()
    }
    fn rhs(&self, y: &[f64], delayed: &[f64], dy: &mut [f64]) -> Result<()> {
        (**self).rhs(y, delayed, dy)
    }
    fn history(&self, t: f64, out: &mut [f64]) {
        (**self).history(t, out)
    }
    fn initial_value(&self, t0: f64) -> Vec<f64> {
        (**self).initial_value(t0)
    }
    fn jacobian_current(&self, y: &[f64], delayed: &[f64]) -> Option<DMatrix<f64>> {
        (**self).jacobian_current(y, delayed)
    }
}

/// `t_n = t0 + n h`, `h = τ/ν`, `n = −ν..=Kν`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CommensurableMesh {
    t0: f64,
    tau: f64,
    nu: usize,
    intervals: usize,
}

impl CommensurableMesh {
    pub fn new(t0: f64, tau: f64, nu: usize, intervals: usize) -> Result<Self> {
        if !(tau > 0.0 && tau.is_finite()) {
            return Err(Error::InvalidMesh(format!("delay must be positive, got {tau}")));
        }
        if nu == 0 {
            return Err(Error::InvalidMesh("ν must be at least 1".into()));
        }
        if intervals == 0 {
            return Err(Error::InvalidMesh("K must be at least 1".into()));
        }
        if !t0.is_finite() {
            return Err(Error::InvalidMesh("t0 must be finite".into()));
        }
        Ok(Self { t0, tau, nu, intervals })
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    /// Steps per delay.
    pub fn nu(&self) -> usize {
        self.nu
    }

    /// Number of delay intervals `K`.
    pub fn intervals(&self) -> usize {
        self.intervals
    }

    pub fn h(&self) -> f64 {
        self.tau / self.nu as f64
    }

    pub fn steps(&self) -> usize {
        self.nu * self.intervals
    }

    pub fn t_end(&self) -> f64 {
        self.t0 + self.intervals as f64 * self.tau
    }

    pub fn time(&self, n: i64) -> f64 {
        self.t0 + n as f64 * self.h()
    }
}

/// The piecewise approximant `u(t)`: `φ` before `t0`, then one stored
/// polynomial per completed step.
pub struct HistoryBuffer<'a, P: ?Sized> {
    problem: &'a P,
    mesh: CommensurableMesh,
    segments: &'a [StepPolynomial],
}

impl<'a, P: DdeProblem + ?Sized> HistoryBuffer<'a, P> {
    pub fn new(problem: &'a P, mesh: CommensurableMesh, segments: &'a [StepPolynomial]) -> Self {
        Self { problem, mesh, segments }
    }

    pub fn completed_steps(&self) -> usize {
        self.segments.len()
    }

    /// Rows `u_{n−ν}(c_i h)`, `i = 1..k`, flattened (`k` blocks of `m`).
    pub fn delayed_values(&self, n: usize, method: &Hbvm) -> Result<Vec<f64>> {
        let m = self.problem.dim();
        let k = method.stages();
        let nu = self.mesh.nu();
        let h = self.mesh.h();
        let mut out = vec![0.0; k * m];
        if n <= nu {
            // φ(t_{n−1} + c_i h − τ) = φ(t0 + (n − 1 − ν + c_i) h)
            let base = n as f64 - 1.0 - nu as f64;
            for (i, &c) in method.abscissae().iter().enumerate() {
                let t = self.mesh.t0() + (base + c) * h;
                self.problem.history(t, &mut out[i * m..(i + 1) * m]);
            }
        } else {
            let idx = n - nu;
            let seg = self
                .segments
                .get(idx - 1)
                .ok_or(Error::MissingHistory(idx as i64))?;
            if seg.degree() != method.degree() {
                return Err(Error::InvalidDegree {
                    k: method.stages(),
                    s: seg.degree(),
                });
            }
            for i in 0..k {
                seg.eval_with_integrals(method.integrals_at(i), &mut out[i * m..(i + 1) * m]);
            }
        }
        Ok(out)
    }

    /// `u(t)` for `t ∈ [t0 − τ, t_current]`.
    pub fn eval_global(&self, t: f64) -> Result<Vec<f64>> {
        let m = self.problem.dim();
        let t0 = self.mesh.t0();
        let mut out = vec![0.0; m];
        if t < t0 {
            if t < t0 - self.mesh.tau() {
                return Err(Error::MissingHistory(-(self.mesh.nu() as i64) - 1));
            }
            self.problem.history(t, &mut out);
            return Ok(out);
        }
        if self.segments.is_empty() {
            return Ok(self.problem.initial_value(t0));
        }
        let x = (t - t0) / self.mesh.h();
        let n_done = self.segments.len();
        if x > n_done as f64 {
            return Err(Error::MissingHistory(x.ceil() as i64));
        }
        let n = (x.ceil() as usize).clamp(1, n_done);
        let c = (x - (n - 1) as f64).clamp(0.0, 1.0);
        self.segments[n - 1].eval(c)
    }
}

/// Step `n ≥ 1`, with `segments` holding steps `1..n−1`.
#[allow(clippy::too_many_arguments)]
pub fn dde_step<P: DdeProblem + ?Sized>(
    problem: &P,
    method: &Hbvm,
    mesh: &CommensurableMesh,
    segments: &[StepPolynomial],
    y_prev: &[f64],
    n: usize,
    settings: &SolverSettings,
    guess: Option<&[f64]>,
) -> Result<(Vec<f64>, StepPolynomial, usize)> {
    if n == 0 || segments.len() + 1 < n {
        return Err(Error::MissingHistory(n as i64 - 1));
    }
    let m = problem.dim();
    if y_prev.len() != m {
        return Err(Error::Dimension { expected: m, got: y_prev.len() });
    }
    let history = HistoryBuffer::new(problem, *mesh, &segments[..n - 1]);
    let delayed = history.delayed_values(n, method)?;
    let jac = match settings.scheme {
        IterationScheme::SimplifiedNewton => problem.jacobian_current(y_prev, &delayed[..m]),
        IterationScheme::FixedPoint => None,
    };
    let h = mesh.h();
    let (gamma, iterations) = solve_gamma_with(method, y_prev, h, settings, guess, jac, |i, u, out| {
        problem.rhs(u, &delayed[i * m..(i + 1) * m], out)
    })?;
    let poly = StepPolynomial::new(y_prev.to_vec(), h, gamma);
    Ok((poly.end_value(), poly, iterations))
}

/// Integrates over `[t0, t0 + Kτ]` with `y_0 = problem.initial_value(t0)`.
pub fn integrate_dde<P: DdeProblem + ?Sized>(
    problem: &P,
    method: &Hbvm,
    mesh: &CommensurableMesh,
    settings: &SolverSettings,
) -> Result<RunReport> {
    let y0 = problem.initial_value(mesh.t0());
    integrate_dde_from(problem, method, mesh, &y0, settings)
}

/// As [`integrate_dde`] with an explicit `y_0` (which may differ from `φ(t0)`).
pub fn integrate_dde_from<P: DdeProblem + ?Sized>(
    problem: &P,
    method: &Hbvm,
    mesh: &CommensurableMesh,
    y0: &[f64],
    settings: &SolverSettings,
) -> Result<RunReport> {
    settings.validate()?;
    if (mesh.tau() - problem.delay()).abs() > 1e-14 * problem.delay() {
        return Err(Error::InvalidMesh(format!(
            "mesh delay {} does not match the problem delay {}",
            mesh.tau(),
            problem.delay()
        )));
    }
    if y0.len() != problem.dim() {
        return Err(Error::Dimension { expected: problem.dim(), got: y0.len() });
    }
    let n_steps = mesh.steps();
    let mut report = RunReport::empty(mesh.t0(), mesh.h());
    report.states.reserve(n_steps + 1);
    report.states.push(y0.to_vec());
    for n in 1..=n_steps {
        let guess = match settings.initial_guess {
            InitialGuess::CarryOver => report.segments.last().map(|p| p.gamma_flat()),
            InitialGuess::Zero => None,
        };
        let (y, poly, it) = dde_step(
            problem,
            method,
            mesh,
            &report.segments,
            &report.states[n - 1],
            n,
            settings,
            guess,
        )
        .map_err(|e| Error::StepFailed { step: n, source: Box::new(e) })?;
        report.states.push(y);
        report.segments.push(poly);
        report.iterations.push(it);
    }
    Ok(report)
}

/// `ẏ(t) = a y(t) + b y(t − τ)` with constant pre-history.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearDelay {
    pub a: f64,
    pub b: f64,
    pub tau: f64,
    pub history: f64,
}

impl LinearDelay {
    /// `ẏ(t) = −y(t − 1)`, `φ ≡ 1`.
    pub fn standard() -> Self {
        Self { a: 0.0, b: -1.0, tau: 1.0, history: 1.0 }
    }

    /// Exact solution of [`LinearDelay::standard`] by the method of steps:
    /// `y(t) = Σ_{i=0}^{⌊t⌋+1} (−1)^i (t − i + 1)^i / i!` for `t ≥ 0`.
    pub fn standard_solution(t: f64) -> f64 {
        if t <= 0.0 {
            return 1.0;
        }
        let top = t.floor() as i64 + 1;
        let mut sum = 0.0;
        let mut fact = 1.0;
        for i in 0..=top {
            if i > 0 {
                fact *= i as f64;
            }
            let base = t - i as f64 + 1.0;
            if base <= 0.0 {
                continue;
            }
            let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
            sum += sign * base.powi(i as i32) / fact;
        }
        sum
    }
}

impl DdeProblem for LinearDelay {
    fn dim(&self) -> usize {
        1
    }
    fn delay(&self) -> f64 {
        self.tau
    }
    fn rhs(&self, y: &[f64], delayed: &[f64], dy: &mut [f64]) -> Result<()> {
        dy[0] = self.a * y[0] + self.b * delayed[0];
        Ok(())
    }
    fn history(&self, _t: f64, out: &mut [f64]) {
        out[0] = self.history;
    }
    fn jacobian_current(&self, _y: &[f64], _w: &[f64]) -> Option<DMatrix<f64>> {
        Some(DMatrix::from_element(1, 1, self.a))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    struct Zero;
    impl DdeProblem for Zero {
        fn dim(&self) -> usize {
            2
        }
        fn delay(&self) -> f64 {
            0.5
        }
        fn rhs(&self, _y: &[f64], _w: &[f64], dy: &mut [f64]) -> Result<()> {
            dy.fill(0.0);
            Ok(())
        }
        fn history(&self, _t: f64, out: &mut [f64]) {
            out.copy_from_slice(&[3.0, -1.0]);
        }
    }

    #[test]
    fn mesh_validation_and_geometry() {
        assert!(CommensurableMesh::new(0.0, 1.0, 0, 3).is_err());
        assert!(CommensurableMesh::new(0.0, 1.0, 2, 0).is_err());
        assert!(CommensurableMesh::new(0.0, -1.0, 2, 3).is_err());
        let mesh = CommensurableMesh::new(0.0, 1.0, 5, 400).unwrap();
        assert_eq!(mesh.h(), 0.2);
        assert_eq!(mesh.steps(), 2000);
        assert_eq!(mesh.t_end(), 400.0);
        assert_eq!(mesh.time(-5), -1.0);
    }

    #[test]
    fn zero_field_keeps_initial_value() {
        let mesh = CommensurableMesh::new(0.0, 0.5, 3, 4).unwrap();
        let method = Hbvm::gauss(3, 2).unwrap();
        let rep = integrate_dde(&Zero, &method, &mesh, &SolverSettings::default()).unwrap();
        assert_eq!(rep.states.len(), 13);
        for y in &rep.states {
            assert_eq!(y, &vec![3.0, -1.0]);
        }
        let hist = HistoryBuffer::new(&Zero, mesh, &rep.segments);
        for n in 1..=12 {
            let d = hist.delayed_values(n, &method).unwrap();
            assert!(d.chunks(2).all(|row| row == [3.0, -1.0]));
        }
    }

    #[test]
    fn first_steps_read_pre_history() {
        struct Ramp;
        impl DdeProblem for Ramp {
            fn dim(&self) -> usize {
                1
            }
            fn delay(&self) -> f64 {
                1.0
            }
            fn rhs(&self, _y: &[f64], w: &[f64], dy: &mut [f64]) -> Result<()> {
                dy[0] = w[0];
                Ok(())
            }
            fn history(&self, t: f64, out: &mut [f64]) {
                out[0] = 2.0 * t;
            }
        }
        let mesh = CommensurableMesh::new(0.0, 1.0, 4, 2).unwrap();
        let method = Hbvm::gauss(2, 2).unwrap();
        let h = mesh.h();
        let hist = HistoryBuffer::new(&Ramp, mesh, &[]);
        let d = hist.delayed_values(1, &method).unwrap();
        for (i, &c) in method.abscissae().iter().enumerate() {
            assert_abs_diff_eq!(d[i], 2.0 * (c * h - 1.0), epsilon = 1e-15);
        }
        assert!(hist.delayed_values(5, &method).is_err());
    }

    #[test]
    fn reads_stored_segment_after_one_delay() {
        let problem = LinearDelay::standard();
        let mesh = CommensurableMesh::new(0.0, 1.0, 5, 2).unwrap();
        let method = Hbvm::gauss(2, 2).unwrap();
        let rep = integrate_dde(&problem, &method, &mesh, &SolverSettings::default()).unwrap();
        let hist = HistoryBuffer::new(&problem, mesh, &rep.segments);
        let d = hist.delayed_values(6, &method).unwrap();
        let first = &rep.segments[0];
        for (i, &c) in method.abscissae().iter().enumerate() {
            let ints = crate::legendre::LegendreBasis::new(3).integrals(2, c).unwrap();
            let manual = 1.0 + mesh.h() * (ints[0] * first.gamma(0)[0] + ints[1] * first.gamma(1)[0]);
            assert_abs_diff_eq!(d[i], manual, epsilon = 1e-15);
        }
    }

    #[test]
    fn exact_on_polynomial_pieces() {
        let problem = LinearDelay::standard();
        let method = Hbvm::gauss(2, 2).unwrap();
        let mesh = CommensurableMesh::new(0.0, 1.0, 5, 2).unwrap();
        let rep = integrate_dde(&problem, &method, &mesh, &SolverSettings::default()).unwrap();
        for (n, y) in rep.states.iter().enumerate() {
            let t = rep.time(n);
            assert_abs_diff_eq!(y[0], LinearDelay::standard_solution(t), epsilon = 1e-13);
        }
        // K = 1 with s = 2: y(1) = 0
        let mesh1 = CommensurableMesh::new(0.0, 1.0, 5, 1).unwrap();
        let rep1 = integrate_dde(&problem, &method, &mesh1, &SolverSettings::default()).unwrap();
        assert_abs_diff_eq!(rep1.last().unwrap()[0], 0.0, epsilon = 1e-12);
    }

    #[test]
    fn global_evaluation_is_continuous() {
        let problem = LinearDelay::standard();
        let method = Hbvm::gauss(4, 2).unwrap();
        let mesh = CommensurableMesh::new(0.0, 1.0, 4, 3).unwrap();
        let rep = integrate_dde(&problem, &method, &mesh, &SolverSettings::default()).unwrap();
        for n in 1..rep.steps() {
            let left = rep.segments[n - 1].end_value();
            assert_eq!(left, rep.states[n]);
            assert_eq!(rep.segments[n].y_left(), rep.states[n].as_slice());
        }
        let hist = HistoryBuffer::new(&problem, mesh, &rep.segments);
        assert_eq!(hist.eval_global(-0.3).unwrap(), vec![1.0]);
        assert!(hist.eval_global(-1.5).is_err());
        assert!(hist.eval_global(3.5).is_err());
        assert_abs_diff_eq!(hist.eval_global(1.6).unwrap()[0], LinearDelay::standard_solution(1.6), epsilon = 1e-6);
    }

    #[test]
    fn delay_mismatch_is_rejected() {
        let mesh = CommensurableMesh::new(0.0, 2.0, 4, 1).unwrap();
        let method = Hbvm::gauss(2, 2).unwrap();
        assert!(integrate_dde(&LinearDelay::standard(), &method, &mesh, &SolverSettings::default()).is_err());
    }

    #[test]
    fn method_of_steps_formula() {
        assert_eq!(LinearDelay::standard_solution(0.0), 1.0);
        assert_abs_diff_eq!(LinearDelay::standard_solution(0.4), 0.6, epsilon = 1e-15);
        assert_abs_diff_eq!(LinearDelay::standard_solution(1.5), 1.0 - 1.5 + 0.125, epsilon = 1e-15);
    }
}
