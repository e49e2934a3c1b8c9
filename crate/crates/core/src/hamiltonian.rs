//! Conservative and dissipative problems `ẏ = S ∇H(y)`, delay Hamiltonian
//! systems, and energy diagnostics.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use nalgebra::DMatrix;

use crate::dde::DdeProblem;
use crate::error::{Error, Result};
use crate::method::Hbvm;
use crate::ode::{step, OdeProblem};
use crate::report::RunReport;
use crate::solver::SolverSettings;

/// A Hamiltonian in canonical variables `(q, p) ∈ R^d × R^d`.
pub trait Hamiltonian {
    /// Degrees of freedom `d`.
    fn dof(&self) -> usize;

    fn energy(&self, q: &[f64], p: &[f64]) -> Result<f64>;

    fn grad_q(&self, q: &[f64], p: &[f64], out: &mut [f64]) -> Result<()>;

    fn grad_p(&self, q: &[f64], p: &[f64], out: &mut [f64]) -> Result<()>;

    /// Total degree when `H` is a polynomial.
    fn polynomial_degree(&self) -> Option<usize> {
        None
    }
}

/// A scalar energy `H: R^m → R` with gradient.
pub trait EnergyFunction {
    fn dim(&self) -> usize;

    fn value(&self, y: &[f64]) -> Result<f64>;

    fn gradient(&self, y: &[f64], out: &mut [f64]) -> Result<()>;

    fn polynomial_degree(&self) -> Option<usize> {
        None
    }
}

/// Views a [`Hamiltonian`] as an [`EnergyFunction`] of `y = (q, p)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseSpace<H>(pub H);

impl<H: Hamiltonian> EnergyFunction for PhaseSpace<H> {
    fn dim(&self) -> usize {
        2 * self.0.dof()
    }

    fn value(&self, y: &[f64]) -> Result<f64> {
        let d = self.0.dof();
        self.0.energy(&y[..d], &y[d..])
    }

    fn gradient(&self, y: &[f64], out: &mut [f64]) -> Result<()> {
        let d = self.0.dof();
        let (q, p) = y.split_at(d);
        let (gq, gp) = out.split_at_mut(d);
        self.0.grad_q(q, p, gq)?;
        self.0.grad_p(q, p, gp)
    }

    fn polynomial_degree(&self) -> Option<usize> {
        self.0.polynomial_degree()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StructureKind {
    /// `Sᵀ = −S`: `H` is a first integral.
    Skew,
    /// `S ≤ 0`: `H` is non-increasing.
    Dissipative,
    None,
}

/// Tolerance for classifying `S`.
pub const STRUCTURE_TOL: f64 = 1e-15;

pub fn classify(s: &DMatrix<f64>) -> StructureKind {
    let sym = (s + s.transpose()) * 0.5;
    if sym.amax() * 2.0 <= STRUCTURE_TOL {
        return StructureKind::Skew;
    }
    let eig = sym.symmetric_eigenvalues();
    if eig.iter().all(|&l| l <= STRUCTURE_TOL) {
        StructureKind::Dissipative
    } else {
        StructureKind::None
    }
}

/// `ẏ = S ∇H(y)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConservativeSystem<E> {
    s: DMatrix<f64>,
    energy: E,
}

impl<E: EnergyFunction> ConservativeSystem<E> {
    pub fn new(s: DMatrix<f64>, energy: E) -> Result<Self> {
        let m = energy.dim();
        if s.shape() != (m, m) {
            return Err(Error::Dimension { expected: m, got: s.nrows() });
        }
        Ok(Self { s, energy })
    }

    pub fn structure(&self) -> &DMatrix<f64> {
        &self.s
    }

    pub fn energy_function(&self) -> &E {
        &self.energy
    }

    pub fn kind(&self) -> StructureKind {
        classify(&self.s)
    }

    pub fn energy(&self, y: &[f64]) -> Result<f64> {
        self.energy.value(y)
    }
}

impl<H: Hamiltonian> ConservativeSystem<PhaseSpace<H>> {
    /// `S = [[0, I], [−I, 0]]`.
    pub fn canonical(h: H) -> Self {
        let d = h.dof();
        Self {
            s: canonical_matrix(d),
            energy: PhaseSpace(h),
        }
    }

    /// `S = [[0, I], [−I, −damping·I]]`.
    pub fn damped(h: H, damping: f64) -> Self {
        let d = h.dof();
        let mut s = canonical_matrix(d);
        for i in 0..d {
            s[(d + i, d + i)] = -damping;
        }
        Self {
            s,
            energy: PhaseSpace(h),
        }
    }
}

fn canonical_matrix(d: usize) -> DMatrix<f64> {
    let mut s = DMatrix::zeros(2 * d, 2 * d);
    for i in 0..d {
        s[(i, d + i)] = 1.0;
        s[(d + i, i)] = -1.0;
    }
    s
}

impl<E: EnergyFunction> OdeProblem for ConservativeSystem<E> {
    fn dim(&self) -> usize {
        self.energy.dim()
    }

    fn rhs(&self, y: &[f64], dy: &mut [f64]) -> Result<()> {
        let m = self.dim();
        let mut g = vec![0.0; m];
        self.energy.gradient(y, &mut g)?;
        for (i, d) in dy.iter_mut().enumerate() {
            *d = (0..m).map(|j| self.s[(i, j)] * g[j]).sum();
        }
        Ok(())
    }
}

pub type HistoryFn = Arc<dyn Fn(f64, &mut [f64]) + Send + Sync>;

/// Pre-history of one component block.
#[derive(Clone)]
pub enum PreHistory {
    Constant(Vec<f64>),
    Function(HistoryFn),
}

impl PreHistory {
    fn eval(&self, t: f64, out: &mut [f64]) {
        match self {
            PreHistory::Constant(v) => out.copy_from_slice(v),
            PreHistory::Function(f) => f(t, out),
        }
    }
}

impl fmt::Debug for PreHistory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PreHistory::Constant(v) => f.debug_tuple("Constant").field(v).finish(),
            PreHistory::Function(_) => f.write_str("Function(..)"),
        }
    }
}

/// ```text
/// q̇(t) =   H_p(q(t), p(t)) + α H_p(q(t−τ), p(t−τ))
/// ṗ(t) = −[H_q(q(t), p(t)) + α H_q(q(t−τ), p(t−τ))]
/// ```
/// with `q = φ`, `p = ψ` on `[t0 − τ, t0]`. The state is `y = (q, p)`.
#[derive(Debug, Clone)]
pub struct DelayHamiltonianProblem<H> {
    pub hamiltonian: H,
    pub alpha: f64,
    pub tau: f64,
    pub phi: PreHistory,
    pub psi: PreHistory,
}

impl<H: Hamiltonian> DelayHamiltonianProblem<H> {
    pub fn energy(&self, y: &[f64]) -> Result<f64> {
        let d = self.hamiltonian.dof();
        self.hamiltonian.energy(&y[..d], &y[d..])
    }
}

impl<H: Hamiltonian> DdeProblem for DelayHamiltonianProblem<H> {
    fn dim(&self) -> usize {
        2 * self.hamiltonian.dof()
    }

    fn delay(&self) -> f64 {
        self.tau
    }

    fn rhs(&self, y: &[f64], delayed: &[f64], dy: &mut [f64]) -> Result<()> {
        let d = self.hamiltonian.dof();
        let (q, p) = y.split_at(d);
        let (qd, pd) = delayed.split_at(d);
        let mut now = vec![0.0; d];
        let mut past = vec![0.0; d];
        let (dq, dp) = dy.split_at_mut(d);

        self.hamiltonian.grad_p(q, p, &mut now)?;
        self.hamiltonian.grad_p(qd, pd, &mut past)?;
        for i in 0..d {
            dq[i] = now[i] + self.alpha * past[i];
        }
        self.hamiltonian.grad_q(q, p, &mut now)?;
        self.hamiltonian.grad_q(qd, pd, &mut past)?;
        for i in 0..d {
            dp[i] = -(now[i] + self.alpha * past[i]);
        }
        Ok(())
    }

    fn history(&self, t: f64, out: &mut [f64]) {
        let d = self.hamiltonian.dof();
        let (q, p) = out.split_at_mut(d);
        self.phi.eval(t, q);
        self.psi.eval(t, p);
    }
}

/// Hamiltonians of the benchmark problems.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BenchmarkHamiltonian {
    /// `¼ Σ (q_i⁴ + p_i⁴)`.
    Quartic { dof: usize },
    /// `¼ Σ (q_i⁴ + p_i⁴) + (π/2)(1/|q|² + 2/|p|²)`.
    SingularQuartic { dof: usize },
    /// `½ p² − cos q`.
    Pendulum,
}

/// Below this `|q|²` or `|p|²` the singular terms are refused.
pub const SINGULARITY_GUARD: f64 = 1e-8;

fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum()
}

fn guarded_norm2(v: &[f64], name: &str) -> Result<f64> {
    let n = norm2(v);
    if n < SINGULARITY_GUARD || !n.is_finite() {
        Err(Error::Domain(format!("|{name}|² = {n:e} is too close to the singularity")))
    } else {
        Ok(n)
    }
}

impl Hamiltonian for BenchmarkHamiltonian {
    fn dof(&self) -> usize {
        match *self {
            BenchmarkHamiltonian::Quartic { dof } | BenchmarkHamiltonian::SingularQuartic { dof } => dof,
            BenchmarkHamiltonian::Pendulum => 1,
        }
    }

    fn energy(&self, q: &[f64], p: &[f64]) -> Result<f64> {
        let quartic = |q: &[f64], p: &[f64]| {
            0.25 * (q.iter().map(|x| x.powi(4)).sum::<f64>() + p.iter().map(|x| x.powi(4)).sum::<f64>())
        };
        Ok(match self {
            BenchmarkHamiltonian::Quartic { .. } => quartic(q, p),
            BenchmarkHamiltonian::SingularQuartic { .. } => {
                let nq = guarded_norm2(q, "q")?;
                let np = guarded_norm2(p, "p")?;
                quartic(q, p) + 0.5 * PI * (1.0 / nq + 2.0 / np)
            }
            BenchmarkHamiltonian::Pendulum => 0.5 * p[0] * p[0] - q[0].cos(),
        })
    }

    fn grad_q(&self, q: &[f64], _p: &[f64], out: &mut [f64]) -> Result<()> {
        match self {
            BenchmarkHamiltonian::Quartic { .. } => {
                for (o, x) in out.iter_mut().zip(q) {
                    *o = x.powi(3);
                }
            }
            BenchmarkHamiltonian::SingularQuartic { .. } => {
                let nq = guarded_norm2(q, "q")?;
                for (o, x) in out.iter_mut().zip(q) {
                    *o = x.powi(3) - PI * x / (nq * nq);
                }
            }
            BenchmarkHamiltonian::Pendulum => out[0] = q[0].sin(),
        }
        Ok(())
    }

    fn grad_p(&self, _q: &[f64], p: &[f64], out: &mut [f64]) -> Result<()> {
        match self {
            BenchmarkHamiltonian::Quartic { .. } => {
                for (o, x) in out.iter_mut().zip(p) {
                    *o = x.powi(3);
                }
            }
            BenchmarkHamiltonian::SingularQuartic { .. } => {
                let np = guarded_norm2(p, "p")?;
                for (o, x) in out.iter_mut().zip(p) {
                    *o = x.powi(3) - 2.0 * PI * x / (np * np);
                }
            }
            BenchmarkHamiltonian::Pendulum => out[0] = p[0],
        }
        Ok(())
    }

    fn polynomial_degree(&self) -> Option<usize> {
        match self {
            BenchmarkHamiltonian::Quartic { .. } => Some(4),
            _ => None,
        }
    }
}

/// The three delay Hamiltonian benchmarks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ProblemId {
    Problem1,
    Problem2,
    Problem3,
}

impl ProblemId {
    pub const ALL: [ProblemId; 3] = [ProblemId::Problem1, ProblemId::Problem2, ProblemId::Problem3];

    pub fn as_str(&self) -> &'static str {
        match self {
            ProblemId::Problem1 => "problem1",
            ProblemId::Problem2 => "problem2",
            ProblemId::Problem3 => "problem3",
        }
    }
}

impl fmt::Display for ProblemId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ProblemId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "problem1" | "p1" | "1" => Ok(ProblemId::Problem1),
            "problem2" | "p2" | "2" => Ok(ProblemId::Problem2),
            "problem3" | "p3" | "3" => Ok(ProblemId::Problem3),
            other => Err(Error::UnknownProblem(other.to_string())),
        }
    }
}

pub fn make_problem(id: ProblemId) -> DelayHamiltonianProblem<BenchmarkHamiltonian> {
    match id {
        ProblemId::Problem1 => DelayHamiltonianProblem {
            hamiltonian: BenchmarkHamiltonian::Quartic { dof: 1 },
            alpha: 0.1,
            tau: 1.0,
            phi: PreHistory::Constant(vec![2f64.sqrt()]),
            psi: PreHistory::Constant(vec![0.0]),
        },
        ProblemId::Problem2 => DelayHamiltonianProblem {
            hamiltonian: BenchmarkHamiltonian::SingularQuartic { dof: 2 },
            alpha: 0.05,
            tau: 1.0,
            phi: PreHistory::Constant(vec![0.1, 1.0]),
            psi: PreHistory::Constant(vec![1.0, 0.2]),
        },
        ProblemId::Problem3 => DelayHamiltonianProblem {
            hamiltonian: BenchmarkHamiltonian::Pendulum,
            alpha: -1e-5,
            tau: 1.0,
            phi: PreHistory::Constant(vec![0.0]),
            psi: PreHistory::Constant(vec![1.99999]),
        },
    }
}

/// `H(y_n)` and the per-step changes `H(y_n) − H(y_{n−1})`.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergySeries {
    pub values: Vec<f64>,
    pub increments: Vec<f64>,
}

impl EnergySeries {
    pub fn abs_differences(&self) -> Vec<f64> {
        self.increments.iter().map(|d| d.abs()).collect()
    }

    /// Largest `|ΔH_n|` over steps `n >= from_step`.
    pub fn max_abs_change_from(&self, from_step: usize) -> f64 {
        self.increments
            .iter()
            .skip(from_step.saturating_sub(1))
            .fold(0.0, |acc, d| acc.max(d.abs()))
    }
}

pub fn energy_series(report: &RunReport, energy: impl Fn(&[f64]) -> Result<f64>) -> Result<EnergySeries> {
    let values = report
        .states
        .iter()
        .map(|y| energy(y))
        .collect::<Result<Vec<_>>>()?;
    let increments = values.windows(2).map(|w| w[1] - w[0]).collect();
    Ok(EnergySeries { values, increments })
}

/// Threshold factor for "exact" conservation, relative to `max(1, |H|)`.
pub const CONSERVATION_TOL: f64 = 1e-13;

#[derive(Debug, Clone, PartialEq)]
pub enum ConservationVerdict {
    /// `S` skew and `deg H <= q/s`: every `|ΔH_n|` at round-off level.
    Conserved { max_abs_change: f64 },
    /// `S <= 0` and `deg H <= q/s`: `H` never increases beyond round-off.
    NonIncreasing { max_increase: f64 },
    /// The theory only gives `ΔH_n = O(h^{q+1})`; see [`energy_error_order`].
    RequiresRefinement { expected_order: usize },
    Violated { step: usize, change: f64, bound: f64 },
}

impl ConservationVerdict {
    pub fn holds(&self) -> bool {
        !matches!(self, ConservationVerdict::Violated { .. })
    }
}

/// Checks an ODE run of a conservative system against what the method
/// guarantees for it.
pub fn conservation_check<E: EnergyFunction>(
    system: &ConservativeSystem<E>,
    method: &Hbvm,
    report: &RunReport,
) -> Result<ConservationVerdict> {
    let q = method.rule().order();
    let s = method.degree();
    let exact = system
        .energy_function()
        .polynomial_degree()
        .is_some_and(|deg| deg * s <= q);
    let kind = system.kind();
    if !exact || kind == StructureKind::None {
        return Ok(ConservationVerdict::RequiresRefinement { expected_order: q + 1 });
    }
    let series = energy_series(report, |y| system.energy(y))?;
    let mut worst = 0.0f64;
    for (i, &d) in series.increments.iter().enumerate() {
        let bound = CONSERVATION_TOL * series.values[i].abs().max(1.0);
        let offending = match kind {
            StructureKind::Skew => d.abs() > bound,
            _ => d > bound,
        };
        if offending {
            return Ok(ConservationVerdict::Violated { step: i + 1, change: d, bound });
        }
        worst = match kind {
            StructureKind::Skew => worst.max(d.abs()),
            _ => worst.max(d),
        };
    }
    Ok(match kind {
        StructureKind::Skew => ConservationVerdict::Conserved { max_abs_change: worst },
        _ => ConservationVerdict::NonIncreasing { max_increase: worst },
    })
}

/// One-step energy errors `|H(y_1) − H(y_0)|` for each `h`, and the slopes
/// of `log|ΔH|` against `log h` between consecutive entries.
pub fn energy_error_order<E: EnergyFunction>(
    system: &ConservativeSystem<E>,
    method: &Hbvm,
    y0: &[f64],
    steps: &[f64],
    settings: &SolverSettings,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let h0 = system.energy(y0)?;
    let errors = steps
        .iter()
        .map(|&h| {
            let out = step(system, method, y0, h, settings, None)?;
            Ok((system.energy(&out.y_next)? - h0).abs())
        })
        .collect::<Result<Vec<f64>>>()?;
    let slopes = steps
        .windows(2)
        .zip(errors.windows(2))
        .map(|(h, e)| (e[0] / e[1]).ln() / (h[0] / h[1]).ln())
        .collect();
    Ok((errors, slopes))
}
