//! Configurations and post-processing for the delay Hamiltonian benchmarks.

use crate::dde::{integrate_dde, CommensurableMesh};
use crate::error::Result;
use crate::hamiltonian::{energy_series, make_problem, EnergySeries, ProblemId};
use crate::method::Hbvm;
use crate::report::RunReport;
use crate::solver::SolverSettings;

/// Fraction of the horizon discarded as transient before sampling.
pub const TRANSIENT_FRACTION: f64 = 0.1;

#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkSetup {
    pub id: ProblemId,
    /// Steps per delay; `h = τ/ν`.
    pub nu: usize,
    /// Delay intervals; `T = Kτ`.
    pub intervals: usize,
    /// The two `(k, s)` pairs compared.
    pub methods: [(usize, usize); 2],
    /// Steps per orbit period `2τ`.
    pub period_steps: usize,
    /// Centre of the sampling window in the first two state components.
    pub anchor: Option<[f64; 2]>,
}

impl BenchmarkSetup {
    pub fn for_problem(id: ProblemId) -> Self {
        match id {
            ProblemId::Problem1 => Self {
                id,
                nu: 5,
                intervals: 2000,
                methods: [(2, 2), (4, 2)],
                period_steps: 10,
                anchor: Some([1.364023296679201, 1.918490612087558]),
            },
            ProblemId::Problem2 => Self {
                id,
                nu: 10,
                intervals: 1000,
                methods: [(2, 2), (10, 2)],
                period_steps: 20,
                anchor: Some([1.595245320422992, 1.813631211153068]),
            },
            ProblemId::Problem3 => Self {
                id,
                nu: 2,
                intervals: 500,
                methods: [(2, 2), (10, 2)],
                period_steps: 4,
                anchor: None,
            },
        }
    }

    pub fn mesh(&self) -> CommensurableMesh {
        let tau = make_problem(self.id).tau;
        CommensurableMesh::new(0.0, tau, self.nu, self.intervals).expect("valid benchmark mesh")
    }

    pub fn transient_steps(&self) -> usize {
        (TRANSIENT_FRACTION * self.mesh().steps() as f64).round() as usize
    }
}

/// A state sampled once per period at a fixed phase.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodSample {
    pub step: usize,
    pub t: f64,
    pub state: Vec<f64>,
}

/// Samples `y_n` every `period` steps after `skip` steps.
///
/// The phase is chosen so that the last sample's first two components are
/// closest to `anchor`; without an anchor the phase is `skip mod period`.
pub fn periodic_samples(report: &RunReport, period: usize, skip: usize, anchor: Option<[f64; 2]>) -> Vec<PeriodSample> {
    let n_last = report.states.len().saturating_sub(1);
    if period == 0 || n_last < skip {
        return Vec::new();
    }
    let last_phase_start = n_last + 1 - period.min(n_last + 1);
    let end_step = match anchor {
        Some(a) => (last_phase_start..=n_last)
            .min_by(|&i, &j| {
                let di = dist2(&report.states[i], a);
                let dj = dist2(&report.states[j], a);
                di.total_cmp(&dj)
            })
            .unwrap_or(n_last),
        None => n_last - (n_last - skip) % period,
    };
    let mut steps: Vec<usize> = (0..)
        .map(|i| end_step as i64 - (i * period) as i64)
        .take_while(|&n| n >= skip as i64)
        .map(|n| n as usize)
        .collect();
    steps.reverse();
    steps
        .into_iter()
        .map(|n| PeriodSample {
            step: n,
            t: report.time(n),
            state: report.states[n].clone(),
        })
        .collect()
}

fn dist2(y: &[f64], a: [f64; 2]) -> f64 {
    (y[0] - a[0]).powi(2) + (y[1] - a[1]).powi(2)
}

/// Max-norm differences between consecutive samples (first two components).
pub fn successive_differences(samples: &[PeriodSample]) -> Vec<f64> {
    samples
        .windows(2)
        .map(|w| {
            (w[1].state[0] - w[0].state[0])
                .abs()
                .max((w[1].state[1] - w[0].state[1]).abs())
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct MethodRun {
    pub k: usize,
    pub s: usize,
    pub report: RunReport,
    pub energy: EnergySeries,
    pub samples: Vec<PeriodSample>,
}

impl MethodRun {
    pub fn label(&self) -> String {
        format!("HBVM({},{})", self.k, self.s)
    }
}

/// Runs one method of a benchmark and collects energies and period samples.
pub fn run_benchmark_method(setup: &BenchmarkSetup, k: usize, s: usize, settings: &SolverSettings) -> Result<MethodRun> {
    let problem = make_problem(setup.id);
    let method = Hbvm::gauss(k, s)?;
    let mesh = setup.mesh();
    let report = integrate_dde(&problem, &method, &mesh, settings)?;
    let energy = energy_series(&report, |y| problem.energy(y))?;
    let report = RunReport {
        energy: Some(energy.values.clone()),
        ..report
    };
    let samples = periodic_samples(&report, setup.period_steps, setup.transient_steps(), setup.anchor);
    Ok(MethodRun { k, s, report, energy, samples })
}

/// Both methods of a benchmark, run concurrently.
pub fn run_benchmark(setup: &BenchmarkSetup, settings: &SolverSettings) -> Result<[MethodRun; 2]> {
    let [(k0, s0), (k1, s1)] = setup.methods;
    let (a, b) = std::thread::scope(|scope| {
        let other = scope.spawn(|| run_benchmark_method(setup, k1, s1, settings));
        let first = run_benchmark_method(setup, k0, s0, settings);
        (first, other.join().expect("benchmark thread panicked"))
    });
    Ok([a?, b?])
}
