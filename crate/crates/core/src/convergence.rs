//! Empirical convergence orders on a step-size ladder.

use crate::dde::{integrate_dde, CommensurableMesh, DdeProblem};
use crate::error::{Error, Result};
use crate::method::Hbvm;
use crate::ode::{integrate, OdeProblem};
use crate::report::RunReport;
use crate::solver::SolverSettings;

/// Errors below this are treated as round-off and excluded from order fits.
pub const NOISE_FLOOR: f64 = 1e-13;

/// Abscissae at which each step's dense output is compared to the reference.
pub const DENSE_SAMPLES: [f64; 9] = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceRow {
    pub h: f64,
    /// `max_n |y(t_n) − y_n|`.
    pub mesh_error: f64,
    /// `max_n max_c |y(t_{n−1} + ch) − u_n(ch)|`.
    pub uniform_error: f64,
    /// Slope against the previous row.
    pub mesh_slope: Option<f64>,
    pub uniform_slope: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceTable {
    pub label: String,
    pub rows: Vec<ConvergenceRow>,
}

fn slope(e0: f64, e1: f64, h0: f64, h1: f64) -> Option<f64> {
    if e0 > 0.0 && e1 > 0.0 {
        Some((e0 / e1).ln() / (h0 / h1).ln())
    } else {
        None
    }
}

/// Least-squares slope of `log e` against `log h` over the points with
/// `e >= floor`; `None` with fewer than two such points.
pub fn fitted_order(points: impl IntoIterator<Item = (f64, f64)>, floor: f64) -> Option<f64> {
    let pts: Vec<(f64, f64)> = points
        .into_iter()
        .filter(|&(h, e)| h > 0.0 && e >= floor && e.is_finite())
        .map(|(h, e)| (h.ln(), e.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Some(sxy / sxx)
}

impl ConvergenceTable {
    fn from_errors(label: String, data: Vec<(f64, f64, f64)>) -> Self {
        let mut rows: Vec<ConvergenceRow> = Vec::with_capacity(data.len());
        for (i, &(h, me, ue)) in data.iter().enumerate() {
            let (mesh_slope, uniform_slope) = if i == 0 {
                (None, None)
            } else {
                let (h0, me0, ue0) = data[i - 1];
                (slope(me0, me, h0, h), slope(ue0, ue, h0, h))
            };
            rows.push(ConvergenceRow {
                h,
                mesh_error: me,
                uniform_error: ue,
                mesh_slope,
                uniform_slope,
            });
        }
        Self { label, rows }
    }

    /// Fitted mesh-point order over rows above [`NOISE_FLOOR`].
    pub fn mesh_order(&self) -> Option<f64> {
        fitted_order(self.rows.iter().map(|r| (r.h, r.mesh_error)), NOISE_FLOOR)
    }

    pub fn uniform_order(&self) -> Option<f64> {
        fitted_order(self.rows.iter().map(|r| (r.h, r.uniform_error)), NOISE_FLOOR)
    }

    /// Consecutive mesh slopes where both rows are above [`NOISE_FLOOR`].
    pub fn resolved_mesh_slopes(&self) -> Vec<f64> {
        self.rows
            .windows(2)
            .filter(|w| w[0].mesh_error >= NOISE_FLOOR && w[1].mesh_error >= NOISE_FLOOR)
            .filter_map(|w| w[1].mesh_slope)
            .collect()
    }

    pub fn resolved_uniform_slopes(&self) -> Vec<f64> {
        self.rows
            .windows(2)
            .filter(|w| w[0].uniform_error >= NOISE_FLOOR && w[1].uniform_error >= NOISE_FLOOR)
            .filter_map(|w| w[1].uniform_slope)
            .collect()
    }
}

/// Ground truth for a convergence study.
pub enum Reference<'a> {
    /// Exact solution `t ↦ y(t)`.
    Analytic(&'a dyn Fn(f64) -> Vec<f64>),
    /// A run of the same method with the smallest step divided by `factor`.
    FineStep { factor: usize },
}

fn errors_against(report: &RunReport, exact: &dyn Fn(f64) -> Vec<f64>) -> (f64, f64) {
    let mut mesh: f64 = 0.0;
    for (n, y) in report.states.iter().enumerate() {
        let e = exact(report.time(n));
        mesh = mesh.max(y.iter().zip(&e).fold(0.0, |a, (u, v)| a.max((u - v).abs())));
    }
    let mut uniform = mesh;
    for (n, seg) in report.segments.iter().enumerate() {
        for &c in &DENSE_SAMPLES {
            let u = seg.eval(c).expect("c in [0,1]");
            let e = exact(report.time(n) + c * report.h);
            uniform = uniform.max(u.iter().zip(&e).fold(0.0, |a, (x, y)| a.max((x - y).abs())));
        }
    }
    (mesh, uniform)
}

fn dense_exact(reference: &RunReport) -> impl Fn(f64) -> Vec<f64> + '_ {
    move |t| {
        reference
            .dense(t)
            .or_else(|| reference.dense(t.min(reference.time(reference.steps()))))
            .expect("time inside the reference run")
    }
}

/// Convergence of an ODE run over `[t0, t_end]` for each step count in `ladder`.
#[allow(clippy::too_many_arguments)]
pub fn ode_convergence(
    problem: &impl OdeProblem,
    method: &Hbvm,
    y0: &[f64],
    t0: f64,
    t_end: f64,
    ladder: &[usize],
    reference: Reference<'_>,
    settings: &SolverSettings,
) -> Result<ConvergenceTable> {
    let fine;
    let exact: Box<dyn Fn(f64) -> Vec<f64> + '_> = match reference {
        Reference::Analytic(f) => Box::new(f),
        Reference::FineStep { factor } => {
            let n_max = *ladder.iter().max().ok_or_else(|| Error::Config("empty ladder".into()))?;
            fine = integrate(problem, method, y0, t0, t_end, n_max * factor, settings)
                .map_err(|e| Error::Config(format!("reference run failed: {e}")))?;
            Box::new(dense_exact(&fine))
        }
    };
    let mut data = Vec::with_capacity(ladder.len());
    for &n in ladder {
        let rep = integrate(problem, method, y0, t0, t_end, n, settings)?;
        let (me, ue) = errors_against(&rep, exact.as_ref());
        data.push((rep.h, me, ue));
    }
    Ok(ConvergenceTable::from_errors(method.label(), data))
}

/// Convergence of a DDE run over `K` delay intervals for each `ν` in `nus`.
pub fn dde_convergence<P: DdeProblem + ?Sized>(
    problem: &P,
    method: &Hbvm,
    t0: f64,
    intervals: usize,
    nus: &[usize],
    reference: Reference<'_>,
    settings: &SolverSettings,
) -> Result<ConvergenceTable> {
    let tau = problem.delay();
    let fine;
    let exact: Box<dyn Fn(f64) -> Vec<f64> + '_> = match reference {
        Reference::Analytic(f) => Box::new(f),
        Reference::FineStep { factor } => {
            let nu_max = *nus.iter().max().ok_or_else(|| Error::Config("empty ladder".into()))?;
            let mesh = CommensurableMesh::new(t0, tau, nu_max * factor, intervals)?;
            fine = integrate_dde(problem, method, &mesh, settings)
                .map_err(|e| Error::Config(format!("reference run failed: {e}")))?;
            Box::new(dense_exact(&fine))
        }
    };
    let mut data = Vec::with_capacity(nus.len());
    for &nu in nus {
        let mesh = CommensurableMesh::new(t0, tau, nu, intervals)?;
        let rep = integrate_dde(problem, method, &mesh, settings)?;
        let (me, ue) = errors_against(&rep, exact.as_ref());
        data.push((rep.h, me, ue));
    }
    Ok(ConvergenceTable::from_errors(method.label(), data))
}
