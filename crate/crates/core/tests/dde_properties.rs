mod common;

use common::{max_abs_diff, rk4};
use hbvm::convergence::{dde_convergence, Reference};
use hbvm::dde::{dde_step, integrate_dde, CommensurableMesh, DdeProblem, LinearDelay};
use hbvm::hamiltonian::{make_problem, ProblemId};
use hbvm::ode::{integrate, step, FnOde};
use hbvm::{Hbvm, Result, SolverSettings};

#[test]
fn delay_free_problem_matches_ode_integrator() {
    // b = 0: the delayed argument never enters the field
    let dde = LinearDelay { a: -0.7, b: 0.0, tau: 0.5, history: 1.3 };
    let ode = FnOde::new(1, |y: &[f64], dy: &mut [f64]| dy[0] = -0.7 * y[0]);
    let settings = SolverSettings::default();
    for (k, s) in [(1, 1), (3, 2), (4, 3)] {
        let method = Hbvm::gauss(k, s).unwrap();
        let mesh = CommensurableMesh::new(0.0, 0.5, 4, 6).unwrap();
        let a = integrate_dde(&dde, &method, &mesh, &settings).unwrap();
        let b = integrate(&ode, &method, &[1.3], 0.0, mesh.t_end(), mesh.steps(), &settings).unwrap();
        assert_eq!(a.states.len(), b.states.len());
        let tol = 10.0 * settings.threshold(&[1.3]);
        for (u, v) in a.states.iter().zip(&b.states) {
            assert!(max_abs_diff(u, v) <= tol);
        }
    }
}

#[test]
fn single_interval_reaches_zero() {
    // y(t) = 1 − t on [0, 1]
    let method = Hbvm::gauss(2, 1).unwrap();
    let mesh = CommensurableMesh::new(0.0, 1.0, 4, 1).unwrap();
    let rep = integrate_dde(&LinearDelay::standard(), &method, &mesh, &SolverSettings::default()).unwrap();
    assert!(rep.last().unwrap()[0].abs() <= 1e-15);
    for (n, y) in rep.states.iter().enumerate() {
        assert!((y[0] - (1.0 - rep.time(n))).abs() <= 1e-15);
    }
    let method = Hbvm::gauss(2, 2).unwrap();
    let mesh = CommensurableMesh::new(0.0, 1.0, 5, 1).unwrap();
    let rep = integrate_dde(&LinearDelay::standard(), &method, &mesh, &SolverSettings::default()).unwrap();
    assert!((rep.last().unwrap()[0] - LinearDelay::standard_solution(1.0)).abs() <= 1e-12);
}

#[test]
fn method_of_steps_solution_is_continuous() {
    for t in [1.0f64, 2.0, 3.0] {
        let l = LinearDelay::standard_solution(t - 1e-12);
        let r = LinearDelay::standard_solution(t + 1e-12);
        assert!((l - r).abs() < 1e-10);
    }
    assert_eq!(LinearDelay::standard_solution(1.0), 0.0);
    assert!((LinearDelay::standard_solution(2.0) + 0.5).abs() < 1e-15);
}

/// `ẏ = −y + ½ y(t − 1)`, `φ ≡ 1`; its solution is not piecewise polynomial.
fn mixed_delay() -> LinearDelay {
    LinearDelay { a: -1.0, b: 0.5, tau: 1.0, history: 1.0 }
}

#[test]
fn fourth_order_on_non_polynomial_delay_problem() {
    let method = Hbvm::gauss(2, 2).unwrap();
    let table = dde_convergence(
        &mixed_delay(),
        &method,
        0.0,
        3,
        &[4, 8, 16, 32],
        Reference::FineStep { factor: 8 },
        &SolverSettings::default(),
    )
    .unwrap();
    let order = table.mesh_order().unwrap();
    assert!((order - 4.0).abs() < 0.3, "{order} {:?}", table.rows);
    let uniform = table.uniform_order().unwrap();
    assert!((uniform - 3.0).abs() < 0.3, "{uniform}");
}

#[test]
fn problem1_first_step_matches_frozen_delay_ode() {
    let p = make_problem(ProblemId::Problem1);
    let method = Hbvm::gauss(4, 2).unwrap();
    let y0 = p.initial_value(0.0);
    let settings = SolverSettings::default();
    // on the first step the delayed argument is the constant pre-history
    let mut w = vec![0.0; 2];
    p.history(-1.0, &mut w);
    let f = |y: &[f64]| -> Vec<f64> {
        let mut dy = vec![0.0; 2];
        p.rhs(y, &w, &mut dy).unwrap();
        dy
    };
    let frozen = FnOde::new(2, |y: &[f64], dy: &mut [f64]| dy.copy_from_slice(&f(y)));
    let mut local = Vec::new();
    for nu in [5, 10, 20] {
        let mesh = CommensurableMesh::new(0.0, p.tau, nu, 1).unwrap();
        let h = mesh.h();
        let (y1, _, _) = dde_step(&p, &method, &mesh, &[], &y0, 1, &settings, None).unwrap();
        let ode = step(&frozen, &method, &y0, h, &settings, None).unwrap();
        assert!(max_abs_diff(&y1, &ode.y_next) <= 1e-14);
        let oracle = rk4(f, &y0, h, 4_000);
        local.push(max_abs_diff(&y1, &oracle));
    }
    for w in local.windows(2) {
        let rate = (w[0] / w[1]).log2();
        assert!(rate >= 4.7, "{local:?}");
    }
}

#[test]
fn history_lookup_errors_are_reported() {
    let method = Hbvm::gauss(2, 2).unwrap();
    let mesh = CommensurableMesh::new(0.0, 1.0, 2, 3).unwrap();
    let p = LinearDelay::standard();
    let err = dde_step(&p, &method, &mesh, &[], &[1.0], 4, &SolverSettings::default(), None).unwrap_err();
    assert!(matches!(err, hbvm::Error::MissingHistory(_)));
    assert!(CommensurableMesh::new(0.0, 1.0, 0, 3).is_err());
    assert!(CommensurableMesh::new(0.0, -1.0, 2, 3).is_err());
}

struct Blowup;

impl DdeProblem for Blowup {
    fn dim(&self) -> usize {
        1
    }
    fn delay(&self) -> f64 {
        1.0
    }
    fn rhs(&self, y: &[f64], _w: &[f64], dy: &mut [f64]) -> Result<()> {
        dy[0] = y[0] * y[0];
        Ok(())
    }
    fn history(&self, _t: f64, out: &mut [f64]) {
        out[0] = 1.0;
    }
}

#[test]
fn divergent_iteration_reports_step() {
    // y' = y² from y = 1 blows up at t = 1; a step of 2 defeats the fixed point
    let method = Hbvm::gauss(2, 2).unwrap();
    let mesh = CommensurableMesh::new(0.0, 1.0, 1, 4).unwrap();
    let settings = SolverSettings {
        scheme: hbvm::IterationScheme::FixedPoint,
        ..Default::default()
    };
    let err = integrate_dde(&Blowup, &method, &mesh, &settings).unwrap_err();
    assert!(matches!(err, hbvm::Error::StepFailed { step: 1, .. }), "{err:?}");
}
