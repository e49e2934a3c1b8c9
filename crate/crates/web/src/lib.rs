//! Browser bindings: tableau inspection, benchmark simulation and a
//! convergence study on `ẏ = −y`.

use hbvm::convergence::{ode_convergence, Reference};
use hbvm::dde::{integrate_dde, CommensurableMesh};
use hbvm::experiments::BenchmarkSetup;
use hbvm::hamiltonian::{make_problem, ProblemId};
use hbvm::ode::FnOde;
use hbvm::{ButcherTableau, Hbvm, SolverSettings};
use wasm_bindgen::prelude::*;

/// Upper bound on steps per simulation, to keep the page responsive.
pub const MAX_STEPS: usize = 200_000;

#[wasm_bindgen]
pub struct Tableau {
    label: String,
    order: usize,
    c: Vec<f64>,
    b: Vec<f64>,
    a: Vec<f64>,
    residual: f64,
}

#[wasm_bindgen]
impl Tableau {
    #[wasm_bindgen(getter)]
    pub fn label(&self) -> String {
        self.label.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn order(&self) -> usize {
        self.order
    }
    #[wasm_bindgen(getter)]
    pub fn stages(&self) -> usize {
        self.c.len()
    }
    #[wasm_bindgen(getter)]
    pub fn c(&self) -> Vec<f64> {
        self.c.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn b(&self) -> Vec<f64> {
        self.b.clone()
    }
    /// Row-major `k × k`.
    #[wasm_bindgen(getter)]
    pub fn a(&self) -> Vec<f64> {
        self.a.clone()
    }
    /// Largest W-transformation residual.
    #[wasm_bindgen(getter)]
    pub fn residual(&self) -> f64 {
        self.residual
    }
}

pub fn build_tableau(k: usize, s: usize) -> Result<Tableau, String> {
    if k > 64 {
        return Err("k is limited to 64 in the demo".into());
    }
    let t = ButcherTableau::gauss(k, s).map_err(|e| e.to_string())?;
    let n = t.stages();
    let a = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).map(|(i, j)| t.a()[(i, j)]).collect();
    Ok(Tableau {
        label: format!("HBVM({k},{s})"),
        order: t.quadrature_order(),
        c: t.c().to_vec(),
        b: t.b().to_vec(),
        a,
        residual: t.w_transformation_residuals().max(),
    })
}

#[wasm_bindgen]
pub fn tableau(k: usize, s: usize) -> Result<Tableau, JsError> {
    build_tableau(k, s).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub struct Trajectory {
    t: Vec<f64>,
    q: Vec<f64>,
    p: Vec<f64>,
    energy: Vec<f64>,
    iterations: usize,
}

#[wasm_bindgen]
impl Trajectory {
    #[wasm_bindgen(getter)]
    pub fn t(&self) -> Vec<f64> {
        self.t.clone()
    }
    /// First position component.
    #[wasm_bindgen(getter)]
    pub fn q(&self) -> Vec<f64> {
        self.q.clone()
    }
    /// First momentum component, or the second position for problem 2.
    #[wasm_bindgen(getter)]
    pub fn p(&self) -> Vec<f64> {
        self.p.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn energy(&self) -> Vec<f64> {
        self.energy.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn iterations(&self) -> usize {
        self.iterations
    }
}

/// Runs benchmark `problem` (1, 2 or 3) with HBVM(k,s) over `intervals`
/// delays at the benchmark step size.
pub fn run_simulation(problem: u32, k: usize, s: usize, intervals: usize) -> Result<Trajectory, String> {
    let id: ProblemId = problem.to_string().parse().map_err(|e: hbvm::Error| e.to_string())?;
    let setup = BenchmarkSetup::for_problem(id);
    if intervals == 0 || intervals * setup.nu > MAX_STEPS {
        return Err(format!("intervals must be in 1..={}", MAX_STEPS / setup.nu));
    }
    let prob = make_problem(id);
    let method = Hbvm::gauss(k, s).map_err(|e| e.to_string())?;
    let mesh = CommensurableMesh::new(0.0, prob.tau, setup.nu, intervals).map_err(|e| e.to_string())?;
    let rep = integrate_dde(&prob, &method, &mesh, &SolverSettings::round_off()).map_err(|e| e.to_string())?;
    let energy = rep
        .states
        .iter()
        .map(|y| prob.energy(y))
        .collect::<hbvm::Result<Vec<f64>>>()
        .map_err(|e| e.to_string())?;
    Ok(Trajectory {
        t: rep.times(),
        q: rep.states.iter().map(|y| y[0]).collect(),
        // y[1] is p for one degree of freedom and q2 for problem 2
        p: rep.states.iter().map(|y| y[1]).collect(),
        energy,
        iterations: rep.total_iterations(),
    })
}

#[wasm_bindgen]
pub fn simulate(problem: u32, k: usize, s: usize, intervals: usize) -> Result<Trajectory, JsError> {
    run_simulation(problem, k, s, intervals).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub struct Convergence {
    h: Vec<f64>,
    mesh_error: Vec<f64>,
    uniform_error: Vec<f64>,
    mesh_order: f64,
    uniform_order: f64,
}

#[wasm_bindgen]
impl Convergence {
    #[wasm_bindgen(getter)]
    pub fn h(&self) -> Vec<f64> {
        self.h.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn mesh_error(&self) -> Vec<f64> {
        self.mesh_error.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn uniform_error(&self) -> Vec<f64> {
        self.uniform_error.clone()
    }
    /// NaN when every error is at round-off level.
    #[wasm_bindgen(getter)]
    pub fn mesh_order(&self) -> f64 {
        self.mesh_order
    }
    #[wasm_bindgen(getter)]
    pub fn uniform_order(&self) -> f64 {
        self.uniform_order
    }
}

/// Errors of HBVM(k,s) on `ẏ = −y`, `y(0) = 1`, over `[0, 1]` with
/// `h = 2^{-3} .. 2^{-8}`.
pub fn run_convergence(k: usize, s: usize) -> Result<Convergence, String> {
    let method = Hbvm::gauss(k, s).map_err(|e| e.to_string())?;
    let decay = FnOde::new(1, |y: &[f64], dy: &mut [f64]| dy[0] = -y[0]);
    let exact = |t: f64| vec![(-t).exp()];
    let ladder: Vec<usize> = (3..=8).map(|i| 1 << i).collect();
    let table = ode_convergence(&decay, &method, &[1.0], 0.0, 1.0, &ladder, Reference::Analytic(&exact), &SolverSettings::default())
        .map_err(|e| e.to_string())?;
    Ok(Convergence {
        h: table.rows.iter().map(|r| r.h).collect(),
        mesh_error: table.rows.iter().map(|r| r.mesh_error).collect(),
        uniform_error: table.rows.iter().map(|r| r.uniform_error).collect(),
        mesh_order: table.mesh_order().unwrap_or(f64::NAN),
        uniform_order: table.uniform_order().unwrap_or(f64::NAN),
    })
}

#[wasm_bindgen]
pub fn convergence(k: usize, s: usize) -> Result<Convergence, JsError> {
    run_convergence(k, s).map_err(|e| JsError::new(&e))
}
