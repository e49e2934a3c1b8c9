//! Named problems available to the command line and the demo.

use crate::dde::{DdeProblem, LinearDelay};
use crate::error::{Error, Result};
use crate::hamiltonian::{make_problem, BenchmarkHamiltonian, ConservativeSystem, ProblemId};
use crate::ode::{FnOde, OdeProblem};
use crate::output::phase_names;

pub type ExactSolution = fn(f64) -> Vec<f64>;
pub type EnergyFn = Box<dyn Fn(&[f64]) -> f64 + Send + Sync>;

pub struct OdeEntry {
    pub problem: Box<dyn OdeProblem + Send + Sync>,
    pub y0: Vec<f64>,
    pub names: Vec<String>,
    pub exact: Option<ExactSolution>,
    pub energy: Option<EnergyFn>,
}

pub struct DdeEntry {
    pub problem: Box<dyn DdeProblem + Send + Sync>,
    pub names: Vec<String>,
    pub exact: Option<ExactSolution>,
    pub energy: Option<EnergyFn>,
}

pub const ODE_IDS: [&str; 4] = ["decay", "quartic", "pendulum", "damped-pendulum"];
pub const DDE_IDS: [&str; 4] = ["linear-delay", "problem1", "problem2", "problem3"];

fn hamiltonian_entry(h: BenchmarkHamiltonian, damping: Option<f64>, y0: Vec<f64>) -> OdeEntry {
    let system = match damping {
        Some(g) => ConservativeSystem::damped(h, g),
        None => ConservativeSystem::canonical(h),
    };
    let energy_sys = system.clone();
    OdeEntry {
        problem: Box::new(system),
        y0,
        names: phase_names(1),
        exact: None,
        energy: Some(Box::new(move |y| energy_sys.energy(y).unwrap_or(f64::NAN))),
    }
}

pub fn ode_problem(id: &str) -> Result<OdeEntry> {
    Ok(match id {
        "decay" => OdeEntry {
            problem: Box::new(FnOde::new(1, |y: &[f64], dy: &mut [f64]| dy[0] = -y[0])),
            y0: vec![1.0],
            names: vec!["y".into()],
            exact: Some(|t| vec![(-t).exp()]),
            energy: None,
        },
        "quartic" => hamiltonian_entry(BenchmarkHamiltonian::Quartic { dof: 1 }, None, vec![2f64.sqrt(), 0.0]),
        "pendulum" => hamiltonian_entry(BenchmarkHamiltonian::Pendulum, None, vec![0.0, 1.99999]),
        "damped-pendulum" => hamiltonian_entry(BenchmarkHamiltonian::Pendulum, Some(0.1), vec![0.0, 1.99999]),
        other => return Err(Error::UnknownProblem(other.to_string())),
    })
}

pub fn dde_problem(id: &str) -> Result<DdeEntry> {
    if id == "linear-delay" {
        return Ok(DdeEntry {
            problem: Box::new(LinearDelay::standard()),
            names: vec!["y".into()],
            exact: Some(|t| vec![LinearDelay::standard_solution(t)]),
            energy: None,
        });
    }
    let pid: ProblemId = id.parse()?;
    let problem = make_problem(pid);
    let d = problem.dim() / 2;
    let energy_problem = problem.clone();
    Ok(DdeEntry {
        problem: Box::new(problem),
        names: phase_names(d),
        exact: None,
        energy: Some(Box::new(move |y| energy_problem.energy(y).unwrap_or(f64::NAN))),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_id_resolves() {
        for id in ODE_IDS {
            let e = ode_problem(id).unwrap();
            assert_eq!(e.problem.dim(), e.y0.len());
            assert_eq!(e.names.len(), e.y0.len());
        }
        for id in DDE_IDS {
            let e = dde_problem(id).unwrap();
            assert_eq!(e.names.len(), e.problem.dim());
        }
        assert!(ode_problem("nope").is_err());
        assert!(dde_problem("nope").is_err());
    }
}
