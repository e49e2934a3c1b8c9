//! Hamiltonian Boundary Value Methods: Runge-Kutta methods obtained from a
//! degree-`s` Legendre expansion of the vector field over each step,
//! discretised with a `k`-point quadrature.
//!
//! The same machinery integrates autonomous ODEs ([`ode`]) and constant-delay
//! DDEs on a mesh commensurable with the delay ([`dde`]). With `k >= s` Gauss
//! nodes the methods have order `2s` at mesh points, and for polynomial
//! Hamiltonians of degree `<= 2k/s` they conserve the energy exactly.
//!
//! ```
//! use hbvm::{ode::{integrate, FnOde}, Hbvm, SolverSettings};
//!
//! let decay = FnOde::new(1, |y: &[f64], dy: &mut [f64]| dy[0] = -y[0]);
//! let method = Hbvm::gauss(2, 2).unwrap();
//! let run = integrate(&decay, &method, &[1.0], 0.0, 1.0, 16, &SolverSettings::default()).unwrap();
//! assert!((run.last().unwrap()[0] - (-1f64).exp()).abs() < 1e-8);
//! ```

pub mod catalog;
pub mod config;
pub mod convergence;
pub mod dde;
pub mod error;
pub mod experiments;
pub mod hamiltonian;
pub mod legendre;
pub mod method;
pub mod ode;
pub mod output;
pub mod quadrature;
pub mod report;
mod solver;
pub mod tableau;

pub use error::{Error, Result};
pub use legendre::{xi, LegendreBasis, XiCoefficients};
pub use method::{Hbvm, StepPolynomial};
pub use quadrature::QuadratureRule;
pub use report::RunReport;
pub use solver::{InitialGuess, IterationScheme, SolverSettings};
pub use tableau::{ButcherTableau, StructureMatrices, WTransformReport};
