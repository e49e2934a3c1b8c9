use crate::method::StepPolynomial;

/// Output of a fixed-step run on the mesh `t_n = t0 + n h`, `n = 0..=N`.
#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub t0: f64,
    pub h: f64,
    /// `y_0..=y_N`.
    pub states: Vec<Vec<f64>>,
    /// Iterations used by step `n` at index `n − 1`.
    pub iterations: Vec<usize>,
    /// Dense output of step `n` at index `n − 1`.
    pub segments: Vec<StepPolynomial>,
    /// `H(y_n)` when a Hamiltonian is attached.
    pub energy: Option<Vec<f64>>,
}

impl RunReport {
    /// A report with no rows.
    pub fn empty(t0: f64, h: f64) -> Self {
        Self {
            t0,
            h,
            states: Vec::new(),
            iterations: Vec::new(),
            segments: Vec::new(),
            energy: None,
        }
    }

    pub fn steps(&self) -> usize {
        self.segments.len()
    }

    pub fn dim(&self) -> usize {
        self.states.first().map_or(0, Vec::len)
    }

    pub fn time(&self, n: usize) -> f64 {
        self.t0 + n as f64 * self.h
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.states.len()).map(|n| self.time(n)).collect()
    }

    pub fn last(&self) -> Option<&[f64]> {
        self.states.last().map(Vec::as_slice)
    }

    pub fn total_iterations(&self) -> usize {
        self.iterations.iter().sum()
    }

    pub fn max_iterations(&self) -> usize {
        self.iterations.iter().copied().max().unwrap_or(0)
    }

    /// Dense output at time `t ∈ [t0, t_N]`.
    pub fn dense(&self, t: f64) -> Option<Vec<f64>> {
        let n_steps = self.steps();
        if n_steps == 0 {
            return None;
        }
        let x = (t - self.t0) / self.h;
        if !(x >= 0.0 && x <= n_steps as f64) {
            return None;
        }
        let n = (x.ceil() as usize).clamp(1, n_steps);
        let c = (x - (n - 1) as f64).clamp(0.0, 1.0);
        self.segments[n - 1].eval(c).ok()
    }

    /// Attaches `H(y_n)` for every stored state.
    pub fn with_energy(mut self, hamiltonian: impl Fn(&[f64]) -> f64) -> Self {
        self.energy = Some(self.states.iter().map(|y| hamiltonian(y)).collect());
        self
    }
}
