//! Shifted orthonormal Legendre polynomials on `[0, 1]`.
//!
//! The basis is fixed by `∫₀¹ P_i P_j dx = δ_ij` and a positive leading
//! coefficient, so `P_0 ≡ 1` and `P_1(x) = √3 (2x − 1)`. Values are produced
//! by the three-term recurrence
//!
//! ```text
//! P_{n+1}(x) = a_n (2x − 1) P_n(x) − b_n P_{n−1}(x)
//! ```
//!
//! and integrals `∫₀^c P_j` by the identity
//! `∫₀^c P_j = ξ_{j+1} P_{j+1}(c) − ξ_j P_{j−1}(c)` (`j ≥ 1`), which only
//! needs one more polynomial value.

use crate::error::{Error, Result};

/// `ξ_0 = 1/2`, `ξ_j = 1 / (2 √(4j² − 1))` for `j ≥ 1`.
pub fn xi(j: usize) -> f64 {
    if j == 0 {
        0.5
    } else {
        let j = j as f64;
        1.0 / (2.0 * (4.0 * j * j - 1.0).sqrt())
    }
}

/// Table of `ξ_0..=ξ_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct XiCoefficients {
    values: Vec<f64>,
}

impl XiCoefficients {
    pub fn new(max: usize) -> Self {
        Self {
            values: (0..=max).map(xi).collect(),
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, j: usize) -> Option<f64> {
        self.values.get(j).copied()
    }
}

/// Recurrence coefficients for `P_0..=P_max_degree`.
///
/// Immutable after construction and cheap to share between threads.
#[derive(Debug, Clone, PartialEq)]
pub struct LegendreBasis {
    max_degree: usize,
    // a_n, b_n for n = 1..max_degree-1, index n
    a: Vec<f64>,
    b: Vec<f64>,
}

impl LegendreBasis {
    pub fn new(max_degree: usize) -> Self {
        let mut a = vec![0.0; max_degree.max(1)];
        let mut b = vec![0.0; max_degree.max(1)];
        for n in 1..max_degree {
            let nf = n as f64;
            a[n] = ((2.0 * nf + 1.0) * (2.0 * nf + 3.0)).sqrt() / (nf + 1.0);
            b[n] = nf / (nf + 1.0) * ((2.0 * nf + 3.0) / (2.0 * nf - 1.0)).sqrt();
        }
        Self { max_degree, a, b }
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    fn check_degree(&self, j: usize) -> Result<()> {
        if j > self.max_degree {
            Err(Error::DegreeOutOfRange {
                degree: j,
                capacity: self.max_degree,
            })
        } else {
            Ok(())
        }
    }

    fn check_x(x: f64) -> Result<()> {
        if (0.0..=1.0).contains(&x) {
            Ok(())
        } else {
            Err(Error::OutsideUnitInterval(x))
        }
    }

    /// Writes `P_0(x)..P_{out.len()-1}(x)` into `out`. No range checks.
    pub(crate) fn fill_values(&self, x: f64, out: &mut [f64]) {
        let n = out.len();
        if n == 0 {
            return;
        }
        let t = 2.0 * x - 1.0;
        out[0] = 1.0;
        if n > 1 {
            out[1] = 3f64.sqrt() * t;
        }
        for j in 1..n.saturating_sub(1) {
            out[j + 1] = self.a[j] * t * out[j] - self.b[j] * out[j - 1];
        }
    }

    /// Value of `P_j(x)`.
    pub fn eval(&self, j: usize, x: f64) -> Result<f64> {
        self.check_degree(j)?;
        Self::check_x(x)?;
        let mut v = vec![0.0; j + 1];
        self.fill_values(x, &mut v);
        Ok(v[j])
    }

    /// `P_0(x)..=P_n(x)`.
    pub fn values(&self, n: usize, x: f64) -> Result<Vec<f64>> {
        self.check_degree(n)?;
        Self::check_x(x)?;
        let mut v = vec![0.0; n + 1];
        self.fill_values(x, &mut v);
        Ok(v)
    }

    /// `∫₀^c P_j(x) dx`, via the ξ-recurrence. Requires `j + 1 <= max_degree`.
    pub fn eval_int(&self, j: usize, c: f64) -> Result<f64> {
        self.check_degree(j + 1)?;
        Self::check_x(c)?;
        let mut v = vec![0.0; j + 2];
        self.fill_values(c, &mut v);
        Ok(integral_from_values(j, &v))
    }

    /// `∫₀^c P_0 .. ∫₀^c P_{n-1}`, i.e. the first `n` integrals.
    pub fn integrals(&self, n: usize, c: f64) -> Result<Vec<f64>> {
        self.check_degree(n)?;
        Self::check_x(c)?;
        let mut out = vec![0.0; n];
        self.fill_integrals(c, &mut out);
        Ok(out)
    }

    pub(crate) fn fill_integrals(&self, c: f64, out: &mut [f64]) {
        let mut v = vec![0.0; out.len() + 1];
        self.fill_values(c, &mut v);
        for (j, o) in out.iter_mut().enumerate() {
            *o = integral_from_values(j, &v);
        }
    }
}

fn integral_from_values(j: usize, v: &[f64]) -> f64 {
    if j == 0 {
        xi(1) * v[1] + xi(0) * v[0]
    } else {
        xi(j + 1) * v[j + 1] - xi(j) * v[j - 1]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
        fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> f64 {
            let m = 0.5 * (a + b);
            (b - a) / 6.0 * (f(a) + 4.0 * f(m) + f(b))
        }
        fn rec(f: &dyn Fn(f64) -> f64, a: f64, b: f64, whole: f64, tol: f64, depth: u32) -> f64 {
            let m = 0.5 * (a + b);
            let left = simpson(f, a, m);
            let right = simpson(f, m, b);
            let delta = left + right - whole;
            if depth == 0 || delta.abs() <= 15.0 * tol {
                left + right + delta / 15.0
            } else {
                rec(f, a, m, left, 0.5 * tol, depth - 1) + rec(f, m, b, right, 0.5 * tol, depth - 1)
            }
        }
        if a == b {
            return 0.0;
        }
        rec(f, a, b, simpson(f, a, b), tol, 40)
    }

    #[test]
    fn low_degree_values() {
        let basis = LegendreBasis::new(4);
        for x in [0.0, 0.3, 1.0] {
            assert_eq!(basis.eval(0, x).unwrap(), 1.0);
        }
        // Gram-Schmidt on {1, x} over [0,1]: x - 1/2 normalised by sqrt(1/12)
        let gs = |x: f64| (x - 0.5) / (1.0f64 / 12.0).sqrt();
        assert_abs_diff_eq!(basis.eval(1, 0.0).unwrap(), -(3f64.sqrt()), epsilon = 1e-15);
        assert_abs_diff_eq!(basis.eval(1, 0.0).unwrap(), gs(0.0), epsilon = 1e-15);
        assert_abs_diff_eq!(basis.eval(1, 0.5).unwrap(), 0.0, epsilon = 1e-16);
        // Gram-Schmidt degree 2: x^2 - x + 1/6, norm^2 = 1/180
        let p2 = |x: f64| (x * x - x + 1.0 / 6.0) * 180f64.sqrt();
        for x in [0.0, 0.1, 0.77, 1.0] {
            assert_abs_diff_eq!(basis.eval(2, x).unwrap(), p2(x), epsilon = 1e-14);
        }
    }

    #[test]
    fn rejects_bad_arguments() {
        let basis = LegendreBasis::new(3);
        assert_eq!(
            basis.eval(4, 0.5),
            Err(Error::DegreeOutOfRange { degree: 4, capacity: 3 })
        );
        assert_eq!(basis.eval(1, 1.5), Err(Error::OutsideUnitInterval(1.5)));
        assert!(basis.eval(1, -1e-3).is_err());
        // needs P_4
        assert!(basis.eval_int(3, 0.5).is_err());
        assert!(basis.eval_int(2, 0.5).is_ok());
    }

    #[test]
    fn xi_values() {
        assert_eq!(xi(0), 0.5);
        assert_abs_diff_eq!(xi(1), 0.2886751345948129, epsilon = 1e-16);
        assert_abs_diff_eq!(xi(2), 1.0 / (2.0 * 15f64.sqrt()), epsilon = 1e-16);
        let table = XiCoefficients::new(30);
        for w in table.values()[1..].windows(2) {
            assert!(w[0] > w[1] && w[1] > 0.0);
        }
    }

    #[test]
    fn integral_examples() {
        let basis = LegendreBasis::new(12);
        assert_abs_diff_eq!(basis.eval_int(0, 1.0).unwrap(), 1.0, epsilon = 1e-15);
        for j in 1..11 {
            assert_abs_diff_eq!(basis.eval_int(j, 1.0).unwrap(), 0.0, epsilon = 1e-14);
            assert_abs_diff_eq!(basis.eval_int(j, 0.0).unwrap(), 0.0, epsilon = 1e-15);
        }
        assert_abs_diff_eq!(basis.eval_int(1, 0.5).unwrap(), -(3f64.sqrt()) / 4.0, epsilon = 1e-15);
        assert_abs_diff_eq!(basis.eval_int(0, 0.3).unwrap(), 0.3, epsilon = 1e-15);
    }

    #[test]
    fn integral_recurrence_matches_quadrature() {
        let basis = LegendreBasis::new(10);
        for j in 1..=8 {
            for i in 0..100 {
                let c = (i as f64 + 0.5) / 100.0;
                let numeric = adaptive_simpson(&|x| basis.eval(j, x).unwrap(), 0.0, c, 1e-14);
                let rec = basis.eval_int(j, c).unwrap();
                assert!((numeric - rec).abs() <= 1e-12, "j={j} c={c}: {numeric} vs {rec}");
            }
        }
    }

    #[test]
    fn stable_at_high_degree() {
        // |P_j| <= sqrt(2j+1) on [0,1]; endpoints attain it with sign (-1)^j at 0
        let basis = LegendreBasis::new(40);
        let v0 = basis.values(40, 0.0).unwrap();
        let v1 = basis.values(40, 1.0).unwrap();
        for j in 0..=40 {
            let bound = (2.0 * j as f64 + 1.0).sqrt();
            assert_abs_diff_eq!(v1[j], bound, epsilon = 1e-12 * bound);
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            assert_abs_diff_eq!(v0[j], sign * bound, epsilon = 1e-12 * bound);
        }
    }
}
