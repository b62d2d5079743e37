//! Cyclic (periodic) tridiagonal systems and their direct solver.
//!
//! Row `i` couples to columns `i-1`, `i`, `i+1` modulo `n`, so the corner
//! entries `(0, n-1)` and `(n-1, 0)` are `sub[0]` and `sup[n-1]`. The solve
//! removes the corners with a rank-one Sherman-Morrison correction around a
//! plain Thomas elimination, O(n) and deterministic.

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct CyclicTridiagonal {
    /// `sub[i] = A[i][i-1 mod n]`; `sub[0]` is the top-right corner.
    pub sub: Vec<f64>,
    /// `diag[i] = A[i][i]`.
    pub diag: Vec<f64>,
    /// `sup[i] = A[i][i+1 mod n]`; `sup[n-1]` is the bottom-left corner.
    pub sup: Vec<f64>,
}

impl CyclicTridiagonal {
    pub fn new(sub: Vec<f64>, diag: Vec<f64>, sup: Vec<f64>) -> Result<Self> {
        let n = diag.len();
        if n < 3 {
            return Err(Error::InvalidInput(format!(
                "cyclic tridiagonal needs n >= 3, got {n}"
            )));
        }
        if sub.len() != n || sup.len() != n {
            return Err(Error::InvalidInput(
                "band lengths must all equal n".into(),
            ));
        }
        Ok(Self { sub, diag, sup })
    }

    pub fn n(&self) -> usize {
        self.diag.len()
    }

    /// Matrix-vector product, used by tests and round-trip checks.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let n = self.n();
        (0..n)
            .map(|i| {
                self.sub[i] * x[(i + n - 1) % n] + self.diag[i] * x[i] + self.sup[i] * x[(i + 1) % n]
            })
            .collect()
    }

    /// Solve `A x = rhs`.
    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        let n = self.n();
        if rhs.len() != n {
            return Err(Error::InvalidInput(format!(
                "rhs length {} does not match n = {n}",
                rhs.len()
            )));
        }

        // A = A' + u v^T with u = (gamma, 0, .., sup[n-1]), v = (1, 0, .., sub[0]/gamma);
        // A' is non-cyclic tridiagonal with adjusted first and last diagonal entries.
        let gamma = -self.diag[0];
        if gamma == 0.0 {
            return Err(Error::SolverFailure("zero leading diagonal entry".into()));
        }
        let mut bb = self.diag.clone();
        bb[0] -= gamma;
        bb[n - 1] -= self.sub[0] * self.sup[n - 1] / gamma;

        let y = thomas(&self.sub[1..], &bb, &self.sup[..n - 1], rhs)?;

        let mut u = vec![0.0; n];
        u[0] = gamma;
        u[n - 1] = self.sup[n - 1];
        let z = thomas(&self.sub[1..], &bb, &self.sup[..n - 1], &u)?;

        let vy = y[0] + self.sub[0] * y[n - 1] / gamma;
        let vz = 1.0 + z[0] + self.sub[0] * z[n - 1] / gamma;
        let vz_scale = 1.0 + z[0].abs() + (self.sub[0] * z[n - 1] / gamma).abs();
        if !vz.is_finite() || vz.abs() < 1e-10 * vz_scale {
            return Err(Error::SolverFailure(
                "singular Sherman-Morrison correction".into(),
            ));
        }
        let factor = vy / vz;

        let x: Vec<f64> = y.iter().zip(z.iter()).map(|(yi, zi)| yi - factor * zi).collect();
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::SolverFailure("non-finite solution entry".into()));
        }

        // Guard against silently returning garbage from a near-singular
        // elimination: the residual must be small relative to the data and
        // the size of the computed solution.
        let x_max = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let band_max = (0..n).fold(0.0f64, |m, i| {
            m.max(self.sub[i].abs() + self.diag[i].abs() + self.sup[i].abs())
        });
        let rhs_max = rhs.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let scale = (rhs_max + band_max * x_max).max(f64::MIN_POSITIVE);
        let ax = self.apply(&x);
        let res = ax
            .iter()
            .zip(rhs.iter())
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        if res > 1e-10 * scale {
            return Err(Error::SolverFailure(format!(
                "residual {res:.3e} too large for scale {scale:.3e}"
            )));
        }
        Ok(x)
    }
}

/// Thomas elimination for a non-cyclic tridiagonal system.
/// `sub` and `sup` have length `n-1` (sub-diagonal `A[i+1][i]`, super-diagonal
/// `A[i][i+1]`).
fn thomas(sub: &[f64], diag: &[f64], sup: &[f64], rhs: &[f64]) -> Result<Vec<f64>> {
    let n = diag.len();
    let mut gam = vec![0.0; n];
    let mut x = vec![0.0; n];

    let mut bet = diag[0];
    if bet == 0.0 || !bet.is_finite() {
        return Err(Error::SolverFailure("zero pivot in elimination".into()));
    }
    x[0] = rhs[0] / bet;
    for j in 1..n {
        gam[j] = sup[j - 1] / bet;
        bet = diag[j] - sub[j - 1] * gam[j];
        if bet == 0.0 || !bet.is_finite() {
            return Err(Error::SolverFailure("zero pivot in elimination".into()));
        }
        x[j] = (rhs[j] - sub[j - 1] * x[j - 1]) / bet;
    }
    for j in (0..n - 1).rev() {
        let next = x[j + 1];
        x[j] -= gam[j + 1] * next;
    }
    Ok(x)
}
