//! Uniform periodic mesh on (0,1) and the nodal / per-element fields
//! every other module works with.
//!
//! Node `N` is identified with node 0: a field stores exactly `N` values
//! and every index is reduced modulo `N`.

use crate::error::{Error, Result};

/// Uniform partition of the periodic unit interval into `n_elems` elements
/// of width `h = 1/n_elems`. Node `i` sits at `i * h`; element `i` is
/// `[x_i, x_{i+1}]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mesh {
    n_elems: usize,
    h: f64,
}

impl Mesh {
    /// At least three elements are required so the nonlinear viscosity
    /// stencil (element plus both neighbours) sees distinct elements.
    pub fn new(n_elems: usize) -> Result<Self> {
        if n_elems < 3 {
            return Err(Error::MeshTooCoarse(n_elems));
        }
        Ok(Self {
            n_elems,
            h: 1.0 / n_elems as f64,
        })
    }

    pub fn n_elems(&self) -> usize {
        self.n_elems
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    /// Position of node `i` (indices taken modulo `N`).
    pub fn node(&self, i: usize) -> f64 {
        (i % self.n_elems) as f64 * self.h
    }

    pub fn wrap(&self, i: isize) -> usize {
        i.rem_euclid(self.n_elems as isize) as usize
    }
}

/// Continuous piecewise-linear periodic function given by its nodal values.
#[derive(Debug, Clone, PartialEq)]
pub struct NodalField {
    mesh: Mesh,
    values: Vec<f64>,
}

impl NodalField {
    pub fn new(mesh: Mesh, values: Vec<f64>) -> Result<Self> {
        if values.len() != mesh.n_elems() {
            return Err(Error::InvalidInput(format!(
                "expected {} nodal values, got {}",
                mesh.n_elems(),
                values.len()
            )));
        }
        Ok(Self { mesh, values })
    }

    pub fn zeros(mesh: Mesh) -> Self {
        Self {
            mesh,
            values: vec![0.0; mesh.n_elems()],
        }
    }

    /// Nodal interpolant of `f`.
    pub fn interpolate(mesh: Mesh, f: impl Fn(f64) -> f64) -> Self {
        let values = (0..mesh.n_elems()).map(|i| f(mesh.node(i))).collect();
        Self { mesh, values }
    }

    pub fn mesh(&self) -> Mesh {
        self.mesh
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn value(&self, i: usize) -> f64 {
        self.values[i % self.values.len()]
    }

    /// Piecewise-linear evaluation, 1-periodic in `x`.
    pub fn eval(&self, x: f64) -> f64 {
        let n = self.values.len();
        let h = self.mesh.h();
        let xr = x.rem_euclid(1.0);
        let mut i = (xr / h).floor() as usize;
        if i >= n {
            i = n - 1;
        }
        let theta = (xr - i as f64 * h) / h;
        (1.0 - theta) * self.values[i] + theta * self.values[(i + 1) % n]
    }

    /// Constant slope of the interpolant on element `i` (periodic wrap).
    pub fn element_slope(&self, i: usize) -> f64 {
        let n = self.values.len();
        let i = i % n;
        (self.values[(i + 1) % n] - self.values[i]) / self.mesh.h()
    }

    /// Jump and average of the slope across node `i`.
    ///
    /// The jump is right slope minus left slope; the average is of the
    /// absolute slopes. The sign convention is fixed here so tests are
    /// deterministic; only the magnitude enters the viscosity.
    pub fn slope_jump_and_avg(&self, i: usize) -> (f64, f64) {
        let n = self.values.len();
        let right = self.element_slope(i % n);
        let left = self.element_slope((i + n - 1) % n);
        (right - left, 0.5 * (right.abs() + left.abs()))
    }

    /// Total variation over one period, `sum |u_{i+1} - u_i|`. For a
    /// piecewise linear this equals the integral of `|du/dx|`.
    pub fn total_variation(&self) -> f64 {
        let n = self.values.len();
        (0..n)
            .map(|i| (self.values[(i + 1) % n] - self.values[i]).abs())
            .sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// Largest signed element slope.
    pub fn max_slope(&self) -> f64 {
        let n = self.values.len();
        (0..n).fold(f64::NEG_INFINITY, |m, i| m.max(self.element_slope(i)))
    }

    /// Lumped-mass norm `(sum_i u_i^2 h)^{1/2}`.
    pub fn lumped_norm(&self) -> f64 {
        let h = self.mesh.h();
        self.values.iter().map(|v| v * v * h).sum::<f64>().sqrt()
    }

    /// Exact L2 norm of the piecewise-linear interpolant.
    pub fn l2_norm(&self) -> f64 {
        let n = self.values.len();
        let h = self.mesh.h();
        let mut acc = 0.0;
        for i in 0..n {
            let a = self.values[i];
            let b = self.values[(i + 1) % n];
            acc += h / 3.0 * (a * a + a * b + b * b);
        }
        acc.sqrt()
    }

    /// Exact L2 norm of the (piecewise-constant) derivative.
    pub fn grad_l2_norm(&self) -> f64 {
        let n = self.values.len();
        let h = self.mesh.h();
        (0..n)
            .map(|i| {
                let s = self.element_slope(i);
                h * s * s
            })
            .sum::<f64>()
            .sqrt()
    }

    /// Nodal mean, equal to the exact integral of the interpolant.
    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    pub fn axpy(&mut self, alpha: f64, other: &NodalField) {
        for (v, o) in self.values.iter_mut().zip(other.values.iter()) {
            *v += alpha * o;
        }
    }
}

/// One scalar per element, e.g. a viscosity coefficient field.
#[derive(Debug, Clone, PartialEq)]
pub struct ElementField {
    mesh: Mesh,
    values: Vec<f64>,
}

impl ElementField {
    pub fn new(mesh: Mesh, values: Vec<f64>) -> Result<Self> {
        if values.len() != mesh.n_elems() {
            return Err(Error::InvalidInput(format!(
                "expected {} element values, got {}",
                mesh.n_elems(),
                values.len()
            )));
        }
        Ok(Self { mesh, values })
    }

    pub fn constant(mesh: Mesh, value: f64) -> Self {
        Self {
            mesh,
            values: vec![value; mesh.n_elems()],
        }
    }

    pub fn mesh(&self) -> Mesh {
        self.mesh
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, i: usize) -> f64 {
        self.values[i % self.values.len()]
    }

    pub fn max(&self) -> f64 {
        self.values.iter().fold(f64::NEG_INFINITY, |m, v| m.max(*v))
    }
}
