//! The differential (Helmholtz) filter and its associated norm.
//!
//! Filtering solves `delta^2 (du~/dx, dv/dx) + (u~, v) = (u, v)` on the
//! periodic P1 space with consistent mass on both sides, i.e. the cyclic
//! tridiagonal system `(delta^2 K + M) u~ = M u`. The norm
//! `|||u|||_delta = (||delta du/dx||^2 + ||u||^2)^(1/2)` interpolates
//! between an L2-like measure (delta ~ h) and an H^-1-like one (delta = 1).

use crate::assembly::{mass_matrix, stiffness_matrix};
use crate::error::{Error, Result};
use crate::mesh::{Mesh, NodalField};
use crate::tridiag::CyclicTridiagonal;

#[derive(Debug, Clone, Copy)]
pub struct FilterSpec {
    /// Filter width, > 0.
    pub delta: f64,
    /// Mesh on which the Helmholtz problem is discretized.
    pub mesh: Mesh,
}

impl FilterSpec {
    pub fn new(delta: f64, mesh: Mesh) -> Result<Self> {
        if !(delta > 0.0) {
            return Err(Error::InvalidInput(format!(
                "filter width must be positive, got {delta}"
            )));
        }
        Ok(Self { delta, mesh })
    }
}

/// Reusable assembled operator for one (mesh, delta) pair. Immutable after
/// construction, so it can be shared across error evaluations.
pub struct HelmholtzFilter {
    spec: FilterSpec,
    system: CyclicTridiagonal,
    mass: CyclicTridiagonal,
}

impl HelmholtzFilter {
    pub fn new(spec: FilterSpec) -> Self {
        let mass = mass_matrix(spec.mesh);
        let stiff = stiffness_matrix(spec.mesh);
        let d2 = spec.delta * spec.delta;
        let n = spec.mesh.n_elems();
        let system = CyclicTridiagonal::new(
            (0..n).map(|i| d2 * stiff.sub[i] + mass.sub[i]).collect(),
            (0..n).map(|i| d2 * stiff.diag[i] + mass.diag[i]).collect(),
            (0..n).map(|i| d2 * stiff.sup[i] + mass.sup[i]).collect(),
        )
        .expect("mesh guarantees n >= 3");
        Self { spec, system, mass }
    }

    pub fn spec(&self) -> FilterSpec {
        self.spec
    }

    pub fn apply(&self, u: &NodalField) -> Result<NodalField> {
        if u.mesh() != self.spec.mesh {
            return Err(Error::InvalidInput(
                "field lives on a different mesh than the filter".into(),
            ));
        }
        let rhs = self.mass.apply(u.values());
        let filtered = self.system.solve(&rhs)?;
        NodalField::new(self.spec.mesh, filtered)
    }
}

/// One-shot filter application.
pub fn apply_filter(u: &NodalField, spec: FilterSpec) -> Result<NodalField> {
    HelmholtzFilter::new(spec).apply(u)
}

/// `(||delta du/dx||^2 + ||u||^2)^(1/2)` with both norms evaluated exactly
/// for the piecewise linear. `delta = 0` gives the plain L2 norm.
pub fn delta_norm(u: &NodalField, delta: f64) -> f64 {
    let l2 = u.l2_norm();
    let grad = u.grad_l2_norm();
    (delta * delta * grad * grad + l2 * l2).sqrt()
}

/// Inject a coarse piecewise-linear field onto the nodes of a fine mesh.
/// The fine resolution must be a multiple of the coarse one so coarse
/// breakpoints land on fine nodes and the injection is exact.
pub fn inject_to_fine(u_coarse: &NodalField, fine: Mesh) -> Result<NodalField> {
    let nc = u_coarse.mesh().n_elems();
    let nf = fine.n_elems();
    if nf % nc != 0 {
        return Err(Error::MeshMismatch {
            coarse: nc,
            fine: nf,
        });
    }
    let ratio = nf / nc;
    let values = (0..nf)
        .map(|j| {
            let ci = j / ratio;
            let theta = (j % ratio) as f64 / ratio as f64;
            (1.0 - theta) * u_coarse.value(ci) + theta * u_coarse.value(ci + 1)
        })
        .collect();
    NodalField::new(fine, values)
}

/// Filtered error `|||filter(u_ref - u_h)|||_delta` computed on the fine
/// mesh; by linearity of the filter this equals the delta-norm of the
/// difference of the filtered fields.
pub fn filtered_error(
    u_ref: &NodalField,
    u_coarse: &NodalField,
    filter: &HelmholtzFilter,
) -> Result<f64> {
    if u_ref.mesh() != filter.spec().mesh {
        return Err(Error::InvalidInput(
            "reference field must live on the filter mesh".into(),
        ));
    }
    let mut e = u_ref.clone();
    let injected = inject_to_fine(u_coarse, u_ref.mesh())?;
    e.axpy(-1.0, &injected);
    let filtered = filter.apply(&e)?;
    Ok(delta_norm(&filtered, filter.spec().delta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn constants_are_fixed_points() {
        let mesh = Mesh::new(32).unwrap();
        let u = NodalField::new(mesh, vec![3.25; 32]).unwrap();
        let spec = FilterSpec::new(1.0, mesh).unwrap();
        let f = apply_filter(&u, spec).unwrap();
        for v in f.values() {
            assert!((v - 3.25).abs() < 1e-12);
        }
    }

    #[test]
    fn sine_attenuation_matches_continuous_factor() {
        let mesh = Mesh::new(6400).unwrap();
        let u = NodalField::interpolate(mesh, |x| (2.0 * PI * x).sin());
        let spec = FilterSpec::new(1.0, mesh).unwrap();
        let f = apply_filter(&u, spec).unwrap();
        // discrete sine modes are eigenvectors; measure the factor at a node
        let i = 1600; // x = 0.25, where sin = 1
        let factor = f.value(i) / u.value(i);
        let exact = 1.0 / (1.0 + (2.0 * PI).powi(2));
        assert!(
            (factor - exact).abs() < 1e-3 * exact.abs() + 1e-6,
            "{factor} vs {exact}"
        );
        assert!((exact - 0.02471).abs() < 1e-5);
    }

    #[test]
    fn mean_is_preserved() {
        let mesh = Mesh::new(64).unwrap();
        let u = NodalField::interpolate(mesh, |x| {
            0.3 + (2.0 * PI * x).sin() + 0.2 * (6.0 * PI * x).cos()
        });
        let spec = FilterSpec::new(0.5, mesh).unwrap();
        let f = apply_filter(&u, spec).unwrap();
        assert!((f.mean() - u.mean()).abs() < 1e-12);
    }

    #[test]
    fn filter_is_linear_and_contractive() {
        let mesh = Mesh::new(48).unwrap();
        let u = NodalField::interpolate(mesh, |x| (2.0 * PI * x).sin());
        let v = NodalField::interpolate(mesh, |x| (4.0 * PI * x).cos() - 0.3);
        let filter = HelmholtzFilter::new(FilterSpec::new(0.7, mesh).unwrap());

        let fu = filter.apply(&u).unwrap();
        let fv = filter.apply(&v).unwrap();
        let mut combo = u.clone();
        for (c, w) in combo.values_mut().iter_mut().zip(v.values().iter()) {
            *c = 2.0 * *c - 0.5 * w;
        }
        let fcombo = filter.apply(&combo).unwrap();
        for i in 0..48 {
            let lin = 2.0 * fu.value(i) - 0.5 * fv.value(i);
            assert!((fcombo.value(i) - lin).abs() < 1e-12);
        }

        assert!(fu.l2_norm() <= u.l2_norm() + 1e-12);
        assert!(delta_norm(&fu, 0.7) <= u.l2_norm() + 1e-12);
    }

    #[test]
    fn delta_norm_values() {
        let mesh = Mesh::new(20).unwrap();
        let c = NodalField::new(mesh, vec![-1.5; 20]).unwrap();
        assert!((delta_norm(&c, 2.0) - 1.5).abs() < 1e-14);

        let u = NodalField::interpolate(mesh, |x| (2.0 * PI * x).sin());
        assert!((delta_norm(&u, 0.0) - u.l2_norm()).abs() < 1e-15);

        let fine = Mesh::new(800).unwrap();
        let s = NodalField::interpolate(fine, |x| (2.0 * PI * x).sin());
        let expect = (0.5 + 0.5 * (2.0 * PI).powi(2)).sqrt();
        assert!((delta_norm(&s, 1.0) - expect).abs() < 1e-2);
    }

    #[test]
    fn filtered_error_of_injected_field_is_zero() {
        let coarse = Mesh::new(50).unwrap();
        let fine = Mesh::new(400).unwrap();
        let u = NodalField::interpolate(coarse, |x| (2.0 * PI * x).sin());
        let u_ref = inject_to_fine(&u, fine).unwrap();
        let filter = HelmholtzFilter::new(FilterSpec::new(1.0, fine).unwrap());
        let e = filtered_error(&u_ref, &u, &filter).unwrap();
        assert!(e < 1e-12);
    }

    #[test]
    fn small_delta_approaches_plain_l2_error() {
        let coarse = Mesh::new(40).unwrap();
        let fine = Mesh::new(320).unwrap();
        let u_h = NodalField::interpolate(coarse, |x| (2.0 * PI * x).sin());
        let u_ref = NodalField::interpolate(fine, |x| {
            (2.0 * PI * x).sin() + 0.05 * (8.0 * PI * x).cos()
        });

        let mut e = u_ref.clone();
        e.axpy(-1.0, &inject_to_fine(&u_h, fine).unwrap());
        let direct = e.l2_norm();

        let filter = HelmholtzFilter::new(FilterSpec::new(1e-6, fine).unwrap());
        let filtered = filtered_error(&u_ref, &u_h, &filter).unwrap();
        assert!((filtered - direct).abs() < 1e-6 * direct.max(1.0));
    }

    #[test]
    fn incompatible_meshes_are_rejected() {
        let coarse = Mesh::new(48).unwrap();
        let fine = Mesh::new(100).unwrap();
        let u = NodalField::zeros(coarse);
        assert!(matches!(
            inject_to_fine(&u, fine),
            Err(Error::MeshMismatch {
                coarse: 48,
                fine: 100
            })
        ));
    }
}
