//! Finite-element integrals on the periodic P1 space: consistent mass and
//! stiffness matrices, the L2 projection, the closed-form convection
//! integral, the viscous term, and the lumped-mass semidiscrete right-hand
//! side.

use crate::error::Result;
use crate::mesh::{ElementField, Mesh, NodalField};
use crate::tridiag::CyclicTridiagonal;

/// 4-point Gauss-Legendre rule on [0, 1]; exact for degree <= 7, used for
/// projection right-hand sides of non-polynomial data.
pub const GAUSS4: [(f64, f64); 4] = [
    (0.069_431_844_202_973_7, 0.173_927_422_568_727_0),
    (0.330_009_478_207_571_9, 0.326_072_577_431_273_0),
    (0.669_990_521_792_428_1, 0.326_072_577_431_273_0),
    (0.930_568_155_797_026_3, 0.173_927_422_568_727_0),
];

/// Consistent P1 mass matrix on the periodic mesh: (h/6)(1, 4, 1) cyclic.
pub fn mass_matrix(mesh: Mesh) -> CyclicTridiagonal {
    let n = mesh.n_elems();
    let h = mesh.h();
    CyclicTridiagonal::new(
        vec![h / 6.0; n],
        vec![2.0 * h / 3.0; n],
        vec![h / 6.0; n],
    )
    .expect("mesh guarantees n >= 3")
}

/// P1 stiffness matrix on the periodic mesh: (1/h)(-1, 2, -1) cyclic.
pub fn stiffness_matrix(mesh: Mesh) -> CyclicTridiagonal {
    let n = mesh.n_elems();
    let h = mesh.h();
    CyclicTridiagonal::new(vec![-1.0 / h; n], vec![2.0 / h; n], vec![-1.0 / h; n])
        .expect("mesh guarantees n >= 3")
}

/// Load vector `b_i = \int f v_i dx`, 4-point Gauss per element.
pub fn load_vector(f: impl Fn(f64) -> f64, mesh: Mesh) -> Vec<f64> {
    let n = mesh.n_elems();
    let h = mesh.h();
    let mut b = vec![0.0; n];
    for elem in 0..n {
        let x_left = mesh.node(elem);
        for (q, w) in GAUSS4 {
            let fx = f(x_left + q * h) * w * h;
            // v_elem falls 1 -> 0, v_{elem+1} rises 0 -> 1 across the element
            b[elem] += fx * (1.0 - q);
            b[(elem + 1) % n] += fx * q;
        }
    }
    b
}

/// Consistent-mass L2 projection of `f` onto the P1 space.
pub fn l2_project(f: impl Fn(f64) -> f64, mesh: Mesh) -> Result<NodalField> {
    let b = load_vector(f, mesh);
    let values = mass_matrix(mesh).solve(&b)?;
    NodalField::new(mesh, values)
}

/// Apply the inverse consistent mass matrix to a load vector.
pub fn mass_solve(mesh: Mesh, b: &[f64]) -> Result<NodalField> {
    let values = mass_matrix(mesh).solve(b)?;
    NodalField::new(mesh, values)
}

/// The nonlinear convection integral `\int u du/dx v_i dx` in closed form.
///
/// With `s1`, `s2` the slopes left and right of node `i`, direct integration
/// of the piecewise linears gives
/// `(h^2/3) s1^2 + (h^2/6) s2^2 + (h/2) u_{i-1} s1 + (h/2) u_i s2`.
pub fn convection_term(u: &NodalField, i: usize) -> f64 {
    let n = u.mesh().n_elems();
    let h = u.mesh().h();
    let i = i % n;
    let prev = (i + n - 1) % n;
    let s1 = u.element_slope(prev);
    let s2 = u.element_slope(i);
    let h2 = h * h;
    h2 / 3.0 * s1 * s1 + h2 / 6.0 * s2 * s2 + 0.5 * h * (u.value(prev) * s1 + u.value(i) * s2)
}

/// The viscous integral `\int nu_hat du/dx dv_i/dx dx`.
///
/// `dv_i/dx` is `+1/h` on the left element and `-1/h` on the right one, so
/// the integral telescopes to `nu_{i-1} s1 - nu_i s2`.
pub fn viscous_term(u: &NodalField, nu_hat: &ElementField, i: usize) -> f64 {
    let n = u.mesh().n_elems();
    let i = i % n;
    let prev = (i + n - 1) % n;
    nu_hat.value(prev) * u.element_slope(prev) - nu_hat.value(i) * u.element_slope(i)
}

/// Nodal time derivative of the lumped-mass semidiscretization:
/// `(du/dt)_i = -(convection + viscous) / h`, evaluated in one pass over a
/// shared slope array (identical to the per-node entry points to roundoff).
pub fn semidiscrete_rhs(u: &NodalField, nu_hat: &ElementField) -> NodalField {
    let mesh = u.mesh();
    let n = mesh.n_elems();
    let h = mesh.h();
    let vals = u.values();
    let nus = nu_hat.values();

    let mut slopes = vec![0.0; n];
    for i in 0..n {
        slopes[i] = (vals[(i + 1) % n] - vals[i]) / h;
    }
    let h2 = h * h;
    let values = (0..n)
        .map(|i| {
            let prev = (i + n - 1) % n;
            let s1 = slopes[prev];
            let s2 = slopes[i];
            let conv = h2 / 3.0 * s1 * s1
                + h2 / 6.0 * s2 * s2
                + 0.5 * h * (vals[prev] * s1 + vals[i] * s2);
            let visc = nus[prev] * s1 - nus[i] * s2;
            -(conv + visc) / h
        })
        .collect();
    NodalField::new(mesh, values).expect("sizes match by construction")
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    /// 5-point Gauss-Legendre on [0,1], exact for degree <= 9. The oracle
    /// rule is kept separate from the 4-point production rule on purpose.
    const GAUSS5: [(f64, f64); 5] = [
        (0.046_910_077_030_668_07, 0.118_463_442_528_094_6),
        (0.230_765_344_947_158_43, 0.239_314_335_249_683_25),
        (0.5, 0.284_444_444_444_444_44),
        (0.769_234_655_052_841_57, 0.239_314_335_249_683_25),
        (0.953_089_922_969_331_9, 0.118_463_442_528_094_6),
    ];

    /// Quadrature oracle for `\int g(x) v_i(x) dx` over the two elements
    /// supporting the hat function `v_i`.
    fn hat_weighted_integral(g: impl Fn(f64) -> f64, mesh: Mesh, i: usize) -> f64 {
        let n = mesh.n_elems();
        let h = mesh.h();
        let mut acc = 0.0;
        // left element: v_i rises 0 -> 1
        let xl = mesh.node((i + n - 1) % n);
        for (q, w) in GAUSS5 {
            acc += g(xl + q * h) * q * w * h;
        }
        // right element: v_i falls 1 -> 0
        let xr = mesh.node(i % n);
        for (q, w) in GAUSS5 {
            acc += g(xr + q * h) * (1.0 - q) * w * h;
        }
        acc
    }

    fn random_field(mesh: Mesh, seed: u64) -> NodalField {
        let mut state = seed;
        let values = (0..mesh.n_elems())
            .map(|_| {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                ((state >> 11) as f64 / (1u64 << 53) as f64) * 4.0 - 2.0
            })
            .collect();
        NodalField::new(mesh, values).unwrap()
    }

    #[test]
    fn convection_constant_is_zero() {
        let mesh = Mesh::new(6).unwrap();
        let u = NodalField::new(mesh, vec![1.7; 6]).unwrap();
        for i in 0..6 {
            assert_eq!(convection_term(&u, i), 0.0);
        }
    }

    #[test]
    fn convection_hand_example() {
        let mesh = Mesh::new(4).unwrap();
        let u = NodalField::new(mesh, vec![0.0, 1.0, 0.0, 0.0]).unwrap();
        // s1 = 4, s2 = -4, u0 = 0, u1 = 1: 1/3 + 1/6 - 1/2 = 0
        assert!(convection_term(&u, 1).abs() < 1e-15);
    }

    #[test]
    fn convection_matches_quadrature_oracle() {
        for trial in 0..100 {
            let n = 5 + (trial % 7);
            let mesh = Mesh::new(n).unwrap();
            let u = random_field(mesh, 0x5eed + trial as u64);
            for i in 0..n {
                let oracle = hat_weighted_integral(
                    |x| {
                        let xr = x.rem_euclid(1.0);
                        let mut e = (xr / mesh.h()).floor() as usize;
                        if e >= n {
                            e = n - 1;
                        }
                        u.eval(x) * u.element_slope(e)
                    },
                    mesh,
                    i,
                );
                let got = convection_term(&u, i);
                assert!(
                    (got - oracle).abs() < 1e-13,
                    "trial {trial} node {i}: {got} vs {oracle}"
                );
            }
        }
    }

    #[test]
    fn viscous_matches_quadrature_oracle() {
        for trial in 0..100 {
            let n = 5 + (trial % 7);
            let mesh = Mesh::new(n).unwrap();
            let h = mesh.h();
            let u = random_field(mesh, 0xabcd + trial as u64);
            let nu = {
                let mut s = 0x77aa + trial as u64;
                let vals = (0..n)
                    .map(|_| {
                        s = s.wrapping_mul(6364136223846793005).wrapping_add(99991);
                        ((s >> 11) as f64 / (1u64 << 53) as f64) + 0.01
                    })
                    .collect();
                ElementField::new(mesh, vals).unwrap()
            };
            for i in 0..n {
                // dv_i/dx is +1/h on the element left of node i, -1/h right
                let prev = (i + n - 1) % n;
                let mut oracle = 0.0;
                for (q, w) in GAUSS5 {
                    let _ = q;
                    oracle += nu.value(prev) * u.element_slope(prev) * (1.0 / h) * w * h;
                    oracle += nu.value(i) * u.element_slope(i) * (-1.0 / h) * w * h;
                }
                let got = viscous_term(&u, &nu, i);
                assert!((got - oracle).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn conservation_and_energy_identities() {
        for trial in 0..20 {
            let mesh = Mesh::new(17).unwrap();
            let u = random_field(mesh, 0x1234 + trial);
            let nu = ElementField::constant(mesh, 0.3);
            let conv_sum: f64 = (0..17).map(|i| convection_term(&u, i)).sum();
            let visc_sum: f64 = (0..17).map(|i| viscous_term(&u, &nu, i)).sum();
            let energy: f64 = (0..17).map(|i| u.value(i) * convection_term(&u, i)).sum();
            assert!(conv_sum.abs() < 1e-12, "{conv_sum}");
            assert!(visc_sum.abs() < 1e-12, "{visc_sum}");
            assert!(energy.abs() < 1e-12, "{energy}");
        }
    }

    #[test]
    fn viscous_uniform_gives_negative_jump() {
        let mesh = Mesh::new(8).unwrap();
        let u = random_field(mesh, 42);
        let nu = ElementField::constant(mesh, 0.25);
        for i in 0..8 {
            let (jump, _) = u.slope_jump_and_avg(i);
            assert!((viscous_term(&u, &nu, i) + 0.25 * jump).abs() < 1e-13);
        }
    }

    #[test]
    fn projection_reproduces_constants_and_vh() {
        let mesh = Mesh::new(16).unwrap();
        let c = l2_project(|_| 2.5, mesh).unwrap();
        for v in c.values() {
            assert!((v - 2.5).abs() < 1e-12);
        }

        // f already piecewise linear on the mesh: projection is the identity
        let f = random_field(mesh, 7);
        let p = l2_project(|x| f.eval(x), mesh).unwrap();
        for (a, b) in p.values().iter().zip(f.values().iter()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn projection_second_order() {
        let f = |x: f64| (2.0 * PI * x).sin();
        let mut errs = Vec::new();
        for n in [50, 100, 200] {
            let mesh = Mesh::new(n).unwrap();
            let p = l2_project(f, mesh).unwrap();
            // L2 error by the oracle rule elementwise
            let mut acc = 0.0;
            for e in 0..n {
                let xl = mesh.node(e);
                for (q, w) in GAUSS5 {
                    let x = xl + q * mesh.h();
                    let d = p.eval(x) - f(x);
                    acc += d * d * w * mesh.h();
                }
            }
            errs.push(acc.sqrt());
        }
        for k in 1..errs.len() {
            let rate = (errs[k - 1] / errs[k]).log2();
            assert!((1.8..=2.2).contains(&rate), "observed order {rate}");
        }
    }

    #[test]
    fn semidiscrete_rhs_componentwise() {
        let mesh = Mesh::new(9).unwrap();
        let u = random_field(mesh, 99);
        let nu = ElementField::constant(mesh, 0.05);
        let rhs = semidiscrete_rhs(&u, &nu);
        for i in 0..9 {
            let expected = -(convection_term(&u, i) + viscous_term(&u, &nu, i)) / mesh.h();
            assert_eq!(rhs.value(i), expected);
        }

        let c = NodalField::new(mesh, vec![0.4; 9]).unwrap();
        let steady = semidiscrete_rhs(&c, &nu);
        for v in steady.values() {
            assert_eq!(*v, 0.0);
        }
    }
}
