//! The two artificial-viscosity coefficient fields.
//!
//! Linear: a constant first-order coefficient `max(U0 h/2, nu)`.
//! Nonlinear: shock-capturing, built from the jump indicator `nu0` at
//! element endpoints, the slope-maximum switch `xi`, and the neighbour
//! correction `nu1`, combined per element as `max(nu, h (nu0 + nu1))`.

use crate::mesh::{ElementField, Mesh, NodalField};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ViscosityKind {
    Linear,
    Nonlinear,
}

/// Which form of the neighbour correction `nu1` to use. `Ratio` weighs the
/// neighbour coefficients by slope ratios; `Simplified` drops the ratios
/// (they are < 1 whenever the switch is active, so `Ratio <= Simplified`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Nu1Variant {
    Ratio,
    Simplified,
}

#[derive(Debug, Clone, Copy)]
pub struct ViscositySpec {
    pub kind: ViscosityKind,
    /// Physical viscosity, >= 0.
    pub nu: f64,
    /// Regularization of the nu0 quotient denominator, >= 0.
    pub epsilon: f64,
    pub nu1_variant: Nu1Variant,
    /// Sup norm of the projected initial data; set by the solver from the
    /// actual initial state.
    pub u0_sup: f64,
}

impl ViscositySpec {
    pub fn linear(nu: f64) -> Self {
        Self {
            kind: ViscosityKind::Linear,
            nu,
            epsilon: 0.0,
            nu1_variant: Nu1Variant::Ratio,
            u0_sup: 1.0,
        }
    }

    pub fn nonlinear(nu: f64, epsilon: f64) -> Self {
        Self {
            kind: ViscosityKind::Nonlinear,
            nu,
            epsilon,
            nu1_variant: Nu1Variant::Ratio,
            u0_sup: 1.0,
        }
    }

    pub fn with_variant(mut self, variant: Nu1Variant) -> Self {
        self.nu1_variant = variant;
        self
    }
}

/// Constant first-order field `max(U0 h/2, nu)`.
pub fn linear_viscosity(spec: &ViscositySpec, mesh: Mesh) -> ElementField {
    debug_assert_eq!(spec.kind, ViscosityKind::Linear);
    ElementField::constant(mesh, (spec.u0_sup * mesh.h() / 2.0).max(spec.nu))
}

/// Jump quotient at node `i`: `|[du/dx]| / (2 {|du/dx|} + eps)`, with the
/// 0/0 case defined as zero when `eps = 0`.
fn jump_quotient(u: &NodalField, i: usize, epsilon: f64) -> f64 {
    let (jump, avg_abs) = u.slope_jump_and_avg(i);
    let denom = 2.0 * avg_abs + epsilon;
    if denom == 0.0 {
        0.0
    } else {
        jump.abs() / denom
    }
}

/// First-order coefficient on element `i`:
/// half the element sup norm times the worse of the two endpoint jump
/// quotients. The sup norm of a piecewise linear on an element is the
/// larger endpoint absolute value.
pub fn nu0_element(u: &NodalField, i: usize, epsilon: f64) -> f64 {
    let n = u.mesh().n_elems();
    let i = i % n;
    let sup = u.value(i).abs().max(u.value(i + 1).abs());
    let q = jump_quotient(u, i, epsilon).max(jump_quotient(u, (i + 1) % n, epsilon));
    0.5 * sup * q
}

/// Switch marking elements where the slope takes a positive local maximum:
/// strictly above the right neighbour, at least the left one, all three
/// positive. Comparisons are exact; the switch is discontinuous by design
/// and a tolerance would move which element receives `nu1`.
pub fn xi_indicator(u: &NodalField, i: usize) -> bool {
    let n = u.mesh().n_elems();
    let s = u.element_slope(i % n);
    let s_left = u.element_slope((i + n - 1) % n);
    let s_right = u.element_slope((i + 1) % n);
    s > 0.0 && s > s_right && s_right > 0.0 && s >= s_left && s_left > 0.0
}

/// Neighbour correction on element `i`; zero unless the switch is active.
pub fn nu1_element(u: &NodalField, i: usize, epsilon: f64, variant: Nu1Variant) -> f64 {
    if !xi_indicator(u, i) {
        return 0.0;
    }
    let n = u.mesh().n_elems();
    let i = i % n;
    let prev = (i + n - 1) % n;
    let next = (i + 1) % n;
    let nu0_prev = nu0_element(u, prev, epsilon);
    let nu0_next = nu0_element(u, next, epsilon);
    match variant {
        Nu1Variant::Simplified => nu0_prev.max(nu0_next),
        Nu1Variant::Ratio => {
            // the switch guarantees s > 0
            let s = u.element_slope(i);
            let r_prev = u.element_slope(prev) / s;
            let r_next = u.element_slope(next) / s;
            (nu0_prev * r_prev).max(nu0_next * r_next)
        }
    }
}

/// Full shock-capturing field: per element `max(nu, h (nu0 + nu1))`.
///
/// Single-pass evaluation sharing the slope array; agrees with the
/// per-element entry points to roundoff.
pub fn nonlinear_viscosity(u: &NodalField, spec: &ViscositySpec) -> ElementField {
    debug_assert_eq!(spec.kind, ViscosityKind::Nonlinear);
    let mesh = u.mesh();
    let n = mesh.n_elems();
    let h = mesh.h();
    let vals = u.values();

    let mut slopes = vec![0.0; n];
    for i in 0..n {
        slopes[i] = (vals[(i + 1) % n] - vals[i]) / h;
    }
    // jump quotient at node i uses the slopes left and right of the node
    let mut quot = vec![0.0; n];
    for i in 0..n {
        let left = slopes[(i + n - 1) % n];
        let right = slopes[i];
        let denom = left.abs() + right.abs() + spec.epsilon;
        quot[i] = if denom == 0.0 {
            0.0
        } else {
            (right - left).abs() / denom
        };
    }
    let mut nu0 = vec![0.0; n];
    for i in 0..n {
        let sup = vals[i].abs().max(vals[(i + 1) % n].abs());
        nu0[i] = 0.5 * sup * quot[i].max(quot[(i + 1) % n]);
    }

    let values = (0..n)
        .map(|i| {
            let s = slopes[i];
            let s_left = slopes[(i + n - 1) % n];
            let s_right = slopes[(i + 1) % n];
            let xi = s > 0.0 && s > s_right && s_right > 0.0 && s >= s_left && s_left > 0.0;
            let nu1 = if xi {
                let a = nu0[(i + n - 1) % n];
                let b = nu0[(i + 1) % n];
                match spec.nu1_variant {
                    Nu1Variant::Simplified => a.max(b),
                    Nu1Variant::Ratio => (a * s_left / s).max(b * s_right / s),
                }
            } else {
                0.0
            };
            spec.nu.max(h * (nu0[i] + nu1))
        })
        .collect();
    ElementField::new(mesh, values).expect("sizes match by construction")
}

/// Dispatch on the configured kind, refreshing the nonlinear field from the
/// current state.
pub fn viscosity_field(u: &NodalField, spec: &ViscositySpec) -> ElementField {
    match spec.kind {
        ViscosityKind::Linear => linear_viscosity(spec, u.mesh()),
        ViscosityKind::Nonlinear => nonlinear_viscosity(u, spec),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assembly::semidiscrete_rhs;
    use crate::mesh::Mesh;

    fn field(values: Vec<f64>) -> NodalField {
        let mesh = Mesh::new(values.len()).unwrap();
        NodalField::new(mesh, values).unwrap()
    }

    #[test]
    fn linear_viscosity_branches() {
        let mesh = Mesh::new(100).unwrap();
        let mut spec = ViscositySpec::linear(0.0);
        spec.u0_sup = 1.0;
        assert_eq!(linear_viscosity(&spec, mesh).value(7), 0.005);

        spec.nu = 0.1;
        assert_eq!(linear_viscosity(&spec, mesh).value(0), 0.1);

        spec.nu = 0.005;
        assert_eq!(linear_viscosity(&spec, mesh).value(3), 0.005);
    }

    #[test]
    fn nu0_hand_example() {
        let u = field(vec![0.0, 1.0, 0.0, 0.0]);
        // both endpoint quotients of element 0 evaluate to 1
        assert!((nu0_element(&u, 0, 0.0) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn nu0_at_local_maximum_is_half_sup() {
        // slopes +g, -g around the peak: |jump| = 2 {|slope|}
        let u = field(vec![0.0, 0.5, 1.0, 0.5, 0.0, 0.0]);
        let nu0 = nu0_element(&u, 2, 0.0);
        assert!((nu0 - 0.5).abs() < 1e-15, "{nu0}");
    }

    #[test]
    fn nu0_zero_on_straight_data() {
        // equal slopes through both endpoints of element 4
        let u = field(vec![0.0, 0.25, 0.5, 0.25, 0.0, -0.25, -0.5, -0.25]);
        assert_eq!(u.slope_jump_and_avg(4).0, 0.0);
        assert_eq!(u.slope_jump_and_avg(5).0, 0.0);
        assert_eq!(nu0_element(&u, 4, 0.0), 0.0);
    }

    #[test]
    fn nu0_constant_field_zero_quotient() {
        // 0/0 at every node is defined as 0
        let u = field(vec![2.0; 5]);
        for i in 0..5 {
            assert_eq!(nu0_element(&u, i, 0.0), 0.0);
        }
    }

    #[test]
    fn nu0_decreases_with_epsilon() {
        let u = field(vec![0.1, 0.9, 0.3, -0.2, 0.4]);
        for i in 0..5 {
            let a = nu0_element(&u, i, 0.0);
            let b = nu0_element(&u, i, 0.5);
            assert!(b <= a);
            if a > 0.0 {
                assert!(b < a);
            }
        }
    }

    #[test]
    fn xi_switch_cases() {
        // slopes (1, 2, 1): strict on the right, tie allowed on the left
        let mesh = Mesh::new(4).unwrap();
        let h = mesh.h();
        // build values giving slopes 1, 2, 1 on elements 0..3 (last wraps)
        let v0 = 0.0;
        let v1 = v0 + 1.0 * h;
        let v2 = v1 + 2.0 * h;
        let v3 = v2 + 1.0 * h;
        let u = NodalField::new(mesh, vec![v0, v1, v2, v3]).unwrap();
        assert!(xi_indicator(&u, 1));
        assert!(!xi_indicator(&u, 0));
        assert!(!xi_indicator(&u, 2));

        // right neighbour not positive
        let w = NodalField::new(mesh, vec![0.0, 0.1, 0.4, 0.3]).unwrap();
        assert!(w.element_slope(2) < 0.0);
        assert!(!xi_indicator(&w, 1));

        // ties: (2, 2, 1) activates, (1, 2, 2) does not
        let mk = |s: [f64; 3]| {
            let mesh = Mesh::new(4).unwrap();
            let h = mesh.h();
            let v1 = s[0] * h;
            let v2 = v1 + s[1] * h;
            let v3 = v2 + s[2] * h;
            NodalField::new(mesh, vec![0.0, v1, v2, v3]).unwrap()
        };
        assert!(xi_indicator(&mk([2.0, 2.0, 1.0]), 1));
        assert!(!xi_indicator(&mk([1.0, 2.0, 2.0]), 1));
    }

    #[test]
    fn nu1_hand_example() {
        // slopes (1, 2, 1) around element 1; check both variants against the
        // brute-force formula with the actual neighbour nu0 values
        let mesh = Mesh::new(5).unwrap();
        let h = mesh.h();
        let slopes = [1.0, 2.0, 1.0, 0.5];
        let mut vals = vec![0.0; 5];
        for i in 0..4 {
            vals[i + 1] = vals[i] + slopes[i] * h;
        }
        let u = NodalField::new(mesh, vals).unwrap();
        assert!(xi_indicator(&u, 1));

        let nu0_prev = nu0_element(&u, 0, 0.0);
        let nu0_next = nu0_element(&u, 2, 0.0);
        let ratio = nu1_element(&u, 1, 0.0, Nu1Variant::Ratio);
        let simpl = nu1_element(&u, 1, 0.0, Nu1Variant::Simplified);
        assert!((ratio - (nu0_prev * 0.5).max(nu0_next * 0.5)).abs() < 1e-15);
        assert!((simpl - nu0_prev.max(nu0_next)).abs() < 1e-15);
        assert!(ratio <= simpl);

        // inactive switch or zero neighbours give zero
        assert_eq!(nu1_element(&u, 0, 0.0, Nu1Variant::Ratio), 0.0);
    }

    #[test]
    fn nonlinear_floor_is_nu() {
        let u = field(vec![0.7; 6]);
        let spec = ViscositySpec::nonlinear(0.01, 0.0);
        let nu_hat = nonlinear_viscosity(&u, &spec);
        for v in nu_hat.values() {
            assert_eq!(*v, 0.01);
        }
    }

    #[test]
    fn nonlinear_at_local_max_has_first_order_floor() {
        let u = field(vec![0.0, 0.5, 1.0, 0.5, 0.0, 0.0]);
        let spec = ViscositySpec::nonlinear(0.0, 0.0);
        let nu_hat = nonlinear_viscosity(&u, &spec);
        let h = u.mesh().h();
        // element 2 holds the peak: nu0 = sup/2 there
        assert!(nu_hat.value(2) >= h * 0.5 - 1e-15);
    }

    #[test]
    fn rhs_sign_at_local_max_linear_viscosity() {
        // the lumped equation must push a local maximum down
        let u = field(vec![0.2, 0.9, 0.3, -0.1, 0.0, 0.1]);
        let mut spec = ViscositySpec::linear(0.0);
        spec.u0_sup = u.max_abs();
        let nu_hat = linear_viscosity(&spec, u.mesh());
        let rhs = semidiscrete_rhs(&u, &nu_hat);
        assert!(rhs.value(1) <= 0.0, "local max must not grow: {}", rhs.value(1));
    }

    #[test]
    fn rhs_sign_at_local_max_nonlinear_viscosity() {
        let u = field(vec![0.2, 0.9, 0.3, -0.1, 0.0, 0.1]);
        let spec = ViscositySpec::nonlinear(0.0, 0.0);
        let nu_hat = nonlinear_viscosity(&u, &spec);
        let rhs = semidiscrete_rhs(&u, &nu_hat);
        assert!(rhs.value(1) <= 0.0);
    }

    #[test]
    fn field_path_matches_per_element_entry_points() {
        let mut state = 0x1357u64;
        let mut next = move || {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            ((state >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
        };
        for trial in 0..50 {
            let n = 5 + trial % 9;
            let mesh = Mesh::new(n).unwrap();
            let u = NodalField::new(mesh, (0..n).map(|_| next()).collect()).unwrap();
            for (eps, variant) in [
                (0.0, Nu1Variant::Ratio),
                (0.1, Nu1Variant::Ratio),
                (0.0, Nu1Variant::Simplified),
            ] {
                let mut spec = ViscositySpec::nonlinear(0.003, eps).with_variant(variant);
                spec.u0_sup = u.max_abs();
                let field = nonlinear_viscosity(&u, &spec);
                for i in 0..n {
                    let expect = spec.nu.max(
                        mesh.h() * (nu0_element(&u, i, eps) + nu1_element(&u, i, eps, variant)),
                    );
                    assert!(
                        (field.value(i) - expect).abs() < 1e-15,
                        "trial {trial} element {i}"
                    );
                }
            }
        }
    }

    #[test]
    fn smooth_part_scaling_under_refinement() {
        // max nu_hat away from the sine extrema; the extremal elements keep
        // first-order viscosity and are excluded
        let spec = ViscositySpec::nonlinear(0.0, 0.0);
        let mut max_away = Vec::new();
        for n in [200usize, 400, 800] {
            let mesh = Mesh::new(n).unwrap();
            let u = NodalField::interpolate(mesh, |x| (2.0 * std::f64::consts::PI * x).sin());
            let nu_hat = nonlinear_viscosity(&u, &spec);
            let mut m: f64 = 0.0;
            for i in 0..n {
                let mid = (i as f64 + 0.5) * mesh.h();
                let d = (mid - 0.25).abs().min((mid - 0.75).abs());
                if d > 1.0 / 16.0 {
                    m = m.max(nu_hat.value(i));
                }
            }
            max_away.push(m);
        }
        for k in 1..max_away.len() {
            let p = (max_away[k - 1] / max_away[k]).log2();
            assert!((1.3..=2.1).contains(&p), "observed exponent {p}");
        }
    }
}
