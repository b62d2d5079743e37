//! Post-processing: error norms against a fine reference, convergence
//! rates, the constants entering the bounds, the a posteriori estimator
//! term by term, and the monotonicity invariant report.

use crate::assembly::{convection_term, mass_solve};
use crate::cases::InitialData;
use crate::error::{Error, Result};
use crate::filter::inject_to_fine;
use crate::mesh::{Mesh, NodalField};
use crate::solver::Trajectory;
use crate::viscosity::viscosity_field;

/// The two constants entering every bound: `U0 = sup |pi_h u0|` and
/// `D0 = sup (u0' + (pi_h u0)')/2`.
#[derive(Debug, Clone, Copy)]
pub struct Constants {
    pub u0_sup: f64,
    pub d0: f64,
}

/// `U0` from the nodal values of the projection (a piecewise linear attains
/// its sup at nodes); `D0` from 16 samples per element of the averaged
/// slope, with the analytic derivative when the case provides one.
pub fn compute_constants(u0: &InitialData, mesh: Mesh) -> Result<Constants> {
    let proj = crate::assembly::l2_project(|x| u0.value(x), mesh)?;
    let u0_sup = proj.max_abs();

    let n = mesh.n_elems();
    let h = mesh.h();
    let mut d0 = f64::NEG_INFINITY;
    for e in 0..n {
        let slope = proj.element_slope(e);
        let x_left = mesh.node(e);
        for k in 0..=16 {
            let x = x_left + h * k as f64 / 16.0;
            d0 = d0.max(0.5 * (u0.derivative(x) + slope));
        }
    }
    Ok(Constants { u0_sup, d0 })
}

/// One row of a convergence table.
#[derive(Debug, Clone, Copy)]
pub struct ErrorReport {
    pub n_elems: usize,
    pub l1: f64,
    pub l2: f64,
    /// filtered error with delta = 1
    pub delta1: f64,
    /// filtered error with delta = coarse h (or the configured second width)
    pub delta_h: f64,
    pub l1_rate: Option<f64>,
    pub l2_rate: Option<f64>,
    pub delta1_rate: Option<f64>,
    pub delta_h_rate: Option<f64>,
}

impl ErrorReport {
    pub fn new(n_elems: usize, l1: f64, l2: f64, delta1: f64, delta_h: f64) -> Self {
        Self {
            n_elems,
            l1,
            l2,
            delta1,
            delta_h,
            l1_rate: None,
            l2_rate: None,
            delta1_rate: None,
            delta_h_rate: None,
        }
    }
}

/// Exact L1 integral of a piecewise linear from its nodal values.
fn l1_of_pw_linear(u: &NodalField) -> f64 {
    let n = u.mesh().n_elems();
    let h = u.mesh().h();
    let mut acc = 0.0;
    for i in 0..n {
        let a = u.value(i);
        let b = u.value(i + 1);
        acc += if a * b >= 0.0 {
            0.5 * h * (a.abs() + b.abs())
        } else {
            // the linear changes sign inside: two triangles
            0.5 * h * (a * a + b * b) / (a.abs() + b.abs())
        };
    }
    acc
}

/// L1 and L2 errors of a coarse solution against a fine reference,
/// evaluated exactly for the piecewise-linear difference at fine nodes.
pub fn error_norms(u_h: &NodalField, u_ref: &NodalField) -> Result<(f64, f64)> {
    let mut e = u_ref.clone();
    let injected = inject_to_fine(u_h, u_ref.mesh())?;
    e.axpy(-1.0, &injected);
    Ok((l1_of_pw_linear(&e), e.l2_norm()))
}

/// Fill `log2(err_{k-1}/err_k)` rates into consecutive rows. Requires the
/// resolutions to double row to row; a zero denominator leaves the rate
/// absent.
pub fn convergence_rates(reports: &mut [ErrorReport]) -> Result<()> {
    for k in 1..reports.len() {
        if reports[k].n_elems != 2 * reports[k - 1].n_elems {
            return Err(Error::InvalidInput(format!(
                "resolutions must double: {} after {}",
                reports[k].n_elems,
                reports[k - 1].n_elems
            )));
        }
        let rate = |prev: f64, cur: f64| (cur > 0.0).then(|| (prev / cur).log2());
        reports[k].l1_rate = rate(reports[k - 1].l1, reports[k].l1);
        reports[k].l2_rate = rate(reports[k - 1].l2, reports[k].l2);
        reports[k].delta1_rate = rate(reports[k - 1].delta1, reports[k].delta1);
        reports[k].delta_h_rate = rate(reports[k - 1].delta_h, reports[k].delta_h);
    }
    Ok(())
}

/// The a posteriori bound split into its terms. `total` is
/// `prefactor * (sum of the five terms)`.
#[derive(Debug, Clone, Copy)]
pub struct EstimatorBreakdown {
    /// `h^{1/2} ||e(0)||`
    pub term_initial: f64,
    /// `h^{1/2} int ||v_h + u_h du_h/dx|| dt` with `v_h` the negated L2
    /// projection of the convective flux
    pub term_residual: f64,
    /// `h^{3/2} int ||d/dx d/dt u_h|| dt`
    pub term_dtgrad: f64,
    /// `int ||max(0, nu_hat - nu)^{1/2} du_h/dx|| dt`
    pub term_artvisc: f64,
    /// `h (int nu ||[du_h/dx]||_N^2 dt)^{1/2}`
    pub term_jump: f64,
    /// `exp(D0 T) (h / delta^2)^{1/2}`
    pub prefactor: f64,
    pub total: f64,
    /// `U0^{1/2}`: the extra factor the proof carries on the artificial
    /// viscosity term; reported alongside, not folded into `total`.
    pub u0_sqrt: f64,
    /// `h int ||[u_h du_h/dx]||_N dt`: the jump-based upper bound on the
    /// residual infimum, for comparison with `term_residual`.
    pub residual_jump_bound: f64,
}

/// L2 norm of the difference between the convective flux `u du/dx` and its
/// consistent-mass L2 projection; exact 3-point Gauss per element (the
/// integrand is polynomial of degree 4).
fn residual_norm(u: &NodalField) -> Result<f64> {
    const GAUSS3: [(f64, f64); 3] = [
        (0.112_701_665_379_258_3, 0.277_777_777_777_777_8),
        (0.5, 0.444_444_444_444_444_4),
        (0.887_298_334_620_741_7, 0.277_777_777_777_777_8),
    ];
    let mesh = u.mesh();
    let n = mesh.n_elems();
    let h = mesh.h();
    let b: Vec<f64> = (0..n).map(|i| convection_term(u, i)).collect();
    let proj = mass_solve(mesh, &b)?;

    let mut acc = 0.0;
    for e in 0..n {
        let s = u.element_slope(e);
        let u_l = u.value(e);
        let p_l = proj.value(e);
        let p_r = proj.value(e + 1);
        for (q, w) in GAUSS3 {
            let flux = (u_l + s * q * h) * s;
            let p = (1.0 - q) * p_l + q * p_r;
            let d = flux - p;
            acc += d * d * w * h;
        }
    }
    Ok(acc.sqrt())
}

/// `||max(0, nu_hat - nu)^{1/2} du/dx||` for the state's refreshed
/// viscosity field.
fn artvisc_norm(u: &NodalField, spec: &crate::viscosity::ViscositySpec, nu: f64) -> f64 {
    let nu_hat = viscosity_field(u, spec);
    let h = u.mesh().h();
    let mut acc = 0.0;
    for e in 0..u.mesh().n_elems() {
        let s = u.element_slope(e);
        acc += (nu_hat.value(e) - nu).max(0.0) * s * s * h;
    }
    acc.sqrt()
}

/// `sum_i [du/dx]_i^2` over nodes.
fn slope_jump_sq(u: &NodalField) -> f64 {
    (0..u.mesh().n_elems())
        .map(|i| {
            let (j, _) = u.slope_jump_and_avg(i);
            j * j
        })
        .sum()
}

/// `(sum_i (u(x_i) [du/dx]_i)^2)^{1/2}`, the nodal jump norm of the
/// convective flux.
fn flux_jump_norm(u: &NodalField) -> f64 {
    (0..u.mesh().n_elems())
        .map(|i| {
            let (j, _) = u.slope_jump_and_avg(i);
            let f = u.value(i) * j;
            f * f
        })
        .sum::<f64>()
        .sqrt()
}

/// Evaluate the a posteriori bound from a recorded trajectory. States are
/// reconstructed from the stored time increments; time integrals use the
/// trapezoid rule over all steps (the increment term, piecewise constant in
/// time, is integrated exactly).
pub fn aposteriori_estimate(
    traj: &Trajectory,
    u_ref_initial: &NodalField,
    constants: &Constants,
    delta: f64,
    nu: f64,
) -> Result<EstimatorBreakdown> {
    let increments = traj.time_increments.as_ref().ok_or(Error::MissingIncrements)?;
    let mesh = traj.mesh;
    let h = mesh.h();
    let t_final = traj.final_time();

    // ||e(0)|| on the fine reference mesh
    let mut e0 = u_ref_initial.clone();
    e0.axpy(-1.0, &inject_to_fine(traj.initial_state(), u_ref_initial.mesh())?);
    let term_initial = h.sqrt() * e0.l2_norm();

    // trapezoid accumulators over the step sequence
    let mut int_residual = 0.0;
    let mut int_artvisc = 0.0;
    let mut int_jump_sq = 0.0;
    let mut int_dtgrad = 0.0;
    let mut int_flux_jump = 0.0;

    let mut u = traj.initial_state().clone();
    let mut prev_res = residual_norm(&u)?;
    let mut prev_art = artvisc_norm(&u, &traj.viscosity, nu);
    let mut prev_jsq = slope_jump_sq(&u);
    let mut prev_fj = flux_jump_norm(&u);

    for (n, inc) in increments.iter().enumerate() {
        let dt = traj.times[n + 1] - traj.times[n];
        int_dtgrad += dt * inc.grad_l2_norm();
        u.axpy(dt, inc);

        let res = residual_norm(&u)?;
        let art = artvisc_norm(&u, &traj.viscosity, nu);
        let jsq = slope_jump_sq(&u);
        let fj = flux_jump_norm(&u);
        int_residual += 0.5 * dt * (prev_res + res);
        int_artvisc += 0.5 * dt * (prev_art + art);
        int_jump_sq += 0.5 * dt * (prev_jsq + jsq);
        int_flux_jump += 0.5 * dt * (prev_fj + fj);
        prev_res = res;
        prev_art = art;
        prev_jsq = jsq;
        prev_fj = fj;
    }

    let term_residual = h.sqrt() * int_residual;
    let term_dtgrad = h.powf(1.5) * int_dtgrad;
    let term_artvisc = int_artvisc;
    let term_jump = h * (nu * int_jump_sq).sqrt();
    let prefactor = (constants.d0 * t_final).exp() * (h / (delta * delta)).sqrt();
    let total =
        prefactor * (term_initial + term_residual + term_dtgrad + term_artvisc + term_jump);

    Ok(EstimatorBreakdown {
        term_initial,
        term_residual,
        term_dtgrad,
        term_artvisc,
        term_jump,
        prefactor,
        total,
        u0_sqrt: constants.u0_sup.sqrt(),
        residual_jump_bound: h * int_flux_jump,
    })
}

/// Outcome of one monotonicity check. `margin` is the worst observed
/// distance to the bound (negative means violated); checks that do not
/// apply to the run's configuration are reported but not counted.
#[derive(Debug, Clone)]
pub struct CheckResult {
    pub name: String,
    pub applicable: bool,
    pub passed: bool,
    pub worst_margin: f64,
    pub worst_step: usize,
    pub note: Option<String>,
}

#[derive(Debug, Clone)]
pub struct InvariantReport {
    pub checks: Vec<CheckResult>,
    pub all_passed: bool,
}

/// NaN-safe "value within bound": a non-finite value counts as a violation.
fn margin(bound: f64, value: f64) -> f64 {
    if value.is_finite() {
        bound - value
    } else {
        f64::NEG_INFINITY
    }
}

/// Check the recorded diagnostics against the maximum principle, slope and
/// total-variation monotonicity, and the energy bounds, with the stated
/// slacks. `epsilon` is the regularization the run used: zero activates the
/// sharp bounds, positive the perturbed ones (skipped when eps T >= 1).
pub fn invariant_report(traj: &Trajectory, constants: &Constants, epsilon: f64) -> InvariantReport {
    let u0_sup = constants.u0_sup;
    let t_final = traj.final_time();
    let rows = &traj.diagnostics;
    let mut checks = Vec::new();

    let mut push = |name: &str,
                    applicable: bool,
                    worst: (f64, usize),
                    note: Option<String>,
                    checks: &mut Vec<CheckResult>| {
        checks.push(CheckResult {
            name: name.to_string(),
            applicable,
            passed: !applicable || worst.0 >= 0.0,
            worst_margin: worst.0,
            worst_step: worst.1,
            note,
        });
    };

    let fold_worst = |it: &mut dyn Iterator<Item = (f64, usize)>| -> (f64, usize) {
        it.fold((f64::INFINITY, 0), |acc, x| if x.0 < acc.0 { x } else { acc })
    };

    if epsilon == 0.0 {
        // sup bound: max |u_h| <= U0 (1 + 1e-10) at every step
        let worst = fold_worst(
            &mut rows
                .iter()
                .enumerate()
                .map(|(n, r)| (margin(u0_sup * (1.0 + 1e-10), r.max_abs_u), n)),
        );
        push("max_abs_bound", true, worst, None, &mut checks);

        // max slope non-increasing step to step within relative slack
        let worst = fold_worst(&mut (1..rows.len()).map(|n| {
            let prev = rows[n - 1].max_slope;
            let bound = prev + 1e-8 * prev.abs().max(1.0);
            (margin(bound, rows[n].max_slope), n)
        }));
        push("max_slope_monotone", true, worst, None, &mut checks);
    } else {
        let eps_t = epsilon * t_final;
        let applicable = eps_t < 1.0;
        let note = (!applicable).then(|| {
            format!("eps*T = {eps_t:.3} >= 1: perturbed bounds do not apply; checks skipped")
        });

        // max |u_h(t)| <= (1 + eps t) U0, in particular (1 + eps T) U0 at T
        let worst = if applicable {
            fold_worst(&mut rows.iter().enumerate().map(|(n, r)| {
                let bound = (1.0 + epsilon * r.t) * u0_sup + 1e-8;
                (margin(bound, r.max_abs_u), n)
            }))
        } else {
            (f64::INFINITY, 0)
        };
        push("max_abs_bound_eps", applicable, worst, note.clone(), &mut checks);

        // max slope <= initial max slope + U0 (1 + eps T) eps T
        let worst = if applicable {
            let allowance = u0_sup * (1.0 + eps_t) * eps_t;
            let initial = rows[0].max_slope;
            fold_worst(&mut rows.iter().enumerate().map(|(n, r)| {
                (margin(initial + allowance + 1e-8, r.max_slope), n)
            }))
        } else {
            (f64::INFINITY, 0)
        };
        push("max_slope_bound_eps", applicable, worst, note, &mut checks);
    }

    // total variation non-increasing
    let worst = fold_worst(&mut (1..rows.len()).map(|n| {
        (
            margin(rows[n - 1].total_variation + 1e-8, rows[n].total_variation),
            n,
        )
    }));
    push("tv_monotone", true, worst, None, &mut checks);

    // per-step energy growth bounded by the time-discretization slack
    let worst = fold_worst(&mut (1..rows.len()).map(|n| {
        let dt = rows[n].dt;
        let bound = rows[n - 1].lumped_energy * (1.0 + 10.0 * dt * dt);
        (margin(bound, rows[n].lumped_energy), n)
    }));
    push("energy_per_step", true, worst, None, &mut checks);

    // net energy decay over the whole run
    let first = rows.first().map(|r| r.lumped_energy).unwrap_or(0.0);
    let last = rows.last().map(|r| r.lumped_energy).unwrap_or(0.0);
    push(
        "energy_overall",
        true,
        (margin(first, last), rows.len().saturating_sub(1)),
        None,
        &mut checks,
    );

    let all_passed = checks.iter().all(|c| c.passed);
    InvariantReport { checks, all_passed }
}
