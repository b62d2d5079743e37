//! Explicit time stepping of the semidiscrete system: SSP-RK2 stages with
//! the viscosity refreshed from each stage state, CFL-limited steps clipped
//! to land exactly on the final time, and per-step diagnostics recording.

use crate::assembly::{l2_project, semidiscrete_rhs};
use crate::error::{Error, Result};
use crate::mesh::{Mesh, NodalField};
use crate::viscosity::{viscosity_field, ViscositySpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitialProjection {
    /// Consistent-mass L2 projection of the initial data (the default).
    ConsistentL2,
    /// Pointwise nodal interpolant.
    NodalInterpolant,
}

#[derive(Debug, Clone, Copy)]
pub struct SolverConfig {
    pub mesh: Mesh,
    pub viscosity: ViscositySpec,
    pub t_final: f64,
    /// CFL number; the supported range is (0, 1]. Larger values are accepted
    /// so instability experiments can run, but they void every bound.
    pub cfl: f64,
    pub initial_projection: InitialProjection,
    /// Snapshot stride: keep every `record_every`-th state (plus first and
    /// last). 0 keeps only first and last.
    pub record_every: usize,
    /// Store the per-step difference quotients `(u^{n+1} - u^n)/dt` needed
    /// by the a posteriori estimator. Off for very fine reference solves
    /// where the memory would be wasted.
    pub record_increments: bool,
}

impl SolverConfig {
    pub fn new(mesh: Mesh, viscosity: ViscositySpec, t_final: f64) -> Self {
        Self {
            mesh,
            viscosity,
            t_final,
            cfl: 0.25,
            initial_projection: InitialProjection::ConsistentL2,
            record_every: 0,
            record_increments: true,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.t_final > 0.0) {
            return Err(Error::InvalidInput(format!(
                "t_final must be positive, got {}",
                self.t_final
            )));
        }
        if !(self.cfl > 0.0) {
            return Err(Error::InvalidInput(format!(
                "cfl must be positive, got {}",
                self.cfl
            )));
        }
        Ok(())
    }
}

/// Scalar diagnostics for the state at one recorded time. `dt` is the step
/// that arrived here (0 for the initial row).
#[derive(Debug, Clone, Copy)]
pub struct StepDiagnostics {
    pub t: f64,
    pub dt: f64,
    pub max_abs_u: f64,
    pub max_slope: f64,
    pub total_variation: f64,
    pub lumped_energy: f64,
}

#[derive(Debug, Clone)]
pub struct Snapshot {
    /// Step index (0 = initial state).
    pub step: usize,
    pub state: NodalField,
}

/// Record of a solve: step times, per-step diagnostics, strided state
/// snapshots, and optionally the difference quotients for the estimator.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub mesh: Mesh,
    /// The effective viscosity spec with `u0_sup` computed from the initial
    /// state.
    pub viscosity: ViscositySpec,
    /// Times t_0 = 0 .. t_M = T, one per step boundary.
    pub times: Vec<f64>,
    /// One row per entry of `times`.
    pub diagnostics: Vec<StepDiagnostics>,
    pub states: Vec<Snapshot>,
    /// `time_increments[n] = (u^{n+1} - u^n) / dt_n`, length M.
    pub time_increments: Option<Vec<NodalField>>,
}

impl Trajectory {
    pub fn initial_state(&self) -> &NodalField {
        &self
            .states
            .first()
            .expect("trajectory always has the initial state")
            .state
    }

    pub fn final_state(&self) -> &NodalField {
        &self
            .states
            .last()
            .expect("trajectory always has a final state")
            .state
    }

    pub fn n_steps(&self) -> usize {
        self.times.len() - 1
    }

    pub fn final_time(&self) -> f64 {
        *self.times.last().unwrap()
    }
}

/// Solve failure carrying the partial trajectory up to the failing step.
#[derive(Debug)]
pub struct SolveError {
    pub partial: Trajectory,
    pub kind: Error,
}

impl std::fmt::Display for SolveError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "solve aborted at t = {:.6} after {} steps: {}",
            self.partial.final_time(),
            self.partial.n_steps(),
            self.kind
        )
    }
}

impl std::error::Error for SolveError {}

/// CFL-limited step: the smaller of the convective bound `h / (2 max|u|)`
/// and the diffusive bound `h^2 / (2 max nu_hat)`, scaled by `cfl`. Floors
/// keep the result finite for degenerate states.
pub fn cfl_dt(u: &NodalField, nu_hat: &crate::mesh::ElementField, cfl: f64) -> f64 {
    let h = u.mesh().h();
    let umax = u.max_abs().max(1e-14);
    let numax = nu_hat.max().max(1e-14);
    cfl * (h / (2.0 * umax)).min(h * h / (2.0 * numax))
}

fn euler_stage(u: &NodalField, spec: &ViscositySpec, dt: f64) -> NodalField {
    let nu_hat = viscosity_field(u, spec);
    let rhs = semidiscrete_rhs(u, &nu_hat);
    let mut next = u.clone();
    next.axpy(dt, &rhs);
    next
}

fn first_non_finite(u: &NodalField) -> Option<usize> {
    u.values().iter().position(|v| !v.is_finite())
}

/// One two-stage SSP-RK step (Heun). Both stages are forward-Euler steps
/// with the viscosity recomputed from the stage state; the result is their
/// convex average, which is what lets the stagewise maximum-principle
/// arguments carry over.
pub fn step_ssprk2(u: &NodalField, spec: &ViscositySpec, dt: f64) -> Result<NodalField> {
    let u1 = euler_stage(u, spec, dt);
    let u2 = euler_stage(&u1, spec, dt);
    let mut next = u.clone();
    for (v, w) in next.values_mut().iter_mut().zip(u2.values().iter()) {
        *v = 0.5 * (*v + *w);
    }
    if let Some(node) = first_non_finite(&next) {
        return Err(Error::NonFiniteState { node, time: f64::NAN });
    }
    Ok(next)
}

fn diagnostics_row(u: &NodalField, t: f64, dt: f64) -> StepDiagnostics {
    StepDiagnostics {
        t,
        dt,
        max_abs_u: u.max_abs(),
        max_slope: u.max_slope(),
        total_variation: u.total_variation(),
        lumped_energy: u.lumped_norm(),
    }
}

/// Advance the semidiscrete system from `u0` to `t_final`.
///
/// The initial state is the L2 projection or nodal interpolant of `u0`
/// per the config; `u0_sup` for the viscosity and the maximum-principle
/// checks is the sup norm of that initial state. The last step is clipped
/// to land exactly on `t_final`.
pub fn solve(
    config: &SolverConfig,
    u0: impl Fn(f64) -> f64,
) -> std::result::Result<Trajectory, Box<SolveError>> {
    let build_input_err = |e: Error| {
        Box::new(SolveError {
            partial: Trajectory {
                mesh: config.mesh,
                viscosity: config.viscosity,
                times: vec![0.0],
                diagnostics: vec![],
                states: vec![Snapshot {
                    step: 0,
                    state: NodalField::zeros(config.mesh),
                }],
                time_increments: None,
            },
            kind: e,
        })
    };
    config.validate().map_err(&build_input_err)?;

    let mesh = config.mesh;
    let initial = match config.initial_projection {
        InitialProjection::ConsistentL2 => l2_project(&u0, mesh).map_err(&build_input_err)?,
        InitialProjection::NodalInterpolant => NodalField::interpolate(mesh, &u0),
    };

    let mut spec = config.viscosity;
    spec.u0_sup = initial.max_abs();

    let mut traj = Trajectory {
        mesh,
        viscosity: spec,
        times: vec![0.0],
        diagnostics: vec![diagnostics_row(&initial, 0.0, 0.0)],
        states: vec![Snapshot {
            step: 0,
            state: initial.clone(),
        }],
        time_increments: if config.record_increments {
            Some(Vec::new())
        } else {
            None
        },
    };

    let mut u = initial;
    let mut t = 0.0;
    let mut step_index = 0usize;
    while t < config.t_final {
        let nu_hat = viscosity_field(&u, &spec);
        let mut dt = cfl_dt(&u, &nu_hat, config.cfl);
        if t + dt >= config.t_final {
            dt = config.t_final - t;
        }

        let next = match step_ssprk2(&u, &spec, dt) {
            Ok(next) => next,
            Err(kind) => {
                // keep the last healthy state in the partial record
                if traj.states.last().map(|s| s.step) != Some(step_index) {
                    traj.states.push(Snapshot {
                        step: step_index,
                        state: u.clone(),
                    });
                }
                let kind = match kind {
                    Error::NonFiniteState { node, .. } => Error::NonFiniteState { node, time: t },
                    other => other,
                };
                return Err(Box::new(SolveError { partial: traj, kind }));
            }
        };

        if let Some(incs) = traj.time_increments.as_mut() {
            let mut inc = next.clone();
            inc.axpy(-1.0, &u);
            for v in inc.values_mut() {
                *v /= dt;
            }
            incs.push(inc);
        }

        t += dt;
        step_index += 1;
        u = next;
        traj.times.push(t);
        traj.diagnostics.push(diagnostics_row(&u, t, dt));

        let at_end = t >= config.t_final;
        if at_end || (config.record_every > 0 && step_index % config.record_every == 0) {
            traj.states.push(Snapshot {
                step: step_index,
                state: u.clone(),
            });
        }
    }

    Ok(traj)
}
