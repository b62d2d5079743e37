//! Experiment harness shared by the command-line driver, the browser demo
//! and the acceptance tests: configured solves, error evaluation against
//! the exact reference, convergence studies, and the invariant suite.

use crate::analysis::{
    aposteriori_estimate, compute_constants, convergence_rates, error_norms, invariant_report,
    Constants, ErrorReport, EstimatorBreakdown, InvariantReport,
};
use crate::cases::Case;
use crate::error::{Error, Result};
use crate::filter::{filtered_error, FilterSpec, HelmholtzFilter};
use crate::mesh::Mesh;
use crate::solver::{solve, InitialProjection, SolveError, SolverConfig, Trajectory};
use crate::viscosity::{Nu1Variant, ViscosityKind, ViscositySpec};

/// The regularization parameter as configured: zero, tied to the mesh
/// width, or a literal value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EpsSpec {
    Zero,
    MeshH,
    Value(f64),
}

impl EpsSpec {
    pub fn resolve(&self, mesh: Mesh) -> f64 {
        match *self {
            EpsSpec::Zero => 0.0,
            EpsSpec::MeshH => mesh.h(),
            EpsSpec::Value(v) => v,
        }
    }

    pub fn label(&self) -> String {
        match self {
            EpsSpec::Zero => "0".into(),
            EpsSpec::MeshH => "h".into(),
            EpsSpec::Value(v) => format!("{v}"),
        }
    }
}

/// A filter width as configured: a literal value or the coarse mesh width.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DeltaSpec {
    Value(f64),
    MeshH,
}

impl DeltaSpec {
    pub fn resolve(&self, mesh: Mesh) -> f64 {
        match *self {
            DeltaSpec::Value(v) => v,
            DeltaSpec::MeshH => mesh.h(),
        }
    }
}

/// Everything needed to run one solve apart from the resolution.
#[derive(Debug, Clone, Copy)]
pub struct RunParams {
    pub viscosity_kind: ViscosityKind,
    pub eps: EpsSpec,
    pub nu: f64,
    pub t_final: f64,
    pub cfl: f64,
    pub nu1_variant: Nu1Variant,
    pub init_proj: InitialProjection,
    /// Snapshot stride for run artifacts; 0 keeps only first and last.
    pub record_every: usize,
    pub record_increments: bool,
}

impl RunParams {
    pub fn new(viscosity_kind: ViscosityKind, eps: EpsSpec, t_final: f64) -> Self {
        Self {
            viscosity_kind,
            eps,
            nu: 0.0,
            t_final,
            cfl: 0.25,
            nu1_variant: Nu1Variant::Ratio,
            init_proj: InitialProjection::ConsistentL2,
            record_every: 0,
            record_increments: true,
        }
    }

    pub fn solver_config(&self, mesh: Mesh) -> SolverConfig {
        let epsilon = self.eps.resolve(mesh);
        let spec = ViscositySpec {
            kind: self.viscosity_kind,
            nu: self.nu,
            epsilon,
            nu1_variant: self.nu1_variant,
            u0_sup: 1.0, // recomputed by the solver from the initial state
        };
        SolverConfig {
            mesh,
            viscosity: spec,
            t_final: self.t_final,
            cfl: self.cfl,
            initial_projection: self.init_proj,
            record_every: self.record_every,
            record_increments: self.record_increments,
        }
    }
}

/// Run one case at one resolution.
pub fn solve_case(
    case: &Case,
    n: usize,
    params: &RunParams,
) -> std::result::Result<Trajectory, Box<SolveError>> {
    let mesh = Mesh::new(n).map_err(|e| {
        Box::new(SolveError {
            partial: empty_trajectory(params),
            kind: e,
        })
    })?;
    let config = params.solver_config(mesh);
    let u0 = case.initial();
    solve(&config, move |x| u0.value(x))
}

fn empty_trajectory(params: &RunParams) -> Trajectory {
    let mesh = Mesh::new(3).unwrap();
    let config = params.solver_config(mesh);
    Trajectory {
        mesh,
        viscosity: config.viscosity,
        times: vec![0.0],
        diagnostics: vec![],
        states: vec![crate::solver::Snapshot {
            step: 0,
            state: crate::mesh::NodalField::zeros(mesh),
        }],
        time_increments: None,
    }
}

/// Errors of a finished run against the case's exact reference: plain L1
/// and L2 plus the two filtered norms, all measured on the `ref_n` mesh.
pub fn evaluate_errors(
    traj: &Trajectory,
    case: &Case,
    ref_n: usize,
    delta_a: DeltaSpec,
    delta_b: DeltaSpec,
) -> Result<ErrorReport> {
    let fine = Mesh::new(ref_n)?;
    if ref_n % traj.mesh.n_elems() != 0 {
        return Err(Error::MeshMismatch {
            coarse: traj.mesh.n_elems(),
            fine: ref_n,
        });
    }
    let u_ref = case.reference(traj.final_time(), fine)?;
    let u_h = traj.final_state();
    let (l1, l2) = error_norms(u_h, &u_ref)?;

    let da = delta_a.resolve(traj.mesh);
    let db = delta_b.resolve(traj.mesh);
    let fa = HelmholtzFilter::new(FilterSpec::new(da, fine)?);
    let d1 = filtered_error(&u_ref, u_h, &fa)?;
    let fb = HelmholtzFilter::new(FilterSpec::new(db, fine)?);
    let dh = filtered_error(&u_ref, u_h, &fb)?;

    Ok(ErrorReport::new(traj.mesh.n_elems(), l1, l2, d1, dh))
}

/// Convergence study over a doubling resolution list. The per-resolution
/// solves run concurrently; rows come back ordered by resolution.
pub fn convergence_study(
    case: &Case,
    n_list: &[usize],
    ref_n: usize,
    params: &RunParams,
    delta_a: DeltaSpec,
    delta_b: DeltaSpec,
) -> Result<Vec<ErrorReport>> {
    if n_list.is_empty() {
        return Err(Error::InvalidInput("empty resolution list".into()));
    }
    for w in n_list.windows(2) {
        if w[1] != 2 * w[0] {
            return Err(Error::InvalidInput(format!(
                "resolution list must double at each step, got {} after {}",
                w[1], w[0]
            )));
        }
    }

    let results: Vec<Result<ErrorReport>> = std::thread::scope(|scope| {
        let handles: Vec<_> = n_list
            .iter()
            .map(|&n| {
                scope.spawn(move || -> Result<ErrorReport> {
                    let traj = solve_case(case, n, params)
                        .map_err(|e| Error::SolverFailure(e.to_string()))?;
                    evaluate_errors(&traj, case, ref_n, delta_a, delta_b)
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("solver thread panicked")).collect()
    });

    let mut rows = results.into_iter().collect::<Result<Vec<_>>>()?;
    rows.sort_by_key(|r| r.n_elems);
    convergence_rates(&mut rows)?;
    Ok(rows)
}

/// Artifacts of a single run: the trajectory, its error report and the
/// estimator breakdown (with `delta = 1`).
pub struct SingleRun {
    pub trajectory: Trajectory,
    pub errors: ErrorReport,
    pub estimator: EstimatorBreakdown,
    pub constants: Constants,
}

pub fn single_run(
    case: &Case,
    n: usize,
    ref_n: usize,
    params: &RunParams,
    delta_a: DeltaSpec,
    delta_b: DeltaSpec,
) -> Result<SingleRun> {
    let traj = solve_case(case, n, params).map_err(|e| Error::SolverFailure(e.to_string()))?;
    let errors = evaluate_errors(&traj, case, ref_n, delta_a, delta_b)?;
    let constants = compute_constants(&case.initial(), traj.mesh)?;
    let fine = Mesh::new(ref_n)?;
    let u_ref0 = case.reference(0.0, fine)?;
    let estimator = aposteriori_estimate(
        &traj,
        &u_ref0,
        &constants,
        delta_a.resolve(traj.mesh),
        params.nu,
    )?;
    Ok(SingleRun {
        trajectory: traj,
        errors,
        estimator,
        constants,
    })
}

/// One entry of the invariant suite: the configuration label, the report,
/// and whether the solve aborted early (partial trajectory checked).
pub struct SuiteOutcome {
    pub label: String,
    pub report: InvariantReport,
    pub aborted: Option<String>,
}

/// Run the monotonicity invariants for one case at resolution `n` across
/// both viscosity kinds and both regularization settings. The positive
/// regularization combo uses `base.eps` when one is configured, the mesh
/// width otherwise.
pub fn invariant_suite(case: &Case, n: usize, base: &RunParams) -> Result<Vec<SuiteOutcome>> {
    let pos_eps = match base.eps {
        EpsSpec::Zero => EpsSpec::MeshH,
        other => other,
    };
    let combos: Vec<(String, ViscosityKind, EpsSpec)> = vec![
        ("linear".into(), ViscosityKind::Linear, EpsSpec::Zero),
        ("nonlinear eps=0".into(), ViscosityKind::Nonlinear, EpsSpec::Zero),
        (
            format!("nonlinear eps={}", pos_eps.label()),
            ViscosityKind::Nonlinear,
            pos_eps,
        ),
    ];
    let mesh = Mesh::new(n)?;
    let constants = compute_constants(&case.initial(), mesh)?;

    let mut outcomes = Vec::new();
    for (label, kind, eps) in combos {
        let mut params = *base;
        params.viscosity_kind = kind;
        params.eps = eps;
        params.record_increments = false;
        let label = format!("{} {}", case.name(), label);
        let (traj, aborted) = match solve_case(case, n, &params) {
            Ok(t) => (t, None),
            Err(e) => {
                let msg = e.to_string();
                (e.partial, Some(msg))
            }
        };
        let epsilon = eps.resolve(mesh);
        let report = invariant_report(&traj, &constants, epsilon);
        outcomes.push(SuiteOutcome {
            label,
            report,
            aborted,
        });
    }
    Ok(outcomes)
}
