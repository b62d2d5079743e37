use burgers_fem::analysis::*;
use burgers_fem::cases::Case;
use burgers_fem::exact::*;
use burgers_fem::experiment::*;
use burgers_fem::mesh::Mesh;
use burgers_fem::viscosity::ViscosityKind;

fn main() {
    // AC-8: estimator trend on the smooth family
    let params = RunParams::new(ViscosityKind::Nonlinear, EpsSpec::Zero, 0.5);
    let fine = Mesh::new(6400).unwrap();
    let u_ref0 = Case::Smooth.reference(0.0, fine).unwrap();
    let mut totals = Vec::new();
    for n in [100usize, 200, 400, 800] {
        let traj = solve_case(&Case::Smooth, n, &params).unwrap();
        let constants = compute_constants(&Case::Smooth.initial(), traj.mesh).unwrap();
        let b = aposteriori_estimate(&traj, &u_ref0, &constants, 1.0, 0.0).unwrap();
        println!("N={n:4} total={:.4e} init={:.2e} res={:.2e} dtg={:.2e} art={:.2e} jump={:.2e} pref={:.3}",
            b.total, b.term_initial, b.term_residual, b.term_dtgrad, b.term_artvisc, b.term_jump, b.prefactor);
        totals.push(b.total);
    }
    let fitted = (totals[0] / totals[3]).log2() / 3.0;
    println!("fitted estimator order: {fitted:.3}");

    // AC-7 cost: fine nonsmooth scheme solve at 12800
    let t0 = std::time::Instant::now();
    let mut p = RunParams::new(ViscosityKind::Nonlinear, EpsSpec::Zero, 0.5);
    p.record_increments = false;
    let traj = solve_case(&Case::Nonsmooth, 12800, &p).unwrap();
    println!("12800 solve: {:.1?}, {} steps", t0.elapsed(), traj.n_steps());
    let exact = front_tracking_solve(&burgers_fem::cases::triangular_profile(), 0.5).unwrap();
    let fine = Mesh::new(12800).unwrap();
    let r = sample_front_tracked(&exact, fine);
    let (l1, _) = error_norms(traj.final_state(), &r).unwrap();
    println!("L1(front tracking vs 12800 scheme) = {:.4e} = {:.2} h_fine", l1, l1 * 12800.0);
}
