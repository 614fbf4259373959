//! Two-phase search for the documented quasiperiodic orbit: coarse scan and
//! bisection at a short horizon, then refinement at a long horizon.

use quasirate::birkhoff::WeightParams;
use quasirate::cr3bp::search::{find_matching_orbit, SearchSettings};
use quasirate::cr3bp::{cr3bp_rotation_rates, AngleCenters, Cr3bpParams};
use quasirate::projections::PlanarPoint;

fn main() {
    let centers = AngleCenters {
        q_plane: PlanarPoint::new(-0.1, 0.0),
        r_rprime: PlanarPoint::new(0.15, 0.0),
    };
    let phase1 = SearchSettings {
        tol: 3e-5,
        ..SearchSettings::default()
    };
    let o1 = find_matching_orbit(0.1, &phase1, centers).expect("phase 1 found candidates");
    println!(
        "phase1: v = {:.12}, ratio = {:.9}, diff = {:.2e}, evals = {}, converged = {}",
        o1.best.v,
        o1.best.ratio,
        (o1.best.ratio - phase1.target).abs(),
        o1.evaluations,
        o1.converged
    );
    let w = 2e-4;
    let phase2 = SearchSettings {
        v_range: (o1.best.v - w, o1.best.v + w),
        coarse_steps: 8,
        t_pilot: 420.0,
        tol: 2e-7,
        pilot_spread_limit: 1e-3,
        ..SearchSettings::default()
    };
    let o2 = find_matching_orbit(0.1, &phase2, centers).expect("phase 2 found candidates");
    let b = &o2.best;
    println!(
        "phase2: v = {:.16}, ratio = {:.12}, diff = {:.2e}, evals = {}, converged = {}",
        b.v,
        b.ratio,
        (b.ratio - phase2.target).abs(),
        o2.evaluations,
        o2.converged
    );
    println!(
        "state: q1 = {:.17e}, q2 = {:.17e}, p1 = {:.17e}, p2 = {:.17e}",
        b.state.q1, b.state.q2, b.state.p1, b.state.p2
    );
    println!("rho_theta = {:.15}", b.rates.rho_theta);
    println!("rho_phi   = {:.15}", b.rates.rho_phi);

    // Validate the frozen candidate at production settings.
    let params = Cr3bpParams::new(0.1, 2.5e-4, 1e-3).unwrap();
    let rates = cr3bp_rotation_rates(
        &b.state,
        &params,
        500.0,
        WeightParams::new(2),
        centers,
        phase2.target,
    )
    .unwrap();
    println!(
        "T=500 validation: rho_theta = {:.15}, rho_phi = {:.15}, residual = {:.3e}, reliable = {}",
        rates.rho_theta, rates.rho_phi, rates.relation_residual, rates.reliable
    );
}
