//! Known-minimum oracles for the local minimizer.

mod common;

use sphere_gas::energy::log_energy;
use sphere_gas::minimize::{estimate_min, local_minimize, Ledger, LedgerSource, MinimizeParams};
use std::f64::consts::LN_2;

fn params(n: usize, restarts: usize, seed: u64) -> MinimizeParams {
    let mut p = MinimizeParams::default_for(n);
    p.restarts = restarts;
    p.seed = seed;
    p
}

#[test]
fn small_known_minima() {
    let mut ledger = Ledger::in_memory();
    let cases: [(usize, f64, f64); 3] = [
        (2, -2.0 * LN_2, 1e-9),
        (3, -3.0 * 3f64.ln(), 1e-8),
        (4, -6.0 * (8.0f64 / 3.0).ln(), 1e-8),
    ];
    for (n, expected, tol) in cases {
        let out = estimate_min(
            n,
            &params(n, 8, 5),
            &[],
            LedgerSource::Optimizer,
            &mut ledger,
        )
        .unwrap();
        assert!(
            (out.entry.energy - expected).abs() <= tol,
            "n = {n}: {} vs {expected}",
            out.entry.energy
        );
        assert!(out.separation.pass);
    }
}

#[test]
fn octahedron_at_six_points() {
    // Oracle: the octahedron energy is −18 log 2 (12 edges of √2, 3 diameters).
    let oracle = log_energy(&common::octahedron()).unwrap();
    assert!((oracle + 18.0 * LN_2).abs() < 1e-12);
    let mut ledger = Ledger::in_memory();
    let out = estimate_min(
        6,
        &params(6, 8, 11),
        &[],
        LedgerSource::Optimizer,
        &mut ledger,
    )
    .unwrap();
    assert!((out.entry.energy - oracle).abs() <= 1e-8);
}

#[test]
fn icosahedron_at_twelve_points() {
    let oracle = log_energy(&common::icosahedron()).unwrap();
    let mut ledger = Ledger::in_memory();
    let out = estimate_min(
        12,
        &params(12, 12, 3),
        &[],
        LedgerSource::Optimizer,
        &mut ledger,
    )
    .unwrap();
    assert!(
        out.entry.energy <= oracle + 1e-6,
        "optimizer {} vs icosahedron {oracle}",
        out.entry.energy
    );
}

#[test]
fn minimizers_refine_warm_starts() {
    // A slightly rotated tetrahedron fed back as a warm start must land on the
    // tetrahedral energy with a single restart.
    let tetra = common::tetrahedron();
    let mut ledger = Ledger::in_memory();
    let mut p = params(4, 1, 77);
    p.max_iters = 5000;
    let out = estimate_min(4, &p, &[tetra], LedgerSource::McmcRefined, &mut ledger).unwrap();
    assert!((out.entry.energy + 6.0 * (8.0f64 / 3.0).ln()).abs() < 1e-9);
}

#[test]
fn stall_reporting_is_stable() {
    // From an already-converged point the minimizer returns immediately with
    // the converged flag and no energy change.
    let ico = common::icosahedron();
    let before = log_energy(&ico).unwrap();
    let out = local_minimize(&ico, &MinimizeParams::default_for(12)).unwrap();
    assert!(out.converged);
    assert!(!out.stalled);
    assert!(out.energy <= before + 1e-12);
}
