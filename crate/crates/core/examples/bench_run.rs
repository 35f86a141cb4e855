//! Quick throughput / conservation check: one fast-scale driven run.
//! args: U sigma impulse_in_pi [n_sites] [t_final] [dt]

use std::time::Instant;

use pairwalk_core::integrator::{evolve, IntegratorConfig, SeriesRecorder};
use pairwalk_core::lattice::{build_initial_state, InitialStateSpec, LatticeSpec};
use pairwalk_core::pulse::GaussianPulse;

fn main() {
    let args: Vec<f64> = std::env::args().skip(1).map(|a| a.parse().unwrap()).collect();
    let u = args.first().copied().unwrap_or(4.0);
    let sigma = args.get(1).copied().unwrap_or(1.0);
    let impulse = args.get(2).copied().unwrap_or(1.25) * std::f64::consts::PI;
    let ns = args.get(3).copied().unwrap_or(200.0) as usize;
    let t_final = args.get(4).copied().unwrap_or(50.0);
    let dt = args.get(5).copied().unwrap_or(1e-3);

    let lattice = LatticeSpec::new(ns, u).unwrap();
    let psi = build_initial_state(&lattice, &InitialStateSpec::centered(sigma, 0, ns)).unwrap();
    let pulse = GaussianPulse::from_impulse(impulse, 1.0, 10.0).unwrap();
    let config = IntegratorConfig {
        t_final,
        dt,
        edge_tolerance: 1.0, // measure, don't abort
        ..Default::default()
    };
    let start = Instant::now();
    let mut rec = SeriesRecorder::default();
    let (_, report) = evolve(psi, &lattice, &pulse, &config, &mut rec).unwrap();
    let last = rec.records.last().unwrap();
    println!(
        "U={u} sigma={sigma} I={impulse:.4} N={ns} T={t_final} dt={dt}: wall={:.2}s norm_drift={:.3e} edge={:.3e} asym={:.3e} c1={:.3} purity={:.4} left={:.3} right={:.3}",
        start.elapsed().as_secs_f64(),
        report.max_norm_drift,
        report.max_edge_probability,
        report.max_exchange_asymmetry.unwrap_or(f64::NAN),
        last.centroid_1,
        last.purity,
        last.left_fraction,
        last.right_fraction,
    );
}
