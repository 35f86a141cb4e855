//! Self-check suite behind `pairwalk validate`: small-N oracle cross-checks
//! and engine invariants, all seconds-scale.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use pairwalk_core::integrator::{rk4_step, IntegratorConfig};
use pairwalk_core::lattice::{apply_rhs, LatticeSpec, Wavefunction};
use pairwalk_core::observables;
use pairwalk_core::pulse::{Drive, GaussianPulse, ZeroField};

use crate::oracle;

pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &'static str, passed: bool, detail: String) -> Check {
    Check { name, passed, detail }
}

fn random_state(n: usize, seed: u64) -> Wavefunction {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut psi = Wavefunction::zeros(n);
    for a in &mut psi.amplitudes {
        *a = Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5);
    }
    psi.normalize();
    psi
}

fn rk4_vs_exact_error(n: usize, u: f64, dt: f64, t: f64, seed: u64) -> f64 {
    let lattice = LatticeSpec::new(n, u).expect("lattice");
    let eigen = oracle::build_dense(&lattice).expect("dense").diagonalize();
    let initial = random_state(n, seed);
    let exact = oracle::exact_propagate(&initial, &eigen, t);

    let steps = (t / dt).round() as usize;
    let mut psi = initial;
    for _ in 0..steps {
        psi = rk4_step(&psi, &lattice, &ZeroField, dt);
    }
    psi.amplitudes
        .iter()
        .zip(&exact.amplitudes)
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max)
}

fn check_oracle_equivalence() -> Check {
    let err = rk4_vs_exact_error(8, 4.0, 1e-3, 1.0, 42);
    check(
        "oracle-equivalence",
        err < 1e-8,
        format!("N=8 U=4 t=1 dt=1e-3: max amplitude error {err:.3e} (require < 1e-8)"),
    )
}

fn check_convergence_order() -> Check {
    let coarse = rk4_vs_exact_error(8, 4.0, 2e-3, 1.0, 42);
    let fine = rk4_vs_exact_error(8, 4.0, 1e-3, 1.0, 42);
    let ratio = coarse / fine;
    check(
        "rk4-convergence-order",
        (12.0..=20.0).contains(&ratio),
        format!("error ratio under dt halving: {ratio:.2} (require within [12, 20])"),
    )
}

fn check_band_edges() -> Check {
    let mut ok = true;
    let mut detail = String::new();
    for u in [4.0, 10.0] {
        let lattice = LatticeSpec::new(40, u).expect("lattice");
        match oracle::bound_band(&lattice) {
            Ok(band) => {
                let lo = band.first().copied().unwrap();
                let hi = band.last().copied().unwrap();
                let want_hi = (u * u + 16.0).sqrt();
                let pass = (lo - u).abs() < 0.05 && (hi - want_hi).abs() < 0.05;
                ok &= pass;
                detail.push_str(&format!(
                    "U={u}: band [{lo:.3}, {hi:.3}] vs [{u:.3}, {want_hi:.3}]; "
                ));
            }
            Err(e) => {
                ok = false;
                detail.push_str(&format!("U={u}: {e}; "));
            }
        }
    }
    check("bound-band-edges", ok, detail)
}

fn check_hermiticity() -> Check {
    let lattice = LatticeSpec::new(12, 3.0).expect("lattice");
    let mut worst = 0.0f64;
    for seed in 0..8u64 {
        let pu = random_state(12, 100 + seed);
        let pv = random_state(12, 200 + seed);
        let i = Complex64::new(0.0, 1.0);
        let field = 0.3 * seed as f64 - 1.0;
        let hv: Vec<Complex64> =
            apply_rhs(&pv, &lattice, field).iter().map(|d| i * d).collect();
        let hu: Vec<Complex64> =
            apply_rhs(&pu, &lattice, field).iter().map(|d| i * d).collect();
        let uhv: Complex64 = pu.amplitudes.iter().zip(&hv).map(|(a, b)| a.conj() * b).sum();
        let vhu: Complex64 = pv.amplitudes.iter().zip(&hu).map(|(a, b)| a.conj() * b).sum();
        worst = worst.max((uhv - vhu.conj()).norm());
    }
    check(
        "hamiltonian-hermiticity",
        worst < 1e-12,
        format!("max |<u,Hv> - <v,Hu>*| over 8 random pairs: {worst:.3e}"),
    )
}

fn check_impulse_quadrature() -> Check {
    let mut worst = 0.0f64;
    for (impulse, width) in [(1.5707963267948966, 1.0), (4.71238898038469, 0.5), (0.25, 4.0)] {
        let p = GaussianPulse::from_impulse(impulse, width, 20.0 * width).expect("pulse");
        let a = p.center - 10.0 * width;
        let b = p.center + 10.0 * width;
        let n = 4000;
        let h = (b - a) / n as f64;
        let mut s = p.field_at(a) + p.field_at(b);
        for i in 1..n {
            s += if i % 2 == 1 { 4.0 } else { 2.0 } * p.field_at(a + i as f64 * h);
        }
        worst = worst.max((s * h / 3.0 - impulse).abs());
    }
    check(
        "impulse-calibration",
        worst < 1e-9,
        format!("max |quadrature - target impulse|: {worst:.3e}"),
    )
}

fn check_stability_rejection() -> Check {
    let lattice = LatticeSpec::new(64, 4.0).expect("lattice");
    let config = IntegratorConfig { dt: 0.5, ..Default::default() };
    let rejected = config.validate(&lattice, 0.0).is_err();
    check(
        "stability-precondition",
        rejected,
        format!(
            "dt=0.5 vs limit {:.4}: {}",
            IntegratorConfig::stability_limit(&lattice, 0.0),
            if rejected { "rejected before execution" } else { "NOT rejected" }
        ),
    )
}

fn check_purity_bounds() -> Check {
    let mut ok = true;
    for seed in 0..8u64 {
        let psi = random_state(10, 300 + seed);
        let p = observables::purity(&psi);
        ok &= p <= 1.0 + 1e-9 && p >= 0.1 - 1e-9;
    }
    check("purity-bounds", ok, "tr rho1^2 within [1/N, 1] on random states".to_string())
}

pub fn run_suite() -> Vec<Check> {
    vec![
        check_oracle_equivalence(),
        check_convergence_order(),
        check_band_edges(),
        check_hermiticity(),
        check_impulse_quadrature(),
        check_stability_rejection(),
        check_purity_bounds(),
    ]
}

/// Prints one line per check; returns false if anything failed.
pub fn report(checks: &[Check]) -> bool {
    let mut all = true;
    for c in checks {
        println!("{} {} — {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
        all &= c.passed;
    }
    println!(
        "{}: {}/{} checks passed",
        if all { "OK" } else { "FAILED" },
        checks.iter().filter(|c| c.passed).count(),
        checks.len()
    );
    all
}
