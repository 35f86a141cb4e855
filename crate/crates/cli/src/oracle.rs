//! Brute-force validation backend: dense two-particle Hamiltonian,
//! eigendecomposition, exact field-free propagation and bound-band
//! extraction on small lattices.
//!
//! With the field off the Hamiltonian is real symmetric, so everything runs
//! on `f64` matrices; complex states are propagated by expanding real and
//! imaginary parts separately.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use pairwalk_core::lattice::{LatticeSpec, Wavefunction};

/// Largest lattice the dense path accepts (dimension N^2 up to 4096).
pub const MAX_DENSE_SITES: usize = 64;

mod thiserror_free {
    use std::fmt;

    #[derive(Debug, Clone, PartialEq)]
    pub enum OracleError {
        /// Lattice beyond the dense-path guard.
        TooLarge { n_sites: usize },
        /// No eigenstate passed the bound-pair classification.
        NoBoundBand,
    }

    impl fmt::Display for OracleError {
        fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            match self {
                OracleError::TooLarge { n_sites } => write!(
                    f,
                    "lattice with {n_sites} sites exceeds the dense-oracle guard of {}",
                    super::MAX_DENSE_SITES
                ),
                OracleError::NoBoundBand => {
                    write!(f, "no eigenstate qualified as bound (is U large enough?)")
                }
            }
        }
    }

    impl std::error::Error for OracleError {}
}

pub use thiserror_free::OracleError as Error;

/// Dense field-free two-particle Hamiltonian in the site basis
/// `index = n1 * N + n2`.
#[derive(Debug, Clone)]
pub struct DenseHamiltonian {
    pub lattice: LatticeSpec,
    pub matrix: DMatrix<f64>,
}

/// Eigendecomposition of a [`DenseHamiltonian`].
#[derive(Debug, Clone)]
pub struct EigenSystem {
    pub energies: DVector<f64>,
    /// Columns are eigenvectors, same ordering as `energies`.
    pub vectors: DMatrix<f64>,
}

fn build_matrix(lattice: &LatticeSpec, periodic: bool) -> DMatrix<f64> {
    let n = lattice.n_sites;
    let dim = n * n;
    let j = lattice.hopping;
    let mut h = DMatrix::<f64>::zeros(dim, dim);
    for n1 in 0..n {
        for n2 in 0..n {
            let row = n1 * n + n2;
            h[(row, row)] =
                lattice.onsite_energy[n1] + lattice.onsite_energy[n2]
                    + if n1 == n2 { lattice.interaction } else { 0.0 };
            let mut hop = |a: usize, b: usize| {
                h[(row, a * n + b)] += j;
            };
            if n1 + 1 < n {
                hop(n1 + 1, n2);
            } else if periodic {
                hop(0, n2);
            }
            if n1 > 0 {
                hop(n1 - 1, n2);
            } else if periodic {
                hop(n - 1, n2);
            }
            if n2 + 1 < n {
                hop(n1, n2 + 1);
            } else if periodic {
                hop(n1, 0);
            }
            if n2 > 0 {
                hop(n1, n2 - 1);
            } else if periodic {
                hop(n1, n - 1);
            }
        }
    }
    h
}

/// Builds the dense open-chain Hamiltonian; matches `i * apply_rhs` with
/// `F = 0`.
pub fn build_dense(lattice: &LatticeSpec) -> Result<DenseHamiltonian, Error> {
    if lattice.n_sites > MAX_DENSE_SITES {
        return Err(Error::TooLarge { n_sites: lattice.n_sites });
    }
    Ok(DenseHamiltonian { lattice: lattice.clone(), matrix: build_matrix(lattice, false) })
}

/// Periodic-boundary variant, used for clean momentum-resolved band
/// extraction. Band edges must agree with the open chain within finite-size
/// tolerance.
pub fn build_dense_periodic(lattice: &LatticeSpec) -> Result<DenseHamiltonian, Error> {
    if lattice.n_sites > MAX_DENSE_SITES {
        return Err(Error::TooLarge { n_sites: lattice.n_sites });
    }
    Ok(DenseHamiltonian { lattice: lattice.clone(), matrix: build_matrix(lattice, true) })
}

impl DenseHamiltonian {
    pub fn diagonalize(&self) -> EigenSystem {
        let se = self.matrix.clone().symmetric_eigen();
        EigenSystem { energies: se.eigenvalues, vectors: se.eigenvectors }
    }

    /// Applies H to a complex state vector (flattened grid).
    pub fn apply(&self, state: &[Complex64]) -> Vec<Complex64> {
        let dim = self.matrix.nrows();
        assert_eq!(state.len(), dim);
        let re = DVector::from_iterator(dim, state.iter().map(|c| c.re));
        let im = DVector::from_iterator(dim, state.iter().map(|c| c.im));
        let hre = &self.matrix * re;
        let him = &self.matrix * im;
        (0..dim).map(|i| Complex64::new(hre[i], him[i])).collect()
    }
}

/// Exact propagation `exp(-i H t) f` through the eigenbasis. Unitary to
/// machine precision for any `t`; valid only while the field is off.
pub fn exact_propagate(state: &Wavefunction, eigen: &EigenSystem, t: f64) -> Wavefunction {
    let dim = eigen.energies.len();
    assert_eq!(state.amplitudes.len(), dim);
    let re = DVector::from_iterator(dim, state.amplitudes.iter().map(|c| c.re));
    let im = DVector::from_iterator(dim, state.amplitudes.iter().map(|c| c.im));
    // coefficients in the eigenbasis
    let cre = eigen.vectors.transpose() * re;
    let cim = eigen.vectors.transpose() * im;
    // rotate each coefficient by exp(-i E t)
    let mut rre = DVector::zeros(dim);
    let mut rim = DVector::zeros(dim);
    for k in 0..dim {
        let (s, c) = (eigen.energies[k] * t).sin_cos();
        let (a, b) = (cre[k], cim[k]);
        // (a + i b) * (cos - i sin)
        rre[k] = a * c + b * s;
        rim[k] = b * c - a * s;
    }
    let ore = &eigen.vectors * rre;
    let oim = &eigen.vectors * rim;
    let amps: Vec<Complex64> = (0..dim).map(|i| Complex64::new(ore[i], oim[i])).collect();
    let mut out = Wavefunction::from_amplitudes(state.n_sites(), amps, state.time + t);
    out.time = state.time + t;
    out
}

/// Double-occupancy weight of an eigenvector: probability on the n1 = n2
/// diagonal. Bound-pair states concentrate there; scattering states carry
/// O(1/N) diagonal weight, and relative-antisymmetric ones exactly zero
/// (a wider |n1 - n2| <= 1 window would misclassify those).
fn pair_weight(vector: nalgebra::DVectorView<'_, f64>, n: usize) -> f64 {
    (0..n).map(|m| vector[m * n + m] * vector[m * n + m]).sum()
}

/// Classification threshold on double-occupancy weight. Unambiguous for
/// U >= 4; below U ~ 2.4 the slowest bound states (k near 0) fall under the
/// threshold and the extracted band is incomplete.
pub const BOUND_WEIGHT_THRESHOLD: f64 = 0.5;

/// Energies of the bound-pair eigenstates of the open chain, ascending.
pub fn bound_band(lattice: &LatticeSpec) -> Result<Vec<f64>, Error> {
    if lattice.interaction <= 0.0 {
        return Err(Error::NoBoundBand);
    }
    let eigen = build_dense(lattice)?.diagonalize();
    let n = lattice.n_sites;
    let mut energies: Vec<f64> = (0..eigen.energies.len())
        .filter(|&k| pair_weight(eigen.vectors.column(k).as_view(), n) > BOUND_WEIGHT_THRESHOLD)
        .map(|k| eigen.energies[k])
        .collect();
    if energies.is_empty() {
        return Err(Error::NoBoundBand);
    }
    energies.sort_by(f64::total_cmp);
    Ok(energies)
}

/// Momentum-resolved bound band on the periodic chain: `(k, E)` pairs with
/// `k` the center-of-mass momentum recovered from the eigenvector's response
/// to the joint translation operator (reported as |k| in [0, pi/2]).
pub fn bound_band_periodic(lattice: &LatticeSpec) -> Result<Vec<(f64, f64)>, Error> {
    if lattice.interaction <= 0.0 {
        return Err(Error::NoBoundBand);
    }
    let eigen = build_dense_periodic(lattice)?.diagonalize();
    let n = lattice.n_sites;
    let mut band = Vec::new();
    for kidx in 0..eigen.energies.len() {
        let col = eigen.vectors.column(kidx);
        if pair_weight(col.as_view(), n) <= BOUND_WEIGHT_THRESHOLD {
            continue;
        }
        // overlap with the state translated by s sites (both particles)
        let mut corr = vec![0.0f64; n];
        for s in 0..n {
            let mut acc = 0.0;
            for n1 in 0..n {
                for n2 in 0..n {
                    let t1 = (n1 + s) % n;
                    let t2 = (n2 + s) % n;
                    acc += col[n1 * n + n2] * col[t1 * n + t2];
                }
            }
            corr[s] = acc;
        }
        // momentum projection weight: w(K) = (1/N) sum_s cos(K s) corr[s];
        // the total momentum K = 2 k for the center-of-mass plane wave
        let mut best = (0usize, f64::NEG_INFINITY);
        for m in 0..n {
            let big_k = 2.0 * std::f64::consts::PI * m as f64 / n as f64;
            let w: f64 =
                (0..n).map(|s| (big_k * s as f64).cos() * corr[s]).sum::<f64>() / n as f64;
            if w > best.1 {
                best = (m, w);
            }
        }
        let big_k = 2.0 * std::f64::consts::PI * best.0 as f64 / n as f64;
        let k = pairwalk_core::semiclassical::reduce_to_zone(big_k).abs() / 2.0;
        band.push((k, eigen.energies[kidx]));
    }
    if band.is_empty() {
        return Err(Error::NoBoundBand);
    }
    band.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(band)
}

#[cfg(test)]
mod tests {
    use super::*;
    use pairwalk_core::lattice::{apply_rhs_with_origin, LatticeSpec, Wavefunction};
    use rand::{Rng, SeedableRng};

    fn random_state(n: usize, seed: u64) -> Wavefunction {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut psi = Wavefunction::zeros(n);
        for a in &mut psi.amplitudes {
            *a = Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5);
        }
        psi.normalize();
        psi
    }

    #[test]
    fn guard_rejects_large_lattices() {
        let lattice = LatticeSpec::new(65, 1.0).unwrap();
        assert!(matches!(build_dense(&lattice), Err(Error::TooLarge { .. })));
    }

    #[test]
    fn two_site_matrices_by_hand() {
        // smallest legal lattice is 8 sites; build the 2-site matrix directly
        // through the same kernel by hand-checking an 8-site corner instead.
        let lattice = LatticeSpec::new(8, 0.0).unwrap();
        let h = build_dense(&lattice).unwrap().matrix;
        // hopping entries: exactly one index changes by one
        assert_eq!(h[(0, 1)], 1.0); // (0,0) -> (0,1)
        assert_eq!(h[(0, 8)], 1.0); // (0,0) -> (1,0)
        assert_eq!(h[(0, 9)], 0.0); // no diagonal hop
        assert_eq!(h[(0, 0)], 0.0);

        let lattice = LatticeSpec::new(8, 4.0).unwrap();
        let h = build_dense(&lattice).unwrap().matrix;
        assert_eq!(h[(0, 0)], 4.0); // double occupancy (0,0)
        assert_eq!(h[(9, 9)], 4.0); // double occupancy (1,1)
        assert_eq!(h[(1, 1)], 0.0);
    }

    #[test]
    fn dense_matrix_is_hermitian_and_matches_rhs() {
        let lattice = LatticeSpec::new(8, 4.0).unwrap();
        let dense = build_dense(&lattice).unwrap();
        let ht = dense.matrix.transpose();
        assert!((&dense.matrix - &ht).abs().max() < 1e-14);

        // H vec(f) = i * apply_rhs(f) with F = 0 (gauge irrelevant at F = 0;
        // use the uncentered origin to match the raw Hamiltonian)
        let psi = random_state(8, 3);
        let hv = dense.apply(&psi.amplitudes);
        let rhs = apply_rhs_with_origin(&psi, &lattice, 0.0, 0.0);
        for (h, d) in hv.iter().zip(&rhs) {
            let want = Complex64::new(0.0, 1.0) * d;
            assert!((h - want).norm_sqr() < 1e-24);
        }
    }

    #[test]
    fn exact_propagate_identity_eigenstate_and_unitarity() {
        let lattice = LatticeSpec::new(8, 4.0).unwrap();
        let dense = build_dense(&lattice).unwrap();
        let eigen = dense.diagonalize();

        // t = 0 is the identity
        let psi = random_state(8, 5);
        let same = exact_propagate(&psi, &eigen, 0.0);
        for (a, b) in psi.amplitudes.iter().zip(&same.amplitudes) {
            assert!((a - b).norm_sqr() < 1e-22);
        }

        // an eigenstate only picks up a phase
        let k = 17;
        let mut eigstate = Wavefunction::zeros(8);
        for (i, a) in eigstate.amplitudes.iter_mut().enumerate() {
            *a = Complex64::new(eigen.vectors[(i, k)], 0.0);
        }
        let rotated = exact_propagate(&eigstate, &eigen, 0.83);
        for (a, b) in eigstate.amplitudes.iter().zip(&rotated.amplitudes) {
            assert!((a.norm_sqr() - b.norm_sqr()).abs() < 1e-12);
        }
        let phase = (-Complex64::new(0.0, 1.0) * eigen.energies[k] * 0.83).exp();
        for (a, b) in eigstate.amplitudes.iter().zip(&rotated.amplitudes) {
            assert!((a * phase - b).norm_sqr() < 1e-20);
        }

        // unitarity at long times
        let far = exact_propagate(&psi, &eigen, 137.0);
        assert!((far.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_interaction_spectrum_is_pairwise_sums() {
        // open-chain single-particle energies are 2 J cos(q m / (N+1))
        let n = 12;
        let lattice = LatticeSpec::new(n, 0.0).unwrap();
        let eigen = build_dense(&lattice).unwrap().diagonalize();
        let single: Vec<f64> = (1..=n)
            .map(|m| 2.0 * (std::f64::consts::PI * m as f64 / (n as f64 + 1.0)).cos())
            .collect();
        let mut sums: Vec<f64> = Vec::with_capacity(n * n);
        for a in &single {
            for b in &single {
                sums.push(a + b);
            }
        }
        sums.sort_by(f64::total_cmp);
        let mut spectrum: Vec<f64> = eigen.energies.iter().copied().collect();
        spectrum.sort_by(f64::total_cmp);
        for (s, e) in sums.iter().zip(&spectrum) {
            assert!((s - e).abs() < 1e-10, "sum {s} vs eigenvalue {e}");
        }
    }

    #[test]
    fn bound_band_errors() {
        let lattice = LatticeSpec::new(16, 0.0).unwrap();
        assert!(matches!(bound_band(&lattice), Err(Error::NoBoundBand)));
    }

    #[test]
    fn bound_band_count_and_range_strong_interaction() {
        // U = 10: N bound states (one per center-of-mass momentum) inside
        // [U, sqrt(U^2 + 16)] up to finite-size tolerance
        let n = 40;
        let lattice = LatticeSpec::new(n, 10.0).unwrap();
        let band = bound_band(&lattice).unwrap();
        assert_eq!(band.len(), n);
        let lo = 10.0;
        let hi = (100.0f64 + 16.0).sqrt();
        for e in &band {
            assert!(*e > lo - 0.05 && *e < hi + 0.05, "bound energy {e} outside band");
        }
        assert!((band.first().unwrap() - lo).abs() < 0.05);
        assert!((band.last().unwrap() - hi).abs() < 0.05);
    }

    #[test]
    fn periodic_band_follows_dispersion() {
        let n = 24;
        let lattice = LatticeSpec::new(n, 6.0).unwrap();
        let band = bound_band_periodic(&lattice).unwrap();
        assert_eq!(band.len(), n);
        let model = pairwalk_core::semiclassical::DispersionModel::new(1.0, 6.0);
        for (k, e) in &band {
            let predicted = model.bound_energy(*k);
            assert!(
                (predicted - e).abs() < 0.05,
                "k={k}: predicted {predicted}, eigenvalue {e}"
            );
        }
        // open and periodic band edges agree within finite-size tolerance
        let open = bound_band(&lattice).unwrap();
        let (pmin, pmax) = band
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), (_, e)| (lo.min(*e), hi.max(*e)));
        assert!((open.first().unwrap() - pmin).abs() < 0.1);
        assert!((open.last().unwrap() - pmax).abs() < 0.1);
    }
}
