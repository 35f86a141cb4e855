//! Measured quantities: centroids, marginal densities, double occupancy,
//! bound fraction, branch split, drift velocity and entanglement purity.

use alloc::vec::Vec;
use core::fmt;

use num_complex::Complex64;

use crate::lattice::Wavefunction;

/// One sampled row of the time series emitted during evolution.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservableRecord {
    pub time: f64,
    pub centroid_1: f64,
    pub centroid_2: f64,
    pub norm: f64,
    pub purity: f64,
    pub double_occupancy: f64,
    /// Probability with |n1 - n2| <= w_bound.
    pub bound_fraction: f64,
    /// Probability left of the initial centroid (reference bin split evenly).
    pub left_fraction: f64,
    pub right_fraction: f64,
}

/// Drift velocity from a least-squares linear fit of the centroid series.
#[derive(Debug, Clone, PartialEq)]
pub struct VelocityEstimate {
    /// Field impulse this run was driven with (caller-supplied context).
    pub impulse: f64,
    /// Slope of the fitted line, sites per time unit.
    pub mean_velocity: f64,
    pub fit_window: (f64, f64),
    /// RMS residual of the fit.
    pub fit_residual: f64,
    pub n_samples: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ObservablesError {
    /// Fewer than 10 centroid samples inside the fit window.
    InsufficientSamples { found: usize },
}

impl fmt::Display for ObservablesError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ObservablesError::InsufficientSamples { found } => {
                write!(f, "insufficient samples in fit window: found {found}, need >= 10")
            }
        }
    }
}

impl core::error::Error for ObservablesError {}

/// Probability-weighted mean position of each particle,
/// `nbar_i = sum n_i |f(n1, n2)|^2`.
pub fn centroid(state: &Wavefunction) -> (f64, f64) {
    let n = state.n_sites();
    let mut c1 = 0.0;
    let mut c2 = 0.0;
    for n1 in 0..n {
        let row = state.row(n1);
        let mut row_p = 0.0;
        let mut row_x2 = 0.0;
        for (n2, a) in row.iter().enumerate() {
            let p = a.norm_sqr();
            row_p += p;
            row_x2 += n2 as f64 * p;
        }
        c1 += n1 as f64 * row_p;
        c2 += row_x2;
    }
    (c1, c2)
}

/// Entanglement purity `tr rho_1^2` of the one-particle reduced density
/// matrix, with `rho_1 = M M^dagger` for the amplitude matrix `M = f(n1, n2)`.
/// Equals 1 for product states, down to 1/N at maximal entanglement.
///
/// Computed as the squared Frobenius norm of the Gram matrix of grid rows,
/// exploiting hermiticity of `rho_1` (upper triangle only), O(N^3).
pub fn purity(state: &Wavefunction) -> f64 {
    let n = state.n_sites();
    let mut acc = 0.0;
    for i in 0..n {
        let ri = state.row(i);
        let diag: f64 = ri.iter().map(|a| a.norm_sqr()).sum();
        acc += diag * diag;
        for j in (i + 1)..n {
            let rj = state.row(j);
            let mut s = Complex64::new(0.0, 0.0);
            for (a, b) in ri.iter().zip(rj) {
                s += a * b.conj();
            }
            acc += 2.0 * s.norm_sqr();
        }
    }
    acc
}

/// One-particle density `P_i(n) = sum_other |f|^2`; sums to the state norm.
pub fn marginal_density(state: &Wavefunction, particle: u8) -> Vec<f64> {
    assert!(particle == 1 || particle == 2, "particle must be 1 or 2");
    let n = state.n_sites();
    let mut dens = alloc::vec![0.0f64; n];
    for n1 in 0..n {
        let row = state.row(n1);
        if particle == 1 {
            dens[n1] = row.iter().map(|a| a.norm_sqr()).sum();
        } else {
            for (n2, a) in row.iter().enumerate() {
                dens[n2] += a.norm_sqr();
            }
        }
    }
    dens
}

/// Probability that both particles occupy the same site, `sum_n |f(n,n)|^2`.
pub fn double_occupancy(state: &Wavefunction) -> f64 {
    let n = state.n_sites();
    (0..n).map(|m| state.get(m, m).norm_sqr()).sum()
}

/// Probability within `w_bound` sites of the diagonal, `|n1 - n2| <= w`.
/// Bound-pair eigenstates are exponentially localized in the relative
/// coordinate, so small `w` captures the doublon weight.
pub fn bound_fraction(state: &Wavefunction, w_bound: usize) -> f64 {
    let n = state.n_sites();
    let mut p = 0.0;
    for n1 in 0..n {
        let row = state.row(n1);
        let lo = n1.saturating_sub(w_bound);
        let hi = (n1 + w_bound + 1).min(n);
        p += row[lo..hi].iter().map(|a| a.norm_sqr()).sum::<f64>();
    }
    p
}

/// Splits a one-particle density into probability strictly left/right of a
/// reference position; the bin containing the reference is split evenly.
pub fn branch_split(marginal: &[f64], reference: f64) -> (f64, f64) {
    let mut left = 0.0;
    let mut right = 0.0;
    for (n, &p) in marginal.iter().enumerate() {
        let x = n as f64;
        if x < reference - 0.5 {
            left += p;
        } else if x > reference + 0.5 {
            right += p;
        } else {
            left += 0.5 * p;
            right += 0.5 * p;
        }
    }
    (left, right)
}

/// Centroids of the bound (|n1 - n2| <= w) and unbound components of the
/// state, each renormalized within its own subspace. Either entry is `None`
/// when the component carries negligible weight.
pub fn branch_centroids(state: &Wavefunction, w_bound: usize) -> (Option<f64>, Option<f64>) {
    let n = state.n_sites();
    let mut pb = 0.0;
    let mut xb = 0.0;
    let mut pu = 0.0;
    let mut xu = 0.0;
    for n1 in 0..n {
        let row = state.row(n1);
        for (n2, a) in row.iter().enumerate() {
            let p = a.norm_sqr();
            let diff = n1 as isize - n2 as isize;
            if diff.unsigned_abs() <= w_bound {
                pb += p;
                xb += n1 as f64 * p;
            } else {
                pu += p;
                xu += n1 as f64 * p;
            }
        }
    }
    let bound = if pb > 1e-12 { Some(xb / pb) } else { None };
    let unbound = if pu > 1e-12 { Some(xu / pu) } else { None };
    (bound, unbound)
}

/// Least-squares linear fit of `(t, centroid)` samples inside `window`; the
/// slope is the drift velocity.
pub fn mean_velocity(
    impulse: f64,
    series: &[(f64, f64)],
    window: (f64, f64),
) -> Result<VelocityEstimate, ObservablesError> {
    let pts: Vec<(f64, f64)> = series
        .iter()
        .copied()
        .filter(|(t, _)| *t >= window.0 && *t <= window.1)
        .collect();
    if pts.len() < 10 {
        return Err(ObservablesError::InsufficientSamples { found: pts.len() });
    }
    let n = pts.len() as f64;
    let st: f64 = pts.iter().map(|(t, _)| t).sum();
    let sx: f64 = pts.iter().map(|(_, x)| x).sum();
    let tbar = st / n;
    let xbar = sx / n;
    let mut stt = 0.0;
    let mut stx = 0.0;
    for (t, x) in &pts {
        stt += (t - tbar) * (t - tbar);
        stx += (t - tbar) * (x - xbar);
    }
    let slope = stx / stt;
    let intercept = xbar - slope * tbar;
    let mut ss = 0.0;
    for (t, x) in &pts {
        let r = x - (intercept + slope * t);
        ss += r * r;
    }
    Ok(VelocityEstimate {
        impulse,
        mean_velocity: slope,
        fit_window: window,
        fit_residual: libm::sqrt(ss / n),
        n_samples: pts.len(),
    })
}
