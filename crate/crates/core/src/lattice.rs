//! Two-particle state on a finite chain and the Hamiltonian right-hand side.
//!
//! The wavefunction is stored as a dense row-major `n_sites x n_sites`
//! complex grid `f(n1, n2)`. Boundaries are open (hard wall): amplitudes
//! outside the chain are identically zero.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_complex::Complex64;

/// Chain geometry and Hamiltonian parameters (units of `hbar = J = e = a = 1`).
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeSpec {
    /// Number of sites N.
    pub n_sites: usize,
    /// Nearest-neighbor hopping J. Fixed to 1.0 by convention.
    pub hopping: f64,
    /// On-site Hubbard interaction U >= 0 (repulsive only).
    pub interaction: f64,
    /// Per-site potential; all zeros by default (reference energy).
    pub onsite_energy: Vec<f64>,
}

impl LatticeSpec {
    pub fn new(n_sites: usize, interaction: f64) -> Result<Self, LatticeError> {
        if n_sites < 8 {
            return Err(LatticeError::BadSpec("n_sites must be >= 8"));
        }
        if !(interaction >= 0.0) {
            return Err(LatticeError::BadSpec("interaction must be >= 0"));
        }
        Ok(LatticeSpec {
            n_sites,
            hopping: 1.0,
            interaction,
            onsite_energy: vec![0.0; n_sites],
        })
    }

    pub fn with_onsite_energy(mut self, onsite: Vec<f64>) -> Result<Self, LatticeError> {
        if onsite.len() != self.n_sites {
            return Err(LatticeError::BadSpec("onsite_energy length must equal n_sites"));
        }
        self.onsite_energy = onsite;
        Ok(self)
    }

    /// Gauge origin used in the field term: site indices are re-centered by
    /// N/2 so the scalar-potential operator norm does not grow with absolute
    /// site index.
    pub fn field_origin(&self) -> f64 {
        self.n_sites as f64 / 2.0
    }
}

/// Initial product-Gaussian specification of Eq.-(4) form: each particle gets
/// `exp(-(n - c)^2 / (4 sigma^2))`, jointly normalized.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InitialStateSpec {
    /// Gaussian width sigma (sites).
    pub width: f64,
    /// Center of particle 1.
    pub center_1: i64,
    /// Center of particle 2.
    pub center_2: i64,
}

impl InitialStateSpec {
    /// Centers the packet at `(N/2 - d0, N/2 + d0)`.
    pub fn centered(width: f64, offset: i64, n_sites: usize) -> Self {
        let half = (n_sites / 2) as i64;
        InitialStateSpec {
            width,
            center_1: half - offset,
            center_2: half + offset,
        }
    }
}

/// Full two-particle state: complex amplitudes `f(n1, n2)` plus current time.
#[derive(Debug, Clone, PartialEq)]
pub struct Wavefunction {
    n_sites: usize,
    pub amplitudes: Vec<Complex64>,
    pub time: f64,
}

impl Wavefunction {
    pub fn zeros(n_sites: usize) -> Self {
        Wavefunction {
            n_sites,
            amplitudes: vec![Complex64::new(0.0, 0.0); n_sites * n_sites],
            time: 0.0,
        }
    }

    pub fn from_amplitudes(n_sites: usize, amplitudes: Vec<Complex64>, time: f64) -> Self {
        assert_eq!(amplitudes.len(), n_sites * n_sites);
        Wavefunction { n_sites, amplitudes, time }
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    #[inline]
    pub fn idx(&self, n1: usize, n2: usize) -> usize {
        n1 * self.n_sites + n2
    }

    #[inline]
    pub fn get(&self, n1: usize, n2: usize) -> Complex64 {
        self.amplitudes[n1 * self.n_sites + n2]
    }

    #[inline]
    pub fn set(&mut self, n1: usize, n2: usize, value: Complex64) {
        let i = self.idx(n1, n2);
        self.amplitudes[i] = value;
    }

    /// Row `n1` of the grid (all `n2` at fixed `n1`).
    #[inline]
    pub fn row(&self, n1: usize) -> &[Complex64] {
        &self.amplitudes[n1 * self.n_sites..(n1 + 1) * self.n_sites]
    }

    /// Total probability `sum |f|^2`.
    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Rescales amplitudes so `norm_sqr` is exactly 1.
    pub fn normalize(&mut self) {
        let n = libm::sqrt(self.norm_sqr());
        if n > 0.0 {
            let inv = 1.0 / n;
            for a in &mut self.amplitudes {
                *a *= inv;
            }
        }
    }

    /// Max |f(n1,n2) - f(n2,n1)| over the grid. Zero for exchange-symmetric
    /// states; the symmetry is preserved by the evolution when present
    /// initially (Hamiltonian and field treat the two particles identically).
    pub fn exchange_asymmetry(&self) -> f64 {
        let n = self.n_sites;
        let mut worst = 0.0f64;
        for n1 in 0..n {
            for n2 in (n1 + 1)..n {
                let d = self.amplitudes[n1 * n + n2] - self.amplitudes[n2 * n + n1];
                let m = d.norm_sqr();
                if m > worst {
                    worst = m;
                }
            }
        }
        libm::sqrt(worst)
    }

    /// Probability within `margin` sites of any hard-wall edge (either
    /// particle). Used to flag runs where the chain was too small.
    pub fn edge_probability(&self, margin: usize) -> f64 {
        let n = self.n_sites;
        if 2 * margin >= n {
            return self.norm_sqr();
        }
        let mut p = 0.0;
        for n1 in 0..n {
            let row = self.row(n1);
            if n1 < margin || n1 >= n - margin {
                p += row.iter().map(|a| a.norm_sqr()).sum::<f64>();
            } else {
                p += row[..margin].iter().map(|a| a.norm_sqr()).sum::<f64>();
                p += row[n - margin..].iter().map(|a| a.norm_sqr()).sum::<f64>();
            }
        }
        p
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum LatticeError {
    /// Invalid parameter (non-positive width, out-of-range center, ...).
    BadSpec(&'static str),
    /// Truncated Gaussian tail carries weight >= 1e-12: the packet does not
    /// fit in the chain.
    EdgeOverlap { tail_weight: f64 },
}

impl fmt::Display for LatticeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LatticeError::BadSpec(msg) => write!(f, "bad lattice/state spec: {msg}"),
            LatticeError::EdgeOverlap { tail_weight } => write!(
                f,
                "initial Gaussian overlaps the lattice edge (truncated weight {tail_weight:.3e})"
            ),
        }
    }
}

impl core::error::Error for LatticeError {}

/// Maximum tolerated Gaussian weight outside the chain at construction.
pub const EDGE_TAIL_TOLERANCE: f64 = 1e-12;

fn gaussian_profile(center: i64, width: f64, lo: i64, hi: i64) -> f64 {
    // sum of g(n)^2 = exp(-(n-c)^2 / (2 sigma^2)) over n in [lo, hi)
    let mut s = 0.0;
    for n in lo..hi {
        let d = (n - center) as f64;
        s += libm::exp(-d * d / (2.0 * width * width));
    }
    s
}

/// Builds the normalized product-Gaussian initial state at `time = 0`.
pub fn build_initial_state(
    lattice: &LatticeSpec,
    init: &InitialStateSpec,
) -> Result<Wavefunction, LatticeError> {
    if !(init.width > 0.0) {
        return Err(LatticeError::BadSpec("width must be > 0"));
    }
    let n = lattice.n_sites as i64;
    for c in [init.center_1, init.center_2] {
        if c < 0 || c >= n {
            return Err(LatticeError::BadSpec("center must lie within [0, n_sites)"));
        }
    }

    // Truncation check: compare in-lattice weight against the weight over a
    // range wide enough that anything further is far below f64 resolution.
    let reach = libm::ceil(16.0 * init.width) as i64 + 2;
    let mut inside = [0.0f64; 2];
    let mut total = [0.0f64; 2];
    for (i, c) in [init.center_1, init.center_2].into_iter().enumerate() {
        inside[i] = gaussian_profile(c, init.width, 0, n);
        total[i] = gaussian_profile(c, init.width, c - reach, c + reach + 1);
    }
    let tail_weight = 1.0 - (inside[0] * inside[1]) / (total[0] * total[1]);
    if tail_weight >= EDGE_TAIL_TOLERANCE {
        return Err(LatticeError::EdgeOverlap { tail_weight });
    }

    let ns = lattice.n_sites;
    let mut g1 = Vec::with_capacity(ns);
    let mut g2 = Vec::with_capacity(ns);
    let q = 1.0 / (4.0 * init.width * init.width);
    for m in 0..n {
        let d1 = (m - init.center_1) as f64;
        let d2 = (m - init.center_2) as f64;
        g1.push(libm::exp(-d1 * d1 * q));
        g2.push(libm::exp(-d2 * d2 * q));
    }

    let mut state = Wavefunction::zeros(ns);
    for n1 in 0..ns {
        for n2 in 0..ns {
            state.amplitudes[n1 * ns + n2] = Complex64::new(g1[n1] * g2[n2], 0.0);
        }
    }
    state.normalize();
    Ok(state)
}

/// Time derivative `df/dt` of the two-particle Schrodinger equation at field
/// value `F(t)`, with the field term re-centered at `N/2`:
///
/// `df/dt = -i { J [f(n1+1,n2) + f(n1-1,n2) + f(n1,n2+1) + f(n1,n2-1)]
///            + [eps(n1) + eps(n2) - F (x1 + x2) + delta(n1,n2) U] f }`,
///
/// with `x_i = n_i - N/2` and zero amplitude outside the chain.
pub fn apply_rhs(state: &Wavefunction, lattice: &LatticeSpec, field_value: f64) -> Vec<Complex64> {
    apply_rhs_with_origin(state, lattice, field_value, lattice.field_origin())
}

/// Same as [`apply_rhs`] with an explicit gauge origin for the field term.
/// Shifting the origin changes the state only by a global time-dependent
/// phase; observables are unaffected.
pub fn apply_rhs_with_origin(
    state: &Wavefunction,
    lattice: &LatticeSpec,
    field_value: f64,
    origin: f64,
) -> Vec<Complex64> {
    let ns = lattice.n_sites;
    assert_eq!(state.n_sites, ns, "grid shape must match lattice");
    let mut out = vec![Complex64::new(0.0, 0.0); ns * ns];
    let zero_row = vec![Complex64::new(0.0, 0.0); ns];
    let mut col_pot = vec![0.0f64; ns];
    rhs_into(
        &state.amplitudes,
        ns,
        lattice,
        field_value,
        origin,
        &zero_row,
        &mut col_pot,
        &mut out,
    );
    out
}

/// Hot kernel shared by [`apply_rhs`] and the integrator. `zero_row` stands
/// in for the missing neighbor row at the hard walls so the inner loop stays
/// branch-free; `col_pot` is scratch for the per-column potential.
#[allow(clippy::too_many_arguments)]
pub(crate) fn rhs_into(
    amps: &[Complex64],
    ns: usize,
    lattice: &LatticeSpec,
    field_value: f64,
    origin: f64,
    zero_row: &[Complex64],
    col_pot: &mut [f64],
    out: &mut [Complex64],
) {
    debug_assert_eq!(amps.len(), ns * ns);
    debug_assert_eq!(out.len(), ns * ns);
    debug_assert!(zero_row.len() >= ns && col_pot.len() >= ns);
    let j = lattice.hopping;
    let u = lattice.interaction;

    // field-off fast path: with F = 0 and a flat on-site potential the only
    // diagonal contribution is the interaction term
    let potential_free =
        field_value == 0.0 && lattice.onsite_energy.iter().all(|&e| e == 0.0);
    if !potential_free {
        for (m, pot) in col_pot.iter_mut().enumerate().take(ns) {
            *pot = lattice.onsite_energy[m] - field_value * (m as f64 - origin);
        }
    }

    for n1 in 0..ns {
        let row = &amps[n1 * ns..(n1 + 1) * ns];
        let up: &[Complex64] = if n1 + 1 < ns { &amps[(n1 + 1) * ns..(n1 + 2) * ns] } else { zero_row };
        let down: &[Complex64] = if n1 > 0 { &amps[(n1 - 1) * ns..n1 * ns] } else { zero_row };
        let orow = &mut out[n1 * ns..(n1 + 1) * ns];

        if potential_free {
            {
                let mut s = up[0] + down[0];
                if ns > 1 {
                    s += row[1];
                }
                s *= j;
                orow[0] = Complex64::new(s.im, -s.re);
            }
            for n2 in 1..ns - 1 {
                let mut s = row[n2 - 1] + row[n2 + 1] + up[n2] + down[n2];
                s *= j;
                orow[n2] = Complex64::new(s.im, -s.re);
            }
            if ns > 1 {
                let last = ns - 1;
                let mut s = row[last - 1] + up[last] + down[last];
                s *= j;
                orow[last] = Complex64::new(s.im, -s.re);
            }
        } else {
            let pot_1 = col_pot[n1];
            // column boundaries handled outside the branch-free interior loop
            {
                let mut s = up[0] + down[0];
                if ns > 1 {
                    s += row[1];
                }
                s *= j;
                s += (pot_1 + col_pot[0]) * row[0];
                orow[0] = Complex64::new(s.im, -s.re);
            }
            for n2 in 1..ns - 1 {
                let mut s = row[n2 - 1] + row[n2 + 1] + up[n2] + down[n2];
                s *= j;
                s += (pot_1 + col_pot[n2]) * row[n2];
                orow[n2] = Complex64::new(s.im, -s.re);
            }
            if ns > 1 {
                let last = ns - 1;
                let mut s = row[last - 1] + up[last] + down[last];
                s *= j;
                s += (pot_1 + col_pot[last]) * row[last];
                orow[last] = Complex64::new(s.im, -s.re);
            }
        }

        // interaction lives on the diagonal only
        let f_diag = row[n1];
        orow[n1] += Complex64::new(u * f_diag.im, -u * f_diag.re);
    }
}
