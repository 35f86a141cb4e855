//! Semi-classical band structure and drift-velocity predictions.
//!
//! After an impulse `I` every wavevector shifts by `I` (units e = hbar = 1).
//! Free two-particle states disperse as `E = 4 J cos(k) cos(z)` (k the
//! center-of-mass momentum, z the relative momentum); bound pairs as
//! `E = sqrt(U^2 + 16 J^2 cos^2(k))`. The predicted drift velocity mixes the
//! two band derivatives with fit constants gamma and beta:
//!
//! `v(k) = gamma sin(k) cos(k) / sqrt(U^2 + 16 cos^2(k)) - beta sin(k) cos(z)`
//!
//! gamma and beta are obtained by linear least squares against measured
//! velocities.

use alloc::vec::Vec;
use core::f64::consts::{PI, TAU};
use core::fmt;

/// Band functions plus the fitted drift constants.
#[derive(Debug, Clone, PartialEq)]
pub struct DispersionModel {
    /// Hopping J.
    pub hopping: f64,
    /// Hubbard interaction U.
    pub interaction: f64,
    /// Bound-band fit constant; `None` until fitted or supplied.
    pub gamma: Option<f64>,
    /// Free-band fit constant; `None` until fitted or supplied.
    pub beta: Option<f64>,
    /// Relative momentum z; zero for the zero-relative-momentum initial
    /// states used throughout (cos z is absorbable into beta anyway).
    pub relative_momentum: f64,
}

impl DispersionModel {
    pub fn new(hopping: f64, interaction: f64) -> Self {
        DispersionModel {
            hopping,
            interaction,
            gamma: None,
            beta: None,
            relative_momentum: 0.0,
        }
    }

    pub fn with_constants(mut self, gamma: f64, beta: f64) -> Self {
        self.gamma = Some(gamma);
        self.beta = Some(beta);
        self
    }

    /// Free-state dispersion `E = 4 J cos(k) cos(z)`.
    pub fn free_energy(&self, k: f64, z: f64) -> f64 {
        4.0 * self.hopping * libm::cos(k) * libm::cos(z)
    }

    /// Bound-pair dispersion `E = sqrt(U^2 + 16 J^2 cos^2(k))`; band edges
    /// `[U, sqrt(U^2 + 16 J^2)]` over `k` in `[0, pi/2]`.
    pub fn bound_energy(&self, k: f64) -> f64 {
        let c = libm::cos(k);
        let j2 = self.hopping * self.hopping;
        libm::sqrt(self.interaction * self.interaction + 16.0 * j2 * c * c)
    }

    /// Semi-classical drift velocity at momentum `k`.
    pub fn predicted_velocity(&self, k: f64) -> Result<f64, SemiclassicalError> {
        let (gamma, beta) = match (self.gamma, self.beta) {
            (Some(g), Some(b)) => (g, b),
            _ => return Err(SemiclassicalError::UnfittedModel),
        };
        let (b_term, f_term) = self.basis(k);
        Ok(gamma * b_term + beta * f_term)
    }

    /// The two basis functions the velocity is linear in:
    /// `(sin k cos k / sqrt(U^2 + 16 cos^2 k), -sin k cos z)`.
    fn basis(&self, k: f64) -> (f64, f64) {
        let s = libm::sin(k);
        let c = libm::cos(k);
        let u = self.interaction;
        let bound = s * c / libm::sqrt(u * u + 16.0 * c * c);
        let free = -s * libm::cos(self.relative_momentum);
        (bound, free)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SemiclassicalError {
    /// gamma/beta not set; fit or supply them first.
    UnfittedModel,
    /// The least-squares design matrix is rank-deficient (data spans too
    /// little of the impulse period).
    DegenerateFit,
    /// Fewer than 6 data points, or less than half the impulse period
    /// covered.
    InsufficientData,
}

impl fmt::Display for SemiclassicalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SemiclassicalError::UnfittedModel => write!(f, "gamma/beta unset: fit the model first"),
            SemiclassicalError::DegenerateFit => write!(f, "rank-deficient fit design matrix"),
            SemiclassicalError::InsufficientData => {
                write!(f, "need >= 6 points spanning at least half the impulse period")
            }
        }
    }
}

impl core::error::Error for SemiclassicalError {}

/// Wavevector after an electric pulse: `k = k0 + I`, reduced to `(-pi, pi]`.
pub fn momentum_after_pulse(k0: f64, impulse: f64) -> f64 {
    reduce_to_zone(k0 + impulse)
}

/// Brillouin-zone reduction to `(-pi, pi]`.
pub fn reduce_to_zone(k: f64) -> f64 {
    let mut r = k - TAU * libm::round(k / TAU);
    if r <= -PI {
        r += TAU;
    }
    r
}

/// Fit of gamma and beta against measured `(impulse, velocity)` pairs, with
/// `k` derived from a zero initial momentum. The model is linear in the two
/// constants, so the normal equations solve it in closed form.
pub fn fit_gamma_beta(
    data: &[(f64, f64)],
    model: &DispersionModel,
) -> Result<DispersionModel, SemiclassicalError> {
    if data.len() < 6 {
        return Err(SemiclassicalError::InsufficientData);
    }
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for (i, _) in data {
        lo = lo.min(*i);
        hi = hi.max(*i);
    }
    if hi - lo < PI {
        return Err(SemiclassicalError::InsufficientData);
    }

    // normal equations for v = gamma * phi_b + beta * phi_f
    let mut a11 = 0.0;
    let mut a12 = 0.0;
    let mut a22 = 0.0;
    let mut b1 = 0.0;
    let mut b2 = 0.0;
    for (impulse, v) in data {
        let k = momentum_after_pulse(0.0, *impulse);
        let (pb, pf) = model.basis(k);
        a11 += pb * pb;
        a12 += pb * pf;
        a22 += pf * pf;
        b1 += pb * v;
        b2 += pf * v;
    }
    let det = a11 * a22 - a12 * a12;
    let scale = (a11 * a22).max(a12 * a12);
    if det.abs() <= 1e-12 * scale.max(1e-300) {
        return Err(SemiclassicalError::DegenerateFit);
    }
    let gamma = (b1 * a22 - b2 * a12) / det;
    let beta = (a11 * b2 - a12 * b1) / det;
    Ok(model.clone().with_constants(gamma, beta))
}

/// Coefficient of determination of predictions against observations.
pub fn coefficient_of_determination(observed: &[f64], predicted: &[f64]) -> f64 {
    assert_eq!(observed.len(), predicted.len());
    let n = observed.len() as f64;
    let mean: f64 = observed.iter().sum::<f64>() / n;
    let ss_tot: f64 = observed.iter().map(|y| (y - mean) * (y - mean)).sum();
    let ss_res: f64 = observed
        .iter()
        .zip(predicted)
        .map(|(y, p)| (y - p) * (y - p))
        .sum();
    1.0 - ss_res / ss_tot
}

/// Residuals of a fitted model over `(impulse, velocity)` data.
pub fn fit_residuals(
    data: &[(f64, f64)],
    model: &DispersionModel,
) -> Result<Vec<f64>, SemiclassicalError> {
    data.iter()
        .map(|(impulse, v)| {
            let k = momentum_after_pulse(0.0, *impulse);
            model.predicted_velocity(k).map(|p| v - p)
        })
        .collect()
}
