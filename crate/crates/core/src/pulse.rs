//! Gaussian pulsed electric field `F(t) = B exp[-(t - tau)^2 / (4 rho^2)]`.
//!
//! All runs are parameterized by the pulse impulse `I = int F dt`, which has
//! the closed form `I = 2 sqrt(pi) B rho`; the amplitude is calibrated from a
//! target impulse.

use core::fmt;

/// Sqrt(pi), to full f64 precision.
const SQRT_PI: f64 = 1.772453850905516;

/// The field is treated as exactly zero beyond this many widths from the
/// pulse center; the impulse truncation error is below 1e-22, and the
/// integrator uses the cutoff as a field-off fast path.
pub const SUPPORT_WIDTHS: f64 = 10.0;

/// A time-dependent field the integrator can sample at stage times.
pub trait Drive {
    fn field_at(&self, t: f64) -> f64;

    /// Largest |F(t)| the drive ever produces; feeds the RK4 stability bound.
    fn peak_amplitude(&self) -> f64;
}

/// Single Gaussian pulse.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianPulse {
    /// Peak field B.
    pub amplitude: f64,
    /// Duration parameter rho.
    pub width: f64,
    /// Time of reference tau (pulse center).
    pub center: f64,
}

impl GaussianPulse {
    pub fn new(amplitude: f64, width: f64, center: f64) -> Result<Self, PulseError> {
        if !(width > 0.0) {
            return Err(PulseError::BadSpec("pulse width must be > 0"));
        }
        Ok(GaussianPulse { amplitude, width, center })
    }

    /// Calibrates the amplitude so that `int F dt = target_impulse`:
    /// `B = I / (2 sqrt(pi) rho)`.
    pub fn from_impulse(target_impulse: f64, width: f64, center: f64) -> Result<Self, PulseError> {
        if !(width > 0.0) {
            return Err(PulseError::BadSpec("pulse width must be > 0"));
        }
        Ok(GaussianPulse {
            amplitude: target_impulse / (2.0 * SQRT_PI * width),
            width,
            center,
        })
    }

    /// Closed-form impulse `2 sqrt(pi) B rho`.
    pub fn impulse(&self) -> f64 {
        2.0 * SQRT_PI * self.amplitude * self.width
    }

    /// Time past which the field (and its truncated support) has fully
    /// switched off.
    pub fn support_end(&self) -> f64 {
        self.center + SUPPORT_WIDTHS * self.width
    }
}

impl Drive for GaussianPulse {
    fn field_at(&self, t: f64) -> f64 {
        let d = t - self.center;
        if d.abs() > SUPPORT_WIDTHS * self.width {
            return 0.0;
        }
        self.amplitude * libm::exp(-d * d / (4.0 * self.width * self.width))
    }

    fn peak_amplitude(&self) -> f64 {
        self.amplitude.abs()
    }
}

/// Several pulses applied additively.
impl Drive for [GaussianPulse] {
    fn field_at(&self, t: f64) -> f64 {
        self.iter().map(|p| p.field_at(t)).sum()
    }

    fn peak_amplitude(&self) -> f64 {
        self.iter().map(|p| p.amplitude.abs()).sum()
    }
}

/// No external field.
#[derive(Debug, Clone, Copy, Default)]
pub struct ZeroField;

impl Drive for ZeroField {
    fn field_at(&self, _t: f64) -> f64 {
        0.0
    }

    fn peak_amplitude(&self) -> f64 {
        0.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum PulseError {
    BadSpec(&'static str),
}

impl fmt::Display for PulseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PulseError::BadSpec(msg) => write!(f, "bad pulse spec: {msg}"),
        }
    }
}

impl core::error::Error for PulseError {}
