//! Explicit fourth-order Runge-Kutta propagation with norm and edge
//! monitoring.
//!
//! No renormalization is ever applied during evolution: norm drift is a
//! diagnostic, and a drift beyond tolerance aborts the run instead of being
//! silently corrected.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_complex::Complex64;

use crate::lattice::{rhs_into, LatticeSpec, Wavefunction};
use crate::observables::{self, ObservableRecord};
use crate::pulse::Drive;

/// Sites counted as "edge" by the contamination monitor.
pub const EDGE_MARGIN: usize = 3;

/// RK4 is stable on the imaginary axis for |lambda dt| below about 2.83;
/// the configured bound keeps a small margin under it.
pub const RK4_STABILITY_CONSTANT: f64 = 2.8;

#[derive(Debug, Clone, PartialEq)]
pub struct IntegratorConfig {
    /// Time step, units of hbar/J.
    pub dt: f64,
    pub t_final: f64,
    /// Sampling period for scalar observables.
    pub record_interval: f64,
    /// Sampling period for one-particle density snapshots (coarser by
    /// default; snapshots are large).
    pub marginal_interval: f64,
    /// Max tolerated |1 - norm| at any sample.
    pub norm_tolerance: f64,
    /// Max tolerated probability within [`EDGE_MARGIN`] sites of an edge.
    pub edge_tolerance: f64,
    /// Relative-coordinate window used for the bound fraction observable.
    pub w_bound: usize,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig {
            dt: 1e-3,
            t_final: 100.0,
            record_interval: 0.1,
            marginal_interval: 1.0,
            norm_tolerance: 1e-6,
            edge_tolerance: 1e-8,
            w_bound: 1,
        }
    }
}

impl IntegratorConfig {
    /// Largest stable step for this lattice and peak field amplitude:
    /// `2.8 / (8 J + U + B N)`, from the spectral bound of the centered-gauge
    /// Hamiltonian against the RK4 imaginary-axis stability region.
    pub fn stability_limit(lattice: &LatticeSpec, peak_field: f64) -> f64 {
        let spectral = 8.0 * lattice.hopping.abs()
            + lattice.interaction
            + peak_field.abs() * lattice.n_sites as f64;
        RK4_STABILITY_CONSTANT / spectral
    }

    /// Rejects non-positive intervals and a time step outside the stability
    /// bound. Called by [`evolve`]; also usable up front at configuration
    /// time.
    pub fn validate(&self, lattice: &LatticeSpec, peak_field: f64) -> Result<(), IntegratorError> {
        if !(self.dt > 0.0) {
            return Err(IntegratorError::BadConfig("dt must be > 0"));
        }
        if !(self.t_final >= 0.0) {
            return Err(IntegratorError::BadConfig("t_final must be >= 0"));
        }
        if !(self.record_interval > 0.0) || !(self.marginal_interval > 0.0) {
            return Err(IntegratorError::BadConfig("sampling intervals must be > 0"));
        }
        if !(self.norm_tolerance > 0.0) || !(self.edge_tolerance > 0.0) {
            return Err(IntegratorError::BadConfig("tolerances must be > 0"));
        }
        let limit = Self::stability_limit(lattice, peak_field);
        if self.dt >= limit {
            return Err(IntegratorError::UnstableTimeStep { dt: self.dt, limit });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum IntegratorError {
    BadConfig(&'static str),
    UnstableTimeStep { dt: f64, limit: f64 },
}

impl fmt::Display for IntegratorError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IntegratorError::BadConfig(msg) => write!(f, "bad integrator config: {msg}"),
            IntegratorError::UnstableTimeStep { dt, limit } => write!(
                f,
                "time step {dt} violates the RK4 stability bound {limit:.3e} for this lattice and pulse"
            ),
        }
    }
}

impl core::error::Error for IntegratorError {}

/// Errors raised while evolving.
#[derive(Debug, Clone, PartialEq)]
pub enum EvolveError {
    Config(IntegratorError),
    /// Initial state was not normalized to 1 within 1e-9.
    NotNormalized { norm: f64 },
    /// |1 - norm| exceeded the tolerance at a sample.
    NormDrift { time: f64, norm: f64 },
    /// Probability near an edge exceeded the tolerance: the lattice is too
    /// small for this run and the result is invalid.
    EdgeContamination { time: f64, probability: f64 },
}

impl fmt::Display for EvolveError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EvolveError::Config(e) => write!(f, "{e}"),
            EvolveError::NotNormalized { norm } => {
                write!(f, "initial state norm {norm} is not 1 within 1e-9")
            }
            EvolveError::NormDrift { time, norm } => {
                write!(f, "norm drifted to {norm} at t = {time}")
            }
            EvolveError::EdgeContamination { time, probability } => write!(
                f,
                "edge probability {probability:.3e} at t = {time}: lattice too small for this run"
            ),
        }
    }
}

impl core::error::Error for EvolveError {}

impl From<IntegratorError> for EvolveError {
    fn from(e: IntegratorError) -> Self {
        EvolveError::Config(e)
    }
}

/// Receives immutable snapshots during evolution.
pub trait RecordSink {
    fn record(&mut self, record: &ObservableRecord, state: &Wavefunction);

    /// One-particle density snapshot at the coarser marginal cadence.
    fn record_marginal(&mut self, _time: f64, _density: &[f64]) {}
}

/// Collects everything into vectors.
#[derive(Debug, Default, Clone)]
pub struct SeriesRecorder {
    pub records: Vec<ObservableRecord>,
    pub marginals: Vec<(f64, Vec<f64>)>,
}

impl RecordSink for SeriesRecorder {
    fn record(&mut self, record: &ObservableRecord, _state: &Wavefunction) {
        self.records.push(record.clone());
    }

    fn record_marginal(&mut self, time: f64, density: &[f64]) {
        self.marginals.push((time, density.to_vec()));
    }
}

/// Discards everything.
#[derive(Debug, Default, Clone, Copy)]
pub struct NullSink;

impl RecordSink for NullSink {
    fn record(&mut self, _record: &ObservableRecord, _state: &Wavefunction) {}
}

/// Summary returned alongside the final state.
#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub steps: u64,
    pub final_time: f64,
    pub max_norm_drift: f64,
    pub max_edge_probability: f64,
    /// Tracked only when the initial state is exchange-symmetric.
    pub max_exchange_asymmetry: Option<f64>,
    pub initial_centroid: (f64, f64),
}

/// Preallocated RK4 stage buffers.
struct Rk4Scratch {
    k1: Vec<Complex64>,
    k2: Vec<Complex64>,
    k3: Vec<Complex64>,
    k4: Vec<Complex64>,
    stage: Vec<Complex64>,
    zero_row: Vec<Complex64>,
    col_pot: Vec<f64>,
}

impl Rk4Scratch {
    fn new(n_sites: usize) -> Self {
        let z = Complex64::new(0.0, 0.0);
        Rk4Scratch {
            k1: vec![z; n_sites * n_sites],
            k2: vec![z; n_sites * n_sites],
            k3: vec![z; n_sites * n_sites],
            k4: vec![z; n_sites * n_sites],
            stage: vec![z; n_sites * n_sites],
            zero_row: vec![z; n_sites],
            col_pot: vec![0.0; n_sites],
        }
    }

    /// One classical RK4 step in place; the field is evaluated at the stage
    /// times t, t + dt/2 (shared by both middle stages) and t + dt.
    fn step<D: Drive + ?Sized>(
        &mut self,
        state: &mut Wavefunction,
        lattice: &LatticeSpec,
        drive: &D,
        dt: f64,
        origin: f64,
    ) {
        let ns = lattice.n_sites;
        let t = state.time;
        let f0 = drive.field_at(t);
        let fm = drive.field_at(t + 0.5 * dt);
        let f1 = drive.field_at(t + dt);
        let amps = &mut state.amplitudes;

        rhs_into(amps, ns, lattice, f0, origin, &self.zero_row, &mut self.col_pot, &mut self.k1);
        axpy(&mut self.stage, amps, 0.5 * dt, &self.k1);
        rhs_into(&self.stage, ns, lattice, fm, origin, &self.zero_row, &mut self.col_pot, &mut self.k2);
        axpy(&mut self.stage, amps, 0.5 * dt, &self.k2);
        rhs_into(&self.stage, ns, lattice, fm, origin, &self.zero_row, &mut self.col_pot, &mut self.k3);
        axpy(&mut self.stage, amps, dt, &self.k3);
        rhs_into(&self.stage, ns, lattice, f1, origin, &self.zero_row, &mut self.col_pot, &mut self.k4);

        let w = dt / 6.0;
        for ((((a, k1), k2), k3), k4) in amps
            .iter_mut()
            .zip(&self.k1)
            .zip(&self.k2)
            .zip(&self.k3)
            .zip(&self.k4)
        {
            *a += (*k1 + (*k2 + *k3) * 2.0 + *k4) * w;
        }
        state.time = t + dt;
    }
}

/// `out = base + scale * k`
fn axpy(out: &mut [Complex64], base: &[Complex64], scale: f64, k: &[Complex64]) {
    for ((o, b), kk) in out.iter_mut().zip(base).zip(k) {
        *o = *b + *kk * scale;
    }
}

/// Single RK4 step with the default centered gauge.
pub fn rk4_step<D: Drive + ?Sized>(
    state: &Wavefunction,
    lattice: &LatticeSpec,
    drive: &D,
    dt: f64,
) -> Wavefunction {
    rk4_step_with_origin(state, lattice, drive, dt, lattice.field_origin())
}

/// Single RK4 step with an explicit gauge origin for the field term.
pub fn rk4_step_with_origin<D: Drive + ?Sized>(
    state: &Wavefunction,
    lattice: &LatticeSpec,
    drive: &D,
    dt: f64,
    origin: f64,
) -> Wavefunction {
    let mut out = state.clone();
    let mut scratch = Rk4Scratch::new(lattice.n_sites);
    scratch.step(&mut out, lattice, drive, dt, origin);
    out
}

/// Propagates `state` to `t_final`, emitting observables to `sink` at each
/// record interval (and density snapshots at the marginal interval). Norm
/// drift and edge contamination abort with an error; the run report carries
/// the observed maxima.
pub fn evolve<D: Drive + ?Sized, S: RecordSink>(
    state: Wavefunction,
    lattice: &LatticeSpec,
    drive: &D,
    config: &IntegratorConfig,
    sink: &mut S,
) -> Result<(Wavefunction, RunReport), EvolveError> {
    config.validate(lattice, drive.peak_amplitude())?;
    let norm0 = state.norm_sqr();
    if (norm0 - 1.0).abs() > 1e-9 {
        return Err(EvolveError::NotNormalized { norm: norm0 });
    }

    let mut state = state;
    let origin = lattice.field_origin();
    let n_steps = libm::round(config.t_final / config.dt) as u64;
    let record_every = libm::round(config.record_interval / config.dt).max(1.0) as u64;
    let marginal_every = libm::round(config.marginal_interval / config.dt).max(1.0) as u64;

    let track_symmetry = state.exchange_asymmetry() < 1e-12;
    let initial_centroid = observables::centroid(&state);
    let mut report = RunReport {
        steps: 0,
        final_time: state.time,
        max_norm_drift: 0.0,
        max_edge_probability: 0.0,
        max_exchange_asymmetry: if track_symmetry { Some(0.0) } else { None },
        initial_centroid,
    };

    let mut scratch = Rk4Scratch::new(lattice.n_sites);
    let sample = |state: &Wavefunction,
                      report: &mut RunReport,
                      sink: &mut S,
                      with_marginal: bool|
     -> Result<(), EvolveError> {
        let norm = state.norm_sqr();
        let drift = (norm - 1.0).abs();
        if drift > report.max_norm_drift {
            report.max_norm_drift = drift;
        }
        if drift > config.norm_tolerance {
            return Err(EvolveError::NormDrift { time: state.time, norm });
        }
        let edge = state.edge_probability(EDGE_MARGIN);
        if edge > report.max_edge_probability {
            report.max_edge_probability = edge;
        }
        if edge > config.edge_tolerance {
            return Err(EvolveError::EdgeContamination { time: state.time, probability: edge });
        }
        if let Some(max_asym) = report.max_exchange_asymmetry.as_mut() {
            let asym = state.exchange_asymmetry();
            if asym > *max_asym {
                *max_asym = asym;
            }
        }

        let (c1, c2) = observables::centroid(state);
        let marginal = observables::marginal_density(state, 1);
        let (left, right) = observables::branch_split(&marginal, initial_centroid.0);
        let record = ObservableRecord {
            time: state.time,
            centroid_1: c1,
            centroid_2: c2,
            norm,
            purity: observables::purity(state),
            double_occupancy: observables::double_occupancy(state),
            bound_fraction: observables::bound_fraction(state, config.w_bound),
            left_fraction: left,
            right_fraction: right,
        };
        sink.record(&record, state);
        if with_marginal {
            sink.record_marginal(state.time, &marginal);
        }
        Ok(())
    };

    sample(&state, &mut report, sink, true)?;
    for step in 1..=n_steps {
        scratch.step(&mut state, lattice, drive, config.dt, origin);
        report.steps = step;
        report.final_time = state.time;
        if step % record_every == 0 || step == n_steps {
            let with_marginal = step % marginal_every == 0 || step == n_steps;
            sample(&state, &mut report, sink, with_marginal)?;
        }
    }
    Ok((state, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{build_initial_state, InitialStateSpec, LatticeSpec};
    use crate::pulse::{GaussianPulse, ZeroField};

    #[test]
    fn zero_dt_step_is_identity() {
        let lattice = LatticeSpec::new(16, 2.0).unwrap();
        let psi = build_initial_state(&lattice, &InitialStateSpec::centered(1.0, 0, 16)).unwrap();
        let stepped = rk4_step(&psi, &lattice, &ZeroField, 0.0);
        assert_eq!(stepped.amplitudes, psi.amplitudes);
        assert_eq!(stepped.time, psi.time);
    }

    #[test]
    fn single_step_norm_drift_is_tiny() {
        let lattice = LatticeSpec::new(32, 4.0).unwrap();
        let psi = build_initial_state(&lattice, &InitialStateSpec::centered(1.0, 0, 32)).unwrap();
        let stepped = rk4_step(&psi, &lattice, &ZeroField, 1e-3);
        assert!((stepped.norm_sqr() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn stability_bound_enforced() {
        let lattice = LatticeSpec::new(200, 4.0).unwrap();
        let pulse = GaussianPulse::from_impulse(core::f64::consts::PI, 1.0, 10.0).unwrap();
        let limit = IntegratorConfig::stability_limit(&lattice, pulse.amplitude);
        let config = IntegratorConfig { dt: limit * 1.01, t_final: 1.0, ..Default::default() };
        assert!(matches!(
            config.validate(&lattice, pulse.amplitude),
            Err(IntegratorError::UnstableTimeStep { .. })
        ));
        let config = IntegratorConfig { dt: limit * 0.5, t_final: 1.0, ..Default::default() };
        assert!(config.validate(&lattice, pulse.amplitude).is_ok());
    }

    #[test]
    fn evolve_rejects_unnormalized_state() {
        let lattice = LatticeSpec::new(16, 0.0).unwrap();
        let mut psi =
            build_initial_state(&lattice, &InitialStateSpec::centered(1.0, 0, 16)).unwrap();
        for a in &mut psi.amplitudes {
            *a *= 1.001;
        }
        let config = IntegratorConfig { t_final: 0.1, ..Default::default() };
        assert!(matches!(
            evolve(psi, &lattice, &ZeroField, &config, &mut NullSink),
            Err(EvolveError::NotNormalized { .. })
        ));
    }

    #[test]
    fn field_free_symmetric_state_centroid_is_static() {
        let lattice = LatticeSpec::new(96, 0.0).unwrap();
        let psi = build_initial_state(&lattice, &InitialStateSpec::centered(1.0, 0, 96)).unwrap();
        let config = IntegratorConfig { t_final: 10.0, ..Default::default() };
        let mut rec = SeriesRecorder::default();
        let (_, report) = evolve(psi, &lattice, &ZeroField, &config, &mut rec).unwrap();
        for r in &rec.records {
            assert!((r.centroid_1 - 48.0).abs() < 1e-6, "t={} c1={}", r.time, r.centroid_1);
            assert!((r.centroid_2 - 48.0).abs() < 1e-6);
        }
        assert!(report.max_norm_drift < 1e-9);
        assert!(report.max_exchange_asymmetry.unwrap() < 1e-12);
    }

    #[test]
    fn edge_contamination_fires_on_small_lattice() {
        // a packet this close to the wall spreads into the monitor window fast
        let lattice = LatticeSpec::new(16, 0.0).unwrap();
        let psi = build_initial_state(&lattice, &InitialStateSpec::centered(1.0, 0, 16)).unwrap();
        let config = IntegratorConfig { t_final: 5.0, ..Default::default() };
        match evolve(psi, &lattice, &ZeroField, &config, &mut NullSink) {
            Err(EvolveError::EdgeContamination { .. }) => {}
            other => panic!("expected EdgeContamination, got {other:?}"),
        }
    }
}
