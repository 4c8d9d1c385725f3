//! Stuart-Landau oscillator network annealer.
//!
//! `dpsi_n/dt = (P - |psi_n|^2) psi_n + sum_m J_nm psi_m`, integrated with a
//! two-step Adams-Bashforth scheme (explicit Euler bootstrap). The gain `P`
//! is ramped from `-lambda_max` to `+lambda_max` and then held; the phases of
//! the settled amplitudes approximate an XY minimum for the couplings `J`.

use std::io::Write;
use std::path::Path;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{wrap_phase, CouplingMatrix, SpinConfiguration};

/// Largest eigenvalue of a symmetric matrix by shifted power iteration.
pub fn lambda_max(couplings: &CouplingMatrix) -> f64 {
    power_iteration(couplings.n(), couplings.as_dense(), 1e-8)
}

/// Like [`lambda_max`] for a raw row-major matrix; rejects asymmetric input.
pub fn lambda_max_dense(n: usize, matrix: &[f64]) -> Result<f64> {
    if matrix.len() != n * n {
        return Err(Error::DimensionMismatch {
            expected: n * n,
            got: matrix.len(),
        });
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let (a, b) = (matrix[i * n + j], matrix[j * n + i]);
            if (a - b).abs() > 1e-12 * (1.0 + a.abs()) {
                return Err(Error::InvalidArgument(format!(
                    "matrix is not symmetric at ({i}, {j})"
                )));
            }
        }
    }
    Ok(power_iteration(n, matrix, 1e-8))
}

fn power_iteration(n: usize, a: &[f64], tol: f64) -> f64 {
    if n == 0 {
        return 0.0;
    }
    // Gershgorin shift makes A + sI positive semidefinite, so the dominant
    // eigenvalue of the shifted matrix is the algebraically largest one of A.
    let shift = (0..n)
        .map(|i| a[i * n..(i + 1) * n].iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max);
    if shift == 0.0 {
        return 0.0;
    }
    let mut v: Vec<f64> = (0..n).map(|i| 1.0 + 0.37 * ((i + 1) as f64).sin()).collect();
    normalize(&mut v);
    let mut w = vec![0.0; n];
    let mut lambda = 0.0;
    for _ in 0..1_000_000 {
        for i in 0..n {
            w[i] = shift * v[i] + dot(&a[i * n..(i + 1) * n], &v);
        }
        lambda = dot(&v, &w) - shift;
        // residual of A v - lambda v
        let res = (0..n)
            .map(|i| (w[i] - shift * v[i] - lambda * v[i]).powi(2))
            .sum::<f64>()
            .sqrt();
        std::mem::swap(&mut v, &mut w);
        normalize(&mut v);
        if res < tol * shift.max(1.0) {
            break;
        }
    }
    lambda
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn normalize(v: &mut [f64]) {
    let norm = dot(v, v).sqrt();
    if norm > 0.0 {
        v.iter_mut().for_each(|x| *x /= norm);
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OscillatorState {
    pub amplitudes: Vec<Complex64>,
    pub time: f64,
}

impl OscillatorState {
    pub fn new(amplitudes: Vec<Complex64>) -> Self {
        OscillatorState {
            amplitudes,
            time: 0.0,
        }
    }

    pub fn phases(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|z| z.arg()).collect()
    }

    pub fn intensities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|z| z.norm_sqr()).collect()
    }
}

fn rhs(couplings: &CouplingMatrix, gain: f64, psi: &[Complex64], out: &mut [Complex64]) {
    let n = psi.len();
    for i in 0..n {
        let row = couplings.row(i);
        let mut acc = Complex64::new(0.0, 0.0);
        for (j, &c) in row.iter().enumerate() {
            acc += psi[j] * c;
        }
        out[i] = psi[i] * (gain - psi[i].norm_sqr()) + acc;
    }
}

/// Two-step Adams-Bashforth stepper. The first step after construction (or
/// [`reset`](Self::reset)) is explicit Euler.
#[derive(Clone, Debug, Default)]
pub struct Stepper {
    prev: Option<Vec<Complex64>>,
    cur: Vec<Complex64>,
}

impl Stepper {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn reset(&mut self) {
        self.prev = None;
    }

    pub fn step(
        &mut self,
        state: &mut OscillatorState,
        couplings: &CouplingMatrix,
        gain: f64,
        dt: f64,
    ) -> Result<()> {
        let n = state.amplitudes.len();
        if n != couplings.n() {
            return Err(Error::DimensionMismatch {
                expected: couplings.n(),
                got: n,
            });
        }
        self.cur.resize(n, Complex64::new(0.0, 0.0));
        rhs(couplings, gain, &state.amplitudes, &mut self.cur);
        match &self.prev {
            Some(prev) => {
                for i in 0..n {
                    state.amplitudes[i] += (self.cur[i] * 3.0 - prev[i]) * (0.5 * dt);
                }
            }
            None => {
                for i in 0..n {
                    state.amplitudes[i] += self.cur[i] * dt;
                }
            }
        }
        state.time += dt;
        let prev = self.prev.get_or_insert_with(Vec::new);
        std::mem::swap(prev, &mut self.cur);
        if state.amplitudes.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Divergence {
                time: state.time,
                reason: format!("non-finite amplitude (dt = {dt} too large?)"),
            });
        }
        Ok(())
    }
}

/// One step from a fresh stepper (explicit Euler).
pub fn step(
    state: &OscillatorState,
    couplings: &CouplingMatrix,
    gain: f64,
    dt: f64,
) -> Result<OscillatorState> {
    let mut next = state.clone();
    Stepper::new().step(&mut next, couplings, gain, dt)?;
    Ok(next)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScheduleMode {
    Ramp,
    Constant,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AnnealSchedule {
    pub mode: ScheduleMode,
    /// Gain at `t = 0`; `None` means `-lambda_max` for a ramp, 0 for constant.
    pub p_start: Option<f64>,
    /// Gain at `t = total_time`; `None` means `+lambda_max`. Ignored in constant mode.
    pub p_end: Option<f64>,
    pub total_time: f64,
    pub dt: f64,
    pub hold_time: f64,
    /// Maximum pairwise phase drift (rad) over the trailing window.
    pub convergence_tol: f64,
    pub noise_amplitude: f64,
    pub seed: u64,
    /// Record a trace row every this many steps.
    pub trace_every: Option<usize>,
}

impl Default for AnnealSchedule {
    fn default() -> Self {
        AnnealSchedule {
            mode: ScheduleMode::Ramp,
            p_start: None,
            p_end: None,
            total_time: 1000.0,
            dt: 1e-2,
            hold_time: 200.0,
            convergence_tol: 1e-3,
            noise_amplitude: 1e-3,
            seed: 0,
            trace_every: None,
        }
    }
}

impl AnnealSchedule {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidArgument(m.to_string()));
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return bad("schedule dt must be > 0");
        }
        if !(self.total_time > 0.0 && self.total_time.is_finite()) {
            return bad("schedule total_time must be > 0");
        }
        if !(self.hold_time >= 0.0 && self.hold_time.is_finite()) {
            return bad("schedule hold_time must be >= 0");
        }
        if self.convergence_tol <= 0.0 {
            return bad("schedule convergence_tol must be > 0");
        }
        Ok(())
    }

    /// Gain at time `t` given the coupling spectrum edge `lambda`.
    pub fn gain_at(&self, t: f64, lambda: f64) -> f64 {
        match self.mode {
            ScheduleMode::Constant => self.p_start.unwrap_or(0.0),
            ScheduleMode::Ramp => {
                let p0 = self.p_start.unwrap_or(-lambda);
                let p1 = self.p_end.unwrap_or(lambda);
                let s = (t / self.total_time).clamp(0.0, 1.0);
                p0 + (p1 - p0) * s
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub time: f64,
    pub gain: f64,
    pub amplitudes: Vec<f64>,
    pub phases: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnnealOutcome {
    pub spins: SpinConfiguration,
    pub converged: bool,
    /// Largest pairwise phase drift over the trailing window (rad).
    pub drift: f64,
    pub final_state: OscillatorState,
    pub trace: Vec<TraceRow>,
}

/// Complex Gaussian noise `amplitude * (x + i y)`, seeded.
pub fn initial_noise(n: usize, amplitude: f64, seed: u64) -> Vec<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            Complex64::new(re, im) * amplitude
        })
        .collect()
}

pub fn anneal(couplings: &CouplingMatrix, schedule: &AnnealSchedule) -> Result<AnnealOutcome> {
    let init = initial_noise(couplings.n(), schedule.noise_amplitude, schedule.seed);
    anneal_from(couplings, schedule, init)
}

/// Runs the schedule from an explicit initial state.
pub fn anneal_from(
    couplings: &CouplingMatrix,
    schedule: &AnnealSchedule,
    initial: Vec<Complex64>,
) -> Result<AnnealOutcome> {
    schedule.validate()?;
    let n = couplings.n();
    if n < 2 {
        return Err(Error::InvalidArgument(format!("anneal needs n >= 2, got {n}")));
    }
    if initial.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: initial.len(),
        });
    }
    let lambda = lambda_max(couplings);
    let ramp_steps = (schedule.total_time / schedule.dt).round() as usize;
    let hold_steps = (schedule.hold_time / schedule.dt).round() as usize;
    let window_steps = (hold_steps / 10).max(1);
    let total_steps = ramp_steps + hold_steps;
    let window_start = total_steps.saturating_sub(window_steps);

    let mut state = OscillatorState::new(initial);
    let mut stepper = Stepper::new();
    let mut trace = Vec::new();
    let mut reference: Option<Vec<f64>> = None;
    let mut drift: f64 = 0.0;

    for s in 0..total_steps {
        if let Some(every) = schedule.trace_every {
            if every > 0 && s % every == 0 {
                trace.push(trace_row(&state, schedule.gain_at(state.time, lambda)));
            }
        }
        let gain = if s < ramp_steps {
            schedule.gain_at(s as f64 * schedule.dt, lambda)
        } else {
            schedule.gain_at(schedule.total_time, lambda)
        };
        stepper.step(&mut state, couplings, gain, schedule.dt)?;
        let limit = 1e3 * gain.abs().max(lambda).max(1.0);
        if let Some(z) = state.amplitudes.iter().find(|z| z.norm_sqr() > limit) {
            return Err(Error::Divergence {
                time: state.time,
                reason: format!("|psi|^2 = {} exceeds {limit}", z.norm_sqr()),
            });
        }
        if s + 1 >= window_start {
            let rel = relative_phases(&state.amplitudes);
            match &reference {
                None => reference = Some(rel),
                Some(r) => {
                    for (a, b) in rel.iter().zip(r) {
                        drift = drift.max(wrap_phase(a - b).abs());
                    }
                }
            }
        }
    }
    if schedule.trace_every.is_some_and(|e| e > 0) {
        trace.push(trace_row(&state, schedule.gain_at(state.time, lambda)));
    }

    let peak = state.amplitudes.iter().map(|z| z.norm_sqr()).fold(0.0, f64::max);
    if peak < 1e-24 {
        return Err(Error::NotConverged("all amplitudes decayed to zero".into()));
    }
    let converged = drift < schedule.convergence_tol;
    Ok(AnnealOutcome {
        spins: SpinConfiguration::new(state.phases())?,
        converged,
        drift,
        final_state: state,
        trace,
    })
}

/// `arg(psi_n conj(psi_0))`; the global phase is gauge.
fn relative_phases(psi: &[Complex64]) -> Vec<f64> {
    let r = psi[0].conj();
    psi.iter().map(|z| (z * r).arg()).collect()
}

fn trace_row(state: &OscillatorState, gain: f64) -> TraceRow {
    TraceRow {
        time: state.time,
        gain,
        amplitudes: state.amplitudes.iter().map(|z| z.norm()).collect(),
        phases: state.phases(),
    }
}

/// Independent runs with seeds `schedule.seed + i`, returned in run order.
pub fn multi_anneal(
    couplings: &CouplingMatrix,
    schedule: &AnnealSchedule,
    runs: usize,
) -> Result<Vec<AnnealOutcome>> {
    if runs == 0 {
        return Err(Error::InvalidArgument("runs must be >= 1".into()));
    }
    (0..runs)
        .into_par_iter()
        .map(|i| {
            let mut s = schedule.clone();
            s.seed = schedule.seed.wrapping_add(i as u64);
            anneal(couplings, &s)
        })
        .collect()
}

/// CSV with columns `t,P,amp_0..amp_{n-1},phase_0..phase_{n-1}`.
pub fn write_trace_csv(trace: &[TraceRow], path: &Path) -> Result<()> {
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    let n = trace.first().map_or(0, |r| r.amplitudes.len());
    let mut header = vec!["t".to_string(), "P".to_string()];
    header.extend((0..n).map(|i| format!("amp_{i}")));
    header.extend((0..n).map(|i| format!("phase_{i}")));
    writeln!(out, "{}", header.join(","))?;
    for row in trace {
        let mut fields = vec![row.time.to_string(), row.gain.to_string()];
        fields.extend(row.amplitudes.iter().map(|a| a.to_string()));
        fields.extend(row.phases.iter().map(|p| p.to_string()));
        writeln!(out, "{}", fields.join(","))?;
    }
    Ok(())
}
