//! Driven-dissipative condensate networks: a 2D generalized Gross-Pitaevskii
//! equation coupled to an exciton reservoir, pumped by annular lasers.
//!
//! ```text
//! i dPsi/dt = [-(hbar/2m) lap + G (n + P/W) + alpha |Psi|^2 + (i/2)(R n - gamma)] Psi
//!     dn/dt = -(Gamma + R |Psi|^2) n + P
//! ```
//!
//! Units are ps and um; `alpha`, `G` and `R` are stored as rates (their
//! energy values divided by hbar). Integration is split-step: kinetic
//! propagation in Fourier space, local terms and the reservoir in real space.

use std::f64::consts::PI;
use std::path::Path;
use std::sync::Arc;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{wrap_phase, SpinConfiguration, WeightedGraph};

pub const HBAR: f64 = 0.6582119569;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GpeParams {
    /// Polariton mass, meV ps^2 um^-2.
    pub mass: f64,
    /// Condensate decay, 1/ps.
    pub gamma: f64,
    /// Reservoir decay, 1/ps.
    pub gamma_r: f64,
    /// Polariton-polariton interaction, um^2/ps.
    pub alpha: f64,
    /// Polariton-reservoir interaction, um^2/ps.
    pub g: f64,
    /// Stimulated scattering rate, um^2/ps.
    pub r: f64,
    /// Active to inactive exciton ratio, 1/ps.
    pub w: f64,
    pub hbar: f64,
}

impl Default for GpeParams {
    fn default() -> Self {
        let alpha = 0.007 / HBAR;
        GpeParams {
            mass: 0.28,
            gamma: 1.0 / 5.5,
            gamma_r: 1.0 / 5.5,
            alpha,
            g: 10.0 * alpha,
            r: 0.0989 / HBAR,
            w: 0.035,
            hbar: HBAR,
        }
    }
}

impl GpeParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("mass", self.mass),
            ("gamma", self.gamma),
            ("gamma_r", self.gamma_r),
            ("alpha", self.alpha),
            ("g", self.g),
            ("r", self.r),
            ("w", self.w),
            ("hbar", self.hbar),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::InvalidArgument(format!("{name} must be finite and >= 0, got {v}")));
            }
        }
        if self.mass <= 0.0 || self.w <= 0.0 || self.hbar <= 0.0 {
            return Err(Error::InvalidArgument("mass, w and hbar must be positive".into()));
        }
        Ok(())
    }

    /// `hbar / 2m`, um^2/ps.
    pub fn kinetic(&self) -> f64 {
        self.hbar / (2.0 * self.mass)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PumpLayout {
    /// Ring centers, um, relative to the domain center.
    pub centers: Vec<[f64; 2]>,
    pub ring_radius: f64,
    /// Gaussian width of the annulus, um.
    pub ring_width: f64,
    /// Domain side, um.
    pub length: f64,
    /// Grid points per side (power of two).
    pub points: usize,
}

impl Default for PumpLayout {
    fn default() -> Self {
        PumpLayout {
            centers: Vec::new(),
            ring_radius: 4.05,
            ring_width: 2.5,
            length: 100.0,
            points: 256,
        }
    }
}

/// Nearest-neighbor spacing of the experimental ring lattice, um.
pub const DEFAULT_SPACING: f64 = 20.5;

impl PumpLayout {
    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| Error::parse(path, e.to_string()))
    }

    pub fn with_centers(centers: Vec<[f64; 2]>) -> Self {
        PumpLayout {
            centers,
            ..Default::default()
        }
    }

    /// House graph vertices: a square `0-1-2-3` with side `spacing` and
    /// vertex 4 above edge `0-1` at distance `spacing` from both ends.
    pub fn house(spacing: f64) -> Self {
        let h = spacing * 3f64.sqrt() / 2.0;
        let pts = [
            [-spacing / 2.0, 0.0],
            [spacing / 2.0, 0.0],
            [spacing / 2.0, -spacing],
            [-spacing / 2.0, -spacing],
            [0.0, h],
        ];
        let mid = (h - spacing) / 2.0;
        Self::with_centers(pts.iter().map(|p| [p[0], p[1] - mid]).collect())
    }

    pub fn pair(spacing: f64) -> Self {
        Self::with_centers(vec![[-spacing / 2.0, 0.0], [spacing / 2.0, 0.0]])
    }

    pub fn single() -> Self {
        Self::with_centers(vec![[0.0, 0.0]])
    }

    pub fn dx(&self) -> f64 {
        self.length / self.points as f64
    }

    /// Unit-weight graph joining rings within 5% of the smallest spacing.
    pub fn neighbor_graph(&self) -> Result<WeightedGraph> {
        let n = self.centers.len();
        let dist = |a: usize, b: usize| {
            let (p, q) = (self.centers[a], self.centers[b]);
            (p[0] - q[0]).hypot(p[1] - q[1])
        };
        let mut nearest = f64::INFINITY;
        for a in 0..n {
            for b in (a + 1)..n {
                nearest = nearest.min(dist(a, b));
            }
        }
        let mut edges = Vec::new();
        for a in 0..n {
            for b in (a + 1)..n {
                if dist(a, b) <= 1.05 * nearest {
                    edges.push((a, b, 1.0));
                }
            }
        }
        WeightedGraph::from_edges(n, &edges)
    }

    /// Grid coordinate of index `j`.
    pub fn coord(&self, j: usize) -> f64 {
        -self.length / 2.0 + j as f64 * self.dx()
    }

    pub fn validate(&self, margin: f64) -> Result<()> {
        if self.points < 8 || !self.points.is_power_of_two() {
            return Err(Error::InvalidArgument(format!(
                "grid points must be a power of two >= 8, got {}",
                self.points
            )));
        }
        if !(self.length > 0.0 && self.ring_radius >= 0.0 && self.ring_width > 0.0) {
            return Err(Error::InvalidArgument("length, ring radius and width must be positive".into()));
        }
        let reach = self.ring_radius + 3.0 * self.ring_width;
        let limit = self.length / 2.0 - margin;
        for c in &self.centers {
            if c[0].abs() + reach > limit || c[1].abs() + reach > limit {
                return Err(Error::InvalidArgument(format!(
                    "ring at ({}, {}) overlaps the domain boundary",
                    c[0], c[1]
                )));
            }
        }
        Ok(())
    }
}

/// `P0 sum_i exp(-(|r - r_i| - R)^2 / 2 w^2)` on the grid, row-major in y.
pub fn build_pump(layout: &PumpLayout, p0: f64) -> Vec<f64> {
    let n = layout.points;
    let mut pump = vec![0.0; n * n];
    let w2 = 2.0 * layout.ring_width * layout.ring_width;
    for (iy, row) in pump.chunks_mut(n).enumerate() {
        let y = layout.coord(iy);
        for (ix, p) in row.iter_mut().enumerate() {
            let x = layout.coord(ix);
            *p = p0
                * layout
                    .centers
                    .iter()
                    .map(|c| {
                        let d = (x - c[0]).hypot(y - c[1]) - layout.ring_radius;
                        (-d * d / w2).exp()
                    })
                    .sum::<f64>();
        }
    }
    pump
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SimConfig {
    pub dt: f64,
    pub t_end: f64,
    /// Width of the absorbing frame at the domain edge, um; 0 disables it.
    pub absorber_width: f64,
    /// Peak extra decay rate inside the frame, 1/ps.
    pub absorber_strength: f64,
    /// Standard deviation of each component of the initial field, 1/um.
    pub noise: f64,
    /// Discard wavenumbers above 2/3 of the grid cutoff every step.
    pub dealias: bool,
    /// Interval between stationarity samples, ps.
    pub sample_every: f64,
    /// Trailing window checked for stationarity, ps.
    pub window: f64,
    /// Allowed drift of pairwise phases over the window, rad.
    pub phase_tol: f64,
    pub seed: u64,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            dt: 0.02,
            t_end: 2000.0,
            absorber_width: 10.0,
            absorber_strength: 5.0,
            noise: 1e-3,
            dealias: true,
            sample_every: 1.0,
            window: 50.0,
            phase_tol: 1e-2,
            seed: 0,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.t_end >= 0.0 && self.sample_every > 0.0 && self.window >= 0.0) {
            return Err(Error::InvalidArgument("dt, t_end, sample_every and window must be positive".into()));
        }
        if self.absorber_width < 0.0 || self.absorber_strength < 0.0 || self.noise < 0.0 {
            return Err(Error::InvalidArgument("absorber and noise settings must be >= 0".into()));
        }
        Ok(())
    }
}

/// Complex field and reservoir on the grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FieldState {
    pub psi: Vec<Complex64>,
    pub n: Vec<f64>,
    pub t: f64,
}

impl FieldState {
    pub fn norm(&self, dx: f64) -> f64 {
        self.psi.iter().map(|z| z.norm_sqr()).sum::<f64>() * dx * dx
    }
}

/// Seeded complex Gaussian noise with zero reservoir.
pub fn initial_state(points: usize, noise: f64, seed: u64) -> FieldState {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let psi = (0..points * points)
        .map(|_| {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            Complex64::new(noise * re, noise * im)
        })
        .collect();
    FieldState {
        psi,
        n: vec![0.0; points * points],
        t: 0.0,
    }
}

/// Extra decay rate in the absorbing frame, quadratic in penetration depth.
fn absorber(layout: &PumpLayout, width: f64, strength: f64) -> Vec<f64> {
    let n = layout.points;
    let half = layout.length / 2.0;
    let depth = |c: f64| -> f64 {
        if width <= 0.0 {
            0.0
        } else {
            ((c.abs() - (half - width)) / width).max(0.0)
        }
    };
    let mut out = vec![0.0; n * n];
    for iy in 0..n {
        let dy = depth(layout.coord(iy));
        for ix in 0..n {
            let dx = depth(layout.coord(ix));
            out[iy * n + ix] = strength * (dx * dx + dy * dy).min(1.0);
        }
    }
    out
}

/// Split-step integrator for one layout and pump.
pub struct Simulation {
    params: GpeParams,
    points: usize,
    dx: f64,
    dt: f64,
    pump: Vec<f64>,
    /// `G P / W`, constant part of the blueshift.
    pump_shift: Vec<f64>,
    loss: Vec<f64>,
    half_kinetic: Vec<Complex64>,
    full_kinetic: Vec<Complex64>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    scratch: Vec<Complex64>,
    freeze_reservoir: bool,
    pub state: FieldState,
}

impl Simulation {
    pub fn new(
        params: &GpeParams,
        layout: &PumpLayout,
        pump: Vec<f64>,
        cfg: &SimConfig,
        state: FieldState,
    ) -> Result<Self> {
        params.validate()?;
        cfg.validate()?;
        layout.validate(0.0)?;
        let n = layout.points;
        if pump.len() != n * n || state.psi.len() != n * n || state.n.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                got: pump.len().min(state.psi.len()).min(state.n.len()),
            });
        }
        let dk = 2.0 * PI / layout.length;
        let k: Vec<f64> = (0..n)
            .map(|i| if i < n / 2 { i as f64 } else { i as f64 - n as f64 } * dk)
            .collect();
        let kin = params.kinetic();
        let norm = 1.0 / (n * n) as f64;
        let cutoff = if cfg.dealias {
            (2.0 / 3.0 * PI / layout.dx()).powi(2)
        } else {
            f64::INFINITY
        };
        let mut half_kinetic = Vec::with_capacity(n * n);
        let mut full_kinetic = Vec::with_capacity(n * n);
        let mut project = Vec::with_capacity(n * n);
        for a in 0..n {
            for b in 0..n {
                let k2 = k[a] * k[a] + k[b] * k[b];
                let keep = if k2 <= cutoff { norm } else { 0.0 };
                let e = kin * k2 * cfg.dt;
                half_kinetic.push(Complex64::from_polar(keep, -0.5 * e));
                full_kinetic.push(Complex64::from_polar(keep, -e));
                project.push(Complex64::new(keep, 0.0));
            }
        }
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(n);
        let inverse = planner.plan_fft_inverse(n);
        let scratch_len = forward.get_inplace_scratch_len().max(inverse.get_inplace_scratch_len());
        let pump_shift = pump.iter().map(|p| params.g * p / params.w).collect();
        let mut sim = Simulation {
            params: *params,
            points: n,
            dx: layout.dx(),
            dt: cfg.dt,
            loss: absorber(layout, cfg.absorber_width, cfg.absorber_strength),
            pump,
            pump_shift,
            half_kinetic,
            full_kinetic,
            forward,
            inverse,
            scratch: vec![Complex64::new(0.0, 0.0); scratch_len],
            freeze_reservoir: false,
            state,
        };
        if cfg.dealias {
            sim.apply_spectral(&project);
        }
        Ok(sim)
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn pump(&self) -> &[f64] {
        &self.pump
    }

    fn transpose(&mut self) {
        let n = self.points;
        let psi = &mut self.state.psi;
        for i in 0..n {
            for j in (i + 1)..n {
                psi.swap(i * n + j, j * n + i);
            }
        }
    }

    fn kinetic(&mut self, full: bool) {
        let mult = if full {
            std::mem::take(&mut self.full_kinetic)
        } else {
            std::mem::take(&mut self.half_kinetic)
        };
        self.apply_spectral(&mult);
        if full {
            self.full_kinetic = mult;
        } else {
            self.half_kinetic = mult;
        }
    }

    /// Multiplies the field by `mult` in Fourier space. The transform leaves
    /// the spectrum transposed, which is harmless for the symmetric multipliers.
    fn apply_spectral(&mut self, mult: &[Complex64]) {
        self.forward.process_with_scratch(&mut self.state.psi, &mut self.scratch);
        self.transpose();
        self.forward.process_with_scratch(&mut self.state.psi, &mut self.scratch);
        for (z, m) in self.state.psi.iter_mut().zip(mult) {
            *z *= m;
        }
        self.inverse.process_with_scratch(&mut self.state.psi, &mut self.scratch);
        self.transpose();
        self.inverse.process_with_scratch(&mut self.state.psi, &mut self.scratch);
    }

    /// Local terms over `dt` with the reservoir frozen, then the exact
    /// reservoir relaxation with `|Psi|^2` frozen.
    fn local(&mut self) {
        let p = &self.params;
        let dt = self.dt;
        for i in 0..self.state.psi.len() {
            let z = self.state.psi[i];
            let d = z.norm_sqr();
            let nn = self.state.n[i];
            let rate = p.g * nn + self.pump_shift[i] + p.alpha * d;
            let growth = 0.5 * (p.r * nn - p.gamma) - self.loss[i];
            self.state.psi[i] = z * Complex64::from_polar((growth * dt).exp(), -rate * dt);
            if self.freeze_reservoir {
                continue;
            }
            let a = p.gamma_r + p.r * d;
            let pump = self.pump[i];
            self.state.n[i] = if a > 0.0 {
                let fixed = pump / a;
                fixed + (nn - fixed) * (-a * dt).exp()
            } else {
                nn + pump * dt
            };
        }
    }

    /// Advances `steps` steps of `dt` (Strang splitting, kinetic half-steps
    /// merged between consecutive steps).
    pub fn advance(&mut self, steps: usize) -> Result<()> {
        if steps == 0 {
            return Ok(());
        }
        self.kinetic(false);
        for s in 0..steps {
            self.local();
            self.kinetic(s + 1 < steps);
        }
        self.state.t += steps as f64 * self.dt;
        if let Some(bad) = self.state.psi.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Divergence {
                time: self.state.t,
                reason: format!("non-finite field at grid index {bad}"),
            });
        }
        Ok(())
    }

    pub fn norm(&self) -> f64 {
        self.state.norm(self.dx)
    }
}

/// Grid index nearest to a point.
fn nearest(layout: &PumpLayout, c: f64) -> usize {
    let j = ((c + layout.length / 2.0) / layout.dx()).round();
    (j.max(0.0) as usize).min(layout.points - 1)
}

/// Sum of `Psi` over the 3x3 grid points around each center.
fn site_amplitudes(layout: &PumpLayout, psi: &[Complex64]) -> Vec<Complex64> {
    let n = layout.points;
    layout
        .centers
        .iter()
        .map(|c| {
            let (ix, iy) = (nearest(layout, c[0]), nearest(layout, c[1]));
            let mut acc = Complex64::new(0.0, 0.0);
            for y in iy.saturating_sub(1)..=(iy + 1).min(n - 1) {
                for x in ix.saturating_sub(1)..=(ix + 1).min(n - 1) {
                    acc += psi[y * n + x];
                }
            }
            acc
        })
        .collect()
}

/// Sites whose density falls below this fraction of the field's peak
/// density carry no usable phase.
pub const NOISE_FLOOR: f64 = 1e-4;

/// Phases `arg Psi(r_i)`, averaged over the 3x3 neighborhood of each site.
pub fn extract_phases(layout: &PumpLayout, state: &FieldState) -> Result<SpinConfiguration> {
    let sites = site_amplitudes(layout, &state.psi);
    let peak = state.psi.iter().map(|z| z.norm_sqr()).fold(0.0, f64::max);
    for (i, s) in sites.iter().enumerate() {
        if (s / 9.0).norm_sqr() <= NOISE_FLOOR * peak || peak == 0.0 {
            return Err(Error::NotConverged(format!("site {i} density is below the noise floor")));
        }
    }
    SpinConfiguration::new(sites.iter().map(|z| z.arg()).collect())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GpeRun {
    pub seed: u64,
    pub phases: Vec<f64>,
    pub stationary: bool,
    /// Largest change of any pairwise phase over the trailing window, rad.
    pub drift: f64,
    /// Mean density near each site at the end, 1/um^2.
    pub densities: Vec<f64>,
    pub norm: f64,
    pub p0: f64,
}

/// Evolves one seeded realization and reads out the site phases.
pub fn simulate(
    params: &GpeParams,
    layout: &PumpLayout,
    p0: f64,
    cfg: &SimConfig,
) -> Result<(GpeRun, FieldState)> {
    if layout.centers.is_empty() {
        return Err(Error::InvalidArgument("layout has no rings".into()));
    }
    layout.validate(cfg.absorber_width)?;
    let state = initial_state(layout.points, cfg.noise, cfg.seed);
    simulate_from(params, layout, p0, cfg, state)
}

pub fn simulate_from(
    params: &GpeParams,
    layout: &PumpLayout,
    p0: f64,
    cfg: &SimConfig,
    state: FieldState,
) -> Result<(GpeRun, FieldState)> {
    let pump = build_pump(layout, p0);
    let mut sim = Simulation::new(params, layout, pump, cfg, state)?;
    let per_sample = ((cfg.sample_every / cfg.dt).round() as usize).max(1);
    let total = (cfg.t_end / cfg.dt).round() as usize;
    let window_start = cfg.t_end - cfg.window;
    let mut reference: Option<Vec<f64>> = None;
    let mut drift: f64 = 0.0;
    let mut done = 0;
    while done < total {
        let steps = per_sample.min(total - done);
        sim.advance(steps)?;
        done += steps;
        if sim.state.t >= window_start - 1e-9 {
            let sites = site_amplitudes(layout, &sim.state.psi);
            let r = sites[0].conj();
            let rel: Vec<f64> = sites.iter().map(|z| (z * r).arg()).collect();
            match &reference {
                None => reference = Some(rel),
                Some(r0) => {
                    for (a, b) in rel.iter().zip(r0) {
                        drift = drift.max(wrap_phase(a - b).abs());
                    }
                }
            }
        }
    }
    let spins = extract_phases(layout, &sim.state)?;
    let densities = site_amplitudes(layout, &sim.state.psi)
        .iter()
        .map(|z| (z / 9.0).norm_sqr())
        .collect();
    let run = GpeRun {
        seed: cfg.seed,
        phases: spins.phases().to_vec(),
        stationary: drift < cfg.phase_tol,
        drift,
        densities,
        norm: sim.norm(),
        p0,
    };
    Ok((run, sim.state))
}

/// Independent runs with seeds `seed, seed + 1, ...`. A run whose sites
/// stay below the noise floor is reported as non-stationary with no phases.
pub fn run_layout(
    params: &GpeParams,
    layout: &PumpLayout,
    p0: f64,
    cfg: &SimConfig,
    runs: usize,
) -> Result<Vec<GpeRun>> {
    Ok(run_layout_states(params, layout, p0, cfg, runs)?
        .into_iter()
        .map(|r| r.0)
        .collect())
}

/// As [`run_layout`], also returning each run's final field.
pub fn run_layout_states(
    params: &GpeParams,
    layout: &PumpLayout,
    p0: f64,
    cfg: &SimConfig,
    runs: usize,
) -> Result<Vec<(GpeRun, Option<FieldState>)>> {
    if layout.centers.is_empty() {
        return Err(Error::InvalidArgument("layout has no rings".into()));
    }
    if runs == 0 {
        return Err(Error::InvalidArgument("runs must be >= 1".into()));
    }
    (0..runs)
        .into_par_iter()
        .map(|i| {
            let c = SimConfig {
                seed: cfg.seed.wrapping_add(i as u64),
                ..cfg.clone()
            };
            match simulate(params, layout, p0, &c) {
                Ok((run, state)) => Ok((run, Some(state))),
                Err(Error::NotConverged(_)) => Ok((GpeRun {
                    seed: c.seed,
                    phases: Vec::new(),
                    stationary: false,
                    drift: f64::INFINITY,
                    densities: Vec::new(),
                    norm: 0.0,
                    p0,
                }, None)),
                Err(e) => Err(e),
            }
        })
        .collect()
}

/// Net growth rate (1/ps) of the fastest linear mode of one ring pumped at
/// `p0`: the field is evolved with the reservoir pinned at `P / Gamma` and
/// no nonlinearity, renormalizing as it goes.
pub fn linear_growth_rate(params: &GpeParams, layout: &PumpLayout, p0: f64, cfg: &SimConfig, t: f64) -> Result<f64> {
    linear_mode(params, layout, p0, cfg, t).map(|m| m.0)
}

/// Growth rate and field of the fastest linear mode.
pub fn linear_mode(params: &GpeParams, layout: &PumpLayout, p0: f64, cfg: &SimConfig, t: f64) -> Result<(f64, Vec<Complex64>)> {
    linear_mode_projected(params, layout, p0, cfg, t, &|_| {})
}

/// As [`linear_mode`], restricted to the subspace kept by `project`, which
/// is applied to the field after every renormalization.
pub fn linear_mode_projected(
    params: &GpeParams,
    layout: &PumpLayout,
    p0: f64,
    cfg: &SimConfig,
    t: f64,
    project: &dyn Fn(&mut [Complex64]),
) -> Result<(f64, Vec<Complex64>)> {
    let linear = GpeParams {
        alpha: 0.0,
        ..*params
    };
    let pump = build_pump(layout, p0);
    let mut state = initial_state(layout.points, 1.0, cfg.seed);
    state.n = pump.iter().map(|p| p / params.gamma_r).collect();
    let mut sim = Simulation::new(&linear, layout, pump, cfg, state)?;
    sim.freeze_reservoir = true;
    project(&mut sim.state.psi);
    let chunk = ((1.0 / cfg.dt).round() as usize).max(1);
    let total = ((t / cfg.dt).round() as usize).max(2 * chunk);
    let mut rates = Vec::new();
    let mut done = 0;
    while done < total {
        let before = sim.norm();
        sim.advance(chunk)?;
        done += chunk;
        let after = sim.norm();
        rates.push((after / before).ln() / (chunk as f64 * cfg.dt));
        let s = (before / after).sqrt();
        sim.state.psi.iter_mut().for_each(|z| *z *= s);
        project(&mut sim.state.psi);
    }
    let tail = &rates[rates.len() * 3 / 4..];
    Ok((tail.iter().sum::<f64>() / tail.len() as f64, sim.state.psi))
}

/// Pump amplitude at which the single-ring linear growth rate crosses zero,
/// by bisection to relative tolerance `rel_tol`.
pub fn find_threshold(
    params: &GpeParams,
    ring_radius: f64,
    ring_width: f64,
    length: f64,
    points: usize,
    cfg: &SimConfig,
    rel_tol: f64,
) -> Result<f64> {
    let layout = PumpLayout {
        centers: vec![[0.0, 0.0]],
        ring_radius,
        ring_width,
        length,
        points,
    };
    layout.validate(cfg.absorber_width)?;
    let t = 300.0;
    let rate = |p: f64| linear_growth_rate(params, &layout, p, cfg, t);
    let mut lo = 0.0;
    let mut hi = params.gamma * params.gamma_r / params.r;
    let mut iterations = 0;
    while rate(hi)? <= 0.0 {
        lo = hi;
        hi *= 2.0;
        iterations += 1;
        if iterations > 30 {
            return Err(Error::NotConverged("no pump amplitude reaches threshold".into()));
        }
    }
    while hi - lo > rel_tol * hi {
        let mid = 0.5 * (lo + hi);
        if rate(mid)? > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Single-ring threshold on a small cell with the layout's grid spacing.
pub fn layout_threshold(params: &GpeParams, layout: &PumpLayout, cfg: &SimConfig) -> Result<f64> {
    let dx = layout.dx();
    let absorber = 4.0;
    let span = 2.0 * (layout.ring_radius + 3.0 * layout.ring_width + absorber) + 2.0;
    let points = ((span / dx).ceil() as usize).next_power_of_two().max(8);
    let cell = SimConfig {
        absorber_width: absorber,
        ..cfg.clone()
    };
    find_threshold(
        params,
        layout.ring_radius,
        layout.ring_width,
        points as f64 * dx,
        points,
        &cell,
        1e-3,
    )
}

/// Grayscale PGM of `|Psi|^2`, scaled to its maximum.
pub fn density_pgm(points: usize, psi: &[Complex64]) -> Vec<u8> {
    let d: Vec<f64> = psi.iter().map(|z| z.norm_sqr()).collect();
    let max = d.iter().cloned().fold(0.0, f64::max);
    let mut out = format!("P5\n{points} {points}\n255\n").into_bytes();
    // image rows run top to bottom, grid rows bottom to top
    for row in d.chunks(points).rev() {
        out.extend(row.iter().map(|v| if max > 0.0 { (255.0 * v / max).round() as u8 } else { 0 }));
    }
    out
}

/// PPM of `arg Psi` on a hue wheel, darkened where the density is low.
pub fn phase_ppm(points: usize, psi: &[Complex64]) -> Vec<u8> {
    let max = psi.iter().map(|z| z.norm_sqr()).fold(0.0, f64::max);
    let mut out = format!("P6\n{points} {points}\n255\n").into_bytes();
    for row in psi.chunks(points).rev() {
        for z in row {
            let h = (z.arg() + PI) / (2.0 * PI) * 6.0;
            let x = 1.0 - ((h % 2.0) - 1.0).abs();
            let (r, g, b) = match h as usize {
                0 => (1.0, x, 0.0),
                1 => (x, 1.0, 0.0),
                2 => (0.0, 1.0, x),
                3 => (0.0, x, 1.0),
                4 => (x, 0.0, 1.0),
                _ => (1.0, 0.0, x),
            };
            let v = if max > 0.0 { (z.norm_sqr() / max).sqrt() } else { 0.0 };
            out.extend([r, g, b].iter().map(|c| (255.0 * c * v).round() as u8));
        }
    }
    out
}
