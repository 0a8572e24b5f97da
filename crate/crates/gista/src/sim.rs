//! Fixed-step closed-loop simulation: zero-order-hold control at the sample
//! rate, classical RK4 on the plant inside each hold interval, and the
//! iteration loop that carries the learning memory.
//!
//! Controller discretization (forward Euler on the super-twisting integrator)
//! is deliberately separate from plant integration accuracy; the plant state
//! is reset to the same initial state at the start of every iteration.

use crate::controller::{AxisBank, AxisConfig, SlidingConfig};
use crate::error::{Error, Result};
use crate::ilc::IlcParams;
use crate::metrics::{self, ConvergenceSummary};
use crate::plant::{
    DisturbanceSpec, GantryParams, GantryPlant, OracleAxisParams, OracleAxisPlant, Plant,
};
use crate::reference::SCurveProfile;
use crate::sta::StaGains;

/// Positions beyond this bound (m) abort the run as diverged.
pub const DIVERGENCE_POSITION_BOUND: f64 = 1e3;

/// Shared per-axis controller settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControllerConfig {
    pub lambda: f64,
    pub k1: f64,
    pub k2: f64,
    pub kc: f64,
    pub q: f64,
    pub beta: f64,
    pub epsilon: f64,
    /// Keep the super-twisting integrator across iterations (ablation).
    pub carry_v: bool,
    /// Differentiate measured positions instead of reading the velocity state.
    pub measured_output: bool,
}

impl Default for ControllerConfig {
    fn default() -> Self {
        Self {
            lambda: 5.0,
            k1: 0.1,
            k2: 0.1,
            kc: 0.1,
            q: 1.5,
            beta: 0.1,
            epsilon: 1e-6,
            carry_v: false,
            measured_output: false,
        }
    }
}

impl ControllerConfig {
    pub fn axis_config(&self) -> Result<AxisConfig> {
        Ok(AxisConfig {
            sliding: SlidingConfig::new(self.lambda)?,
            gains: StaGains::new(self.k1, self.k2, self.kc)?,
            ilc: IlcParams::new(self.q, self.beta, self.epsilon)?,
            carry_v: self.carry_v,
        })
    }
}

/// Reference profile settings; horizon and dt come from the sim block.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReferenceConfig {
    pub amplitude: f64,
    pub t_start: f64,
    pub t_end: f64,
}

impl Default for ReferenceConfig {
    fn default() -> Self {
        Self { amplitude: 0.1, t_start: 0.2, t_end: 1.2 }
    }
}

/// Which plant the experiment runs against.
#[derive(Debug, Clone, PartialEq)]
pub enum PlantConfig {
    Gantry {
        params: GantryParams,
        /// Applied to all three carriages; a nonzero seed offsets the
        /// sinusoid phase per carriage.
        disturbance: DisturbanceSpec,
        theta_frozen_zero: bool,
    },
    OracleAxis {
        params: OracleAxisParams,
        forcing: DisturbanceSpec,
    },
}

/// Full experiment description.
#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    /// Control/sample period (s).
    pub dt: f64,
    /// Iteration duration (s); must be an integer multiple of `dt`.
    pub horizon: f64,
    pub n_iterations: usize,
    /// Seed for the per-axis disturbance phase; 0 keeps all phases at zero.
    pub seed: u64,
    pub controller: ControllerConfig,
    pub reference: ReferenceConfig,
    pub plant: PlantConfig,
}

impl SimConfig {
    /// The bundled gantry benchmark: bench gains, stage constants, Coulomb
    /// plus 5 Hz sinusoid disturbance on each carriage, 6 iterations.
    pub fn gantry_bench() -> Self {
        Self {
            dt: 1e-3,
            horizon: 2.0,
            n_iterations: 6,
            seed: 0,
            controller: ControllerConfig::default(),
            reference: ReferenceConfig::default(),
            plant: PlantConfig::Gantry {
                params: GantryParams::default(),
                disturbance: DisturbanceSpec {
                    coulomb_amp: 2.0,
                    sin_amp: 0.5,
                    sin_freq: 5.0,
                    ..Default::default()
                },
                theta_frozen_zero: false,
            },
        }
    }

    /// Single-axis oracle benchmark with a smooth sinusoidal forcing, for
    /// verifying the uncertainty estimate against its exact value.
    pub fn oracle_bench() -> Self {
        Self {
            dt: 1e-3,
            horizon: 2.0,
            n_iterations: 10,
            seed: 0,
            controller: ControllerConfig::default(),
            reference: ReferenceConfig::default(),
            plant: PlantConfig::OracleAxis {
                params: OracleAxisParams { m: 9.6695, gamma: 172.7, k_f: 100.0 },
                forcing: DisturbanceSpec {
                    sin_amp: 2.0,
                    sin_freq: 5.0,
                    ..Default::default()
                },
            },
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_iterations == 0 {
            return Err(Error::InvalidParam { what: "n_iterations", value: 0.0 });
        }
        self.controller.axis_config()?;
        self.profile()?;
        match &self.plant {
            PlantConfig::Gantry { params, disturbance, .. } => {
                params.validate()?;
                disturbance.validate()?;
            }
            PlantConfig::OracleAxis { params, forcing } => {
                params.validate()?;
                forcing.validate()?;
            }
        }
        Ok(())
    }

    pub fn profile(&self) -> Result<SCurveProfile> {
        SCurveProfile::new(
            self.reference.amplitude,
            self.reference.t_start,
            self.reference.t_end,
            self.horizon,
            self.dt,
        )
    }

    pub fn is_gantry(&self) -> bool {
        matches!(self.plant, PlantConfig::Gantry { .. })
    }

    fn build_gantry(&self) -> Result<GantryPlant> {
        match &self.plant {
            PlantConfig::Gantry { params, disturbance, theta_frozen_zero } => {
                let mut specs = [*disturbance; 3];
                for (axis, spec) in specs.iter_mut().enumerate() {
                    spec.sin_phase += phase_from_seed(self.seed, axis);
                }
                GantryPlant::new(*params, specs, *theta_frozen_zero)
            }
            _ => unreachable!("caller matched the plant kind"),
        }
    }

    fn build_oracle(&self) -> Result<OracleAxisPlant> {
        match &self.plant {
            PlantConfig::OracleAxis { params, forcing } => {
                let mut spec = *forcing;
                spec.sin_phase += phase_from_seed(self.seed, 0);
                OracleAxisPlant::new(*params, spec)
            }
            _ => unreachable!("caller matched the plant kind"),
        }
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E3779B97F4A7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

/// Deterministic per-axis phase in `[0, 2 pi)`; zero seed keeps phases at 0.
pub fn phase_from_seed(seed: u64, axis: usize) -> f64 {
    if seed == 0 {
        return 0.0;
    }
    let bits = splitmix64(seed.wrapping_add(0x9E3779B97F4A7C15u64.wrapping_mul(axis as u64 + 1)));
    (bits >> 11) as f64 / (1u64 << 53) as f64 * std::f64::consts::TAU
}

/// Classical 4-stage Runge-Kutta step with control held constant over
/// `[t, t + dt]` (the hold is baked into `derivs`).
pub fn rk4_step<const D: usize, F>(derivs: F, state: [f64; D], t: f64, dt: f64) -> Result<[f64; D]>
where
    F: Fn(f64, &[f64; D]) -> Result<[f64; D]>,
{
    if !dt.is_finite() || dt <= 0.0 {
        return Err(Error::InvalidParam { what: "dt", value: dt });
    }
    let add_scaled = |a: &[f64; D], b: &[f64; D], h: f64| {
        let mut out = *a;
        for i in 0..D {
            out[i] += h * b[i];
        }
        out
    };
    let k1 = derivs(t, &state)?;
    let k2 = derivs(t + 0.5 * dt, &add_scaled(&state, &k1, 0.5 * dt))?;
    let k3 = derivs(t + 0.5 * dt, &add_scaled(&state, &k2, 0.5 * dt))?;
    let k4 = derivs(t + dt, &add_scaled(&state, &k3, dt))?;
    let mut out = state;
    for i in 0..D {
        out[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        if !out[i].is_finite() {
            return Err(Error::NonFinite { what: "integrated state", value: out[i] });
        }
    }
    Ok(out)
}

/// Per-sample traces of one axis over one iteration.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct AxisTrace {
    /// Position (m).
    pub y: Vec<f64>,
    /// Velocity state (m/s); in measured-output mode the controller sees a
    /// backward difference instead, reflected in `edot`.
    pub ydot: Vec<f64>,
    /// Tracking error `y - r` as used by the controller.
    pub e: Vec<f64>,
    /// Error rate as used by the controller.
    pub edot: Vec<f64>,
    /// Sliding variable.
    pub s: Vec<f64>,
    /// Applied control `u = u_st + u_ilc` (A).
    pub u: Vec<f64>,
    pub u_st: Vec<f64>,
    pub u_ilc: Vec<f64>,
    /// Finite-difference estimate of the lumped uncertainty,
    /// `(s[k+1] - s[k]) / dt - u[k]` (diagnostic; not visible to control).
    pub psi_truth: Vec<f64>,
    /// Disturbance force at the sample instant (N).
    pub d: Vec<f64>,
}

impl AxisTrace {
    fn with_capacity(n: usize) -> Self {
        Self {
            y: Vec::with_capacity(n),
            ydot: Vec::with_capacity(n),
            e: Vec::with_capacity(n),
            edot: Vec::with_capacity(n),
            s: Vec::with_capacity(n),
            u: Vec::with_capacity(n),
            u_st: Vec::with_capacity(n),
            u_ilc: Vec::with_capacity(n),
            psi_truth: Vec::with_capacity(n),
            d: Vec::with_capacity(n),
        }
    }
}

/// Everything logged over one iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationLog {
    /// 1-based iteration number.
    pub iteration: usize,
    pub t: Vec<f64>,
    pub r: Vec<f64>,
    pub rdot: Vec<f64>,
    pub axes: Vec<AxisTrace>,
}

impl IterationLog {
    fn with_capacity(iteration: usize, n: usize, n_axes: usize) -> Self {
        Self {
            iteration,
            t: Vec::with_capacity(n),
            r: Vec::with_capacity(n),
            rdot: Vec::with_capacity(n),
            axes: (0..n_axes).map(|_| AxisTrace::with_capacity(n)).collect(),
        }
    }

    pub fn n_samples(&self) -> usize {
        self.t.len()
    }
}

/// A full experiment: iteration logs in order plus the convergence summary,
/// with the configuration echoed alongside.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentLog {
    pub config: SimConfig,
    pub axis_names: Vec<String>,
    pub iterations: Vec<IterationLog>,
    /// Summary over *completed* iterations.
    pub summary: ConvergenceSummary,
}

/// Where and why a run aborted.
#[derive(Debug, Clone, PartialEq)]
pub struct DivergenceInfo {
    /// 1-based iteration that aborted.
    pub iteration: usize,
    /// Sample index at which the abort was detected.
    pub sample: usize,
    pub error: Error,
}

/// Result of [`run_experiment`]: either all iterations completed, or the run
/// aborted and the log is partial (the last iteration trace is truncated).
#[derive(Debug, Clone, PartialEq)]
pub enum RunOutcome {
    Complete(ExperimentLog),
    Diverged { partial: ExperimentLog, info: DivergenceInfo },
}

impl RunOutcome {
    /// The log either way.
    pub fn log(&self) -> &ExperimentLog {
        match self {
            RunOutcome::Complete(log) => log,
            RunOutcome::Diverged { partial, .. } => partial,
        }
    }

    pub fn into_complete(self) -> Result<ExperimentLog> {
        match self {
            RunOutcome::Complete(log) => Ok(log),
            RunOutcome::Diverged { info, .. } => Err(info.error),
        }
    }
}

/// Outcome of a single iteration.
#[derive(Debug, Clone, PartialEq)]
pub enum IterationOutcome {
    Complete(IterationLog),
    Diverged { partial: IterationLog, sample: usize, error: Error },
}

/// Runs one iteration: per sample, read the reference, form per-axis
/// `(e, edot)` with `e = y - r`, step every controller, hold `u` over the
/// interval, and RK4 the plant. The plant starts from `state0`; controllers
/// must be at cursor 0.
pub fn run_iteration<const D: usize, P: Plant<D>>(
    plant: &P,
    profile: &SCurveProfile,
    bank: &mut AxisBank,
    state0: [f64; D],
    iteration: usize,
    measured_output: bool,
) -> Result<IterationOutcome> {
    let n = profile.n_samples();
    let dt = profile.dt();
    let n_axes = plant.n_axes();
    if bank.n_axes() != n_axes {
        return Err(Error::AxisCountMismatch { expected: n_axes, got: bank.n_axes() });
    }
    if bank.axes()[0].cursor() != 0 {
        return Err(Error::IncompleteIteration {
            cursor: bank.axes()[0].cursor(),
            horizon: n,
        });
    }

    let mut log = IterationLog::with_capacity(iteration, n, n_axes);
    let mut st = state0;
    let mut prev_pos: Vec<f64> = (0..n_axes).map(|a| plant.pos(&st, a)).collect();
    let mut inputs = vec![(0.0, 0.0); n_axes];
    let mut u_hold = vec![0.0; n_axes];

    let diverged = |log: IterationLog, sample: usize, error: Error| {
        let mut partial = log;
        fill_psi_truth(&mut partial, dt, None);
        Ok(IterationOutcome::Diverged { partial, sample, error })
    };

    for k in 0..n {
        let t = k as f64 * dt;
        let (r, rdot, _) = profile.eval(t)?;
        for a in 0..n_axes {
            let y = plant.pos(&st, a);
            let ydot_used = if measured_output {
                if k == 0 {
                    0.0
                } else {
                    (y - prev_pos[a]) / dt
                }
            } else {
                plant.vel(&st, a)
            };
            inputs[a] = (y - r, ydot_used - rdot);
        }
        let outs = match bank.step(&inputs, dt) {
            Ok(outs) => outs,
            Err(error) => return diverged(log, k, error),
        };

        log.t.push(t);
        log.r.push(r);
        log.rdot.push(rdot);
        for a in 0..n_axes {
            let trace = &mut log.axes[a];
            let y = plant.pos(&st, a);
            trace.y.push(y);
            trace.ydot.push(plant.vel(&st, a));
            trace.e.push(inputs[a].0);
            trace.edot.push(inputs[a].1);
            trace.s.push(outs[a].s);
            trace.u.push(outs[a].u);
            trace.u_st.push(outs[a].u_st);
            trace.u_ilc.push(outs[a].u_ilc);
            trace.d.push(plant.disturbance_at(&st, a, t));
            u_hold[a] = outs[a].u;
            prev_pos[a] = y;
        }

        match rk4_step(|tt, ss| plant.derivatives(ss, &u_hold, tt), st, t, dt) {
            Ok(next) => {
                for a in 0..n_axes {
                    let pos = plant.pos(&next, a);
                    if !pos.is_finite() || pos.abs() > DIVERGENCE_POSITION_BOUND {
                        return diverged(
                            log,
                            k,
                            Error::Divergence { iteration, sample: k, what: "position", value: pos },
                        );
                    }
                }
                st = next;
            }
            // Any failure inside the hold interval (non-finite state, plant
            // singularity) aborts this iteration with the partial log.
            Err(error) => return diverged(log, k, error),
        }
    }

    // Terminal sliding variable closes the finite-difference uncertainty trace.
    let t_end = (n as f64 * dt).min(profile.horizon());
    let (r, rdot, _) = profile.eval(t_end)?;
    let lambda = bank.axes()[0].config().sliding.lambda();
    let mut s_terminal = Vec::with_capacity(n_axes);
    for a in 0..n_axes {
        let y = plant.pos(&st, a);
        let ydot_used = if measured_output { (y - prev_pos[a]) / dt } else { plant.vel(&st, a) };
        s_terminal.push(lambda * (y - r) + (ydot_used - rdot));
    }
    fill_psi_truth(&mut log, dt, Some(&s_terminal));
    Ok(IterationOutcome::Complete(log))
}

/// `psi[k] = (s[k+1] - s[k]) / dt - u[k]`; the terminal `s` closes the last
/// sample on complete iterations, otherwise the last entry repeats its
/// neighbor (one-sided difference unavailable on aborted runs).
fn fill_psi_truth(log: &mut IterationLog, dt: f64, s_terminal: Option<&[f64]>) {
    for (a, trace) in log.axes.iter_mut().enumerate() {
        let n = trace.s.len();
        trace.psi_truth.clear();
        for k in 0..n {
            let s_next = if k + 1 < n {
                Some(trace.s[k + 1])
            } else {
                s_terminal.map(|s| s[a])
            };
            match s_next {
                Some(sn) => trace.psi_truth.push((sn - trace.s[k]) / dt - trace.u[k]),
                None => {
                    let pad = if k > 0 { trace.psi_truth[k - 1] } else { 0.0 };
                    trace.psi_truth.push(pad);
                }
            }
        }
    }
}

/// Runs the configured number of iterations, threading the learning memory
/// and resetting the plant (and, by default, the super-twisting integrator)
/// at every iteration boundary.
pub fn run_experiment(cfg: &SimConfig) -> Result<RunOutcome> {
    cfg.validate()?;
    match &cfg.plant {
        PlantConfig::Gantry { .. } => run_generic::<6, _>(cfg.build_gantry()?, cfg),
        PlantConfig::OracleAxis { .. } => run_generic::<2, _>(cfg.build_oracle()?, cfg),
    }
}

fn run_generic<const D: usize, P: Plant<D>>(plant: P, cfg: &SimConfig) -> Result<RunOutcome> {
    let profile = cfg.profile()?;
    let n = profile.n_samples();
    let axis_cfg = cfg.controller.axis_config()?;
    let configs = vec![axis_cfg; plant.n_axes()];
    let mut bank = AxisBank::new(&configs, n)?;
    let state0 = plant.initial_state();
    let axis_names: Vec<String> = plant.axis_names().iter().map(|s| s.to_string()).collect();

    let mut iterations: Vec<IterationLog> = Vec::with_capacity(cfg.n_iterations);
    for iter in 1..=cfg.n_iterations {
        match run_iteration(&plant, &profile, &mut bank, state0, iter, cfg.controller.measured_output)? {
            IterationOutcome::Complete(log) => {
                iterations.push(log);
                bank.end_iteration()?;
            }
            IterationOutcome::Diverged { partial, sample, error } => {
                let summary = metrics::summarize(
                    &iterations,
                    cfg.is_gantry(),
                    cfg.controller.beta,
                    cfg.controller.q,
                    cfg.controller.kc,
                )?;
                iterations.push(partial);
                let partial_log = ExperimentLog {
                    config: cfg.clone(),
                    axis_names,
                    iterations,
                    summary,
                };
                return Ok(RunOutcome::Diverged {
                    partial: partial_log,
                    info: DivergenceInfo { iteration: iter, sample, error },
                });
            }
        }
    }
    let summary = metrics::summarize(
        &iterations,
        cfg.is_gantry(),
        cfg.controller.beta,
        cfg.controller.q,
        cfg.controller.kc,
    )?;
    Ok(RunOutcome::Complete(ExperimentLog { config: cfg.clone(), axis_names, iterations, summary }))
}
