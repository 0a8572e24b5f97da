//! Per-axis 2-DOF control: the sliding variable, the composition
//! `u = u_st + u_ilc`, and a bank of independent axis controllers for
//! coupled multi-axis plants.
//!
//! Each axis runs its own controller against its own tracking error; whatever
//! the other axes inject through the plant coupling is treated as part of the
//! lumped uncertainty that the learning law estimates.

use crate::error::{ensure_finite, Error, Result};
use crate::ilc::{self, IlcMemory, IlcParams};
use crate::sta::{GstaState, StaGains};

/// Sliding-surface slope `lambda` (1/s).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlidingConfig {
    lambda: f64,
}

impl SlidingConfig {
    pub fn new(lambda: f64) -> Result<Self> {
        if !lambda.is_finite() || lambda <= 0.0 {
            return Err(Error::InvalidParam { what: "lambda", value: lambda });
        }
        Ok(Self { lambda })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }
}

/// `s = lambda * e + e_dot` over the tracking error and its derivative.
pub fn sliding_variable(e: f64, e_dot: f64, lambda: f64) -> Result<f64> {
    ensure_finite("tracking error e", e)?;
    ensure_finite("tracking error rate e_dot", e_dot)?;
    if !lambda.is_finite() || lambda <= 0.0 {
        return Err(Error::InvalidParam { what: "lambda", value: lambda });
    }
    ensure_finite("sliding variable", lambda * e + e_dot)
}

/// Static configuration of one axis controller.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxisConfig {
    pub sliding: SlidingConfig,
    pub gains: StaGains,
    pub ilc: IlcParams,
    /// Keep the super-twisting integrator across iteration boundaries
    /// instead of resetting it (ablation switch; default off).
    pub carry_v: bool,
}

/// What one control step produced; `u == u_st + u_ilc` exactly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxisStepOutput {
    pub s: f64,
    pub u_st: f64,
    pub u_ilc: f64,
    pub u: f64,
}

/// One axis of the 2-DOF controller.
///
/// Holds the previous iteration's learning memory (read) and the trace being
/// written for the current iteration. The sample cursor advances by exactly
/// one per [`step`](Self::step); [`end_iteration`](Self::end_iteration) rolls
/// the freshly written trace over once the horizon is consumed.
#[derive(Debug, Clone, PartialEq)]
pub struct AxisController {
    config: AxisConfig,
    gsta: GstaState,
    ilc_prev: IlcMemory,
    ilc_next: Vec<f64>,
    horizon: usize,
}

impl AxisController {
    pub fn new(config: AxisConfig, horizon: usize) -> Result<Self> {
        let ilc_prev = IlcMemory::init(horizon)?;
        Ok(Self {
            config,
            gsta: GstaState::new(config.gains),
            ilc_prev,
            ilc_next: Vec::with_capacity(horizon),
            horizon,
        })
    }

    pub fn config(&self) -> &AxisConfig {
        &self.config
    }

    /// Next sample index to be consumed.
    pub fn cursor(&self) -> usize {
        self.ilc_next.len()
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    /// Iteration the stored memory was written in (0 = zero init).
    pub fn iteration_index(&self) -> usize {
        self.ilc_prev.iteration_index()
    }

    pub fn gsta(&self) -> &GstaState {
        &self.gsta
    }

    pub fn ilc_memory(&self) -> &IlcMemory {
        &self.ilc_prev
    }

    /// One control sample: builds `s`, steps the super-twisting term, applies
    /// the learning update for this sample, and returns `u = u_st + u_ilc`.
    pub fn step(&mut self, e: f64, e_dot: f64, dt: f64) -> Result<AxisStepOutput> {
        let k = self.cursor();
        if k >= self.horizon {
            return Err(Error::HorizonOverrun { cursor: k, horizon: self.horizon });
        }
        let s = sliding_variable(e, e_dot, self.config.sliding.lambda())?;
        let (u_st, gsta_next) = self.gsta.step(s, dt)?;
        let held = if k == 0 { 0.0 } else { self.ilc_next[k - 1] };
        let u_ilc = ilc::sample_update(
            self.ilc_prev.samples()[k],
            s,
            &self.config.ilc,
            self.config.gains.kc(),
            held,
        )?;
        let u = ensure_finite("control input u", u_st + u_ilc)?;
        self.gsta = gsta_next;
        self.ilc_next.push(u_ilc);
        Ok(AxisStepOutput { s, u_st, u_ilc, u })
    }

    /// Rolls the iteration over: the written trace becomes the stored memory,
    /// the integrator resets (unless `carry_v`), and the cursor returns to 0.
    pub fn end_iteration(&mut self) -> Result<()> {
        if self.cursor() != self.horizon {
            return Err(Error::IncompleteIteration {
                cursor: self.cursor(),
                horizon: self.horizon,
            });
        }
        let written = std::mem::take(&mut self.ilc_next);
        self.ilc_prev = IlcMemory::from_samples(written, self.ilc_prev.iteration_index() + 1)?;
        self.ilc_next = Vec::with_capacity(self.horizon);
        if !self.config.carry_v {
            self.gsta.reset();
        }
        Ok(())
    }
}

/// Independent controllers for the axes of a coupled plant.
///
/// The bank shares no state between axes: stepping it steps each axis with
/// its own `(e, e_dot)` pair, in order.
#[derive(Debug, Clone, PartialEq)]
pub struct AxisBank {
    axes: Vec<AxisController>,
}

impl AxisBank {
    /// One controller per config; at least one axis required.
    pub fn new(configs: &[AxisConfig], horizon: usize) -> Result<Self> {
        if configs.is_empty() {
            return Err(Error::AxisCountMismatch { expected: 1, got: 0 });
        }
        let axes = configs
            .iter()
            .map(|c| AxisController::new(*c, horizon))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { axes })
    }

    pub fn n_axes(&self) -> usize {
        self.axes.len()
    }

    pub fn axes(&self) -> &[AxisController] {
        &self.axes
    }

    /// Steps every axis with its `(e, e_dot)` input.
    pub fn step(&mut self, inputs: &[(f64, f64)], dt: f64) -> Result<Vec<AxisStepOutput>> {
        if inputs.len() != self.axes.len() {
            return Err(Error::AxisCountMismatch {
                expected: self.axes.len(),
                got: inputs.len(),
            });
        }
        self.axes
            .iter_mut()
            .zip(inputs)
            .map(|(axis, &(e, e_dot))| axis.step(e, e_dot, dt))
            .collect()
    }

    pub fn end_iteration(&mut self) -> Result<()> {
        for axis in &mut self.axes {
            axis.end_iteration()?;
        }
        Ok(())
    }
}
