//! Forward-Euler time stepping of the 2-D retarded advection-diffusion
//! equation on the node lattice.
//!
//! Interior node update (R = 1 + rho·Kd/theta folds the sorption term of the
//! left-hand side into a single divisor):
//!
//! ```text
//! C' = C + dt/R · [ D (C[i+1] - 2C + C[i-1]) / dx²  - v · Ax
//!                 + D (C[j+1] - 2C + C[j-1]) / dz²  - v · Az ]
//! ```
//!
//! with `Ax = (C[i+1] - C) / dx` for [`Scheme::PaperForward`] and
//! `Ax = (C - C[i-1]) / dx` for [`Scheme::Upwind`] (likewise in z). Boundary
//! nodes are then overwritten by [`super::boundary`].

use super::boundary::apply_in_place;
use super::field::{init_field, ConcentrationField};
use super::stability::{stability_diagnostics, StabilityDiagnostics};
use crate::error::{Error, Result};
use crate::transport::{Scheme, SimulationConfig, StabilityPolicy};

/// First node that went below zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NegativeEvent {
    pub t: f64,
    pub i: usize,
    pub j: usize,
    pub value: f64,
}

/// Negative concentrations are never clamped; they are tallied here as
/// (step, node) occurrences.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct NegativeEvents {
    pub count: u64,
    pub first: Option<NegativeEvent>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationResult {
    /// One field per requested output time, in time order.
    pub snapshots: Vec<ConcentrationField>,
    pub diagnostics: StabilityDiagnostics,
    pub config_echo: SimulationConfig,
    pub negative: NegativeEvents,
    /// Number of time steps taken, fractional landing steps included.
    pub steps: u64,
}

impl SimulationResult {
    pub fn final_field(&self) -> &ConcentrationField {
        self.snapshots
            .last()
            .expect("a run always records at least one snapshot")
    }

    pub fn snapshot_at(&self, t: f64) -> Option<&ConcentrationField> {
        self.snapshots.iter().find(|f| f.t == t)
    }
}

#[derive(Debug, Clone, Copy)]
struct Coefficients {
    ax: f64,
    az: f64,
    bx: f64,
    bz: f64,
}

impl Coefficients {
    fn new(config: &SimulationConfig, r: f64, dt: f64) -> Self {
        let p = &config.params;
        let g = &config.grid;
        Coefficients {
            ax: dt * p.d / (r * g.dx * g.dx),
            az: dt * p.d / (r * g.dz * g.dz),
            bx: dt * p.v / (r * g.dx),
            bz: dt * p.v / (r * g.dz),
        }
    }
}

fn advance_interior(src: &[f64], dst: &mut [f64], nx: usize, nz: usize, k: Coefficients, scheme: Scheme) {
    for j in 1..nz - 1 {
        let row = j * nx;
        for i in 1..nx - 1 {
            let n = row + i;
            let c = src[n];
            let west = src[n - 1];
            let east = src[n + 1];
            let up = src[n - nx];
            let down = src[n + nx];
            let (adv_x, adv_z) = match scheme {
                Scheme::PaperForward => (east - c, down - c),
                Scheme::Upwind => (c - west, c - up),
            };
            dst[n] = c + k.ax * (east - 2.0 * c + west) + k.az * (down - 2.0 * c + up) - k.bx * adv_x - k.bz * adv_z;
        }
    }
}

fn check_policy(config: &SimulationConfig, diagnostics: &StabilityDiagnostics) -> Result<()> {
    if let Some(reason) = diagnostics.violation() {
        match config.stability_policy {
            StabilityPolicy::Error => return Err(Error::Unstable(reason)),
            StabilityPolicy::Warn => log::warn!("explicit scheme is unstable: {reason}; continuing"),
            StabilityPolicy::Silent => {}
        }
    }
    Ok(())
}

/// Scans a freshly stepped field: errors on the first non-finite node and
/// records negative values.
fn scan(values: &[f64], nx: usize, t: f64, step: u64, negative: &mut NegativeEvents) -> Result<()> {
    for (k, &v) in values.iter().enumerate() {
        if !v.is_finite() {
            return Err(Error::BlowUp {
                step,
                i: k % nx,
                j: k / nx,
            });
        }
        if v < 0.0 {
            negative.count += 1;
            if negative.first.is_none() {
                negative.first = Some(NegativeEvent {
                    t,
                    i: k % nx,
                    j: k / nx,
                    value: v,
                });
            }
        }
    }
    Ok(())
}

struct Stepper<'a> {
    config: &'a SimulationConfig,
    r: f64,
    full: Coefficients,
    current: Vec<f64>,
    scratch: Vec<f64>,
    steps: u64,
    negative: NegativeEvents,
}

impl<'a> Stepper<'a> {
    fn new(config: &'a SimulationConfig, values: Vec<f64>) -> Result<Self> {
        let r = config.retardation()?;
        Ok(Stepper {
            config,
            r,
            full: Coefficients::new(config, r, config.dt),
            scratch: values.clone(),
            current: values,
            steps: 0,
            negative: NegativeEvents::default(),
        })
    }

    fn step(&mut self, h: f64, t_new: f64) -> Result<()> {
        let g = self.config.grid;
        let k = if h == self.config.dt {
            self.full
        } else {
            Coefficients::new(self.config, self.r, h)
        };
        advance_interior(&self.current, &mut self.scratch, g.nx, g.nz, k, self.config.scheme);
        apply_in_place(&mut self.scratch, g.nx, g.nz, &self.config.bc, &self.config.params);
        std::mem::swap(&mut self.current, &mut self.scratch);
        self.steps += 1;
        scan(&self.current, g.nx, t_new, self.steps, &mut self.negative)
    }
}

/// One forward-Euler step of size `config.dt`, boundaries re-applied.
/// The input field is left untouched.
pub fn step(field: &ConcentrationField, config: &SimulationConfig) -> Result<ConcentrationField> {
    if field.grid != config.grid {
        return Err(Error::Grid("field grid does not match config grid".into()));
    }
    if !field.is_finite() {
        return Err(Error::Grid("input field contains non-finite values".into()));
    }
    if !(config.dt.is_finite() && config.dt > 0.0) {
        return Err(Error::param("dt", format!("must be finite and > 0, got {}", config.dt)));
    }
    check_policy(config, &stability_diagnostics(config))?;
    let t_new = field.t + config.dt;
    let mut stepper = Stepper::new(config, field.values.clone())?;
    stepper.step(config.dt, t_new)?;
    Ok(ConcentrationField {
        grid: field.grid,
        t: t_new,
        values: stepper.current,
    })
}

/// Tolerance, as a fraction of dt, below which a leftover interval is
/// considered already reached.
const LANDING_TOL: f64 = 1e-9;

/// Runs from the initial condition to `t_end`, recording a snapshot at every
/// requested time. Steps are `dt` long except for a shorter final step where
/// needed to land exactly on each output time and on `t_end`.
pub fn run(config: &SimulationConfig) -> Result<SimulationResult> {
    config.validate()?;
    let diagnostics = stability_diagnostics(config);
    check_policy(config, &diagnostics)?;

    let grid = config.grid;
    let initial = init_field(grid, &config.params);
    let outputs = config.effective_snapshot_times();
    let mut targets = outputs.clone();
    if targets.last().is_none_or(|&t| t < config.t_end) {
        targets.push(config.t_end);
    }

    let mut stepper = Stepper::new(config, initial.values.clone())?;
    let mut snapshots = Vec::with_capacity(outputs.len());
    let mut next_output = outputs.iter().peekable();
    let mut t = 0.0;

    for &target in &targets {
        let span = target - t;
        if span > 0.0 {
            let full_steps = (span / config.dt + LANDING_TOL).floor() as u64;
            for k in 1..=full_steps {
                stepper.step(config.dt, t + k as f64 * config.dt)?;
            }
            let rest = target - (t + full_steps as f64 * config.dt);
            if rest > LANDING_TOL * config.dt {
                stepper.step(rest, target)?;
            }
            t = target;
        }
        if next_output.peek().is_some_and(|&&o| o == target) {
            next_output.next();
            snapshots.push(ConcentrationField {
                grid,
                t: target,
                values: stepper.current.clone(),
            });
        }
    }

    Ok(SimulationResult {
        snapshots,
        diagnostics,
        config_echo: config.clone(),
        negative: stepper.negative,
        steps: stepper.steps,
    })
}
