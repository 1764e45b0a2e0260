//! Error measurement against the analytical solution, refinement studies
//! (time step, mesh) and diffusion-coefficient sensitivity.
//!
//! Independent runs inside a study execute on the rayon pool; results are
//! always returned ordered by control value.

use std::fmt;

use rayon::prelude::*;

use crate::analytical::ogata_column;
use crate::engine::{run, ConcentrationField, SideCondition, StabilityDiagnostics};
use crate::error::{Error, Result};
use crate::transport::{convert_diffusion_m2a_to_cm2day, GridSpec, SimulationConfig};

/// Successive-profile change (fraction of C0) below which two refinement
/// levels are considered indistinguishable.
pub const DEFAULT_INDEPENDENCE_TOL: f64 = 0.02;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ComparedAxis {
    /// Depth profile of one node column.
    ZProfile {
        column: usize,
    },
    FullField,
}

impl fmt::Display for ComparedAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ComparedAxis::ZProfile { column } => write!(f, "z-profile at column {column}"),
            ComparedAxis::FullField => f.write_str("full field"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorReport {
    /// RMS difference, mg/L.
    pub l2: f64,
    /// Max absolute difference, mg/L.
    pub linf: f64,
    /// `linf / C0` (plain `linf` when C0 is zero).
    pub rel_linf: f64,
    pub node_count: usize,
    pub compared_axis: ComparedAxis,
}

impl fmt::Display for ErrorReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: nodes={} l2={:.6e} linf={:.6e} rel_linf={:.4}%",
            self.compared_axis,
            self.node_count,
            self.l2,
            self.linf,
            100.0 * self.rel_linf
        )
    }
}

pub fn error_norms(numerical: &[f64], analytical: &[f64], c0: f64, axis: ComparedAxis) -> Result<ErrorReport> {
    if numerical.len() != analytical.len() {
        return Err(Error::Comparison(format!(
            "shape mismatch: {} vs {} values",
            numerical.len(),
            analytical.len()
        )));
    }
    if numerical.is_empty() {
        return Err(Error::Comparison("nothing to compare".into()));
    }
    if numerical.iter().chain(analytical).any(|v| !v.is_finite()) {
        return Err(Error::Comparison("non-finite values".into()));
    }
    let mut sum_sq = 0.0;
    let mut linf: f64 = 0.0;
    for (a, b) in numerical.iter().zip(analytical) {
        let d = (a - b).abs();
        sum_sq += d * d;
        linf = linf.max(d);
    }
    let n = numerical.len();
    // keep l2 <= linf under rounding
    let l2 = (sum_sq / n as f64).sqrt().min(linf);
    let rel_linf = if c0 > 0.0 { linf / c0 } else { linf };
    Ok(ErrorReport {
        l2,
        linf,
        rel_linf,
        node_count: n,
        compared_axis: axis,
    })
}

/// Convergence slope between two refinement levels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ObservedOrder {
    Slope(f64),
    /// One of the errors was exactly zero.
    Saturated,
}

impl ObservedOrder {
    pub fn slope(self) -> Option<f64> {
        match self {
            ObservedOrder::Slope(s) => Some(s),
            ObservedOrder::Saturated => None,
        }
    }
}

impl fmt::Display for ObservedOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ObservedOrder::Slope(s) => write!(f, "{s:.3}"),
            ObservedOrder::Saturated => f.write_str("saturated"),
        }
    }
}

/// `log(e[k]/e[k+1]) / log(c[k]/c[k+1])` for each adjacent pair.
pub fn observed_order(errors: &[f64], controls: &[f64]) -> Result<Vec<ObservedOrder>> {
    if errors.len() != controls.len() || errors.len() < 2 {
        return Err(Error::Comparison(format!(
            "need equal-length lists of at least 2 entries, got {} errors and {} controls",
            errors.len(),
            controls.len()
        )));
    }
    if controls.iter().any(|c| !(c.is_finite() && *c > 0.0)) || controls.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::Comparison(
            "controls must be positive and strictly decreasing".into(),
        ));
    }
    if errors.iter().any(|e| !(e.is_finite() && *e >= 0.0)) {
        return Err(Error::Comparison("errors must be finite and non-negative".into()));
    }
    Ok(errors
        .windows(2)
        .zip(controls.windows(2))
        .map(|(e, c)| {
            if e[0] == 0.0 || e[1] == 0.0 {
                ObservedOrder::Saturated
            } else {
                ObservedOrder::Slope((e[0] / e[1]).ln() / (c[0] / c[1]).ln())
            }
        })
        .collect())
}

/// A depth profile: node depths (cm) and concentrations (mg/L).
#[derive(Debug, Clone, PartialEq)]
pub struct Profile {
    pub z: Vec<f64>,
    pub c: Vec<f64>,
}

impl Profile {
    pub fn from_field(field: &ConcentrationField, column: usize) -> Self {
        let g = field.grid;
        Profile {
            z: (0..g.nz).map(|j| g.z(j)).collect(),
            c: field.column(column),
        }
    }

    /// Linear interpolation at depth `z` (clamped to the profile's range).
    pub fn sample(&self, z: f64) -> f64 {
        let n = self.z.len();
        if z <= self.z[0] {
            return self.c[0];
        }
        if z >= self.z[n - 1] {
            return self.c[n - 1];
        }
        let k = self.z.partition_point(|&zk| zk <= z) - 1;
        let (z0, z1) = (self.z[k], self.z[k + 1]);
        if z == z0 {
            return self.c[k];
        }
        let w = (z - z0) / (z1 - z0);
        self.c[k] + w * (self.c[k + 1] - self.c[k])
    }

    /// True when concentration never rises with depth (up to `slack`).
    pub fn is_non_increasing(&self, slack: f64) -> bool {
        self.c.windows(2).all(|w| w[1] <= w[0] + slack)
    }
}

/// Single-column version of `base`: 3 nodes across with reflecting sides,
/// `depth` cm deep at spacing `dz`.
pub fn column_config(base: &SimulationConfig, depth: f64, dz: f64) -> Result<SimulationConfig> {
    let mut cfg = base.clone();
    let nz = GridSpec::from_extent(2.0 * dz, depth, dz)?.nz;
    cfg.grid = GridSpec::new(3, nz, dz, dz)?;
    cfg.bc.sides = SideCondition::Reflect;
    cfg.validate()?;
    Ok(cfg)
}

/// Runs `config` and compares every snapshot's profile column against the
/// 1-D analytical solution at the same nodes.
pub fn compare_with_oracle(config: &SimulationConfig, column: usize) -> Result<Vec<(f64, ErrorReport)>> {
    let result = run(config)?;
    let r = config.retardation()?;
    result
        .snapshots
        .iter()
        .map(|f| {
            let exact = ogata_column(f.grid.nz, f.grid.dz, f.t, &config.params, r)?;
            let report = error_norms(
                &f.column(column),
                &exact,
                config.params.c0,
                ComparedAxis::ZProfile { column },
            )?;
            Ok((f.t, report))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct RefinementStudy {
    /// Δt (days) or h (cm), coarse to fine.
    pub control_values: Vec<f64>,
    /// Final profile of each level against the analytical solution.
    pub reports: Vec<ErrorReport>,
    /// Level k against level k+1 (finer profile interpolated to level k's nodes).
    pub successive: Vec<ErrorReport>,
    /// Slopes of `reports` linf errors.
    pub observed_orders: Vec<ObservedOrder>,
    /// Slopes of `successive` linf differences; independent of the oracle,
    /// so they isolate the refined quantity from any fixed error floor.
    pub self_orders: Vec<ObservedOrder>,
    pub independent_at: Option<f64>,
    pub diagnostics: Vec<StabilityDiagnostics>,
    pub profiles: Vec<Profile>,
    /// Negative-concentration occurrences per level.
    pub negative_counts: Vec<u64>,
}

struct Level {
    profile: Profile,
    report: ErrorReport,
    diagnostics: StabilityDiagnostics,
    negatives: u64,
}

fn run_level(cfg: &SimulationConfig) -> Result<Level> {
    let result = run(cfg)?;
    let field = result.final_field();
    let column = cfg.grid.center_column();
    let profile = Profile::from_field(field, column);
    let r = cfg.retardation()?;
    let exact = ogata_column(cfg.grid.nz, cfg.grid.dz, field.t, &cfg.params, r)?;
    let report = error_norms(&profile.c, &exact, cfg.params.c0, ComparedAxis::ZProfile { column })?;
    Ok(Level {
        profile,
        report,
        diagnostics: result.diagnostics,
        negatives: result.negative.count,
    })
}

fn check_decreasing(values: &[f64], name: &'static str) -> Result<()> {
    if values.is_empty() {
        return Err(Error::param(name, "list is empty"));
    }
    if values.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
        return Err(Error::param(name, "values must be finite and > 0"));
    }
    if values.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::param(name, "values must be strictly decreasing"));
    }
    Ok(())
}

fn assemble(controls: Vec<f64>, levels: Vec<Level>, c0: f64, tol: f64) -> Result<RefinementStudy> {
    let successive = levels
        .windows(2)
        .map(|w| {
            let fine: Vec<f64> = w[0].profile.z.iter().map(|&z| w[1].profile.sample(z)).collect();
            error_norms(&w[0].profile.c, &fine, c0, w[0].report.compared_axis)
        })
        .collect::<Result<Vec<_>>>()?;

    let linf: Vec<f64> = levels.iter().map(|l| l.report.linf).collect();
    let observed_orders = if controls.len() >= 2 {
        observed_order(&linf, &controls)?
    } else {
        Vec::new()
    };
    let self_orders = if successive.len() >= 2 {
        let diffs: Vec<f64> = successive.iter().map(|s| s.linf).collect();
        observed_order(&diffs, &controls[..successive.len()])?
    } else {
        Vec::new()
    };
    let independent_at = successive.iter().position(|s| s.rel_linf < tol).map(|k| controls[k]);

    Ok(RefinementStudy {
        reports: levels.iter().map(|l| l.report).collect(),
        diagnostics: levels.iter().map(|l| l.diagnostics).collect(),
        negative_counts: levels.iter().map(|l| l.negatives).collect(),
        profiles: levels.into_iter().map(|l| l.profile).collect(),
        control_values: controls,
        successive,
        observed_orders,
        self_orders,
        independent_at,
    })
}

/// Re-runs `base` at each Δt (days, strictly decreasing) and compares final
/// depth profiles with the analytical solution and with each other.
/// `independent_at` is the first Δt whose profile differs from the next finer
/// one by less than `tol`·C0.
pub fn timestep_study(base: &SimulationConfig, dt_list: &[f64], tol: f64) -> Result<RefinementStudy> {
    check_decreasing(dt_list, "dt_list")?;
    if let Some(dt) = dt_list.iter().find(|&&dt| dt > base.t_end) {
        return Err(Error::param(
            "dt_list",
            format!("Δt {dt} day exceeds t_end {} day", base.t_end),
        ));
    }
    let levels = dt_list
        .par_iter()
        .map(|&dt| {
            let mut cfg = base.clone();
            cfg.dt = dt;
            cfg.snapshot_times = vec![base.t_end];
            run_level(&cfg)
        })
        .collect::<Result<Vec<_>>>()?;
    assemble(dt_list.to_vec(), levels, base.params.c0, tol)
}

/// How the time step follows the mesh in [`mesh_study`].
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum MeshTimestep {
    /// Keep `base.dt` at every spacing.
    #[default]
    Fixed,
    /// `dt = base.dt · (h / base.dz)²`: constant diffusion number, so
    /// temporal and spatial errors shrink together at second order.
    Diffusive,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeshStudyOptions {
    pub timestep: MeshTimestep,
    pub tol: f64,
}

impl Default for MeshStudyOptions {
    fn default() -> Self {
        MeshStudyOptions {
            timestep: MeshTimestep::Fixed,
            tol: DEFAULT_INDEPENDENCE_TOL,
        }
    }
}

/// Grid used for spacing `h` with the physical extent of `base` held fixed.
/// Single-column grids stay single-column.
pub fn refined_grid(base: &GridSpec, h: f64) -> Result<GridSpec> {
    let nz = GridSpec::from_extent(2.0 * h, base.depth(), h)?.nz;
    if base.nx == 3 {
        GridSpec::new(3, nz, h, h)
    } else {
        GridSpec::from_extent(base.width(), base.depth(), h)
    }
}

/// Re-runs `base` at each spacing h (cm, strictly decreasing, same in x and
/// z) and compares final depth profiles with the analytical solution sampled
/// at that grid's nodes.
pub fn mesh_study(base: &SimulationConfig, h_list: &[f64], options: MeshStudyOptions) -> Result<RefinementStudy> {
    check_decreasing(h_list, "h_list")?;
    let configs = h_list
        .iter()
        .map(|&h| {
            let mut cfg = base.clone();
            cfg.grid = refined_grid(&base.grid, h)?;
            if options.timestep == MeshTimestep::Diffusive {
                let ratio = h / base.grid.dz;
                cfg.dt = base.dt * ratio * ratio;
            }
            cfg.snapshot_times = vec![base.t_end];
            cfg.validate()?;
            Ok(cfg)
        })
        .collect::<Result<Vec<_>>>()?;
    let levels = configs.par_iter().map(run_level).collect::<Result<Vec<_>>>()?;
    assemble(h_list.to_vec(), levels, base.params.c0, options.tol)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SensitivityEntry {
    pub d_m2_per_annum: f64,
    pub d_cm2_per_day: f64,
    pub profile: Profile,
    /// Profile never increases with depth.
    pub monotone: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SensitivityStudy {
    /// Sorted by D so the result does not depend on input order.
    pub entries: Vec<SensitivityEntry>,
    /// Largest |ΔC| between any two entries at any node, mg/L.
    pub max_deviation: f64,
    pub rel_max_deviation: f64,
}

impl SensitivityStudy {
    pub fn trend_preserved(&self) -> bool {
        self.entries.iter().all(|e| e.monotone)
    }
}

/// Runs `base` once per diffusion coefficient (m²/a) and reports final depth
/// profiles and their largest pointwise spread.
pub fn sensitivity_study(base: &SimulationConfig, d_values: &[f64]) -> Result<SensitivityStudy> {
    if d_values.is_empty() {
        return Err(Error::param("d_values", "list is empty"));
    }
    let mut sorted = d_values.to_vec();
    for &d in &sorted {
        convert_diffusion_m2a_to_cm2day(d)?;
    }
    sorted.sort_by(f64::total_cmp);

    let c0 = base.params.c0;
    let slack = 1e-12 * c0.max(1.0);
    let entries = sorted
        .par_iter()
        .map(|&d| {
            let mut cfg = base.clone();
            cfg.params.d = convert_diffusion_m2a_to_cm2day(d)?;
            cfg.snapshot_times = vec![base.t_end];
            let result = run(&cfg)?;
            let profile = Profile::from_field(result.final_field(), cfg.grid.center_column());
            Ok(SensitivityEntry {
                d_m2_per_annum: d,
                d_cm2_per_day: cfg.params.d,
                monotone: profile.is_non_increasing(slack),
                profile,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut max_deviation: f64 = 0.0;
    for (a, ea) in entries.iter().enumerate() {
        for eb in &entries[a + 1..] {
            for (x, y) in ea.profile.c.iter().zip(&eb.profile.c) {
                max_deviation = max_deviation.max((x - y).abs());
            }
        }
    }
    Ok(SensitivityStudy {
        entries,
        max_deviation,
        rel_max_deviation: if c0 > 0.0 { max_deviation / c0 } else { max_deviation },
    })
}
