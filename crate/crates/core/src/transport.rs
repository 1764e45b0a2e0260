//! Domain types shared by every other module.
//!
//! Internally everything runs in centimetres, days and mg/L. Values given in
//! other units are converted once, at the edge, through [`crate::units`].

use std::fmt;

use crate::engine::BoundaryConditionSet;
use crate::error::{Error, Result};

/// Linear-sorption retardation `R = 1 + rho * kd / theta`.
///
/// `rho * kd` must be dimensionless (e.g. g/cm³ times cm³/g).
pub fn retardation_factor(theta: f64, rho: f64, kd: f64) -> Result<f64> {
    check_porosity(theta)?;
    if !rho.is_finite() || rho < 0.0 {
        return Err(Error::param(
            "rho",
            format!("bulk density must be finite and >= 0, got {rho}"),
        ));
    }
    if !kd.is_finite() || kd < 0.0 {
        return Err(Error::param(
            "kd",
            format!("distribution factor must be finite and >= 0, got {kd}"),
        ));
    }
    let sorbed = rho * kd;
    if sorbed == 0.0 {
        return Ok(1.0);
    }
    let r = 1.0 + sorbed / theta;
    if !r.is_finite() {
        return Err(Error::param("kd", "retardation factor overflows"));
    }
    Ok(r)
}

/// Diffusion-dispersion coefficient from m²/a to cm²/day (365-day year).
pub fn convert_diffusion_m2a_to_cm2day(d_m2_per_annum: f64) -> Result<f64> {
    if !d_m2_per_annum.is_finite() || d_m2_per_annum <= 0.0 {
        return Err(Error::param(
            "D",
            format!("diffusion coefficient must be finite and > 0, got {d_m2_per_annum}"),
        ));
    }
    Ok(d_m2_per_annum * 1.0e4 / 365.0)
}

fn check_porosity(theta: f64) -> Result<()> {
    if !(theta.is_finite() && theta > 0.0 && theta < 1.0) {
        return Err(Error::param(
            "theta",
            format!("porosity must lie in (0, 1), got {theta}"),
        ));
    }
    Ok(())
}

/// How a species is slowed relative to the pore water.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Retardation {
    /// R given directly.
    Explicit(f64),
    /// Bulk density (g/cm³) and distribution factor (cm³/g).
    Sorption { rho: f64, kd: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Species {
    pub name: String,
    pub charge_label: String,
    pub retardation: Retardation,
}

impl Species {
    pub fn conservative(name: impl Into<String>, charge_label: impl Into<String>) -> Self {
        Species {
            name: name.into(),
            charge_label: charge_label.into(),
            retardation: Retardation::Explicit(1.0),
        }
    }

    pub fn retardation_factor(&self, theta: f64) -> Result<f64> {
        match self.retardation {
            Retardation::Explicit(r) => {
                check_porosity(theta)?;
                if !r.is_finite() || r < 1.0 {
                    return Err(Error::param("R", format!("retardation factor must be >= 1, got {r}")));
                }
                Ok(r)
            }
            Retardation::Sorption { rho, kd } => retardation_factor(theta, rho, kd),
        }
    }
}

/// Physical parameters of one species in one soil, canonical units.
#[derive(Debug, Clone, PartialEq)]
pub struct TransportParams {
    /// Diffusion-dispersion coefficient, cm²/day.
    pub d: f64,
    /// Darcy velocity, cm/day, positive downward (towards increasing z).
    pub v: f64,
    /// Porosity.
    pub theta: f64,
    /// Source concentration at the surface, mg/L.
    pub c0: f64,
    /// Initial and far-field concentration, mg/L.
    pub background: f64,
    pub species: Species,
}

impl TransportParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.d.is_finite() && self.d > 0.0) {
            return Err(Error::param("D", format!("must be finite and > 0, got {}", self.d)));
        }
        if !(self.v.is_finite() && self.v >= 0.0) {
            return Err(Error::param("v", format!("must be finite and >= 0, got {}", self.v)));
        }
        check_porosity(self.theta)?;
        if !(self.background.is_finite() && self.background >= 0.0) {
            return Err(Error::param(
                "background",
                format!("must be finite and >= 0, got {}", self.background),
            ));
        }
        if !(self.c0.is_finite() && self.c0 >= self.background) {
            return Err(Error::param(
                "C0",
                format!(
                    "must be finite and >= background ({}), got {}",
                    self.background, self.c0
                ),
            ));
        }
        self.species.retardation_factor(self.theta)?;
        Ok(())
    }

    pub fn retardation(&self) -> Result<f64> {
        self.species.retardation_factor(self.theta)
    }
}

/// Regular node lattice over the soil cross-section. Node (0, 0) sits at the
/// surface on the left edge; z grows downward.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub nx: usize,
    pub nz: usize,
    /// cm
    pub dx: f64,
    /// cm
    pub dz: f64,
}

impl GridSpec {
    pub fn new(nx: usize, nz: usize, dx: f64, dz: f64) -> Result<Self> {
        let grid = GridSpec { nx, nz, dx, dz };
        grid.validate()?;
        Ok(grid)
    }

    /// Builds a grid covering `width` by `depth` cm at spacing `h`.
    pub fn from_extent(width: f64, depth: f64, h: f64) -> Result<Self> {
        let nx = nodes_for(width, h, "width")?;
        let nz = nodes_for(depth, h, "depth")?;
        GridSpec::new(nx, nz, h, h)
    }

    pub fn validate(&self) -> Result<()> {
        if self.nx < 3 || self.nz < 3 {
            return Err(Error::Grid(format!(
                "need at least 3 nodes per axis, got {}x{}",
                self.nx, self.nz
            )));
        }
        if !(self.dx.is_finite() && self.dx > 0.0 && self.dz.is_finite() && self.dz > 0.0) {
            return Err(Error::Grid(format!(
                "spacings must be finite and > 0, got dx={} dz={}",
                self.dx, self.dz
            )));
        }
        Ok(())
    }

    pub fn width(&self) -> f64 {
        (self.nx - 1) as f64 * self.dx
    }

    pub fn depth(&self) -> f64 {
        (self.nz - 1) as f64 * self.dz
    }

    pub fn len(&self) -> usize {
        self.nx * self.nz
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn x(&self, i: usize) -> f64 {
        i as f64 * self.dx
    }

    pub fn z(&self, j: usize) -> f64 {
        j as f64 * self.dz
    }

    /// Column used for depth profiles: the middle one.
    pub fn center_column(&self) -> usize {
        self.nx / 2
    }
}

fn nodes_for(extent: f64, h: f64, what: &str) -> Result<usize> {
    if !(extent.is_finite() && extent > 0.0 && h.is_finite() && h > 0.0) {
        return Err(Error::Grid(format!(
            "{what} {extent} cm at spacing {h} cm is not a valid lattice"
        )));
    }
    let cells = extent / h;
    let rounded = cells.round();
    if (cells - rounded).abs() > 1e-9 * cells.max(1.0) {
        return Err(Error::Grid(format!(
            "{what} {extent} cm is not divisible by spacing {h} cm"
        )));
    }
    Ok(rounded as usize + 1)
}

/// Advection stencil.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Scheme {
    /// `(C[i+1] - C[i]) / h`, the forward difference exactly as written in the
    /// discretised transport equation. Downwind for v > 0.
    PaperForward,
    /// `(C[i] - C[i-1]) / h` for v >= 0.
    #[default]
    Upwind,
}

impl Scheme {
    pub fn as_str(self) -> &'static str {
        match self {
            Scheme::PaperForward => "paper_forward",
            Scheme::Upwind => "upwind",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "paper_forward" | "paper-forward" | "forward" => Some(Scheme::PaperForward),
            "upwind" => Some(Scheme::Upwind),
            _ => None,
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// What to do when the explicit scheme's stability limits are exceeded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum StabilityPolicy {
    Error,
    #[default]
    Warn,
    Silent,
}

impl StabilityPolicy {
    pub fn as_str(self) -> &'static str {
        match self {
            StabilityPolicy::Error => "error",
            StabilityPolicy::Warn => "warn",
            StabilityPolicy::Silent => "silent",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "error" => Some(StabilityPolicy::Error),
            "warn" => Some(StabilityPolicy::Warn),
            "silent" => Some(StabilityPolicy::Silent),
            _ => None,
        }
    }
}

impl fmt::Display for StabilityPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Everything needed to reproduce one simulation.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationConfig {
    pub grid: GridSpec,
    pub params: TransportParams,
    pub bc: BoundaryConditionSet,
    /// Time step, days.
    pub dt: f64,
    /// Final time, days.
    pub t_end: f64,
    /// Output times, days, strictly increasing. Empty means "just `t_end`".
    pub snapshot_times: Vec<f64>,
    pub scheme: Scheme,
    pub stability_policy: StabilityPolicy,
}

impl SimulationConfig {
    pub fn validate(&self) -> Result<()> {
        self.grid.validate()?;
        self.params.validate()?;
        if !(self.t_end.is_finite() && self.t_end >= 0.0) {
            return Err(Error::param(
                "t_end",
                format!("must be finite and >= 0, got {}", self.t_end),
            ));
        }
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::param("dt", format!("must be finite and > 0, got {}", self.dt)));
        }
        if self.t_end > 0.0 && self.dt > self.t_end {
            return Err(Error::param(
                "dt",
                format!("time step {} day exceeds t_end {} day", self.dt, self.t_end),
            ));
        }
        for (k, &t) in self.snapshot_times.iter().enumerate() {
            if !(t.is_finite() && (0.0..=self.t_end).contains(&t)) {
                return Err(Error::param(
                    "snapshots",
                    format!("snapshot time {t} day outside [0, {}]", self.t_end),
                ));
            }
            if k > 0 && t <= self.snapshot_times[k - 1] {
                return Err(Error::param("snapshots", "snapshot times must be strictly increasing"));
            }
        }
        Ok(())
    }

    /// Output times actually produced by a run.
    pub fn effective_snapshot_times(&self) -> Vec<f64> {
        if self.snapshot_times.is_empty() {
            vec![self.t_end]
        } else {
            self.snapshot_times.clone()
        }
    }

    pub fn retardation(&self) -> Result<f64> {
        self.params.retardation()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn retardation_examples() {
        assert_eq!(retardation_factor(0.3, 0.0, 5.0).unwrap(), 1.0);
        assert_eq!(retardation_factor(0.3, 7.0, 0.0).unwrap(), 1.0);
        assert!((retardation_factor(0.3, 1.0, 0.3).unwrap() - 2.0).abs() < 1e-15);
        assert!((retardation_factor(0.5, 1.0, 1.5).unwrap() - 4.0).abs() < 1e-15);
    }

    #[test]
    fn retardation_rejects_bad_inputs_by_name() {
        let cases = [
            (0.0, 1.0, 1.0, "theta"),
            (1.0, 1.0, 1.0, "theta"),
            (f64::NAN, 1.0, 1.0, "theta"),
            (0.3, -1.0, 1.0, "rho"),
            (0.3, 1.0, f64::INFINITY, "kd"),
        ];
        for (theta, rho, kd, name) in cases {
            match retardation_factor(theta, rho, kd) {
                Err(Error::Parameter { field, .. }) => assert_eq!(field, name),
                other => panic!("expected parameter error for {name}, got {other:?}"),
            }
        }
    }

    #[test]
    fn diffusion_conversion() {
        let d = convert_diffusion_m2a_to_cm2day(0.02).unwrap();
        assert!((d - 0.547_945_205_479_452).abs() < 1e-15);
        let d = convert_diffusion_m2a_to_cm2day(0.018).unwrap();
        assert!((d - 0.493_150_684_931_506_8).abs() < 1e-15);
        assert!((convert_diffusion_m2a_to_cm2day(0.0365).unwrap() - 1.0).abs() < 1e-15);
        assert!(convert_diffusion_m2a_to_cm2day(0.0).is_err());
        assert!(convert_diffusion_m2a_to_cm2day(-1.0).is_err());
        assert!(convert_diffusion_m2a_to_cm2day(f64::NAN).is_err());
    }

    #[test]
    fn grid_from_extent() {
        let g = GridSpec::from_extent(8.0, 10.0, 0.5).unwrap();
        assert_eq!((g.nx, g.nz), (17, 21));
        assert!(GridSpec::from_extent(8.0, 10.0, 3.0).is_err());
        assert!(GridSpec::new(2, 11, 1.0, 1.0).is_err());
        assert!(GridSpec::new(9, 11, 0.0, 1.0).is_err());
    }

    #[test]
    fn explicit_r_below_one_rejected() {
        let s = Species {
            name: "x".into(),
            charge_label: String::new(),
            retardation: Retardation::Explicit(0.5),
        };
        assert!(s.retardation_factor(0.3).is_err());
    }
}
