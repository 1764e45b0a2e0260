//! Built-in landfill presets.
//!
//! Shared physical constants: C0 = 675 mg/L, porosity 0.30,
//! D = 0.02 m²/a, 100-day study period, trace background taken as 0 mg/L,
//! 9 x 11 nodes at 1 cm.
//!
//! Two values are assumptions rather than site data and are labelled as such
//! wherever a preset is printed:
//! - Darcy velocity, [`ASSUMED_VELOCITY_CM_PER_DAY`].
//! - K⁺ retardation, [`ASSUMED_POTASSIUM_R`] (chloride is non-sorbing, R = 1).

use crate::engine::BoundaryConditionSet;
use crate::error::{Error, Result};
use crate::transport::{
    convert_diffusion_m2a_to_cm2day, GridSpec, Retardation, Scheme, SimulationConfig, Species, StabilityPolicy,
    TransportParams,
};

pub const SCENARIOS: [&str; 2] = ["landfill-k", "landfill-cl"];

pub const SOURCE_CONCENTRATION_MG_PER_L: f64 = 675.0;
pub const POROSITY: f64 = 0.30;
pub const DIFFUSION_M2_PER_ANNUM: f64 = 0.02;
pub const MIN_DIFFUSION_M2_PER_ANNUM: f64 = 0.018;
pub const STUDY_PERIOD_DAYS: f64 = 100.0;
pub const ASSUMED_VELOCITY_CM_PER_DAY: f64 = 0.01;
pub const ASSUMED_POTASSIUM_R: f64 = 4.0;
pub const DEFAULT_DT_DAYS: f64 = 0.01;

pub fn load_scenario(name: &str) -> Result<SimulationConfig> {
    let species = match name {
        "landfill-k" => Species {
            name: "K+".into(),
            charge_label: "cation".into(),
            retardation: Retardation::Explicit(ASSUMED_POTASSIUM_R),
        },
        "landfill-cl" => Species::conservative("Cl-", "anion"),
        _ => {
            return Err(Error::UnknownScenario {
                name: name.to_string(),
                valid: SCENARIOS.join(", "),
            })
        }
    };
    let config = SimulationConfig {
        grid: GridSpec::new(9, 11, 1.0, 1.0)?,
        params: TransportParams {
            d: convert_diffusion_m2a_to_cm2day(DIFFUSION_M2_PER_ANNUM)?,
            v: ASSUMED_VELOCITY_CM_PER_DAY,
            theta: POROSITY,
            c0: SOURCE_CONCENTRATION_MG_PER_L,
            background: 0.0,
            species,
        },
        bc: BoundaryConditionSet::default(),
        dt: DEFAULT_DT_DAYS,
        t_end: STUDY_PERIOD_DAYS,
        snapshot_times: vec![1.0, 50.0, 100.0],
        scheme: Scheme::Upwind,
        stability_policy: StabilityPolicy::Warn,
    };
    config.validate()?;
    Ok(config)
}

/// One-line note on which preset values are assumptions.
pub fn assumption_note(name: &str) -> Option<String> {
    let v = format!("v = {ASSUMED_VELOCITY_CM_PER_DAY} cm/day is an assumed value (not site data)");
    match name {
        "landfill-k" => Some(format!(
            "{v}; R = {ASSUMED_POTASSIUM_R} for K+ is an assumed value (not site data)"
        )),
        "landfill-cl" => Some(v),
        _ => None,
    }
}
