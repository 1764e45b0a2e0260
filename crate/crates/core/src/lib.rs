//! Leachate ion transport through saturated soil.
//!
//! An explicit finite-difference solver for the 2-D retarded
//! advection-diffusion equation below a landfill, the closed-form erfc
//! solution used to check it, refinement and sensitivity studies, and the
//! config/CSV/SVG plumbing behind the `leachate` command-line tool.
//!
//! ```no_run
//! use leachate::{engine, scenario};
//!
//! let config = scenario::load_scenario("landfill-cl")?;
//! let result = engine::run(&config)?;
//! let profile = result.final_field().column(config.grid.center_column());
//! println!("{profile:?}");
//! # Ok::<(), leachate::Error>(())
//! ```

pub mod analytical;
pub mod engine;
mod error;
pub mod io;
pub mod scenario;
pub mod special;
pub mod transport;
pub mod units;
pub mod verify;

pub use error::{Error, Result};
pub use transport::{
    convert_diffusion_m2a_to_cm2day, retardation_factor, GridSpec, Retardation, Scheme, SimulationConfig, Species,
    StabilityPolicy, TransportParams,
};
