//! Config documents, profile CSV and SVG charts.

pub mod config;
pub mod csv;
pub mod svg;

pub use config::{parse_config, parse_document, render_config, ConfigDocument, OutputSpec};
pub use csv::{read_profiles_csv, render_profiles_csv, write_profiles_csv, ProfileRow};
pub use svg::{render_profile_svg, ChartOptions, Series};
