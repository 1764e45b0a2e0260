//! Unit-suffixed quantities (`0.02 m2/a`, `0.01day`) and their conversion to
//! the canonical cm / day / mg·L⁻¹ system.

use std::fmt;

use crate::error::{Error, Result};
use crate::transport::convert_diffusion_m2a_to_cm2day;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dimension {
    /// cm
    Length,
    /// day
    Time,
    /// cm²/day
    Diffusivity,
    /// cm/day
    Velocity,
    /// mg/L
    Concentration,
    /// g/cm³
    Density,
    /// cm³/g
    Distribution,
}

impl Dimension {
    pub fn canonical_unit(self) -> &'static str {
        match self {
            Dimension::Length => "cm",
            Dimension::Time => "day",
            Dimension::Diffusivity => "cm2/day",
            Dimension::Velocity => "cm/day",
            Dimension::Concentration => "mg/L",
            Dimension::Density => "g/cm3",
            Dimension::Distribution => "cm3/g",
        }
    }

    fn factor(self, unit: &str) -> Option<f64> {
        let f = match (self, unit) {
            (Dimension::Length, "cm") => 1.0,
            (Dimension::Length, "mm") => 0.1,
            (Dimension::Length, "m") => 100.0,

            (Dimension::Time, "day" | "days" | "d") => 1.0,
            (Dimension::Time, "h" | "hr") => 1.0 / 24.0,
            (Dimension::Time, "s") => 1.0 / 86_400.0,
            (Dimension::Time, "a" | "yr" | "year" | "years") => 365.0,

            (Dimension::Diffusivity, "cm2/day" | "cm2/d") => 1.0,
            (Dimension::Diffusivity, "cm2/s") => 86_400.0,
            (Dimension::Diffusivity, "m2/day" | "m2/d") => 1.0e4,
            (Dimension::Diffusivity, "m2/s") => 1.0e4 * 86_400.0,

            (Dimension::Velocity, "cm/day" | "cm/d") => 1.0,
            (Dimension::Velocity, "cm/s") => 86_400.0,
            (Dimension::Velocity, "m/day" | "m/d") => 100.0,
            (Dimension::Velocity, "m/s") => 100.0 * 86_400.0,
            (Dimension::Velocity, "m/a" | "m/yr") => 100.0 / 365.0,

            (Dimension::Concentration, "mg/L" | "mg/l") => 1.0,
            (Dimension::Concentration, "g/L" | "g/l") => 1000.0,
            (Dimension::Concentration, "ug/L" | "ug/l") => 1.0e-3,
            (Dimension::Concentration, "mg/m3") => 1.0e-3,

            (Dimension::Density, "g/cm3" | "kg/L" | "kg/l") => 1.0,
            (Dimension::Density, "kg/m3") => 1.0e-3,
            (Dimension::Density, "mg/m3") => 1.0e-9,

            (Dimension::Distribution, "cm3/g" | "mL/g" | "ml/g" | "L/kg" | "l/kg") => 1.0,
            (Dimension::Distribution, "m3/kg") => 1.0e3,
            (Dimension::Distribution, "m3/mg") => 1.0e9,
            _ => return None,
        };
        Some(f)
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Dimension::Length => "length",
            Dimension::Time => "time",
            Dimension::Diffusivity => "diffusivity",
            Dimension::Velocity => "velocity",
            Dimension::Concentration => "concentration",
            Dimension::Density => "density",
            Dimension::Distribution => "distribution factor",
        };
        f.write_str(name)
    }
}

/// Splits `"0.02 m2/a"` / `"0.01day"` into the number and its unit suffix.
/// The unit is empty when absent.
pub fn split_quantity(text: &str) -> Result<(f64, String)> {
    let s = text.trim();
    let bytes = s.as_bytes();
    let mut end = 0;
    while end < bytes.len() {
        let c = bytes[end] as char;
        let exponent = (c == 'e' || c == 'E')
            && end > 0
            && bytes
                .get(end + 1)
                .is_some_and(|&n| (n as char).is_ascii_digit() || n == b'-' || n == b'+');
        if c.is_ascii_digit() || c == '.' || c == '-' || c == '+' || exponent {
            end += 1;
        } else {
            break;
        }
    }
    let number: f64 = s[..end]
        .parse()
        .map_err(|_| Error::param("quantity", format!("`{text}` does not start with a number")))?;
    let unit = normalize_unit(s[end..].trim());
    Ok((number, unit))
}

fn normalize_unit(unit: &str) -> String {
    unit.replace('²', "2")
        .replace('³', "3")
        .replace("^2", "2")
        .replace("^3", "3")
        .replace(' ', "")
}

/// Converts `value unit` to the canonical unit of `dim`.
pub fn to_canonical(value: f64, unit: &str, dim: Dimension) -> Result<f64> {
    if !value.is_finite() {
        return Err(Error::param("quantity", format!("non-finite {dim} value")));
    }
    let unit = normalize_unit(unit);
    if dim == Dimension::Diffusivity && matches!(unit.as_str(), "m2/a" | "m2/yr") {
        return convert_diffusion_m2a_to_cm2day(value);
    }
    dim.factor(&unit).map(|f| value * f).ok_or_else(|| {
        Error::param(
            "unit",
            format!(
                "`{unit}` is not a recognised {dim} unit (canonical: {})",
                dim.canonical_unit()
            ),
        )
    })
}

/// Parses a suffixed quantity. With `default_unit` set, a bare number is
/// taken in that unit; otherwise a missing suffix is an error.
pub fn parse_quantity(text: &str, dim: Dimension, default_unit: Option<&str>) -> Result<f64> {
    let (value, unit) = split_quantity(text)?;
    if unit.is_empty() {
        return match default_unit {
            Some(u) => to_canonical(value, u, dim),
            None => Err(Error::param(
                "unit",
                format!(
                    "`{text}` has no unit; a {dim} needs one (e.g. {})",
                    dim.canonical_unit()
                ),
            )),
        };
    }
    to_canonical(value, &unit, dim)
}
