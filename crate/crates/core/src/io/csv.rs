//! Profile CSV: `t_day,x_cm,z_cm,conc_mg_per_L`, one row per (snapshot,
//! node) ordered by t, then x, then z. Numbers carry 9 significant digits.

use std::io::Write;

use crate::engine::SimulationResult;
use crate::error::{Error, Result};

pub const HEADER: &str = "t_day,x_cm,z_cm,conc_mg_per_L";

/// Formats `v` with 9 significant digits: plain decimal for exponents in
/// [-5, 8], scientific otherwise, trailing zeros trimmed.
pub fn format_sig9(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    if !v.is_finite() {
        return v.to_string();
    }
    let sci = format!("{v:.8e}");
    let (mantissa, exp) = sci.split_once('e').expect("scientific format has an exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..=8).contains(&exp) {
        let decimals = (8 - exp) as usize;
        trim_fraction(format!("{v:.decimals$}"))
    } else {
        format!("{}e{exp}", trim_fraction(mantissa.to_string()))
    }
}

fn trim_fraction(mut s: String) -> String {
    if s.contains('.') {
        while s.ends_with('0') {
            s.pop();
        }
        if s.ends_with('.') {
            s.pop();
        }
    }
    s
}

/// Writes every snapshot of `result`; returns the number of data rows.
pub fn write_profiles_csv<W: Write>(result: &SimulationResult, mut sink: W) -> Result<usize> {
    writeln!(sink, "{HEADER}")?;
    let mut rows = 0;
    for field in &result.snapshots {
        let g = field.grid;
        let t = format_sig9(field.t);
        for i in 0..g.nx {
            let x = format_sig9(g.x(i));
            for j in 0..g.nz {
                writeln!(sink, "{t},{x},{},{}", format_sig9(g.z(j)), format_sig9(field.get(i, j)))?;
                rows += 1;
            }
        }
    }
    sink.flush()?;
    Ok(rows)
}

pub fn render_profiles_csv(result: &SimulationResult) -> String {
    let mut buf = Vec::new();
    write_profiles_csv(result, &mut buf).expect("writing to memory cannot fail");
    String::from_utf8(buf).expect("CSV is ASCII")
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileRow {
    pub t_day: f64,
    pub x_cm: f64,
    pub z_cm: f64,
    pub conc_mg_per_l: f64,
}

pub fn read_profiles_csv(text: &str) -> Result<Vec<ProfileRow>> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.trim() == HEADER => {}
        other => {
            return Err(Error::param(
                "csv",
                format!("expected header `{HEADER}`, got `{}`", other.unwrap_or("")),
            ))
        }
    }
    lines
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(n, line)| {
            let cols: Vec<f64> = line
                .split(',')
                .map(|c| c.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::param("csv", format!("row {}: {e}", n + 1)))?;
            match cols.as_slice() {
                &[t_day, x_cm, z_cm, conc_mg_per_l] => Ok(ProfileRow {
                    t_day,
                    x_cm,
                    z_cm,
                    conc_mg_per_l,
                }),
                _ => Err(Error::param("csv", format!("row {}: expected 4 columns", n + 1))),
            }
        })
        .collect()
}
