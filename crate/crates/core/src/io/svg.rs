//! Depth-profile line charts as standalone SVG.
//!
//! Concentration runs along the horizontal axis, depth down the vertical axis
//! (surface at the top). Output depends only on the input, so charts can be
//! compared byte for byte.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::verify::Profile;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 520.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 190.0;
const TOP: f64 = 50.0;
const BOTTOM: f64 = 60.0;

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    pub profile: Profile,
}

impl Series {
    pub fn new(label: impl Into<String>, profile: Profile) -> Self {
        Series {
            label: label.into(),
            profile,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ChartOptions {
    pub title: String,
    /// Upper end of the concentration axis. Curves beyond it are clipped.
    /// Defaults to the largest plotted value.
    pub c_max: Option<f64>,
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// Tick spacing of 1, 2 or 5 times a power of ten giving about `target` ticks.
fn nice_step(range: f64, target: f64) -> f64 {
    let raw = range / target;
    let mag = 10f64.powf(raw.log10().floor());
    let norm = raw / mag;
    let m = if norm <= 1.0 {
        1.0
    } else if norm <= 2.0 {
        2.0
    } else if norm <= 5.0 {
        5.0
    } else {
        10.0
    };
    m * mag
}

fn tick_label(v: f64) -> String {
    let s = format!("{v:.3}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".to_string()
    } else {
        s.to_string()
    }
}

pub fn render_profile_svg(series: &[Series], options: &ChartOptions) -> Result<String> {
    if series.is_empty() {
        return Err(Error::param("series", "nothing to plot"));
    }
    for s in series {
        let p = &s.profile;
        if p.z.len() != p.c.len() {
            return Err(Error::param(
                "series",
                format!("`{}`: depth and value counts differ", s.label),
            ));
        }
        if p.z.len() < 2 {
            return Err(Error::param("series", format!("`{}` needs at least 2 points", s.label)));
        }
        if p.z.iter().chain(&p.c).any(|v| !v.is_finite()) {
            return Err(Error::param("series", format!("`{}` has non-finite values", s.label)));
        }
    }

    let z_max = series
        .iter()
        .flat_map(|s| s.profile.z.iter().copied())
        .fold(0.0, f64::max);
    let data_c_max = series
        .iter()
        .flat_map(|s| s.profile.c.iter().copied())
        .fold(0.0, f64::max);
    let c_top = options.c_max.unwrap_or(data_c_max);
    let c_step = nice_step(if c_top > 0.0 { c_top } else { 1.0 }, 6.0);
    let c_axis = (c_top / c_step).ceil().max(1.0) * c_step;
    let z_step = nice_step(if z_max > 0.0 { z_max } else { 1.0 }, 8.0);
    let z_axis = (z_max / z_step).ceil().max(1.0) * z_step;

    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let px = |c: f64| LEFT + c / c_axis * plot_w;
    let py = |z: f64| TOP + z / z_axis * plot_h;

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<clipPath id="plot"><rect x="{LEFT:.2}" y="{TOP:.2}" width="{plot_w:.2}" height="{plot_h:.2}"/></clipPath>"#
    );
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="28" text-anchor="middle" font-size="15">{}</text>"#,
        LEFT + plot_w / 2.0,
        escape(&options.title)
    );

    // grid and ticks
    let mut k = 0.0;
    while k * c_step <= c_axis * (1.0 + 1e-9) {
        let c = k * c_step;
        let x = px(c);
        let _ = writeln!(
            out,
            r##"<line x1="{x:.2}" y1="{TOP:.2}" x2="{x:.2}" y2="{:.2}" stroke="#e0e0e0"/>"##,
            TOP + plot_h
        );
        let _ = writeln!(
            out,
            r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            TOP + plot_h + 18.0,
            tick_label(c)
        );
        k += 1.0;
    }
    let mut k = 0.0;
    while k * z_step <= z_axis * (1.0 + 1e-9) {
        let z = k * z_step;
        let y = py(z);
        let _ = writeln!(
            out,
            r##"<line x1="{LEFT:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#e0e0e0"/>"##,
            LEFT + plot_w
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            LEFT - 8.0,
            y + 4.0,
            tick_label(z)
        );
        k += 1.0;
    }
    let _ = writeln!(
        out,
        r#"<rect x="{LEFT:.2}" y="{TOP:.2}" width="{plot_w:.2}" height="{plot_h:.2}" fill="none" stroke="black"/>"#
    );
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">Concentration (mg/L)</text>"#,
        LEFT + plot_w / 2.0,
        HEIGHT - 16.0
    );
    let _ = writeln!(
        out,
        r#"<text x="20" y="{:.2}" text-anchor="middle" transform="rotate(-90 20 {:.2})">Depth z (cm)</text>"#,
        TOP + plot_h / 2.0,
        TOP + plot_h / 2.0
    );

    for (n, s) in series.iter().enumerate() {
        let color = PALETTE[n % PALETTE.len()];
        let points: Vec<String> = s
            .profile
            .z
            .iter()
            .zip(&s.profile.c)
            .map(|(&z, &c)| format!("{:.2},{:.2}", px(c), py(z)))
            .collect();
        let _ = writeln!(
            out,
            r#"<polyline clip-path="url(#plot)" fill="none" stroke="{color}" stroke-width="1.8" points="{}"/>"#,
            points.join(" ")
        );
        let ly = TOP + 14.0 + 20.0 * n as f64;
        let lx = LEFT + plot_w + 16.0;
        let _ = writeln!(
            out,
            r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{color}" stroke-width="2.5"/>"#,
            lx + 24.0
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}">{}</text>"#,
            lx + 30.0,
            ly + 4.0,
            escape(&s.label)
        );
    }
    out.push_str("</svg>\n");
    Ok(out)
}
