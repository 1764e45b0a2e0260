//! Sectioned key-value configuration documents.
//!
//! ```text
//! preset = landfill-cl        # optional, before any section
//!
//! [grid]
//! nx = 9
//! nz = 11
//! dx = 1 cm
//! dz = 1 cm
//!
//! [transport]
//! D = 0.02 m2/a
//! v = 0.01 cm/day
//! theta = 0.30
//! C0 = 675 mg/L
//! background = 0 mg/L
//!
//! [species]
//! name = Cl-
//! charge = anion
//! R = 1                       # or: rho = 1.6 g/cm3 and kd = 0.5 cm3/g
//!
//! [boundary]
//! sides = neumann             # neumann | reflect
//! bottom = zero_gradient      # zero_gradient | frozen
//!
//! [time]
//! dt = 0.01 day
//! t_end = 100 day
//! snapshots = 1, 50, 100 day
//! scheme = upwind             # upwind | paper_forward
//! stability = warn            # error | warn | silent
//!
//! [output]
//! csv = profiles.csv
//! svg = profiles.svg
//! column = 4
//! ```
//!
//! Every dimensioned value needs a unit suffix. Unknown sections or keys and
//! repeated keys are errors. Without a preset, `[grid]` nx/nz/dx/dz,
//! `[transport]` D/v/theta/C0 and `[time]` dt/t_end are required.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;

use crate::engine::{BottomCondition, BoundaryConditionSet, SideCondition, TopCondition};
use crate::error::{Error, Result};
use crate::scenario::load_scenario;
use crate::transport::{GridSpec, Retardation, Scheme, SimulationConfig, Species, StabilityPolicy, TransportParams};
use crate::units::{parse_quantity, split_quantity, to_canonical, Dimension};

const SECTIONS: [(&str, &[&str]); 6] = [
    ("grid", &["nx", "nz", "dx", "dz"]),
    ("transport", &["D", "v", "theta", "C0", "background"]),
    ("species", &["name", "charge", "R", "rho", "kd"]),
    ("boundary", &["top", "sides", "bottom"]),
    ("time", &["dt", "t_end", "snapshots", "scheme", "stability"]),
    ("output", &["csv", "svg", "column"]),
];

/// Output options carried alongside a config.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct OutputSpec {
    pub csv: Option<PathBuf>,
    pub svg: Option<PathBuf>,
    /// Node column used for depth profiles; grid centre when absent.
    pub column: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigDocument {
    pub preset: Option<String>,
    pub config: SimulationConfig,
    pub output: OutputSpec,
}

struct Entry {
    value: String,
    line: usize,
}

type Sections = BTreeMap<String, BTreeMap<String, Entry>>;

fn tokenize(text: &str) -> Result<(Option<String>, Sections)> {
    let mut preset = None;
    let mut sections: Sections = BTreeMap::new();
    let mut current: Option<String> = None;

    for (n, raw) in text.lines().enumerate() {
        let line_no = n + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('[') {
            let name = rest
                .strip_suffix(']')
                .ok_or_else(|| Error::config(line, "", format!("line {line_no}: malformed section header")))?
                .trim();
            if !SECTIONS.iter().any(|(s, _)| *s == name) {
                return Err(Error::config(name, "", format!("line {line_no}: unknown section")));
            }
            if sections.contains_key(name) {
                return Err(Error::config(name, "", format!("line {line_no}: section repeated")));
            }
            sections.insert(name.to_string(), BTreeMap::new());
            current = Some(name.to_string());
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Error::config(
                current.as_deref().unwrap_or("-"),
                line,
                format!("line {line_no}: expected `key = value`"),
            )
        })?;
        let (key, value) = (key.trim(), value.trim());
        let Some(section) = current.as_deref() else {
            if key == "preset" {
                preset = Some(value.to_string());
                continue;
            }
            return Err(Error::config(
                "-",
                key,
                format!("line {line_no}: key outside any section"),
            ));
        };
        let known = SECTIONS
            .iter()
            .find(|(s, _)| *s == section)
            .map(|(_, k)| *k)
            .unwrap_or(&[]);
        if !known.contains(&key) {
            return Err(Error::config(section, key, format!("line {line_no}: unknown key")));
        }
        let table = sections.get_mut(section).expect("section inserted at header");
        if table.contains_key(key) {
            return Err(Error::config(section, key, format!("line {line_no}: key repeated")));
        }
        table.insert(
            key.to_string(),
            Entry {
                value: value.to_string(),
                line: line_no,
            },
        );
    }
    Ok((preset, sections))
}

struct Reader<'a> {
    sections: &'a Sections,
}

impl Reader<'_> {
    fn get(&self, section: &str, key: &str) -> Option<&Entry> {
        self.sections.get(section).and_then(|s| s.get(key))
    }

    fn raw(&self, section: &str, key: &str) -> Option<&str> {
        self.get(section, key).map(|e| e.value.as_str())
    }

    fn wrap(section: &str, key: &str, entry: &Entry, err: Error) -> Error {
        let reason = match err {
            Error::Parameter { reason, .. } => reason,
            other => other.to_string(),
        };
        Error::config(section, key, format!("line {}: {reason}", entry.line))
    }

    fn quantity(&self, section: &str, key: &str, dim: Dimension) -> Result<Option<f64>> {
        let Some(e) = self.get(section, key) else {
            return Ok(None);
        };
        parse_quantity(&e.value, dim, None)
            .map(Some)
            .map_err(|err| Self::wrap(section, key, e, err))
    }

    fn number(&self, section: &str, key: &str) -> Result<Option<f64>> {
        let Some(e) = self.get(section, key) else {
            return Ok(None);
        };
        let (v, unit) = split_quantity(&e.value).map_err(|err| Self::wrap(section, key, e, err))?;
        if !unit.is_empty() && unit != "-" {
            return Err(Error::config(
                section,
                key,
                format!("line {}: dimensionless value takes no unit, got `{unit}`", e.line),
            ));
        }
        Ok(Some(v))
    }

    fn count(&self, section: &str, key: &str) -> Result<Option<usize>> {
        let Some(e) = self.get(section, key) else {
            return Ok(None);
        };
        e.value.parse::<usize>().map(Some).map_err(|_| {
            Error::config(
                section,
                key,
                format!("line {}: expected a non-negative integer, got `{}`", e.line, e.value),
            )
        })
    }

    fn choice<T>(&self, section: &str, key: &str, parse: fn(&str) -> Option<T>, allowed: &str) -> Result<Option<T>> {
        let Some(e) = self.get(section, key) else {
            return Ok(None);
        };
        parse(&e.value).map(Some).ok_or_else(|| {
            Error::config(
                section,
                key,
                format!("line {}: `{}` is not one of {allowed}", e.line, e.value),
            )
        })
    }

    fn time_list(&self, section: &str, key: &str) -> Result<Option<Vec<f64>>> {
        let Some(e) = self.get(section, key) else {
            return Ok(None);
        };
        let tokens: Vec<&str> = e.value.split(',').map(str::trim).filter(|t| !t.is_empty()).collect();
        let Some(last) = tokens.last() else {
            return Ok(Some(Vec::new()));
        };
        let (_, trailing_unit) = split_quantity(last).map_err(|err| Self::wrap(section, key, e, err))?;
        tokens
            .iter()
            .map(|tok| {
                let (v, unit) = split_quantity(tok)?;
                let unit = if unit.is_empty() { trailing_unit.clone() } else { unit };
                if unit.is_empty() {
                    return Err(Error::param("snapshots", format!("`{}` has no time unit", e.value)));
                }
                to_canonical(v, &unit, Dimension::Time)
            })
            .collect::<Result<Vec<_>>>()
            .map(Some)
            .map_err(|err| Self::wrap(section, key, e, err))
    }

    fn require<T>(value: Option<T>, have_preset: bool, section: &str, key: &str) -> Result<Option<T>> {
        if value.is_none() && !have_preset {
            return Err(Error::config(section, key, "required (no preset named)"));
        }
        Ok(value)
    }
}

fn section_for(field: &str) -> &'static str {
    match field {
        "D" | "v" | "theta" | "C0" | "background" => "transport",
        "R" | "rho" | "kd" => "species",
        "dt" | "t_end" | "snapshots" => "time",
        _ => "grid",
    }
}

fn apply_document(base: Option<SimulationConfig>, sections: &Sections) -> Result<(SimulationConfig, OutputSpec)> {
    let rd = Reader { sections };
    let have = base.is_some();

    let nx = Reader::require(rd.count("grid", "nx")?, have, "grid", "nx")?;
    let nz = Reader::require(rd.count("grid", "nz")?, have, "grid", "nz")?;
    let dx = Reader::require(rd.quantity("grid", "dx", Dimension::Length)?, have, "grid", "dx")?;
    let dz = Reader::require(rd.quantity("grid", "dz", Dimension::Length)?, have, "grid", "dz")?;
    let d = Reader::require(
        rd.quantity("transport", "D", Dimension::Diffusivity)?,
        have,
        "transport",
        "D",
    )?;
    let v = Reader::require(
        rd.quantity("transport", "v", Dimension::Velocity)?,
        have,
        "transport",
        "v",
    )?;
    let theta = Reader::require(rd.number("transport", "theta")?, have, "transport", "theta")?;
    let c0 = Reader::require(
        rd.quantity("transport", "C0", Dimension::Concentration)?,
        have,
        "transport",
        "C0",
    )?;
    let background = rd.quantity("transport", "background", Dimension::Concentration)?;
    let dt = Reader::require(rd.quantity("time", "dt", Dimension::Time)?, have, "time", "dt")?;
    let t_end = Reader::require(rd.quantity("time", "t_end", Dimension::Time)?, have, "time", "t_end")?;

    let r = rd.number("species", "R")?;
    let rho = rd.quantity("species", "rho", Dimension::Density)?;
    let kd = rd.quantity("species", "kd", Dimension::Distribution)?;
    let retardation = match (r, rho, kd) {
        (Some(_), Some(_), _) | (Some(_), _, Some(_)) => {
            return Err(Error::config("species", "R", "give either R or rho and kd, not both"))
        }
        (Some(r), None, None) => Some(Retardation::Explicit(r)),
        (None, Some(rho), Some(kd)) => Some(Retardation::Sorption { rho, kd }),
        (None, Some(_), None) => return Err(Error::config("species", "kd", "rho given without kd")),
        (None, None, Some(_)) => return Err(Error::config("species", "rho", "kd given without rho")),
        (None, None, None) => None,
    };

    if let Some(top) = rd.raw("boundary", "top") {
        if top != "source" {
            return Err(Error::config(
                "boundary",
                "top",
                format!("the surface is always the source; only `source` is accepted, got `{top}`"),
            ));
        }
    }
    let sides = rd.choice("boundary", "sides", SideCondition::parse, "neumann, reflect")?;
    let bottom = rd.choice("boundary", "bottom", BottomCondition::parse, "zero_gradient, frozen")?;
    let scheme = rd.choice("time", "scheme", Scheme::parse, "upwind, paper_forward")?;
    let policy = rd.choice("time", "stability", StabilityPolicy::parse, "error, warn, silent")?;
    let snapshots = rd.time_list("time", "snapshots")?;

    let mut cfg = base.unwrap_or_else(|| SimulationConfig {
        grid: GridSpec {
            nx: 0,
            nz: 0,
            dx: 0.0,
            dz: 0.0,
        },
        params: TransportParams {
            d: 0.0,
            v: 0.0,
            theta: 0.0,
            c0: 0.0,
            background: 0.0,
            species: Species::conservative("solute", ""),
        },
        bc: BoundaryConditionSet::default(),
        dt: 0.0,
        t_end: 0.0,
        snapshot_times: Vec::new(),
        scheme: Scheme::default(),
        stability_policy: StabilityPolicy::default(),
    });

    macro_rules! set {
        ($opt:expr => $dst:expr) => {
            if let Some(x) = $opt {
                $dst = x;
            }
        };
    }
    set!(nx => cfg.grid.nx);
    set!(nz => cfg.grid.nz);
    set!(dx => cfg.grid.dx);
    set!(dz => cfg.grid.dz);
    set!(d => cfg.params.d);
    set!(v => cfg.params.v);
    set!(theta => cfg.params.theta);
    set!(c0 => cfg.params.c0);
    set!(background => cfg.params.background);
    set!(retardation => cfg.params.species.retardation);
    set!(rd.raw("species", "name").map(str::to_string) => cfg.params.species.name);
    set!(rd.raw("species", "charge").map(str::to_string) => cfg.params.species.charge_label);
    set!(sides => cfg.bc.sides);
    set!(bottom => cfg.bc.bottom);
    cfg.bc.top = TopCondition::Source;
    set!(dt => cfg.dt);
    set!(t_end => cfg.t_end);
    let explicit_snapshots = snapshots.is_some();
    set!(snapshots => cfg.snapshot_times);
    set!(scheme => cfg.scheme);
    set!(policy => cfg.stability_policy);

    // a shortened horizon drops preset snapshots beyond it
    if t_end.is_some() && !explicit_snapshots {
        let end = cfg.t_end;
        cfg.snapshot_times.retain(|&t| t <= end);
    }

    cfg.validate().map_err(|err| match err {
        Error::Parameter { field, reason } => Error::config(section_for(field), field, reason),
        Error::Grid(reason) => Error::config("grid", "", reason),
        other => other,
    })?;

    let output = OutputSpec {
        csv: rd.raw("output", "csv").map(PathBuf::from),
        svg: rd.raw("output", "svg").map(PathBuf::from),
        column: rd.count("output", "column")?,
    };
    if let Some(c) = output.column {
        if c >= cfg.grid.nx {
            return Err(Error::config(
                "output",
                "column",
                format!("column {c} outside grid of {} columns", cfg.grid.nx),
            ));
        }
    }
    Ok((cfg, output))
}

/// Parses a full document, including any `[output]` section.
pub fn parse_document(text: &str) -> Result<ConfigDocument> {
    let (preset, sections) = tokenize(text)?;
    let base = preset
        .as_deref()
        .map(|name| load_scenario(name).map_err(|e| Error::config("-", "preset", e.to_string())))
        .transpose()?;
    let (config, output) = apply_document(base, &sections)?;
    Ok(ConfigDocument { preset, config, output })
}

/// Parses a document into a validated config in canonical units.
pub fn parse_config(text: &str) -> Result<SimulationConfig> {
    parse_document(text).map(|d| d.config)
}

/// Canonical-unit dump that [`parse_config`] reads back to an identical
/// config.
pub fn render_config(config: &SimulationConfig) -> String {
    let mut s = String::new();
    let g = &config.grid;
    let p = &config.params;
    let _ = writeln!(
        s,
        "[grid]\nnx = {}\nnz = {}\ndx = {} cm\ndz = {} cm\n",
        g.nx, g.nz, g.dx, g.dz
    );
    let _ = writeln!(
        s,
        "[transport]\nD = {} cm2/day\nv = {} cm/day\ntheta = {}\nC0 = {} mg/L\nbackground = {} mg/L\n",
        p.d, p.v, p.theta, p.c0, p.background
    );
    let _ = writeln!(
        s,
        "[species]\nname = {}\ncharge = {}",
        p.species.name, p.species.charge_label
    );
    match p.species.retardation {
        Retardation::Explicit(r) => {
            let _ = writeln!(s, "R = {r}\n");
        }
        Retardation::Sorption { rho, kd } => {
            let _ = writeln!(s, "rho = {rho} g/cm3\nkd = {kd} cm3/g\n");
        }
    }
    let _ = writeln!(
        s,
        "[boundary]\ntop = source\nsides = {}\nbottom = {}\n",
        config.bc.sides, config.bc.bottom
    );
    let _ = writeln!(s, "[time]\ndt = {} day\nt_end = {} day", config.dt, config.t_end);
    if !config.snapshot_times.is_empty() {
        let list: Vec<String> = config.snapshot_times.iter().map(|t| t.to_string()).collect();
        let _ = writeln!(s, "snapshots = {} day", list.join(", "));
    }
    let _ = writeln!(s, "scheme = {}\nstability = {}", config.scheme, config.stability_policy);
    s
}
