use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use leachate::analytical::ogata_column;
use leachate::engine::{run, stability_diagnostics, BottomCondition, SideCondition, SimulationResult};
use leachate::io::{parse_document, render_config, render_profile_svg, write_profiles_csv, ChartOptions, Series};
use leachate::scenario::{self, load_scenario, SCENARIOS};
use leachate::units::{parse_quantity, Dimension};
use leachate::verify::{
    self, column_config, error_norms, ComparedAxis, MeshStudyOptions, MeshTimestep, Profile, RefinementStudy,
};
use leachate::{Error, Result, Retardation, Scheme, SimulationConfig, StabilityPolicy};

// stdout writes ignore errors so a closed pipe ends output quietly
macro_rules! out {
    ($($arg:tt)*) => {{
        let _ = writeln!(std::io::stdout(), $($arg)*);
    }};
}

macro_rules! out_raw {
    ($($arg:tt)*) => {{
        let _ = write!(std::io::stdout(), $($arg)*);
    }};
}

/// Default time step of the deep-column comparison, in days.
const COMPARE_DT_DAYS: f64 = 0.005;

const EXIT_CODES: &str = "\
Exit codes:
  0  success
  2  configuration or argument error
  3  stability refusal (--stability error with an unstable time step)
  4  numerical blow-up (non-finite concentration)
  5  I/O failure";

/// Leachate ion transport through saturated soil: explicit finite
/// differences checked against the closed-form erfc solution.
#[derive(Parser)]
#[command(name = "leachate", version, about, after_help = EXIT_CODES)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a simulation and write concentration profiles
    Run(RunArgs),
    /// Run the solver and report its error against the analytical solution
    Compare(CompareArgs),
    /// Time-step refinement study (grid independency in time)
    StudyDt(StudyDtArgs),
    /// Mesh-size refinement study
    StudyMesh(StudyMeshArgs),
    /// Diffusion-coefficient sensitivity study
    StudyD(StudyDArgs),
    /// List presets, or print one as a config document
    Scenario(ScenarioArgs),
    /// Print stability diagnostics without running
    Check(SourceArgs),
}

/// Where the configuration comes from, plus command-line overrides.
///
/// Bare numbers on the command line are read in days, cm, cm/day, m²/a and
/// mg/L; a unit suffix (`0.01day`, `1e-4 m/day`) overrides that.
#[derive(Args, Clone)]
struct SourceArgs {
    /// Built-in preset (landfill-cl, landfill-k); landfill-cl when no --config
    #[arg(long, conflicts_with = "config")]
    preset: Option<String>,
    /// Config document
    #[arg(long)]
    config: Option<PathBuf>,
    /// Time step
    #[arg(long)]
    dt: Option<String>,
    /// Final time
    #[arg(long = "t-end")]
    t_end: Option<String>,
    /// Output times, comma separated
    #[arg(long)]
    snapshots: Option<String>,
    /// Diffusion-dispersion coefficient
    #[arg(long = "diffusion")]
    d: Option<String>,
    /// Darcy velocity
    #[arg(long = "velocity")]
    v: Option<String>,
    /// Source concentration
    #[arg(long)]
    c0: Option<String>,
    /// Retardation factor
    #[arg(long = "retardation")]
    r: Option<f64>,
    /// Advection stencil: upwind | paper_forward
    #[arg(long)]
    scheme: Option<String>,
    /// Side boundaries: neumann | reflect
    #[arg(long)]
    sides: Option<String>,
    /// Bottom boundary: zero_gradient | frozen
    #[arg(long)]
    bottom: Option<String>,
    /// Unstable time step handling: error | warn | silent
    #[arg(long)]
    stability: Option<String>,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    source: SourceArgs,
    /// Profile CSV destination
    #[arg(long)]
    out: Option<PathBuf>,
    /// SVG chart of the profile column at each output time
    #[arg(long)]
    svg: Option<PathBuf>,
    /// Node column for the chart (default: centre)
    #[arg(long)]
    column: Option<usize>,
}

#[derive(Args)]
struct CompareArgs {
    #[command(flatten)]
    source: SourceArgs,
    /// Keep the configured grid instead of a deep single column
    #[arg(long)]
    configured_grid: bool,
    /// Column depth
    #[arg(long, default_value = "50cm")]
    depth: String,
    /// Column node spacing
    #[arg(long, default_value = "0.25cm")]
    dz: String,
    /// SVG chart of numerical vs analytical profiles
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(Args)]
struct StudyDtArgs {
    #[command(flatten)]
    source: SourceArgs,
    /// Time steps, coarse to fine
    #[arg(long, default_value = "100,1,0.1,0.01")]
    dts: String,
    /// Successive-profile change (fraction of C0) counted as no notable difference
    #[arg(long, default_value_t = verify::DEFAULT_INDEPENDENCE_TOL)]
    tol: f64,
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(Args)]
struct StudyMeshArgs {
    #[command(flatten)]
    source: SourceArgs,
    /// Node spacings, coarse to fine
    #[arg(long, default_value = "2,1,0.5")]
    hs: String,
    /// Scale the time step with h² instead of holding it fixed
    #[arg(long)]
    diffusive_dt: bool,
    #[arg(long, default_value_t = verify::DEFAULT_INDEPENDENCE_TOL)]
    tol: f64,
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(Args)]
struct StudyDArgs {
    #[command(flatten)]
    source: SourceArgs,
    /// Diffusion coefficients (m²/a unless suffixed)
    #[arg(long, default_value = "0.018,0.02")]
    ds: String,
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(Args)]
struct ScenarioArgs {
    /// Preset to print; lists presets when omitted
    name: Option<String>,
}

fn arg_err(flag: &str, e: Error) -> Error {
    let reason = match e {
        Error::Parameter { reason, .. } => reason,
        other => other.to_string(),
    };
    Error::Config {
        section: "cli".into(),
        key: flag.into(),
        reason,
    }
}

fn quantity(flag: &str, text: &str, dim: Dimension, default_unit: &str) -> Result<f64> {
    parse_quantity(text, dim, Some(default_unit)).map_err(|e| arg_err(flag, e))
}

fn quantity_list(flag: &str, text: &str, dim: Dimension, default_unit: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| quantity(flag, s, dim, default_unit))
        .collect()
}

fn choice<T>(flag: &str, text: &str, parse: fn(&str) -> Option<T>, allowed: &str) -> Result<T> {
    parse(text).ok_or_else(|| Error::Config {
        section: "cli".into(),
        key: flag.into(),
        reason: format!("`{text}` is not one of {allowed}"),
    })
}

struct Loaded {
    config: SimulationConfig,
    preset: Option<String>,
    csv: Option<PathBuf>,
    svg: Option<PathBuf>,
    column: Option<usize>,
}

/// Builds the config. `figure_mode` selects the paper_forward stencil for
/// presets unless --scheme says otherwise.
fn load(args: &SourceArgs, figure_mode: bool) -> Result<Loaded> {
    let mut loaded = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| with_path(path, e))?;
            let doc = parse_document(&text)?;
            Loaded {
                config: doc.config,
                preset: doc.preset,
                csv: doc.output.csv,
                svg: doc.output.svg,
                column: doc.output.column,
            }
        }
        None => {
            let name = args.preset.as_deref().unwrap_or("landfill-cl");
            let mut config = load_scenario(name)?;
            if figure_mode {
                config.scheme = Scheme::PaperForward;
            }
            Loaded {
                config,
                preset: Some(name.to_string()),
                csv: None,
                svg: None,
                column: None,
            }
        }
    };
    let c = &mut loaded.config;
    if let Some(s) = &args.t_end {
        c.t_end = quantity("--t-end", s, Dimension::Time, "day")?;
        let end = c.t_end;
        c.snapshot_times.retain(|&t| t <= end);
    }
    if let Some(s) = &args.dt {
        c.dt = quantity("--dt", s, Dimension::Time, "day")?;
    }
    if let Some(s) = &args.snapshots {
        c.snapshot_times = quantity_list("--snapshots", s, Dimension::Time, "day")?;
    }
    if let Some(s) = &args.d {
        c.params.d = quantity("--diffusion", s, Dimension::Diffusivity, "m2/a")?;
    }
    if let Some(s) = &args.v {
        c.params.v = quantity("--velocity", s, Dimension::Velocity, "cm/day")?;
    }
    if let Some(s) = &args.c0 {
        c.params.c0 = quantity("--c0", s, Dimension::Concentration, "mg/L")?;
    }
    if let Some(r) = args.r {
        c.params.species.retardation = Retardation::Explicit(r);
    }
    if let Some(s) = &args.scheme {
        c.scheme = choice("--scheme", s, Scheme::parse, "upwind, paper_forward")?;
    }
    if let Some(s) = &args.sides {
        c.bc.sides = choice("--sides", s, SideCondition::parse, "neumann, reflect")?;
    }
    if let Some(s) = &args.bottom {
        c.bc.bottom = choice("--bottom", s, BottomCondition::parse, "zero_gradient, frozen")?;
    }
    if let Some(s) = &args.stability {
        c.stability_policy = choice("--stability", s, StabilityPolicy::parse, "error, warn, silent")?;
    }
    c.validate().map_err(|e| match e {
        Error::Parameter { field, reason } => Error::Config {
            section: "cli".into(),
            key: field.into(),
            reason,
        },
        other => other,
    })?;
    Ok(loaded)
}

fn print_assumptions(preset: Option<&str>) {
    if let Some(note) = preset.and_then(scenario::assumption_note) {
        out!("# note: {note}");
    }
}

fn with_path(path: &Path, e: std::io::Error) -> Error {
    Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| with_path(path, e))
}

fn write_csv(path: &Path, result: &SimulationResult) -> Result<usize> {
    let file = fs::File::create(path).map_err(|e| with_path(path, e))?;
    let mut w = BufWriter::new(file);
    let rows = write_profiles_csv(result, &mut w)?;
    w.flush().map_err(|e| with_path(path, e))?;
    Ok(rows)
}

fn cmd_run(args: RunArgs) -> Result<()> {
    let loaded = load(&args.source, true)?;
    let cfg = &loaded.config;
    print_assumptions(loaded.preset.as_deref());
    let column = args
        .column
        .or(loaded.column)
        .unwrap_or_else(|| cfg.grid.center_column());
    if column >= cfg.grid.nx {
        return Err(Error::Config {
            section: "cli".into(),
            key: "--column".into(),
            reason: format!("column {column} outside grid of {} columns", cfg.grid.nx),
        });
    }
    let result = run(cfg)?;
    out!(
        "ran {} steps (scheme {}, sides {}, bottom {}), stable={}, negative-concentration events={}",
        result.steps,
        cfg.scheme,
        cfg.bc.sides,
        cfg.bc.bottom,
        result.diagnostics.stable,
        result.negative.count
    );
    out!("{:>10}  profile at column {column} (mg/L, surface first)", "t_day");
    for f in &result.snapshots {
        let values: Vec<String> = f.column(column).iter().map(|v| format!("{v:.3}")).collect();
        out!("{:>10}  {}", f.t, values.join(" "));
    }
    if let Some(path) = args.out.or(loaded.csv) {
        let rows = write_csv(&path, &result)?;
        out!("wrote {rows} rows to {}", path.display());
    }
    if let Some(path) = args.svg.or(loaded.svg) {
        let series: Vec<Series> = result
            .snapshots
            .iter()
            .map(|f| Series::new(format!("t = {} day", f.t), Profile::from_field(f, column)))
            .collect();
        let title = format!(
            "{} profile, column {column}, {} sides",
            cfg.params.species.name, cfg.bc.sides
        );
        write_file(
            &path,
            &render_profile_svg(&series, &ChartOptions { title, c_max: None })?,
        )?;
        out!("wrote {}", path.display());
    }
    Ok(())
}

fn cmd_compare(args: CompareArgs) -> Result<()> {
    let loaded = load(&args.source, false)?;
    print_assumptions(loaded.preset.as_deref());
    let cfg = if args.configured_grid {
        loaded.config
    } else {
        let depth = quantity("--depth", &args.depth, Dimension::Length, "cm")?;
        let dz = quantity("--dz", &args.dz, Dimension::Length, "cm")?;
        let mut c = column_config(&loaded.config, depth, dz)?;
        if args.source.config.is_none() {
            if args.source.scheme.is_none() {
                c.scheme = Scheme::Upwind;
            }
            if args.source.dt.is_none() {
                c.dt = COMPARE_DT_DAYS;
            }
        }
        c
    };
    let column = cfg.grid.center_column();
    let r = cfg.retardation()?;
    let result = run(&cfg)?;
    out!(
        "grid {}x{} (dz = {} cm, depth {} cm), dt = {} day, scheme {}, R = {r}, stable={}",
        cfg.grid.nx,
        cfg.grid.nz,
        cfg.grid.dz,
        cfg.grid.depth(),
        cfg.dt,
        cfg.scheme,
        result.diagnostics.stable
    );
    let mut series = Vec::new();
    for f in &result.snapshots {
        let exact = ogata_column(cfg.grid.nz, cfg.grid.dz, f.t, &cfg.params, r)?;
        let numerical = Profile::from_field(f, column);
        let report = error_norms(&numerical.c, &exact, cfg.params.c0, ComparedAxis::ZProfile { column })?;
        out!("t = {:>8} day  {report}", f.t);
        series.push(Series::new(format!("FD t = {} day", f.t), numerical.clone()));
        series.push(Series::new(
            format!("exact t = {} day", f.t),
            Profile {
                z: numerical.z,
                c: exact,
            },
        ));
    }
    if let Some(path) = args.svg {
        let title = format!("{}: finite differences vs analytical", cfg.params.species.name);
        write_file(
            &path,
            &render_profile_svg(&series, &ChartOptions { title, c_max: None })?,
        )?;
        out!("wrote {}", path.display());
    }
    Ok(())
}

fn print_study(label: &str, unit: &str, study: &RefinementStudy) {
    out!(
        "{:>11}  {:>12}  {:>12}  {:>11}  {:>12}  {:>7}  {:>6}  {:>9}",
        label,
        "linf vs exact",
        "l2 vs exact",
        "rel_linf",
        "next-finer",
        "order",
        "stable",
        "negatives"
    );
    for (k, c) in study.control_values.iter().enumerate() {
        let r = &study.reports[k];
        let next = study
            .successive
            .get(k)
            .map(|s| format!("{:.4}%", 100.0 * s.rel_linf))
            .unwrap_or_else(|| "-".into());
        let order = study
            .observed_orders
            .get(k)
            .map(|o| o.to_string())
            .unwrap_or_else(|| "-".into());
        out!(
            "{:>7} {:<3}  {:>12.5e}  {:>12.5e}  {:>10.4}%  {:>12}  {:>7}  {:>6}  {:>9}",
            c,
            unit,
            r.linf,
            r.l2,
            100.0 * r.rel_linf,
            next,
            order,
            study.diagnostics[k].stable,
            study.negative_counts[k]
        );
    }
    if !study.self_orders.is_empty() {
        let s: Vec<String> = study.self_orders.iter().map(|o| o.to_string()).collect();
        out!("self-convergence orders: {}", s.join(", "));
    }
    match study.independent_at {
        Some(v) => out!("independent at {v} {unit}"),
        None => out!("independent at: none within tolerance"),
    }
}

fn study_svg(path: &Path, title: String, cfg: &SimulationConfig, study: &RefinementStudy, unit: &str) -> Result<()> {
    let mut series: Vec<Series> = study
        .control_values
        .iter()
        .zip(&study.profiles)
        .map(|(c, p)| Series::new(format!("FD {c} {unit}"), p.clone()))
        .collect();
    let finest = study.profiles.last().expect("study has at least one level");
    let dz = finest.z.get(1).copied().unwrap_or(1.0);
    let exact = ogata_column(finest.z.len(), dz, cfg.t_end, &cfg.params, cfg.retardation()?)?;
    series.push(Series::new(
        "exact",
        Profile {
            z: finest.z.clone(),
            c: exact,
        },
    ));
    let svg = render_profile_svg(
        &series,
        &ChartOptions {
            title,
            c_max: Some(cfg.params.c0 * 1.1),
        },
    )?;
    write_file(path, &svg)?;
    out!("wrote {}", path.display());
    Ok(())
}

fn cmd_study_dt(args: StudyDtArgs) -> Result<()> {
    let loaded = load(&args.source, true)?;
    print_assumptions(loaded.preset.as_deref());
    let cfg = loaded.config;
    let dts = quantity_list("--dts", &args.dts, Dimension::Time, "day")?;
    let study = verify::timestep_study(&cfg, &dts, args.tol)?;
    out!(
        "time-step study: grid {}x{}, t = {} day, scheme {}, tol {}% of C0",
        cfg.grid.nx,
        cfg.grid.nz,
        cfg.t_end,
        cfg.scheme,
        100.0 * args.tol
    );
    print_study("dt", "day", &study);
    if let Some(path) = args.svg {
        let title = format!("{}: time-step study at t = {} day", cfg.params.species.name, cfg.t_end);
        study_svg(&path, title, &cfg, &study, "day")?;
    }
    Ok(())
}

fn cmd_study_mesh(args: StudyMeshArgs) -> Result<()> {
    let loaded = load(&args.source, true)?;
    print_assumptions(loaded.preset.as_deref());
    let cfg = loaded.config;
    let hs = quantity_list("--hs", &args.hs, Dimension::Length, "cm")?;
    let options = MeshStudyOptions {
        timestep: if args.diffusive_dt {
            MeshTimestep::Diffusive
        } else {
            MeshTimestep::Fixed
        },
        tol: args.tol,
    };
    let study = verify::mesh_study(&cfg, &hs, options)?;
    out!(
        "mesh study: extent {} x {} cm, dt = {} day ({}), scheme {}",
        cfg.grid.width(),
        cfg.grid.depth(),
        cfg.dt,
        if args.diffusive_dt { "scaled with h²" } else { "fixed" },
        cfg.scheme
    );
    print_study("h", "cm", &study);
    if let Some(path) = args.svg {
        let title = format!("{}: mesh study at t = {} day", cfg.params.species.name, cfg.t_end);
        study_svg(&path, title, &cfg, &study, "cm")?;
    }
    Ok(())
}

fn cmd_study_d(args: StudyDArgs) -> Result<()> {
    let loaded = load(&args.source, true)?;
    print_assumptions(loaded.preset.as_deref());
    let cfg = loaded.config;
    // m²/a is the unit the values are quoted in
    let ds: Vec<f64> = args
        .ds
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            let cm2_day = quantity("--ds", s, Dimension::Diffusivity, "m2/a")?;
            Ok(cm2_day * 365.0 / 1.0e4)
        })
        .collect::<Result<_>>()?;
    let study = verify::sensitivity_study(&cfg, &ds)?;
    out!(
        "diffusion sensitivity: grid {}x{}, t = {} day, dt = {} day, scheme {}",
        cfg.grid.nx,
        cfg.grid.nz,
        cfg.t_end,
        cfg.dt,
        cfg.scheme
    );
    for e in &study.entries {
        let values: Vec<String> = e.profile.c.iter().map(|v| format!("{v:.3}")).collect();
        out!(
            "D = {} m2/a ({:.6} cm2/day)  monotone={}  {}",
            e.d_m2_per_annum,
            e.d_cm2_per_day,
            e.monotone,
            values.join(" ")
        );
    }
    out!(
        "max deviation {:.4} mg/L ({:.3}% of C0), trend preserved: {}",
        study.max_deviation,
        100.0 * study.rel_max_deviation,
        study.trend_preserved()
    );
    if let Some(path) = args.svg {
        let series: Vec<Series> = study
            .entries
            .iter()
            .map(|e| Series::new(format!("D = {} m2/a", e.d_m2_per_annum), e.profile.clone()))
            .collect();
        let title = format!("{}: diffusion coefficient sensitivity", cfg.params.species.name);
        write_file(
            &path,
            &render_profile_svg(&series, &ChartOptions { title, c_max: None })?,
        )?;
        out!("wrote {}", path.display());
    }
    Ok(())
}

fn cmd_scenario(args: ScenarioArgs) -> Result<()> {
    match args.name {
        None => {
            for name in SCENARIOS {
                out!("{name}");
            }
        }
        Some(name) => {
            let cfg = load_scenario(&name)?;
            if let Some(note) = scenario::assumption_note(&name) {
                out!("# {note}");
            }
            out_raw!("{}", render_config(&cfg));
        }
    }
    Ok(())
}

fn cmd_check(args: SourceArgs) -> Result<()> {
    let loaded = load(&args, false)?;
    out!("{}", stability_diagnostics(&loaded.config));
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .format_timestamp(None)
        .init();
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Run(a) => cmd_run(a),
        Command::Compare(a) => cmd_compare(a),
        Command::StudyDt(a) => cmd_study_dt(a),
        Command::StudyMesh(a) => cmd_study_mesh(a),
        Command::StudyD(a) => cmd_study_d(a),
        Command::Scenario(a) => cmd_scenario(a),
        Command::Check(a) => cmd_check(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
