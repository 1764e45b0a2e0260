//! Acceptance suite. Each criterion prints one PASS/FAIL line; the process
//! exits nonzero if any criterion fails.

use std::fs;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use leachate::engine::{
    apply_boundaries, discrete_mass, run, step, BottomCondition, BoundaryConditionSet, ConcentrationField,
    SideCondition,
};
use leachate::scenario::load_scenario;
use leachate::special::erfc;
use leachate::verify::{
    column_config, compare_with_oracle, mesh_study, sensitivity_study, timestep_study, MeshStudyOptions, MeshTimestep,
    ObservedOrder,
};
use leachate::{GridSpec, Retardation, Scheme, SimulationConfig, Species, StabilityPolicy, TransportParams};

const C0: f64 = 675.0;

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn data(name: &str) -> String {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name);
    fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

fn preset(name: &str, scheme: Scheme) -> SimulationConfig {
    let mut cfg = load_scenario(name).expect("preset");
    cfg.scheme = scheme;
    cfg.stability_policy = StabilityPolicy::Silent;
    cfg
}

fn slopes(orders: &[ObservedOrder]) -> Vec<f64> {
    orders.iter().map(|o| o.slope().unwrap_or(f64::NAN)).collect()
}

/// Deep-column oracle agreement for the chloride preset.
fn criterion_1() -> Outcome {
    let mut base = preset("landfill-cl", Scheme::Upwind);
    base.dt = 0.005;
    let cfg = column_config(&base, 50.0, 0.25).expect("column config");
    let start = Instant::now();
    let reports = compare_with_oracle(&cfg, 1).expect("comparison");
    let elapsed = start.elapsed();
    let (t, last) = reports.last().expect("t_end snapshot");
    let pass = *t == 100.0 && last.rel_linf <= 0.03 && elapsed <= Duration::from_secs(30);
    outcome(
        pass,
        format!(
            "rel_linf at t = {t} day is {:.4}% (limit 3%), runtime {:.2} s (limit 30 s)",
            100.0 * last.rel_linf,
            elapsed.as_secs_f64()
        ),
    )
}

fn surface_exact(cfg: &SimulationConfig) -> (usize, bool) {
    let result = run(cfg).expect("run");
    let ok = result
        .snapshots
        .iter()
        .all(|f| f.surface_row().iter().all(|v| v.to_bits() == C0.to_bits()));
    (result.snapshots.len(), ok)
}

/// Surface row equals C0 bitwise in every snapshot of every run.
fn criterion_2() -> Outcome {
    let mut runs = 0;
    let mut snapshots = 0;
    let mut failures = Vec::new();
    for name in ["landfill-cl", "landfill-k"] {
        for scheme in [Scheme::PaperForward, Scheme::Upwind] {
            for sides in [SideCondition::NeumannZeroFlux, SideCondition::Reflect] {
                for bottom in [BottomCondition::ZeroGradient, BottomCondition::Frozen] {
                    for dt in [0.01, 0.3, 1.0, 7.0] {
                        let mut cfg = preset(name, scheme);
                        cfg.bc = BoundaryConditionSet::new(sides, bottom);
                        cfg.dt = dt;
                        cfg.snapshot_times = vec![0.0, 1.0, 33.3, 50.0, 100.0];
                        let (n, ok) = surface_exact(&cfg);
                        runs += 1;
                        snapshots += n;
                        if !ok {
                            failures.push(format!("{name} {scheme} {sides} {bottom} dt={dt}"));
                        }
                    }
                }
            }
        }
    }
    // the deep column used for oracle comparison
    let mut base = preset("landfill-cl", Scheme::Upwind);
    base.dt = 0.005;
    let (n, ok) = surface_exact(&column_config(&base, 50.0, 0.25).expect("column"));
    runs += 1;
    snapshots += n;
    if !ok {
        failures.push("deep column".into());
    }
    // single steps from an arbitrary field
    let cfg = preset("landfill-cl", Scheme::PaperForward);
    let values: Vec<f64> = (0..cfg.grid.len())
        .map(|k| (k as f64 * 0.37).sin().abs() * 900.0)
        .collect();
    let mut field = ConcentrationField::from_values(cfg.grid, 0.0, values).expect("field");
    for _ in 0..50 {
        field = step(&field, &cfg).expect("step");
        snapshots += 1;
        if !field.surface_row().iter().all(|v| v.to_bits() == C0.to_bits()) {
            failures.push(format!("step at t = {}", field.t));
            break;
        }
    }
    outcome(
        failures.is_empty(),
        if failures.is_empty() {
            format!("{snapshots} snapshots across {runs} runs plus 50 single steps hold 675 bitwise")
        } else {
            format!("surface differs from C0 in: {}", failures.join("; "))
        },
    )
}

/// Time-step independence on the preset grid.
fn criterion_3() -> Outcome {
    let mut details = Vec::new();
    let mut pass = true;
    for scheme in [Scheme::PaperForward, Scheme::Upwind] {
        let cfg = preset("landfill-cl", scheme);
        let start = Instant::now();
        let study = timestep_study(&cfg, &[100.0, 1.0, 0.1, 0.01], 0.02).expect("study");
        let elapsed = start.elapsed();
        let coarse = study.successive[0].rel_linf;
        let fine = study.successive[2].rel_linf;
        pass &= fine < 0.02 && coarse > 0.02 && elapsed <= Duration::from_secs(60);
        details.push(format!(
            "{scheme}: 0.1 vs 0.01 day {:.4}% (< 2%), 100 vs 1 day {:.1}% (> 2%), {:.2} s",
            100.0 * fine,
            100.0 * coarse,
            elapsed.as_secs_f64()
        ));
    }
    outcome(pass, details.join("; "))
}

/// Diffusion-coefficient sensitivity keeps the profile trend.
fn criterion_4() -> Outcome {
    let mut details = Vec::new();
    let mut pass = true;
    for scheme in [Scheme::PaperForward, Scheme::Upwind] {
        let study = sensitivity_study(&preset("landfill-cl", scheme), &[0.018, 0.02]).expect("study");
        let monotone = study.entries.iter().all(|e| e.monotone);
        pass &= monotone && study.rel_max_deviation < 0.10;
        details.push(format!(
            "{scheme}: monotone={monotone}, max deviation {:.3} mg/L = {:.3}% of C0 (< 10%)",
            study.max_deviation,
            100.0 * study.rel_max_deviation
        ));
    }
    outcome(pass, details.join("; "))
}

/// Mass conservation in a sealed box without advection.
fn criterion_5() -> Outcome {
    let grid = GridSpec::new(9, 11, 1.0, 1.0).expect("grid");
    let d = 0.547_945_205_479_452;
    let mut cfg = preset("landfill-cl", Scheme::Upwind);
    cfg.grid = grid;
    cfg.params.d = d;
    cfg.params.v = 0.0;
    cfg.bc = BoundaryConditionSet::sealed();
    // r_x + r_z = 2 D dt / h² = 0.4
    cfg.dt = 0.2 / d;
    let values: Vec<f64> = (0..grid.len())
        .map(|k| {
            let (i, j) = ((k % grid.nx) as f64, (k / grid.nx) as f64);
            300.0 + 250.0 * (0.9 * i).sin() * (0.6 * j).cos() + 40.0 * ((k * 7919) % 13) as f64
        })
        .collect();
    let initial = ConcentrationField::from_values(grid, 0.0, values).expect("field");
    let mut field = apply_boundaries(&initial, &cfg.bc, &cfg.params);
    let m0 = discrete_mass(&field, &cfg.bc);
    let rsum = leachate::engine::stability_diagnostics(&cfg);
    for _ in 0..10_000 {
        field = step(&field, &cfg).expect("step");
    }
    let drift = ((discrete_mass(&field, &cfg.bc) - m0) / m0).abs();
    outcome(
        drift <= 1e-10 && (rsum.r_x + rsum.r_z - 0.4).abs() < 1e-12,
        format!(
            "r_x + r_z = {:.3}, relative mass drift after 10^4 steps {drift:.2e} (limit 1e-10)",
            rsum.r_x + rsum.r_z
        ),
    )
}

/// Linearity in C0 for both stencils and both side-boundary families.
fn criterion_6() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut cases = 0;
    for name in ["landfill-cl", "landfill-k"] {
        for scheme in [Scheme::PaperForward, Scheme::Upwind] {
            for sides in [SideCondition::NeumannZeroFlux, SideCondition::Reflect] {
                for bottom in [BottomCondition::ZeroGradient, BottomCondition::Frozen] {
                    let mut cfg = preset(name, scheme);
                    cfg.bc = BoundaryConditionSet::new(sides, bottom);
                    let single = run(&cfg).expect("run");
                    cfg.params.c0 *= 2.0;
                    let double = run(&cfg).expect("run");
                    for (a, b) in single.snapshots.iter().zip(&double.snapshots) {
                        for (x, y) in a.values().iter().zip(b.values()) {
                            let scale = (2.0 * x).abs();
                            let err = (y - 2.0 * x).abs();
                            worst = worst.max(if scale > 0.0 { err / scale } else { err });
                        }
                    }
                    cases += 1;
                }
            }
        }
    }
    outcome(
        worst <= 1e-12,
        format!("{cases} configurations, worst relative deviation {worst:.2e} (limit 1e-12)"),
    )
}

/// One forward-stencil step against the scripted reference.
fn criterion_7() -> Outcome {
    let text = data("stencil_step.csv");
    let mut before = vec![0.0; 25];
    let mut after = vec![0.0; 25];
    for line in text.lines().filter(|l| !l.starts_with('#')).skip(1) {
        let cols: Vec<&str> = line.split(',').collect();
        let i: usize = cols[0].parse().expect("i");
        let j: usize = cols[1].parse().expect("j");
        before[j * 5 + i] = cols[2].parse().expect("before");
        after[j * 5 + i] = cols[3].parse().expect("after");
    }
    let grid = GridSpec::new(5, 5, 1.0, 1.0).expect("grid");
    let cfg = SimulationConfig {
        grid,
        params: TransportParams {
            d: 0.547_945_205_479_452,
            v: 0.35,
            theta: 0.3,
            c0: 1.0,
            background: 0.0,
            species: Species {
                name: "test".into(),
                charge_label: String::new(),
                retardation: Retardation::Sorption { rho: 1.6, kd: 0.45 },
            },
        },
        bc: BoundaryConditionSet::default(),
        dt: 0.5,
        t_end: 0.5,
        snapshot_times: vec![0.5],
        scheme: Scheme::PaperForward,
        stability_policy: StabilityPolicy::Error,
    };
    let field = ConcentrationField::from_values(grid, 0.0, before).expect("field");
    let stepped = step(&field, &cfg).expect("step");
    let worst = stepped
        .values()
        .iter()
        .zip(&after)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    outcome(
        worst <= 1e-14,
        format!("max abs difference over 25 nodes {worst:.2e} (limit 1e-14)"),
    )
}

/// erfc against the 50-digit reference and the reflection identity.
fn criterion_8() -> Outcome {
    let text = data("erfc_mpmath.csv");
    let mut worst: f64 = 0.0;
    let mut points = 0;
    for line in text.lines().skip(1) {
        let (x, want) = line.split_once(',').expect("two columns");
        let x: f64 = x.parse().expect("x");
        let want: f64 = want.parse().expect("erfc");
        worst = worst.max((erfc(x) - want).abs());
        points += 1;
    }
    let reflection = (0..=20_000)
        .map(|k| -30.0 + 60.0 * k as f64 / 20_000.0)
        .map(|x| (erfc(-x) + erfc(x) - 2.0).abs())
        .fold(0.0, f64::max);
    outcome(
        points == 1000 && worst <= 1e-12 && reflection <= 1e-13,
        format!(
            "{points} points, max abs error {worst:.2e} (limit 1e-12); reflection max {reflection:.2e} (limit 1e-13)"
        ),
    )
}

/// Observed orders for pure diffusion on a deep column.
fn criterion_9() -> Outcome {
    let mut base = preset("landfill-cl", Scheme::Upwind);
    base.params.v = 0.0;
    base.snapshot_times = vec![100.0];
    let base = column_config(&base, 60.0, 0.5).expect("column");
    let mesh = mesh_study(
        &base,
        &[2.0, 1.0, 0.5],
        MeshStudyOptions {
            timestep: MeshTimestep::Diffusive,
            tol: 0.02,
        },
    )
    .expect("mesh study");
    let spatial = slopes(&mesh.observed_orders);
    let time = timestep_study(&base, &[0.1, 0.05, 0.025, 0.0125], 0.02).expect("time study");
    let temporal = slopes(&time.self_orders);
    let pass = spatial.len() == 2
        && spatial.iter().all(|p| (p - 2.0).abs() <= 0.4)
        && temporal.len() == 2
        && temporal.iter().all(|p| (p - 1.0).abs() <= 0.3);
    outcome(
        pass,
        format!(
            "spatial orders {} (2.0 ± 0.4), temporal orders at h = 0.5 cm {} (1.0 ± 0.3)",
            fmt_list(&spatial),
            fmt_list(&temporal)
        ),
    )
}

fn fmt_list(v: &[f64]) -> String {
    let s: Vec<String> = v.iter().map(|x| format!("{x:.3}")).collect();
    format!("[{}]", s.join(", "))
}

/// Two CLI runs of the same config write identical bytes.
fn criterion_10() -> Outcome {
    let dir = tempfile::tempdir().expect("tempdir");
    let config = dir.path().join("run.ini");
    fs::write(
        &config,
        "preset = landfill-k\n\n[boundary]\nsides = reflect\n\n[time]\ndt = 0.05 day\nscheme = paper_forward\n",
    )
    .expect("write config");
    let exe = env!("CARGO_BIN_EXE_leachate");
    let mut outputs = Vec::new();
    for tag in ["a", "b"] {
        let csv = dir.path().join(format!("{tag}.csv"));
        let svg = dir.path().join(format!("{tag}.svg"));
        let out = Command::new(exe)
            .arg("run")
            .arg("--config")
            .arg(&config)
            .arg("--out")
            .arg(&csv)
            .arg("--svg")
            .arg(&svg)
            .output()
            .expect("spawn CLI");
        if !out.status.success() {
            return outcome(false, format!("CLI failed: {}", String::from_utf8_lossy(&out.stderr)));
        }
        let stdout = String::from_utf8_lossy(&out.stdout).replace(&*csv.to_string_lossy(), "OUT.csv");
        let stdout = stdout.replace(&*svg.to_string_lossy(), "OUT.svg");
        outputs.push((fs::read(&csv).expect("csv"), fs::read(&svg).expect("svg"), stdout));
    }
    let (a, b) = (&outputs[0], &outputs[1]);
    let pass = a.0 == b.0 && a.1 == b.1 && a.2 == b.2 && !a.0.is_empty() && !a.1.is_empty();
    outcome(
        pass,
        format!("CSV {} bytes, SVG {} bytes, identical = {pass}", a.0.len(), a.1.len()),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("oracle agreement on a deep column", criterion_1),
        ("surface boundary holds C0 exactly", criterion_2),
        ("time-step independence", criterion_3),
        ("diffusion sensitivity", criterion_4),
        ("mass conservation", criterion_5),
        ("linearity in C0", criterion_6),
        ("stencil fidelity", criterion_7),
        ("erfc accuracy", criterion_8),
        ("observed convergence orders", criterion_9),
        ("determinism", criterion_10),
    ];
    let mut failed = 0;
    for (n, (name, check)) in criteria.iter().enumerate() {
        let result = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            outcome(false, format!("panicked: {msg}"))
        });
        let verdict = if result.pass { "PASS" } else { "FAIL" };
        println!("criterion {:>2} {verdict}  {name}: {}", n + 1, result.detail);
        if !result.pass {
            failed += 1;
        }
    }
    println!(
        "acceptance: {} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
