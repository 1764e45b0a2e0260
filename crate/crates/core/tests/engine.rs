//! Time stepping, boundary handling and stability diagnostics.

use proptest::prelude::*;

use leachate::engine::{
    apply_boundaries, init_field, run, stability_diagnostics, step, BottomCondition, BoundaryConditionSet,
    ConcentrationField, SideCondition,
};
use leachate::scenario::load_scenario;
use leachate::{Error, GridSpec, Scheme, SimulationConfig, Species, StabilityPolicy, TransportParams};

fn chloride() -> SimulationConfig {
    let mut cfg = load_scenario("landfill-cl").unwrap();
    cfg.stability_policy = StabilityPolicy::Silent;
    cfg
}

/// 5x5 grid, pure diffusion with r_x = r_z = 0.1, zero source.
fn spike_config() -> SimulationConfig {
    let mut cfg = chloride();
    cfg.grid = GridSpec::new(5, 5, 1.0, 1.0).unwrap();
    cfg.params = TransportParams {
        d: 1.0,
        v: 0.0,
        theta: 0.3,
        c0: 0.0,
        background: 0.0,
        species: Species::conservative("tracer", ""),
    };
    cfg.dt = 0.1;
    cfg.t_end = 1.0;
    cfg.snapshot_times = vec![1.0];
    cfg
}

#[test]
fn single_spike_spreads_to_neighbours() {
    let cfg = spike_config();
    let mut values = vec![0.0; 25];
    values[2 * 5 + 2] = 1.0;
    let field = ConcentrationField::from_values(cfg.grid, 0.0, values).unwrap();
    for scheme in [Scheme::PaperForward, Scheme::Upwind] {
        let cfg = SimulationConfig { scheme, ..cfg.clone() };
        let next = step(&field, &cfg).unwrap();
        assert!((next.get(2, 2) - 0.6).abs() < 1e-15);
        for (i, j) in [(1, 2), (3, 2), (2, 1), (2, 3)] {
            assert!((next.get(i, j) - 0.1).abs() < 1e-15, "({i},{j})");
        }
        assert_eq!(next.t, 0.1);
        // input untouched
        assert_eq!(field.get(2, 2), 1.0);
    }
}

#[test]
fn zero_and_uniform_fields_are_fixed_points() {
    let mut cfg = chloride();
    cfg.params.c0 = 0.0;
    let zero = run(&cfg).unwrap();
    assert!(zero.snapshots.iter().all(|f| f.values().iter().all(|&v| v == 0.0)));

    let mut cfg = chloride();
    cfg.params.background = 675.0;
    let uniform = run(&cfg).unwrap();
    assert!(uniform.snapshots.iter().all(|f| f.values().iter().all(|&v| v == 675.0)));
}

#[test]
fn runs_are_deterministic() {
    let cfg = chloride();
    assert_eq!(run(&cfg).unwrap(), run(&cfg).unwrap());
}

#[test]
fn snapshots_land_exactly_on_requested_times() {
    let mut cfg = chloride();
    cfg.dt = 0.3;
    cfg.snapshot_times = vec![0.0, 1.0, 33.3, 50.0];
    let result = run(&cfg).unwrap();
    let times: Vec<f64> = result.snapshots.iter().map(|f| f.t).collect();
    assert_eq!(times, vec![0.0, 1.0, 33.3, 50.0]);
    assert_eq!(result.snapshots[0], init_field(cfg.grid, &cfg.params));
    assert!(result.snapshot_at(33.3).is_some());
}

#[test]
fn empty_snapshot_list_reports_final_time() {
    let mut cfg = chloride();
    cfg.snapshot_times.clear();
    cfg.t_end = 2.0;
    let result = run(&cfg).unwrap();
    assert_eq!(result.snapshots.len(), 1);
    assert_eq!(result.final_field().t, 2.0);
    assert_eq!(result.steps, 200);
}

#[test]
fn zero_horizon_returns_initial_field() {
    let mut cfg = chloride();
    cfg.t_end = 0.0;
    cfg.snapshot_times = vec![0.0];
    let result = run(&cfg).unwrap();
    assert_eq!(result.steps, 0);
    assert_eq!(result.final_field(), &init_field(cfg.grid, &cfg.params));
}

#[test]
fn front_advances_monotonically() {
    let result = run(&chloride()).unwrap();
    let col: Vec<Vec<f64>> = result.snapshots.iter().map(|f| f.column(4)).collect();
    for w in col.windows(2) {
        assert!(w[0].iter().zip(&w[1]).all(|(a, b)| b >= a));
    }
    for c in &col {
        assert!(c.windows(2).all(|w| w[1] <= w[0] + 1e-12));
    }
}

#[test]
fn side_conditions_agree_for_a_uniform_source() {
    // the surface row is uniform, so the field stays uniform in x
    let mut a = chloride();
    a.bc.sides = SideCondition::NeumannZeroFlux;
    let mut b = chloride();
    b.bc.sides = SideCondition::Reflect;
    let (ra, rb) = (run(&a).unwrap(), run(&b).unwrap());
    for (fa, fb) in ra.snapshots.iter().zip(&rb.snapshots) {
        assert_eq!(fa.values(), fb.values());
        for j in 0..fa.grid.nz {
            assert!((0..fa.grid.nx).all(|i| fa.get(i, j) == fa.get(0, j)));
        }
    }
}

#[test]
fn frozen_bottom_holds_background() {
    let mut cfg = chloride();
    cfg.bc.bottom = BottomCondition::Frozen;
    let last = run(&cfg).unwrap();
    let f = last.final_field();
    assert!((0..f.grid.nx).all(|i| f.get(i, f.grid.nz - 1) == 0.0));
}

#[test]
fn reflect_mirrors_ghost_columns() {
    let cfg = chloride();
    let values: Vec<f64> = (0..cfg.grid.len()).map(|k| k as f64).collect();
    let field = ConcentrationField::from_values(cfg.grid, 0.0, values).unwrap();
    let bc = BoundaryConditionSet::new(SideCondition::Reflect, BottomCondition::ZeroGradient);
    let out = apply_boundaries(&field, &bc, &cfg.params);
    let n = cfg.grid.nx;
    for j in 1..cfg.grid.nz {
        assert_eq!(out.get(0, j), out.get(2, j));
        assert_eq!(out.get(n - 1, j), out.get(n - 3, j));
    }
    assert!(out.surface_row().iter().all(|&v| v == 675.0));
}

#[test]
fn stability_example_at_one_day() {
    let mut cfg = chloride();
    cfg.dt = 1.0;
    let s = stability_diagnostics(&cfg);
    assert!(!s.stable);
    assert!((s.r_x + s.r_z - 2.0 * 0.547_945_205_479_452).abs() < 1e-12);
    cfg.dt = 0.01;
    assert!(stability_diagnostics(&cfg).stable);
}

#[test]
fn error_policy_refuses_unstable_steps() {
    let mut cfg = chloride();
    cfg.dt = 1.0;
    cfg.stability_policy = StabilityPolicy::Error;
    let err = run(&cfg).unwrap_err();
    assert!(matches!(err, Error::Unstable(_)));
    assert_eq!(err.exit_code(), 3);
    let field = init_field(cfg.grid, &cfg.params);
    assert!(matches!(step(&field, &cfg), Err(Error::Unstable(_))));
}

#[test]
fn unstable_run_blows_up_with_location() {
    let mut cfg = chloride();
    cfg.dt = 5.0;
    cfg.t_end = 5000.0;
    cfg.snapshot_times = vec![5000.0];
    match run(&cfg) {
        Err(Error::BlowUp { step, i, j }) => {
            assert!(step > 1);
            assert!(i < cfg.grid.nx && j < cfg.grid.nz);
        }
        other => panic!("expected blow-up, got {other:?}"),
    }
}

#[test]
fn negative_values_are_counted_not_clamped() {
    let mut cfg = chloride();
    // r_z = 1.1: the sawtooth mode grows by |1 - 4 r_z| per step
    cfg.dt = 2.0;
    cfg.snapshot_times = vec![6.0, 10.0];
    cfg.t_end = 10.0;
    let result = run(&cfg).unwrap();
    let neg = result.negative;
    assert!(neg.count > 0);
    let first = neg.first.unwrap();
    assert!(first.value < 0.0);
    assert!(result.snapshots.iter().any(|f| f.min() < 0.0));
}

#[test]
fn step_rejects_mismatched_grid() {
    let cfg = chloride();
    let other = GridSpec::new(5, 5, 1.0, 1.0).unwrap();
    let field = ConcentrationField::from_values(other, 0.0, vec![0.0; 25]).unwrap();
    assert!(step(&field, &cfg).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// Upwind with a stable step keeps every node between background and C0.
    #[test]
    fn upwind_maximum_principle(
        d in 0.05f64..2.0, v in 0.0f64..0.5, frac in 0.05f64..0.95, r in 1.0f64..5.0,
        reflect in any::<bool>(), frozen in any::<bool>(),
    ) {
        let mut cfg = chloride();
        cfg.scheme = Scheme::Upwind;
        cfg.params.d = d;
        cfg.params.v = v;
        cfg.params.species.retardation = leachate::Retardation::Explicit(r);
        cfg.bc = BoundaryConditionSet::new(
            if reflect { SideCondition::Reflect } else { SideCondition::NeumannZeroFlux },
            if frozen { BottomCondition::Frozen } else { BottomCondition::ZeroGradient },
        );
        // upwind is monotone while 2 (r_x + r_z) + courant_x + courant_z <= 1
        let unit = 2.0 * (2.0 * d + v) / r;
        cfg.dt = frac / unit;
        cfg.t_end = 20.0;
        cfg.snapshot_times = vec![5.0, 20.0];
        let result = run(&cfg).unwrap();
        prop_assert_eq!(result.negative.count, 0);
        for f in &result.snapshots {
            prop_assert!(f.min() >= 0.0 && f.max() <= 675.0);
        }
    }

    #[test]
    fn surface_row_is_exact_after_any_step(seed in 0u64..1000, forward in any::<bool>()) {
        let mut cfg = chloride();
        cfg.scheme = if forward { Scheme::PaperForward } else { Scheme::Upwind };
        let values: Vec<f64> = (0..cfg.grid.len())
            .map(|k| ((seed as f64 + 1.0) * (k as f64 + 0.5)).sin().abs() * 1000.0)
            .collect();
        let field = ConcentrationField::from_values(cfg.grid, 0.0, values).unwrap();
        let next = step(&field, &cfg).unwrap();
        prop_assert!(next.surface_row().iter().all(|v| v.to_bits() == 675f64.to_bits()));
    }
}
