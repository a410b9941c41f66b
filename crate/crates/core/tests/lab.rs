use std::collections::BTreeMap;

use reprolab::lab::{
    fit_loglog, fit_scaling, measure_accuracy, measure_deviation, sweep, verify_invariant, Axis,
    DeviationEstimate, Grid, MeasureOptions, Pairing, SweepRow, SweepTable, INVARIANT_IDS,
};
use reprolab::scenarios::{build_instance, params, Instance, Params};
use reprolab::solvers::SolverConfig;
use reprolab::{Error, Result, RngState};

fn row(index: usize, axes: &[(Axis, f64)], dev: f64) -> SweepRow {
    SweepRow {
        index,
        axes: axes.iter().copied().collect(),
        params: Params::new(),
        deviation: DeviationEstimate {
            mean_sq_dev: dev,
            stderr: 0.0,
            max_sq_dev: dev,
            trials: 2,
            pairing: Pairing::Independent,
            adversary_search_n: 0,
            own_adversary_sq_dev: None,
        },
        accuracy: None,
        accuracy_failed: false,
        oracle_calls: 0,
        seed_path: String::new(),
    }
}

fn table(rows: Vec<SweepRow>) -> SweepTable {
    SweepTable {
        scenario_id: "synthetic".into(),
        setting: None,
        model: None,
        rows,
        truncated: false,
        oracle_calls: 0,
    }
}

#[test]
fn fit_recovers_inverse_horizon() {
    let rows = [4.0, 8.0, 16.0, 32.0]
        .iter()
        .enumerate()
        .map(|(i, t)| row(i, &[(Axis::T, *t)], 4.0 / t))
        .collect();
    let fit = fit_scaling(&table(rows), Axis::T).unwrap();
    assert!((fit.slope + 1.0).abs() < 1e-12);
    assert!((fit.intercept - 4f64.ln()).abs() < 1e-12);
    assert!((fit.r_squared - 1.0).abs() < 1e-12);
}

#[test]
fn fit_recovers_delta_squared_jointly_with_horizon() {
    let mut rows = Vec::new();
    for t in [4.0, 8.0, 16.0] {
        for d in [0.25, 0.5, 1.0] {
            rows.push(row(
                rows.len(),
                &[(Axis::T, t), (Axis::Delta, d)],
                d * d / t,
            ));
        }
    }
    let t = table(rows);
    assert!((fit_scaling(&t, Axis::Delta).unwrap().slope - 2.0).abs() < 1e-12);
    assert!((fit_scaling(&t, Axis::T).unwrap().slope + 1.0).abs() < 1e-12);
}

#[test]
fn constant_deviation_has_zero_slope() {
    let rows = [1.0, 2.0, 3.0]
        .iter()
        .enumerate()
        .map(|(i, e)| row(i, &[(Axis::Epsilon, *e)], 0.7))
        .collect();
    assert!(
        fit_scaling(&table(rows), Axis::Epsilon)
            .unwrap()
            .slope
            .abs()
            < 1e-12
    );
}

#[test]
fn zero_and_failed_rows_are_left_out() {
    let mut rows: Vec<SweepRow> = [2.0, 4.0, 8.0, 16.0]
        .iter()
        .enumerate()
        .map(|(i, t)| row(i, &[(Axis::T, *t)], 1.0 / t))
        .collect();
    rows.push(row(4, &[(Axis::T, 32.0)], 0.0));
    let mut bad = row(5, &[(Axis::T, 64.0)], 100.0);
    bad.accuracy_failed = true;
    rows.push(bad);
    let fit = fit_scaling(&table(rows), Axis::T).unwrap();
    assert_eq!(
        (
            fit.n_points,
            fit.dropped_zero_rows,
            fit.excluded_accuracy_failed
        ),
        (4, 1, 1)
    );
    assert!((fit.slope + 1.0).abs() < 1e-12);
}

#[test]
fn two_points_are_not_enough() {
    let rows = [1.0, 2.0]
        .iter()
        .enumerate()
        .map(|(i, t)| row(i, &[(Axis::T, *t)], 1.0 / t))
        .collect();
    assert!(matches!(
        fit_scaling(&table(rows), Axis::T),
        Err(Error::InsufficientData(_))
    ));
}

#[test]
fn loglog_of_a_power_law() {
    let xs = [1.0, 10.0, 100.0];
    let ys: Vec<f64> = xs.iter().map(|x: &f64| 3.0 * x.powf(-0.5)).collect();
    let (s, c, r2) = fit_loglog(&xs, &ys).unwrap();
    assert!((s + 0.5).abs() < 1e-12 && (c - 3f64.ln()).abs() < 1e-12 && (r2 - 1.0).abs() < 1e-12);
}

fn smooth_sto(p: &Params) -> Result<(Instance, SolverConfig)> {
    let inst = build_instance("smooth_sto_lb", p)?;
    let solver = inst.solver.clone();
    Ok((inst, solver))
}

fn opts(trials: usize) -> MeasureOptions {
    MeasureOptions {
        trials,
        ..MeasureOptions::default()
    }
}

#[test]
fn sweep_deduplicates_grid_values() {
    let base = params([("epsilon", 0.1), ("delta", 1.0)]);
    let grid: Grid = BTreeMap::from([(Axis::T, vec![8.0, 4.0, 8.0])]);
    let t = sweep(
        smooth_sto,
        &base,
        &grid,
        &opts(4),
        0.05,
        &RngState::new(1),
        None,
    )
    .unwrap();
    assert_eq!(t.rows.len(), 2);
    assert_eq!(t.rows[0].axes[&Axis::T], 4.0);
    assert_eq!(
        t.rows[1].seed_path,
        RngState::new(1).derive("row", 1).describe()
    );
}

#[test]
fn single_point_sweep_matches_direct_measurement() {
    let base = params([("epsilon", 0.1), ("delta", 1.0)]);
    let grid: Grid = BTreeMap::from([(Axis::T, vec![16.0])]);
    let rng = RngState::new(9);
    let t = sweep(smooth_sto, &base, &grid, &opts(8), 0.05, &rng, None).unwrap();
    let inst = build_instance(
        "smooth_sto_lb",
        &params([("T", 16.0), ("epsilon", 0.1), ("delta", 1.0)]),
    )
    .unwrap();
    let direct = measure_deviation(&inst, &inst.solver, &opts(8), &rng.derive("row", 0)).unwrap();
    assert_eq!(t.rows[0].deviation, direct);
}

#[test]
fn sweep_stops_at_the_oracle_budget() {
    let base = params([("epsilon", 0.1), ("delta", 1.0)]);
    let grid: Grid = BTreeMap::from([(Axis::T, vec![4.0, 8.0, 16.0])]);
    let t = sweep(
        smooth_sto,
        &base,
        &grid,
        &opts(2),
        0.05,
        &RngState::new(1),
        Some(1),
    )
    .unwrap();
    assert!(t.truncated);
    assert_eq!(t.rows.len(), 1);
}

#[test]
fn zero_noise_gives_zero_deviation() {
    let inst = build_instance(
        "smooth_sto_lb",
        &params([("T", 8.0), ("epsilon", 0.1), ("delta", 0.0)]),
    )
    .unwrap();
    let est = measure_deviation(&inst, &inst.solver, &opts(4), &RngState::new(0)).unwrap();
    assert_eq!((est.mean_sq_dev, est.max_sq_dev), (0.0, 0.0));
}

#[test]
fn accuracy_needs_a_known_optimum() {
    let inst = build_instance(
        "nonsmooth_sc_sto_lb",
        &params([("T", 4.0), ("mu", 4.0), ("delta", 1.0)]),
    )
    .unwrap();
    assert!(matches!(
        measure_accuracy(&inst, &inst.solver, 2, &RngState::new(0)),
        Err(Error::Unsupported(_))
    ));
}

#[test]
fn one_step_to_the_minimizer_forgets_the_start() {
    // μ = L with η = 1/L lands on the minimizer after one step
    let p = params([("T", 3.0), ("delta", 0.5), ("mu", 1.0), ("L", 1.0)]);
    let inst = build_instance("quadratic", &p).unwrap();
    let o = MeasureOptions {
        trials: 8,
        pairing: Pairing::InitPair,
        ..MeasureOptions::default()
    };
    let est = measure_deviation(&inst, &inst.solver, &o, &RngState::new(2)).unwrap();
    assert!(est.max_sq_dev < 1e-28, "{est:?}");
}

#[test]
fn adversary_pairing_rejects_stochastic_oracles() {
    let inst = build_instance(
        "smooth_sto_lb",
        &params([("T", 4.0), ("epsilon", 0.1), ("delta", 1.0)]),
    )
    .unwrap();
    let o = MeasureOptions {
        pairing: Pairing::ExactVsAdversary,
        ..opts(2)
    };
    assert!(matches!(
        measure_deviation(&inst, &inst.solver, &o, &RngState::new(0)),
        Err(Error::Incompatible(_))
    ));
}

#[test]
fn adversary_pairing_reports_the_max() {
    let inst = build_instance(
        "smooth_det_lb",
        &params([("T", 8.0), ("epsilon", 0.1), ("delta", 0.5)]),
    )
    .unwrap();
    let o = MeasureOptions {
        pairing: Pairing::ExactVsAdversary,
        adversary_search_n: 4,
        ..opts(2)
    };
    let est = measure_deviation(&inst, &inst.solver, &o, &RngState::new(0)).unwrap();
    assert_eq!(est.value(), est.max_sq_dev);
    assert!(est.own_adversary_sq_dev.unwrap() <= est.max_sq_dev);
}

#[test]
fn invariants_hold_on_small_instances() {
    for id in INVARIANT_IDS {
        let r = verify_invariant(
            id,
            &params([("T", 16.0), ("matrices", 4.0)]),
            &RngState::new(7),
        )
        .unwrap();
        assert!(r.passed, "{r:?}");
    }
}

#[test]
fn unknown_invariant_is_rejected() {
    let err = verify_invariant("nope", &Params::new(), &RngState::new(0)).unwrap_err();
    assert!(matches!(err, Error::UnknownId { .. }), "{err}");
}
