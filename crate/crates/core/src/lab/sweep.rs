use serde::Serialize;
use std::collections::BTreeMap;

use super::fit::Axis;
use super::{evaluate, AccuracyStats, DeviationEstimate, MeasureOptions};
use crate::error::{Error, Result};
use crate::rng::RngState;
use crate::scenarios::{Instance, Model, Params, Setting};
use crate::solvers::SolverConfig;

/// Values per swept axis.
pub type Grid = BTreeMap<Axis, Vec<f64>>;

/// One grid point.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub index: usize,
    pub axes: BTreeMap<Axis, f64>,
    /// Scenario parameters after defaults were filled in.
    pub params: Params,
    pub deviation: DeviationEstimate,
    pub accuracy: Option<AccuracyStats>,
    pub accuracy_failed: bool,
    pub oracle_calls: u64,
    pub seed_path: String,
}

/// Result of a sweep.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepTable {
    pub scenario_id: String,
    pub setting: Option<Setting>,
    pub model: Option<Model>,
    pub rows: Vec<SweepRow>,
    /// Set when the oracle-call budget stopped the sweep early.
    pub truncated: bool,
    pub oracle_calls: u64,
}

/// Runs `build` on every point of the cartesian product of `grid` (axes in
/// `T, epsilon, delta, mu` order, values sorted) on top of `base`.
///
/// Row `i` draws from `rng.derive("row", i)`. A row fails the accuracy
/// check when its mean suboptimality exceeds `epsilon·(1 + tolerance)`.
/// Once `budget` oracle calls have been spent no further rows start.
pub fn sweep<F>(
    build: F,
    base: &Params,
    grid: &Grid,
    opts: &MeasureOptions,
    tolerance: f64,
    rng: &RngState,
    budget: Option<u64>,
) -> Result<SweepTable>
where
    F: Fn(&Params) -> Result<(Instance, SolverConfig)>,
{
    if grid.is_empty() || grid.values().any(|v| v.is_empty()) {
        return Err(Error::InvalidInput("sweep grid is empty".into()));
    }
    let mut axes: Vec<(Axis, Vec<f64>)> = Vec::new();
    for (axis, vals) in grid {
        if vals.iter().any(|v| !v.is_finite()) {
            return Err(Error::param(axis.param(), "grid values must be finite"));
        }
        let mut v = vals.clone();
        v.sort_by(f64::total_cmp);
        v.dedup();
        axes.push((*axis, v));
    }
    let total: usize = axes.iter().map(|(_, v)| v.len()).product();
    let mut rows = Vec::with_capacity(total);
    let mut spent = 0u64;
    let mut truncated = false;
    let mut meta: Option<(String, Option<Setting>, Option<Model>)> = None;
    for index in 0..total {
        if budget.is_some_and(|b| spent >= b) {
            truncated = true;
            break;
        }
        let mut point = BTreeMap::new();
        let mut rem = index;
        for (axis, vals) in axes.iter().rev() {
            point.insert(*axis, vals[rem % vals.len()]);
            rem /= vals.len();
        }
        let mut params = base.clone();
        for (a, v) in &point {
            params.insert(a.param().to_string(), *v);
        }
        let (instance, solver) = build(&params)?;
        let info = instance.info();
        meta.get_or_insert_with(|| (instance.scenario_id.clone(), info.setting, info.model));
        let row_rng = rng.derive("row", index as u64);
        let eval = evaluate(&instance, &solver, opts, &row_rng)?;
        spent += eval.oracle_calls;
        let accuracy_failed = match (eval.accuracy, instance.params.get("epsilon")) {
            (Some(acc), Some(eps)) => acc.mean > eps * (1.0 + tolerance),
            _ => false,
        };
        rows.push(SweepRow {
            index,
            axes: point,
            params: instance.params.clone(),
            deviation: eval.deviation,
            accuracy: eval.accuracy,
            accuracy_failed,
            oracle_calls: eval.oracle_calls,
            seed_path: row_rng.describe(),
        });
    }
    let (scenario_id, setting, model) = meta.unwrap_or_default();
    Ok(SweepTable {
        scenario_id,
        setting,
        model,
        rows,
        truncated,
        oracle_calls: spent,
    })
}
