use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;
use std::sync::OnceLock;

use super::sweep::SweepTable;
use crate::error::{Error, Result};
use crate::scenarios::{Model, Setting};

/// A swept parameter.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Axis {
    T,
    #[serde(rename = "epsilon")]
    Epsilon,
    #[serde(rename = "delta")]
    Delta,
    #[serde(rename = "mu")]
    Mu,
}

impl Axis {
    pub const ALL: [Axis; 4] = [Axis::T, Axis::Epsilon, Axis::Delta, Axis::Mu];

    /// The scenario parameter the axis sets.
    pub fn param(self) -> &'static str {
        match self {
            Axis::T => "T",
            Axis::Epsilon => "epsilon",
            Axis::Delta => "delta",
            Axis::Mu => "mu",
        }
    }

    pub fn parse(s: &str) -> Result<Axis> {
        Axis::ALL
            .into_iter()
            .find(|a| a.param() == s)
            .ok_or_else(|| Error::unknown("axis", s, &["T", "epsilon", "delta", "mu"]))
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.param())
    }
}

/// Least-squares fit of `log dev` against `log axis`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScalingFit {
    pub axis: Axis,
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub n_points: usize,
    pub dropped_zero_rows: usize,
    pub excluded_accuracy_failed: usize,
    /// Slope of the matching bound, when it is a pure power law in the axis.
    pub expected_slope: Option<f64>,
}

/// One cell of the bound table.
#[derive(Clone, Debug, PartialEq, Deserialize, Serialize)]
pub struct ExpectedCell {
    pub bound: String,
    #[serde(rename = "T")]
    pub t: Option<f64>,
    pub epsilon: Option<f64>,
    pub delta: Option<f64>,
}

type SlopeTable = BTreeMap<Setting, BTreeMap<Model, ExpectedCell>>;

/// The bound table, keyed by setting then error model.
pub fn expected_slopes() -> &'static SlopeTable {
    static TABLE: OnceLock<SlopeTable> = OnceLock::new();
    TABLE.get_or_init(|| {
        serde_json::from_str(include_str!("../../data/expected_slopes.json"))
            .expect("embedded slope table parses")
    })
}

/// `None` when the bound is not a pure power law in `axis`.
pub fn expected_slope(setting: Setting, model: Model, axis: Axis) -> Option<f64> {
    let cell = expected_slopes().get(&setting)?.get(&model)?;
    match axis {
        Axis::T => cell.t,
        Axis::Epsilon => cell.epsilon,
        Axis::Delta => cell.delta,
        Axis::Mu => None,
    }
}

/// Ordinary least squares of `ln y` on `ln x`. Returns (slope, intercept, R²).
pub fn fit_loglog(xs: &[f64], ys: &[f64]) -> Result<(f64, f64, f64)> {
    if xs.len() != ys.len() {
        return Err(Error::DimensionMismatch {
            expected: xs.len(),
            got: ys.len(),
        });
    }
    if xs.iter().chain(ys).any(|v| !(*v > 0.0) || !v.is_finite()) {
        return Err(Error::InvalidInput(
            "log-log fit needs positive finite data".into(),
        ));
    }
    let lx: Vec<f64> = xs.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|v| v.ln()).collect();
    let (coef, r2) = least_squares(&[lx], &ly)?;
    Ok((coef[1], coef[0], r2))
}

/// Regresses `y` on an intercept and the given columns. Returns the
/// coefficients (intercept first) and R².
fn least_squares(columns: &[Vec<f64>], y: &[f64]) -> Result<(Vec<f64>, f64)> {
    let n = y.len();
    let p = columns.len() + 1;
    let row = |i: usize| std::iter::once(1.0).chain(columns.iter().map(move |c| c[i]));
    let mut a = vec![vec![0.0; p + 1]; p];
    for i in 0..n {
        let r: Vec<f64> = row(i).collect();
        for j in 0..p {
            for k in 0..p {
                a[j][k] += r[j] * r[k];
            }
            a[j][p] += r[j] * y[i];
        }
    }
    // Gauss-Jordan with partial pivoting
    for c in 0..p {
        let piv = (c..p)
            .max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs()))
            .expect("non-empty");
        if a[piv][c].abs() < 1e-12 * (1.0 + a[c][c].abs()) {
            return Err(Error::InsufficientData("regressors are collinear".into()));
        }
        a.swap(c, piv);
        for r in 0..p {
            if r != c {
                let f = a[r][c] / a[c][c];
                for k in c..=p {
                    a[r][k] -= f * a[c][k];
                }
            }
        }
    }
    let coef: Vec<f64> = (0..p).map(|j| a[j][p] / a[j][j]).collect();
    let mean = y.iter().sum::<f64>() / n as f64;
    let mut ss_res = 0.0;
    let mut ss_tot = 0.0;
    for i in 0..n {
        let pred: f64 = row(i).zip(&coef).map(|(r, c)| r * c).sum();
        ss_res += (y[i] - pred).powi(2);
        ss_tot += (y[i] - mean).powi(2);
    }
    let r2 = if ss_tot > 0.0 {
        (1.0 - ss_res / ss_tot).clamp(0.0, 1.0)
    } else {
        1.0
    };
    Ok((coef, r2))
}

/// Fits `log dev = c + Σ_a s_a log a` over every axis that varies in the
/// table and reports the coefficient of `axis`.
///
/// Rows whose accuracy check failed are excluded. Rows with zero deviation
/// have no logarithm; they are dropped and counted.
pub fn fit_scaling(table: &SweepTable, axis: Axis) -> Result<ScalingFit> {
    let mut excluded = 0;
    let mut dropped = 0;
    let mut kept = Vec::new();
    for row in &table.rows {
        if row.accuracy_failed {
            excluded += 1;
        } else if row.deviation.mean_sq_dev <= 0.0 {
            dropped += 1;
        } else {
            kept.push(row);
        }
    }
    let axes: Vec<Axis> = Axis::ALL
        .into_iter()
        .filter(|a| {
            let mut vals: Vec<f64> = kept.iter().filter_map(|r| r.axes.get(a).copied()).collect();
            vals.sort_by(f64::total_cmp);
            vals.dedup();
            vals.len() > 1
        })
        .collect();
    let distinct = {
        let mut vals: Vec<f64> = kept
            .iter()
            .filter_map(|r| r.axes.get(&axis).copied())
            .collect();
        vals.sort_by(f64::total_cmp);
        vals.dedup();
        vals.len()
    };
    if distinct < 3 {
        return Err(Error::InsufficientData(format!(
            "axis {axis} has {distinct} distinct usable values, need at least 3 \
             ({dropped} zero-deviation rows dropped, {excluded} rows failed accuracy)"
        )));
    }
    let columns: Vec<Vec<f64>> = axes
        .iter()
        .map(|a| kept.iter().map(|r| r.axes[a].ln()).collect())
        .collect();
    let y: Vec<f64> = kept.iter().map(|r| r.deviation.mean_sq_dev.ln()).collect();
    let (coef, r2) = least_squares(&columns, &y)?;
    let pos = axes.iter().position(|a| *a == axis).expect("axis varies");
    let expected = match (table.setting, table.model) {
        (Some(s), Some(m)) => expected_slope(s, m, axis),
        _ => None,
    };
    Ok(ScalingFit {
        axis,
        slope: coef[pos + 1],
        intercept: coef[0],
        r_squared: r2,
        n_points: kept.len(),
        dropped_zero_rows: dropped,
        excluded_accuracy_failed: excluded,
        expected_slope: expected,
    })
}
