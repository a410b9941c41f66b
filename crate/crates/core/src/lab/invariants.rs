use serde::Serialize;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::oracles::{CoordinateSweep, NoiseSchedule, OracleSpec};
use crate::rng::RngState;
use crate::scenarios::{build_instance, params, Instance, Params};
use crate::solvers::{run_general_foi, CoefficientMatrix, RunResult};

/// Identities checked by [`verify_invariant`].
pub const INVARIANT_IDS: [&str; 4] = [
    "rel_xy",
    "smooth_str_identity",
    "conserve",
    "pattern_support",
];

const TOLERANCE: f64 = 1e-9;

/// Outcome of one identity check.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InvariantReport {
    pub id: String,
    pub passed: bool,
    pub max_residual: f64,
    pub tolerance: f64,
    /// Number of coefficient matrices tried, the gradient descent one included.
    pub matrices: usize,
    /// Number of (matrix, t) points checked.
    pub checks: usize,
    /// Largest `|λ₀^{(T)}| / |Σ_{t≥1} λ_t^{(T)}|` among the matrices.
    pub max_lambda0_ratio: Option<f64>,
}

struct Setup {
    instance: Instance,
    oracle: OracleSpec,
    /// Coefficients are drawn from `[scale/(100 t), scale/t)`.
    scale: f64,
}

fn get(p: &Params, name: &str, default: f64) -> f64 {
    p.get(name).copied().unwrap_or(default)
}

fn setup(id: &str, p: &Params) -> Result<Setup> {
    let t = get(p, "T", 64.0);
    Ok(match id {
        "rel_xy" => {
            let eps = get(p, "epsilon", 0.1);
            let instance = build_instance(
                "smooth_det_lb",
                &params([("T", t), ("epsilon", eps), ("delta", get(p, "delta", 0.5))]),
            )?;
            Setup {
                oracle: instance.oracle.clone(),
                scale: 1.0 / (8.0 * eps),
                instance,
            }
        }
        "smooth_str_identity" => {
            let mu = get(p, "mu", 0.5);
            let delta = get(p, "delta", 0.5);
            let instance = build_instance(
                "smooth_sc_sto_lb",
                &params([("T", t), ("mu", mu), ("delta", delta)]),
            )?;
            let oracle = OracleSpec::nonstochastic(NoiseSchedule::CustomAdversary {
                delta,
                adversary: Arc::new(CoordinateSweep { offset: 0 }),
            });
            Setup {
                instance,
                oracle,
                scale: 1.0 / mu,
            }
        }
        "conserve" => {
            let mu = get(p, "mu", 0.5);
            let instance = build_instance(
                "nonsmooth_sc_sto_lb",
                &params([("T", t), ("mu", mu), ("delta", get(p, "delta", 0.5))]),
            )?;
            Setup {
                oracle: instance.oracle.clone(),
                scale: 1.0 / mu,
                instance,
            }
        }
        "pattern_support" => {
            let instance = build_instance(
                "nonsmooth_sto_lb",
                &params([
                    ("T", t),
                    ("epsilon", get(p, "epsilon", 0.1)),
                    ("delta", get(p, "delta", 0.5)),
                ]),
            )?;
            Setup {
                oracle: instance.oracle.clone(),
                scale: 1.0,
                instance,
            }
        }
        other => return Err(Error::unknown("invariant", other, &INVARIANT_IDS)),
    })
}

fn random_coefficients(horizon: usize, scale: f64, rng: &RngState) -> Result<CoefficientMatrix> {
    use rand::Rng;
    let mut g = rng.generator();
    let rows = (1..=horizon)
        .map(|t| {
            let hi = scale / t as f64;
            (0..t).map(|_| g.random_range(hi / 100.0..hi)).collect()
        })
        .collect();
    CoefficientMatrix::from_rows(rows)
}

/// Largest residual of identity `id` along one run.
fn residual(id: &str, run: &RunResult, inst: &Instance, delta: f64) -> (f64, usize) {
    let xs = run
        .trajectory
        .as_deref()
        .expect("general FOI keeps the trajectory");
    let gs = run
        .gradients
        .as_deref()
        .expect("general FOI keeps gradients");
    let horizon = gs.len();
    let mut worst: f64 = 0.0;
    let mut checks = 0;
    match id {
        "rel_xy" => {
            for x in xs {
                worst = worst.max((x[0] - delta * x[1]).abs());
                checks += 1;
            }
        }
        "smooth_str_identity" => {
            let y = inst.dim() - 1;
            for x in xs {
                worst = worst.max((delta * x[y] - x[..y].iter().sum::<f64>()).abs());
                checks += 1;
            }
            for g in gs {
                worst = worst.max((delta * g[y] - g[..y].iter().sum::<f64>()).abs());
                checks += 1;
            }
        }
        "conserve" => {
            let t = (inst.dim() - 1) / 3;
            let side = |v: &[f64]| v[3 * t] - v[t..3 * t].iter().sum::<f64>();
            for x in xs {
                worst = worst.max(side(x).abs());
                checks += 1;
            }
            for g in gs {
                worst = worst.max(side(g).abs());
                checks += 1;
            }
        }
        "pattern_support" => {
            let t = (inst.dim() - 1) / 3;
            // index and y/z side of the unit entry at each step
            let mut seen: Vec<(usize, usize)> = Vec::new();
            for (s, g) in gs.iter().enumerate().skip(1) {
                let yz = &g[t..3 * t];
                let mut units = Vec::new();
                for (k, v) in yz.iter().enumerate() {
                    worst = worst.max(v.abs().min((v - 1.0).abs()));
                    if (v - 1.0).abs() <= TOLERANCE {
                        units.push(k);
                    }
                }
                if units.len() != 1 {
                    worst = worst.max(1.0);
                } else {
                    let (side, i) = (units[0] / t, units[0] % t + 1);
                    if i > s {
                        worst = worst.max(1.0);
                    }
                    if i < s && !seen.contains(&(side, i)) {
                        worst = worst.max(1.0);
                    }
                    seen.push((side, i));
                }
                checks += 1;
            }
            debug_assert!(checks + 1 == horizon.max(1));
        }
        _ => unreachable!("ids are validated in setup"),
    }
    (worst, checks)
}

/// Checks a structural identity of the lower-bound constructions along
/// general first-order iterations with random nonnegative coefficients.
///
/// Parameters: `T` (default 64), `matrices` (default 20), `eta` (adds a
/// constant-step gradient descent run), plus the scenario parameters
/// `epsilon`, `mu`, `delta`.
pub fn verify_invariant(id: &str, p: &Params, rng: &RngState) -> Result<InvariantReport> {
    let s = setup(id, p)?;
    let matrices = get(p, "matrices", 20.0);
    if !(matrices >= 1.0) || matrices.fract() != 0.0 {
        return Err(Error::param("matrices", "must be a positive integer"));
    }
    let matrices = matrices as usize;
    let horizon = get(p, "T", 64.0) as usize;
    let delta = s.oracle.delta();
    let mut worst: f64 = 0.0;
    let mut checks = 0;
    let mut ratio: Option<f64> = None;
    let gd = p
        .get("eta")
        .map(|&eta| CoefficientMatrix::gradient_descent(horizon, eta));
    for m in 0..matrices + usize::from(gd.is_some()) {
        let stream = rng.derive("matrix", m as u64);
        let coeffs = match (&gd, m) {
            (Some(c), 0) => c.clone(),
            _ => random_coefficients(horizon, s.scale, &stream.derive("coefficients", 0))?,
        };
        let run = run_general_foi(
            &s.instance.problem,
            &s.oracle,
            &s.instance.init,
            &coeffs,
            &stream.derive("run", 0),
        )?;
        let (w, c) = residual(id, &run, &s.instance, delta);
        worst = worst.max(w);
        checks += c;
        if let Some(r) = run.lambda0_ratio {
            ratio = Some(ratio.map_or(r, |q| q.max(r)));
        }
    }
    Ok(InvariantReport {
        id: id.to_string(),
        passed: worst <= TOLERANCE,
        max_residual: worst,
        tolerance: TOLERANCE,
        matrices: matrices + usize::from(gd.is_some()),
        checks,
        max_lambda0_ratio: ratio,
    })
}
