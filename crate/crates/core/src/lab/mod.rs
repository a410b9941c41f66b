//! Paired-run deviation, accuracy, sweeps, scaling fits and the structural
//! identity checks.

mod fit;
mod invariants;
mod sweep;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::oracles::{inexact_init, NoiseSchedule, OracleKind, OracleSpec, RandomSchedule};
use crate::rng::RngState;
use crate::scenarios::Instance;
use crate::solvers::{run_foi, RunResult, SolverConfig};
use crate::vector::dist_sq;

pub use fit::{
    expected_slope, expected_slopes, fit_loglog, fit_scaling, Axis, ExpectedCell, ScalingFit,
};
pub use invariants::{verify_invariant, InvariantReport, INVARIANT_IDS};
pub use sweep::{sweep, Grid, SweepRow, SweepTable};

/// Default number of paired trials.
pub const DEFAULT_TRIALS: usize = 64;
/// Default number of random schedules searched for the sup deviation.
pub const DEFAULT_ADVERSARY_SEARCH: usize = 16;

/// How the two compared runs are produced.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Pairing {
    /// Two runs on independent random streams; reports the mean.
    #[default]
    Independent,
    /// Exact-gradient run against adversarial schedules; reports the max.
    ExactVsAdversary,
    /// Run from the reference start against runs from perturbed starts;
    /// reports the max.
    InitPair,
}

impl Pairing {
    pub const IDS: [&'static str; 3] = ["independent", "exact_vs_adversary", "init_pair"];

    pub fn id(self) -> &'static str {
        match self {
            Pairing::Independent => "independent",
            Pairing::ExactVsAdversary => "exact_vs_adversary",
            Pairing::InitPair => "init_pair",
        }
    }
}

/// Monte-Carlo statistics of `‖x_out − x'_out‖²`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DeviationEstimate {
    pub mean_sq_dev: f64,
    pub stderr: f64,
    pub max_sq_dev: f64,
    /// Number of compared pairs.
    pub trials: usize,
    pub pairing: Pairing,
    pub adversary_search_n: usize,
    /// Deviation under the scenario's own adversary (exact_vs_adversary).
    pub own_adversary_sq_dev: Option<f64>,
}

impl DeviationEstimate {
    /// The statistic the pairing estimates: the mean for independent runs,
    /// the largest observed value (a lower estimate of the sup) otherwise.
    pub fn value(&self) -> f64 {
        match self.pairing {
            Pairing::Independent => self.mean_sq_dev,
            Pairing::ExactVsAdversary | Pairing::InitPair => self.max_sq_dev,
        }
    }
}

/// Mean and max suboptimality over the scored runs.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AccuracyStats {
    pub mean: f64,
    pub max: f64,
}

/// Options shared by the measurement routines.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeasureOptions {
    pub trials: usize,
    pub pairing: Pairing,
    pub adversary_search_n: usize,
}

impl Default for MeasureOptions {
    fn default() -> Self {
        MeasureOptions {
            trials: DEFAULT_TRIALS,
            pairing: Pairing::Independent,
            adversary_search_n: DEFAULT_ADVERSARY_SEARCH,
        }
    }
}

/// Everything measured for one parameter point.
#[derive(Clone, Debug, PartialEq)]
pub struct Evaluation {
    pub deviation: DeviationEstimate,
    pub accuracy: Option<AccuracyStats>,
    pub oracle_calls: u64,
}

fn gradient_oracle(instance: &Instance) -> OracleSpec {
    if instance.oracle.kind == OracleKind::InexactInit {
        OracleSpec::exact()
    } else {
        instance.oracle.clone()
    }
}

struct Pair {
    dev: f64,
    scored: Vec<RunResult>,
    calls: u64,
}

/// Runs the pairs of a measurement; the parallel map keeps index order.
fn run_pairs(
    instance: &Instance,
    solver: &SolverConfig,
    opts: &MeasureOptions,
    rng: &RngState,
) -> Result<Vec<Pair>> {
    let problem = &instance.problem;
    let init = &instance.init;
    match opts.pairing {
        Pairing::Independent => {
            if opts.trials < 2 {
                return Err(Error::param(
                    "trials",
                    "independent pairing needs at least 2 trials",
                ));
            }
            let oracle = gradient_oracle(instance);
            (0..opts.trials)
                .into_par_iter()
                .map(|i| {
                    let trial = rng.derive("trial", i as u64);
                    let start = |k: u64| -> Result<crate::Vector> {
                        match instance.oracle.init {
                            Some((mode, delta))
                                if instance.oracle.kind == OracleKind::InexactInit =>
                            {
                                inexact_init(init, mode, delta, &trial.derive("init", k))
                            }
                            _ => Ok(init.clone()),
                        }
                    };
                    let a = run_foi(
                        problem,
                        &oracle,
                        &start(0)?,
                        solver,
                        &trial.derive("run", 0),
                    )?;
                    let b = run_foi(
                        problem,
                        &oracle,
                        &start(1)?,
                        solver,
                        &trial.derive("run", 1),
                    )?;
                    Ok(Pair {
                        dev: dist_sq(&a.output, &b.output),
                        calls: a.oracle_calls + b.oracle_calls,
                        scored: vec![a, b],
                    })
                })
                .collect()
        }
        Pairing::ExactVsAdversary => {
            let schedule = &instance.oracle.schedule;
            if schedule.is_stochastic() || instance.oracle.kind == OracleKind::InexactInit {
                return Err(Error::Incompatible(format!(
                    "exact_vs_adversary needs a non-stochastic gradient oracle, scenario `{}` has `{}`",
                    instance.scenario_id,
                    schedule.kind().id()
                )));
            }
            if opts.adversary_search_n < 1 {
                return Err(Error::param("adversary_search_n", "must be at least 1"));
            }
            let mut exact_spec = instance.oracle.clone();
            exact_spec.schedule = NoiseSchedule::None;
            let run_rng = rng.derive("run", 0);
            let exact = run_foi(problem, &exact_spec, init, solver, &run_rng)?;
            let delta = schedule.delta();
            // candidate 0 is the scenario's own schedule
            let noisy: Vec<Result<RunResult>> = (0..=opts.adversary_search_n)
                .into_par_iter()
                .map(|j| {
                    let mut spec = instance.oracle.clone();
                    if j > 0 {
                        spec.schedule = NoiseSchedule::CustomAdversary {
                            delta,
                            adversary: Arc::new(RandomSchedule {
                                stream: rng.derive("adversary", j as u64),
                            }),
                        };
                    }
                    run_foi(problem, &spec, init, solver, &run_rng)
                })
                .collect();
            let mut pairs = Vec::with_capacity(noisy.len());
            for r in noisy {
                let r = r?;
                pairs.push(Pair {
                    dev: dist_sq(&r.output, &exact.output),
                    calls: r.oracle_calls,
                    scored: vec![r],
                });
            }
            pairs[0].calls += exact.oracle_calls;
            Ok(pairs)
        }
        Pairing::InitPair => {
            let (mode, delta) = match instance.oracle.init {
                Some(m) if instance.oracle.kind == OracleKind::InexactInit => m,
                _ => {
                    return Err(Error::Incompatible(format!(
                        "init_pair needs an inexact-initialization scenario, `{}` is not one",
                        instance.scenario_id
                    )))
                }
            };
            let oracle = OracleSpec::exact();
            let run_rng = rng.derive("run", 0);
            let reference = run_foi(problem, &oracle, init, solver, &run_rng)?;
            let n = if mode.is_random() {
                opts.trials.max(1)
            } else {
                1
            };
            let runs: Vec<Result<RunResult>> = (0..n)
                .into_par_iter()
                .map(|i| {
                    let start = inexact_init(init, mode, delta, &rng.derive("init", i as u64))?;
                    run_foi(problem, &oracle, &start, solver, &run_rng)
                })
                .collect();
            let mut pairs = Vec::with_capacity(n);
            for r in runs {
                let r = r?;
                pairs.push(Pair {
                    dev: dist_sq(&r.output, &reference.output),
                    calls: r.oracle_calls,
                    scored: vec![r],
                });
            }
            pairs[0].calls += reference.oracle_calls;
            Ok(pairs)
        }
    }
}

/// Measures deviation and accuracy from the same set of runs.
pub fn evaluate(
    instance: &Instance,
    solver: &SolverConfig,
    opts: &MeasureOptions,
    rng: &RngState,
) -> Result<Evaluation> {
    let pairs = run_pairs(instance, solver, opts, rng)?;
    let n = pairs.len();
    let mut sum = 0.0;
    let mut max: f64 = 0.0;
    let mut calls = 0;
    for p in &pairs {
        sum += p.dev;
        max = max.max(p.dev);
        calls += p.calls;
    }
    let mean = sum / n as f64;
    let stderr = if n > 1 {
        let mut ss = 0.0;
        for p in &pairs {
            ss += (p.dev - mean) * (p.dev - mean);
        }
        (ss / (n as f64 - 1.0) / n as f64).sqrt()
    } else {
        0.0
    };
    let deviation = DeviationEstimate {
        mean_sq_dev: mean,
        stderr,
        max_sq_dev: max,
        trials: n,
        pairing: opts.pairing,
        adversary_search_n: if opts.pairing == Pairing::ExactVsAdversary {
            opts.adversary_search_n
        } else {
            0
        },
        own_adversary_sq_dev: (opts.pairing == Pairing::ExactVsAdversary).then(|| pairs[0].dev),
    };
    let subopts: Option<Vec<f64>> = pairs
        .iter()
        .flat_map(|p| p.scored.iter().map(|r| r.suboptimality))
        .collect();
    let accuracy = subopts.map(|s| summarize(&s));
    Ok(Evaluation {
        deviation,
        accuracy,
        oracle_calls: calls,
    })
}

fn summarize(s: &[f64]) -> AccuracyStats {
    let mut sum = 0.0;
    let mut max = f64::NEG_INFINITY;
    for v in s {
        sum += v;
        max = max.max(*v);
    }
    AccuracyStats {
        mean: sum / s.len() as f64,
        max,
    }
}

/// Deviation between paired runs under the chosen pairing.
pub fn measure_deviation(
    instance: &Instance,
    solver: &SolverConfig,
    opts: &MeasureOptions,
    rng: &RngState,
) -> Result<DeviationEstimate> {
    Ok(evaluate(instance, solver, opts, rng)?.deviation)
}

/// Mean and max of `f(x_out) − inf f` over `trials` independent runs.
pub fn measure_accuracy(
    instance: &Instance,
    solver: &SolverConfig,
    trials: usize,
    rng: &RngState,
) -> Result<AccuracyStats> {
    let cost = instance.cost();
    if cost.optimum.is_none() {
        return Err(Error::Unsupported(format!(
            "scenario `{}` has no known optimum value",
            instance.scenario_id
        )));
    }
    if trials == 0 {
        return Err(Error::param("trials", "must be at least 1"));
    }
    let oracle = gradient_oracle(instance);
    let subopts: Result<Vec<f64>> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let r = run_foi(
                &instance.problem,
                &oracle,
                &instance.init,
                solver,
                &rng.derive("trial", i as u64),
            )?;
            Ok(r.suboptimality.expect("optimum is known"))
        })
        .collect();
    Ok(summarize(&subopts?))
}
