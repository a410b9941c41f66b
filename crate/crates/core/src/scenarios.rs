//! The scenario catalog: each entry builds a cost, its matched oracle and
//! the solver configuration whose guarantee it exercises.

use std::collections::BTreeMap;

use rand::Rng;
use serde::Serialize;

use crate::costs::{
    CostFunction, FiniteSum, HingeRamp, L1Center, LinearRidge, MaxPairs, MaxPairsTail,
    NesterovChain, NonsmoothChain, NonsmoothRidge, Objective, Optimum, Quadratic, RegularityMeta,
    ShiftedSquare, ThetaFamily, ThetaVariant,
};
use crate::error::{Error, Result};
use crate::oracles::{InitMode, NoiseSchedule, OracleSpec, Problem};
use crate::rng::RngState;
use crate::solvers::{AveragingScheme, SolverConfig, StepSchedule};
use crate::vector::Vector;

/// Scenario parameters by name (`T`, `epsilon`, `delta`, `mu`, …).
pub type Params = BTreeMap<String, f64>;

/// Default cap on instance dimension.
pub const MAX_DIMENSION_BUDGET: f64 = 32768.0;

/// Smoothness/convexity class of a scenario.
#[derive(
    Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, serde::Deserialize,
)]
#[serde(rename_all = "snake_case")]
pub enum Setting {
    Smooth,
    SmoothSc,
    Nonsmooth,
    NonsmoothSc,
}

/// Error model of a scenario.
#[derive(
    Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, serde::Deserialize,
)]
#[serde(rename_all = "snake_case")]
pub enum Model {
    Stochastic,
    Nonstochastic,
    Init,
}

/// Catalog metadata of one scenario.
#[derive(Clone, Debug, Serialize)]
pub struct ScenarioInfo {
    pub scenario_id: &'static str,
    pub required_params: &'static [&'static str],
    pub optional_params: &'static [(&'static str, &'static str)],
    pub dim_formula: &'static str,
    pub citation: &'static str,
    pub setting: Option<Setting>,
    pub model: Option<Model>,
}

macro_rules! info {
    ($id:literal, [$($r:literal),*], [$(($o:literal, $d:literal)),*], $dim:literal, $cite:literal, $s:expr, $m:expr) => {
        ScenarioInfo {
            scenario_id: $id,
            required_params: &[$($r),*],
            optional_params: &[$(($o, $d)),*],
            dim_formula: $dim,
            citation: $cite,
            setting: $s,
            model: $m,
        }
    };
}

use Model::*;
use Setting::*;

const CATALOG: &[ScenarioInfo] = &[
    info!("smooth_sto_lb", ["T", "epsilon", "delta"], [], "T+1",
        "smooth convex lower bound, stochastic oracle: 4eps*F(y+1) with Rademacher noise on a fresh dummy coordinate per step",
        Some(Smooth), Some(Stochastic)),
    info!("smooth_det_lb", ["T", "epsilon", "delta"], [("D", "2")], "2",
        "smooth convex lower bound, non-stochastic oracle: 4eps*F(y+1) with noise delta*(df/dy)*e1",
        Some(Smooth), Some(Nonstochastic)),
    info!("smooth_init_lb", ["T", "delta"], [], "2",
        "smooth convex lower bound, inexact initialization: (y-1)^2 started at (delta, 0)",
        Some(Smooth), Some(Init)),
    info!("smooth_sc_sto_lb", ["T", "mu", "delta"], [], "T+1",
        "smooth strongly convex lower bound, stochastic oracle: y + mu/2 y^2 + mu/2 |x_dum|^2 with Rademacher dummy noise",
        Some(SmoothSc), Some(Stochastic)),
    info!("smooth_sc_det_lb", ["T", "mu", "delta"], [], "2",
        "smooth strongly convex lower bound, non-stochastic oracle: y + mu/2 y^2 + mu/2 x^2 with noise delta*e1",
        Some(SmoothSc), Some(Nonstochastic)),
    info!("nesterov_chain", ["T", "kappa", "mu", "delta"], [("truncation_dim", "4T")], "2*truncation_dim",
        "smooth strongly convex lower bound, inexact initialization: two truncated tridiagonal chains, reference start at the chain optimum",
        Some(SmoothSc), Some(Init)),
    info!("nonsmooth_sto_lb", ["T", "epsilon", "delta"], [], "3T+1",
        "nonsmooth convex lower bound, stochastic oracle: G(x,y,z) + 2eps*max(w+1,0) with Rademacher noise on x",
        Some(Nonsmooth), Some(Stochastic)),
    info!("nonsmooth_det_lb", ["T", "epsilon", "delta"], [("D", "2")], "3T+2",
        "nonsmooth convex lower bound, non-stochastic oracle: as nonsmooth_sto_lb plus a dummy u, noise split between x and u",
        Some(Nonsmooth), Some(Nonstochastic)),
    info!("nonsmooth_init_lb", ["T", "epsilon", "delta"], [], "2T+2",
        "nonsmooth convex lower bound, inexact initialization: max(0, x_i + y_i) + 2eps*max(w+1,0), spread start",
        Some(Nonsmooth), Some(Init)),
    info!("nonsmooth_sc_sto_lb", ["T", "mu", "delta"], [], "3T+4",
        "nonsmooth strongly convex lower bound, stochastic oracle: G(x+delta*e1,y,z) + mu/2|(x,y,z)|^2 + w + mu/2 w^2",
        Some(NonsmoothSc), Some(Stochastic)),
    info!("nonsmooth_sc_det_lb", ["T", "mu", "delta"], [], "3T+5",
        "nonsmooth strongly convex lower bound, non-stochastic oracle: nonsmooth_sc_sto_lb plus a dummy u with mu/2 u^2, split noise",
        Some(NonsmoothSc), Some(Nonstochastic)),
    info!("nonsmooth_sc_init_lb", ["T", "mu", "delta"], [], "2T+1",
        "nonsmooth strongly convex lower bound, inexact initialization: max(0, x_i + y_i) + w + mu/2|(x,y,w)|^2",
        Some(NonsmoothSc), Some(Init)),
    info!("theta_quadratic", ["T", "theta", "epsilon", "delta"], [], "1",
        "one-dimensional family 100eps(x-theta)^2 on [-1,1] with the Bernoulli spike stochastic oracle",
        Some(Smooth), Some(Stochastic)),
    info!("theta_sco", ["T", "theta", "epsilon", "delta"], [], "1",
        "one-dimensional family 200eps(x^2/2 - theta x) on [1,2] behind the stochastic global oracle",
        None, None),
    info!("finite_sum_l1", ["T", "epsilon", "delta"], [("m", "5"), ("dim", "4"), ("instance_seed", "0"), ("D", "sqrt(dim)/2")], "dim",
        "finite sum of m scaled l1 distances to random centers, uniform component sampling with fixed-direction noise",
        Some(Nonsmooth), Some(Nonstochastic)),
    info!("quadratic", ["T", "delta"], [("dim", "8"), ("mu", "0.1"), ("L", "1"), ("instance_seed", "0")], "dim",
        "random strongly convex quadratic with spectrum in [mu, L], inexact initialization on a sphere",
        Some(SmoothSc), Some(Init)),
];

/// Every scenario with its parameters, dimension formula and description.
pub fn catalog() -> &'static [ScenarioInfo] {
    CATALOG
}

pub fn scenario_info(id: &str) -> Result<&'static ScenarioInfo> {
    CATALOG.iter().find(|s| s.scenario_id == id).ok_or_else(|| {
        Error::unknown(
            "scenario",
            id,
            &CATALOG.iter().map(|s| s.scenario_id).collect::<Vec<_>>(),
        )
    })
}

/// A built scenario.
#[derive(Clone, Debug)]
pub struct Instance {
    pub scenario_id: String,
    pub problem: Problem,
    pub oracle: OracleSpec,
    /// The solver configuration the matching guarantee prescribes.
    pub solver: SolverConfig,
    /// The reference start `x₀` (the inexact start is derived from it).
    pub init: Vector,
    /// Parameters after defaults were filled in.
    pub params: Params,
}

impl Instance {
    pub fn cost(&self) -> CostFunction {
        self.problem.cost()
    }

    pub fn dim(&self) -> usize {
        self.problem.dim()
    }

    pub fn info(&self) -> &'static ScenarioInfo {
        scenario_info(&self.scenario_id).expect("instances are built from catalog ids")
    }
}

struct Reader<'a> {
    id: &'static str,
    params: &'a Params,
    resolved: Params,
}

impl Reader<'_> {
    fn req(&mut self, name: &str) -> Result<f64> {
        let v = *self
            .params
            .get(name)
            .ok_or_else(|| Error::MissingParameter {
                scenario: self.id.to_string(),
                name: name.to_string(),
            })?;
        if !v.is_finite() {
            return Err(Error::param(name, "must be finite"));
        }
        self.resolved.insert(name.to_string(), v);
        Ok(v)
    }

    fn opt(&mut self, name: &str, default: f64) -> Result<f64> {
        if self.params.contains_key(name) {
            self.req(name)
        } else {
            self.resolved.insert(name.to_string(), default);
            Ok(default)
        }
    }

    fn positive(&mut self, name: &str) -> Result<f64> {
        let v = self.req(name)?;
        if v > 0.0 {
            Ok(v)
        } else {
            Err(Error::param(name, format!("must be positive, got {v}")))
        }
    }

    fn nonneg(&mut self, name: &str) -> Result<f64> {
        let v = self.req(name)?;
        if v >= 0.0 {
            Ok(v)
        } else {
            Err(Error::param(name, format!("must be nonnegative, got {v}")))
        }
    }

    fn count_value(name: &str, v: f64) -> Result<usize> {
        if v >= 1.0 && v.fract() == 0.0 && v <= 1e12 {
            Ok(v as usize)
        } else {
            Err(Error::param(
                name,
                format!("must be a positive integer, got {v}"),
            ))
        }
    }

    fn count(&mut self, name: &str) -> Result<usize> {
        let v = self.req(name)?;
        Self::count_value(name, v)
    }

    fn opt_count(&mut self, name: &str, default: usize) -> Result<usize> {
        let v = self.opt(name, default as f64)?;
        Self::count_value(name, v)
    }
}

fn meta(l: Option<f64>, g: Option<f64>, mu: f64, d: Option<f64>) -> RegularityMeta {
    RegularityMeta {
        smoothness_l: l,
        lipschitz_g: g,
        strong_convexity_mu: mu,
        domain_radius_d: d,
    }
}

fn value_only(value: f64) -> Option<Optimum> {
    Some(Optimum { point: None, value })
}

fn at_point(point: Vec<f64>, value: f64) -> Option<Optimum> {
    Some(Optimum {
        point: Some(Vector::from_raw(point)),
        value,
    })
}

/// Lipschitz constant of `G`: `√(1 + Σ_j 4^{-(j-1)}) ≤ √(1 + 4/3)`.
fn g_lipschitz() -> f64 {
    (1.0f64 + 4.0 / 3.0).sqrt()
}

/// Builds a scenario from its parameters.
///
/// ```
/// use reprolab::scenarios::{build_instance, Params};
/// let params: Params = [("T", 8.0), ("epsilon", 0.05), ("delta", 1.0)]
///     .into_iter().map(|(k, v)| (k.to_string(), v)).collect();
/// let inst = build_instance("smooth_sto_lb", &params).unwrap();
/// assert_eq!(inst.dim(), 9);
/// assert!((inst.cost().eval(&inst.init).unwrap() - 0.2).abs() < 1e-15);
/// ```
pub fn build_instance(scenario: &str, params: &Params) -> Result<Instance> {
    let info = scenario_info(scenario)?;
    let mut r = Reader {
        id: info.scenario_id,
        params,
        resolved: Params::new(),
    };
    let known: Vec<&str> = info
        .required_params
        .iter()
        .copied()
        .chain(info.optional_params.iter().map(|(n, _)| *n))
        .chain(["max_dimension_budget"])
        .collect();
    if let Some(extra) = params.keys().find(|k| !known.contains(&k.as_str())) {
        return Err(Error::param(
            extra,
            format!(
                "not a parameter of `{}`; expected one of {}",
                info.scenario_id,
                known.join(", ")
            ),
        ));
    }
    let budget = r.opt("max_dimension_budget", MAX_DIMENSION_BUDGET)?;
    let t = r.count("T")?;
    let id = info.scenario_id;

    let (problem, oracle, solver, init) = match id {
        "smooth_sto_lb" | "smooth_det_lb" => {
            let eps = r.positive("epsilon")?;
            let delta = r.nonneg("delta")?;
            let l = 8.0 * eps;
            if id == "smooth_sto_lb" {
                check_budget(t + 1, budget)?;
                let cost = CostFunction::new(
                    HingeRamp {
                        dim: t + 1,
                        y: t,
                        scale: 4.0 * eps,
                    },
                    meta(Some(l), Some(l), 0.0, None),
                    value_only(0.0),
                    id,
                );
                let oracle = OracleSpec::stochastic(NoiseSchedule::RademacherCoordinate {
                    delta,
                    offset: 0,
                    end: t,
                });
                let solver = SolverConfig::new(
                    StepSchedule::Slowed {
                        epsilon: eps,
                        horizon: t,
                    },
                    AveragingScheme::Uniform,
                    t,
                );
                (Problem::Single(cost), oracle, solver, Vector::zeros(t + 1))
            } else {
                if l > 1.0 {
                    return Err(Error::param(
                        "epsilon",
                        "needs 8ε ≤ 1 so that the proportional noise stays within δ",
                    ));
                }
                let d = r.opt("D", 2.0)?;
                if !(d > 1.0) {
                    return Err(Error::param(
                        "D",
                        "the ball must contain the minimizer (0, -1)",
                    ));
                }
                let cost = CostFunction::new(
                    HingeRamp {
                        dim: 2,
                        y: 1,
                        scale: 4.0 * eps,
                    },
                    meta(Some(l), Some(l), 0.0, Some(d)),
                    value_only(0.0),
                    id,
                );
                let oracle = OracleSpec::nonstochastic(NoiseSchedule::GradientProportional {
                    delta,
                    source: 1,
                    target: 0,
                });
                let solver =
                    SolverConfig::new(StepSchedule::InverseL { l }, AveragingScheme::Uniform, t)
                        .with_radius(Some(d));
                (Problem::Single(cost), oracle, solver, Vector::zeros(2))
            }
        }
        "smooth_init_lb" => {
            let delta = r.nonneg("delta")?;
            let cost = CostFunction::new(
                ShiftedSquare,
                meta(Some(2.0), None, 0.0, None),
                value_only(0.0),
                id,
            );
            let oracle = OracleSpec::inexact_init(InitMode::FixedCoordinate, delta);
            let solver =
                SolverConfig::new(StepSchedule::InverseL { l: 2.0 }, AveragingScheme::Last, t);
            (Problem::Single(cost), oracle, solver, Vector::zeros(2))
        }
        "smooth_sc_sto_lb" | "smooth_sc_det_lb" => {
            let mu = r.positive("mu")?;
            let delta = r.nonneg("delta")?;
            let det = id == "smooth_sc_det_lb";
            let dim = if det { 2 } else { t + 1 };
            check_budget(dim, budget)?;
            let y = dim - 1;
            let mut opt = vec![0.0; dim];
            opt[y] = -1.0 / mu;
            let cost = CostFunction::new(
                LinearRidge { dim, y, mu },
                meta(Some(mu), None, mu, None),
                at_point(opt, -0.5 / mu),
                id,
            );
            if det {
                let oracle = OracleSpec::nonstochastic(NoiseSchedule::fixed_direction(
                    delta,
                    vec![1.0, 0.0],
                )?);
                let solver =
                    SolverConfig::new(StepSchedule::InverseL { l: mu }, AveragingScheme::Last, t);
                (Problem::Single(cost), oracle, solver, Vector::zeros(2))
            } else {
                let oracle = OracleSpec::stochastic(NoiseSchedule::RademacherCoordinate {
                    delta,
                    offset: 0,
                    end: t,
                });
                let k = StepSchedule::smooth_sc_k(mu, mu);
                let solver = SolverConfig::new(
                    StepSchedule::SmoothSc { l: mu, mu },
                    AveragingScheme::ShiftedLinear { k },
                    t,
                );
                (Problem::Single(cost), oracle, solver, Vector::zeros(dim))
            }
        }
        "nesterov_chain" => {
            let kappa = r.positive("kappa")?;
            if kappa < 1.0 {
                return Err(Error::param("kappa", "condition number must be at least 1"));
            }
            let mu = r.positive("mu")?;
            let delta = r.nonneg("delta")?;
            let d = r.opt_count("truncation_dim", 4 * t)?;
            check_budget(2 * d, budget)?;
            let chain = NesterovChain {
                block: d,
                blocks: 2,
                mu,
                kappa,
            };
            let q = chain.q();
            let star: Vec<f64> = (1..=d).map(|i| q.powi(i as i32)).collect();
            let point: Vec<f64> = star.iter().chain(&star).copied().collect();
            let value = chain.value(&point);
            let cost = CostFunction::new(
                chain,
                meta(Some(mu * kappa), None, mu, None),
                at_point(point, value),
                id,
            );
            let oracle =
                OracleSpec::inexact_init(InitMode::TruncateTail { start: d, len: d }, delta);
            let solver = SolverConfig::new(
                StepSchedule::InverseL { l: mu * kappa },
                AveragingScheme::Last,
                t,
            );
            let init: Vec<f64> = std::iter::repeat(0.0).take(d).chain(star).collect();
            (
                Problem::Single(cost),
                oracle,
                solver,
                Vector::from_raw(init),
            )
        }
        "nonsmooth_sto_lb" | "nonsmooth_det_lb" => {
            let eps = r.positive("epsilon")?;
            let delta = r.nonneg("delta")?;
            let det = id == "nonsmooth_det_lb";
            let chain = NonsmoothChain { t, eps, dummy: det };
            let dim = chain.dim();
            check_budget(dim, budget)?;
            let radius = if det { Some(r.opt("D", 2.0)?) } else { None };
            if let Some(d) = radius {
                if !(d > 1.0) {
                    return Err(Error::param(
                        "D",
                        "the ball must contain the minimizer w = -1",
                    ));
                }
            }
            let cost = CostFunction::new(
                chain,
                meta(None, Some(g_lipschitz() + 2.0 * eps), 0.0, radius),
                value_only(0.0),
                id,
            );
            let eta = 1.0 / (eps * t as f64);
            let (oracle, solver) = if det {
                (
                    OracleSpec::nonstochastic(NoiseSchedule::SplitDummy {
                        delta,
                        offset: 0,
                        end: t,
                        dummy: dim - 1,
                    }),
                    SolverConfig::new(StepSchedule::Constant { eta }, AveragingScheme::Uniform, t)
                        .with_radius(radius),
                )
            } else {
                (
                    OracleSpec::stochastic(NoiseSchedule::RademacherCoordinate {
                        delta,
                        offset: 0,
                        end: t,
                    }),
                    SolverConfig::new(
                        StepSchedule::Slowed {
                            epsilon: eps,
                            horizon: t,
                        },
                        AveragingScheme::Uniform,
                        t,
                    ),
                )
            };
            (Problem::Single(cost), oracle, solver, Vector::zeros(dim))
        }
        "nonsmooth_init_lb" => {
            let eps = r.positive("epsilon")?;
            let delta = r.nonneg("delta")?;
            let k = MaxPairs {
                t,
                tail: MaxPairsTail::Hinge { eps },
            };
            let dim = k.dim();
            check_budget(dim, budget)?;
            let cost = CostFunction::new(
                k,
                meta(None, Some(std::f64::consts::SQRT_2 + 2.0 * eps), 0.0, None),
                value_only(0.0),
                id,
            );
            let oracle = OracleSpec::inexact_init(InitMode::Spread { block: t }, delta);
            let eta = 1.0 / (eps * t as f64);
            let solver =
                SolverConfig::new(StepSchedule::Constant { eta }, AveragingScheme::Uniform, t);
            (Problem::Single(cost), oracle, solver, Vector::zeros(dim))
        }
        "nonsmooth_sc_sto_lb" | "nonsmooth_sc_det_lb" => {
            let mu = r.positive("mu")?;
            let delta = r.nonneg("delta")?;
            let det = id == "nonsmooth_sc_det_lb";
            // the shift occupies x₁, so the chain has one extra link and the
            // noise starts at x₂
            let n = t + 1;
            let k = NonsmoothRidge {
                t: n,
                mu,
                shift: delta,
                dummy: det,
            };
            let dim = k.dim();
            check_budget(dim, budget)?;
            // G(x+δe₁) ≥ |x₁+δ|, so the minimum over x₁ of |x₁+δ| + μx₁²/2
            // sits at x₁ = −δ whenever μδ ≤ 1.
            let optimum = (mu * delta <= 1.0).then(|| {
                let mut p = vec![0.0; dim];
                p[0] = -delta;
                p[3 * n] = -1.0 / mu;
                Optimum {
                    point: Some(Vector::from_raw(p)),
                    value: 0.5 * mu * delta * delta - 0.5 / mu,
                }
            });
            let cost = CostFunction::new(k, meta(None, None, mu, None), optimum, id);
            let (oracle, solver) = if det {
                (
                    OracleSpec::nonstochastic(NoiseSchedule::SplitDummy {
                        delta,
                        offset: 1,
                        end: n,
                        dummy: dim - 1,
                    }),
                    SolverConfig::new(StepSchedule::ScDet { mu }, AveragingScheme::ScLinearDet, t),
                )
            } else {
                (
                    OracleSpec::stochastic(NoiseSchedule::RademacherCoordinate {
                        delta,
                        offset: 1,
                        end: n,
                    }),
                    SolverConfig::new(StepSchedule::ScClassic { mu }, AveragingScheme::ScLinear, t),
                )
            };
            (Problem::Single(cost), oracle, solver, Vector::zeros(dim))
        }
        "nonsmooth_sc_init_lb" => {
            let mu = r.positive("mu")?;
            let delta = r.nonneg("delta")?;
            let k = MaxPairs {
                t,
                tail: MaxPairsTail::Ridge { mu },
            };
            let dim = k.dim();
            check_budget(dim, budget)?;
            let mut p = vec![0.0; dim];
            p[2 * t] = -1.0 / mu;
            let cost = CostFunction::new(k, meta(None, None, mu, None), at_point(p, -0.5 / mu), id);
            let oracle = OracleSpec::inexact_init(InitMode::Block { block: t }, delta);
            let solver =
                SolverConfig::new(StepSchedule::ScClassic { mu }, AveragingScheme::ScLinear, t);
            (Problem::Single(cost), oracle, solver, Vector::zeros(dim))
        }
        "theta_quadratic" | "theta_sco" => {
            let theta = r.req("theta")?;
            let eps = r.positive("epsilon")?;
            let delta = r.nonneg("delta")?;
            let sco = id == "theta_sco";
            let variant = if sco {
                ThetaVariant::Sco
            } else {
                ThetaVariant::IntervalQuadratic
            };
            let family = ThetaFamily::new(theta, eps, variant)?;
            if family.curvature() > 1.0 || (sco && family.curvature() >= 1.0) {
                return Err(Error::param(
                    "epsilon",
                    "the spike probability 200ε must be below 1",
                ));
            }
            let solver = SolverConfig::new(
                StepSchedule::Slowed {
                    epsilon: eps,
                    horizon: t,
                },
                AveragingScheme::Uniform,
                t,
            );
            if sco {
                (
                    Problem::Sco(family),
                    OracleSpec::global(&family, delta),
                    solver,
                    Vector::from_raw(vec![1.0]),
                )
            } else {
                let oracle = OracleSpec::stochastic(NoiseSchedule::BernoulliSpike {
                    delta,
                    probability: family.curvature(),
                });
                (
                    Problem::Single(family.cost(id)),
                    oracle,
                    solver,
                    Vector::zeros(1),
                )
            }
        }
        "finite_sum_l1" => {
            let eps = r.positive("epsilon")?;
            let delta = r.nonneg("delta")?;
            let m = r.opt_count("m", 5)?;
            let dim = r.opt_count("dim", 4)?;
            check_budget(dim, budget)?;
            let seed = r.opt("instance_seed", 0.0)?;
            let d = r.opt("D", 0.5 * (dim as f64).sqrt())?;
            if !(d >= 0.5 * (dim as f64).sqrt()) {
                return Err(Error::param(
                    "D",
                    "the ball must contain every center, so D ≥ sqrt(dim)/2",
                ));
            }
            let mut g = RngState::new(seed.to_bits())
                .derive("finite_sum_l1", 0)
                .generator();
            let scale = 1.0 / (dim as f64).sqrt();
            let centers: Vec<Vec<f64>> = (0..m)
                .map(|_| (0..dim).map(|_| g.random_range(-0.5..0.5)).collect())
                .collect();
            let components = centers
                .iter()
                .map(|c| {
                    CostFunction::new(
                        L1Center {
                            c: c.clone(),
                            scale,
                        },
                        meta(None, Some(1.0), 0.0, Some(d)),
                        None,
                        id,
                    )
                })
                .collect();
            let mut fs = FiniteSum::new(components)?;
            // coordinate-wise lower median minimizes the average ℓ1 distance
            let median: Vec<f64> = (0..dim)
                .map(|j| {
                    let mut col: Vec<f64> = centers.iter().map(|c| c[j]).collect();
                    col.sort_by(f64::total_cmp);
                    col[(m - 1) / 2]
                })
                .collect();
            let value = fs.as_cost().value_raw(&median);
            fs.meta = meta(None, Some(1.0), 0.0, Some(d));
            fs.optimum = at_point(median, value);
            let oracle =
                OracleSpec::component(NoiseSchedule::fixed_direction(delta, vec![1.0; dim])?);
            let solver = SolverConfig::new(
                StepSchedule::Slowed {
                    epsilon: eps,
                    horizon: t,
                },
                AveragingScheme::Uniform,
                t,
            )
            .with_radius(Some(d));
            (Problem::FiniteSum(fs), oracle, solver, Vector::zeros(dim))
        }
        "quadratic" => {
            let delta = r.nonneg("delta")?;
            let dim = r.opt_count("dim", 8)?;
            check_budget(dim, budget)?;
            let mu = r.opt("mu", 0.1)?;
            let l = r.opt("L", 1.0)?;
            if !(mu > 0.0 && l >= mu) {
                return Err(Error::param(
                    "mu",
                    format!("need 0 < mu ≤ L, got mu={mu}, L={l}"),
                ));
            }
            let seed = r.opt("instance_seed", 0.0)?;
            let mut g = RngState::new(seed.to_bits())
                .derive("quadratic", 0)
                .generator();
            let q = Quadratic::random(dim, mu, l, &mut g);
            let c = q.center().to_vec();
            let cost = CostFunction::new(q, meta(Some(l), None, mu, None), at_point(c, 0.0), id);
            let oracle = OracleSpec::inexact_init(InitMode::SphereUniform, delta);
            let solver = SolverConfig::new(StepSchedule::InverseL { l }, AveragingScheme::Last, t);
            (Problem::Single(cost), oracle, solver, Vector::zeros(dim))
        }
        _ => unreachable!("catalog and builder cover the same ids"),
    };

    let mut solver = solver;
    solver.horizon = t;
    Ok(Instance {
        scenario_id: id.to_string(),
        problem,
        oracle,
        solver,
        init,
        params: r.resolved,
    })
}

fn check_budget(dim: usize, budget: f64) -> Result<()> {
    if dim as f64 > budget {
        Err(Error::Resource(format!(
            "dimension {dim} exceeds max_dimension_budget {budget}"
        )))
    } else {
        Ok(())
    }
}

/// Convenience for building parameter maps in code.
pub fn params<'a>(pairs: impl IntoIterator<Item = (&'a str, f64)>) -> Params {
    pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}
