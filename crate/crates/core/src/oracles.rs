//! δ-bounded error models wrapped around exact cost oracles.

use std::fmt;
use std::sync::Arc;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::costs::{CostFunction, FiniteSum, SampledFunction, ThetaFamily, ThetaVariant};
use crate::error::{Error, Result};
use crate::rng::{RngState, StreamRng};
use crate::vector::{check_dim, norm, norm_sq, Vector};

/// Relative slack on the deterministic noise bound `‖Δ‖ ≤ δ`.
pub const NOISE_BOUND_SLACK: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseKind {
    None,
    GaussianIid,
    RademacherCoordinate,
    GradientProportional,
    SplitDummy,
    BernoulliSpike,
    FixedDirection,
    CustomAdversary,
}

impl NoiseKind {
    pub const ALL: [NoiseKind; 8] = [
        NoiseKind::None,
        NoiseKind::GaussianIid,
        NoiseKind::RademacherCoordinate,
        NoiseKind::GradientProportional,
        NoiseKind::SplitDummy,
        NoiseKind::BernoulliSpike,
        NoiseKind::FixedDirection,
        NoiseKind::CustomAdversary,
    ];

    pub fn id(self) -> &'static str {
        match self {
            NoiseKind::None => "none",
            NoiseKind::GaussianIid => "gaussian_iid",
            NoiseKind::RademacherCoordinate => "rademacher_coordinate",
            NoiseKind::GradientProportional => "gradient_proportional",
            NoiseKind::SplitDummy => "split_dummy",
            NoiseKind::BernoulliSpike => "bernoulli_spike",
            NoiseKind::FixedDirection => "fixed_direction",
            NoiseKind::CustomAdversary => "custom_adversary",
        }
    }

    pub fn is_stochastic(self) -> bool {
        matches!(
            self,
            NoiseKind::GaussianIid | NoiseKind::RademacherCoordinate | NoiseKind::BernoulliSpike
        )
    }
}

/// A history-dependent noise rule for the non-stochastic model.
///
/// `history` holds the iterates queried before `x` in the current run. The
/// returned vector must have norm at most `delta`; oracles check this on
/// every call.
pub trait Adversary: Send + Sync + fmt::Debug {
    fn noise(&self, x: &[f64], t: usize, history: &[Vector], delta: f64) -> Vec<f64>;
}

/// `δ·e_{offset+t}`, the deterministic walk through fresh coordinates.
#[derive(Clone, Debug)]
pub struct CoordinateSweep {
    pub offset: usize,
}

impl Adversary for CoordinateSweep {
    fn noise(&self, x: &[f64], t: usize, _: &[Vector], delta: f64) -> Vec<f64> {
        let mut v = vec![0.0; x.len()];
        if let Some(e) = v.get_mut(self.offset + t) {
            *e = delta;
        }
        v
    }
}

/// A random but non-adaptive schedule: `δ·u_t` with `u_t` a uniformly
/// random unit vector that depends only on `(stream, t)`.
#[derive(Clone, Debug)]
pub struct RandomSchedule {
    pub stream: RngState,
}

impl Adversary for RandomSchedule {
    fn noise(&self, x: &[f64], t: usize, _: &[Vector], delta: f64) -> Vec<f64> {
        let mut rng = self.stream.derive("step", t as u64).generator();
        let mut v: Vec<f64> = (0..x.len()).map(|_| rng.sample(StandardNormal)).collect();
        let n = norm(&v);
        if n > 0.0 {
            for e in &mut v {
                *e *= delta / n;
            }
        }
        v
    }
}

/// Noise model attached to a gradient oracle.
#[derive(Clone, Debug)]
pub enum NoiseSchedule {
    None,
    /// `ξ ~ N(0, (δ²/dim)·I)`.
    GaussianIid {
        delta: f64,
    },
    /// `δ·r_t·e_{offset+t}`, `r_t = ±1`; coordinates must stay below `end`.
    RademacherCoordinate {
        delta: f64,
        offset: usize,
        end: usize,
    },
    /// `δ·(∂f/∂x[source])·e_target`.
    GradientProportional {
        delta: f64,
        source: usize,
        target: usize,
    },
    /// `(δ/√2)·e_{offset+t} + (δ/√2)·e_dummy`.
    SplitDummy {
        delta: f64,
        offset: usize,
        end: usize,
        dummy: usize,
    },
    /// `Sample·(∇f/p + z)` with `Sample ~ Bern(p)` and
    /// `z ~ N(0, δ²/(2p·dim)·I)`.
    BernoulliSpike {
        delta: f64,
        probability: f64,
    },
    /// `δ·u` for a fixed unit vector `u`.
    FixedDirection {
        delta: f64,
        direction: Vector,
    },
    CustomAdversary {
        delta: f64,
        adversary: Arc<dyn Adversary>,
    },
}

impl NoiseSchedule {
    pub fn kind(&self) -> NoiseKind {
        match self {
            NoiseSchedule::None => NoiseKind::None,
            NoiseSchedule::GaussianIid { .. } => NoiseKind::GaussianIid,
            NoiseSchedule::RademacherCoordinate { .. } => NoiseKind::RademacherCoordinate,
            NoiseSchedule::GradientProportional { .. } => NoiseKind::GradientProportional,
            NoiseSchedule::SplitDummy { .. } => NoiseKind::SplitDummy,
            NoiseSchedule::BernoulliSpike { .. } => NoiseKind::BernoulliSpike,
            NoiseSchedule::FixedDirection { .. } => NoiseKind::FixedDirection,
            NoiseSchedule::CustomAdversary { .. } => NoiseKind::CustomAdversary,
        }
    }

    pub fn delta(&self) -> f64 {
        match self {
            NoiseSchedule::None => 0.0,
            NoiseSchedule::GaussianIid { delta }
            | NoiseSchedule::RademacherCoordinate { delta, .. }
            | NoiseSchedule::GradientProportional { delta, .. }
            | NoiseSchedule::SplitDummy { delta, .. }
            | NoiseSchedule::BernoulliSpike { delta, .. }
            | NoiseSchedule::FixedDirection { delta, .. }
            | NoiseSchedule::CustomAdversary { delta, .. } => *delta,
        }
    }

    pub fn is_stochastic(&self) -> bool {
        self.kind().is_stochastic()
    }

    /// `δ·u/‖u‖`.
    pub fn fixed_direction(delta: f64, direction: Vec<f64>) -> Result<Self> {
        let n = norm(&direction);
        if !(n > 0.0) {
            return Err(Error::param("direction", "must be a nonzero vector"));
        }
        let unit = Vector::new(direction.into_iter().map(|e| e / n).collect())?;
        Ok(NoiseSchedule::FixedDirection {
            delta,
            direction: unit,
        })
    }

    /// Same shape with a different `δ`.
    pub fn with_delta(&self, delta: f64) -> Self {
        let mut s = self.clone();
        match &mut s {
            NoiseSchedule::None => {}
            NoiseSchedule::GaussianIid { delta: d }
            | NoiseSchedule::RademacherCoordinate { delta: d, .. }
            | NoiseSchedule::GradientProportional { delta: d, .. }
            | NoiseSchedule::SplitDummy { delta: d, .. }
            | NoiseSchedule::BernoulliSpike { delta: d, .. }
            | NoiseSchedule::FixedDirection { delta: d, .. }
            | NoiseSchedule::CustomAdversary { delta: d, .. } => *d = delta,
        }
        s
    }

    pub(crate) fn validate(&self) -> Result<()> {
        let d = self.delta();
        if !(d >= 0.0) || !d.is_finite() {
            return Err(Error::param(
                "delta",
                format!("must be nonnegative, got {d}"),
            ));
        }
        if let NoiseSchedule::BernoulliSpike { probability, .. } = self {
            if !(*probability > 0.0 && *probability <= 1.0) {
                return Err(Error::param(
                    "probability",
                    format!("spike probability must lie in (0, 1], got {probability}"),
                ));
            }
        }
        Ok(())
    }

    /// Replaces the exact gradient in `g` by the noisy one.
    fn apply(
        &self,
        x: &[f64],
        t: usize,
        g: &mut [f64],
        rng: &mut StreamRng,
        history: &[Vector],
    ) -> Result<()> {
        let dim = g.len();
        match self {
            NoiseSchedule::None => {}
            NoiseSchedule::GaussianIid { delta } => {
                let s = delta / (dim as f64).sqrt();
                for e in g.iter_mut() {
                    let n: f64 = rng.sample(StandardNormal);
                    *e += s * n;
                }
            }
            NoiseSchedule::RademacherCoordinate { delta, offset, end } => {
                let j = offset + t;
                if j >= *end || j >= dim {
                    return Err(Error::ScheduleExhausted { t, dim });
                }
                let r = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
                g[j] += delta * r;
            }
            NoiseSchedule::GradientProportional {
                delta,
                source,
                target,
            } => {
                let v = delta * g[*source];
                check_bound(v.abs(), *delta, t)?;
                g[*target] += v;
            }
            NoiseSchedule::SplitDummy {
                delta,
                offset,
                end,
                dummy,
            } => {
                let j = offset + t;
                if j >= *end || j >= dim {
                    return Err(Error::ScheduleExhausted { t, dim });
                }
                let h = delta / std::f64::consts::SQRT_2;
                g[j] += h;
                g[*dummy] += h;
            }
            NoiseSchedule::BernoulliSpike { delta, probability } => {
                let p = *probability;
                if rng.random_bool(p) {
                    let s = delta / (2.0 * p * dim as f64).sqrt();
                    for e in g.iter_mut() {
                        let n: f64 = rng.sample(StandardNormal);
                        *e = *e / p + s * n;
                    }
                } else {
                    g.fill(0.0);
                }
            }
            NoiseSchedule::FixedDirection { delta, direction } => {
                check_dim(dim, direction.dim())?;
                for (e, u) in g.iter_mut().zip(direction.iter()) {
                    *e += delta * u;
                }
            }
            NoiseSchedule::CustomAdversary { delta, adversary } => {
                let v = adversary.noise(x, t, history, *delta);
                check_dim(dim, v.len())?;
                if v.iter().any(|e| !e.is_finite()) {
                    return Err(Error::ContractViolation {
                        t,
                        norm: f64::NAN,
                        delta: *delta,
                    });
                }
                check_bound(norm(&v), *delta, t)?;
                for (e, n) in g.iter_mut().zip(&v) {
                    *e += n;
                }
            }
        }
        Ok(())
    }
}

fn check_bound(n: f64, delta: f64, t: usize) -> Result<()> {
    if n > delta * (1.0 + NOISE_BOUND_SLACK) {
        Err(Error::ContractViolation { t, norm: n, delta })
    } else {
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OracleKind {
    Exact,
    StochasticInexact,
    NonstochasticInexact,
    InexactInit,
    Component,
    Global,
}

/// How an inexact initial point is generated around the reference.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitMode {
    /// `x_ref + δ·u` with `u` uniform on the unit sphere.
    SphereUniform,
    /// `x_ref + δ·e₁`.
    FixedCoordinate,
    /// `δ/√(2T)` on the first `T` coordinates and `δ/√2` on the last one.
    Spread { block: usize },
    /// `δ/√T` on each of the first `T` coordinates.
    Block { block: usize },
    /// Zeroes the trailing entries of `x_ref[start..start+len]`, last first,
    /// for as long as the distance to `x_ref` stays within `δ`.
    TruncateTail { start: usize, len: usize },
}

impl InitMode {
    pub fn id(&self) -> &'static str {
        match self {
            InitMode::SphereUniform => "sphere_uniform",
            InitMode::FixedCoordinate => "fixed_coordinate",
            InitMode::Spread { .. } => "spread",
            InitMode::Block { .. } => "block",
            InitMode::TruncateTail { .. } => "truncate_tail",
        }
    }

    pub fn is_random(&self) -> bool {
        matches!(self, InitMode::SphereUniform)
    }
}

/// Oracle model of an instance: the gradient noise and, for the
/// initialization model, how the initial point is perturbed.
#[derive(Clone, Debug)]
pub struct OracleSpec {
    pub kind: OracleKind,
    pub schedule: NoiseSchedule,
    pub init: Option<(InitMode, f64)>,
}

impl OracleSpec {
    pub fn exact() -> Self {
        OracleSpec {
            kind: OracleKind::Exact,
            schedule: NoiseSchedule::None,
            init: None,
        }
    }

    pub fn stochastic(schedule: NoiseSchedule) -> Self {
        OracleSpec {
            kind: OracleKind::StochasticInexact,
            schedule,
            init: None,
        }
    }

    pub fn nonstochastic(schedule: NoiseSchedule) -> Self {
        OracleSpec {
            kind: OracleKind::NonstochasticInexact,
            schedule,
            init: None,
        }
    }

    pub fn inexact_init(mode: InitMode, delta: f64) -> Self {
        OracleSpec {
            kind: OracleKind::InexactInit,
            schedule: NoiseSchedule::None,
            init: Some((mode, delta)),
        }
    }

    pub fn component(schedule: NoiseSchedule) -> Self {
        OracleSpec {
            kind: OracleKind::Component,
            schedule,
            init: None,
        }
    }

    /// The stochastic global oracle of the SCO family: each query draws a
    /// fresh `f(·, ξ)` and returns its gradient.
    pub fn global(family: &ThetaFamily, delta: f64) -> Self {
        OracleSpec {
            kind: OracleKind::Global,
            schedule: NoiseSchedule::BernoulliSpike {
                delta,
                probability: family.curvature(),
            },
            init: None,
        }
    }

    /// The error level `δ` of whichever model is active.
    pub fn delta(&self) -> f64 {
        match self.init {
            Some((_, d)) if self.kind == OracleKind::InexactInit => d,
            _ => self.schedule.delta(),
        }
    }

    pub fn with_delta(&self, delta: f64) -> Self {
        let mut s = self.clone();
        s.schedule = s.schedule.with_delta(delta);
        if let Some((_, d)) = &mut s.init {
            *d = delta;
        }
        s
    }

    pub(crate) fn validate(&self) -> Result<()> {
        self.schedule.validate()?;
        let sto = self.schedule.is_stochastic();
        let ok = match self.kind {
            OracleKind::Exact | OracleKind::InexactInit => self.schedule.kind() == NoiseKind::None,
            OracleKind::StochasticInexact => sto || self.schedule.kind() == NoiseKind::None,
            OracleKind::NonstochasticInexact | OracleKind::Component => !sto,
            OracleKind::Global => true,
        };
        if !ok {
            return Err(Error::Incompatible(format!(
                "noise schedule `{}` cannot drive a {:?} oracle",
                self.schedule.kind().id(),
                self.kind
            )));
        }
        if let Some((_, d)) = self.init {
            if !(d >= 0.0) || !d.is_finite() {
                return Err(Error::param(
                    "delta",
                    format!("must be nonnegative, got {d}"),
                ));
            }
        }
        Ok(())
    }
}

/// What a solver queries: a single cost, a finite sum sampled by component,
/// or the stochastic global oracle of the SCO family.
#[derive(Clone, Debug)]
pub enum Problem {
    Single(CostFunction),
    FiniteSum(FiniteSum),
    Sco(ThetaFamily),
}

impl Problem {
    pub fn dim(&self) -> usize {
        match self {
            Problem::Single(c) => c.dim(),
            Problem::FiniteSum(fs) => fs.dim(),
            Problem::Sco(_) => 1,
        }
    }

    /// The (population) cost used to score outputs.
    pub fn cost(&self) -> CostFunction {
        match self {
            Problem::Single(c) => c.clone(),
            Problem::FiniteSum(fs) => fs.as_cost(),
            Problem::Sco(f) => f.cost("theta_sco"),
        }
    }
}

/// Per-run oracle state: generator, call counter and, for adversaries, the
/// query history.
pub(crate) struct OracleSession<'a> {
    problem: &'a Problem,
    schedule: &'a NoiseSchedule,
    rng: StreamRng,
    calls: u64,
    history: Option<Vec<Vector>>,
    scratch: Vec<f64>,
}

impl<'a> OracleSession<'a> {
    pub(crate) fn new(problem: &'a Problem, spec: &'a OracleSpec, rng: &RngState) -> Result<Self> {
        spec.validate()?;
        match (problem, spec.kind) {
            (Problem::FiniteSum(_), OracleKind::Component) => {}
            (Problem::FiniteSum(_), _) | (_, OracleKind::Component) => {
                return Err(Error::Incompatible(
                    "component oracles pair with finite sums and nothing else".into(),
                ))
            }
            (Problem::Sco(_), OracleKind::Global) => {}
            (Problem::Sco(_), _) | (_, OracleKind::Global) => {
                return Err(Error::Incompatible(
                    "the global oracle pairs with the SCO family and nothing else".into(),
                ))
            }
            _ => {}
        }
        if let (Problem::Sco(f), OracleKind::Global) = (problem, spec.kind) {
            if f.variant != ThetaVariant::Sco || f.curvature() >= 1.0 {
                return Err(Error::param(
                    "epsilon",
                    "global sampling needs the SCO family with ε < 1/200",
                ));
            }
        }
        let history = matches!(spec.schedule, NoiseSchedule::CustomAdversary { .. }).then(Vec::new);
        Ok(OracleSession {
            problem,
            schedule: &spec.schedule,
            rng: rng.generator(),
            calls: 0,
            history,
            scratch: vec![0.0; problem.dim()],
        })
    }

    pub(crate) fn calls(&self) -> u64 {
        self.calls
    }

    /// Writes `g(x_t)` into `out`.
    pub(crate) fn gradient(&mut self, x: &[f64], t: usize, out: &mut [f64]) -> Result<()> {
        self.calls += 1;
        match self.problem {
            Problem::Single(c) => c.subgrad_raw(x, out),
            Problem::FiniteSum(fs) => {
                let i = self.rng.random_range(0..fs.m());
                fs.components()[i].subgrad_raw(x, out);
            }
            Problem::Sco(f) => {
                let s = draw_sample(f, self.schedule.delta(), &mut self.rng);
                out[0] = s.gradient(x[0]);
                return Ok(());
            }
        }
        let history = self.history.as_deref().unwrap_or(&[]);
        self.schedule.apply(x, t, out, &mut self.rng, history)?;
        if let Some(h) = &mut self.history {
            h.push(Vector::from_raw(x.to_vec()));
        }
        Ok(())
    }

    /// Averages `b` independent queries at the same point.
    pub(crate) fn batch_gradient(
        &mut self,
        x: &[f64],
        t: usize,
        b: usize,
        out: &mut [f64],
    ) -> Result<()> {
        if b == 1 {
            return self.gradient(x, t, out);
        }
        let mut acc = vec![0.0; out.len()];
        let mut scratch = std::mem::take(&mut self.scratch);
        for _ in 0..b {
            self.gradient(x, t, &mut scratch)?;
            for (a, s) in acc.iter_mut().zip(&scratch) {
                *a += s;
            }
        }
        self.scratch = scratch;
        for (o, a) in out.iter_mut().zip(&acc) {
            *o = a / b as f64;
        }
        Ok(())
    }
}

fn draw_sample(family: &ThetaFamily, delta: f64, rng: &mut StreamRng) -> SampledFunction {
    let p = family.curvature();
    let spike = rng.random_bool(p);
    let z = if spike {
        let n: f64 = rng.sample(StandardNormal);
        n * delta / (2.0 * p).sqrt()
    } else {
        0.0
    };
    SampledFunction {
        family: *family,
        spike,
        z,
    }
}

/// `∇f(x) + ξ_t` under a stochastic schedule, drawing from `rng`'s stream.
pub fn stochastic_gradient(
    cost: &CostFunction,
    x: &Vector,
    t: usize,
    rng: &RngState,
    schedule: &NoiseSchedule,
) -> Result<Vector> {
    if !schedule.is_stochastic() && schedule.kind() != NoiseKind::None {
        return Err(Error::Incompatible(format!(
            "`{}` is not a stochastic schedule",
            schedule.kind().id()
        )));
    }
    schedule.validate()?;
    let mut g = cost.subgrad(x)?.into_vec();
    schedule.apply(x, t, &mut g, &mut rng.generator(), &[])?;
    Ok(Vector::from_raw(g))
}

/// `∇f(x_t) + Δ_t` under a non-stochastic schedule. `history` lists the
/// iterates queried before `x_t`.
pub fn nonstochastic_gradient(
    cost: &CostFunction,
    x_t: &Vector,
    t: usize,
    schedule: &NoiseSchedule,
    history: &[Vector],
) -> Result<Vector> {
    if schedule.is_stochastic() {
        return Err(Error::Incompatible(format!(
            "`{}` is a stochastic schedule",
            schedule.kind().id()
        )));
    }
    schedule.validate()?;
    let mut g = cost.subgrad(x_t)?.into_vec();
    // non-stochastic schedules never draw
    let mut unused = RngState::new(0).generator();
    schedule.apply(x_t, t, &mut g, &mut unused, history)?;
    Ok(Vector::from_raw(g))
}

/// An initial point within distance `δ` of `x_ref`.
pub fn inexact_init(x_ref: &Vector, mode: InitMode, delta: f64, rng: &RngState) -> Result<Vector> {
    if !(delta >= 0.0) || !delta.is_finite() {
        return Err(Error::param(
            "delta",
            format!("must be nonnegative, got {delta}"),
        ));
    }
    let dim = x_ref.dim();
    let mut x = x_ref.as_slice().to_vec();
    if delta == 0.0 {
        return Ok(x_ref.clone());
    }
    match mode {
        InitMode::SphereUniform => {
            let mut g = rng.generator();
            let mut u: Vec<f64> = (0..dim).map(|_| g.sample(StandardNormal)).collect();
            while norm_sq(&u) == 0.0 {
                u = (0..dim).map(|_| g.sample(StandardNormal)).collect();
            }
            let n = norm(&u);
            for (e, v) in x.iter_mut().zip(&u) {
                *e += delta * v / n;
            }
        }
        InitMode::FixedCoordinate => x[0] += delta,
        InitMode::Spread { block } => {
            if block == 0 || block + 1 > dim {
                return Err(Error::param(
                    "T",
                    format!("spread block {block} does not fit dimension {dim}"),
                ));
            }
            let s = delta / (2.0 * block as f64).sqrt();
            for e in &mut x[..block] {
                *e += s;
            }
            x[dim - 1] += delta / std::f64::consts::SQRT_2;
        }
        InitMode::Block { block } => {
            if block == 0 || block > dim {
                return Err(Error::param(
                    "T",
                    format!("block {block} does not fit dimension {dim}"),
                ));
            }
            let s = delta / (block as f64).sqrt();
            for e in &mut x[..block] {
                *e += s;
            }
        }
        InitMode::TruncateTail { start, len } => {
            if len == 0 || start + len > dim {
                return Err(Error::param(
                    "truncation_dim",
                    format!("tail block does not fit dimension {dim}"),
                ));
            }
            let mut removed = 0.0;
            for j in (start..start + len).rev() {
                let next = removed + x[j] * x[j];
                if next.sqrt() > delta {
                    break;
                }
                removed = next;
                x[j] = 0.0;
            }
        }
    }
    Vector::new(x)
}

/// `∇f_i(x) + Δ_t` for the 1-based component index `i`.
pub fn component_gradient(
    fs: &FiniteSum,
    i: usize,
    x: &Vector,
    t: usize,
    schedule: &NoiseSchedule,
) -> Result<Vector> {
    if i == 0 || i > fs.m() {
        return Err(Error::IndexOutOfRange {
            index: i,
            m: fs.m(),
        });
    }
    nonstochastic_gradient(&fs.components()[i - 1], x, t, schedule, &[])
}

/// One independent draw `f(·, ξ)` of the stochastic global oracle.
pub fn global_sample(family: &ThetaFamily, delta: f64, rng: &RngState) -> Result<SampledFunction> {
    if family.variant != ThetaVariant::Sco {
        return Err(Error::Unsupported(
            "global sampling is defined for the SCO family".into(),
        ));
    }
    if family.curvature() >= 1.0 {
        return Err(Error::param(
            "epsilon",
            format!(
                "needs ε < 1/200 so that 200ε is a probability, got {}",
                family.epsilon
            ),
        ));
    }
    Ok(draw_sample(family, delta, &mut rng.generator()))
}

/// Draws `n` independent samples from one stream.
pub fn global_samples(
    family: &ThetaFamily,
    delta: f64,
    n: usize,
    rng: &RngState,
) -> Result<Vec<SampledFunction>> {
    global_sample(family, delta, rng)?;
    let mut g = rng.generator();
    Ok((0..n).map(|_| draw_sample(family, delta, &mut g)).collect())
}
