//! First-order iterative schemes: `x_t = x₀ − Σ_{i<t} λ_i^{(t)} g(x_i)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::oracles::{OracleSession, OracleSpec, Problem};
use crate::rng::RngState;
use crate::vector::{check_dim, project_in_place, Vector};

/// Step-size rule `η_t`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum StepSchedule {
    Constant {
        eta: f64,
    },
    /// `η = 1/(εT)`.
    Slowed {
        epsilon: f64,
        horizon: usize,
    },
    /// `η_t = 1/(L + 1/λ_t)`, `λ_t = 2/((t+k)μ − 2L)`, `k = ⌈4L/μ⌉`.
    SmoothSc {
        l: f64,
        mu: f64,
    },
    /// `η_t = 2/(μ(t+1))`.
    ScClassic {
        mu: f64,
    },
    /// `η_t = 1/(μ(t+1))`.
    ScDet {
        mu: f64,
    },
    /// `η = 1/L`.
    InverseL {
        l: f64,
    },
}

impl StepSchedule {
    pub const IDS: [&'static str; 6] = [
        "constant",
        "slowed",
        "smooth_sc",
        "sc_classic",
        "sc_det",
        "inverse_L",
    ];

    pub fn id(&self) -> &'static str {
        match self {
            StepSchedule::Constant { .. } => "constant",
            StepSchedule::Slowed { .. } => "slowed",
            StepSchedule::SmoothSc { .. } => "smooth_sc",
            StepSchedule::ScClassic { .. } => "sc_classic",
            StepSchedule::ScDet { .. } => "sc_det",
            StepSchedule::InverseL { .. } => "inverse_L",
        }
    }

    /// `k = ⌈4L/μ⌉` of the smooth strongly convex rule.
    pub fn smooth_sc_k(l: f64, mu: f64) -> usize {
        (4.0 * l / mu).ceil() as usize
    }

    pub(crate) fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::param(
                    name,
                    format!("must be positive and finite, got {v}"),
                ))
            }
        };
        match *self {
            StepSchedule::Constant { eta } => positive("eta", eta),
            StepSchedule::Slowed { epsilon, horizon } => {
                positive("epsilon", epsilon)?;
                if horizon == 0 {
                    return Err(Error::param("T", "must be at least 1"));
                }
                Ok(())
            }
            StepSchedule::SmoothSc { l, mu } => {
                positive("L", l)?;
                positive("mu", mu)
            }
            StepSchedule::ScClassic { mu } | StepSchedule::ScDet { mu } => positive("mu", mu),
            StepSchedule::InverseL { l } => positive("L", l),
        }
    }
}

/// The closed-form step size at iteration `t` (0-based).
///
/// ```
/// use reprolab::solvers::{eta_at, StepSchedule};
/// assert_eq!(eta_at(&StepSchedule::SmoothSc { l: 1.0, mu: 1.0 }, 0).unwrap(), 0.5);
/// assert_eq!(eta_at(&StepSchedule::ScClassic { mu: 2.0 }, 0).unwrap(), 1.0);
/// ```
pub fn eta_at(schedule: &StepSchedule, t: usize) -> Result<f64> {
    schedule.validate()?;
    let t = t as f64;
    Ok(match *schedule {
        StepSchedule::Constant { eta } => eta,
        StepSchedule::Slowed { epsilon, horizon } => 1.0 / (epsilon * horizon as f64),
        StepSchedule::SmoothSc { l, mu } => {
            let k = StepSchedule::smooth_sc_k(l, mu) as f64;
            let lambda = 2.0 / ((t + k) * mu - 2.0 * l);
            1.0 / (l + 1.0 / lambda)
        }
        StepSchedule::ScClassic { mu } => 2.0 / (mu * (t + 1.0)),
        StepSchedule::ScDet { mu } => 1.0 / (mu * (t + 1.0)),
        StepSchedule::InverseL { l } => 1.0 / l,
    })
}

/// How the returned point is formed from `x₀, …, x_T`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum AveragingScheme {
    /// `x_T`.
    Last,
    /// `(1/T) Σ_{t=1}^{T} x_t`.
    Uniform,
    /// Weight `t + k − 1` on `x_{t+1}`, `t = 0..T−1`, normalized.
    ShiftedLinear { k: usize },
    /// Weight `2t/(T(T+1))` on `x_t`, `t = 1..T`.
    ScLinear,
    /// Weight `2(t+1)/((T+1)(T+2))` on `x_t`, `t = 0..T`.
    ScLinearDet,
}

impl AveragingScheme {
    pub const IDS: [&'static str; 5] = [
        "last",
        "uniform",
        "shifted_linear",
        "sc_linear",
        "sc_linear_det",
    ];

    pub fn id(&self) -> &'static str {
        match self {
            AveragingScheme::Last => "last",
            AveragingScheme::Uniform => "uniform",
            AveragingScheme::ShiftedLinear { .. } => "shifted_linear",
            AveragingScheme::ScLinear => "sc_linear",
            AveragingScheme::ScLinearDet => "sc_linear_det",
        }
    }

    /// Whether `x₀` carries weight.
    pub fn includes_start(&self) -> bool {
        matches!(self, AveragingScheme::ScLinearDet)
    }

    /// Weight of `x_s` (`s = 0..=T`) for horizon `horizon`.
    pub fn weight(&self, s: usize, horizon: usize) -> f64 {
        let t = horizon as f64;
        let sf = s as f64;
        match self {
            AveragingScheme::Last => f64::from(u8::from(s == horizon)),
            AveragingScheme::Uniform => {
                if s == 0 {
                    0.0
                } else {
                    1.0 / t
                }
            }
            AveragingScheme::ShiftedLinear { k } => {
                if s == 0 {
                    return 0.0;
                }
                let k = *k as f64;
                let total = t * (k - 1.0) + t * (t - 1.0) / 2.0;
                (sf + k - 2.0) / total
            }
            AveragingScheme::ScLinear => 2.0 * sf / (t * (t + 1.0)),
            AveragingScheme::ScLinearDet => 2.0 * (sf + 1.0) / ((t + 1.0) * (t + 2.0)),
        }
    }

    fn validate(&self) -> Result<()> {
        if let AveragingScheme::ShiftedLinear { k } = self {
            if *k < 1 {
                return Err(Error::param("k", "shifted_linear needs k ≥ 1"));
            }
        }
        Ok(())
    }
}

/// `Σ w_t x_t` over the points a scheme averages.
///
/// `points` are `x₁, …, x_T` for every scheme except `sc_linear_det`, which
/// averages `x₀, …, x_T`.
///
/// ```
/// use reprolab::{solvers::{average_iterates, AveragingScheme}, Vector};
/// let pts = [Vector::new(vec![3.0, 0.0]).unwrap(), Vector::new(vec![0.0, 0.0]).unwrap()];
/// let avg = average_iterates(&pts, &AveragingScheme::ScLinear).unwrap();
/// assert!((avg[0] - 1.0).abs() < 1e-15);
/// ```
pub fn average_iterates(points: &[Vector], avg: &AveragingScheme) -> Result<Vector> {
    avg.validate()?;
    let first = points.first().ok_or(Error::EmptyTrajectory)?;
    let (horizon, offset) = if avg.includes_start() {
        (points.len() - 1, 0)
    } else {
        (points.len(), 1)
    };
    if let AveragingScheme::Last = avg {
        return Ok(points[points.len() - 1].clone());
    }
    let mut acc = vec![0.0; first.dim()];
    for (i, p) in points.iter().enumerate() {
        check_dim(first.dim(), p.dim())?;
        accumulate(&mut acc, avg.weight(i + offset, horizon), p);
    }
    Ok(Vector::from_raw(acc))
}

fn accumulate(acc: &mut [f64], w: f64, x: &[f64]) {
    if w == 0.0 {
        return;
    }
    for (a, v) in acc.iter_mut().zip(x) {
        *a += w * v;
    }
}

/// `x − η g`, then projection onto the ball of radius `d` if given.
///
/// ```
/// use reprolab::{solvers::gd_step, Vector};
/// let x = Vector::new(vec![1.0, 0.0]).unwrap();
/// let g = Vector::new(vec![1.0, 1.0]).unwrap();
/// assert_eq!(gd_step(&x, &g, 0.5, None).unwrap().as_slice(), &[0.5, -0.5]);
/// ```
pub fn gd_step(x: &Vector, g: &Vector, eta: f64, d: Option<f64>) -> Result<Vector> {
    check_dim(x.dim(), g.dim())?;
    if !(eta > 0.0) || !eta.is_finite() {
        return Err(Error::param("eta", format!("must be positive, got {eta}")));
    }
    let mut out = x.as_slice().to_vec();
    step_in_place(&mut out, g, eta);
    if let Some(d) = d {
        if !(d > 0.0) {
            return Err(Error::param(
                "D",
                format!("radius must be positive, got {d}"),
            ));
        }
        project_in_place(&mut out, d);
    }
    Vector::new(out)
}

fn step_in_place(x: &mut [f64], g: &[f64], eta: f64) {
    for (a, b) in x.iter_mut().zip(g) {
        *a -= eta * b;
    }
}

/// Everything `run_foi` needs besides the problem, the oracle and the start.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub schedule: StepSchedule,
    pub averaging: AveragingScheme,
    /// Number of iterations `T`.
    pub horizon: usize,
    /// Projection radius; `None` runs unconstrained.
    pub radius: Option<f64>,
    /// Oracle draws averaged per step.
    pub batch_size: usize,
    pub keep_trajectory: bool,
}

impl SolverConfig {
    pub fn new(schedule: StepSchedule, averaging: AveragingScheme, horizon: usize) -> Self {
        SolverConfig {
            schedule,
            averaging,
            horizon,
            radius: None,
            batch_size: 1,
            keep_trajectory: false,
        }
    }

    pub fn with_radius(mut self, radius: Option<f64>) -> Self {
        self.radius = radius;
        self
    }

    pub fn with_trajectory(mut self) -> Self {
        self.keep_trajectory = true;
        self
    }

    pub fn with_batch_size(mut self, b: usize) -> Self {
        self.batch_size = b;
        self
    }

    fn validate(&self) -> Result<()> {
        self.schedule.validate()?;
        self.averaging.validate()?;
        if self.horizon == 0 {
            return Err(Error::param("T", "must be at least 1"));
        }
        if self.batch_size == 0 {
            return Err(Error::param("batch_size", "must be at least 1"));
        }
        if let Some(d) = self.radius {
            if !(d > 0.0) || !d.is_finite() {
                return Err(Error::param(
                    "D",
                    format!("radius must be positive, got {d}"),
                ));
            }
        }
        Ok(())
    }
}

/// Output of one run.
#[derive(Clone, Debug, PartialEq)]
pub struct RunResult {
    pub output: Vector,
    /// `x₀, …, x_T` when requested.
    pub trajectory: Option<Vec<Vector>>,
    /// `g(x₀), …, g(x_{T−1})`; only filled by [`run_general_foi`].
    pub gradients: Option<Vec<Vector>>,
    pub suboptimality: Option<f64>,
    pub oracle_calls: u64,
    pub seed_path: String,
    /// Set when some `λ_{t−1}^{(t)}` is zero.
    pub latest_coefficient_zero: bool,
    /// `|λ₀^{(T)}| / |Σ_{t≥1} λ_t^{(T)}|`, recorded by [`run_general_foi`].
    pub lambda0_ratio: Option<f64>,
}

fn score(problem: &Problem, output: &Vector) -> Result<Option<f64>> {
    problem.cost().suboptimality(output)
}

/// Runs `x_{t+1} = Π_D[x_t − η_t g(x_t)]` for `t < T` and returns the
/// averaged output. Makes exactly `b·T` oracle calls.
pub fn run_foi(
    problem: &Problem,
    oracle: &OracleSpec,
    init: &Vector,
    solver: &SolverConfig,
    rng: &RngState,
) -> Result<RunResult> {
    solver.validate()?;
    check_dim(problem.dim(), init.dim())?;
    let mut session = OracleSession::new(problem, oracle, rng)?;
    let horizon = solver.horizon;
    let avg = &solver.averaging;
    let dim = init.dim();

    let mut x = init.as_slice().to_vec();
    let mut g = vec![0.0; dim];
    let streaming = !matches!(avg, AveragingScheme::Last);
    let mut acc = if streaming {
        vec![0.0; dim]
    } else {
        Vec::new()
    };
    if streaming {
        accumulate(&mut acc, avg.weight(0, horizon), &x);
    }
    let mut trajectory = solver.keep_trajectory.then(|| vec![init.clone()]);

    for t in 0..horizon {
        let eta = eta_at(&solver.schedule, t)?;
        session.batch_gradient(&x, t, solver.batch_size, &mut g)?;
        step_in_place(&mut x, &g, eta);
        if let Some(d) = solver.radius {
            project_in_place(&mut x, d);
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "iterate became non-finite at t={}",
                t + 1
            )));
        }
        if streaming {
            accumulate(&mut acc, avg.weight(t + 1, horizon), &x);
        }
        if let Some(tr) = &mut trajectory {
            tr.push(Vector::from_raw(x.clone()));
        }
    }

    let output = Vector::from_raw(if streaming { acc } else { x });
    Ok(RunResult {
        suboptimality: score(problem, &output)?,
        output,
        trajectory,
        gradients: None,
        oracle_calls: session.calls(),
        seed_path: rng.describe(),
        latest_coefficient_zero: false,
        lambda0_ratio: None,
    })
}

/// Lower-triangular coefficients `λ_i^{(t)}`, `t = 1..T`, `i < t`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoefficientMatrix {
    rows: Vec<Vec<f64>>,
}

impl CoefficientMatrix {
    /// `rows[t−1]` holds `λ_0^{(t)}, …, λ_{t−1}^{(t)}`.
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::param(
                "T",
                "coefficient matrix needs at least one row",
            ));
        }
        for (r, row) in rows.iter().enumerate() {
            if row.len() != r + 1 {
                return Err(Error::InvalidInput(format!(
                    "row for t={} must have {} entries, got {}",
                    r + 1,
                    r + 1,
                    row.len()
                )));
            }
            if row.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidInput(format!(
                    "row for t={} is not finite",
                    r + 1
                )));
            }
        }
        Ok(CoefficientMatrix { rows })
    }

    /// The coefficients of constant-step gradient descent.
    pub fn gradient_descent(horizon: usize, eta: f64) -> Self {
        CoefficientMatrix {
            rows: (1..=horizon).map(|t| vec![eta; t]).collect(),
        }
    }

    pub fn zeros(horizon: usize) -> Self {
        CoefficientMatrix {
            rows: (1..=horizon).map(|t| vec![0.0; t]).collect(),
        }
    }

    /// Independent uniform draws from `[lo, hi)`.
    pub fn random_uniform(horizon: usize, lo: f64, hi: f64, rng: &RngState) -> Self {
        use rand::Rng;
        let mut g = rng.generator();
        CoefficientMatrix {
            rows: (1..=horizon)
                .map(|t| (0..t).map(|_| g.random_range(lo..hi)).collect())
                .collect(),
        }
    }

    pub fn horizon(&self) -> usize {
        self.rows.len()
    }

    /// `λ_i^{(t)}` for `1 ≤ t ≤ T`, `i < t`.
    pub fn lambda(&self, t: usize, i: usize) -> f64 {
        self.rows[t - 1][i]
    }

    pub fn latest_nonzero(&self) -> bool {
        self.rows.iter().all(|r| r[r.len() - 1] != 0.0)
    }

    /// `|λ₀^{(T)}| / |Σ_{t≥1} λ_t^{(T)}|`; infinite when the tail sums to 0.
    pub fn lambda0_ratio(&self) -> f64 {
        let last = &self.rows[self.rows.len() - 1];
        let tail: f64 = last[1..].iter().sum();
        last[0].abs() / tail.abs()
    }
}

/// Runs a general FOI; each iterate is queried once and every gradient is
/// reused in all later iterates. Keeps the full trajectory and gradients.
pub fn run_general_foi(
    problem: &Problem,
    oracle: &OracleSpec,
    init: &Vector,
    coeffs: &CoefficientMatrix,
    rng: &RngState,
) -> Result<RunResult> {
    check_dim(problem.dim(), init.dim())?;
    let latest_zero = !coeffs.latest_nonzero();
    if latest_zero {
        log::warn!("coefficient matrix has a zero latest-gradient coefficient; the lower-bound constructions do not cover it");
    }
    let mut session = OracleSession::new(problem, oracle, rng)?;
    let horizon = coeffs.horizon();
    let dim = init.dim();
    let mut trajectory = vec![init.clone()];
    let mut gradients: Vec<Vector> = Vec::with_capacity(horizon);
    for t in 1..=horizon {
        let mut g = vec![0.0; dim];
        session.gradient(&trajectory[t - 1], t - 1, &mut g)?;
        gradients.push(Vector::from_raw(g));
        let mut x = init.as_slice().to_vec();
        for (i, gi) in gradients.iter().enumerate() {
            step_in_place(&mut x, gi, coeffs.lambda(t, i));
        }
        trajectory.push(Vector::new(x)?);
    }
    let output = trajectory[horizon].clone();
    Ok(RunResult {
        suboptimality: score(problem, &output)?,
        output,
        trajectory: Some(trajectory),
        gradients: Some(gradients),
        oracle_calls: session.calls(),
        seed_path: rng.describe(),
        latest_coefficient_zero: latest_zero,
        lambda0_ratio: (horizon >= 2).then(|| coeffs.lambda0_ratio()),
    })
}
