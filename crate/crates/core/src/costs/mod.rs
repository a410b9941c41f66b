//! Cost functions behind a uniform value/subgradient interface.

mod constructions;
mod family;
mod helpers;

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::Result;
use crate::vector::{check_dim, Vector};

pub use constructions::{
    HingeRamp, L1Center, LinearRidge, MaxPairs, MaxPairsTail, NesterovChain, NonsmoothChain,
    NonsmoothRidge, Quadratic, ShiftedSquare,
};
pub use family::{SampledFunction, ThetaFamily, ThetaVariant};
pub use helpers::{chi, helper_f, helper_g, GBranch, GSubgradient};

/// A convex function with a deterministic subgradient selection.
///
/// Implementations receive slices whose length equals [`Objective::dim`];
/// [`CostFunction`] performs that check at the public boundary.
pub trait Objective: Send + Sync + fmt::Debug {
    fn dim(&self) -> usize;
    fn value(&self, x: &[f64]) -> f64;
    /// Overwrites `out` with a subgradient at `x`.
    fn subgrad_into(&self, x: &[f64], out: &mut [f64]);
}

/// Regularity constants of a concrete construction. `None` means the
/// property does not hold (nonsmooth, non-Lipschitz, or unbounded domain).
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct RegularityMeta {
    pub smoothness_l: Option<f64>,
    pub lipschitz_g: Option<f64>,
    pub strong_convexity_mu: f64,
    pub domain_radius_d: Option<f64>,
}

/// A minimizer (when a single one is known) and the minimum value.
#[derive(Clone, Debug, PartialEq)]
pub struct Optimum {
    pub point: Option<Vector>,
    pub value: f64,
}

/// A cost function together with its metadata.
#[derive(Clone)]
pub struct CostFunction {
    kernel: Arc<dyn Objective>,
    pub meta: RegularityMeta,
    pub optimum: Option<Optimum>,
    pub scenario_id: String,
}

impl fmt::Debug for CostFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CostFunction")
            .field("scenario_id", &self.scenario_id)
            .field("dim", &self.dim())
            .field("meta", &self.meta)
            .field("kernel", &self.kernel)
            .finish()
    }
}

impl CostFunction {
    pub fn new(
        kernel: impl Objective + 'static,
        meta: RegularityMeta,
        optimum: Option<Optimum>,
        scenario_id: impl Into<String>,
    ) -> Self {
        CostFunction {
            kernel: Arc::new(kernel),
            meta,
            optimum,
            scenario_id: scenario_id.into(),
        }
    }

    pub fn dim(&self) -> usize {
        self.kernel.dim()
    }

    pub fn eval(&self, x: &Vector) -> Result<f64> {
        check_dim(self.dim(), x.dim())?;
        Ok(self.kernel.value(x))
    }

    pub fn subgrad(&self, x: &Vector) -> Result<Vector> {
        check_dim(self.dim(), x.dim())?;
        let mut out = vec![0.0; x.dim()];
        self.kernel.subgrad_into(x, &mut out);
        Ok(Vector::from_raw(out))
    }

    /// `f(x) − inf f`, when the minimum value is known.
    pub fn suboptimality(&self, x: &Vector) -> Result<Option<f64>> {
        let v = self.eval(x)?;
        Ok(self.optimum.as_ref().map(|o| v - o.value))
    }

    pub(crate) fn value_raw(&self, x: &[f64]) -> f64 {
        self.kernel.value(x)
    }

    pub(crate) fn subgrad_raw(&self, x: &[f64], out: &mut [f64]) {
        self.kernel.subgrad_into(x, out)
    }
}

/// `f = (1/m) Σ f_i` over components of a common dimension.
#[derive(Clone, Debug)]
pub struct FiniteSum {
    components: Vec<CostFunction>,
    pub meta: RegularityMeta,
    pub optimum: Option<Optimum>,
    pub scenario_id: String,
}

impl FiniteSum {
    pub fn new(components: Vec<CostFunction>) -> Result<Self> {
        let first = components
            .first()
            .ok_or_else(|| crate::Error::InvalidInput("finite sum needs a component".into()))?;
        for c in &components {
            check_dim(first.dim(), c.dim())?;
        }
        let scenario_id = first.scenario_id.clone();
        Ok(FiniteSum {
            components,
            meta: RegularityMeta::default(),
            optimum: None,
            scenario_id,
        })
    }

    pub fn m(&self) -> usize {
        self.components.len()
    }

    pub fn dim(&self) -> usize {
        self.components[0].dim()
    }

    pub fn components(&self) -> &[CostFunction] {
        &self.components
    }

    /// The average as a single [`CostFunction`].
    pub fn as_cost(&self) -> CostFunction {
        CostFunction {
            kernel: Arc::new(Average(self.components.clone())),
            meta: self.meta.clone(),
            optimum: self.optimum.clone(),
            scenario_id: self.scenario_id.clone(),
        }
    }
}

/// `(1/m) Σ f_i(x)`, accumulated left to right.
pub fn finite_sum_eval(fs: &FiniteSum, x: &Vector) -> Result<f64> {
    check_dim(fs.dim(), x.dim())?;
    Ok(Average::mean_value(&fs.components, x))
}

#[derive(Debug)]
struct Average(Vec<CostFunction>);

impl Average {
    fn mean_value(cs: &[CostFunction], x: &[f64]) -> f64 {
        let mut s = 0.0;
        for c in cs {
            s += c.value_raw(x);
        }
        s / cs.len() as f64
    }
}

impl Objective for Average {
    fn dim(&self) -> usize {
        self.0[0].dim()
    }

    fn value(&self, x: &[f64]) -> f64 {
        Self::mean_value(&self.0, x)
    }

    fn subgrad_into(&self, x: &[f64], out: &mut [f64]) {
        out.fill(0.0);
        let mut g = vec![0.0; x.len()];
        for c in &self.0 {
            c.subgrad_raw(x, &mut g);
            for (o, v) in out.iter_mut().zip(&g) {
                *o += v;
            }
        }
        let m = self.0.len() as f64;
        for o in out.iter_mut() {
            *o /= m;
        }
    }
}
