//! One-dimensional parametric families `F_θ`.

use serde::{Deserialize, Serialize};

use super::{CostFunction, Objective, Optimum, RegularityMeta};
use crate::error::{Error, Result};
use crate::vector::Vector;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThetaVariant {
    /// `100ε(x − θ)²` on `[−1, 1]`, `θ ∈ [−1, 1]`.
    IntervalQuadratic,
    /// `200ε(x²/2 − θx)` on `[1, 2]`, `θ ∈ [1, 2]`.
    Sco,
}

/// A member `F_θ` of one of the families, extended linearly outside its
/// interval so that it stays convex and differentiable on all of `R`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThetaFamily {
    pub theta: f64,
    pub epsilon: f64,
    pub variant: ThetaVariant,
}

impl ThetaFamily {
    pub fn new(theta: f64, epsilon: f64, variant: ThetaVariant) -> Result<Self> {
        let (lo, hi) = Self::interval_of(variant);
        if !(lo..=hi).contains(&theta) {
            return Err(Error::param(
                "theta",
                format!("must lie in [{lo}, {hi}], got {theta}"),
            ));
        }
        if !(epsilon > 0.0) || !epsilon.is_finite() {
            return Err(Error::param(
                "epsilon",
                format!("must be positive, got {epsilon}"),
            ));
        }
        Ok(ThetaFamily {
            theta,
            epsilon,
            variant,
        })
    }

    fn interval_of(variant: ThetaVariant) -> (f64, f64) {
        match variant {
            ThetaVariant::IntervalQuadratic => (-1.0, 1.0),
            ThetaVariant::Sco => (1.0, 2.0),
        }
    }

    pub fn interval(&self) -> (f64, f64) {
        Self::interval_of(self.variant)
    }

    /// `200ε`, the curvature on the interval and the spike probability of
    /// the sampled oracles.
    pub fn curvature(&self) -> f64 {
        200.0 * self.epsilon
    }

    fn inner(&self, x: f64) -> (f64, f64) {
        let a = self.curvature();
        match self.variant {
            ThetaVariant::IntervalQuadratic => {
                let d = x - self.theta;
                (0.5 * a * d * d, a * d)
            }
            ThetaVariant::Sco => (a * (0.5 * x * x - self.theta * x), a * (x - self.theta)),
        }
    }

    /// `(F_θ(x), F_θ'(x))`.
    pub fn eval(&self, x: f64) -> (f64, f64) {
        let (lo, hi) = self.interval();
        let edge = if x > hi {
            hi
        } else if x < lo {
            lo
        } else {
            return self.inner(x);
        };
        let (v, d) = self.inner(edge);
        (v + d * (x - edge), d)
    }

    pub fn min_value(&self) -> f64 {
        self.inner(self.theta).0
    }

    pub fn cost(&self, scenario_id: &str) -> CostFunction {
        CostFunction::new(
            *self,
            RegularityMeta {
                smoothness_l: Some(self.curvature()),
                lipschitz_g: Some(self.curvature() * self.lipschitz_reach()),
                strong_convexity_mu: 0.0,
                domain_radius_d: None,
            },
            Some(Optimum {
                point: Some(Vector::from_raw(vec![self.theta])),
                value: self.min_value(),
            }),
            scenario_id,
        )
    }

    fn lipschitz_reach(&self) -> f64 {
        let (lo, hi) = self.interval();
        (hi - self.theta).max(self.theta - lo)
    }
}

impl Objective for ThetaFamily {
    fn dim(&self) -> usize {
        1
    }
    fn value(&self, x: &[f64]) -> f64 {
        self.eval(x[0]).0
    }
    fn subgrad_into(&self, x: &[f64], out: &mut [f64]) {
        out[0] = self.eval(x[0]).1;
    }
}

/// One draw `f(·, ξ)` of the stochastic global oracle on the SCO family.
///
/// With probability `200ε` the draw is the spike
/// `F_θ(x)/(200ε) + z·clamp(x, 1, 2)`; otherwise it is identically zero.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SampledFunction {
    pub family: ThetaFamily,
    pub spike: bool,
    pub z: f64,
}

impl SampledFunction {
    pub fn value(&self, x: f64) -> f64 {
        if !self.spike {
            return 0.0;
        }
        self.family.eval(x).0 / self.family.curvature() + self.z * x.clamp(1.0, 2.0)
    }

    pub fn gradient(&self, x: f64) -> f64 {
        if !self.spike {
            return 0.0;
        }
        let inside = if (1.0..=2.0).contains(&x) {
            self.z
        } else {
            0.0
        };
        self.family.eval(x).1 / self.family.curvature() + inside
    }

    /// The hidden parameter `θ − z` of a spike draw.
    pub fn shifted_parameter(&self) -> f64 {
        self.family.theta - self.z
    }

    /// Recovers `θ − z` from one gradient `g` queried at `x ∈ [1, 2]`.
    pub fn reconstruct(x: f64, g: f64) -> f64 {
        x - g
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interval_quadratic_closed_form() {
        let f = ThetaFamily::new(0.0, 0.01, ThetaVariant::IntervalQuadratic).unwrap();
        assert!((f.eval(0.1).0 - 0.01).abs() < 1e-15);
        assert!((f.eval(2.0).0 - 3.0).abs() < 1e-14);
        assert!((f.eval(-2.0).0 - 3.0).abs() < 1e-14);
        assert_eq!(f.min_value(), 0.0);
    }

    #[test]
    fn sco_minimum() {
        let f = ThetaFamily::new(1.2, 0.001, ThetaVariant::Sco).unwrap();
        assert!((f.min_value() - (-100.0 * 0.001 * 1.44)).abs() < 1e-15);
        assert_eq!(f.eval(1.2).1, 0.0);
        assert!(ThetaFamily::new(0.5, 0.001, ThetaVariant::Sco).is_err());
    }

    #[test]
    fn zero_draw_is_flat() {
        let f = ThetaFamily::new(1.5, 0.001, ThetaVariant::Sco).unwrap();
        let s = SampledFunction {
            family: f,
            spike: false,
            z: 3.0,
        };
        assert_eq!((s.value(1.7), s.gradient(1.7)), (0.0, 0.0));
    }
}
