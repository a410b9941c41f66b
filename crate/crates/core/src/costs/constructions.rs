//! Kernels of the catalogued constructions.
//!
//! Block layouts are documented per kernel; all indices are 0-based.

use rand::Rng;

use super::helpers::{helper_f, helper_g_into, helper_g_value, sign};
use super::Objective;
use crate::rng::StreamRng;
use crate::vector::{dot, norm_sq};

/// `scale · F(x[y] + 1)` on `R^dim`; every other coordinate is a dummy.
#[derive(Clone, Debug)]
pub struct HingeRamp {
    pub dim: usize,
    pub y: usize,
    pub scale: f64,
}

impl Objective for HingeRamp {
    fn dim(&self) -> usize {
        self.dim
    }
    fn value(&self, x: &[f64]) -> f64 {
        self.scale * helper_f(x[self.y] + 1.0).0
    }
    fn subgrad_into(&self, x: &[f64], out: &mut [f64]) {
        out.fill(0.0);
        out[self.y] = self.scale * helper_f(x[self.y] + 1.0).1;
    }
}

/// `(x[1] − 1)²` on `R²`.
#[derive(Clone, Debug)]
pub struct ShiftedSquare;

impl Objective for ShiftedSquare {
    fn dim(&self) -> usize {
        2
    }
    fn value(&self, x: &[f64]) -> f64 {
        (x[1] - 1.0) * (x[1] - 1.0)
    }
    fn subgrad_into(&self, x: &[f64], out: &mut [f64]) {
        out[0] = 0.0;
        out[1] = 2.0 * (x[1] - 1.0);
    }
}

/// `x[y] + (μ/2)‖x‖²`.
#[derive(Clone, Debug)]
pub struct LinearRidge {
    pub dim: usize,
    pub y: usize,
    pub mu: f64,
}

impl Objective for LinearRidge {
    fn dim(&self) -> usize {
        self.dim
    }
    fn value(&self, x: &[f64]) -> f64 {
        x[self.y] + 0.5 * self.mu * norm_sq(x)
    }
    fn subgrad_into(&self, x: &[f64], out: &mut [f64]) {
        for (o, v) in out.iter_mut().zip(x) {
            *o = self.mu * v;
        }
        out[self.y] += 1.0;
    }
}

/// Sum of `blocks` copies of the truncated chain
/// `μ(κ−1)/8 · (⟨Ax, x⟩ − 2x[0]) + (μ/2)‖x‖²`, `A = tridiag(−1, 2, −1)`,
/// each on `block` consecutive coordinates.
#[derive(Clone, Debug)]
pub struct NesterovChain {
    pub block: usize,
    pub blocks: usize,
    pub mu: f64,
    pub kappa: f64,
}

impl NesterovChain {
    /// `q = (√κ − 1)/(√κ + 1)`.
    pub fn q(&self) -> f64 {
        let s = self.kappa.sqrt();
        (s - 1.0) / (s + 1.0)
    }

    fn coupling(&self) -> f64 {
        self.mu * (self.kappa - 1.0) / 8.0
    }
}

impl Objective for NesterovChain {
    fn dim(&self) -> usize {
        self.block * self.blocks
    }
    fn value(&self, x: &[f64]) -> f64 {
        let c = self.coupling();
        let mut total = 0.0;
        for b in x.chunks(self.block) {
            let mut quad = 0.0;
            for i in 0..b.len() {
                quad += 2.0 * b[i] * b[i];
                if i + 1 < b.len() {
                    quad -= 2.0 * b[i] * b[i + 1];
                }
            }
            total += c * (quad - 2.0 * b[0]) + 0.5 * self.mu * norm_sq(b);
        }
        total
    }
    fn subgrad_into(&self, x: &[f64], out: &mut [f64]) {
        let c2 = 2.0 * self.coupling();
        for (b, o) in x.chunks(self.block).zip(out.chunks_mut(self.block)) {
            let n = b.len();
            for i in 0..n {
                let mut ax = 2.0 * b[i];
                if i > 0 {
                    ax -= b[i - 1];
                }
                if i + 1 < n {
                    ax -= b[i + 1];
                }
                if i == 0 {
                    ax -= 1.0;
                }
                o[i] = c2 * ax + self.mu * b[i];
            }
        }
    }
}

/// `G(x, y, z) + 2ε·max{w + 1, 0}` on `(x, y, z, w[, u])`, blocks of length
/// `t`, with an optional trailing dummy `u`.
#[derive(Clone, Debug)]
pub struct NonsmoothChain {
    pub t: usize,
    pub eps: f64,
    pub dummy: bool,
}

impl Objective for NonsmoothChain {
    fn dim(&self) -> usize {
        3 * self.t + 1 + usize::from(self.dummy)
    }
    fn value(&self, v: &[f64]) -> f64 {
        let t = self.t;
        let (g, _) = helper_g_value(&v[..t], &v[t..2 * t], &v[2 * t..3 * t]);
        g + 2.0 * self.eps * (v[3 * t] + 1.0).max(0.0)
    }
    fn subgrad_into(&self, v: &[f64], out: &mut [f64]) {
        let t = self.t;
        let (gx, rest) = out.split_at_mut(t);
        let (gy, rest) = rest.split_at_mut(t);
        let (gz, rest) = rest.split_at_mut(t);
        helper_g_into(&v[..t], &v[t..2 * t], &v[2 * t..3 * t], gx, gy, gz);
        // first argument of max{w + 1, 0} wins ties
        rest[0] = if v[3 * t] + 1.0 >= 0.0 {
            2.0 * self.eps
        } else {
            0.0
        };
        if self.dummy {
            rest[1] = 0.0;
        }
    }
}

/// `G(x + s·e₀, y, z) + (μ/2)‖(x, y, z)‖² + w + (μ/2)w² [+ (μ/2)u²]`.
#[derive(Clone, Debug)]
pub struct NonsmoothRidge {
    pub t: usize,
    pub mu: f64,
    pub shift: f64,
    pub dummy: bool,
}

impl Objective for NonsmoothRidge {
    fn dim(&self) -> usize {
        3 * self.t + 1 + usize::from(self.dummy)
    }
    fn value(&self, v: &[f64]) -> f64 {
        let t = self.t;
        let mut xs = v[..t].to_vec();
        xs[0] += self.shift;
        let (g, _) = helper_g_value(&xs, &v[t..2 * t], &v[2 * t..3 * t]);
        let w = v[3 * t];
        let mut val = g + 0.5 * self.mu * norm_sq(&v[..3 * t]) + w + 0.5 * self.mu * w * w;
        if self.dummy {
            val += 0.5 * self.mu * v[3 * t + 1] * v[3 * t + 1];
        }
        val
    }
    fn subgrad_into(&self, v: &[f64], out: &mut [f64]) {
        let t = self.t;
        let mut xs = v[..t].to_vec();
        xs[0] += self.shift;
        {
            let (gx, rest) = out.split_at_mut(t);
            let (gy, rest) = rest.split_at_mut(t);
            let (gz, _) = rest.split_at_mut(t);
            helper_g_into(&xs, &v[t..2 * t], &v[2 * t..3 * t], gx, gy, gz);
        }
        for i in 0..3 * t {
            out[i] += self.mu * v[i];
        }
        out[3 * t] = 1.0 + self.mu * v[3 * t];
        if self.dummy {
            out[3 * t + 1] = self.mu * v[3 * t + 1];
        }
    }
}

/// Tail term of [`MaxPairs`].
#[derive(Clone, Copy, Debug)]
pub enum MaxPairsTail {
    /// `2ε·max{w + 1, 0}` followed by a dummy coordinate `u`.
    Hinge { eps: f64 },
    /// `w + (μ/2)‖(x, y, w)‖²`.
    Ridge { mu: f64 },
}

/// `max{0, x[0] + y[0], …, x[t−1] + y[t−1]}` plus a tail on `w`.
#[derive(Clone, Debug)]
pub struct MaxPairs {
    pub t: usize,
    pub tail: MaxPairsTail,
}

impl MaxPairs {
    fn argmax(&self, v: &[f64]) -> (f64, Option<usize>) {
        let t = self.t;
        let mut best = 0.0;
        let mut arg = None;
        for i in 0..t {
            let s = v[i] + v[t + i];
            if s > best {
                best = s;
                arg = Some(i);
            }
        }
        (best, arg)
    }
}

impl Objective for MaxPairs {
    fn dim(&self) -> usize {
        match self.tail {
            MaxPairsTail::Hinge { .. } => 2 * self.t + 2,
            MaxPairsTail::Ridge { .. } => 2 * self.t + 1,
        }
    }
    fn value(&self, v: &[f64]) -> f64 {
        let w = v[2 * self.t];
        let (m, _) = self.argmax(v);
        match self.tail {
            MaxPairsTail::Hinge { eps } => m + 2.0 * eps * (w + 1.0).max(0.0),
            MaxPairsTail::Ridge { mu } => m + w + 0.5 * mu * norm_sq(&v[..2 * self.t + 1]),
        }
    }
    fn subgrad_into(&self, v: &[f64], out: &mut [f64]) {
        let t = self.t;
        out.fill(0.0);
        if let Some(i) = self.argmax(v).1 {
            out[i] = 1.0;
            out[t + i] = 1.0;
        }
        let w = v[2 * t];
        match self.tail {
            MaxPairsTail::Hinge { eps } => {
                out[2 * t] = if w + 1.0 >= 0.0 { 2.0 * eps } else { 0.0 };
            }
            MaxPairsTail::Ridge { mu } => {
                for i in 0..=2 * t {
                    out[i] += mu * v[i];
                }
                out[2 * t] += 1.0;
            }
        }
    }
}

/// `½ (x − c)ᵀ H (x − c)` with a dense symmetric `H` (row-major).
#[derive(Clone, Debug)]
pub struct Quadratic {
    dim: usize,
    h: Vec<f64>,
    c: Vec<f64>,
}

impl Quadratic {
    /// # Panics
    ///
    /// If the shapes of `h` and `c` disagree with `dim`.
    pub fn new(dim: usize, h: Vec<f64>, c: Vec<f64>) -> Self {
        assert_eq!(h.len(), dim * dim, "H must be dim×dim");
        assert_eq!(c.len(), dim, "center must have length dim");
        Quadratic { dim, h, c }
    }

    /// `(a/2)‖x − c‖²`.
    pub fn isotropic(dim: usize, a: f64, c: Vec<f64>) -> Self {
        let mut h = vec![0.0; dim * dim];
        for i in 0..dim {
            h[i * dim + i] = a;
        }
        Self::new(dim, h, c)
    }

    /// A random quadratic whose Hessian has spectrum in `[mu, l]` with both
    /// endpoints attained, rotated by a random Householder reflection, and a
    /// center drawn uniformly from `[-1, 1]^dim`.
    pub fn random(dim: usize, mu: f64, l: f64, rng: &mut StreamRng) -> Self {
        let mut eig: Vec<f64> = (0..dim).map(|_| rng.random_range(mu..=l)).collect();
        eig[0] = mu;
        if dim > 1 {
            eig[dim - 1] = l;
        }
        let mut v: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
        let n = norm_sq(&v).sqrt();
        if n > 0.0 {
            v.iter_mut().for_each(|e| *e /= n);
        }
        // H = Q diag(eig) Q with Q = I − 2vvᵀ
        let mut q = vec![0.0; dim * dim];
        for i in 0..dim {
            for j in 0..dim {
                q[i * dim + j] = f64::from(u8::from(i == j)) - 2.0 * v[i] * v[j];
            }
        }
        let mut h = vec![0.0; dim * dim];
        for i in 0..dim {
            for j in 0..dim {
                let mut s = 0.0;
                for k in 0..dim {
                    s += q[i * dim + k] * eig[k] * q[k * dim + j];
                }
                h[i * dim + j] = s;
            }
        }
        // symmetrize away rounding asymmetry
        for i in 0..dim {
            for j in 0..i {
                let m = 0.5 * (h[i * dim + j] + h[j * dim + i]);
                h[i * dim + j] = m;
                h[j * dim + i] = m;
            }
        }
        let c = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
        Self::new(dim, h, c)
    }

    pub fn center(&self) -> &[f64] {
        &self.c
    }

    fn apply(&self, x: &[f64], out: &mut [f64]) {
        let d = self.dim;
        let r: Vec<f64> = x.iter().zip(&self.c).map(|(a, b)| a - b).collect();
        for i in 0..d {
            out[i] = dot(&self.h[i * d..(i + 1) * d], &r);
        }
    }
}

impl Objective for Quadratic {
    fn dim(&self) -> usize {
        self.dim
    }
    fn value(&self, x: &[f64]) -> f64 {
        let mut hr = vec![0.0; self.dim];
        self.apply(x, &mut hr);
        let r: Vec<f64> = x.iter().zip(&self.c).map(|(a, b)| a - b).collect();
        0.5 * dot(&r, &hr)
    }
    fn subgrad_into(&self, x: &[f64], out: &mut [f64]) {
        self.apply(x, out);
    }
}

/// `scale · Σ_j |x[j] − c[j]|`.
#[derive(Clone, Debug)]
pub struct L1Center {
    pub c: Vec<f64>,
    pub scale: f64,
}

impl Objective for L1Center {
    fn dim(&self) -> usize {
        self.c.len()
    }
    fn value(&self, x: &[f64]) -> f64 {
        let mut s = 0.0;
        for (a, b) in x.iter().zip(&self.c) {
            s += (a - b).abs();
        }
        self.scale * s
    }
    fn subgrad_into(&self, x: &[f64], out: &mut [f64]) {
        for ((o, a), b) in out.iter_mut().zip(x).zip(&self.c) {
            *o = self.scale * sign(a - b);
        }
    }
}
