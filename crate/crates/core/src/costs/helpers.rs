//! Scalar and vector helpers the lower-bound constructions are assembled from.

use crate::error::{Error, Result};
use crate::vector::Vector;

/// The ramp `F`: `0` below 0, `x²` on `[0, 1]`, `2x − 1` above 1.
///
/// Returns `(value, derivative)`. Boundary points take the branch on their
/// left, which gives the same value and derivative as the right branch since
/// `F` is continuously differentiable.
///
/// ```
/// assert_eq!(reprolab::costs::helper_f(0.5), (0.25, 1.0));
/// assert_eq!(reprolab::costs::helper_f(2.0), (3.0, 2.0));
/// ```
pub fn helper_f(x: f64) -> (f64, f64) {
    if x <= 0.0 {
        (0.0, 0.0)
    } else if x <= 1.0 {
        (x * x, 2.0 * x)
    } else {
        (2.0 * x - 1.0, 2.0)
    }
}

/// `χ(x) = max(x, 0)` with `χ'(0) = 1`.
pub fn chi(x: f64) -> (f64, f64) {
    if x >= 0.0 {
        (x, 1.0)
    } else {
        (0.0, 0.0)
    }
}

/// `sign` with `sign(0) = +1`.
pub(crate) fn sign(x: f64) -> f64 {
    if x >= 0.0 {
        1.0
    } else {
        -1.0
    }
}

/// Which argument of `G = max{0, K}` won.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GBranch {
    /// The outer constant 0.
    Zero,
    /// The `y`-branch of chain index `i` (1-based).
    Y(usize),
    /// The `z`-branch of chain index `i` (1-based).
    Z(usize),
}

/// Evaluates `G` and writes the selected subgradient.
///
/// Branches are scanned in the order 0, y₁, z₁, y₂, z₂, … and the first
/// strict maximum is kept. `gx`, `gy`, `gz` are overwritten.
pub(crate) fn helper_g_into(
    x: &[f64],
    y: &[f64],
    z: &[f64],
    gx: &mut [f64],
    gy: &mut [f64],
    gz: &mut [f64],
) -> (f64, GBranch) {
    let (best, branch) = helper_g_value(x, y, z);
    gx.fill(0.0);
    gy.fill(0.0);
    gz.fill(0.0);
    let (i, along_y) = match branch {
        GBranch::Zero => return (best, branch),
        GBranch::Y(i) => (i - 1, true),
        GBranch::Z(i) => (i - 1, false),
    };
    let mut w = 1.0;
    for j in 0..i {
        gx[j] = sign(x[j]) * w;
        w *= 0.5;
    }
    if along_y {
        gx[i] = w;
        gy[i] = chi(y[i]).1;
    } else {
        gx[i] = -w;
        gz[i] = chi(z[i]).1;
    }
    (best, branch)
}

/// Value and winning branch of `G`.
///
/// The weights `2^{1−i}` make later branches differ from earlier ones far
/// below double precision once `i` exceeds about 50, so branches are not
/// compared through their rounded values. Every branch is compared with
/// `P = Σ_j 2^{1−j}|x_j|` through `D = χ + 2^{1−i}·m`, where
/// `m = ±x_i − |x_i| − R_{i+1}/2 ≤ 0` and `R_i = 2^{i−1}·Σ_{j≥i} 2^{1−j}|x_j|`
/// stays at the scale of `x`. A branch with `χ = 0` ties with the maximum
/// exactly when `m = 0`, which is decided without rounding.
pub(crate) fn helper_g_value(x: &[f64], y: &[f64], z: &[f64]) -> (f64, GBranch) {
    let t = x.len();
    let mut r = vec![0.0; t + 1];
    for i in (0..t).rev() {
        r[i] = x[i].abs() + 0.5 * r[i + 1];
    }
    let mut best = f64::NEG_INFINITY;
    let mut branch = GBranch::Zero;
    let mut w = 1.0;
    for i in 0..t {
        let tail = x[i].abs() + 0.5 * r[i + 1];
        for (along_y, c) in [(true, y[i]), (false, z[i])] {
            let m = if along_y { x[i] } else { -x[i] } - tail;
            let (chi_v, _) = chi(c);
            let d = if chi_v > 0.0 {
                chi_v + w * m
            } else if m == 0.0 {
                0.0
            } else {
                continue;
            };
            if d > best {
                best = d;
                branch = if along_y {
                    GBranch::Y(i + 1)
                } else {
                    GBranch::Z(i + 1)
                };
            }
        }
        w *= 0.5;
    }
    let value = if t == 0 { 0.0 } else { r[0] + best };
    if value > 0.0 {
        (value, branch)
    } else {
        (0.0, GBranch::Zero)
    }
}

/// Subgradient of [`helper_g`] split into its `(x, y, z)` blocks.
#[derive(Clone, Debug, PartialEq)]
pub struct GSubgradient {
    pub x: Vector,
    pub y: Vector,
    pub z: Vector,
    pub branch: GBranch,
}

/// `G(x, y, z) = max{0, K(x, y, z)}` with the first-maximizer subgradient.
pub fn helper_g(x: &Vector, y: &Vector, z: &Vector) -> Result<(f64, GSubgradient)> {
    let t = x.dim();
    if y.dim() != t || z.dim() != t {
        return Err(Error::InvalidInput(format!(
            "G needs equal block lengths, got x:{} y:{} z:{}",
            t,
            y.dim(),
            z.dim()
        )));
    }
    let (mut gx, mut gy, mut gz) = (vec![0.0; t], vec![0.0; t], vec![0.0; t]);
    let (value, branch) = helper_g_into(x, y, z, &mut gx, &mut gy, &mut gz);
    Ok((
        value,
        GSubgradient {
            x: Vector::from_raw(gx),
            y: Vector::from_raw(gy),
            z: Vector::from_raw(gz),
            branch,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(e: &[f64]) -> Vector {
        Vector::new(e.to_vec()).unwrap()
    }

    #[test]
    fn f_branches() {
        assert_eq!(helper_f(-1.0), (0.0, 0.0));
        assert_eq!(helper_f(0.0), (0.0, 0.0));
        assert_eq!(helper_f(1.0), (1.0, 2.0));
    }

    #[test]
    fn g_all_zero_picks_outer_constant() {
        let (val, g) = helper_g(&v(&[0.0, 0.0]), &v(&[0.0, 0.0]), &v(&[0.0, 0.0])).unwrap();
        assert_eq!(val, 0.0);
        assert_eq!(g.branch, GBranch::Zero);
        assert!(g
            .x
            .iter()
            .chain(g.y.iter())
            .chain(g.z.iter())
            .all(|&e| e == 0.0));
    }

    #[test]
    fn g_negative_first_coordinate_takes_z() {
        let zero = v(&[0.0, 0.0]);
        let (val, g) = helper_g(&v(&[-0.5, 0.0]), &zero, &zero).unwrap();
        assert_eq!(val, 0.5);
        assert_eq!(g.branch, GBranch::Z(1));
        assert_eq!(g.z, v(&[1.0, 0.0]));
        assert_eq!(g.x, v(&[-1.0, 0.0]));
    }

    #[test]
    fn g_newest_coordinate_wins_beyond_double_precision() {
        let t = 200;
        let x: Vec<f64> = (0..t)
            .map(|i| if i % 2 == 0 { 0.01 } else { -0.01 })
            .collect();
        let y = vec![-0.5; t];
        let mut z = vec![-0.5; t];
        z[t - 1] = 0.0;
        let (_, g) = helper_g(&v(&x), &v(&y), &v(&z)).unwrap();
        assert_eq!(g.branch, GBranch::Z(t));
        assert_eq!(g.z[t - 1], 1.0);
    }

    #[test]
    fn g_length_mismatch() {
        assert!(helper_g(&v(&[0.0]), &v(&[0.0, 1.0]), &v(&[0.0])).is_err());
    }
}
