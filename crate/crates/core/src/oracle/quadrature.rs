//! Tensor-product tanh-sinh rule on the open unit cube.
//!
//! Nodes are kept in log form: `ln x` and `ln(1 − x)` are both exact even
//! when `x` rounds to 0 or 1, which is what lets endpoint singularities of
//! the mapped integrands be evaluated without cancellation.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Half-width of the `t` window. At the edge `π sinh t = 1000`, far past
/// the point where any integrable algebraic singularity still matters.
const T_MAX: f64 = 6.456;

#[derive(Debug, Clone, Copy)]
pub struct Node {
    pub x: f64,
    pub ln_x: f64,
    pub ln_1mx: f64,
    /// `ln(dx/dt)`; the step `h` is applied by the caller.
    pub ln_w: f64,
}

fn softplus(y: f64) -> f64 {
    if y > 0.0 {
        y + (-y).exp().ln_1p()
    } else {
        y.exp().ln_1p()
    }
}

impl Node {
    fn at(t: f64) -> Node {
        let y = std::f64::consts::PI * t.sinh();
        let ln_x = -softplus(-y);
        let ln_1mx = -softplus(y);
        let ln_w = (std::f64::consts::PI * t.cosh()).ln() + ln_x + ln_1mx;
        Node {
            x: ln_x.exp(),
            ln_x,
            ln_1mx,
            ln_w,
        }
    }
}

/// Nodes of level `level` (step `2^-level`), indexed by `k + half`.
fn nodes(level: u32) -> Vec<Node> {
    let h = (-(level as f64)).exp2();
    let half = (T_MAX / h).floor() as i64;
    (-half..=half).map(|k| Node::at(k as f64 * h)).collect()
}

/// Refinement schedule for [`integrate_cube`].
#[derive(Debug, Clone, Copy)]
pub struct Schedule {
    pub first_level: u32,
    pub max_level: u32,
}

/// Outcome of a converged cube integration.
#[derive(Debug, Clone, Copy)]
pub struct CubeIntegral {
    pub value: Complex64,
    /// Difference between the last two levels.
    pub difference: f64,
    pub level: u32,
    pub evaluations: usize,
}

/// Integrates over `(0,1)^dim`. The integrand returns the complex logarithm of
/// its value (without node weights), or `None` for a negligible point.
///
/// Levels are refined until two successive estimates agree to
/// `tol · max(1, |I|)`; only the new nodes are evaluated at each level.
pub fn integrate_cube<F>(dim: usize, tol: f64, schedule: Schedule, mut f: F) -> Result<CubeIntegral>
where
    F: FnMut(&[Node]) -> Option<Complex64>,
{
    let mut sum = Complex64::new(0.0, 0.0);
    let mut prev: Option<Complex64> = None;
    let mut evaluations = 0usize;
    let mut difference = f64::INFINITY;
    let mut point = vec![Node::at(0.0); dim];
    let mut idx = vec![0usize; dim];
    for level in schedule.first_level..=schedule.max_level {
        let grid = nodes(level);
        let len = grid.len();
        let half = (len / 2) as i64;
        let first = level == schedule.first_level;
        idx.iter_mut().for_each(|v| *v = 0);
        'outer: loop {
            let fresh = first || idx.iter().any(|&k| (k as i64 - half) % 2 != 0);
            if fresh {
                let mut ln_w = 0.0;
                for (slot, &k) in point.iter_mut().zip(&idx) {
                    *slot = grid[k];
                    ln_w += grid[k].ln_w;
                }
                evaluations += 1;
                if let Some(lf) = f(&point) {
                    let re = lf.re + ln_w;
                    if re > -745.0 {
                        sum += Complex64::from_polar(re.exp(), lf.im);
                    }
                }
            }
            for d in (0..dim).rev() {
                idx[d] += 1;
                if idx[d] < len {
                    continue 'outer;
                }
                idx[d] = 0;
            }
            break;
        }
        let h = (-(level as f64)).exp2();
        let estimate = sum * h.powi(dim as i32);
        if !estimate.re.is_finite() || !estimate.im.is_finite() {
            return Err(Error::NonFiniteValue {
                field: "quadrature sum".into(),
            });
        }
        if let Some(p) = prev {
            difference = (estimate - p).norm();
            if difference <= tol * estimate.norm().max(1.0) {
                return Ok(CubeIntegral {
                    value: estimate,
                    difference,
                    level,
                    evaluations,
                });
            }
        }
        prev = Some(estimate);
    }
    Err(Error::QuadratureStagnation {
        difference,
        tolerance: tol,
    })
}
