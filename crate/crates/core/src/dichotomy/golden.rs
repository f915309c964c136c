//! Golden-section inversion of the dichotomy function for real-valued data.
//!
//! On either side of `d_max` the curve is strictly monotone, so for a target
//! `e` the residual `| |x^g - x| - e |` is unimodal on the branch bracket and
//! a golden-section search recovers the unique preimage.

use crate::error::{Error, Result};

use super::{eval_unchecked, Branch, DichotomyParams};

const PHI: f64 = 1.618_033_988_749_895;
/// Bracket width at which the midpoint is returned. Well below the 1e-5
/// round-trip budget even where the curve is flat near the maximum.
const BRACKET_TOL: f64 = 1e-9;

/// Stopping rule for [`invert_golden`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GoldenSearchConfig {
    /// Tolerance on the function residual `| |x^g - x| - e |`.
    pub epsilon: f64,
    /// Iteration cap; at the golden shrink rate 200 iterations take the
    /// bracket below 1e-40, so this only guards pathological inputs.
    pub max_iters: u32,
}

impl Default for GoldenSearchConfig {
    fn default() -> Self {
        Self {
            epsilon: 1e-7,
            max_iters: 200,
        }
    }
}

impl GoldenSearchConfig {
    pub fn new(epsilon: f64, max_iters: u32) -> Result<Self> {
        if epsilon.is_nan() || epsilon <= 0.0 {
            return Err(Error::Domain(format!("epsilon = {epsilon} must be positive")));
        }
        if max_iters == 0 {
            return Err(Error::Domain("max_iters must be >= 1".into()));
        }
        Ok(Self { epsilon, max_iters })
    }
}

/// Recovers `x` on the requested branch with `|x^g - x| = e`.
///
/// `e` is on the unnormalized scale; divide normalized values by `k` first.
/// Targets above `doc_max` by more than `epsilon` cannot lie on either
/// branch and are rejected.
pub fn invert_golden(
    e: f64,
    params: &DichotomyParams,
    branch: Branch,
    cfg: &GoldenSearchConfig,
) -> Result<f64> {
    if !(0.0..=1.0).contains(&e) {
        return Err(Error::Domain(format!("target {e} outside [0, 1]")));
    }
    if e > params.doc_max + cfg.epsilon {
        return Err(Error::BranchMismatch {
            value: e,
            doc_max: params.doc_max,
        });
    }
    let gamma = params.gamma;
    let residual = |x: f64| (eval_unchecked(x, gamma) - e).abs();

    let (mut a, mut b) = params.bracket(branch);
    let mut mid = 0.5 * (a + b);
    for _ in 0..cfg.max_iters {
        if residual(mid) < cfg.epsilon && b - a <= BRACKET_TOL {
            return Ok(mid);
        }
        let c = b - (b - a) / PHI;
        let d = a + (b - a) / PHI;
        if residual(c) < residual(d) {
            b = d;
        } else {
            a = c;
        }
        mid = 0.5 * (a + b);
    }
    if residual(mid) < cfg.epsilon {
        return Ok(mid);
    }
    Err(Error::NoConvergence {
        iters: cfg.max_iters,
        residual: residual(mid),
    })
}
