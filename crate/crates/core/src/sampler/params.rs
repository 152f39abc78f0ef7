//! Thresholds derived from the tolerance ε.

use crate::{Error, Result};

/// Smallest tolerance the threshold equation admits: at κ = 0 the right-hand
/// side is `2.23 + 0.48 - 1`.
pub const MIN_EPSILON: f64 = 1.71;

/// `κ`, `pivot` and the cell-size window they induce.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KappaPivot {
    pub epsilon: f64,
    pub kappa: f64,
    pub pivot: u64,
    /// `1 + (1 + κ)·pivot`
    pub hi_thresh: f64,
    /// `pivot / (1 + κ)`
    pub lo_thresh: f64,
}

impl KappaPivot {
    /// Solves `ε = (1+κ)(2.23 + 0.48/(1-κ)²) - 1` for `κ ∈ [0, 1)` by
    /// bisection and sets `pivot = ⌈3e^{1/2}(1 + 1/κ)²⌉`.
    pub fn new(epsilon: f64) -> Result<KappaPivot> {
        if !epsilon.is_finite() || epsilon <= MIN_EPSILON {
            return Err(Error::contract(format!(
                "epsilon must exceed {MIN_EPSILON}, got {epsilon}"
            )));
        }
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if epsilon_of(mid) < epsilon {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let kappa = if (epsilon_of(lo) - epsilon).abs() <= (epsilon_of(hi) - epsilon).abs() {
            lo
        } else {
            hi
        };
        let pivot = (3.0 * 0.5f64.exp() * (1.0 + 1.0 / kappa).powi(2)).ceil() as u64;
        Ok(KappaPivot {
            epsilon,
            kappa,
            pivot,
            hi_thresh: 1.0 + (1.0 + kappa) * pivot as f64,
            lo_thresh: pivot as f64 / (1.0 + kappa),
        })
    }

    /// Enumeration bound that distinguishes "at most hiThresh" from "more".
    pub fn bsat_bound(&self) -> usize {
        self.hi_thresh.ceil() as usize + 1
    }

    /// Whether a cell of `size` witnesses is accepted.
    pub fn accepts(&self, size: usize) -> bool {
        let s = size as f64;
        self.lo_thresh <= s && s <= self.hi_thresh
    }
}

/// Right-hand side of the threshold equation.
pub fn epsilon_of(kappa: f64) -> f64 {
    (1.0 + kappa) * (2.23 + 0.48 / (1.0 - kappa).powi(2)) - 1.0
}
