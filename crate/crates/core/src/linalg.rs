//! Small dense solves shared by the radial and angular modules.

use alloc::string::String;
use alloc::vec::Vec;

use nalgebra::{DMatrix, Dyn, LU};
use num_complex::Complex64;

use crate::{Error, Result, MAX_CONDITION};

/// 2-norm condition number; `INFINITY` for singular or non-finite input.
pub(crate) fn condition_number(m: &DMatrix<f64>) -> f64 {
    if m.is_empty() {
        return 1.0;
    }
    if m.iter().any(|v| !v.is_finite()) {
        return f64::INFINITY;
    }
    let sv = m.clone().singular_values();
    let max = sv.max();
    let min = sv.min();
    if min <= 0.0 || !(max / min).is_finite() {
        f64::INFINITY
    } else {
        max / min
    }
}

/// LU factorization of a real square system, kept together with its
/// condition estimate so callers can refuse untrustworthy solves.
#[derive(Debug, Clone)]
pub(crate) struct RealSolver {
    lu: LU<f64, Dyn, Dyn>,
    condition: f64,
    dim: usize,
}

impl RealSolver {
    pub(crate) fn new(m: DMatrix<f64>) -> Self {
        debug_assert!(m.is_square());
        let condition = condition_number(&m);
        let dim = m.nrows();
        RealSolver { lu: m.lu(), condition, dim }
    }

    pub(crate) fn condition(&self) -> f64 {
        self.condition
    }

    pub(crate) fn check(&self, context: impl FnOnce() -> String) -> Result<()> {
        if self.condition.is_finite() && self.condition <= MAX_CONDITION {
            Ok(())
        } else {
            Err(Error::Conditioning { context: context(), condition: self.condition })
        }
    }

    /// Solves with a complex right-hand side by splitting real and
    /// imaginary parts into two columns.
    pub(crate) fn solve(&self, rhs: &[Complex64], context: impl FnOnce() -> String) -> Result<Vec<Complex64>> {
        debug_assert_eq!(rhs.len(), self.dim);
        let b = DMatrix::from_fn(self.dim, 2, |i, j| if j == 0 { rhs[i].re } else { rhs[i].im });
        let x =
            self.lu.solve(&b).ok_or_else(|| Error::Conditioning { context: context(), condition: f64::INFINITY })?;
        Ok((0..self.dim).map(|i| Complex64::new(x[(i, 0)], x[(i, 1)])).collect())
    }
}
