//! Classical DCA baseline. Each outer step linearizes `g = λ‖·‖_F` and solves
//!
//! ```text
//! min_X  λ‖X‖ − ⟨ξ, X⟩ + ½‖𝒫_Ω(Y − M)‖²   s.t. X = Y
//! ```
//!
//! by ADMM with penalty `ρ_j = base^j`, `j = 1, 2, …` restarting each outer step.

use alloc::boxed::Box;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::Array;
use crate::problems::CompletionModel;
use crate::solver::{relative_change, IterationRecord, SolverOutcome, SolverTrace, StopStatus};

#[derive(Debug, Clone, PartialEq)]
pub struct AdmmConfig {
    pub penalty_base: f64,
    pub inner_tol: f64,
    pub inner_max: usize,
    pub max_iter: usize,
    pub rel_tol: f64,
    /// Record `Φ(x^k)` each outer step.
    pub diagnostics: bool,
}

impl Default for AdmmConfig {
    fn default() -> Self {
        Self {
            penalty_base: 1.1,
            inner_tol: 1e-3,
            inner_max: 500,
            max_iter: 500,
            rel_tol: 1e-5,
            diagnostics: false,
        }
    }
}

impl AdmmConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.penalty_base > 1.0) || !self.penalty_base.is_finite() {
            return Err(Error::InvalidParameter("penalty_base must exceed 1"));
        }
        if !(self.inner_tol > 0.0) {
            return Err(Error::InvalidParameter("inner_tol must be positive"));
        }
        if self.inner_max == 0 || self.max_iter == 0 {
            return Err(Error::InvalidParameter("iteration limits must be positive"));
        }
        if !(self.rel_tol > 0.0) {
            return Err(Error::InvalidParameter("rel_tol must be positive"));
        }
        Ok(())
    }
}

/// `λx/‖x‖`, or zero at `x = 0`.
pub fn dca_subgradient_g<T: Array>(x: &T, lambda: f64) -> T {
    let n = x.norm();
    if n == 0.0 {
        x.zeros_like()
    } else {
        x.scaled(lambda / n)
    }
}

struct InnerResult<T> {
    x: T,
    iters: usize,
    residual: f64,
}

/// ADMM on the split problem. `Λ` is the unscaled multiplier of `X − Y`.
fn inner_admm<P: CompletionModel>(
    problem: &P,
    config: &AdmmConfig,
    xi: &P::Point,
    x_start: &P::Point,
) -> Result<InnerResult<P::Point>> {
    let lambda = problem.lambda();
    let observed = problem.observed();
    let mask = problem.mask().observed();
    let mut x = x_start.clone();
    let mut y = x_start.clone();
    let mut dual = x_start.zeros_like();
    let mut rho = 1.0;
    let mut residual = f64::INFINITY;
    let mut iters = 0;

    while iters < config.inner_max {
        iters += 1;
        rho *= config.penalty_base;

        let mut a = xi.sub(&dual).scaled(1.0 / rho);
        a.axpy(1.0, &y);
        x = problem.shrink(&a, lambda / rho)?;

        for (((yv, &xv), (&lv, &mv)), &o) in y
            .values_mut()
            .iter_mut()
            .zip(x.values())
            .zip(dual.values().iter().zip(observed.values()))
            .zip(mask)
        {
            *yv = if o {
                (mv + lv + rho * xv) / (1.0 + rho)
            } else {
                xv + lv / rho
            };
        }

        let diff = x.sub(&y);
        dual.axpy(rho, &diff);
        residual = diff.norm();
        if !residual.is_finite() {
            return Err(Error::NonFinite);
        }
        if residual <= config.inner_tol {
            break;
        }
    }
    Ok(InnerResult { x, iters, residual })
}

/// Runs DCA with inner ADMM from `x0`. Records one trace row per outer step with the inner
/// iteration count and final inner residual.
pub fn admm_dca_run<P: CompletionModel>(
    problem: &P,
    config: &AdmmConfig,
    x0: &P::Point,
) -> Result<SolverOutcome<P::Point>> {
    config.validate()?;
    problem.check_point(x0)?;
    if !x0.is_finite() {
        return Err(Error::NonFinite);
    }
    let lambda = problem.lambda();
    let mut trace = SolverTrace {
        records: Vec::new(),
        initial: None,
        merit: None,
        status: StopStatus::MaxIter,
    };
    let mut x = x0.clone();
    let mut xi = x0.zeros_like();

    for k in 0..config.max_iter {
        let xi_next = dca_subgradient_g(&x, lambda);
        let inner = match inner_admm(problem, config, &xi_next, &x) {
            Ok(r) if r.x.is_finite() => r,
            Ok(_) | Err(Error::NonFinite) => {
                return Err(Error::Divergence {
                    iteration: k + 1,
                    trace: Box::new(trace),
                })
            }
            Err(e) => return Err(e),
        };
        let x_next = inner.x;
        let step_x = x_next.dist(&x);
        let step_xi = xi_next.dist(&xi);
        let rel_change = relative_change(step_x, x.norm(), step_xi, xi.norm());
        let phi = if config.diagnostics {
            Some(problem.objective(&x_next)?)
        } else {
            None
        };
        trace.records.push(IterationRecord {
            k: k + 1,
            alpha: 0.0,
            step_x,
            step_xi,
            rel_change,
            extrapolation_gap: 0.0,
            next_extrapolation_gap: 0.0,
            xi_norm: xi_next.norm(),
            phi,
            merit: None,
            inner_iters: Some(inner.iters),
            inner_residual: Some(inner.residual),
        });
        x = x_next;
        xi = xi_next;
        if rel_change <= config.rel_tol {
            trace.status = StopStatus::Converged;
            break;
        }
    }
    Ok(SolverOutcome { x, xi, trace })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::DenseMatrix;
    use crate::problems::{MatrixCompletionProblem, SamplingMask};

    #[test]
    fn subgradient_examples() {
        let z = DenseMatrix::zeros(1, 2);
        assert_eq!(dca_subgradient_g(&z, 0.5), z);
        let x = DenseMatrix::from_rows(&[&[3.0, 4.0]]).unwrap();
        let s = dca_subgradient_g(&x, 0.5);
        assert!(s.dist(&DenseMatrix::from_rows(&[&[0.3, 0.4]]).unwrap()) < 1e-15);
    }

    #[test]
    fn scalar_instance_converges_to_data() {
        let m = DenseMatrix::from_rows(&[&[5.0]]).unwrap();
        let p = MatrixCompletionProblem::new(m.clone(), SamplingMask::full([1, 1, 1]), 0.5, 1.1)
            .unwrap();
        let cfg = AdmmConfig {
            inner_tol: 1e-9,
            rel_tol: 1e-10,
            ..AdmmConfig::default()
        };
        let out = admm_dca_run(&p, &cfg, &DenseMatrix::zeros(1, 1)).unwrap();
        assert!((out.x.get(0, 0) - 5.0).abs() < 1e-6);
        for r in &out.trace.records {
            assert!(r.inner_residual.unwrap() <= 1e-9);
        }
    }

    #[test]
    fn rejects_bad_config() {
        let c = AdmmConfig {
            penalty_base: 1.0,
            ..AdmmConfig::default()
        };
        assert!(c.validate().is_err());
    }
}
