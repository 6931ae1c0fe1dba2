use crate::error::{Error, Result};
use crate::linalg::Array;
use crate::math;
use crate::prox::BregmanKernel;

use super::{DcProblem, SolverConfig};

/// Constants of the merit function `Θ̂ = Θ + δ‖x − x̂‖² + η‖ξ − ζ‖²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeritParams {
    pub delta: f64,
    pub eta: f64,
    /// Coefficient of `‖x̂^k − x^k‖²` in the per-step descent bound.
    pub h: f64,
    /// Coefficient of `‖x̂^{k+1} − x^{k+1}‖²` in the per-step descent bound.
    pub p: f64,
    /// Constant in `‖υ^{k+1}‖ ≤ θ(‖x^k − x̂^k‖ + ‖x^{k+1} − x̂^{k+1}‖ + ‖ξ^{k+1} − ξ^k‖)`.
    pub residual_constant: f64,
    pub tau: f64,
    pub beta: f64,
    pub epsilon: f64,
    pub alpha_min: f64,
    pub l_h_minus: f64,
    pub rho: f64,
    pub l_psi: f64,
    /// Whether `τ` satisfies the lower bound that makes `δ`, `η` valid merit weights.
    pub theta_feasible: bool,
}

impl MeritParams {
    pub fn compute(
        l_minus: f64,
        rho: f64,
        l_psi: f64,
        tau: f64,
        beta: f64,
        epsilon: f64,
        alpha_min: f64,
    ) -> Self {
        let d = (1.0 - epsilon) + (1.0 + epsilon) * alpha_min * alpha_min;
        let delta = (tau * l_psi - l_minus) / (2.0 * d);
        let eta = (2.0 * beta - 1.0) / (2.0 * (1.0 + epsilon));
        let lm2 = 2.0 * l_minus * l_minus;
        let h = (tau * l_psi + 1.0 + lm2 - 2.0 * tau * rho) / 2.0;
        let p = (lm2 + l_minus - 2.0 * tau * rho + 1.0) / (2.0 * alpha_min * alpha_min);
        let tau_floor = (lm2 + l_minus + 1.0 + 2.0 * (1.0 + epsilon) * delta) / (2.0 * rho);
        let a = l_minus + tau * l_psi + 1.0;
        let residual_constant = a
            .max(a / alpha_min + 4.0 * delta)
            .max((2.0 * eta - beta).abs() + 2.0 * eta);
        Self {
            delta,
            eta,
            h,
            p,
            residual_constant,
            tau,
            beta,
            epsilon,
            alpha_min,
            l_h_minus: l_minus,
            rho,
            l_psi,
            theta_feasible: delta > 0.0 && tau >= tau_floor * (1.0 - 1e-12),
        }
    }
}

/// Fails when `τ L_ψ ≤ L_h⁻`, where `δ` would not be positive.
pub fn merit_params<P: DcProblem>(problem: &P, config: &SolverConfig) -> Result<MeritParams> {
    config.validate()?;
    let k = problem.kernel();
    let l_psi = BregmanKernel::<P::Point>::l_psi(k);
    if !(config.tau * l_psi > problem.l_h_minus()) {
        return Err(Error::InvalidParameter(
            "merit constants need tau * L_psi > L_h_minus",
        ));
    }
    Ok(MeritParams::compute(
        problem.l_h_minus(),
        BregmanKernel::<P::Point>::rho(k),
        l_psi,
        config.tau,
        config.beta,
        config.epsilon_merit,
        config.alpha_min,
    ))
}

/// Smallest `τ` meeting the merit-function lower bound, if one exists.
pub fn theory_consistent_tau(
    l_minus: f64,
    rho: f64,
    l_psi: f64,
    epsilon: f64,
    alpha_min: f64,
) -> Option<f64> {
    let d = (1.0 - epsilon) + (1.0 + epsilon) * alpha_min * alpha_min;
    let c = (1.0 + epsilon) / d;
    let a = 2.0 * l_minus * l_minus + l_minus + 1.0;
    let den = 2.0 * rho - c * l_psi;
    if !(den > 0.0) {
        return None;
    }
    let tau = (a - c * l_minus) / den;
    (tau > 0.0 && tau * l_psi > l_minus && tau.is_finite()).then_some(tau)
}

/// `Θ(x, ξ) = f(x) + g*(ξ) − ⟨ξ, x⟩ + h⁺(x) − h⁻(x)`
pub fn theta_value<P: DcProblem>(problem: &P, x: &P::Point, xi: &P::Point) -> Result<f64> {
    Ok(
        problem.f(x)? + problem.g_conjugate(xi) - xi.dot(x) + problem.h_plus(x)
            - problem.h_minus(x),
    )
}

/// `Θ̂(x, ξ, x̂, ζ)`
pub fn merit_value<P: DcProblem>(
    problem: &P,
    params: &MeritParams,
    x: &P::Point,
    xi: &P::Point,
    xhat: &P::Point,
    zeta: &P::Point,
) -> Result<f64> {
    let gx = x.dist(xhat);
    let gz = xi.dist(zeta);
    Ok(theta_value(problem, x, xi)? + params.delta * gx * gx + params.eta * gz * gz)
}

/// Iterates entering the residual of step `k → k+1`.
pub struct ResidualInputs<'a, T> {
    /// `x̂^k`
    pub xhat: &'a T,
    /// `x^{k+1}`
    pub x_next: &'a T,
    /// `x̂^{k+1}`
    pub xhat_next: &'a T,
    /// `ξ^k`
    pub xi: &'a T,
    /// `ξ^{k+1}`
    pub xi_next: &'a T,
}

/// Block norms of `υ^{k+1} ∈ ∂Θ̂(x^{k+1}, ξ^{k+1}, x̂^{k+1}, ξ^k)`; `total` is the norm of the
/// stacked vector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidualComponents {
    pub x: f64,
    pub xi: f64,
    pub xhat: f64,
    pub zeta: f64,
    pub total: f64,
}

/// The subgradient element built from the optimality conditions of both subproblems.
pub fn subgradient_residual<P: DcProblem>(
    problem: &P,
    params: &MeritParams,
    it: &ResidualInputs<'_, P::Point>,
) -> ResidualComponents {
    let psi = problem.kernel();
    let gap_next = it.x_next.sub(it.xhat_next);
    let dxi = it.xi_next.sub(it.xi);

    let mut ux = problem.grad_h_minus(it.xhat);
    ux.axpy(-1.0, &problem.grad_h_minus(it.x_next));
    ux.axpy(2.0 * params.delta, &gap_next);
    let dpsi = psi.gradient(it.x_next).sub(&psi.gradient(it.xhat));
    ux.axpy(-params.tau, &dpsi);

    let mut uxi = it.xhat.sub(it.x_next);
    uxi.axpy(2.0 * params.eta - params.beta, &dxi);

    let x = ux.norm();
    let xi = uxi.norm();
    let xhat = 2.0 * params.delta.abs() * gap_next.norm();
    let zeta = 2.0 * params.eta.abs() * dxi.norm();
    ResidualComponents {
        x,
        xi,
        xhat,
        zeta,
        total: math::sqrt(x * x + xi * xi + xhat * xhat + zeta * zeta),
    }
}

/// Upper bound on `Θ(x^{k+1}, ξ^{k+1})` given `Θ(x^k, ξ^k)` and the step's gaps.
pub fn descent_bound(
    params: &MeritParams,
    theta: f64,
    gap: f64,
    next_gap: f64,
    step_xi: f64,
) -> f64 {
    theta
        + params.h * gap * gap
        + params.p * next_gap * next_gap
        + (0.5 - params.beta) * step_xi * step_xi
}

/// Right-hand side of the residual bound for one step.
pub fn residual_bound(params: &MeritParams, gap: f64, next_gap: f64, step_xi: f64) -> f64 {
    params.residual_constant * (gap + next_gap + step_xi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tensor_single_slice_constants() {
        let mu = 1.1;
        let tau = theory_consistent_tau(1.0, mu, mu, 0.5, 0.5).unwrap();
        assert!((tau * mu - 8.0).abs() < 1e-12);
        let p = MeritParams::compute(1.0, mu, mu, tau, 1.0, 0.5, 0.5);
        assert!((p.delta - 4.0).abs() < 1e-12);
        assert!((p.eta - 1.0 / 3.0).abs() < 1e-15);
        assert!((p.h + 2.5).abs() < 1e-12);
        assert!((p.p + 24.0).abs() < 1e-12);
        assert!(p.theta_feasible);
        let below = MeritParams::compute(1.0, mu, mu, 0.9 * tau, 1.0, 0.5, 0.5);
        assert!(!below.theta_feasible);
    }

    #[test]
    fn masked_kernel_has_no_feasible_tau() {
        assert!(theory_consistent_tau(0.0, 0.1, 1.1, 0.5, 0.2).is_none());
    }

    #[test]
    fn matrix_defaults_constants() {
        let p = MeritParams::compute(0.0, 0.1, 1.1, 1.0, 1.0, 0.5, 0.2);
        assert!((p.h - 0.95).abs() < 1e-12);
        assert!((p.p - 10.0).abs() < 1e-12);
        assert!((p.delta - 0.982_142_857_142_857).abs() < 1e-12);
        assert!(!p.theta_feasible);
    }
}
