//! The inertial Bregman proximal DC loop and its non-inertial special case.
//!
//! One iteration, starting from `x^k`, `x^{k-1}`, `ξ^k`:
//!
//! ```text
//! x̂^k     = x^k + α_k (x^k − x^{k−1})
//! ξ^{k+1} = argmin_ξ g*(ξ) − ⟨x̂^k, ξ⟩ + (β/2)‖ξ − ξ^k‖²        (prox of g* via Moreau)
//! u^k     = ξ^{k+1} + ∇h⁻(x̂^k)
//! x^{k+1} = argmin_x f(x) + h⁺(x) − ⟨x − x̂^k, u^k⟩ + τ ℬ_ψ(x, x̂^k)
//! ```
//!
//! With diagnostics enabled the loop also records the surrogate `Θ`, the merit value `Θ̂` and
//! the subgradient residual `υ` at the parameters returned by [`merit_params`].

mod merit;

use alloc::boxed::Box;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::Array;
use crate::math;
use crate::prox::{bregman_distance, prox_conjugate, BregmanKernel};

pub use merit::{
    descent_bound, merit_params, merit_value, residual_bound, subgradient_residual,
    theory_consistent_tau, theta_value, MeritParams, ResidualComponents, ResidualInputs,
};

/// One instance of `min f − g + h⁺ − h⁻`.
///
/// `f` is proper lsc with an exact x-subproblem solver, `g` is convex with a computable prox,
/// `h⁺`, `h⁻` are smooth. Implementations must be reentrant.
pub trait DcProblem {
    type Point: Array;
    type Kernel: BregmanKernel<Self::Point>;

    fn f(&self, x: &Self::Point) -> Result<f64>;
    fn g(&self, x: &Self::Point) -> f64;
    /// `g*(ξ)`, possibly `+∞`.
    fn g_conjugate(&self, xi: &Self::Point) -> f64;
    fn h_plus(&self, x: &Self::Point) -> f64;
    fn h_minus(&self, x: &Self::Point) -> f64;
    fn grad_h_plus(&self, x: &Self::Point) -> Self::Point;
    fn grad_h_minus(&self, x: &Self::Point) -> Self::Point;
    /// `prox_{βg}(a)`
    fn prox_beta_g(&self, a: &Self::Point, beta: f64) -> Self::Point;
    /// Exact minimizer of `f(x) + h⁺(x) − ⟨x − x̂, u⟩ + τ ℬ_ψ(x, x̂)`.
    fn solve_x_subproblem(
        &self,
        u: &Self::Point,
        xhat: &Self::Point,
        tau: f64,
    ) -> Result<Self::Point>;
    fn kernel(&self) -> &Self::Kernel;
    fn lambda(&self) -> f64;
    fn l_h_plus(&self) -> f64;
    fn l_h_minus(&self) -> f64;

    /// Rejects points of the wrong shape.
    fn check_point(&self, x: &Self::Point) -> Result<()>;

    /// Rejects proximal weights the subproblem solver cannot handle exactly.
    fn check_tau(&self, tau: f64) -> Result<()> {
        if tau > 0.0 && tau.is_finite() {
            Ok(())
        } else {
            Err(Error::InvalidParameter("tau must be positive"))
        }
    }

    /// `Φ(x) = f(x) − g(x) + h⁺(x) − h⁻(x)`
    fn objective(&self, x: &Self::Point) -> Result<f64> {
        Ok(self.f(x)? - self.g(x) + self.h_plus(x) - self.h_minus(x))
    }

    /// The x-subproblem objective, for validating [`DcProblem::solve_x_subproblem`].
    fn x_subproblem_objective(
        &self,
        x: &Self::Point,
        u: &Self::Point,
        xhat: &Self::Point,
        tau: f64,
    ) -> Result<f64> {
        let breg = bregman_distance(self.kernel(), x, xhat)?;
        Ok(self.f(x)? + self.h_plus(x) - x.sub(xhat).dot(u) + tau * breg)
    }
}

/// Extrapolation weights `α_k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AlphaSchedule {
    /// `α_k = (t^{k−1} − 1)/t^k`, `t^k = ½(1 + √(1 + 4(t^{k−1})²))`, `t^0 = 1`.
    Fista,
    Constant(f64),
    /// `α_k ≡ 0`: no extrapolation.
    None,
}

/// The FISTA t-sequence. Each call to [`FistaSequence::next_alpha`] advances `t` and returns
/// the next `α_k`, starting at `α_1 = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FistaSequence {
    t: f64,
}

impl Default for FistaSequence {
    fn default() -> Self {
        Self { t: 1.0 }
    }
}

impl FistaSequence {
    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn next_alpha(&mut self) -> f64 {
        let t_next = 0.5 * (1.0 + math::sqrt(1.0 + 4.0 * self.t * self.t));
        let alpha = (self.t - 1.0) / t_next;
        self.t = t_next;
        alpha
    }
}

#[derive(Debug, Clone)]
struct AlphaState {
    schedule: AlphaSchedule,
    fista: FistaSequence,
}

impl AlphaState {
    fn new(schedule: AlphaSchedule) -> Self {
        Self {
            schedule,
            fista: FistaSequence::default(),
        }
    }

    /// `α_k` for `k = 1, 2, …`
    fn next(&mut self) -> f64 {
        match self.schedule {
            AlphaSchedule::Fista => self.fista.next_alpha().clamp(0.0, 1.0),
            AlphaSchedule::Constant(a) => a.min(1.0),
            AlphaSchedule::None => 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    /// Weight of the proximal term in the ξ-subproblem; must exceed 1/2.
    pub beta: f64,
    /// Weight of the Bregman term in the x-subproblem.
    pub tau: f64,
    pub alpha: AlphaSchedule,
    /// Lower bound on `α_k` used by the merit-function constants.
    pub alpha_min: f64,
    pub max_iter: usize,
    pub rel_tol: f64,
    /// `ε ∈ (0, 1)` in the merit-function constants.
    pub epsilon_merit: f64,
    /// Record `Φ`, `Θ`, `Θ̂` and `υ` each iteration (costs an extra SVD per step).
    pub diagnostics: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            beta: 1.0,
            tau: 1.0,
            alpha: AlphaSchedule::Fista,
            alpha_min: 0.2,
            max_iter: 500,
            rel_tol: 1e-5,
            epsilon_merit: 0.5,
            diagnostics: false,
        }
    }
}

impl SolverConfig {
    /// Validated constructor; the remaining fields take their defaults.
    pub fn new(beta: f64, tau: f64, alpha: AlphaSchedule) -> Result<Self> {
        let c = Self {
            beta,
            tau,
            alpha,
            ..Self::default()
        };
        c.validate()?;
        Ok(c)
    }

    /// Defaults with the iteration cap used for tensor problems.
    pub fn tensor_defaults() -> Self {
        Self {
            max_iter: 3000,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.beta > 0.5) || !self.beta.is_finite() {
            return Err(Error::InvalidParameter("beta must exceed 1/2"));
        }
        if !(self.tau > 0.0) || !self.tau.is_finite() {
            return Err(Error::InvalidParameter("tau must be positive"));
        }
        if let AlphaSchedule::Constant(a) = self.alpha {
            if !(a > 0.0) || !a.is_finite() {
                return Err(Error::InvalidParameter("constant alpha must be positive"));
            }
        }
        if !(self.alpha_min > 0.0 && self.alpha_min < 1.0) {
            return Err(Error::InvalidParameter("alpha_min must lie in (0, 1)"));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidParameter("max_iter must be positive"));
        }
        if !(self.rel_tol > 0.0) {
            return Err(Error::InvalidParameter("rel_tol must be positive"));
        }
        if !(self.epsilon_merit > 0.0 && self.epsilon_merit < 1.0) {
            return Err(Error::InvalidParameter("epsilon_merit must lie in (0, 1)"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopStatus {
    Converged,
    MaxIter,
}

/// Merit-function quantities at the iterate a record describes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeritDiagnostics {
    /// `Θ(x^{k}, ξ^{k})`
    pub theta: f64,
    /// `Θ̂(x^k, ξ^k, x̂^k, ξ^{k−1})`
    pub theta_hat: f64,
    /// `‖υ^k‖`
    pub upsilon: f64,
    pub upsilon_components: ResidualComponents,
}

/// One outer iteration, describing the step from `x^{k−1}` to `x^k`.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord {
    /// Index of the iterate produced by this step (starts at 1).
    pub k: usize,
    /// Extrapolation weight used to form `x̂^{k−1}`.
    pub alpha: f64,
    /// `‖x^k − x^{k−1}‖`
    pub step_x: f64,
    /// `‖ξ^k − ξ^{k−1}‖`
    pub step_xi: f64,
    /// The quantity compared against `rel_tol`.
    pub rel_change: f64,
    /// `‖x^{k−1} − x̂^{k−1}‖`
    pub extrapolation_gap: f64,
    /// `‖x^k − x̂^k‖`
    pub next_extrapolation_gap: f64,
    /// `‖ξ^k‖`
    pub xi_norm: f64,
    /// `Φ(x^k)`
    pub phi: Option<f64>,
    pub merit: Option<MeritDiagnostics>,
    /// Inner iterations (ADMM-DCA only).
    pub inner_iters: Option<usize>,
    /// Final inner primal residual (ADMM-DCA only).
    pub inner_residual: Option<f64>,
}

/// Values at the starting point `x^0`, `ξ^0 = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InitialState {
    pub phi: f64,
    pub theta: f64,
    pub theta_hat: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverTrace {
    pub records: Vec<IterationRecord>,
    pub initial: Option<InitialState>,
    pub merit: Option<MeritParams>,
    pub status: StopStatus,
}

impl SolverTrace {
    pub fn iterations(&self) -> usize {
        self.records.len()
    }
}

#[derive(Debug, Clone)]
pub struct SolverOutcome<T> {
    pub x: T,
    pub xi: T,
    pub trace: SolverTrace,
}

/// Stopping measure: `max(‖Δx‖/max(1,‖x^k‖), ‖Δξ‖/max(1,‖ξ^k‖))`.
pub(crate) fn relative_change(step_x: f64, x_norm: f64, step_xi: f64, xi_norm: f64) -> f64 {
    (step_x / x_norm.max(1.0)).max(step_xi / xi_norm.max(1.0))
}

/// Inertial Bregman proximal DC algorithm.
pub fn ibpdca_run<P: DcProblem>(
    problem: &P,
    config: &SolverConfig,
    x0: &P::Point,
) -> Result<SolverOutcome<P::Point>> {
    run(problem, config, x0, config.alpha)
}

/// The same loop with `α_k ≡ 0`, whatever `config.alpha` says.
pub fn bpdca_run<P: DcProblem>(
    problem: &P,
    config: &SolverConfig,
    x0: &P::Point,
) -> Result<SolverOutcome<P::Point>> {
    run(problem, config, x0, AlphaSchedule::None)
}

fn run<P: DcProblem>(
    problem: &P,
    config: &SolverConfig,
    x0: &P::Point,
    schedule: AlphaSchedule,
) -> Result<SolverOutcome<P::Point>> {
    config.validate()?;
    problem.check_tau(config.tau)?;
    problem.check_point(x0)?;
    if !x0.is_finite() {
        return Err(Error::NonFinite);
    }
    let params = if config.diagnostics {
        Some(merit_params(problem, config)?)
    } else {
        None
    };

    let mut trace = SolverTrace {
        records: Vec::new(),
        initial: None,
        merit: params,
        status: StopStatus::MaxIter,
    };
    let mut alphas = AlphaState::new(schedule);
    let mut x = x0.clone();
    let mut xi = x0.zeros_like();
    // x^{-1} = x^0, so x̂^0 = x^0 whatever α_0 is.
    let mut xhat = x.clone();
    let mut alpha = 0.0;

    if config.diagnostics {
        let phi = problem.objective(&x)?;
        let theta = theta_value(problem, &x, &xi)?;
        trace.initial = Some(InitialState {
            phi,
            theta,
            theta_hat: theta,
        });
    }

    let beta = config.beta;
    for k in 0..config.max_iter {
        let xi_next = prox_conjugate(|a, b| problem.prox_beta_g(a, b), &xi, &xhat, beta);
        let mut u = problem.grad_h_minus(&xhat);
        u.axpy(1.0, &xi_next);
        let x_next = problem.solve_x_subproblem(&u, &xhat, config.tau)?;
        if !x_next.is_finite() || !xi_next.is_finite() {
            return Err(Error::Divergence {
                iteration: k + 1,
                trace: Box::new(trace),
            });
        }

        let alpha_next = alphas.next();
        let mut xhat_next = x_next.clone();
        xhat_next.axpy(alpha_next, &x_next.sub(&x));

        let step_x = x_next.dist(&x);
        let step_xi = xi_next.dist(&xi);
        let rel_change = relative_change(step_x, x.norm(), step_xi, xi.norm());

        let (phi, merit) = match &params {
            Some(p) => {
                let phi = problem.objective(&x_next)?;
                let theta = theta_value(problem, &x_next, &xi_next)?;
                let next_gap = x_next.dist(&xhat_next);
                let theta_hat = theta + p.delta * next_gap * next_gap + p.eta * step_xi * step_xi;
                let components = subgradient_residual(
                    problem,
                    p,
                    &ResidualInputs {
                        xhat: &xhat,
                        x_next: &x_next,
                        xhat_next: &xhat_next,
                        xi: &xi,
                        xi_next: &xi_next,
                    },
                );
                if !phi.is_finite() {
                    return Err(Error::Divergence {
                        iteration: k + 1,
                        trace: Box::new(trace),
                    });
                }
                (
                    Some(phi),
                    Some(MeritDiagnostics {
                        theta,
                        theta_hat,
                        upsilon: components.total,
                        upsilon_components: components,
                    }),
                )
            }
            None => (None, None),
        };

        trace.records.push(IterationRecord {
            k: k + 1,
            alpha,
            step_x,
            step_xi,
            rel_change,
            extrapolation_gap: x.dist(&xhat),
            next_extrapolation_gap: x_next.dist(&xhat_next),
            xi_norm: xi_next.norm(),
            phi,
            merit,
            inner_iters: None,
            inner_residual: None,
        });

        x = x_next;
        xi = xi_next;
        xhat = xhat_next;
        alpha = alpha_next;

        if rel_change <= config.rel_tol {
            trace.status = StopStatus::Converged;
            break;
        }
    }

    Ok(SolverOutcome { x, xi, trace })
}
