use crate::error::{Error, Result};
use crate::linalg::{tensor_nuclear_norm, Array, Tensor3};
use crate::prox::{prox_frobenius, tensor_svt, EuclideanKernel};
use crate::solver::DcProblem;

use super::{check_lambda, frobenius_ball_indicator, CompletionModel, SamplingMask};

/// `min λ(‖𝒳‖_TNN − ‖𝒳‖_F) + ½‖𝒫_Ω(𝒳 − ℳ)‖²`, split as `h⁺ = 0`,
/// `h⁻ = −½‖𝒫_Ω(𝒳 − ℳ)‖²`, with kernel `ψ = (μ/2)‖·‖²`.
#[derive(Debug, Clone)]
pub struct TensorCompletionProblem {
    observed: Tensor3,
    mask: SamplingMask,
    lambda: f64,
    kernel: EuclideanKernel,
}

impl TensorCompletionProblem {
    /// Entries of `observed` outside the mask are ignored (zeroed). `mu` must be positive.
    pub fn new(observed: Tensor3, mask: SamplingMask, lambda: f64, mu: f64) -> Result<Self> {
        mask.check(&observed)?;
        if mask.observed_count() == 0 {
            return Err(Error::EmptyMask);
        }
        check_lambda(lambda)?;
        if !(mu > 0.0) || !mu.is_finite() {
            return Err(Error::InvalidParameter("mu must be positive"));
        }
        let observed = mask.project(&observed);
        Ok(Self {
            observed,
            mask,
            lambda,
            kernel: EuclideanKernel { scale: mu },
        })
    }

    pub fn mu(&self) -> f64 {
        self.kernel.scale
    }
}

impl DcProblem for TensorCompletionProblem {
    type Point = Tensor3;
    type Kernel = EuclideanKernel;

    fn f(&self, x: &Tensor3) -> Result<f64> {
        if self.lambda == 0.0 {
            return Ok(0.0);
        }
        Ok(self.lambda * tensor_nuclear_norm(x)?)
    }

    fn g(&self, x: &Tensor3) -> f64 {
        self.lambda * x.norm()
    }

    fn g_conjugate(&self, xi: &Tensor3) -> f64 {
        frobenius_ball_indicator(xi, self.lambda)
    }

    fn h_plus(&self, _x: &Tensor3) -> f64 {
        0.0
    }

    fn h_minus(&self, x: &Tensor3) -> f64 {
        -self.mask.half_sq_residual(x, &self.observed)
    }

    fn grad_h_plus(&self, x: &Tensor3) -> Tensor3 {
        x.zeros_like()
    }

    fn grad_h_minus(&self, x: &Tensor3) -> Tensor3 {
        self.mask.project_diff(&self.observed, x)
    }

    fn prox_beta_g(&self, a: &Tensor3, beta: f64) -> Tensor3 {
        prox_frobenius(a, beta * self.lambda)
    }

    /// `tensor_svt(x̂ + u/(τμ), λ/(τμ))`
    fn solve_x_subproblem(&self, u: &Tensor3, xhat: &Tensor3, tau: f64) -> Result<Tensor3> {
        self.check_tau(tau)?;
        self.check_point(u)?;
        self.check_point(xhat)?;
        let w = tau * self.mu();
        let mut b = xhat.clone();
        b.axpy(1.0 / w, u);
        tensor_svt(&b, self.lambda / w)
    }

    fn kernel(&self) -> &EuclideanKernel {
        &self.kernel
    }

    fn lambda(&self) -> f64 {
        self.lambda
    }

    fn l_h_plus(&self) -> f64 {
        0.0
    }

    fn l_h_minus(&self) -> f64 {
        1.0
    }

    fn check_point(&self, x: &Tensor3) -> Result<()> {
        self.mask.check(x)
    }
}

impl CompletionModel for TensorCompletionProblem {
    fn mask(&self) -> &SamplingMask {
        &self.mask
    }

    fn observed(&self) -> &Tensor3 {
        &self.observed
    }

    fn shrink(&self, a: &Tensor3, kappa: f64) -> Result<Tensor3> {
        tensor_svt(a, kappa)
    }
}
