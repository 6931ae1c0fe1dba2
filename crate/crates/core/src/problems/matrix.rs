use alloc::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::{nuclear_norm, Array, DenseMatrix};
use crate::prox::{prox_frobenius, svt, MaskedQuadraticKernel};
use crate::solver::DcProblem;

use super::{check_lambda, frobenius_ball_indicator, CompletionModel, SamplingMask};

/// `min λ(‖X‖_* − ‖X‖_F) + ½‖𝒫_Ω(X − M)‖²` with kernel `ψ(X) = ½⟨X, (μI − 𝒫_Ωᵀ𝒫_Ω)X⟩`.
///
/// The kernel cancels the data term's curvature, so the x-update is a single SVT. That only
/// works for `τ = 1`; other values are rejected.
#[derive(Debug, Clone)]
pub struct MatrixCompletionProblem {
    observed: DenseMatrix,
    mask: Arc<SamplingMask>,
    lambda: f64,
    kernel: MaskedQuadraticKernel,
}

impl MatrixCompletionProblem {
    /// Entries of `observed` outside the mask are ignored (zeroed).
    pub fn new(observed: DenseMatrix, mask: SamplingMask, lambda: f64, mu: f64) -> Result<Self> {
        if mask.dims()[2] != 1 {
            return Err(Error::ShapeMismatch {
                expected: observed.dims(),
                found: mask.dims(),
            });
        }
        mask.check(&observed)?;
        if mask.observed_count() == 0 {
            return Err(Error::EmptyMask);
        }
        check_lambda(lambda)?;
        let mask = Arc::new(mask);
        let kernel = MaskedQuadraticKernel::new(mu, mask.clone())?;
        let observed = mask.project(&observed);
        Ok(Self {
            observed,
            mask,
            lambda,
            kernel,
        })
    }

    pub fn mu(&self) -> f64 {
        self.kernel.mu()
    }

    fn residual(&self, x: &DenseMatrix) -> DenseMatrix {
        self.mask.project_diff(x, &self.observed)
    }
}

impl DcProblem for MatrixCompletionProblem {
    type Point = DenseMatrix;
    type Kernel = MaskedQuadraticKernel;

    fn f(&self, x: &DenseMatrix) -> Result<f64> {
        if self.lambda == 0.0 {
            return Ok(0.0);
        }
        Ok(self.lambda * nuclear_norm(x)?)
    }

    fn g(&self, x: &DenseMatrix) -> f64 {
        self.lambda * x.norm()
    }

    fn g_conjugate(&self, xi: &DenseMatrix) -> f64 {
        frobenius_ball_indicator(xi, self.lambda)
    }

    fn h_plus(&self, x: &DenseMatrix) -> f64 {
        self.mask.half_sq_residual(x, &self.observed)
    }

    fn h_minus(&self, _x: &DenseMatrix) -> f64 {
        0.0
    }

    fn grad_h_plus(&self, x: &DenseMatrix) -> DenseMatrix {
        self.residual(x)
    }

    fn grad_h_minus(&self, x: &DenseMatrix) -> DenseMatrix {
        x.zeros_like()
    }

    fn prox_beta_g(&self, a: &DenseMatrix, beta: f64) -> DenseMatrix {
        prox_frobenius(a, beta * self.lambda)
    }

    /// `svt(x̂ − (𝒫_Ω(x̂ − M) − u)/μ, λ/μ)`
    fn solve_x_subproblem(
        &self,
        u: &DenseMatrix,
        xhat: &DenseMatrix,
        tau: f64,
    ) -> Result<DenseMatrix> {
        self.check_tau(tau)?;
        self.check_point(u)?;
        self.check_point(xhat)?;
        let mu = self.mu();
        let mut a = self.residual(xhat);
        a.axpy(-1.0, u);
        let mut b = xhat.clone();
        b.axpy(-1.0 / mu, &a);
        svt(&b, self.lambda / mu)
    }

    fn kernel(&self) -> &MaskedQuadraticKernel {
        &self.kernel
    }

    fn lambda(&self) -> f64 {
        self.lambda
    }

    fn l_h_plus(&self) -> f64 {
        1.0
    }

    fn l_h_minus(&self) -> f64 {
        0.0
    }

    fn check_point(&self, x: &DenseMatrix) -> Result<()> {
        self.mask.check(x)
    }

    fn check_tau(&self, tau: f64) -> Result<()> {
        if (tau - 1.0).abs() <= 1e-12 {
            Ok(())
        } else {
            Err(Error::InvalidParameter(
                "matrix completion requires tau = 1",
            ))
        }
    }
}

impl CompletionModel for MatrixCompletionProblem {
    fn mask(&self) -> &SamplingMask {
        &self.mask
    }

    fn observed(&self) -> &DenseMatrix {
        &self.observed
    }

    fn shrink(&self, a: &DenseMatrix, kappa: f64) -> Result<DenseMatrix> {
        svt(a, kappa)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn full(m: &DenseMatrix) -> SamplingMask {
        SamplingMask::full(m.dims())
    }

    #[test]
    fn construction_checks() {
        let m = DenseMatrix::from_rows(&[&[1.0, 2.0], &[3.0, 4.0]]).unwrap();
        assert!(MatrixCompletionProblem::new(m.clone(), full(&m), -0.1, 1.1).is_err());
        assert!(MatrixCompletionProblem::new(m.clone(), full(&m), 0.5, 1.0).is_err());
        assert!(
            MatrixCompletionProblem::new(m.clone(), SamplingMask::full([2, 3, 1]), 0.5, 1.1)
                .is_err()
        );
        assert!(
            MatrixCompletionProblem::new(m.clone(), SamplingMask::none([2, 2, 1]), 0.5, 1.1)
                .is_err()
        );
        let p = MatrixCompletionProblem::new(m.clone(), full(&m), 0.5, 1.1).unwrap();
        assert!(p.check_tau(2.0).is_err());
        assert!(p.solve_x_subproblem(&m, &m, 2.0).is_err());
    }

    #[test]
    fn observed_is_projected() {
        let m = DenseMatrix::from_rows(&[&[1.0, 2.0], &[3.0, 4.0]]).unwrap();
        let mask = SamplingMask::new([2, 2, 1], vec![true, false, false, true]).unwrap();
        let p = MatrixCompletionProblem::new(m, mask, 0.5, 1.1).unwrap();
        assert_eq!(p.observed().data(), &[1.0, 0.0, 0.0, 4.0]);
    }

    #[test]
    fn objective_examples() {
        let z = DenseMatrix::zeros(3, 3);
        let p = MatrixCompletionProblem::new(z.clone(), full(&z), 0.5, 1.1).unwrap();
        assert_eq!(p.objective(&z).unwrap(), 0.0);
        let r1 = DenseMatrix::from_fn(3, 3, |i, j| (i as f64 + 1.0) * (2.0 - j as f64));
        let phi = p.objective(&r1).unwrap();
        assert!((phi - 0.5 * r1.norm_sqr()).abs() < 1e-10);
    }

    #[test]
    fn lambda_zero_full_is_gradient_step() {
        let m = DenseMatrix::from_rows(&[&[1.0, -2.0], &[0.5, 3.0]]).unwrap();
        let xhat = DenseMatrix::from_rows(&[&[0.0, 1.0], &[2.0, -1.0]]).unwrap();
        let p = MatrixCompletionProblem::new(m.clone(), full(&m), 0.0, 1.1).unwrap();
        let x = p
            .solve_x_subproblem(&xhat.zeros_like(), &xhat, 1.0)
            .unwrap();
        let mut expect = xhat.clone();
        expect.axpy(-1.0 / 1.1, &xhat.sub(&m));
        assert!(x.dist(&expect) < 1e-13);
    }

    #[test]
    fn xhat_at_data_gives_svt() {
        let m = DenseMatrix::from_rows(&[&[1.0, -2.0, 0.2], &[0.5, 3.0, 1.0]]).unwrap();
        let p = MatrixCompletionProblem::new(m.clone(), full(&m), 0.5, 1.1).unwrap();
        let x = p.solve_x_subproblem(&m.zeros_like(), &m, 1.0).unwrap();
        assert!(x.dist(&svt(&m, 0.5 / 1.1).unwrap()) < 1e-13);
    }
}
