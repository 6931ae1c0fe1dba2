//! Matrix and tensor completion models with the DC penalty `λ(‖·‖_low-rank − ‖·‖_F)`.

mod mask;
mod matrix;
mod tensor;

pub use mask::SamplingMask;
pub use matrix::MatrixCompletionProblem;
pub use tensor::TensorCompletionProblem;

use crate::error::Result;
use crate::linalg::Array;
use crate::solver::DcProblem;

/// What the ADMM-DCA baseline needs beyond [`DcProblem`]: data fit `½‖𝒫_Ω(x − M)‖²` and the
/// prox of the low-rank penalty.
pub trait CompletionModel: DcProblem {
    fn mask(&self) -> &SamplingMask;
    /// `M` with zeros off Ω.
    fn observed(&self) -> &Self::Point;
    /// `prox` of `κ` times the unweighted low-rank norm.
    fn shrink(&self, a: &Self::Point, kappa: f64) -> Result<Self::Point>;
}

pub(crate) fn check_lambda(lambda: f64) -> Result<()> {
    if lambda >= 0.0 && lambda.is_finite() {
        Ok(())
    } else {
        Err(crate::Error::InvalidParameter("lambda must be nonnegative"))
    }
}

/// `g*` for `g = λ‖·‖_F`: the indicator of the λ-ball, with a little relative slack.
pub(crate) fn frobenius_ball_indicator<T: Array>(xi: &T, lambda: f64) -> f64 {
    if xi.norm() <= lambda * (1.0 + 1e-9) {
        0.0
    } else {
        f64::INFINITY
    }
}
