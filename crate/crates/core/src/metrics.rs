//! Recovery quality measures.

use crate::error::{Error, Result};
use crate::linalg::{fourier_singular_values, singular_values, Array, DenseMatrix, Tensor3};
use crate::math;
use crate::problems::SamplingMask;

/// Singular values at or below this fraction of the largest count as zero.
pub const RANK_CUTOFF: f64 = 1e-6;

/// `‖X* − X_true‖ / ‖X_true‖`
pub fn rse<T: Array>(x_star: &T, x_true: &T) -> Result<f64> {
    crate::linalg::check_same_dims(x_star, x_true)?;
    let d = x_true.norm();
    if d == 0.0 {
        return Err(Error::ZeroGroundTruth);
    }
    Ok(x_star.dist(x_true) / d)
}

/// `10 log₁₀(max(X_true)² · #Ω^C / ‖X* − X_true‖²)`, with the error over the whole array.
/// Returns `+∞` when the error is zero.
pub fn psnr<T: Array>(x_star: &T, x_true: &T, mask: &SamplingMask) -> Result<f64> {
    crate::linalg::check_same_dims(x_star, x_true)?;
    mask.check(x_true)?;
    let holes = mask.complement_count();
    if holes == 0 {
        return Err(Error::EmptyComplement);
    }
    let err = x_star.sub(x_true).norm_sqr();
    if err == 0.0 {
        return Ok(f64::INFINITY);
    }
    let peak = x_true
        .values()
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(10.0 * math::log10(peak * peak * holes as f64 / err))
}

fn count_above(values: impl Iterator<Item = f64> + Clone) -> usize {
    let top = values.clone().fold(0.0, f64::max);
    if top == 0.0 {
        return 0;
    }
    values.filter(|&s| s > RANK_CUTOFF * top).count()
}

/// Number of singular values above `RANK_CUTOFF · σ_max`.
pub fn matrix_rank(x: &DenseMatrix) -> Result<usize> {
    Ok(count_above(singular_values(x)?.into_iter()))
}

/// Number of indices `i` whose largest Fourier-slice singular value `max_k σ_i(X̄_k)` exceeds
/// `RANK_CUTOFF` times the global maximum.
pub fn tubal_rank(x: &Tensor3) -> Result<usize> {
    let sv = fourier_singular_values(x)?;
    let r = x.n1().min(x.n2());
    let tube_max = (0..r).map(|i| sv.iter().map(|s| s[i]).fold(0.0, f64::max));
    Ok(count_above(tube_max))
}

/// One result row.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Metrics {
    pub rse: f64,
    pub psnr: Option<f64>,
    /// Matrix rank or tubal rank.
    pub rank: usize,
    pub iters: usize,
    pub wall_seconds: f64,
}
