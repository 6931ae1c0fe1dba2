//! Proximal mappings, the conjugate prox via Moreau decomposition, and Bregman kernels.
//!
//! `prox_{tϑ}(a) = argmin_x tϑ(x) + ½‖x − a‖²`.

use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::error::Result;
use crate::linalg::tproduct::{fourier_svds, set_slice_pair};
use crate::linalg::{
    check_same_dims, dft_tubes, idft_tubes, svd_factors, Array, ComplexTensor3, DenseMatrix,
    Tensor3,
};
use crate::problems::SamplingMask;

/// Block soft-thresholding, the prox of `t‖·‖_F`: `(1 − t/‖a‖)₊ · a`.
pub fn prox_frobenius<T: Array>(a: &T, t: f64) -> T {
    assert!(t >= 0.0, "prox threshold must be nonnegative");
    let norm = a.norm();
    if norm <= t {
        a.zeros_like()
    } else {
        a.scaled(1.0 - t / norm)
    }
}

/// Euclidean projection onto `{z : ‖z‖_F ≤ radius}`.
pub fn project_frobenius_ball<T: Array>(v: &T, radius: f64) -> T {
    let norm = v.norm();
    if norm <= radius {
        v.clone()
    } else {
        v.scaled(radius / norm)
    }
}

/// Singular value thresholding `U·diag((σ − κ)₊)·Vᵀ`, the prox of `κ‖·‖_*`.
pub fn svt(a: &DenseMatrix, kappa: f64) -> Result<DenseMatrix> {
    assert!(kappa >= 0.0, "svt threshold must be nonnegative");
    let f = svd_factors(a.rows(), a.cols(), a.data(), true)?;
    let shrunk: Vec<f64> = f.sigma.iter().map(|s| (s - kappa).max(0.0)).collect();
    DenseMatrix::new(a.rows(), a.cols(), f.reconstruct_weighted(&shrunk))
}

/// Fourier-domain singular value shrinkage: every slice of `T̄` is thresholded by the same
/// `κ`, which makes this the prox of `κ‖·‖_TNN`.
pub fn tensor_svt(t: &Tensor3, kappa: f64) -> Result<Tensor3> {
    assert!(kappa >= 0.0, "svt threshold must be nonnegative");
    let tbar = dft_tubes(t);
    let svds = fourier_svds(&tbar, true)?;
    let mut out = ComplexTensor3::zeros(t.n1(), t.n2(), t.n3());
    for (k, s) in svds.iter().enumerate() {
        let shrunk: Vec<f64> = s.sigma().iter().map(|x| (x - kappa).max(0.0)).collect();
        set_slice_pair(&mut out, k, &s.reconstruct_weighted(&shrunk));
    }
    idft_tubes(&out)
}

/// `prox_{(1/β)g*}(ξ + x̂/β)` evaluated through the prox of `βg` only:
///
/// ```text
/// ξ + x̂/β − (1/β)·prox_{βg}(βξ + x̂)
/// ```
///
/// `prox_scaled_g(a, β)` must return `prox_{βg}(a)`. This is the unique minimizer of
/// `g*(ξ) − ⟨x̂, ξ⟩ + (β/2)‖ξ − ξ_prev‖²`.
pub fn prox_conjugate<T: Array>(
    prox_scaled_g: impl Fn(&T, f64) -> T,
    xi: &T,
    xhat: &T,
    beta: f64,
) -> T {
    assert!(beta > 0.0, "beta must be positive");
    let mut v = xi.scaled(beta);
    v.axpy(1.0, xhat);
    let p = prox_scaled_g(&v, beta);
    v.sub(&p).scaled(1.0 / beta)
}

/// Strongly convex kernel `ψ` with Lipschitz gradient.
pub trait BregmanKernel<T> {
    fn value(&self, x: &T) -> f64;
    fn gradient(&self, x: &T) -> T;
    /// Strong convexity modulus.
    fn rho(&self) -> f64;
    /// Gradient Lipschitz modulus.
    fn l_psi(&self) -> f64;
}

/// `ψ(x) = (scale/2)‖x‖²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EuclideanKernel {
    pub scale: f64,
}

impl<T: Array> BregmanKernel<T> for EuclideanKernel {
    fn value(&self, x: &T) -> f64 {
        0.5 * self.scale * x.norm_sqr()
    }
    fn gradient(&self, x: &T) -> T {
        x.scaled(self.scale)
    }
    fn rho(&self) -> f64 {
        self.scale
    }
    fn l_psi(&self) -> f64 {
        self.scale
    }
}

/// `ψ(x) = ½⟨x, (μI − 𝒫_Ωᵀ𝒫_Ω)x⟩`. Its Hessian has eigenvalue `μ` on unobserved entries and
/// `μ − 1` on observed ones.
#[derive(Debug, Clone)]
pub struct MaskedQuadraticKernel {
    mu: f64,
    mask: Arc<SamplingMask>,
}

impl MaskedQuadraticKernel {
    /// `mu` must exceed 1 for the kernel to be strongly convex.
    pub fn new(mu: f64, mask: Arc<SamplingMask>) -> Result<Self> {
        if !(mu > 1.0) || !mu.is_finite() {
            return Err(crate::Error::InvalidParameter("kernel mu must exceed 1"));
        }
        Ok(Self { mu, mask })
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn mask(&self) -> &SamplingMask {
        &self.mask
    }
}

impl<T: Array> BregmanKernel<T> for MaskedQuadraticKernel {
    fn value(&self, x: &T) -> f64 {
        let observed: f64 = x
            .values()
            .iter()
            .zip(self.mask.observed())
            .filter(|(_, &o)| o)
            .map(|(v, _)| v * v)
            .sum();
        0.5 * (self.mu * x.norm_sqr() - observed)
    }

    fn gradient(&self, x: &T) -> T {
        let mut g = x.scaled(self.mu);
        for ((gi, xi), &o) in g
            .values_mut()
            .iter_mut()
            .zip(x.values())
            .zip(self.mask.observed())
        {
            if o {
                *gi -= xi;
            }
        }
        g
    }

    fn rho(&self) -> f64 {
        self.mu - 1.0
    }

    fn l_psi(&self) -> f64 {
        self.mu
    }
}

/// `ℬ_ψ(x, y) = ψ(x) − ψ(y) − ⟨∇ψ(y), x − y⟩`.
pub fn bregman_distance<T: Array, K: BregmanKernel<T> + ?Sized>(
    psi: &K,
    x: &T,
    y: &T,
) -> Result<f64> {
    check_same_dims(x, y)?;
    let d = psi.value(x) - psi.value(y) - psi.gradient(y).dot(&x.sub(y));
    // Rounding can push a zero distance slightly negative.
    Ok(d.max(0.0))
}
