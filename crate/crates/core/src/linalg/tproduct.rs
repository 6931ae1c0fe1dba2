//! t-product algebra on third-order tensors.
//!
//! Everything goes through the Fourier domain: after a DFT along the tubes, the t-product
//! becomes independent complex matrix products on the frontal slices. Spectra of real tensors
//! satisfy `X̄_{n3−k} = conj(X̄_k)`, so only slices `0..=n3/2` are factored; slices 0 and
//! `n3/2` (even `n3`) are real and use the real SVD so the factors stay real after the
//! inverse transform.

use alloc::vec::Vec;

use num_complex::Complex64;

use super::dft::{dft_tubes, idft_tubes};
use super::svd::{svd_factors, Scalar, SvdFactors};
use super::{ComplexTensor3, Tensor3};
use crate::error::{Error, Result};

pub(crate) enum SliceSvd {
    Real(SvdFactors<f64>),
    Complex(SvdFactors<Complex64>),
}

impl SliceSvd {
    pub fn sigma(&self) -> &[f64] {
        match self {
            SliceSvd::Real(f) => &f.sigma,
            SliceSvd::Complex(f) => &f.sigma,
        }
    }

    pub fn reconstruct_weighted(&self, w: &[f64]) -> Vec<Complex64> {
        match self {
            SliceSvd::Real(f) => f
                .reconstruct_weighted(w)
                .into_iter()
                .map(Complex64::from)
                .collect(),
            SliceSvd::Complex(f) => f.reconstruct_weighted(w),
        }
    }

    /// `(U, Vᴴ)` as row-major complex blocks (`m × r`, `r × n`).
    fn factors(&self) -> (usize, usize, usize, Vec<Complex64>, Vec<Complex64>) {
        fn unpack<S: Scalar + Into<Complex64>>(
            f: &SvdFactors<S>,
        ) -> (usize, usize, usize, Vec<Complex64>, Vec<Complex64>) {
            let (m, n, r) = (f.m, f.n, f.rank_dim());
            let mut u = Vec::with_capacity(m * r);
            for i in 0..m {
                for l in 0..r {
                    u.push(f.u[l * m + i].into());
                }
            }
            let mut vh = Vec::with_capacity(r * n);
            for l in 0..r {
                for j in 0..n {
                    vh.push(f.v[l * n + j].conj().into());
                }
            }
            (m, n, r, u, vh)
        }
        match self {
            SliceSvd::Real(f) => unpack(f),
            SliceSvd::Complex(f) => unpack(f),
        }
    }
}

fn is_self_conjugate(k: usize, n3: usize) -> bool {
    k == 0 || 2 * k == n3
}

/// SVDs of the independent Fourier slices `k = 0..=n3/2`.
pub(crate) fn fourier_svds(tbar: &ComplexTensor3, want_vectors: bool) -> Result<Vec<SliceSvd>> {
    let [n1, n2, n3] = tbar.dims();
    (0..=n3 / 2)
        .map(|k| {
            let slice = tbar.slice(k);
            if is_self_conjugate(k, n3) {
                let re: Vec<f64> = slice.iter().map(|z| z.re).collect();
                svd_factors(n1, n2, &re, want_vectors).map(SliceSvd::Real)
            } else {
                svd_factors(n1, n2, slice, want_vectors).map(SliceSvd::Complex)
            }
        })
        .collect()
}

/// Writes slice `k` and, when distinct, its conjugate partner `n3 − k`.
pub(crate) fn set_slice_pair(out: &mut ComplexTensor3, k: usize, values: &[Complex64]) {
    let n3 = out.dims()[2];
    out.slice_mut(k).copy_from_slice(values);
    if !is_self_conjugate(k, n3) {
        for (d, s) in out.slice_mut(n3 - k).iter_mut().zip(values) {
            *d = s.conj();
        }
    }
}

/// Singular values of every Fourier-domain frontal slice, `n3` rows of length `min(n1, n2)`.
pub fn fourier_singular_values(t: &Tensor3) -> Result<Vec<Vec<f64>>> {
    let n3 = t.n3();
    let svds = fourier_svds(&dft_tubes(t), false)?;
    Ok((0..n3)
        .map(|k| svds[k.min(n3 - k)].sigma().to_vec())
        .collect())
}

/// `‖X‖_TNN = (1/n3)·Σ_k Σ_i σ_i(X̄_k)`.
pub fn tensor_nuclear_norm(t: &Tensor3) -> Result<f64> {
    let sv = fourier_singular_values(t)?;
    Ok(sv.iter().flatten().sum::<f64>() / t.n3() as f64)
}

/// Identity for the t-product: first frontal slice `I`, the rest zero.
pub fn t_identity(n: usize, n3: usize) -> Tensor3 {
    Tensor3::from_fn(n, n, n3, |i, j, k| if k == 0 && i == j { 1.0 } else { 0.0 })
}

/// t-product `A * B` for `A: n1×n2×n3`, `B: n2×n4×n3`.
pub fn tprod(a: &Tensor3, b: &Tensor3) -> Result<Tensor3> {
    if a.n2() != b.n1() || a.n3() != b.n3() {
        return Err(Error::ShapeMismatch {
            expected: [a.n2(), b.n2(), a.n3()],
            found: [b.n1(), b.n2(), b.n3()],
        });
    }
    let (n1, n2, n4, n3) = (a.n1(), a.n2(), b.n2(), a.n3());
    let abar = dft_tubes(a);
    let bbar = dft_tubes(b);
    let mut cbar = ComplexTensor3::zeros(n1, n4, n3);
    for k in 0..=n3 / 2 {
        let sa = abar.slice(k);
        let sb = bbar.slice(k);
        let mut prod = alloc::vec![Complex64::new(0.0, 0.0); n1 * n4];
        for i in 0..n1 {
            for p in 0..n2 {
                let x = sa[i * n2 + p];
                for j in 0..n4 {
                    prod[i * n4 + j] += x * sb[p * n4 + j];
                }
            }
        }
        set_slice_pair(&mut cbar, k, &prod);
    }
    idft_tubes(&cbar)
}

/// Transposes every frontal slice, then reverses the order of slices `2..n3`.
pub fn conj_transpose(a: &Tensor3) -> Tensor3 {
    let n3 = a.n3();
    Tensor3::from_fn(a.n2(), a.n1(), n3, |i, j, k| {
        let src = if k == 0 { 0 } else { n3 - k };
        a.get(j, i, src)
    })
}

/// Tensor SVD `T = U * Γ * Vt` under the t-product.
#[derive(Debug, Clone)]
pub struct TSvd {
    /// `n1 × r × n3`
    pub u: Tensor3,
    /// `r × r × n3`, f-diagonal.
    pub gamma: Tensor3,
    /// `r × n2 × n3`
    pub vt: Tensor3,
}

impl TSvd {
    pub fn reconstruct(&self) -> Result<Tensor3> {
        tprod(&tprod(&self.u, &self.gamma)?, &self.vt)
    }
}

pub fn tsvd(t: &Tensor3) -> Result<TSvd> {
    let (n1, n2, n3) = (t.n1(), t.n2(), t.n3());
    let r = n1.min(n2);
    let svds = fourier_svds(&dft_tubes(t), true)?;
    let mut ubar = ComplexTensor3::zeros(n1, r, n3);
    let mut gbar = ComplexTensor3::zeros(r, r, n3);
    let mut vbar = ComplexTensor3::zeros(r, n2, n3);
    for (k, s) in svds.iter().enumerate() {
        let (_, _, _, u, vh) = s.factors();
        let mut g = alloc::vec![Complex64::new(0.0, 0.0); r * r];
        for (l, &sig) in s.sigma().iter().enumerate() {
            g[l * r + l] = Complex64::new(sig, 0.0);
        }
        set_slice_pair(&mut ubar, k, &u);
        set_slice_pair(&mut gbar, k, &g);
        set_slice_pair(&mut vbar, k, &vh);
    }
    Ok(TSvd {
        u: idft_tubes(&ubar)?,
        gamma: idft_tubes(&gbar)?,
        vt: idft_tubes(&vbar)?,
    })
}
