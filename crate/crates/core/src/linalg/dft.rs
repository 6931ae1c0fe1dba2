//! Direct DFT along the third mode. `n3` is small in every use here, so the O(n3²) transform
//! applied slice-wise is simpler than an FFT and just as fast.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{ComplexTensor3, Tensor3};
use crate::math;

/// Imaginary parts above this (relative to the fiber's largest modulus, floored at 1) are an error.
const IMAG_TOL: f64 = 1e-9;

/// `w[p] = exp(sign·2πi·p/n)` for `p = 0..n`.
fn twiddles(n: usize, sign: f64) -> Vec<Complex64> {
    (0..n)
        .map(|p| {
            let (s, c) = math::sin_cos(sign * 2.0 * PI * (p as f64) / (n as f64));
            Complex64::new(c, s)
        })
        .collect()
}

/// Unnormalized forward DFT of every mode-3 fiber.
pub fn dft_tubes(t: &Tensor3) -> ComplexTensor3 {
    let (n1, n2, n3) = (t.n1(), t.n2(), t.n3());
    let len = n1 * n2;
    let w = twiddles(n3, -1.0);
    let mut out = ComplexTensor3::zeros(n1, n2, n3);
    for kk in 0..n3 {
        let dst = out.slice_mut(kk);
        for k in 0..n3 {
            let wk = w[(k * kk) % n3];
            let src = &t.data()[k * len..(k + 1) * len];
            for (d, &s) in dst.iter_mut().zip(src) {
                *d += wk * s;
            }
        }
    }
    out
}

/// Inverse DFT with `1/n3` normalization. Fails when the spectrum is not that of a real tensor.
pub fn idft_tubes(tbar: &ComplexTensor3) -> Result<Tensor3> {
    let [n1, n2, n3] = tbar.dims();
    let len = n1 * n2;
    let w = twiddles(n3, 1.0);
    let mut acc = alloc::vec![Complex64::new(0.0, 0.0); len * n3];
    for k in 0..n3 {
        let dst = &mut acc[k * len..(k + 1) * len];
        for kk in 0..n3 {
            let wk = w[(k * kk) % n3];
            for (d, &s) in dst.iter_mut().zip(tbar.slice(kk)) {
                *d += wk * s;
            }
        }
    }
    let inv = 1.0 / n3 as f64;
    // Scale per fiber so large-magnitude tensors do not trip the symmetry check on rounding.
    let mut fiber_scale = alloc::vec![1.0f64; len];
    for k in 0..n3 {
        for (s, z) in fiber_scale.iter_mut().zip(tbar.slice(k)) {
            *s = s.max(math::hypot(z.re, z.im) * inv);
        }
    }
    let mut data = Vec::with_capacity(len * n3);
    let mut worst = 0.0f64;
    for k in 0..n3 {
        for (idx, z) in acc[k * len..(k + 1) * len].iter().enumerate() {
            let re = z.re * inv;
            let im = (z.im * inv).abs() / fiber_scale[idx];
            worst = worst.max(im);
            data.push(re);
        }
    }
    if worst > IMAG_TOL || !worst.is_finite() {
        return Err(Error::SymmetryViolation { residual: worst });
    }
    Tensor3::new(n1, n2, n3, data)
}
