//! One-sided (Hestenes) Jacobi SVD.
//!
//! Columns of a working copy `B = A·V` are rotated pairwise until they are mutually
//! orthogonal; then `σ_j = ‖b_j‖`, `u_j = b_j / σ_j`. The same kernel handles real matrices
//! and the complex Fourier-domain slices used by the t-SVD: for a pair with inner product
//! `γ = b_pᴴ b_q`, column `q` is first multiplied by the unit phase `conj(γ/|γ|)`, which makes
//! the problem real, and then a real rotation is applied.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;
use crate::math;

const MAX_SWEEPS: usize = 60;

pub(crate) trait Scalar:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + PartialEq
{
    fn zero() -> Self;
    fn from_real(x: f64) -> Self;
    fn conj(self) -> Self;
    fn abs_sqr(self) -> f64;
    fn scale(self, s: f64) -> Self;
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn from_real(x: f64) -> Self {
        x
    }
    fn conj(self) -> Self {
        self
    }
    fn abs_sqr(self) -> f64 {
        self * self
    }
    fn scale(self, s: f64) -> Self {
        self * s
    }
}

impl Scalar for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn from_real(x: f64) -> Self {
        Complex64::new(x, 0.0)
    }
    fn conj(self) -> Self {
        Complex64::new(self.re, -self.im)
    }
    fn abs_sqr(self) -> f64 {
        self.re * self.re + self.im * self.im
    }
    fn scale(self, s: f64) -> Self {
        Complex64::new(self.re * s, self.im * s)
    }
}

/// Thin factors `A = U·diag(σ)·Vᴴ` with `U` (m×r) and `V` (n×r) column-major, `r = min(m, n)`.
pub(crate) struct SvdFactors<S> {
    pub m: usize,
    pub n: usize,
    pub u: Vec<S>,
    pub sigma: Vec<f64>,
    pub v: Vec<S>,
}

impl<S: Scalar> SvdFactors<S> {
    pub fn rank_dim(&self) -> usize {
        self.sigma.len()
    }

    /// Row-major `U·diag(weights)·Vᴴ`; terms with zero weight are skipped.
    pub fn reconstruct_weighted(&self, weights: &[f64]) -> Vec<S> {
        let (m, n) = (self.m, self.n);
        let mut out = vec![S::zero(); m * n];
        for (l, &w) in weights.iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            let u = &self.u[l * m..(l + 1) * m];
            let v = &self.v[l * n..(l + 1) * n];
            let vc: Vec<S> = v.iter().map(|x| x.conj().scale(w)).collect();
            for i in 0..m {
                let ui = u[i];
                if ui == S::zero() {
                    continue;
                }
                let row = &mut out[i * n..(i + 1) * n];
                for (o, &vj) in row.iter_mut().zip(&vc) {
                    *o = *o + ui * vj;
                }
            }
        }
        out
    }
}

/// Thin SVD of a row-major `m × n` matrix.
///
/// With `want_vectors == false` only `sigma` is meaningful; `u` and `v` are left empty.
pub(crate) fn svd_factors<S: Scalar>(
    m: usize,
    n: usize,
    a: &[S],
    want_vectors: bool,
) -> Result<SvdFactors<S>> {
    debug_assert_eq!(a.len(), m * n);
    if m >= n {
        // Column-major copy of A.
        let mut b = vec![S::zero(); m * n];
        for i in 0..m {
            for j in 0..n {
                b[j * m + i] = a[i * n + j];
            }
        }
        let (u, sigma, v) = jacobi(m, n, b, want_vectors)?;
        Ok(SvdFactors { m, n, u, sigma, v })
    } else {
        // Work on Aᴴ (n × m, tall): Aᴴ = U'ΣV'ᴴ gives A = V'ΣU'ᴴ.
        let mut b = vec![S::zero(); m * n];
        for i in 0..m {
            for j in 0..n {
                // column i of Aᴴ has entries conj(A[i][j]) for j = 0..n
                b[i * n + j] = a[i * n + j].conj();
            }
        }
        let (u, sigma, v) = jacobi(n, m, b, want_vectors)?;
        Ok(SvdFactors {
            m,
            n,
            u: v,
            sigma,
            v: u,
        })
    }
}

type JacobiOut<S> = (Vec<S>, Vec<f64>, Vec<S>);

/// Runs sweeps on the column-major `m × n` (`m ≥ n`) matrix `b` and returns sorted thin factors.
fn jacobi<S: Scalar>(
    m: usize,
    n: usize,
    mut b: Vec<S>,
    want_vectors: bool,
) -> Result<JacobiOut<S>> {
    let mut v = if want_vectors {
        let mut v = vec![S::zero(); n * n];
        for j in 0..n {
            v[j * n + j] = S::from_real(1.0);
        }
        v
    } else {
        Vec::new()
    };
    let tol = (m as f64) * f64::EPSILON;
    let mut norms = vec![0.0; n];
    let mut converged = n < 2;
    for _ in 0..MAX_SWEEPS {
        if converged {
            break;
        }
        for (j, nj) in norms.iter_mut().enumerate() {
            *nj = b[j * m..(j + 1) * m].iter().map(|x| x.abs_sqr()).sum();
        }
        let mut rotated = false;
        for p in 0..n - 1 {
            for q in p + 1..n {
                let alpha = norms[p];
                let beta = norms[q];
                if alpha == 0.0 || beta == 0.0 {
                    continue;
                }
                let (head, tail) = b.split_at_mut(q * m);
                let bp = &mut head[p * m..(p + 1) * m];
                let bq = &mut tail[..m];
                let mut gamma = S::zero();
                for (x, y) in bp.iter().zip(bq.iter()) {
                    gamma = gamma + x.conj() * *y;
                }
                let g = math::sqrt(gamma.abs_sqr());
                if g <= tol * math::sqrt(alpha) * math::sqrt(beta) {
                    continue;
                }
                rotated = true;
                let phase = gamma.scale(1.0 / g).conj();
                let zeta = (beta - alpha) / (2.0 * g);
                let t = if zeta >= 0.0 {
                    1.0 / (zeta + math::sqrt(1.0 + zeta * zeta))
                } else {
                    -1.0 / (-zeta + math::sqrt(1.0 + zeta * zeta))
                };
                let c = 1.0 / math::sqrt(1.0 + t * t);
                let s = c * t;
                rotate(bp, bq, phase, c, s);
                if want_vectors {
                    let (vh, vt) = v.split_at_mut(q * n);
                    rotate(&mut vh[p * n..(p + 1) * n], &mut vt[..n], phase, c, s);
                }
                // The cached update cancels badly once a column shrinks towards rounding
                // level, so recompute from the data whenever a norm drops sharply.
                norms[p] = alpha - t * g;
                if !(norms[p] > 0.5 * alpha) {
                    norms[p] = b[p * m..(p + 1) * m].iter().map(|x| x.abs_sqr()).sum();
                }
                norms[q] = beta + t * g;
                if !(norms[q] > 0.5 * beta) {
                    norms[q] = b[q * m..(q + 1) * m].iter().map(|x| x.abs_sqr()).sum();
                }
            }
        }
        if !rotated {
            converged = true;
        }
    }
    if !converged {
        return Err(Error::SvdNoConvergence { sweeps: MAX_SWEEPS });
    }

    let col_norms: Vec<f64> = (0..n)
        .map(|j| math::sqrt(b[j * m..(j + 1) * m].iter().map(|x| x.abs_sqr()).sum()))
        .collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| col_norms[j].total_cmp(&col_norms[i]));
    let sigma: Vec<f64> = order.iter().map(|&j| col_norms[j]).collect();
    if !want_vectors {
        return Ok((Vec::new(), sigma, Vec::new()));
    }

    let mut u = vec![S::zero(); m * n];
    let mut vs = vec![S::zero(); n * n];
    let mut missing = Vec::new();
    for (dst, &src) in order.iter().enumerate() {
        vs[dst * n..(dst + 1) * n].copy_from_slice(&v[src * n..(src + 1) * n]);
        let s = col_norms[src];
        if s > f64::MIN_POSITIVE {
            let inv = 1.0 / s;
            for i in 0..m {
                u[dst * m + i] = b[src * m + i].scale(inv);
            }
        } else {
            missing.push(dst);
        }
    }
    complete_orthonormal(m, &mut u, &missing);
    Ok((u, sigma, vs))
}

#[inline]
fn rotate<S: Scalar>(xp: &mut [S], xq: &mut [S], phase: S, c: f64, s: f64) {
    for (x, y) in xp.iter_mut().zip(xq.iter_mut()) {
        let a = *x;
        let b = phase * *y;
        *x = a.scale(c) - b.scale(s);
        *y = a.scale(s) + b.scale(c);
    }
}

/// Fills the listed columns of `u` (column-major, m rows) with unit vectors orthogonal to
/// every other column, by Gram–Schmidt on the canonical basis.
fn complete_orthonormal<S: Scalar>(m: usize, u: &mut [S], missing: &[usize]) {
    if missing.is_empty() {
        return;
    }
    let ncols = u.len() / m;
    let mut filled: Vec<bool> = (0..ncols).map(|j| !missing.contains(&j)).collect();
    let mut candidate = 0usize;
    for &col in missing {
        while candidate < m {
            let mut w = vec![S::zero(); m];
            w[candidate] = S::from_real(1.0);
            candidate += 1;
            // two passes of modified Gram–Schmidt
            for _ in 0..2 {
                for (j, ok) in filled.iter().enumerate() {
                    if !ok {
                        continue;
                    }
                    let uj = &u[j * m..(j + 1) * m];
                    let mut proj = S::zero();
                    for (a, b) in uj.iter().zip(&w) {
                        proj = proj + a.conj() * *b;
                    }
                    for (wi, a) in w.iter_mut().zip(uj) {
                        *wi = *wi - *a * proj;
                    }
                }
            }
            let norm = math::sqrt(w.iter().map(|x| x.abs_sqr()).sum());
            if norm > 1e-8 {
                for (dst, x) in u[col * m..(col + 1) * m].iter_mut().zip(&w) {
                    *dst = x.scale(1.0 / norm);
                }
                filled[col] = true;
                break;
            }
        }
    }
}

/// Reduced singular value decomposition `A = U·diag(σ)·Vt`.
#[derive(Debug, Clone)]
pub struct SvdResult {
    /// `m × r`, orthonormal columns.
    pub u: DenseMatrix,
    /// Nonincreasing, length `r = min(m, n)`.
    pub sigma: Vec<f64>,
    /// `r × n`, orthonormal rows.
    pub vt: DenseMatrix,
}

impl SvdResult {
    pub fn reconstruct(&self) -> DenseMatrix {
        let (m, n, r) = (self.u.rows(), self.vt.cols(), self.sigma.len());
        DenseMatrix::from_fn(m, n, |i, j| {
            (0..r)
                .map(|l| self.u.get(i, l) * self.sigma[l] * self.vt.get(l, j))
                .sum()
        })
    }
}

/// Reduced SVD of a real matrix via one-sided Jacobi.
pub fn svd(a: &DenseMatrix) -> Result<SvdResult> {
    let f = svd_factors(a.rows(), a.cols(), a.data(), true)?;
    let (m, n, r) = (f.m, f.n, f.rank_dim());
    let u = DenseMatrix::from_fn(m, r, |i, l| f.u[l * m + i]);
    let vt = DenseMatrix::from_fn(r, n, |l, j| f.v[l * n + j]);
    Ok(SvdResult {
        u,
        sigma: f.sigma,
        vt,
    })
}

/// Singular values only (skips accumulating the right factor).
pub fn singular_values(a: &DenseMatrix) -> Result<Vec<f64>> {
    Ok(svd_factors(a.rows(), a.cols(), a.data(), false)?.sigma)
}

pub fn nuclear_norm(a: &DenseMatrix) -> Result<f64> {
    Ok(singular_values(a)?.iter().sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Array;

    fn lcg(seed: &mut u64) -> f64 {
        *seed = seed
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        ((*seed >> 11) as f64) / ((1u64 << 53) as f64) * 2.0 - 1.0
    }

    fn gram_defect(q: &DenseMatrix, columns: bool) -> f64 {
        let g = if columns {
            q.transpose().matmul(q).unwrap()
        } else {
            q.matmul(&q.transpose()).unwrap()
        };
        g.dist(&DenseMatrix::identity(g.rows()))
    }

    #[test]
    fn identity_and_diagonal() {
        let s = svd(&DenseMatrix::identity(2)).unwrap();
        assert_eq!(s.sigma.len(), 2);
        assert!((s.sigma[0] - 1.0).abs() < 1e-15 && (s.sigma[1] - 1.0).abs() < 1e-15);

        let d = DenseMatrix::from_diag(2, 2, &[3.0, 1.0]);
        let s = svd(&d).unwrap();
        assert!((s.sigma[0] - 3.0).abs() < 1e-15 && (s.sigma[1] - 1.0).abs() < 1e-15);

        // Unsorted diagonal comes back sorted.
        let d = DenseMatrix::from_diag(3, 3, &[1.0, 5.0, 2.0]);
        assert_eq!(singular_values(&d).unwrap(), vec![5.0, 2.0, 1.0]);
    }

    #[test]
    fn rank_deficient_gets_orthonormal_completion() {
        let a = DenseMatrix::from_rows(&[&[0.0, 2.0], &[0.0, 0.0]]).unwrap();
        let s = svd(&a).unwrap();
        assert!((s.sigma[0] - 2.0).abs() < 1e-15);
        assert_eq!(s.sigma[1], 0.0);
        assert!(gram_defect(&s.u, true) < 1e-12);
        assert!(gram_defect(&s.vt, false) < 1e-12);
        assert!(s.reconstruct().dist(&a) < 1e-14);

        let z = DenseMatrix::zeros(3, 2);
        let s = svd(&z).unwrap();
        assert_eq!(s.sigma, vec![0.0, 0.0]);
        assert!(gram_defect(&s.u, true) < 1e-12);
    }

    #[test]
    fn random_matrices_meet_contract() {
        let mut seed = 11u64;
        for trial in 0..120 {
            let m = 1 + trial % 20;
            let n = 1 + (trial * 7) % 20;
            let a = DenseMatrix::from_fn(m, n, |_, _| lcg(&mut seed));
            let s = svd(&a).unwrap();
            assert_eq!(s.sigma.len(), m.min(n));
            assert!(s.sigma.windows(2).all(|w| w[0] >= w[1]));
            assert!(s.sigma.iter().all(|&x| x >= 0.0));
            let err = s.reconstruct().dist(&a);
            assert!(err <= 1e-10 * a.norm().max(1.0), "{m}x{n}: {err}");
            assert!(gram_defect(&s.u, true) <= 1e-10);
            assert!(gram_defect(&s.vt, false) <= 1e-10);
        }
    }

    #[test]
    fn complex_factors_reconstruct() {
        let mut seed = 5u64;
        for (m, n) in [(4, 3), (3, 5), (6, 6)] {
            let a: Vec<Complex64> = (0..m * n)
                .map(|_| Complex64::new(lcg(&mut seed), lcg(&mut seed)))
                .collect();
            let f = svd_factors(m, n, &a, true).unwrap();
            let r = f.reconstruct_weighted(&f.sigma);
            let err: f64 = r
                .iter()
                .zip(&a)
                .map(|(x, y)| (*x - *y).norm_sqr())
                .sum::<f64>()
                .sqrt();
            assert!(err < 1e-12, "{m}x{n}: {err}");
            // Uᴴ U = I
            let k = f.rank_dim();
            for p in 0..k {
                for q in 0..k {
                    let mut dot = Complex64::new(0.0, 0.0);
                    for i in 0..m {
                        dot += f.u[p * m + i].conj() * f.u[q * m + i];
                    }
                    let want = if p == q { 1.0 } else { 0.0 };
                    assert!((dot - Complex64::new(want, 0.0)).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn converges_on_near_low_rank_input() {
        // Rank-2 products plus rounding-level noise drive most columns to ~1e-16, which
        // used to stall the sweep through cancellation in the cached norms.
        let mut seed = 99u64;
        for trial in 0..200 {
            let n = 6 + trial % 7;
            let u = DenseMatrix::from_fn(n, 2, |_, _| lcg(&mut seed));
            let v = DenseMatrix::from_fn(2, n, |_, _| lcg(&mut seed));
            let mut a = u.matmul(&v).unwrap();
            let noise = [0.0, 1e-17, 1e-15][trial % 3];
            for i in 0..n {
                for j in 0..n {
                    a.set(i, j, a.get(i, j) + noise * lcg(&mut seed));
                }
            }
            let r = svd(&a).unwrap();
            assert!(r.reconstruct().dist(&a) < 1e-13 * (1.0 + a.norm()));
            assert!(r.sigma[2] < 1e-12 * r.sigma[0]);
        }
    }
}
