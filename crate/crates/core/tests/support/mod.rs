//! Independent reference computations for the integration tests.
//!
//! Low-rank proxes are checked against plain gradient descent on the factored objective
//!
//! ```text
//! κ/2 (‖L‖² + ‖R‖²) + q(L ∘ Rᵀ)
//! ```
//!
//! whose minimizers coincide with those of `κ‖X‖ + q(X)` for the nuclear norm (matrix
//! product) and the tensor nuclear norm (t-product). The t-product here is the circular
//! convolution of frontal slices, with no Fourier transform involved.
#![allow(dead_code)]

use ibpdca_core::data::RngState;
use ibpdca_core::{DenseMatrix, Tensor3};

/// Row-major `n1 × n2 × n3` real tensor, slice-major like `Tensor3`.
#[derive(Clone, Debug)]
pub struct T3 {
    pub n1: usize,
    pub n2: usize,
    pub n3: usize,
    pub v: Vec<f64>,
}

impl T3 {
    pub fn zeros(n1: usize, n2: usize, n3: usize) -> Self {
        Self {
            n1,
            n2,
            n3,
            v: vec![0.0; n1 * n2 * n3],
        }
    }

    pub fn random(n1: usize, n2: usize, n3: usize, scale: f64, rng: &mut RngState) -> Self {
        Self {
            n1,
            n2,
            n3,
            v: (0..n1 * n2 * n3).map(|_| scale * rng.normal()).collect(),
        }
    }

    fn at(&self, i: usize, j: usize, k: usize) -> f64 {
        self.v[(k * self.n1 + i) * self.n2 + j]
    }

    fn at_mut(&mut self, i: usize, j: usize, k: usize) -> &mut f64 {
        &mut self.v[(k * self.n1 + i) * self.n2 + j]
    }

    /// `(A * B)_{:,:,k} = Σ_j A_{:,:,(k−j) mod n3} B_{:,:,j}`
    pub fn tprod(&self, b: &T3) -> T3 {
        assert_eq!(self.n2, b.n1);
        assert_eq!(self.n3, b.n3);
        let n3 = self.n3;
        let mut out = T3::zeros(self.n1, b.n2, n3);
        for k in 0..n3 {
            for j in 0..n3 {
                let ka = (k + n3 - j) % n3;
                for i in 0..self.n1 {
                    for l in 0..self.n2 {
                        let a = self.at(i, l, ka);
                        for c in 0..b.n2 {
                            *out.at_mut(i, c, k) += a * b.at(l, c, j);
                        }
                    }
                }
            }
        }
        out
    }

    /// Transpose each slice and reverse slices `1..n3`.
    pub fn ttrans(&self) -> T3 {
        let n3 = self.n3;
        let mut out = T3::zeros(self.n2, self.n1, n3);
        for k in 0..n3 {
            let src = (n3 - k) % n3;
            for i in 0..self.n1 {
                for j in 0..self.n2 {
                    *out.at_mut(j, i, k) = self.at(i, j, src);
                }
            }
        }
        out
    }

    pub fn to_tensor(&self) -> Tensor3 {
        Tensor3::new(self.n1, self.n2, self.n3, self.v.clone()).unwrap()
    }

    pub fn from_tensor(t: &Tensor3) -> Self {
        Self {
            n1: t.n1(),
            n2: t.n2(),
            n3: t.n3(),
            v: t.data().to_vec(),
        }
    }

    pub fn from_matrix(m: &DenseMatrix) -> Self {
        Self {
            n1: m.rows(),
            n2: m.cols(),
            n3: 1,
            v: m.data().to_vec(),
        }
    }

    pub fn to_matrix(&self) -> DenseMatrix {
        assert_eq!(self.n3, 1);
        DenseMatrix::new(self.n1, self.n2, self.v.clone()).unwrap()
    }
}

fn sq(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum()
}

/// Minimizes `κ‖X‖_TNN + q(X)` over `n1 × n2 × n3` tensors, where `grad_q` is the gradient
/// of a smooth `q` with Lipschitz constant `lip`. Matrices are the case `n3 = 1`.
pub fn factored_minimize(
    n1: usize,
    n2: usize,
    n3: usize,
    kappa: f64,
    lip: f64,
    grad_q: impl Fn(&T3) -> T3,
    seed: u64,
) -> T3 {
    let k = n1.min(n2);
    let mut rng = RngState::new(seed);
    let mut l = T3::random(n1, k, n3, 0.5, &mut rng);
    let mut r = T3::random(n2, k, n3, 0.5, &mut rng);
    for _ in 0..2_000_000 {
        let x = l.tprod(&r.ttrans());
        let g = grad_q(&x);
        let mut gl = g.tprod(&r);
        let mut gr = g.ttrans().tprod(&l);
        gl.v.iter_mut().zip(&l.v).for_each(|(a, b)| *a += kappa * b);
        gr.v.iter_mut().zip(&r.v).for_each(|(a, b)| *a += kappa * b);
        let gmax = gl.v.iter().chain(&gr.v).fold(0.0f64, |m, x| m.max(x.abs()));
        if gmax < 1e-13 {
            break;
        }
        let step = 0.9 / (lip * (sq(&l.v) + sq(&r.v)) + kappa);
        l.v.iter_mut().zip(&gl.v).for_each(|(a, b)| *a -= step * b);
        r.v.iter_mut().zip(&gr.v).for_each(|(a, b)| *a -= step * b);
    }
    l.tprod(&r.ttrans())
}

/// Prox of `κ‖·‖_*` at `a` by the factored oracle.
pub fn svt_oracle(a: &DenseMatrix, kappa: f64, seed: u64) -> DenseMatrix {
    let at = T3::from_matrix(a);
    factored_minimize(a.rows(), a.cols(), 1, kappa, 1.0, |x| sub(x, &at), seed).to_matrix()
}

/// Prox of `κ‖·‖_TNN` at `a` by the factored oracle.
pub fn tensor_svt_oracle(a: &Tensor3, kappa: f64, seed: u64) -> Tensor3 {
    let at = T3::from_tensor(a);
    factored_minimize(a.n1(), a.n2(), a.n3(), kappa, 1.0, |x| sub(x, &at), seed).to_tensor()
}

pub fn sub(a: &T3, b: &T3) -> T3 {
    let mut out = a.clone();
    out.v.iter_mut().zip(&b.v).for_each(|(x, y)| *x -= y);
    out
}

pub fn random_matrix(m: usize, n: usize, rng: &mut RngState) -> DenseMatrix {
    DenseMatrix::from_fn(m, n, |_, _| rng.normal())
}

pub fn random_tensor(n1: usize, n2: usize, n3: usize, rng: &mut RngState) -> Tensor3 {
    Tensor3::from_fn(n1, n2, n3, |_, _, _| rng.normal())
}

pub fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}
