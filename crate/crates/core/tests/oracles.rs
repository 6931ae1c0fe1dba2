mod support;

use ibpdca_core::admm::{admm_dca_run, AdmmConfig};
use ibpdca_core::data::{gen_matrix_instance, gen_tensor_instance, RngState};
use ibpdca_core::linalg::{
    dft_tubes, idft_tubes, nuclear_norm, singular_values, tensor_nuclear_norm, tprod,
};
use ibpdca_core::metrics::{matrix_rank, psnr, rse, tubal_rank};
use ibpdca_core::problems::{
    CompletionModel, MatrixCompletionProblem, SamplingMask, TensorCompletionProblem,
};
use ibpdca_core::prox::{
    bregman_distance, project_frobenius_ball, prox_conjugate, prox_frobenius, svt, tensor_svt,
    BregmanKernel,
};
use ibpdca_core::solver::DcProblem;
use ibpdca_core::{Array, DenseMatrix, Tensor3};
use support::*;

fn random_mask(dims: [usize; 3], rng: &mut RngState) -> SamplingMask {
    loop {
        let obs = (0..dims[0] * dims[1] * dims[2])
            .map(|_| rng.uniform() < 0.6)
            .collect();
        if let Ok(m) = SamplingMask::new(dims, obs) {
            return m;
        }
    }
}

fn mask_t3(mask: &SamplingMask, x: &T3) -> T3 {
    let mut out = x.clone();
    out.v.iter_mut().zip(mask.observed()).for_each(|(v, &o)| {
        if !o {
            *v = 0.0
        }
    });
    out
}

#[test]
fn svt_matches_factored_oracle() {
    let mut rng = RngState::new(1);
    for trial in 0..20 {
        let m = 1 + trial % 3;
        let n = 1 + (trial / 3) % 3;
        let a = random_matrix(m, n, &mut rng);
        let kappa = 0.1 + 1.5 * rng.uniform();
        let got = svt(&a, kappa).unwrap();
        let want = svt_oracle(&a, kappa, trial as u64);
        assert!(got.dist(&want) < 1e-6, "trial {trial}: {}", got.dist(&want));
    }
}

#[test]
fn tensor_svt_matches_factored_oracle() {
    let mut rng = RngState::new(2);
    for trial in 0..12 {
        let n3 = 1 + trial % 3;
        let a = random_tensor(2 + trial % 2, 3, n3, &mut rng);
        let kappa = 0.1 + 1.5 * rng.uniform();
        let got = tensor_svt(&a, kappa).unwrap();
        let want = tensor_svt_oracle(&a, kappa, trial as u64);
        assert!(got.dist(&want) < 1e-6, "trial {trial}: {}", got.dist(&want));
    }
}

#[test]
fn tprod_matches_circular_convolution() {
    let mut rng = RngState::new(3);
    for n3 in 1..5 {
        let a = random_tensor(3, 2, n3, &mut rng);
        let b = random_tensor(2, 4, n3, &mut rng);
        let got = tprod(&a, &b).unwrap();
        let want = T3::from_tensor(&a).tprod(&T3::from_tensor(&b)).to_tensor();
        assert!(got.dist(&want) < 1e-12);
    }
}

#[test]
fn dft_matches_direct_sum() {
    let mut rng = RngState::new(4);
    let t = random_tensor(2, 3, 5, &mut rng);
    let f = dft_tubes(&t);
    for i in 0..2 {
        for j in 0..3 {
            for k in 0..5 {
                let (mut re, mut im) = (0.0, 0.0);
                for m in 0..5 {
                    let ang = -2.0 * std::f64::consts::PI * (k * m) as f64 / 5.0;
                    re += t.get(i, j, m) * ang.cos();
                    im += t.get(i, j, m) * ang.sin();
                }
                let z = f.get(i, j, k);
                assert!((z.re - re).abs() < 1e-12 && (z.im - im).abs() < 1e-12);
            }
        }
    }
    assert!(idft_tubes(&f).unwrap().dist(&t) < 1e-13);
}

#[test]
fn tnn_of_f_diagonal_tensor() {
    // Fourier-domain diagonals d_k with d_k = d_{n3-k}; the real tensor follows from the
    // inverse transform, which for symmetric real spectra is a cosine sum.
    let n3 = 4;
    let d = [[3.0, 1.0], [2.0, -0.5], [0.5, 0.25], [2.0, -0.5]];
    let t = Tensor3::from_fn(2, 2, n3, |i, j, k| {
        if i != j {
            return 0.0;
        }
        (0..n3)
            .map(|m| d[m][i] * (2.0 * std::f64::consts::PI * (m * k) as f64 / n3 as f64).cos())
            .sum::<f64>()
            / n3 as f64
    });
    let want: f64 = d.iter().flatten().map(|x: &f64| x.abs()).sum::<f64>() / n3 as f64;
    assert!((tensor_nuclear_norm(&t).unwrap() - want).abs() < 1e-12);
}

#[test]
fn tnn_reduces_to_nuclear_norm() {
    let mut rng = RngState::new(5);
    let m = random_matrix(4, 3, &mut rng);
    let t = Tensor3::from_matrix(&m);
    assert!((tensor_nuclear_norm(&t).unwrap() - nuclear_norm(&m).unwrap()).abs() < 1e-12);
}

#[test]
fn nuclear_norm_dominates_frobenius() {
    let mut rng = RngState::new(6);
    for _ in 0..50 {
        let m = random_matrix(4, 5, &mut rng);
        assert!(nuclear_norm(&m).unwrap() >= m.norm() - 1e-12);
    }
    let u = random_matrix(4, 1, &mut rng);
    let v = random_matrix(1, 5, &mut rng);
    let r1 = u.matmul(&v).unwrap();
    assert!((nuclear_norm(&r1).unwrap() - r1.norm()).abs() < 1e-12);
}

#[test]
fn moreau_identity_for_frobenius_norm() {
    let mut rng = RngState::new(7);
    let lambda = 0.5;
    for _ in 0..100 {
        let x = random_matrix(3, 4, &mut rng).scaled(1.0 + 3.0 * rng.uniform());
        for t in [0.1, 1.0, 10.0] {
            let p = prox_frobenius(&x, t * lambda);
            let q = prox_conjugate(
                |a: &DenseMatrix, b| prox_frobenius(a, b * lambda),
                &x.zeros_like(),
                &x,
                t,
            );
            let mut sum = p.clone();
            sum.axpy(t, &q);
            assert!(sum.dist(&x) < 1e-12);
            let direct = project_frobenius_ball(&x.scaled(1.0 / t), lambda);
            assert!(q.dist(&direct) < 1e-12);
        }
    }
}

#[test]
fn masked_kernel_bregman_is_explicit_quadratic() {
    let mut rng = RngState::new(8);
    let mask = std::sync::Arc::new(random_mask([3, 4, 1], &mut rng));
    let k = ibpdca_core::prox::MaskedQuadraticKernel::new(1.3, mask.clone()).unwrap();
    for _ in 0..20 {
        let x = random_matrix(3, 4, &mut rng);
        let y = random_matrix(3, 4, &mut rng);
        let d = x.sub(&y);
        let pd = mask.project(&d);
        let want = 0.5 * (1.3 * d.norm_sqr() - pd.norm_sqr());
        assert!((bregman_distance(&k, &x, &y).unwrap() - want).abs() < 1e-12);
        assert!(want >= 0.5 * BregmanKernel::<DenseMatrix>::rho(&k) * d.norm_sqr() - 1e-12);
    }
}

#[test]
fn matrix_subproblem_matches_oracle() {
    let mut rng = RngState::new(9);
    for trial in 0..8 {
        let mask = random_mask([3, 3, 1], &mut rng);
        let m = random_matrix(3, 3, &mut rng);
        let lambda = 0.2 + rng.uniform();
        let mu = 1.1 + rng.uniform();
        let p = MatrixCompletionProblem::new(m.clone(), mask.clone(), lambda, mu).unwrap();
        let xhat = random_matrix(3, 3, &mut rng);
        let u = random_matrix(3, 3, &mut rng).scaled(0.3);
        let got = p.solve_x_subproblem(&u, &xhat, 1.0).unwrap();

        let (mt, xt, ut) = (
            T3::from_matrix(p.observed()),
            T3::from_matrix(&xhat),
            T3::from_matrix(&u),
        );
        let grad = |x: &T3| {
            // ∇[½‖P(X−M)‖² − ⟨X − x̂, u⟩ + ½⟨X − x̂, (μI − PᵀP)(X − x̂)⟩]
            let r = mask_t3(&mask, &sub(x, &mt));
            let d = sub(x, &xt);
            let pd = mask_t3(&mask, &d);
            let mut g = r;
            for i in 0..g.v.len() {
                g.v[i] += -ut.v[i] + mu * d.v[i] - pd.v[i];
            }
            g
        };
        let want = factored_minimize(3, 3, 1, lambda, mu, grad, trial).to_matrix();
        assert!(got.dist(&want) < 1e-5, "trial {trial}: {}", got.dist(&want));
    }
}

#[test]
fn tensor_subproblem_matches_oracle() {
    let mut rng = RngState::new(10);
    for (trial, tau) in [1.0, 1.0, 2.5, 0.7].into_iter().enumerate() {
        let mask = random_mask([3, 3, 2], &mut rng);
        let m = random_tensor(3, 3, 2, &mut rng);
        let lambda = 0.2 + rng.uniform();
        let mu = 1.1;
        let p = TensorCompletionProblem::new(m, mask, lambda, mu).unwrap();
        let xhat = random_tensor(3, 3, 2, &mut rng);
        let xi = random_tensor(3, 3, 2, &mut rng).scaled(0.1);
        let mut u = p.grad_h_minus(&xhat);
        u.axpy(1.0, &xi);
        let got = p.solve_x_subproblem(&u, &xhat, tau).unwrap();

        let (xt, ut) = (T3::from_tensor(&xhat), T3::from_tensor(&u));
        let grad = |x: &T3| {
            let d = sub(x, &xt);
            let mut g = d.clone();
            for i in 0..g.v.len() {
                g.v[i] = tau * mu * d.v[i] - ut.v[i];
            }
            g
        };
        let want = factored_minimize(3, 3, 2, lambda, tau * mu, grad, trial as u64).to_tensor();
        assert!(got.dist(&want) < 1e-5, "trial {trial}: {}", got.dist(&want));
    }
}

#[test]
fn single_slice_tensor_subproblem_is_euclidean_matrix_step() {
    let mut rng = RngState::new(11);
    let m = random_matrix(3, 4, &mut rng);
    let mask = random_mask([3, 4, 1], &mut rng);
    let p = TensorCompletionProblem::new(Tensor3::from_matrix(&m), mask, 0.5, 1.1).unwrap();
    let xhat = random_matrix(3, 4, &mut rng);
    let xh = Tensor3::from_matrix(&xhat);
    let u = p.grad_h_minus(&xh);
    let got = p.solve_x_subproblem(&u, &xh, 1.0).unwrap();
    let mut b = xhat.clone();
    b.axpy(1.0 / 1.1, &u.slice(0));
    assert!(got.slice(0).dist(&svt(&b, 0.5 / 1.1).unwrap()) < 1e-12);
}

#[test]
fn subproblem_solutions_beat_random_perturbations() {
    let mut rng = RngState::new(12);
    let mask = random_mask([4, 4, 1], &mut rng);
    let m = random_matrix(4, 4, &mut rng);
    let p = MatrixCompletionProblem::new(m, mask.clone(), 0.5, 1.1).unwrap();
    let xhat = random_matrix(4, 4, &mut rng);
    let u = random_matrix(4, 4, &mut rng).scaled(0.2);
    let x = p.solve_x_subproblem(&u, &xhat, 1.0).unwrap();
    let best = p.x_subproblem_objective(&x, &u, &xhat, 1.0).unwrap();
    assert!(best <= p.x_subproblem_objective(&xhat, &u, &xhat, 1.0).unwrap() + 1e-12);
    for _ in 0..50 {
        let mut y = x.clone();
        y.axpy(1e-3 + rng.uniform(), &random_matrix(4, 4, &mut rng));
        assert!(best <= p.x_subproblem_objective(&y, &u, &xhat, 1.0).unwrap() + 1e-12);
    }

    let t = random_tensor(3, 3, 3, &mut rng);
    let tp = TensorCompletionProblem::new(t, random_mask([3, 3, 3], &mut rng), 0.5, 1.1).unwrap();
    let xh = random_tensor(3, 3, 3, &mut rng);
    let u = tp.grad_h_minus(&xh);
    let x = tp.solve_x_subproblem(&u, &xh, 1.0).unwrap();
    let best = tp.x_subproblem_objective(&x, &u, &xh, 1.0).unwrap();
    for _ in 0..50 {
        let mut y = x.clone();
        y.axpy(1e-3 + rng.uniform(), &random_tensor(3, 3, 3, &mut rng));
        assert!(best <= tp.x_subproblem_objective(&y, &u, &xh, 1.0).unwrap() + 1e-12);
    }
}

#[test]
fn grad_h_minus_is_lipschitz() {
    let mut rng = RngState::new(13);
    let t = random_tensor(3, 3, 2, &mut rng);
    let p = TensorCompletionProblem::new(t, random_mask([3, 3, 2], &mut rng), 0.5, 1.1).unwrap();
    for _ in 0..50 {
        let x = random_tensor(3, 3, 2, &mut rng);
        let y = random_tensor(3, 3, 2, &mut rng);
        let lhs = p.grad_h_minus(&x).dist(&p.grad_h_minus(&y));
        assert!(lhs <= (p.l_h_minus() + 1e-9) * x.dist(&y));
    }
}

#[test]
fn admm_outer_step_solves_convex_subproblem() {
    // One DCA step must land on the minimizer of λ‖X‖_* − ⟨ξ, X⟩ + ½‖P(X − M)‖² with
    // ξ = λ x0/‖x0‖. A nearly constant penalty lets the inner ADMM converge fully; the
    // default 1.1^j growth enforces X = Y long before optimality.
    let mut rng = RngState::new(14);
    for trial in 0..4 {
        let mask = random_mask([3, 3, 1], &mut rng);
        let m = random_matrix(3, 3, &mut rng);
        let lambda = 0.5;
        let p = MatrixCompletionProblem::new(m, mask.clone(), lambda, 1.1).unwrap();
        let x0 = random_matrix(3, 3, &mut rng);
        let cfg = AdmmConfig {
            penalty_base: 1.0005,
            inner_tol: 1e-10,
            inner_max: 20_000,
            max_iter: 1,
            ..AdmmConfig::default()
        };
        let out = admm_dca_run(&p, &cfg, &x0).unwrap();
        let xi = T3::from_matrix(&x0.scaled(lambda / x0.norm()));
        let mt = T3::from_matrix(p.observed());
        let grad = |x: &T3| {
            let mut g = mask_t3(&mask, &sub(x, &mt));
            g.v.iter_mut().zip(&xi.v).for_each(|(a, b)| *a -= b);
            g
        };
        let want = factored_minimize(3, 3, 1, lambda, 1.0, grad, trial).to_matrix();
        let gap = out.x.dist(&want);
        assert!(gap < 1e-5, "trial {trial}: {gap}");
    }
}

#[test]
fn generated_factor_ranks() {
    let inst = gen_matrix_instance(100, 100, 10, 0.5, 3).unwrap();
    assert_eq!(matrix_rank(&inst.low_rank).unwrap(), 10);
    let sv = singular_values(&inst.low_rank).unwrap();
    assert!(sv[9] > 1e3 * sv[10]);
    let t = gen_tensor_instance(20, 20, 10, 5, 0.5, 3).unwrap();
    assert_eq!(tubal_rank(&t.low_rank).unwrap(), 5);
    let t = gen_tensor_instance(6, 5, 3, 2, 0.5, 4).unwrap();
    assert!(tubal_rank(&t.low_rank).unwrap() <= 2);
}

#[test]
fn metrics_are_permutation_invariant() {
    let mut rng = RngState::new(15);
    let a = random_matrix(1, 30, &mut rng);
    let b = random_matrix(1, 30, &mut rng);
    let mask = random_mask([1, 30, 1], &mut rng);
    let perm: Vec<usize> = (0..30).rev().collect();
    let pa = DenseMatrix::new(1, 30, perm.iter().map(|&i| a.data()[i]).collect()).unwrap();
    let pb = DenseMatrix::new(1, 30, perm.iter().map(|&i| b.data()[i]).collect()).unwrap();
    let pm = SamplingMask::new(
        [1, 30, 1],
        perm.iter().map(|&i| mask.observed()[i]).collect(),
    )
    .unwrap();
    assert!((rse(&a, &b).unwrap() - rse(&pa, &pb).unwrap()).abs() < 1e-14);
    assert!((psnr(&a, &b, &mask).unwrap() - psnr(&pa, &pb, &pm).unwrap()).abs() < 1e-12);
}

#[test]
fn rank_bounded_and_stable_under_zero_padding() {
    let mut rng = RngState::new(16);
    let u = random_matrix(5, 2, &mut rng);
    let v = random_matrix(2, 4, &mut rng);
    let x = u.matmul(&v).unwrap();
    let r = matrix_rank(&x).unwrap();
    assert_eq!(r, 2);
    let padded = DenseMatrix::from_fn(7, 6, |i, j| if i < 5 && j < 4 { x.get(i, j) } else { 0.0 });
    assert_eq!(matrix_rank(&padded).unwrap(), r);
    assert!(matrix_rank(&random_matrix(3, 8, &mut rng)).unwrap() <= 3);
}
