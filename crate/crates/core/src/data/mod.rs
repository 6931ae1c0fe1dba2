//! Seeded synthetic instances.

mod rng;

pub use rng::RngState;

use crate::error::{Error, Result};
use crate::linalg::{tprod, DenseMatrix, Tensor3};
use crate::problems::SamplingMask;

/// A generated completion instance. `truth = low_rank + noise`, `observed = 𝒫_Ω(truth)`.
#[derive(Debug, Clone)]
pub struct Instance<T> {
    pub truth: T,
    /// The noiseless factor product.
    pub low_rank: T,
    pub mask: SamplingMask,
    pub observed: T,
    /// Seed actually used; larger than the requested one if a draw produced an empty mask.
    pub seed: u64,
}

pub type MatrixInstance = Instance<DenseMatrix>;
pub type TensorInstance = Instance<Tensor3>;

const NOISE: f64 = 0.01;

fn check_common(dims: &[usize], r: usize, rmax: usize, sr: f64) -> Result<()> {
    if dims.contains(&0) {
        return Err(Error::EmptyDimension);
    }
    if r == 0 || r > rmax {
        return Err(Error::InvalidParameter("rank must lie in 1..=min(n1, n2)"));
    }
    if !(sr > 0.0 && sr <= 1.0) {
        return Err(Error::InvalidParameter("sampling ratio must lie in (0, 1]"));
    }
    Ok(())
}

fn draw_mask(rng: &mut RngState, dims: [usize; 3], sr: f64) -> Option<SamplingMask> {
    let len = dims[0] * dims[1] * dims[2];
    SamplingMask::new(dims, (0..len).map(|_| rng.uniform() < sr).collect()).ok()
}

/// `X = UV + 0.01·N` with `U` (m×r) and `V` (r×n) uniform on `[0, 1)`.
///
/// Draw order: `U` then `V` (row-major), the noise, then one uniform per entry for the mask
/// (`observed` iff `< sr`). An empty mask restarts with `seed + 1`.
pub fn gen_matrix_instance(
    m: usize,
    n: usize,
    r: usize,
    sr: f64,
    seed: u64,
) -> Result<MatrixInstance> {
    check_common(&[m, n], r, m.min(n), sr)?;
    let mut seed = seed;
    loop {
        let mut rng = RngState::new(seed);
        let u = DenseMatrix::from_fn(m, r, |_, _| rng.uniform());
        let v = DenseMatrix::from_fn(r, n, |_, _| rng.uniform());
        let low_rank = u.matmul(&v)?;
        let mut truth = low_rank.clone();
        for i in 0..m {
            for j in 0..n {
                truth.set(i, j, truth.get(i, j) + NOISE * rng.normal());
            }
        }
        if let Some(mask) = draw_mask(&mut rng, [m, n, 1], sr) {
            let observed = mask.project(&truth);
            return Ok(Instance {
                truth,
                low_rank,
                mask,
                observed,
                seed,
            });
        }
        seed = seed.wrapping_add(1);
    }
}

/// `𝒳 = 𝒰 * 𝒱 + 0.01·𝒩` with `𝒰` (n1×r×n3) and `𝒱` (r×n2×n3) standard normal.
///
/// Draw order as for matrices; tensors are filled slice by slice, row-major within a slice.
pub fn gen_tensor_instance(
    n1: usize,
    n2: usize,
    n3: usize,
    r: usize,
    sr: f64,
    seed: u64,
) -> Result<TensorInstance> {
    check_common(&[n1, n2, n3], r, n1.min(n2), sr)?;
    let mut seed = seed;
    loop {
        let mut rng = RngState::new(seed);
        let u = Tensor3::from_fn(n1, r, n3, |_, _, _| rng.normal());
        let v = Tensor3::from_fn(r, n2, n3, |_, _, _| rng.normal());
        let low_rank = tprod(&u, &v)?;
        let truth = Tensor3::from_fn(n1, n2, n3, |i, j, k| {
            low_rank.get(i, j, k) + NOISE * rng.normal()
        });
        if let Some(mask) = draw_mask(&mut rng, [n1, n2, n3], sr) {
            let observed = mask.project(&truth);
            return Ok(Instance {
                truth,
                low_rank,
                mask,
                observed,
                seed,
            });
        }
        seed = seed.wrapping_add(1);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Array;

    #[test]
    fn full_sampling_and_determinism() {
        let a = gen_matrix_instance(6, 5, 2, 1.0, 11).unwrap();
        assert_eq!(a.mask.complement_count(), 0);
        let b = gen_matrix_instance(6, 5, 2, 1.0, 11).unwrap();
        assert_eq!(a.truth, b.truth);
        assert_eq!(a.observed, a.truth);
        let t1 = gen_tensor_instance(3, 4, 2, 2, 0.5, 5).unwrap();
        let t2 = gen_tensor_instance(3, 4, 2, 2, 0.5, 5).unwrap();
        assert_eq!(t1.truth, t2.truth);
        assert_eq!(t1.mask, t2.mask);
    }

    #[test]
    fn validation() {
        assert!(gen_matrix_instance(5, 5, 0, 0.5, 1).is_err());
        assert!(gen_matrix_instance(5, 5, 6, 0.5, 1).is_err());
        assert!(gen_matrix_instance(5, 5, 2, 0.0, 1).is_err());
        assert!(gen_matrix_instance(5, 5, 2, 1.5, 1).is_err());
        assert!(gen_tensor_instance(5, 5, 0, 2, 0.5, 1).is_err());
    }

    #[test]
    fn empty_mask_bumps_seed() {
        // With one entry at sr = 0.1 most seeds draw an empty mask.
        let bumped = (0..20)
            .map(|s| (s, gen_matrix_instance(1, 1, 1, 0.1, s).unwrap()))
            .filter(|(s, inst)| inst.seed != *s)
            .count();
        assert!(bumped > 10);
        for s in 0..20 {
            let inst = gen_matrix_instance(1, 1, 1, 0.1, s).unwrap();
            assert!(inst.seed >= s);
            assert_eq!(inst.mask.observed_count(), 1);
        }
    }

    #[test]
    fn noise_level() {
        let inst = gen_matrix_instance(40, 40, 3, 0.5, 2).unwrap();
        let rms = inst.truth.dist(&inst.low_rank) / 40.0;
        assert!((rms - 0.01).abs() < 1e-3);
        let inst = gen_tensor_instance(10, 10, 4, 2, 0.5, 2).unwrap();
        let rms = inst.truth.dist(&inst.low_rank) / 20.0;
        assert!((rms - 0.01).abs() < 1.5e-3);
    }
}
