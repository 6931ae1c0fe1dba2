use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::Array;

/// Observation set Ω over a matrix (`[rows, cols, 1]`) or a 3-tensor, stored in the same flat
/// layout as the arrays it masks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SamplingMask {
    dims: [usize; 3],
    observed: Vec<bool>,
}

impl SamplingMask {
    /// Requires at least one observed entry.
    pub fn new(dims: [usize; 3], observed: Vec<bool>) -> Result<Self> {
        let mask = Self::new_allow_empty(dims, observed)?;
        if mask.observed_count() == 0 {
            return Err(Error::EmptyMask);
        }
        Ok(mask)
    }

    fn new_allow_empty(dims: [usize; 3], observed: Vec<bool>) -> Result<Self> {
        if dims.contains(&0) {
            return Err(Error::EmptyDimension);
        }
        if observed.len() != dims[0] * dims[1] * dims[2] {
            return Err(Error::ShapeMismatch {
                expected: dims,
                found: [observed.len(), 1, 1],
            });
        }
        Ok(Self { dims, observed })
    }

    pub fn full(dims: [usize; 3]) -> Self {
        Self {
            dims,
            observed: vec![true; dims[0] * dims[1] * dims[2]],
        }
    }

    /// Nothing observed. Only meaningful for kernels; problem constructors reject it.
    pub fn none(dims: [usize; 3]) -> Self {
        Self {
            dims,
            observed: vec![false; dims[0] * dims[1] * dims[2]],
        }
    }

    /// Mask from the nonzero pattern of an array (e.g. a 0/1 file).
    pub fn from_indicator<A: Array>(a: &A) -> Result<Self> {
        Self::new(a.dims(), a.values().iter().map(|&v| v != 0.0).collect())
    }

    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    pub fn observed(&self) -> &[bool] {
        &self.observed
    }

    pub fn observed_count(&self) -> usize {
        self.observed.iter().filter(|&&o| o).count()
    }

    /// `#Ω^C`
    pub fn complement_count(&self) -> usize {
        self.observed.len() - self.observed_count()
    }

    pub fn check<A: Array>(&self, a: &A) -> Result<()> {
        if a.dims() == self.dims {
            Ok(())
        } else {
            Err(Error::ShapeMismatch {
                expected: self.dims,
                found: a.dims(),
            })
        }
    }

    /// `𝒫_Ω(a)`: keeps observed entries, zeros the rest.
    pub fn project<A: Array>(&self, a: &A) -> A {
        let mut out = a.clone();
        self.project_in_place(&mut out);
        out
    }

    pub fn project_in_place<A: Array>(&self, a: &mut A) {
        debug_assert_eq!(a.dims(), self.dims);
        for (v, &o) in a.values_mut().iter_mut().zip(&self.observed) {
            if !o {
                *v = 0.0;
            }
        }
    }

    /// `𝒫_Ω(a − b)`
    pub fn project_diff<A: Array>(&self, a: &A, b: &A) -> A {
        let mut out = a.sub(b);
        self.project_in_place(&mut out);
        out
    }

    /// `½‖𝒫_Ω(a − b)‖²`
    pub fn half_sq_residual<A: Array>(&self, a: &A, b: &A) -> f64 {
        0.5 * a
            .values()
            .iter()
            .zip(b.values())
            .zip(&self.observed)
            .filter(|(_, &o)| o)
            .map(|((x, y), _)| (x - y) * (x - y))
            .sum::<f64>()
    }
}
