use alloc::boxed::Box;
use core::fmt;

use crate::solver::SolverTrace;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone)]
pub enum Error {
    /// Buffer length or operand shapes do not agree.
    ShapeMismatch {
        expected: [usize; 3],
        found: [usize; 3],
    },
    /// A dimension was zero.
    EmptyDimension,
    /// NaN or infinity found where finite values are required.
    NonFinite,
    /// The Jacobi SVD did not converge within the sweep budget.
    SvdNoConvergence {
        sweeps: usize,
    },
    /// An inverse tube DFT left an imaginary part above tolerance.
    SymmetryViolation {
        residual: f64,
    },
    InvalidParameter(&'static str),
    /// A sampling mask without observed entries where at least one is required.
    EmptyMask,
    /// RSE against an all-zero ground truth.
    ZeroGroundTruth,
    /// PSNR with no unobserved entries.
    EmptyComplement,
    /// An iterate became non-finite; carries the trace recorded so far.
    Divergence {
        iteration: usize,
        trace: Box<SolverTrace>,
    },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::ShapeMismatch { expected, found } => write!(
                f,
                "shape mismatch: expected {}x{}x{}, found {}x{}x{}",
                expected[0], expected[1], expected[2], found[0], found[1], found[2]
            ),
            Error::EmptyDimension => f.write_str("dimensions must be positive"),
            Error::NonFinite => f.write_str("non-finite value encountered"),
            Error::SvdNoConvergence { sweeps } => {
                write!(f, "Jacobi SVD did not converge after {sweeps} sweeps")
            }
            Error::SymmetryViolation { residual } => write!(
                f,
                "spectrum is not Hermitian-symmetric (imaginary residue {residual:e})"
            ),
            Error::InvalidParameter(msg) => write!(f, "invalid parameter: {msg}"),
            Error::EmptyMask => f.write_str("sampling mask has no observed entries"),
            Error::ZeroGroundTruth => f.write_str("ground truth has zero norm"),
            Error::EmptyComplement => f.write_str("sampling mask has no unobserved entries"),
            Error::Divergence { iteration, .. } => {
                write!(f, "solver diverged at iteration {iteration}")
            }
        }
    }
}

impl core::error::Error for Error {}
