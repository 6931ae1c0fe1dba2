//! Dispatch of one solve over matrix or tensor data, with timing and metrics.

use std::time::Instant;

use anyhow::{bail, Result};
use ibpdca_core::admm::admm_dca_run;
use ibpdca_core::data::{gen_matrix_instance, gen_tensor_instance, RngState};
use ibpdca_core::metrics::{matrix_rank, psnr, rse, tubal_rank};
use ibpdca_core::problems::{
    CompletionModel, MatrixCompletionProblem, SamplingMask, TensorCompletionProblem,
};
use ibpdca_core::solver::{bpdca_run, ibpdca_run, SolverOutcome, SolverTrace, StopStatus};
use ibpdca_core::Array;

use crate::config::{ProblemKind, SolveParams, SolverKind};
use crate::io::Data;

/// Result of one solve. `rse` and `psnr` need the ground truth.
#[derive(Debug, Clone)]
pub struct RunReport {
    pub solver: SolverKind,
    pub x: Data,
    pub trace: SolverTrace,
    pub rse: Option<f64>,
    pub psnr: Option<f64>,
    pub rank: usize,
    pub iters: usize,
    /// Solver loop only; excludes IO and metric evaluation.
    pub wall_seconds: f64,
}

impl RunReport {
    pub fn converged(&self) -> bool {
        self.trace.status == StopStatus::Converged
    }
}

/// A synthetic instance with its ground truth.
pub struct Generated {
    pub truth: Data,
    pub mask: SamplingMask,
    pub observed: Data,
}

pub fn generate(dims: &[usize], rank: usize, sr: f64, seed: u64) -> Result<Generated> {
    Ok(match *dims {
        [m, n] => {
            let i = gen_matrix_instance(m, n, rank, sr, seed)?;
            Generated {
                truth: Data::Matrix(i.truth),
                mask: i.mask,
                observed: Data::Matrix(i.observed),
            }
        }
        [n1, n2, n3] => {
            let i = gen_tensor_instance(n1, n2, n3, rank, sr, seed)?;
            Generated {
                truth: Data::Tensor(i.truth),
                mask: i.mask,
                observed: Data::Tensor(i.observed),
            }
        }
        _ => bail!("dims must have 2 or 3 entries"),
    })
}

fn dispatch<P: CompletionModel>(
    problem: &P,
    solver: SolverKind,
    params: &SolveParams,
    kind: ProblemKind,
    x0: &P::Point,
) -> Result<(SolverOutcome<P::Point>, f64)> {
    let start = Instant::now();
    let out = match solver {
        SolverKind::Ibpdca => ibpdca_run(problem, &params.solver_config(kind), x0)?,
        SolverKind::Bpdca => bpdca_run(problem, &params.solver_config(kind), x0)?,
        SolverKind::AdmmDca => admm_dca_run(problem, &params.admm_config(kind), x0)?,
    };
    Ok((out, start.elapsed().as_secs_f64()))
}

/// Runs `solver` from `x0 = observed`. Metrics against `truth` are filled in when given.
pub fn solve(
    solver: SolverKind,
    params: &SolveParams,
    observed: &Data,
    mask: &SamplingMask,
    truth: Option<&Data>,
) -> Result<RunReport> {
    let (x, trace, secs) = match observed {
        Data::Matrix(m) => {
            params.validate(ProblemKind::Matrix)?;
            let p =
                MatrixCompletionProblem::new(m.clone(), mask.clone(), params.lambda, params.mu)?;
            let (o, s) = dispatch(&p, solver, params, ProblemKind::Matrix, m)?;
            (Data::Matrix(o.x), o.trace, s)
        }
        Data::Tensor(t) => {
            params.validate(ProblemKind::Tensor)?;
            let p =
                TensorCompletionProblem::new(t.clone(), mask.clone(), params.lambda, params.mu)?;
            let (o, s) = dispatch(&p, solver, params, ProblemKind::Tensor, t)?;
            (Data::Tensor(o.x), o.trace, s)
        }
    };
    let rank = match &x {
        Data::Matrix(m) => matrix_rank(m)?,
        Data::Tensor(t) => tubal_rank(t)?,
    };
    let (rse_v, psnr_v) = match (truth, &x) {
        (Some(Data::Matrix(t)), Data::Matrix(x)) => metrics(x, t, mask)?,
        (Some(Data::Tensor(t)), Data::Tensor(x)) => metrics(x, t, mask)?,
        (Some(_), _) => bail!("ground truth and observations differ in kind"),
        (None, _) => (None, None),
    };
    Ok(RunReport {
        solver,
        iters: trace.iterations(),
        x,
        trace,
        rse: rse_v,
        psnr: psnr_v,
        rank,
        wall_seconds: secs,
    })
}

fn metrics<T: Array>(x: &T, truth: &T, mask: &SamplingMask) -> Result<(Option<f64>, Option<f64>)> {
    let r = rse(x, truth)?;
    // Fully observed data has no PSNR.
    let p = if mask.complement_count() == 0 {
        None
    } else {
        Some(psnr(x, truth, mask)?)
    };
    Ok((Some(r), p))
}

/// Observes each entry independently with probability `sr`. An empty draw retries with
/// `seed + 1`.
pub fn sample_mask(dims: [usize; 3], sr: f64, seed: u64) -> Result<SamplingMask> {
    if !(sr > 0.0 && sr <= 1.0) {
        bail!("sampling ratio must lie in (0, 1]");
    }
    let len = dims[0] * dims[1] * dims[2];
    let mut seed = seed;
    loop {
        let mut rng = RngState::new(seed);
        let obs = (0..len).map(|_| rng.uniform() < sr).collect();
        match SamplingMask::new(dims, obs) {
            Ok(m) => return Ok(m),
            Err(ibpdca_core::Error::EmptyMask) => seed = seed.wrapping_add(1),
            Err(e) => return Err(e.into()),
        }
    }
}
