//! JSON experiment and benchmark configurations. Unknown keys are rejected.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use ibpdca_core::admm::AdmmConfig;
use ibpdca_core::solver::{AlphaSchedule, SolverConfig};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProblemKind {
    Matrix,
    Tensor,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
pub enum SolverKind {
    #[serde(rename = "ibpdca")]
    #[value(name = "ibpdca")]
    Ibpdca,
    #[serde(rename = "bpdca")]
    #[value(name = "bpdca")]
    Bpdca,
    #[serde(rename = "admm-dca")]
    #[value(name = "admm-dca")]
    AdmmDca,
}

impl SolverKind {
    pub fn name(self) -> &'static str {
        match self {
            SolverKind::Ibpdca => "iBPDCA",
            SolverKind::Bpdca => "BPDCA",
            SolverKind::AdmmDca => "ADMM-DCA",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AlphaName {
    Fista,
    None,
}

/// `"fista"`, `"none"`, or a constant weight.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AlphaSpec {
    Named(AlphaName),
    Constant(f64),
}

impl Default for AlphaSpec {
    fn default() -> Self {
        AlphaSpec::Named(AlphaName::Fista)
    }
}

impl AlphaSpec {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "fista" => Ok(AlphaSpec::Named(AlphaName::Fista)),
            "none" => Ok(AlphaSpec::Named(AlphaName::None)),
            _ => Ok(AlphaSpec::Constant(s.parse().with_context(|| {
                format!("alpha must be fista, none or a number: {s}")
            })?)),
        }
    }

    pub fn schedule(self) -> AlphaSchedule {
        match self {
            AlphaSpec::Named(AlphaName::Fista) => AlphaSchedule::Fista,
            AlphaSpec::Named(AlphaName::None) => AlphaSchedule::None,
            AlphaSpec::Constant(a) => AlphaSchedule::Constant(a),
        }
    }
}

/// Inner ADMM settings for the DCA baseline.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AdmmParams {
    pub penalty_base: f64,
    pub inner_tol: f64,
    pub inner_max: usize,
}

impl Default for AdmmParams {
    fn default() -> Self {
        let d = AdmmConfig::default();
        Self {
            penalty_base: d.penalty_base,
            inner_tol: d.inner_tol,
            inner_max: d.inner_max,
        }
    }
}

/// Model and algorithm parameters shared by every run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolveParams {
    pub lambda: f64,
    pub mu: f64,
    pub beta: f64,
    pub tau: f64,
    pub alpha: AlphaSpec,
    pub rel_tol: f64,
    /// Defaults to 500 for matrices and 3000 for tensors.
    pub max_iter: Option<usize>,
    pub admm: AdmmParams,
    /// Record objective and merit values in the trace.
    pub diagnostics: bool,
}

impl Default for SolveParams {
    fn default() -> Self {
        let d = SolverConfig::default();
        Self {
            lambda: 0.5,
            mu: 1.1,
            beta: d.beta,
            tau: d.tau,
            alpha: AlphaSpec::default(),
            rel_tol: d.rel_tol,
            max_iter: None,
            admm: AdmmParams::default(),
            diagnostics: false,
        }
    }
}

impl SolveParams {
    pub fn solver_config(&self, kind: ProblemKind) -> SolverConfig {
        let base = match kind {
            ProblemKind::Matrix => SolverConfig::default(),
            ProblemKind::Tensor => SolverConfig::tensor_defaults(),
        };
        SolverConfig {
            beta: self.beta,
            tau: self.tau,
            alpha: self.alpha.schedule(),
            rel_tol: self.rel_tol,
            max_iter: self.max_iter.unwrap_or(base.max_iter),
            diagnostics: self.diagnostics,
            ..base
        }
    }

    pub fn admm_config(&self, kind: ProblemKind) -> AdmmConfig {
        AdmmConfig {
            penalty_base: self.admm.penalty_base,
            inner_tol: self.admm.inner_tol,
            inner_max: self.admm.inner_max,
            max_iter: self.max_iter.unwrap_or(self.solver_config(kind).max_iter),
            rel_tol: self.rel_tol,
            diagnostics: self.diagnostics,
        }
    }

    pub fn validate(&self, kind: ProblemKind) -> Result<()> {
        if !(self.lambda >= 0.0) || !self.lambda.is_finite() {
            bail!("lambda must be nonnegative");
        }
        match kind {
            ProblemKind::Matrix if !(self.mu > 1.0) => bail!("mu must exceed 1 for matrices"),
            ProblemKind::Tensor if !(self.mu > 0.0) => bail!("mu must be positive"),
            _ => {}
        }
        if kind == ProblemKind::Matrix && self.tau != 1.0 {
            bail!("the matrix model requires tau = 1");
        }
        self.solver_config(kind).validate()?;
        self.admm_config(kind).validate()?;
        Ok(())
    }
}

/// Shape of a synthetic instance: `[m, n]` or `[n1, n2, n3]`.
pub fn problem_kind(dims: &[usize]) -> Result<ProblemKind> {
    match dims.len() {
        2 => Ok(ProblemKind::Matrix),
        3 => Ok(ProblemKind::Tensor),
        n => bail!("dims must have 2 or 3 entries, got {n}"),
    }
}

pub fn validate_instance(dims: &[usize], rank: usize, sr: f64) -> Result<ProblemKind> {
    let kind = problem_kind(dims)?;
    if dims.contains(&0) {
        bail!("dimensions must be positive");
    }
    if rank == 0 || rank > dims[0].min(dims[1]) {
        bail!("rank must lie in 1..=min(n1, n2)");
    }
    if !(sr > 0.0 && sr <= 1.0) {
        bail!("sampling ratio must lie in (0, 1]");
    }
    Ok(kind)
}

/// One synthetic solve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub problem: ProblemKind,
    pub dims: Vec<usize>,
    pub rank: usize,
    pub sr: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_solver")]
    pub solver: SolverKind,
    #[serde(default)]
    pub params: SolveParams,
    #[serde(default)]
    pub trace: Option<PathBuf>,
    #[serde(default)]
    pub output: Option<PathBuf>,
}

fn default_solver() -> SolverKind {
    SolverKind::Ibpdca
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        let kind = validate_instance(&self.dims, self.rank, self.sr)?;
        if kind != self.problem {
            bail!(
                "problem {:?} does not match dims {:?}",
                self.problem,
                self.dims
            );
        }
        self.params.validate(kind)
    }
}

/// A grid of instances and solvers. One table row per (sample ratio, size, solver); metrics
/// are averaged over `seeds`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchConfig {
    pub problem: ProblemKind,
    pub sizes: Vec<Vec<usize>>,
    pub rank: usize,
    pub sample_ratios: Vec<f64>,
    pub solvers: Vec<SolverKind>,
    #[serde(default = "default_seeds")]
    pub seeds: Vec<u64>,
    #[serde(default)]
    pub params: SolveParams,
}

fn default_seeds() -> Vec<u64> {
    vec![0]
}

impl BenchConfig {
    pub fn validate(&self) -> Result<()> {
        if self.solvers.is_empty() {
            bail!("solver list is empty");
        }
        if self.sizes.is_empty() || self.sample_ratios.is_empty() || self.seeds.is_empty() {
            bail!("sizes, sample_ratios and seeds must be nonempty");
        }
        for dims in &self.sizes {
            for &sr in &self.sample_ratios {
                let kind = validate_instance(dims, self.rank, sr)?;
                if kind != self.problem {
                    bail!("problem {:?} does not match size {:?}", self.problem, dims);
                }
            }
        }
        self.params.validate(self.problem)
    }
}

fn parse_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

pub fn load_experiment(path: &Path) -> Result<ExperimentConfig> {
    let c: ExperimentConfig = parse_json(path)?;
    c.validate()?;
    Ok(c)
}

pub fn load_bench(path: &Path) -> Result<BenchConfig> {
    let c: BenchConfig = parse_json(path)?;
    c.validate()?;
    Ok(c)
}
