#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use ibpdca::bench::{csv_table, markdown_table, run_bench, thread_count};
use ibpdca::config::{
    load_bench, load_experiment, validate_instance, AlphaSpec, SolveParams, SolverKind,
};
use ibpdca::io::{read_data, text_extension, write_data, Data};
use ibpdca::runner::{generate, sample_mask, solve, RunReport};
use ibpdca::trace::trace_csv;

/// Low-rank matrix and tensor completion by inertial Bregman proximal DC algorithms.
#[derive(Parser)]
#[command(version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
#[allow(clippy::large_enum_variant)]
enum Command {
    /// Generate a synthetic instance: truth, mask and observed files.
    Synth(SynthArgs),
    /// Run one solver and print a metrics row.
    Solve(SolveArgs),
    /// Run a grid of instances and solvers from a JSON config.
    Bench(BenchArgs),
}

#[derive(Args)]
struct SynthArgs {
    /// Matrix size `M N`.
    #[arg(long, num_args = 2, value_names = ["M", "N"], conflicts_with = "tensor", required_unless_present = "tensor")]
    matrix: Option<Vec<usize>>,
    /// Tensor size `N1 N2 N3`.
    #[arg(long, num_args = 3, value_names = ["N1", "N2", "N3"])]
    tensor: Option<Vec<usize>>,
    #[arg(long)]
    rank: usize,
    /// Sampling ratio in (0, 1].
    #[arg(long)]
    sr: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Args)]
struct SolveArgs {
    /// JSON experiment config describing a synthetic instance.
    #[arg(long, conflicts_with_all = ["observed", "truth"])]
    config: Option<PathBuf>,
    /// Observed data (`.csv`, `.t3` or `.pgm`).
    #[arg(long)]
    observed: Option<PathBuf>,
    /// Mask file; nonzero entries are observed.
    #[arg(long)]
    mask: Option<PathBuf>,
    /// Ground truth for metrics. Without `--observed`, observations are sampled from it.
    #[arg(long)]
    truth: Option<PathBuf>,
    /// Sampling ratio used with `--truth` when no mask is given.
    #[arg(long)]
    sr: Option<f64>,
    /// Seed for the sampled mask.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum)]
    solver: Option<SolverKind>,
    #[command(flatten)]
    params: ParamArgs,
    /// Per-iteration trace CSV.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Recovered array (`.csv`, `.t3` or `.pgm`).
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct ParamArgs {
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    mu: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    tau: Option<f64>,
    /// `fista`, `none` or a constant weight.
    #[arg(long)]
    alpha: Option<String>,
    #[arg(long)]
    rel_tol: Option<f64>,
    #[arg(long)]
    max_iter: Option<usize>,
    /// Record objective and merit values in the trace.
    #[arg(long)]
    diagnostics: bool,
}

impl ParamArgs {
    fn apply(&self, p: &mut SolveParams) -> Result<()> {
        if let Some(v) = self.lambda {
            p.lambda = v;
        }
        if let Some(v) = self.mu {
            p.mu = v;
        }
        if let Some(v) = self.beta {
            p.beta = v;
        }
        if let Some(v) = self.tau {
            p.tau = v;
        }
        if let Some(a) = &self.alpha {
            p.alpha = AlphaSpec::parse(a)?;
        }
        if let Some(v) = self.rel_tol {
            p.rel_tol = v;
        }
        if self.max_iter.is_some() {
            p.max_iter = self.max_iter;
        }
        p.diagnostics |= self.diagnostics;
        Ok(())
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum TableFormat {
    Markdown,
    Csv,
}

#[derive(Args)]
struct BenchArgs {
    /// JSON bench config.
    #[arg(long)]
    config: PathBuf,
    #[arg(long, value_enum, default_value = "markdown")]
    format: TableFormat,
    /// Also write the table here.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads; defaults to IBPDCA_THREADS or the core count.
    #[arg(long)]
    threads: Option<usize>,
}

/// Exit status when a run stopped at its iteration cap.
const NOT_CONVERGED: u8 = 2;

fn synth(a: &SynthArgs) -> Result<ExitCode> {
    let dims = a
        .matrix
        .clone()
        .or_else(|| a.tensor.clone())
        .expect("clap requires one");
    validate_instance(&dims, a.rank, a.sr)?;
    let g = generate(&dims, a.rank, a.sr, a.seed)?;
    fs::create_dir_all(&a.out).with_context(|| format!("creating {}", a.out.display()))?;
    let ext = text_extension(&g.truth);
    let files = [
        ("truth", g.truth),
        ("mask", Data::from_mask(&g.mask)),
        ("observed", g.observed),
    ];
    for (name, data) in &files {
        let path = a.out.join(format!("{name}.{ext}"));
        write_data(&path, data).with_context(|| format!("writing {}", path.display()))?;
        println!("{}", path.display());
    }
    Ok(ExitCode::SUCCESS)
}

fn read(path: &Path) -> Result<Data> {
    read_data(path).with_context(|| format!("reading {}", path.display()))
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.4e}")).unwrap_or_default()
}

fn print_report(r: &RunReport) {
    println!("solver,rse,psnr,time_s,iters,rank,status");
    println!(
        "{},{},{},{:.3},{},{},{}",
        r.solver.name(),
        fmt_opt(r.rse),
        fmt_opt(r.psnr),
        r.wall_seconds,
        r.iters,
        r.rank,
        if r.converged() {
            "converged"
        } else {
            "max_iter"
        }
    );
}

fn solve_cmd(a: &SolveArgs) -> Result<ExitCode> {
    let mut params = SolveParams::default();
    let mut solver = SolverKind::Ibpdca;
    let mut trace = a.trace.clone();
    let mut output = a.output.clone();
    let (observed, mask, truth) = if let Some(path) = &a.config {
        let c = load_experiment(path)?;
        params = c.params.clone();
        solver = c.solver;
        trace = trace.or(c.trace);
        output = output.or(c.output);
        let g = generate(&c.dims, c.rank, c.sr, c.seed)?;
        (g.observed, g.mask, Some(g.truth))
    } else if let Some(obs) = &a.observed {
        let Some(mask) = &a.mask else {
            bail!("--observed needs --mask");
        };
        let truth = a.truth.as_deref().map(read).transpose()?;
        (read(obs)?, read(mask)?.to_mask()?, truth)
    } else if let Some(t) = &a.truth {
        let truth = read(t)?;
        let mask = match (&a.mask, a.sr) {
            (Some(m), _) => read(m)?.to_mask()?,
            (None, Some(sr)) => sample_mask(truth.dims(), sr, a.seed)?,
            (None, None) => bail!("--truth needs --mask or --sr"),
        };
        let observed = match &truth {
            Data::Matrix(m) => Data::Matrix(mask.project(m)),
            Data::Tensor(t) => Data::Tensor(mask.project(t)),
        };
        (observed, mask, Some(truth))
    } else {
        bail!("give --config, --observed with --mask, or --truth");
    };
    if let Some(s) = a.solver {
        solver = s;
    }
    a.params.apply(&mut params)?;

    let report = solve(solver, &params, &observed, &mask, truth.as_ref())?;
    print_report(&report);
    if let Some(p) = &trace {
        fs::write(p, trace_csv(&report.trace))
            .with_context(|| format!("writing {}", p.display()))?;
    }
    if let Some(p) = &output {
        write_data(p, &report.x).with_context(|| format!("writing {}", p.display()))?;
    }
    Ok(if report.converged() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(NOT_CONVERGED)
    })
}

fn bench_cmd(a: &BenchArgs) -> Result<ExitCode> {
    let cfg = load_bench(&a.config)?;
    let rows = run_bench(&cfg, a.threads.unwrap_or_else(thread_count));
    let table = match a.format {
        TableFormat::Markdown => markdown_table(&rows),
        TableFormat::Csv => csv_table(&rows),
    };
    print!("{table}");
    if let Some(p) = &a.out {
        fs::write(p, &table).with_context(|| format!("writing {}", p.display()))?;
    }
    Ok(if rows.iter().any(|r| r.result.is_err()) {
        ExitCode::FAILURE
    } else if rows.iter().all(|r| r.all_converged()) {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(NOT_CONVERGED)
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Synth(a) => synth(a),
        Command::Solve(a) => solve_cmd(a),
        Command::Bench(a) => bench_cmd(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
