//! Grid benchmarks. Jobs (one per row and seed) run on a small worker pool; rows are
//! assembled in grid order afterwards, so reports do not depend on scheduling.

use std::fmt::Write as _;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::thread;

use anyhow::Result;

use crate::config::{BenchConfig, SolverKind};
use crate::runner::{generate, solve};

/// Environment variable holding the worker count.
pub const THREADS_VAR: &str = "IBPDCA_THREADS";

#[derive(Debug, Clone, PartialEq)]
pub struct RowStats {
    pub rse: f64,
    pub seconds: f64,
    pub iters: f64,
    pub rank: f64,
    pub converged: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub sr: f64,
    pub dims: Vec<usize>,
    pub solver: SolverKind,
    pub runs: usize,
    /// Means over seeds, or the first error.
    pub result: std::result::Result<RowStats, String>,
}

impl BenchRow {
    pub fn all_converged(&self) -> bool {
        matches!(&self.result, Ok(s) if s.converged == self.runs)
    }
}

struct Sample {
    rse: f64,
    seconds: f64,
    iters: usize,
    rank: usize,
    converged: bool,
}

fn run_one(
    cfg: &BenchConfig,
    dims: &[usize],
    sr: f64,
    solver: SolverKind,
    seed: u64,
) -> Result<Sample> {
    let g = generate(dims, cfg.rank, sr, seed)?;
    let r = solve(solver, &cfg.params, &g.observed, &g.mask, Some(&g.truth))?;
    Ok(Sample {
        rse: r.rse.unwrap_or(f64::NAN),
        seconds: r.wall_seconds,
        iters: r.iters,
        rank: r.rank,
        converged: r.converged(),
    })
}

/// Worker count from [`THREADS_VAR`], else the available parallelism.
pub fn thread_count() -> usize {
    std::env::var(THREADS_VAR)
        .ok()
        .and_then(|s| s.parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(|| {
            thread::available_parallelism()
                .map(|n| n.get())
                .unwrap_or(1)
        })
}

/// Runs every (sample ratio, size, solver, seed) combination. Failures are kept per row.
pub fn run_bench(cfg: &BenchConfig, threads: usize) -> Vec<BenchRow> {
    let mut rows = Vec::new();
    for &sr in &cfg.sample_ratios {
        for dims in &cfg.sizes {
            for &solver in &cfg.solvers {
                rows.push((sr, dims.clone(), solver));
            }
        }
    }
    let jobs: Vec<(usize, u64)> = (0..rows.len())
        .flat_map(|r| cfg.seeds.iter().map(move |&s| (r, s)))
        .collect();
    let results: Mutex<Vec<Option<std::result::Result<Sample, String>>>> =
        Mutex::new((0..jobs.len()).map(|_| None).collect());
    let next = AtomicUsize::new(0);
    thread::scope(|scope| {
        for _ in 0..threads.max(1).min(jobs.len()) {
            scope.spawn(|| loop {
                let j = next.fetch_add(1, Ordering::Relaxed);
                let Some(&(r, seed)) = jobs.get(j) else { break };
                let (sr, dims, solver) = &rows[r];
                let out = run_one(cfg, dims, *sr, *solver, seed).map_err(|e| format!("{e:#}"));
                results.lock().unwrap()[j] = Some(out);
            });
        }
    });
    let results = results.into_inner().unwrap();

    let per_row = cfg.seeds.len();
    rows.into_iter()
        .enumerate()
        .map(|(r, (sr, dims, solver))| {
            let samples = &results[r * per_row..(r + 1) * per_row];
            let mut ok = Vec::new();
            let mut err = None;
            for s in samples {
                match s.as_ref().expect("every job ran") {
                    Ok(s) => ok.push(s),
                    Err(e) => {
                        err.get_or_insert_with(|| e.clone());
                    }
                }
            }
            let result = match err {
                Some(e) => Err(e),
                None => {
                    let n = ok.len() as f64;
                    let mean =
                        |f: &dyn Fn(&Sample) -> f64| ok.iter().map(|s| f(s)).sum::<f64>() / n;
                    Ok(RowStats {
                        rse: mean(&|s| s.rse),
                        seconds: mean(&|s| s.seconds),
                        iters: mean(&|s| s.iters as f64),
                        rank: mean(&|s| s.rank as f64),
                        converged: ok.iter().filter(|s| s.converged).count(),
                    })
                }
            };
            BenchRow {
                sr,
                dims,
                solver,
                runs: per_row,
                result,
            }
        })
        .collect()
}

fn dims_label(d: &[usize]) -> String {
    let parts: Vec<String> = d.iter().map(usize::to_string).collect();
    format!("({})", parts.join(","))
}

fn status(row: &BenchRow) -> String {
    match &row.result {
        Ok(s) => format!("{}/{} converged", s.converged, row.runs),
        Err(e) => format!("error: {e}"),
    }
}

pub fn markdown_table(rows: &[BenchRow]) -> String {
    let mut out = String::from(
        "| sr | size | solver | RSE | Time(s) | Iter | rank | status |\n\
         |---|---|---|---|---|---|---|---|\n",
    );
    for row in rows {
        let (rse, secs, iters, rank) = match &row.result {
            Ok(s) => (
                format!("{:.2e}", s.rse),
                format!("{:.2}", s.seconds),
                format!("{:.1}", s.iters),
                format!("{:.1}", s.rank),
            ),
            Err(_) => Default::default(),
        };
        writeln!(
            out,
            "| {} | {} | {} | {} | {} | {} | {} | {} |",
            row.sr,
            dims_label(&row.dims),
            row.solver.name(),
            rse,
            secs,
            iters,
            rank,
            status(row)
        )
        .unwrap();
    }
    out
}

fn csv_escape(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn csv_table(rows: &[BenchRow]) -> String {
    let mut out = String::from("sr,size,solver,rse,time_s,iters,rank,converged,runs,error\n");
    for row in rows {
        let size = row
            .dims
            .iter()
            .map(usize::to_string)
            .collect::<Vec<_>>()
            .join("x");
        let cells = match &row.result {
            Ok(s) => format!(
                "{:e},{:e},{},{},{},{},",
                s.rse, s.seconds, s.iters, s.rank, s.converged, row.runs
            ),
            Err(e) => format!(",,,,,{},{}", row.runs, csv_escape(e)),
        };
        writeln!(out, "{},{},{},{}", row.sr, size, row.solver.name(), cells).unwrap();
    }
    out
}
