//! Per-iteration trace as CSV. Cells a solver does not record are left empty.

use std::fmt::Write as _;

use ibpdca_core::solver::SolverTrace;

pub const COLUMNS: [&str; 10] = [
    "k",
    "phi",
    "theta",
    "theta_hat",
    "step_x",
    "step_xi",
    "upsilon",
    "alpha",
    "rel_change",
    "xi_norm",
];

/// Extra columns when the trace carries inner-solver counts.
pub const INNER_COLUMNS: [&str; 2] = ["inner_iters", "inner_residual"];

fn opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:e}")).unwrap_or_default()
}

/// Row 0 holds the starting point when the trace records it.
pub fn trace_csv(trace: &SolverTrace) -> String {
    let inner = trace.records.iter().any(|r| r.inner_iters.is_some());
    let mut header: Vec<&str> = COLUMNS.to_vec();
    if inner {
        header.extend(INNER_COLUMNS);
    }
    let mut out = header.join(",");
    out.push('\n');
    if let Some(init) = &trace.initial {
        let mut cells = vec![
            "0".to_string(),
            opt(Some(init.phi)),
            opt(Some(init.theta)),
            opt(Some(init.theta_hat)),
        ];
        cells.resize(header.len(), String::new());
        writeln!(out, "{}", cells.join(",")).unwrap();
    }
    for r in &trace.records {
        let mut cells = vec![
            r.k.to_string(),
            opt(r.phi),
            opt(r.merit.map(|m| m.theta)),
            opt(r.merit.map(|m| m.theta_hat)),
            opt(Some(r.step_x)),
            opt(Some(r.step_xi)),
            opt(r.merit.map(|m| m.upsilon)),
            opt(Some(r.alpha)),
            opt(Some(r.rel_change)),
            opt(Some(r.xi_norm)),
        ];
        if inner {
            cells.push(r.inner_iters.map(|n| n.to_string()).unwrap_or_default());
            cells.push(opt(r.inner_residual));
        }
        writeln!(out, "{}", cells.join(",")).unwrap();
    }
    out
}
