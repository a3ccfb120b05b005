//! Result rendering: aligned table, CSV, JSON, and the per-iterate trace.

use std::io::{self, Write};

use fracroot_core::expr::SystemF;
use fracroot_core::linalg::norm2;
use fracroot_core::solvers::{Outcome, RunRecord};
use fracroot_core::sweep::RootRegistry;
use fracroot_core::Complex64;
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RootRow {
    pub m: usize,
    pub alpha: f64,
    /// `[re, im]` per component.
    pub x: Vec<[f64; 2]>,
    pub step_norm: f64,
    pub residual: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct RunCounts {
    pub converged: usize,
    pub diverged: usize,
    pub exhausted: usize,
}

impl RunCounts {
    pub fn tally(records: &[RunRecord]) -> RunCounts {
        let mut c = RunCounts::default();
        for r in records {
            match r.outcome {
                Outcome::Converged => c.converged += 1,
                Outcome::Diverged => c.diverged += 1,
                Outcome::Exhausted => c.exhausted += 1,
            }
        }
        c
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub problem: String,
    pub method: String,
    pub runs: RunCounts,
    pub roots: Vec<RootRow>,
}

impl Report {
    /// Rows in registry order. Residuals are recomputed from the roots.
    pub fn new(problem: &str, method: &str, f: &SystemF, registry: &RootRegistry, records: &[RunRecord]) -> Report {
        let roots = registry
            .entries()
            .iter()
            .enumerate()
            .map(|(i, e)| RootRow {
                m: i + 1,
                alpha: e.alpha,
                x: e.root.iter().map(|z| [z.re, z.im]).collect(),
                step_norm: e.step_norm,
                residual: f.eval(&e.root).map(|v| norm2(&v)).unwrap_or(f64::INFINITY),
                iterations: e.iterations,
            })
            .collect();
        Report {
            problem: problem.to_string(),
            method: method.to_string(),
            runs: RunCounts::tally(records),
            roots,
        }
    }

    fn dim(&self) -> usize {
        self.roots.first().map_or(0, |r| r.x.len())
    }
}

/// `a + bi` / `a - bi` with 8 decimals; the imaginary part is left out when
/// it rounds to zero.
pub fn fmt_complex(re: f64, im: f64) -> String {
    let im_str = format!("{:.8}", im.abs());
    if im_str.trim_start_matches(['0', '.']).is_empty() {
        return format!("{re:.8}");
    }
    let sign = if im < 0.0 { '-' } else { '+' };
    format!("{re:.8} {sign} {im_str}i")
}

pub fn write_table(out: &mut (impl Write + ?Sized), report: &Report) -> io::Result<()> {
    let n = report.dim().max(1);
    let mut header = vec!["m".to_string(), "α_m".to_string()];
    header.extend((1..=n).map(|j| if n == 1 { "ξ".to_string() } else { format!("ξ_{j}") }));
    header.extend(["‖ξ_m − ξ_{m−1}‖₂", "‖f(ξ)‖₂", "R_m"].map(String::from));

    let rows: Vec<Vec<String>> = report
        .roots
        .iter()
        .map(|r| {
            let mut row = vec![r.m.to_string(), format!("{:.8}", r.alpha)];
            row.extend(r.x.iter().map(|[re, im]| fmt_complex(*re, *im)));
            row.push(format!("{:.8e}", r.step_norm));
            row.push(format!("{:.8e}", r.residual));
            row.push(r.iterations.to_string());
            row
        })
        .collect();

    let width = |s: &str| s.chars().count();
    let mut widths: Vec<usize> = header.iter().map(|h| width(h)).collect();
    for row in &rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(width(cell));
        }
    }
    let line = |cells: &[String]| {
        cells
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{}{c}", " ".repeat(w - width(c))))
            .collect::<Vec<_>>()
            .join("  ")
    };
    writeln!(out, "{}", line(&header))?;
    writeln!(out, "{}", "-".repeat(widths.iter().sum::<usize>() + 2 * (widths.len() - 1)))?;
    for row in &rows {
        writeln!(out, "{}", line(row))?;
    }
    writeln!(
        out,
        "{}: {} roots from {} runs ({} converged, {} diverged, {} exhausted)",
        report.problem,
        report.roots.len(),
        report.runs.converged + report.runs.diverged + report.runs.exhausted,
        report.runs.converged,
        report.runs.diverged,
        report.runs.exhausted
    )
}

pub fn write_csv(out: &mut (impl Write + ?Sized), report: &Report) -> io::Result<()> {
    let n = report.dim();
    let mut header = vec!["m".to_string(), "alpha".to_string()];
    for j in 1..=n {
        header.push(format!("re_{j}"));
        header.push(format!("im_{j}"));
    }
    header.extend(["step_norm", "residual", "iterations"].map(String::from));
    writeln!(out, "{}", header.join(","))?;
    for r in &report.roots {
        let mut cells = vec![r.m.to_string(), r.alpha.to_string()];
        for [re, im] in &r.x {
            cells.push(re.to_string());
            cells.push(im.to_string());
        }
        cells.push(r.step_norm.to_string());
        cells.push(r.residual.to_string());
        cells.push(r.iterations.to_string());
        writeln!(out, "{}", cells.join(","))?;
    }
    Ok(())
}

pub fn write_json(out: &mut (impl Write + ?Sized), report: &Report) -> io::Result<()> {
    serde_json::to_writer_pretty(&mut *out, report)?;
    writeln!(out)
}

/// One CSV row per iterate of every traced run, prefixed by the run's
/// nominal order.
pub fn write_trace(out: &mut (impl Write + ?Sized), n: usize, records: &[RunRecord]) -> io::Result<()> {
    let mut header = vec!["alpha".to_string(), "iteration".to_string(), "alpha_eff".to_string()];
    for j in 1..=n {
        header.push(format!("re_{j}"));
        header.push(format!("im_{j}"));
    }
    header.push("residual".to_string());
    writeln!(out, "{}", header.join(","))?;
    for rec in records {
        for row in rec.trace.iter().flatten() {
            write!(out, "{},{},{}", rec.alpha, row.iteration, row.alpha_eff)?;
            for z in &row.x {
                write!(out, ",{},{}", z.re, z.im)?;
            }
            writeln!(out, ",{}", row.residual)?;
        }
    }
    Ok(())
}

pub fn complex_from_pair([re, im]: [f64; 2]) -> Complex64 {
    Complex64::new(re, im)
}
