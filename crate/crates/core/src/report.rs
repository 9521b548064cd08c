//! Result files: `result.txt`, `result.json`, `curves.csv`, `sweep.csv`.

use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::References;
use crate::solver::{OptimizationResult, Problem, SweepPoint};

/// Seventeen significant digits, enough to round-trip any `f64`.
pub fn fmt_f64(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        v.to_string()
    }
}

/// The optimum in physical units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Dimensional {
    pub theta_bw_deg: f64,
    pub t_d_s: f64,
    pub t_f_s: f64,
}

impl Dimensional {
    pub fn new(result: &OptimizationResult, refs: &References) -> Self {
        Self {
            theta_bw_deg: (result.params.r_theta * refs.theta_bw0).to_degrees(),
            t_d_s: result.params.r_d * refs.t_d0,
            t_f_s: result.params.r_f * refs.t_f0,
        }
    }
}

#[derive(Serialize)]
struct Summary<'a> {
    eta: f64,
    s0: f64,
    r_s_des: Option<f64>,
    r_theta: f64,
    eps: f64,
    r_d: f64,
    r_f: f64,
    r_s: f64,
    l_s: f64,
    l_tilde: f64,
    phase: String,
    active_constraints: Vec<String>,
    boundaries: &'a crate::solver::PhaseBoundaries,
    references: &'a References,
    dimensional: Dimensional,
}

fn summary<'a>(result: &'a OptimizationResult, refs: &'a References) -> Summary<'a> {
    Summary {
        eta: result.eta,
        s0: result.s0,
        r_s_des: result.r_s_des,
        r_theta: result.params.r_theta,
        eps: result.params.eps,
        r_d: result.params.r_d,
        r_f: result.params.r_f,
        r_s: result.r_s_star,
        l_s: result.l_s_star,
        l_tilde: result.l_tilde_star,
        phase: result.phase.to_string(),
        active_constraints: result.active_constraints.iter().map(|c| format!("{c:?}")).collect(),
        boundaries: &result.boundaries,
        references: refs,
        dimensional: Dimensional::new(result, refs),
    }
}

/// Human-readable summary.
pub fn result_text(problem: &Problem, result: &OptimizationResult) -> String {
    let refs = problem.scenario.references(&problem.bounds);
    let dim = Dimensional::new(result, &refs);
    let b = &result.boundaries;
    let mut s = String::new();
    let _ = writeln!(s, "eta = {:.6}", result.eta);
    let _ = writeln!(s, "S_0 = {:.6} ({:.4} dB)", result.s0, 10.0 * result.s0.log10());
    let _ = writeln!(
        s,
        "phase boundaries: r_S0 = {:.6}, r_S1 = {:.6}, r_S2 = {:.6}, r_S3 = {:.6}",
        b.r_s0, b.r_s1, b.r_s2, b.r_s3
    );
    if let Some(r) = result.r_s_des {
        let _ = writeln!(s, "r_S,des = {r:.6}");
    }
    let _ = writeln!(s);
    let _ = writeln!(s, "r_S*     = {}", fmt_f64(result.r_s_star));
    let _ = writeln!(s, "L_s*     = {}", fmt_f64(result.l_s_star));
    let _ = writeln!(s, "r_theta* = {}", fmt_f64(result.params.r_theta));
    let _ = writeln!(s, "eps*     = {}", fmt_f64(result.params.eps));
    let _ = writeln!(s, "r_d*     = {}", fmt_f64(result.params.r_d));
    let _ = writeln!(s, "r_f*     = {}", fmt_f64(result.params.r_f));
    let _ = writeln!(s, "phase    = {}", result.phase);
    let active: Vec<String> = result.active_constraints.iter().map(|c| c.to_string()).collect();
    let _ = writeln!(s, "active   = {}", active.join("; "));
    let _ = writeln!(s);
    let _ = writeln!(s, "beam width = {:.6} deg", dim.theta_bw_deg);
    let _ = writeln!(s, "dwell time = {:.6} ms", dim.t_d_s * 1e3);
    let _ = writeln!(s, "frame time = {:.6} s", dim.t_f_s);
    s
}

pub fn result_json(problem: &Problem, result: &OptimizationResult) -> String {
    let refs = problem.scenario.references(&problem.bounds);
    serde_json::to_string_pretty(&summary(result, &refs)).expect("summary serializes")
}

pub const CURVE_HEADER: [&str; 9] = ["r_S", "r_theta", "eps", "r_d", "l_tilde", "r_f_star", "r_f", "L_s", "feasible"];

pub fn write_curves<W: Write>(out: W, result: &OptimizationResult) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::Config(format!("writing curves: {e}"));
    w.write_record(CURVE_HEADER).map_err(io)?;
    for c in &result.curves {
        w.write_record([
            fmt_f64(c.r_s),
            fmt_f64(c.beam.r_theta),
            fmt_f64(c.beam.eps),
            fmt_f64(c.beam.r_d),
            fmt_f64(c.beam.l_tilde),
            c.r_f_star.map_or_else(|| "NaN".to_string(), fmt_f64),
            fmt_f64(c.r_f),
            fmt_f64(c.l_s),
            u8::from(c.feasible).to_string(),
        ])
        .map_err(io)?;
    }
    w.flush().map_err(|e| Error::Config(format!("writing curves: {e}")))
}

pub const SWEEP_HEADER: [&str; 7] = ["axis", "value", "r_S", "r_f", "L_s", "phase", "status"];

pub fn write_sweep<W: Write>(out: W, axis: &str, points: &[SweepPoint]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::Config(format!("writing sweep: {e}"));
    w.write_record(SWEEP_HEADER).map_err(io)?;
    for p in points {
        let row = match &p.outcome {
            Ok(o) => [
                axis.to_string(),
                fmt_f64(p.value),
                fmt_f64(o.r_s_star),
                fmt_f64(o.r_f_star),
                fmt_f64(o.l_s_star),
                o.phase.to_string(),
                "ok".to_string(),
            ],
            Err(msg) => [
                axis.to_string(),
                fmt_f64(p.value),
                "NaN".into(),
                "NaN".into(),
                "NaN".into(),
                String::new(),
                format!("infeasible: {msg}"),
            ],
        };
        w.write_record(&row).map_err(io)?;
    }
    w.flush().map_err(|e| Error::Config(format!("writing sweep: {e}")))
}

/// Writes `result.txt`, `result.json` and `curves.csv` into `dir`.
pub fn write_optimization(dir: &Path, problem: &Problem, result: &OptimizationResult) -> Result<()> {
    let io = |e: std::io::Error| Error::Config(format!("{}: {e}", dir.display()));
    std::fs::create_dir_all(dir).map_err(io)?;
    std::fs::write(dir.join("result.txt"), result_text(problem, result)).map_err(io)?;
    std::fs::write(dir.join("result.json"), result_json(problem, result)).map_err(io)?;
    let file = std::fs::File::create(dir.join("curves.csv")).map_err(io)?;
    write_curves(std::io::BufWriter::new(file), result)
}
