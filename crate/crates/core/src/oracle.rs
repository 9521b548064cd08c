//! Brute-force cross-checks for the analytic solver.
//!
//! Nothing here reuses the closed-form phase solutions: the beam oracle only
//! evaluates the SNR relation and the reduced load, and the Monte Carlo
//! detector simulates pulses rather than evaluating the detection equation.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, Gamma, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use crate::detection::{DetectionContext, SwerlingCase};
use crate::error::{Constraint, Error, Result};
use crate::lattice::{reduced_load, snr_ratio, NormalizedBounds, RadarScenario};
use crate::solver::{spacing_phase01, spacing_phase23, BeamSubproblemSolution, PhaseBoundaries};

/// Linear axis `[lo, hi]` sampled at `points` equally spaced values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Axis {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
}

impl Axis {
    pub fn value(&self, i: usize) -> f64 {
        if self.points == 1 {
            return self.lo;
        }
        self.lo + (self.hi - self.lo) * i as f64 / (self.points - 1) as f64
    }

    pub fn step(&self) -> f64 {
        (self.hi - self.lo) / (self.points.max(2) - 1) as f64
    }
}

/// Per-variable grid. The `r_S` equality removes one degree of freedom, so the
/// constraint surface is scanned in three charts, each gridding two variables
/// and solving for the third.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridSpec {
    pub r_theta: Axis,
    pub eps: Axis,
    pub r_d: Axis,
    pub r_s_step: f64,
}

impl GridSpec {
    /// Covers the variable bounds in `r_theta` and `r_d`, and the analytic
    /// spacing range `[eps_2->3, eps_0->1]` padded by 1% on each side.
    pub fn covering(bounds: &NormalizedBounds, scenario: &RadarScenario, points: usize) -> Self {
        let lo = spacing_phase23(scenario).min(spacing_phase01(scenario));
        let hi = spacing_phase23(scenario).max(spacing_phase01(scenario));
        Self {
            r_theta: Axis { lo: bounds.r_theta_min, hi: bounds.r_theta_max, points },
            eps: Axis { lo: lo * 0.99, hi: hi * 1.01, points },
            r_d: Axis { lo: bounds.r_d_min, hi: bounds.r_d_max, points },
            r_s_step: 0.1,
        }
    }

    fn check(&self) -> Result<()> {
        for (name, axis) in [("r_theta", self.r_theta), ("eps", self.eps), ("r_d", self.r_d)] {
            if axis.points < 64 {
                return Err(Error::domain(format!("{name} grid needs at least 64 points, got {}", axis.points)));
            }
            if !(axis.lo > 0.0 && axis.hi >= axis.lo) {
                return Err(Error::domain(format!("{name} grid range [{}, {}] is invalid", axis.lo, axis.hi)));
            }
        }
        Ok(())
    }
}

/// Which variable a chart solves for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Chart {
    SolveRd,
    SolveEps,
    SolveTheta,
}

/// Best grid point together with the grid spacing it was found on.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridOptimum {
    pub r_theta: f64,
    pub eps: f64,
    pub r_d: f64,
    pub l_tilde: f64,
    pub chart: Chart,
    pub r_theta_step: f64,
    pub eps_step: f64,
    pub r_d_step: f64,
    pub feasible_points: usize,
}

type Candidate = (f64, f64, f64, f64);

fn within(v: f64, axis: &Axis) -> bool {
    v >= axis.lo * (1.0 - 1e-12) && v <= axis.hi * (1.0 + 1e-12)
}

/// Minimum over one chart: rows of `outer` in parallel, reduced in row order
/// so ties resolve the same way on any thread count.
fn scan_chart<F>(outer: &Axis, inner: &Axis, point: F) -> (Option<Candidate>, usize)
where
    F: Fn(f64, f64) -> Option<Candidate> + Sync,
{
    let rows: Vec<(Option<Candidate>, usize)> = (0..outer.points)
        .into_par_iter()
        .map(|i| {
            let u = outer.value(i);
            let mut best: Option<Candidate> = None;
            let mut count = 0;
            for j in 0..inner.points {
                if let Some(c) = point(u, inner.value(j)) {
                    count += 1;
                    if best.map_or(true, |b| c.3 < b.3) {
                        best = Some(c);
                    }
                }
            }
            (best, count)
        })
        .collect();
    let mut best: Option<Candidate> = None;
    let mut total = 0;
    for (row, count) in rows {
        total += count;
        if let Some(r) = row {
            if best.map_or(true, |b| r.3 < b.3) {
                best = Some(r);
            }
        }
    }
    (best, total)
}

/// Exhaustive minimum of the reduced load over the `r_s` level set.
pub fn grid_beam_optimum(r_s: f64, scenario: &RadarScenario, grid: &GridSpec) -> Result<GridOptimum> {
    grid.check()?;
    if !(r_s > 0.0) {
        return Err(Error::domain(format!("r_s must be positive, got {r_s}")));
    }
    let q = scenario.q;
    let p = scenario.p;
    let c = scenario.spacing_loss_coeff();
    let (t_axis, e_axis, d_axis) = (&grid.r_theta, &grid.eps, &grid.r_d);
    let ln_rs = r_s.ln();
    let charts = [
        (
            Chart::SolveRd,
            scan_chart(t_axis, e_axis, |r_theta, eps| {
                let r_d = r_s / snr_ratio(r_theta, eps, 1.0, scenario);
                within(r_d, d_axis).then(|| (r_theta, eps, r_d, reduced_load(r_theta, eps, r_d, q)))
            }),
        ),
        (
            Chart::SolveEps,
            scan_chart(t_axis, d_axis, |r_theta, r_d| {
                let u = (r_d.ln() - p * r_theta.ln() - ln_rs) / c;
                (u > 0.0).then(|| {
                    let eps = u.sqrt();
                    (r_theta, eps, r_d, reduced_load(r_theta, eps, r_d, q))
                })
            }),
        ),
        (
            Chart::SolveTheta,
            scan_chart(e_axis, d_axis, |eps, r_d| {
                let r_theta = ((r_d.ln() - c * eps * eps - ln_rs) / p).exp();
                within(r_theta, t_axis).then(|| (r_theta, eps, r_d, reduced_load(r_theta, eps, r_d, q)))
            }),
        ),
    ];
    let mut best: Option<(Chart, Candidate)> = None;
    let mut feasible_points = 0;
    for (chart, (cand, count)) in charts {
        feasible_points += count;
        if let Some(c) = cand {
            if best.map_or(true, |(_, b)| c.3 < b.3) {
                best = Some((chart, c));
            }
        }
    }
    let (chart, (r_theta, eps, r_d, l_tilde)) = best.ok_or_else(|| {
        Error::infeasible(Constraint::VariableBound, format!("r_S = {r_s} is not attainable on the grid"))
    })?;
    Ok(GridOptimum {
        r_theta,
        eps,
        r_d,
        l_tilde,
        chart,
        r_theta_step: t_axis.step(),
        eps_step: e_axis.step(),
        r_d_step: d_axis.step(),
        feasible_points,
    })
}

/// Five `r_S` values strictly inside each phase, evenly spaced in log scale.
pub fn phase_samples(edges: &PhaseBoundaries, per_phase: usize) -> Vec<f64> {
    let spans = [(edges.r_s0, edges.r_s1), (edges.r_s1, edges.r_s2), (edges.r_s2, edges.r_s3)];
    let mut out = Vec::with_capacity(3 * per_phase);
    for (lo, hi) in spans {
        for k in 1..=per_phase {
            let t = k as f64 / (per_phase + 1) as f64;
            out.push(lo * (hi / lo).powf(t));
        }
    }
    out
}

/// Comparison of one analytic solution against the grid oracle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BeamComparison {
    pub r_s: f64,
    pub analytic: BeamSubproblemSolution,
    pub grid: GridOptimum,
    /// `(grid - analytic) / analytic` reduced load; never negative up to rounding.
    pub load_gap: f64,
    /// Distances in units of the local grid step.
    pub r_theta_cells: f64,
    pub eps_cells: f64,
    pub r_d_cells: f64,
}

impl BeamComparison {
    pub fn new(analytic: BeamSubproblemSolution, grid: GridOptimum, r_s: f64) -> Self {
        Self {
            r_s,
            load_gap: (grid.l_tilde - analytic.l_tilde) / analytic.l_tilde,
            r_theta_cells: (grid.r_theta - analytic.r_theta).abs() / grid.r_theta_step,
            eps_cells: (grid.eps - analytic.eps).abs() / grid.eps_step,
            r_d_cells: (grid.r_d - analytic.r_d).abs() / grid.r_d_step,
            analytic,
            grid,
        }
    }
}

/// Stationarity and sign residuals of the KKT system in `(ln r_theta, eps, ln r_d)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KktReport {
    /// Multiplier of the SNR equality.
    pub lambda: f64,
    /// Largest stationarity residual over free coordinates.
    pub stationarity: f64,
    /// Largest wrong-signed bound multiplier (0 when all signs are right).
    pub sign_violation: f64,
}

fn central<F: Fn(f64) -> f64>(f: F, x: f64, h: f64) -> f64 {
    (f(x + h) - f(x - h)) / (2.0 * h)
}

/// Checks first-order optimality of `sol` with finite-difference gradients.
pub fn kkt_check(
    sol: &BeamSubproblemSolution,
    bounds: &NormalizedBounds,
    scenario: &RadarScenario,
    h: f64,
) -> KktReport {
    let q = scenario.q;
    let (lt, e, ld) = (sol.r_theta.ln(), sol.eps, sol.r_d.ln());
    let obj = |lt: f64, e: f64, ld: f64| reduced_load(lt.exp(), e, ld.exp(), q).ln();
    let con = |lt: f64, e: f64, ld: f64| snr_ratio(lt.exp(), e, ld.exp(), scenario).ln();
    let grad = |f: &dyn Fn(f64, f64, f64) -> f64| {
        [
            central(|x| f(x, e, ld), lt, h),
            central(|x| f(lt, x, ld), e, h),
            central(|x| f(lt, e, x), ld, h),
        ]
    };
    let gf = grad(&obj);
    let gc = grad(&con);
    // eps is never at a bound, so its row fixes the multiplier.
    let lambda = gf[1] / gc[1];
    let mut stationarity: f64 = 0.0;
    let mut sign_violation: f64 = 0.0;
    let at = |v: f64, b: f64| (v - b).abs() <= 1e-9 * b.abs().max(1.0);
    let rows = [
        (0, sol.r_theta, bounds.r_theta_min, bounds.r_theta_max),
        (2, sol.r_d, bounds.r_d_min, bounds.r_d_max),
    ];
    for (k, v, lo, hi) in rows {
        // Multiplier of the bound: grad f - lambda grad g = nu.
        let nu = gf[k] - lambda * gc[k];
        if at(v, lo) {
            sign_violation = sign_violation.max(-nu);
        } else if at(v, hi) {
            sign_violation = sign_violation.max(nu);
        } else {
            stationarity = stationarity.max(nu.abs());
        }
    }
    KktReport { lambda, stationarity, sign_violation }
}

/// Samples pairs of feasible points of the `r_s` level set in the convex
/// coordinates `(ln r_theta, eps^2, ln r_d)` and returns the largest amount by
/// which the log-load at a midpoint exceeds the chord.
pub fn convexity_midpoint_gap(
    r_s: f64,
    bounds: &NormalizedBounds,
    scenario: &RadarScenario,
    pairs: usize,
    seed: u64,
) -> f64 {
    let c = scenario.spacing_loss_coeff();
    let p = scenario.p;
    let q = scenario.q as f64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (t_lo, t_hi) = (bounds.r_theta_min.ln(), bounds.r_theta_max.ln());
    let (d_lo, d_hi) = (bounds.r_d_min.ln(), bounds.r_d_max.ln());
    // On the level set eps^2 = (ln r_d - p ln r_theta - ln r_s) / c.
    let draw = |rng: &mut ChaCha8Rng| loop {
        let lt = rng.random_range(t_lo..=t_hi);
        let ld = rng.random_range(d_lo..=d_hi);
        let u = (ld - p * lt - r_s.ln()) / c;
        if u > 0.0 {
            return (lt, u, ld);
        }
    };
    let f = |(lt, u, ld): (f64, f64, f64)| -q * lt + ld - 0.5 * q * u.ln();
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..pairs {
        let a = draw(&mut rng);
        let b = draw(&mut rng);
        let mid = (0.5 * (a.0 + b.0), 0.5 * (a.1 + b.1), 0.5 * (a.2 + b.2));
        worst = worst.max(f(mid) - 0.5 * (f(a) + f(b)));
    }
    worst
}

/// Monte Carlo detection-rate estimate with its binomial standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McEstimate {
    pub p: f64,
    pub std_err: f64,
    pub trials: u64,
}

pub const MIN_MC_TRIALS: u64 = 100_000;
const MC_CHUNK: u64 = 1 << 14;

/// Square-law, noncoherently integrated detector against a fluctuating target.
/// Each chunk of trials draws from its own ChaCha stream, so the estimate does
/// not depend on how chunks are scheduled.
pub fn mc_pd(s: f64, ctx: &DetectionContext, trials: u64, seed: u64) -> Result<McEstimate> {
    if trials < MIN_MC_TRIALS {
        return Err(Error::domain(format!("Monte Carlo needs at least {MIN_MC_TRIALS} trials, got {trials}")));
    }
    if !(s >= 0.0 && s.is_finite()) {
        return Err(Error::domain(format!("SNR must be non-negative, got {s}")));
    }
    let n = ctx.n_cpi();
    let threshold = ctx.threshold();
    let case = ctx.swerling();
    let chunks = trials.div_ceil(MC_CHUNK);
    let hits: u64 = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(chunk);
            let size = MC_CHUNK.min(trials - chunk * MC_CHUNK);
            let mut hits = 0u64;
            for _ in 0..size {
                let mut sigma = 0.0;
                let mut stat = 0.0;
                for k in 0..n {
                    if k == 0 || !case.is_scan_to_scan() {
                        sigma = draw_rcs(case, s, &mut rng);
                    }
                    let re: f64 = rng.sample(StandardNormal);
                    let im: f64 = rng.sample(StandardNormal);
                    let x = re + (2.0 * sigma).sqrt();
                    stat += x * x + im * im;
                }
                if stat > threshold {
                    hits += 1;
                }
            }
            hits
        })
        .sum();
    let p = hits as f64 / trials as f64;
    let std_err = (p * (1.0 - p) / trials as f64).sqrt();
    Ok(McEstimate { p, std_err, trials })
}

fn draw_rcs(case: SwerlingCase, s: f64, rng: &mut ChaCha8Rng) -> f64 {
    if s == 0.0 {
        return 0.0;
    }
    if case.is_chi_square_four() {
        Gamma::new(2.0, s / 2.0).expect("positive shape and scale").sample(rng)
    } else {
        Exp::new(1.0 / s).expect("positive rate").sample(rng)
    }
}

/// Settings of the `verify` run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VerifyOptions {
    pub grid_points: usize,
    pub per_phase: usize,
    pub load_tol: f64,
    pub mc_trials: u64,
    pub mc_snrs: [f64; 3],
    /// Allowed Monte Carlo deviation in standard errors.
    pub mc_sigmas: f64,
    pub seed: u64,
    /// Multiplies the analytic spacing before comparison. Negative control only.
    pub perturb_eps: f64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            grid_points: 400,
            per_phase: 5,
            load_tol: 5e-3,
            mc_trials: 1_000_000,
            mc_snrs: [1.0, 5.0, 20.0],
            mc_sigmas: 3.0,
            seed: 1,
            perturb_eps: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BeamCheck {
    pub comparison: BeamComparison,
    pub kkt: KktReport,
    pub passed: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McCheck {
    pub s: f64,
    pub analytic: f64,
    pub estimate: McEstimate,
    /// `|estimate - analytic|` in standard errors.
    pub sigmas: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub options: VerifyOptions,
    pub beam: Vec<BeamCheck>,
    pub monte_carlo: Vec<McCheck>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.beam.iter().all(|c| c.passed) && self.monte_carlo.iter().all(|c| c.passed)
    }

    pub fn max_load_gap(&self) -> f64 {
        self.beam.iter().map(|c| c.comparison.load_gap).fold(0.0, f64::max)
    }

    /// Plain-text report; contains no timings, so equal inputs give equal bytes.
    pub fn render(&self) -> String {
        use std::fmt::Write as _;
        let mut s = String::new();
        let _ = writeln!(s, "beam subproblem: analytic vs {0}x{0} grid", self.options.grid_points);
        let _ = writeln!(s, "{:>14} {:>6} {:>12} {:>9} {:>9} {:>9} {:>11} {:>11}  status", "r_S", "phase", "load gap", "theta cl", "eps cl", "r_d cl", "kkt stat", "kkt sign");
        for c in &self.beam {
            let b = &c.comparison;
            let _ = writeln!(
                s,
                "{:>14.8} {:>6} {:>12.4e} {:>9.3} {:>9.3} {:>9.3} {:>11.3e} {:>11.3e}  {}",
                b.r_s,
                b.analytic.phase.to_string(),
                b.load_gap,
                b.r_theta_cells,
                b.eps_cells,
                b.r_d_cells,
                c.kkt.stationarity,
                c.kkt.sign_violation,
                if c.passed { "pass" } else { "FAIL" }
            );
        }
        let _ = writeln!(s, "max load gap = {:.4e} (tolerance {:.1e})", self.max_load_gap(), self.options.load_tol);
        let _ = writeln!(s);
        let _ = writeln!(s, "detection probability: equation vs Monte Carlo ({} trials, seed {})", self.options.mc_trials, self.options.seed);
        for c in &self.monte_carlo {
            let _ = writeln!(
                s,
                "s = {:>6.2}  pd = {:.6}  mc = {:.6} +- {:.2e}  ({:.2} se)  {}",
                c.s,
                c.analytic,
                c.estimate.p,
                c.estimate.std_err,
                c.sigmas,
                if c.passed { "pass" } else { "FAIL" }
            );
        }
        let _ = writeln!(s);
        match self.worst() {
            None => {
                let _ = writeln!(s, "PASS");
            }
            Some(w) => {
                let _ = writeln!(s, "FAIL: worst offender {w}");
            }
        }
        s
    }

    /// Description of the largest failure, if any.
    pub fn worst(&self) -> Option<String> {
        let beam = self
            .beam
            .iter()
            .filter(|c| !c.passed)
            .max_by(|a, b| a.comparison.load_gap.abs().total_cmp(&b.comparison.load_gap.abs()));
        if let Some(c) = beam {
            let b = &c.comparison;
            return Some(format!(
                "beam subproblem at r_S = {:.6}: load gap {:.3e}, off by {:.2} / {:.2} / {:.2} cells in r_theta / eps / r_d",
                b.r_s, b.load_gap, b.r_theta_cells, b.eps_cells, b.r_d_cells
            ));
        }
        self.monte_carlo
            .iter()
            .filter(|c| !c.passed)
            .max_by(|a, b| a.sigmas.total_cmp(&b.sigmas))
            .map(|c| {
                format!(
                    "Monte Carlo at s = {}: pd = {:.6}, estimate {:.6} ({:.1} standard errors)",
                    c.s, c.analytic, c.estimate.p, c.sigmas
                )
            })
    }
}

/// Runs the grid, KKT and Monte Carlo checks for one problem.
pub fn verify(
    scenario: &RadarScenario,
    bounds: &NormalizedBounds,
    detection: &DetectionContext,
    options: &VerifyOptions,
) -> Result<VerifyReport> {
    let edges = PhaseBoundaries::new(bounds, scenario);
    let grid = GridSpec::covering(bounds, scenario, options.grid_points);
    let mut beam = Vec::new();
    for r in phase_samples(&edges, options.per_phase) {
        let mut analytic = crate::solver::solve_beam_subproblem(r, bounds, scenario)?;
        if options.perturb_eps != 1.0 {
            analytic.eps *= options.perturb_eps;
            analytic.l_tilde = reduced_load(analytic.r_theta, analytic.eps, analytic.r_d, scenario.q);
        }
        let g = grid_beam_optimum(r, scenario, &grid)?;
        let comparison = BeamComparison::new(analytic, g, r);
        let kkt = kkt_check(&analytic, bounds, scenario, 1e-6);
        let passed = comparison.load_gap.abs() <= options.load_tol
            && comparison.r_theta_cells <= 1.0
            && comparison.eps_cells <= 1.0
            && comparison.r_d_cells <= 1.0
            && kkt.stationarity <= 1e-4
            && kkt.sign_violation <= 1e-4;
        beam.push(BeamCheck { comparison, kkt, passed });
    }
    let mut monte_carlo = Vec::new();
    for (k, &s) in options.mc_snrs.iter().enumerate() {
        let analytic = crate::detection::pd(s, detection)?;
        let estimate = mc_pd(s, detection, options.mc_trials, options.seed.wrapping_add(k as u64))?;
        let sigmas = (estimate.p - analytic).abs() / estimate.std_err.max(f64::MIN_POSITIVE);
        monte_carlo.push(McCheck { s, analytic, estimate, sigmas, passed: sigmas <= options.mc_sigmas });
    }
    Ok(VerifyReport { options: *options, beam, monte_carlo })
}
