//! Minimum-load search optimization by decomposition.
//!
//! For a fixed worst-point SNR ratio `r_S` the problem splits in two:
//!
//! * the `(r_theta, eps, r_d)` subproblem minimizes the reduced load
//!   `r_theta^-q r_d eps^-q` on the `r_S` level set, and has a closed-form
//!   solution in each of three phases;
//! * the `r_f` subproblem maximizes the frame time ratio subject to the
//!   cumulative detection requirement, which binds with equality because the
//!   cumulative probability decreases in `r_f`.
//!
//! What remains is a line search over `r_S` itself.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

use crate::cumulative::{p_c, CumulativeContext, DEFAULT_PD_FLOOR, DEFAULT_QUAD_TOL};
use crate::detection::{required_snr, DetectionContext, SwerlingCase};
use crate::error::{Constraint, Error, Result};
use crate::lattice::{eta, reduced_load, BeamParams, NormalizedBounds, RadarScenario};
use crate::polyfit::Polynomial;
use crate::search::{bisect, golden_section, Bracket};

/// Regime of the analytic beam-subproblem optimum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Phase {
    /// Minimum dwell, beam width shrinking, constant spacing.
    Phase01,
    /// Beam width and dwell both at their minima, spacing tightening.
    Phase12,
    /// Minimum beam width, dwell growing, constant spacing.
    Phase23,
}

impl std::fmt::Display for Phase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Phase::Phase01 => "0->1",
            Phase::Phase12 => "1->2",
            Phase::Phase23 => "2->3",
        })
    }
}

/// `r_S` values at which the optimal bound pattern changes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhaseBoundaries {
    pub r_s0: f64,
    pub r_s1: f64,
    pub r_s2: f64,
    pub r_s3: f64,
}

impl PhaseBoundaries {
    pub fn new(bounds: &NormalizedBounds, scenario: &RadarScenario) -> Self {
        let p = scenario.p;
        let q = scenario.q as f64;
        let theta_min_p = bounds.r_theta_min.powf(-p);
        Self {
            r_s0: bounds.r_theta_max.powf(-p) * bounds.r_d_min * (-p / 2.0).exp(),
            r_s1: theta_min_p * bounds.r_d_min * (-p / 2.0).exp(),
            r_s2: theta_min_p * bounds.r_d_min * (-q / 2.0).exp(),
            r_s3: theta_min_p * bounds.r_d_max * (-q / 2.0).exp(),
        }
    }

    /// Phase of `r_s`; values on a transition point go to the lower phase.
    pub fn phase_of(&self, r_s: f64) -> Option<Phase> {
        if !(r_s >= self.r_s0 && r_s <= self.r_s3) {
            None
        } else if r_s <= self.r_s1 {
            Some(Phase::Phase01)
        } else if r_s <= self.r_s2 {
            Some(Phase::Phase12)
        } else {
            Some(Phase::Phase23)
        }
    }
}

/// Optimal spacing ratio while the dwell sits at its minimum and the beam width is free.
pub fn spacing_phase01(scenario: &RadarScenario) -> f64 {
    (scenario.p / (2.0 * scenario.spacing_loss_coeff())).sqrt()
}

/// Optimal spacing ratio while the beam width sits at its minimum and the dwell is free.
pub fn spacing_phase23(scenario: &RadarScenario) -> f64 {
    (scenario.q as f64 / (2.0 * scenario.spacing_loss_coeff())).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BeamSubproblemSolution {
    pub r_theta: f64,
    pub eps: f64,
    pub r_d: f64,
    /// Reduced load `r_theta^-q r_d eps^-q`.
    pub l_tilde: f64,
    pub phase: Phase,
}

/// Closed-form minimum of the reduced load on the `r_s` level set.
pub fn solve_beam_subproblem(
    r_s: f64,
    bounds: &NormalizedBounds,
    scenario: &RadarScenario,
) -> Result<BeamSubproblemSolution> {
    let edges = PhaseBoundaries::new(bounds, scenario);
    let phase = edges.phase_of(r_s).ok_or_else(|| {
        let detail = if r_s > edges.r_s3 {
            format!("r_S = {r_s} exceeds r_S3 = {} (maximum dwell at minimum beam width)", edges.r_s3)
        } else {
            format!("r_S = {r_s} is below r_S0 = {} (maximum beam width at minimum dwell)", edges.r_s0)
        };
        Error::infeasible(Constraint::VariableBound, detail)
    })?;
    Ok(solve_in_phase(phase, r_s, bounds, scenario))
}

/// Closed form of one phase evaluated at `r_s`, without checking that `r_s`
/// belongs to it. Adjacent phases agree at their common transition point.
pub fn solve_in_phase(
    phase: Phase,
    r_s: f64,
    bounds: &NormalizedBounds,
    scenario: &RadarScenario,
) -> BeamSubproblemSolution {
    let p = scenario.p;
    let q = scenario.q;
    let (r_theta, eps, r_d) = match phase {
        Phase::Phase01 => {
            let r_theta = (bounds.r_d_min / r_s).powf(1.0 / p) * (-0.5f64).exp();
            (r_theta, spacing_phase01(scenario), bounds.r_d_min)
        }
        Phase::Phase12 => {
            let log_ratio = (r_s * bounds.r_theta_min.powf(p) / bounds.r_d_min).ln();
            let eps = (log_ratio / -scenario.spacing_loss_coeff()).max(0.0).sqrt();
            (bounds.r_theta_min, eps, bounds.r_d_min)
        }
        Phase::Phase23 => {
            let r_d = bounds.r_theta_min.powf(p) * r_s * (q as f64 / 2.0).exp();
            (bounds.r_theta_min, spacing_phase23(scenario), r_d)
        }
    };
    BeamSubproblemSolution {
        r_theta,
        eps,
        r_d,
        l_tilde: reduced_load(r_theta, eps, r_d, q),
        phase,
    }
}

/// Result of the frame-time root search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FrameSolution {
    /// Largest frame time ratio known to satisfy the cumulative requirement.
    pub r_f: f64,
    /// Final bracket: `P_c(lo) >= P_c,des > P_c(hi)`.
    pub lo: f64,
    pub hi: f64,
}

/// Largest `r_f` with `P_c(r_f, r_s) >= p_c_des`, by bisection to width `tol`.
/// The upper end of `bracket` is expanded geometrically until it straddles the root.
pub fn solve_frame_subproblem(
    r_s: f64,
    p_c_des: f64,
    ctx: &CumulativeContext,
    bracket: (f64, f64),
    tol: f64,
) -> Result<FrameSolution> {
    if !(p_c_des > 0.0 && p_c_des < 1.0) {
        return Err(Error::domain(format!("P_c,des must lie in (0, 1), got {p_c_des}")));
    }
    let (lo, mut hi) = bracket;
    if !(lo > 0.0 && hi > lo) {
        return Err(Error::domain(format!("invalid frame-time bracket [{lo}, {hi}]")));
    }
    let at_floor = p_c(lo, r_s, ctx)?;
    if at_floor < p_c_des {
        return Err(Error::infeasible(
            Constraint::CumulativePc,
            format!("P_c = {at_floor:.6} < {p_c_des} at r_S = {r_s} even with r_f = {lo}"),
        ));
    }
    let mut expansions = 0;
    while p_c(hi, r_s, ctx)? >= p_c_des {
        hi *= 2.0;
        expansions += 1;
        if expansions > 60 {
            return Err(Error::domain("frame-time bracket expansion did not terminate"));
        }
    }
    let Bracket { lo, hi } = bisect(|rf| p_c(rf, r_s, ctx).map(|v| v >= p_c_des), lo, hi, tol)?;
    Ok(FrameSolution { r_f: lo, lo, hi })
}

/// How the reference SNR `S_0` is specified.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ReferenceSnr {
    /// Linear SNR.
    Linear(f64),
    /// Detection probability at the reference conditions.
    DetectionProbability(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TargetModel {
    pub swerling: SwerlingCase,
    pub n_cpi: u32,
    pub p_fa: f64,
    pub reference: ReferenceSnr,
}

impl TargetModel {
    pub fn detection(&self) -> Result<DetectionContext> {
        DetectionContext::new(self.p_fa, self.n_cpi, self.swerling)
    }

    /// Linear reference SNR `S_0`.
    pub fn s0(&self) -> Result<f64> {
        match self.reference {
            ReferenceSnr::Linear(s0) if s0 > 0.0 && s0.is_finite() => Ok(s0),
            ReferenceSnr::Linear(s0) => Err(Error::domain(format!("S_0 must be positive, got {s0}"))),
            ReferenceSnr::DetectionProbability(p) => required_snr(p, &self.detection()?),
        }
    }
}

/// Single-look detection requirement.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum OneOffRequirement {
    None,
    DetectionProbability(f64),
    /// Directly as a worst-point SNR ratio `r_S,des`.
    SnrRatio(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Requirements {
    pub one_off: OneOffRequirement,
    pub p_c_des: f64,
    pub l_s_max: Option<f64>,
    pub r_f_max: Option<f64>,
}

/// Frame-time root-finding mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Fidelity {
    /// Tight per-sample root finding.
    Exact,
    /// Coarse bisection followed by a 10th-order polynomial fit of `r_f*(r_S)`.
    Paper,
}

impl std::str::FromStr for Fidelity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Fidelity::Exact),
            "paper" => Ok(Fidelity::Paper),
            other => Err(Error::Config(format!("unknown fidelity mode `{other}` (expected exact|paper)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    pub grid_step: f64,
    pub fidelity: Fidelity,
    /// Bisection width in `exact` mode.
    pub frame_tol: f64,
    /// Bisection width in `paper` mode.
    pub paper_frame_tol: f64,
    pub paper_poly_degree: usize,
    pub frame_bracket: (f64, f64),
    /// Golden-section polish of the best grid sample.
    pub refine: bool,
    pub refine_tol: f64,
    pub pd_floor: f64,
    pub quad_tol: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            grid_step: 0.1,
            fidelity: Fidelity::Exact,
            frame_tol: 1e-8,
            paper_frame_tol: 1e-4,
            paper_poly_degree: 10,
            frame_bracket: (1e-3, 2.0),
            refine: true,
            refine_tol: 1e-6,
            pd_floor: DEFAULT_PD_FLOOR,
            quad_tol: DEFAULT_QUAD_TOL,
        }
    }
}

/// Everything that defines one optimization run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Problem {
    pub scenario: RadarScenario,
    pub bounds: NormalizedBounds,
    pub target: TargetModel,
    pub requirements: Requirements,
}

/// One sample of the `r_S` line search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurvePoint {
    pub r_s: f64,
    pub beam: BeamSubproblemSolution,
    /// Unconstrained frame-subproblem optimum; `None` if `P_c,des` is out of reach.
    pub r_f_star: Option<f64>,
    /// Frame time ratio actually used, after the `r_f,max` cap.
    pub r_f: f64,
    pub l_s: f64,
    pub feasible: bool,
    /// Constraint that made the sample infeasible or capped it.
    pub limited_by: Option<Constraint>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptimizationResult {
    pub params: BeamParams,
    pub r_s_star: f64,
    pub l_s_star: f64,
    pub l_tilde_star: f64,
    pub phase: Phase,
    pub active_constraints: BTreeSet<Constraint>,
    pub eta: f64,
    pub s0: f64,
    pub r_s_des: Option<f64>,
    pub boundaries: PhaseBoundaries,
    pub curves: Vec<CurvePoint>,
}

/// Shared per-run state of the line search.
struct LineSearch<'a> {
    problem: &'a Problem,
    options: &'a SolverOptions,
    ctx: CumulativeContext,
    eta: f64,
    fit: Option<Polynomial>,
}

impl LineSearch<'_> {
    fn frame_tol(&self) -> f64 {
        match self.options.fidelity {
            Fidelity::Exact => self.options.frame_tol,
            Fidelity::Paper => self.options.paper_frame_tol,
        }
    }

    fn frame_root(&self, r_s: f64) -> Result<Option<f64>> {
        match solve_frame_subproblem(
            r_s,
            self.problem.requirements.p_c_des,
            &self.ctx,
            self.options.frame_bracket,
            self.frame_tol(),
        ) {
            Ok(sol) => Ok(Some(sol.r_f)),
            Err(Error::Infeasible { constraint: Constraint::CumulativePc, .. }) => Ok(None),
            Err(e) => Err(e),
        }
    }

    fn point(&self, r_s: f64, r_f_star: Option<f64>) -> Result<CurvePoint> {
        let req = &self.problem.requirements;
        let beam = solve_beam_subproblem(r_s, &self.problem.bounds, &self.problem.scenario)?;
        let Some(r_f_star) = r_f_star.filter(|v| *v > 0.0) else {
            return Ok(CurvePoint {
                r_s,
                beam,
                r_f_star: None,
                r_f: f64::NAN,
                l_s: f64::INFINITY,
                feasible: false,
                limited_by: Some(Constraint::CumulativePc),
            });
        };
        let mut limited_by = None;
        let mut r_f = r_f_star;
        if let Some(cap) = req.r_f_max {
            if r_f > cap {
                r_f = cap;
                limited_by = Some(Constraint::RfMax);
            }
        }
        let l_s = self.eta * beam.l_tilde / r_f;
        let mut feasible = true;
        if let Some(cap) = req.l_s_max {
            if l_s > cap {
                feasible = false;
                limited_by = Some(Constraint::LsMax);
            }
        }
        Ok(CurvePoint { r_s, beam, r_f_star: Some(r_f_star), r_f, l_s, feasible, limited_by })
    }

    fn evaluate(&self, r_s: f64) -> Result<CurvePoint> {
        let root = match &self.fit {
            Some(poly) => Some(poly.eval(r_s)),
            None => self.frame_root(r_s)?,
        };
        self.point(r_s, root)
    }
}

/// `r_S` grid from `lo` to `hi` inclusive with spacing `step`.
pub fn r_s_grid(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let mut out = Vec::new();
    let mut i = 0u64;
    loop {
        let v = lo + step * i as f64;
        if v >= hi - 1e-12 * hi.abs().max(1.0) {
            break;
        }
        out.push(v);
        i += 1;
    }
    out.push(hi);
    out
}

/// Solves the full minimum-load problem.
pub fn optimize(problem: &Problem, options: &SolverOptions) -> Result<OptimizationResult> {
    let Problem { scenario, bounds, target, requirements } = problem;
    scenario.validate()?;
    if !(options.grid_step > 0.0) {
        return Err(Error::domain("grid step must be positive"));
    }
    if !(requirements.p_c_des > 0.0 && requirements.p_c_des < 1.0) {
        return Err(Error::domain(format!("P_c,des must lie in (0, 1), got {}", requirements.p_c_des)));
    }
    let detection = target.detection()?;
    let s0 = target.s0()?;
    let ctx = CumulativeContext::with_options(s0, detection, options.pd_floor, options.quad_tol)?;
    let eta = eta(scenario, bounds)?;
    let edges = PhaseBoundaries::new(bounds, scenario);

    let r_s_des = match requirements.one_off {
        OneOffRequirement::None => None,
        OneOffRequirement::SnrRatio(r) => Some(r),
        OneOffRequirement::DetectionProbability(p) => Some(required_snr(p, &detection)? / s0),
    };
    if let Some(r) = r_s_des {
        if !(r > 0.0) {
            return Err(Error::domain(format!("r_S,des must be positive, got {r}")));
        }
        if r > edges.r_s3 {
            return Err(Error::infeasible(
                Constraint::OneOffPd,
                format!("r_S,des = {r:.6} exceeds the largest attainable r_S3 = {:.6}", edges.r_s3),
            ));
        }
    }
    let lo = r_s_des.map_or(edges.r_s0, |r| r.max(edges.r_s0));
    let hi = edges.r_s3;
    let grid = r_s_grid(lo, hi, options.grid_step);

    let mut search = LineSearch { problem, options, ctx, eta, fit: None };
    let roots: Vec<Option<f64>> = grid
        .par_iter()
        .map(|&r| search.frame_root(r))
        .collect::<Result<_>>()?;
    if options.fidelity == Fidelity::Paper {
        let (xs, ys): (Vec<f64>, Vec<f64>) = grid
            .iter()
            .zip(&roots)
            .filter_map(|(&x, y)| y.map(|y| (x, y)))
            .unzip();
        if xs.len() > options.paper_poly_degree {
            search.fit = Some(Polynomial::fit(&xs, &ys, options.paper_poly_degree)?);
        }
    }
    let curves: Vec<CurvePoint> = grid
        .iter()
        .zip(&roots)
        .map(|(&r, root)| {
            let smoothed = match (&search.fit, root) {
                (Some(poly), Some(_)) => Some(poly.eval(r)),
                _ => *root,
            };
            search.point(r, smoothed)
        })
        .collect::<Result<_>>()?;

    let mut best: Option<usize> = None;
    for (i, c) in curves.iter().enumerate() {
        if c.feasible && best.map_or(true, |b| c.l_s < curves[b].l_s) {
            best = Some(i);
        }
    }
    let Some(best) = best else {
        let constraint = if curves.iter().all(|c| c.r_f_star.is_none()) {
            Constraint::CumulativePc
        } else {
            Constraint::LsMax
        };
        let detail = match constraint {
            Constraint::CumulativePc => format!(
                "no r_S in [{lo:.6}, {hi:.6}] reaches P_c,des = {} with r_f >= {}",
                requirements.p_c_des, options.frame_bracket.0
            ),
            _ => format!(
                "every sample that meets P_c,des exceeds L_s,max = {}",
                requirements.l_s_max.unwrap_or(f64::INFINITY)
            ),
        };
        return Err(Error::infeasible(constraint, detail));
    };

    let mut optimum = curves[best];
    if options.refine && curves.len() > 1 {
        let a = if best > 0 { curves[best - 1].r_s } else { curves[best].r_s };
        let b = if best + 1 < curves.len() { curves[best + 1].r_s } else { curves[best].r_s };
        let mut failure = None;
        let (x, fx) = golden_section(
            |r| match search.evaluate(r) {
                Ok(pt) if pt.feasible => pt.l_s,
                Ok(_) => f64::INFINITY,
                Err(e) => {
                    failure.get_or_insert(e);
                    f64::INFINITY
                }
            },
            a,
            b,
            options.refine_tol,
        );
        if let Some(e) = failure {
            return Err(e);
        }
        if fx < optimum.l_s {
            let candidate = search.evaluate(x)?;
            if candidate.feasible && candidate.l_s < optimum.l_s {
                optimum = candidate;
            }
        }
    }

    let params = BeamParams {
        r_theta: optimum.beam.r_theta,
        eps: optimum.beam.eps,
        r_d: optimum.beam.r_d,
        r_f: optimum.r_f,
    };
    let mut active = BTreeSet::new();
    active.insert(Constraint::VariableBound);
    if let Some(r) = r_s_des {
        if optimum.r_s <= r * (1.0 + 1e-9) {
            active.insert(Constraint::OneOffPd);
        }
    }
    if optimum.limited_by == Some(Constraint::RfMax) {
        active.insert(Constraint::RfMax);
    } else {
        active.insert(Constraint::CumulativePc);
    }
    if let Some(cap) = requirements.l_s_max {
        if optimum.l_s >= cap * (1.0 - 1e-9) {
            active.insert(Constraint::LsMax);
        }
    }

    Ok(OptimizationResult {
        params,
        r_s_star: optimum.r_s,
        l_s_star: optimum.l_s,
        l_tilde_star: optimum.beam.l_tilde,
        phase: optimum.beam.phase,
        active_constraints: active,
        eta,
        s0,
        r_s_des,
        boundaries: edges,
        curves,
    })
}

/// Quantity varied by a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SweepAxis {
    /// Reference detection probability `P_d,0`, a proxy for radar power.
    PD0,
    /// Cumulative detection requirement `P_c,des`.
    PcDes,
}

impl SweepAxis {
    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::PD0 => "P_d0",
            SweepAxis::PcDes => "P_c_des",
        }
    }
}

/// One point of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepPoint {
    pub value: f64,
    pub outcome: std::result::Result<SweepOptimum, String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepOptimum {
    pub r_s_star: f64,
    pub r_f_star: f64,
    pub l_s_star: f64,
    pub phase: Phase,
}

/// Optimizes `problem` once per axis value; failures are recorded per point.
pub fn sweep(problem: &Problem, axis: SweepAxis, values: &[f64], options: &SolverOptions) -> Vec<SweepPoint> {
    values
        .iter()
        .map(|&value| {
            let mut run = *problem;
            match axis {
                SweepAxis::PD0 => run.target.reference = ReferenceSnr::DetectionProbability(value),
                SweepAxis::PcDes => run.requirements.p_c_des = value,
            }
            let outcome = optimize(&run, options)
                .map(|r| SweepOptimum {
                    r_s_star: r.r_s_star,
                    r_f_star: r.params.r_f,
                    l_s_star: r.l_s_star,
                    phase: r.phase,
                })
                .map_err(|e| e.to_string());
            SweepPoint { value, outcome }
        })
        .collect()
}

/// `problem` with the one-off requirement and the operational caps removed.
pub fn released(problem: &Problem) -> Problem {
    Problem {
        requirements: Requirements {
            one_off: OneOffRequirement::None,
            l_s_max: None,
            r_f_max: None,
            ..problem.requirements
        },
        ..*problem
    }
}

/// Radar-power sweep: one optimization per reference detection probability
/// `P_d,0`, with the one-off requirement and the operational caps released.
pub fn power_sweep(problem: &Problem, p_d0_grid: &[f64], options: &SolverOptions) -> Vec<SweepPoint> {
    sweep(&released(problem), SweepAxis::PD0, p_d0_grid, options)
}
