//! One line per acceptance criterion; exits non-zero if any fails.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use searchload::cumulative::{p_c, CumulativeContext};
use searchload::detection::{pd, required_snr, DetectionContext, SwerlingCase};
use searchload::lattice::{eta, NormalizedBounds};
use searchload::oracle::{grid_beam_optimum, mc_pd, phase_samples, BeamComparison, GridSpec};
use searchload::presets::{reference_problem, reference_scenario, reference_target};
use searchload::solver::{
    optimize, power_sweep, solve_beam_subproblem, solve_frame_subproblem, solve_in_phase, spacing_phase01,
    spacing_phase23, Phase, PhaseBoundaries, SolverOptions,
};

/// Dense-grid (r_S step 1e-3, no refinement) optimum of the q = 1 reference
/// problem per fluctuation model: (r_S*, L_s*).
const BASELINES: [(SwerlingCase, f64, f64); 4] = [
    (SwerlingCase::I, 4.269, 0.413_436_146_448_378_6),
    (SwerlingCase::II, 4.818, 0.328_078_179_908_683_9),
    (SwerlingCase::III, 4.496, 0.372_908_317_839_144_2),
    (SwerlingCase::IV, 4.660, 0.297_722_390_701_131_4),
];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn eta_reproduction() -> Outcome {
    let got: Vec<f64> = [1, 2]
        .iter()
        .map(|&q| {
            let sc = reference_scenario(q);
            eta(&sc, &NormalizedBounds::normalized(&sc)).unwrap()
        })
        .collect();
    let pass = (got[0] - 0.0385).abs() <= 5e-4 && (got[1] - 0.0173).abs() <= 5e-4;
    outcome(pass, format!("eta(q=1) = {:.6}, eta(q=2) = {:.6}", got[0], got[1]))
}

fn analytic_constants() -> Outcome {
    let ln2 = std::f64::consts::LN_2;
    let one = reference_scenario(1);
    let two = reference_scenario(2);
    let e1 = PhaseBoundaries::new(&NormalizedBounds::normalized(&one), &one);
    let e2 = PhaseBoundaries::new(&NormalizedBounds::normalized(&two), &two);
    let checks = [
        ("eps 0->1", spacing_phase01(&one), (3.0 / (4.0 * ln2)).sqrt()),
        ("eps 2->3 (q=1)", spacing_phase23(&one), (3.0 / (16.0 * ln2)).sqrt()),
        ("eps 2->3 (q=2)", spacing_phase23(&two), (3.0 / (8.0 * ln2)).sqrt()),
        ("r_S2 (q=1)", e1.r_s2, 1.5f64.exp()),
        ("r_S2 (q=2)", e2.r_s2, 1f64.exp()),
    ];
    let worst = checks.iter().map(|(_, got, want)| (got - want).abs()).fold(0.0, f64::max);
    let text: Vec<String> = checks.iter().map(|(n, got, _)| format!("{n} = {got:.5}")).collect();
    outcome(worst <= 1e-9, format!("{}; max error {worst:.1e}", text.join(", ")))
}

fn oracle_equivalence() -> Outcome {
    let mut worst_gap: f64 = 0.0;
    let mut worst_cells: f64 = 0.0;
    let mut count = 0;
    for q in [1, 2] {
        let sc = reference_scenario(q);
        let b = NormalizedBounds::normalized(&sc);
        let grid = GridSpec::covering(&b, &sc, 400);
        for r in phase_samples(&PhaseBoundaries::new(&b, &sc), 5) {
            let analytic = solve_beam_subproblem(r, &b, &sc).unwrap();
            let g = grid_beam_optimum(r, &sc, &grid).unwrap();
            let c = BeamComparison::new(analytic, g, r);
            worst_gap = worst_gap.max(c.load_gap.abs());
            worst_cells = worst_cells.max(c.r_theta_cells).max(c.eps_cells).max(c.r_d_cells);
            count += 1;
        }
    }
    outcome(
        worst_gap <= 5e-3 && worst_cells <= 1.0,
        format!("{count} samples, max load gap {worst_gap:.2e}, max offset {worst_cells:.3} cells"),
    )
}

fn detection_checks() -> Outcome {
    let mut closed_form: f64 = 0.0;
    for p_fa in [1e-4, 1e-6, 1e-8] {
        let ctx = DetectionContext::new(p_fa, 1, SwerlingCase::I).unwrap();
        for i in 0..=1000 {
            let s = 0.1 * i as f64;
            closed_form = closed_form.max((pd(s, &ctx).unwrap() - p_fa.powf(1.0 / (1.0 + s))).abs());
        }
    }
    let target = reference_target(SwerlingCase::I);
    let mut worst = (0.0, String::new());
    let mut failures = Vec::new();
    for (k, case) in SwerlingCase::ALL.into_iter().enumerate() {
        let ctx = DetectionContext::new(target.p_fa, target.n_cpi, case).unwrap();
        for (j, s) in [1.0, 5.0, 20.0].into_iter().enumerate() {
            let est = mc_pd(s, &ctx, 1_000_000, 100 + 10 * k as u64 + j as u64).unwrap();
            let want = pd(s, &ctx).unwrap();
            let z = (est.p - want) / est.std_err;
            if z.abs() > 3.0 {
                failures.push(format!("{case}@{s}: {z:+.1}"));
            }
            if z.abs() > worst.0 {
                worst = (z.abs(), format!("{case} s={s}: pd={want:.5} mc={:.5}", est.p));
            }
        }
    }
    let pass = closed_form <= 1e-10 && failures.is_empty();
    let mc = if failures.is_empty() {
        "all within 3 se".to_string()
    } else {
        format!("{} of 12 beyond 3 se [{}]", failures.len(), failures.join(", "))
    };
    outcome(
        pass,
        format!(
            "Swerling I closed form max error {closed_form:.1e}; Monte Carlo (n_cpi={}, P_fa={:.0e}) {mc}; worst {:.1} se ({})",
            target.n_cpi, target.p_fa, worst.0, worst.1
        ),
    )
}

fn cumulative_properties() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut rf_violation: f64 = 0.0;
    let mut rs_violations = 0;
    let mut residual_fail = 0;
    for case in SwerlingCase::ALL {
        let det = DetectionContext::new(1e-6, 4, case).unwrap();
        let ctx = CumulativeContext::new(required_snr(0.4, &det).unwrap(), det).unwrap();
        for _ in 0..250 {
            let rs = rng.random_range(0.5..30.0);
            let a = rng.random_range(0.01..1.5);
            let b = rng.random_range(0.01..1.5);
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            rf_violation = rf_violation.max(p_c(hi, rs, &ctx).unwrap() - p_c(lo, rs, &ctx).unwrap());
            let rf = rng.random_range(0.01..1.5);
            let r1 = rng.random_range(0.5..30.0);
            let r2 = rng.random_range(0.5..30.0);
            let (s_lo, s_hi) = if r1 < r2 { (r1, r2) } else { (r2, r1) };
            if p_c(rf, s_hi, &ctx).unwrap() < p_c(rf, s_lo, &ctx).unwrap() - 1e-7 {
                rs_violations += 1;
            }
        }
        for rs in [2.0, 4.0, 8.0, 16.0] {
            let sol = solve_frame_subproblem(rs, 0.85, &ctx, (1e-3, 2.0), 1e-4).unwrap();
            let (at_lo, at_hi) = (p_c(sol.lo, rs, &ctx).unwrap(), p_c(sol.hi, rs, &ctx).unwrap());
            if !(sol.hi - sol.lo <= 1e-4 && at_lo >= 0.85 && at_hi < 0.85 && sol.r_f == sol.lo) {
                residual_fail += 1;
            }
        }
    }
    outcome(
        rf_violation <= 1e-7 && rs_violations == 0 && residual_fail == 0,
        format!(
            "1000 pairs: max increase in r_f {rf_violation:.1e}, r_s violations {rs_violations}; frame roots bracketed within 1e-4: {}/16",
            16 - residual_fail
        ),
    )
}

fn full_pipeline() -> Outcome {
    let mut loads = Vec::new();
    let mut worst: f64 = 0.0;
    for (case, r_s_base, l_s_base) in BASELINES {
        let r = optimize(&reference_problem(1, case), &SolverOptions::default()).unwrap();
        worst = worst
            .max((r.r_s_star / r_s_base - 1.0).abs())
            .max((r.l_s_star / l_s_base - 1.0).abs());
        loads.push((case, r.l_s_star));
    }
    let l = |c: SwerlingCase| loads.iter().find(|(k, _)| *k == c).unwrap().1;
    use SwerlingCase::*;
    let ordered = l(I) > l(III) && l(III) > l(II) && l(II) > l(IV);
    outcome(
        ordered && worst <= 1e-3,
        format!(
            "L_s*: I {:.5} > III {:.5} > II {:.5} > IV {:.5} ({}); max deviation from dense grid {worst:.1e}",
            l(I),
            l(III),
            l(II),
            l(IV),
            if ordered { "ordered" } else { "NOT ordered" }
        ),
    )
}

fn power_sweep_structure() -> Outcome {
    let grid: Vec<f64> = (1..=9).map(|i| 0.1 * i as f64).collect();
    let mut problems = Vec::new();
    let mut curves = Vec::new();
    for q in [1, 2] {
        for pc in [0.85, 0.9] {
            let mut p = reference_problem(q, SwerlingCase::II);
            p.requirements.p_c_des = pc;
            let pts = power_sweep(&p, &grid, &SolverOptions::default());
            let ok: Option<Vec<_>> = pts.iter().map(|pt| pt.outcome.as_ref().ok().copied()).collect();
            match ok {
                Some(v) => curves.push((q, pc, v)),
                None => problems.push(format!("q={q} P_c={pc}: infeasible point")),
            }
        }
    }
    let mut max_flat: f64 = 0.0;
    for (q, pc, pts) in &curves {
        let sc = reference_scenario(*q);
        let r_s2 = PhaseBoundaries::new(&NormalizedBounds::normalized(&sc), &sc).r_s2;
        let tag = format!("q={q} P_c={pc}");
        if pts.windows(2).any(|w| w[1].r_s_star > w[0].r_s_star) {
            problems.push(format!("{tag}: r_S* increases"));
        }
        let split = pts.iter().position(|o| o.phase != Phase::Phase23).unwrap_or(pts.len());
        if split < 2 || split == pts.len() || pts[split..].iter().any(|o| o.phase == Phase::Phase23) {
            problems.push(format!("{tag}: no single transition"));
            continue;
        }
        if !(pts[split - 1].r_s_star >= r_s2 && pts[split].r_s_star <= r_s2) {
            problems.push(format!("{tag}: transition not at r_S2"));
        }
        // Slope of ln r_S* against ln S_0: -1 before the transition, shallower after.
        let s0 = |i: usize| required_snr(grid[i], &DetectionContext::new(1e-6, 4, SwerlingCase::II).unwrap()).unwrap();
        let slope = |i: usize| (pts[i + 1].r_s_star / pts[i].r_s_star).ln() / (s0(i + 1) / s0(i)).ln();
        let before: Vec<f64> = (0..split - 1).map(slope).collect();
        let after: Vec<f64> = (split..pts.len() - 1).map(slope).collect();
        if before.iter().any(|s| (s + 1.0).abs() > 1e-2) || after.iter().any(|s| *s < -0.5) {
            problems.push(format!("{tag}: slopes {before:.3?} / {after:.3?}"));
        }
        let pre: Vec<f64> = pts[..split].iter().map(|o| o.r_f_star).collect();
        let (lo, hi) = pre.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &v| (a.min(v), b.max(v)));
        max_flat = max_flat.max(hi / lo - 1.0);
        if hi / lo - 1.0 >= 0.02 {
            problems.push(format!("{tag}: r_f* varies {:.2}% before the transition", 100.0 * (hi / lo - 1.0)));
        }
        if pts[split - 1..].windows(2).any(|w| w[1].r_f_star <= w[0].r_f_star) {
            problems.push(format!("{tag}: r_f* not increasing after the transition"));
        }
    }
    for pair in curves.chunks(2) {
        if let [(q, _, low), (_, _, high)] = pair {
            if low.iter().zip(high).any(|(a, b)| !(b.r_s_star > a.r_s_star && b.r_f_star < a.r_f_star)) {
                problems.push(format!("q={q}: P_c,des = 0.9 not above 0.85 pointwise"));
            }
        }
    }
    let detail = if problems.is_empty() {
        format!("4 sweeps x 9 points; pre-transition r_f* variation <= {:.3}%", 100.0 * max_flat)
    } else {
        problems.join("; ")
    };
    outcome(problems.is_empty(), detail)
}

fn phase_trajectories() -> Outcome {
    let mut problems = Vec::new();
    let mut worst_jump: f64 = 0.0;
    let mut worst_slope: f64 = 0.0;
    for q in [1, 2] {
        let sc = reference_scenario(q);
        let b = NormalizedBounds::normalized(&sc);
        let e = PhaseBoundaries::new(&b, &sc);
        for (r, lower, upper) in [(e.r_s1, Phase::Phase01, Phase::Phase12), (e.r_s2, Phase::Phase12, Phase::Phase23)] {
            let a = solve_in_phase(lower, r, &b, &sc).l_tilde;
            let c = solve_in_phase(upper, r, &b, &sc).l_tilde;
            worst_jump = worst_jump.max((a - c).abs() / a);
        }
        let sols: Vec<_> = (0..200)
            .map(|i| e.r_s0 * (e.r_s3 / e.r_s0).powf(i as f64 / 199.0))
            .map(|r| (r, solve_beam_subproblem(r, &b, &sc).unwrap()))
            .collect();
        for w in sols.windows(2) {
            let (x, y) = (&w[0].1, &w[1].1);
            if y.r_theta > x.r_theta || y.r_d < x.r_d || y.eps > x.eps || y.l_tilde <= x.l_tilde {
                problems.push(format!("q={q}: trajectory not monotone at r_S = {:.4}", w[1].0));
                break;
            }
        }
        for (phase, want) in [(Phase::Phase01, q as f64 / sc.p), (Phase::Phase23, 1.0)] {
            let pts: Vec<(f64, f64)> =
                sols.iter().filter(|(_, s)| s.phase == phase).map(|(r, s)| (r.ln(), s.l_tilde.ln())).collect();
            let n = pts.len() as f64;
            let (mx, my) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x / n, b + y / n));
            let sxy: f64 = pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
            let sxx: f64 = pts.iter().map(|(x, _)| (x - mx).powi(2)).sum();
            worst_slope = worst_slope.max((sxy / sxx - want).abs());
        }
    }
    if worst_jump > 1e-10 {
        problems.push(format!("reduced-load jump {worst_jump:.1e} at a transition"));
    }
    if worst_slope > 1e-6 {
        problems.push(format!("log-log slope error {worst_slope:.1e}"));
    }
    let detail = format!("max jump {worst_jump:.1e}, max slope error {worst_slope:.1e}");
    let pass = problems.is_empty();
    outcome(pass, if pass { detail } else { format!("{detail}; {}", problems.join("; ")) })
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("eta reproduction", eta_reproduction),
        ("analytic constants", analytic_constants),
        ("oracle equivalence", oracle_equivalence),
        ("detection probability", detection_checks),
        ("cumulative detection properties", cumulative_properties),
        ("full pipeline", full_pipeline),
        ("power sweep structure", power_sweep_structure),
        ("phase continuity and trajectories", phase_trajectories),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = check();
        if !o.pass {
            failed += 1;
        }
        println!(
            "criterion {} {name}: {} ({:.1}s) {}",
            i + 1,
            if o.pass { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64(),
            o.detail
        );
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
