//! Cumulative probability of detection for an inbound constant-velocity target.
//!
//! Ranges are normalized by `R_0` and frame times by `t_f,0 = R_0 / v_t`, so a
//! target whose latest scan happens `y` frame-units before it crosses `R_0` is
//! seen by the `i`-th latest scan at normalized range `1 + y + (i - 1) r_f`.

use crate::detection::{required_snr, DetectionContext};
use crate::error::{Error, Result};
use crate::quadrature::integrate;

pub const DEFAULT_PD_FLOOR: f64 = 1e-3;
pub const DEFAULT_QUAD_TOL: f64 = 1e-7;
const MAX_SEGMENTS: usize = 4000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CumulativeContext {
    s0: f64,
    detection: DetectionContext,
    pd_floor: f64,
    quad_tol: f64,
    // SNR at which a single look detects with probability `pd_floor`.
    floor_snr: f64,
}

impl CumulativeContext {
    pub fn new(s0: f64, detection: DetectionContext) -> Result<Self> {
        Self::with_options(s0, detection, DEFAULT_PD_FLOOR, DEFAULT_QUAD_TOL)
    }

    pub fn with_options(s0: f64, detection: DetectionContext, pd_floor: f64, quad_tol: f64) -> Result<Self> {
        if !(s0 > 0.0 && s0.is_finite()) {
            return Err(Error::domain(format!("reference SNR must be positive, got {s0}")));
        }
        if !(pd_floor > 0.0 && pd_floor < 1.0) {
            return Err(Error::domain(format!("pd_floor must lie in (0, 1), got {pd_floor}")));
        }
        if !(quad_tol > 0.0) {
            return Err(Error::domain("quadrature tolerance must be positive"));
        }
        if detection.pd_unchecked(0.0) >= pd_floor {
            return Err(Error::domain(format!(
                "pd_floor = {pd_floor} is not above the noise-only detection probability"
            )));
        }
        let floor_snr = required_snr(pd_floor, &detection)?;
        Ok(Self {
            s0,
            detection,
            pd_floor,
            quad_tol,
            floor_snr,
        })
    }

    pub fn s0(&self) -> f64 {
        self.s0
    }

    pub fn detection(&self) -> &DetectionContext {
        &self.detection
    }

    pub fn pd_floor(&self) -> f64 {
        self.pd_floor
    }

    pub fn quad_tol(&self) -> f64 {
        self.quad_tol
    }

    /// Same context with a different reference SNR.
    pub fn with_s0(&self, s0: f64) -> Result<Self> {
        Self::with_options(s0, self.detection, self.pd_floor, self.quad_tol)
    }
}

/// SNR of the `i`-th latest scan (1-based) when the target is `y` short of `R_0`.
#[inline]
pub fn scan_snr(i: u32, y: f64, r_f: f64, r_s: f64, ctx: &CumulativeContext) -> f64 {
    ctx.s0 * r_s / (1.0 + y + (i as f64 - 1.0) * r_f).powi(4)
}

/// Number of scans that contribute to the cumulative probability.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScanCount {
    pub count: u32,
    /// Set when even the closest look is below the floor.
    pub degenerate: bool,
}

/// Smallest scan count whose farthest scan, evaluated at the far edge of its
/// window, has single-look detection probability below the floor.
pub fn m_f(r_f: f64, r_s: f64, ctx: &CumulativeContext) -> Result<ScanCount> {
    if !(r_f > 0.0 && r_f.is_finite()) {
        return Err(Error::domain(format!("r_f must be positive, got {r_f}")));
    }
    if !(r_s > 0.0 && r_s.is_finite()) {
        return Err(Error::domain(format!("r_s must be positive, got {r_s}")));
    }
    let below = |m: u32| {
        ctx.detection.pd_unchecked(scan_snr(m, r_f, r_f, r_s, ctx)) < ctx.pd_floor
    };
    let degenerate = ctx.detection.pd_unchecked(scan_snr(1, 0.0, r_f, r_s, ctx)) < ctx.pd_floor;

    // Far edge of scan m sits at normalized range 1 + m r_f.
    let floor_range = (ctx.s0 * r_s / ctx.floor_snr).powf(0.25);
    let guess = ((floor_range - 1.0) / r_f).ceil();
    if guess > u32::MAX as f64 / 2.0 {
        return Err(Error::domain(format!("frame time ratio {r_f} is too short to enumerate scans")));
    }
    let mut m = (guess.max(1.0)) as u32;
    while m > 1 && below(m - 1) {
        m -= 1;
    }
    while !below(m) {
        m += 1;
    }
    Ok(ScanCount { count: m, degenerate })
}

/// Cumulative detection probability with its quadrature diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CumulativeEvaluation {
    pub value: f64,
    pub error: f64,
    pub scans: ScanCount,
}

/// `1 - prod_k (1 - P_d)` over the contributing scans at offset `y`.
#[inline]
pub fn integrand(y: f64, r_f: f64, r_s: f64, scans: u32, ctx: &CumulativeContext) -> f64 {
    let mut miss = 1.0;
    for i in 1..=scans {
        miss *= 1.0 - ctx.detection.pd_unchecked(scan_snr(i, y, r_f, r_s, ctx));
    }
    1.0 - miss
}

pub fn p_c_detailed(r_f: f64, r_s: f64, ctx: &CumulativeContext) -> Result<CumulativeEvaluation> {
    let scans = m_f(r_f, r_s, ctx)?;
    let integral = integrate(
        |y| integrand(y, r_f, r_s, scans.count, ctx),
        0.0,
        r_f,
        ctx.quad_tol * r_f,
        MAX_SEGMENTS,
    )?;
    Ok(CumulativeEvaluation {
        value: (integral.value / r_f).clamp(0.0, 1.0),
        error: integral.error / r_f,
        scans,
    })
}

/// Cumulative probability that the target was detected at least once before
/// reaching `R_0`, averaged over its arrival phase within a frame.
pub fn p_c(r_f: f64, r_s: f64, ctx: &CumulativeContext) -> Result<f64> {
    p_c_detailed(r_f, r_s, ctx).map(|e| e.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::detection::SwerlingCase;
    use proptest::prelude::*;

    fn context(case: SwerlingCase) -> CumulativeContext {
        let det = DetectionContext::new(1e-6, 4, case).unwrap();
        let s0 = required_snr(0.4, &det).unwrap();
        CumulativeContext::new(s0, det).unwrap()
    }

    #[test]
    fn scan_snr_identities() {
        let ctx = context(SwerlingCase::II);
        let s = ctx.s0() * 2.0;
        assert!((scan_snr(1, 0.0, 0.7, 2.0, &ctx) - s).abs() < 1e-12);
        assert!((scan_snr(2, 0.0, 1.0, 2.0, &ctx) - s / 16.0).abs() < 1e-12);
        for &rf in &[0.1, 0.37, 1.3] {
            let a = scan_snr(1, rf, rf, 2.0, &ctx);
            let b = scan_snr(2, 0.0, rf, 2.0, &ctx);
            assert!((a - b).abs() <= 1e-14 * a);
        }
    }

    #[test]
    fn scan_count_matches_enumeration() {
        for case in SwerlingCase::ALL {
            let ctx = context(case);
            for &(rf, rs) in &[(0.5, 2.0), (0.05, 10.0), (1.7, 0.3), (0.01, 30.0)] {
                let mut m = 1u32;
                while ctx.detection().pd_unchecked(scan_snr(m, rf, rf, rs, &ctx)) >= 1e-3 {
                    m += 1;
                }
                assert_eq!(m_f(rf, rs, &ctx).unwrap().count, m, "{case} rf={rf} rs={rs}");
            }
        }
    }

    #[test]
    fn scan_count_regression() {
        // Swerling II, n_cpi = 4, P_d(S_0) = 0.4 (S_0 = 4.11356): far-edge
        // P_d is 3.87e-2 for scan 1 (range 1.5) and 4.38e-4 for scan 2 (range 2).
        let ctx = context(SwerlingCase::II);
        assert!((ctx.s0() - 4.113_560_109_652_725).abs() < 1e-9);
        let count = m_f(0.5, 2.0, &ctx).unwrap();
        assert_eq!(count, ScanCount { count: 2, degenerate: false });
    }

    #[test]
    fn scan_count_limits() {
        let ctx = context(SwerlingCase::I);
        assert!(m_f(1e-3, 1e3, &ctx).unwrap().count > 1000);
        let weak = m_f(0.5, 1e-6, &ctx).unwrap();
        assert_eq!(weak, ScanCount { count: 1, degenerate: true });
        assert!(m_f(0.0, 1.0, &ctx).is_err());
        assert!(m_f(0.5, -1.0, &ctx).is_err());
    }

    #[test]
    fn p_c_limits() {
        let ctx = context(SwerlingCase::II);
        assert!(p_c(0.5, 1e-6, &ctx).unwrap() < 1e-5);
        assert!(p_c(0.5, 1e6, &ctx).unwrap() > 1.0 - 1e-6);
    }

    #[test]
    fn p_c_matches_midpoint_sum() {
        for case in SwerlingCase::ALL {
            let ctx = context(case);
            for &(rf, rs) in &[(0.3, 2.0), (0.8, 6.0), (0.05, 1.0)] {
                let m = m_f(rf, rs, &ctx).unwrap().count;
                let panels = 100_000;
                let h = rf / panels as f64;
                let mut sum = 0.0;
                for i in 0..panels {
                    let y = (i as f64 + 0.5) * h;
                    let mut miss = 1.0;
                    for k in 0..m {
                        let snr = ctx.s0() * rs / (1.0 + y + k as f64 * rf).powi(4);
                        miss *= 1.0 - ctx.detection().pd_unchecked(snr);
                    }
                    sum += 1.0 - miss;
                }
                let riemann = sum * h / rf;
                let adaptive = p_c(rf, rs, &ctx).unwrap();
                assert!((riemann - adaptive).abs() < 1e-5, "{case} {rf} {rs}: {riemann} {adaptive}");
            }
        }
    }

    #[test]
    fn integrand_decreasing_in_offset() {
        let ctx = context(SwerlingCase::III);
        let (rf, rs) = (0.4, 3.0);
        let m = m_f(rf, rs, &ctx).unwrap().count;
        let mut prev = f64::INFINITY;
        for i in 0..=200 {
            let v = integrand(rf * i as f64 / 200.0, rf, rs, m, &ctx);
            assert!(v <= prev + 1e-15);
            prev = v;
        }
    }

    fn any_case() -> impl Strategy<Value = SwerlingCase> {
        prop_oneof![
            Just(SwerlingCase::I),
            Just(SwerlingCase::II),
            Just(SwerlingCase::III),
            Just(SwerlingCase::IV)
        ]
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn scan_count_non_increasing_in_frame_time(rf in 0.01f64..2.0, rs in 0.1f64..30.0, case in any_case()) {
            let ctx = context(case);
            prop_assert!(m_f(2.0 * rf, rs, &ctx).unwrap().count <= m_f(rf, rs, &ctx).unwrap().count);
        }

        #[test]
        fn p_c_monotone_in_r_s(rf in 0.05f64..1.5, rs in 0.2f64..20.0, factor in 1.05f64..3.0, case in any_case()) {
            let ctx = context(case);
            let (lo, hi) = (p_c(rf, rs, &ctx).unwrap(), p_c(rf, rs * factor, &ctx).unwrap());
            // short frames at high SNR saturate P_c at 1.0 in double precision
            prop_assert!(hi > lo || (lo >= 1.0 - 1e-12 && hi >= lo), "{lo} -> {hi}");
        }
    }
}
