//! One-off probability of detection for the Swerling target family.
//!
//! The detector integrates `n_cpi` square-law samples noncoherently against a
//! threshold set by the false-alarm probability. The detection probability of a
//! fluctuating target with `n_e` independent Rayleigh samples is
//!
//! ```text
//! P_d = K_m((K_m^{-1}(P_fa, 2 n_cpi) - 2 (n_cpi - n_e)) / ((n_cpi / n_e) S + 1), 2 n_e)
//! ```
//!
//! where `K_m(x, d)` is the chi-square survival function with `d` degrees of
//! freedom. `K_m` is decreasing in `x`, which makes `P_d` increasing in `S`.

use serde::{Deserialize, Serialize};

use crate::error::{Constraint, Error, Result};
use crate::special::{gamma_q, ln_gamma};

/// Swerling target fluctuation model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SwerlingCase {
    I,
    II,
    III,
    IV,
}

impl SwerlingCase {
    pub const ALL: [SwerlingCase; 4] = [
        SwerlingCase::I,
        SwerlingCase::II,
        SwerlingCase::III,
        SwerlingCase::IV,
    ];

    /// Number of independent Rayleigh samples `n_e` per detection attempt.
    pub fn effective_samples(self, n_cpi: u32) -> u32 {
        match self {
            SwerlingCase::I => 1,
            SwerlingCase::II => n_cpi,
            SwerlingCase::III => 2,
            SwerlingCase::IV => 2 * n_cpi,
        }
    }

    /// Target fluctuates once per scan (I, III) rather than once per pulse.
    pub fn is_scan_to_scan(self) -> bool {
        matches!(self, SwerlingCase::I | SwerlingCase::III)
    }

    /// Chi-square-4 (dominant scatterer) fluctuation rather than exponential.
    pub fn is_chi_square_four(self) -> bool {
        matches!(self, SwerlingCase::III | SwerlingCase::IV)
    }
}

impl std::fmt::Display for SwerlingCase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            SwerlingCase::I => "I",
            SwerlingCase::II => "II",
            SwerlingCase::III => "III",
            SwerlingCase::IV => "IV",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for SwerlingCase {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "I" | "1" => Ok(SwerlingCase::I),
            "II" | "2" => Ok(SwerlingCase::II),
            "III" | "3" => Ok(SwerlingCase::III),
            "IV" | "4" => Ok(SwerlingCase::IV),
            other => Err(Error::Config(format!("unknown Swerling case `{other}`"))),
        }
    }
}

/// False-alarm probability, integration count and fluctuation model, with the
/// detection threshold `K_m^{-1}(P_fa, 2 n_cpi)` precomputed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectionContext {
    p_fa: f64,
    n_cpi: u32,
    swerling: SwerlingCase,
    threshold: f64,
}

impl DetectionContext {
    pub fn new(p_fa: f64, n_cpi: u32, swerling: SwerlingCase) -> Result<Self> {
        if !(p_fa > 0.0 && p_fa < 1.0) {
            return Err(Error::domain(format!("p_fa must lie in (0, 1), got {p_fa}")));
        }
        if n_cpi == 0 {
            return Err(Error::domain("n_cpi must be at least 1"));
        }
        let threshold = km_inv(p_fa, 2 * n_cpi)?;
        Ok(Self {
            p_fa,
            n_cpi,
            swerling,
            threshold,
        })
    }

    pub fn p_fa(&self) -> f64 {
        self.p_fa
    }

    pub fn n_cpi(&self) -> u32 {
        self.n_cpi
    }

    pub fn swerling(&self) -> SwerlingCase {
        self.swerling
    }

    pub fn n_e(&self) -> u32 {
        self.swerling.effective_samples(self.n_cpi)
    }

    /// Noncoherent-integration threshold on the chi-square scale.
    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    /// Detection probability without argument validation; `s` must be >= 0.
    #[inline]
    pub(crate) fn pd_unchecked(&self, s: f64) -> f64 {
        let n = self.n_cpi as f64;
        let ne = self.n_e() as f64;
        let arg = (self.threshold - 2.0 * (n - ne)) / ((n / ne) * s + 1.0);
        if arg <= 0.0 {
            return 1.0;
        }
        chi_square_sf(arg, 2 * self.n_e())
    }
}

fn check_dof(d: u32) -> Result<()> {
    if d < 2 || d % 2 != 0 {
        return Err(Error::domain(format!(
            "degrees of freedom must be a positive even integer, got {d}"
        )));
    }
    Ok(())
}

#[inline]
fn chi_square_sf(x: f64, d: u32) -> f64 {
    if d == 2 {
        return (-0.5 * x).exp();
    }
    // Arguments are validated by the callers; the only failure mode left is
    // non-convergence, which cannot happen for finite x and integer shape.
    gamma_q(0.5 * d as f64, 0.5 * x).unwrap_or(f64::NAN)
}

/// Chi-square survival function `K_m(x, d) = 1 - F_chi2(x; d)` for even `d`.
pub fn km(x: f64, d: u32) -> Result<f64> {
    check_dof(d)?;
    if !(x >= 0.0) {
        return Err(Error::domain(format!("K_m argument must be >= 0, got {x}")));
    }
    Ok(chi_square_sf(x, d))
}

/// Inverse of [`km`] in its first argument: the `x` with `K_m(x, d) = p`.
pub fn km_inv(p: f64, d: u32) -> Result<f64> {
    check_dof(d)?;
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::domain(format!("K_m^-1 probability must lie in (0, 1), got {p}")));
    }
    if d == 2 {
        return Ok(-2.0 * p.ln());
    }
    let a = 0.5 * d as f64;
    let ln_p = p.ln();
    // g(x) = ln K_m(x) - ln p, strictly decreasing.
    let g = |x: f64| chi_square_sf(x, d).ln() - ln_p;

    let mut lo = 0.0;
    let mut hi = d as f64;
    while g(hi) > 0.0 {
        lo = hi;
        hi *= 2.0;
    }
    // Coarse bisection before the Newton polish.
    for _ in 0..20 {
        let mid = 0.5 * (lo + hi);
        if g(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }

    let ln_norm = std::f64::consts::LN_2 + ln_gamma(a);
    let mut x = 0.5 * (lo + hi);
    for _ in 0..100 {
        let gx = g(x);
        if gx == 0.0 {
            break;
        }
        if gx > 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        // d/dx ln K_m = -f(x) / K_m(x), f the chi-square density.
        let ln_pdf = (a - 1.0) * (0.5 * x).ln() - 0.5 * x - ln_norm;
        let slope = -(ln_pdf - chi_square_sf(x, d).ln()).exp();
        let mut next = x - gx / slope;
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if (next - x).abs() <= 4.0 * f64::EPSILON * x {
            x = next;
            break;
        }
        x = next;
    }
    Ok(x)
}

/// Probability of detection at linear SNR `s`.
pub fn pd(s: f64, ctx: &DetectionContext) -> Result<f64> {
    if !(s >= 0.0) {
        return Err(Error::domain(format!("SNR must be >= 0, got {s}")));
    }
    Ok(ctx.pd_unchecked(s))
}

/// SNR that yields detection probability `p_d_des`.
pub fn required_snr(p_d_des: f64, ctx: &DetectionContext) -> Result<f64> {
    if !(p_d_des > 0.0 && p_d_des < 1.0) {
        return Err(Error::domain(format!(
            "desired detection probability must lie in (0, 1), got {p_d_des}"
        )));
    }
    if p_d_des <= ctx.p_fa {
        return Err(Error::infeasible(
            Constraint::OneOffPd,
            format!("P_d,des = {p_d_des} does not exceed P_fa = {}", ctx.p_fa),
        ));
    }
    let n = ctx.n_cpi as f64;
    let ne = ctx.n_e() as f64;
    let s = ((ctx.threshold - 2.0 * (n - ne)) / km_inv(p_d_des, 2 * ctx.n_e())? - 1.0) * ne / n;
    if !(s > 0.0) {
        return Err(Error::infeasible(
            Constraint::OneOffPd,
            format!("P_d,des = {p_d_des} is reached without any signal"),
        ));
    }
    Ok(s)
}
