//! Beam lattice geometry, the dimensionless SNR model and the search load.

use serde::{Deserialize, Serialize};
use std::f64::consts::LN_2;

use crate::error::{Error, Result};

/// Beam lattice shape. Fixes the worst-point deviation factor `k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LatticeKind {
    Triangular,
    Rectangular,
}

impl LatticeKind {
    /// Distance from a beam centre to the lattice centroid, in units of
    /// `eps * theta_bw`.
    pub fn k(self) -> f64 {
        match self {
            LatticeKind::Triangular => 1.0 / 3f64.sqrt(),
            LatticeKind::Rectangular => 1.0 / 2f64.sqrt(),
        }
    }
}

/// Extent of the search volume along one axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Extent {
    /// Symmetric angular half-width `+/- theta`, radians.
    Angle(f64),
    /// Non-dimensional extent such as a number of scanning bars.
    Bars(f64),
}

impl Extent {
    /// Effective length in direction-cosine space; a bar count passes through.
    pub fn effective_length(self) -> f64 {
        match self {
            Extent::Angle(theta) => 2.0 * theta.sin(),
            Extent::Bars(n) => n,
        }
    }

    fn is_angular(self) -> bool {
        matches!(self, Extent::Angle(_))
    }

    fn value(self) -> f64 {
        match self {
            Extent::Angle(v) | Extent::Bars(v) => v,
        }
    }
}

/// Physical radar and search-volume description.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadarScenario {
    /// Beam width bounds, radians.
    pub theta_bw_min: f64,
    pub theta_bw_max: f64,
    /// Dwell time bounds, seconds.
    pub t_d_min: f64,
    pub t_d_max: f64,
    /// Reference range, metres.
    pub r0: f64,
    /// Target closing velocity, metres per second.
    pub v_t: f64,
    pub az: Extent,
    pub el: Extent,
    pub lattice: LatticeKind,
    /// Beam-shape loss coefficient (1 with element-level digital beamforming, 2 otherwise).
    pub a: f64,
    /// Exponent of the beam-width SNR law.
    pub p: f64,
    /// Lattice dimension.
    pub q: u32,
}

impl RadarScenario {
    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::domain(format!("{name} must be positive and finite, got {v}")))
            }
        };
        positive("theta_bw_min", self.theta_bw_min)?;
        positive("t_d_min", self.t_d_min)?;
        positive("r0", self.r0)?;
        positive("v_t", self.v_t)?;
        positive("a", self.a)?;
        if !(self.theta_bw_max >= self.theta_bw_min) || !self.theta_bw_max.is_finite() {
            return Err(Error::domain("theta_bw_max must be >= theta_bw_min"));
        }
        if !(self.t_d_max >= self.t_d_min) || !self.t_d_max.is_finite() {
            return Err(Error::domain("t_d_max must be >= t_d_min"));
        }
        if self.q != 1 && self.q != 2 {
            return Err(Error::domain(format!("lattice dimension q must be 1 or 2, got {}", self.q)));
        }
        if !(self.p > self.q as f64) || !self.p.is_finite() {
            return Err(Error::domain(format!(
                "beam-width exponent p = {} must exceed q = {}",
                self.p, self.q
            )));
        }
        positive("az extent", self.az.value())?;
        positive("el extent", self.el.value())?;
        if self.theta_bw_max >= std::f64::consts::FRAC_PI_2 {
            return Err(Error::domain("theta_bw_max must be below 90 degrees"));
        }
        match self.q {
            1 => {
                if self.az.is_angular() == self.el.is_angular() {
                    return Err(Error::domain(
                        "a one-dimensional lattice needs exactly one angular extent and one bar count",
                    ));
                }
            }
            _ => {
                if !self.az.is_angular() || !self.el.is_angular() {
                    return Err(Error::domain("a two-dimensional lattice needs angular az and el extents"));
                }
            }
        }
        Ok(())
    }

    pub fn k(&self) -> f64 {
        self.lattice.k()
    }

    /// `4 a k^2 ln 2`, the exponent coefficient of the worst-point SNR loss.
    pub fn spacing_loss_coeff(&self) -> f64 {
        4.0 * self.a * self.k() * self.k() * LN_2
    }

    /// Reference quantities `(theta_bw,0, t_d,0, t_f,0)` implied by `bounds`.
    pub fn references(&self, bounds: &NormalizedBounds) -> References {
        References {
            theta_bw0: self.theta_bw_min / bounds.r_theta_min,
            t_d0: self.t_d_min / bounds.r_d_min,
            t_f0: self.r0 / self.v_t,
        }
    }
}

/// Reference values used to make the design variables dimensionless.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct References {
    /// Radians.
    pub theta_bw0: f64,
    /// Seconds.
    pub t_d0: f64,
    /// Seconds.
    pub t_f0: f64,
}

/// Bounds on the dimensionless beam width and dwell time ratios.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormalizedBounds {
    pub r_theta_min: f64,
    pub r_theta_max: f64,
    pub r_d_min: f64,
    pub r_d_max: f64,
}

impl NormalizedBounds {
    pub fn new(r_theta_min: f64, r_theta_max: f64, r_d_min: f64, r_d_max: f64) -> Result<Self> {
        let b = Self {
            r_theta_min,
            r_theta_max,
            r_d_min,
            r_d_max,
        };
        if !(r_theta_min > 0.0 && r_theta_max >= r_theta_min && r_theta_max.is_finite()) {
            return Err(Error::domain("need 0 < r_theta_min <= r_theta_max"));
        }
        if !(r_d_min > 0.0 && r_d_max >= r_d_min && r_d_max.is_finite()) {
            return Err(Error::domain("need 0 < r_d_min <= r_d_max"));
        }
        Ok(b)
    }

    /// References tuned so that `r_theta_min = e^{-1/2}` and `r_d_min = 1`,
    /// which places the first phase transition at `r_S = 1`.
    pub fn normalized(scenario: &RadarScenario) -> Self {
        let r_theta_min = (-0.5f64).exp();
        Self {
            r_theta_min,
            r_theta_max: r_theta_min * scenario.theta_bw_max / scenario.theta_bw_min,
            r_d_min: 1.0,
            r_d_max: scenario.t_d_max / scenario.t_d_min,
        }
    }

    /// Normalized bounds from the two bound ratios alone.
    pub fn from_ratios(theta_ratio: f64, dwell_ratio: f64) -> Result<Self> {
        let r_theta_min = (-0.5f64).exp();
        Self::new(r_theta_min, r_theta_min * theta_ratio, 1.0, dwell_ratio)
    }
}

/// Dimensionless design point `(r_theta, eps, r_d, r_f)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BeamParams {
    pub r_theta: f64,
    pub eps: f64,
    pub r_d: f64,
    pub r_f: f64,
}

/// Angular distance from the nearest beam centre to the lattice's weakest point.
pub fn max_deviation(eps: f64, theta_bw: f64, lattice: LatticeKind) -> Result<f64> {
    if !(theta_bw > 0.0) {
        return Err(Error::domain(format!("beam width must be positive, got {theta_bw}")));
    }
    if !(eps >= 0.0) {
        return Err(Error::domain(format!("spacing ratio must be >= 0, got {eps}")));
    }
    Ok(lattice.k() * eps * theta_bw)
}

/// Worst-point SNR at the reference range relative to `S_0`.
#[inline]
pub fn snr_ratio(r_theta: f64, eps: f64, r_d: f64, scenario: &RadarScenario) -> f64 {
    r_d / r_theta.powf(scenario.p) * (-scenario.spacing_loss_coeff() * eps * eps).exp()
}

/// `r_S` of a design point.
pub fn r_s(params: &BeamParams, scenario: &RadarScenario) -> f64 {
    snr_ratio(params.r_theta, params.eps, params.r_d, scenario)
}

/// Linear SNR of a target `delta_phi` radians off boresight at range `range`.
pub fn snr_at(
    delta_phi: f64,
    range: f64,
    params: &BeamParams,
    scenario: &RadarScenario,
    bounds: &NormalizedBounds,
    s0: f64,
) -> Result<f64> {
    if !(range > 0.0) {
        return Err(Error::domain(format!("range must be positive, got {range}")));
    }
    let theta_bw = params.r_theta * scenario.references(bounds).theta_bw0;
    let beam_shape = (-4.0 * scenario.a * LN_2 * (delta_phi / theta_bw).powi(2)).exp();
    Ok(s0 * (scenario.r0 / range).powi(4) * params.r_d / params.r_theta.powf(scenario.p) * beam_shape)
}

/// `r_theta^-q * r_d * eps^-q`, the part of the load that does not depend on `r_f`.
#[inline]
pub fn reduced_load(r_theta: f64, eps: f64, r_d: f64, q: u32) -> f64 {
    r_d / (r_theta * eps).powi(q as i32)
}

/// Search load `eta * r_d * r_theta^-q * eps^-q / r_f`.
pub fn search_load(params: &BeamParams, eta: f64, q: u32) -> Result<f64> {
    if params.eps == 0.0 {
        return Err(Error::domain("search load is unbounded at zero beam spacing"));
    }
    if !(params.r_theta > 0.0 && params.eps > 0.0 && params.r_d > 0.0 && params.r_f > 0.0) {
        return Err(Error::domain(format!("design variables must be positive: {params:?}")));
    }
    if !(eta > 0.0) {
        return Err(Error::domain(format!("eta must be positive, got {eta}")));
    }
    Ok(eta * reduced_load(params.r_theta, params.eps, params.r_d, q) / params.r_f)
}

/// Coefficient converting the dimensionless load into a time fraction.
///
/// Angular extents enter as direction-cosine lengths `2 sin(theta)` and the
/// reference beam width as `sin(theta_bw,min) / r_theta_min`.
pub fn eta(scenario: &RadarScenario, bounds: &NormalizedBounds) -> Result<f64> {
    scenario.validate()?;
    let bw0 = scenario.theta_bw_min.sin() / bounds.r_theta_min;
    let t_d0 = scenario.t_d_min / bounds.r_d_min;
    let area = scenario.az.effective_length() * scenario.el.effective_length();
    Ok(t_d0 * scenario.v_t * area / (scenario.r0 * bw0.powi(scenario.q as i32)))
}
