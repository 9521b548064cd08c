//! Flat-keyed TOML scenario files.
//!
//! ```toml
//! lattice = "triangular"    # or "rectangular"
//! a = 2.0
//! p = 4.0
//! q = 1
//! theta_bw_min_deg = 2.5
//! theta_bw_ratio = 4.0      # theta_bw,max / theta_bw,min
//! t_d_min_s = 0.005
//! t_d_ratio = 8.0           # t_d,max / t_d,min
//! r0_m = 50000.0
//! v_t_mps = 1000.0
//! az_deg = 60.0             # half-width, or az_bars
//! el_bars = 16.0            # or el_deg (half-width)
//! swerling = "II"
//! n_cpi = 4
//! p_fa = 1e-6               # optional, default 1e-6
//! p_d0 = 0.4                # or s0_db
//! r_s_des = 2.0             # or p_d_des; optional
//! p_c_des = 0.85
//! l_s_max = 0.8             # optional
//! r_f_max = 0.65            # optional
//! grid_step = 0.1           # optional
//! fidelity_mode = "exact"   # optional: exact | paper
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::detection::SwerlingCase;
use crate::error::{Error, Result};
use crate::lattice::{Extent, LatticeKind, NormalizedBounds, RadarScenario};
use crate::solver::{
    Fidelity, OneOffRequirement, Problem, ReferenceSnr, Requirements, SolverOptions, TargetModel,
};

pub const DEFAULT_P_FA: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub lattice: String,
    pub a: f64,
    pub p: f64,
    pub q: u32,
    pub theta_bw_min_deg: f64,
    pub theta_bw_ratio: f64,
    pub t_d_min_s: f64,
    pub t_d_ratio: f64,
    pub r0_m: f64,
    pub v_t_mps: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub az_deg: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub az_bars: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub el_deg: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub el_bars: Option<f64>,
    pub swerling: String,
    pub n_cpi: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_fa: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_d0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s0_db: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_d_des: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_s_des: Option<f64>,
    pub p_c_des: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub l_s_max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_f_max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid_step: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fidelity_mode: Option<String>,
}

fn field(name: &str, msg: impl std::fmt::Display) -> Error {
    Error::Config(format!("`{name}`: {msg}"))
}

fn positive(name: &str, v: f64) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(field(name, format_args!("must be positive and finite, got {v}")))
    }
}

fn probability(name: &str, v: f64) -> Result<f64> {
    if v > 0.0 && v < 1.0 {
        Ok(v)
    } else {
        Err(field(name, format_args!("must lie strictly between 0 and 1, got {v}")))
    }
}

fn extent(axis: &str, deg: Option<f64>, bars: Option<f64>) -> Result<Extent> {
    let deg_key = format!("{axis}_deg");
    let bars_key = format!("{axis}_bars");
    match (deg, bars) {
        (Some(d), None) => {
            positive(&deg_key, d)?;
            if d >= 90.0 {
                return Err(field(&deg_key, format_args!("half-width must be below 90 degrees, got {d}")));
            }
            Ok(Extent::Angle(d.to_radians()))
        }
        (None, Some(b)) => Ok(Extent::Bars(positive(&bars_key, b)?)),
        (Some(_), Some(_)) => Err(field(&deg_key, format_args!("give either `{deg_key}` or `{bars_key}`, not both"))),
        (None, None) => Err(field(&deg_key, format_args!("one of `{deg_key}` or `{bars_key}` is required"))),
    }
}

impl ScenarioConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("flat config always serializes")
    }

    pub fn scenario(&self) -> Result<RadarScenario> {
        let lattice = match self.lattice.trim().to_ascii_lowercase().as_str() {
            "triangular" => LatticeKind::Triangular,
            "rectangular" => LatticeKind::Rectangular,
            other => return Err(field("lattice", format_args!("expected triangular|rectangular, got `{other}`"))),
        };
        if self.q != 1 && self.q != 2 {
            return Err(field("q", format_args!("must be 1 or 2, got {}", self.q)));
        }
        if !(self.p > self.q as f64 && self.p.is_finite()) {
            return Err(field("p", format_args!("must exceed q = {}, got {}", self.q, self.p)));
        }
        let theta_min = positive("theta_bw_min_deg", self.theta_bw_min_deg)?;
        if !(self.theta_bw_ratio >= 1.0 && self.theta_bw_ratio.is_finite()) {
            return Err(field("theta_bw_ratio", format_args!("must be >= 1, got {}", self.theta_bw_ratio)));
        }
        if theta_min * self.theta_bw_ratio >= 90.0 {
            return Err(field("theta_bw_ratio", "maximum beam width must stay below 90 degrees"));
        }
        if !(self.t_d_ratio >= 1.0 && self.t_d_ratio.is_finite()) {
            return Err(field("t_d_ratio", format_args!("must be >= 1, got {}", self.t_d_ratio)));
        }
        let t_d_min = positive("t_d_min_s", self.t_d_min_s)?;
        let az = extent("az", self.az_deg, self.az_bars)?;
        let el = extent("el", self.el_deg, self.el_bars)?;
        let angular = [az, el].iter().filter(|e| matches!(e, Extent::Angle(_))).count();
        if self.q == 1 && angular != 1 {
            return Err(field("q", "q = 1 needs one angular extent (`*_deg`) and one bar count (`*_bars`)"));
        }
        if self.q == 2 && angular != 2 {
            return Err(field("q", "q = 2 needs `az_deg` and `el_deg`"));
        }
        let sc = RadarScenario {
            theta_bw_min: theta_min.to_radians(),
            theta_bw_max: (theta_min * self.theta_bw_ratio).to_radians(),
            t_d_min,
            t_d_max: t_d_min * self.t_d_ratio,
            r0: positive("r0_m", self.r0_m)?,
            v_t: positive("v_t_mps", self.v_t_mps)?,
            az,
            el,
            lattice,
            a: positive("a", self.a)?,
            p: self.p,
            q: self.q,
        };
        sc.validate().map_err(|e| Error::Config(e.to_string()))?;
        Ok(sc)
    }

    pub fn target(&self) -> Result<TargetModel> {
        let swerling: SwerlingCase = self.swerling.parse().map_err(|_| {
            field("swerling", format_args!("expected I, II, III or IV, got `{}`", self.swerling))
        })?;
        if self.n_cpi == 0 {
            return Err(field("n_cpi", "must be at least 1"));
        }
        let p_fa = probability("p_fa", self.p_fa.unwrap_or(DEFAULT_P_FA))?;
        let reference = match (self.p_d0, self.s0_db) {
            (Some(p), None) => {
                probability("p_d0", p)?;
                if p <= p_fa {
                    return Err(field("p_d0", format_args!("must exceed p_fa = {p_fa}, got {p}")));
                }
                ReferenceSnr::DetectionProbability(p)
            }
            (None, Some(db)) => {
                if !db.is_finite() {
                    return Err(field("s0_db", "must be finite"));
                }
                ReferenceSnr::Linear(10f64.powf(db / 10.0))
            }
            (Some(_), Some(_)) => return Err(field("p_d0", "give either `p_d0` or `s0_db`, not both")),
            (None, None) => return Err(field("p_d0", "one of `p_d0` or `s0_db` is required")),
        };
        Ok(TargetModel { swerling, n_cpi: self.n_cpi, p_fa, reference })
    }

    pub fn requirements(&self) -> Result<Requirements> {
        let one_off = match (self.p_d_des, self.r_s_des) {
            (Some(p), None) => OneOffRequirement::DetectionProbability(probability("p_d_des", p)?),
            (None, Some(r)) => OneOffRequirement::SnrRatio(positive("r_s_des", r)?),
            (None, None) => OneOffRequirement::None,
            (Some(_), Some(_)) => return Err(field("p_d_des", "give either `p_d_des` or `r_s_des`, not both")),
        };
        Ok(Requirements {
            one_off,
            p_c_des: probability("p_c_des", self.p_c_des)?,
            l_s_max: self.l_s_max.map(|v| positive("l_s_max", v)).transpose()?,
            r_f_max: self.r_f_max.map(|v| positive("r_f_max", v)).transpose()?,
        })
    }

    pub fn problem(&self) -> Result<Problem> {
        let scenario = self.scenario()?;
        Ok(Problem {
            scenario,
            bounds: NormalizedBounds::normalized(&scenario),
            target: self.target()?,
            requirements: self.requirements()?,
        })
    }

    pub fn solver_options(&self) -> Result<SolverOptions> {
        let mut opts = SolverOptions::default();
        if let Some(step) = self.grid_step {
            opts.grid_step = positive("grid_step", step)?;
        }
        if let Some(mode) = &self.fidelity_mode {
            opts.fidelity = mode
                .parse::<Fidelity>()
                .map_err(|_| field("fidelity_mode", format_args!("expected exact|paper, got `{mode}`")))?;
        }
        Ok(opts)
    }
}

/// Shipped scenario files, by name.
pub const PRESET_FILES: [(&str, &str); 2] = [
    ("q1_swerling2", include_str!("../presets/q1_swerling2.toml")),
    ("q2_swerling2", include_str!("../presets/q2_swerling2.toml")),
];

/// Config for a shipped preset. The two files above are returned verbatim;
/// other reference combinations (`q{1,2}_swerling{1..4}`) are derived from
/// them by swapping the fluctuation model.
pub fn preset(name: &str) -> Result<ScenarioConfig> {
    if let Some((_, text)) = PRESET_FILES.iter().find(|(n, _)| *n == name) {
        return ScenarioConfig::from_toml_str(text);
    }
    let unknown = || Error::Config(format!("unknown preset `{name}`"));
    let (base, case) = name.rsplit_once("_swerling").ok_or_else(unknown)?;
    let (_, text) = PRESET_FILES
        .iter()
        .find(|(n, _)| n.strip_suffix("_swerling2") == Some(base))
        .ok_or_else(unknown)?;
    let mut cfg = ScenarioConfig::from_toml_str(text)?;
    cfg.swerling = match case {
        "1" => "I",
        "2" => "II",
        "3" => "III",
        "4" => "IV",
        _ => return Err(unknown()),
    }
    .to_string();
    Ok(cfg)
}
