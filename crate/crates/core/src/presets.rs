//! Reference scenarios: a 2.5 deg / 5 ms search sector of +-60 deg azimuth
//! against a 1000 m/s inbound target at 50 km.

use crate::detection::SwerlingCase;
use crate::lattice::{Extent, LatticeKind, NormalizedBounds, RadarScenario};
use crate::solver::{OneOffRequirement, Problem, ReferenceSnr, Requirements, TargetModel};

/// Names accepted by [`by_name`].
pub const NAMES: [&str; 8] = [
    "q1_swerling1",
    "q1_swerling2",
    "q1_swerling3",
    "q1_swerling4",
    "q2_swerling1",
    "q2_swerling2",
    "q2_swerling3",
    "q2_swerling4",
];

/// `q = 1` scans 16 elevation bars; `q = 2` covers +-15 deg in elevation.
pub fn reference_scenario(q: u32) -> RadarScenario {
    let deg = std::f64::consts::PI / 180.0;
    RadarScenario {
        theta_bw_min: 2.5 * deg,
        theta_bw_max: 10.0 * deg,
        t_d_min: 5e-3,
        t_d_max: 40e-3,
        r0: 50e3,
        v_t: 1000.0,
        az: Extent::Angle(60.0 * deg),
        el: if q == 1 { Extent::Bars(16.0) } else { Extent::Angle(15.0 * deg) },
        lattice: LatticeKind::Triangular,
        a: 2.0,
        p: 4.0,
        q,
    }
}

/// Four-pulse target with `P_d(S_0) = 0.4` at `P_fa = 1e-6`.
pub fn reference_target(swerling: SwerlingCase) -> TargetModel {
    TargetModel {
        swerling,
        n_cpi: 4,
        p_fa: 1e-6,
        reference: ReferenceSnr::DetectionProbability(0.4),
    }
}

/// `P_c,des = 0.85`, `r_S,des = 2`, `L_s,max = 0.8`, `r_f,max = 0.65`.
pub fn reference_requirements() -> Requirements {
    Requirements {
        one_off: OneOffRequirement::SnrRatio(2.0),
        p_c_des: 0.85,
        l_s_max: Some(0.8),
        r_f_max: Some(0.65),
    }
}

pub fn reference_problem(q: u32, swerling: SwerlingCase) -> Problem {
    let scenario = reference_scenario(q);
    Problem {
        scenario,
        bounds: NormalizedBounds::normalized(&scenario),
        target: reference_target(swerling),
        requirements: reference_requirements(),
    }
}

pub fn by_name(name: &str) -> Option<Problem> {
    let rest = name.strip_prefix('q')?;
    let (q, case) = rest.split_once("_swerling")?;
    let q: u32 = q.parse().ok()?;
    if q != 1 && q != 2 {
        return None;
    }
    let swerling = match case {
        "1" => SwerlingCase::I,
        "2" => SwerlingCase::II,
        "3" => SwerlingCase::III,
        "4" => SwerlingCase::IV,
        _ => return None,
    };
    Some(reference_problem(q, swerling))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_name_resolves() {
        for name in NAMES {
            let p = by_name(name).unwrap();
            p.scenario.validate().unwrap();
        }
        assert!(by_name("q3_swerling2").is_none());
        assert!(by_name("q1_swerling5").is_none());
        assert!(by_name("nonsense").is_none());
    }
}
