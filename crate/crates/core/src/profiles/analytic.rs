use serde::{Deserialize, Serialize};

use super::{MeridianProfile, ProfileJet, Provenance};
use crate::error::{GeomError, Result};
use crate::numeric::Interval;

/// The unit half-circle f = sin u, g = −cos u on (0, π); κ_m ≡ 1.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SphereProfile;

impl MeridianProfile for SphereProfile {
    fn kind(&self) -> &'static str {
        "sphere"
    }

    fn domain(&self) -> Interval {
        Interval { lo: 0.0, hi: std::f64::consts::PI }
    }

    fn provenance(&self) -> Provenance {
        Provenance::Analytic
    }

    fn jet(&self, u: f64) -> Result<ProfileJet> {
        let (s, c) = u.sin_cos();
        if !(u > 0.0 && u < std::f64::consts::PI) {
            return Err(GeomError::Domain(format!("sphere profile needs u in (0, π), got {u}")));
        }
        Ok(ProfileJet { f: s, g: -c, f1: c, g1: s, f2: -s, g2: c, third: Some((-c, -s)) })
    }

    fn params(&self) -> serde_json::Value {
        serde_json::json!({})
    }
}

/// Parameters of the closed-form parallel-normal-bundle meridian
/// f = √(u² + 2cu + d), g = √(d − c²)·ln(u + c + f) + a_shift.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParallelParamsI {
    pub c: f64,
    pub d: f64,
    #[serde(default)]
    pub a_shift: f64,
}

/// Meridian with ġ + f κ_m ≡ 0, solving 1 − ḟ² − f f̈ = 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CaseIProfile {
    params: ParallelParamsI,
    root_disc: f64,
}

impl CaseIProfile {
    pub fn new(params: ParallelParamsI) -> Result<Self> {
        let ParallelParamsI { c, d, a_shift } = params;
        if !(c.is_finite() && d.is_finite() && a_shift.is_finite()) {
            return Err(GeomError::Param("case (i) parameters must be finite".into()));
        }
        if d <= c * c {
            return Err(GeomError::Param(format!("case (i) meridian requires d > c² (got c = {c}, d = {d})")));
        }
        Ok(Self { params, root_disc: (d - c * c).sqrt() })
    }

    pub fn params_i(&self) -> ParallelParamsI {
        self.params
    }
}

impl MeridianProfile for CaseIProfile {
    fn kind(&self) -> &'static str {
        "case_i"
    }

    fn domain(&self) -> Interval {
        Interval::REAL_LINE
    }

    fn provenance(&self) -> Provenance {
        Provenance::Analytic
    }

    fn jet(&self, u: f64) -> Result<ProfileJet> {
        let ParallelParamsI { c, d, a_shift } = self.params;
        let r = self.root_disc;
        let disc = r * r;
        let f = (u * u + 2.0 * c * u + d).sqrt();
        let f1 = (u + c) / f;
        let f2 = disc / (f * f * f);
        let f3 = -3.0 * disc * f1 / f.powi(4);
        let g = r * (u + c + f).ln() + a_shift;
        let g1 = r / f;
        let g2 = -r * f1 / (f * f);
        let g3 = -r * (f2 / (f * f) - 2.0 * f1 * f1 / (f * f * f));
        Ok(ProfileJet { f, g, f1, g1, f2, g2, third: Some((f3, g3)) })
    }

    fn params(&self) -> serde_json::Value {
        serde_json::to_value(self.params).unwrap_or_default()
    }
}

/// Straight meridian f = f0 + u cos φ, g = u sin φ, φ ∈ [0, π/2].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineProfile {
    f0: f64,
    angle: f64,
}

impl LineProfile {
    pub fn new(f0: f64, angle: f64) -> Result<Self> {
        if !(f0 > 0.0 && f0.is_finite()) {
            return Err(GeomError::Param(format!("line profile needs f0 > 0, got {f0}")));
        }
        if !(0.0..=std::f64::consts::FRAC_PI_2).contains(&angle) {
            return Err(GeomError::Param(format!(
                "line profile angle must lie in [0, π/2] so that ġ ≥ 0, got {angle}"
            )));
        }
        Ok(Self { f0, angle })
    }
}

impl MeridianProfile for LineProfile {
    fn kind(&self) -> &'static str {
        "line"
    }

    fn domain(&self) -> Interval {
        let c = self.angle.cos();
        if c > 1e-12 {
            Interval { lo: -self.f0 / c, hi: f64::INFINITY }
        } else {
            Interval::REAL_LINE
        }
    }

    fn provenance(&self) -> Provenance {
        Provenance::Analytic
    }

    fn jet(&self, u: f64) -> Result<ProfileJet> {
        let (s, c) = self.angle.sin_cos();
        let f = self.f0 + u * c;
        if f <= 0.0 {
            return Err(GeomError::Domain(format!("line profile radius vanishes at u = {u}")));
        }
        Ok(ProfileJet { f, g: u * s, f1: c, g1: s, f2: 0.0, g2: 0.0, third: Some((0.0, 0.0)) })
    }

    fn params(&self) -> serde_json::Value {
        serde_json::json!({ "f0": self.f0, "angle": self.angle })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{diff1, diff2, DiffConfig};
    use crate::profiles::unit_speed_defect;

    fn case_i() -> CaseIProfile {
        CaseIProfile::new(ParallelParamsI { c: 0.0, d: 1.0, a_shift: 0.0 }).unwrap()
    }

    #[test]
    fn case_i_values_at_zero() {
        let j = case_i().jet(0.0).unwrap();
        assert_eq!(j.f, 1.0);
        assert_eq!(j.f1, 0.0);
        assert_eq!(j.g1, 1.0);
        assert_eq!(j.g, 0.0);
        assert!((j.kappa_m() + 1.0).abs() < 1e-15);
        assert!(j.a_term().abs() < 1e-15);
    }

    #[test]
    fn case_i_solves_its_ode() {
        let p = case_i();
        // second differences are rounding-limited below h ≈ 3e-4
        let cfg = DiffConfig::with_step(3e-4).unwrap();
        for u in Interval::new(-2.0, 2.0).unwrap().samples(81) {
            let f = |s: f64| p.jet(s).map(|j| j.f);
            let f1 = diff1(f, u, &cfg).unwrap();
            let f2 = diff2(f, u, &cfg).unwrap();
            let fu = p.jet(u).unwrap().f;
            // residual of 1 − ḟ² − f f̈ = 0 from differences of f alone
            assert!((1.0 - f1 * f1 - fu * f2).abs() < 1e-7, "u = {u}");
            let g1 = diff1(|s| p.jet(s).map(|j| j.g), u, &cfg).unwrap();
            assert!((f1 * f1 + g1 * g1 - 1.0).abs() < 1e-7);
        }
        assert!(unit_speed_defect(&p, Interval::new(-2.0, 2.0).unwrap(), 401).unwrap() < 1e-12);
    }

    #[test]
    fn case_i_general_parameters() {
        let p = CaseIProfile::new(ParallelParamsI { c: 0.7, d: 3.0, a_shift: -2.0 }).unwrap();
        for u in Interval::new(-4.0, 4.0).unwrap().samples(33) {
            let j = p.jet(u).unwrap();
            assert!(j.a_term().abs() < 1e-12);
            assert!(j.unit_speed_residual() < 1e-12);
            assert!(j.g1 > 0.0);
        }
    }

    #[test]
    fn case_i_rejects_small_d() {
        for (c, d) in [(1.0, 0.5), (0.0, 0.0), (2.0, 4.0), (0.0, -0.1)] {
            let err = CaseIProfile::new(ParallelParamsI { c, d, a_shift: 0.0 }).unwrap_err();
            assert!(err.to_string().contains("d > c²"), "{err}");
        }
    }

    #[test]
    fn sphere_profile_domain() {
        assert!(SphereProfile.jet(0.0).is_err());
        assert!(SphereProfile.jet(3.2).is_err());
        let j = SphereProfile.jet(std::f64::consts::FRAC_PI_2).unwrap();
        assert!((j.f - 1.0).abs() < 1e-15);
        assert!((j.a_term() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn line_profile_checks() {
        assert!(LineProfile::new(0.0, 0.3).is_err());
        assert!(LineProfile::new(1.0, 2.0).is_err());
        let p = LineProfile::new(1.0, 0.0).unwrap();
        assert!(p.jet(-1.0).is_err());
        assert_eq!(p.jet(0.5).unwrap().kappa_m(), 0.0);
    }
}
