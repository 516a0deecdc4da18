//! JSON documents describing a meridian surface: profile, directrix and domain.
//!
//! ```json
//! {
//!   "profile":   { "kind": "sphere" },
//!   "directrix": { "kind": "circle", "r": 0.7071067811865476 },
//!   "domain":    { "u": [0.3, 2.8415926535897933], "v": [0.0, 4.442882938158366] }
//! }
//! ```

use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::curves::{KappaLaw, PrescribedKappaCurve, SmallCircle, SphericalCurve};
use crate::error::{GeomError, Result};
use crate::meridian::MeridianSurface;
use crate::numeric::{Interval, Rect};
use crate::profiles::{
    integrate_profile, Branch, CaseIProfile, ChenField, ChenParams, LineProfile, MeridianProfile, ParallelIiField,
    ParallelParamsI, ParallelParamsII, ProfileDocument, Provenance, SampledProfile, SphereProfile, DEFAULT_RK4_STEP,
};

fn default_step() -> f64 {
    DEFAULT_RK4_STEP
}

fn default_span() -> Interval {
    Interval { lo: 0.0, hi: 10.0 }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProfileSpec {
    Sphere {},
    CaseI {
        c: f64,
        d: f64,
        #[serde(default)]
        a_shift: f64,
    },
    Chen {
        a: f64,
        b: f64,
        #[serde(default)]
        branch: Branch,
        f0: f64,
        #[serde(default = "default_step")]
        step: f64,
        #[serde(default = "default_span")]
        u_span: Interval,
    },
    ParallelIi {
        a: f64,
        c: f64,
        #[serde(default)]
        branch: Branch,
        f0: f64,
        #[serde(default = "default_step")]
        step: f64,
        #[serde(default = "default_span")]
        u_span: Interval,
    },
    Line {
        f0: f64,
        angle: f64,
    },
    /// Inline arrays, or `path` to a profile document written by `meridian profile`.
    CustomSamples {
        #[serde(default)]
        u: Vec<f64>,
        #[serde(default)]
        f: Vec<f64>,
        #[serde(default)]
        g: Vec<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        path: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LawName {
    Linear,
    Sine,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DirectrixSpec {
    /// Latitude circle given by Euclidean radius `r` or by spherical curvature `kappa`.
    Circle {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        r: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        kappa: Option<f64>,
    },
    /// κ(v) = k0 + k1·v (`linear`) or k0 + amp·sin(freq·v) (`sine`) on `v`.
    PrescribedKappa {
        law: LawName,
        k0: f64,
        #[serde(default)]
        k1: f64,
        #[serde(default)]
        amp: f64,
        #[serde(default = "one")]
        freq: f64,
        v: Interval,
    },
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainSpec {
    /// Defaults to the whole domain of an integrated or sampled profile.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u: Option<Interval>,
    pub v: Interval,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurfaceSpec {
    pub profile: ProfileSpec,
    pub directrix: DirectrixSpec,
    pub domain: DomainSpec,
}

impl ProfileSpec {
    /// Builds the profile; relative sample paths resolve against `base`.
    pub fn build(&self, base: &Path) -> Result<Arc<dyn MeridianProfile>> {
        Ok(match self {
            ProfileSpec::Sphere {} => Arc::new(SphereProfile),
            &ProfileSpec::CaseI { c, d, a_shift } => Arc::new(CaseIProfile::new(ParallelParamsI { c, d, a_shift })?),
            &ProfileSpec::Chen { a, b, branch, f0, step, u_span } => {
                let field = ChenField::new(ChenParams { a, b, branch })?;
                Arc::new(integrate_profile(Arc::new(field), f0, u_span, step)?)
            }
            &ProfileSpec::ParallelIi { a, c, branch, f0, step, u_span } => {
                let field = ParallelIiField::new(ParallelParamsII { a, c, branch })?;
                Arc::new(integrate_profile(Arc::new(field), f0, u_span, step)?)
            }
            &ProfileSpec::Line { f0, angle } => Arc::new(LineProfile::new(f0, angle)?),
            ProfileSpec::CustomSamples { u, f, g, path } => match path {
                Some(p) => {
                    if !(u.is_empty() && f.is_empty() && g.is_empty()) {
                        return Err(GeomError::Spec("custom_samples takes either arrays or a path, not both".into()));
                    }
                    let full = base.join(p);
                    let text = std::fs::read_to_string(&full)
                        .map_err(|e| GeomError::Spec(format!("cannot read {}: {e}", full.display())))?;
                    let doc: ProfileDocument =
                        serde_json::from_str(&text).map_err(|e| GeomError::Spec(format!("{}: {e}", full.display())))?;
                    Arc::new(SampledProfile::new(&doc.u_samples, &doc.f_samples, &doc.g_samples)?)
                }
                None => Arc::new(SampledProfile::new(u, f, g)?),
            },
        })
    }
}

impl DirectrixSpec {
    pub fn build(&self) -> Result<Arc<dyn SphericalCurve>> {
        Ok(match *self {
            DirectrixSpec::Circle { r: Some(r), kappa: None } => Arc::new(crate::curves::make_small_circle(r)?),
            DirectrixSpec::Circle { r: None, kappa: Some(k) } => Arc::new(SmallCircle::with_curvature(k)?),
            DirectrixSpec::Circle { .. } => {
                return Err(GeomError::Spec("circle directrix needs exactly one of r and kappa".into()))
            }
            DirectrixSpec::PrescribedKappa { law, k0, k1, amp, freq, v } => {
                let law = match law {
                    LawName::Linear => KappaLaw::Linear { k0, k1 },
                    LawName::Sine => KappaLaw::Sine { k0, amp, freq },
                };
                Arc::new(PrescribedKappaCurve::new(law, v)?)
            }
        })
    }
}

impl SurfaceSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| GeomError::Spec(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<(Self, PathBuf)> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| GeomError::Spec(format!("cannot read {}: {e}", path.display())))?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok((Self::from_json(&text)?, base))
    }

    pub fn build(&self, base: &Path) -> Result<MeridianSurface> {
        let profile = self.profile.build(base)?;
        let directrix = self.directrix.build()?;
        let u = match self.domain.u {
            Some(u) => u,
            None if profile.provenance() != Provenance::Analytic => profile.domain(),
            None => return Err(GeomError::Spec(format!("domain.u is required for the {} profile", profile.kind()))),
        };
        MeridianSurface::build(profile, directrix, Rect::new(u, self.domain.v))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::meridian::SurfaceClass;

    #[test]
    fn sphere_circle_document() {
        let spec = SurfaceSpec::from_json(
            r#"{"profile": {"kind": "sphere"},
                "directrix": {"kind": "circle", "r": 0.7071067811865476},
                "domain": {"u": [0.3, 2.8], "v": [0, 4.4]}}"#,
        )
        .unwrap();
        let ms = spec.build(Path::new(".")).unwrap();
        assert_eq!(ms.class(), SurfaceClass::General);
        let back: SurfaceSpec = serde_json::from_str(&serde_json::to_string(&spec).unwrap()).unwrap();
        assert_eq!(back, spec);
    }

    #[test]
    fn chen_document_defaults_u_to_profile() {
        let spec = SurfaceSpec::from_json(
            r#"{"profile": {"kind": "chen", "a": 1, "b": 1, "f0": 1.5},
                "directrix": {"kind": "circle", "kappa": 1},
                "domain": {"v": [0, 1]}}"#,
        )
        .unwrap();
        let ms = spec.build(Path::new(".")).unwrap();
        assert_eq!(ms.domain().u, ms.profile().domain());
    }

    #[test]
    fn rejects_bad_documents() {
        for text in [
            r#"{"profile": {"kind": "torus"}, "directrix": {"kind": "circle", "r": 1}, "domain": {"v": [0, 1]}}"#,
            r#"{"profile": {"kind": "sphere", "extra": 1}, "directrix": {"kind": "circle", "r": 1}, "domain": {"v": [0, 1]}}"#,
            r#"{"profile": {"kind": "sphere"}, "directrix": {"kind": "circle", "r": 1}}"#,
        ] {
            assert!(matches!(SurfaceSpec::from_json(text), Err(GeomError::Spec(_))), "{text}");
        }
        let missing_u = SurfaceSpec::from_json(
            r#"{"profile": {"kind": "case_i", "c": 0, "d": 1}, "directrix": {"kind": "circle", "r": 0.5}, "domain": {"v": [0, 1]}}"#,
        )
        .unwrap();
        assert!(matches!(missing_u.build(Path::new(".")), Err(GeomError::Spec(_))));
        let both = SurfaceSpec::from_json(
            r#"{"profile": {"kind": "sphere"}, "directrix": {"kind": "circle", "r": 0.5, "kappa": 1}, "domain": {"u": [1, 2], "v": [0, 1]}}"#,
        )
        .unwrap();
        assert!(both.build(Path::new(".")).is_err());
        let bad_param = SurfaceSpec::from_json(
            r#"{"profile": {"kind": "case_i", "c": 1, "d": 0.5}, "directrix": {"kind": "circle", "r": 0.5}, "domain": {"u": [0, 1], "v": [0, 1]}}"#,
        )
        .unwrap();
        let err = bad_param.build(Path::new(".")).unwrap_err();
        assert!(err.to_string().contains("requires d > c²"));
    }

    #[test]
    fn sample_file_round_trip() {
        let dir = std::env::temp_dir().join(format!("meridian-spec-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let doc = ProfileDocument::sample(&SphereProfile, Interval::new(0.3, 2.8).unwrap(), 201).unwrap();
        std::fs::write(dir.join("sphere.json"), serde_json::to_string(&doc).unwrap()).unwrap();
        let spec_path = dir.join("spec.json");
        std::fs::write(
            &spec_path,
            r#"{"profile": {"kind": "custom_samples", "path": "sphere.json"},
                "directrix": {"kind": "prescribed_kappa", "law": "sine", "k0": 1, "amp": 0.2, "v": [0, 3]},
                "domain": {"v": [0, 3]}}"#,
        )
        .unwrap();
        let (spec, base) = SurfaceSpec::load(&spec_path).unwrap();
        let ms = spec.build(&base).unwrap();
        assert_eq!(ms.class(), SurfaceClass::General);
        assert_eq!(ms.domain().u, Interval::new(0.3, 2.8).unwrap());
        std::fs::remove_dir_all(dir).unwrap();
    }
}
