//! Meridian surfaces `z(u, v) = f(u)·l(v) + g(u)·e₄` and their frames.

mod defects;
mod octet;

pub use defects::{
    chen_defect, derivative_formula_residuals, evaluate_grid, parallel_defect, reconstruction_residuals, DefectField,
    GridSample, DERIVATIVE_FORMULAS, RECONSTRUCTION_FORMULAS,
};
pub use octet::{
    a_term_derivative_fd, octet_closed, octet_numeric, ClosedForm, EvaluatorRegistry, FrameDifferences,
    InvariantEvaluator, InvariantRecord, OCTET_NAMES,
};

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::curves::{FrenetData, SphericalCurve};
use crate::error::{GeomError, Result};
use crate::numeric::{det4, dot, e4, embed, DiffConfig, Rect, Vec4};
use crate::profiles::{MeridianProfile, ProfileJet};
use crate::surface::{Partials, SurfacePatch};

/// |κ_m| or |κ| below this counts as zero when classifying a surface.
pub const CLASS_ZERO_TOL: f64 = 1e-8;
/// R² = κ² + (ġ + fκ_m)² at or below this is a minimal point.
pub const MINIMAL_POINT_TOL: f64 = 1e-12;
/// Samples per direction used to classify a surface.
pub const CLASS_SAMPLES: usize = 65;

/// Which of the three cases of the construction a surface falls into.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SurfaceClass {
    /// κ_m ≠ 0 and κ ≠ 0 at every sample.
    General,
    /// κ ≡ 0: the directrix is a great circle and the surface lies in a 3-plane.
    PlanarGreatCircle,
    /// κ_m ≡ 0: straight meridians, a developable ruled surface.
    DevelopableStraightMeridian,
    /// κ_m or κ vanishes somewhere but not identically.
    Mixed,
}

impl SurfaceClass {
    pub fn is_general(self) -> bool {
        self == SurfaceClass::General
    }

    /// Explanation used when an operation requires the general class.
    pub fn reason(self) -> &'static str {
        match self {
            SurfaceClass::General => "surface is of the general class",
            SurfaceClass::PlanarGreatCircle => "flat points: meridian surface is planar",
            SurfaceClass::DevelopableStraightMeridian => "flat points: meridian surface is developable",
            SurfaceClass::Mixed => "κ_m or κ vanishes at some samples of the domain",
        }
    }
}

/// A meridian surface over a parameter rectangle.
#[derive(Clone)]
pub struct MeridianSurface {
    profile: Arc<dyn MeridianProfile>,
    directrix: Arc<dyn SphericalCurve>,
    domain: Rect,
    class: SurfaceClass,
}

impl fmt::Debug for MeridianSurface {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MeridianSurface")
            .field("profile", &self.profile)
            .field("directrix", &self.directrix)
            .field("domain", &self.domain)
            .field("class", &self.class)
            .finish()
    }
}

impl MeridianSurface {
    /// Assembles the surface and classifies it by sampling κ_m and κ.
    pub fn build(profile: Arc<dyn MeridianProfile>, directrix: Arc<dyn SphericalCurve>, domain: Rect) -> Result<Self> {
        let (pu, cv) = (profile.domain(), directrix.domain());
        if !pu.covers(&domain.u) {
            return Err(GeomError::Domain(format!(
                "profile domain [{}, {}] does not cover u ∈ [{}, {}]",
                pu.lo, pu.hi, domain.u.lo, domain.u.hi
            )));
        }
        if !cv.covers(&domain.v) {
            return Err(GeomError::Domain(format!(
                "directrix domain [{}, {}] does not cover v ∈ [{}, {}]",
                cv.lo, cv.hi, domain.v.lo, domain.v.hi
            )));
        }
        let km: Vec<f64> = domain
            .u
            .samples(CLASS_SAMPLES)
            .into_iter()
            .map(|u| profile.jet(u).map(|j| j.kappa_m().abs()))
            .collect::<Result<_>>()?;
        let kappa: Vec<f64> = domain
            .v
            .samples(CLASS_SAMPLES)
            .into_iter()
            .map(|v| directrix.frame(v).map(|fr| fr.kappa.abs()))
            .collect::<Result<_>>()?;
        let zero = |x: &f64| *x < CLASS_ZERO_TOL;
        let class = if kappa.iter().all(zero) {
            SurfaceClass::PlanarGreatCircle
        } else if km.iter().all(zero) {
            SurfaceClass::DevelopableStraightMeridian
        } else if km.iter().any(zero) || kappa.iter().any(zero) {
            SurfaceClass::Mixed
        } else {
            SurfaceClass::General
        };
        Ok(Self { profile, directrix, domain, class })
    }

    pub fn profile(&self) -> &Arc<dyn MeridianProfile> {
        &self.profile
    }

    pub fn directrix(&self) -> &Arc<dyn SphericalCurve> {
        &self.directrix
    }

    pub fn domain(&self) -> Rect {
        self.domain
    }

    pub fn class(&self) -> SurfaceClass {
        self.class
    }

    pub fn require_general(&self) -> Result<()> {
        if self.class.is_general() {
            Ok(())
        } else {
            Err(GeomError::NotGeneralClass(self.class.reason().into()))
        }
    }

    /// Profile jet and directrix frame at (u, v).
    pub fn local_data(&self, u: f64, v: f64) -> Result<(ProfileJet, FrenetData)> {
        Ok((self.profile.jet(u)?, self.directrix.frame(v)?))
    }

    pub fn meridian_frame(&self, u: f64, v: f64) -> Result<MeridianFrame> {
        let (jet, fr) = self.local_data(u, v)?;
        Ok(MeridianFrame::new(&jet, &fr))
    }

    /// Both frames at (u, v); fails at minimal points where the geometric frame is undefined.
    pub fn frames(&self, u: f64, v: f64) -> Result<(MeridianFrame, GeometricFrame)> {
        let (jet, fr) = self.local_data(u, v)?;
        let mf = MeridianFrame::new(&jet, &fr);
        let gf = GeometricFrame::new(&mf, jet.a_term(), fr.kappa).ok_or(GeomError::MinimalPoint { u, v })?;
        Ok((mf, gf))
    }
}

impl SurfacePatch for MeridianSurface {
    fn point(&self, u: f64, v: f64) -> Result<Vec4> {
        let jet = self.profile.jet(u)?;
        let l = self.directrix.position(v)?;
        Ok(embed(&l) * jet.f + e4() * jet.g)
    }

    fn partials(&self, u: f64, v: f64, _cfg: &DiffConfig) -> Result<Partials> {
        let (jet, fr) = self.local_data(u, v)?;
        let (l, t, n) = (embed(&fr.l), embed(&fr.t), embed(&fr.n));
        Ok(Partials {
            zu: l * jet.f1 + e4() * jet.g1,
            zv: t * jet.f,
            zuu: l * jet.f2 + e4() * jet.g2,
            zuv: t * jet.f1,
            zvv: (n * fr.kappa - l) * jet.f,
        })
    }

    fn normal_frame(&self, u: f64, v: f64, _cfg: &DiffConfig) -> Result<(Vec4, Vec4)> {
        let mf = self.meridian_frame(u, v)?;
        Ok((mf.n1, mf.n2))
    }
}

/// The orthonormal frame {X, Y, n₁, n₂} adapted to meridians and parallels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeridianFrame {
    /// z_u = ḟ·l + ġ·e₄
    pub x_m: Vec4,
    /// z_v / f = t
    pub y_m: Vec4,
    pub n1: Vec4,
    /// −ġ·l + ḟ·e₄
    pub n2: Vec4,
}

impl MeridianFrame {
    pub fn new(jet: &ProfileJet, fr: &FrenetData) -> Self {
        let l = embed(&fr.l);
        Self { x_m: l * jet.f1 + e4() * jet.g1, y_m: embed(&fr.t), n1: embed(&fr.n), n2: l * (-jet.g1) + e4() * jet.f1 }
    }

    pub fn vectors(&self) -> [Vec4; 4] {
        [self.x_m, self.y_m, self.n1, self.n2]
    }
}

/// Principal tangents x, y and the normals b (along H) and l.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeometricFrame {
    pub x: Vec4,
    pub y: Vec4,
    pub b: Vec4,
    pub l_normal: Vec4,
}

impl GeometricFrame {
    /// `None` when κ² + A² ≤ [`MINIMAL_POINT_TOL`].
    pub fn new(mf: &MeridianFrame, a: f64, kappa: f64) -> Option<Self> {
        let r2 = kappa * kappa + a * a;
        if !(r2 > MINIMAL_POINT_TOL) {
            return None;
        }
        let r = r2.sqrt();
        Some(Self {
            x: (mf.x_m + mf.y_m) * FRAC_1_SQRT_2,
            y: (mf.y_m - mf.x_m) * FRAC_1_SQRT_2,
            b: (mf.n1 * kappa + mf.n2 * a) / r,
            l_normal: (mf.n2 * kappa - mf.n1 * a) / r,
        })
    }

    pub fn vectors(&self) -> [Vec4; 4] {
        [self.x, self.y, self.b, self.l_normal]
    }
}

/// Largest |⟨eᵢ, eⱼ⟩ − δᵢⱼ| over a quadruple.
pub fn orthonormality_defect(frame: &[Vec4; 4]) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..4 {
        for j in 0..4 {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((dot(&frame[i], &frame[j]) - target).abs());
        }
    }
    worst
}

pub fn orientation(frame: &[Vec4; 4]) -> f64 {
    det4(&frame[0], &frame[1], &frame[2], &frame[3])
}
