//! Meridian profile curves `u ↦ (f(u), g(u))` and their meridian curvature.
//!
//! Every profile is unit speed (ḟ² + ġ² = 1), has f > 0 on its domain and
//! ġ ≥ 0. Profiles come either in closed form ([`analytic`]), from the
//! first-order ODE ḟ = y(f) ([`ode`]) or from tabulated samples ([`samples`]).

pub mod analytic;
pub mod fields;
pub mod ode;
pub mod samples;

use std::fmt;

use serde::{Deserialize, Serialize};

pub use analytic::{CaseIProfile, LineProfile, ParallelParamsI, SphereProfile};
pub use fields::{
    chen_slope_residual, chen_y, parallel_ii_slope_residual, parallel_ii_y, Branch, ChenField, ChenParams, FnField,
    ParallelIiField, ParallelParamsII, SlopeField,
};
pub use ode::{integrate_profile, OdeProfile, DEFAULT_RK4_STEP};
pub use samples::SampledProfile;

use crate::error::{GeomError, Result};
use crate::numeric::{diff1, diff2, DiffConfig, Interval};

/// Tolerance on ḟ² + ġ² = 1.
pub const UNIT_SPEED_TOL: f64 = 1e-6;
/// |κ_m| below this everywhere marks a straight meridian.
pub const STRAIGHT_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Analytic,
    OdeIntegrated,
    Sampled,
}

/// Value and derivatives of a profile at one parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileJet {
    pub f: f64,
    pub g: f64,
    pub f1: f64,
    pub g1: f64,
    pub f2: f64,
    pub g2: f64,
    /// Third derivatives (f⃛, g⃛) when known in closed form.
    pub third: Option<(f64, f64)>,
}

impl ProfileJet {
    /// κ_m = ḟg̈ − ġf̈.
    pub fn kappa_m(&self) -> f64 {
        self.f1 * self.g2 - self.g1 * self.f2
    }

    /// A = ġ + f κ_m, which is 2f times the n₂-component of the mean curvature vector.
    pub fn a_term(&self) -> f64 {
        self.g1 + self.f * self.kappa_m()
    }

    /// dA/du from closed-form third derivatives, when available.
    pub fn a_term_derivative(&self) -> Option<f64> {
        let (f3, g3) = self.third?;
        let dkm = self.f1 * g3 - self.g1 * f3;
        Some(self.g2 + self.f1 * self.kappa_m() + self.f * dkm)
    }

    pub fn unit_speed_residual(&self) -> f64 {
        (self.f1 * self.f1 + self.g1 * self.g1 - 1.0).abs()
    }
}

/// A unit-speed meridian curve (f(u), g(u)) of the rotational hypersurface.
pub trait MeridianProfile: Send + Sync + fmt::Debug {
    fn kind(&self) -> &'static str;

    fn domain(&self) -> Interval;

    fn provenance(&self) -> Provenance;

    fn jet(&self, u: f64) -> Result<ProfileJet>;

    /// Construction parameters, for serialization.
    fn params(&self) -> serde_json::Value;

    /// Validity interval of the slope field in f, for ODE-defined profiles.
    fn validity(&self) -> Option<Interval> {
        None
    }
}

/// Meridian curvature from finite differences of the profile's position.
///
/// Returns the determinant form ḟg̈ − ġf̈. Away from |ḟ| = 1 this agrees with
/// −f̈/√(1 − ḟ²) for profiles following the ġ ≥ 0 convention.
pub fn kappa_m(p: &dyn MeridianProfile, u: f64, cfg: &DiffConfig) -> Result<f64> {
    let f = |s: f64| p.jet(s).map(|j| j.f);
    let g = |s: f64| p.jet(s).map(|j| j.g);
    let (f1, f2) = (diff1(f, u, cfg)?, diff2(f, u, cfg)?);
    let (g1, g2) = (diff1(g, u, cfg)?, diff2(g, u, cfg)?);
    let det = f1 * g2 - g1 * f2;
    if f1.abs() >= 1.0 - 1e-8 && !det.is_finite() {
        return Err(GeomError::Singularity(format!(
            "|f'({u})| = {} reaches 1 and the curvature is not finite",
            f1.abs()
        )));
    }
    Ok(det)
}

/// Second expression of the meridian curvature, −f̈/√(1 − ḟ²).
pub fn kappa_m_from_f(p: &dyn MeridianProfile, u: f64, cfg: &DiffConfig) -> Result<f64> {
    let f = |s: f64| p.jet(s).map(|j| j.f);
    let f1 = diff1(f, u, cfg)?;
    if f1.abs() >= 1.0 - 1e-8 {
        return Err(GeomError::Singularity(format!("|f'({u})| = {} reaches 1", f1.abs())));
    }
    Ok(-diff2(f, u, cfg)? / (1.0 - f1 * f1).sqrt())
}

/// Largest unit-speed residual over `n` uniform samples of `range`.
pub fn unit_speed_defect(p: &dyn MeridianProfile, range: Interval, n: usize) -> Result<f64> {
    range.samples(n).into_iter().try_fold(0.0f64, |acc, u| Ok(acc.max(p.jet(u)?.unit_speed_residual())))
}

/// Whether κ_m vanishes (within [`STRAIGHT_TOL`]) at `n` samples of `range`.
pub fn is_straight(p: &dyn MeridianProfile, range: Interval, n: usize) -> Result<bool> {
    for u in range.samples(n) {
        if p.jet(u)?.kappa_m().abs() >= STRAIGHT_TOL {
            return Ok(false);
        }
    }
    Ok(true)
}

/// JSON document describing a sampled profile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileDocument {
    pub kind: String,
    pub params: serde_json::Value,
    pub provenance: Provenance,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub validity: Option<Interval>,
    #[serde(default)]
    pub degenerate: bool,
    pub u_samples: Vec<f64>,
    pub f_samples: Vec<f64>,
    pub g_samples: Vec<f64>,
}

impl ProfileDocument {
    pub fn sample(p: &dyn MeridianProfile, range: Interval, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(GeomError::Param("a profile document needs at least 2 samples".into()));
        }
        let us = range.samples(n);
        let jets = us.iter().map(|&u| p.jet(u)).collect::<Result<Vec<_>>>()?;
        Ok(Self {
            kind: p.kind().to_string(),
            params: p.params(),
            provenance: p.provenance(),
            validity: p.validity(),
            degenerate: jets.iter().all(|j| j.kappa_m().abs() < STRAIGHT_TOL),
            f_samples: jets.iter().map(|j| j.f).collect(),
            g_samples: jets.iter().map(|j| j.g).collect(),
            u_samples: us,
        })
    }
}
