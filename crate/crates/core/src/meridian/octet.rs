use std::collections::BTreeMap;
use std::f64::consts::SQRT_2;

use nalgebra::SVector;
use serde::{Deserialize, Serialize};

use super::{GeometricFrame, MeridianSurface};
use crate::curves::kappa_derivative;
use crate::error::{GeomError, Result};
use crate::numeric::{diff1, dot, DiffConfig, Vec4};
use crate::surface::scalar_invariants;

pub const OCTET_NAMES: [&str; 8] = ["gamma1", "gamma2", "nu1", "nu2", "lambda", "mu", "beta1", "beta2"];

/// The eight frame invariants at a point, plus k, ϰ, K and ‖H‖.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InvariantRecord {
    pub u: f64,
    pub v: f64,
    pub gamma1: f64,
    pub gamma2: f64,
    pub nu1: f64,
    pub nu2: f64,
    pub lambda: f64,
    pub mu: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub k: f64,
    pub kappa_conn: f64,
    #[serde(rename = "K")]
    pub gauss_curvature: f64,
    #[serde(rename = "H_norm")]
    pub h_norm: f64,
}

impl InvariantRecord {
    /// (γ₁, γ₂, ν₁, ν₂, λ, μ, β₁, β₂) in [`OCTET_NAMES`] order.
    pub fn octet(&self) -> [f64; 8] {
        [self.gamma1, self.gamma2, self.nu1, self.nu2, self.lambda, self.mu, self.beta1, self.beta2]
    }

    /// The octet followed by k, ϰ, K, ‖H‖.
    pub fn values(&self) -> [f64; 12] {
        let o = self.octet();
        [o[0], o[1], o[2], o[3], o[4], o[5], o[6], o[7], self.k, self.kappa_conn, self.gauss_curvature, self.h_norm]
    }

    /// Largest componentwise octet difference.
    pub fn octet_distance(&self, other: &InvariantRecord) -> f64 {
        self.octet().iter().zip(other.octet()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }
}

/// dA/du with A = ġ + fκ_m, by a central difference of the profile jets.
pub fn a_term_derivative_fd(ms: &MeridianSurface, u: f64, cfg: &DiffConfig) -> Result<f64> {
    diff1(|s| ms.profile().jet(s).map(|j| j.a_term()), u, cfg)
}

/// The octet from its closed forms in f, g, κ_m and κ.
///
/// dA/du is analytic when the profile carries third derivatives and a central
/// difference otherwise; dκ/dv is a central difference of the directrix curvature.
pub fn octet_closed(ms: &MeridianSurface, u: f64, v: f64, cfg: &DiffConfig) -> Result<InvariantRecord> {
    ms.require_general()?;
    let (jet, fr) = ms.local_data(u, v)?;
    let (f, f1, g1) = (jet.f, jet.f1, jet.g1);
    let km = jet.kappa_m();
    let kappa = fr.kappa;
    let a = jet.a_term();
    let r2 = kappa * kappa + a * a;
    if !(r2 > super::MINIMAL_POINT_TOL) {
        return Err(GeomError::MinimalPoint { u, v });
    }
    let r = r2.sqrt();
    let a_u = match jet.a_term_derivative() {
        Some(d) => d,
        None => a_term_derivative_fd(ms, u, cfg)?,
    };
    let kappa_v = kappa_derivative(ms.directrix().as_ref(), v, cfg)?;
    let gamma = f1 / (SQRT_2 * f);
    let nu = r / (2.0 * f);
    Ok(InvariantRecord {
        u,
        v,
        gamma1: gamma,
        gamma2: -gamma,
        nu1: nu,
        nu2: nu,
        lambda: (kappa * kappa + g1 * g1 - f * f * km * km) / (2.0 * f * r),
        mu: -kappa * km / r,
        beta1: (kappa * a_u - a * kappa_v / f) / (SQRT_2 * r2),
        beta2: -(kappa * a_u + a * kappa_v / f) / (SQRT_2 * r2),
        k: -km * km * kappa * kappa / (f * f),
        kappa_conn: 0.0,
        gauss_curvature: -jet.f2 / f,
        h_norm: nu,
    })
}

type Packed = SVector<f64, 16>;

fn pack(gf: &GeometricFrame) -> Packed {
    let mut p = Packed::zeros();
    for (i, w) in gf.vectors().iter().enumerate() {
        p.fixed_rows_mut::<4>(4 * i).copy_from(w);
    }
    p
}

fn unpack(p: &Packed) -> [Vec4; 4] {
    std::array::from_fn(|i| p.fixed_rows::<4>(4 * i).into_owned())
}

/// Directional derivatives ∇′_x and ∇′_y of the four geometric frame fields,
/// each in (x, y, b, l) order, by central differences of the frame itself.
pub(crate) fn frame_derivatives(
    ms: &MeridianSurface,
    u: f64,
    v: f64,
    cfg: &DiffConfig,
) -> Result<([Vec4; 4], [Vec4; 4])> {
    let field = |a: f64, b: f64| ms.frames(a, b).map(|(_, gf)| pack(&gf));
    let du = diff1(|s| field(s, v), u, cfg)?;
    let dv = diff1(|s| field(u, s), v, cfg)?;
    let f = ms.profile().jet(u)?.f;
    let along_x = (du + dv / f) / SQRT_2;
    let along_y = (-du + dv / f) / SQRT_2;
    Ok((unpack(&along_x), unpack(&along_y)))
}

/// The octet as inner products of numerically differentiated frame fields,
/// with k, ϰ, ‖H‖ from the second fundamental form and K from Brioschi.
pub fn octet_numeric(ms: &MeridianSurface, u: f64, v: f64, cfg: &DiffConfig) -> Result<InvariantRecord> {
    ms.require_general()?;
    let (_, gf) = ms.frames(u, v)?;
    let ([dx_x, dx_y, dx_b, _], [_, dy_y, dy_b, _]) = frame_derivatives(ms, u, v, cfg)?;
    let s = scalar_invariants(ms, u, v, cfg)?;
    Ok(InvariantRecord {
        u,
        v,
        gamma1: dot(&dx_x, &gf.y),
        gamma2: dot(&dy_y, &gf.x),
        nu1: dot(&dx_x, &gf.b),
        nu2: dot(&dy_y, &gf.b),
        lambda: dot(&dx_y, &gf.b),
        mu: dot(&dx_y, &gf.l_normal),
        beta1: dot(&dx_b, &gf.l_normal),
        beta2: dot(&dy_b, &gf.l_normal),
        k: s.k,
        kappa_conn: s.kappa_conn,
        gauss_curvature: s.gauss_curvature,
        h_norm: s.h_norm,
    })
}

/// A method of computing the invariant record at a point.
pub trait InvariantEvaluator: Send + Sync {
    fn name(&self) -> &'static str;
    fn description(&self) -> &'static str;
    fn evaluate(&self, ms: &MeridianSurface, u: f64, v: f64, cfg: &DiffConfig) -> Result<InvariantRecord>;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ClosedForm;

impl InvariantEvaluator for ClosedForm {
    fn name(&self) -> &'static str {
        "closed"
    }

    fn description(&self) -> &'static str {
        "closed forms in f, g, κ_m, κ"
    }

    fn evaluate(&self, ms: &MeridianSurface, u: f64, v: f64, cfg: &DiffConfig) -> Result<InvariantRecord> {
        octet_closed(ms, u, v, cfg)
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct FrameDifferences;

impl InvariantEvaluator for FrameDifferences {
    fn name(&self) -> &'static str {
        "numeric"
    }

    fn description(&self) -> &'static str {
        "finite differences of the geometric frame fields"
    }

    fn evaluate(&self, ms: &MeridianSurface, u: f64, v: f64, cfg: &DiffConfig) -> Result<InvariantRecord> {
        octet_numeric(ms, u, v, cfg)
    }
}

/// Invariant evaluators selectable by name.
pub struct EvaluatorRegistry {
    entries: BTreeMap<&'static str, Box<dyn InvariantEvaluator>>,
}

impl EvaluatorRegistry {
    pub fn empty() -> Self {
        Self { entries: BTreeMap::new() }
    }

    /// The closed-form and frame-difference evaluators.
    pub fn builtin() -> Self {
        let mut r = Self::empty();
        r.register(Box::new(ClosedForm));
        r.register(Box::new(FrameDifferences));
        r
    }

    pub fn register(&mut self, e: Box<dyn InvariantEvaluator>) {
        self.entries.insert(e.name(), e);
    }

    pub fn get(&self, name: &str) -> Option<&dyn InvariantEvaluator> {
        self.entries.get(name).map(|b| b.as_ref())
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.entries.keys().copied().collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = &dyn InvariantEvaluator> {
        self.entries.values().map(|b| b.as_ref())
    }
}

impl Default for EvaluatorRegistry {
    fn default() -> Self {
        Self::builtin()
    }
}
