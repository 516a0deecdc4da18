use std::f64::consts::FRAC_PI_4;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{Check, Tolerances};
use crate::error::{GeomError, Result};
use crate::meridian::{
    derivative_formula_residuals, octet_closed, octet_numeric, reconstruction_residuals, MeridianSurface,
};
use crate::numeric::{DiffConfig, Grid2};
use crate::surface::{brioschi_curvature, principal_angle_of, LocalGeometry};

/// Residuals of every pointwise check at one general-class point.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PointAudit {
    pub identity_k: f64,
    pub identity_kappa_conn: f64,
    pub identity_gauss: f64,
    pub identity_h_sum: f64,
    pub identity_h_sqrt: f64,
    pub oracle: f64,
    pub kappa_conn_form: f64,
    pub brioschi_vs_closed: f64,
    pub brioschi_vs_octet: f64,
    pub derivative_formulas: f64,
    pub reconstruction: f64,
    pub second_form_ln: f64,
    pub second_form_m: f64,
    pub principal_angle: f64,
    pub mixed_coefficient: f64,
    /// 1 when κκ_m > 0 but μ ≥ 0.
    pub mu_sign_violation: f64,
}

impl PointAudit {
    fn merge_max(self, o: Self) -> Self {
        Self {
            identity_k: self.identity_k.max(o.identity_k),
            identity_kappa_conn: self.identity_kappa_conn.max(o.identity_kappa_conn),
            identity_gauss: self.identity_gauss.max(o.identity_gauss),
            identity_h_sum: self.identity_h_sum.max(o.identity_h_sum),
            identity_h_sqrt: self.identity_h_sqrt.max(o.identity_h_sqrt),
            oracle: self.oracle.max(o.oracle),
            kappa_conn_form: self.kappa_conn_form.max(o.kappa_conn_form),
            brioschi_vs_closed: self.brioschi_vs_closed.max(o.brioschi_vs_closed),
            brioschi_vs_octet: self.brioschi_vs_octet.max(o.brioschi_vs_octet),
            derivative_formulas: self.derivative_formulas.max(o.derivative_formulas),
            reconstruction: self.reconstruction.max(o.reconstruction),
            second_form_ln: self.second_form_ln.max(o.second_form_ln),
            second_form_m: self.second_form_m.max(o.second_form_m),
            principal_angle: self.principal_angle.max(o.principal_angle),
            mixed_coefficient: self.mixed_coefficient.max(o.mixed_coefficient),
            mu_sign_violation: self.mu_sign_violation.max(o.mu_sign_violation),
        }
    }

    /// NaN residuals must not vanish under `max`.
    fn poison_nan(self) -> Self {
        let fields = [
            self.identity_k,
            self.identity_kappa_conn,
            self.identity_gauss,
            self.identity_h_sum,
            self.identity_h_sqrt,
            self.oracle,
            self.kappa_conn_form,
            self.brioschi_vs_closed,
            self.brioschi_vs_octet,
            self.derivative_formulas,
            self.reconstruction,
            self.second_form_ln,
            self.second_form_m,
            self.principal_angle,
            self.mixed_coefficient,
        ];
        if fields.iter().any(|x| x.is_nan()) {
            let inf = f64::INFINITY;
            Self {
                identity_k: inf,
                identity_kappa_conn: inf,
                identity_gauss: inf,
                identity_h_sum: inf,
                identity_h_sqrt: inf,
                oracle: inf,
                kappa_conn_form: inf,
                brioschi_vs_closed: inf,
                brioschi_vs_octet: inf,
                derivative_formulas: inf,
                reconstruction: inf,
                second_form_ln: inf,
                second_form_m: inf,
                principal_angle: inf,
                mixed_coefficient: inf,
                mu_sign_violation: 1.0,
            }
        } else {
            self
        }
    }
}

/// Audits one point; `Ok(None)` at a minimal point.
pub fn audit_point(ms: &MeridianSurface, u: f64, v: f64, cfg: &DiffConfig) -> Result<Option<PointAudit>> {
    let closed = match octet_closed(ms, u, v, cfg) {
        Ok(r) => r,
        Err(GeomError::MinimalPoint { .. }) => return Ok(None),
        Err(e) => return Err(e),
    };
    let numeric = octet_numeric(ms, u, v, cfg)?;
    let geom = LocalGeometry::at(ms, u, v, cfg)?;
    let (jet, fr) = ms.local_data(u, v)?;
    let c = &closed;
    let octet_k = c.nu1 * c.nu2 - (c.lambda * c.lambda + c.mu * c.mu);
    let brioschi = brioschi_curvature(ms, u, v, cfg)?;
    let theta = principal_angle_of(&geom);
    let kk = jet.kappa_m() * fr.kappa;
    let audit = PointAudit {
        identity_k: (c.k + 4.0 * c.nu1 * c.nu2 * c.mu * c.mu).abs(),
        identity_kappa_conn: (c.kappa_conn - (c.nu1 - c.nu2) * c.mu).abs(),
        identity_gauss: (c.gauss_curvature - octet_k).abs(),
        identity_h_sum: (c.h_norm - (c.nu1 + c.nu2).abs() / 2.0).abs(),
        identity_h_sqrt: (c.h_norm - (c.kappa_conn * c.kappa_conn - c.k).sqrt() / (2.0 * c.mu.abs())).abs(),
        oracle: numeric.octet_distance(c),
        kappa_conn_form: geom.kappa_conn().abs(),
        brioschi_vs_closed: (brioschi - c.gauss_curvature).abs(),
        brioschi_vs_octet: (brioschi - octet_k).abs(),
        derivative_formulas: derivative_formula_residuals(ms, u, v, cfg)?.into_iter().fold(0.0, f64::max),
        reconstruction: reconstruction_residuals(ms, u, v, cfg)?.into_iter().fold(0.0, f64::max),
        second_form_ln: geom.second.l.abs().max(geom.second.n.abs()),
        second_form_m: (geom.second.m + kk).abs(),
        principal_angle: (theta - FRAC_PI_4).abs(),
        mixed_coefficient: geom.orthonormal_form(theta).1.abs(),
        mu_sign_violation: if kk > 0.0 && c.mu >= 0.0 { 1.0 } else { 0.0 },
    };
    Ok(Some(audit.poison_nan()))
}

/// Fieldwise maxima of [`PointAudit`] over a grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SurfaceAudit {
    pub points: usize,
    pub masked: usize,
    pub max: PointAudit,
}

pub fn audit_surface(ms: &MeridianSurface, grid: &Grid2, cfg: &DiffConfig) -> Result<SurfaceAudit> {
    ms.require_general()?;
    let audits: Vec<Option<PointAudit>> =
        grid.points().par_iter().map(|&(u, v)| audit_point(ms, u, v, cfg)).collect::<Result<_>>()?;
    let masked = audits.iter().filter(|a| a.is_none()).count();
    let max = audits.into_iter().flatten().fold(PointAudit::default(), PointAudit::merge_max);
    Ok(SurfaceAudit { points: grid.len(), masked, max })
}

/// The identity, oracle and second-form checks of an audited surface.
pub fn surface_checks(a: &SurfaceAudit, tol: &Tolerances) -> Vec<Check> {
    let m = &a.max;
    vec![
        Check::below("identity_k", m.identity_k, tol.identity),
        Check::below("identity_kappa_conn", m.identity_kappa_conn, tol.identity),
        Check::below("identity_K", m.identity_gauss, tol.identity),
        Check::below("identity_H_sum", m.identity_h_sum, tol.identity),
        Check::below("identity_H_sqrt", m.identity_h_sqrt, tol.identity),
        Check::below("oracle_octet", m.oracle, tol.oracle),
        Check::below("flat_normal_connection", m.kappa_conn_form, tol.flat_connection),
        Check::below("brioschi_vs_closed_K", m.brioschi_vs_closed, tol.intrinsic),
        Check::below("brioschi_vs_octet_K", m.brioschi_vs_octet, tol.intrinsic),
        Check::below("meridian_frame_derivatives", m.derivative_formulas, tol.oracle),
        Check::below("normal_derivatives", m.reconstruction, tol.intrinsic),
        Check::below("second_form_LN", m.second_form_ln, tol.identity),
        Check::below("second_form_M", m.second_form_m, tol.second_form),
        Check::below("principal_angle", m.principal_angle, tol.principal),
        Check::below("principal_mixed_coefficient", m.mixed_coefficient, tol.identity),
        Check::below("mu_sign_coherence", m.mu_sign_violation, 0.5),
    ]
}
