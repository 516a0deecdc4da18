use nalgebra::SVector;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::octet::{frame_derivatives, octet_closed, InvariantEvaluator, InvariantRecord};
use super::{MeridianFrame, MeridianSurface};
use crate::error::{GeomError, Result};
use crate::numeric::{diff1, DiffConfig, Grid2, Vec4};

/// One grid point; `record` is `None` at masked (minimal) points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSample {
    pub u: f64,
    pub v: f64,
    pub record: Option<InvariantRecord>,
}

/// Evaluates `eval` on every grid point (row-major in u then v).
/// Minimal points are masked; any other error aborts the sweep.
pub fn evaluate_grid(
    ms: &MeridianSurface,
    eval: &dyn InvariantEvaluator,
    grid: &Grid2,
    cfg: &DiffConfig,
) -> Result<Vec<GridSample>> {
    ms.require_general()?;
    grid.points()
        .par_iter()
        .map(|&(u, v)| match eval.evaluate(ms, u, v, cfg) {
            Ok(r) => Ok(GridSample { u, v, record: Some(r) }),
            Err(GeomError::MinimalPoint { .. }) => Ok(GridSample { u, v, record: None }),
            Err(e) => Err(e),
        })
        .collect()
}

/// A scalar defect sampled over a grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DefectField {
    /// Per-point values aligned with `Grid2::points`; `None` where masked.
    pub values: Vec<Option<f64>>,
    pub max: f64,
    pub mean: f64,
    pub masked: usize,
}

impl DefectField {
    pub fn from_values(values: Vec<Option<f64>>) -> Self {
        let live: Vec<f64> = values.iter().flatten().copied().collect();
        let max = live.iter().copied().fold(0.0, f64::max);
        let mean = if live.is_empty() { 0.0 } else { live.iter().sum::<f64>() / live.len() as f64 };
        Self { masked: values.len() - live.len(), values, max, mean }
    }

    fn from_samples(samples: &[GridSample], defect: impl Fn(&InvariantRecord) -> f64) -> Self {
        Self::from_values(samples.iter().map(|s| s.record.as_ref().map(&defect)).collect())
    }
}

/// |λ| over the grid; λ = 0 characterizes non-trivial Chen surfaces.
pub fn chen_defect(
    ms: &MeridianSurface,
    eval: &dyn InvariantEvaluator,
    grid: &Grid2,
    cfg: &DiffConfig,
) -> Result<DefectField> {
    let samples = evaluate_grid(ms, eval, grid, cfg)?;
    Ok(DefectField::from_samples(&samples, |r| r.lambda.abs()))
}

/// max(|β₁|, |β₂|) over the grid; β₁ = β₂ = 0 characterizes a parallel normal bundle.
pub fn parallel_defect(
    ms: &MeridianSurface,
    eval: &dyn InvariantEvaluator,
    grid: &Grid2,
    cfg: &DiffConfig,
) -> Result<DefectField> {
    let samples = evaluate_grid(ms, eval, grid, cfg)?;
    Ok(DefectField::from_samples(&samples, |r| r.beta1.abs().max(r.beta2.abs())))
}

pub const DERIVATIVE_FORMULAS: [&str; 8] = [
    "D_X X = kappa_m n2",
    "D_X Y = 0",
    "D_Y X = (f'/f) Y",
    "D_Y Y = -(f'/f) X + (kappa/f) n1 + (g'/f) n2",
    "D_X n1 = 0",
    "D_Y n1 = -(kappa/f) Y",
    "D_X n2 = -kappa_m X",
    "D_Y n2 = -(g'/f) Y",
];

fn max_abs(w: &Vec4) -> f64 {
    w.amax()
}

type Packed = SVector<f64, 16>;

fn pack(mf: &MeridianFrame) -> Packed {
    let mut p = Packed::zeros();
    for (i, w) in mf.vectors().iter().enumerate() {
        p.fixed_rows_mut::<4>(4 * i).copy_from(w);
    }
    p
}

fn block(p: &Packed, i: usize) -> Vec4 {
    p.fixed_rows::<4>(4 * i).into_owned()
}

/// Componentwise residuals of the derivative formulas of the meridian frame
/// {X, Y, n₁, n₂}, with ∇′_X = ∂_u and ∇′_Y = (1/f)∂_v taken numerically.
pub fn derivative_formula_residuals(ms: &MeridianSurface, u: f64, v: f64, cfg: &DiffConfig) -> Result<[f64; 8]> {
    let (jet, fr) = ms.local_data(u, v)?;
    let mf = MeridianFrame::new(&jet, &fr);
    let field = |a: f64, b: f64| ms.meridian_frame(a, b).map(|m| pack(&m));
    let du = diff1(|s| field(s, v), u, cfg)?;
    let dv = diff1(|s| field(u, s), v, cfg)? / jet.f;
    let (f, f1, g1, km, kappa) = (jet.f, jet.f1, jet.g1, jet.kappa_m(), fr.kappa);
    let MeridianFrame { x_m, y_m, n1, n2 } = mf;
    Ok([
        max_abs(&(block(&du, 0) - n2 * km)),
        max_abs(&block(&du, 1)),
        max_abs(&(block(&dv, 0) - y_m * (f1 / f))),
        max_abs(&(block(&dv, 1) - (x_m * (-f1 / f) + n1 * (kappa / f) + n2 * (g1 / f)))),
        max_abs(&block(&du, 2)),
        max_abs(&(block(&dv, 2) + y_m * (kappa / f))),
        max_abs(&(block(&du, 3) + x_m * km)),
        max_abs(&(block(&dv, 3) + y_m * (g1 / f))),
    ])
}

pub const RECONSTRUCTION_FORMULAS: [&str; 4] = [
    "D_x b = -nu1 x - lambda y + beta1 l",
    "D_x l = -mu y - beta1 b",
    "D_y b = -lambda x - nu2 y + beta2 l",
    "D_y l = -mu x - beta2 b",
];

/// Componentwise residuals of the derivative formulas of the normals b, l,
/// with numeric left-hand sides and closed-form coefficients.
pub fn reconstruction_residuals(ms: &MeridianSurface, u: f64, v: f64, cfg: &DiffConfig) -> Result<[f64; 4]> {
    let (_, gf) = ms.frames(u, v)?;
    let r = octet_closed(ms, u, v, cfg)?;
    let ([_, _, dx_b, dx_l], [_, _, dy_b, dy_l]) = frame_derivatives(ms, u, v, cfg)?;
    let (x, y, b, l) = (gf.x, gf.y, gf.b, gf.l_normal);
    Ok([
        max_abs(&(dx_b - (x * -r.nu1 - y * r.lambda + l * r.beta1))),
        max_abs(&(dx_l - (y * -r.mu - b * r.beta1))),
        max_abs(&(dy_b - (x * -r.lambda - y * r.nu2 + l * r.beta2))),
        max_abs(&(dy_l - (x * -r.mu - b * r.beta2))),
    ])
}
