//! Slope fields y(t) for profiles defined by ḟ = y(f).
//!
//! Two closed-form families are provided: the Chen family, whose square
//! satisfies (t²/4)((y²)')² = b²(1 − y²) + (1 − y²)², and the second
//! parallel-normal-bundle family, with 1 − y² − (t/2)(y²)' = a√(1 − y²).

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{GeomError, Result};
use crate::numeric::{diff1_total, DiffConfig, Interval};

/// Choice of the ± branch of a closed-form slope field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum Branch {
    #[default]
    #[serde(rename = "+", alias = "plus")]
    Plus,
    #[serde(rename = "-", alias = "minus")]
    Minus,
}

impl Branch {
    pub fn sign(self) -> f64 {
        match self {
            Branch::Plus => 1.0,
            Branch::Minus => -1.0,
        }
    }
}

impl std::str::FromStr for Branch {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "+" | "plus" => Ok(Branch::Plus),
            "-" | "minus" => Ok(Branch::Minus),
            other => Err(format!("branch must be '+' or '-', got '{other}'")),
        }
    }
}

/// Resolution of the validity-interval bisection.
pub const VALIDITY_RESOLUTION: f64 = 1e-12;
const VALIDITY_SEARCH_CAP: f64 = 1e8;

/// A slope field y(t) on f-values t > 0.
pub trait SlopeField: Send + Sync + fmt::Debug {
    fn name(&self) -> &'static str;

    fn params(&self) -> serde_json::Value;

    /// y(t); a domain error outside the field's validity set.
    fn slope(&self, t: f64) -> Result<f64>;

    /// (y²)'(t). Central difference unless the field knows it in closed form.
    fn slope_sq_derivative(&self, t: f64) -> Result<f64> {
        let cfg = DiffConfig::with_step(1e-6)?;
        let y0 = self.slope(t)?;
        let sq = |s: f64| self.slope(s).map(|y| y * y).unwrap_or(f64::NAN);
        diff1_total(sq, t, &cfg)
            .map_err(|_| GeomError::Domain(format!("slope field is not differentiable at t = {t} (y = {y0})")))
    }

    /// Whether y(t) is defined and usable as a unit-speed slope (|y| ≤ 1).
    fn is_valid(&self, t: f64) -> bool {
        t > 0.0 && matches!(self.slope(t), Ok(y) if y.is_finite() && y.abs() <= 1.0)
    }

    /// Connected component of the validity set containing `around`, with ends
    /// located by bisection to [`VALIDITY_RESOLUTION`]. Unbounded ends are ±∞.
    fn validity_interval(&self, around: f64) -> Result<Interval> {
        validity_component(|t| self.is_valid(t), around)
    }
}

fn bisect(valid: &impl Fn(f64) -> bool, mut good: f64, mut bad: f64) -> f64 {
    while (good - bad).abs() > VALIDITY_RESOLUTION {
        let mid = 0.5 * (good + bad);
        if valid(mid) {
            good = mid;
        } else {
            bad = mid;
        }
    }
    good
}

fn validity_component(valid: impl Fn(f64) -> bool, around: f64) -> Result<Interval> {
    if !valid(around) {
        return Err(GeomError::Param(format!(
            "initial value f0 = {around} lies outside the validity interval of the slope field"
        )));
    }
    let scale = around.abs().max(1.0);
    let (mut good, mut delta) = (around, 1e-3 * scale);
    let lo = loop {
        let t = around - delta;
        if t <= 0.0 {
            break bisect(&valid, good, 0.0);
        }
        if !valid(t) {
            break bisect(&valid, good, t);
        }
        good = t;
        delta *= 2.0;
    };
    let (mut good, mut delta) = (around, 1e-3 * scale);
    let hi = loop {
        let t = around + delta;
        if t > VALIDITY_SEARCH_CAP {
            break f64::INFINITY;
        }
        if !valid(t) {
            break bisect(&valid, good, t);
        }
        good = t;
        delta *= 2.0;
    };
    Ok(Interval { lo, hi })
}

/// Parameters of the Chen slope field.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChenParams {
    pub a: f64,
    /// Constant spherical curvature of the directrix.
    pub b: f64,
    #[serde(default)]
    pub branch: Branch,
}

impl ChenParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.a != 0.0 && self.a.is_finite()) {
            return Err(GeomError::Param(format!("Chen family requires a ≠ 0, got {}", self.a)));
        }
        if !(self.b > 0.0 && self.b.is_finite()) {
            return Err(GeomError::Param(format!("Chen family requires b > 0, got {}", self.b)));
        }
        Ok(())
    }

    /// t^{±2}, the substitution variable of the branch.
    fn power(&self, t: f64) -> f64 {
        match self.branch {
            Branch::Plus => t * t,
            Branch::Minus => 1.0 / (t * t),
        }
    }

    pub fn radicand(&self, t: f64) -> f64 {
        let s = self.power(t);
        let w = s - self.b * self.b / self.a;
        4.0 * s - self.a * w * w
    }
}

/// y(t) = (±1 / (2 t^{±1})) √(4 t^{±2} − a (t^{±2} − b²/a)²); both ± flip together.
pub fn chen_y(t: f64, p: &ChenParams) -> Result<f64> {
    p.validate()?;
    if !(t > 0.0) {
        return Err(GeomError::Domain(format!("Chen slope needs t > 0, got {t}")));
    }
    let rad = p.radicand(t);
    if rad < 0.0 {
        return Err(GeomError::Domain(format!("Chen slope radicand is negative at t = {t} ({rad})")));
    }
    let root = rad.sqrt();
    Ok(match p.branch {
        Branch::Plus => root / (2.0 * t),
        Branch::Minus => -t * root / 2.0,
    })
}

/// Residual of (t²/4)((y²)')² = b²(1 − y²) + (1 − y²)² with (y²)' by central difference.
pub fn chen_slope_residual(t: f64, p: &ChenParams, cfg: &DiffConfig) -> Result<f64> {
    let y = chen_y(t, p)?;
    let dy2 = crate::numeric::diff1(|s| chen_y(s, p).map(|y| y * y), t, cfg)?;
    let z = 1.0 - y * y;
    let b2 = p.b * p.b;
    Ok(t * t / 4.0 * dy2 * dy2 - (b2 * z + z * z))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChenField {
    params: ChenParams,
}

impl ChenField {
    pub fn new(params: ChenParams) -> Result<Self> {
        params.validate()?;
        Ok(Self { params })
    }

    pub fn chen_params(&self) -> ChenParams {
        self.params
    }
}

impl SlopeField for ChenField {
    fn name(&self) -> &'static str {
        "chen"
    }

    fn params(&self) -> serde_json::Value {
        serde_json::to_value(self.params).unwrap_or_default()
    }

    fn slope(&self, t: f64) -> Result<f64> {
        chen_y(t, &self.params)
    }

    fn slope_sq_derivative(&self, t: f64) -> Result<f64> {
        self.slope(t)?;
        let ChenParams { a, b, branch } = self.params;
        let b4 = b.powi(4);
        Ok(match branch {
            Branch::Plus => -a * t / 2.0 + b4 / (2.0 * a * t.powi(3)),
            Branch::Minus => a / (2.0 * t.powi(3)) - b4 * t / (2.0 * a),
        })
    }
}

/// Parameters of the second parallel-normal-bundle family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParallelParamsII {
    /// The constant value of ġ + f κ_m.
    pub a: f64,
    pub c: f64,
    #[serde(default)]
    pub branch: Branch,
}

impl ParallelParamsII {
    pub fn validate(&self) -> Result<()> {
        if !(self.a != 0.0 && self.a.is_finite()) {
            return Err(GeomError::Param(format!("case (ii) requires a ≠ 0, got {}", self.a)));
        }
        if !self.c.is_finite() {
            return Err(GeomError::Param("case (ii) requires a finite c".into()));
        }
        Ok(())
    }

    pub fn radicand(&self, t: f64) -> f64 {
        let ParallelParamsII { a, c, .. } = *self;
        (1.0 - a * a) * t * t - 2.0 * a * c * t - c * c
    }
}

/// y(t) = ±√((1 − a²)t² − 2act − c²)/t, defined where c + at ≥ 0.
pub fn parallel_ii_y(t: f64, p: &ParallelParamsII) -> Result<f64> {
    p.validate()?;
    if !(t > 0.0) {
        return Err(GeomError::Domain(format!("case (ii) slope needs t > 0, got {t}")));
    }
    let rad = p.radicand(t);
    if rad < 0.0 {
        return Err(GeomError::Domain(format!("case (ii) slope radicand is negative at t = {t} ({rad})")));
    }
    if p.c + p.a * t < 0.0 {
        return Err(GeomError::Domain(format!("case (ii) slope needs c + a t ≥ 0, got {} at t = {t}", p.c + p.a * t)));
    }
    Ok(p.branch.sign() * rad.sqrt() / t)
}

/// Residual of 1 − y² − (t/2)(y²)' = a√(1 − y²) with (y²)' by central difference.
pub fn parallel_ii_slope_residual(t: f64, p: &ParallelParamsII, cfg: &DiffConfig) -> Result<f64> {
    let y = parallel_ii_y(t, p)?;
    let dy2 = crate::numeric::diff1(|s| parallel_ii_y(s, p).map(|y| y * y), t, cfg)?;
    let z = 1.0 - y * y;
    Ok(z - t / 2.0 * dy2 - p.a * z.max(0.0).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParallelIiField {
    params: ParallelParamsII,
}

impl ParallelIiField {
    pub fn new(params: ParallelParamsII) -> Result<Self> {
        params.validate()?;
        Ok(Self { params })
    }

    pub fn parallel_params(&self) -> ParallelParamsII {
        self.params
    }
}

impl SlopeField for ParallelIiField {
    fn name(&self) -> &'static str {
        "parallel_ii"
    }

    fn params(&self) -> serde_json::Value {
        serde_json::to_value(self.params).unwrap_or_default()
    }

    fn slope(&self, t: f64) -> Result<f64> {
        parallel_ii_y(t, &self.params)
    }

    fn slope_sq_derivative(&self, t: f64) -> Result<f64> {
        self.slope(t)?;
        let ParallelParamsII { a, c, .. } = self.params;
        Ok(2.0 * a * c / (t * t) + 2.0 * c * c / t.powi(3))
    }
}

/// Slope field given by an arbitrary closure.
#[derive(Clone)]
pub struct FnField {
    f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl FnField {
    pub fn new(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self { f: Arc::new(f) }
    }
}

impl fmt::Debug for FnField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("FnField")
    }
}

impl SlopeField for FnField {
    fn name(&self) -> &'static str {
        "custom"
    }

    fn params(&self) -> serde_json::Value {
        serde_json::json!({})
    }

    fn slope(&self, t: f64) -> Result<f64> {
        let y = (self.f)(t);
        if y.is_finite() {
            Ok(y)
        } else {
            Err(GeomError::Domain(format!("slope field is not finite at t = {t}")))
        }
    }
}
