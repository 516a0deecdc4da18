//! Ambient linear algebra, sampling grids and central finite differences.
//!
//! Everything downstream (Frenet data, fundamental forms, the finite-difference
//! invariant oracle) is built on the small set of primitives in this module.

use std::ops::{Add, Mul, Sub};

use nalgebra::{SVector, Vector3, Vector4};
use serde::{Deserialize, Serialize};

use crate::error::{GeomError, Result};

/// A point or vector of the ambient space R⁴.
pub type Vec4 = Vector4<f64>;
/// A point or vector of R³ (the sphere S²(1) lives here).
pub type Vec3 = Vector3<f64>;

/// Standard Euclidean inner product on R⁴.
pub fn dot(a: &Vec4, b: &Vec4) -> f64 {
    a.x * b.x + a.y * b.y + a.z * b.z + a.w * b.w
}

/// Embeds a vector of R³ = span{e₁, e₂, e₃} into R⁴.
pub fn embed(v: &Vec3) -> Vec4 {
    Vec4::new(v.x, v.y, v.z, 0.0)
}

/// The fourth standard basis vector, the axis of rotation.
pub fn e4() -> Vec4 {
    Vec4::new(0.0, 0.0, 0.0, 1.0)
}

/// Determinant of the 4×4 matrix whose columns are `a, b, c, d`.
pub fn det4(a: &Vec4, b: &Vec4, c: &Vec4, d: &Vec4) -> f64 {
    nalgebra::Matrix4::from_columns(&[*a, *b, *c, *d]).determinant()
}

/// Values that central differences can be taken of.
pub trait Sample: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> {
    fn is_finite(&self) -> bool;
}

impl Sample for f64 {
    fn is_finite(&self) -> bool {
        f64::is_finite(*self)
    }
}

impl<const D: usize> Sample for SVector<f64, D> {
    fn is_finite(&self) -> bool {
        self.iter().all(|c| c.is_finite())
    }
}

/// Central-difference scheme. Only the second-order scheme is provided.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    #[default]
    Central2,
}

/// Finite-difference settings shared by every numerical derivative in the crate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiffConfig {
    /// Step for first derivatives and for the frame-field oracle.
    pub step: f64,
    /// Step for second differences of the first fundamental form in the
    /// intrinsic (Brioschi) curvature.
    pub metric_step: f64,
    pub scheme: Scheme,
}

impl Default for DiffConfig {
    fn default() -> Self {
        Self { step: 1e-4, metric_step: 1e-3, scheme: Scheme::Central2 }
    }
}

impl DiffConfig {
    pub fn with_step(step: f64) -> Result<Self> {
        let cfg = Self { step, ..Self::default() };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.step > 0.0 && self.step.is_finite()) {
            return Err(GeomError::Step(format!("difference step must be positive, got {}", self.step)));
        }
        if !(self.metric_step > 0.0 && self.metric_step.is_finite()) {
            return Err(GeomError::Step(format!("metric difference step must be positive, got {}", self.metric_step)));
        }
        Ok(())
    }
}

fn finite_or<T: Sample>(value: T, at: f64) -> Result<T> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(GeomError::Domain(format!("function is not finite at {at}")))
    }
}

/// Evaluates `f` and rejects non-finite results as a domain error.
fn eval<T: Sample>(f: &impl Fn(f64) -> Result<T>, t: f64) -> Result<T> {
    finite_or(f(t)?, t)
}

/// Central first difference `(f(t+h) - f(t-h)) / 2h`, componentwise for vectors.
pub fn diff1<T: Sample>(f: impl Fn(f64) -> Result<T>, at: f64, cfg: &DiffConfig) -> Result<T> {
    cfg.validate()?;
    let h = cfg.step;
    let fp = eval(&f, at + h)?;
    let fm = eval(&f, at - h)?;
    Ok((fp - fm) * (0.5 / h))
}

/// Central second difference `(f(t+h) - 2f(t) + f(t-h)) / h²`.
pub fn diff2<T: Sample>(f: impl Fn(f64) -> Result<T>, at: f64, cfg: &DiffConfig) -> Result<T> {
    cfg.validate()?;
    let h = cfg.step;
    let fp = eval(&f, at + h)?;
    let f0 = eval(&f, at)?;
    let fm = eval(&f, at - h)?;
    Ok((fp - f0 * 2.0 + fm) * (1.0 / (h * h)))
}

/// Infallible convenience wrapper of [`diff1`] for total functions.
pub fn diff1_total<T: Sample>(f: impl Fn(f64) -> T, at: f64, cfg: &DiffConfig) -> Result<T> {
    diff1(|t| Ok(f(t)), at, cfg)
}

/// Infallible convenience wrapper of [`diff2`] for total functions.
pub fn diff2_total<T: Sample>(f: impl Fn(f64) -> T, at: f64, cfg: &DiffConfig) -> Result<T> {
    diff2(|t| Ok(f(t)), at, cfg)
}

/// Mixed partial ∂²f/∂u∂v by the four-point central stencil with step `h` in both directions.
pub fn diff_mixed<T: Sample>(f: impl Fn(f64, f64) -> Result<T>, u: f64, v: f64, h: f64) -> Result<T> {
    if !(h > 0.0) {
        return Err(GeomError::Step(format!("difference step must be positive, got {h}")));
    }
    let pp = finite_or(f(u + h, v + h)?, u)?;
    let pm = finite_or(f(u + h, v - h)?, u)?;
    let mp = finite_or(f(u - h, v + h)?, u)?;
    let mm = finite_or(f(u - h, v - h)?, u)?;
    Ok((pp - pm - mp + mm) * (0.25 / (h * h)))
}

/// One classical fourth-order Runge–Kutta step for the autonomous system `y' = rhs(y)`.
pub fn rk4_step<T: Sample>(rhs: impl Fn(T) -> Result<T>, y: T, h: f64) -> Result<T> {
    let k1 = rhs(y)?;
    let k2 = rhs(y + k1 * (0.5 * h))?;
    let k3 = rhs(y + k2 * (0.5 * h))?;
    let k4 = rhs(y + k3 * h)?;
    let next = y + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
    if next.is_finite() {
        Ok(next)
    } else {
        Err(GeomError::Domain("integration produced a non-finite state".into()))
    }
}

/// A closed interval `[lo, hi]`, serialized as a two-element array.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl From<[f64; 2]> for Interval {
    fn from(a: [f64; 2]) -> Self {
        Self { lo: a[0], hi: a[1] }
    }
}

impl From<Interval> for [f64; 2] {
    fn from(i: Interval) -> Self {
        [i.lo, i.hi]
    }
}

impl Interval {
    pub const REAL_LINE: Interval = Interval { lo: f64::NEG_INFINITY, hi: f64::INFINITY };

    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if lo.is_nan() || hi.is_nan() || lo >= hi {
            return Err(GeomError::Param(format!("invalid interval [{lo}, {hi}]")));
        }
        Ok(Self { lo, hi })
    }

    pub fn contains(&self, t: f64) -> bool {
        t >= self.lo && t <= self.hi
    }

    pub fn covers(&self, other: &Interval) -> bool {
        self.lo <= other.lo && self.hi >= other.hi
    }

    pub fn length(&self) -> f64 {
        self.hi - self.lo
    }

    /// Removes `margin` from both ends.
    pub fn shrink(&self, margin: f64) -> Result<Self> {
        Self::new(self.lo + margin, self.hi - margin)
    }

    /// `n ≥ 2` uniformly spaced samples, endpoints included.
    pub fn samples(&self, n: usize) -> Vec<f64> {
        let step = self.length() / (n - 1) as f64;
        (0..n).map(|i| if i == n - 1 { self.hi } else { self.lo + step * i as f64 }).collect()
    }
}

/// Parameter rectangle `u_range × v_range`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub u: Interval,
    pub v: Interval,
}

impl Rect {
    pub fn new(u: Interval, v: Interval) -> Self {
        Self { u, v }
    }

    pub fn contains(&self, u: f64, v: f64) -> bool {
        self.u.contains(u) && self.v.contains(v)
    }
}

/// Uniform sampling grid over a rectangle; points are ordered row-major in u then v.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid2 {
    pub u: Interval,
    pub v: Interval,
    pub nu: usize,
    pub nv: usize,
}

impl Grid2 {
    pub fn new(u: Interval, v: Interval, nu: usize, nv: usize) -> Result<Self> {
        if nu < 2 || nv < 2 {
            return Err(GeomError::Param(format!("grid needs at least 2 samples per direction, got {nu}×{nv}")));
        }
        if !(u.lo < u.hi && v.lo < v.hi) {
            return Err(GeomError::Param("grid ranges must be non-empty".into()));
        }
        Ok(Self { u, v, nu, nv })
    }

    pub fn over(rect: &Rect, nu: usize, nv: usize) -> Result<Self> {
        Self::new(rect.u, rect.v, nu, nv)
    }

    /// Excludes a guard margin at both ends of each range.
    pub fn with_guard(&self, margin_u: f64, margin_v: f64) -> Result<Self> {
        Self::new(self.u.shrink(margin_u)?, self.v.shrink(margin_v)?, self.nu, self.nv)
    }

    pub fn len(&self) -> usize {
        self.nu * self.nv
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn points(&self) -> Vec<(f64, f64)> {
        let us = self.u.samples(self.nu);
        let vs = self.v.samples(self.nv);
        us.iter().flat_map(|&u| vs.iter().map(move |&v| (u, v))).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    type Scalar = Box<dyn Fn(f64) -> f64>;

    fn cfg() -> DiffConfig {
        DiffConfig::default()
    }

    #[test]
    fn dot_examples() {
        let e1 = Vec4::new(1.0, 0.0, 0.0, 0.0);
        let e2 = Vec4::new(0.0, 1.0, 0.0, 0.0);
        assert_eq!(dot(&e1, &e2), 0.0);
        let a = Vec4::new(1.0, 2.0, 3.0, 4.0);
        assert_eq!(dot(&a, &a), 30.0);
        assert_eq!(dot(&Vec4::new(1.0, 1.0, 0.0, 0.0), &Vec4::new(1.0, -1.0, 0.0, 0.0)), 0.0);
    }

    #[test]
    fn diff1_examples() {
        let d = diff1_total(|t| t * t, 3.0, &cfg()).unwrap();
        assert!((d - 6.0).abs() < 1e-8);

        let d = diff1_total(|t: f64| Vec4::new(t.cos(), t.sin(), 0.0, 0.0), 0.0, &cfg()).unwrap();
        assert!((d - Vec4::new(0.0, 1.0, 0.0, 0.0)).norm() < 1e-8);

        let c = Vec4::new(1.0, -2.0, 0.5, 7.0);
        let d = diff1_total(|_| c, 1.3, &cfg()).unwrap();
        assert_eq!(d, Vec4::zeros());
    }

    #[test]
    fn diff2_examples() {
        for &t in &[-3.0, 0.0, 0.7, 11.0] {
            let d = diff2_total(|t| t * t, t, &cfg()).unwrap();
            assert!((d - 2.0).abs() < 1e-6, "t = {t}: {d}");
        }
        let d = diff2_total(f64::sin, 0.0, &cfg()).unwrap();
        assert!(d.abs() < 1e-6);
        // analytic second derivative of e^t at 0 is 1
        let d = diff2_total(f64::exp, 0.0, &cfg()).unwrap();
        assert!((d - 1.0).abs() < 1e-4);
    }

    #[test]
    fn non_finite_values_are_domain_errors() {
        let err = diff1_total(f64::ln, 0.0, &cfg()).unwrap_err();
        assert!(matches!(err, GeomError::Domain(_)));
        let err = diff2_total(f64::sqrt, 0.0, &cfg()).unwrap_err();
        assert!(matches!(err, GeomError::Domain(_)));
    }

    #[test]
    fn bad_step_is_rejected() {
        assert!(matches!(DiffConfig::with_step(0.0), Err(GeomError::Step(_))));
        assert!(matches!(DiffConfig::with_step(-1e-3), Err(GeomError::Step(_))));
    }

    #[test]
    fn diff1_exact_on_quadratics() {
        let p = |t: f64| 3.0 - 2.0 * t + 0.5 * t * t;
        for &t in &[-1.0, 0.0, 2.5] {
            let d = diff1_total(p, t, &cfg()).unwrap();
            assert!((d - (-2.0 + t)).abs() < 1e-10);
        }
    }

    // Truncation-dominated steps so that the second-order rate is visible.
    #[test]
    fn central_difference_is_second_order() {
        let battery: Vec<(Scalar, Scalar)> = vec![
            (Box::new(f64::sin), Box::new(f64::cos)),
            (Box::new(f64::exp), Box::new(f64::exp)),
            (Box::new(|t: f64| 1.0 / (1.0 + t * t)), Box::new(|t: f64| -2.0 * t / (1.0 + t * t).powi(2))),
            (Box::new(|t: f64| t.powi(3)), Box::new(|t: f64| 3.0 * t * t)),
        ];
        for (f, df) in &battery {
            let at = 0.7;
            let err = |h: f64| {
                let c = DiffConfig::with_step(h).unwrap();
                (diff1_total(f, at, &c).unwrap() - df(at)).abs()
            };
            let ratio = err(1e-2) / err(5e-3);
            assert!((3.5..=4.5).contains(&ratio), "ratio {ratio}");
        }
    }

    #[test]
    fn mixed_partial_of_product() {
        let d = diff_mixed(|u, v| Ok(u * u * v), 1.5, -0.5, 1e-4).unwrap();
        assert!((d - 3.0).abs() < 1e-6);
    }

    #[test]
    fn rk4_matches_exponential() {
        let mut y = 1.0;
        let h = 1e-2;
        for _ in 0..100 {
            y = rk4_step(|y: f64| Ok(y), y, h).unwrap();
        }
        assert!((y - 1f64.exp()).abs() < 1e-9);
    }

    #[test]
    fn grid_is_row_major_with_endpoints() {
        let g = Grid2::new(Interval::new(0.0, 1.0).unwrap(), Interval::new(2.0, 3.0).unwrap(), 3, 2).unwrap();
        let pts = g.points();
        assert_eq!(pts.len(), 6);
        assert_eq!(pts[0], (0.0, 2.0));
        assert_eq!(pts[1], (0.0, 3.0));
        assert_eq!(pts[2], (0.5, 2.0));
        assert_eq!(pts[5], (1.0, 3.0));
        assert!(Grid2::new(g.u, g.v, 1, 4).is_err());
    }

    proptest! {
        #[test]
        fn dot_is_symmetric_and_positive(a in prop::array::uniform4(-1e3f64..1e3),
                                         b in prop::array::uniform4(-1e3f64..1e3)) {
            let a = Vec4::from(a);
            let b = Vec4::from(b);
            prop_assert_eq!(dot(&a, &b), dot(&b, &a));
            if a.norm() > 0.0 {
                prop_assert!(dot(&a, &a) > 0.0);
            }
        }
    }
}
