//! Arc-length curves on the unit sphere S²(1) with their Frenet apparatus.
//!
//! The frame {t, n, l} of a spherical curve satisfies `l' = t`, `t' = κn − l`,
//! `n' = −κt`. Throughout the crate `n = l × t`, so that {l, t, n} is positively
//! oriented in R³ and κ carries a sign. For the latitude circles built here κ ≥ 0.

use std::fmt;
use std::sync::Arc;

use nalgebra::SVector;
use serde::{Deserialize, Serialize};

use crate::error::{GeomError, Result};
use crate::numeric::{diff1, diff2, rk4_step, DiffConfig, Interval, Vec3};

/// Below this value of |t' + l| the curve is treated as a great circle.
pub const KAPPA_ZERO_THRESHOLD: f64 = 1e-9;

/// Frenet data of a spherical curve at one parameter value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrenetData {
    pub t: Vec3,
    pub n: Vec3,
    pub l: Vec3,
    pub kappa: f64,
}

impl FrenetData {
    /// Largest deviation of {t, n, l} from an orthonormal triple.
    pub fn orthonormality_defect(&self) -> f64 {
        let dots = [self.t.dot(&self.n), self.t.dot(&self.l), self.n.dot(&self.l)];
        let norms = [self.t.norm(), self.n.norm(), self.l.norm()];
        dots.iter().map(|d| d.abs()).chain(norms.iter().map(|n| (n - 1.0).abs())).fold(0.0, f64::max)
    }
}

/// A curve `v ↦ l(v)` on S²(1) parameterized by arc length.
pub trait SphericalCurve: Send + Sync + fmt::Debug {
    fn kind(&self) -> &'static str;

    /// Parameter range on which the curve may be evaluated.
    fn domain(&self) -> Interval;

    fn position(&self, v: f64) -> Result<Vec3>;

    /// The curve's own Frenet apparatus (closed form or carried by integration).
    fn frame(&self, v: f64) -> Result<FrenetData>;

    /// Tolerance on |l(v)| = 1.
    fn unit_tolerance(&self) -> f64 {
        1e-9
    }

    /// JSON description of the curve's parameters.
    fn describe(&self) -> serde_json::Value;
}

/// Latitude circle of Euclidean radius `r` on S²(1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmallCircle {
    r: f64,
    height: f64,
}

/// Builds the arc-length latitude circle `(r cos(v/r), r sin(v/r), √(1−r²))`.
pub fn make_small_circle(r: f64) -> Result<SmallCircle> {
    if !(r > 0.0 && r <= 1.0) {
        return Err(GeomError::Param(format!("circle radius must lie in (0, 1], got {r}")));
    }
    Ok(SmallCircle { r, height: (1.0 - r * r).max(0.0).sqrt() })
}

impl SmallCircle {
    /// The circle whose spherical curvature is `kappa ≥ 0`.
    pub fn with_curvature(kappa: f64) -> Result<Self> {
        if !(kappa >= 0.0 && kappa.is_finite()) {
            return Err(GeomError::Param(format!("circle curvature must be finite and non-negative, got {kappa}")));
        }
        make_small_circle(1.0 / (1.0 + kappa * kappa).sqrt())
    }

    pub fn radius(&self) -> f64 {
        self.r
    }

    /// κ = √(1−r²)/r.
    pub fn curvature(&self) -> f64 {
        self.height / self.r
    }
}

impl SphericalCurve for SmallCircle {
    fn kind(&self) -> &'static str {
        if self.height == 0.0 {
            "great_circle"
        } else {
            "small_circle"
        }
    }

    fn domain(&self) -> Interval {
        Interval::REAL_LINE
    }

    fn position(&self, v: f64) -> Result<Vec3> {
        let (s, c) = (v / self.r).sin_cos();
        Ok(Vec3::new(self.r * c, self.r * s, self.height))
    }

    fn frame(&self, v: f64) -> Result<FrenetData> {
        let (s, c) = (v / self.r).sin_cos();
        let h = self.height;
        Ok(FrenetData {
            t: Vec3::new(-s, c, 0.0),
            n: Vec3::new(-h * c, -h * s, self.r),
            l: Vec3::new(self.r * c, self.r * s, h),
            kappa: self.curvature(),
        })
    }

    fn describe(&self) -> serde_json::Value {
        serde_json::json!({ "kind": "circle", "r": self.r, "kappa": self.curvature() })
    }
}

/// Prescribed spherical curvature as a function of arc length.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "law", rename_all = "snake_case")]
pub enum KappaLaw {
    /// κ(v) = k0 + k1·v
    Linear { k0: f64, k1: f64 },
    /// κ(v) = k0 + amp·sin(freq·v)
    Sine { k0: f64, amp: f64, freq: f64 },
}

impl KappaLaw {
    pub fn eval(&self, v: f64) -> f64 {
        match *self {
            KappaLaw::Linear { k0, k1 } => k0 + k1 * v,
            KappaLaw::Sine { k0, amp, freq } => k0 + amp * (freq * v).sin(),
        }
    }
}

type FrenetState = SVector<f64, 10>;

/// Curve obtained by integrating the Frenet system with a prescribed κ(v).
///
/// The frame is tabulated with RK4 on a uniform lattice; evaluation between
/// lattice nodes takes one partial RK4 step from the nearest node.
#[derive(Clone)]
pub struct PrescribedKappaCurve {
    law: KappaLaw,
    domain: Interval,
    step: f64,
    origin: f64,
    nodes: Arc<Vec<FrenetState>>,
}

impl fmt::Debug for PrescribedKappaCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PrescribedKappaCurve")
            .field("law", &self.law)
            .field("domain", &self.domain)
            .field("step", &self.step)
            .field("nodes", &self.nodes.len())
            .finish()
    }
}

const DEFAULT_FRENET_STEP: f64 = 1e-4;
// Extra lattice beyond the domain so differences at the domain ends stay defined.
const TABLE_PAD: f64 = 1e-2;

fn pack(l: Vec3, t: Vec3, n: Vec3, v: f64) -> FrenetState {
    FrenetState::from_column_slice(&[l.x, l.y, l.z, t.x, t.y, t.z, n.x, n.y, n.z, v])
}

fn unpack(s: &FrenetState) -> (Vec3, Vec3, Vec3, f64) {
    (Vec3::new(s[0], s[1], s[2]), Vec3::new(s[3], s[4], s[5]), Vec3::new(s[6], s[7], s[8]), s[9])
}

impl PrescribedKappaCurve {
    /// Integrates the Frenet system on `domain` starting from l = e₃, t = e₁, n = e₂
    /// at v = 0 (or at the nearest domain end when 0 is outside).
    pub fn new(law: KappaLaw, domain: Interval) -> Result<Self> {
        Self::with_step(law, domain, DEFAULT_FRENET_STEP)
    }

    pub fn with_step(law: KappaLaw, domain: Interval, step: f64) -> Result<Self> {
        if !(step > 0.0) {
            return Err(GeomError::Step(format!("integration step must be positive, got {step}")));
        }
        if !(domain.lo.is_finite() && domain.hi.is_finite() && domain.lo < domain.hi) {
            return Err(GeomError::Param("prescribed-curvature curve needs a finite domain".into()));
        }
        let anchor = 0f64.clamp(domain.lo, domain.hi);
        let back = ((anchor - domain.lo + TABLE_PAD) / step).ceil() as usize;
        let fwd = ((domain.hi - anchor + TABLE_PAD) / step).ceil() as usize;

        let rhs = |s: FrenetState| -> Result<FrenetState> {
            let (l, t, n, v) = unpack(&s);
            let k = law.eval(v);
            Ok(pack(t, n * k - l, -t * k, 1.0))
        };
        let start = pack(Vec3::z(), Vec3::x(), Vec3::y(), anchor);

        let mut backward = Vec::with_capacity(back);
        let mut s = start;
        for _ in 0..back {
            s = rk4_step(rhs, s, -step)?;
            backward.push(s);
        }
        let mut nodes: Vec<FrenetState> = backward.into_iter().rev().collect();
        nodes.push(start);
        let mut s = start;
        for _ in 0..fwd {
            s = rk4_step(rhs, s, step)?;
            nodes.push(s);
        }
        Ok(Self { law, domain, step, origin: anchor - back as f64 * step, nodes: Arc::new(nodes) })
    }

    pub fn law(&self) -> KappaLaw {
        self.law
    }

    fn state(&self, v: f64) -> Result<FrenetState> {
        let idx = ((v - self.origin) / self.step).round();
        if !(idx >= 0.0 && (idx as usize) < self.nodes.len()) {
            return Err(GeomError::Domain(format!(
                "v = {v} lies outside the integrated curve domain [{}, {}]",
                self.domain.lo, self.domain.hi
            )));
        }
        let node = self.nodes[idx as usize];
        let dv = v - node[9];
        if dv == 0.0 {
            return Ok(node);
        }
        let law = self.law;
        rk4_step(
            |s: FrenetState| {
                let (l, t, n, v) = unpack(&s);
                let k = law.eval(v);
                Ok(pack(t, n * k - l, -t * k, 1.0))
            },
            node,
            dv,
        )
    }
}

impl SphericalCurve for PrescribedKappaCurve {
    fn kind(&self) -> &'static str {
        "prescribed_kappa"
    }

    fn domain(&self) -> Interval {
        self.domain
    }

    fn position(&self, v: f64) -> Result<Vec3> {
        Ok(unpack(&self.state(v)?).0)
    }

    fn frame(&self, v: f64) -> Result<FrenetData> {
        let (l, t, n, _) = unpack(&self.state(v)?);
        Ok(FrenetData { t, n, l, kappa: self.law.eval(v) })
    }

    fn unit_tolerance(&self) -> f64 {
        1e-6
    }

    fn describe(&self) -> serde_json::Value {
        serde_json::json!({
            "kind": "prescribed_kappa",
            "law": self.law,
            "v": self.domain,
        })
    }
}

/// Frenet apparatus estimated from positions alone by central differences.
///
/// `t = l'`, `n = l × t / |l × t|`, `κ = ⟨t', n⟩`; κ is set to zero when
/// `|t' + l|` falls below [`KAPPA_ZERO_THRESHOLD`].
pub fn frenet(c: &dyn SphericalCurve, v: f64, cfg: &DiffConfig) -> Result<FrenetData> {
    let l = c.position(v)?;
    if (l.norm() - 1.0).abs() > c.unit_tolerance() {
        return Err(GeomError::DegenerateFrame(format!("|l({v})| = {} is not 1", l.norm())));
    }
    let pos = |s: f64| c.position(s);
    let t = diff1(pos, v, cfg)?;
    let dt = diff2(pos, v, cfg)?;
    let cross = l.cross(&t);
    let n = cross / cross.norm();
    let kappa = if (dt + l).norm() < KAPPA_ZERO_THRESHOLD { 0.0 } else { dt.dot(&n) };
    Ok(FrenetData { t, n, l, kappa })
}

/// dκ/dv by a central difference of the curve's Frenet curvature.
pub fn kappa_derivative(c: &dyn SphericalCurve, v: f64, cfg: &DiffConfig) -> Result<f64> {
    diff1(|s| c.frame(s).map(|f| f.kappa), v, cfg)
}

/// Residuals `|l' − t|`, `|t' − (κn − l)|`, `|n' + κt|` of the curve's frame.
pub fn frenet_residuals(c: &dyn SphericalCurve, v: f64, cfg: &DiffConfig) -> Result<[f64; 3]> {
    let fr = c.frame(v)?;
    let dl = diff1(|s| c.position(s), v, cfg)?;
    let dt = diff1(|s| c.frame(s).map(|f| f.t), v, cfg)?;
    let dn = diff1(|s| c.frame(s).map(|f| f.n), v, cfg)?;
    Ok([(dl - fr.t).norm(), (dt - (fr.n * fr.kappa - fr.l)).norm(), (dn + fr.t * fr.kappa).norm()])
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn cfg() -> DiffConfig {
        DiffConfig::default()
    }

    fn sample_vs() -> Vec<f64> {
        Interval::new(-3.0, 7.0).unwrap().samples(41)
    }

    #[test]
    fn great_circle_has_zero_curvature() {
        let c = make_small_circle(1.0).unwrap();
        assert_eq!(c.kind(), "great_circle");
        assert_eq!(c.curvature(), 0.0);
        for v in sample_vs() {
            let fr = frenet(&c, v, &cfg()).unwrap();
            assert!(fr.kappa.abs() < 1e-6, "v = {v}: {}", fr.kappa);
        }
    }

    #[test]
    fn small_circle_curvatures() {
        let c = make_small_circle(FRAC_1_SQRT_2).unwrap();
        assert!((c.curvature() - 1.0).abs() < 1e-12);
        let c6 = make_small_circle(0.6).unwrap();
        assert!((c6.curvature() - 4.0 / 3.0).abs() < 1e-12);
        for v in sample_vs() {
            assert!((frenet(&c, v, &cfg()).unwrap().kappa - 1.0).abs() < 1e-6);
            assert!((frenet(&c6, v, &cfg()).unwrap().kappa - 4.0 / 3.0).abs() < 1e-6);
        }
    }

    #[test]
    fn circle_radius_must_be_in_unit_interval() {
        for r in [0.0, -0.5, 1.0001, f64::NAN] {
            assert!(matches!(make_small_circle(r), Err(GeomError::Param(_))));
        }
        let c = SmallCircle::with_curvature(1.0).unwrap();
        assert!((c.radius() - FRAC_1_SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn numeric_frame_matches_closed_form() {
        for r in [1.0, 0.9, FRAC_1_SQRT_2, 0.3] {
            let c = make_small_circle(r).unwrap();
            for v in sample_vs() {
                let a = c.frame(v).unwrap();
                let b = frenet(&c, v, &cfg()).unwrap();
                assert!((a.t - b.t).norm() < 1e-6);
                assert!((a.n - b.n).norm() < 1e-6);
                assert!((a.kappa - b.kappa).abs() < 1e-6);
                assert!(a.orthonormality_defect() < 1e-12);
                assert!(b.orthonormality_defect() < 1e-6);
                // {l, t, n} positively oriented
                assert!((a.l.cross(&a.t) - a.n).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn frenet_residuals_on_circles() {
        for r in [1.0, FRAC_1_SQRT_2, 0.6, 0.25] {
            let c = make_small_circle(r).unwrap();
            for v in sample_vs() {
                let res = frenet_residuals(&c, v, &cfg()).unwrap();
                assert!(res.iter().all(|&x| x < 1e-5), "r = {r}, v = {v}: {res:?}");
            }
        }
    }

    #[test]
    fn kappa_derivative_of_circles_vanishes() {
        for r in [1.0, FRAC_1_SQRT_2, 0.4] {
            let c = make_small_circle(r).unwrap();
            for v in sample_vs() {
                assert!(kappa_derivative(&c, v, &cfg()).unwrap().abs() < 1e-5);
            }
        }
    }

    #[test]
    fn clothoid_like_curve() {
        let c = PrescribedKappaCurve::new(KappaLaw::Linear { k0: 0.0, k1: 1.0 }, Interval::new(-1.5, 1.5).unwrap())
            .unwrap();
        for v in Interval::new(-1.4, 1.4).unwrap().samples(15) {
            let l = c.position(v).unwrap();
            assert!((l.norm() - 1.0).abs() < 1e-6);
            assert!((kappa_derivative(&c, v, &cfg()).unwrap() - 1.0).abs() < 1e-3);
            // curvature recovered from positions alone
            let fr = frenet(&c, v, &cfg()).unwrap();
            assert!((fr.kappa - v).abs() < 1e-5, "v = {v}: {}", fr.kappa);
            let res = frenet_residuals(&c, v, &cfg()).unwrap();
            assert!(res.iter().all(|&x| x < 1e-5), "{res:?}");
        }
    }

    #[test]
    fn sine_curvature_curve() {
        let c = PrescribedKappaCurve::new(
            KappaLaw::Sine { k0: 0.0, amp: 1.0, freq: 1.0 },
            Interval::new(-1.0, 1.0).unwrap(),
        )
        .unwrap();
        assert!((kappa_derivative(&c, 0.0, &cfg()).unwrap() - 1.0).abs() < 1e-3);
        let fr = frenet(&c, 0.5, &cfg()).unwrap();
        assert!((fr.kappa - 0.5f64.sin()).abs() < 1e-5);
        assert!(fr.orthonormality_defect() < 1e-6);
    }

    #[test]
    fn prescribed_curve_with_constant_law_is_a_circle() {
        let c = PrescribedKappaCurve::new(KappaLaw::Linear { k0: 1.0, k1: 0.0 }, Interval::new(0.0, 2.0 * PI).unwrap())
            .unwrap();
        // circumference of the κ = 1 circle is 2π/√2
        let period = 2.0 * PI * FRAC_1_SQRT_2;
        let a = c.position(0.1).unwrap();
        let b = c.position(0.1 + period).unwrap();
        assert!((a - b).norm() < 1e-9);
        assert!(c.position(2.0 * PI + 0.5).is_err());
    }
}
