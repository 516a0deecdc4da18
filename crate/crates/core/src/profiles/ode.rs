use std::fmt;
use std::sync::Arc;

use nalgebra::Vector2;

use super::fields::SlopeField;
use super::{MeridianProfile, ProfileJet, Provenance};
use crate::error::{GeomError, Result};
use crate::numeric::{rk4_step, Interval};

/// Default fixed RK4 step for profile integration.
pub const DEFAULT_RK4_STEP: f64 = 1e-3;
/// Distance kept from the ends of the slope field's validity interval.
pub const VALIDITY_MARGIN: f64 = 1e-6;
// |y| this close to 1 makes ġ vanish and κ_m = −f̈/ġ blow up.
const SLOPE_LIMIT: f64 = 1.0 - 1e-12;

/// Profile obtained by integrating ḟ = y(f), ġ = √(1 − ḟ²) with g(u_start) = 0.
///
/// The solution is tabulated at the RK4 nodes; values between nodes come from
/// one partial RK4 step off the nearest node. Derivatives are read from the
/// slope field: ḟ = y(f), f̈ = ½(y²)'(f).
#[derive(Clone)]
pub struct OdeProfile {
    field: Arc<dyn SlopeField>,
    f0: f64,
    step: f64,
    start: f64,
    validity: Interval,
    working: Interval,
    nodes: Vec<Vector2<f64>>,
}

impl fmt::Debug for OdeProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("OdeProfile")
            .field("field", &self.field)
            .field("f0", &self.f0)
            .field("step", &self.step)
            .field("domain", &self.domain())
            .finish()
    }
}

fn rhs(field: &dyn SlopeField, working: Interval) -> impl Fn(Vector2<f64>) -> Result<Vector2<f64>> + '_ {
    move |s: Vector2<f64>| {
        let f = s.x;
        if !working.contains(f) {
            return Err(GeomError::Domain(format!("f = {f} left the validity interval")));
        }
        let y = field.slope(f)?;
        if y.abs() >= SLOPE_LIMIT {
            return Err(GeomError::Domain(format!("|y(f)| reached 1 at f = {f}")));
        }
        Ok(Vector2::new(y, (1.0 - y * y).sqrt()))
    }
}

/// Integrates ḟ = y(f) from f(u_span.lo) = f0 with fixed RK4 steps.
///
/// Integration stops early, truncating the domain, once f would leave the
/// validity interval of `y` (less [`VALIDITY_MARGIN`]) or |y| reaches 1.
pub fn integrate_profile(field: Arc<dyn SlopeField>, f0: f64, u_span: Interval, step: f64) -> Result<OdeProfile> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(GeomError::Step(format!("RK4 step must be positive, got {step}")));
    }
    let validity = field.validity_interval(f0)?;
    let working = Interval { lo: validity.lo + VALIDITY_MARGIN, hi: validity.hi - VALIDITY_MARGIN };
    if !working.contains(f0) {
        return Err(GeomError::Param(format!(
            "f0 = {f0} is within {VALIDITY_MARGIN} of the validity interval [{}, {}]",
            validity.lo, validity.hi
        )));
    }
    let n_max = (u_span.length() / step).floor() as usize;
    let mut nodes = Vec::with_capacity(n_max + 1);
    let mut state = Vector2::new(f0, 0.0);
    nodes.push(state);
    {
        let rhs = rhs(field.as_ref(), working);
        rhs(state)?;
        for _ in 0..n_max {
            match rk4_step(&rhs, state, step) {
                Ok(next) if working.contains(next.x) && rhs(next).is_ok() => {
                    state = next;
                    nodes.push(state);
                }
                _ => break,
            }
        }
    }
    if nodes.len() < 2 {
        return Err(GeomError::Param(format!("integration from f0 = {f0} could not take a single step")));
    }
    Ok(OdeProfile { field, f0, step, start: u_span.lo, validity, working, nodes })
}

impl OdeProfile {
    pub fn field(&self) -> &Arc<dyn SlopeField> {
        &self.field
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn f0(&self) -> f64 {
        self.f0
    }

    fn state(&self, u: f64) -> Result<Vector2<f64>> {
        let dom = self.domain();
        if !(u >= dom.lo - 0.5 * self.step && u <= dom.hi + 0.5 * self.step) {
            return Err(GeomError::Domain(format!(
                "u = {u} lies outside the integrated profile domain [{}, {}]",
                dom.lo, dom.hi
            )));
        }
        let idx = (((u - self.start) / self.step).round() as usize).min(self.nodes.len() - 1);
        let node = self.nodes[idx];
        let du = u - (self.start + idx as f64 * self.step);
        if du == 0.0 {
            return Ok(node);
        }
        rk4_step(rhs(self.field.as_ref(), self.working), node, du)
    }
}

impl MeridianProfile for OdeProfile {
    fn kind(&self) -> &'static str {
        self.field.name()
    }

    fn domain(&self) -> Interval {
        Interval { lo: self.start, hi: self.start + (self.nodes.len() - 1) as f64 * self.step }
    }

    fn provenance(&self) -> Provenance {
        Provenance::OdeIntegrated
    }

    fn jet(&self, u: f64) -> Result<ProfileJet> {
        let s = self.state(u)?;
        let f = s.x;
        let f1 = self.field.slope(f)?;
        let g1 = (1.0 - f1 * f1).sqrt();
        let f2 = 0.5 * self.field.slope_sq_derivative(f)?;
        let g2 = -f1 * f2 / g1;
        Ok(ProfileJet { f, g: s.y, f1, g1, f2, g2, third: None })
    }

    fn params(&self) -> serde_json::Value {
        serde_json::json!({
            "field": self.field.params(),
            "f0": self.f0,
            "step": self.step,
            "u_start": self.start,
        })
    }

    fn validity(&self) -> Option<Interval> {
        Some(self.validity)
    }
}
