use super::{MeridianProfile, ProfileJet, Provenance, UNIT_SPEED_TOL};
use crate::error::{GeomError, Result};
use crate::numeric::Interval;

/// Clamped cubic spline through (x_i, y_i).
#[derive(Debug, Clone, PartialEq)]
struct Spline {
    xs: Vec<f64>,
    ys: Vec<f64>,
    moments: Vec<f64>,
}

/// Derivative at `at` of the polynomial interpolating `(xs, ys)`.
fn lagrange_derivative(xs: &[f64], ys: &[f64], at: f64) -> f64 {
    let n = xs.len();
    let mut total = 0.0;
    for j in 0..n {
        let mut dj = 0.0;
        for m in (0..n).filter(|&m| m != j) {
            let mut term = 1.0 / (xs[j] - xs[m]);
            for k in (0..n).filter(|&k| k != j && k != m) {
                term *= (at - xs[k]) / (xs[j] - xs[k]);
            }
            dj += term;
        }
        total += ys[j] * dj;
    }
    total
}

impl Spline {
    fn new(xs: &[f64], ys: &[f64]) -> Self {
        let n = xs.len();
        let s0 = lagrange_derivative(&xs[..5], &ys[..5], xs[0]);
        let sn = lagrange_derivative(&xs[n - 5..], &ys[n - 5..], xs[n - 1]);
        let h: Vec<f64> = xs.windows(2).map(|w| w[1] - w[0]).collect();
        let slope: Vec<f64> = (0..n - 1).map(|i| (ys[i + 1] - ys[i]) / h[i]).collect();

        // tridiagonal system for the second derivatives (moments)
        let mut sub = vec![0.0; n];
        let mut diag = vec![0.0; n];
        let mut sup = vec![0.0; n];
        let mut rhs = vec![0.0; n];
        diag[0] = 2.0 * h[0];
        sup[0] = h[0];
        rhs[0] = 6.0 * (slope[0] - s0);
        for i in 1..n - 1 {
            sub[i] = h[i - 1];
            diag[i] = 2.0 * (h[i - 1] + h[i]);
            sup[i] = h[i];
            rhs[i] = 6.0 * (slope[i] - slope[i - 1]);
        }
        sub[n - 1] = h[n - 2];
        diag[n - 1] = 2.0 * h[n - 2];
        rhs[n - 1] = 6.0 * (sn - slope[n - 2]);

        for i in 1..n {
            let w = sub[i] / diag[i - 1];
            diag[i] -= w * sup[i - 1];
            rhs[i] -= w * rhs[i - 1];
        }
        let mut moments = vec![0.0; n];
        moments[n - 1] = rhs[n - 1] / diag[n - 1];
        for i in (0..n - 1).rev() {
            moments[i] = (rhs[i] - sup[i] * moments[i + 1]) / diag[i];
        }
        Self { xs: xs.to_vec(), ys: ys.to_vec(), moments }
    }

    /// Value, first and second derivative at `x`.
    fn eval(&self, x: f64) -> (f64, f64, f64) {
        let n = self.xs.len();
        let i = match self.xs.partition_point(|&k| k <= x) {
            0 => 0,
            p => (p - 1).min(n - 2),
        };
        let h = self.xs[i + 1] - self.xs[i];
        let a = (self.xs[i + 1] - x) / h;
        let b = (x - self.xs[i]) / h;
        let (m0, m1) = (self.moments[i], self.moments[i + 1]);
        let (y0, y1) = (self.ys[i], self.ys[i + 1]);
        let value = a * y0 + b * y1 + ((a * a * a - a) * m0 + (b * b * b - b) * m1) * h * h / 6.0;
        let d1 = (y1 - y0) / h - (3.0 * a * a - 1.0) / 6.0 * h * m0 + (3.0 * b * b - 1.0) / 6.0 * h * m1;
        let d2 = a * m0 + b * m1;
        (value, d1, d2)
    }
}

/// Profile interpolated from tabulated samples by clamped cubic splines.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledProfile {
    f: Spline,
    g: Spline,
}

impl SampledProfile {
    /// Requires at least 5 strictly increasing u samples, f > 0, and unit speed
    /// of the interpolant at every sample.
    pub fn new(u: &[f64], f: &[f64], g: &[f64]) -> Result<Self> {
        if u.len() != f.len() || u.len() != g.len() {
            return Err(GeomError::Param("u, f and g sample arrays differ in length".into()));
        }
        if u.len() < 5 {
            return Err(GeomError::Param("a sampled profile needs at least 5 samples".into()));
        }
        if u.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(GeomError::Param("u samples must be strictly increasing".into()));
        }
        if f.iter().any(|&x| !(x > 0.0)) {
            return Err(GeomError::Param("sampled profile requires f > 0".into()));
        }
        let p = Self { f: Spline::new(u, f), g: Spline::new(u, g) };
        for &x in u {
            let j = p.jet(x)?;
            if j.unit_speed_residual() > UNIT_SPEED_TOL {
                return Err(GeomError::Param(format!(
                    "sampled profile is not unit speed at u = {x} (|ḟ² + ġ² − 1| = {:.3e})",
                    j.unit_speed_residual()
                )));
            }
        }
        Ok(p)
    }
}

impl MeridianProfile for SampledProfile {
    fn kind(&self) -> &'static str {
        "custom_samples"
    }

    fn domain(&self) -> Interval {
        Interval { lo: self.f.xs[0], hi: *self.f.xs.last().unwrap() }
    }

    fn provenance(&self) -> Provenance {
        Provenance::Sampled
    }

    fn jet(&self, u: f64) -> Result<ProfileJet> {
        let dom = self.domain();
        // allow the small overshoot needed by central differences at the ends
        let slack = 1e-3 * (dom.hi - dom.lo);
        if !(u >= dom.lo - slack && u <= dom.hi + slack) {
            return Err(GeomError::Domain(format!("u = {u} lies outside the sampled range [{}, {}]", dom.lo, dom.hi)));
        }
        let (f, f1, f2) = self.f.eval(u);
        let (g, g1, g2) = self.g.eval(u);
        if f <= 0.0 {
            return Err(GeomError::Domain(format!("interpolated radius is not positive at u = {u}")));
        }
        Ok(ProfileJet { f, g, f1, g1, f2, g2, third: None })
    }

    fn params(&self) -> serde_json::Value {
        serde_json::json!({ "samples": self.f.xs.len() })
    }
}
