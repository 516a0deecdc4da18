//! Verification suites: defect fields, identity checks, substitution residuals
//! and negative controls assembled into pass/fail reports.

mod audit;
mod suites;

pub use audit::{audit_point, audit_surface, surface_checks, PointAudit, SurfaceAudit};
pub use suites::{
    default_sphere_surface, suite_grid, verify_chen, verify_identities, verify_parallel_i, verify_parallel_ii,
    ChenSuite, IdentitiesSuite, ParallelISuite, ParallelIiSuite, SuiteParams, SuiteRegistry, VerificationSuite,
    CONTROL_KAPPA_SINE,
};

use serde::{Deserialize, Serialize};

/// Whether a check passes below or above its threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Expect {
    /// value < tolerance
    Below,
    /// value > tolerance; used by negative controls
    Above,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    /// Largest residual (or, for controls, the defect that must be large).
    pub max_residual: f64,
    pub tolerance: f64,
    pub expect: Expect,
    pub pass: bool,
}

impl Check {
    pub fn below(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Self { name: name.into(), max_residual: value, tolerance, expect: Expect::Below, pass: value < tolerance }
    }

    pub fn above(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Self {
            name: name.into(),
            max_residual: value,
            tolerance: threshold,
            expect: Expect::Above,
            pass: value > threshold,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub suite: String,
    pub pass: bool,
    pub checks: Vec<Check>,
    pub masked_points: usize,
    /// Set when the surface is not of the general class and the octet checks were skipped.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub skipped: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    pub runtime_seconds: f64,
}

impl VerificationReport {
    pub fn new(suite: impl Into<String>) -> Self {
        Self {
            suite: suite.into(),
            pass: true,
            checks: Vec::new(),
            masked_points: 0,
            skipped: None,
            notes: Vec::new(),
            runtime_seconds: 0.0,
        }
    }

    pub fn push(&mut self, check: Check) {
        self.pass &= check.pass;
        self.checks.push(check);
    }

    pub fn extend(&mut self, checks: impl IntoIterator<Item = Check>) {
        for c in checks {
            self.push(c);
        }
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }
}

/// Thresholds used by the suites.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    /// Algebraic identities between closed-form values.
    pub identity: f64,
    /// Numeric octet against closed forms; frame derivative formulas.
    pub oracle: f64,
    /// Anything built on second differences (Brioschi K, normal derivative formulas).
    pub intrinsic: f64,
    /// Substitution of a slope field into its defining equation.
    pub substitution: f64,
    /// |ϰ| from the second fundamental form.
    pub flat_connection: f64,
    /// |M + κ_m κ|.
    pub second_form: f64,
    /// |L|, |N| and |θ − π/4|.
    pub principal: f64,
    pub chen: f64,
    pub parallel_i: f64,
    pub parallel_ii: f64,
    /// Negative controls must exceed the relevant tolerance by this factor.
    pub control_factor: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            identity: 1e-8,
            oracle: 1e-5,
            intrinsic: 1e-4,
            substitution: 1e-8,
            flat_connection: 1e-6,
            second_form: 1e-6,
            principal: 1e-6,
            chen: 1e-5,
            parallel_i: 1e-6,
            parallel_ii: 1e-5,
            control_factor: 100.0,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn report_pass_is_conjunction() {
        let mut r = VerificationReport::new("t");
        r.push(Check::below("a", 1e-9, 1e-8));
        assert!(r.pass);
        r.push(Check::above("control", 1e-4, 1e-3));
        assert!(!r.pass);
        assert_eq!(r.failures().count(), 1);
        // NaN never passes
        assert!(!Check::below("nan", f64::NAN, 1.0).pass);
        assert!(!Check::above("nan", f64::NAN, 1.0).pass);
    }

    #[test]
    fn tolerances_deserialize_partially() {
        let t: Tolerances = serde_json::from_str(r#"{"chen": 1e-3}"#).unwrap();
        assert_eq!(t.chen, 1e-3);
        assert_eq!(t.identity, 1e-8);
    }
}
