use std::collections::BTreeMap;
use std::f64::consts::{PI, TAU};
use std::sync::Arc;
use std::time::Instant;

use super::{audit_surface, surface_checks, Check, Tolerances, VerificationReport};
use crate::curves::{KappaLaw, PrescribedKappaCurve, SmallCircle, SphericalCurve};
use crate::error::Result;
use crate::meridian::{chen_defect, evaluate_grid, parallel_defect, ClosedForm, FrameDifferences, MeridianSurface};
use crate::numeric::{diff1, diff2, DiffConfig, Grid2, Interval, Rect};
use crate::profiles::{
    chen_slope_residual, integrate_profile, parallel_ii_slope_residual, Branch, CaseIProfile, ChenField, ChenParams,
    MeridianProfile, ParallelIiField, ParallelParamsI, ParallelParamsII, SlopeField, SphereProfile, DEFAULT_RK4_STEP,
};
use crate::surface::LocalGeometry;

/// Relative amplitude of the nonconstant-κ control directrix κ(v) = b(1 + 0.2 sin v).
pub const CONTROL_KAPPA_SINE: f64 = 0.2;
/// Relative curvature change of the perturbed-directrix control.
const CONTROL_KAPPA_SHIFT: f64 = 0.1;
/// Points at which slope fields are substituted into their defining equations.
const SUBSTITUTION_SAMPLES: usize = 1000;
/// Upper cut-off for substitution sampling on unbounded validity intervals.
const SUBSTITUTION_SPAN: f64 = 20.0;
/// u range over which the ODE profiles are integrated (truncated at the validity end).
const PROFILE_SPAN: f64 = 2.0;
const CHEN_SPAN: f64 = 10.0;

/// Inputs shared by the suites. Each suite reads the fields it needs.
#[derive(Debug, Clone)]
pub struct SuiteParams {
    pub chen: ChenParams,
    pub chen_f0: f64,
    pub parallel_i: ParallelParamsI,
    pub parallel_ii: ParallelParamsII,
    pub parallel_ii_f0: f64,
    /// Directrix curvature b of the parallel suites.
    pub kappa: f64,
    /// Relative change applied to the directrix curvature of the main surface.
    pub perturb_kappa: f64,
    pub rk4_step: f64,
    pub nu: usize,
    pub nv: usize,
    pub cfg: DiffConfig,
    pub tolerances: Tolerances,
    /// Surface for the identities suite; the sphere with the κ = 1 circle when absent.
    pub surface: Option<MeridianSurface>,
}

impl Default for SuiteParams {
    fn default() -> Self {
        Self {
            chen: ChenParams { a: 1.0, b: 1.0, branch: Branch::Plus },
            chen_f0: 1.5,
            parallel_i: ParallelParamsI { c: 0.0, d: 1.0, a_shift: 0.0 },
            parallel_ii: ParallelParamsII { a: 0.5, c: 0.5, branch: Branch::Plus },
            parallel_ii_f0: 1.2,
            kappa: 1.0,
            perturb_kappa: 0.0,
            rk4_step: DEFAULT_RK4_STEP,
            nu: 32,
            nv: 32,
            cfg: DiffConfig::default(),
            tolerances: Tolerances::default(),
            surface: None,
        }
    }
}

/// Grid over the surface domain with guard margins of twice the larger difference step.
pub fn suite_grid(domain: &Rect, nu: usize, nv: usize, cfg: &DiffConfig) -> Result<Grid2> {
    let guard = 2.0 * cfg.step.max(cfg.metric_step);
    Grid2::over(domain, nu, nv)?.with_guard(guard, guard)
}

fn circle_surface(profile: Arc<dyn MeridianProfile>, kappa: f64) -> Result<MeridianSurface> {
    let circle = SmallCircle::with_curvature(kappa)?;
    let v = Interval::new(0.0, TAU * circle.radius())?;
    let u = profile.domain();
    MeridianSurface::build(profile, Arc::new(circle), Rect::new(u, v))
}

fn sine_kappa_surface(profile: Arc<dyn MeridianProfile>, b: f64) -> Result<MeridianSurface> {
    let v = Interval::new(0.0, TAU)?;
    let law = KappaLaw::Sine { k0: b, amp: CONTROL_KAPPA_SINE * b, freq: 1.0 };
    let curve: Arc<dyn SphericalCurve> = Arc::new(PrescribedKappaCurve::new(law, v)?);
    let u = profile.domain();
    MeridianSurface::build(profile, curve, Rect::new(u, v))
}

/// The sphere profile with the κ = 1 circle over u ∈ [0.3, π − 0.3].
pub fn default_sphere_surface() -> Result<MeridianSurface> {
    let circle = SmallCircle::with_curvature(1.0)?;
    let v = Interval::new(0.0, TAU * circle.radius())?;
    MeridianSurface::build(Arc::new(SphereProfile), Arc::new(circle), Rect::new(Interval::new(0.3, PI - 0.3)?, v))
}

fn substitution_residual(
    field: &dyn SlopeField,
    seed: f64,
    residual: impl Fn(f64, &DiffConfig) -> Result<f64>,
) -> Result<f64> {
    let iv = field.validity_interval(seed)?;
    let hi = iv.hi.min(iv.lo + SUBSTITUTION_SPAN);
    let inner = Interval::new(iv.lo + 1e-4, hi - 1e-4)?;
    // the substituted (y²)' needs a finer step than the frame oracle
    let fine = DiffConfig::with_step(1e-6)?;
    inner
        .samples(SUBSTITUTION_SAMPLES)
        .into_iter()
        .map(|t| residual(t, &fine).map(f64::abs))
        .try_fold(0.0f64, |m, r| r.map(|r| m.max(r)))
}

/// Largest spread of λ along v at fixed u.
fn lambda_variation_in_v(ms: &MeridianSurface, grid: &Grid2, cfg: &DiffConfig) -> Result<f64> {
    let samples = evaluate_grid(ms, &ClosedForm, grid, cfg)?;
    Ok(samples
        .chunks(grid.nv)
        .map(|row| {
            let ls: Vec<f64> = row.iter().filter_map(|s| s.record.map(|r| r.lambda)).collect();
            let hi = ls.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let lo = ls.iter().copied().fold(f64::INFINITY, f64::min);
            if ls.is_empty() {
                0.0
            } else {
                hi - lo
            }
        })
        .fold(0.0, f64::max))
}

fn add_surface_audit(rep: &mut VerificationReport, ms: &MeridianSurface, grid: &Grid2, p: &SuiteParams) -> Result<()> {
    let audit = audit_surface(ms, grid, &p.cfg)?;
    rep.masked_points = rep.masked_points.max(audit.masked);
    rep.extend(surface_checks(&audit, &p.tolerances));
    Ok(())
}

/// Forward Chen check: the profile of the Chen slope field with a circle of
/// curvature b has λ ≡ 0, while perturbed or nonconstant directrices do not.
pub fn verify_chen(p: &SuiteParams) -> Result<VerificationReport> {
    let start = Instant::now();
    let tol = &p.tolerances;
    let mut rep = VerificationReport::new("chen");
    let params = p.chen;
    let field = Arc::new(ChenField::new(params)?);
    rep.push(Check::below(
        "slope_substitution",
        substitution_residual(field.as_ref(), p.chen_f0, |t, c| chen_slope_residual(t, &params, c))?,
        tol.substitution,
    ));
    let profile: Arc<dyn MeridianProfile> =
        Arc::new(integrate_profile(field, p.chen_f0, Interval::new(0.0, CHEN_SPAN)?, p.rk4_step)?);
    let dom = profile.domain();
    rep.note(format!("profile integrated on u ∈ [{}, {}]", dom.lo, dom.hi));

    let ms = circle_surface(profile.clone(), params.b * (1.0 + p.perturb_kappa))?;
    let grid = suite_grid(&ms.domain(), p.nu, p.nv, &p.cfg)?;
    let closed = chen_defect(&ms, &ClosedForm, &grid, &p.cfg)?;
    let numeric = chen_defect(&ms, &FrameDifferences, &grid, &p.cfg)?;
    rep.masked_points = closed.masked;
    rep.push(Check::below("lambda_defect_closed", closed.max, tol.chen));
    rep.push(Check::below("lambda_defect_numeric", numeric.max, tol.chen));
    add_surface_audit(&mut rep, &ms, &grid, p)?;

    let threshold = tol.control_factor * tol.chen;
    let shifted = circle_surface(profile.clone(), params.b * (1.0 + CONTROL_KAPPA_SHIFT))?;
    let shifted_grid = suite_grid(&shifted.domain(), p.nu, p.nv, &p.cfg)?;
    rep.push(Check::above(
        "control_kappa_shift_lambda",
        chen_defect(&shifted, &ClosedForm, &shifted_grid, &p.cfg)?.max,
        threshold,
    ));
    let wavy = sine_kappa_surface(profile, params.b)?;
    let wavy_grid = suite_grid(&wavy.domain(), p.nu, p.nv, &p.cfg)?;
    rep.push(Check::above(
        "control_nonconstant_kappa_lambda",
        chen_defect(&wavy, &ClosedForm, &wavy_grid, &p.cfg)?.max,
        threshold,
    ));
    rep.push(Check::above(
        "control_nonconstant_kappa_lambda_variation",
        lambda_variation_in_v(&wavy, &wavy_grid, &p.cfg)?,
        threshold,
    ));
    rep.runtime_seconds = start.elapsed().as_secs_f64();
    Ok(rep)
}

/// Forward check of the closed-form parallel family with ġ + fκ_m ≡ 0.
pub fn verify_parallel_i(p: &SuiteParams) -> Result<VerificationReport> {
    let start = Instant::now();
    let tol = &p.tolerances;
    let mut rep = VerificationReport::new("parallel-i");
    let base = CaseIProfile::new(p.parallel_i)?;
    let span = Interval::new(-PROFILE_SPAN, PROFILE_SPAN)?;
    let profile: Arc<dyn MeridianProfile> = Arc::new(ProfileOn { inner: base, domain: span });

    let ms = circle_surface(profile.clone(), p.kappa * (1.0 + p.perturb_kappa))?;
    let grid = suite_grid(&ms.domain(), p.nu, p.nv, &p.cfg)?;
    let a_max = grid
        .u
        .samples(grid.nu)
        .into_iter()
        .map(|u| profile.jet(u).map(|j| j.a_term().abs()))
        .try_fold(0.0f64, |m, a| a.map(|a| m.max(a)))?;
    rep.push(Check::below("a_term_zero", a_max, tol.parallel_i));
    let closed = parallel_defect(&ms, &ClosedForm, &grid, &p.cfg)?;
    let numeric = parallel_defect(&ms, &FrameDifferences, &grid, &p.cfg)?;
    rep.masked_points = closed.masked;
    rep.push(Check::below("beta_defect_closed", closed.max, tol.parallel_i));
    rep.push(Check::below("beta_defect_numeric", numeric.max, tol.parallel_i));
    add_surface_audit(&mut rep, &ms, &grid, p)?;

    let wavy = sine_kappa_surface(profile, p.kappa)?;
    let wavy_grid = suite_grid(&wavy.domain(), p.nu, p.nv, &p.cfg)?;
    rep.push(Check::below(
        "nonconstant_kappa_beta_defect",
        parallel_defect(&wavy, &FrameDifferences, &wavy_grid, &p.cfg)?.max,
        tol.oracle,
    ));
    rep.note(
        "with ġ + fκ_m ≡ 0 both β vanish for a directrix of nonconstant curvature as well; \
         this follows from the closed forms and is checked as an observation",
    );
    rep.runtime_seconds = start.elapsed().as_secs_f64();
    Ok(rep)
}

/// Forward check of the integrated parallel family with ġ + fκ_m ≡ a ≠ 0 and κ ≡ b.
pub fn verify_parallel_ii(p: &SuiteParams) -> Result<VerificationReport> {
    let start = Instant::now();
    let tol = &p.tolerances;
    let mut rep = VerificationReport::new("parallel-ii");
    let params = p.parallel_ii;
    let field = Arc::new(ParallelIiField::new(params)?);
    rep.push(Check::below(
        "slope_substitution",
        substitution_residual(field.as_ref(), p.parallel_ii_f0, |t, c| parallel_ii_slope_residual(t, &params, c))?,
        tol.substitution,
    ));
    let profile: Arc<dyn MeridianProfile> =
        Arc::new(integrate_profile(field, p.parallel_ii_f0, Interval::new(0.0, PROFILE_SPAN)?, p.rk4_step)?);

    let ms = circle_surface(profile.clone(), p.kappa * (1.0 + p.perturb_kappa))?;
    let grid = suite_grid(&ms.domain(), p.nu, p.nv, &p.cfg)?;
    // A from differences of the integrated (f, g), not from the slope field
    let a_dev = grid
        .u
        .samples(grid.nu)
        .into_iter()
        .map(|u| -> Result<f64> {
            let f = |s: f64| profile.jet(s).map(|j| j.f);
            let g = |s: f64| profile.jet(s).map(|j| j.g);
            let (f1, f2) = (diff1(f, u, &p.cfg)?, diff2(f, u, &p.cfg)?);
            let (g1, g2) = (diff1(g, u, &p.cfg)?, diff2(g, u, &p.cfg)?);
            let fu = profile.jet(u)?.f;
            Ok((g1 + fu * (f1 * g2 - g1 * f2) - params.a).abs())
        })
        .try_fold(0.0f64, |m, d| d.map(|d| m.max(d)))?;
    rep.push(Check::below("a_term_constant", a_dev, tol.parallel_ii));
    let closed = parallel_defect(&ms, &ClosedForm, &grid, &p.cfg)?;
    let numeric = parallel_defect(&ms, &FrameDifferences, &grid, &p.cfg)?;
    rep.masked_points = closed.masked;
    rep.push(Check::below("beta_defect_closed", closed.max, tol.parallel_ii));
    rep.push(Check::below("beta_defect_numeric", numeric.max, tol.parallel_ii));
    add_surface_audit(&mut rep, &ms, &grid, p)?;

    let wavy = sine_kappa_surface(profile, p.kappa)?;
    let wavy_grid = suite_grid(&wavy.domain(), p.nu, p.nv, &p.cfg)?;
    rep.push(Check::above(
        "control_nonconstant_kappa_beta",
        parallel_defect(&wavy, &ClosedForm, &wavy_grid, &p.cfg)?.max,
        tol.control_factor * tol.parallel_ii,
    ));
    rep.runtime_seconds = start.elapsed().as_secs_f64();
    Ok(rep)
}

/// Identity suite, Brioschi agreement and derivative-formula residuals on any
/// meridian surface. Non-general surfaces get flatness checks only.
pub fn verify_identities(ms: &MeridianSurface, p: &SuiteParams) -> Result<VerificationReport> {
    let start = Instant::now();
    let tol = &p.tolerances;
    let mut rep = VerificationReport::new("identities");
    let grid = suite_grid(&ms.domain(), p.nu, p.nv, &p.cfg)?;
    if !ms.class().is_general() {
        rep.skipped = Some(ms.class().reason().to_string());
        let mut flat: f64 = 0.0;
        let mut scalar: f64 = 0.0;
        for (u, v) in grid.points() {
            let geom = LocalGeometry::at(ms, u, v, &p.cfg)?;
            flat = flat.max(geom.second.max_abs());
            let s = crate::surface::scalar_invariants(ms, u, v, &p.cfg)?;
            scalar = scalar.max(s.k.abs()).max(s.kappa_conn.abs());
        }
        rep.push(Check::below("flat_points", flat, crate::surface::FLAT_TOL));
        rep.push(Check::below("k_and_kappa_conn_zero", scalar, tol.identity));
        rep.runtime_seconds = start.elapsed().as_secs_f64();
        return Ok(rep);
    }
    add_surface_audit(&mut rep, ms, &grid, p)?;
    rep.runtime_seconds = start.elapsed().as_secs_f64();
    Ok(rep)
}

/// Restricts an unbounded analytic profile to a finite u range.
#[derive(Debug)]
struct ProfileOn<P> {
    inner: P,
    domain: Interval,
}

impl<P: MeridianProfile> MeridianProfile for ProfileOn<P> {
    fn kind(&self) -> &'static str {
        self.inner.kind()
    }

    fn domain(&self) -> Interval {
        self.domain
    }

    fn provenance(&self) -> crate::profiles::Provenance {
        self.inner.provenance()
    }

    fn jet(&self, u: f64) -> Result<crate::profiles::ProfileJet> {
        self.inner.jet(u)
    }

    fn params(&self) -> serde_json::Value {
        self.inner.params()
    }
}

/// A named verification suite.
pub trait VerificationSuite: Send + Sync {
    fn name(&self) -> &'static str;
    fn description(&self) -> &'static str;
    fn run(&self, p: &SuiteParams) -> Result<VerificationReport>;
}

pub struct ChenSuite;
pub struct ParallelISuite;
pub struct ParallelIiSuite;
pub struct IdentitiesSuite;

impl VerificationSuite for ChenSuite {
    fn name(&self) -> &'static str {
        "chen"
    }

    fn description(&self) -> &'static str {
        "λ ≡ 0 for the Chen profile with a circle of curvature b, plus negative controls"
    }

    fn run(&self, p: &SuiteParams) -> Result<VerificationReport> {
        verify_chen(p)
    }
}

impl VerificationSuite for ParallelISuite {
    fn name(&self) -> &'static str {
        "parallel-i"
    }

    fn description(&self) -> &'static str {
        "β₁ = β₂ = 0 for f = √(u² + 2cu + d)"
    }

    fn run(&self, p: &SuiteParams) -> Result<VerificationReport> {
        verify_parallel_i(p)
    }
}

impl VerificationSuite for ParallelIiSuite {
    fn name(&self) -> &'static str {
        "parallel-ii"
    }

    fn description(&self) -> &'static str {
        "β₁ = β₂ = 0 for ġ + fκ_m ≡ a with a circle directrix, plus a nonconstant-κ control"
    }

    fn run(&self, p: &SuiteParams) -> Result<VerificationReport> {
        verify_parallel_ii(p)
    }
}

impl VerificationSuite for IdentitiesSuite {
    fn name(&self) -> &'static str {
        "identities"
    }

    fn description(&self) -> &'static str {
        "invariant identities, Brioschi K and frame derivative formulas on a given surface"
    }

    fn run(&self, p: &SuiteParams) -> Result<VerificationReport> {
        match &p.surface {
            Some(ms) => verify_identities(ms, p),
            None => verify_identities(&default_sphere_surface()?, p),
        }
    }
}

/// Verification suites selectable by name.
pub struct SuiteRegistry {
    entries: BTreeMap<&'static str, Box<dyn VerificationSuite>>,
}

impl SuiteRegistry {
    pub fn empty() -> Self {
        Self { entries: BTreeMap::new() }
    }

    pub fn builtin() -> Self {
        let mut r = Self::empty();
        r.register(Box::new(ChenSuite));
        r.register(Box::new(ParallelISuite));
        r.register(Box::new(ParallelIiSuite));
        r.register(Box::new(IdentitiesSuite));
        r
    }

    pub fn register(&mut self, s: Box<dyn VerificationSuite>) {
        self.entries.insert(s.name(), s);
    }

    pub fn get(&self, name: &str) -> Option<&dyn VerificationSuite> {
        self.entries.get(name).map(|b| b.as_ref())
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.entries.keys().copied().collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = &dyn VerificationSuite> {
        self.entries.values().map(|b| b.as_ref())
    }
}

impl Default for SuiteRegistry {
    fn default() -> Self {
        Self::builtin()
    }
}
