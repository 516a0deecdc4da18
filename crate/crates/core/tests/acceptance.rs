//! Acceptance criteria. Prints one `[PASS]`/`[FAIL]` line per criterion and
//! exits non-zero if any criterion fails.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4, PI, TAU};
use std::sync::Arc;
use std::time::Instant;

use meridian_core::curves::{frenet_residuals, KappaLaw, PrescribedKappaCurve, SmallCircle, SphericalCurve};
use meridian_core::meridian::{evaluate_grid, octet_closed, octet_numeric, ClosedForm, MeridianSurface, SurfaceClass};
use meridian_core::numeric::{DiffConfig, Grid2, Interval, Rect};
use meridian_core::profiles::{
    integrate_profile, unit_speed_defect, Branch, CaseIProfile, ChenField, ChenParams, LineProfile, MeridianProfile,
    ParallelIiField, ParallelParamsI, ParallelParamsII, ProfileDocument, SampledProfile, SphereProfile,
};
use meridian_core::surface::{brioschi_curvature, principal_angle_of, scalar_invariants, LocalGeometry};
use meridian_core::verify::{verify_chen, verify_parallel_ii, SuiteParams, VerificationReport};
use meridian_core::Result;

struct Outcome {
    pass: bool,
    detail: String,
}

type Criterion = (&'static str, fn() -> Outcome);

fn outcome(parts: &[(&str, f64, f64, bool)]) -> Outcome {
    // (label, value, threshold, value must be below threshold)
    let pass = parts.iter().all(|&(_, v, t, below)| if below { v < t } else { v > t });
    let detail = parts
        .iter()
        .map(|&(l, v, t, below)| format!("{l} = {v:.3e} ({} {t:.0e})", if below { "<" } else { ">" }))
        .collect::<Vec<_>>()
        .join("; ");
    Outcome { pass, detail }
}

fn iv(lo: f64, hi: f64) -> Interval {
    Interval::new(lo, hi).unwrap()
}

fn circle(kappa: f64) -> Arc<dyn SphericalCurve> {
    Arc::new(SmallCircle::with_curvature(kappa).unwrap())
}

fn sine_kappa() -> Arc<dyn SphericalCurve> {
    Arc::new(PrescribedKappaCurve::new(KappaLaw::Sine { k0: 1.0, amp: 0.2, freq: 1.0 }, iv(0.0, TAU)).unwrap())
}

fn surface(profile: Arc<dyn MeridianProfile>, curve: Arc<dyn SphericalCurve>, u: Interval) -> MeridianSurface {
    let v = curve.domain();
    let v = if v.hi.is_finite() { v } else { iv(0.0, TAU * FRAC_1_SQRT_2) };
    MeridianSurface::build(profile, curve, Rect::new(u, v)).unwrap()
}

fn sphere_circle() -> MeridianSurface {
    surface(Arc::new(SphereProfile), circle(1.0), iv(0.3, PI - 0.3))
}

fn case_i_profile() -> Arc<dyn MeridianProfile> {
    Arc::new(CaseIProfile::new(ParallelParamsI { c: 0.0, d: 1.0, a_shift: 0.0 }).unwrap())
}

fn chen_profile() -> Arc<dyn MeridianProfile> {
    let field = ChenField::new(ChenParams { a: 1.0, b: 1.0, branch: Branch::Plus }).unwrap();
    Arc::new(integrate_profile(Arc::new(field), 1.5, iv(0.0, 10.0), 1e-3).unwrap())
}

fn parallel_ii_profile() -> Arc<dyn MeridianProfile> {
    let field = ParallelIiField::new(ParallelParamsII { a: 0.5, c: 0.5, branch: Branch::Plus }).unwrap();
    Arc::new(integrate_profile(Arc::new(field), 1.2, iv(0.0, 2.0), 1e-3).unwrap())
}

/// Three general-class families with 342 + 342 + 340 = 1024 grid points.
fn families() -> Vec<(&'static str, MeridianSurface, Grid2)> {
    let guard = 2e-3;
    let chen = chen_profile();
    let chen_u = chen.domain().shrink(guard).unwrap();
    vec![
        ("sphere + circle", sphere_circle(), Grid2::new(iv(0.3, PI - 0.3), iv(0.0, 4.4), 19, 18).unwrap()),
        (
            "case (i) + circle",
            surface(case_i_profile(), circle(1.0), iv(-2.0, 2.0)),
            Grid2::new(iv(-2.0, 2.0), iv(0.0, 4.4), 19, 18).unwrap(),
        ),
        ("chen + circle", surface(chen, circle(1.0), chen_u), Grid2::new(chen_u, iv(0.0, 4.4), 20, 17).unwrap()),
    ]
}

fn max_over<T>(items: impl IntoIterator<Item = T>, f: impl Fn(T) -> Result<f64>) -> f64 {
    items.into_iter().map(|x| f(x).unwrap_or(f64::INFINITY)).fold(0.0, |m, v| {
        if v.is_nan() {
            f64::INFINITY
        } else {
            m.max(v)
        }
    })
}

fn oracle_discrepancy(ms: &MeridianSurface, grid: &Grid2, cfg: &DiffConfig) -> f64 {
    max_over(grid.points(), |(u, v)| Ok(octet_numeric(ms, u, v, cfg)?.octet_distance(&octet_closed(ms, u, v, cfg)?)))
}

fn criterion_1() -> Outcome {
    let ms = sphere_circle();
    let grid = Grid2::new(iv(0.3, PI - 0.3), iv(0.0, TAU * FRAC_1_SQRT_2), 32, 32).unwrap();
    let d = oracle_discrepancy(&ms, &grid, &DiffConfig::with_step(1e-4).unwrap());
    outcome(&[("max |numeric − closed|", d, 1e-5, true)])
}

fn criterion_2() -> Outcome {
    let cfg = DiffConfig::default();
    let mut res = [0.0f64; 4];
    let mut count = 0;
    for (_, ms, grid) in families() {
        for s in evaluate_grid(&ms, &ClosedForm, &grid, &cfg).unwrap() {
            let Some(r) = s.record else { continue };
            count += 1;
            let octet_k = r.nu1 * r.nu2 - (r.lambda * r.lambda + r.mu * r.mu);
            let vals = [
                (r.k + 4.0 * r.nu1 * r.nu2 * r.mu * r.mu).abs(),
                (r.kappa_conn - (r.nu1 - r.nu2) * r.mu).abs().max(r.kappa_conn.abs()),
                (r.gauss_curvature - octet_k).abs(),
                (r.h_norm - (r.nu1 + r.nu2).abs() / 2.0)
                    .abs()
                    .max((r.h_norm - (r.kappa_conn.powi(2) - r.k).sqrt() / (2.0 * r.mu.abs())).abs()),
            ];
            for (m, v) in res.iter_mut().zip(vals) {
                *m = if v.is_nan() { f64::INFINITY } else { m.max(v) };
            }
        }
    }
    let mut o = outcome(&[
        ("k", res[0], 1e-8, true),
        ("ϰ", res[1], 1e-8, true),
        ("K", res[2], 1e-8, true),
        ("‖H‖", res[3], 1e-8, true),
    ]);
    o.pass &= count == 1024;
    o.detail = format!("{count} points; {}", o.detail);
    o
}

fn criterion_3() -> Outcome {
    let cfg = DiffConfig::default();
    let d = families()
        .iter()
        .map(|(_, ms, grid)| {
            max_over(grid.points(), |(u, v)| {
                let j = ms.profile().jet(u)?;
                Ok((brioschi_curvature(ms, u, v, &cfg)? + j.f2 / j.f).abs())
            })
        })
        .fold(0.0, f64::max);
    outcome(&[("max |K_Brioschi + f̈/f|", d, 1e-4, true)])
}

fn all_meridian_grids() -> Vec<(MeridianSurface, Grid2)> {
    let mut out: Vec<(MeridianSurface, Grid2)> = families().into_iter().map(|(_, ms, g)| (ms, g)).collect();
    out.push((
        surface(Arc::new(SphereProfile), sine_kappa(), iv(0.3, PI - 0.3)),
        Grid2::new(iv(0.3, PI - 0.3), iv(0.0, TAU), 16, 16).unwrap(),
    ));
    let p2 = parallel_ii_profile();
    out.push((surface(p2, circle(1.0), iv(0.0, 2.0)), Grid2::new(iv(0.0, 2.0), iv(0.0, 4.4), 16, 16).unwrap()));
    out.push((
        surface(case_i_profile(), sine_kappa(), iv(-2.0, 2.0)),
        Grid2::new(iv(-2.0, 2.0), iv(0.0, TAU), 16, 16).unwrap(),
    ));
    out
}

fn criterion_4() -> Outcome {
    let cfg = DiffConfig::default();
    let (mut ln, mut m) = (0.0f64, 0.0f64);
    for (ms, grid) in all_meridian_grids() {
        ln = ln.max(max_over(grid.points(), |(u, v)| {
            let g = LocalGeometry::at(&ms, u, v, &cfg)?;
            Ok(g.second.l.abs().max(g.second.n.abs()))
        }));
        m = m.max(max_over(grid.points(), |(u, v)| {
            let g = LocalGeometry::at(&ms, u, v, &cfg)?;
            let (jet, fr) = ms.local_data(u, v)?;
            Ok((g.second.m + jet.kappa_m() * fr.kappa).abs())
        }));
    }
    outcome(&[("max |L|, |N|", ln, 1e-8, true), ("max |M + κ_m κ|", m, 1e-6, true)])
}

fn check(rep: &VerificationReport, name: &str) -> f64 {
    rep.check(name).map(|c| c.max_residual).unwrap_or(f64::NAN)
}

fn criterion_5() -> Outcome {
    let rep = verify_chen(&SuiteParams::default()).unwrap();
    let mut o = outcome(&[
        ("max|λ| closed", check(&rep, "lambda_defect_closed"), 1e-5, true),
        ("max|λ| numeric", check(&rep, "lambda_defect_numeric"), 1e-5, true),
        ("κ = 1.1 control max|λ|", check(&rep, "control_kappa_shift_lambda"), 1e-3, false),
        ("nonconstant-κ control max|λ|", check(&rep, "control_nonconstant_kappa_lambda"), 1e-3, false),
        ("slope-field substitution", check(&rep, "slope_substitution"), 1e-8, true),
    ]);
    o.pass &= rep.pass;
    o
}

fn criterion_6() -> Outcome {
    let cfg = DiffConfig::default();
    let profile = case_i_profile();
    let grid = Grid2::new(iv(-2.0, 2.0), iv(0.0, 4.4), 32, 32).unwrap();
    let a = max_over(grid.u.samples(grid.nu), |u| Ok(profile.jet(u)?.a_term().abs()));
    let beta = |ms: &MeridianSurface, grid: &Grid2| {
        max_over(grid.points(), |(u, v)| {
            let c = octet_closed(ms, u, v, &cfg)?;
            let n = octet_numeric(ms, u, v, &cfg)?;
            Ok(c.beta1.abs().max(c.beta2.abs()).max(n.beta1.abs()).max(n.beta2.abs()))
        })
    };
    let circle_ms = surface(profile.clone(), circle(1.0), iv(-2.0, 2.0));
    let wavy_ms = surface(profile, sine_kappa(), iv(-2.0, 2.0));
    let wavy_grid = Grid2::new(iv(-2.0, 2.0), iv(0.0, TAU), 32, 32).unwrap();
    let expected = [0.0, 0.0, 0.5, 0.5, 0.5, 1.0, 0.0, 0.0];
    let closed = octet_closed(&circle_ms, 0.0, 1.0, &cfg).unwrap();
    let numeric = octet_numeric(&circle_ms, 0.0, 1.0, &cfg).unwrap();
    let octet_err = closed
        .octet()
        .iter()
        .chain(numeric.octet().iter())
        .zip(expected.iter().chain(expected.iter()))
        .map(|(g, w)| (g - w).abs())
        .fold(0.0, f64::max);
    let k_err = (closed.gauss_curvature + 1.0).abs().max((numeric.gauss_curvature + 1.0).abs());
    outcome(&[
        ("max|ġ + fκ_m|", a, 1e-6, true),
        ("β-defect (circle)", beta(&circle_ms, &grid), 1e-6, true),
        ("β-defect (nonconstant κ)", beta(&wavy_ms, &wavy_grid), 1e-6, true),
        ("octet at u=0", octet_err, 1e-6, true),
        ("|K + 1| at u=0", k_err, 1e-4, true),
    ])
}

fn criterion_7() -> Outcome {
    let rep = verify_parallel_ii(&SuiteParams::default()).unwrap();
    let mut o = outcome(&[
        ("max|ġ + fκ_m − 1/2|", check(&rep, "a_term_constant"), 1e-5, true),
        ("β-defect closed", check(&rep, "beta_defect_closed"), 1e-5, true),
        ("β-defect numeric", check(&rep, "beta_defect_numeric"), 1e-5, true),
        ("slope-field substitution", check(&rep, "slope_substitution"), 1e-8, true),
        ("nonconstant-κ control β-defect", check(&rep, "control_nonconstant_kappa_beta"), 1e-3, false),
    ]);
    o.pass &= rep.pass;
    o
}

fn criterion_8() -> Outcome {
    let cfg = DiffConfig::default();
    let case_1 = surface(Arc::new(SphereProfile), circle(0.0), iv(0.3, PI - 0.3));
    let case_2 = surface(Arc::new(LineProfile::new(1.0, 0.7).unwrap()), circle(1.0), iv(0.0, 2.0));
    let grid1 = Grid2::new(iv(0.3, PI - 0.3), iv(0.0, 6.0), 16, 16).unwrap();
    let grid2 = Grid2::new(iv(0.01, 1.99), iv(0.01, 4.4), 16, 16).unwrap();
    let flat = |ms: &MeridianSurface, g: &Grid2| {
        max_over(g.points(), |(u, v)| Ok(LocalGeometry::at(ms, u, v, &cfg)?.second.max_abs()))
    };
    let scalars = max_over(grid2.points(), |(u, v)| {
        let s = scalar_invariants(&case_2, u, v, &cfg)?;
        Ok(s.k.abs().max(s.kappa_conn.abs()).max(s.gauss_curvature.abs()))
    });
    let mut o = outcome(&[
        ("Case I max(|L|,|M|,|N|)", flat(&case_1, &grid1), 1e-9, true),
        ("Case II max(|L|,|M|,|N|)", flat(&case_2, &grid2), 1e-9, true),
        ("Case II max(|k|,|ϰ|,|K|)", scalars, 1e-8, true),
    ]);
    o.pass &= case_1.class() == SurfaceClass::PlanarGreatCircle
        && case_2.class() == SurfaceClass::DevelopableStraightMeridian;
    o
}

fn criterion_9() -> Outcome {
    let cfg = DiffConfig::default();
    let (mut theta, mut mixed) = (0.0f64, 0.0f64);
    for (ms, grid) in all_meridian_grids() {
        for (u, v) in grid.points() {
            let g = LocalGeometry::at(&ms, u, v, &cfg).unwrap();
            let t = principal_angle_of(&g);
            theta = theta.max((t - FRAC_PI_4).abs());
            mixed = mixed.max(g.orthonormal_form(t).1.abs());
        }
    }
    outcome(&[("max |θ − π/4|", theta, 1e-6, true), ("max mixed coefficient", mixed, 1e-8, true)])
}

fn criterion_10() -> Outcome {
    let cfg = DiffConfig::default();
    let curves: Vec<Arc<dyn SphericalCurve>> = vec![
        circle(1.0),
        circle(0.0),
        circle(4.0 / 3.0),
        Arc::new(SmallCircle::with_curvature(0.3).unwrap()),
        sine_kappa(),
        Arc::new(PrescribedKappaCurve::new(KappaLaw::Linear { k0: 0.0, k1: 1.0 }, iv(-2.0, 2.0)).unwrap()),
    ];
    let frenet = curves
        .iter()
        .map(|c| {
            let dom = c.domain();
            let span = if dom.hi.is_finite() { dom.shrink(1e-3).unwrap() } else { iv(-5.0, 5.0) };
            max_over(span.samples(200), |v| Ok(frenet_residuals(c.as_ref(), v, &cfg)?.into_iter().fold(0.0, f64::max)))
        })
        .fold(0.0, f64::max);
    let sphere_doc = ProfileDocument::sample(&SphereProfile, iv(0.3, 2.8), 201).unwrap();
    let profiles: Vec<(Arc<dyn MeridianProfile>, Interval)> = vec![
        (Arc::new(SphereProfile), iv(0.01, PI - 0.01)),
        (case_i_profile(), iv(-5.0, 5.0)),
        (chen_profile(), chen_profile().domain()),
        (parallel_ii_profile(), iv(0.0, 2.0)),
        (Arc::new(LineProfile::new(1.0, 0.7).unwrap()), iv(0.0, 5.0)),
        (
            Arc::new(SampledProfile::new(&sphere_doc.u_samples, &sphere_doc.f_samples, &sphere_doc.g_samples).unwrap()),
            iv(0.3, 2.8),
        ),
    ];
    let speed = profiles
        .iter()
        .map(|(p, r)| unit_speed_defect(p.as_ref(), *r, 2001).unwrap_or(f64::INFINITY))
        .fold(0.0, f64::max);
    outcome(&[("max Frenet residual", frenet, 1e-5, true), ("max |ḟ² + ġ² − 1|", speed, 1e-6, true)])
}

fn criterion_11() -> Outcome {
    let ms = sphere_circle();
    let grid = Grid2::new(iv(0.3, PI - 0.3), iv(0.0, TAU * FRAC_1_SQRT_2), 32, 32).unwrap();
    let coarse = oracle_discrepancy(&ms, &grid, &DiffConfig::with_step(1e-4).unwrap());
    let fine = oracle_discrepancy(&ms, &grid, &DiffConfig::with_step(5e-5).unwrap());
    let ratio = coarse / fine;
    Outcome {
        pass: (3.5..=4.5).contains(&ratio),
        detail: format!(
            "discrepancy {coarse:.3e} at h = 1e-4, {fine:.3e} at h = 5e-5; ratio = {ratio:.4} (in [3.5, 4.5])"
        ),
    }
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("oracle agreement", criterion_1),
        ("identity suite", criterion_2),
        ("intrinsic K", criterion_3),
        ("second-form closed form", criterion_4),
        ("Chen forward", criterion_5),
        ("parallel case (i)", criterion_6),
        ("parallel case (ii)", criterion_7),
        ("degenerate cases", criterion_8),
        ("principal angle", criterion_9),
        ("Frenet and unit-speed residuals", criterion_10),
        ("convergence order", criterion_11),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = run();
        if !o.pass {
            failed += 1;
        }
        println!(
            "[{}] {:>2} {name}: {} [{:.1}s]",
            if o.pass { "PASS" } else { "FAIL" },
            i + 1,
            o.detail,
            start.elapsed().as_secs_f64()
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
