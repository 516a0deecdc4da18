//! Fundamental forms and scalar invariants of a parametric surface in R⁴.
//!
//! The second-form coefficients are built from the six normal components
//! `c_ij^k = ⟨z_ij, n_k⟩` as
//!
//! ```text
//! L = (2/W) | c11¹ c12¹ |    M = (1/W) | c11¹ c22¹ |    N = (2/W) | c12¹ c22¹ |
//!           | c11² c12² |              | c11² c22² |              | c12² c22² |
//! ```
//!
//! with `W = √(EG − F²)`. From them `k = (LN − M²)/(EG − F²)` and
//! `ϰ = (EN + GL − 2FM)/(2(EG − F²))`. The Gauss curvature is computed
//! intrinsically from E, F, G (Brioschi), independently of any normal frame.

use serde::{Deserialize, Serialize};

use crate::error::{GeomError, Result};
use crate::numeric::{det4, diff1, diff2, diff_mixed, dot, DiffConfig, Vec4};

/// Lower bound on EG − F² for a regular point.
pub const REGULARITY_TOL: f64 = 1e-12;
/// |k| below this classifies a point as parabolic.
pub const PARABOLIC_TOL: f64 = 1e-9;
/// max(|L|, |M|, |N|) below this marks a flat point.
pub const FLAT_TOL: f64 = 1e-9;

/// Position and second-order partial derivatives of an immersion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Partials {
    pub zu: Vec4,
    pub zv: Vec4,
    pub zuu: Vec4,
    pub zuv: Vec4,
    pub zvv: Vec4,
}

/// An immersion (u, v) ↦ z(u, v) ∈ R⁴ with an oriented orthonormal normal frame.
pub trait SurfacePatch: Send + Sync {
    fn point(&self, u: f64, v: f64) -> Result<Vec4>;

    /// Partial derivatives; central differences unless overridden.
    fn partials(&self, u: f64, v: f64, cfg: &DiffConfig) -> Result<Partials> {
        fd_partials(self, u, v, cfg)
    }

    /// Orthonormal normals (n₁, n₂) with {z_u, z_v, n₁, n₂} positively oriented.
    fn normal_frame(&self, u: f64, v: f64, cfg: &DiffConfig) -> Result<(Vec4, Vec4)> {
        let p = self.partials(u, v, cfg)?;
        gram_schmidt_normals(&p.zu, &p.zv)
    }
}

/// Partials of `s` by central differences with step `cfg.step`.
pub fn fd_partials<S: SurfacePatch + ?Sized>(s: &S, u: f64, v: f64, cfg: &DiffConfig) -> Result<Partials> {
    Ok(Partials {
        zu: diff1(|t| s.point(t, v), u, cfg)?,
        zv: diff1(|t| s.point(u, t), v, cfg)?,
        zuu: diff2(|t| s.point(t, v), u, cfg)?,
        zuv: diff_mixed(|a, b| s.point(a, b), u, v, cfg.step)?,
        zvv: diff2(|t| s.point(u, t), v, cfg)?,
    })
}

/// Normal frame from the ambient directions e₃, e₄ (then e₁, e₂ if needed),
/// orthogonalized against the tangent plane, oriented by the 4×4 determinant.
pub fn gram_schmidt_normals(zu: &Vec4, zv: &Vec4) -> Result<(Vec4, Vec4)> {
    let t1 = zu.normalize();
    let w = zv - t1 * dot(zv, &t1);
    if w.norm() < 1e-12 {
        return Err(GeomError::Degenerate("tangent vectors are parallel".into()));
    }
    let t2 = w.normalize();
    let mut basis: Vec<Vec4> = vec![t1, t2];
    for k in [2usize, 3, 0, 1] {
        if basis.len() == 4 {
            break;
        }
        let mut e = Vec4::zeros();
        e[k] = 1.0;
        for b in &basis {
            e -= b * dot(&e, b);
        }
        if e.norm() > 0.1 {
            basis.push(e.normalize());
        }
    }
    let (n1, mut n2) = (basis[2], basis[3]);
    if det4(zu, zv, &n1, &n2) < 0.0 {
        n2 = -n2;
    }
    Ok((n1, n2))
}

/// Coefficients E, F, G of the first fundamental form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FirstForm {
    pub e: f64,
    pub f: f64,
    pub g: f64,
}

impl FirstForm {
    /// EG − F².
    pub fn det(&self) -> f64 {
        self.e * self.g - self.f * self.f
    }
}

/// Normal components `c_ij = (⟨z_ij, n₁⟩, ⟨z_ij, n₂⟩)` of the second partials.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormalComponents {
    pub c11: [f64; 2],
    pub c12: [f64; 2],
    pub c22: [f64; 2],
}

fn cross2(p: [f64; 2], q: [f64; 2]) -> f64 {
    p[0] * q[1] - p[1] * q[0]
}

/// Second-form coefficients L, M, N together with the c_ij they come from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SecondForm {
    pub l: f64,
    pub m: f64,
    pub n: f64,
    pub c: NormalComponents,
}

impl SecondForm {
    pub fn from_components(c: NormalComponents, w: f64) -> Self {
        Self {
            l: 2.0 / w * cross2(c.c11, c.c12),
            m: 1.0 / w * cross2(c.c11, c.c22),
            n: 2.0 / w * cross2(c.c12, c.c22),
            c,
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.l.abs().max(self.m.abs()).max(self.n.abs())
    }

    pub fn is_flat(&self) -> bool {
        self.max_abs() < FLAT_TOL
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PointType {
    Elliptic,
    Parabolic,
    Hyperbolic,
}

impl PointType {
    pub fn classify(k: f64) -> Self {
        if k.abs() < PARABOLIC_TOL {
            PointType::Parabolic
        } else if k > 0.0 {
            PointType::Elliptic
        } else {
            PointType::Hyperbolic
        }
    }
}

/// Everything at one point that only needs second-order data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalGeometry {
    pub partials: Partials,
    pub normals: (Vec4, Vec4),
    pub first: FirstForm,
    pub second: SecondForm,
}

impl LocalGeometry {
    pub fn at<S: SurfacePatch + ?Sized>(s: &S, u: f64, v: f64, cfg: &DiffConfig) -> Result<Self> {
        let partials = s.partials(u, v, cfg)?;
        let first = first_form_of(&partials)?;
        let (n1, n2) = s.normal_frame(u, v, cfg)?;
        let comp = |z: &Vec4| [dot(z, &n1), dot(z, &n2)];
        let c = NormalComponents { c11: comp(&partials.zuu), c12: comp(&partials.zuv), c22: comp(&partials.zvv) };
        Ok(Self { partials, normals: (n1, n2), first, second: SecondForm::from_components(c, first.det().sqrt()) })
    }

    /// k = (LN − M²)/(EG − F²).
    pub fn k(&self) -> f64 {
        let SecondForm { l, m, n, .. } = self.second;
        (l * n - m * m) / self.first.det()
    }

    /// ϰ = (EN + GL − 2FM)/(2(EG − F²)), the curvature of the normal connection.
    pub fn kappa_conn(&self) -> f64 {
        let FirstForm { e, f, g } = self.first;
        let SecondForm { l, m, n, .. } = self.second;
        (e * n + g * l - 2.0 * f * m) / (2.0 * self.first.det())
    }

    fn sigma(&self, c: [f64; 2]) -> Vec4 {
        self.normals.0 * c[0] + self.normals.1 * c[1]
    }

    /// H = (G σ₁₁ − 2F σ₁₂ + E σ₂₂) / (2(EG − F²)).
    pub fn mean_curvature_vector(&self) -> Vec4 {
        let FirstForm { e, f, g } = self.first;
        let c = self.second.c;
        (self.sigma(c.c11) * g - self.sigma(c.c12) * (2.0 * f) + self.sigma(c.c22) * e) / (2.0 * self.first.det())
    }

    /// Gauss curvature from the Gauss equation (extrinsic, uses the normal data).
    pub fn gauss_curvature_extrinsic(&self) -> f64 {
        let c = self.second.c;
        let s11_s22 = c.c11[0] * c.c22[0] + c.c11[1] * c.c22[1];
        let s12_sq = c.c12[0] * c.c12[0] + c.c12[1] * c.c12[1];
        (s11_s22 - s12_sq) / self.first.det()
    }

    /// Scalar form (L̃, M̃, Ñ) in the orthonormal tangent basis obtained by
    /// Gram–Schmidt from (z_u, z_v), rotated by `theta`.
    pub fn orthonormal_form(&self, theta: f64) -> (f64, f64, f64) {
        let FirstForm { e, f, g } = self.first;
        // (∂u, ∂v)-coordinates of the orthonormal basis
        let a1 = (1.0 / e.sqrt(), 0.0);
        let nrm = (g - f * f / e).sqrt();
        let a2 = (-f / e / nrm, 1.0 / nrm);
        let (s, c) = theta.sin_cos();
        let r1 = (c * a1.0 + s * a2.0, c * a1.1 + s * a2.1);
        let r2 = (-s * a1.0 + c * a2.0, -s * a1.1 + c * a2.1);
        let cm = self.second.c;
        let sig = |p: (f64, f64), q: (f64, f64)| -> [f64; 2] {
            let mut out = [0.0; 2];
            for (k, o) in out.iter_mut().enumerate() {
                *o = p.0 * q.0 * cm.c11[k] + (p.0 * q.1 + p.1 * q.0) * cm.c12[k] + p.1 * q.1 * cm.c22[k];
            }
            out
        };
        let (s11, s12, s22) = (sig(r1, r1), sig(r1, r2), sig(r2, r2));
        (2.0 * cross2(s11, s12), cross2(s11, s22), 2.0 * cross2(s12, s22))
    }
}

fn first_form_of(p: &Partials) -> Result<FirstForm> {
    let ff = FirstForm { e: dot(&p.zu, &p.zu), f: dot(&p.zu, &p.zv), g: dot(&p.zv, &p.zv) };
    if !(ff.det() > REGULARITY_TOL) {
        return Err(GeomError::Degenerate(format!("EG − F² = {:.3e} is not positive", ff.det())));
    }
    Ok(ff)
}

pub fn first_form<S: SurfacePatch + ?Sized>(s: &S, u: f64, v: f64, cfg: &DiffConfig) -> Result<FirstForm> {
    first_form_of(&s.partials(u, v, cfg)?)
}

pub fn second_form<S: SurfacePatch + ?Sized>(s: &S, u: f64, v: f64, cfg: &DiffConfig) -> Result<SecondForm> {
    Ok(LocalGeometry::at(s, u, v, cfg)?.second)
}

/// Gauss curvature from E, F, G and their differences alone (Brioschi formula),
/// with step `cfg.metric_step`.
pub fn brioschi_curvature<S: SurfacePatch + ?Sized>(s: &S, u: f64, v: f64, cfg: &DiffConfig) -> Result<f64> {
    let h = cfg.metric_step;
    let ff = |a: f64, b: f64| first_form(s, a, b, cfg);
    let c = ff(u, v)?;
    let (up, um) = (ff(u + h, v)?, ff(u - h, v)?);
    let (vp, vm) = (ff(u, v + h)?, ff(u, v - h)?);
    let d1 = |p: f64, m: f64| (p - m) / (2.0 * h);
    let d2 = |p: f64, o: f64, m: f64| (p - 2.0 * o + m) / (h * h);

    let (e_u, e_v) = (d1(up.e, um.e), d1(vp.e, vm.e));
    let (f_u, f_v) = (d1(up.f, um.f), d1(vp.f, vm.f));
    let (g_u, g_v) = (d1(up.g, um.g), d1(vp.g, vm.g));
    let e_vv = d2(vp.e, c.e, vm.e);
    let g_uu = d2(up.g, c.g, um.g);
    let f_uv = diff_mixed(|a, b| ff(a, b).map(|x| x.f), u, v, h)?;

    let (e, f, g) = (c.e, c.f, c.g);
    let m1 = nalgebra::Matrix3::new(
        -0.5 * e_vv + f_uv - 0.5 * g_uu,
        0.5 * e_u,
        f_u - 0.5 * e_v,
        f_v - 0.5 * g_u,
        e,
        f,
        0.5 * g_v,
        f,
        g,
    );
    let m2 = nalgebra::Matrix3::new(0.0, 0.5 * e_v, 0.5 * g_u, 0.5 * e_v, e, f, 0.5 * g_u, f, g);
    Ok((m1.determinant() - m2.determinant()) / (c.det() * c.det()))
}

/// Scalar invariants of a surface point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalarInvariants {
    pub k: f64,
    pub kappa_conn: f64,
    /// Intrinsic (Brioschi) Gauss curvature.
    pub gauss_curvature: f64,
    /// ‖H‖, the length of the mean curvature vector.
    pub h_norm: f64,
    pub point_type: PointType,
    pub is_flat: bool,
}

pub fn scalar_invariants<S: SurfacePatch + ?Sized>(
    s: &S,
    u: f64,
    v: f64,
    cfg: &DiffConfig,
) -> Result<ScalarInvariants> {
    let geom = LocalGeometry::at(s, u, v, cfg)?;
    let k = geom.k();
    Ok(ScalarInvariants {
        k,
        kappa_conn: geom.kappa_conn(),
        gauss_curvature: brioschi_curvature(s, u, v, cfg)?,
        h_norm: geom.mean_curvature_vector().norm(),
        point_type: PointType::classify(k),
        is_flat: geom.second.is_flat(),
    })
}

/// Angle θ ∈ [0, π/2) by which the orthonormalized tangent basis must be rotated
/// so that the scalar second form has no mixed term. θ = 0 when it is already diagonal.
pub fn principal_angle<S: SurfacePatch + ?Sized>(s: &S, u: f64, v: f64, cfg: &DiffConfig) -> Result<f64> {
    let geom = LocalGeometry::at(s, u, v, cfg)?;
    if geom.second.is_flat() {
        return Err(GeomError::FlatPoint { u, v });
    }
    Ok(principal_angle_of(&geom))
}

pub fn principal_angle_of(geom: &LocalGeometry) -> f64 {
    let (b11, b12, b22) = geom.orthonormal_form(0.0);
    let quarter = std::f64::consts::FRAC_PI_2;
    let theta = (0.5 * (2.0 * b12).atan2(b11 - b22)).rem_euclid(quarter);
    // rem_euclid can round up to the modulus itself
    if theta >= quarter {
        0.0
    } else {
        theta
    }
}
