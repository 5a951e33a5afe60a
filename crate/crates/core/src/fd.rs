//! Finite-difference checks of every analytic formula.
//!
//! Derivatives are central differences with step `h = step_scale·|ω|/|z|`,
//! optionally improved by one Richardson level `(4D(h/2) − D(h))/3`. Second
//! derivatives nest two first derivatives at `second_step_scale`. Reports
//! carry the raw maximum deviation and the scale it is measured against.

use nalgebra::DVector;
use serde::Serialize;

use crate::class::CohClass;
use crate::error::{Error, Result};
use crate::geometry::{christoffel, riemann_tensor, VectorField};
use crate::intersection::IntersectionForm;
use crate::lefschetz::{lambda_scalar_at, ConePoint};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FdConfig {
    pub step_scale: f64,
    pub second_step_scale: f64,
    pub richardson: bool,
}

impl Default for FdConfig {
    fn default() -> Self {
        FdConfig {
            step_scale: 1e-4,
            second_step_scale: 1e-3,
            richardson: true,
        }
    }
}

impl FdConfig {
    pub fn validate(&self) -> Result<()> {
        for s in [self.step_scale, self.second_step_scale] {
            if !(s > 0.0 && s < 0.1) {
                return Err(Error::InvalidInput(format!(
                    "step scale {s} outside (0, 0.1)"
                )));
            }
        }
        Ok(())
    }
}

/// Largest absolute deviation and the scale of the quantities compared.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct Deviation {
    pub max_abs: f64,
    pub scale: f64,
}

impl Deviation {
    /// `max_abs / scale`, or `max_abs` when every compared value vanishes.
    pub fn relative(&self) -> f64 {
        if self.scale > 0.0 {
            self.max_abs / self.scale
        } else {
            self.max_abs
        }
    }

    fn record(&mut self, deviation: f64, magnitude: f64) {
        self.max_abs = self.max_abs.max(deviation.abs());
        self.scale = self.scale.max(magnitude.abs());
    }

    pub fn merge(self, other: Deviation) -> Deviation {
        Deviation {
            max_abs: self.max_abs.max(other.max_abs),
            scale: self.scale.max(other.scale),
        }
    }
}

fn step(omega: &CohClass, dir: &CohClass, scale: f64) -> f64 {
    scale * omega.coord_norm() / dir.coord_norm()
}

fn central<F>(f: &F, omega: &CohClass, dir: &CohClass, h: f64) -> Result<DVector<f64>>
where
    F: Fn(&CohClass) -> Result<DVector<f64>>,
{
    Ok((f(&omega.axpy(h, dir))? - f(&omega.axpy(-h, dir))?) / (2.0 * h))
}

fn directional_with<F>(
    f: &F,
    omega: &CohClass,
    dir: &CohClass,
    scale: f64,
    richardson: bool,
) -> Result<DVector<f64>>
where
    F: Fn(&CohClass) -> Result<DVector<f64>>,
{
    if dir.max_abs() == 0.0 {
        return Ok(f(omega)? * 0.0);
    }
    let h = step(omega, dir, scale);
    let d1 = central(f, omega, dir, h)?;
    if !richardson {
        return Ok(d1);
    }
    let d2 = central(f, omega, dir, 0.5 * h)?;
    Ok((d2 * 4.0 - d1) / 3.0)
}

/// `d_z f` at `ω` for a vector-valued `f`.
pub fn fd_directional<F>(
    f: F,
    omega: &CohClass,
    z: &CohClass,
    cfg: &FdConfig,
) -> Result<DVector<f64>>
where
    F: Fn(&CohClass) -> Result<DVector<f64>>,
{
    directional_with(&f, omega, z, cfg.step_scale, cfg.richardson)
}

/// `d_z f` at `ω` for a scalar `f`.
pub fn fd_directional_scalar<F>(f: F, omega: &CohClass, z: &CohClass, cfg: &FdConfig) -> Result<f64>
where
    F: Fn(&CohClass) -> Result<f64>,
{
    let g = |x: &CohClass| f(x).map(|v| DVector::from_element(1, v));
    Ok(directional_with(&g, omega, z, cfg.step_scale, cfg.richardson)?[0])
}

/// `d_u d_v f` at `ω`, by nesting two first derivatives.
pub fn fd_second<F>(
    f: F,
    omega: &CohClass,
    u: &CohClass,
    v: &CohClass,
    cfg: &FdConfig,
) -> Result<f64>
where
    F: Fn(&CohClass) -> Result<f64>,
{
    let s = cfg.second_step_scale;
    let inner = |x: &CohClass| {
        let g = |y: &CohClass| f(y).map(|val| DVector::from_element(1, val));
        directional_with(&g, x, v, s, cfg.richardson)
    };
    Ok(directional_with(&inner, omega, u, s, cfg.richardson)?[0])
}

/// Wraps a vector field so its jacobian is taken by finite differences of
/// its values.
pub struct FdField<'a> {
    pub field: &'a dyn VectorField,
    pub cfg: FdConfig,
}

impl VectorField for FdField<'_> {
    fn value_at(&self, p: &ConePoint<'_>) -> CohClass {
        self.field.value_at(p)
    }

    fn jacobian_at(&self, p: &ConePoint<'_>, dir: &CohClass) -> CohClass {
        let form = p.form();
        let f = |x: &CohClass| {
            Ok(self
                .field
                .value_at(&ConePoint::new(form, x.clone())?)
                .into_vector())
        };
        fd_directional(f, p.omega(), dir, &self.cfg)
            .map(CohClass::from)
            .expect("step stays inside the cone")
    }
}

fn neg_log_volume(form: &IntersectionForm) -> impl Fn(&CohClass) -> Result<f64> + '_ {
    move |x| {
        let vol = form.volume(x)?;
        if vol > 0.0 {
            Ok(-vol.ln())
        } else {
            Err(Error::NonPositiveVolume { vol })
        }
    }
}

/// FD Hessian of `−log Vol` against the Gram matrix, entrywise.
pub fn check_hessian_metric(p: &ConePoint<'_>, cfg: &FdConfig) -> Result<Deviation> {
    let m = p.rank();
    let f = neg_log_volume(p.form());
    let mut dev = Deviation::default();
    for i in 0..m {
        for j in i..m {
            let h = fd_second(&f, p.omega(), &p.basis(i), &p.basis(j), cfg)?;
            let g = p.gram()[(i, j)];
            dev.record(h - g, g);
        }
    }
    Ok(dev)
}

/// `d_v Λ^[k](u₁ ∪ ⋯ ∪ u_k) = −Λ(v)Λ^[k](u₁ ∪ ⋯ ∪ u_k) + Λ^[k+1](u₁ ∪ ⋯ ∪ u_k ∪ v)`.
pub fn check_lambda_derivative(
    p: &ConePoint<'_>,
    classes: &[CohClass],
    v: &CohClass,
    cfg: &FdConfig,
) -> Result<Deviation> {
    let k = classes.len();
    if k == 0 || k >= p.dim() {
        return Err(Error::InvalidInput(format!(
            "need 1 ≤ k ≤ n − 1, got k = {k}"
        )));
    }
    let refs: Vec<&CohClass> = classes.iter().collect();
    let form = p.form();
    let lhs = fd_directional_scalar(|x| lambda_scalar_at(form, x, &refs), p.omega(), v, cfg)?;
    let mut with_v = refs.clone();
    with_v.push(v);
    let a = -p.lambda(v) * p.lambda_scalar(&refs);
    let b = p.lambda_scalar(&with_v);
    let mut dev = Deviation::default();
    dev.record(lhs - (a + b), a.abs().max(b.abs()));
    Ok(dev)
}

/// Metric compatibility `d_z g(u,v) = g(Γ(z,u),v) + g(u,Γ(z,v))` over basis
/// triples.
pub fn check_connection(p: &ConePoint<'_>, cfg: &FdConfig) -> Result<Deviation> {
    let m = p.rank();
    let form = p.form();
    let gram_at = |x: &CohClass| {
        let q = ConePoint::new(form, x.clone())?;
        Ok(DVector::from_column_slice(q.gram().as_slice()))
    };
    let mut dev = Deviation::default();
    for z in 0..m {
        let ez = p.basis(z);
        let dg = fd_directional(gram_at, p.omega(), &ez, cfg)?;
        let gammas: Vec<CohClass> = (0..m).map(|u| christoffel(p, &ez, &p.basis(u))).collect();
        for u in 0..m {
            for v in 0..m {
                let a = p.inner(&gammas[u], &p.basis(v));
                let b = p.inner(&p.basis(u), &gammas[v]);
                let d = dg[u + v * m];
                dev.record(d - a - b, d.abs().max(a.abs()).max(b.abs()));
            }
        }
    }
    Ok(dev)
}

/// `max |Γ(z,u) − Γ(u,z)|` over basis pairs.
pub fn torsion(p: &ConePoint<'_>) -> f64 {
    let m = p.rank();
    let mut out: f64 = 0.0;
    for z in 0..m {
        for u in 0..m {
            let d = &christoffel(p, &p.basis(z), &p.basis(u))
                - &christoffel(p, &p.basis(u), &p.basis(z));
            out = out.max(d.max_abs());
        }
    }
    out
}

/// The curvature tensor against the FD commutator
/// `d_aΓ(b,c) − d_bΓ(a,c) + Γ(a,Γ(b,c)) − Γ(b,Γ(a,c))`, lowered, over basis
/// quadruples. The scale is the largest of the four terms, since the tensor
/// itself vanishes whenever the primitive space is a line.
pub fn check_curvature(p: &ConePoint<'_>, cfg: &FdConfig) -> Result<Deviation> {
    let m = p.rank();
    let form = p.form();
    let r = riemann_tensor(p);
    // dgamma[a][b][c] = d_a Γ(b, c)
    let mut dgamma = vec![vec![vec![CohClass::zeros(m); m]; m]; m];
    for (a, da) in dgamma.iter_mut().enumerate() {
        for b in 0..m {
            for c in b..m {
                let f = |x: &CohClass| {
                    let q = ConePoint::new(form, x.clone())?;
                    Ok(christoffel(&q, &q.basis(b), &q.basis(c)).into_vector())
                };
                let d = CohClass::from(fd_directional(f, p.omega(), &p.basis(a), cfg)?);
                da[c][b] = d.clone();
                da[b][c] = d;
            }
        }
    }
    let gamma: Vec<Vec<CohClass>> = (0..m)
        .map(|b| {
            (0..m)
                .map(|c| christoffel(p, &p.basis(b), &p.basis(c)))
                .collect()
        })
        .collect();
    let mut dev = Deviation::default();
    for a in 0..m {
        for b in 0..m {
            for c in 0..m {
                let terms = [
                    p.flat(&dgamma[a][b][c]),
                    -p.flat(&dgamma[b][a][c]),
                    p.flat(&christoffel(p, &p.basis(a), &gamma[b][c])),
                    -p.flat(&christoffel(p, &p.basis(b), &gamma[a][c])),
                ];
                for l in 0..m {
                    let analytic = r.get(a, b, c, l);
                    let fd_value: f64 = terms.iter().map(|t| t[l]).sum();
                    let magnitude = terms
                        .iter()
                        .fold(analytic.abs(), |acc, t| acc.max(t[l].abs()));
                    dev.record(fd_value - analytic, magnitude);
                }
            }
        }
    }
    Ok(dev)
}

/// For the primitive projection of `u0`: the largest `|Λ(∇_z u)|` over basis
/// `z` with FD jacobians, and the deviation of those jacobians from the
/// analytic ones.
pub fn check_primitive_field(
    p: &ConePoint<'_>,
    u0: &CohClass,
    cfg: &FdConfig,
) -> Result<(f64, Deviation)> {
    use crate::geometry::{covariant_derivative, PrimitiveProjectionField};
    let field = PrimitiveProjectionField(u0.clone());
    let fd_field = FdField {
        field: &field,
        cfg: *cfg,
    };
    let mut worst: f64 = 0.0;
    let mut dev = Deviation::default();
    for z in 0..p.rank() {
        let ez = p.basis(z);
        let nabla = covariant_derivative(p, &fd_field, &ez);
        worst = worst.max(p.lambda(&nabla).abs());
        let exact = field.jacobian_at(p, &ez);
        let approx = fd_field.jacobian_at(p, &ez);
        for i in 0..p.rank() {
            dev.record(approx[i] - exact[i], exact[i]);
        }
    }
    Ok((worst, dev))
}

/// Errors of the plain central difference of `−log Vol` along `z` at steps
/// `h` and `h/2`, and their ratio; order-2 convergence makes the ratio about 4.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct RichardsonWitness {
    pub err_h: f64,
    pub err_half: f64,
    pub ratio: f64,
}

pub fn richardson_witness(
    p: &ConePoint<'_>,
    z: &CohClass,
    step_scale: f64,
) -> Result<RichardsonWitness> {
    let f = neg_log_volume(p.form());
    let g = |x: &CohClass| f(x).map(|v| DVector::from_element(1, v));
    let exact = -p.lambda(z);
    let h = step(p.omega(), z, step_scale);
    let err_h = (central(&g, p.omega(), z, h)?[0] - exact).abs();
    let err_half = (central(&g, p.omega(), z, 0.5 * h)?[0] - exact).abs();
    Ok(RichardsonWitness {
        err_h,
        err_half,
        ratio: err_h / err_half,
    })
}
