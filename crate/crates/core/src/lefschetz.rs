//! Λ-functionals, primitive decomposition and the cone metric at a point.
//!
//! For classes `u₁, …, u_k` the scalar
//!
//! ```text
//! Λ^[k](u₁ ∪ ⋯ ∪ u_k) = (1/Vol) ∫ u₁ ∪ ⋯ ∪ u_k ∪ ω^[n−k]
//! ```
//!
//! is the divided power of the adjoint Lefschetz operator applied to the cup
//! product. The metric is `g(u, v) = Λ(u)Λ(v) − Λ^[2](u ∪ v)`, which is also
//! the Hessian of `−log Vol`. The class `Λ(u ∪ v)` is the `g`-dual of
//! `z ↦ −Λ^[3](u ∪ v ∪ z) + Λ^[2](u ∪ v)Λ(z)`.
//!
//! A [`ConePoint`] only checks necessary conditions for `ω` to be a Kähler
//! class: positive volume and a positive definite metric. Whether `ω` really
//! contains a Kähler form cannot be read off the intersection form, so the
//! caller asserts it.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::class::CohClass;
use crate::error::{Error, Result};
use crate::intersection::{factorial, IntersectionForm};

/// Smallest admissible ratio of smallest to largest Gram eigenvalue.
pub const POSDEF_TOL: f64 = 1e-10;

/// `Λ^[k](u₁ ∪ ⋯ ∪ u_k)` at `ω`, given the volume of `ω`.
///
/// Returns 0 when `k > n`, since classes of degree above `2n` vanish.
pub fn lambda_scalar_with_volume(
    form: &IntersectionForm,
    omega: &CohClass,
    vol: f64,
    us: &[&CohClass],
) -> f64 {
    let n = form.dim();
    let k = us.len();
    if k > n {
        return 0.0;
    }
    let mut args: Vec<&CohClass> = Vec::with_capacity(n);
    args.extend_from_slice(us);
    // a fixed argument order makes the result exactly symmetric, not just up to roundoff
    args.sort_by(|a, b| {
        a.as_slice()
            .iter()
            .zip(b.as_slice())
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    args.extend(std::iter::repeat_n(omega, n - k));
    form.contract(&args) / (factorial(n - k) * vol)
}

/// `Λ^[k](u₁ ∪ ⋯ ∪ u_k)` at an arbitrary class of positive volume.
pub fn lambda_scalar_at(
    form: &IntersectionForm,
    omega: &CohClass,
    us: &[&CohClass],
) -> Result<f64> {
    for u in us {
        form.check_len(u)?;
    }
    let vol = form.volume(omega)?;
    if vol <= 0.0 || !vol.is_finite() {
        return Err(Error::NonPositiveVolume { vol });
    }
    Ok(lambda_scalar_with_volume(form, omega, vol, us))
}

/// A validated point `ω` of the cone with its volume and metric cached.
#[derive(Clone, Debug)]
pub struct ConePoint<'f> {
    form: &'f IntersectionForm,
    omega: CohClass,
    vol: f64,
    gram: DMatrix<f64>,
    gram_inv: DMatrix<f64>,
}

impl<'f> ConePoint<'f> {
    /// Admits `ω` when its volume is positive and the metric there is
    /// positive definite.
    pub fn new(form: &'f IntersectionForm, omega: CohClass) -> Result<Self> {
        form.check_len(&omega)?;
        if !omega.is_finite() {
            return Err(Error::InvalidInput("non-finite class".into()));
        }
        let vol = form.volume(&omega)?;
        if !(vol > 0.0) || !vol.is_finite() {
            return Err(Error::NonPositiveVolume { vol });
        }
        let m = form.rank();
        let basis: Vec<CohClass> = (0..m).map(|i| CohClass::basis(m, i)).collect();
        let lam: Vec<f64> = basis
            .iter()
            .map(|e| lambda_scalar_with_volume(form, &omega, vol, &[e]))
            .collect();
        let mut gram = DMatrix::zeros(m, m);
        for i in 0..m {
            for j in i..m {
                let l2 = lambda_scalar_with_volume(form, &omega, vol, &[&basis[i], &basis[j]]);
                let g = lam[i] * lam[j] - l2;
                gram[(i, j)] = g;
                gram[(j, i)] = g;
            }
        }
        let eig = SymmetricEigen::new(gram.clone()).eigenvalues;
        let max = eig.max();
        let min = eig.min();
        let ratio = if max > 0.0 {
            min / max
        } else {
            f64::NEG_INFINITY
        };
        if !(ratio > POSDEF_TOL) {
            return Err(Error::IndefiniteMetric { ratio });
        }
        let gram_inv = gram
            .clone()
            .cholesky()
            .ok_or(Error::IndefiniteMetric { ratio })?
            .inverse();
        Ok(ConePoint {
            form,
            omega,
            vol,
            gram,
            gram_inv,
        })
    }

    pub fn form(&self) -> &'f IntersectionForm {
        self.form
    }

    pub fn omega(&self) -> &CohClass {
        &self.omega
    }

    pub fn volume(&self) -> f64 {
        self.vol
    }

    /// Complex dimension `n`.
    pub fn dim(&self) -> usize {
        self.form.dim()
    }

    pub fn rank(&self) -> usize {
        self.form.rank()
    }

    pub fn gram(&self) -> &DMatrix<f64> {
        &self.gram
    }

    pub fn gram_inv(&self) -> &DMatrix<f64> {
        &self.gram_inv
    }

    pub fn basis(&self, i: usize) -> CohClass {
        CohClass::basis(self.rank(), i)
    }

    /// `Λ^[k](u₁ ∪ ⋯ ∪ u_k)`; zero when `k > n`.
    pub fn lambda_scalar(&self, us: &[&CohClass]) -> f64 {
        lambda_scalar_with_volume(self.form, &self.omega, self.vol, us)
    }

    /// `Λ(u)`.
    pub fn lambda(&self, u: &CohClass) -> f64 {
        self.lambda_scalar(&[u])
    }

    /// `Λ^[2](u ∪ v)`.
    pub fn lambda2(&self, u: &CohClass, v: &CohClass) -> f64 {
        self.lambda_scalar(&[u, v])
    }

    /// The vector `j ↦ Λ^[k+1](u₁ ∪ ⋯ ∪ u_k ∪ e_j)`.
    pub fn lambda_covector(&self, us: &[&CohClass]) -> DVector<f64> {
        let m = self.rank();
        DVector::from_iterator(
            m,
            (0..m).map(|j| {
                let e = self.basis(j);
                let mut args: Vec<&CohClass> = us.to_vec();
                args.push(&e);
                self.lambda_scalar(&args)
            }),
        )
    }

    /// The cone metric `g(u, v) = uᵀ G v`.
    pub fn inner(&self, u: &CohClass, v: &CohClass) -> f64 {
        u.as_vector().dot(&(&self.gram * v.as_vector()))
    }

    pub fn norm_sq(&self, u: &CohClass) -> f64 {
        self.inner(u, u)
    }

    /// `u − (Λ(u)/n) ω`.
    pub fn primitive_part(&self, u: &CohClass) -> CohClass {
        let c = self.lambda(u) / self.dim() as f64;
        u.axpy(-c, &self.omega)
    }

    /// The class `Λ(u ∪ v)`, the `g`-dual of
    /// `z ↦ −Λ^[3](u ∪ v ∪ z) + Λ^[2](u ∪ v) Λ(z)`.
    pub fn lambda_class(&self, u: &CohClass, v: &CohClass) -> CohClass {
        let l2 = self.lambda2(u, v);
        let rhs = -self.lambda_covector(&[u, v]) + self.lambda_covector(&[]) * l2;
        CohClass::from(&self.gram_inv * rhs)
    }

    /// Raises an index: the class `x` with `g(x, ·) = covector`.
    pub fn sharp(&self, covector: &DVector<f64>) -> CohClass {
        CohClass::from(&self.gram_inv * covector)
    }

    /// Lowers an index: `G u`.
    pub fn flat(&self, u: &CohClass) -> DVector<f64> {
        &self.gram * u.as_vector()
    }

    /// A `g`-orthonormal basis, the columns of `L⁻ᵀ` for the Cholesky factor
    /// `G = L Lᵀ`.
    pub fn orthonormal_basis(&self) -> Vec<CohClass> {
        let frame = self.orthonormal_frame();
        (0..self.rank())
            .map(|j| CohClass::from(frame.column(j).into_owned()))
            .collect()
    }

    /// Matrix whose columns form a `g`-orthonormal basis.
    pub fn orthonormal_frame(&self) -> DMatrix<f64> {
        let l = self
            .gram
            .clone()
            .cholesky()
            .expect("gram is positive definite")
            .unpack();
        l.transpose()
            .try_inverse()
            .expect("Cholesky factor is invertible")
    }

    /// A `g`-orthonormal basis of the primitive classes (`Λ(u) = 0`), of size
    /// `rank − 1`.
    pub fn primitive_basis(&self) -> Vec<CohClass> {
        let mut out: Vec<CohClass> = Vec::new();
        let unit_omega = &self.omega * (1.0 / (self.dim() as f64).sqrt());
        for i in 0..self.rank() {
            let mut v = self.basis(i);
            v = v.axpy(-self.inner(&v, &unit_omega), &unit_omega);
            for b in &out {
                v = v.axpy(-self.inner(&v, b), b);
            }
            let nrm = self.norm_sq(&v).max(0.0).sqrt();
            if nrm > 1e-8 {
                out.push(&v * (1.0 / nrm));
            }
            if out.len() + 1 == self.rank() {
                break;
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn p1xp1() -> IntersectionForm {
        IntersectionForm::new("P1XP1", 2, 2, [(vec![1, 2], 1.0)]).unwrap()
    }

    fn quintic() -> IntersectionForm {
        IntersectionForm::new("QUINTIC", 3, 1, [(vec![1, 1, 1], 5.0)]).unwrap()
    }

    fn blp2() -> IntersectionForm {
        IntersectionForm::new("BLP2", 2, 2, [(vec![1, 1], 1.0), (vec![2, 2], -1.0)]).unwrap()
    }

    fn c(v: &[f64]) -> CohClass {
        CohClass::new(v.to_vec())
    }

    #[test]
    fn admission() {
        let f = p1xp1();
        let p = ConePoint::new(&f, c(&[1.0, 1.0])).unwrap();
        assert_abs_diff_eq!(p.volume(), 1.0);
        assert!(matches!(
            ConePoint::new(&f, c(&[1.0, -1.0])),
            Err(Error::NonPositiveVolume { vol }) if vol == -1.0
        ));
        let b = blp2();
        let p = ConePoint::new(&b, c(&[2.0, -1.0])).unwrap();
        assert_abs_diff_eq!(p.volume(), 1.5);
        assert!(matches!(
            ConePoint::new(&f, c(&[1.0])),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn indefinite_metric_is_rejected() {
        // Vol ∝ x³ + y³ is positive at (1, 1), but −log Vol is not convex there:
        // the Hessian has eigenvalue −3 along (1, −1).
        let f = IntersectionForm::new("cubic", 3, 2, [(vec![1, 1, 1], 1.0), (vec![2, 2, 2], 1.0)])
            .unwrap();
        assert!(matches!(
            ConePoint::new(&f, c(&[1.0, 1.0])),
            Err(Error::IndefiniteMetric { ratio }) if ratio < 0.0
        ));
    }

    #[test]
    fn lambda_of_omega_is_n() {
        for (f, w) in [
            (p1xp1(), c(&[0.3, 2.0])),
            (quintic(), c(&[1.7])),
            (blp2(), c(&[2.0, -1.0])),
        ] {
            let p = ConePoint::new(&f, w).unwrap();
            assert_abs_diff_eq!(p.lambda(p.omega()), f.dim() as f64, epsilon = 1e-12);
            assert_abs_diff_eq!(
                p.inner(p.omega(), p.omega()),
                f.dim() as f64,
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn lambda_scalar_examples() {
        let f = p1xp1();
        let p = ConePoint::new(&f, c(&[1.0, 1.0])).unwrap();
        assert_abs_diff_eq!(p.lambda(&c(&[1.0, 0.0])), 1.0);
        // k > n vanishes
        let h = c(&[1.0, 0.0]);
        assert_eq!(p.lambda_scalar(&[&h, &h, &h]), 0.0);
        let q = quintic();
        let p = ConePoint::new(&q, c(&[1.0])).unwrap();
        let e = c(&[1.0]);
        assert_abs_diff_eq!(p.lambda2(&e, &e), 6.0, epsilon = 1e-12);
    }

    #[test]
    fn gram_examples() {
        let f = p1xp1();
        let p = ConePoint::new(&f, c(&[1.0, 1.0])).unwrap();
        assert_abs_diff_eq!(p.gram(), &DMatrix::identity(2, 2), epsilon = 1e-14);
        let prod = p.gram() * p.gram_inv();
        assert_abs_diff_eq!(prod, DMatrix::identity(2, 2), epsilon = 1e-10);
    }

    #[test]
    fn primitive_examples() {
        let f = p1xp1();
        let p = ConePoint::new(&f, c(&[1.0, 1.0])).unwrap();
        assert_abs_diff_eq!(p.primitive_part(p.omega()).max_abs(), 0.0, epsilon = 1e-15);
        let u = p.primitive_part(&c(&[1.0, 0.0]));
        assert_abs_diff_eq!(u.as_vector(), c(&[0.5, -0.5]).as_vector(), epsilon = 1e-15);
        assert_abs_diff_eq!(p.lambda(&u), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(p.inner(&u, p.omega()), 0.0, epsilon = 1e-12);
        assert_eq!(p.primitive_part(&u), u);
    }

    #[test]
    fn lambda_class_examples() {
        let f = p1xp1();
        let p = ConePoint::new(&f, c(&[1.0, 1.0])).unwrap();
        let h1 = c(&[1.0, 0.0]);
        let h2 = c(&[0.0, 1.0]);
        assert_abs_diff_eq!(
            p.lambda_class(&h1, &h2).as_vector(),
            p.omega().as_vector(),
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(p.lambda_class(&h1, &h1).max_abs(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn lambda_class_with_omega() {
        // Λ(u ∪ ω) = Λ(u)ω + (n − 2)u
        let f = IntersectionForm::new(
            "CY3GEN",
            3,
            2,
            [
                (vec![1, 1, 1], 8.0),
                (vec![1, 1, 2], 4.0),
                (vec![1, 2, 2], 2.0),
            ],
        )
        .unwrap();
        let p = ConePoint::new(&f, c(&[1.0, 1.0])).unwrap();
        let u = c(&[0.3, -1.1]);
        let lhs = p.lambda_class(&u, p.omega());
        let rhs = p.omega() * p.lambda(&u) + &u * 1.0;
        assert_abs_diff_eq!(lhs.as_vector(), rhs.as_vector(), epsilon = 1e-10);
    }

    #[test]
    fn orthonormal_bases() {
        let b = blp2();
        let p = ConePoint::new(&b, c(&[2.0, -1.0])).unwrap();
        let on = p.orthonormal_basis();
        for (i, x) in on.iter().enumerate() {
            for (j, y) in on.iter().enumerate() {
                assert_abs_diff_eq!(
                    p.inner(x, y),
                    if i == j { 1.0 } else { 0.0 },
                    epsilon = 1e-12
                );
            }
        }
        let prim = p.primitive_basis();
        assert_eq!(prim.len(), 1);
        assert_abs_diff_eq!(p.lambda(&prim[0]), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(p.norm_sq(&prim[0]), 1.0, epsilon = 1e-12);
    }
}
