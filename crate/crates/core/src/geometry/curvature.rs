//! The curvature tensor of the cone metric and its contractions.
//!
//! On primitive classes the curvature is
//!
//! ```text
//! R(u, v, z, w) = −¼ ⟨Λ(u ∪ w), Λ(v ∪ z)⟩ + ¼ ⟨Λ(u ∪ z), Λ(v ∪ w)⟩
//! ```
//!
//! and it vanishes as soon as one slot is `ω`, because `ω` is a parallel
//! field. Both formulas below therefore replace every argument by its
//! primitive part first. Conventions: `R(u, v)z = ∇_u∇_v z − ∇_v∇_u z −
//! ∇_[u,v] z`, `R(u, v, z, w) = g(R(u, v)z, w)`, sectional curvature
//! `K(u, v) = R(u, v, v, u) / |u ∧ v|²`, and Ricci contracts the first slot
//! with the last.

use nalgebra::DMatrix;

use crate::class::CohClass;
use crate::error::{Error, Result};
use crate::lefschetz::ConePoint;

/// Dense rank-4 tensor over the basis of `H^{1,1}`.
#[derive(Clone, Debug, PartialEq)]
pub struct CurvatureTensor {
    rank: usize,
    entries: Vec<f64>,
    base: CohClass,
}

/// Largest violations of the algebraic curvature tensor identities.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct SymmetryReport {
    /// `R(u,v,z,w) + R(v,u,z,w)`
    pub antisym_first: f64,
    /// `R(u,v,z,w) + R(u,v,w,z)`
    pub antisym_last: f64,
    /// `R(u,v,z,w) − R(z,w,u,v)`
    pub pair: f64,
    /// `R(u,v,z,w) + R(v,z,u,w) + R(z,u,v,w)`
    pub bianchi: f64,
}

impl SymmetryReport {
    pub fn max(&self) -> f64 {
        self.antisym_first
            .max(self.antisym_last)
            .max(self.pair)
            .max(self.bianchi)
    }
}

impl CurvatureTensor {
    pub fn zeros(rank: usize, base: CohClass) -> Self {
        CurvatureTensor {
            rank,
            entries: vec![0.0; rank.pow(4)],
            base,
        }
    }

    pub fn from_fn(
        rank: usize,
        base: CohClass,
        mut f: impl FnMut(usize, usize, usize, usize) -> f64,
    ) -> Self {
        let mut t = Self::zeros(rank, base);
        for i in 0..rank {
            for j in 0..rank {
                for k in 0..rank {
                    for l in 0..rank {
                        let idx = t.idx(i, j, k, l);
                        t.entries[idx] = f(i, j, k, l);
                    }
                }
            }
        }
        t
    }

    fn idx(&self, i: usize, j: usize, k: usize, l: usize) -> usize {
        ((i * self.rank + j) * self.rank + k) * self.rank + l
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// The point the tensor was computed at.
    pub fn base(&self) -> &CohClass {
        &self.base
    }

    pub fn get(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        self.entries[self.idx(i, j, k, l)]
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    /// Multilinear evaluation on arbitrary classes.
    pub fn eval(&self, u: &CohClass, v: &CohClass, z: &CohClass, w: &CohClass) -> f64 {
        let m = self.rank;
        let mut acc = 0.0;
        for i in 0..m {
            for j in 0..m {
                let uv = u[i] * v[j];
                if uv == 0.0 {
                    continue;
                }
                for k in 0..m {
                    for l in 0..m {
                        acc += self.get(i, j, k, l) * uv * z[k] * w[l];
                    }
                }
            }
        }
        acc
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().fold(0.0, |a, x| a.max(x.abs()))
    }

    /// Largest entrywise difference to another tensor of the same rank.
    pub fn max_abs_diff(&self, other: &CurvatureTensor) -> f64 {
        assert_eq!(self.rank, other.rank);
        self.entries
            .iter()
            .zip(&other.entries)
            .fold(0.0, |a, (x, y)| a.max((x - y).abs()))
    }

    pub fn scaled(&self, factor: f64) -> CurvatureTensor {
        CurvatureTensor {
            rank: self.rank,
            entries: self.entries.iter().map(|x| x * factor).collect(),
            base: self.base.clone(),
        }
    }

    pub fn symmetry_report(&self) -> SymmetryReport {
        let m = self.rank;
        let mut r = SymmetryReport::default();
        for i in 0..m {
            for j in 0..m {
                for k in 0..m {
                    for l in 0..m {
                        let x = self.get(i, j, k, l);
                        r.antisym_first = r.antisym_first.max((x + self.get(j, i, k, l)).abs());
                        r.antisym_last = r.antisym_last.max((x + self.get(i, j, l, k)).abs());
                        r.pair = r.pair.max((x - self.get(k, l, i, j)).abs());
                        let b = x + self.get(j, k, i, l) + self.get(k, i, j, l);
                        r.bianchi = r.bianchi.max(b.abs());
                    }
                }
            }
        }
        r
    }
}

/// The curvature tensor on arbitrary classes, via their primitive parts.
pub fn riemann(p: &ConePoint<'_>, u: &CohClass, v: &CohClass, z: &CohClass, w: &CohClass) -> f64 {
    let (u, v, z, w) = (
        p.primitive_part(u),
        p.primitive_part(v),
        p.primitive_part(z),
        p.primitive_part(w),
    );
    let uw = p.lambda_class(&u, &w);
    let vz = p.lambda_class(&v, &z);
    let uz = p.lambda_class(&u, &z);
    let vw = p.lambda_class(&v, &w);
    -0.25 * p.inner(&uw, &vz) + 0.25 * p.inner(&uz, &vw)
}

/// `Λ(pᵢ ∪ pⱼ)` for the primitive parts `pᵢ` of the basis classes.
fn primitive_lambda_classes(p: &ConePoint<'_>) -> (Vec<CohClass>, Vec<Vec<CohClass>>) {
    let m = p.rank();
    let prim: Vec<CohClass> = (0..m).map(|i| p.primitive_part(&p.basis(i))).collect();
    let mut table = vec![vec![CohClass::zeros(m); m]; m];
    for i in 0..m {
        for j in i..m {
            let l = p.lambda_class(&prim[i], &prim[j]);
            table[j][i] = l.clone();
            table[i][j] = l;
        }
    }
    (prim, table)
}

/// [`riemann`] on every basis quadruple.
pub fn riemann_tensor(p: &ConePoint<'_>) -> CurvatureTensor {
    let m = p.rank();
    let (_, lam) = primitive_lambda_classes(p);
    let lowered: Vec<Vec<_>> = lam
        .iter()
        .map(|row| row.iter().map(|c| p.flat(c)).collect())
        .collect();
    CurvatureTensor::from_fn(m, p.omega().clone(), |i, j, k, l| {
        -0.25 * lowered[i][l].dot(lam[j][k].as_vector())
            + 0.25 * lowered[i][k].dot(lam[j][l].as_vector())
    })
}

/// The inner product of the (2,2)-classes `u ∪ w` and `v ∪ z`:
/// `Λ^[4](u ∪ w ∪ v ∪ z) + ⟨Λ(u ∪ w), Λ(v ∪ z)⟩ − Λ^[2](u ∪ w) Λ^[2](v ∪ z)`.
///
/// The `Λ^[4]` term vanishes when `n < 4`.
pub fn inner22(
    p: &ConePoint<'_>,
    (u, w): (&CohClass, &CohClass),
    (v, z): (&CohClass, &CohClass),
) -> f64 {
    p.lambda_scalar(&[u, w, v, z]) + p.inner(&p.lambda_class(u, w), &p.lambda_class(v, z))
        - p.lambda2(u, w) * p.lambda2(v, z)
}

/// The curvature as a perturbation of a space form:
/// `−¼⟨u,w⟩⟨v,z⟩ + ¼⟨u,z⟩⟨v,w⟩ − ¼⟨u∪w, v∪z⟩ + ¼⟨u∪z, v∪w⟩` on primitive parts.
pub fn riemann_alt(
    p: &ConePoint<'_>,
    u: &CohClass,
    v: &CohClass,
    z: &CohClass,
    w: &CohClass,
) -> f64 {
    let (u, v, z, w) = (
        p.primitive_part(u),
        p.primitive_part(v),
        p.primitive_part(z),
        p.primitive_part(w),
    );
    -0.25 * p.inner(&u, &w) * p.inner(&v, &z) + 0.25 * p.inner(&u, &z) * p.inner(&v, &w)
        - 0.25 * inner22(p, (&u, &w), (&v, &z))
        + 0.25 * inner22(p, (&u, &z), (&v, &w))
}

/// [`riemann_alt`] on every basis quadruple.
pub fn riemann_alt_tensor(p: &ConePoint<'_>) -> CurvatureTensor {
    let m = p.rank();
    let prim: Vec<CohClass> = (0..m).map(|i| p.primitive_part(&p.basis(i))).collect();
    CurvatureTensor::from_fn(m, p.omega().clone(), |i, j, k, l| {
        riemann_alt(p, &prim[i], &prim[j], &prim[k], &prim[l])
    })
}

/// `K(u, v) = R(u, v, v, u) / (g(u,u) g(v,v) − g(u,v)²)`.
pub fn sectional(p: &ConePoint<'_>, u: &CohClass, v: &CohClass) -> Result<f64> {
    let uu = p.norm_sq(u);
    let vv = p.norm_sq(v);
    let uv = p.inner(u, v);
    let area = uu * vv - uv * uv;
    if !(area > 1e-12 * uu * vv) {
        return Err(Error::DegeneratePlane { area });
    }
    Ok(riemann(p, u, v, v, u) / area)
}

/// `Ric(u, v) = Σₐ R(eₐ, u, v, eₐ)` over a `g`-orthonormal basis, as a matrix
/// in the coordinate basis.
pub fn ricci(p: &ConePoint<'_>, r: &CurvatureTensor) -> DMatrix<f64> {
    let m = p.rank();
    let gi = p.gram_inv();
    DMatrix::from_fn(m, m, |j, k| {
        let mut acc = 0.0;
        for a in 0..m {
            for b in 0..m {
                acc += gi[(a, b)] * r.get(a, j, k, b);
            }
        }
        acc
    })
}

pub fn scalar_curvature(p: &ConePoint<'_>, ric: &DMatrix<f64>) -> f64 {
    p.gram_inv().component_mul(ric).sum()
}

#[derive(Clone, Debug)]
pub struct DerivedCurvatures {
    pub tensor: CurvatureTensor,
    pub ricci: DMatrix<f64>,
    pub scalar: f64,
}

pub fn derived_curvatures(p: &ConePoint<'_>) -> DerivedCurvatures {
    let tensor = riemann_tensor(p);
    let ricci = ricci(p, &tensor);
    let scalar = scalar_curvature(p, &ricci);
    DerivedCurvatures {
        tensor,
        ricci,
        scalar,
    }
}
