//! The commutative product `u · v = ½ Λ(u ∪ v)` on `H^{1,1}` at a cone point.
//!
//! The product is commutative but neither associative nor unital. It satisfies
//! `x · ω = ½Λ(x)ω + ½(n−2)x`, so `ω · ω = (n−1)ω`, and its algebraic
//! curvature tensor `R_alg(x,y,z,w) = ⟨x·w, y·z⟩ − ⟨x·z, y·w⟩` is minus the
//! curvature of the cone metric on primitive classes.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::class::CohClass;
use crate::geometry::CurvatureTensor;
use crate::lefschetz::ConePoint;

/// Singular values below this fraction of the largest span the derivation
/// nullspace.
pub const NULL_TOL: f64 = 1e-8;
/// Relative residual below which a tensor counts as constant curvature.
pub const CC_TOL: f64 = 1e-8;

#[derive(Clone, Debug)]
pub struct AlgebraAtPoint<'f> {
    base: ConePoint<'f>,
    /// `structure[i][j]` is `eᵢ · eⱼ`.
    structure: Vec<Vec<CohClass>>,
}

/// Largest deviations from the two structural identities.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct StructureReport {
    /// `max_i |eᵢ · ω − ½Λ(eᵢ)ω − ½(n−2)eᵢ|`
    pub x_omega: f64,
    /// `|ω · ω − (n−1)ω|`
    pub omega_omega: f64,
    /// `max |eᵢ·eⱼ − eⱼ·eᵢ|`
    pub commutativity: f64,
}

/// Bilinear forms `b_l(x, y) = ⟨x · y, x_l⟩` for a `g`-orthonormal basis `x_l`,
/// as matrices in the coordinate basis.
#[derive(Clone, Debug, Serialize)]
pub struct BilinearFormSet {
    pub basis: Vec<CohClass>,
    #[serde(serialize_with = "crate::report::serialize_matrices")]
    pub forms: Vec<DMatrix<f64>>,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct ConstantCurvatureFit {
    /// Best-fit `λ` in `T = 2λ⟨xy, zw⟩ + A` with `A` fully symmetric.
    pub lambda: f64,
    /// Norm of what no choice of `λ` and `A` explains.
    pub residual: f64,
    /// `CC_TOL · ‖T‖`.
    pub tol: f64,
    pub constant: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct DerivationReport {
    #[serde(serialize_with = "crate::report::serialize_matrices")]
    pub derivations: Vec<DMatrix<f64>>,
    /// Largest `|D(eᵢ·eⱼ) − Deᵢ·eⱼ − eᵢ·Deⱼ|` over the returned basis.
    pub residual: f64,
    /// Largest `|Dω|`.
    pub kills_omega: f64,
    /// Largest `|Λ(Deᵢ)|`.
    pub primitive_image: f64,
    /// Largest entry of `GD + DᵀG`.
    pub skew: f64,
}

impl DerivationReport {
    pub fn max_post_check(&self) -> f64 {
        self.kills_omega.max(self.primitive_image).max(self.skew)
    }
}

impl<'f> AlgebraAtPoint<'f> {
    pub fn new(base: ConePoint<'f>) -> Self {
        let m = base.rank();
        let mut structure = vec![vec![CohClass::zeros(m); m]; m];
        for i in 0..m {
            for j in i..m {
                let c = base.lambda_class(&base.basis(i), &base.basis(j)) * 0.5;
                structure[j][i] = c.clone();
                structure[i][j] = c;
            }
        }
        AlgebraAtPoint { base, structure }
    }

    pub fn base(&self) -> &ConePoint<'f> {
        &self.base
    }

    pub fn rank(&self) -> usize {
        self.base.rank()
    }

    /// `S[i][j][k]`, the `k`-th coordinate of `eᵢ · eⱼ`.
    pub fn structure_constant(&self, i: usize, j: usize, k: usize) -> f64 {
        self.structure[i][j][k]
    }

    pub fn product(&self, u: &CohClass, v: &CohClass) -> CohClass {
        self.base.lambda_class(u, v) * 0.5
    }

    pub fn structure_report(&self) -> StructureReport {
        let p = &self.base;
        let m = self.rank();
        let n = p.dim() as f64;
        let w = p.omega();
        let mut x_omega: f64 = 0.0;
        let mut commutativity: f64 = 0.0;
        for i in 0..m {
            let e = p.basis(i);
            let expected = (w * (0.5 * p.lambda(&e))).axpy(0.5 * (n - 2.0), &e);
            x_omega = x_omega.max((&self.product(&e, w) - &expected).max_abs());
            for j in 0..m {
                let d = &self.product(&e, &p.basis(j)) - &self.product(&p.basis(j), &e);
                commutativity = commutativity.max(d.max_abs());
            }
        }
        let omega_omega = (&self.product(w, w) - &(w * (n - 1.0))).max_abs();
        StructureReport {
            x_omega,
            omega_omega,
            commutativity,
        }
    }

    /// `R_alg(eᵢ, eⱼ, e_k, e_l) = ⟨eᵢ·e_l, eⱼ·e_k⟩ − ⟨eᵢ·e_k, eⱼ·e_l⟩`.
    pub fn curvature(&self) -> CurvatureTensor {
        let p = &self.base;
        let s = &self.structure;
        let lowered: Vec<Vec<DVector<f64>>> = s
            .iter()
            .map(|row| row.iter().map(|c| p.flat(c)).collect())
            .collect();
        CurvatureTensor::from_fn(self.rank(), p.omega().clone(), |i, j, k, l| {
            lowered[i][l].dot(s[j][k].as_vector()) - lowered[i][k].dot(s[j][l].as_vector())
        })
    }

    pub fn kn_decompose(&self) -> BilinearFormSet {
        let p = &self.base;
        let m = self.rank();
        let basis = p.orthonormal_basis();
        let forms = basis
            .iter()
            .map(|x| {
                let xl = p.flat(x);
                DMatrix::from_fn(m, m, |i, j| self.structure[i][j].as_vector().dot(&xl))
            })
            .collect();
        BilinearFormSet { basis, forms }
    }

    /// `max |R_alg + Σ_l b_l ∧ b_l|` over basis quadruples, together with the
    /// largest deviation of `x·y` from `Σ_l b_l(x,y) x_l`.
    pub fn kn_residual(&self, set: &BilinearFormSet) -> (f64, f64) {
        let m = self.rank();
        let base = self.base.omega().clone();
        let mut sum = CurvatureTensor::zeros(m, base.clone());
        for b in &set.forms {
            let t = kn_product(b, b, base.clone());
            sum = CurvatureTensor::from_fn(m, base.clone(), |i, j, k, l| {
                sum.get(i, j, k, l) + t.get(i, j, k, l)
            });
        }
        let ralg = self.curvature();
        let tensor_dev = ralg.max_abs_diff(&sum.scaled(-1.0));
        let mut product_dev: f64 = 0.0;
        for i in 0..m {
            for j in 0..m {
                let mut rebuilt = CohClass::zeros(m);
                for (b, x) in set.forms.iter().zip(&set.basis) {
                    rebuilt = rebuilt.axpy(b[(i, j)], x);
                }
                product_dev = product_dev.max((&rebuilt - &self.structure[i][j]).max_abs());
            }
        }
        (tensor_dev, product_dev)
    }

    /// Fits `T(x,y,z,w) = ⟨x·y, z·w⟩` on a `g`-orthonormal basis of the whole
    /// space.
    pub fn constant_curvature_test(&self) -> ConstantCurvatureFit {
        self.constant_curvature_on(&self.base.orthonormal_basis())
    }

    /// The same fit restricted to the primitive classes, where `R_alg` equals
    /// minus the metric curvature.
    pub fn constant_curvature_test_primitive(&self) -> ConstantCurvatureFit {
        self.constant_curvature_on(&self.base.primitive_basis())
    }

    /// Fit over an arbitrary `g`-orthonormal family.
    pub fn constant_curvature_on(&self, frame: &[CohClass]) -> ConstantCurvatureFit {
        let p = &self.base;
        let k = frame.len();
        if k <= 1 {
            // every tensor on a line is symmetric
            return ConstantCurvatureFit {
                lambda: 0.0,
                residual: 0.0,
                tol: 0.0,
                constant: true,
            };
        }
        let prods: Vec<Vec<CohClass>> = frame
            .iter()
            .map(|x| frame.iter().map(|y| self.product(x, y)).collect())
            .collect();
        let mut t = vec![0.0; k.pow(4)];
        let mut q = vec![0.0; k.pow(4)];
        let idx = |a: usize, b: usize, c: usize, d: usize| ((a * k + b) * k + c) * k + d;
        let delta = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
        for a in 0..k {
            for b in 0..k {
                for c in 0..k {
                    for d in 0..k {
                        t[idx(a, b, c, d)] = p.inner(&prods[a][b], &prods[c][d]);
                        q[idx(a, b, c, d)] =
                            0.5 * (delta(a, c) * delta(b, d) + delta(a, d) * delta(b, c));
                    }
                }
            }
        }
        let t_norm = norm(&t);
        let pt = antisymmetric_part(&t, k);
        let pq = antisymmetric_part(&q, k);
        let qq = dot(&pq, &pq);
        let lambda = if qq > 0.0 {
            dot(&pt, &pq) / (2.0 * qq)
        } else {
            0.0
        };
        let rem: Vec<f64> = pt
            .iter()
            .zip(&pq)
            .map(|(x, y)| x - 2.0 * lambda * y)
            .collect();
        let residual = norm(&rem);
        let tol = CC_TOL * t_norm;
        ConstantCurvatureFit {
            lambda,
            residual,
            tol,
            constant: residual <= tol,
        }
    }

    /// Basis of the derivations `D(x·y) = Dx·y + x·Dy`, as matrices acting
    /// on coordinates, each normalized to unit Frobenius norm.
    pub fn derivations(&self) -> DerivationReport {
        let m = self.rank();
        let s = |i: usize, j: usize, k: usize| self.structure[i][j][k];
        let col = |a: usize, b: usize| a * m + b;
        let pairs: Vec<(usize, usize)> = (0..m).flat_map(|i| (i..m).map(move |j| (i, j))).collect();
        let mut sys = DMatrix::zeros(pairs.len() * m, m * m);
        for (r, &(i, j)) in pairs.iter().enumerate() {
            for c in 0..m {
                let row = r * m + c;
                for k in 0..m {
                    sys[(row, col(c, k))] += s(i, j, k);
                }
                for a in 0..m {
                    sys[(row, col(a, i))] -= s(a, j, c);
                    sys[(row, col(a, j))] -= s(i, a, c);
                }
            }
        }
        // pad so the SVD returns a full right basis even when rows < columns
        let rows = sys.nrows().max(m * m);
        let sys = sys.resize_vertically(rows, 0.0);
        let svd = sys.clone().svd(false, true);
        let v_t = svd.v_t.expect("requested");
        let sigma_max = svd.singular_values.max();
        let derivations: Vec<DMatrix<f64>> = svd
            .singular_values
            .iter()
            .enumerate()
            .filter(|(_, &sv)| sv <= NULL_TOL * sigma_max || sigma_max == 0.0)
            .map(|(r, _)| {
                let d = DMatrix::from_fn(m, m, |a, b| v_t[(r, col(a, b))]);
                let nrm = d.norm();
                d / nrm
            })
            .collect();
        self.derivation_report(derivations)
    }

    /// Evaluates the defining system and the three structural post-checks on
    /// given matrices.
    pub fn derivation_report(&self, derivations: Vec<DMatrix<f64>>) -> DerivationReport {
        let p = &self.base;
        let m = self.rank();
        let g = p.gram();
        let (mut residual, mut kills_omega, mut primitive_image, mut skew) =
            (0.0f64, 0.0f64, 0.0f64, 0.0f64);
        for d in &derivations {
            let apply = |c: &CohClass| CohClass::from(d * c.as_vector());
            for i in 0..m {
                let ei = p.basis(i);
                let dei = apply(&ei);
                primitive_image = primitive_image.max(p.lambda(&dei).abs());
                for j in i..m {
                    let ej = p.basis(j);
                    let lhs = apply(&self.structure[i][j]);
                    let rhs = self.product(&dei, &ej) + self.product(&ei, &apply(&ej));
                    residual = residual.max((&lhs - &rhs).max_abs());
                }
            }
            kills_omega = kills_omega.max(apply(p.omega()).max_abs());
            skew = skew.max((g * d + d.transpose() * g).amax());
        }
        DerivationReport {
            derivations,
            residual,
            kills_omega,
            primitive_image,
            skew,
        }
    }
}

/// `(b ∧ b')(x,y,z,w) = ½[b(x,z)b'(y,w) + b'(x,z)b(y,w) − b(x,w)b'(y,z) − b'(x,w)b(y,z)]`,
/// which for `b = b'` is `b(x,z)b(y,w) − b(x,w)b(y,z)`.
pub fn kn_product(b: &DMatrix<f64>, b2: &DMatrix<f64>, base: CohClass) -> CurvatureTensor {
    CurvatureTensor::from_fn(b.nrows(), base, |x, y, z, w| {
        0.5 * (b[(x, z)] * b2[(y, w)] + b2[(x, z)] * b[(y, w)]
            - b[(x, w)] * b2[(y, z)]
            - b2[(x, w)] * b[(y, z)])
    })
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// `T − Sym(T)` for a `k⁴` tensor, with `Sym` the average over all 24 index
/// permutations.
fn antisymmetric_part(t: &[f64], k: usize) -> Vec<f64> {
    const PERMS: [[usize; 4]; 24] = [
        [0, 1, 2, 3],
        [0, 1, 3, 2],
        [0, 2, 1, 3],
        [0, 2, 3, 1],
        [0, 3, 1, 2],
        [0, 3, 2, 1],
        [1, 0, 2, 3],
        [1, 0, 3, 2],
        [1, 2, 0, 3],
        [1, 2, 3, 0],
        [1, 3, 0, 2],
        [1, 3, 2, 0],
        [2, 0, 1, 3],
        [2, 0, 3, 1],
        [2, 1, 0, 3],
        [2, 1, 3, 0],
        [2, 3, 0, 1],
        [2, 3, 1, 0],
        [3, 0, 1, 2],
        [3, 0, 2, 1],
        [3, 1, 0, 2],
        [3, 1, 2, 0],
        [3, 2, 0, 1],
        [3, 2, 1, 0],
    ];
    let idx = |i: [usize; 4]| ((i[0] * k + i[1]) * k + i[2]) * k + i[3];
    let mut out = vec![0.0; t.len()];
    for a in 0..k {
        for b in 0..k {
            for c in 0..k {
                for d in 0..k {
                    let i = [a, b, c, d];
                    let sym: f64 = PERMS
                        .iter()
                        .map(|p| t[idx([i[p[0]], i[p[1]], i[p[2]], i[p[3]]])])
                        .sum::<f64>()
                        / 24.0;
                    out[idx(i)] = t[idx(i)] - sym;
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::geometry::{riemann_tensor, sectional};
    use approx::assert_abs_diff_eq;

    fn algebra_at<'f>(f: &'f crate::IntersectionForm, w: &[f64]) -> AlgebraAtPoint<'f> {
        AlgebraAtPoint::new(ConePoint::new(f, CohClass::new(w.to_vec())).unwrap())
    }

    #[test]
    fn products() {
        let f = catalog::form("P1XP1").unwrap();
        let a = algebra_at(&f, &[1.0, 1.0]);
        let h12 = a.product(&a.base().basis(0), &a.base().basis(1));
        assert_abs_diff_eq!(
            h12.as_vector(),
            CohClass::new(vec![0.5, 0.5]).as_vector(),
            epsilon = 1e-14
        );
        let w = a.base().omega().clone();
        assert_abs_diff_eq!(
            a.product(&w, &w).as_vector(),
            w.as_vector(),
            epsilon = 1e-14
        );
    }

    #[test]
    fn lor3_is_not_associative() {
        let f = catalog::form("LOR3").unwrap();
        let a = algebra_at(&f, &[1.0, 0.0, 0.0]);
        let (e1, e2, e3) = (a.base().basis(0), a.base().basis(1), a.base().basis(2));
        // e₂·e₂ = −ω and e₂·e₃ = 0, so this triple happens to associate
        let left = a.product(&a.product(&e2, &e2), &e3);
        let right = a.product(&e2, &a.product(&e2, &e3));
        assert!((&left - &right).max_abs() < 1e-12);
        let left = a.product(&a.product(&e1, &e2), &e2);
        let right = a.product(&e1, &a.product(&e2, &e2));
        assert!((&left - &right).max_abs() > 1e-6);
    }

    #[test]
    fn structure_identities_everywhere() {
        for e in catalog::CATALOG {
            let f = e.form();
            let a = AlgebraAtPoint::new(ConePoint::new(&f, e.default_omega()).unwrap());
            let r = a.structure_report();
            assert!(
                r.x_omega < 1e-10 && r.omega_omega < 1e-10 && r.commutativity == 0.0,
                "{}",
                e.name
            );
        }
    }

    #[test]
    fn curvature_sign_and_kn() {
        for e in catalog::CATALOG {
            let f = e.form();
            let p = ConePoint::new(&f, e.default_omega()).unwrap();
            let a = AlgebraAtPoint::new(p.clone());
            let ralg = a.curvature();
            assert!(ralg.symmetry_report().max() < 1e-12, "{}", e.name);
            let riem = riemann_tensor(&p);
            let prim: Vec<CohClass> = (0..p.rank())
                .map(|i| p.primitive_part(&p.basis(i)))
                .collect();
            for i in 0..p.rank() {
                for j in 0..p.rank() {
                    for k in 0..p.rank() {
                        for l in 0..p.rank() {
                            let r = ralg.eval(&prim[i], &prim[j], &prim[k], &prim[l]);
                            assert!((riem.get(i, j, k, l) + r).abs() < 1e-10, "{}", e.name);
                        }
                    }
                }
            }
            let (t, q) = a.kn_residual(&a.kn_decompose());
            assert!(t < 1e-10 && q < 1e-10, "{}: {t} {q}", e.name);
        }
    }

    #[test]
    fn kn_of_the_metric_is_a_space_form() {
        let f = catalog::form("CY3GEN").unwrap();
        let p = ConePoint::new(&f, CohClass::new(vec![1.0, 1.0])).unwrap();
        let g = p.gram().clone();
        let t = kn_product(&g, &g, p.omega().clone());
        for (i, j, k, l) in [(0, 1, 1, 0), (0, 1, 0, 1), (1, 0, 0, 0)] {
            let expected = g[(i, k)] * g[(j, l)] - g[(i, l)] * g[(j, k)];
            assert_abs_diff_eq!(t.get(i, j, k, l), expected, epsilon = 1e-14);
        }
    }

    #[test]
    fn constant_curvature() {
        let f = catalog::form("QUINTIC").unwrap();
        let fit = algebra_at(&f, &[1.0]).constant_curvature_test();
        assert_eq!(fit.residual, 0.0);
        assert!(fit.constant);

        let f = catalog::form("LOR3").unwrap();
        let a = algebra_at(&f, &[1.0, 0.0, 0.0]);
        let fit = a.constant_curvature_test_primitive();
        assert!(fit.constant, "{fit:?}");
        assert_abs_diff_eq!(fit.lambda, -0.5, epsilon = 1e-12);
        let k = sectional(a.base(), &a.base().basis(1), &a.base().basis(2)).unwrap();
        assert_abs_diff_eq!(k, fit.lambda, epsilon = 1e-12);
        // ω-planes are flat for the metric but not for R_alg
        assert!(!a.constant_curvature_test().constant);
    }

    #[test]
    fn derivation_dimensions() {
        for (name, w, dim) in [
            ("P3", vec![1.0], 0),
            ("QUINTIC", vec![1.0], 0),
            ("P1XP1", vec![1.0, 1.0], 0),
            ("LOR3", vec![1.0, 0.0, 0.0], 1),
        ] {
            let f = catalog::form(name).unwrap();
            let r = algebra_at(&f, &w).derivations();
            assert_eq!(r.derivations.len(), dim, "{name}");
            assert!(
                r.residual < 1e-10 && r.max_post_check() < 1e-8,
                "{name}: {r:?}"
            );
        }
    }

    #[test]
    fn lor3_rotation_is_a_derivation() {
        let f = catalog::form("LOR3").unwrap();
        let a = algebra_at(&f, &[1.0, 0.0, 0.0]);
        let rot = DMatrix::from_row_slice(3, 3, &[0.0, 0.0, 0.0, 0.0, 0.0, -1.0, 0.0, 1.0, 0.0]);
        let r = a.derivation_report(vec![rot.clone()]);
        assert!(r.residual < 1e-10 && r.max_post_check() < 1e-10);
        let found = &a.derivations().derivations[0];
        let aligned = (found - &rot / rot.norm())
            .norm()
            .min((found + &rot / rot.norm()).norm());
        assert!(aligned < 1e-10);
    }
}
