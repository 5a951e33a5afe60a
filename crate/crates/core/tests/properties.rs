use kahler_cone::algebra::AlgebraAtPoint;
use kahler_cone::geometry::{christoffel, riemann_tensor, sectional};
use kahler_cone::{catalog, CohClass, ConePoint, IntersectionForm};
use nalgebra::SymmetricEigen;
use proptest::prelude::*;

fn sorted_indices(m: usize, n: usize) -> Vec<Vec<i64>> {
    fn rec(start: usize, m: usize, left: usize, cur: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for i in start..=m {
            cur.push(i as i64);
            rec(i, m, left - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(1, m, n, &mut Vec::new(), &mut out);
    out
}

/// A nonzero integer form of dimension 2 or 3 and rank 1 to 3.
fn arb_form() -> impl Strategy<Value = IntersectionForm> {
    (2usize..=3, 1usize..=3)
        .prop_flat_map(|(n, m)| {
            let k = sorted_indices(m, n).len();
            (Just(n), Just(m), prop::collection::vec(-3i32..=3, k))
        })
        .prop_filter("nonzero", |(_, _, c)| c.iter().any(|&x| x != 0))
        .prop_map(|(n, m, c)| {
            let entries = sorted_indices(m, n)
                .into_iter()
                .zip(c)
                .map(|(i, v)| (i, v as f64));
            IntersectionForm::new("RANDOM", n, m, entries).unwrap()
        })
}

fn arb_class(m: usize) -> impl Strategy<Value = CohClass> {
    prop::collection::vec(-2.0f64..2.0, m).prop_map(CohClass::new)
}

/// A catalog form and a random admissible point near its default, away from
/// the walls where roundoff is amplified by the metric's condition number.
fn arb_catalog_point() -> impl Strategy<Value = (IntersectionForm, CohClass)> {
    (0..catalog::CATALOG.len())
        .prop_flat_map(|i| {
            let e = &catalog::CATALOG[i];
            let m = e.default_omega().len();
            (Just(i), prop::collection::vec(-0.3f64..0.3, m))
        })
        .prop_map(|(i, d)| {
            let e = &catalog::CATALOG[i];
            let w = e.default_omega();
            let r = w.coord_norm();
            (e.form(), w.axpy(r, &CohClass::new(d)))
        })
        .prop_filter("admissible and well conditioned", |(f, w)| {
            ConePoint::new(f, w.clone()).is_ok_and(|p| {
                let eig = SymmetricEigen::new(p.gram().clone()).eigenvalues;
                eig.min() > 1e-4 * eig.max()
            })
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn eval_is_symmetric_and_multilinear(
        f in arb_form(),
        seed in prop::collection::vec(-2.0f64..2.0, 12),
        a in -2.0f64..2.0,
    ) {
        let m = f.rank();
        let n = f.dim();
        let cls: Vec<CohClass> = (0..n + 1).map(|k| CohClass::new(seed[k * m..(k + 1) * m].to_vec())).collect();
        let args: Vec<&CohClass> = cls[..n].iter().collect();
        let base = f.eval(&args).unwrap();
        let mut rev = args.clone();
        rev.reverse();
        let scale = 1.0 + base.abs();
        prop_assert!((f.eval(&rev).unwrap() - base).abs() <= 1e-12 * scale * 50.0);

        let mixed = cls[0].axpy(a, &cls[n]);
        let mut with_mixed = args.clone();
        with_mixed[0] = &mixed;
        let mut with_last = args.clone();
        with_last[0] = &cls[n];
        let lhs = f.eval(&with_mixed).unwrap();
        let rhs = base + a * f.eval(&with_last).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-11 * (1.0 + lhs.abs() + rhs.abs()) * 50.0);
    }

    #[test]
    fn volume_is_homogeneous(f in arb_form(), w in arb_class(3), c in 0.1f64..5.0) {
        let w = CohClass::new(w.as_slice()[..f.rank()].to_vec());
        let v = f.volume(&w).unwrap();
        let vc = f.volume(&(&w * c)).unwrap();
        prop_assert!((vc - c.powi(f.dim() as i32) * v).abs() <= 1e-12 * (1.0 + vc.abs()) * 100.0);
    }

    #[test]
    fn json_round_trip(f in arb_form()) {
        let back = IntersectionForm::from_json(&f.to_json()).unwrap();
        prop_assert_eq!(&back, &f);
        prop_assert_eq!(back.to_json(), f.to_json());
    }

    #[test]
    fn dilation_is_an_isometry((f, w) in arb_catalog_point(), c in 0.2f64..5.0) {
        let p = ConePoint::new(&f, w.clone()).unwrap();
        let q = ConePoint::new(&f, &w * c).unwrap();
        let scaled = q.gram() * (c * c);
        prop_assert!((scaled - p.gram()).amax() <= 1e-10 * p.gram().amax());
        for i in 0..f.rank() {
            for j in 0..f.rank() {
                let g1 = christoffel(&p, &p.basis(i), &p.basis(j));
                let g2 = &christoffel(&q, &q.basis(i), &q.basis(j)) * c;
                prop_assert!((&g1 - &g2).max_abs() <= 1e-9 * (1.0 + g1.max_abs()));
                if i < j {
                    let k1 = sectional(&p, &p.basis(i), &p.basis(j));
                    let k2 = sectional(&q, &q.basis(i), &q.basis(j));
                    if let (Ok(k1), Ok(k2)) = (k1, k2) {
                        prop_assert!((k1 - k2).abs() <= 1e-8 * (1.0 + k1.abs()));
                    }
                }
            }
        }
    }

    #[test]
    fn product_is_commutative_and_bilinear(
        (f, w) in arb_catalog_point(),
        seed in prop::collection::vec(-2.0f64..2.0, 9),
        a in -2.0f64..2.0,
    ) {
        let m = f.rank();
        let alg = AlgebraAtPoint::new(ConePoint::new(&f, w).unwrap());
        let (x, y, z) = (
            CohClass::new(seed[..m].to_vec()),
            CohClass::new(seed[3..3 + m].to_vec()),
            CohClass::new(seed[6..6 + m].to_vec()),
        );
        let xy = alg.product(&x, &y);
        prop_assert!((&xy - &alg.product(&y, &x)).max_abs() <= 1e-12 * (1.0 + xy.max_abs()));
        let lhs = alg.product(&x.axpy(a, &z), &y);
        let rhs = xy.axpy(a, &alg.product(&z, &y));
        prop_assert!((&lhs - &rhs).max_abs() <= 1e-11 * (1.0 + lhs.max_abs()));
    }

    #[test]
    fn curvature_symmetries_at_random_points((f, w) in arb_catalog_point()) {
        let p = ConePoint::new(&f, w).unwrap();
        // terms are quadratic in g, which blows up near the boundary
        let scale = 1.0 + p.gram().amax().powi(2);
        let r = riemann_tensor(&p);
        prop_assert!(r.symmetry_report().max() <= 1e-12 * scale);
        let ralg = AlgebraAtPoint::new(p.clone()).curvature();
        prop_assert!(ralg.symmetry_report().max() <= 1e-12 * scale);
    }
}
