//! Riemannian geometry of Kähler cones from intersection forms.
//!
//! Given the intersection form of a compact Kähler manifold `X` of complex
//! dimension `n` and a class `ω` in its Kähler cone, this crate computes the
//! natural metric on the cone (the Hessian of `−log Vol`), its Levi-Civita
//! connection and curvature, geodesics, path lengths and boundary probes, and
//! the commutative product `u · v = ½ Λ(u ∪ v)` the curvature is built from.
//! Every analytic formula has an independent finite-difference check in
//! [`fd`].
//!
//! ```
//! use kahler_cone::{catalog, ConePoint, CohClass};
//!
//! let form = catalog::form("LOR3").unwrap();
//! let p = ConePoint::new(&form, CohClass::new(vec![1.0, 0.0, 0.0])).unwrap();
//! let k = kahler_cone::geometry::sectional(&p, &p.basis(1), &p.basis(2)).unwrap();
//! assert!((k + 0.5).abs() < 1e-12);
//! ```
//!
//! The narrative guide lives in `book/`; its code listings are compiled and
//! run as doctests of this crate.

pub mod algebra;
pub mod catalog;
pub mod class;
pub mod error;
pub mod fd;
pub mod geometry;
pub mod intersection;
pub mod lefschetz;
pub mod report;
pub mod suite;

pub use class::CohClass;
pub use error::{Error, Result};
pub use intersection::IntersectionForm;
pub use lefschetz::ConePoint;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/intro.md")]
    mod intro {}
    #[doc = include_str!("../../../book/src/intersection.md")]
    mod intersection {}
    #[doc = include_str!("../../../book/src/metric.md")]
    mod metric {}
    #[doc = include_str!("../../../book/src/curvature.md")]
    mod curvature {}
    #[doc = include_str!("../../../book/src/geodesics.md")]
    mod geodesics {}
    #[doc = include_str!("../../../book/src/algebra.md")]
    mod algebra {}
    #[doc = include_str!("../../../book/src/verification.md")]
    mod verification {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
