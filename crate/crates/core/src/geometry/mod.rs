//! Connection, curvature, geodesics and global probes of the cone metric.

mod connection;
mod curvature;
mod geodesic;
mod paths;
mod pullback;
mod split;

pub use connection::{
    christoffel, covariant_derivative, ConstantField, PrimitiveProjectionField, TautologicalField,
    VectorField,
};
pub use curvature::{
    derived_curvatures, inner22, ricci, riemann, riemann_alt, riemann_alt_tensor, riemann_tensor,
    scalar_curvature, sectional, CurvatureTensor, DerivedCurvatures, SymmetryReport,
};
pub use geodesic::{integrate_geodesic, GeodesicPath, GeodesicSample};
pub use paths::{
    bound_check, boundary_probe, halving_schedule, path_length, segment_length, LengthBound,
    ProbeClass, ProbeReport, ProbeStep, CONV_TOL, DIVERGENCE_FACTOR, DIVERGENCE_WINDOW,
};
pub use pullback::{pullback_isometry_check, PullbackReport};
pub use split::{split, split_metric_report, unsplit, SplitMetricReport};
