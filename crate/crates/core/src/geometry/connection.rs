use crate::class::CohClass;
use crate::lefschetz::ConePoint;

/// `Γ(z, u) = −½Λ(u)z − ½Λ(z)u + ½Λ(u ∪ z)`, the Levi-Civita connection
/// applied to a constant field `u`.
///
/// Symmetric in its arguments, so the connection is torsion-free. Note
/// `Γ(z, ω) = −z`: it is the covariant derivative of the tautological field
/// `ω ↦ ω`, not `Γ` itself, that vanishes.
pub fn christoffel(p: &ConePoint<'_>, z: &CohClass, u: &CohClass) -> CohClass {
    let a = z * p.lambda(u);
    let b = u * p.lambda(z);
    (p.lambda_class(u, z) - (a + b)) * 0.5
}

/// A tangent vector field on the cone together with its directional
/// derivative in the ambient vector space.
pub trait VectorField {
    fn value_at(&self, p: &ConePoint<'_>) -> CohClass;

    /// `d_z u` at `p`. Must be linear in `dir`.
    fn jacobian_at(&self, p: &ConePoint<'_>, dir: &CohClass) -> CohClass;
}

/// `∇_z u = d_z u + Γ(z, u)`.
pub fn covariant_derivative(p: &ConePoint<'_>, u: &dyn VectorField, z: &CohClass) -> CohClass {
    let value = u.value_at(p);
    u.jacobian_at(p, z) + christoffel(p, z, &value)
}

#[derive(Clone, Debug)]
pub struct ConstantField(pub CohClass);

impl VectorField for ConstantField {
    fn value_at(&self, _: &ConePoint<'_>) -> CohClass {
        self.0.clone()
    }

    fn jacobian_at(&self, p: &ConePoint<'_>, _: &CohClass) -> CohClass {
        CohClass::zeros(p.rank())
    }
}

/// `ω ↦ ω`.
#[derive(Clone, Copy, Debug)]
pub struct TautologicalField;

impl VectorField for TautologicalField {
    fn value_at(&self, p: &ConePoint<'_>) -> CohClass {
        p.omega().clone()
    }

    fn jacobian_at(&self, _: &ConePoint<'_>, dir: &CohClass) -> CohClass {
        dir.clone()
    }
}

/// `ω ↦ u₀ − (Λ_ω(u₀)/n) ω`, the primitive part of a fixed class.
#[derive(Clone, Debug)]
pub struct PrimitiveProjectionField(pub CohClass);

impl VectorField for PrimitiveProjectionField {
    fn value_at(&self, p: &ConePoint<'_>) -> CohClass {
        p.primitive_part(&self.0)
    }

    fn jacobian_at(&self, p: &ConePoint<'_>, dir: &CohClass) -> CohClass {
        let n = p.dim() as f64;
        let u0 = &self.0;
        let lam_u = p.lambda(u0);
        // d_z Λ(u₀) = −Λ(z)Λ(u₀) + Λ^[2](u₀ ∪ z)
        let d_lam = -p.lambda(dir) * lam_u + p.lambda2(u0, dir);
        (p.omega() * (-d_lam / n)).axpy(-lam_u / n, dir)
    }
}
