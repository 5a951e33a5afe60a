use serde::Serialize;

use super::connection::christoffel;
use crate::class::CohClass;
use crate::error::{Error, Result};
use crate::intersection::IntersectionForm;
use crate::lefschetz::ConePoint;

#[derive(Clone, Debug, Serialize)]
pub struct GeodesicSample {
    pub t: f64,
    pub point: CohClass,
    pub velocity: CohClass,
    /// `g(γ', γ')` at this sample.
    pub speed_sq: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct GeodesicPath {
    pub samples: Vec<GeodesicSample>,
    /// `max |g(γ', γ') − g(γ'(0), γ'(0))|` over the samples.
    pub speed_drift: f64,
}

/// `γ'' = −Γ_γ(γ', γ')`, or `LeftCone` if `γ` is inadmissible.
fn acceleration(form: &IntersectionForm, x: &CohClass, v: &CohClass, t: f64) -> Result<CohClass> {
    let p = ConePoint::new(form, x.clone()).map_err(|_| Error::LeftCone { t })?;
    Ok(-&christoffel(&p, v, v))
}

/// Integrates the geodesic equation from `start` with initial velocity `v0`
/// over `[0, t_end]` using `steps` classical RK4 steps.
pub fn integrate_geodesic(
    start: &ConePoint<'_>,
    v0: &CohClass,
    t_end: f64,
    steps: usize,
) -> Result<GeodesicPath> {
    let form = start.form();
    form.check_len(v0)?;
    if steps == 0 {
        return Err(Error::InvalidInput("steps must be at least 1".into()));
    }
    if v0.max_abs() == 0.0 {
        return Err(Error::InvalidInput(
            "initial velocity must be nonzero".into(),
        ));
    }
    if !t_end.is_finite() {
        return Err(Error::InvalidInput("non-finite integration time".into()));
    }
    let h = t_end / steps as f64;
    let mut x = start.omega().clone();
    let mut v = v0.clone();
    let speed0 = start.norm_sq(v0);
    let mut samples = Vec::with_capacity(steps + 1);
    samples.push(GeodesicSample {
        t: 0.0,
        point: x.clone(),
        velocity: v.clone(),
        speed_sq: speed0,
    });
    let mut drift: f64 = 0.0;

    for s in 0..steps {
        let t = s as f64 * h;
        let a1 = acceleration(form, &x, &v, t)?;
        let v1 = v.clone();

        let x2 = x.axpy(0.5 * h, &v1);
        let v2 = v.axpy(0.5 * h, &a1);
        let a2 = acceleration(form, &x2, &v2, t + 0.5 * h)?;

        let x3 = x.axpy(0.5 * h, &v2);
        let v3 = v.axpy(0.5 * h, &a2);
        let a3 = acceleration(form, &x3, &v3, t + 0.5 * h)?;

        let x4 = x.axpy(h, &v3);
        let v4 = v.axpy(h, &a3);
        let a4 = acceleration(form, &x4, &v4, t + h)?;

        let dx = v1 + (&v2 + &v3) * 2.0 + v4;
        let dv = a1 + (&a2 + &a3) * 2.0 + a4;
        x = x.axpy(h / 6.0, &dx);
        v = v.axpy(h / 6.0, &dv);

        let t_next = (s + 1) as f64 * h;
        let p = ConePoint::new(form, x.clone()).map_err(|_| Error::LeftCone { t: t_next })?;
        let speed_sq = p.norm_sq(&v);
        drift = drift.max((speed_sq - speed0).abs());
        samples.push(GeodesicSample {
            t: t_next,
            point: x.clone(),
            velocity: v.clone(),
            speed_sq,
        });
    }
    Ok(GeodesicPath {
        samples,
        speed_drift: drift,
    })
}
