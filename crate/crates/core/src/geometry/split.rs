use serde::Serialize;

use crate::class::CohClass;
use crate::error::{Error, Result};
use crate::intersection::IntersectionForm;
use crate::lefschetz::ConePoint;

/// `ω ↦ (log Vol(ω), ω / Vol(ω)^{1/n})`.
pub fn split(p: &ConePoint<'_>) -> (f64, CohClass) {
    let n = p.dim() as f64;
    (p.volume().ln(), p.omega() * p.volume().powf(-1.0 / n))
}

/// `(t, ω₁) ↦ e^{t/n} ω₁`, for `ω₁` of unit volume.
pub fn unsplit(form: &IntersectionForm, t: f64, omega1: &CohClass) -> Result<CohClass> {
    let vol = form.volume(omega1)?;
    if (vol - 1.0).abs() > 1e-10 {
        return Err(Error::Normalization(format!("Vol(ω₁) = {vol}, expected 1")));
    }
    Ok(omega1 * (t / form.dim() as f64).exp())
}

/// The metric pulled back along `(t, ω₁) ↦ e^{t/n} ω₁`, measured by finite
/// differences of the map at a point.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct SplitMetricReport {
    /// Measured `g(∂_t, ∂_t)`.
    pub dt2_coeff: f64,
    /// `1/n`, what `g(ω, ω) = n` predicts.
    pub expected_dt2: f64,
    /// Largest `|g(∂_t, ∂_p)|` over a `g`-orthonormal primitive basis `p`.
    pub max_mixed: f64,
    /// Largest deviation of the slice block from the metric at `ω₁`.
    pub max_slice_dev: f64,
}

pub fn split_metric_report(p: &ConePoint<'_>) -> Result<SplitMetricReport> {
    let form = p.form();
    let n = p.dim() as f64;
    let (t, omega1) = split(p);
    let slice_point = ConePoint::new(form, omega1.clone())?;
    let map = |t: f64, w: &CohClass| w * (t / n).exp();

    let h = 1e-4;
    let central = |f: &dyn Fn(f64) -> CohClass| -> CohClass {
        let d1 = (f(h) - f(-h)) * (0.5 / h);
        let d2 = (f(0.5 * h) - f(-0.5 * h)) * (1.0 / h);
        (d2 * 4.0 - d1) * (1.0 / 3.0)
    };
    let dt = central(&|s| map(t + s, &omega1));
    let prim = slice_point.primitive_basis();
    let dps: Vec<CohClass> = prim
        .iter()
        .map(|q| central(&|s| map(t, &omega1.axpy(s, q))))
        .collect();

    let dt2_coeff = p.norm_sq(&dt);
    let max_mixed = dps
        .iter()
        .map(|d| p.inner(&dt, d).abs())
        .fold(0.0, f64::max);
    let mut max_slice_dev: f64 = 0.0;
    for (a, da) in dps.iter().enumerate() {
        for (b, db) in dps.iter().enumerate() {
            let dev = p.inner(da, db) - slice_point.inner(&prim[a], &prim[b]);
            max_slice_dev = max_slice_dev.max(dev.abs());
        }
    }
    Ok(SplitMetricReport {
        dt2_coeff,
        expected_dt2: 1.0 / n,
        max_mixed,
        max_slice_dev,
    })
}
