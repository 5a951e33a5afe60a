use nalgebra::DMatrix;
use serde::Serialize;

use crate::class::CohClass;
use crate::error::{Error, Result};
use crate::intersection::IntersectionForm;
use crate::lefschetz::ConePoint;

#[derive(Clone, Copy, Debug, Serialize)]
pub struct PullbackReport {
    pub samples: usize,
    /// Largest `|Vol_X(Mω) − p Vol_Y(ω)| / (p Vol_Y(ω))`.
    pub max_volume_dev: f64,
    /// Largest entry of `Mᵀ G_X(Mω) M − G_Y(ω)`, relative to the largest entry of `G_Y(ω)`.
    pub max_gram_dev: f64,
}

impl PullbackReport {
    pub fn max_dev(&self) -> f64 {
        self.max_volume_dev.max(self.max_gram_dev)
    }
}

/// Checks that `M: H^{1,1}(Y) → H^{1,1}(X)` scales volume by `degree` and
/// pulls the metric of `X` back to the metric of `Y` at each sample point of
/// `Y`'s cone.
pub fn pullback_isometry_check(
    form_y: &IntersectionForm,
    form_x: &IntersectionForm,
    map: &DMatrix<f64>,
    degree: f64,
    samples: &[CohClass],
) -> Result<PullbackReport> {
    if form_x.dim() != form_y.dim() {
        return Err(Error::Dimension(format!(
            "source has dim {}, target has dim {}",
            form_y.dim(),
            form_x.dim()
        )));
    }
    if map.nrows() != form_x.rank() || map.ncols() != form_y.rank() {
        return Err(Error::Dimension(format!(
            "map is {}x{}, expected {}x{}",
            map.nrows(),
            map.ncols(),
            form_x.rank(),
            form_y.rank()
        )));
    }
    if !(degree > 0.0) {
        return Err(Error::InvalidInput("degree must be positive".into()));
    }
    let sv = map.clone().svd(false, false).singular_values;
    if sv.min() <= 1e-12 * sv.max() {
        return Err(Error::InvalidInput("map is not injective".into()));
    }
    let mut report = PullbackReport {
        samples: samples.len(),
        max_volume_dev: 0.0,
        max_gram_dev: 0.0,
    };
    for w in samples {
        let py = ConePoint::new(form_y, w.clone())?;
        let px = ConePoint::new(form_x, CohClass::from(map * w.as_vector()))?;
        let expected = degree * py.volume();
        report.max_volume_dev = report
            .max_volume_dev
            .max((px.volume() - expected).abs() / expected);
        let pulled = map.transpose() * px.gram() * map;
        let dev = (pulled - py.gram()).amax() / py.gram().amax();
        report.max_gram_dev = report.max_gram_dev.max(dev);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    #[test]
    fn identity_scaling_and_swap() {
        let y = catalog::form("P1XP1").unwrap();
        let samples = vec![CohClass::new(vec![1.0, 1.0]), CohClass::new(vec![0.3, 2.0])];
        let id = DMatrix::identity(2, 2);
        let r = pullback_isometry_check(&y, &y, &id, 1.0, &samples).unwrap();
        assert!(r.max_dev() < 1e-14);

        let x = y.scaled(2.0, "2P").unwrap();
        let r = pullback_isometry_check(&y, &x, &id, 2.0, &samples).unwrap();
        assert!(r.max_dev() < 1e-14);

        let swap = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        let r = pullback_isometry_check(&y, &y, &swap, 1.0, &samples).unwrap();
        assert!(r.max_dev() < 1e-14);
    }

    #[test]
    fn wrong_degree_is_reported() {
        let y = catalog::form("QUINTIC").unwrap();
        let id = DMatrix::identity(1, 1);
        let r = pullback_isometry_check(&y, &y, &id, 2.0, &[CohClass::new(vec![1.0])]).unwrap();
        assert!((r.max_volume_dev - 0.5).abs() < 1e-14);
        assert!(r.max_gram_dev < 1e-14);
    }

    #[test]
    fn rejects_singular_maps() {
        let y = catalog::form("P1XP1").unwrap();
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 1.0]);
        assert!(pullback_isometry_check(&y, &y, &m, 1.0, &[]).is_err());
    }
}
