use nalgebra::DMatrix;
use serde::{Serialize, Serializer};

/// One tolerance check: passes when `max_dev ≤ tol`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub max_dev: f64,
    pub tol: f64,
    pub pass: bool,
    /// Acceptance criterion the check belongs to.
    #[serde(skip)]
    pub criterion: u8,
}

impl Check {
    pub fn new(criterion: u8, name: impl Into<String>, max_dev: f64, tol: f64) -> Self {
        // NaN fails
        let pass = max_dev <= tol;
        Check {
            name: name.into(),
            max_dev,
            tol,
            pass,
            criterion,
        }
    }

    /// Requires `value ≥ bound`; records the shortfall `max(bound − value, 0)`
    /// against a tolerance of zero.
    pub fn at_least(criterion: u8, name: impl Into<String>, value: f64, bound: f64) -> Self {
        let shortfall = if value >= bound {
            0.0
        } else if value.is_nan() {
            f64::NAN
        } else {
            bound - value
        };
        Check::new(criterion, name, shortfall, 0.0)
    }

    /// A yes/no condition, recorded as deviation 0 or 1.
    pub fn holds(criterion: u8, name: impl Into<String>, ok: bool) -> Self {
        Check::new(criterion, name, if ok { 0.0 } else { 1.0 }, 0.0)
    }
}

/// Rows of a matrix, for JSON output.
pub fn matrix_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

pub fn serialize_matrices<S: Serializer>(ms: &[DMatrix<f64>], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(ms.iter().map(matrix_rows))
}
