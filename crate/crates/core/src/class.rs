use std::fmt;
use std::ops::{Add, AddAssign, Index, Mul, Neg, Sub};
use std::str::FromStr;

use nalgebra::DVector;

use crate::error::{Error, Result};

/// A real (1,1)-class, written in coordinates over the basis declared by its
/// intersection form.
#[derive(Clone, Debug, PartialEq)]
pub struct CohClass(DVector<f64>);

impl CohClass {
    pub fn new(coeffs: Vec<f64>) -> Self {
        CohClass(DVector::from_vec(coeffs))
    }

    pub fn zeros(rank: usize) -> Self {
        CohClass(DVector::zeros(rank))
    }

    /// The `i`-th basis class (0-based).
    pub fn basis(rank: usize, i: usize) -> Self {
        let mut v = DVector::zeros(rank);
        v[i] = 1.0;
        CohClass(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        self.0.as_slice()
    }

    pub fn as_vector(&self) -> &DVector<f64> {
        &self.0
    }

    pub fn into_vector(self) -> DVector<f64> {
        self.0
    }

    /// Euclidean norm of the coordinate vector. This is not the cone metric.
    pub fn coord_norm(&self) -> f64 {
        self.0.norm()
    }

    /// Largest absolute coordinate.
    pub fn max_abs(&self) -> f64 {
        self.0.amax()
    }

    /// `self + t * other`.
    pub fn axpy(&self, t: f64, other: &CohClass) -> CohClass {
        CohClass(&self.0 + &other.0 * t)
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|x| x.is_finite())
    }
}

impl From<Vec<f64>> for CohClass {
    fn from(v: Vec<f64>) -> Self {
        CohClass::new(v)
    }
}

impl From<DVector<f64>> for CohClass {
    fn from(v: DVector<f64>) -> Self {
        CohClass(v)
    }
}

impl Index<usize> for CohClass {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl Add for &CohClass {
    type Output = CohClass;
    fn add(self, rhs: &CohClass) -> CohClass {
        CohClass(&self.0 + &rhs.0)
    }
}

impl Add for CohClass {
    type Output = CohClass;
    fn add(self, rhs: CohClass) -> CohClass {
        CohClass(self.0 + rhs.0)
    }
}

impl AddAssign<&CohClass> for CohClass {
    fn add_assign(&mut self, rhs: &CohClass) {
        self.0 += &rhs.0;
    }
}

impl Sub for &CohClass {
    type Output = CohClass;
    fn sub(self, rhs: &CohClass) -> CohClass {
        CohClass(&self.0 - &rhs.0)
    }
}

impl Sub for CohClass {
    type Output = CohClass;
    fn sub(self, rhs: CohClass) -> CohClass {
        CohClass(self.0 - rhs.0)
    }
}

impl Neg for &CohClass {
    type Output = CohClass;
    fn neg(self) -> CohClass {
        CohClass(-&self.0)
    }
}

impl Mul<f64> for &CohClass {
    type Output = CohClass;
    fn mul(self, t: f64) -> CohClass {
        CohClass(&self.0 * t)
    }
}

impl Mul<f64> for CohClass {
    type Output = CohClass;
    fn mul(self, t: f64) -> CohClass {
        CohClass(self.0 * t)
    }
}

impl Mul<&CohClass> for f64 {
    type Output = CohClass;
    fn mul(self, c: &CohClass) -> CohClass {
        CohClass(&c.0 * self)
    }
}

/// Parses comma-separated coordinates, e.g. `"2,-1"`.
impl FromStr for CohClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let coeffs = s
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::InvalidInput(format!("bad coordinate {t:?} in {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        if coeffs.is_empty() {
            return Err(Error::InvalidInput("empty class".into()));
        }
        Ok(CohClass::new(coeffs))
    }
}

impl serde::Serialize for CohClass {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.as_slice())
    }
}

impl fmt::Display for CohClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|x| x.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}
