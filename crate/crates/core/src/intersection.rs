//! The intersection ring: a symmetric `n`-linear form on `H^{1,1}(X, ℝ)`
//! encoding `(a₁, …, aₙ) ↦ ∫_X a₁ ∪ ⋯ ∪ aₙ`.
//!
//! Only sorted multi-indices are stored, so the form is symmetric by
//! construction. Evaluation contracts a dense copy of the tensor one slot at
//! a time, which is `O(mⁿ)` and fast at the sizes this crate targets
//! (`m ≤ 8`, `n ≤ 4`).
//!
//! Powers of classes follow the divided-power convention `x^[k] = x^k / k!`,
//! so the volume of `ω` is `∫ ω^[n] = ∫ ωⁿ / n!`.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::class::CohClass;
use crate::error::{Error, Result};

/// Dense tensors larger than this are refused.
const MAX_DENSE_LEN: usize = 1 << 22;

/// `k!` as a float.
pub fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

#[derive(Clone, Debug)]
pub struct IntersectionForm {
    name: String,
    dim: usize,
    rank: usize,
    /// 0-based sorted multi-index → coefficient; zero entries are not stored.
    coeffs: BTreeMap<Vec<usize>, f64>,
    labels: Option<Vec<String>>,
    /// Full symmetric tensor, row-major over `rank^dim` entries.
    dense: Vec<f64>,
}

impl PartialEq for IntersectionForm {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name
            && self.dim == other.dim
            && self.rank == other.rank
            && self.coeffs == other.coeffs
            && self.labels == other.labels
    }
}

impl IntersectionForm {
    /// Builds a form from 1-based index lists.
    ///
    /// Indices are sorted before storage. Two entries that sort to the same
    /// index are accepted if their values agree and rejected otherwise.
    pub fn new<I>(name: impl Into<String>, dim: usize, rank: usize, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<i64>, f64)>,
    {
        if dim == 0 || rank == 0 {
            return Err(Error::Malformed(format!(
                "dim and h11 must be positive (got dim={dim}, h11={rank})"
            )));
        }
        let mut coeffs: BTreeMap<Vec<usize>, f64> = BTreeMap::new();
        for (index, value) in entries {
            if index.len() != dim {
                return Err(Error::IndexLength {
                    len: index.len(),
                    index,
                    dim,
                });
            }
            if index.iter().any(|&i| i < 1 || i as usize > rank) {
                return Err(Error::IndexRange { index, rank });
            }
            if !value.is_finite() {
                return Err(Error::Malformed(format!(
                    "non-finite coefficient at {index:?}"
                )));
            }
            let mut key: Vec<usize> = index.iter().map(|&i| i as usize - 1).collect();
            key.sort_unstable();
            match coeffs.get(&key) {
                Some(&prev) if prev != value => {
                    return Err(Error::ConflictingDuplicate {
                        index: key.iter().map(|i| i + 1).collect(),
                        first: prev,
                        second: value,
                    });
                }
                _ => {
                    coeffs.insert(key, value);
                }
            }
        }
        coeffs.retain(|_, v| *v != 0.0);
        Self::from_sorted(name.into(), dim, rank, coeffs, None)
    }

    fn from_sorted(
        name: String,
        dim: usize,
        rank: usize,
        coeffs: BTreeMap<Vec<usize>, f64>,
        labels: Option<Vec<String>>,
    ) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::ZeroForm);
        }
        let len = rank
            .checked_pow(dim as u32)
            .filter(|&l| l <= MAX_DENSE_LEN)
            .ok_or_else(|| Error::InvalidInput(format!("h11^dim = {rank}^{dim} is too large")))?;
        let mut dense = vec![0.0; len];
        let mut index = vec![0usize; dim];
        let mut key = vec![0usize; dim];
        for (flat, slot) in dense.iter_mut().enumerate() {
            let mut r = flat;
            for d in (0..dim).rev() {
                index[d] = r % rank;
                r /= rank;
            }
            key.copy_from_slice(&index);
            key.sort_unstable();
            if let Some(&c) = coeffs.get(&key) {
                *slot = c;
            }
        }
        Ok(IntersectionForm {
            name,
            dim,
            rank,
            coeffs,
            labels,
            dense,
        })
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.rank {
            return Err(Error::Malformed(format!(
                "{} labels for h11 = {}",
                labels.len(),
                self.rank
            )));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Complex dimension `n`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `h^{1,1}`, the number of basis classes.
    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// Stored coefficients keyed by sorted 1-based multi-index.
    pub fn coefficients(&self) -> impl Iterator<Item = (Vec<usize>, f64)> + '_ {
        self.coeffs
            .iter()
            .map(|(k, &v)| (k.iter().map(|i| i + 1).collect(), v))
    }

    /// Coefficient at a 1-based multi-index in any order.
    pub fn coefficient(&self, index: &[usize]) -> f64 {
        let mut key: Vec<usize> = index.iter().map(|i| i - 1).collect();
        key.sort_unstable();
        self.coeffs.get(&key).copied().unwrap_or(0.0)
    }

    /// `∫ a₁ ∪ ⋯ ∪ aₙ`.
    pub fn eval(&self, args: &[&CohClass]) -> Result<f64> {
        if args.len() != self.dim {
            return Err(Error::ArgumentCount {
                expected: self.dim,
                got: args.len(),
            });
        }
        for a in args {
            self.check_len(a)?;
        }
        Ok(self.contract(args))
    }

    /// Full contraction without argument validation. `args.len()` must be `dim`.
    pub(crate) fn contract(&self, args: &[&CohClass]) -> f64 {
        debug_assert_eq!(args.len(), self.dim);
        let m = self.rank;
        let mut cur = self.dense.clone();
        for a in args.iter().rev() {
            let a = a.as_slice();
            cur = cur.chunks_exact(m).map(|row| dot(row, a)).collect();
        }
        cur[0]
    }

    /// `∫ ω^[n] = ∫ ωⁿ / n!`.
    pub fn volume(&self, omega: &CohClass) -> Result<f64> {
        self.check_len(omega)?;
        let args = vec![omega; self.dim];
        Ok(self.contract(&args) / factorial(self.dim))
    }

    /// Fails with `Dimension` unless `c` has `rank` coordinates.
    pub fn check_len(&self, c: &CohClass) -> Result<()> {
        if c.len() != self.rank {
            return Err(Error::Dimension(format!(
                "class has {} coordinates, form has h11 = {}",
                c.len(),
                self.rank
            )));
        }
        Ok(())
    }

    /// The form `c'(a₁, …, aₙ) = c(M a₁, …, M aₙ)` on `ℝ^{m'}`, where `M` has
    /// `rank` rows and `m'` columns.
    pub fn pullback(&self, map: &DMatrix<f64>, name: impl Into<String>) -> Result<Self> {
        if map.nrows() != self.rank || map.ncols() == 0 {
            return Err(Error::Dimension(format!(
                "pullback matrix is {}x{}, expected {} rows",
                map.nrows(),
                map.ncols(),
                self.rank
            )));
        }
        let m2 = map.ncols();
        let images: Vec<CohClass> = (0..m2)
            .map(|j| CohClass::from(map.column(j).into_owned()))
            .collect();
        let mut coeffs = BTreeMap::new();
        for key in sorted_indices(m2, self.dim) {
            let args: Vec<&CohClass> = key.iter().map(|&j| &images[j]).collect();
            let v = self.contract(&args);
            if v != 0.0 {
                coeffs.insert(key, v);
            }
        }
        Self::from_sorted(name.into(), self.dim, m2, coeffs, None)
    }

    /// The form with every coefficient multiplied by `factor`.
    pub fn scaled(&self, factor: f64, name: impl Into<String>) -> Result<Self> {
        let coeffs = self
            .coeffs
            .iter()
            .map(|(k, v)| (k.clone(), v * factor))
            .filter(|(_, v)| *v != 0.0)
            .collect();
        Self::from_sorted(
            name.into(),
            self.dim,
            self.rank,
            coeffs,
            self.labels.clone(),
        )
    }

    /// Parses the manifold JSON format.
    pub fn from_json(text: &str) -> Result<Self> {
        let file: ManifoldFile =
            serde_json::from_str(text).map_err(|e| Error::Malformed(e.to_string()))?;
        let entries = file
            .intersection
            .into_iter()
            .map(|e| Ok((e.index, e.value.to_f64()?)))
            .collect::<Result<Vec<_>>>()?;
        let form = Self::new(file.name, file.dim, file.h11, entries)?;
        match file.labels {
            Some(labels) => form.with_labels(labels),
            None => Ok(form),
        }
    }

    /// Serializes to the manifold JSON format with sorted indices.
    pub fn to_json(&self) -> String {
        let file = ManifoldFile {
            name: self.name.clone(),
            dim: self.dim,
            h11: self.rank,
            intersection: self
                .coefficients()
                .map(|(index, value)| Entry {
                    index: index.into_iter().map(|i| i as i64).collect(),
                    value: Value::Number(value),
                })
                .collect(),
            labels: self.labels.clone(),
        };
        serde_json::to_string_pretty(&file).expect("manifold file serializes")
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// All non-decreasing index tuples of length `len` over `0..m`.
pub(crate) fn sorted_indices(m: usize, len: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = vec![0usize; len];
    fn rec(m: usize, pos: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if pos == cur.len() {
            out.push(cur.clone());
            return;
        }
        for i in start..m {
            cur[pos] = i;
            rec(m, pos + 1, i, cur, out);
        }
    }
    rec(m, 0, 0, &mut cur, &mut out);
    out
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ManifoldFile {
    name: String,
    dim: usize,
    h11: usize,
    intersection: Vec<Entry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    labels: Option<Vec<String>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Entry {
    index: Vec<i64>,
    value: Value,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum Value {
    Number(f64),
    Text(String),
}

impl Value {
    fn to_f64(&self) -> Result<f64> {
        match self {
            Value::Number(x) => Ok(*x),
            Value::Text(s) => parse_rational(s),
        }
    }
}

/// Parses `"p/q"` or `"p"` exactly, then rounds to the nearest double.
fn parse_rational(s: &str) -> Result<f64> {
    use num::{BigInt, BigRational, ToPrimitive};
    let bad = || Error::Malformed(format!("bad rational value {s:?}"));
    let (p, q) = match s.split_once('/') {
        Some((p, q)) => (p.trim(), q.trim()),
        None => (s.trim(), "1"),
    };
    let p: BigInt = p.parse().map_err(|_| bad())?;
    let q: BigInt = q.parse().map_err(|_| bad())?;
    if q == BigInt::from(0) {
        return Err(bad());
    }
    BigRational::new(p, q)
        .to_f64()
        .filter(|x| x.is_finite())
        .ok_or_else(bad)
}
