//! Parameter moments, maximal components and quantized moment data.

use std::ops::Add;

use crate::error::{invalid, Result};
use crate::game::MixedStrategy;

/// A moment exponent vector `m` with degree `|m|₁ >= 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MomentIndex {
    exponents: Vec<u32>,
}

impl MomentIndex {
    pub fn new(exponents: Vec<u32>) -> Result<Self> {
        if exponents.iter().all(|&e| e == 0) {
            return Err(invalid("moment index must have degree >= 1"));
        }
        Ok(Self { exponents })
    }

    pub fn exponents(&self) -> &[u32] {
        &self.exponents
    }

    pub fn degree(&self) -> u32 {
        self.exponents.iter().sum()
    }

    fn term(&self, crv: &MixedStrategy) -> f64 {
        crv.probs()
            .iter()
            .zip(&self.exponents)
            .map(|(p, &e)| p.powi(e as i32))
            .product()
    }
}

/// `M_m(X) = Σ_i Π_j p_{i,j}^{m_j}`.
pub fn parameter_moment(crvs: &[MixedStrategy], m: &MomentIndex) -> Result<f64> {
    if let Some(c) = crvs.iter().find(|c| c.k() != m.exponents.len()) {
        return Err(invalid(format!(
            "moment index has {} coordinates, CRV has {}",
            m.exponents.len(),
            c.k()
        )));
    }
    Ok(crvs.iter().map(|c| m.term(c)).sum())
}

/// Most likely outcome, smallest index on ties.
pub fn maximal_index(crv: &MixedStrategy) -> usize {
    let mut best = 0;
    for (j, &p) in crv.probs().iter().enumerate().skip(1) {
        if p > crv.prob(best) {
            best = j;
        }
    }
    best
}

/// Splits CRVs into k groups by [`maximal_index`], preserving order.
pub fn component_decomposition(k: usize, crvs: &[MixedStrategy]) -> Vec<Vec<MixedStrategy>> {
    let mut groups = vec![Vec::new(); k];
    for c in crvs {
        groups[maximal_index(c)].push(c.clone());
    }
    groups
}

/// `floor((2 + 2c) / (1 − c))`.
pub fn default_moment_degree(c: f64) -> u32 {
    ((2.0 + 2.0 * c) / (1.0 - c) + 1e-9).floor() as u32
}

/// Index set and quantization grid for data vectors.
///
/// Entries are indexed by `(t, m)` with `m_t = 0` and `1 <= |m|₁ <= degree`,
/// ordered by `t` then `m` lexicographically. The grid unit is
/// `accuracy / n`.
#[derive(Clone, Debug)]
pub struct DataSpec {
    n: usize,
    k: usize,
    accuracy: f64,
    unit: f64,
    degree: u32,
    index: Vec<(usize, MomentIndex)>,
    // index[t_start[t]..t_start[t + 1]] are the entries of component t
    t_start: Vec<usize>,
}

impl DataSpec {
    pub fn new(n: usize, k: usize, accuracy: f64, degree: u32) -> Result<Self> {
        if n == 0 || k == 0 {
            return Err(invalid("data spec needs n >= 1 and k >= 1"));
        }
        if !(accuracy > 0.0) || !accuracy.is_finite() {
            return Err(invalid(format!("accuracy must be positive, got {accuracy}")));
        }
        if degree == 0 {
            return Err(invalid("moment degree must be >= 1"));
        }
        let mut index = Vec::new();
        let mut t_start = Vec::with_capacity(k + 1);
        for t in 0..k {
            t_start.push(index.len());
            let mut cur = vec![0u32; k];
            push_indices(t, 0, degree, &mut cur, &mut |m| {
                index.push((t, MomentIndex { exponents: m.to_vec() }))
            });
        }
        t_start.push(index.len());
        Ok(Self {
            n,
            k,
            accuracy,
            unit: accuracy / n as f64,
            degree,
            index,
            t_start,
        })
    }

    /// Accuracy `n^{-c}`, degree defaulting to `floor((2+2c)/(1-c))`.
    pub fn from_exponent(n: usize, k: usize, c: f64, degree: Option<u32>) -> Result<Self> {
        if !(c > 0.0 && c < 1.0) {
            return Err(invalid(format!("exponent c must lie in (0, 1), got {c}")));
        }
        Self::new(n, k, (n as f64).powf(-c), degree.unwrap_or_else(|| default_moment_degree(c)))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn accuracy(&self) -> f64 {
        self.accuracy
    }

    pub fn unit(&self) -> f64 {
        self.unit
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.index.len()
    }

    pub fn is_empty(&self) -> bool {
        self.index.is_empty()
    }

    pub fn index(&self) -> &[(usize, MomentIndex)] {
        &self.index
    }

    /// Positions of component `t` in a data vector.
    pub fn component_range(&self, t: usize) -> std::ops::Range<usize> {
        self.t_start[t]..self.t_start[t + 1]
    }

    pub fn zero(&self) -> DataVector {
        DataVector {
            entries: vec![0; self.index.len()].into_boxed_slice(),
        }
    }
}

// Lexicographic enumeration of exponent vectors with cur[t] = 0 and
// 1 <= degree <= max_degree.
fn push_indices(t: usize, pos: usize, budget: u32, cur: &mut [u32], emit: &mut impl FnMut(&[u32])) {
    if pos == cur.len() {
        if cur.iter().any(|&e| e > 0) {
            emit(cur);
        }
        return;
    }
    if pos == t {
        cur[pos] = 0;
        push_indices(t, pos + 1, budget, cur, emit);
        return;
    }
    for v in 0..=budget {
        cur[pos] = v;
        push_indices(t, pos + 1, budget - v, cur, emit);
    }
    cur[pos] = 0;
}

/// Integer-quantized moment data; entry `e` stands for the value `e · unit`.
/// Addition is exact.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DataVector {
    entries: Box<[i64]>,
}

impl DataVector {
    pub fn from_entries(entries: Vec<i64>) -> Self {
        Self {
            entries: entries.into_boxed_slice(),
        }
    }

    pub fn entries(&self) -> &[i64] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// `self − other`, or `None` if any entry would go negative. Data of
    /// CRVs is entrywise nonnegative, so a negative difference can never be
    /// the data of a PMD.
    pub fn checked_sub(&self, other: &DataVector) -> Option<DataVector> {
        let mut out = Vec::with_capacity(self.entries.len());
        for (a, b) in self.entries.iter().zip(other.entries.iter()) {
            let d = a - b;
            if d < 0 {
                return None;
            }
            out.push(d);
        }
        Some(DataVector::from_entries(out))
    }

    /// Entrywise `self <= bound`.
    pub fn fits_under(&self, bound: &DataVector) -> bool {
        self.entries.iter().zip(bound.entries.iter()).all(|(a, b)| a <= b)
    }
}

impl Add for &DataVector {
    type Output = DataVector;

    fn add(self, rhs: &DataVector) -> DataVector {
        DataVector {
            entries: self
                .entries
                .iter()
                .zip(rhs.entries.iter())
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

/// Data of a single CRV: its moments for its own maximal component, rounded
/// half-up to the nearest multiple of the unit; zero elsewhere.
pub fn data_vector(spec: &DataSpec, crv: &MixedStrategy) -> Result<DataVector> {
    if crv.k() != spec.k {
        return Err(invalid(format!("CRV has k = {}, data spec has k = {}", crv.k(), spec.k)));
    }
    let mut entries = vec![0i64; spec.len()];
    let t = maximal_index(crv);
    for pos in spec.component_range(t) {
        let moment = spec.index[pos].1.term(crv);
        entries[pos] = (moment / spec.unit + 0.5).floor() as i64;
    }
    Ok(DataVector::from_entries(entries))
}

/// Entrywise sum; the data of a PMD is the sum of its CRVs' data.
pub fn data_vector_sum<'a>(spec: &DataSpec, parts: impl IntoIterator<Item = &'a DataVector>) -> DataVector {
    parts.into_iter().fold(spec.zero(), |acc, d| &acc + d)
}
