//! The partition lattice Π^k_m: k-tuples of nonnegative counts summing to m.
//!
//! Every dense table in the crate (payoffs, pmfs) is indexed by the rank of a
//! partition in ascending lexicographic order of `(x_1, .., x_k)`.

use std::fmt;

use crate::error::{invalid, Result};

/// A point of Π^k_m.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition {
    counts: Vec<usize>,
}

impl Partition {
    pub fn new(counts: Vec<usize>) -> Result<Self> {
        if counts.is_empty() {
            return Err(invalid("a partition needs at least one part"));
        }
        Ok(Self { counts })
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn k(&self) -> usize {
        self.counts.len()
    }

    pub fn total(&self) -> usize {
        self.counts.iter().sum()
    }

    pub fn into_counts(self) -> Vec<usize> {
        self.counts
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (j, c) in self.counts.iter().enumerate() {
            if j > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// `C(n, r)`, saturating at `usize::MAX`.
pub fn binomial(n: usize, r: usize) -> usize {
    if r > n {
        return 0;
    }
    let r = r.min(n - r);
    let mut acc: u128 = 1;
    for i in 0..r {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > usize::MAX as u128 {
            return usize::MAX;
        }
    }
    acc as usize
}

/// `|Π^k_m| = C(m + k - 1, k - 1)`.
pub fn lattice_size(m: usize, k: usize) -> usize {
    if k == 0 {
        return 0;
    }
    binomial(m + k - 1, k - 1)
}

/// All of Π^k_m in canonical (ascending lexicographic) order.
pub fn enumerate_partitions(m: usize, k: usize) -> Result<Vec<Partition>> {
    if k == 0 {
        return Err(invalid("k must be at least 1"));
    }
    let mut out = Vec::with_capacity(lattice_size(m, k));
    let mut cur = vec![0usize; k];
    fill(&mut cur, 0, m, &mut out);
    Ok(out)
}

fn fill(cur: &mut [usize], pos: usize, rem: usize, out: &mut Vec<Partition>) {
    let k = cur.len();
    if pos == k - 1 {
        cur[pos] = rem;
        out.push(Partition { counts: cur.to_vec() });
        return;
    }
    for v in 0..=rem {
        cur[pos] = v;
        fill(cur, pos + 1, rem - v, out);
    }
}

/// Ranks points of Π^k_m for every `m` up to a fixed bound.
#[derive(Clone, Debug)]
pub struct Ranker {
    k: usize,
    max_m: usize,
    // binom[a][b] = C(a, b) for a <= max_m + k, b <= k
    binom: Vec<Vec<usize>>,
}

impl Ranker {
    pub fn new(max_m: usize, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(invalid("k must be at least 1"));
        }
        let binom = (0..=max_m + k)
            .map(|a| (0..=k).map(|b| binomial(a, b)).collect())
            .collect();
        Ok(Self { k, max_m, binom })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn max_m(&self) -> usize {
        self.max_m
    }

    /// `|Π^k_m|` for `m <= max_m`.
    pub fn size(&self, m: usize) -> usize {
        self.binom[m + self.k - 1][self.k - 1]
    }

    /// Rank of `counts` within Π^k_m where `m = Σ counts <= max_m`.
    pub fn rank(&self, counts: &[usize]) -> usize {
        debug_assert_eq!(counts.len(), self.k);
        let mut rem: usize = counts.iter().sum();
        debug_assert!(rem <= self.max_m);
        let mut r = 0;
        for (j, &x) in counts.iter().enumerate().take(self.k - 1) {
            // Points whose j-th count is below x, with d parts after j.
            // Hockey stick: C(rem+d, d) - C(rem-x+d, d).
            let d = self.k - j - 1;
            r += self.binom[rem + d][d] - self.binom[rem - x + d][d];
            rem -= x;
        }
        r
    }
}

/// Advances `counts` to the next point of the same lattice in canonical
/// order. Returns `false` (leaving `counts` unspecified) past the last point.
pub fn next_partition(counts: &mut [usize]) -> bool {
    let k = counts.len();
    if k < 2 {
        return false;
    }
    // rightmost position before the last that can take one more unit
    let mut tail = counts[k - 1];
    for p in (0..k - 1).rev() {
        if tail >= 1 {
            counts[p] += 1;
            for c in counts.iter_mut().take(k - 1).skip(p + 1) {
                *c = 0;
            }
            counts[k - 1] = tail - 1;
            return true;
        }
        tail += counts[p];
    }
    false
}

/// Π^k_m with O(k) rank and O(1) unrank.
#[derive(Clone, Debug)]
pub struct PartitionLattice {
    m: usize,
    points: Vec<Partition>,
    ranker: Ranker,
}

impl PartitionLattice {
    pub fn new(m: usize, k: usize) -> Result<Self> {
        Ok(Self {
            m,
            points: enumerate_partitions(m, k)?,
            ranker: Ranker::new(m, k)?,
        })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn k(&self) -> usize {
        self.ranker.k
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Partition] {
        &self.points
    }

    pub fn unrank(&self, rank: usize) -> &Partition {
        &self.points[rank]
    }

    /// Rank of `counts`, which must be a point of this lattice.
    pub fn rank(&self, counts: &[usize]) -> usize {
        debug_assert_eq!(counts.iter().sum::<usize>(), self.m);
        self.ranker.rank(counts)
    }

    /// Checked rank, for untrusted input.
    pub fn try_rank(&self, counts: &[usize]) -> Result<usize> {
        if counts.len() != self.k() || counts.iter().sum::<usize>() != self.m {
            return Err(invalid(format!(
                "{counts:?} is not a point of the ({}, {}) partition lattice",
                self.m,
                self.k()
            )));
        }
        Ok(self.rank(counts))
    }
}
