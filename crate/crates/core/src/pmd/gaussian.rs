//! Gaussian measure of unit lattice cells, used to compare a PMD with the
//! discretized Gaussian of matching mean and covariance.

use crate::error::{invalid, Result};

// 8-point Gauss–Legendre rule on [-1, 1].
const GL_NODES: [f64; 8] = [
    -0.960_289_856_497_536_3,
    -0.796_666_477_413_626_7,
    -0.525_532_409_916_329_0,
    -0.183_434_642_495_649_8,
    0.183_434_642_495_649_8,
    0.525_532_409_916_329_0,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_3,
];
const GL_WEIGHTS: [f64; 8] = [
    0.101_228_536_290_376_3,
    0.222_381_034_453_374_5,
    0.313_706_645_877_887_3,
    0.362_683_783_378_362_0,
    0.362_683_783_378_362_0,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_5,
    0.101_228_536_290_376_3,
];

/// Inclusive integer box `lo[j] ..= hi[j]` per axis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntegerBox {
    pub lo: Vec<i64>,
    pub hi: Vec<i64>,
}

impl IntegerBox {
    pub fn new(lo: Vec<i64>, hi: Vec<i64>) -> Result<Self> {
        if lo.len() != hi.len() || lo.is_empty() {
            return Err(invalid("box bounds must be nonempty and of equal length"));
        }
        if lo.iter().zip(&hi).any(|(l, h)| l > h) {
            return Err(invalid("box lower bound exceeds upper bound"));
        }
        Ok(Self { lo, hi })
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    fn extents(&self) -> Vec<usize> {
        self.lo.iter().zip(&self.hi).map(|(l, h)| (h - l + 1) as usize).collect()
    }

    pub fn len(&self) -> usize {
        self.extents().iter().product()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Row-major offset of `z` (last axis fastest), if inside the box.
    pub fn offset(&self, z: &[i64]) -> Option<usize> {
        if z.len() != self.dim() {
            return None;
        }
        let mut off = 0usize;
        for ((&v, &l), &h) in z.iter().zip(&self.lo).zip(&self.hi) {
            if v < l || v > h {
                return None;
            }
            off = off * (h - l + 1) as usize + (v - l) as usize;
        }
        Some(off)
    }

    /// Lattice point at a row-major offset.
    pub fn point(&self, mut offset: usize) -> Vec<i64> {
        let ext = self.extents();
        let mut z = vec![0i64; ext.len()];
        for j in (0..ext.len()).rev() {
            z[j] = self.lo[j] + (offset % ext[j]) as i64;
            offset /= ext[j];
        }
        z
    }
}

/// Cell masses of a Gaussian over an integer box.
#[derive(Clone, Debug)]
pub struct GaussianLatticeTable {
    pub bounds: IntegerBox,
    /// Row-major over `bounds`.
    pub mass: Vec<f64>,
    /// `1 − Σ mass`: the measure falling outside the box.
    pub truncated_mass: f64,
}

impl GaussianLatticeTable {
    pub fn mass_at(&self, z: &[i64]) -> Option<f64> {
        self.bounds.offset(z).map(|o| self.mass[o])
    }
}

/// Lower-triangular Cholesky factor, or an error if `sigma` is not
/// positive definite.
fn cholesky(sigma: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    let d = sigma.len();
    let mut l = vec![vec![0.0; d]; d];
    for i in 0..d {
        for j in 0..=i {
            let s: f64 = (0..j).map(|q| l[i][q] * l[j][q]).sum();
            if i == j {
                let v = sigma[i][i] - s;
                if !(v > 0.0) {
                    return Err(invalid("covariance is not positive definite"));
                }
                l[i][i] = v.sqrt();
            } else {
                l[i][j] = (sigma[i][j] - s) / l[j][j];
            }
        }
    }
    Ok(l)
}

/// Mass of `N(mu, sigma)` on each unit cube centred at a lattice point of
/// `bounds`, by tensor 8-point Gauss–Legendre quadrature per axis.
pub fn discretized_gaussian_pmf(mu: &[f64], sigma: &[Vec<f64>], bounds: &IntegerBox) -> Result<GaussianLatticeTable> {
    let d = mu.len();
    if d == 0 || sigma.len() != d || sigma.iter().any(|r| r.len() != d) || bounds.dim() != d {
        return Err(invalid("mean, covariance and box dimensions disagree"));
    }
    for i in 0..d {
        for j in 0..i {
            if (sigma[i][j] - sigma[j][i]).abs() > 1e-12 * (1.0 + sigma[i][j].abs()) {
                return Err(invalid("covariance must be symmetric"));
            }
        }
    }
    let l = cholesky(sigma)?;
    let log_det: f64 = (0..d).map(|i| 2.0 * l[i][i].ln()).sum();
    let log_norm = -0.5 * (d as f64 * (2.0 * std::f64::consts::PI).ln() + log_det);

    let nodes_total = 8usize.pow(d as u32);
    let mut mass = Vec::with_capacity(bounds.len());
    let mut x = vec![0.0; d];
    let mut y = vec![0.0; d];
    for offset in 0..bounds.len() {
        let z = bounds.point(offset);
        let mut cell = 0.0;
        for node in 0..nodes_total {
            let mut rest = node;
            let mut w = 1.0;
            for j in (0..d).rev() {
                let q = rest % 8;
                rest /= 8;
                x[j] = z[j] as f64 + 0.5 * GL_NODES[q] - mu[j];
                w *= 0.5 * GL_WEIGHTS[q];
            }
            // forward-solve L y = x
            for i in 0..d {
                let s: f64 = (0..i).map(|q| l[i][q] * y[q]).sum();
                y[i] = (x[i] - s) / l[i][i];
            }
            let quad: f64 = y.iter().map(|v| v * v).sum();
            cell += w * (log_norm - 0.5 * quad).exp();
        }
        mass.push(cell);
    }
    let total: f64 = mass.iter().sum();
    Ok(GaussianLatticeTable {
        bounds: bounds.clone(),
        mass,
        truncated_mass: (1.0 - total).max(0.0),
    })
}
