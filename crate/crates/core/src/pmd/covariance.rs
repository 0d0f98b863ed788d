//! Covariance of a PMD and its spectrum off the all-ones direction.

use crate::error::{invalid, Result};
use crate::game::MixedStrategy;

/// Eigen-decomposition of a small symmetric matrix.
#[derive(Clone, Debug)]
pub struct SymmetricEigen {
    /// Ascending.
    pub values: Vec<f64>,
    /// `vectors[i]` is the unit eigenvector for `values[i]`.
    pub vectors: Vec<Vec<f64>>,
}

/// Cyclic Jacobi rotations until the off-diagonal Frobenius norm drops
/// below `tol` times the matrix norm.
pub fn jacobi_eigen(matrix: &[Vec<f64>], tol: f64) -> Result<SymmetricEigen> {
    let d = matrix.len();
    if matrix.iter().any(|row| row.len() != d) {
        return Err(invalid("matrix must be square"));
    }
    for i in 0..d {
        for j in 0..i {
            if (matrix[i][j] - matrix[j][i]).abs() > 1e-12 * (1.0 + matrix[i][j].abs()) {
                return Err(invalid("matrix must be symmetric"));
            }
        }
    }
    let mut a: Vec<Vec<f64>> = matrix.to_vec();
    let mut v: Vec<Vec<f64>> = (0..d)
        .map(|i| (0..d).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    let scale = a.iter().flatten().map(|x| x * x).sum::<f64>().sqrt().max(f64::MIN_POSITIVE);

    for _sweep in 0..100 {
        let off: f64 = (0..d)
            .flat_map(|i| (0..d).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum::<f64>()
            .sqrt();
        if off <= tol * scale {
            break;
        }
        for p in 0..d {
            for q in p + 1..d {
                if a[p][q] == 0.0 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for r in 0..d {
                    let arp = a[r][p];
                    let arq = a[r][q];
                    a[r][p] = c * arp - s * arq;
                    a[r][q] = s * arp + c * arq;
                }
                for r in 0..d {
                    let apr = a[p][r];
                    let aqr = a[q][r];
                    a[p][r] = c * apr - s * aqr;
                    a[q][r] = s * apr + c * aqr;
                }
                for row in v.iter_mut() {
                    let vp = row[p];
                    let vq = row[q];
                    row[p] = c * vp - s * vq;
                    row[q] = s * vp + c * vq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&i, &j| a[i][i].total_cmp(&a[j][j]));
    Ok(SymmetricEigen {
        values: order.iter().map(|&i| a[i][i]).collect(),
        vectors: order.iter().map(|&i| v.iter().map(|row| row[i]).collect()).collect(),
    })
}

/// Covariance matrix of a PMD together with its spectrum.
#[derive(Clone, Debug)]
pub struct CovarianceSummary {
    pub sigma: Vec<Vec<f64>>,
    pub eigen: SymmetricEigen,
}

impl CovarianceSummary {
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigen.values
    }
}

/// `Σ = Σ_i (diag(p_i) − p_i p_iᵀ)`.
pub fn covariance(k: usize, crvs: &[MixedStrategy]) -> Result<CovarianceSummary> {
    if k == 0 {
        return Err(invalid("k must be at least 1"));
    }
    let mut sigma = vec![vec![0.0; k]; k];
    for crv in crvs {
        if crv.k() != k {
            return Err(invalid(format!("CRV of dimension {} in a k = {k} PMD", crv.k())));
        }
        let p = crv.probs();
        for a in 0..k {
            sigma[a][a] += p[a];
            for b in 0..k {
                sigma[a][b] -= p[a] * p[b];
            }
        }
    }
    let eigen = jacobi_eigen(&sigma, 1e-12)?;
    Ok(CovarianceSummary { sigma, eigen })
}

/// Smallest eigenvalue after discarding the one whose eigenvector is most
/// aligned with the all-ones vector.
pub fn min_orthogonal_eigenvalue(summary: &CovarianceSummary) -> Result<f64> {
    let k = summary.sigma.len();
    if k < 2 {
        return Err(invalid("need k >= 2 for an orthogonal spectrum"));
    }
    let cos_with_ones = |v: &[f64]| v.iter().sum::<f64>().abs() / (k as f64).sqrt();
    let skip = (0..k)
        .max_by(|&i, &j| cos_with_ones(&summary.eigen.vectors[i]).total_cmp(&cos_with_ones(&summary.eigen.vectors[j])))
        .expect("k >= 2");
    Ok(summary
        .eigen
        .values
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != skip)
        .map(|(_, v)| *v)
        .fold(f64::INFINITY, f64::min))
}
