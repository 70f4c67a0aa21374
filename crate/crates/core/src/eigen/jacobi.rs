//! Cyclic Jacobi diagonalization, used as a brute-force oracle for the
//! transcendental eigenfrequency equations.

use crate::model::CoupledSystemMatrix;
use crate::{Error, Result};

use super::{Branch, DecompositionMethod, EigenDecomposition, EigenMode};

const MAX_SWEEPS: usize = 60;
const MAX_DIMENSION: usize = 5000;

/// Eigenpairs of a dense real symmetric matrix.
#[derive(Debug, Clone)]
pub struct SymmetricEigen {
    /// Eigenvalues in ascending order.
    pub values: Vec<f64>,
    /// `vectors[i]` is the unit eigenvector of `values[i]`.
    pub vectors: Vec<Vec<f64>>,
    pub sweeps: usize,
    /// Frobenius norm of the off-diagonal part when iteration stopped.
    pub off_norm: f64,
}

/// Diagonalize the row-major symmetric `n × n` matrix `a` by cyclic Jacobi
/// rotations.
pub fn jacobi_eigh(mut a: Vec<f64>, n: usize) -> Result<SymmetricEigen> {
    if a.len() != n * n {
        return Err(Error::Oracle(format!("expected {} entries, got {}", n * n, a.len())));
    }
    let norm = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }

    let mut sweeps = 0;
    let mut off = off_diagonal_norm(&a, n);
    while off > 0.0 {
        if sweeps == MAX_SWEEPS {
            return Err(Error::Oracle(format!(
                "Jacobi did not converge in {MAX_SWEEPS} sweeps (off-diagonal norm {off:e})"
            )));
        }
        sweeps += 1;
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                // Negligible against both diagonal entries: drop it.
                if sweeps > 3
                    && app.abs() + 1e2 * apq.abs() == app.abs()
                    && aqq.abs() + 1e2 * apq.abs() == aqq.abs()
                {
                    a[p * n + q] = 0.0;
                    a[q * n + p] = 0.0;
                    continue;
                }
                rotated = true;
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta.abs() > 1e150 {
                    0.5 / theta
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                let tau = s / (1.0 + c);

                a[p * n + p] = app - t * apq;
                a[q * n + q] = aqq + t * apq;
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;
                for r in 0..n {
                    if r == p || r == q {
                        continue;
                    }
                    let arp = a[r * n + p];
                    let arq = a[r * n + q];
                    let new_rp = arp - s * (arq + tau * arp);
                    let new_rq = arq + s * (arp - tau * arq);
                    a[r * n + p] = new_rp;
                    a[p * n + r] = new_rp;
                    a[r * n + q] = new_rq;
                    a[q * n + r] = new_rq;
                }
                for r in 0..n {
                    let vrp = v[r * n + p];
                    let vrq = v[r * n + q];
                    v[r * n + p] = vrp - s * (vrq + tau * vrp);
                    v[r * n + q] = vrq + s * (vrp - tau * vrq);
                }
            }
        }
        off = off_diagonal_norm(&a, n);
        if !rotated || off <= f64::EPSILON * 1e-3 * norm {
            break;
        }
    }
    if off > 1e-12 * norm {
        return Err(Error::Oracle(format!("off-diagonal norm {off:e} above tolerance")));
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[i * n + i].total_cmp(&a[j * n + j]));
    let values = order.iter().map(|&i| a[i * n + i]).collect();
    let vectors = order
        .iter()
        .map(|&col| (0..n).map(|row| v[row * n + col]).collect())
        .collect();
    Ok(SymmetricEigen {
        values,
        vectors,
        sweeps,
        off_norm: off,
    })
}

fn off_diagonal_norm(a: &[f64], n: usize) -> f64 {
    let mut sum = 0.0;
    for p in 0..n {
        for q in 0..n {
            if p != q {
                sum += a[p * n + q] * a[p * n + q];
            }
        }
    }
    sum.sqrt()
}

/// Full eigen-decomposition of the coupled-system matrix by dense Jacobi.
///
/// Each eigenvalue is labelled by the reservoir frequency it sits next to:
/// above the carrier it belongs to the upper branch of the mode just below
/// it, under the carrier to the lower branch of the mode just above it.
pub fn diagonalize_oracle(matrix: &CoupledSystemMatrix) -> Result<EigenDecomposition> {
    let n = matrix.dimension();
    if n > MAX_DIMENSION {
        return Err(Error::Oracle(format!("dimension {n} exceeds the oracle limit {MAX_DIMENSION}")));
    }
    let eig = jacobi_eigh(matrix.to_dense(), n)?;
    let dw = matrix.delta_omega();
    let modes = eig
        .values
        .iter()
        .zip(&eig.vectors)
        .map(|(&value, vector)| {
            let offset = value - matrix.carrier();
            let (k, branch) = if offset >= 0.0 {
                ((offset / dw).floor() as i64, Branch::Upper)
            } else {
                ((offset / dw).ceil() as i64, Branch::Lower)
            };
            EigenMode {
                k,
                branch,
                omega_tilde: value,
                alpha: offset - k as f64 * dw,
                weight: vector[0] * vector[0],
            }
        })
        .collect();
    Ok(EigenDecomposition {
        modes,
        method: DecompositionMethod::DenseOracle,
        eigenvectors: Some(eig.vectors),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{build_matrix, SystemConfig};

    #[test]
    fn two_by_two_avoided_crossing() {
        let g = 0.3;
        let eig = jacobi_eigh(vec![0.0, g, g, 0.0], 2).unwrap();
        assert!((eig.values[0] + g).abs() < 1e-16);
        assert!((eig.values[1] - g).abs() < 1e-16);
    }

    #[test]
    fn orthonormal_vectors_and_small_residual() {
        let config = SystemConfig::from_gamma(0.0035, 0.002, 61).unwrap();
        let m = build_matrix(&config).unwrap();
        let n = m.dimension();
        let dense = m.to_dense();
        let eig = jacobi_eigh(dense.clone(), n).unwrap();
        assert!(eig.off_norm <= 1e-12 * 0.2);
        for i in 0..n {
            for j in 0..n {
                let dot: f64 = eig.vectors[i].iter().zip(&eig.vectors[j]).map(|(a, b)| a * b).sum();
                let target = if i == j { 1.0 } else { 0.0 };
                assert!((dot - target).abs() < 1e-10, "({i},{j}): {dot}");
            }
            // ‖A v - λ v‖
            let v = &eig.vectors[i];
            let res: f64 = (0..n)
                .map(|r| {
                    let av: f64 = (0..n).map(|c| dense[r * n + c] * v[c]).sum();
                    (av - eig.values[i] * v[r]).powi(2)
                })
                .sum::<f64>()
                .sqrt();
            assert!(res < 1e-13, "residual {res}");
        }
        for w in eig.values.windows(2) {
            assert!(w[0] < w[1]);
        }
    }

    #[test]
    fn labels_follow_sturm_intervals() {
        let config = SystemConfig::from_gamma(0.0035, 0.002, 41).unwrap();
        let dec = diagonalize_oracle(&build_matrix(&config).unwrap()).unwrap();
        assert_eq!(dec.modes.len(), 42);
        let half = config.half_width();
        let lower: Vec<i64> = dec.modes.iter().filter(|m| m.branch == Branch::Lower).map(|m| m.k).collect();
        let upper: Vec<i64> = dec.modes.iter().filter(|m| m.branch == Branch::Upper).map(|m| m.k).collect();
        assert_eq!(lower, (-half..=0).collect::<Vec<_>>());
        assert_eq!(upper, (0..=half).collect::<Vec<_>>());
        for m in &dec.modes {
            assert!(m.alpha.abs() < config.delta_omega);
        }
    }

    #[test]
    fn rejects_ragged_input() {
        assert!(matches!(jacobi_eigh(vec![1.0; 5], 2), Err(Error::Oracle(_))));
    }
}
