use crate::error::{Error, Result};
use crate::model::Hamiltonian;

/// Off-diagonal Frobenius norm at which the Jacobi iteration stops, relative
/// to `max(1, ‖H‖_F)`.
pub const JACOBI_TOLERANCE: f64 = 1e-13;
pub const JACOBI_MAX_SWEEPS: usize = 100;

/// Eigenvalues (ascending) and orthonormal eigenvectors of a real-symmetric
/// matrix. Column `k` of `vectors` belongs to `values[k]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDecomposition {
    values: Vec<f64>,
    /// Row-major `dim × dim`; entry `(i, k)` is component `i` of eigenvector `k`.
    vectors: Vec<f64>,
}

impl SpectralDecomposition {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Component `i` (0-indexed site) of eigenvector `k`.
    #[inline]
    pub fn vector_component(&self, i: usize, k: usize) -> f64 {
        self.vectors[i * self.dim() + k]
    }

    pub fn vector(&self, k: usize) -> Vec<f64> {
        (0..self.dim())
            .map(|i| self.vector_component(i, k))
            .collect()
    }

    /// `max_k ‖H v_k − E_k v_k‖∞ / max(1, |E_k|)`.
    pub fn max_residual(&self, h: &Hamiltonian) -> f64 {
        (0..self.dim())
            .map(|k| {
                let v = self.vector(k);
                let hv = h.apply(&v);
                let e = self.values[k];
                let r = hv
                    .iter()
                    .zip(&v)
                    .map(|(a, b)| (a - e * b).abs())
                    .fold(0.0, f64::max);
                r / e.abs().max(1.0)
            })
            .fold(0.0, f64::max)
    }

    /// `max_{j,k} |v_j·v_k − δ_jk|`.
    pub fn orthonormality_error(&self) -> f64 {
        let n = self.dim();
        let mut worst: f64 = 0.0;
        for j in 0..n {
            for k in j..n {
                let dot: f64 = (0..n)
                    .map(|i| self.vector_component(i, j) * self.vector_component(i, k))
                    .sum();
                let target = if j == k { 1.0 } else { 0.0 };
                worst = worst.max((dot - target).abs());
            }
        }
        worst
    }
}

/// Diagonalizes a real-symmetric matrix with cyclic Jacobi rotations.
pub fn symmetric_eig(h: &Hamiltonian) -> Result<SpectralDecomposition> {
    if !h.is_symmetric() {
        return Err(Error::Unsupported(
            "symmetric_eig needs a symmetric matrix".into(),
        ));
    }
    let n = h.dim();
    let mut a: Vec<f64> = (0..n).flat_map(|i| h.row(i).to_vec()).collect();
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }

    let frob = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let target = JACOBI_TOLERANCE * frob.max(1.0);
    let off_norm = |a: &[f64]| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += a[i * n + j] * a[i * n + j];
                }
            }
        }
        s.sqrt()
    };

    let mut sweeps = 0;
    loop {
        let off = off_norm(&a);
        if off <= target {
            break;
        }
        if sweeps == JACOBI_MAX_SWEEPS {
            return Err(Error::NoConvergence {
                sweeps,
                off_norm: off,
            });
        }
        sweeps += 1;
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;

                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| a[x * n + x].total_cmp(&a[y * n + y]));
    let values: Vec<f64> = order.iter().map(|&k| a[k * n + k]).collect();
    let mut vectors = vec![0.0; n * n];
    for (new_k, &old_k) in order.iter().enumerate() {
        // fix the sign: largest-magnitude component positive
        let mut pivot = 0.0f64;
        for i in 0..n {
            let x = v[i * n + old_k];
            if x.abs() > pivot.abs() + 1e-12 {
                pivot = x;
            }
        }
        let sign = if pivot < 0.0 { -1.0 } else { 1.0 };
        for i in 0..n {
            vectors[i * n + new_k] = sign * v[i * n + old_k];
        }
    }
    Ok(SpectralDecomposition { values, vectors })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{build_hamiltonian, TripleGraphSpec};
    use proptest::prelude::*;

    #[test]
    fn single_bond() {
        let h = Hamiltonian::from_rows(&[vec![0.0, -1.0], vec![-1.0, 0.0]]).unwrap();
        let d = symmetric_eig(&h).unwrap();
        assert!((d.values()[0] + 1.0).abs() < 1e-14);
        assert!((d.values()[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn single_site() {
        let h = Hamiltonian::zeros(1);
        let d = symmetric_eig(&h).unwrap();
        assert_eq!(d.values(), &[0.0]);
        assert_eq!(d.vector(0), vec![1.0]);
    }

    #[test]
    fn empty_matrix() {
        let d = symmetric_eig(&Hamiltonian::zeros(0)).unwrap();
        assert_eq!(d.dim(), 0);
    }

    #[test]
    fn bare_chain_of_eleven() {
        let h = build_hamiltonian(&TripleGraphSpec::new(11, 0, 1, 1.0).unwrap()).unwrap();
        let d = symmetric_eig(&h).unwrap();
        for (k, e) in d.values().iter().enumerate() {
            let m = (k + 1) as f64;
            let expected = -2.0 * (m * std::f64::consts::PI / 12.0).cos();
            assert!((e - expected).abs() < 1e-10, "{e} vs {expected}");
        }
    }

    #[test]
    fn rejects_asymmetric() {
        // from_rows refuses asymmetric input, so no path reaches the solver
        assert!(Hamiltonian::from_rows(&[vec![0.0, 1.0], vec![2.0, 0.0]]).is_err());
    }

    #[test]
    fn degenerate_spectrum() {
        // N=3, l=2, S=1 has a doubly degenerate zero level
        let h = build_hamiltonian(&TripleGraphSpec::new(3, 1, 2, 10.0).unwrap()).unwrap();
        let d = symmetric_eig(&h).unwrap();
        assert!(d.max_residual(&h) < 1e-10);
        assert!(d.orthonormality_error() < 1e-10);
        let zeros = d.values().iter().filter(|e| e.abs() < 1e-9).count();
        assert_eq!(zeros, 2);
    }

    fn arb_symmetric() -> impl Strategy<Value = Hamiltonian> {
        (1usize..14).prop_flat_map(|n| {
            proptest::collection::vec(-5.0f64..5.0, n * n).prop_map(move |raw| {
                let mut rows = vec![vec![0.0; n]; n];
                for i in 0..n {
                    for j in 0..=i {
                        rows[i][j] = raw[i * n + j];
                        rows[j][i] = raw[i * n + j];
                    }
                }
                Hamiltonian::from_rows(&rows).unwrap()
            })
        })
    }

    proptest! {
        #[test]
        fn decomposition_invariants(h in arb_symmetric()) {
            let d = symmetric_eig(&h).unwrap();
            prop_assert!(d.max_residual(&h) <= 1e-10);
            prop_assert!(d.orthonormality_error() <= 1e-10);
            prop_assert!(d.values().windows(2).all(|w| w[0] <= w[1]));
            let trace: f64 = (0..h.dim()).map(|i| h.at(i, i)).sum();
            let sum: f64 = d.values().iter().sum();
            prop_assert!((trace - sum).abs() < 1e-9);
        }
    }
}
