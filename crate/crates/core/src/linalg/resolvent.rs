use num_complex::Complex64;

use super::ComplexMatrix;
use crate::error::{Error, Result};
use crate::model::Hamiltonian;

/// A solved column with 2-norm above this means `z` is within ~1e-8 of an
/// eigenvalue (for symmetric H, ‖G(z)‖₂ = 1 / dist(z, spectrum)).
const ON_SPECTRUM_NORM: f64 = 1e8;

/// LU factorization of `zI − H` with partial pivoting.
struct ShiftedLu {
    lu: ComplexMatrix,
    perm: Vec<usize>,
}

impl ShiftedLu {
    fn new(h: &Hamiltonian, z: Complex64) -> Result<Self> {
        let n = h.dim();
        let mut lu = ComplexMatrix::scaled_real(h, Complex64::new(-1.0, 0.0));
        for i in 0..n {
            lu[(i, i)] += z;
        }
        let scale = lu.norm_one().max(1.0);
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let (p, best) = (k..n)
                .map(|i| (i, lu[(i, k)].norm()))
                .fold((k, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            if best <= 1e-14 * scale {
                return Err(Error::OnSpectrum { z: z.to_string() });
            }
            if p != k {
                for j in 0..n {
                    let tmp = lu[(k, j)];
                    lu[(k, j)] = lu[(p, j)];
                    lu[(p, j)] = tmp;
                }
                perm.swap(k, p);
            }
            let pivot = lu[(k, k)];
            for i in k + 1..n {
                let factor = lu[(i, k)] / pivot;
                lu[(i, k)] = factor;
                if factor == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in k + 1..n {
                    let u = lu[(k, j)];
                    lu[(i, j)] -= factor * u;
                }
            }
        }
        Ok(ShiftedLu { lu, perm })
    }

    fn solve_unit(&self, b: usize) -> Result<Vec<Complex64>> {
        let n = self.lu.dim();
        let mut x: Vec<Complex64> = self
            .perm
            .iter()
            .map(|&p| Complex64::new(if p == b { 1.0 } else { 0.0 }, 0.0))
            .collect();
        for i in 0..n {
            for k in 0..i {
                let l = self.lu[(i, k)];
                let xk = x[k];
                x[i] -= l * xk;
            }
        }
        for i in (0..n).rev() {
            for k in i + 1..n {
                let u = self.lu[(i, k)];
                let xk = x[k];
                x[i] -= u * xk;
            }
            x[i] /= self.lu[(i, i)];
        }
        let norm = x.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if !norm.is_finite() || norm > ON_SPECTRUM_NORM {
            return Err(Error::OnSpectrum { z: String::new() });
        }
        Ok(x)
    }
}

fn check_site(h: &Hamiltonian, name: &'static str, site: usize) -> Result<()> {
    if site < 1 || site > h.dim() {
        return Err(Error::param(
            name,
            format!("site {site} out of range 1..={}", h.dim()),
        ));
    }
    Ok(())
}

/// Column `b` (1-indexed) of `(z − H)^{−1}`, by linear solve.
pub fn resolvent_column(h: &Hamiltonian, z: Complex64, b: usize) -> Result<Vec<Complex64>> {
    check_site(h, "b", b)?;
    ShiftedLu::new(h, z)?
        .solve_unit(b - 1)
        .map_err(|_| Error::OnSpectrum { z: z.to_string() })
}

/// `⟨a|(z − H)^{−1}|b⟩` for 1-indexed sites.
pub fn resolvent_element(h: &Hamiltonian, z: Complex64, a: usize, b: usize) -> Result<Complex64> {
    check_site(h, "a", a)?;
    Ok(resolvent_column(h, z, b)?[a - 1])
}

/// The full resolvent matrix `(z − H)^{−1}`.
pub fn resolvent_matrix(h: &Hamiltonian, z: Complex64) -> Result<ComplexMatrix> {
    let n = h.dim();
    let lu = ShiftedLu::new(h, z)?;
    let mut g = ComplexMatrix::zeros(n);
    for b in 0..n {
        let col = lu
            .solve_unit(b)
            .map_err(|_| Error::OnSpectrum { z: z.to_string() })?;
        for (a, v) in col.into_iter().enumerate() {
            g[(a, b)] = v;
        }
    }
    Ok(g)
}
