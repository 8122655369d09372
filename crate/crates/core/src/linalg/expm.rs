use num_complex::Complex64;

use super::{ComplexMatrix, WalkState};
use crate::error::{Error, Result};
use crate::model::Hamiltonian;

const MAX_TAYLOR_ORDER: usize = 40;

/// `e^{−iHt} ψ0` by scaling and squaring a truncated Taylor series.
///
/// Shares nothing with the eigendecomposition path, so agreement between the
/// two is a real check on both.
pub fn matexp_oracle(h: &Hamiltonian, psi0: &WalkState, t: f64) -> Result<WalkState> {
    let n = h.dim();
    if psi0.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: psi0.dim(),
        });
    }
    if t == 0.0 {
        return Ok(psi0.clone());
    }
    let mut a = ComplexMatrix::scaled_real(h, Complex64::new(0.0, -t));
    let norm = a.norm_one();
    let squarings = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as u32
    } else {
        0
    };
    a.scale(0.5f64.powi(squarings as i32));

    let mut sum = ComplexMatrix::identity(n);
    let mut term = ComplexMatrix::identity(n);
    for k in 1..=MAX_TAYLOR_ORDER {
        term = term.matmul(&a);
        term.scale(1.0 / k as f64);
        sum.add_assign(&term);
        if term.norm_one() < 1e-18 {
            break;
        }
    }
    for _ in 0..squarings {
        sum = sum.matmul(&sum);
    }
    Ok(WalkState::from_raw(sum.apply(psi0.amplitudes())))
}
