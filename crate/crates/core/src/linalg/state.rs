use num_complex::Complex64;

use super::SpectralDecomposition;
use crate::error::{Error, Result};
use crate::model::Hamiltonian;

const NORM_TOLERANCE: f64 = 1e-10;

/// Normalized single-particle state, one complex amplitude per site
/// (0-indexed storage, site `a` at index `a-1`).
#[derive(Debug, Clone, PartialEq)]
pub struct WalkState {
    amplitudes: Vec<Complex64>,
}

impl WalkState {
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm_sq: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm_sq - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::param(
                "psi0",
                format!("state must be normalized, got |psi|^2 = {norm_sq}"),
            ));
        }
        Ok(WalkState { amplitudes })
    }

    /// The particle sitting on 1-indexed `site`.
    pub fn basis(dim: usize, site: usize) -> Result<Self> {
        if site < 1 || site > dim {
            return Err(Error::param(
                "start",
                format!("site {site} out of range 1..={dim}"),
            ));
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
        amplitudes[site - 1] = Complex64::new(1.0, 0.0);
        Ok(WalkState { amplitudes })
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    /// Amplitude on 1-indexed `site`.
    pub fn amplitude(&self, site: usize) -> Complex64 {
        self.amplitudes[site - 1]
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes
            .iter()
            .map(|a| a.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn max_abs_diff(&self, other: &WalkState) -> f64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub(crate) fn from_raw(amplitudes: Vec<Complex64>) -> Self {
        WalkState { amplitudes }
    }
}

/// Spectral propagator for one initial state: caches the eigenbasis
/// coefficients so many time samples cost `O(dim²)` each.
#[derive(Debug, Clone)]
pub struct Propagator<'a> {
    dec: &'a SpectralDecomposition,
    initial: WalkState,
    coefficients: Vec<Complex64>,
}

impl<'a> Propagator<'a> {
    pub fn new(dec: &'a SpectralDecomposition, psi0: &WalkState) -> Result<Self> {
        let n = dec.dim();
        if psi0.dim() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: psi0.dim(),
            });
        }
        let coefficients = (0..n)
            .map(|k| {
                (0..n)
                    .map(|i| psi0.amplitudes[i] * dec.vector_component(i, k))
                    .sum()
            })
            .collect();
        Ok(Propagator {
            dec,
            initial: psi0.clone(),
            coefficients,
        })
    }

    /// `ψ(t) = Σ_k e^{−iE_k t} (v_k·ψ0) v_k`. Returns `ψ0` itself at `t = 0`.
    pub fn at(&self, t: f64) -> WalkState {
        if t == 0.0 {
            return self.initial.clone();
        }
        let n = self.dec.dim();
        let phased: Vec<Complex64> = self
            .coefficients
            .iter()
            .zip(self.dec.values())
            .map(|(c, &e)| c * Complex64::from_polar(1.0, -e * t))
            .collect();
        let amplitudes = (0..n)
            .map(|i| {
                phased
                    .iter()
                    .enumerate()
                    .map(|(k, c)| c * self.dec.vector_component(i, k))
                    .sum()
            })
            .collect();
        WalkState::from_raw(amplitudes)
    }
}

/// Propagates `psi0` for time `t` (inverse main-chain hopping units).
pub fn evolve(dec: &SpectralDecomposition, psi0: &WalkState, t: f64) -> Result<WalkState> {
    Ok(Propagator::new(dec, psi0)?.at(t))
}

/// `⟨ψ|H|ψ⟩`.
pub fn expectation(h: &Hamiltonian, psi: &WalkState) -> Result<f64> {
    if h.dim() != psi.dim() {
        return Err(Error::DimensionMismatch {
            expected: h.dim(),
            found: psi.dim(),
        });
    }
    let n = h.dim();
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..n {
        let hi: Complex64 = (0..n).map(|j| psi.amplitudes[j] * h.at(i, j)).sum();
        acc += psi.amplitudes[i].conj() * hi;
    }
    Ok(acc.re)
}
