use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Spectrum of an open chain of `length` sites with unit hopping:
/// `E_m = −2 cos(mπ/(length+1))`, `m = 1..=length`, strictly increasing.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainSpectrum {
    length: usize,
    levels: Vec<f64>,
}

impl ChainSpectrum {
    pub fn length(&self) -> usize {
        self.length
    }

    /// Levels indexed by `m - 1`.
    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    pub fn level(&self, m: usize) -> f64 {
        self.levels[m - 1]
    }

    /// `⟨j|ψ_m⟩`.
    pub fn amplitude(&self, j: usize, m: usize) -> f64 {
        chain_amplitude(self.length, j, m)
    }
}

pub fn chain_levels(length: usize) -> Result<ChainSpectrum> {
    if length < 1 {
        return Err(Error::param("n", "chain length must be at least 1"));
    }
    let levels = (1..=length).map(|m| level(length, m)).collect();
    Ok(ChainSpectrum { length, levels })
}

#[inline]
pub(crate) fn level(length: usize, m: usize) -> f64 {
    -2.0 * (m as f64 * PI / (length + 1) as f64).cos()
}

/// `sqrt(2/(length+1)) sin(jmπ/(length+1))`; exactly zero when
/// `(length+1) | jm`.
pub fn chain_amplitude(length: usize, j: usize, m: usize) -> f64 {
    if (j * m).is_multiple_of(length + 1) {
        return 0.0;
    }
    let k = (length + 1) as f64;
    (2.0 / k).sqrt() * ((j * m) as f64 * PI / k).sin()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::symmetric_eig;
    use crate::model::{build_hamiltonian, TripleGraphSpec};

    #[test]
    fn examples() {
        assert!(chain_levels(11).unwrap().level(6).abs() < 1e-15);
        assert!(chain_levels(1).unwrap().levels()[0].abs() < 1e-15);
        let two = chain_levels(2).unwrap();
        assert!((two.level(1) + 1.0).abs() < 1e-15);
        assert!((two.level(2) - 1.0).abs() < 1e-15);
        assert!(chain_levels(0).is_err());
    }

    #[test]
    fn levels_increase_and_vectors_normalize() {
        for n in 1..=40 {
            let c = chain_levels(n).unwrap();
            assert!(c.levels().windows(2).all(|w| w[0] < w[1]));
            for m in 1..=n {
                let norm: f64 = (1..=n).map(|j| c.amplitude(j, m).powi(2)).sum();
                assert!((norm - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn matches_numeric_diagonalization() {
        for n in 1..=64 {
            let h = build_hamiltonian(&TripleGraphSpec::new(n, 0, 1, 1.0).unwrap()).unwrap();
            let d = symmetric_eig(&h).unwrap();
            let c = chain_levels(n).unwrap();
            for (a, b) in d.values().iter().zip(c.levels()) {
                assert!((a - b).abs() < 1e-10, "n={n}");
            }
        }
    }

    #[test]
    fn amplitudes_are_eigenvectors() {
        let n = 9;
        let h = build_hamiltonian(&TripleGraphSpec::new(n, 0, 1, 1.0).unwrap()).unwrap();
        let c = chain_levels(n).unwrap();
        for m in 1..=n {
            let v: Vec<f64> = (1..=n).map(|j| c.amplitude(j, m)).collect();
            let hv = h.apply(&v);
            for (x, y) in hv.iter().zip(&v) {
                assert!((x - c.level(m) * y).abs() < 1e-12);
            }
        }
    }
}
