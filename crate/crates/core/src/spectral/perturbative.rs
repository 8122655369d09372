use std::f64::consts::PI;

use num_complex::Complex64;

use super::chain::level;
use super::roots::delta_shift;
use crate::error::{Error, Result};
use crate::model::TripleGraphSpec;

/// Leading large-`J` amplitude for crossing the attachment site, from main
/// site `j2` at `t = 0` to main site `j1` on the other side of ℓ:
///
/// `Σ_{E ∈ E_r} (2/(N+1)) sin(j1 θ) sin(j2 θ) e^{−iEt} (e^{−iΔ(E)t} − 1)`,
/// `θ = arccos(−E/2)`, summed over the remaining levels. `O(1/J²)` corrections
/// are dropped, so the result is exactly zero when no level remains.
pub fn perturbative_amplitude(
    j1: usize,
    j2: usize,
    t: f64,
    spec: &TripleGraphSpec,
) -> Result<Complex64> {
    spec.validate()?;
    let (n, l) = (spec.main_len, spec.attach);
    for (name, j) in [("j1", j1), ("j2", j2)] {
        if j < 1 || j > n || j == l {
            return Err(Error::param(
                name,
                format!("site {j} must be a main-chain site other than l={l}"),
            ));
        }
    }
    if (j1 > l) == (j2 > l) {
        return Err(Error::param(
            "j1",
            format!("sites {j1} and {j2} lie on the same side of l={l}"),
        ));
    }
    if spec.side_len.is_multiple_of(2) {
        return Err(Error::Unsupported(format!(
            "crossing amplitude is defined for odd S, got S={}",
            spec.side_len
        )));
    }

    let prefactor = 2.0 / (n + 1) as f64;
    let mut acc = Complex64::new(0.0, 0.0);
    for m in (1..=n).filter(|m| (l * m) % (n + 1) == 0) {
        let e = level(n, m);
        // arccos(−E/2) = mπ/(N+1) on the bare levels
        let theta = m as f64 * PI / (n + 1) as f64;
        let delta = delta_shift(e, spec)?;
        let weight = prefactor * (j1 as f64 * theta).sin() * (j2 as f64 * theta).sin();
        let beat = Complex64::from_polar(1.0, -delta * t) - 1.0;
        acc += weight * Complex64::from_polar(1.0, -e * t) * beat;
    }
    Ok(acc)
}

/// Residue of `⟨j|G₁(z)|N+1⟩` at the detached pole near `z = J` (S=1):
/// `−½ δ_{jℓ} − (1/2J) ⟨j|H_M|ℓ⟩`, i.e. `−½` on ℓ, `+1/(2J)` on its main-chain
/// neighbours, zero elsewhere.
pub fn side_leak_residue(j: usize, spec: &TripleGraphSpec) -> Result<f64> {
    spec.validate()?;
    if spec.side_len != 1 {
        return Err(Error::Unsupported(format!(
            "leakage residue is defined for S=1, got S={}",
            spec.side_len
        )));
    }
    if j < 1 || j > spec.main_len {
        return Err(Error::param(
            "j",
            format!("site {j} out of range 1..={}", spec.main_len),
        ));
    }
    let l = spec.attach;
    Ok(if j == l {
        -0.5
    } else if j.abs_diff(l) == 1 {
        // ⟨j|H_M|ℓ⟩ = −1
        1.0 / (2.0 * spec.coupling)
    } else {
        0.0
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{evolve, symmetric_eig, WalkState};
    use crate::model::build_hamiltonian;

    fn spec(n: usize, s: usize, l: usize, j: f64) -> TripleGraphSpec {
        TripleGraphSpec::new(n, s, l, j).unwrap()
    }

    #[test]
    fn vanishes_without_remaining_levels() {
        let sp = spec(11, 1, 5, 10.0);
        for t in [0.0, 1.0, 50.0, 1000.0] {
            assert_eq!(
                perturbative_amplitude(8, 3, t, &sp).unwrap(),
                Complex64::new(0.0, 0.0)
            );
        }
    }

    #[test]
    fn zero_at_time_zero() {
        let sp = spec(11, 1, 6, 10.0);
        assert_eq!(perturbative_amplitude(8, 3, 0.0, &sp).unwrap().norm(), 0.0);
    }

    #[test]
    fn argument_checks() {
        let sp = spec(11, 1, 6, 10.0);
        assert!(perturbative_amplitude(2, 3, 1.0, &sp).is_err());
        assert!(perturbative_amplitude(8, 9, 1.0, &sp).is_err());
        assert!(perturbative_amplitude(6, 3, 1.0, &sp).is_err());
        assert!(perturbative_amplitude(12, 3, 1.0, &sp).is_err());
        assert!(perturbative_amplitude(8, 3, 1.0, &spec(11, 2, 6, 10.0)).is_err());
        // either crossing direction is accepted
        let a = perturbative_amplitude(8, 3, 5.0, &sp).unwrap();
        let b = perturbative_amplitude(3, 8, 5.0, &sp).unwrap();
        assert!((a - b).norm() < 1e-15);
    }

    fn exact_probability(sp: &TripleGraphSpec, j1: usize, j2: usize, t: f64) -> f64 {
        let d = symmetric_eig(&build_hamiltonian(sp).unwrap()).unwrap();
        let psi = WalkState::basis(sp.dim(), j2).unwrap();
        evolve(&d, &psi, t).unwrap().amplitude(j1).norm_sqr()
    }

    #[test]
    fn tracks_exact_dynamics() {
        let sp = spec(11, 1, 6, 10.0);
        let mut worst: f64 = 0.0;
        let mut peak: f64 = 0.0;
        for k in 0..=1000 {
            let t = k as f64;
            let exact = exact_probability(&sp, 8, 3, t);
            let approx = perturbative_amplitude(8, 3, t, &sp).unwrap().norm_sqr();
            worst = worst.max((exact - approx).abs());
            peak = peak.max(exact);
        }
        // the slow O(1/J²) beat is captured over its full first period
        assert!(worst < 0.02, "worst deviation {worst}");
        assert!(peak > 0.3, "peak {peak}");
    }

    #[test]
    fn leak_residue_values() {
        let sp = spec(11, 1, 5, 10.0);
        assert_eq!(side_leak_residue(5, &sp).unwrap(), -0.5);
        assert!((side_leak_residue(4, &sp).unwrap() - 0.05).abs() < 1e-15);
        assert!((side_leak_residue(6, &sp).unwrap() - 0.05).abs() < 1e-15);
        assert_eq!(side_leak_residue(1, &sp).unwrap(), 0.0);
        assert!(side_leak_residue(5, &spec(11, 2, 5, 10.0)).is_err());
        assert!(side_leak_residue(12, &sp).is_err());
    }

    #[test]
    fn leak_residue_matches_top_eigenvector() {
        // residue at the top pole = v_j v_{N+1} of the top eigenvector
        for j_coupling in [10.0, 20.0] {
            let sp = spec(11, 1, 5, j_coupling);
            let d = symmetric_eig(&build_hamiltonian(&sp).unwrap()).unwrap();
            let top = d.dim() - 1;
            for j in 1..=11 {
                let numeric = d.vector_component(j - 1, top) * d.vector_component(11, top);
                let predicted = side_leak_residue(j, &sp).unwrap();
                assert!(
                    (numeric - predicted).abs() < 1.0 / (j_coupling * j_coupling),
                    "J={j_coupling} j={j}: {numeric} vs {predicted}"
                );
            }
        }
    }
}
