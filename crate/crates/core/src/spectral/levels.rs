use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::chain::level;
use crate::error::{Error, Result};
use crate::model::TripleGraphSpec;

pub fn gcd(mut a: usize, mut b: usize) -> usize {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Levels of the bare main chain whose eigenvector vanishes on ℓ, i.e. the
/// `E_m` with `(N+1) | ℓm`. These survive attaching any side chain.
///
/// Ascending. Empty iff `gcd(N+1, ℓ) = 1`.
pub fn remaining_levels(n: usize, l: usize) -> Result<Vec<f64>> {
    if l < 1 || l > n {
        return Err(Error::param(
            "l",
            format!("attachment site {l} out of range 1..={n}"),
        ));
    }
    Ok((1..=n)
        .filter(|m| (l * m).is_multiple_of(n + 1))
        .map(|m| level(n, m))
        .collect())
}

/// Large-`J` prediction for the shifted levels: the spectra of the two
/// sub-chains left (ℓ−1 sites) and right (N−ℓ sites) of the attachment,
/// merged and sorted. Has `N − 1` entries, with repeats where the sub-chains
/// share a level.
pub fn shifted_levels_large_j(n: usize, l: usize) -> Result<Vec<f64>> {
    if l < 2 || l + 1 > n {
        return Err(Error::DegeneratePartition(format!(
            "large-J sub-chain levels need both parts nonempty (2 <= l <= N-1), got l={l}, N={n}"
        )));
    }
    let mut out: Vec<f64> = (1..l)
        .map(|k| -2.0 * (k as f64 * PI / l as f64).cos())
        .chain((1..=n - l).map(|k| -2.0 * (k as f64 * PI / (n + 1 - l) as f64).cos()))
        .collect();
    out.sort_by(f64::total_cmp);
    Ok(out)
}

/// `λ_S = (1/(2(S+1))) Σ_{n=1..S} tan²(nπ/(S+1))` for even `S`.
pub fn lambda_s(s: usize) -> Result<f64> {
    if s == 0 || s % 2 == 1 {
        return Err(Error::param(
            "s",
            format!("lambda_S needs even S >= 2, got {s}"),
        ));
    }
    let k = (s + 1) as f64;
    let sum: f64 = (1..=s).map(|n| (n as f64 * PI / k).tan().powi(2)).sum();
    Ok(sum / (2.0 * k))
}

/// How the side chain reorganizes the bare main-chain spectrum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelClassification {
    /// Bare levels that stay eigenvalues of the full Hamiltonian.
    pub remaining: Vec<f64>,
    /// Large-`J` sub-chain predictions; `None` when ℓ ∈ {1, N}.
    pub shifted: Option<Vec<f64>>,
    /// Outermost levels `±2J cos(π/(S+2))` of the `S+1`-site block formed by ℓ
    /// and the side chain, present for odd `S`. Equal to `±J` at S=1.
    pub detached: Option<(f64, f64)>,
    pub gcd: usize,
}

pub fn classify_levels(spec: &TripleGraphSpec) -> Result<LevelClassification> {
    spec.validate()?;
    let (n, l, s) = (spec.main_len, spec.attach, spec.side_len);
    let detached = (s % 2 == 1).then(|| {
        let e = 2.0 * spec.coupling * (PI / (s + 2) as f64).cos();
        (e, -e)
    });
    Ok(LevelClassification {
        remaining: remaining_levels(n, l)?,
        shifted: shifted_levels_large_j(n, l).ok(),
        detached,
        gcd: gcd(n + 1, l),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::symmetric_eig;
    use crate::model::build_hamiltonian;

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() < tol)
    }

    #[test]
    fn remaining_examples() {
        assert!(remaining_levels(11, 5).unwrap().is_empty());
        let r = remaining_levels(11, 6).unwrap();
        let s3 = 3f64.sqrt();
        assert!(close(&r, &[-s3, -1.0, 0.0, 1.0, s3], 1e-12));
        assert!(remaining_levels(11, 12).is_err());
    }

    #[test]
    fn remaining_mirror_and_gcd_law() {
        for n in 1..=30 {
            for l in 1..=n {
                let a = remaining_levels(n, l).unwrap();
                let b = remaining_levels(n, n + 1 - l).unwrap();
                assert!(close(&a, &b, 1e-12));
                assert_eq!(a.is_empty(), gcd(n + 1, l) == 1, "n={n} l={l}");
                assert_eq!(a.len(), gcd(n + 1, l) - 1);
            }
        }
    }

    #[test]
    fn shifted_examples() {
        let got = shifted_levels_large_j(11, 5).unwrap();
        let mut expected: Vec<f64> = (1..=4)
            .map(|k| -2.0 * (k as f64 * PI / 5.0).cos())
            .chain((1..=6).map(|k| -2.0 * (k as f64 * PI / 7.0).cos()))
            .collect();
        expected.sort_by(f64::total_cmp);
        assert!(close(&got, &expected, 1e-15));

        let tiny = shifted_levels_large_j(3, 2).unwrap();
        assert_eq!(tiny.len(), 2);
        assert!(tiny.iter().all(|e| e.abs() < 1e-15));

        for n in 3..=20 {
            for l in 2..n {
                assert_eq!(shifted_levels_large_j(n, l).unwrap().len(), n - 1);
            }
        }
        assert!(matches!(
            shifted_levels_large_j(11, 1),
            Err(Error::DegeneratePartition(_))
        ));
        assert!(matches!(
            shifted_levels_large_j(11, 11),
            Err(Error::DegeneratePartition(_))
        ));
    }

    #[test]
    fn remaining_levels_are_doubled_in_shifted_set() {
        // a remaining level is a level of both sub-chains
        for n in 3..=25 {
            for l in 2..n {
                let shifted = shifted_levels_large_j(n, l).unwrap();
                for r in remaining_levels(n, l).unwrap() {
                    let hits = shifted.iter().filter(|e| (*e - r).abs() < 1e-9).count();
                    assert_eq!(hits, 2, "n={n} l={l} r={r}");
                }
            }
        }
    }

    #[test]
    fn lambda_values() {
        // direct summation oracle: tan²(π/3) + tan²(2π/3) = 6
        assert!((lambda_s(2).unwrap() - 1.0).abs() < 1e-12);
        assert!((lambda_s(4).unwrap() - 2.0).abs() < 1e-12);
        for s in [2, 4, 6, 8] {
            assert!((lambda_s(s).unwrap() - s as f64 / 2.0).abs() < 1e-10);
        }
        assert!(lambda_s(3).is_err());
        assert!(lambda_s(0).is_err());
    }

    #[test]
    fn remaining_levels_survive_in_full_spectrum() {
        for j in [0.5, 5.0, 10.0, 20.0] {
            for s in 1..=4 {
                let spec = TripleGraphSpec::new(11, s, 6, j).unwrap();
                let d = symmetric_eig(&build_hamiltonian(&spec).unwrap()).unwrap();
                for r in remaining_levels(11, 6).unwrap() {
                    assert!(d.values().iter().any(|e| (e - r).abs() < 1e-9));
                }
            }
        }
    }

    #[test]
    fn detached_pair() {
        for (s, j) in [(1usize, 10.0), (3, 10.0), (5, 20.0)] {
            let spec = TripleGraphSpec::new(11, s, 5, j).unwrap();
            let c = classify_levels(&spec).unwrap();
            let (hi, lo) = c.detached.unwrap();
            let d = symmetric_eig(&build_hamiltonian(&spec).unwrap()).unwrap();
            for target in [hi, lo] {
                let nearest = d
                    .values()
                    .iter()
                    .map(|e| (e - target).abs())
                    .fold(f64::INFINITY, f64::min);
                // the block is perturbed at O(1/J) by the main chain
                assert!(nearest < 2.0 / j, "s={s} target={target} nearest={nearest}");
            }
        }
        let even = classify_levels(&TripleGraphSpec::new(11, 2, 5, 10.0).unwrap()).unwrap();
        assert!(even.detached.is_none());
        assert_eq!(even.gcd, 1);
    }
}
