use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::chain::level;
use super::green::{g0_diag, g0_squared_diag, POLE_TOLERANCE};
use super::levels::{lambda_s, remaining_levels};
use crate::error::{Error, Result};
use crate::model::TripleGraphSpec;

const SCAN_POINTS: usize = 10_000;
const POLE_OFFSET: f64 = 1e-6;
const MERGE_TOLERANCE: f64 = 1e-9;

/// Which level equation to solve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LevelMode {
    /// Finite-`J` condition `1/(J² g̃(z)) − ⟨ℓ|g₀(z)|ℓ⟩ = 0`, where `g̃` is the
    /// side-chain Green function at its first site. For S=1 this is
    /// `z/J² − ⟨ℓ|g₀|ℓ⟩`, for S=2 `z/J² − (1/z + ⟨ℓ|g₀|ℓ⟩)`.
    Exact,
    /// Large-`J` limit: `⟨ℓ|g₀(z)|ℓ⟩` for odd S, `⟨ℓ|g₀(z)|ℓ⟩ + λ_S/z` for even S.
    LargeJ,
}

fn g0_real(z: f64, spec: &TripleGraphSpec) -> Result<f64> {
    Ok(g0_diag(Complex64::new(z, 0.0), spec.attach, spec.main_len)?.re)
}

fn pole_at(z: f64) -> Error {
    Error::OnSpectrum { z: z.to_string() }
}

/// `1/g̃(z)` for an S-site side chain, as the ratio `D_S/D_{S−1}` of chain
/// characteristic polynomials, `r_k = z − J²/r_{k−1}`, `r_1 = z`. Finite on
/// the side-chain spectrum (where it vanishes); infinite at the zeros of g̃.
fn inverse_side_g(z: f64, s: usize, j: f64) -> f64 {
    let mut r = z;
    for _ in 1..s {
        r = z - j * j / r;
    }
    r
}

/// Value of the level equation at real `z`.
pub fn level_equation(z: f64, spec: &TripleGraphSpec, mode: LevelMode) -> Result<f64> {
    spec.validate()?;
    let s = spec.side_len;
    if s == 0 {
        return Err(Error::Unsupported(
            "level equations need a side chain (S >= 1)".into(),
        ));
    }
    let g = g0_real(z, spec)?;
    let j2 = spec.coupling * spec.coupling;
    match mode {
        LevelMode::LargeJ if s % 2 == 1 => Ok(g),
        LevelMode::LargeJ => {
            if z.abs() < POLE_TOLERANCE {
                return Err(pole_at(z));
            }
            Ok(g + lambda_s(s)? / z)
        }
        LevelMode::Exact if s == 1 => Ok(z / j2 - g),
        LevelMode::Exact if s == 2 => {
            if z.abs() < POLE_TOLERANCE {
                return Err(pole_at(z));
            }
            Ok(z / j2 - (1.0 / z + g))
        }
        LevelMode::Exact => {
            let inv = inverse_side_g(z, s, spec.coupling);
            if !inv.is_finite() {
                return Err(pole_at(z));
            }
            Ok(inv / j2 - g)
        }
    }
}

/// Real roots of a level equation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RootSet {
    pub mode: LevelMode,
    /// Ascending, with multiplicity (see [`find_roots`]).
    pub roots: Vec<f64>,
    /// `|equation value|` at each root.
    pub residuals: Vec<f64>,
    /// Gaps between adjacent poles where no sign change was found although the
    /// equation is monotone there and must cross zero.
    pub warnings: Vec<(f64, f64)>,
}

/// Poles of the level equation on the real axis, ascending.
fn poles(spec: &TripleGraphSpec, mode: LevelMode) -> Vec<f64> {
    let (n, l, s) = (spec.main_len, spec.attach, spec.side_len);
    let mut out: Vec<f64> = (1..=n)
        .filter(|m| (l * m) % (n + 1) != 0)
        .map(|m| level(n, m))
        .collect();
    match mode {
        LevelMode::LargeJ if s % 2 == 0 => out.push(0.0),
        LevelMode::LargeJ => {}
        LevelMode::Exact => {
            // zeros of g̃: spectrum of the side chain without its first site
            out.extend((1..s).map(|k| -2.0 * spec.coupling * (k as f64 * PI / s as f64).cos()));
        }
    }
    out.sort_by(f64::total_cmp);
    out.dedup_by(|a, b| (*a - *b).abs() < MERGE_TOLERANCE);
    out
}

/// Nonzero-weight bare levels that are also zeros of the side-chain `g̃`.
fn coincident_poles(spec: &TripleGraphSpec) -> Vec<f64> {
    let (n, l, s) = (spec.main_len, spec.attach, spec.side_len);
    let side: Vec<f64> = (1..s)
        .map(|k| -2.0 * spec.coupling * (k as f64 * PI / s as f64).cos())
        .collect();
    (1..=n)
        .filter(|m| (l * m) % (n + 1) != 0)
        .map(|m| level(n, m))
        .filter(|e| side.iter().any(|z| (z - e).abs() < MERGE_TOLERANCE))
        .collect()
}

fn bisect<F: Fn(f64) -> Result<f64>>(f: &F, mut lo: f64, mut hi: f64, mut flo: f64) -> Result<f64> {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid)?;
        if fm == 0.0 {
            return Ok(mid);
        }
        if (fm < 0.0) == (flo < 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    let (a, b) = (f(lo)?.abs(), f(hi)?.abs());
    Ok(if a <= b { lo } else { hi })
}

/// All real roots of the level equation in `(−2−2J−1, 2+2J+1)`.
///
/// The window is scanned on a uniform grid plus points `1e-6` either side of
/// every pole; each sign change not straddling a pole is refined by bisection
/// to machine precision. Between adjacent poles the equation is monotone, so
/// every such gap holds exactly one root; gaps without a sign change are
/// reported in [`RootSet::warnings`].
///
/// In large-`J` mode with odd S, roots that coincide with a remaining level
/// are listed twice: such a level belongs to both sub-chains, so the root
/// multiset then equals [`super::shifted_levels_large_j`].
pub fn find_roots(spec: &TripleGraphSpec, mode: LevelMode) -> Result<RootSet> {
    spec.validate()?;
    if spec.side_len == 0 {
        return Err(Error::Unsupported(
            "level equations need a side chain (S >= 1)".into(),
        ));
    }
    let f = |z: f64| level_equation(z, spec, mode);
    let poles = poles(spec, mode);
    let reach = 2.0 + 2.0 * spec.coupling + 1.0;
    let (lo, hi) = (-reach, reach);

    let mut points: Vec<f64> = (0..=SCAN_POINTS)
        .map(|i| lo + (hi - lo) * i as f64 / SCAN_POINTS as f64)
        .chain(
            poles
                .iter()
                .flat_map(|&p| [p - POLE_OFFSET, p + POLE_OFFSET]),
        )
        .filter(|&x| poles.iter().all(|&p| (x - p).abs() >= 0.5 * POLE_OFFSET))
        .collect();
    points.sort_by(f64::total_cmp);
    points.dedup();

    let values: Vec<f64> = points.iter().map(|&x| f(x)).collect::<Result<_>>()?;
    let poles_before = |x: f64| poles.partition_point(|&p| p < x);

    let mut roots = Vec::new();
    for i in 0..points.len() {
        if values[i] == 0.0 {
            roots.push(points[i]);
            continue;
        }
        if i + 1 == points.len() {
            break;
        }
        let (a, b) = (points[i], points[i + 1]);
        if values[i + 1] == 0.0 || poles_before(a) != poles_before(b) {
            continue;
        }
        if (values[i] < 0.0) != (values[i + 1] < 0.0) {
            roots.push(bisect(&f, a, b, values[i])?);
        }
    }

    // A bare level that is also a zero of g̃ solves 1/g₀ − J²g̃ = 0 with both
    // terms vanishing; the divided form above has a pole there instead.
    let coincident = if mode == LevelMode::Exact {
        coincident_poles(spec)
    } else {
        Vec::new()
    };
    roots.extend(coincident.iter().copied());

    let mut warnings = Vec::new();
    for w in poles.windows(2) {
        let inside = roots.iter().filter(|&&r| r > w[0] && r < w[1]).count();
        if inside == 0 {
            warnings.push((w[0], w[1]));
        }
    }

    if mode == LevelMode::LargeJ && spec.side_len % 2 == 1 {
        let remaining = remaining_levels(spec.main_len, spec.attach)?;
        let doubled: Vec<f64> = roots
            .iter()
            .copied()
            .filter(|r| remaining.iter().any(|e| (e - r).abs() < MERGE_TOLERANCE))
            .collect();
        roots.extend(doubled);
    }
    roots.sort_by(f64::total_cmp);
    let residuals = roots
        .iter()
        .map(|&r| {
            if coincident.contains(&r) {
                Ok(0.0)
            } else {
                f(r).map(f64::abs)
            }
        })
        .collect::<Result<_>>()?;
    Ok(RootSet {
        mode,
        roots,
        residuals,
        warnings,
    })
}

/// `Δ(z₀) = −z₀ / (J_eff² ⟨ℓ|g₀(z₀)²|ℓ⟩)`, the `O(1/J²)` displacement of a
/// large-`J` root `z₀` of `⟨ℓ|g₀|ℓ⟩ = 0`.
///
/// `J_eff² = J²·2/(S+1)` is the coupling of ℓ to the side chain's zero mode;
/// it equals `J²` for S=1. Odd S only.
pub fn delta_shift(z0: f64, spec: &TripleGraphSpec) -> Result<f64> {
    spec.validate()?;
    let s = spec.side_len;
    if s.is_multiple_of(2) {
        return Err(Error::Unsupported(format!(
            "level shift is defined for odd S, got S={s}"
        )));
    }
    let value = g0_real(z0, spec)?;
    if value.abs() > 1e-6 {
        return Err(Error::NotARoot { z0, value });
    }
    let j_eff_sq = spec.coupling * spec.coupling * 2.0 / (s + 1) as f64;
    let g2 = g0_squared_diag(z0, spec.attach, spec.main_len)?;
    Ok(-z0 / (j_eff_sq * g2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::symmetric_eig;
    use crate::model::build_hamiltonian;
    use crate::spectral::shifted_levels_large_j;

    fn spec(n: usize, s: usize, l: usize, j: f64) -> TripleGraphSpec {
        TripleGraphSpec::new(n, s, l, j).unwrap()
    }

    fn full_spectrum(spec: &TripleGraphSpec) -> Vec<f64> {
        symmetric_eig(&build_hamiltonian(spec).unwrap())
            .unwrap()
            .values()
            .to_vec()
    }

    fn multiset_close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn large_j_odd_brackets_every_sub_chain_level() {
        // bracketing oracle: a sign change of the equation around each prediction
        let sp = spec(11, 1, 5, 10.0);
        let predicted = shifted_levels_large_j(11, 5).unwrap();
        let mut distinct = predicted.clone();
        distinct.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
        assert_eq!(distinct.len(), 10);
        for e in distinct {
            let a = level_equation(e - 1e-4, &sp, LevelMode::LargeJ).unwrap();
            let b = level_equation(e + 1e-4, &sp, LevelMode::LargeJ).unwrap();
            assert!(a * b < 0.0, "no sign change around {e}");
        }
    }

    #[test]
    fn roots_have_small_residuals() {
        for mode in [LevelMode::Exact, LevelMode::LargeJ] {
            for s in 1..=4 {
                let rs = find_roots(&spec(11, s, 5, 10.0), mode).unwrap();
                assert!(rs.warnings.is_empty(), "{mode:?} s={s}: {:?}", rs.warnings);
                for (r, res) in rs.roots.iter().zip(&rs.residuals) {
                    assert!(*res <= 1e-10, "{mode:?} s={s} root {r} residual {res}");
                }
            }
        }
    }

    #[test]
    fn odd_large_j_roots_equal_sub_chain_levels() {
        for (n, l) in [(11, 5), (11, 6), (3, 2), (15, 4), (17, 9), (12, 7)] {
            for s in [1, 3, 5] {
                let rs = find_roots(&spec(n, s, l, 10.0), LevelMode::LargeJ).unwrap();
                let predicted = shifted_levels_large_j(n, l).unwrap();
                assert!(
                    multiset_close(&rs.roots, &predicted, 1e-9),
                    "n={n} l={l}: {:?} vs {:?}",
                    rs.roots,
                    predicted
                );
            }
        }
    }

    #[test]
    fn tiny_chain_has_double_zero_root() {
        let rs = find_roots(&spec(3, 1, 2, 10.0), LevelMode::LargeJ).unwrap();
        assert_eq!(rs.roots.len(), 2);
        assert!(rs.roots.iter().all(|r| r.abs() < 1e-12));
    }

    #[test]
    fn even_large_j_roots_differ_from_sub_chain_levels() {
        for s in [2, 4] {
            let rs = find_roots(&spec(11, s, 5, 10.0), LevelMode::LargeJ).unwrap();
            let predicted = shifted_levels_large_j(11, 5).unwrap();
            assert!(!multiset_close(&rs.roots, &predicted, 1e-6));
            assert!(rs.roots.iter().all(|r| r.abs() > 1e-6), "0 is never a root");
        }
    }

    #[test]
    fn s2_roots_interlace_with_main_chain_poles() {
        let sp = spec(11, 2, 5, 10.0);
        let rs = find_roots(&sp, LevelMode::LargeJ).unwrap();
        let chain: Vec<f64> = (1..=11).map(|m| level(11, m)).collect();
        for r in &rs.roots {
            assert!(
                chain.iter().all(|e| (e - r).abs() > 1e-6),
                "root {r} on a bare level"
            );
        }
        // one root in each gap between consecutive (merged) poles
        let p = poles(&sp, LevelMode::LargeJ);
        for w in p.windows(2) {
            assert_eq!(
                rs.roots.iter().filter(|&&r| r > w[0] && r < w[1]).count(),
                1
            );
        }
    }

    #[test]
    fn exact_roots_plus_remaining_reproduce_full_spectrum() {
        for (n, l) in [(11, 5), (11, 6), (11, 4), (9, 5), (5, 1), (7, 7)] {
            for s in 1..=4 {
                for j in [0.7, 3.0, 10.0] {
                    let sp = spec(n, s, l, j);
                    let rs = find_roots(&sp, LevelMode::Exact).unwrap();
                    let remaining = remaining_levels(n, l).unwrap();
                    assert_eq!(
                        rs.roots.len(),
                        n + s - remaining.len(),
                        "n={n} l={l} s={s} j={j}"
                    );
                    let mut merged = rs.roots.clone();
                    merged.extend(remaining);
                    merged.sort_by(f64::total_cmp);
                    let full = full_spectrum(&sp);
                    assert!(
                        multiset_close(&merged, &full, 1e-8),
                        "n={n} l={l} s={s} j={j}\n{merged:?}\n{full:?}"
                    );
                }
            }
        }
    }

    #[test]
    fn exact_roots_near_large_j_predictions() {
        let sp = spec(11, 1, 5, 10.0);
        let rs = find_roots(&sp, LevelMode::Exact).unwrap();
        let predicted = shifted_levels_large_j(11, 5).unwrap();
        for r in &rs.roots {
            let near_main = predicted.iter().any(|e| (e - r).abs() < 0.05);
            let near_pair = (r.abs() - 10.0).abs() < 0.11;
            assert!(near_main || near_pair, "root {r}");
        }
    }

    #[test]
    fn delta_shift_examples() {
        let sp = spec(11, 1, 6, 10.0);
        assert_eq!(delta_shift(0.0, &sp).unwrap(), 0.0);
        let z0 = -1.0;
        let d10 = delta_shift(z0, &sp).unwrap();
        let d20 = delta_shift(z0, &spec(11, 1, 6, 20.0)).unwrap();
        assert!((d20 - d10 / 4.0).abs() < 1e-15);
        assert!(matches!(delta_shift(0.3, &sp), Err(Error::NotARoot { .. })));
        assert!(delta_shift(-1.0, &spec(11, 2, 6, 10.0)).is_err());
    }

    #[test]
    fn delta_shift_predicts_exact_levels() {
        for s in [1, 3] {
            let sp = spec(11, s, 5, 10.0);
            let full = full_spectrum(&sp);
            let rs = find_roots(&sp, LevelMode::LargeJ).unwrap();
            for &z0 in &rs.roots {
                let d = delta_shift(z0, &sp).unwrap();
                let nearest = full
                    .iter()
                    .copied()
                    .min_by(|a, b| (a - z0).abs().total_cmp(&(b - z0).abs()))
                    .unwrap();
                assert!(
                    ((nearest - z0) - d).abs() <= 0.2 * d.abs(),
                    "s={s} z0={z0} shift {} vs {d}",
                    nearest - z0
                );
            }
        }
    }

    #[test]
    fn even_coefficient_at_large_j() {
        // The exact S=4 roots near the band approach those of
        // <l|g0|l> + c/z with c = 2/S, not c = lambda_S = S/2.
        let sp = spec(11, 4, 5, 200.0);
        let exact = find_roots(&sp, LevelMode::Exact).unwrap();
        let inner: Vec<f64> = exact
            .roots
            .iter()
            .copied()
            .filter(|r| r.abs() < 2.5 && r.abs() > 1e-9)
            .collect();
        let with = |c: f64| -> Vec<f64> {
            let f = |z: f64| g0_real(z, &sp).map(|g| g + c / z);
            let p = poles(&sp, LevelMode::LargeJ);
            p.windows(2)
                .map(|w| {
                    let (a, b) = (w[0] + 1e-7, w[1] - 1e-7);
                    bisect(&f, a, b, f(a).unwrap()).unwrap()
                })
                .collect()
        };
        let dist = |cand: &[f64]| -> f64 {
            inner
                .iter()
                .map(|r| {
                    cand.iter()
                        .map(|c| (c - r).abs())
                        .fold(f64::INFINITY, f64::min)
                })
                .fold(0.0, f64::max)
        };
        // z = 0 is a coincident pole here, absent from both large-J forms
        assert!(exact.roots.iter().any(|r| *r == level(11, 6)));
        assert_eq!(inner.len(), 10);
        assert!(dist(&with(0.5)) < 1e-3);
        assert!(dist(&with(lambda_s(4).unwrap())) > 1e-2);
    }

    #[test]
    fn inverse_side_g_matches_green_function() {
        use crate::spectral::side_chain_g_diag;
        for s in 1..=7 {
            for j in [0.5, 4.0, 10.0] {
                for z in [0.37, -1.9, 2.0 * j + 0.6] {
                    let g = side_chain_g_diag(Complex64::new(z, 0.0), s, j).unwrap().re;
                    assert!(
                        (inverse_side_g(z, s, j) * g - 1.0).abs() < 1e-10,
                        "s={s} j={j} z={z}"
                    );
                }
            }
        }
        // vanishes on the side-chain spectrum: S=3 has a zero mode
        assert_eq!(inverse_side_g(0.0, 3, 10.0), 0.0);
    }

    #[test]
    fn no_side_chain_is_rejected() {
        assert!(level_equation(0.3, &spec(5, 0, 2, 1.0), LevelMode::Exact).is_err());
        assert!(find_roots(&spec(5, 0, 2, 1.0), LevelMode::LargeJ).is_err());
    }

    #[test]
    fn mirror_symmetry() {
        for mode in [LevelMode::Exact, LevelMode::LargeJ] {
            for s in 1..=3 {
                let a = find_roots(&spec(11, s, 4, 7.0), mode).unwrap();
                let b = find_roots(&spec(11, s, 8, 7.0), mode).unwrap();
                assert!(multiset_close(&a.roots, &b.roots, 1e-10));
            }
        }
    }
}
