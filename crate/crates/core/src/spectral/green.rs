use std::f64::consts::PI;

use num_complex::Complex64;

use super::chain::level;
use crate::error::{Error, Result};

/// Distance from a pole below which a Green-function evaluation is refused.
pub const POLE_TOLERANCE: f64 = 1e-8;

fn check_site(name: &'static str, site: usize, length: usize) -> Result<()> {
    if site < 1 || site > length {
        return Err(Error::param(
            name,
            format!("site {site} out of range 1..={length}"),
        ));
    }
    Ok(())
}

/// `sin(jmπ/(n+1))` with exact zeros.
#[inline]
fn sine(n: usize, j: usize, m: usize) -> f64 {
    if (j * m).is_multiple_of(n + 1) {
        0.0
    } else {
        ((j * m) as f64 * PI / (n + 1) as f64).sin()
    }
}

fn on_spectrum(z: Complex64) -> Error {
    Error::OnSpectrum { z: z.to_string() }
}

/// `⟨j1|g₀(z)|j2⟩` for the bare N-site main chain,
/// `Σ_m (2/(N+1)) sin(j1 mπ/(N+1)) sin(j2 mπ/(N+1)) / (z − E_m)`.
///
/// Terms whose numerator vanishes are not poles and are skipped exactly.
pub fn g0_element(z: Complex64, j1: usize, j2: usize, n: usize) -> Result<Complex64> {
    check_site("j1", j1, n)?;
    check_site("j2", j2, n)?;
    let prefactor = 2.0 / (n + 1) as f64;
    let mut acc = Complex64::new(0.0, 0.0);
    for m in 1..=n {
        let numer = sine(n, j1, m) * sine(n, j2, m);
        if numer == 0.0 {
            continue;
        }
        let denom = z - level(n, m);
        if denom.norm() < POLE_TOLERANCE {
            return Err(on_spectrum(z));
        }
        acc += prefactor * numer / denom;
    }
    Ok(acc)
}

/// `⟨ℓ|g₀(z)|ℓ⟩`.
pub fn g0_diag(z: Complex64, l: usize, n: usize) -> Result<Complex64> {
    g0_element(z, l, l, n)
}

/// `⟨ℓ|g₀(z)²|ℓ⟩ = Σ_m (2/(N+1)) sin²(ℓmπ/(N+1)) / (z − E_m)²` on the real axis.
pub fn g0_squared_diag(z: f64, l: usize, n: usize) -> Result<f64> {
    check_site("l", l, n)?;
    let prefactor = 2.0 / (n + 1) as f64;
    let mut acc = 0.0;
    for m in 1..=n {
        let s = sine(n, l, m);
        if s == 0.0 {
            continue;
        }
        let d = z - level(n, m);
        if d.abs() < POLE_TOLERANCE {
            return Err(on_spectrum(Complex64::new(z, 0.0)));
        }
        acc += prefactor * s * s / (d * d);
    }
    Ok(acc)
}

/// Green function of the isolated side chain (S sites, hopping J) at its
/// first site: `Σ_n (2/(S+1)) sin²(nπ/(S+1)) / (z + 2J cos(nπ/(S+1)))`.
pub fn side_chain_g_diag(z: Complex64, s: usize, j: f64) -> Result<Complex64> {
    if s < 1 {
        return Err(Error::param("s", "side chain needs at least one site"));
    }
    let k = (s + 1) as f64;
    let mut acc = Complex64::new(0.0, 0.0);
    for n in 1..=s {
        let angle = n as f64 * PI / k;
        let denom = z + 2.0 * j * angle.cos();
        if denom.norm() < POLE_TOLERANCE {
            return Err(on_spectrum(z));
        }
        acc += (2.0 / k) * angle.sin().powi(2) / denom;
    }
    Ok(acc)
}
