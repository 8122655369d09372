//! The triple graph: parameters, Hamiltonian and site partition.

use std::fmt;
use std::ops::RangeInclusive;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Parameters of a triple graph.
///
/// `main_len` = N main-chain sites with unit hopping, `side_len` = S side-chain
/// sites with hopping `coupling` = J, side chain bonded (also with J) to main
/// site `attach` = ℓ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TripleGraphSpec {
    pub main_len: usize,
    pub side_len: usize,
    pub attach: usize,
    pub coupling: f64,
}

impl TripleGraphSpec {
    /// Builds and validates a spec.
    pub fn new(main_len: usize, side_len: usize, attach: usize, coupling: f64) -> Result<Self> {
        let spec = TripleGraphSpec {
            main_len,
            side_len,
            attach,
            coupling,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.main_len < 1 {
            return Err(Error::param("n", "main chain needs at least one site"));
        }
        if self.attach < 1 || self.attach > self.main_len {
            return Err(Error::param(
                "l",
                format!(
                    "attachment site {} out of range 1..={}",
                    self.attach, self.main_len
                ),
            ));
        }
        if !(self.coupling.is_finite() && self.coupling > 0.0) {
            return Err(Error::param(
                "j",
                format!(
                    "coupling must be positive and finite, got {}",
                    self.coupling
                ),
            ));
        }
        Ok(())
    }

    /// Total number of sites, N + S.
    pub fn dim(&self) -> usize {
        self.main_len + self.side_len
    }

    /// The same graph with the attachment mirrored, ℓ → N+1−ℓ.
    pub fn mirrored(&self) -> Self {
        TripleGraphSpec {
            attach: self.main_len + 1 - self.attach,
            ..*self
        }
    }

    /// The same graph without its side chain (the bare main chain).
    pub fn main_chain_only(&self) -> Self {
        TripleGraphSpec {
            side_len: 0,
            ..*self
        }
    }
}

impl fmt::Display for TripleGraphSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "N={} S={} l={} J={}",
            self.main_len, self.side_len, self.attach, self.coupling
        )
    }
}

/// Dense real-symmetric matrix, stored row-major.
///
/// Used for the walk Hamiltonian and for any other symmetric operator fed to
/// [`crate::linalg`]. Public accessors are 1-indexed ([`Hamiltonian::entry`]);
/// [`Hamiltonian::at`] is the 0-indexed storage view.
#[derive(Debug, Clone, PartialEq)]
pub struct Hamiltonian {
    dim: usize,
    data: Vec<f64>,
}

impl Hamiltonian {
    pub fn zeros(dim: usize) -> Self {
        Hamiltonian {
            dim,
            data: vec![0.0; dim * dim],
        }
    }

    /// Builds a matrix from rows. Fails if the rows are ragged or the matrix
    /// is not exactly symmetric.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.len();
        let mut h = Hamiltonian::zeros(dim);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: row.len(),
                });
            }
            h.data[i * dim..(i + 1) * dim].copy_from_slice(row);
        }
        if !h.is_symmetric() {
            return Err(Error::Unsupported("matrix is not symmetric".into()));
        }
        Ok(h)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Entry at 1-indexed sites `(a, b)`.
    pub fn entry(&self, a: usize, b: usize) -> f64 {
        assert!(
            a >= 1 && a <= self.dim && b >= 1 && b <= self.dim,
            "site out of range"
        );
        self.at(a - 1, b - 1)
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.dim + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    /// Sets the bond `(i, j)` (0-indexed) symmetrically.
    fn set_bond(&mut self, i: usize, j: usize, value: f64) {
        self.data[i * self.dim + j] = value;
        self.data[j * self.dim + i] = value;
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.dim).all(|i| (0..i).all(|j| self.at(i, j) == self.at(j, i)))
    }

    /// Nonzero upper-triangle entries as 1-indexed `(a, b, value)`, `a < b`.
    pub fn bonds(&self) -> Vec<(usize, usize, f64)> {
        let mut out = Vec::new();
        for i in 0..self.dim {
            for j in i + 1..self.dim {
                let v = self.at(i, j);
                if v != 0.0 {
                    out.push((i + 1, j + 1, v));
                }
            }
        }
        out
    }

    /// Matrix-vector product on real vectors.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        (0..self.dim)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }
}

/// Assembles the tight-binding Hamiltonian of the triple graph.
///
/// Main-chain bonds carry −1, side-chain bonds and the ℓ–(N+1) link carry −J,
/// the diagonal is zero.
pub fn build_hamiltonian(spec: &TripleGraphSpec) -> Result<Hamiltonian> {
    spec.validate()?;
    let n = spec.main_len;
    let s = spec.side_len;
    let j = spec.coupling;
    let mut h = Hamiltonian::zeros(n + s);
    for i in 0..n.saturating_sub(1) {
        h.set_bond(i, i + 1, -1.0);
    }
    for i in n..(n + s).saturating_sub(1) {
        h.set_bond(i, i + 1, -j);
    }
    if s >= 1 {
        h.set_bond(spec.attach - 1, n, -j);
    }
    Ok(h)
}

/// Left part, connection site, right part and side chain, as 1-indexed
/// inclusive site ranges. Empty parts are empty ranges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SitePartition {
    pub left: RangeInclusive<usize>,
    pub connection: usize,
    pub right: RangeInclusive<usize>,
    pub side: RangeInclusive<usize>,
}

/// Which region a site belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Region {
    Left,
    Connection,
    Right,
    Side,
}

impl SitePartition {
    pub fn region_of(&self, site: usize) -> Option<Region> {
        if self.left.contains(&site) {
            Some(Region::Left)
        } else if site == self.connection {
            Some(Region::Connection)
        } else if self.right.contains(&site) {
            Some(Region::Right)
        } else if self.side.contains(&site) {
            Some(Region::Side)
        } else {
            None
        }
    }
}

#[allow(clippy::reversed_empty_ranges)]
fn span(lo: usize, hi: usize) -> RangeInclusive<usize> {
    // normalize every empty range to the same value so partitions compare equal
    if lo > hi {
        1..=0
    } else {
        lo..=hi
    }
}

pub fn partition(spec: &TripleGraphSpec) -> Result<SitePartition> {
    spec.validate()?;
    let n = spec.main_len;
    let l = spec.attach;
    Ok(SitePartition {
        left: span(1, l - 1),
        connection: l,
        right: span(l + 1, n),
        side: span(n + 1, n + spec.side_len),
    })
}
