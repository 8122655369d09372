//! Grid sweeps over (N, ℓ, S, J) and the parity / gcd phase table.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::dynamics::{
    detect_switching, initial_side, propagate_trace_with, SwitchingVerdict, DEFAULT_DT,
    DEFAULT_HORIZON, DEFAULT_START, DEFAULT_THRESHOLD,
};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::model::TripleGraphSpec;
use crate::spectral::gcd;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Odd,
    Even,
}

impl Parity {
    pub fn of(s: usize) -> Parity {
        if s % 2 == 1 {
            Parity::Odd
        } else {
            Parity::Even
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Parity::Odd => "odd",
            Parity::Even => "even",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GcdPredicate {
    pub gcd_value: usize,
    /// `gcd(N+1, ℓ) > 2`: some non-zero bare level survives, so crossing is
    /// expected even for odd S.
    pub predicate_gt2: bool,
    /// `gcd(N+1, ℓ) > 1`: some bare level (possibly only E = 0) survives.
    pub predicate_gt1: bool,
}

pub fn gcd_predicate(n: usize, l: usize) -> Result<GcdPredicate> {
    if l < 1 || l > n {
        return Err(Error::param(
            "l",
            format!("attachment site {l} out of range 1..={n}"),
        ));
    }
    let g = gcd(n + 1, l);
    Ok(GcdPredicate {
        gcd_value: g,
        predicate_gt2: g > 2,
        predicate_gt1: g > 1,
    })
}

/// Whether the parity/gcd law predicts switching: odd S and `gcd(N+1, ℓ) ≤ 2`.
pub fn law_predicts_switching(s: usize, predicate: &GcdPredicate) -> bool {
    s % 2 == 1 && !predicate.predicate_gt2
}

/// Parameter grid plus the dynamics settings shared by every point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepGrid {
    pub n: Vec<usize>,
    pub l: Vec<usize>,
    pub s: Vec<usize>,
    pub j: Vec<f64>,
    pub start: usize,
    pub horizon: f64,
    pub dt: f64,
    pub threshold: f64,
}

impl SweepGrid {
    /// A grid with the default dynamics settings. Every combination of the
    /// given values must be a valid spec.
    pub fn new(n: Vec<usize>, l: Vec<usize>, s: Vec<usize>, j: Vec<f64>) -> Result<Self> {
        let grid = SweepGrid {
            n,
            l,
            s,
            j,
            start: DEFAULT_START,
            horizon: DEFAULT_HORIZON,
            dt: DEFAULT_DT,
            threshold: DEFAULT_THRESHOLD,
        };
        grid.validate()?;
        Ok(grid)
    }

    pub fn with_dynamics(
        mut self,
        start: usize,
        horizon: f64,
        dt: f64,
        threshold: f64,
    ) -> Result<Self> {
        self.start = start;
        self.horizon = horizon;
        self.dt = dt;
        self.threshold = threshold;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, empty) in [
            ("n", self.n.is_empty()),
            ("l", self.l.is_empty()),
            ("s", self.s.is_empty()),
            ("j", self.j.is_empty()),
        ] {
            if empty {
                return Err(Error::param(name, "empty range"));
            }
        }
        crate::dynamics::sample_times(self.horizon, self.dt)?;
        if !(self.threshold.is_finite() && self.threshold > 0.0) {
            return Err(Error::param("threshold", "must be positive"));
        }
        if self.start < 1 {
            return Err(Error::param("start", "sites are numbered from 1"));
        }
        for spec in self.points() {
            spec.validate()?;
        }
        Ok(())
    }

    /// Grid points in sweep order: N outermost, then ℓ, S, J.
    pub fn points(&self) -> Vec<TripleGraphSpec> {
        let mut out = Vec::with_capacity(self.n.len() * self.l.len() * self.s.len() * self.j.len());
        for &n in &self.n {
            for &l in &self.l {
                for &s in &self.s {
                    for &j in &self.j {
                        out.push(TripleGraphSpec {
                            main_len: n,
                            side_len: s,
                            attach: l,
                            coupling: j,
                        });
                    }
                }
            }
        }
        out
    }

    pub fn len(&self) -> usize {
        self.n.len() * self.l.len() * self.s.len() * self.j.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// One evaluated grid point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub spec: TripleGraphSpec,
    pub start: usize,
    pub gcd_value: usize,
    pub predicate_gt2: bool,
    pub predicate_gt1: bool,
    pub parity: Parity,
    pub verdict: Option<SwitchingVerdict>,
    /// Set when the point could not be evaluated; `verdict` is then `None`.
    pub error: Option<String>,
    /// Whether the verdict matches [`law_predicts_switching`].
    pub agreement: Option<bool>,
}

impl SweepRecord {
    pub fn law_prediction(&self) -> bool {
        self.parity == Parity::Odd && !self.predicate_gt2
    }

    /// True on the `gcd(N+1, ℓ) = 2` boundary, where only the zero level
    /// survives and the law is reported rather than asserted.
    pub fn is_boundary(&self) -> bool {
        self.gcd_value == 2
    }
}

fn evaluate(spec: &TripleGraphSpec, grid: &SweepGrid) -> SweepRecord {
    let predicate = gcd_predicate(spec.main_len, spec.attach)
        .expect("grid points are validated at construction");
    let outcome = initial_side(spec, grid.start).and_then(|side| {
        let trace = propagate_trace_with(
            spec,
            grid.start,
            grid.horizon,
            grid.dt,
            Execution::Sequential,
        )?;
        detect_switching(&trace, side, grid.threshold)
    });
    let parity = Parity::of(spec.side_len);
    let (verdict, error) = match outcome {
        Ok(v) => (Some(v), None),
        Err(e) => (None, Some(e.to_string())),
    };
    let agreement =
        verdict.map(|v| v.switching == law_predicts_switching(spec.side_len, &predicate));
    SweepRecord {
        spec: *spec,
        start: grid.start,
        gcd_value: predicate.gcd_value,
        predicate_gt2: predicate.predicate_gt2,
        predicate_gt1: predicate.predicate_gt1,
        parity,
        verdict,
        error,
        agreement,
    }
}

/// Evaluates every grid point. Per-point failures are recorded, not raised.
pub fn run_sweep(grid: &SweepGrid) -> Result<Vec<SweepRecord>> {
    run_sweep_with(grid, Execution::default())
}

pub fn run_sweep_with(grid: &SweepGrid, exec: Execution) -> Result<Vec<SweepRecord>> {
    grid.validate()?;
    let points = grid.points();
    Ok(exec.map(&points, |spec| evaluate(spec, grid)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellStats {
    pub records: usize,
    pub switching: usize,
    pub agreeing: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParityCell {
    pub parity: Parity,
    pub predicate_gt2: bool,
    /// `None` when no record falls in this cell.
    pub stats: Option<CellStats>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParitySummary {
    pub cells: Vec<ParityCell>,
    pub evaluated: usize,
    pub failed: usize,
    pub agreement_rate: Option<f64>,
    /// Agreement rate with the `gcd = 2` boundary points left out.
    pub agreement_rate_off_boundary: Option<f64>,
    pub boundary: Vec<SweepRecord>,
}

/// Cross-tabulates (parity, gcd > 2) against the switching verdicts.
pub fn classify_parity_effect(records: &[SweepRecord]) -> Result<ParitySummary> {
    if records.is_empty() {
        return Err(Error::param("records", "no sweep records to classify"));
    }
    let mut table: BTreeMap<(Parity, bool), CellStats> = BTreeMap::new();
    let mut failed = 0;
    for r in records {
        let Some(v) = r.verdict else {
            failed += 1;
            continue;
        };
        let cell = table
            .entry((r.parity, r.predicate_gt2))
            .or_insert(CellStats {
                records: 0,
                switching: 0,
                agreeing: 0,
            });
        cell.records += 1;
        cell.switching += usize::from(v.switching);
        cell.agreeing += usize::from(r.agreement == Some(true));
    }
    let cells = [Parity::Odd, Parity::Even]
        .into_iter()
        .flat_map(|p| [false, true].map(|pred| (p, pred)))
        .map(|(parity, predicate_gt2)| ParityCell {
            parity,
            predicate_gt2,
            stats: table.get(&(parity, predicate_gt2)).copied(),
        })
        .collect();

    let rate = |filter: &dyn Fn(&SweepRecord) -> bool| -> Option<f64> {
        let judged: Vec<bool> = records
            .iter()
            .filter(|r| filter(r))
            .filter_map(|r| r.agreement)
            .collect();
        (!judged.is_empty())
            .then(|| judged.iter().filter(|&&a| a).count() as f64 / judged.len() as f64)
    };
    let evaluated = records.len() - failed;
    Ok(ParitySummary {
        cells,
        evaluated,
        failed,
        agreement_rate: rate(&|_| true),
        agreement_rate_off_boundary: rate(&|r| !r.is_boundary()),
        boundary: records
            .iter()
            .filter(|r| r.is_boundary())
            .cloned()
            .collect(),
    })
}
