//! Walker propagation, regional probabilities and the switching verdict.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::linalg::{symmetric_eig, Propagator, WalkState};
use crate::model::{build_hamiltonian, partition, Region, SitePartition, TripleGraphSpec};

pub const DEFAULT_START: usize = 3;
pub const DEFAULT_HORIZON: f64 = 100.0;
pub const DEFAULT_DT: f64 = 0.05;
pub const DEFAULT_THRESHOLD: f64 = 0.05;

/// Probability in the left part, on the connection site, in the right part
/// and on the side chain, sampled at `times`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbabilityTrace {
    pub spec: TripleGraphSpec,
    pub start: usize,
    pub times: Vec<f64>,
    pub p_left: Vec<f64>,
    pub p_conn: Vec<f64>,
    pub p_right: Vec<f64>,
    pub p_side: Vec<f64>,
}

impl ProbabilityTrace {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn horizon(&self) -> f64 {
        self.times.last().copied().unwrap_or(0.0)
    }

    /// Largest `|p_left + p_conn + p_right + p_side − 1|` over the samples.
    pub fn normalization_error(&self) -> f64 {
        (0..self.len())
            .map(|k| {
                (self.p_left[k] + self.p_conn[k] + self.p_right[k] + self.p_side[k] - 1.0).abs()
            })
            .fold(0.0, f64::max)
    }

    pub fn max_of(&self, region: Region) -> f64 {
        let series = match region {
            Region::Left => &self.p_left,
            Region::Connection => &self.p_conn,
            Region::Right => &self.p_right,
            Region::Side => &self.p_side,
        };
        series.iter().copied().fold(0.0, f64::max)
    }
}

/// Sample times `0, dt, 2dt, …` up to and including `horizon` (when it is a
/// multiple of `dt` up to rounding).
pub fn sample_times(horizon: f64, dt: f64) -> Result<Vec<f64>> {
    if !(horizon.is_finite() && horizon > 0.0) {
        return Err(Error::param(
            "horizon",
            format!("must be positive, got {horizon}"),
        ));
    }
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::param("dt", format!("must be positive, got {dt}")));
    }
    let steps = (horizon / dt + 1e-9).floor() as usize;
    Ok((0..=steps).map(|k| k as f64 * dt).collect())
}

fn region_sums(partition: &SitePartition, state: &WalkState) -> [f64; 4] {
    let p = state.probabilities();
    let sum = |r: std::ops::RangeInclusive<usize>| -> f64 { r.map(|a| p[a - 1]).sum() };
    [
        sum(partition.left.clone()),
        p[partition.connection - 1],
        sum(partition.right.clone()),
        sum(partition.side.clone()),
    ]
}

/// Propagates the walker started on site `start` and records the regional
/// probabilities at every sample time.
pub fn propagate_trace(
    spec: &TripleGraphSpec,
    start: usize,
    horizon: f64,
    dt: f64,
) -> Result<ProbabilityTrace> {
    propagate_trace_with(spec, start, horizon, dt, Execution::default())
}

pub fn propagate_trace_with(
    spec: &TripleGraphSpec,
    start: usize,
    horizon: f64,
    dt: f64,
    exec: Execution,
) -> Result<ProbabilityTrace> {
    let h = build_hamiltonian(spec)?;
    let part = partition(spec)?;
    let psi0 = WalkState::basis(spec.dim(), start)?;
    let times = sample_times(horizon, dt)?;
    let dec = symmetric_eig(&h)?;
    let prop = Propagator::new(&dec, &psi0)?;

    let rows = exec.map(&times, |&t| region_sums(&part, &prop.at(t)));
    let mut trace = ProbabilityTrace {
        spec: *spec,
        start,
        times,
        p_left: Vec::with_capacity(rows.len()),
        p_conn: Vec::with_capacity(rows.len()),
        p_right: Vec::with_capacity(rows.len()),
        p_side: Vec::with_capacity(rows.len()),
    };
    for [l, c, r, s] in rows {
        trace.p_left.push(l);
        trace.p_conn.push(c);
        trace.p_right.push(r);
        trace.p_side.push(s);
    }
    Ok(trace)
}

/// The half of the main chain a walker starts in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn opposite(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }

    fn region(self) -> Region {
        match self {
            Side::Left => Region::Left,
            Side::Right => Region::Right,
        }
    }
}

/// Which half of the main chain `start` lies in. Fails for the connection
/// site and side-chain sites.
pub fn initial_side(spec: &TripleGraphSpec, start: usize) -> Result<Side> {
    match partition(spec)?.region_of(start) {
        Some(Region::Left) => Ok(Side::Left),
        Some(Region::Right) => Ok(Side::Right),
        Some(region) => Err(Error::param(
            "start",
            format!("site {start} is in the {region:?} region, not in the left or right part"),
        )),
        None => Err(Error::param(
            "start",
            format!("site {start} out of range 1..={}", spec.dim()),
        )),
    }
}

/// Outcome of the switching test. `switching == (max_opposite < threshold)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SwitchingVerdict {
    pub switching: bool,
    pub max_opposite: f64,
    pub threshold: f64,
    pub horizon: f64,
    pub samples: usize,
}

/// Peak probability reached in the part opposite to `initial_side`, compared
/// against `threshold`.
pub fn detect_switching(
    trace: &ProbabilityTrace,
    initial_side: Side,
    threshold: f64,
) -> Result<SwitchingVerdict> {
    if !(threshold.is_finite() && threshold > 0.0) {
        return Err(Error::param(
            "threshold",
            format!("must be positive, got {threshold}"),
        ));
    }
    let part = partition(&trace.spec)?;
    let opposite = initial_side.opposite();
    let empty = match opposite {
        Side::Left => part.left.is_empty(),
        Side::Right => part.right.is_empty(),
    };
    if empty {
        return Err(Error::DegeneratePartition(format!(
            "the {opposite:?} part is empty for {}",
            trace.spec
        )));
    }
    let max_opposite = trace.max_of(opposite.region());
    Ok(SwitchingVerdict {
        switching: max_opposite < threshold,
        max_opposite,
        threshold,
        horizon: trace.horizon(),
        samples: trace.len(),
    })
}

/// Peak side-chain probability for a walker started on a main-chain site
/// other than ℓ. Exactly zero without a side chain.
pub fn side_chain_leakage_max(
    spec: &TripleGraphSpec,
    start: usize,
    horizon: f64,
    dt: f64,
) -> Result<f64> {
    spec.validate()?;
    if start == spec.attach || start < 1 || start > spec.main_len {
        return Err(Error::param(
            "start",
            format!(
                "must be a main-chain site other than l={}, got {start}",
                spec.attach
            ),
        ));
    }
    sample_times(horizon, dt)?;
    if spec.side_len == 0 {
        return Ok(0.0);
    }
    Ok(propagate_trace(spec, start, horizon, dt)?.max_of(Region::Side))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(n: usize, s: usize, l: usize, j: f64) -> TripleGraphSpec {
        TripleGraphSpec::new(n, s, l, j).unwrap()
    }

    fn verdict(sp: &TripleGraphSpec, start: usize, horizon: f64) -> SwitchingVerdict {
        let trace = propagate_trace(sp, start, horizon, DEFAULT_DT).unwrap();
        let side = initial_side(sp, start).unwrap();
        detect_switching(&trace, side, DEFAULT_THRESHOLD).unwrap()
    }

    #[test]
    fn sample_grid() {
        let t = sample_times(100.0, 0.05).unwrap();
        assert_eq!(t.len(), 2001);
        assert!((t.last().unwrap() - 100.0).abs() < 1e-9);
        assert_eq!(sample_times(1.0, 0.3).unwrap().len(), 4);
        assert!(sample_times(0.0, 0.1).is_err());
        assert!(sample_times(1.0, 0.0).is_err());
        assert!(sample_times(f64::NAN, 0.1).is_err());
    }

    #[test]
    fn initial_sample_is_the_start_region() {
        let sp = spec(11, 2, 5, 10.0);
        for (start, idx) in [(3, 0), (5, 1), (9, 2), (13, 3)] {
            let tr = propagate_trace(&sp, start, 1.0, 0.5).unwrap();
            let row = [tr.p_left[0], tr.p_conn[0], tr.p_right[0], tr.p_side[0]];
            for (k, p) in row.iter().enumerate() {
                assert_eq!(*p, if k == idx { 1.0 } else { 0.0 });
            }
        }
    }

    #[test]
    fn gcd_one_stays_left() {
        let tr = propagate_trace(&spec(11, 1, 5, 10.0), 3, 100.0, 0.05).unwrap();
        let worst = (0..tr.len())
            .map(|k| tr.p_right[k] + tr.p_conn[k])
            .fold(0.0, f64::max);
        assert!(worst < 0.05, "{worst}");
        assert!(tr.normalization_error() < 1e-9);
    }

    #[test]
    fn gcd_six_crosses_over_the_slow_beat() {
        // the crossing builds up on the O(1/J²) time scale, ~600 at J=10
        let tr = propagate_trace(&spec(11, 1, 6, 10.0), 3, 1000.0, 0.05).unwrap();
        assert!(tr.max_of(Region::Right) > 0.3);
    }

    #[test]
    fn parity_of_side_chain() {
        assert!(verdict(&spec(11, 1, 5, 10.0), 3, 100.0).switching);
        assert!(!verdict(&spec(11, 2, 5, 10.0), 3, 100.0).switching);
        assert!(verdict(&spec(11, 3, 5, 10.0), 3, 100.0).switching);
        assert!(!verdict(&spec(11, 4, 5, 10.0), 3, 100.0).switching);
    }

    #[test]
    fn start_site_within_a_part_does_not_matter() {
        let sp = spec(11, 1, 5, 10.0);
        for start in 1..=4 {
            assert!(verdict(&sp, start, 100.0).switching, "start={start}");
        }
    }

    #[test]
    fn verdict_stable_under_halved_step() {
        for sp in [
            spec(11, 1, 5, 10.0),
            spec(11, 2, 6, 10.0),
            spec(11, 4, 5, 10.0),
        ] {
            let a = detect_switching(
                &propagate_trace(&sp, 3, 100.0, 0.05).unwrap(),
                Side::Left,
                0.05,
            )
            .unwrap();
            let b = detect_switching(
                &propagate_trace(&sp, 3, 100.0, 0.025).unwrap(),
                Side::Left,
                0.05,
            )
            .unwrap();
            assert_eq!(a.switching, b.switching);
        }
    }

    #[test]
    fn crossing_suppression_scales_with_coupling() {
        // without remaining levels the crossing is O(1/J²)
        let peaks: Vec<f64> = [5.0, 10.0, 20.0]
            .iter()
            .map(|&j| verdict(&spec(11, 1, 5, j), 3, 100.0).max_opposite)
            .collect();
        let c = peaks
            .iter()
            .zip([5.0f64, 10.0, 20.0])
            .map(|(p, j)| p * j * j)
            .fold(0.0, f64::max);
        for (p, j) in peaks.iter().zip([5.0f64, 10.0, 20.0]) {
            assert!(*p < 10.0 * c / (j * j));
        }
        assert!(peaks[0] > peaks[1] && peaks[1] > peaks[2]);
    }

    #[test]
    fn degenerate_partition() {
        let sp = spec(5, 1, 1, 3.0);
        let tr = propagate_trace(&sp, 3, 1.0, 0.1).unwrap();
        assert!(matches!(
            detect_switching(&tr, Side::Right, 0.05),
            Err(Error::DegeneratePartition(_))
        ));
        assert!(initial_side(&sp, 1).is_err());
        assert!(initial_side(&sp, 6).is_err());
        assert!(initial_side(&sp, 7).is_err());
    }

    #[test]
    fn leakage() {
        let at10 = side_chain_leakage_max(&spec(11, 1, 5, 10.0), 3, 100.0, 0.05).unwrap();
        let at20 = side_chain_leakage_max(&spec(11, 1, 5, 20.0), 3, 100.0, 0.05).unwrap();
        assert!(at10 < 0.05);
        assert!(at20 < at10 / 4.0 + 0.005);
        assert_eq!(
            side_chain_leakage_max(&spec(11, 0, 5, 10.0), 3, 100.0, 0.05).unwrap(),
            0.0
        );
        assert!(side_chain_leakage_max(&spec(11, 1, 5, 10.0), 5, 100.0, 0.05).is_err());
        assert!(side_chain_leakage_max(&spec(11, 1, 5, 10.0), 12, 100.0, 0.05).is_err());
    }

    #[test]
    fn execution_strategies_agree() {
        let sp = spec(11, 3, 6, 7.0);
        let a = propagate_trace_with(&sp, 2, 50.0, 0.1, Execution::Sequential).unwrap();
        let b = propagate_trace_with(&sp, 2, 50.0, 0.1, Execution::Parallel).unwrap();
        assert_eq!(a, b);
    }
}
