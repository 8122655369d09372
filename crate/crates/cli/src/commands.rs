use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use triplewalk::dynamics::{
    detect_switching, initial_side, propagate_trace_with, DEFAULT_DT, DEFAULT_HORIZON,
    DEFAULT_START, DEFAULT_THRESHOLD,
};
use triplewalk::linalg::symmetric_eig;
use triplewalk::model::build_hamiltonian;
use triplewalk::spectral::{classify_levels, find_roots, LevelMode, RootSet};
use triplewalk::sweep::{classify_parity_effect, run_sweep_with, SweepGrid};
use triplewalk::verify::{all_checks, run_check, CheckOutcome};
use triplewalk::{Execution, TripleGraphSpec};

use crate::config::{ParamList, RunConfig};
use crate::error::CliError;
use crate::plot;

pub const OUT_DIR_ENV: &str = "TRIPLEWALK_OUT_DIR";

/// Where a subcommand writes its main output.
#[derive(Debug, Clone, PartialEq)]
pub enum Target {
    Stdout,
    File(PathBuf),
}

impl Target {
    /// `-` means standard output; an explicit path is used as given; otherwise
    /// `default_name` inside the output directory.
    pub fn resolve(out: Option<&str>, out_dir: &Path, default_name: &str) -> Target {
        match out {
            Some("-") => Target::Stdout,
            Some(p) => Target::File(PathBuf::from(p)),
            None => Target::File(out_dir.join(default_name)),
        }
    }

    fn open(&self) -> Result<Box<dyn Write>, CliError> {
        match self {
            Target::Stdout => Ok(Box::new(io::stdout().lock())),
            Target::File(path) => Ok(Box::new(BufWriter::new(create(path)?))),
        }
    }

    fn describe(&self) -> String {
        match self {
            Target::Stdout => "standard output".into(),
            Target::File(p) => p.display().to_string(),
        }
    }
}

fn create(path: &Path) -> Result<File, CliError> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent)
            .map_err(|e| CliError::Io(format!("creating {}: {e}", parent.display())))?;
    }
    File::create(path).map_err(|e| CliError::Io(format!("creating {}: {e}", path.display())))
}

fn out_dir(cfg: &RunConfig) -> PathBuf {
    cfg.out_dir
        .clone()
        .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."))
}

fn csv_writer<W: Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(w)
}

fn single_spec(cfg: &RunConfig) -> Result<TripleGraphSpec, CliError> {
    let n = cfg.n.as_ref().map_or(Ok(11), |v| v.one("n"))?;
    let l = cfg.l.as_ref().map_or(Ok(5), |v| v.one("l"))?;
    let s = cfg.s.as_ref().map_or(Ok(1), |v| v.one("s"))?;
    let j = cfg.j.as_ref().map_or(Ok(10.0), |v| v.one("j"))?;
    Ok(TripleGraphSpec::new(n, s, l, j)?)
}

#[derive(Serialize)]
struct TraceRow {
    t: f64,
    p_left: f64,
    p_conn: f64,
    p_right: f64,
    p_side: f64,
}

pub fn evolve(cfg: &RunConfig, exec: Execution) -> Result<(), CliError> {
    let spec = single_spec(cfg)?;
    let start = cfg.start.unwrap_or(DEFAULT_START);
    let horizon = cfg.horizon.unwrap_or(DEFAULT_HORIZON);
    let dt = cfg.dt.unwrap_or(DEFAULT_DT);
    let threshold = cfg.threshold.unwrap_or(DEFAULT_THRESHOLD);
    if !(threshold.is_finite() && threshold > 0.0) {
        return Err(CliError::usage(
            "threshold",
            format!("must be positive, got {threshold}"),
        ));
    }
    let trace = propagate_trace_with(&spec, start, horizon, dt, exec)?;

    let target = Target::resolve(cfg.out.as_deref(), &out_dir(cfg), "evolve.csv");
    let mut w = csv_writer(target.open()?);
    for k in 0..trace.len() {
        w.serialize(TraceRow {
            t: trace.times[k],
            p_left: trace.p_left[k],
            p_conn: trace.p_conn[k],
            p_right: trace.p_right[k],
            p_side: trace.p_side[k],
        })?;
    }
    w.flush()?;

    if let Some(path) = &cfg.plot {
        create(path)?.write_all(plot::render(&trace).as_bytes())?;
        eprintln!("plot written to {}", path.display());
    }
    eprint!(
        "{spec}, start {start}: {} samples to {}",
        trace.len(),
        target.describe()
    );
    // a verdict only makes sense for walkers starting on either half
    if let Ok(side) = initial_side(&spec, start) {
        if let Ok(v) = detect_switching(&trace, side, threshold) {
            eprint!(
                "; max opposite {:.6}, switching {}",
                v.max_opposite, v.switching
            );
        }
    }
    eprintln!();
    Ok(())
}

#[derive(Serialize)]
struct LevelMatch {
    value: f64,
    nearest_prediction: Option<f64>,
    distance: Option<f64>,
    in_band: bool,
}

#[derive(Serialize)]
struct SpectrumReport {
    spec: TripleGraphSpec,
    gcd: usize,
    spectrum: Vec<f64>,
    remaining: Vec<f64>,
    shifted_large_j: Option<Vec<f64>>,
    detached: Option<(f64, f64)>,
    roots_exact: Option<RootSet>,
    roots_large_j: Option<RootSet>,
    /// Each exact level against the nearest large-J band prediction.
    levels: Vec<LevelMatch>,
}

fn spectrum_report(spec: &TripleGraphSpec) -> Result<SpectrumReport, CliError> {
    let dec = symmetric_eig(&build_hamiltonian(spec)?)?;
    let class = classify_levels(spec)?;
    let (roots_exact, roots_large_j) = if spec.side_len == 0 {
        (None, None)
    } else {
        (
            Some(find_roots(spec, LevelMode::Exact)?),
            Some(find_roots(spec, LevelMode::LargeJ)?),
        )
    };
    let predictions: Vec<f64> = match (&class.shifted, &roots_large_j) {
        _ if spec.side_len == 0 => Vec::new(),
        (Some(shifted), _) if spec.side_len % 2 == 1 => shifted.clone(),
        (_, Some(large)) => {
            let mut p = large.roots.clone();
            if spec.side_len.is_multiple_of(2) {
                p.extend(&class.remaining);
            }
            p
        }
        _ => Vec::new(),
    };
    let levels = dec
        .values()
        .iter()
        .map(|&value| {
            let nearest = predictions
                .iter()
                .copied()
                .min_by(|a, b| (a - value).abs().total_cmp(&(b - value).abs()));
            LevelMatch {
                value,
                nearest_prediction: nearest,
                distance: nearest.map(|p| (p - value).abs()),
                in_band: value.abs() <= 2.0,
            }
        })
        .collect();
    Ok(SpectrumReport {
        spec: *spec,
        gcd: class.gcd,
        spectrum: dec.values().to_vec(),
        remaining: class.remaining,
        shifted_large_j: class.shifted,
        detached: class.detached,
        roots_exact,
        roots_large_j,
        levels,
    })
}

pub fn spectrum(cfg: &RunConfig) -> Result<(), CliError> {
    let spec = single_spec(cfg)?;
    let report = spectrum_report(&spec)?;
    let target = Target::resolve(cfg.out.as_deref(), &out_dir(cfg), "spectrum.json");
    let mut w = target.open()?;
    serde_json::to_writer_pretty(&mut w, &report)?;
    writeln!(w)?;
    w.flush()?;
    eprintln!(
        "{spec}: {} levels to {}",
        report.spectrum.len(),
        target.describe()
    );
    Ok(())
}

#[derive(Serialize)]
struct SweepRow {
    n: usize,
    l: usize,
    s: usize,
    j: f64,
    gcd: usize,
    pred_gt2: bool,
    parity: &'static str,
    max_opposite: Option<f64>,
    switching: Option<bool>,
    agreement: Option<bool>,
}

fn list<T: Copy>(v: &Option<ParamList<T>>, default: Vec<T>) -> Vec<T> {
    v.as_ref().map_or(default, |p| p.0.clone())
}

pub fn sweep(cfg: &RunConfig, exec: Execution) -> Result<(), CliError> {
    let grid = SweepGrid::new(
        list(&cfg.n, vec![11]),
        list(&cfg.l, (2..=10).collect()),
        list(&cfg.s, (1..=4).collect()),
        list(&cfg.j, vec![10.0]),
    )?
    .with_dynamics(
        cfg.start.unwrap_or(DEFAULT_START),
        cfg.horizon.unwrap_or(DEFAULT_HORIZON),
        cfg.dt.unwrap_or(DEFAULT_DT),
        cfg.threshold.unwrap_or(DEFAULT_THRESHOLD),
    )?;
    let records = run_sweep_with(&grid, exec)?;

    let dir = out_dir(cfg);
    let target = Target::resolve(cfg.out.as_deref(), &dir, "sweep.csv");
    let mut w = csv_writer(target.open()?);
    for r in &records {
        w.serialize(SweepRow {
            n: r.spec.main_len,
            l: r.spec.attach,
            s: r.spec.side_len,
            j: r.spec.coupling,
            gcd: r.gcd_value,
            pred_gt2: r.predicate_gt2,
            parity: r.parity.as_str(),
            max_opposite: r.verdict.map(|v| v.max_opposite),
            switching: r.verdict.map(|v| v.switching),
            agreement: r.agreement,
        })?;
        if let Some(e) = &r.error {
            eprintln!("warning: {}: {e}", r.spec);
        }
    }
    w.flush()?;

    let summary = classify_parity_effect(&records)?;
    let summary_path = cfg
        .summary
        .clone()
        .unwrap_or_else(|| dir.join("sweep_summary.json"));
    let mut f = BufWriter::new(create(&summary_path)?);
    serde_json::to_writer_pretty(&mut f, &summary)?;
    writeln!(f)?;
    f.flush()?;
    eprintln!(
        "{} points ({} failed) to {}; agreement rate {}; summary in {}",
        records.len(),
        summary.failed,
        target.describe(),
        summary
            .agreement_rate
            .map_or("n/a".into(), |r| format!("{r:.3}")),
        summary_path.display()
    );
    Ok(())
}

/// Runs the self-checks and prints a table. Returns whether all passed.
pub fn verify(cfg: &RunConfig) -> Result<bool, CliError> {
    let outcomes: Vec<CheckOutcome> = match &cfg.only {
        Some(name) => vec![run_check(name)?],
        None => all_checks(),
    };
    let width = outcomes.iter().map(|o| o.name.len()).max().unwrap_or(0);
    let mut out = io::stdout().lock();
    for o in &outcomes {
        writeln!(
            out,
            "{:>2}  {:<width$}  {}  {:>8.1} ms  {}",
            o.criterion,
            o.name,
            if o.passed { "PASS" } else { "FAIL" },
            o.elapsed_ms,
            o.detail
        )?;
    }
    let passed = outcomes.iter().filter(|o| o.passed).count();
    writeln!(out, "{passed}/{} checks passed", outcomes.len())?;
    Ok(passed == outcomes.len())
}
