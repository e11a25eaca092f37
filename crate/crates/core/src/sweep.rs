//! Grid sweeps over `(c1, c2, c3)` with append-only CSV output and resume.
//!
//! Workers pull grid points from a shared counter and send finished records
//! to a single writer, which appends one complete line per record. Record
//! values depend only on the point and the quadrature config, never on the
//! worker count or completion order.

use std::collections::HashSet;
use std::fs::{File, OpenOptions};
use std::io::{self, BufRead, BufReader, Read, Seek, SeekFrom, Write};
use std::path::Path;
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::mpsc;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::physics::{self, HarvestParams, PhysicsError};
use crate::quadrature::{QuadConfig, Strategy};

pub const CSV_HEADER: &str = "c1,c2,c3,E,X_re,X_im,N,err_E,err_X,strategy,converged,n_evals,wall_ns";

#[derive(Debug, Error)]
pub enum SweepError {
    #[error("invalid axis {axis}: {reason}")]
    InvalidAxis { axis: &'static str, reason: &'static str },
    #[error("grid is empty")]
    EmptyGrid,
    #[error("grid point ({c1}, {c2}, {c3}) is not a valid parameter point: {source}")]
    InvalidPoint { c1: f64, c2: f64, c3: f64, source: PhysicsError },
    #[error("evaluation failed at {key}: {source}")]
    Evaluation { key: String, source: PhysicsError },
    #[error("existing records do not belong to this sweep: {0}")]
    SpecMismatch(String),
    #[error("malformed record on line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("failed to write records: {0}")]
    SinkWriteFailure(#[source] io::Error),
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Inclusive arithmetic progression `start, start + step, …, ≤ stop`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Axis {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl Axis {
    pub fn new(start: f64, stop: f64, step: f64) -> Self {
        Axis { start, stop, step }
    }

    /// A one-value axis.
    pub fn single(value: f64) -> Self {
        Axis { start: value, stop: value, step: 1.0 }
    }

    fn validate(&self, axis: &'static str) -> Result<(), SweepError> {
        if !(self.start.is_finite() && self.stop.is_finite() && self.step.is_finite()) {
            return Err(SweepError::InvalidAxis { axis, reason: "bounds and step must be finite" });
        }
        if self.step <= 0.0 {
            return Err(SweepError::InvalidAxis { axis, reason: "step must be positive" });
        }
        if self.start <= 0.0 {
            return Err(SweepError::InvalidAxis { axis, reason: "start must be positive" });
        }
        if self.start > self.stop {
            return Err(SweepError::EmptyGrid);
        }
        Ok(())
    }

    /// Number of values, allowing half a step of slack at `stop`.
    pub fn len(&self) -> usize {
        ((self.stop - self.start) / self.step + 0.5).floor() as usize + 1
    }

    pub fn is_empty(&self) -> bool {
        self.start > self.stop
    }

    /// `start + k·step`, computed per index and snapped to 12 decimals so
    /// that decimal grids print cleanly (`0.25`, not `0.2500000000000009`).
    pub fn value(&self, k: usize) -> f64 {
        let v = self.start + k as f64 * self.step;
        (v * 1e12).round() / 1e12
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.len()).map(|k| self.value(k)).collect()
    }

    /// Every `factor`-th value, ending on the last value: keeps
    /// `len / factor` points with step `factor·step`.
    pub fn coarsen(&self, factor: usize) -> Axis {
        if factor <= 1 {
            return *self;
        }
        let keep = (self.len() / factor).max(1);
        let step = self.step * factor as f64;
        let last = self.value(self.len() - 1);
        Axis { start: last - (keep - 1) as f64 * step, stop: last, step }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec {
    pub c1: Axis,
    pub c2: Axis,
    pub c3: Axis,
}

impl GridSpec {
    /// `c1 ∈ {0.025, …, 6}`, `c2 ∈ {0.025, …, 3}`, `c3 ∈ {0.125, …, 5}`:
    /// 240 × 120 × 40 points.
    pub fn paper() -> Self {
        GridSpec {
            c1: Axis::new(0.025, 6.0, 0.025),
            c2: Axis::new(0.025, 3.0, 0.025),
            c3: Axis::new(0.125, 5.0, 0.125),
        }
    }

    pub fn coarsen(&self, factor: usize) -> Self {
        GridSpec {
            c1: self.c1.coarsen(factor),
            c2: self.c2.coarsen(factor),
            c3: self.c3.coarsen(factor),
        }
    }

    pub fn with_c3(mut self, c3: f64) -> Self {
        self.c3 = Axis::single(c3);
        self
    }

    pub fn validate(&self) -> Result<(), SweepError> {
        self.c1.validate("c1")?;
        self.c2.validate("c2")?;
        self.c3.validate("c3")
    }

    pub fn len(&self) -> usize {
        self.c1.len() * self.c2.len() * self.c3.len()
    }

    pub fn is_empty(&self) -> bool {
        self.validate().is_err()
    }
}

/// Key of a grid point: the triple rendered at 6 decimals.
pub fn grid_key(c1: f64, c2: f64, c3: f64) -> String {
    format!("{c1:.6},{c2:.6},{c3:.6}")
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridPoint {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
}

impl GridPoint {
    pub fn key(&self) -> String {
        grid_key(self.c1, self.c2, self.c3)
    }
}

/// Cartesian product of the axes, ordered by `(c3, c2, c1)`.
pub fn build_grid(spec: &GridSpec) -> Result<Vec<GridPoint>, SweepError> {
    spec.validate()?;
    let (c1s, c2s, c3s) = (spec.c1.values(), spec.c2.values(), spec.c3.values());
    let mut points = Vec::with_capacity(spec.len());
    for &c3 in &c3s {
        for &c2 in &c2s {
            for &c1 in &c1s {
                points.push(GridPoint { c1, c2, c3 });
            }
        }
    }
    if points.is_empty() {
        return Err(SweepError::EmptyGrid);
    }
    Ok(points)
}

/// One grid point's output; one CSV line.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepRecord {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub e: f64,
    pub x_re: f64,
    pub x_im: f64,
    pub n: f64,
    pub err_e: f64,
    pub err_x: f64,
    pub strategy: Strategy,
    pub converged: bool,
    pub n_evals: u64,
    pub wall_ns: u64,
}

/// 17 significant digits; parses back to the same `f64`.
fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

impl SweepRecord {
    pub fn key(&self) -> String {
        grid_key(self.c1, self.c2, self.c3)
    }

    pub fn x_abs(&self) -> f64 {
        self.x_re.hypot(self.x_im)
    }

    /// `|X| − E`, unclamped.
    pub fn signed_n(&self) -> f64 {
        self.x_abs() - self.e
    }

    pub fn to_csv_line(&self) -> String {
        let floats = [self.c1, self.c2, self.c3, self.e, self.x_re, self.x_im, self.n, self.err_e, self.err_x];
        let mut line = floats.iter().map(|&v| fmt_f64(v)).collect::<Vec<_>>().join(",");
        line.push_str(&format!(
            ",{},{},{},{}\n",
            self.strategy.tag(),
            u8::from(self.converged),
            self.n_evals,
            self.wall_ns
        ));
        line
    }

    pub fn parse_csv_line(line: &str, line_no: usize) -> Result<Self, SweepError> {
        let bad = |reason: String| SweepError::Parse { line: line_no, reason };
        let fields: Vec<&str> = line.trim_end_matches(['\n', '\r']).split(',').collect();
        if fields.len() != 13 {
            return Err(bad(format!("expected 13 fields, found {}", fields.len())));
        }
        let mut floats = [0.0f64; 9];
        for (slot, raw) in floats.iter_mut().zip(&fields[..9]) {
            *slot = raw.parse().map_err(|_| bad(format!("not a number: {raw:?}")))?;
        }
        let strategy = Strategy::from_tag(fields[9]).ok_or_else(|| bad(format!("unknown strategy {:?}", fields[9])))?;
        let converged = match fields[10] {
            "1" => true,
            "0" => false,
            other => return Err(bad(format!("converged must be 0 or 1, found {other:?}"))),
        };
        let n_evals = fields[11].parse().map_err(|_| bad(format!("bad n_evals {:?}", fields[11])))?;
        let wall_ns = fields[12].parse().map_err(|_| bad(format!("bad wall_ns {:?}", fields[12])))?;
        let [c1, c2, c3, e, x_re, x_im, n, err_e, err_x] = floats;
        Ok(SweepRecord { c1, c2, c3, e, x_re, x_im, n, err_e, err_x, strategy, converged, n_evals, wall_ns })
    }
}

/// Parses a record file. A trailing line without a newline is treated as
/// an interrupted write and ignored.
pub fn read_records_from<R: Read>(reader: R) -> Result<Vec<SweepRecord>, SweepError> {
    let mut reader = BufReader::new(reader);
    let mut records = Vec::new();
    let mut line = String::new();
    let mut line_no = 0;
    loop {
        line.clear();
        if reader.read_line(&mut line)? == 0 {
            break;
        }
        line_no += 1;
        if !line.ends_with('\n') {
            break;
        }
        if line_no == 1 {
            if line.trim_end() != CSV_HEADER {
                return Err(SweepError::Parse { line: 1, reason: "missing or unexpected header".into() });
            }
            continue;
        }
        records.push(SweepRecord::parse_csv_line(&line, line_no)?);
    }
    Ok(records)
}

pub fn read_records(path: &Path) -> Result<Vec<SweepRecord>, SweepError> {
    read_records_from(File::open(path)?)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepOptions {
    pub workers: usize,
    /// Store per-point wall time; when off, `wall_ns` is written as 0 so
    /// files are byte-comparable across runs.
    pub record_timing: bool,
    /// Re-evaluate non-converged points once with 4× the region budget.
    pub retry_unconverged: bool,
    /// Stop after this many points (simulates an interrupted run).
    pub max_points: Option<usize>,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions { workers: 1, record_timing: true, retry_unconverged: false, max_points: None }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SweepSummary {
    /// Points computed by this run.
    pub points_done: usize,
    /// Computed points whose integrals did not converge (kept, flagged).
    pub points_failed: usize,
    /// Points already present in the existing record file.
    pub points_skipped: usize,
    /// Points left uncomputed because `max_points` was reached.
    pub points_remaining: usize,
    pub elapsed: Duration,
}

/// Evaluates one grid point into a record.
pub fn evaluate_point(
    point: &GridPoint,
    cfg: &QuadConfig,
    opts: &SweepOptions,
) -> Result<SweepRecord, SweepError> {
    let params = HarvestParams::new(point.c1, point.c2, point.c3).map_err(|source| SweepError::InvalidPoint {
        c1: point.c1,
        c2: point.c2,
        c3: point.c3,
        source,
    })?;
    // the clock is only read when asked for; wasm32 has no `Instant`
    let start = opts.record_timing.then(Instant::now);
    let eval_err = |source| SweepError::Evaluation { key: point.key(), source };
    let mut obs = physics::observe(&params, cfg).map_err(eval_err)?;
    let mut n_evals = obs.n_evals() as u64;
    if !obs.converged && opts.retry_unconverged {
        let wider = QuadConfig { max_regions: cfg.max_regions.saturating_mul(4), ..*cfg };
        obs = physics::observe(&params, &wider).map_err(eval_err)?;
        n_evals += obs.n_evals() as u64;
    }
    let wall_ns = start.map_or(0, |t| t.elapsed().as_nanos() as u64);
    Ok(SweepRecord {
        c1: point.c1,
        c2: point.c2,
        c3: point.c3,
        e: obs.e,
        x_re: obs.x.re,
        x_im: obs.x.im,
        n: obs.n,
        err_e: obs.err_e,
        err_x: obs.err_x,
        strategy: cfg.strategy,
        converged: obs.converged,
        n_evals,
        wall_ns,
    })
}

fn validate_points(points: &[GridPoint]) -> Result<(), SweepError> {
    for p in points {
        HarvestParams::new(p.c1, p.c2, p.c3)
            .map_err(|source| SweepError::InvalidPoint { c1: p.c1, c2: p.c2, c3: p.c3, source })?;
    }
    Ok(())
}

/// Evaluates `points` on `workers` threads, writing each record to `sink`
/// as it completes. Returns (done, failed).
fn run_points<W: Write>(
    points: &[GridPoint],
    cfg: &QuadConfig,
    opts: &SweepOptions,
    sink: &mut W,
) -> Result<(usize, usize), SweepError> {
    let next = AtomicUsize::new(0);
    let abort = AtomicBool::new(false);
    let workers = opts.workers.max(1).min(points.len().max(1));
    let (tx, rx) = mpsc::channel::<Result<SweepRecord, SweepError>>();

    std::thread::scope(|scope| {
        for _ in 0..workers {
            let tx = tx.clone();
            let (next, abort) = (&next, &abort);
            scope.spawn(move || loop {
                if abort.load(Ordering::Relaxed) {
                    break;
                }
                let idx = next.fetch_add(1, Ordering::Relaxed);
                let Some(point) = points.get(idx) else { break };
                let result = evaluate_point(point, cfg, opts);
                if tx.send(result).is_err() {
                    break;
                }
            });
        }
        drop(tx);

        let mut done = 0;
        let mut failed = 0;
        let mut first_error = None;
        for result in rx {
            if first_error.is_some() {
                continue;
            }
            let outcome = result.and_then(|rec| {
                sink.write_all(rec.to_csv_line().as_bytes())
                    .and_then(|_| sink.flush())
                    .map_err(SweepError::SinkWriteFailure)?;
                Ok(rec)
            });
            match outcome {
                Ok(rec) => {
                    done += 1;
                    failed += usize::from(!rec.converged);
                }
                Err(e) => {
                    abort.store(true, Ordering::Relaxed);
                    first_error = Some(e);
                }
            }
        }
        match first_error {
            Some(e) => Err(e),
            None => Ok((done, failed)),
        }
    })
}

fn limited<'a>(points: &'a [GridPoint], opts: &SweepOptions) -> (&'a [GridPoint], usize) {
    let n = opts.max_points.map_or(points.len(), |m| m.min(points.len()));
    (&points[..n], points.len() - n)
}

/// Runs the full grid into `sink`, header first.
pub fn run_sweep<W: Write>(
    spec: &GridSpec,
    cfg: &QuadConfig,
    opts: &SweepOptions,
    sink: &mut W,
) -> Result<SweepSummary, SweepError> {
    let start = Instant::now();
    let points = build_grid(spec)?;
    validate_points(&points)?;
    sink.write_all(format!("{CSV_HEADER}\n").as_bytes())
        .and_then(|_| sink.flush())
        .map_err(SweepError::SinkWriteFailure)?;
    let (todo, remaining) = limited(&points, opts);
    let (done, failed) = run_points(todo, cfg, opts, sink)?;
    Ok(SweepSummary {
        points_done: done,
        points_failed: failed,
        points_skipped: 0,
        points_remaining: remaining,
        elapsed: start.elapsed(),
    })
}

/// Truncates a trailing partial line left by an interrupted write.
fn drop_partial_tail(file: &mut File) -> io::Result<()> {
    let mut bytes = Vec::new();
    file.seek(SeekFrom::Start(0))?;
    file.read_to_end(&mut bytes)?;
    let keep = bytes.iter().rposition(|&b| b == b'\n').map_or(0, |i| i + 1);
    if keep < bytes.len() {
        file.set_len(keep as u64)?;
    }
    file.seek(SeekFrom::End(0))?;
    Ok(())
}

/// Continues a sweep stored at `path`, computing only the points that are
/// not already recorded. A missing or empty file starts a fresh run.
pub fn resume_sweep(
    spec: &GridSpec,
    cfg: &QuadConfig,
    opts: &SweepOptions,
    path: &Path,
) -> Result<SweepSummary, SweepError> {
    let start = Instant::now();
    let points = build_grid(spec)?;
    validate_points(&points)?;

    let fresh = std::fs::metadata(path).map(|m| m.len() == 0).unwrap_or(true);
    if fresh {
        let mut file = File::create(path)?;
        return run_sweep(spec, cfg, opts, &mut file);
    }

    let existing = read_records(path)?;
    let grid_keys: HashSet<String> = points.iter().map(GridPoint::key).collect();
    let mut have = HashSet::with_capacity(existing.len());
    for rec in &existing {
        let key = rec.key();
        if !grid_keys.contains(&key) {
            return Err(SweepError::SpecMismatch(format!("record {key} is not on the current grid")));
        }
        if rec.strategy != cfg.strategy {
            return Err(SweepError::SpecMismatch(format!(
                "record {key} was computed with strategy {}, current run uses {}",
                rec.strategy, cfg.strategy
            )));
        }
        have.insert(key);
    }

    let missing: Vec<GridPoint> = points.into_iter().filter(|p| !have.contains(&p.key())).collect();
    let mut file = OpenOptions::new().read(true).write(true).open(path)?;
    drop_partial_tail(&mut file)?;
    let (todo, remaining) = limited(&missing, opts);
    let (done, failed) = run_points(todo, cfg, opts, &mut file)?;
    Ok(SweepSummary {
        points_done: done,
        points_failed: failed,
        points_skipped: have.len(),
        points_remaining: remaining,
        elapsed: start.elapsed(),
    })
}
