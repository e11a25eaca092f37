use std::fs::{self, File};
use std::io::{self, BufWriter};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use harvestlab::analysis::{
    compare_strategies, extract_region, region_area, region_similarity, slice_axes, write_region_csv, AnalysisError,
    MaskKind,
};
use harvestlab::physics::{self, HarvestParams, PhysicalParams, PhysicsError, KAPPA_X};
use harvestlab::plot::{render_svg, PlotStyle};
use harvestlab::sweep::{self, Axis, GridSpec, SweepError, SweepOptions, SweepRecord};
use serde_json::json;

use crate::{CompareArgs, PointArgs, RegionArgs, SweepArgs};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Exit {
    Success = 0,
    Usage = 2,
    NotConverged = 3,
    Io = 4,
}

impl From<Exit> for ExitCode {
    fn from(e: Exit) -> Self {
        ExitCode::from(e as u8)
    }
}

pub struct Failure {
    pub code: Exit,
    pub message: String,
}

fn fail(code: Exit, message: impl ToString) -> Failure {
    Failure { code, message: message.to_string() }
}

impl From<PhysicsError> for Failure {
    fn from(e: PhysicsError) -> Self {
        match e {
            PhysicsError::InvalidParams { .. } => fail(Exit::Usage, e),
            PhysicsError::Quadrature(_) => fail(Exit::NotConverged, e),
        }
    }
}

impl From<SweepError> for Failure {
    fn from(e: SweepError) -> Self {
        let code = match &e {
            SweepError::SinkWriteFailure(_) | SweepError::Io(_) => Exit::Io,
            SweepError::Evaluation { .. } => Exit::NotConverged,
            _ => Exit::Usage,
        };
        fail(code, e)
    }
}

fn io_failure(path: &Path) -> impl Fn(io::Error) -> Failure + '_ {
    move |e| fail(Exit::Io, format!("{}: {e}", path.display()))
}

type Outcome = Result<Exit, Failure>;

/// Resolves the dimensionless point from either flag set.
fn resolve_params(args: &PointArgs) -> Result<(HarvestParams, Option<PhysicalParams>), Failure> {
    let physical = [args.kappa, args.separation, args.omega, args.sigma];
    if physical.iter().any(Option::is_some) {
        let [Some(kappa), Some(separation), Some(omega), Some(sigma)] = physical else {
            return Err(fail(Exit::Usage, "physical input needs all of --kappa, --separation, --omega, --sigma"));
        };
        let phys = PhysicalParams { kappa, separation, omega, sigma };
        return Ok((phys.to_dimensionless(args.eta0)?, Some(phys)));
    }
    let missing: Vec<&str> = [("--c1", args.c1), ("--c2", args.c2), ("--c3", args.c3)]
        .iter()
        .filter(|(_, v)| v.is_none())
        .map(|(n, _)| *n)
        .collect();
    if !missing.is_empty() {
        return Err(fail(Exit::Usage, format!("missing {}", missing.join(", "))));
    }
    let p = HarvestParams::with_eta0(args.c1.unwrap(), args.c2.unwrap(), args.c3.unwrap(), args.eta0)?;
    Ok((p, None))
}

pub fn point(args: PointArgs) -> Outcome {
    let cfg = args.quad.config();
    cfg.validate().map_err(|e| fail(Exit::Usage, e))?;
    let (p, physical) = resolve_params(&args)?;
    let obs = physics::observe(&p, &cfg)?;
    let (e_sp, x_sp) = (physics::eval_e_sp(&p), physics::eval_x_sp(&p));

    if args.json {
        let mut v = json!({
            "c1": p.c1(), "c2": p.c2(), "c3": p.c3(), "eta0": p.eta0(),
            "strategy": cfg.strategy.tag(),
            "E": obs.e, "X_re": obs.x.re, "X_im": obs.x.im, "X_abs": obs.x.norm(),
            "N": obs.n, "signed_N": obs.signed_n(),
            "err_E": obs.err_e, "err_X": obs.err_x,
            "converged_E": obs.e_meta.converged, "converged_X": obs.x_meta.converged,
            "converged": obs.converged,
            "n_evals": obs.n_evals(),
            "E_sp": e_sp, "X_sp": x_sp, "kappa_X": KAPPA_X,
            "sp_entangled": physics::sp_entangled(p.c1(), p.c2()),
        });
        if let Some(ph) = physical {
            v["physical"] = json!({
                "kappa": ph.kappa, "separation": ph.separation, "omega": ph.omega, "sigma": ph.sigma,
            });
        }
        println!("{v}");
    } else {
        if let Some(ph) = physical {
            println!(
                "physical  kappa = {}, L = {}, omega = {}, sigma = {}  ->  c1 = {}, c2 = {}, c3 = {}",
                ph.kappa,
                ph.separation,
                ph.omega,
                ph.sigma,
                p.c1(),
                p.c2(),
                p.c3()
            );
        }
        let row = |name: &str, v: f64| println!("{name:<9} = {v:.6}  ({v:.16e})");
        println!("point     c1 = {}, c2 = {}, c3 = {}, eta0 = {}", p.c1(), p.c2(), p.c3(), p.eta0());
        println!("strategy  {}", cfg.strategy);
        row("E", obs.e);
        row("X_re", obs.x.re);
        row("X_im", obs.x.im);
        row("|X|", obs.x.norm());
        row("N", obs.n);
        row("|X| - E", obs.signed_n());
        println!("err_E     = {:.3e}  converged = {}", obs.err_e, obs.e_meta.converged);
        println!("err_X     = {:.3e}  converged = {}", obs.err_x, obs.x_meta.converged);
        row("E_sp", e_sp);
        row("X_sp", x_sp);
        println!("|X|/X_sp  = {:.6}  (large-c3 limit {KAPPA_X})", obs.x.norm() / x_sp);
        println!("sp region = {}", physics::sp_entangled(p.c1(), p.c2()));
    }
    if obs.converged {
        Ok(Exit::Success)
    } else {
        eprintln!("warning: integration did not reach the requested tolerance");
        Ok(Exit::NotConverged)
    }
}

fn grid_spec(args: &SweepArgs) -> GridSpec {
    let mut spec = GridSpec {
        c1: Axis::new(args.c1_start, args.c1_stop, args.c1_step),
        c2: Axis::new(args.c2_start, args.c2_stop, args.c2_step),
        c3: Axis::new(args.c3_start, args.c3_stop, args.c3_step),
    };
    if let Some(n) = args.coarse {
        spec = spec.coarsen(n as usize);
    }
    if let Some(c3) = args.c3_only {
        spec = spec.with_c3(c3);
    }
    spec
}

pub fn sweep(args: SweepArgs) -> Outcome {
    let cfg = args.quad.config();
    cfg.validate().map_err(|e| fail(Exit::Usage, e))?;
    let spec = grid_spec(&args);
    spec.validate()?;
    let workers = args
        .workers
        .map(|w| w as usize)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    let opts = SweepOptions {
        workers,
        record_timing: !args.no_timing,
        retry_unconverged: args.retry_unconverged,
        max_points: args.max_points,
    };
    eprintln!(
        "grid {} × {} × {} = {} points, strategy {}, {} worker(s)",
        spec.c1.len(),
        spec.c2.len(),
        spec.c3.len(),
        spec.len(),
        cfg.strategy,
        workers
    );
    let summary = if args.resume {
        sweep::resume_sweep(&spec, &cfg, &opts, &args.out)?
    } else {
        let file = File::create(&args.out).map_err(io_failure(&args.out))?;
        sweep::run_sweep(&spec, &cfg, &opts, &mut BufWriter::new(file))?
    };
    println!(
        "done = {}, failed = {}, skipped = {}, remaining = {}, elapsed = {:.3} s",
        summary.points_done,
        summary.points_failed,
        summary.points_skipped,
        summary.points_remaining,
        summary.elapsed.as_secs_f64()
    );
    if summary.points_done == 0 && summary.points_skipped == spec.len() {
        println!("skipped = all");
    }
    Ok(if summary.points_failed > 0 { Exit::NotConverged } else { Exit::Success })
}

fn read_records(path: &Path) -> Result<Vec<SweepRecord>, Failure> {
    sweep::read_records(path).map_err(|e| match e {
        SweepError::Io(io) => fail(Exit::Io, format!("{}: {io}", path.display())),
        other => fail(Exit::Usage, format!("{}: {other}", path.display())),
    })
}

fn analysis_failure(e: AnalysisError) -> Failure {
    fail(Exit::Usage, e)
}

pub const DEFAULT_SLICES: [f64; 5] = [0.5, 1.5, 2.5, 3.5, 4.5];

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), Failure> {
    fs::write(path, bytes).map_err(io_failure(path))
}

pub fn region(args: RegionArgs) -> Outcome {
    let style = PlotStyle {
        cell_px: args.cell_px,
        sp_color: args.sp_color.clone(),
        numeric_color: args.numeric_color.clone(),
        overlay_alpha: args.overlay_alpha,
    };
    style.validate().map_err(|e| fail(Exit::Usage, e))?;
    let slices = if args.c3.is_empty() { DEFAULT_SLICES.to_vec() } else { args.c3.clone() };
    if slices.len() > 1 && (args.csv.is_some() || args.svg.is_some()) {
        return Err(fail(Exit::Usage, "--csv and --svg need exactly one --c3"));
    }
    let records = read_records(&args.records)?;

    for &c3 in &slices {
        let (c1, c2) = slice_axes(&records, c3)
            .ok_or_else(|| fail(Exit::Usage, format!("no records at c3 = {c3} in {}", args.records.display())))?;
        let grid = extract_region(&records, &c1, &c2, c3).map_err(analysis_failure)?;

        let mut csv = Vec::new();
        write_region_csv(&grid, &mut csv).map_err(|e| fail(Exit::Io, e))?;
        let svg = render_svg(&grid, &style).map_err(|e| fail(Exit::Usage, e))?;
        let stem = args.out_dir.join(format!("region_c3_{c3}"));
        let csv_path = args.csv.clone().unwrap_or_else(|| with_ext(&stem, "csv"));
        let svg_path = args.svg.clone().unwrap_or_else(|| with_ext(&stem, "svg"));
        write_file(&csv_path, &csv)?;
        write_file(&svg_path, svg.as_bytes())?;

        let jaccard = region_similarity(&grid.numeric_mask, &grid.sp_mask).map_err(analysis_failure)?;
        println!(
            "c3 = {c3}: {} × {} cells, numeric area = {:.6}, sp area = {:.6}, jaccard = {jaccard:.6}, boundary-uncertain = {}  -> {}, {}",
            grid.c1_axis.len(),
            grid.c2_axis.len(),
            region_area(&grid, MaskKind::Numeric),
            region_area(&grid, MaskKind::StationaryPhase),
            grid.boundary_uncertain.count(),
            csv_path.display(),
            svg_path.display()
        );
    }
    Ok(Exit::Success)
}

/// Appends an extension; `with_extension` would replace the `.5` in `region_c3_4.5`.
fn with_ext(stem: &Path, ext: &str) -> PathBuf {
    let mut s = stem.as_os_str().to_owned();
    s.push(".");
    s.push(ext);
    PathBuf::from(s)
}

pub fn compare(args: CompareArgs) -> Outcome {
    let a = read_records(&args.a)?;
    let b = read_records(&args.b)?;
    let d = compare_strategies(&a, &b).map_err(analysis_failure)?;
    if args.json {
        println!(
            "{}",
            json!({
                "max_rel_diff_X": d.max_rel_diff_x,
                "max_rel_diff_N": d.max_rel_diff_n,
                "worst_point": [d.worst_point.0, d.worst_point.1, d.worst_point.2],
                "worst_point_N": [d.worst_point_n.0, d.worst_point_n.1, d.worst_point_n.2],
                "n_compared": d.n_compared,
            })
        );
    } else {
        let pt = |p: (f64, f64, f64)| format!("(c1 = {:.6}, c2 = {:.6}, c3 = {:.6})", p.0, p.1, p.2);
        println!("compared       {} points", d.n_compared);
        println!("max_rel_diff_X = {:.6e}  at {}", d.max_rel_diff_x, pt(d.worst_point));
        println!("max_rel_diff_N = {:.6e}  at {}", d.max_rel_diff_n, pt(d.worst_point_n));
        println!("rel diff       = |a - b| / max(|a|, |b|, 1e-300), with N taken as the signed |X| - E");
    }
    Ok(Exit::Success)
}
