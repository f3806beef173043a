//! The four subcommands. Each returns `Ok(())` or a [`CliError`] that maps to
//! the process exit code.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use fracrd::convergence::{self, Example, Level};
use fracrd::etd::StepperContext;
use fracrd::grid::BoundaryCondition;
use fracrd::models::{grid_for, initial_state};
use fracrd::oracle::{OracleReport, MAX_DENSE_N};
use fracrd::stability::{self, MIN_THETA_SAMPLES};

use crate::config::{parse_config, SimulationConfig};
use crate::output::{summary_header, summary_row, Heatmap, SnapshotFile};
use crate::{io_err, CliError};

/// Files produced by [`run`].
#[derive(Debug, Default, Clone, PartialEq)]
pub struct RunOutputs {
    pub snapshots: Vec<PathBuf>,
    pub images: Vec<PathBuf>,
    pub summary: PathBuf,
}

pub fn run_file(path: &Path) -> Result<RunOutputs, CliError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    run(&parse_config(&text)?)
}

/// Integrates the configured model, writing `snapshot_<step>.frrd` for every
/// requested time and the final state, optional `snapshot_<step>_<species>.pgm`
/// images and `summary.csv`.
pub fn run(cfg: &SimulationConfig) -> Result<RunOutputs, CliError> {
    let model: Arc<dyn fracrd::ReactionModel> = Arc::from(cfg.build_model()?);
    let grid = grid_for(model.as_ref(), cfg.n, cfg.bc)?;
    let species = model.species();
    let dir = &cfg.out_dir;
    fs::create_dir_all(dir).map_err(io_err(dir))?;

    let summary = dir.join("summary.csv");
    let mut table = csv::Writer::from_path(&summary)?;
    table.write_record(summary_header(&species))?;

    let mut ctx = StepperContext::new(&grid, model.clone(), cfg.tau)?;
    let mut outputs = RunOutputs {
        summary: summary.clone(),
        ..Default::default()
    };
    let mut failure: Option<CliError> = None;
    let result = ctx.integrate_with(
        initial_state(model.as_ref(), &grid),
        cfg.t0,
        cfg.t_end,
        &cfg.snapshots,
        |info, state| {
            let attempt = (|| -> Result<(), CliError> {
                if info.step % cfg.summary_every == 0 || info.last {
                    table.write_record(summary_row(info.time, state))?;
                }
                if info.snapshot || info.last {
                    let path = dir.join(format!("snapshot_{:08}.frrd", info.step));
                    SnapshotFile::from_state(state, &species, info.time)
                        .write(&path)
                        .map_err(io_err(&path))?;
                    outputs.snapshots.push(path);
                    if cfg.pgm {
                        for (sp, field) in species.iter().zip(state.species()) {
                            let img =
                                dir.join(format!("snapshot_{:08}_{}.pgm", info.step, sp.name));
                            Heatmap::from_field(field)
                                .write(&img)
                                .map_err(io_err(&img))?;
                            outputs.images.push(img);
                        }
                    }
                }
                Ok(())
            })();
            attempt.map_err(|e| {
                failure = Some(e);
                fracrd::Error::Model {
                    model: model.name().into(),
                    reason: "output failed".into(),
                }
            })
        },
    );
    table.flush().map_err(io_err(&summary))?;
    if let Some(e) = failure {
        return Err(e);
    }
    result?;
    Ok(outputs)
}

pub fn parse_bc(text: &str) -> Result<BoundaryCondition, CliError> {
    text.parse()
        .map_err(|e: fracrd::Error| CliError::Usage(e.to_string()))
}

/// Refinement table as CSV: `h, tau, max_error, order, wall_seconds`.
pub fn converge(
    example: &str,
    alpha: f64,
    bc: Option<BoundaryCondition>,
    levels: usize,
    out: &mut impl Write,
) -> Result<Vec<Level>, CliError> {
    let example = Example::from_name(example).map_err(|e| CliError::Usage(e.to_string()))?;
    if levels == 0 {
        return Err(CliError::Usage("--levels must be at least 1".into()));
    }
    let rows = convergence::study(example, alpha, bc.unwrap_or(example.default_bc()), levels)?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["h", "tau", "max_error", "order", "wall_seconds"])?;
    for r in &rows {
        w.write_record([
            format!("{}", r.h),
            format!("{}", r.tau),
            format!("{:e}", r.max_error),
            r.order.map(|o| format!("{o:.4}")).unwrap_or_default(),
            format!("{:.3}", r.wall_seconds),
        ])?;
    }
    w.flush().map_err(|e| CliError::Io {
        path: "<converge output>".into(),
        source: e,
    })?;
    Ok(rows)
}

/// Stability boundaries as CSV rows `y, theta, re_x, im_x`, one loop after
/// another.
pub fn stability(ys: &[f64], n_theta: usize, out: &Path) -> Result<usize, CliError> {
    if n_theta < MIN_THETA_SAMPLES {
        return Err(CliError::Usage(format!(
            "--ntheta must be at least {MIN_THETA_SAMPLES}"
        )));
    }
    let ys: Vec<f64> = if ys.is_empty() {
        stability::DEFAULT_Y.to_vec()
    } else {
        ys.to_vec()
    };
    if let Some(bad) = ys.iter().find(|y| !(**y <= 0.0)) {
        return Err(CliError::Usage(format!("y must be <= 0, got {bad}")));
    }
    let mut w = csv::Writer::from_path(out)?;
    w.write_record(["y", "theta", "re_x", "im_x"])?;
    let mut rows = 0;
    for &y in &ys {
        let curve = stability::stability_boundary(y, n_theta)?;
        for p in curve.points() {
            w.write_record([
                format!("{y}"),
                format!("{:.12}", p.theta),
                format!("{:.12e}", p.x.re),
                format!("{:.12e}", p.x.im),
            ])?;
            rows += 1;
        }
    }
    w.flush().map_err(io_err(out))?;
    Ok(rows)
}

/// Runs the dense cross-checks and prints one line per check.
pub fn oracle_check(
    n: usize,
    bc: BoundaryCondition,
    alpha: f64,
    out: &mut impl Write,
) -> Result<OracleReport, CliError> {
    if n > MAX_DENSE_N {
        return Err(CliError::Usage(format!(
            "--n {n} exceeds the dense limit {MAX_DENSE_N}"
        )));
    }
    let report = OracleReport::run(n, bc, alpha, 0)?;
    let io = |e| CliError::Io {
        path: "<stdout>".into(),
        source: e,
    };
    writeln!(out, "oracle N={n} bc={bc} alpha={alpha}").map_err(io)?;
    writeln!(
        out,
        "eigenvalue deviation     {:.3e}",
        report.eigen_deviation
    )
    .map_err(io)?;
    writeln!(
        out,
        "fractional apply dev.    {:.3e}",
        report.apply_deviation
    )
    .map_err(io)?;
    writeln!(
        out,
        "etd step deviation       {:.3e}",
        report.step_deviation
    )
    .map_err(io)?;
    writeln!(
        out,
        "etd local order          {:.3} (ratios {:?})",
        report.order.slope,
        report
            .order
            .ratios()
            .iter()
            .map(|r| (r * 100.0).round() / 100.0)
            .collect::<Vec<_>>()
    )
    .map_err(io)?;
    let breaches = report.breaches();
    if !breaches.is_empty() {
        return Err(CliError::OracleBreach(breaches.join(", ")));
    }
    Ok(report)
}
