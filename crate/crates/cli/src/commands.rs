//! Subcommand implementations. Each returns `Ok(true)` on success, `Ok(false)`
//! when it ran but a requested check failed.

use std::fs;
use std::io::Write;
use std::path::{Path as FsPath, PathBuf};

use anyhow::{bail, Context, Result};
use serde::Serialize;

use fraclangevin_core::fbm::{ExactSampler, KernelSampler};
use fraclangevin_core::fractional::{estimate_ah, FractionalConfig, FractionalTransform};
use fraclangevin_core::hurst::{
    estimate_hurst_with, loglog_regression, rs_series_with, HurstEstimate, MeanConvention, DEFAULT_T_MIN,
};
use fraclangevin_core::langevin::{simulate_ou_exact, LangevinParams};
use fraclangevin_core::stats::sample_variance;
use fraclangevin_core::{KernelSpec, NoiseStream, Path, TimeGrid};

use crate::args::{
    Check, Cli, Command, EstimateAhArgs, EstimateHurstArgs, GridArgs, MeanArg, Report, SimulateFbmArgs,
    SimulateVelocityArgs, ValidateArgs,
};
use crate::checks::{run_check, CheckOutcome, CheckSettings};
use crate::config::{pick, FileConfig, Method};
use crate::csvio::{read_table_from, write_table, write_table_to, Table};

pub struct Io<'a> {
    pub stdout: &'a mut dyn Write,
    pub stderr: &'a mut dyn Write,
}

pub fn run(cli: &Cli, io: &mut Io<'_>) -> Result<bool> {
    let file = match &cli.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    match &cli.command {
        Command::SimulateFbm(a) => simulate_fbm(a, &file, io).map(|()| true),
        Command::SimulateVelocity(a) => simulate_velocity(a, &file, io).map(|()| true),
        Command::EstimateHurst(a) => estimate_hurst_cmd(a, &file, io).map(|()| true),
        Command::EstimateAh(a) => estimate_ah_cmd(a, &file, io).map(|()| true),
        Command::Validate(a) => validate(a, &file, io),
    }
}

struct GridSettings {
    grid: TimeGrid,
    paths: usize,
    seed: u64,
    out: Option<PathBuf>,
}

fn resolve_grid(args: &GridArgs, file: &FileConfig) -> Result<GridSettings> {
    let horizon = pick(args.horizon, file.horizon, 1.0);
    let steps = pick(args.steps.map(|s| s as usize), file.steps, 1024);
    let paths = pick(args.paths.map(|p| p as usize), file.paths, 1);
    if paths == 0 {
        bail!("paths must be at least 1");
    }
    let Some(seed) = args.seed.or(file.seed) else {
        bail!("a seed is required for simulation commands: pass --seed N or set \"seed\" in the config file");
    };
    let grid = TimeGrid::uniform(horizon, steps).context("invalid grid (horizon must be positive, steps at least 1)")?;
    Ok(GridSettings { grid, paths, seed, out: args.out.clone().or_else(|| file.out.clone()) })
}

fn resolve_hurst(flag: Option<f64>, file: &FileConfig) -> Result<KernelSpec> {
    let Some(h) = flag.or(file.hurst) else {
        bail!("--hurst is required");
    };
    KernelSpec::new(h).context("invalid Hurst index")
}

fn column_names(prefix: &str, count: usize) -> Vec<String> {
    if count == 1 {
        vec![prefix.to_owned()]
    } else {
        (0..count).map(|k| format!("{prefix}_{k}")).collect()
    }
}

fn emit_table(out: Option<&FsPath>, headers: &[String], columns: &[&[f64]], io: &mut Io<'_>) -> Result<()> {
    match out {
        Some(p) => write_table_to(Some(p), headers, columns),
        None => write_table(&mut *io.stdout, headers, columns),
    }
}

fn simulate_fbm(args: &SimulateFbmArgs, file: &FileConfig, io: &mut Io<'_>) -> Result<()> {
    let spec = resolve_hurst(args.hurst, file)?;
    let g = resolve_grid(&args.grid, file)?;
    let method = pick(args.method, file.method, Method::Exact);
    let streams = (0..g.paths as u64).map(|k| NoiseStream::new(g.seed, k));
    let paths: Vec<Vec<f64>> = match method {
        Method::Exact => {
            let sampler = ExactSampler::new(spec.hurst(), &g.grid)?;
            streams.map(|s| sampler.sample(s).into_values()).collect()
        }
        Method::Kernel => {
            let sampler = KernelSampler::new(&spec, &g.grid);
            streams.map(|s| sampler.sample(s).into_values()).collect()
        }
    };
    let mut headers = vec!["t".to_owned()];
    headers.extend(column_names("BH", paths.len()));
    let mut columns: Vec<&[f64]> = vec![g.grid.points()];
    columns.extend(paths.iter().map(Vec::as_slice));
    emit_table(g.out.as_deref(), &headers, &columns, io)?;

    if args.report == Some(Report::Variance) {
        if paths.len() < 2 {
            bail!("--report variance needs --paths of at least 2");
        }
        let ends: Vec<f64> = paths.iter().map(|p| *p.last().expect("nonempty path")).collect();
        let var = sample_variance(&ends);
        let se = var * (2.0 / (ends.len() - 1) as f64).sqrt();
        let horizon = g.grid.horizon();
        let exact = horizon.powf(2.0 * spec.hurst());
        writeln!(
            io.stderr,
            "Var[B^H({horizon})] = {var:.6} (standard error {se:.6}; exact value {exact:.6}; {} paths)",
            ends.len()
        )?;
    }
    Ok(())
}

fn simulate_velocity(args: &SimulateVelocityArgs, file: &FileConfig, io: &mut Io<'_>) -> Result<()> {
    let m = &args.model;
    let spec = resolve_hurst(m.hurst, file)?;
    let params = LangevinParams::new(
        pick(m.mass, file.mass, 1.0),
        pick(m.friction, file.friction, 1.0),
        pick(m.sigma, file.sigma, 1.0),
        pick(m.v0, file.v0, 1.0),
    )
    .context("invalid Langevin parameters")?;
    let amplitude = pick(m.ah, file.ah, 1.0);
    let g = resolve_grid(&args.grid, file)?;
    let transform = if spec.is_standard() {
        writeln!(io.stderr, "note: H = 1/2 has no fractional transform; writing the velocity only")?;
        None
    } else {
        Some(FractionalTransform::new(FractionalConfig::new(spec, amplitude)?, &g.grid))
    };

    let mut headers = vec!["t".to_owned()];
    let mut data: Vec<Vec<f64>> = Vec::new();
    let v_names = column_names("V", g.paths);
    let vh_names = column_names("VH", g.paths);
    for k in 0..g.paths {
        let v = simulate_ou_exact(&params, &g.grid, NoiseStream::new(g.seed, k as u64))?;
        headers.push(v_names[k].clone());
        if let Some(tr) = &transform {
            let out = tr.apply(&v)?;
            data.push(v.into_values());
            data.push(out.transformed.into_values());
            headers.push(vh_names[k].clone());
        } else {
            data.push(v.into_values());
        }
    }
    let mut columns: Vec<&[f64]> = vec![g.grid.points()];
    columns.extend(data.iter().map(Vec::as_slice));
    emit_table(g.out.as_deref(), &headers, &columns, io)
}

#[derive(Debug, Serialize)]
struct ColumnEstimate {
    column: String,
    hurst: f64,
    lambda: f64,
    r_squared: f64,
    points_used: usize,
}

#[derive(Debug, Serialize)]
struct HurstReport {
    t_min: usize,
    applied_to: &'static str,
    mean_convention: &'static str,
    estimates: Vec<ColumnEstimate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    mean_hurst: Option<f64>,
}

fn write_json<T: Serialize>(value: &T, out: Option<&FsPath>, io: &mut Io<'_>) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    writeln!(io.stdout, "{text}")?;
    if let Some(p) = out {
        fs::write(p, format!("{text}\n")).with_context(|| format!("cannot write {}", p.display()))?;
    }
    Ok(())
}

fn estimate_hurst_cmd(args: &EstimateHurstArgs, file: &FileConfig, io: &mut Io<'_>) -> Result<()> {
    let t_min = pick(args.t_min.map(|t| t as usize), file.t_min, DEFAULT_T_MIN);
    if t_min < 2 {
        bail!("t_min must be at least 2, got {t_min}");
    }
    let differenced = args.increments || file.increments.unwrap_or(false);
    let convention = match args.mean {
        Some(MeanArg::Full) => MeanConvention::FullSeries,
        _ => MeanConvention::Prefix,
    };
    let table = read_table_from(&args.input)?;
    let source = args.input.display().to_string();
    if args.rs_table {
        return regress_rs_table(&table, &source, t_min, args.out.as_deref(), io);
    }
    let selected = match &args.column {
        Some(name) => vec![table.index_of(name).with_context(|| format!("{source}: no column named '{name}'"))?],
        None => table.data_columns(),
    };
    if selected.is_empty() {
        bail!("{source}: no data column besides t");
    }
    let mut estimates = Vec::with_capacity(selected.len());
    for (n, &c) in selected.iter().enumerate() {
        let name = &table.headers[c];
        let raw = &table.columns[c];
        let series: Vec<f64> = if differenced { raw.windows(2).map(|w| w[1] - w[0]).collect() } else { raw.clone() };
        let est: HurstEstimate = estimate_hurst_with(&series, t_min, convention)
            .with_context(|| format!("{source}, column '{name}'"))?;
        if n == 0 {
            if let Some(p) = &args.rs_points {
                let rs = rs_series_with(&series, convention)?;
                let ts: Vec<f64> = rs.entries.iter().map(|e| e.0 as f64).collect();
                let vs: Vec<f64> = rs.entries.iter().map(|e| e.1).collect();
                write_table_to(Some(p), &["t".to_owned(), "rs".to_owned()], &[&ts, &vs])?;
            }
        }
        estimates.push(ColumnEstimate {
            column: name.clone(),
            hurst: est.hurst,
            lambda: est.lambda,
            r_squared: est.r_squared,
            points_used: est.points_used,
        });
    }
    if !differenced {
        writeln!(
            io.stderr,
            "note: R/S applied to the column values; pass --increments when the columns are fBm paths"
        )?;
    }
    let mean_hurst =
        (estimates.len() > 1).then(|| estimates.iter().map(|e| e.hurst).sum::<f64>() / estimates.len() as f64);
    let report = HurstReport {
        t_min,
        applied_to: if differenced { "increments" } else { "values" },
        mean_convention: match convention {
            MeanConvention::Prefix => "prefix",
            MeanConvention::FullSeries => "full",
        },
        estimates,
        mean_hurst,
    };
    write_json(&report, args.out.as_deref(), io)
}

fn regress_rs_table(table: &Table, source: &str, t_min: usize, out: Option<&FsPath>, io: &mut Io<'_>) -> Result<()> {
    let ts = table.column("t").with_context(|| format!("{source}: no column named 't'"))?;
    let rs = table.column("rs").with_context(|| format!("{source}: no column named 'rs'"))?;
    let points: Vec<(f64, f64)> = ts.iter().zip(rs).filter(|(t, _)| **t >= t_min as f64).map(|(&t, &r)| (t, r)).collect();
    let fit = loglog_regression(&points).with_context(|| format!("{source}: R/S points with t >= {t_min}"))?;
    let report = HurstReport {
        t_min,
        applied_to: "rs-table",
        mean_convention: "n/a",
        estimates: vec![ColumnEstimate {
            column: "rs".to_owned(),
            hurst: fit.slope,
            lambda: fit.intercept.exp(),
            r_squared: fit.r_squared,
            points_used: points.len(),
        }],
        mean_hurst: None,
    };
    write_json(&report, out, io)
}

#[derive(Debug, Serialize)]
struct RatioPoint {
    t: f64,
    ratio: f64,
}

#[derive(Debug, Serialize)]
struct AmplitudeReport {
    hurst: f64,
    ah: f64,
    points: usize,
    ratios: Vec<RatioPoint>,
}

/// The shared time column of two files, or an error naming the first row where they differ.
fn shared_times<'a>(a: &'a Table, a_name: &str, b: &Table, b_name: &str) -> Result<&'a [f64]> {
    let ta = a.time().with_context(|| format!("{a_name}: the first column must be 't'"))?;
    let tb = b.time().with_context(|| format!("{b_name}: the first column must be 't'"))?;
    for (i, (x, y)) in ta.iter().zip(tb).enumerate() {
        if (x - y).abs() > 1e-12 * x.abs().max(1.0) {
            bail!(
                "grids differ at data row {} ({a_name} line {}: t = {x}; {b_name} line {}: t = {y})",
                i + 1,
                a.lines[i],
                b.lines[i]
            );
        }
    }
    if ta.len() != tb.len() {
        bail!(
            "grids differ at data row {}: {a_name} has {} rows, {b_name} has {}",
            ta.len().min(tb.len()) + 1,
            ta.len(),
            tb.len()
        );
    }
    Ok(ta)
}

fn estimate_ah_cmd(args: &EstimateAhArgs, file: &FileConfig, io: &mut Io<'_>) -> Result<()> {
    let spec = resolve_hurst(args.hurst, file)?;
    if spec.is_standard() {
        bail!("A_H is undefined for H = 1/2");
    }
    let (obs_name, vel_name) = (args.observed.display().to_string(), args.velocity.display().to_string());
    let observed = read_table_from(&args.observed)?;
    let velocity = read_table_from(&args.velocity)?;
    let times = shared_times(&velocity, &vel_name, &observed, &obs_name)?;
    let grid = TimeGrid::new(times.to_vec()).with_context(|| format!("{vel_name}: invalid t column"))?;

    let obs_col = observed
        .index_of("VH")
        .or_else(|| observed.data_columns().last().copied())
        .with_context(|| format!("{obs_name}: no data column"))?;
    let vel_col = velocity
        .index_of("V")
        .or_else(|| velocity.data_columns().first().copied())
        .with_context(|| format!("{vel_name}: no data column"))?;
    let observed_path = Path::new(grid.clone(), observed.columns[obs_col].clone())?;
    let v = Path::new(grid, velocity.columns[vel_col].clone())?;

    let est = estimate_ah(&spec, &observed_path, &v)?;
    writeln!(
        io.stderr,
        "A_H = {} from {} times (column '{}' of {obs_name} against column '{}' of {vel_name})",
        est.amplitude,
        est.times.len(),
        observed.headers[obs_col],
        velocity.headers[vel_col]
    )?;
    let report = AmplitudeReport {
        hurst: spec.hurst(),
        ah: est.amplitude,
        points: est.times.len(),
        ratios: est.times.iter().zip(&est.ratios).map(|(&t, &ratio)| RatioPoint { t, ratio }).collect(),
    };
    write_json(&report, args.out.as_deref(), io)
}

#[derive(Debug, Serialize)]
struct ValidateSummary {
    passed: bool,
    checks: Vec<CheckOutcome>,
}

fn validate(args: &ValidateArgs, file: &FileConfig, io: &mut Io<'_>) -> Result<bool> {
    let checks = if args.check.is_empty() {
        vec![Check::Covariance, Check::Qv, Check::Donsker, Check::Residual]
    } else {
        args.check.clone()
    };
    let settings = CheckSettings {
        steps: args.steps.map(|s| s as usize).or(file.steps),
        horizon: args.horizon.or(file.horizon),
        paths: pick(args.paths.map(|p| p as usize), file.paths, 2000),
        seed: pick(args.seed, file.seed, 1),
        hurst: pick(args.hurst, file.hurst, 0.7),
    };
    let mut outcomes = Vec::with_capacity(checks.len());
    for check in checks {
        let outcome = run_check(check, &settings)?;
        writeln!(
            io.stderr,
            "{} {}: {:.6e} (tolerance {}) {}",
            if outcome.passed { "PASS" } else { "FAIL" },
            outcome.name,
            outcome.value,
            outcome.tolerance,
            outcome.detail
        )?;
        outcomes.push(outcome);
    }
    let summary = ValidateSummary { passed: outcomes.iter().all(|o| o.passed), checks: outcomes };
    writeln!(io.stdout, "{}", serde_json::to_string_pretty(&summary)?)?;
    Ok(summary.passed)
}
