use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use beamloc::beam_model::beamwidth_3db;
use beamloc::harness::export::{
    write_cdf, write_levels, write_samples, write_sweep, write_track, Provenance, Summary,
};
use beamloc::harness::{
    iteration_rng, level_sweep, noise_sweep, run_campaign, run_tracking, sample_rx, CodebookChoice,
    Scenario,
};
use beamloc::localizer::{is_success, RxGroundTruth, SearchMode};
use log::info;
use serde::Serialize;
use serde_json::json;

use crate::config::RunConfig;
use crate::{CliError, ScenarioArgs};

struct Resolved {
    scenario: Scenario<f64>,
    n: usize,
    seed: u64,
}

fn resolve(args: &ScenarioArgs, default_n: usize) -> Result<Resolved, CliError> {
    let mut base = match &args.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    match (&args.preset, &base.preset) {
        (Some(flag), Some(file)) if flag != file => {
            return Err(CliError::Config(format!(
                "--preset {flag} conflicts with preset {file:?} named in the config file"
            )))
        }
        (Some(flag), _) => base.preset = Some(flag.clone()),
        (None, None) if args.config.is_none() => {
            return Err(CliError::Config("give --preset or --config".into()))
        }
        _ => {}
    }
    let flags = RunConfig {
        mode: args.mode,
        codebook: args.codebook,
        noise_dbm: args.noise_dbm,
        n: args.n,
        seed: args.seed,
        ..RunConfig::default()
    };
    let cfg = flags.over(base.resolve_preset()?);
    let n = cfg.n.unwrap_or(default_n);
    if n == 0 {
        return Err(CliError::Config("n must be at least 1".into()));
    }
    Ok(Resolved {
        scenario: cfg.scenario()?,
        n,
        seed: cfg.seed.unwrap_or(0),
    })
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })
}

fn out_dir(dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|source| CliError::Io {
        path: dir.to_path_buf(),
        source,
    })
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, value).map_err(beamloc::Error::from)?;
    writeln!(w)
        .and_then(|_| w.flush())
        .map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })
}

fn print_json<T: Serialize>(value: &T) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).map_err(beamloc::Error::from)?;
    println!("{text}");
    Ok(())
}

pub fn codebook(args: &ScenarioArgs, out: Option<&Path>) -> Result<(), CliError> {
    let s = resolve(args, 1)?.scenario;
    let dir = s.direction_codebook()?;
    let focus = s.focus_codebook()?;
    let lambda = dir.geometry().wavelength();

    let kind = match s.codebook {
        CodebookChoice::Bfr => "bfr",
        CodebookChoice::Rbfr => "rbfr",
    };
    println!("direction codebook ({kind}), {} levels", dir.depth());
    println!(
        "{:>5} {:>6} {:>12} {:>14} {:>12} {:>12}",
        "level", "beams", "footprint_m", "beamwidth_deg", "first_deg", "last_deg"
    );
    for l in 1..=dir.depth() {
        let level = dir.level(l);
        let (first, last) = (&level[0], &level[level.len() - 1]);
        println!(
            "{:>5} {:>6} {:>12.4} {:>14.3} {:>12.3} {:>12.3}",
            l,
            level.len(),
            first.footprint,
            beamwidth_3db(first.footprint, lambda)?.to_degrees(),
            first.theta_center.to_degrees(),
            last.theta_center.to_degrees(),
        );
    }
    println!();
    println!(
        "focus codebook, {} levels, d0 = {} m, alpha = {}",
        focus.depth(),
        focus.max_distance(),
        focus.alpha()
    );
    println!(
        "{:>5} {:>6} {:>10} {:>12} {:>12} {:>12}",
        "level", "cells", "r_max_m", "first_df_m", "last_df_m", "footprint_m"
    );
    for l in 1..=focus.depth() {
        let level = focus.level(l);
        let (first, last) = (&level[0], &level[level.len() - 1]);
        println!(
            "{:>5} {:>6} {:>10.4} {:>12.4} {:>12.4} {:>12.4}",
            l,
            level.len(),
            first.major_radius,
            first.focal_distance,
            last.focal_distance,
            first.footprint,
        );
    }

    if let Some(path) = out {
        write_json(
            path,
            &json!({ "scenario": s.name, "direction": dir, "focus": focus }),
        )?;
    }
    Ok(())
}

pub fn localize(
    args: &ScenarioArgs,
    position: Option<(f64, f64)>,
    trace_path: Option<&Path>,
) -> Result<(), CliError> {
    let Resolved {
        scenario: s, seed, ..
    } = resolve(args, 1)?;
    let localizer = s.localizer()?;
    let mut rng = iteration_rng(seed, 0);
    let rx = match position {
        Some((theta_deg, d)) => RxGroundTruth::new(theta_deg.to_radians(), d)?,
        None => sample_rx(&mut rng, &s.area()?),
    };
    let (est, trace) = localizer.localize(&rx, s.mode, &mut rng)?;
    if let Some(path) = trace_path {
        let mut w = create(path)?;
        w.write_all(trace.to_json_lines()?.as_bytes())
            .and_then(|_| w.flush())
            .map_err(|source| CliError::Io {
                path: path.to_path_buf(),
                source,
            })?;
    }
    print_json(&json!({
        "scenario": s.name,
        "mode": s.mode,
        "seed": seed,
        "rx": { "theta_deg": rx.theta.to_degrees(), "distance_m": rx.distance },
        "estimate": {
            "theta_deg": est.theta.to_degrees(),
            "distance_m": est.distance,
            "x_m": est.position.x,
            "z_m": est.position.z,
        },
        "error_m": est.error,
        "resolution_m": s.resolution(),
        "success": is_success(est.error, s.resolution()),
        "pilots": trace.pilots(),
        "trace": trace.records(),
    }))
}

pub fn simulate(args: &ScenarioArgs, out: Option<&Path>) -> Result<(), CliError> {
    let Resolved {
        scenario: s,
        n,
        seed,
    } = resolve(args, 10_000)?;
    info!("{}: {n} localizations, seed {seed}", s.name);
    let campaign = run_campaign(&s, n, seed)?;
    let summary = Summary::new(&s, n, seed, &campaign.stats);
    if let Some(dir) = out {
        out_dir(dir)?;
        write_cdf(create(&dir.join("cdf.csv"))?, &campaign.stats)?;
        write_samples(create(&dir.join("samples.csv"))?, &campaign)?;
        write_json(&dir.join("summary.json"), &summary)?;
    }
    print_json(&summary)
}

#[derive(Serialize)]
struct SweepSummary<P> {
    scenario: String,
    mode: SearchMode,
    codebook: CodebookChoice,
    n: usize,
    seed: u64,
    points: P,
    provenance: Provenance<f64>,
}

impl<P> SweepSummary<P> {
    fn new(s: &Scenario<f64>, n: usize, seed: u64, points: P) -> Self {
        Self {
            scenario: s.name.clone(),
            mode: s.mode,
            codebook: s.codebook,
            n,
            seed,
            points,
            provenance: Provenance::new(s, seed),
        }
    }
}

#[derive(Serialize)]
struct LevelRow {
    focus_levels: usize,
    resolution_m: f64,
    success: f64,
    mean_m: f64,
    p999_m: f64,
    mean_pilots: f64,
}

/// `start:step:stop`, inclusive of `stop` when it lies on the grid.
pub fn parse_range(spec: &str) -> Result<Vec<f64>, CliError> {
    let bad = || CliError::Config(format!("expected start:step:stop, got {spec:?}"));
    let parts: Vec<f64> = spec
        .split(':')
        .map(|p| p.trim().parse::<f64>().map_err(|_| bad()))
        .collect::<Result<_, _>>()?;
    let [start, step, stop] = parts[..] else {
        return Err(bad());
    };
    if !(start.is_finite() && step.is_finite() && stop.is_finite()) || step == 0.0 {
        return Err(bad());
    }
    let span = (stop - start) / step;
    if span < -1e-9 {
        return Err(CliError::Config(format!(
            "step {step} never reaches {stop} from {start}"
        )));
    }
    let count = (span + 1e-9).floor() as usize + 1;
    if count > 10_000 {
        return Err(CliError::Config(format!(
            "{count} sweep points is too many"
        )));
    }
    Ok((0..count).map(|i| start + i as f64 * step).collect())
}

pub fn sweep(
    args: &ScenarioArgs,
    noise: Option<&str>,
    levels: Option<&[usize]>,
    out: Option<&Path>,
) -> Result<(), CliError> {
    let Resolved {
        scenario: s,
        n,
        seed,
    } = resolve(args, 2_000)?;
    if let Some(dir) = out {
        out_dir(dir)?;
    }
    if let Some(spec) = noise {
        let grid = parse_range(spec)?;
        info!(
            "{}: noise sweep over {} points, {n} iterations each",
            s.name,
            grid.len()
        );
        let points = noise_sweep(&s, &grid, n, seed)?;
        let summary = SweepSummary::new(&s, n, seed, points);
        if let Some(dir) = out {
            write_sweep(create(&dir.join("sweep.csv"))?, &summary.points)?;
            write_json(&dir.join("summary.json"), &summary)?;
        }
        print_json(&summary)
    } else {
        let depths = levels.unwrap_or_default();
        if depths.is_empty() {
            return Err(CliError::Config("--levels needs at least one depth".into()));
        }
        info!(
            "{}: focus depth sweep over {depths:?}, {n} iterations each",
            s.name
        );
        let points = level_sweep(&s, depths, n, seed)?;
        if let Some(dir) = out {
            write_levels(create(&dir.join("levels.csv"))?, &points)?;
        }
        let rows: Vec<LevelRow> = points
            .iter()
            .map(|p| LevelRow {
                focus_levels: p.focus_levels,
                resolution_m: p.stats.resolution,
                success: p.stats.success_probability,
                mean_m: p.stats.mean,
                p999_m: p.stats.p999,
                mean_pilots: p.stats.mean_pilots,
            })
            .collect();
        let summary = SweepSummary::new(&s, n, seed, rows);
        if let Some(dir) = out {
            write_json(&dir.join("summary.json"), &summary)?;
        }
        print_json(&summary)
    }
}

pub fn track(args: &ScenarioArgs, out: Option<&Path>) -> Result<(), CliError> {
    let Resolved {
        scenario: s,
        n,
        seed,
    } = resolve(args, 1_000)?;
    info!("{}: {n} trajectories, seed {seed}", s.name);
    let campaign = run_tracking(&s, n, seed)?;
    let summary = Summary::new(&s, n, seed, &campaign.stats);
    if let Some(dir) = out {
        out_dir(dir)?;
        write_track(create(&dir.join("track.csv"))?, &campaign.runs)?;
        write_json(&dir.join("summary.json"), &summary)?;
    }
    print_json(&summary)
}
