use std::collections::BTreeMap;
use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

use etc_core::explorer::{
    audit_theta, evaluate, explore as run_exploration, random_search_baseline, sample_theta_cells,
    stream_rng, Grid, GridSets, RunStatus, Stream,
};
use etc_core::num_fmt::format_float;
use etc_core::RunConfig;

use crate::bundle::{self, path_in, BaselineMeta, RunMeta};
use crate::error::{CliError, Result, EXIT_OK, EXIT_SAFETY_VIOLATION, EXIT_VERIFY_FAILED};
use crate::RunArgs;

/// Loads the configuration named by `args` and applies command-line overrides.
pub fn resolve_config(args: &RunArgs) -> Result<RunConfig> {
    let mut cfg = match (&args.config, &args.preset) {
        (Some(path), _) => bundle::load_config(path)?,
        (None, Some(name)) => RunConfig::preset(name).ok_or_else(|| {
            CliError::Usage(format!("unknown preset `{name}` (available: paper_iv)"))
        })?,
        (None, None) => {
            return Err(CliError::Usage(
                "either --config or --preset is required".into(),
            ))
        }
    };
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(r) = args.grid_res {
        let dim = cfg.parameter_space.grid_resolution.len();
        cfg.parameter_space.grid_resolution = vec![r; dim];
    }
    if let Some(h) = args.horizon {
        cfg.simulation.horizon = h;
    }
    if let Some(dt) = args.dt {
        cfg.simulation.dt = dt;
    }
    if let Some(n) = args.n_exp {
        cfg.exploration.n_exp = n;
    }
    if let Some(n) = args.n_init {
        cfg.exploration.n_init = n;
    }
    cfg.validate()?;
    Ok(cfg)
}

pub fn explore(args: &RunArgs) -> Result<i32> {
    let cfg = resolve_config(args)?;
    let out = &args.out;
    let outcome = run_exploration(&cfg)?;

    bundle::write_text(&path_in(out, bundle::CONFIG_FILE), &cfg.to_toml_string())?;
    bundle::write_lines(
        &path_in(out, bundle::INITIAL_LOG),
        bundle::INITIAL_LOG_HEADER,
        bundle::initial_log_lines(&outcome.initial),
    )?;
    bundle::write_lines(
        &path_in(out, bundle::RUN_LOG),
        bundle::RUN_LOG_HEADER,
        bundle::run_log_lines(&outcome.records),
    )?;
    bundle::write_lines(
        &path_in(out, bundle::GRID_SETS),
        bundle::GRID_SETS_HEADER,
        bundle::grid_sets_lines(&outcome.sets),
    )?;

    if cfg.output.dump_trajectories {
        for rec in &outcome.records {
            let eval = evaluate(&cfg, &rec.theta)?;
            let path = out
                .join(bundle::TRAJECTORY_DIR)
                .join(format!("episode_{:04}.csv", rec.j));
            if let Some(parent) = path.parent() {
                std::fs::create_dir_all(parent).map_err(|e| CliError::io(parent, e))?;
            }
            let file = File::create(&path).map_err(|e| CliError::io(&path, e))?;
            eval.trajectory
                .write_csv(BufWriter::new(file), cfg.output.trajectory_decimation)
                .map_err(|e| CliError::io(&path, e))?;
        }
    }

    let status = match outcome.status {
        RunStatus::Compliant => "compliant",
        RunStatus::SafetyViolated => "safety_violated",
    };
    let meta = RunMeta {
        seed: cfg.seed,
        config_hash: bundle::config_hash(&cfg),
        status: status.into(),
        n_init: cfg.exploration.n_init,
        n_exp: cfg.exploration.n_exp,
        size_theta_s: outcome.sets.size_theta_s(),
        size_theta: outcome.sets.size_theta(),
        warnings: outcome.warnings.iter().map(ToString::to_string).collect(),
    };
    bundle::write_json(&path_in(out, bundle::RUN_META), &meta)?;

    eprintln!(
        "explore: {} iterations, |Theta_s| = {}, |Theta| = {}, status {status}",
        outcome.records.len(),
        meta.size_theta_s,
        meta.size_theta
    );
    match outcome.status {
        RunStatus::Compliant => Ok(EXIT_OK),
        RunStatus::SafetyViolated => {
            for w in &outcome.warnings {
                if matches!(w, etc_core::explorer::Warning::SafetyViolation { .. }) {
                    eprintln!("  {w}");
                }
            }
            Ok(EXIT_SAFETY_VIOLATION)
        }
    }
}

pub fn baseline(args: &RunArgs) -> Result<i32> {
    let cfg = resolve_config(args)?;
    let out = &args.out;
    let records = random_search_baseline(&cfg)?;
    let violations = records
        .iter()
        .filter(|r| r.y_s.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater))
        .count();

    bundle::write_text(
        &path_in(out, bundle::BASELINE_CONFIG_FILE),
        &cfg.to_toml_string(),
    )?;
    bundle::write_lines(
        &path_in(out, bundle::BASELINE_LOG),
        bundle::BASELINE_LOG_HEADER,
        bundle::baseline_lines(&records),
    )?;
    bundle::write_json(
        &path_in(out, bundle::BASELINE_META),
        &BaselineMeta {
            seed: cfg.seed,
            config_hash: bundle::config_hash(&cfg),
            draws: records.len(),
            safety_violations: violations,
        },
    )?;
    eprintln!(
        "baseline: {} draws, {violations} with y_s <= 0",
        records.len()
    );
    Ok(EXIT_OK)
}

/// Rebuilds the accumulated sets of a run directory from its config and `grid_sets.csv`.
pub fn load_sets(run_dir: &Path) -> Result<(RunConfig, GridSets)> {
    let cfg = bundle::load_config(&path_in(run_dir, bundle::CONFIG_FILE))?;
    let grid_path = path_in(run_dir, bundle::GRID_SETS);
    let rows = bundle::read_grid_sets(&grid_path)?;
    let expected: usize = cfg.parameter_space.grid_resolution.iter().product();
    if rows.len() != expected {
        return Err(CliError::parse(
            &grid_path,
            format!("expected {expected} grid rows, found {}", rows.len()),
        ));
    }
    let grid = Grid {
        bounds: cfg.parameter_space.bounds(),
        resolution: cfg.parameter_space.grid_resolution.clone(),
        points: rows.iter().map(|r| r.theta.clone()).collect(),
    };
    let sets = GridSets {
        grid,
        in_theta_s: rows.iter().map(|r| r.in_theta_s).collect(),
        in_theta: rows.iter().map(|r| r.in_theta).collect(),
    };
    Ok((cfg, sets))
}

pub fn verify(run_dir: &Path) -> Result<i32> {
    let (cfg, sets) = load_sets(run_dir)?;
    let rows = audit_theta(&cfg, &sets)?;
    bundle::write_lines(
        &path_in(run_dir, bundle::VERIFY_REPORT),
        bundle::VERIFY_HEADER,
        bundle::verify_lines(&rows),
    )?;

    let inconsistent: Vec<usize> = (0..sets.grid.len())
        .filter(|&i| sets.in_theta[i] && !sets.in_theta_s[i])
        .collect();
    let failed: Vec<_> = rows.iter().filter(|r| !r.passed()).collect();

    if rows.is_empty() {
        eprintln!("verify: certified set is empty; nothing to check");
    }
    if failed.is_empty() && inconsistent.is_empty() {
        eprintln!(
            "verify: all {} certified points satisfy both specifications",
            rows.len()
        );
        return Ok(EXIT_OK);
    }
    for r in &failed {
        eprintln!(
            "verify: FAIL theta = ({}, {}): convergence {}, safety {}",
            format_float(r.theta[0]),
            format_float(r.theta[1]),
            format_float(r.convergence),
            format_float(r.safety)
        );
    }
    for i in &inconsistent {
        let p = &sets.grid.points[*i];
        eprintln!(
            "verify: FAIL theta = ({}, {}): in_theta set without in_theta_s",
            format_float(p[0]),
            format_float(p[1])
        );
    }
    Ok(EXIT_VERIFY_FAILED)
}

pub fn plotdata(run_dir: &Path, samples: usize) -> Result<i32> {
    let (cfg, sets) = load_sets(run_dir)?;
    let algo =
        bundle::read_safety_series(&path_in(run_dir, bundle::RUN_LOG), bundle::RUN_LOG_HEADER)?;
    let baseline_path = path_in(run_dir, bundle::BASELINE_LOG);
    let baseline = if baseline_path.exists() {
        Some(bundle::read_safety_series(
            &baseline_path,
            bundle::BASELINE_LOG_HEADER,
        )?)
    } else {
        None
    };

    bundle::write_lines(
        &path_in(run_dir, bundle::FIG2_FILE),
        bundle::GRID_SETS_HEADER,
        bundle::grid_sets_lines(&sets),
    )?;

    let mut rng = stream_rng(cfg.seed, Stream::ThetaSampling);
    let thetas = sample_theta_cells(&sets, samples, &mut rng);
    let decimation = cfg.output.trajectory_decimation;
    let mut lines = Vec::new();
    for (k, theta) in thetas.iter().enumerate() {
        let traj = evaluate(&cfg, theta)?.trajectory;
        let last = traj.len() - 1;
        for i in (0..traj.len()).filter(|i| i % decimation == 0 || *i == last) {
            let x = traj.state(i);
            lines.push(format!(
                "{},{},{},{},{},{},{},{}",
                k + 1,
                format_float(theta[0]),
                format_float(theta[1]),
                format_float(traj.times[i]),
                format_float(x[0]),
                format_float(x[1]),
                format_float(traj.input(i)[0]),
                u8::from(traj.events[i])
            ));
        }
    }
    bundle::write_lines(
        &path_in(run_dir, bundle::FIG3_FILE),
        "sample,theta1,theta2,t,x1,x2,u,event",
        lines,
    )?;

    let mut series: BTreeMap<usize, (Option<f64>, Option<f64>)> = BTreeMap::new();
    for (j, y) in &algo {
        series.entry(*j).or_default().0 = Some(*y);
    }
    for (j, y) in baseline.iter().flatten() {
        series.entry(*j).or_default().1 = Some(*y);
    }
    let cell = |v: Option<f64>| v.map(format_float).unwrap_or_default();
    let (header, rows): (&str, Vec<String>) = if baseline.is_some() {
        (
            "j,y_s_algorithm,y_s_baseline",
            series
                .iter()
                .map(|(j, (a, b))| format!("{j},{},{}", cell(*a), cell(*b)))
                .collect(),
        )
    } else {
        (
            "j,y_s_algorithm",
            series
                .iter()
                .map(|(j, (a, _))| format!("{j},{}", cell(*a)))
                .collect(),
        )
    };
    bundle::write_lines(&path_in(run_dir, bundle::FIG4_FILE), header, rows)?;
    eprintln!(
        "plotdata: wrote {}, {} ({} trajectories), {}",
        bundle::FIG2_FILE,
        bundle::FIG3_FILE,
        thetas.len(),
        bundle::FIG4_FILE
    );
    Ok(EXIT_OK)
}
