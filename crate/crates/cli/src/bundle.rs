//! On-disk layout of a run directory.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use etc_core::explorer::{AuditRow, BaselineRecord, GridSets, IterationRecord, Sample};
use etc_core::num_fmt::format_float;
use etc_core::{RunConfig, ThetaPoint};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{CliError, Result};

pub const CONFIG_FILE: &str = "config.toml";
pub const BASELINE_CONFIG_FILE: &str = "baseline_config.toml";
pub const RUN_LOG: &str = "run_log.csv";
pub const INITIAL_LOG: &str = "initial_log.csv";
pub const GRID_SETS: &str = "grid_sets.csv";
pub const RUN_META: &str = "run_meta.json";
pub const BASELINE_LOG: &str = "baseline_log.csv";
pub const BASELINE_META: &str = "baseline_meta.json";
pub const VERIFY_REPORT: &str = "verify_report.csv";
pub const TRAJECTORY_DIR: &str = "trajectories";
pub const FIG2_FILE: &str = "fig2_parameter_space.csv";
pub const FIG3_FILE: &str = "fig3_trajectories.csv";
pub const FIG4_FILE: &str = "fig4_safety_series.csv";

pub const RUN_LOG_HEADER: &str =
    "j,theta1,theta2,y_g,y_s,beta_g,beta_s,size_theta_s,size_theta,acq_value";
pub const INITIAL_LOG_HEADER: &str = "i,theta1,theta2,y_g,y_s";
pub const GRID_SETS_HEADER: &str = "theta1,theta2,in_theta_s,in_theta";
pub const BASELINE_LOG_HEADER: &str = "j,theta1,theta2,y_g,y_s";
pub const VERIFY_HEADER: &str = "theta1,theta2,convergence_index,safety_index,pass";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMeta {
    pub seed: u64,
    pub config_hash: String,
    pub status: String,
    pub n_init: usize,
    pub n_exp: usize,
    pub size_theta_s: usize,
    pub size_theta: usize,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaselineMeta {
    pub seed: u64,
    pub config_hash: String,
    pub draws: usize,
    pub safety_violations: usize,
}

pub fn config_hash(cfg: &RunConfig) -> String {
    let digest = Sha256::digest(cfg.to_toml_string().as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

fn flag(b: bool) -> &'static str {
    if b {
        "1"
    } else {
        "0"
    }
}

fn theta_cols(t: &ThetaPoint) -> String {
    t.0.iter()
        .map(|v| format_float(*v))
        .collect::<Vec<_>>()
        .join(",")
}

/// Writes `lines` under `header` to `path`, creating parent directories.
pub fn write_lines<I, S>(path: &Path, header: &str, lines: I) -> Result<()>
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(|e| CliError::io(parent, e))?;
    }
    let file = File::create(path).map_err(|e| CliError::io(path, e))?;
    let mut w = BufWriter::new(file);
    let io = |e| CliError::io(path, e);
    writeln!(w, "{header}").map_err(io)?;
    for line in lines {
        writeln!(w, "{}", line.as_ref()).map_err(io)?;
    }
    w.flush().map_err(io)
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(|e| CliError::io(parent, e))?;
    }
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::parse(path, e))?;
    text.push('\n');
    write_text(path, &text)
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    serde_json::from_str(&read_text(path)?).map_err(|e| CliError::parse(path, e))
}

pub fn load_config(path: &Path) -> Result<RunConfig> {
    let text = read_text(path)?;
    RunConfig::from_toml_str(&text).map_err(|e| CliError::parse(path, e))
}

pub fn run_log_lines(records: &[IterationRecord]) -> impl Iterator<Item = String> + '_ {
    records.iter().map(|r| {
        format!(
            "{},{},{},{},{},{},{},{},{}",
            r.j,
            theta_cols(&r.theta),
            format_float(r.y_g),
            format_float(r.y_s),
            format_float(r.beta_g),
            format_float(r.beta_s),
            r.size_theta_s,
            r.size_theta,
            format_float(r.acq_value)
        )
    })
}

pub fn initial_log_lines(samples: &[Sample]) -> impl Iterator<Item = String> + '_ {
    samples.iter().enumerate().map(|(i, s)| {
        format!(
            "{},{},{},{}",
            i + 1,
            theta_cols(&s.theta),
            format_float(s.y_g),
            format_float(s.y_s)
        )
    })
}

pub fn grid_sets_lines(sets: &GridSets) -> impl Iterator<Item = String> + '_ {
    sets.grid
        .points
        .iter()
        .zip(sets.in_theta_s.iter().zip(&sets.in_theta))
        .map(|(p, (s, t))| format!("{},{},{}", theta_cols(p), flag(*s), flag(*t)))
}

pub fn baseline_lines(records: &[BaselineRecord]) -> impl Iterator<Item = String> + '_ {
    records.iter().map(|r| {
        format!(
            "{},{},{},{}",
            r.j,
            theta_cols(&r.theta),
            format_float(r.y_g),
            format_float(r.y_s)
        )
    })
}

pub fn verify_lines(rows: &[AuditRow]) -> impl Iterator<Item = String> + '_ {
    rows.iter().map(|r| {
        format!(
            "{},{},{},{}",
            theta_cols(&r.theta),
            format_float(r.convergence),
            format_float(r.safety),
            flag(r.passed())
        )
    })
}

/// One row of `grid_sets.csv`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridRow {
    pub theta: ThetaPoint,
    pub in_theta_s: bool,
    pub in_theta: bool,
}

fn open_csv(path: &Path, header: &str) -> Result<csv::Reader<File>> {
    let file = File::open(path).map_err(|e| CliError::io(path, e))?;
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(file);
    let found = rdr
        .headers()
        .map_err(|e| CliError::parse(path, e))?
        .iter()
        .collect::<Vec<_>>()
        .join(",");
    if found != header {
        return Err(CliError::parse(
            path,
            format!("expected header `{header}`, found `{found}`"),
        ));
    }
    Ok(rdr)
}

fn parse_f64(path: &Path, s: &str) -> Result<f64> {
    s.trim()
        .parse()
        .map_err(|_| CliError::parse(path, format!("bad number `{s}`")))
}

fn parse_flag(path: &Path, s: &str) -> Result<bool> {
    match s.trim() {
        "1" => Ok(true),
        "0" => Ok(false),
        other => Err(CliError::parse(
            path,
            format!("bad flag `{other}` (expected 0 or 1)"),
        )),
    }
}

pub fn read_grid_sets(path: &Path) -> Result<Vec<GridRow>> {
    let mut rdr = open_csv(path, GRID_SETS_HEADER)?;
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| CliError::parse(path, e))?;
        rows.push(GridRow {
            theta: ThetaPoint::from([parse_f64(path, &rec[0])?, parse_f64(path, &rec[1])?]),
            in_theta_s: parse_flag(path, &rec[2])?,
            in_theta: parse_flag(path, &rec[3])?,
        });
    }
    Ok(rows)
}

/// `(j, y_s)` pairs from a run or baseline log.
pub fn read_safety_series(path: &Path, header: &str) -> Result<Vec<(usize, f64)>> {
    let mut rdr = open_csv(path, header)?;
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| CliError::parse(path, e))?;
        let j = rec[0]
            .trim()
            .parse()
            .map_err(|_| CliError::parse(path, format!("bad iteration index `{}`", &rec[0])))?;
        out.push((j, parse_f64(path, &rec[4])?));
    }
    Ok(out)
}

pub fn path_in(dir: &Path, name: &str) -> PathBuf {
    dir.join(name)
}
