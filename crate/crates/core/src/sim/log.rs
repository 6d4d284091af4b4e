//! On-disk formats for simulation logs and per-task metrics.
//!
//! Both files are plain CSV. Floats are written with Rust's shortest
//! round-trip formatting, so parsing a file back reproduces every value
//! bit for bit (no precision is lost at any magnitude).

use crate::config::ActionId;
use crate::error::{Error, Result};
use crate::geom::Vec3;
use std::fmt::Write as _;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

/// Column layout of a log file.
pub const LOG_HEADER: &str =
    "episode,t,xr_x,xr_y,xr_z,xh_x,xh_y,xh_z,gr_x,gr_y,gr_z,gh_x,gh_y,gh_z,s";

/// Column layout of a metrics file.
pub const METRICS_HEADER: &str = "episode,task_index,action_id,start_t,end_t,mean_scaling";

/// One sampled instant of the workcell: positions, commanded goals and the
/// speed scaling in force.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogRecord {
    pub episode: u64,
    pub t: f64,
    pub x_r: Vec3,
    pub x_h: Vec3,
    /// The robot's current motion goal.
    pub g_r: Vec3,
    /// Mean of the human's current goal area.
    pub g_h_mu: Vec3,
    /// Speed scaling evaluated at (`x_r`, `x_h`).
    pub s: f64,
}

/// Summary of one executed task, from the decision instant to the moment
/// the robot asks for the next action.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TaskMetric {
    pub episode: u64,
    pub task_index: usize,
    pub action_id: ActionId,
    pub start_t: f64,
    pub end_t: f64,
    /// Time-weighted mean of the logged scaling over the task interval.
    pub mean_scaling: f64,
}

fn push_f64(line: &mut String, v: f64) {
    // `{}` on f64 prints the shortest decimal string that parses back to
    // the identical bits, comfortably exceeding the nine significant digits
    // the format guarantees.
    let _ = write!(line, ",{v}");
}

pub fn write_log_file(path: &Path, records: &[LogRecord]) -> Result<()> {
    let mut w = BufWriter::new(std::fs::File::create(path)?);
    writeln!(w, "{LOG_HEADER}")?;
    let mut line = String::with_capacity(256);
    for r in records {
        line.clear();
        let _ = write!(line, "{}", r.episode);
        push_f64(&mut line, r.t);
        for v in [r.x_r, r.x_h, r.g_r, r.g_h_mu] {
            push_f64(&mut line, v.x);
            push_f64(&mut line, v.y);
            push_f64(&mut line, v.z);
        }
        push_f64(&mut line, r.s);
        writeln!(w, "{line}")?;
    }
    w.flush()?;
    Ok(())
}

fn parse_f64(field: &str, path: &Path, lineno: usize) -> Result<f64> {
    field.parse::<f64>().map_err(|_| {
        Error::LogFile(format!("{}:{lineno}: bad float {field:?}", path.display()))
    })
}

pub fn read_log_file(path: &Path) -> Result<Vec<LogRecord>> {
    let reader = BufReader::new(std::fs::File::open(path)?);
    let mut lines = reader.lines();
    match lines.next() {
        Some(Ok(h)) if h.trim_end() == LOG_HEADER => {}
        _ => {
            return Err(Error::LogFile(format!(
                "{}: missing or unexpected header",
                path.display()
            )))
        }
    }
    let mut out = Vec::new();
    for (i, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let lineno = i + 2;
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 15 {
            return Err(Error::LogFile(format!(
                "{}:{lineno}: expected 15 fields, got {}",
                path.display(),
                fields.len()
            )));
        }
        let episode = fields[0].parse::<u64>().map_err(|_| {
            Error::LogFile(format!("{}:{lineno}: bad episode {:?}", path.display(), fields[0]))
        })?;
        let mut f = [0.0f64; 14];
        for (j, field) in fields[1..].iter().enumerate() {
            f[j] = parse_f64(field, path, lineno)?;
        }
        out.push(LogRecord {
            episode,
            t: f[0],
            x_r: Vec3::new(f[1], f[2], f[3]),
            x_h: Vec3::new(f[4], f[5], f[6]),
            g_r: Vec3::new(f[7], f[8], f[9]),
            g_h_mu: Vec3::new(f[10], f[11], f[12]),
            s: f[13],
        });
    }
    Ok(out)
}

pub fn write_metrics_file(path: &Path, metrics: &[TaskMetric]) -> Result<()> {
    let mut w = BufWriter::new(std::fs::File::create(path)?);
    writeln!(w, "{METRICS_HEADER}")?;
    for m in metrics {
        let mut line = format!("{},{},{}", m.episode, m.task_index, m.action_id.0);
        push_f64(&mut line, m.start_t);
        push_f64(&mut line, m.end_t);
        push_f64(&mut line, m.mean_scaling);
        writeln!(w, "{line}")?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_metrics_file(path: &Path) -> Result<Vec<TaskMetric>> {
    let reader = BufReader::new(std::fs::File::open(path)?);
    let mut lines = reader.lines();
    match lines.next() {
        Some(Ok(h)) if h.trim_end() == METRICS_HEADER => {}
        _ => {
            return Err(Error::LogFile(format!(
                "{}: missing or unexpected header",
                path.display()
            )))
        }
    }
    let mut out = Vec::new();
    for (i, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let lineno = i + 2;
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 6 {
            return Err(Error::LogFile(format!(
                "{}:{lineno}: expected 6 fields, got {}",
                path.display(),
                fields.len()
            )));
        }
        out.push(TaskMetric {
            episode: fields[0].parse().map_err(|_| {
                Error::LogFile(format!("{}:{lineno}: bad episode", path.display()))
            })?,
            task_index: fields[1].parse().map_err(|_| {
                Error::LogFile(format!("{}:{lineno}: bad task index", path.display()))
            })?,
            action_id: ActionId(fields[2].parse().map_err(|_| {
                Error::LogFile(format!("{}:{lineno}: bad action id", path.display()))
            })?),
            start_t: parse_f64(fields[3], path, lineno)?,
            end_t: parse_f64(fields[4], path, lineno)?,
            mean_scaling: parse_f64(fields[5], path, lineno)?,
        });
    }
    Ok(out)
}
