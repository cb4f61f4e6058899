//! Plain-text persistence: CSV tables and JSON side files.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Point3;
use crate::imaging::{ReconPoint, TuningSchedule};
use crate::model::{ReceiverArray, RecordMeta, TimeGrid, Trajectory, WaveRecord};
use crate::postprocess::{FourierCurve, SegmentSet};

pub const RECORD_CSV: &str = "record.csv";
pub const RECORD_JSON: &str = "record.json";
pub const RECON_CSV: &str = "recon.csv";
pub const SCHEDULE_CSV: &str = "schedule.csv";
pub const SMOOTH_CSV: &str = "smooth.csv";
pub const COEFFS_JSON: &str = "coeffs.json";

/// Everything about a record except the samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecordHeader {
    pub terminal: f64,
    pub n_steps: usize,
    pub step: f64,
    pub receivers: ReceiverArray,
    #[serde(flatten)]
    pub meta: RecordMeta,
}

fn sci(x: f64) -> String {
    format!("{x:.16e}")
}

fn parse_f64(s: &str, what: &str, line: usize) -> Result<f64> {
    s.trim()
        .parse()
        .map_err(|_| Error::Parse(format!("line {line}: bad {what} {s:?}")))
}

fn parse_usize(s: &str, what: &str, line: usize) -> Result<usize> {
    s.trim()
        .parse()
        .map_err(|_| Error::Parse(format!("line {line}: bad {what} {s:?}")))
}

fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

/// `t,<t_1>,…` header, then `m,u(m,1),…` per receiver (1-based `m`), 17
/// significant digits.
pub fn record_to_csv(record: &WaveRecord) -> String {
    let mut out = String::from("t");
    for t in record.grid.times() {
        out.push(',');
        out.push_str(&sci(t));
    }
    out.push('\n');
    for m in 0..record.n_receivers() {
        let _ = write!(out, "{}", m + 1);
        for &u in record.row(m) {
            out.push(',');
            out.push_str(&sci(u));
        }
        out.push('\n');
    }
    out
}

pub fn record_header(record: &WaveRecord) -> RecordHeader {
    RecordHeader {
        terminal: record.grid.terminal(),
        n_steps: record.n_steps(),
        step: record.grid.dt(),
        receivers: record.receivers.clone(),
        meta: record.meta.clone(),
    }
}

pub fn write_record(record: &WaveRecord, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join(RECORD_CSV), record_to_csv(record))?;
    fs::write(dir.join(RECORD_JSON), to_json(&record_header(record))?)?;
    Ok(())
}

pub fn record_from_parts(csv: &str, header: RecordHeader) -> Result<WaveRecord> {
    let grid = TimeGrid::from_parts(header.terminal, header.n_steps, header.step)?;
    let mut lines = csv.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (_, first) = lines.next().ok_or_else(|| Error::Parse("empty record table".into()))?;
    let mut cols = first.split(',');
    if cols.next().map(str::trim) != Some("t") {
        return Err(Error::Parse("record table must start with a `t` header".into()));
    }
    let times = cols.map(|c| parse_f64(c, "time", 1)).collect::<Result<Vec<f64>>>()?;
    if times.len() != header.n_steps {
        return Err(Error::Parse(format!("record table has {} time columns, header says {}", times.len(), header.n_steps)));
    }
    for (j, t) in times.iter().enumerate() {
        if (t - grid.time(j + 1)).abs() > 1e-12 * grid.terminal() {
            return Err(Error::Parse(format!("time column {} is {t}, expected {}", j + 1, grid.time(j + 1))));
        }
    }
    let mut values = Vec::with_capacity(header.n_steps * header.receivers.len());
    let mut rows = 0;
    for (i, line) in lines {
        let mut cols = line.split(',');
        let m = parse_usize(cols.next().unwrap_or(""), "receiver index", i + 1)?;
        if m != rows + 1 {
            return Err(Error::Parse(format!("line {}: receiver {m} out of order", i + 1)));
        }
        let before = values.len();
        for c in cols {
            values.push(parse_f64(c, "sample", i + 1)?);
        }
        if values.len() - before != header.n_steps {
            return Err(Error::Parse(format!("line {}: expected {} samples", i + 1, header.n_steps)));
        }
        rows += 1;
    }
    if rows != header.receivers.len() {
        return Err(Error::Parse(format!("record table has {rows} receivers, header says {}", header.receivers.len())));
    }
    WaveRecord::new(values, header.receivers, grid, header.meta)
}

pub fn read_record(dir: &Path) -> Result<WaveRecord> {
    let header: RecordHeader = serde_json::from_str(&fs::read_to_string(dir.join(RECORD_JSON))?)?;
    record_from_parts(&fs::read_to_string(dir.join(RECORD_CSV))?, header)
}

pub fn recon_to_csv(points: &[ReconPoint]) -> String {
    let mut out = String::from("j,t,x1,x2,x3,indicator\n");
    for p in points {
        let _ = writeln!(out, "{},{},{},{},{},{}", p.j, p.t, p.z.x1, p.z.x2, p.z.x3, p.indicator);
    }
    out
}

pub fn recon_from_csv(csv: &str) -> Result<Vec<ReconPoint>> {
    let mut out = Vec::new();
    for (i, line) in csv.lines().enumerate().skip(1) {
        if line.trim().is_empty() {
            continue;
        }
        let c: Vec<&str> = line.split(',').collect();
        if c.len() != 6 {
            return Err(Error::Parse(format!("line {}: expected j,t,x1,x2,x3,indicator", i + 1)));
        }
        let f = |k: usize, what: &str| parse_f64(c[k], what, i + 1);
        out.push(ReconPoint {
            j: parse_usize(c[0], "step", i + 1)?,
            t: f(1, "time")?,
            z: Point3::new(f(2, "x1")?, f(3, "x2")?, f(4, "x3")?),
            indicator: f(5, "indicator")?,
        });
    }
    Ok(out)
}

pub fn read_recon(path: &Path) -> Result<Vec<ReconPoint>> {
    recon_from_csv(&fs::read_to_string(path)?)
}

pub fn schedule_to_csv(schedule: &TuningSchedule) -> String {
    let mut out = String::from("level,slot,j,radius\n");
    for e in &schedule.entries {
        let _ = writeln!(out, "{},{},{},{}", e.level, e.slot, e.j, e.radius);
    }
    out
}

/// `segment,t,x1,x2,x3` samples of each curve at its own points' times.
pub fn smooth_to_csv(segments: &SegmentSet, points: &[(f64, Point3)]) -> String {
    let mut out = String::from("segment,t,x1,x2,x3\n");
    for (s, t, z) in segments.sample(points) {
        let _ = writeln!(out, "{s},{t},{},{},{}", z.x1, z.x2, z.x3);
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegmentCoeffs {
    pub segment: usize,
    pub start: usize,
    pub end: usize,
    #[serde(flatten)]
    pub curve: FourierCurve,
}

pub fn segment_coeffs(segments: &SegmentSet) -> Vec<SegmentCoeffs> {
    segments
        .ranges
        .iter()
        .zip(&segments.curves)
        .enumerate()
        .map(|(segment, (r, c))| SegmentCoeffs {
            segment,
            start: r.start,
            end: r.end,
            curve: c.clone(),
        })
        .collect()
}

pub fn coeffs_to_json(segments: &SegmentSet) -> Result<String> {
    to_json(&segment_coeffs(segments))
}

/// `t,x1,x2,x3` polyline, as written by [`Trajectory::to_csv`].
pub fn trajectory_from_csv(id: &str, csv: &str) -> Result<Trajectory> {
    let mut knots = Vec::new();
    for (i, line) in csv.lines().enumerate().skip(1) {
        if line.trim().is_empty() {
            continue;
        }
        let c: Vec<&str> = line.split(',').collect();
        if c.len() != 4 {
            return Err(Error::Parse(format!("line {}: expected t,x1,x2,x3", i + 1)));
        }
        let f = |k: usize| parse_f64(c[k], "coordinate", i + 1);
        knots.push((f(0)?, Point3::new(f(1)?, f(2)?, f(3)?)));
    }
    Trajectory::sampled(id, knots)
}

pub fn read_trajectory(path: &Path) -> Result<Trajectory> {
    let id = path.file_stem().and_then(|s| s.to_str()).unwrap_or("trajectory");
    trajectory_from_csv(id, &fs::read_to_string(path)?)
}
