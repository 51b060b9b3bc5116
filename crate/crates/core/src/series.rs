//! Snapshot series and their CSV representation.
//!
//! A series file starts with `# meta key=value` lines, followed by the
//! header `x,comp_0,…,comp_{N-1}` and one block of rows per snapshot, each
//! introduced by `# t=<value>`. Numbers are written with 17 significant
//! digits so that a write/read cycle is exact.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Boundary, Grid1D};
use crate::smallmat::Vector;
use crate::system::RelaxationSystem;

/// Whether the values are full states `U` or equilibrium variables `u`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SeriesKind {
    State,
    Reduced,
}

impl SeriesKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            SeriesKind::State => "state",
            SeriesKind::Reduced => "reduced",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub time: f64,
    pub values: Vec<Vector>,
}

/// Per-step scalar diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub step: usize,
    pub time: f64,
    pub dt: f64,
    pub entropy: Option<f64>,
    pub momentum_max: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SnapshotSeries {
    pub model: String,
    pub kind: SeriesKind,
    pub grid: Grid1D,
    pub labels: Vec<String>,
    pub snapshots: Vec<Snapshot>,
    pub steps: Vec<StepRecord>,
    pub meta: BTreeMap<String, String>,
}

impl SnapshotSeries {
    pub fn new(model: &str, kind: SeriesKind, grid: Grid1D, labels: Vec<String>) -> Self {
        SnapshotSeries {
            model: model.to_string(),
            kind,
            grid,
            labels,
            snapshots: Vec::new(),
            steps: Vec::new(),
            meta: BTreeMap::new(),
        }
    }

    pub fn last(&self) -> Option<&Snapshot> {
        self.snapshots.last()
    }

    /// The snapshot whose time is within `tol` of `t`.
    pub fn at_time(&self, t: f64, tol: f64) -> Option<&Snapshot> {
        self.snapshots.iter().find(|s| (s.time - t).abs() <= tol)
    }

    /// Projects a state series onto the equilibrium variables.
    pub fn reduced<S: RelaxationSystem + ?Sized>(&self, sys: &S) -> SnapshotSeries {
        if self.kind == SeriesKind::Reduced {
            return self.clone();
        }
        let q = sys.projector();
        SnapshotSeries {
            kind: SeriesKind::Reduced,
            labels: sys.reduced_names().iter().map(|s| s.to_string()).collect(),
            snapshots: self
                .snapshots
                .iter()
                .map(|s| Snapshot { time: s.time, values: s.values.iter().map(|v| q.mul_vec(v)).collect() })
                .collect(),
            ..self.clone()
        }
    }

    /// Times and entropies of the steps where entropy was recorded.
    pub fn entropy_trace(&self) -> crate::diagnostics::EntropyTrace {
        let mut trace = crate::diagnostics::EntropyTrace::default();
        for r in &self.steps {
            if let Some(s) = r.entropy {
                trace.push(r.time, s);
            }
        }
        trace
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        let mut buf = String::new();
        let mut meta = self.meta.clone();
        meta.insert("model".into(), self.model.clone());
        meta.insert("kind".into(), self.kind.as_str().into());
        meta.insert("cells".into(), self.grid.cells.to_string());
        meta.insert("dx".into(), fmt_num(self.grid.dx));
        meta.insert("x0".into(), fmt_num(self.grid.x0));
        meta.insert("boundary".into(), self.grid.boundary.as_str().into());
        meta.insert("components".into(), self.labels.join(";"));
        for (k, v) in &meta {
            writeln!(buf, "# meta {k}={v}").unwrap();
        }
        buf.push('x');
        for k in 0..self.labels.len() {
            write!(buf, ",comp_{k}").unwrap();
        }
        buf.push('\n');
        let centers = self.grid.centers();
        for snap in &self.snapshots {
            writeln!(buf, "# t={}", fmt_num(snap.time)).unwrap();
            for (x, v) in centers.iter().zip(&snap.values) {
                buf.push_str(&fmt_num(*x));
                for c in v.iter() {
                    buf.push(',');
                    buf.push_str(&fmt_num(*c));
                }
                buf.push('\n');
            }
        }
        out.write_all(buf.as_bytes())?;
        Ok(())
    }

    pub fn read_csv<R: BufRead>(input: R) -> Result<SnapshotSeries> {
        let mut meta = BTreeMap::new();
        let mut snapshots: Vec<Snapshot> = Vec::new();
        let mut width = None;
        for (idx, line) in input.lines().enumerate() {
            let line = line?;
            let lineno = idx + 1;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix("# meta ") {
                let (k, v) = rest
                    .split_once('=')
                    .ok_or_else(|| Error::Parse { line: lineno, detail: "meta line without '='".into() })?;
                meta.insert(k.to_string(), v.to_string());
            } else if let Some(rest) = line.strip_prefix("# t=") {
                snapshots.push(Snapshot { time: parse_num(rest, lineno)?, values: Vec::new() });
            } else if line.starts_with('#') {
                continue;
            } else if line.starts_with("x,") || line == "x" {
                width = Some(line.split(',').count() - 1);
            } else {
                let w = width.ok_or_else(|| Error::Parse { line: lineno, detail: "data before header".into() })?;
                let snap = snapshots
                    .last_mut()
                    .ok_or_else(|| Error::Parse { line: lineno, detail: "data before '# t=' tag".into() })?;
                let fields: Vec<&str> = line.split(',').collect();
                if fields.len() != w + 1 {
                    return Err(Error::Parse {
                        line: lineno,
                        detail: format!("expected {} fields, found {}", w + 1, fields.len()),
                    });
                }
                let vals = fields[1..].iter().map(|f| parse_num(f, lineno)).collect::<Result<Vec<_>>>()?;
                snap.values.push(Vector::from_slice(&vals));
            }
        }
        let get = |k: &str| meta.get(k).cloned().ok_or_else(|| Error::Parse { line: 0, detail: format!("missing meta key '{k}'") });
        let cells: usize = get("cells")?.parse().map_err(|_| Error::Parse { line: 0, detail: "bad cells".into() })?;
        let dx = parse_num(&get("dx")?, 0)?;
        let x0 = parse_num(&get("x0")?, 0)?;
        let boundary: Boundary = get("boundary")?.parse()?;
        let kind = match get("kind")?.as_str() {
            "state" => SeriesKind::State,
            "reduced" => SeriesKind::Reduced,
            other => return Err(Error::Parse { line: 0, detail: format!("unknown kind '{other}'") }),
        };
        let model = get("model")?;
        let labels: Vec<String> = get("components")?.split(';').filter(|s| !s.is_empty()).map(String::from).collect();
        if let Some(w) = width {
            if w != labels.len() {
                return Err(Error::Parse { line: 0, detail: "component count differs from header".into() });
            }
        }
        for s in &snapshots {
            if s.values.len() != cells {
                return Err(Error::Parse {
                    line: 0,
                    detail: format!("snapshot t={} has {} rows, expected {cells}", s.time, s.values.len()),
                });
            }
        }
        for k in ["model", "kind", "cells", "dx", "x0", "boundary", "components"] {
            meta.remove(k);
        }
        let grid = Grid1D { cells, dx, x0, boundary };
        Ok(SnapshotSeries { model, kind, grid, labels, snapshots, steps: Vec::new(), meta })
    }
}

pub fn fmt_num(x: f64) -> String {
    format!("{x:.16e}")
}

fn parse_num(s: &str, line: usize) -> Result<f64> {
    s.trim().parse::<f64>().map_err(|_| Error::Parse { line, detail: format!("not a number: '{s}'") })
}

/// Writes an entropy trace as `t,S` rows.
pub fn write_entropy_csv<W: Write>(trace: &crate::diagnostics::EntropyTrace, mut out: W) -> Result<()> {
    let mut buf = String::from("t,S\n");
    for (t, s) in trace.times.iter().zip(&trace.values) {
        writeln!(buf, "{},{}", fmt_num(*t), fmt_num(*s)).unwrap();
    }
    out.write_all(buf.as_bytes())?;
    Ok(())
}

/// Writes per-step diagnostics as `step,t,dt,entropy,momentum_max` rows;
/// missing values are left empty.
pub fn write_steps_csv<W: Write>(steps: &[StepRecord], mut out: W) -> Result<()> {
    let mut buf = String::from("step,t,dt,entropy,momentum_max\n");
    let opt = |v: Option<f64>| v.map(fmt_num).unwrap_or_default();
    for r in steps {
        writeln!(buf, "{},{},{},{},{}", r.step, fmt_num(r.time), fmt_num(r.dt), opt(r.entropy), opt(r.momentum_max))
            .unwrap();
    }
    out.write_all(buf.as_bytes())?;
    Ok(())
}
