//! File writers. Numbers are printed with 17 significant digits so that a
//! reread is bit-exact; line endings are `\n`.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::Serialize;

use crate::config::{ConfigEcho, SimConfig};
use crate::diagnostics::{ConvergenceTable, EntropyLedger};
use crate::error::{Error, Result};
use crate::mesh::{FieldPair, Grid1D, Representation};
use crate::viscous::Trajectory;

pub const SNAPSHOT_HEADER: &str = "x,u,v,r,xi";
pub const SNAPSHOT_SCHEMA: &str = "kklab.snapshot/1";
pub const LEDGER_SCHEMA: &str = "kklab.ledger/1";
pub const RUN_SCHEMA: &str = "kklab.run/1";

#[inline]
fn num(out: &mut String, x: f64) {
    write!(out, "{x:.16e}").expect("writing to a String cannot fail");
}

fn row(out: &mut String, values: &[f64]) {
    for (i, &v) in values.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        num(out, v);
    }
    out.push('\n');
}

pub fn snapshot_csv(fp: &FieldPair, grid: &Grid1D) -> String {
    let mut out = String::with_capacity(100 * fp.len());
    out.push_str(SNAPSHOT_HEADER);
    out.push('\n');
    for (i, x) in grid.centers().into_iter().enumerate() {
        let s = fp.state(i);
        row(&mut out, &[x, s.u, s.v, s.r(), s.xi()]);
    }
    out
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn write_snapshot_csv(fp: &FieldPair, grid: &Grid1D, path: &Path) -> Result<()> {
    write_text(path, &snapshot_csv(fp, grid))
}

/// Reads a snapshot back as cell centres and `(u, v)` fields at time 0.
pub fn read_snapshot_csv(path: &Path) -> Result<(Vec<f64>, FieldPair)> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let origin = path.display().to_string();
    let mut lines = text.lines();
    if lines.next() != Some(SNAPSHOT_HEADER) {
        return Err(Error::Parse {
            origin,
            message: format!("line 1: expected header `{SNAPSHOT_HEADER}`"),
        });
    }
    let (mut xs, mut u, mut v) = (Vec::new(), Vec::new(), Vec::new());
    for (n, line) in lines.enumerate() {
        let fields: std::result::Result<Vec<f64>, _> = line.split(',').map(str::parse).collect();
        match fields.as_deref() {
            Ok(&[x, a, b, _, _]) => {
                xs.push(x);
                u.push(a);
                v.push(b);
            }
            _ => {
                return Err(Error::Parse {
                    origin,
                    message: format!("line {}: expected five numbers", n + 2),
                })
            }
        }
    }
    Ok((
        xs,
        FieldPair {
            a: u,
            b: v,
            time: 0.0,
            representation: Representation::Conservative,
        },
    ))
}

/// Pretty JSON in declaration order of the serialized structs.
pub fn json_string<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}

pub fn write_report_json<T: Serialize>(value: &T, path: &Path) -> Result<()> {
    write_text(path, &json_string(value))
}

pub fn ledger_csv(ledger: &EntropyLedger) -> String {
    let mut out = String::from("t,total_entropy,dissipation_accum,residual,boundary_outflow\n");
    for r in ledger.records() {
        row(
            &mut out,
            &[
                r.time,
                r.total_entropy,
                r.dissipation_accum,
                r.residual,
                r.boundary_outflow,
            ],
        );
    }
    out
}

pub fn convergence_csv(table: &ConvergenceTable) -> String {
    let mut out = String::from("eps,dx,L1_error,wall_time,n_cells,max_eps_rx,status\n");
    for r in &table.rows {
        num(&mut out, r.eps);
        out.push(',');
        num(&mut out, r.dx);
        out.push(',');
        match r.l1_error {
            Some(e) => num(&mut out, e),
            None => out.push_str("nan"),
        }
        out.push(',');
        num(&mut out, r.wall_time);
        write!(out, ",{},", r.n_cells).expect("string write");
        num(&mut out, r.max_eps_rx);
        // statuses may carry error text
        writeln!(out, ",\"{}\"", r.status.replace('"', "'")).expect("string write");
    }
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct SnapshotMeta {
    pub file: String,
    pub time: f64,
    pub step: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunMeta {
    pub schema: &'static str,
    pub snapshot_schema: &'static str,
    pub ledger_schema: &'static str,
    pub solver: &'static str,
    pub config: ConfigEcho,
    pub steps: usize,
    pub final_time: f64,
    pub snapshots: Vec<SnapshotMeta>,
    pub wall_time_s: f64,
}

/// Writes `snapshot_NNNNN.csv` per snapshot, `ledger.csv` and `meta.json`
/// into `dir`, creating it if needed.
pub fn write_run(
    dir: &Path,
    cfg: &SimConfig,
    solver: &'static str,
    traj: &Trajectory,
    ledger: &EntropyLedger,
    wall_time_s: f64,
) -> Result<RunMeta> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut snapshots = Vec::with_capacity(traj.snapshots.len());
    for (i, snap) in traj.snapshots.iter().enumerate() {
        let file = format!("snapshot_{i:05}.csv");
        write_snapshot_csv(&snap.fields, &traj.grid, &dir.join(&file))?;
        snapshots.push(SnapshotMeta {
            file,
            time: snap.time(),
            step: snap.step,
        });
    }
    write_text(&dir.join("ledger.csv"), &ledger_csv(ledger))?;
    let meta = RunMeta {
        schema: RUN_SCHEMA,
        snapshot_schema: SNAPSHOT_SCHEMA,
        ledger_schema: LEDGER_SCHEMA,
        solver,
        config: cfg.echo(),
        steps: traj.steps,
        final_time: traj.last().time(),
        snapshots,
        wall_time_s,
    };
    write_report_json(&meta, &dir.join("meta.json"))?;
    Ok(meta)
}
