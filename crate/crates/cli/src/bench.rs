//! Sequential sweeps over a directory of circuits.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::Context;
use evdd::eqcheck::Algorithm;
use evdd::sim::SharingClass;
use serde::{Deserialize, Serialize};

use crate::args::{Mode, RunArgs};
use crate::commands::{check_circuits, circuit_name, load, simulate_circuit, Outcome};

pub const HEADER: [&str; 8] = ["name", "n", "gates", "status", "wall_s", "nodes", "sharing", "verdict"];

/// One CSV row. Empty cells deserialize to `None`.
#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct Row {
    pub name: String,
    pub n: Option<usize>,
    pub gates: Option<usize>,
    pub status: String,
    pub wall_s: Option<f64>,
    pub nodes: Option<usize>,
    pub sharing: Option<String>,
    pub verdict: Option<String>,
}

impl Row {
    fn new(name: String, status: &str) -> Self {
        Row { name, n: None, gates: None, status: status.into(), wall_s: None, nodes: None, sharing: None, verdict: None }
    }
}

/// `(name, u, v)` instances of a directory, sorted by name. In eqcheck mode
/// `x.qasm` is paired with `x_alt.qasm`.
pub fn instances(dir: &Path, mode: Mode) -> anyhow::Result<Vec<(String, PathBuf, Option<PathBuf>)>> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)
        .with_context(|| format!("cannot read directory {}", dir.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.extension().is_some_and(|x| x == "qasm"))
        .collect();
    files.sort();
    Ok(match mode {
        Mode::Sim => files.into_iter().map(|p| (circuit_name(&p), p, None)).collect(),
        Mode::Eqcheck => files
            .iter()
            .filter(|p| !circuit_name(p).ends_with("_alt"))
            .filter_map(|p| {
                let name = circuit_name(p);
                let alt = p.with_file_name(format!("{name}_alt.qasm"));
                alt.is_file().then(|| (name, p.clone(), Some(alt)))
            })
            .collect(),
    })
}

fn run_one(name: String, u: &Path, v: Option<&Path>, algorithm: Algorithm, run: &RunArgs) -> Row {
    let start = Instant::now();
    let timed_out = |name: String| Row { wall_s: Some(start.elapsed().as_secs_f64()), ..Row::new(name, "timeout") };
    let failed = |name: String, e: anyhow::Error| {
        eprintln!("{name}: {e:#}");
        Row::new(name, "error")
    };
    let c = match load(u) {
        Ok(c) => c,
        Err(e) => return failed(name, e),
    };
    let mut row = Row { n: Some(c.num_qubits), gates: Some(c.ops.len()), ..Row::new(name.clone(), "ok") };
    match v {
        None => match simulate_circuit(&c, run.config(), run.timeout, None) {
            Outcome::Done((r, _)) => Row {
                wall_s: Some(r.wall_time.as_secs_f64()),
                nodes: Some(r.final_nodes),
                sharing: Some(r.sharing_class.to_string()),
                ..row
            },
            Outcome::Timeout => Row { n: row.n, gates: row.gates, ..timed_out(name) },
            Outcome::Failed(e) => Row { n: row.n, gates: row.gates, ..failed(name, e) },
        },
        Some(v) => {
            let alt = match load(v) {
                Ok(c) => c,
                Err(e) => return Row { n: row.n, gates: row.gates, ..failed(name, e) },
            };
            row.gates = Some(c.ops.len() + alt.ops.len());
            match check_circuits(&c, &alt, algorithm, run.config(), run.timeout, None) {
                Outcome::Done(verdict) => Row {
                    wall_s: Some(verdict.stats.wall_time.as_secs_f64()),
                    nodes: Some(verdict.stats.peak_nodes),
                    // matrix DDs have two variables per qubit
                    sharing: Some(SharingClass::classify(2 * c.num_qubits, verdict.stats.peak_nodes).to_string()),
                    verdict: Some(if verdict.equivalent { "equivalent" } else { "not-equivalent" }.into()),
                    ..row
                },
                Outcome::Timeout => Row { n: row.n, gates: row.gates, ..timed_out(name) },
                Outcome::Failed(e) => Row { n: row.n, gates: row.gates, ..failed(name, e) },
            }
        }
    }
}

/// Speedup statistics of one sharing class.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassSummary {
    pub class: String,
    pub count: usize,
    pub median: f64,
    pub p90: f64,
    pub p95: f64,
    pub p99: f64,
}

/// Nearest-rank percentile of an ascending slice.
pub fn percentile(sorted: &[f64], p: f64) -> f64 {
    assert!(!sorted.is_empty());
    let rank = (p / 100.0 * sorted.len() as f64).ceil() as usize;
    sorted[rank.clamp(1, sorted.len()) - 1]
}

/// Speedups `baseline wall / current wall` over instances that finished in
/// both runs, grouped by the current run's sharing class, plus an `all` row.
pub fn speedups(current: &[Row], baseline: &[Row]) -> Vec<ClassSummary> {
    let base: BTreeMap<&str, &Row> = baseline.iter().filter(|r| r.status == "ok").map(|r| (r.name.as_str(), r)).collect();
    let mut groups: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    for r in current.iter().filter(|r| r.status == "ok") {
        let (Some(b), Some(t)) = (base.get(r.name.as_str()), r.wall_s) else { continue };
        let Some(bt) = b.wall_s else { continue };
        if t <= 0.0 {
            continue;
        }
        let s = bt / t;
        groups.entry(r.sharing.clone().unwrap_or_default()).or_default().push(s);
        groups.entry("all".into()).or_default().push(s);
    }
    let summarize = |class: String, mut v: Vec<f64>| {
        v.sort_by(f64::total_cmp);
        ClassSummary {
            class,
            count: v.len(),
            median: percentile(&v, 50.0),
            p90: percentile(&v, 90.0),
            p95: percentile(&v, 95.0),
            p99: percentile(&v, 99.0),
        }
    };
    let all = groups.remove("all");
    let mut out: Vec<ClassSummary> = groups.into_iter().map(|(k, v)| summarize(k, v)).collect();
    out.extend(all.map(|v| summarize("all".into(), v)));
    out
}

pub fn read_rows(path: &Path) -> anyhow::Result<Vec<Row>> {
    let mut r = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_path(path)
        .with_context(|| format!("cannot read baseline {}", path.display()))?;
    r.deserialize()
        .collect::<Result<Vec<Row>, _>>()
        .with_context(|| format!("malformed baseline {}", path.display()))
}

/// Run every instance, streaming rows to `out`, then the `#` summary lines.
pub fn run_bench(
    dir: &Path,
    mode: Mode,
    algorithm: Algorithm,
    baseline: Option<&Path>,
    run: &RunArgs,
    out: &mut impl Write,
) -> anyhow::Result<Vec<Row>> {
    let baseline = baseline.map(read_rows).transpose()?;
    let todo = instances(dir, mode)?;
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(&mut *out);
    w.write_record(HEADER)?;
    w.flush()?;
    let mut rows = Vec::new();
    for (name, u, v) in todo {
        let row = run_one(name, &u, v.as_deref(), algorithm, run);
        w.serialize(&row)?;
        w.flush()?;
        rows.push(row);
    }
    drop(w);
    let count = |s: &str| rows.iter().filter(|r| r.status == s).count();
    writeln!(out, "# instances: {} ok, {} timeout, {} error", count("ok"), count("timeout"), count("error"))?;
    if let Some(base) = baseline {
        let summary = speedups(&rows, &base);
        writeln!(out, "# speedup vs baseline (baseline wall_s / wall_s), nearest-rank percentiles")?;
        writeln!(out, "# class,count,median,p90,p95,p99")?;
        for s in summary {
            writeln!(out, "# {},{},{:.3},{:.3},{:.3},{:.3}", s.class, s.count, s.median, s.p90, s.p95, s.p99)?;
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(name: &str, wall: f64, sharing: &str) -> Row {
        Row { wall_s: Some(wall), sharing: Some(sharing.into()), ..Row::new(name.into(), "ok") }
    }

    #[test]
    fn nearest_rank() {
        let v: Vec<f64> = (1..=10).map(f64::from).collect();
        assert_eq!(percentile(&v, 50.0), 5.0);
        assert_eq!(percentile(&v, 90.0), 9.0);
        assert_eq!(percentile(&v, 95.0), 10.0);
        assert_eq!(percentile(&v, 0.0), 1.0);
        assert_eq!(percentile(&[3.0], 99.0), 3.0);
    }

    #[test]
    fn speedups_by_class() {
        let base = [row("a", 4.0, "x"), row("b", 3.0, "x"), row("c", 1.0, "y"), Row::new("d".into(), "timeout")];
        let cur = [row("a", 2.0, "high-sharing"), row("b", 1.0, "high-sharing"), row("c", 2.0, "no-sharing"), row("d", 1.0, "no-sharing")];
        let s = speedups(&cur, &base);
        assert_eq!(s.iter().map(|c| c.class.as_str()).collect::<Vec<_>>(), ["high-sharing", "no-sharing", "all"]);
        assert_eq!((s[0].count, s[0].median, s[0].p99), (2, 2.0, 3.0));
        assert_eq!((s[1].count, s[1].median), (1, 0.5));
        assert_eq!((s[2].count, s[2].median), (3, 2.0));
    }
}
