use std::collections::BTreeMap;
use std::io::Write;

use serde::Serialize;

use crate::args::Output;

#[derive(Serialize, Debug, Clone, PartialEq)]
pub struct SimReport {
    pub circuit: String,
    pub status: &'static str,
    pub num_qubits: usize,
    pub gates: usize,
    /// State-vector computation only; parsing and sampling are excluded.
    pub wall_time_s: f64,
    pub final_nodes: usize,
    pub peak_nodes: usize,
    pub sharing_class: String,
    pub l2_norm: f64,
    pub norm_strategy: String,
    pub workers: usize,
    pub shots: usize,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub histogram: Option<BTreeMap<String, usize>>,
}

#[derive(Serialize, Debug, Clone, PartialEq)]
pub struct Factor {
    pub re: f64,
    pub im: f64,
}

#[derive(Serialize, Debug, Clone, PartialEq)]
pub struct EqReport {
    pub u: String,
    pub v: String,
    pub status: &'static str,
    pub num_qubits: usize,
    pub algorithm: String,
    pub equivalent: bool,
    pub factor: Option<Factor>,
    pub witness: Option<String>,
    pub wall_time_s: f64,
    pub peak_nodes: usize,
    pub steps: usize,
    pub workers: usize,
}

#[derive(Serialize, Debug, Clone, PartialEq)]
pub struct TimeoutReport {
    pub circuit: String,
    pub status: &'static str,
    pub timeout_s: f64,
}

/// Flat `(field, value)` view used by the CSV and text renderings.
pub trait Fields {
    fn fields(&self) -> Vec<(&'static str, String)>;
}

fn opt<T: ToString>(v: &Option<T>) -> String {
    v.as_ref().map_or_else(String::new, T::to_string)
}

impl Fields for SimReport {
    fn fields(&self) -> Vec<(&'static str, String)> {
        let hist = self.histogram.as_ref().map(|h| {
            h.iter().map(|(k, v)| format!("{k}:{v}")).collect::<Vec<_>>().join(";")
        });
        vec![
            ("circuit", self.circuit.clone()),
            ("status", self.status.into()),
            ("num_qubits", self.num_qubits.to_string()),
            ("gates", self.gates.to_string()),
            ("wall_time_s", self.wall_time_s.to_string()),
            ("final_nodes", self.final_nodes.to_string()),
            ("peak_nodes", self.peak_nodes.to_string()),
            ("sharing_class", self.sharing_class.clone()),
            ("l2_norm", self.l2_norm.to_string()),
            ("norm_strategy", self.norm_strategy.clone()),
            ("workers", self.workers.to_string()),
            ("shots", self.shots.to_string()),
            ("seed", self.seed.to_string()),
            ("histogram", hist.unwrap_or_default()),
        ]
    }
}

impl Fields for EqReport {
    fn fields(&self) -> Vec<(&'static str, String)> {
        let factor = self.factor.as_ref().map(|f| format!("{}{:+}i", f.re, f.im));
        vec![
            ("u", self.u.clone()),
            ("v", self.v.clone()),
            ("status", self.status.into()),
            ("num_qubits", self.num_qubits.to_string()),
            ("algorithm", self.algorithm.clone()),
            ("equivalent", self.equivalent.to_string()),
            ("factor", factor.unwrap_or_default()),
            ("witness", opt(&self.witness)),
            ("wall_time_s", self.wall_time_s.to_string()),
            ("peak_nodes", self.peak_nodes.to_string()),
            ("steps", self.steps.to_string()),
            ("workers", self.workers.to_string()),
        ]
    }
}

impl Fields for TimeoutReport {
    fn fields(&self) -> Vec<(&'static str, String)> {
        vec![
            ("circuit", self.circuit.clone()),
            ("status", self.status.into()),
            ("timeout_s", self.timeout_s.to_string()),
        ]
    }
}

pub fn render<R: Serialize + Fields>(r: &R, format: Output, out: &mut impl Write) -> std::io::Result<()> {
    match format {
        Output::Json => {
            serde_json::to_writer_pretty(&mut *out, r)?;
            writeln!(out)
        }
        Output::Csv => {
            let fields = r.fields();
            let mut w = csv::Writer::from_writer(out);
            w.write_record(fields.iter().map(|(k, _)| *k))?;
            w.write_record(fields.iter().map(|(_, v)| v.as_str()))?;
            w.flush()
        }
        Output::Text => {
            for (k, v) in r.fields() {
                if !v.is_empty() {
                    writeln!(out, "{k:<14} {v}")?;
                }
            }
            Ok(())
        }
    }
}
