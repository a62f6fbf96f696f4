//! Report files. Field order is fixed and no clock or host data is recorded, so the same
//! input and tool version give byte-identical output.

use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use kappa_core::solvers::Attempt;
use kappa_core::{Inertia, SchurPair, SolveReport, SolveStatus};

use crate::problem::{from_c64, Complex, RationalSpec};

pub const REPORT_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Certified,
    Solved,
    Infeasible,
    SearchFailed,
    TruncationUnstable,
    NoCleanGap,
    AssemblyMismatch,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Certified | Status::Solved => 0,
            Status::Infeasible => 2,
            Status::SearchFailed | Status::TruncationUnstable | Status::NoCleanGap | Status::AssemblyMismatch => 3,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Tool {
    pub name: &'static str,
    pub version: &'static str,
}

#[derive(Debug, Clone, Serialize)]
pub struct EffectiveSettings {
    pub tol: f64,
    pub grid: usize,
    pub trunc: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct Certificate {
    pub n_neg: usize,
    pub n_zero: usize,
    pub n_pos: usize,
    pub threshold: f64,
    pub spectrum: Vec<f64>,
}

impl From<&Inertia> for Certificate {
    fn from(i: &Inertia) -> Self {
        Self { n_neg: i.n_neg, n_zero: i.n_zero, n_pos: i.n_pos, threshold: i.threshold, spectrum: i.spectrum.clone() }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BlaschkeSpec {
    pub zeros: Vec<Complex>,
    pub constant: Complex,
}

#[derive(Debug, Clone, Serialize)]
pub struct PairSpec {
    pub kappa: usize,
    pub f: RationalSpec,
    pub b: BlaschkeSpec,
    pub coprime: bool,
}

impl From<&SchurPair> for PairSpec {
    fn from(p: &SchurPair) -> Self {
        Self {
            kappa: p.kappa,
            f: RationalSpec::from_function(&p.f),
            b: BlaschkeSpec {
                zeros: p.b.zeros().iter().map(|z| from_c64(*z)).collect(),
                constant: from_c64(p.b.constant()),
            },
            coprime: p.coprime,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct AttemptSpec {
    pub kappa: usize,
    pub objective: f64,
    pub status: &'static str,
}

fn status_name(s: SolveStatus) -> &'static str {
    match s {
        SolveStatus::Solved => "solved",
        SolveStatus::Infeasible => "infeasible",
        SolveStatus::SearchFailed => "search-failed",
    }
}

impl From<&Attempt> for AttemptSpec {
    fn from(a: &Attempt) -> Self {
        Self { kappa: a.kappa, objective: a.objective, status: status_name(a.status) }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Solution {
    pub status: &'static str,
    pub pair: Option<PairSpec>,
    pub interpolation_residual: Option<f64>,
    pub verification_residual: Option<f64>,
    pub verification_order: Option<usize>,
    pub identity_residual: Option<f64>,
    pub matching_order: Option<usize>,
    pub attempts: Vec<AttemptSpec>,
}

impl From<&SolveReport> for Solution {
    fn from(r: &SolveReport) -> Self {
        Self {
            status: status_name(r.status),
            pair: r.pair.as_ref().map(PairSpec::from),
            interpolation_residual: r.interpolation_residual,
            verification_residual: r.verification.map(|v| v.residual),
            verification_order: r.verification.map(|v| v.order),
            identity_residual: r.identity_residual,
            matching_order: r.matching_order,
            attempts: r.attempts.iter().map(AttemptSpec::from).collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub tool: Tool,
    pub input_digest: String,
    pub kind: &'static str,
    pub settings: EffectiveSettings,
    pub status: Status,
    pub kappa: Option<usize>,
    pub certificate: Option<Certificate>,
    pub diagnostics: BTreeMap<String, Value>,
    pub solution: Option<Solution>,
}

impl Report {
    pub fn new(kind: &'static str, input: &[u8], settings: EffectiveSettings) -> Self {
        Self {
            schema_version: REPORT_SCHEMA_VERSION,
            tool: Tool { name: "kappa", version: env!("CARGO_PKG_VERSION") },
            input_digest: digest(input),
            kind,
            settings,
            status: Status::Certified,
            kappa: None,
            certificate: None,
            diagnostics: BTreeMap::new(),
            solution: None,
        }
    }

    pub fn certify(&mut self, i: &Inertia) {
        self.kappa = Some(i.n_neg);
        self.certificate = Some(Certificate::from(i));
    }

    pub fn note<V: Serialize>(&mut self, key: &str, value: V) {
        let v = serde_json::to_value(value).unwrap_or(Value::Null);
        self.diagnostics.insert(key.to_string(), v);
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// Long-format CSV with columns `section,key,index,value`.
    pub fn to_csv(&self) -> String {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        w.write_record(["section", "key", "index", "value"]).expect("in-memory write");
        let mut row = |section: &str, key: &str, index: Option<usize>, value: String| {
            let idx = index.map(|i| i.to_string()).unwrap_or_default();
            w.write_record([section, key, idx.as_str(), value.as_str()]).expect("in-memory write");
        };
        row("report", "schema_version", None, self.schema_version.to_string());
        row("report", "tool_version", None, self.tool.version.to_string());
        row("report", "input_digest", None, self.input_digest.clone());
        row("report", "kind", None, self.kind.to_string());
        row("report", "status", None, json_scalar(&serde_json::to_value(self.status).unwrap_or(Value::Null)));
        row("report", "kappa", None, self.kappa.map(|k| k.to_string()).unwrap_or_default());
        row("settings", "tol", None, self.settings.tol.to_string());
        row("settings", "grid", None, self.settings.grid.to_string());
        row("settings", "trunc", None, self.settings.trunc.to_string());
        if let Some(c) = &self.certificate {
            row("certificate", "n_neg", None, c.n_neg.to_string());
            row("certificate", "n_zero", None, c.n_zero.to_string());
            row("certificate", "n_pos", None, c.n_pos.to_string());
            row("certificate", "threshold", None, c.threshold.to_string());
            for (i, v) in c.spectrum.iter().enumerate() {
                row("spectrum", "eigenvalue", Some(i), v.to_string());
            }
        }
        for (k, v) in &self.diagnostics {
            match v {
                Value::Array(items) => {
                    for (i, item) in items.iter().enumerate() {
                        row("diagnostics", k, Some(i), json_scalar(item));
                    }
                }
                other => row("diagnostics", k, None, json_scalar(other)),
            }
        }
        if let Some(s) = &self.solution {
            let v = serde_json::to_value(s).unwrap_or(Value::Null);
            if let Value::Object(map) = v {
                for (k, v) in map {
                    row("solution", &k, None, json_scalar(&v));
                }
            }
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 csv")
    }
}

fn json_scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

pub fn digest(bytes: &[u8]) -> String {
    let h = Sha256::digest(bytes);
    let hex: String = h.iter().map(|b| format!("{b:02x}")).collect();
    format!("sha256:{hex}")
}
