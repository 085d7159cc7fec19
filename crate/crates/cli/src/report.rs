//! Report rendering. Both formats are produced from [`JsonReport`], whose
//! serialized form is the `locfaults-report/1` schema.

use std::collections::BTreeMap;
use std::fmt::Write;

use locfaults_core::locfaults::Report;
use serde::{Deserialize, Serialize};

use crate::ce::{to_json, JsonValue};

pub const SCHEMA: &str = "locfaults-report/1";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JsonReport {
    pub schema: String,
    pub program: String,
    pub counterexample: BTreeMap<String, JsonValue>,
    pub config: Config,
    pub flags: Flags,
    pub entries: Vec<JsonEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timings: Option<Timings>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Config {
    pub unroll: u32,
    pub max_deviations: usize,
    pub max_mcs_size: usize,
    pub marking: bool,
    pub domain: [i64; 2],
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Flags {
    /// Some path needed more iterations than the unrolling bound allows.
    pub unroll_insufficient: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct JsonEntry {
    pub deviation: Vec<String>,
    pub corrected: bool,
    pub is_dcm: bool,
    pub mcss: Vec<Vec<String>>,
}

/// Milliseconds.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    pub preprocessing_ms: f64,
    pub localization_ms: f64,
}

impl JsonReport {
    pub fn new(report: &Report, timings: Option<Timings>) -> Self {
        let strs = |v: &[locfaults_core::LocRef]| v.iter().map(|l| l.to_string()).collect::<Vec<_>>();
        JsonReport {
            schema: SCHEMA.to_string(),
            program: report.program.clone(),
            counterexample: to_json(&report.counterexample),
            config: Config {
                unroll: report.unroll_bound,
                max_deviations: report.options.max_deviations,
                max_mcs_size: report.options.max_mcs,
                marking: report.options.marking,
                domain: [report.options.domain.lo, report.options.domain.hi],
            },
            flags: Flags { unroll_insufficient: report.unroll_insufficient },
            entries: report
                .entries
                .iter()
                .map(|e| JsonEntry {
                    deviation: strs(&e.deviation),
                    corrected: e.corrected,
                    is_dcm: e.is_dcm,
                    mcss: e.mcss.iter().map(|m| strs(m)).collect(),
                })
                .collect(),
            timings,
        }
    }
}

pub fn render_json(report: &JsonReport) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report serializes");
    s.push('\n');
    s
}

fn set(items: &[String]) -> String {
    format!("{{{}}}", items.join(", "))
}

/// Header lines, then one block per entry.
pub fn render_text(report: &JsonReport) -> String {
    let mut out = String::new();
    let ce: Vec<String> = report
        .counterexample
        .iter()
        .map(|(k, v)| match v {
            JsonValue::Int(x) => format!("{k}={x}"),
            JsonValue::Array(xs) => {
                format!("{k}=[{}]", xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","))
            }
        })
        .collect();
    let c = &report.config;
    let _ = writeln!(out, "program: {}", report.program);
    let _ = writeln!(out, "counterexample: {}", set(&ce));
    let _ = writeln!(
        out,
        "unroll: {}, max deviations: {}, max mcs size: {}, marking: {}, domain: {}..{}",
        c.unroll,
        c.max_deviations,
        c.max_mcs_size,
        if c.marking { "on" } else { "off" },
        c.domain[0],
        c.domain[1]
    );
    for e in &report.entries {
        out.push_str(&render_entry(e));
    }
    if report.flags.unroll_insufficient {
        out.push_str("warning: some paths need more loop iterations than unrolled\n");
    }
    if let Some(t) = &report.timings {
        let _ = writeln!(out, "time: preprocessing {:.3} ms, localization {:.3} ms", t.preprocessing_ms, t.localization_ms);
    }
    out
}

pub fn render_entry(e: &JsonEntry) -> String {
    let mut out = format!("deviation: {}", set(&e.deviation));
    if !e.deviation.is_empty() && !e.is_dcm {
        out.push_str(" (not a DCM)");
    }
    out.push('\n');
    if e.mcss.is_empty() {
        out.push_str("  mcs: (none)\n");
    }
    for m in &e.mcss {
        let _ = writeln!(out, "  mcs: {}", set(m));
    }
    out
}
