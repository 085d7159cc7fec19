//! Replays configurations from a TOML manifest:
//!
//! ```toml
//! [[run]]
//! name = "absminus"
//! program = "absminus.mimp"     # relative to the manifest
//! ce = "i=0,j=1"                # or ce_file = "...", or find_ce = 5000
//! unroll = [1]                  # one run per bound
//! max_deviations = 2
//! golden = "goldens/absminus.txt"
//! ```
//!
//! A golden file holds the text report without timings; `{b}` in its path
//! is replaced by the unrolling bound.

use std::io::Write;
use std::path::{Path, PathBuf};

use locfaults_core::locfaults::Options;
use serde::Deserialize;

use crate::args::parse_domain;
use crate::report::render_text;
use crate::run::{read, run_job, CeSource, Job};
use crate::CliError;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    #[serde(default)]
    pub run: Vec<RunSpec>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSpec {
    pub name: String,
    pub program: PathBuf,
    pub ce: Option<String>,
    pub ce_file: Option<PathBuf>,
    pub find_ce: Option<usize>,
    pub ce_range: Option<String>,
    pub unroll: Vec<u32>,
    #[serde(default = "three")]
    pub max_deviations: usize,
    #[serde(default = "three")]
    pub max_mcs_size: usize,
    #[serde(default = "yes")]
    pub marking: bool,
    pub domain: Option<String>,
    pub golden: Option<String>,
}

fn three() -> usize {
    3
}

fn yes() -> bool {
    true
}

/// Result of one configuration.
#[derive(Clone, Debug, PartialEq)]
pub struct Row {
    pub name: String,
    pub unroll: u32,
    pub entries: usize,
    pub dcms: usize,
    /// A golden report was registered and matched.
    pub golden: bool,
    pub preprocessing_ms: f64,
    pub localization_ms: f64,
}

pub fn load_manifest(path: &Path) -> Result<Manifest, CliError> {
    let text = read(path)?;
    toml::from_str(&text).map_err(|e| CliError::Manifest { path: path.to_path_buf(), message: e.to_string() })
}

fn jobs(entry: &RunSpec, base: &Path, manifest: &Path) -> Result<Vec<Job>, CliError> {
    let bad = |message: String| CliError::Manifest { path: manifest.to_path_buf(), message };
    let domain = |s: &Option<String>, d| s.as_deref().map_or(Ok(d), parse_domain).map_err(bad);
    let ce = match (&entry.ce, &entry.ce_file, entry.find_ce) {
        (Some(s), None, None) => CeSource::Inline(s.clone()),
        (None, Some(p), None) => CeSource::File(base.join(p)),
        (None, None, Some(budget)) => {
            CeSource::Search { budget, range: domain(&entry.ce_range, locfaults_core::solver::Domain::new(-8, 8))? }
        }
        _ => return Err(bad(format!("{}: give exactly one of ce, ce_file, find_ce", entry.name))),
    };
    if entry.unroll.is_empty() || entry.unroll.contains(&0) {
        return Err(bad(format!("{}: unroll must list positive bounds", entry.name)));
    }
    if entry.max_deviations > 8 || !(1..=8).contains(&entry.max_mcs_size) {
        return Err(bad(format!("{}: max_deviations must be 0..8 and max_mcs_size 1..8", entry.name)));
    }
    let options = Options {
        max_deviations: entry.max_deviations,
        max_mcs: entry.max_mcs_size,
        marking: entry.marking,
        domain: domain(&entry.domain, Options::default().domain)?,
    };
    Ok(entry
        .unroll
        .iter()
        .map(|&unroll| Job { program: base.join(&entry.program), ce: ce.clone(), unroll, options })
        .collect())
}

fn blocks(text: &str) -> Vec<String> {
    let mut out = vec![String::new()];
    for line in text.lines() {
        if line.starts_with("deviation:") || line.starts_with("warning:") {
            out.push(String::new());
        }
        let last = out.last_mut().expect("non-empty");
        last.push_str(line);
        last.push('\n');
    }
    out
}

/// First block on which two text reports differ: `(what, expected, actual)`.
pub fn first_difference(expected: &str, actual: &str) -> Option<(String, String, String)> {
    let (e, a) = (blocks(expected), blocks(actual));
    let n = e.len().max(a.len());
    let show = |b: Option<&String>| b.map_or("(missing)".to_string(), |s| s.trim_end().replace('\n', " | "));
    (0..n).find(|i| e.get(*i) != a.get(*i)).map(|i| {
        let what = if i == 0 { "header".to_string() } else { format!("entry {}", i - 1) };
        (what, show(e.get(i)), show(a.get(i)))
    })
}

/// Runs every configuration; stops at the first error or golden mismatch.
pub fn run_manifest(path: &Path) -> Result<Vec<Row>, CliError> {
    let manifest = load_manifest(path)?;
    let base = path.parent().unwrap_or(Path::new("."));
    let mut rows = Vec::new();
    for entry in &manifest.run {
        for job in jobs(entry, base, path)? {
            let outcome = run_job(&job)?;
            let mut report = outcome.report;
            let timings = report.timings.take().expect("run_job records timings");
            let golden = match &entry.golden {
                None => false,
                Some(g) => {
                    let expected = read(&base.join(g.replace("{b}", &job.unroll.to_string())))?;
                    let actual = render_text(&report);
                    if let Some((what, expected, actual)) = first_difference(&expected, &actual) {
                        let run = format!("{} (b={})", entry.name, job.unroll);
                        return Err(CliError::GoldenMismatch { run, what, expected, actual });
                    }
                    true
                }
            };
            rows.push(Row {
                name: entry.name.clone(),
                unroll: job.unroll,
                entries: report.entries.len(),
                dcms: report.entries.iter().filter(|e| e.is_dcm).count(),
                golden,
                preprocessing_ms: timings.preprocessing_ms,
                localization_ms: timings.localization_ms,
            });
        }
    }
    Ok(rows)
}

pub fn render_rows(rows: &[Row], timings: bool) -> String {
    let mut out = format!("{:<16} {:>5} {:>8} {:>5} {:>7}", "run", "b", "entries", "dcms", "golden");
    if timings {
        out.push_str(&format!(" {:>12} {:>12}", "P (ms)", "L (ms)"));
    }
    out.push('\n');
    for r in rows {
        let golden = if r.golden { "ok" } else { "-" };
        out.push_str(&format!("{:<16} {:>5} {:>8} {:>5} {:>7}", r.name, r.unroll, r.entries, r.dcms, golden));
        if timings {
            out.push_str(&format!(" {:>12.3} {:>12.3}", r.preprocessing_ms, r.localization_ms));
        }
        out.push('\n');
    }
    out
}

pub fn run(path: &Path, timings: bool, out: &mut dyn Write) -> Result<(), CliError> {
    let rows = run_manifest(path)?;
    out.write_all(render_rows(&rows, timings).as_bytes()).map_err(|e| CliError::io("<stdout>", e))
}
