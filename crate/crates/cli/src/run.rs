use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::error::ErrorKind;
use clap::Parser;
use locfaults_core::cfg::Cfg;
use locfaults_core::frontend::{load, ParseOptions, ValidatedProgram};
use locfaults_core::input::Counterexample;
use locfaults_core::locfaults::{find_counterexample, localize, prepare, Options};
use locfaults_core::solver::Domain;

use crate::args::{Cli, Command, Format, RunArgs, Switch};
use crate::report::{render_json, render_text, JsonReport, Timings};
use crate::{bench, ce, dot, CliError};

#[derive(Clone, Debug)]
pub enum CeSource {
    Inline(String),
    File(PathBuf),
    Search { budget: usize, range: Domain },
}

/// One localization run.
#[derive(Clone, Debug)]
pub struct Job {
    pub program: PathBuf,
    pub ce: CeSource,
    pub unroll: u32,
    pub options: Options,
}

pub struct Outcome {
    pub report: JsonReport,
    pub cfg: Cfg,
}

pub fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

fn load_program(path: &Path, domain: Domain) -> Result<ValidatedProgram, CliError> {
    let text = read(path)?;
    load(&text, &ParseOptions { domain }).map_err(|source| CliError::Frontend { path: path.to_path_buf(), source })
}

fn counterexample(job: &Job, program: &ValidatedProgram) -> Result<Counterexample, CliError> {
    let ce = match &job.ce {
        CeSource::Inline(s) => ce::parse_inline(s)?,
        CeSource::File(p) => ce::parse_json(&read(p)?)?,
        CeSource::Search { budget, range } => {
            find_counterexample(program, job.unroll, *budget, *range).ok_or(CliError::NoCounterexample(*budget))?
        }
    };
    Ok(ce.conform(program)?)
}

pub fn run_job(job: &Job) -> Result<Outcome, CliError> {
    let t0 = Instant::now();
    let program = load_program(&job.program, job.options.domain)?;
    let cfg = prepare(&program, job.unroll).map_err(|e| CliError::Localize(e.into()))?;
    let preprocessing = t0.elapsed();
    let ce = counterexample(job, &program)?;
    let t1 = Instant::now();
    let report = localize(&cfg, &ce, &job.options)?;
    let localization = t1.elapsed();
    let timings = Timings {
        preprocessing_ms: preprocessing.as_secs_f64() * 1e3,
        localization_ms: localization.as_secs_f64() * 1e3,
    };
    Ok(Outcome { report: JsonReport::new(&report, Some(timings)), cfg })
}

fn job_from(args: &RunArgs) -> Result<Job, CliError> {
    let program = args.program.clone().ok_or_else(|| CliError::Usage("no program given".into()))?;
    let ce = match (&args.ce, &args.ce_file, args.find_ce) {
        (Some(s), _, _) => CeSource::Inline(s.clone()),
        (_, Some(p), _) => CeSource::File(p.clone()),
        (_, _, Some(budget)) => CeSource::Search { budget, range: args.ce_range },
        _ => return Err(CliError::Usage("one of --ce, --ce-file or --find-ce is required".into())),
    };
    Ok(Job {
        program,
        ce,
        unroll: args.unroll,
        options: Options {
            max_deviations: args.max_deviations.into(),
            max_mcs: args.max_mcs_size.into(),
            marking: args.marking == Switch::On,
            domain: args.domain,
        },
    })
}

fn localize_command(args: &RunArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let job = job_from(args)?;
    let Outcome { mut report, cfg } = run_job(&job)?;
    if let Some(path) = &args.dot {
        std::fs::write(path, dot::render(&cfg)).map_err(|e| CliError::io(path, e))?;
    }
    if args.no_timings {
        report.timings = None;
    }
    let text = match args.format {
        Format::Text => render_text(&report),
        Format::Json => render_json(&report),
    };
    out.write_all(text.as_bytes()).map_err(|e| CliError::io("<stdout>", e))
}

/// Runs the command line `args` (program name first) and returns the exit code.
pub fn main_with_args<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = write!(out, "{e}");
            return 0;
        }
        Err(e) => {
            let msg = e.to_string();
            let msg = msg.trim_end().strip_prefix("error: ").unwrap_or(msg.trim_end());
            let _ = writeln!(err, "error[usage]: {msg}");
            return 1;
        }
    };
    let result = match &cli.command {
        Some(Command::Bench { manifest, no_timings }) => bench::run(manifest, !no_timings, out),
        None => localize_command(&cli.run, out),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error[{}]: {e}", e.code());
            e.exit_code()
        }
    }
}
