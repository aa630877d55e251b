//! `supctl`: batch front end for timed supervisor synthesis.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use supctl_core::delayopt::optimal_delays;
use supctl_core::dot::{plant_dot, supervisor_dot};
use supctl_core::format::{
    automaton_to_doc, family_doc, parse_mode, DelayReportDoc, ExecTimeReport, Problem, RelaxReportDoc,
    SynthesisReport,
};
use supctl_core::minlang::minimal_sublanguages;
use supctl_core::rational::format_rational;
use supctl_core::relax::{minimal_relaxations_capped, DEFAULT_MAX_JOBS};
use supctl_core::synthesis::sup_c;
use supctl_core::{derive_resources, DurationValuation, Error, ResourceModel, SynthesisResult};

const EXIT_VALIDATION: u8 = 2;
const EXIT_EMPTY: u8 = 3;
const EXIT_INFEASIBLE: u8 = 4;

#[derive(Parser)]
#[command(name = "supctl", version, about = "Timed supervisor synthesis under job deadlines")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execution time, job times and final resource heights of one string.
    Exectime {
        #[command(flatten)]
        common: Common,
        /// Space-separated event names.
        #[arg(long)]
        string: String,
    },
    /// Supremal controllable sublanguage meeting every deadline.
    Synth(Common),
    /// Minimum-earliness delays over the minimal controllable sublanguages.
    Delays(Common),
    /// Minimal sets of jobs whose deadlines must be dropped.
    Relax(Common),
    /// Minimal controllable sublanguages of the synthesized supervisor.
    Minimal(Common),
}

#[derive(Args)]
struct Common {
    /// Problem document (JSON).
    problem: PathBuf,
    /// Directory for output files; the report goes to stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Delay solver: exact or slp. Overrides the problem options.
    #[arg(long)]
    mode: Option<String>,
    #[arg(long)]
    max_patterns: Option<usize>,
    #[arg(long)]
    max_jobs: Option<usize>,
    /// Also write Graphviz files (needs --out).
    #[arg(long)]
    dot: bool,
}

struct Loaded {
    problem: Problem,
    rm: ResourceModel,
}

impl Common {
    fn load(&self) -> anyhow::Result<Loaded> {
        let mut problem = Problem::load(&self.problem)?;
        if let Some(m) = &self.mode {
            parse_mode(m)?;
            problem.options.mode = Some(m.clone());
        }
        if let Some(n) = self.max_patterns {
            problem.options.max_patterns = Some(n);
        }
        if let Some(n) = self.max_jobs {
            problem.options.max_jobs = Some(n);
        }
        if self.dot && self.out.is_none() {
            bail!(Error::Parse("--dot needs --out".into()));
        }
        let rm = derive_resources(&problem.plant)?;
        Ok(Loaded { problem, rm })
    }

    fn out_dir(&self) -> anyhow::Result<Option<&Path>> {
        match &self.out {
            Some(d) => {
                fs::create_dir_all(d).with_context(|| format!("cannot create {}", d.display()))?;
                Ok(Some(d))
            }
            None => Ok(None),
        }
    }
}

fn json<T: Serialize>(v: &T) -> anyhow::Result<String> {
    Ok(serde_json::to_string_pretty(v)? + "\n")
}

fn write(dir: &Path, name: &str, text: &str) -> anyhow::Result<()> {
    let path = dir.join(name);
    fs::write(&path, text).with_context(|| format!("cannot write {}", path.display()))?;
    println!("wrote {}", path.display());
    Ok(())
}

/// Writes `name` under `--out`, or prints the text when there is no output
/// directory.
fn emit(c: &Common, name: &str, text: &str) -> anyhow::Result<()> {
    match c.out_dir()? {
        Some(d) => write(d, name, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn synthesize(l: &Loaded) -> anyhow::Result<SynthesisResult> {
    let p = &l.problem;
    Ok(sup_c(&p.plant, &l.rm, &p.jobs, DurationValuation::base(&p.plant))?)
}

fn exectime(c: &Common, string: &str) -> anyhow::Result<u8> {
    let l = c.load()?;
    let p = &l.problem;
    let s = p.plant.events().parse_word(string)?;
    let report = ExecTimeReport::new(&p.plant, &l.rm, &p.jobs, &s)?;
    emit(c, "exectime.json", &json(&report)?)?;
    Ok(0)
}

fn synth(c: &Common) -> anyhow::Result<u8> {
    let l = c.load()?;
    let p = &l.problem;
    let r = synthesize(&l)?;
    let report = SynthesisReport::new(&r, &p.jobs);
    match c.out_dir()? {
        Some(d) => {
            write(d, "supervisor.json", &json(&automaton_to_doc(r.automaton()))?)?;
            write(d, "synthesis.json", &json(&report)?)?;
            if c.dot {
                write(d, "supervisor.dot", &supervisor_dot(&r.supervisor, &p.plant, "supervisor"))?;
                write(d, "plant.dot", &plant_dot(&p.plant, "plant"))?;
            }
            print_table(&r);
        }
        None => print!("{}", json(&report)?),
    }
    Ok(if r.is_empty() { EXIT_EMPTY } else { 0 })
}

fn print_table(r: &SynthesisResult) {
    let t = r.automaton().event_table();
    if r.is_empty() {
        println!("supervisor is empty");
        return;
    }
    println!("string\tjob times\tearliness");
    for s in &r.strings {
        let times: Vec<String> = s.job_times.iter().map(format_rational).collect();
        let e = s.earliness.as_ref().map(format_rational).unwrap_or_else(|| "-".into());
        println!("{}\t({})\t{e}", t.format_word(&s.word), times.join(", "));
    }
}

fn delays(c: &Common) -> anyhow::Result<u8> {
    let l = c.load()?;
    let p = &l.problem;
    let k = synthesize(&l)?;
    if k.is_empty() {
        eprintln!("supervisor is empty; no delays to optimize");
        return Ok(EXIT_EMPTY);
    }
    let opts = p.options.delay_options()?;
    let report = optimal_delays(&p.plant, &l.rm, &p.jobs, &k, opts)?;
    emit(c, "delays.json", &json(&DelayReportDoc::new(&report, &p.plant))?)?;
    Ok(0)
}

fn relax(c: &Common) -> anyhow::Result<u8> {
    let l = c.load()?;
    let p = &l.problem;
    let cap = p.options.max_jobs.unwrap_or(DEFAULT_MAX_JOBS);
    let report = minimal_relaxations_capped(&p.plant, &l.rm, &p.jobs, DurationValuation::base(&p.plant), cap)?;
    emit(c, "relax.json", &json(&RelaxReportDoc::new(&report, &p.jobs))?)?;
    Ok(if report.infeasible { EXIT_INFEASIBLE } else { 0 })
}

fn minimal(c: &Common) -> anyhow::Result<u8> {
    let l = c.load()?;
    let p = &l.problem;
    let k = synthesize(&l)?;
    if k.is_empty() {
        eprintln!("supervisor is empty");
        return Ok(EXIT_EMPTY);
    }
    let family = minimal_sublanguages(k.automaton(), p.plant.automaton())?;
    let doc: BTreeSet<Vec<String>> = family_doc(&family, p.plant.events()).into_iter().collect();
    emit(c, "minimal.json", &json(&doc)?)?;
    Ok(0)
}

/// Validation problems in the input exit with 2; everything else with 1.
fn exit_code(e: &anyhow::Error) -> u8 {
    match e.downcast_ref::<Error>() {
        Some(Error::Model(_) | Error::Parse(_) | Error::Json(_) | Error::Trajectory(_)) => EXIT_VALIDATION,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Exectime { common, string } => exectime(common, string),
        Command::Synth(c) => synth(c),
        Command::Delays(c) => delays(c),
        Command::Relax(c) => relax(c),
        Command::Minimal(c) => minimal(c),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
