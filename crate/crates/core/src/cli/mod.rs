//! Command-line front end: TOML jobs in, JSON reports out.
//!
//! Exit codes are 0 on success, 2 when `etale-check` returns a failing
//! verdict and 1 on any error.

mod cache;
mod job;
mod report;

use std::ffi::OsString;
use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use cache::{job_key, Cache, DEFAULT_DIR};
pub use job::{
    parse_job, CapsSpec, Command, Entry, GroupSpec, JobSpec, MapsSpec, MatrixList, PairSpec, PresentationSpec,
    RepresentationSpec, RingSpec,
};
pub use report::{clause, error_body, exit_code, run, verify_cached, Outcome, Report, Settings, TOOL, VERSION};

use crate::{Error, Result};

#[derive(Debug, Parser)]
#[command(name = "udr", version, about = "Deformations of finite group representations over finite local rings")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Debug, Subcommand)]
enum Sub {
    /// Is the rational fiber of a presented ring finite etale?
    EtaleCheck(JobArgs),
    /// Necessary condition for a universal deformation ring, with catalog lookup.
    NecessaryCondition(JobArgs),
    /// Count strict equivalence classes of lifts over a finite local ring.
    Defcount(JobArgs),
    /// Deformations to the dual numbers.
    Tangent(JobArgs),
    /// Decide strict equivalence of two lifts by averaging.
    MarandaCheck(JobArgs),
    /// Lower bound on |G| from two congruent but distinct maps.
    OrderBound(JobArgs),
    /// Count local homomorphisms between finite local rings.
    HomCount(JobArgs),
    /// Isomorphism invariants of one or two finite local rings.
    Fingerprint(JobArgs),
    /// Is a presented ring finite and free over W(k)?
    WCheck(JobArgs),
}

#[derive(Debug, Clone, Default, Args)]
pub struct JobArgs {
    /// TOML job file; without one, a presentation can be given inline.
    pub job: Option<PathBuf>,
    #[arg(long)]
    pub precision: Option<u32>,
    #[arg(long)]
    pub cap_elements: Option<u64>,
    #[arg(long)]
    pub cap_maps: Option<u64>,
    #[arg(long)]
    pub degree_cap: Option<u32>,
    /// Write the report here as well as to stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long)]
    pub no_cache: bool,
    #[arg(long, default_value = DEFAULT_DIR)]
    pub cache_dir: PathBuf,
    /// Worker threads; reports do not depend on this.
    #[arg(long)]
    pub threads: Option<usize>,
    /// Inline presentation: the prime.
    #[arg(long)]
    pub prime: Option<u64>,
    /// Inline presentation: a variable name (repeatable).
    #[arg(long = "var")]
    pub vars: Vec<String>,
    /// Inline presentation: a relation (repeatable).
    #[arg(long = "rel")]
    pub rels: Vec<String>,
    #[arg(long)]
    pub residue_degree: Option<u32>,
}

impl Sub {
    fn split(self) -> (Command, JobArgs) {
        match self {
            Sub::EtaleCheck(a) => (Command::EtaleCheck, a),
            Sub::NecessaryCondition(a) => (Command::NecessaryCondition, a),
            Sub::Defcount(a) => (Command::Defcount, a),
            Sub::Tangent(a) => (Command::Tangent, a),
            Sub::MarandaCheck(a) => (Command::MarandaCheck, a),
            Sub::OrderBound(a) => (Command::OrderBound, a),
            Sub::HomCount(a) => (Command::HomCount, a),
            Sub::Fingerprint(a) => (Command::Fingerprint, a),
            Sub::WCheck(a) => (Command::WCheck, a),
        }
    }
}

/// The job file (or inline presentation) with command-line overrides
/// applied.
pub fn resolve_job(command: Command, args: &JobArgs) -> Result<JobSpec> {
    let mut job = match &args.job {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
            parse_job(&text)?
        }
        None => JobSpec::default(),
    };
    if let Some(c) = job.command {
        if c != command {
            return Err(Error::InvalidParameter(format!(
                "job file is for {}, not {}",
                c.name(),
                command.name()
            )));
        }
    }
    job.command = Some(command);
    if let Some(p) = args.prime {
        if job.presentation.is_some() {
            return Err(Error::InvalidParameter("inline presentation given together with a [presentation] block".into()));
        }
        job.presentation = Some(PresentationSpec {
            p,
            residue_degree: args.residue_degree,
            variables: args.vars.clone(),
            relations: args.rels.clone(),
        });
    } else if !args.vars.is_empty() || !args.rels.is_empty() {
        return Err(Error::InvalidParameter("inline presentations need --prime".into()));
    }
    if args.precision.is_some() {
        job.precision = args.precision;
    }
    if args.cap_elements.is_some() || args.cap_maps.is_some() || args.degree_cap.is_some() {
        let caps = job.caps.get_or_insert_with(CapsSpec::default);
        caps.elements = args.cap_elements.or(caps.elements);
        caps.maps = args.cap_maps.or(caps.maps);
        caps.degree = args.degree_cap.or(caps.degree);
    }
    if let Some(out) = &args.output {
        job.output = Some(out.display().to_string());
    }
    job.validate()?;
    Ok(job)
}

/// Runs a resolved job, consulting the cache when given one. A cached
/// report is used only after it re-verifies.
pub fn execute(job: &JobSpec, cache: Option<&Cache>) -> Result<Outcome> {
    let command = job.command.ok_or_else(|| Error::InvalidParameter("job does not name a command".into()))?;
    let key = job_key(job);
    if let Some(cache) = cache {
        if let Some(body) = cache.load(&key) {
            if verify_cached(job, &body).unwrap_or(false) {
                let value: serde_json::Value = serde_json::from_str(&body).map_err(|e| Error::Internal(e.to_string()))?;
                return Ok(Outcome { exit_code: exit_code(command, &value["result"]), body });
            }
            cache.evict(&key);
        }
    }
    let (report, code) = run(job)?;
    let body = report.render();
    if let Some(cache) = cache {
        cache.store(&key, &body)?;
    }
    Ok(Outcome { exit_code: code, body })
}

fn execute_with_threads(job: &JobSpec, cache: Option<&Cache>, threads: Option<usize>) -> Result<Outcome> {
    match threads {
        None => execute(job, cache),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?
            .install(|| execute(job, cache)),
    }
}

/// Parses `argv`, runs the job and prints the report. Returns the exit code.
pub fn main_with_args<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let (command, args) = cli.command.split();
    let cache = (!args.no_cache).then(|| Cache::new(args.cache_dir.clone()));
    let outcome = resolve_job(command, &args).and_then(|job| {
        let out = execute_with_threads(&job, cache.as_ref(), args.threads)?;
        if let Some(path) = &job.output {
            fs::write(path, &out.body).map_err(|e| Error::Io(format!("{path}: {e}")))?;
        }
        Ok(out)
    });
    match outcome {
        Ok(out) => {
            print!("{}", out.body);
            out.exit_code
        }
        Err(e) => {
            print!("{}", error_body(Some(command), &e));
            1
        }
    }
}

pub fn main() -> i32 {
    main_with_args(std::env::args_os())
}
