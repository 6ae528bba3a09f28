//! Batch driver: censuses, formula checks and report emission.

pub mod config;
pub mod inspect;
pub mod report;
pub mod verify;

use std::io::Write;

use config::{resolve_qs, Cli, Command, ConfigError, RunConfig};

/// Exit statuses.
pub const EXIT_PASS: i32 = 0;
pub const EXIT_MISMATCH: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

/// What a command produced: the report text, remarks for stderr, and the exit status.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub report: String,
    pub notices: Vec<String>,
    pub status: i32,
}

fn with_pool<T: Send>(threads: Option<usize>, job: impl FnOnce() -> T + Send) -> Result<T, ConfigError> {
    match threads {
        None => Ok(job()),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map(|pool| pool.install(job))
            .map_err(|e| ConfigError(format!("cannot start {n} workers: {e}"))),
    }
}

fn internal(e: curvecensus::Error) -> ConfigError {
    ConfigError(format!("census failed: {e}"))
}

pub fn execute(cli: &Cli) -> Result<(Outcome, Option<std::path::PathBuf>), ConfigError> {
    let (cfg, report, status) = match &cli.command {
        Command::Verify(args) => {
            let cfg = RunConfig::from_verify(args)?;
            let records = with_pool(cfg.threads, || verify::run_verify(&cfg))?;
            let ok = records.iter().all(|r| r.passed());
            let text = report::emit_verify(&records, cfg.format);
            (cfg, text, if ok { EXIT_PASS } else { EXIT_MISMATCH })
        }
        Command::Census(args) => {
            let cfg = RunConfig::from_sweep(args)?;
            let docs = with_pool(cfg.threads, || inspect::run_census(&cfg))?.map_err(internal)?;
            let text = report::emit_census(&docs, cfg.format);
            (cfg, text, EXIT_PASS)
        }
        Command::Classes(args) => {
            let cfg = RunConfig::from_sweep(args)?;
            let docs = with_pool(cfg.threads, || inspect::run_classes(&cfg))?.map_err(internal)?;
            let text = report::emit_classes(&docs, cfg.format);
            (cfg, text, EXIT_PASS)
        }
        Command::Fields(args) => {
            let (qs, _) = resolve_qs(&args.q)?;
            let docs = inspect::field_docs(&qs).map_err(internal)?;
            let text = report::emit_fields(&docs, args.out.format);
            let out = Outcome { report: text, notices: Vec::new(), status: EXIT_PASS };
            return Ok((out, args.out.output.clone()));
        }
    };
    Ok((Outcome { report, notices: cfg.notices, status }, cfg.output))
}

/// Runs a parsed command line, writing the report and notices. Returns the exit status.
pub fn run(cli: &Cli) -> i32 {
    let (outcome, path) = match execute(cli) {
        Ok(x) => x,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_CONFIG;
        }
    };
    for n in &outcome.notices {
        eprintln!("notice: {n}");
    }
    let written = match path {
        Some(p) => std::fs::write(&p, &outcome.report).map_err(|e| format!("{}: {e}", p.display())),
        None => std::io::stdout().write_all(outcome.report.as_bytes()).map_err(|e| e.to_string()),
    };
    if let Err(e) = written {
        eprintln!("error: cannot write report: {e}");
        return EXIT_CONFIG;
    }
    outcome.status
}
