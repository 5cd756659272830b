//! `wildtame`: per-δ analysis, range scans, record ingestion and cache management.
//!
//! Exit codes: 0 a report was produced, 2 usage or input error, 3 internal invariant violation.

mod table;

use std::collections::BTreeMap;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use wildtame_core::kernelctl::{eligible_deltas, failed_report, DEFAULT_MAX_LEVEL};
use wildtame_core::nfengine::{ingest_record, record_files, CacheStore, PutOutcome, RecordLibrary};
use wildtame_core::{analyze, Assurance, DataSources, Error, KernelReport, Verdict};

#[derive(Parser, Debug)]
#[command(name = "wildtame", version, about = "3-parts of wild and tame kernels of quadratic fields")]
struct Cli {
    #[command(flatten)]
    config: Config,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Config {
    /// Directory of ingested .wtrec/.wtord records.
    #[arg(long, global = true, env = "WILDTAME_DATA")]
    data_dir: Option<PathBuf>,
    /// Record cache directory (created if missing).
    #[arg(long, global = true, env = "WILDTAME_CACHE")]
    cache_dir: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Inputs below this assurance are ignored.
    #[arg(long, global = true, value_parser = parse_assurance, default_value = "ingested-trusted")]
    min_assurance: Assurance,
    /// Highest tower layer read from the data.
    #[arg(long, global = true, default_value_t = DEFAULT_MAX_LEVEL)]
    max_level: usize,
    /// Worker threads for scan.
    #[arg(long, global = true, value_parser = clap::value_parser!(u32).range(1..))]
    jobs: Option<u32>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Table,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Report for k = Q(sqrt(delta)).
    Analyze {
        #[arg(long, allow_hyphen_values = true)]
        delta: i64,
    },
    /// Reports for every square-free delta = -3 mod 9 in [from, to].
    Scan {
        #[arg(long, allow_hyphen_values = true)]
        from: i64,
        #[arg(long, allow_hyphen_values = true)]
        to: i64,
    },
    /// Validate record files and store accepted ones in the cache.
    Ingest { path: PathBuf },
    /// Inspect or clear the record cache.
    Cache {
        #[command(subcommand)]
        action: CacheAction,
    },
}

#[derive(Subcommand, Debug)]
enum CacheAction {
    /// List cached entries.
    List,
    /// Remove every cached entry.
    Clear,
}

fn parse_assurance(s: &str) -> Result<Assurance, String> {
    Assurance::parse(s).map_err(|e| e.to_string())
}

enum Failure {
    Input(String),
    Internal(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Internal(_) => Failure::Internal(e.to_string()),
            _ => Failure::Input(e.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

fn open_cache(cfg: &Config) -> Result<Option<CacheStore>, Failure> {
    cfg.cache_dir.as_ref().map(CacheStore::open).transpose().map_err(Failure::from)
}

fn sources(cfg: &Config) -> Result<DataSources, Failure> {
    let mut lib = RecordLibrary::new();
    if let Some(c) = open_cache(cfg)? {
        lib = lib.with_cache(c);
    }
    if let Some(d) = &cfg.data_dir {
        if !d.is_dir() {
            return Err(Failure::Input(format!("data directory {} does not exist", d.display())));
        }
        lib.load_dir(d)?;
        for (p, why) in lib.rejected() {
            eprintln!("warning: rejected {}: {why}", p.display());
        }
    }
    let mut src = DataSources::new(lib);
    src.max_level = cfg.max_level;
    src.floor = cfg.min_assurance;
    Ok(src)
}

fn json_line(r: &KernelReport) -> Result<String, Failure> {
    serde_json::to_string(r).map_err(|e| Failure::Internal(e.to_string()))
}

fn cmd_analyze(delta: i64, cfg: &Config, out: &mut impl Write) -> Result<(), Failure> {
    let src = sources(cfg)?;
    let r = analyze(delta, &src)?;
    match cfg.format {
        Format::Json => writeln!(out, "{}", json_line(&r)?)?,
        Format::Table => {
            writeln!(out, "{}", table::header())?;
            writeln!(out, "{}", table::row(&r))?;
        }
    }
    Ok(())
}

fn cmd_scan(from: i64, to: i64, cfg: &Config, out: &mut impl Write) -> Result<(), Failure> {
    if from > to {
        return Err(Failure::Input(format!("inverted range: --from {from} > --to {to}")));
    }
    let src = sources(cfg)?;
    let jobs = cfg.jobs.map(|j| j as usize).unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs).build().map_err(|e| Failure::Internal(e.to_string()))?;
    let deltas = eligible_deltas(from, to);
    let mut counts: BTreeMap<Verdict, usize> = Verdict::ALL.iter().map(|v| (*v, 0)).collect();
    let mut internal = None;
    if cfg.format == Format::Table {
        writeln!(out, "{}", table::header())?;
    }
    // chunks keep the output streaming and in order
    for chunk in deltas.chunks(jobs * 8) {
        let reports: Vec<(i64, Result<KernelReport, Error>)> =
            pool.install(|| chunk.par_iter().map(|&d| (d, analyze(d, &src))).collect());
        for (d, res) in reports {
            let r = match res {
                Ok(r) => r,
                Err(e) => {
                    if matches!(e, Error::Internal(_)) && internal.is_none() {
                        internal = Some(format!("δ = {d}: {e}"));
                    }
                    failed_report(d, &e)
                }
            };
            *counts.entry(r.verdict).or_default() += 1;
            match cfg.format {
                Format::Json => writeln!(out, "{}", json_line(&r)?)?,
                Format::Table => writeln!(out, "{}", table::row(&r))?,
            }
        }
        out.flush()?;
    }
    let total: usize = counts.values().sum();
    match cfg.format {
        Format::Json => {
            let verdicts: BTreeMap<&str, String> = counts.iter().map(|(v, n)| (v.as_str(), n.to_string())).collect();
            let footer = serde_json::json!({ "summary": { "reports": total.to_string(), "verdicts": verdicts } });
            writeln!(out, "{footer}")?;
        }
        Format::Table => writeln!(out, "{}", table::footer(total, &counts))?,
    }
    match internal {
        Some(msg) => Err(Failure::Internal(msg)),
        None => Ok(()),
    }
}

fn cmd_ingest(path: &PathBuf, cfg: &Config, out: &mut impl Write) -> Result<(), Failure> {
    if !path.exists() {
        return Err(Failure::Input(format!("cannot read {}", path.display())));
    }
    let cache = open_cache(cfg)?;
    let (mut accepted, mut rejected) = (0, 0);
    for p in record_files(path)? {
        match ingest_record(&p) {
            Ok(rec) => {
                accepted += 1;
                let status = match &cache {
                    Some(c) => match c.put(&rec, "")? {
                        PutOutcome::Stored => "stored",
                        PutOutcome::Replaced => "replaced",
                        PutOutcome::AlreadyCached => "already cached",
                        PutOutcome::Kept => "kept existing entry",
                    },
                    None => "valid (no cache directory)",
                };
                writeln!(out, "accepted {} {}: {status}", p.display(), rec.label())?;
            }
            Err(e) => {
                rejected += 1;
                writeln!(out, "rejected {}: {e}", p.display())?;
            }
        }
    }
    writeln!(out, "accepted {accepted}, rejected {rejected}")?;
    Ok(())
}

fn cmd_cache(action: &CacheAction, cfg: &Config, out: &mut impl Write) -> Result<(), Failure> {
    let Some(c) = open_cache(cfg)? else {
        return Err(Failure::Input("no cache directory: pass --cache-dir or set WILDTAME_CACHE".into()));
    };
    match action {
        CacheAction::List => {
            for e in c.index().values() {
                writeln!(out, "{}\t{}\t{}\t{}", e.kind, e.label, e.assurance, e.slot)?;
            }
        }
        CacheAction::Clear => {
            c.clear()?;
            writeln!(out, "cleared {}", c.dir().display())?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let stdout = io::stdout();
    let mut out = io::BufWriter::new(stdout.lock());
    let res = match &cli.command {
        Command::Analyze { delta } => cmd_analyze(*delta, &cli.config, &mut out),
        Command::Scan { from, to } => cmd_scan(*from, *to, &cli.config, &mut out),
        Command::Ingest { path } => cmd_ingest(path, &cli.config, &mut out),
        Command::Cache { action } => cmd_cache(action, &cli.config, &mut out),
    };
    let _ = out.flush();
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Internal(m)) => {
            eprintln!("internal error: {m}");
            ExitCode::from(3)
        }
    }
}
