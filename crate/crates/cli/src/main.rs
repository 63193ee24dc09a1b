//! `pretentious`: parameter sweeps, scans and single evaluations.
//!
//! Exit status: 0 on completion, 2 when a verification command reports a
//! `fails` verdict, 3 on any input or capacity error.

mod commands;
mod config;
mod grid;
mod output;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{Context, Result};
use clap::{Arg, ArgAction, Command};

use config::RunConfig;
use output::{Format, Table};

const EXIT_FAILS: u8 = 2;
const EXIT_ERROR: u8 = 3;

fn help(key: &str) -> &'static str {
    match key {
        "sigma" => "real part σ > 1: value, list a,b,... or range start:stop:step",
        "t1" | "t2" | "t" => "imaginary shift: value, list or range",
        "x" => "cutoff x (y for lemma-scan): value, list or range",
        "q" => "modulus or moduli: value, list or range start:stop",
        "a" => "residue class for progression (default: all units)",
        "chi" | "psi" => "Dirichlet character q:e1,e2,...",
        "f" | "g" => "function: one, liouville, nit:<t>, chi:<q>:<e,...>, chit:<q>:<e,...>:<t>, rand:<mode>[:<seed>]",
        "T" => "Halász range: minimise over |t| <= 2T",
        "step" => "Halász grid spacing (default: dyadic, at most min(0.01, 1/log x))",
        "grid" => "sweep axes name=start:stop:step,... (first outermost; t sets t1 and t2)",
        "precision" => "target radius of certified series values (default 1e-10)",
        "sieve-limit" => "prime table limit (default: what the inputs need)",
        "seed" => "seed for rand:<mode> functions given without one (default 0)",
        "seeds" => "hall: seed range start:end, end exclusive",
        "mode" => "hall: random mode unimodular, real or nonneg (default real)",
        "sign" => "deriv-ineq: 1 or -1 (default both)",
        "primitive" => "lfun-triangle: replace the product character by its primitive (true/false)",
        "lemma" => "lemma-scan family: 3, 4 or 5",
        "a-exp" => "lemma 3: candidate moduli up to (log y)^A (default 1)",
        "tuple-size" => "lemma 4: tuple size g >= 2 (default 3)",
        "ranks" => "lemma 5: nearest neighbours reported (default 3)",
        "jobs" => "worker threads (output does not depend on it)",
        "out" => "artifact path; a manifest is written next to it (default: stdout, no manifest)",
        "format" => "csv or json (default csv)",
        _ => "",
    }
}

fn cli() -> Command {
    let mut cmd = Command::new("pretentious")
        .version(env!("CARGO_PKG_VERSION"))
        .about("Pretentious distances, certified Dirichlet series and the inequalities between them")
        .arg(
            Arg::new("command")
                .help(format!("one of: {}", commands::COMMANDS.join(", ")))
                .value_name("COMMAND"),
        )
        .arg(
            Arg::new("config")
                .long("config")
                .value_name("FILE")
                .help("key=value file (a run manifest works); flags override it"),
        );
    for &key in config::KEYS.iter().filter(|k| **k != "command") {
        cmd = cmd.arg(
            Arg::new(key)
                .long(key)
                .value_name("VALUE")
                .allow_hyphen_values(true)
                .action(ArgAction::Set)
                .help(help(key)),
        );
    }
    cmd
}

fn config_from_args(m: &clap::ArgMatches) -> Result<RunConfig> {
    let mut cfg = match m.get_one::<String>("config") {
        Some(path) => RunConfig::load(Path::new(path))?,
        None => RunConfig::new(),
    };
    let mut flags = RunConfig::new();
    for &key in config::KEYS {
        if let Some(v) = m.get_one::<String>(key) {
            flags.set(key, v)?;
        }
    }
    cfg.merge(flags);
    Ok(cfg)
}

#[cfg(feature = "parallel")]
fn with_jobs<R: Send>(jobs: Option<usize>, f: impl FnOnce() -> R + Send) -> Result<R> {
    match jobs {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(n).build()?;
            Ok(pool.install(f))
        }
        None => Ok(f()),
    }
}

#[cfg(not(feature = "parallel"))]
fn with_jobs<R: Send>(_jobs: Option<usize>, f: impl FnOnce() -> R + Send) -> Result<R> {
    Ok(f())
}

fn threads(jobs: Option<usize>) -> usize {
    #[cfg(feature = "parallel")]
    return jobs.unwrap_or_else(rayon::current_num_threads);
    #[cfg(not(feature = "parallel"))]
    {
        let _ = jobs;
        1
    }
}

fn manifest(cfg: &RunConfig, table: &Table, jobs: Option<usize>, seconds: f64) -> String {
    format!(
        "# pretentious {}\n# threads {}\n# rows {}\n# wall_time_s {seconds:.3}\n{}",
        env!("CARGO_PKG_VERSION"),
        threads(jobs),
        table.rows.len(),
        cfg.echo()
    )
}

fn has_failure(table: &Table) -> bool {
    table
        .column("verdict")
        .is_some_and(|c| table.rows.iter().any(|r| r[c] == "fails"))
}

fn run(cfg: &mut RunConfig) -> Result<bool> {
    let start = Instant::now();
    let jobs: Option<usize> = cfg.get("jobs")?;
    if jobs == Some(0) {
        anyhow::bail!("--jobs must be at least 1");
    }
    let format: Format = cfg.get_or("format", Format::Csv)?;
    let table = with_jobs(jobs, || commands::run(cfg))??;
    let text = table.render(format)?;
    match cfg.raw("out").map(PathBuf::from) {
        Some(path) => {
            fs::write(&path, &text).with_context(|| format!("writing {}", path.display()))?;
            let mut mpath = path.into_os_string();
            mpath.push(".manifest.txt");
            let m = manifest(cfg, &table, jobs, start.elapsed().as_secs_f64());
            fs::write(&mpath, m).with_context(|| format!("writing {}", PathBuf::from(&mpath).display()))?;
        }
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
        }
    }
    Ok(has_failure(&table))
}

fn main() -> ExitCode {
    let matches = match cli().try_get_matches() {
        Ok(m) => m,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let mut cfg = match config_from_args(&matches) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(EXIT_ERROR);
        }
    };
    if let Some(c) = matches.get_one::<String>("command") {
        if let Err(e) = cfg.set("command", c) {
            eprintln!("error: {e:#}");
            return ExitCode::from(EXIT_ERROR);
        }
    }
    match run(&mut cfg) {
        Ok(false) => ExitCode::SUCCESS,
        Ok(true) => ExitCode::from(EXIT_FAILS),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}
