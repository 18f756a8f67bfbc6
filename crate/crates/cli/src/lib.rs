//! `spa-lab`: command-line front end and reference-value harness.

pub mod args;
pub mod commands;
pub mod error;
pub mod reproduce;

use std::ffi::OsString;

use clap::Parser;

use crate::args::{Cli, Command, ReproduceArgs};
use crate::error::{CliError, CliResult, EXIT_BAD_INPUT, EXIT_NUMERICAL, EXIT_OK};
use crate::reproduce::{cmd_reproduce, Manifest, DEFAULT_MANIFEST};

/// Environment variable capping the worker threads.
pub const THREADS_ENV: &str = "SPA_LAB_THREADS";

fn configure_threads() -> CliResult<()> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::input(format!("{THREADS_ENV}={raw:?} is not a positive integer")))?;
    // A second call in the same process keeps the first pool.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

fn reproduce(args: ReproduceArgs, seed: u64, json: bool) -> CliResult<i32> {
    let manifest = match &args.manifest {
        Some(path) => Manifest::parse(&commands::read_input(path)?)?,
        None => Manifest::parse(DEFAULT_MANIFEST)?,
    };
    let report = cmd_reproduce(&manifest, seed)?;
    if let Some(dir) = &args.out_dir {
        commands::write_output(&dir.join("report.json"), &report.to_json())?;
        commands::write_output(&dir.join("report.txt"), &report.to_table())?;
    }
    if json {
        print!("{}", report.to_json());
    } else {
        print!("{}", report.to_table());
    }
    Ok(if report.all_pass() { EXIT_OK } else { EXIT_NUMERICAL })
}

fn dispatch(cli: Cli) -> CliResult<i32> {
    configure_threads()?;
    let (seed, json) = (cli.seed, cli.json);
    match cli.command {
        Command::Reproduce(a) => reproduce(a, seed, json),
        Command::Spa(c) => commands::spa(c, seed, json),
        Command::Sep(c) => commands::sep(c, seed, json),
        Command::Family(c) => commands::family(c, json),
        Command::Holevo(c) => commands::holevo(c, seed, json),
    }
}

/// Parses `args` (including the program name), runs the command and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_BAD_INPUT } else { EXIT_OK };
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
