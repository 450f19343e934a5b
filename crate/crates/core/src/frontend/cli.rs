//! Command-line driver.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use super::report::{invariant_dump, Mode, Report};
use super::system_file::read_system_file;
use crate::analysis::{D2W3Variant, I4Variant, Readings};
use crate::conditions::{check_conformal_with, check_numeric, CheckOptions};
use crate::error::{Error, Result};
use crate::numeric::numeric_circle_oracle_seeded;

pub const EXIT_CONFORMAL: i32 = 0;
pub const EXIT_NOT_CONFORMAL: i32 = 1;
pub const EXIT_INPUT_ERROR: i32 = 2;

pub const ORACLE_TRAJECTORIES: usize = 20;
pub const ORACLE_TOLERANCE: f64 = 1e-6;

#[derive(Parser, Debug)]
#[command(name = "cgode", version, about = "Decides whether a system of third-order ODEs describes conformal geodesics")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check a system definition file.
    Check(CheckArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum I4Arg {
    Intro,
    Connection,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum D2W3Arg {
    A,
    B,
}

#[derive(Args, Debug)]
pub struct CheckArgs {
    pub file: PathBuf,
    /// Emit the JSON report instead of text.
    #[arg(long)]
    pub json: bool,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub dump_invariants: bool,
    #[arg(long, value_enum, default_value = "connection")]
    pub i4_variant: I4Arg,
    #[arg(long, value_enum, default_value = "b")]
    pub d2w3_variant: D2W3Arg,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Also integrate trajectories and test that they are circles.
    #[arg(long)]
    pub oracle: bool,
    /// Randomized zero tests only, no canonical forms.
    #[arg(long)]
    pub numeric_only: bool,
    /// Include wall-clock timings (makes the report non-reproducible).
    #[arg(long)]
    pub timings: bool,
}

impl CheckArgs {
    pub fn readings(&self) -> Readings {
        Readings {
            i4: match self.i4_variant {
                I4Arg::Intro => I4Variant::Intro,
                I4Arg::Connection => I4Variant::Connection,
            },
            d2w3: match self.d2w3_variant {
                D2W3Arg::A => D2W3Variant::A,
                D2W3Arg::B => D2W3Variant::B,
            },
            ..Readings::default()
        }
    }
}

/// Builds the report for `check`; the exit code follows the verdict.
pub fn run_check(args: &CheckArgs) -> Result<(Report, i32)> {
    let t0 = Instant::now();
    let file = read_system_file(&args.file)?;
    let sys = file.to_system()?;
    let parsed = t0.elapsed().as_secs_f64();
    let readings = args.readings();
    let opts = CheckOptions { readings, seed: args.seed, ledger: true };
    let oracle = || args.oracle.then(|| numeric_circle_oracle_seeded(&sys, ORACLE_TRAJECTORIES, ORACLE_TOLERANCE, args.seed));
    let t1 = Instant::now();
    let (mut report, oracle) = if args.numeric_only {
        let (v, o) = rayon::join(|| check_numeric(&sys, &opts), oracle);
        (Report::new(&file, &v, Mode::NumericOnly, args.seed, readings), o)
    } else {
        let (v, o) = rayon::join(|| check_conformal_with(&sys, &opts), oracle);
        (Report::new(&file, &v, Mode::Exact, args.seed, readings), o)
    };
    let checked = t1.elapsed().as_secs_f64();
    report.oracle = oracle;
    if args.dump_invariants {
        if args.numeric_only {
            eprintln!("note: invariant dumps need canonical forms and are skipped with --numeric-only");
        } else {
            report.invariants = Some(invariant_dump(&sys, &readings));
        }
    }
    if args.timings {
        report.timings = Some(BTreeMap::from([
            ("parse".to_string(), parsed),
            ("check".to_string(), checked),
            ("total".to_string(), t0.elapsed().as_secs_f64()),
        ]));
    }
    let code = if report.verdict.conformal { EXIT_CONFORMAL } else { EXIT_NOT_CONFORMAL };
    Ok((report, code))
}

fn emit(args: &CheckArgs, report: &Report) -> Result<()> {
    let text = if args.json { report.to_json() + "\n" } else { report.to_text() };
    match &args.out {
        Some(p) => std::fs::write(p, text).map_err(|e| Error::Io(format!("{}: {e}", p.display()))),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| Error::Io(e.to_string())),
    }
}

pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INPUT_ERROR } else { 0 };
        }
    };
    match cli.command {
        Command::Check(args) => match run_check(&args).and_then(|(r, code)| emit(&args, &r).map(|_| (r, code))) {
            Ok((r, code)) => {
                if let Some(o) = &r.oracle {
                    if r.verdict.conformal && !o.passed {
                        eprintln!("warning: accepted, but integrated trajectories are not circles (expected only for non-flat systems)");
                    }
                }
                code
            }
            Err(e) => {
                eprintln!("error: {e}");
                EXIT_INPUT_ERROR
            }
        },
    }
}
