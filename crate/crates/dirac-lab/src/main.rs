//! Command-line driver: `run`, `verify` and `infogeo` subcommands.
//!
//! Exit codes: 0 success, 1 configuration or usage error, 2 runtime error,
//! 3 verification-tolerance failure.

use std::path::PathBuf;
use std::process::ExitCode;

use dirac_lab::config::parse_config;
use dirac_lab::error::Error;
use dirac_lab::runner::{infogeo_report, run, verify_suite, CheckRow, Suite};

const USAGE: &str = "\
usage:
  dirac-lab run --config FILE [--out DIR]
  dirac-lab verify SUITE        (hodge|stokes|dirac|contact|infogeo|all)
  dirac-lab infogeo --config FILE [--out DIR]

environment:
  DIRAC_LAB_THREADS   cap on worker threads (0 = auto)
";

fn usage_error(msg: &str) -> ExitCode {
    eprintln!("error: {msg}");
    eprint!("{USAGE}");
    ExitCode::from(1)
}

fn classify(err: &Error) -> u8 {
    match err {
        Error::Io(_) => 2,
        Error::UnknownSuite(_) => 1,
        Error::Config(_) => 1,
        // construction/validation problems are configuration-class
        Error::InvalidDimension(_)
        | Error::InvalidCellCount { .. }
        | Error::InvalidLength { .. }
        | Error::InvalidTimeStep(_)
        | Error::PresetDimensionMismatch { .. }
        | Error::UnknownPreset(_)
        | Error::DensityNeedsOneD(_) => 1,
        _ => 2,
    }
}

fn print_rows(rows: &[CheckRow]) -> bool {
    let mut ok = true;
    for row in rows {
        println!("{}", row.line());
        ok &= row.pass();
    }
    ok
}

struct Parsed {
    config: Option<PathBuf>,
    out: Option<PathBuf>,
    positional: Vec<String>,
}

fn parse_args(args: &[String]) -> Result<Parsed, String> {
    let mut parsed = Parsed {
        config: None,
        out: None,
        positional: Vec::new(),
    };
    let mut it = args.iter();
    while let Some(arg) = it.next() {
        match arg.as_str() {
            "--config" => {
                let v = it.next().ok_or("--config needs a path")?;
                parsed.config = Some(PathBuf::from(v));
            }
            "--out" => {
                let v = it.next().ok_or("--out needs a path")?;
                parsed.out = Some(PathBuf::from(v));
            }
            other if other.starts_with("--") => {
                return Err(format!("unknown flag {other}"));
            }
            other => parsed.positional.push(other.to_string()),
        }
    }
    Ok(parsed)
}

fn load_config(path: &PathBuf) -> Result<dirac_lab::config::ScenarioConfig, Error> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    parse_config(&text)
}

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let Some(command) = args.first().cloned() else {
        return usage_error("missing subcommand");
    };
    let rest = match parse_args(&args[1..]) {
        Ok(p) => p,
        Err(msg) => return usage_error(&msg),
    };
    match command.as_str() {
        "run" => {
            let Some(path) = rest.config else {
                return usage_error("run requires --config FILE");
            };
            let cfg = match load_config(&path) {
                Ok(c) => c,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(classify(&e));
                }
            };
            match run(&cfg, rest.out.as_deref()) {
                Ok(outcome) => {
                    let ok = print_rows(&outcome.checks);
                    println!("wrote {} steps", outcome.rows_written);
                    if ok {
                        ExitCode::SUCCESS
                    } else {
                        ExitCode::from(3)
                    }
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(classify(&e))
                }
            }
        }
        "verify" => {
            let Some(name) = rest.positional.first() else {
                return usage_error("verify requires a suite name");
            };
            match Suite::parse(name).and_then(verify_suite) {
                Ok(rows) => {
                    if print_rows(&rows) {
                        ExitCode::SUCCESS
                    } else {
                        ExitCode::from(3)
                    }
                }
                Err(e @ Error::UnknownSuite(_)) => {
                    eprintln!("error: {e}");
                    eprint!("{USAGE}");
                    ExitCode::from(1)
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(classify(&e))
                }
            }
        }
        "infogeo" => {
            let Some(path) = rest.config else {
                return usage_error("infogeo requires --config FILE");
            };
            let cfg = match load_config(&path) {
                Ok(c) => c,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(classify(&e));
                }
            };
            match infogeo_report(&cfg, rest.out.as_deref()) {
                Ok(rows) => {
                    if print_rows(&rows) {
                        ExitCode::SUCCESS
                    } else {
                        ExitCode::from(3)
                    }
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(classify(&e))
                }
            }
        }
        other => usage_error(&format!("unknown subcommand {other}")),
    }
}
