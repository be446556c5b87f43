//! `subeq`: batch front-end for the subequation library.
//!
//! Exit status 0 on success, 2 when a check finds violations or a solve does
//! not converge, 3 on configuration errors. A JSON report is written in every
//! case where the command line could be parsed.

pub mod args;
pub mod commands;
pub mod config;
pub mod report;

use std::ffi::OsString;

use clap::Parser;
use serde_json::{json, Value};

use crate::args::Cli;

pub const EXIT_FAIL: u8 = 2;
pub const EXIT_CONFIG: u8 = 3;

/// SUBEQ_THREADS, if set, caps the worker threads; 0 means no cap.
fn thread_cap() -> Result<usize, String> {
    match std::env::var("SUBEQ_THREADS") {
        Ok(s) => s
            .trim()
            .parse()
            .map_err(|_| format!("SUBEQ_THREADS must be a non-negative integer, got {s:?}")),
        Err(_) => Ok(0),
    }
}

/// Runs one command with the given argv (program name first) and returns
/// the exit status.
pub fn run(argv: Vec<OsString>) -> u8 {
    let argv = match config::expand(argv) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e:#}");
            return EXIT_CONFIG;
        }
    };
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { 0 };
        }
    };
    let common = cli.command.common().clone();
    let mut rep = json!({ "command": cli.command.name(), "seed": common.seed });

    let outcome = thread_cap()
        .map_err(|m| commands::Failure {
            config: true,
            message: m,
        })
        .and_then(|threads| {
            if threads > 0 {
                // fails only if a pool already exists, which cannot happen here
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(threads)
                    .build_global();
            }
            commands::run(&cli.command, threads)
        });
    let code = match outcome {
        Ok(o) => {
            for line in &o.summary {
                eprintln!("{line}");
            }
            if let (Value::Object(dst), Value::Object(src)) = (&mut rep, o.report) {
                dst.extend(src);
            }
            rep["status"] = json!(if o.ok { "ok" } else { "fail" });
            if o.ok {
                0
            } else {
                EXIT_FAIL
            }
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            rep["status"] = json!(if f.config { "config_error" } else { "error" });
            rep["error"] = json!(f.message);
            if f.config {
                EXIT_CONFIG
            } else {
                EXIT_FAIL
            }
        }
    };
    if let Err(e) = report::emit(&rep, common.report.as_deref()) {
        eprintln!("error: {e:#}");
        return EXIT_CONFIG;
    }
    code
}
