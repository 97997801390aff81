//! Command-line front end: `torsion`, `split`, `circle` and `selftest`.
//!
//! Every subcommand writes one JSON object to stdout and a short human
//! summary to stderr. Exit codes: 0 success, 1 selftest failure, 2 usage,
//! parse or validation error, 3 numerical boundary (eigenvalue on a cut or
//! on the split boundary).

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use rtorsion::workbench::{self, ComplexDocument, SPLIT_DEFAULT_TOL, TOL_ENV};
use rtorsion::{Error, Scalar};
use serde_json::{json, Value};

#[derive(Parser, Debug)]
#[command(name = "rtorsion", version, about = "Refined torsion workbench")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Refined torsion, graded determinant and sign parities of a complex
    Torsion { file: PathBuf },
    /// Spectral split at lambda and its consistency with the refined torsion
    Split {
        file: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        lambda: f64,
        /// Agmon angle in (-pi/2, 0); chosen automatically when omitted
        #[arg(long, allow_hyphen_values = true)]
        theta: Option<f64>,
    },
    /// Circle model for holonomy parameter a
    Circle {
        /// `re` or `re,im`
        #[arg(long, allow_hyphen_values = true, value_parser = parse_complex)]
        a: Scalar,
        #[arg(long, default_value_t = 1.0)]
        scale: f64,
        #[arg(long, default_value_t = 1000)]
        trunc: usize,
    },
    /// Run the invariant suite
    Selftest {
        #[arg(long, default_value_t = 50)]
        cases: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn parse_complex(s: &str) -> Result<Scalar, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let num = |t: &str| t.parse::<f64>().map_err(|e| format!("{t:?}: {e}"));
    match parts.as_slice() {
        [re] => Ok(Scalar::new(num(re)?, 0.0)),
        [re, im] => Ok(Scalar::new(num(re)?, num(im)?)),
        _ => Err("expected <re> or <re>,<im>".into()),
    }
}

fn exit_code(e: &Error) -> i32 {
    if e.is_numerical_boundary() {
        3
    } else {
        2
    }
}

fn load(path: &PathBuf) -> rtorsion::Result<ComplexDocument> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    ComplexDocument::parse(&text)
}

fn tolerance_or(default: f64) -> f64 {
    if std::env::var_os(TOL_ENV).is_some() {
        workbench::default_tolerance()
    } else {
        default
    }
}

fn run(cmd: Cmd, err: &mut dyn Write) -> rtorsion::Result<(Value, i32)> {
    match cmd {
        Cmd::Torsion { file } => {
            let v = workbench::torsion_report(&load(&file)?)?;
            let _ = writeln!(err, "torsion {} betti {}", v["torsion"], v["betti"]);
            Ok((v, 0))
        }
        Cmd::Split { file, lambda, theta } => {
            let v = workbench::split_report(&load(&file)?, lambda, theta, tolerance_or(SPLIT_DEFAULT_TOL))?;
            let _ = writeln!(
                err,
                "split at {lambda}: small {} large {} residual {:.3e} ({})",
                v["d_small"],
                v["d_large"],
                v["residual"].as_f64().unwrap_or(f64::NAN),
                if v["consistent"] == json!(true) {
                    "consistent"
                } else {
                    "INCONSISTENT"
                }
            );
            Ok((v, 0))
        }
        Cmd::Circle { a, scale, trunc } => {
            let v = workbench::circle_report(a, scale, trunc, workbench::default_tolerance())?;
            let _ = writeln!(
                err,
                "rho_an {} (closed form {}), RS norm {} vs {}",
                v["rho_an"], v["rho_closed_form"], v["rs_norm_value"], v["rs_norm_target"]
            );
            Ok((v, 0))
        }
        Cmd::Selftest { cases, seed } => {
            let out = workbench::selftest(cases, seed, workbench::default_tolerance());
            let mut checks = Vec::new();
            for o in &out {
                let _ = writeln!(
                    err,
                    "{} {:<28} worst {:.3e} tol {:.1e}{}",
                    if o.passed { "pass" } else { "FAIL" },
                    o.name,
                    o.worst,
                    o.tol,
                    o.error.as_deref().map(|e| format!("  ({e})")).unwrap_or_default()
                );
                checks.push(json!({
                    "name": o.name,
                    "cases": o.cases,
                    "worst": if o.worst.is_finite() { json!(o.worst) } else { json!(null) },
                    "tol": o.tol,
                    "passed": o.passed,
                    "error": o.error,
                }));
            }
            let all = out.iter().all(|o| o.passed);
            Ok((
                json!({ "seed": seed, "cases": cases, "passed": all, "checks": checks }),
                if all { 0 } else { 1 },
            ))
        }
    }
}

/// Runs the tool on `argv` (program name first), writing JSON to `out` and
/// the summary to `err`; returns the exit code.
pub fn run_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(err, "{e}");
            return if e.use_stderr() {
                2
            } else {
                let _ = write!(out, "{e}");
                0
            };
        }
    };
    match run(cli.cmd, err) {
        Ok((v, code)) => {
            let _ = writeln!(out, "{v}");
            code
        }
        Err(e) => {
            let code = exit_code(&e);
            let _ = writeln!(out, "{}", json!({ "error": e.to_string(), "exit_code": code }));
            let _ = writeln!(err, "error: {e}");
            code
        }
    }
}

/// [`run_with`] on the process's stdout and stderr.
pub fn cli_run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    run_with(argv, &mut std::io::stdout().lock(), &mut std::io::stderr().lock())
}
