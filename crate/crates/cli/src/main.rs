//! `ramsey`: batch front end for the verification engine.
//!
//! Every verdict-producing command writes a certificate and prints
//! `VERDICT <yes|no|unknown>` as its last line on standard output.

mod args;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::Parser;
use ramsey_core::certificate::{parse_certificate, run, verify, Outcome, Request};
use ramsey_core::error::Error;
use ramsey_core::fraisse::catalog::Catalog;
use ramsey_core::ramsey::Verdict;

use args::{Cli, Command, UsageError};

pub const EXIT_YES: u8 = 0;
pub const EXIT_NO: u8 = 1;
pub const EXIT_UNKNOWN: u8 = 2;
pub const EXIT_USAGE: u8 = 64;
pub const EXIT_DATA: u8 = 65;

/// Environment variable naming a catalog file loaded on top of the
/// built-in classes.
pub const CATALOG_ENV: &str = "RAMSEY_CATALOG";

enum Failure {
    Usage(String),
    Data(String),
    Limit(String),
}

impl From<UsageError> for Failure {
    fn from(e: UsageError) -> Self {
        Failure::Usage(e.0)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse(_) | Error::MalformedCertificate(_) | Error::InvalidStructure(_) | Error::InvalidSignature(_) => {
                Failure::Data(e.to_string())
            }
            Error::LimitExceeded(_) => Failure::Limit(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

fn exit_for(v: Verdict) -> u8 {
    match v {
        Verdict::Yes => EXIT_YES,
        Verdict::No => EXIT_NO,
        Verdict::Unknown => EXIT_UNKNOWN,
    }
}

fn load_catalog(path: Option<&Path>) -> Result<Catalog, Failure> {
    let mut cat = Catalog::new();
    let path = match path {
        Some(p) => Some(p.to_path_buf()),
        None => std::env::var_os(CATALOG_ENV).filter(|v| !v.is_empty()).map(PathBuf::from),
    };
    if let Some(p) = path {
        let text = fs::read_to_string(&p).map_err(|e| Failure::Usage(format!("cannot read catalog {}: {e}", p.display())))?;
        cat.load_str(&text)
            .map_err(|e| Failure::Data(format!("catalog {}: {e}", p.display())))?;
    }
    Ok(cat)
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display())))
}

fn write_outcome(out: &Outcome, cert_path: &Path, stats_path: Option<&Path>) -> Result<(), Failure> {
    write_file(cert_path, &out.certificate.to_text())?;
    if let Some(p) = stats_path {
        let text: String = out.stats.iter().map(|(k, v)| format!("{k} {v}\n")).collect();
        write_file(p, &text)?;
    }
    Ok(())
}

fn execute(cli: &Cli) -> Result<u8, Failure> {
    let catalog = load_catalog(cli.common().catalog.as_deref())?;
    if let Command::Verify { certificate } = &cli.command {
        let text = fs::read_to_string(certificate)
            .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", certificate.display())))?;
        let cert = parse_certificate(&text).map_err(|e| Failure::Data(format!("{}: {e}", certificate.display())))?;
        return Ok(match verify(&cert, &catalog)? {
            None => {
                println!("certificate {} verifies (verdict {})", cert.kind, cert.verdict);
                println!("VERDICT yes");
                EXIT_YES
            }
            Some(why) => {
                println!("violation: {why}");
                println!("VERDICT no");
                EXIT_NO
            }
        });
    }
    let request: Request = args::to_request(&cli.command, &catalog)?;
    let out = run(&request, &catalog)?;
    let common = cli.common();
    let cert_path = common
        .cert
        .clone()
        .unwrap_or_else(|| PathBuf::from(format!("{}.cert", request.kind())));
    write_outcome(&out, &cert_path, common.stats.as_deref())?;
    println!("certificate {}", cert_path.display());
    for (k, v) in out.stats.iter().filter(|(k, _)| k == "refusal" || k == "violation") {
        println!("{k}: {v}");
    }
    println!("VERDICT {}", out.certificate.verdict);
    Ok(exit_for(out.certificate.verdict))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_YES };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let workers = cli.common().workers;
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(workers).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: cannot start {workers} workers: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    let code = match pool.install(|| execute(&cli)) {
        Ok(code) => code,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            EXIT_USAGE
        }
        Err(Failure::Data(m)) => {
            eprintln!("error: {m}");
            EXIT_DATA
        }
        Err(Failure::Limit(m)) => {
            eprintln!("{m}");
            println!("VERDICT unknown");
            EXIT_UNKNOWN
        }
    };
    ExitCode::from(code)
}
