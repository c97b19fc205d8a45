use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use combforge::certificate::Certificate;
use combforge::export::{certificate_dot, window_dot, window_json};
use combforge::families::{documentation_entries, family, list_families, manifest};
use combforge::ops::{extract_with, Operation, RunConfig};
use combforge::suite::{run_suite, SuiteBudgets, SuiteName};
use combforge::verify::verify_with;
use combforge::Error;

const OK: u8 = 0;
const USAGE: u8 = 1;
const BUDGET: u8 = 2;
const INVARIANT: u8 = 3;
const PRECONDITION: u8 = 4;

/// Environment variable overriding every family's default depth.
const DEPTH_ENV: &str = "COMBFORGE_DEPTH_DEFAULT";

#[derive(Parser)]
#[command(name = "combforge", version, about = "Stars, combs, rayless trees and star-decompositions in lazy infinite graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Dot,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum Op {
    StarComb,
    Theorem1,
    StarDecomposition,
    Fan,
}

impl From<Op> for Operation {
    fn from(op: Op) -> Self {
        match op {
            Op::StarComb => Operation::StarComb,
            Op::Theorem1 => Operation::Theorem1,
            Op::StarDecomposition => Operation::StarDecomposition,
            Op::Fan => Operation::Fan,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Suite {
    Duality,
    Contraction,
    Decomposition,
    Cuts,
    All,
}

impl From<Suite> for SuiteName {
    fn from(s: Suite) -> Self {
        match s {
            Suite::Duality => SuiteName::Duality,
            Suite::Contraction => SuiteName::Contraction,
            Suite::Decomposition => SuiteName::Decomposition,
            Suite::Cuts => SuiteName::Cuts,
            Suite::All => SuiteName::All,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// List the catalog, or print the families.json manifest.
    Families {
        #[arg(long)]
        json: bool,
    },
    /// Run an operation on a family and preset and write its certificate.
    Extract {
        op: Op,
        #[arg(long)]
        family: String,
        /// Preset naming the vertex set U.
        #[arg(long = "u", default_value = "all")]
        preset: String,
        #[arg(short, default_value_t = 4)]
        k: usize,
        #[arg(long)]
        depth: Option<usize>,
        /// U-vertices the rayless tree must contain (theorem1).
        #[arg(long, default_value_t = 32)]
        steps: usize,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Re-check a certificate file against its family oracle.
    Verify {
        file: PathBuf,
        /// Family to check against, when it differs from the file's.
        #[arg(long)]
        family: Option<String>,
    },
    /// Run a property suite over the catalog.
    Suite {
        name: Suite,
        /// Keep families whose name contains this string.
        #[arg(long)]
        family: Option<String>,
        #[arg(short, default_value_t = 8)]
        k: usize,
        #[arg(long)]
        depth: Option<usize>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Export a family window or a certificate as JSON or DOT.
    Export {
        #[arg(long, conflicts_with = "certificate")]
        family: Option<String>,
        #[arg(long)]
        certificate: Option<PathBuf>,
        #[arg(long)]
        depth: Option<usize>,
        /// Window size; defaults to the family's cap at the depth.
        #[arg(long)]
        cap: Option<usize>,
        #[arg(long, value_enum, default_value = "dot")]
        format: Format,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure { code: USAGE, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::UnknownFamily(_) | Error::UnknownPreset { .. } | Error::Json(_) => USAGE,
            Error::BudgetExhausted { .. } => BUDGET,
            Error::Invariant(_) => INVARIANT,
            Error::DocumentationOnly(_) | Error::Precondition(_) | Error::Duality(_) => PRECONDITION,
        };
        Failure { code, message: e.to_string() }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { USAGE } else { OK };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("combforge: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn default_depth() -> Result<Option<usize>, Failure> {
    match std::env::var(DEPTH_ENV) {
        Ok(s) => s
            .trim()
            .parse()
            .ok()
            .filter(|&d: &usize| d > 0)
            .map(Some)
            .ok_or_else(|| Failure::usage(format!("{DEPTH_ENV} must be a positive integer, got `{s}`"))),
        Err(_) => Ok(None),
    }
}

fn emit(out: Option<&PathBuf>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| Failure::usage(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes()).map_err(|e| Failure::usage(e.to_string()))
        }
    }
}

fn read_certificate(path: &PathBuf) -> Result<Certificate, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))?;
    Certificate::from_json(&text).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn run(command: Command) -> Result<u8, Failure> {
    match command {
        Command::Families { json } => {
            if json {
                let text = serde_json::to_string_pretty(&manifest()).expect("manifest serializes");
                emit(None, &format!("{text}\n"))?;
            } else {
                let mut text = String::new();
                for f in list_families() {
                    let presets: Vec<&str> = f.presets.iter().map(|p| p.name).collect();
                    text.push_str(&format!("{:<22} depth {:<3} presets {}\n", f.name, f.depth, presets.join(", ")));
                }
                for d in documentation_entries() {
                    text.push_str(&format!("{:<22} documentation only: {}\n", d.name, d.summary));
                }
                emit(None, &text)?;
            }
            Ok(OK)
        }
        Command::Extract { op, family: name, preset, k, depth, steps, format, out } => {
            let spec = family(&name)?;
            let mut cfg = RunConfig::new(&name, &preset, op.into(), k).with_steps(steps);
            cfg.depth = depth.or(default_depth()?);
            let e = extract_with(&spec, &cfg)?;
            let text = match format {
                Format::Json => format!("{}\n", e.certificate.to_json()),
                Format::Dot => certificate_dot(&e.certificate),
                Format::Text => format!(
                    "{} for {}/{} (k {}, depth {}): {}\n",
                    e.certificate.kind(),
                    name,
                    preset,
                    e.certificate.budgets.k,
                    e.certificate.budgets.depth,
                    if e.report.ok() { "verified" } else { "rejected" }
                ),
            };
            emit(out.as_ref(), &text)?;
            if e.report.ok() {
                Ok(OK)
            } else {
                eprintln!("{}", serde_json::to_string(&e.report).expect("reports serialize"));
                Ok(INVARIANT)
            }
        }
        Command::Verify { file, family: name } => {
            let cert = read_certificate(&file)?;
            let spec = family(name.as_deref().unwrap_or(&cert.family))?;
            let report = verify_with(&cert, &spec);
            emit(None, &format!("{}\n", serde_json::to_string_pretty(&report).expect("reports serialize")))?;
            Ok(if report.ok() { OK } else { INVARIANT })
        }
        Command::Suite { name, family: filter, k, depth, format } => {
            if k == 0 {
                return Err(Failure::usage("k must be positive"));
            }
            let budgets = SuiteBudgets { k, depth: depth.or(default_depth()?) };
            let report = match run_suite(name.into(), filter.as_deref(), budgets) {
                Err(Error::Precondition(m)) => return Err(Failure::usage(m)),
                r => r?,
            };
            let text = match format {
                Format::Json => format!("{}\n", serde_json::to_string_pretty(&report).expect("reports serialize")),
                Format::Text | Format::Dot => report.table(),
            };
            emit(None, &text)?;
            Ok(if report.passed() { OK } else { INVARIANT })
        }
        Command::Export { family: name, certificate, depth, cap, format, out } => {
            let text = match (name, certificate) {
                (Some(name), None) => {
                    let spec = family(&name)?;
                    let depth = depth.or(default_depth()?).unwrap_or(spec.depth);
                    let cap = cap.unwrap_or_else(|| spec.oracle.default_cap(depth));
                    match format {
                        Format::Json => format!("{}\n", window_json(spec.oracle.as_ref(), cap)),
                        Format::Dot | Format::Text => window_dot(spec.oracle.as_ref(), cap),
                    }
                }
                (None, Some(path)) => {
                    let cert = read_certificate(&path)?;
                    match format {
                        Format::Json => format!("{}\n", cert.to_json()),
                        Format::Dot | Format::Text => certificate_dot(&cert),
                    }
                }
                _ => return Err(Failure::usage("export needs --family or --certificate")),
            };
            emit(out.as_ref(), &text)?;
            Ok(OK)
        }
    }
}
