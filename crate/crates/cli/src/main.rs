//! `tits-cert`: JSON front end to the free-subgroup certifier.
//!
//! Exit codes: 0 ok, 1 usage, 2 typed domain error (or a result that did not
//! verify), 3 oracle refutation of a certificate.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use tits_core::certifier::{
    certify_free_framed, default_oracle_depth, oracle_free_up_to, verify_certificate, CertificateStatus, CertifyOptions,
    OracleOutcome,
};
use tits_core::constants::{ConstantsConfig, ConstantsTable, PaperConstants};
use tits_core::pingpong::Framed;
use tits_core::propcheck::{run_suite, suite_names};
use tits_core::tubes::TubeDescriptor;
use tits_core::Error;

#[derive(Parser)]
#[command(name = "tits-cert", version, about = "Certificates of free subgroups for pairs of hyperbolic isometries")]
struct Cli {
    /// Write the JSON result here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Type, translation length and fixed points of an isometry.
    Classify {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Table of derived constants.
    Constants(ConstantsArgs),
    /// Thin-part descriptor of a non-elliptic isometry.
    Tube {
        #[arg(long = "in")]
        input: PathBuf,
        #[command(flatten)]
        constants: ConstantsArgs,
    },
    /// Free-subgroup certificate for the pair (f, g).
    Certify {
        #[arg(long)]
        f: PathBuf,
        #[arg(long)]
        g: PathBuf,
        #[command(flatten)]
        constants: ConstantsArgs,
        #[arg(long)]
        oracle_depth: Option<usize>,
        #[arg(long)]
        orbit_depth: Option<usize>,
    },
    /// Brute-force search for a relation between a and b.
    Oracle {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        /// Defaults to 12 for exact inputs and 8 otherwise.
        #[arg(long)]
        depth: Option<usize>,
        /// Treat a found relation as a refutation (exit 3).
        #[arg(long)]
        expect_free: bool,
    },
    /// Recompute a certificate from its recorded inputs and compare.
    VerifyCert {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Run a seeded sampling suite.
    Propcheck {
        #[arg(long)]
        suite: String,
        #[arg(long, default_value_t = 1000)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Args, Default)]
struct ConstantsArgs {
    /// JSON file with any of n, kappa, eps, q_hull, L, lambda_qg, alpha_qg.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    n: Option<u32>,
    #[arg(long)]
    kappa: Option<f64>,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    q_hull: Option<f64>,
    #[arg(long = "L")]
    l: Option<f64>,
    #[arg(long)]
    lambda_qg: Option<f64>,
    #[arg(long)]
    alpha_qg: Option<f64>,
}

enum Failure {
    Usage(String),
    Domain(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Domain(e)
    }
}

/// JSON result with its exit code.
struct Reply {
    body: Value,
    code: u8,
}

fn ok<T: Serialize>(v: &T) -> Reply {
    Reply { body: to_value(v), code: 0 }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("results serialize")
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))
}

fn parse_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    let text = read(path)?;
    serde_json::from_str(&text).map_err(|e| Failure::Domain(Error::Parse(format!("{}: {e}", path.display()))))
}

impl ConstantsArgs {
    fn load(&self) -> Result<PaperConstants, Failure> {
        let mut cfg: ConstantsConfig = match &self.config {
            Some(p) => parse_json(p)?,
            None => ConstantsConfig::default(),
        };
        cfg.n = self.n.or(cfg.n);
        cfg.kappa = self.kappa.or(cfg.kappa);
        cfg.eps = self.eps.or(cfg.eps);
        cfg.q_hull = self.q_hull.or(cfg.q_hull);
        cfg.l = self.l.or(cfg.l);
        cfg.lambda_qg = self.lambda_qg.or(cfg.lambda_qg);
        cfg.alpha_qg = self.alpha_qg.or(cfg.alpha_qg);
        Ok(PaperConstants::from_config(&cfg)?)
    }
}

fn error_name(e: &Error) -> String {
    format!("{e:?}").chars().take_while(|c| c.is_alphanumeric()).collect()
}

fn run(command: Command) -> Result<Reply, Failure> {
    match command {
        Command::Classify { input } => {
            let g: Framed = parse_json(&input)?;
            let gen = g.generator()?;
            let class = gen.classify()?;
            let mut body = to_value(&class);
            body["model"] = json!(gen.model().to_string());
            Ok(Reply { body, code: 0 })
        }
        Command::Constants(args) => Ok(ok(&ConstantsTable::compute(&args.load()?)?)),
        Command::Tube { input, constants } => {
            let c = constants.load()?;
            let g: Framed = parse_json(&input)?;
            Ok(ok(&TubeDescriptor::new(&g.generator()?, c.eps)?))
        }
        Command::Certify { f, g, constants, oracle_depth, orbit_depth } => {
            let c = constants.load()?;
            let (f, g): (Framed, Framed) = (parse_json(&f)?, parse_json(&g)?);
            let cert = certify_free_framed(&f, &g, &c, &CertifyOptions { oracle_depth, orbit_depth })?;
            let code = if cert.status == CertificateStatus::Verified { 0 } else { 2 };
            Ok(Reply { body: to_value(&cert), code })
        }
        Command::Oracle { a, b, depth, expect_free } => {
            let (a, b): (Framed, Framed) = (parse_json(&a)?, parse_json(&b)?);
            let (a, b) = (a.generator()?, b.generator()?);
            let depth = depth.unwrap_or_else(|| default_oracle_depth(&a, &b));
            let report = oracle_free_up_to(&a, &b, depth)?;
            let refuted = expect_free && matches!(report.outcome, OracleOutcome::Relation { .. });
            Ok(Reply { body: to_value(&report), code: if refuted { 3 } else { 0 } })
        }
        Command::VerifyCert { input } => {
            let cert: Value = parse_json(&input)?;
            let report = verify_certificate(&cert)?;
            let code = if report.consistent && report.status == CertificateStatus::Verified { 0 } else { 2 };
            Ok(Reply { body: to_value(&report), code })
        }
        Command::Propcheck { suite, samples, seed } => {
            let report = run_suite(&suite, samples, seed)?;
            let code = if report.passed { 0 } else { 2 };
            Ok(Reply { body: to_value(&report), code })
        }
    }
}

fn emit(body: &Value, out: Option<&Path>) -> Result<(), String> {
    let text = serde_json::to_string_pretty(body).expect("json values serialize") + "\n";
    match out {
        Some(p) => fs::write(p, text).map_err(|e| format!("cannot write {}: {e}", p.display())),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| e.to_string()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    let out = cli.out.clone();
    let (body, code) = match run(cli.command) {
        Ok(r) => (Some(r.body), r.code),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(1);
        }
        Err(Failure::Domain(Error::OracleRefuted { relation, certificate })) => {
            let cert: Value = serde_json::from_str(&certificate).unwrap_or(Value::String(certificate));
            (Some(json!({"error": "OracleRefuted", "relation": relation, "certificate": cert})), 3)
        }
        Err(Failure::Domain(e)) => {
            let mut err = json!({"error": error_name(&e), "message": e.to_string()});
            if let Error::UnknownSuite(_) = e {
                err["suites"] = json!(suite_names());
            }
            eprintln!("{}", serde_json::to_string(&err).expect("json values serialize"));
            (None, 2)
        }
    };
    if let Some(body) = body {
        if let Err(msg) = emit(&body, out.as_deref()) {
            eprintln!("error: {msg}");
            return ExitCode::from(1);
        }
    }
    ExitCode::from(code)
}
