//! `pedc` command-line front end.
//!
//! Subcommands return process exit codes instead of exiting so they can be
//! driven from tests:
//!
//! | code | meaning                         |
//! |------|---------------------------------|
//! | 0    | success                         |
//! | 1    | usage or I/O error              |
//! | 2    | infeasible configuration        |
//! | 3    | audit failure                   |
//! | 4    | internal invariant violation    |

mod config;
mod grid;

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{CommandFactory, Parser, Subcommand, ValueEnum};
use pedc_core::audit::{audit_all, AuditOptions, AuditReport, Constraint, Verdict, DEFAULT_BUDGET};
use pedc_core::csa::{CsaError, SystemParams};
use pedc_core::sim::{extract_view, run_protocol, sweep_rates, Rate, Role, SimError, Transcript};

pub use config::Config;
pub use grid::{parse_grid, GridSpec};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_INFEASIBLE: i32 = 2;
pub const EXIT_AUDIT_FAILED: i32 = 3;
pub const EXIT_INTERNAL: i32 = 4;

/// Environment variable overriding the audit enumeration budget.
pub const BUDGET_ENV: &str = "PEDC_BUDGET";

const DEFAULT_TRANSCRIPT: &str = "transcript.json";
const DEFAULT_AUDIT_REPORT: &str = "audit.json";

#[derive(Parser, Debug)]
#[command(
    name = "pedc",
    version,
    about = "Private linear-statistic collection: protocol runs, privacy audits, rate sweeps"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run both protocol phases and write a transcript.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Overrides `master_seed` from the config.
        #[arg(long)]
        seed: Option<u64>,
        /// Transcript path (default: config `output`, else transcript.json).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exhaustively audit the privacy constraints at the configured parameters.
    Audit {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_enum, default_value = "all")]
        constraint: ConstraintFilter,
        /// Report path (default: audit.json).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Measure the download rate over a grid of (N, E).
    Rate {
        /// e.g. "N=3..6,E=1..4" with optional "q=13" and "K=2".
        #[arg(long)]
        grid: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print one party's view of a transcript.
    Inspect {
        #[arg(long)]
        transcript: PathBuf,
        /// user:<k>, server:<n> or collector
        #[arg(long)]
        role: String,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ConstraintFilter {
    #[value(name = "P1", alias = "p1")]
    P1,
    #[value(name = "P2", alias = "p2")]
    P2,
    #[value(name = "P3", alias = "p3")]
    P3,
    All,
}

impl ConstraintFilter {
    fn constraints(self) -> Vec<Constraint> {
        match self {
            ConstraintFilter::P1 => vec![Constraint::P1],
            ConstraintFilter::P2 => vec![Constraint::P2],
            ConstraintFilter::P3 => vec![Constraint::P3],
            ConstraintFilter::All => vec![Constraint::P1, Constraint::P2, Constraint::P3],
        }
    }
}

/// Parses `args` (including the program name) and dispatches.
pub fn main_with_args<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(err, "{text}");
            } else {
                let _ = write!(out, "{text}");
            }
            return code;
        }
    };
    match cli.command {
        Command::Run {
            config,
            seed,
            out: path,
        } => cmd_run(&config, seed, path.as_deref(), out, err),
        Command::Audit {
            config,
            constraint,
            out: path,
        } => {
            let budget = match budget_from_env() {
                Ok(b) => b,
                Err(msg) => {
                    let _ = writeln!(err, "error: {msg}");
                    return EXIT_USAGE;
                }
            };
            cmd_audit(&config, constraint, budget, path.as_deref(), out, err)
        }
        Command::Rate {
            grid,
            seed,
            out: path,
        } => cmd_rate(&grid, seed, path.as_deref(), out, err),
        Command::Inspect { transcript, role } => cmd_inspect(&transcript, &role, out, err),
    }
}

fn budget_from_env() -> Result<u64, String> {
    match std::env::var(BUDGET_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| format!("{BUDGET_ENV} must be an unsigned integer, got `{v}`")),
        Err(_) => Ok(DEFAULT_BUDGET),
    }
}

fn usage_error(err: &mut dyn Write, msg: impl std::fmt::Display) -> i32 {
    let _ = writeln!(err, "error: {msg}\n");
    let _ = write!(err, "{}", Cli::command().render_usage());
    let _ = writeln!(err);
    EXIT_USAGE
}

fn params_error_code(e: &CsaError) -> i32 {
    match e {
        CsaError::Infeasible { .. }
        | CsaError::FieldTooSmall { .. }
        | CsaError::NoUsers
        | CsaError::AlphaCount { .. }
        | CsaError::InvalidAlpha { .. }
        | CsaError::Field(_) => EXIT_INFEASIBLE,
        _ => EXIT_USAGE,
    }
}

fn load_params(path: &Path, err: &mut dyn Write) -> Result<(Config, SystemParams), i32> {
    let config = Config::load(path).map_err(|e| usage_error(err, e))?;
    let params = config.params().map_err(|e| {
        let _ = writeln!(err, "error: {e}");
        params_error_code(&e)
    })?;
    Ok((config, params))
}

fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> std::io::Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(std::io::Error::other)?;
    text.push('\n');
    fs::write(path, text)
}

pub fn cmd_run(
    config_path: &Path,
    seed: Option<u64>,
    out_path: Option<&Path>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32 {
    let (config, params) = match load_params(config_path, err) {
        Ok(v) => v,
        Err(code) => return code,
    };
    let Some(seed) = seed.or(config.master_seed) else {
        return usage_error(
            err,
            "a seed is required: set `master_seed` in the config or pass --seed",
        );
    };
    let transcript = match run_protocol(&params, seed, &config.run_inputs()) {
        Ok(t) => t,
        Err(
            e @ (SimError::OracleMismatch { .. }
            | SimError::Protocol(CsaError::SingularDecodingMatrix)),
        ) => {
            let _ = writeln!(err, "internal error: {e}");
            return EXIT_INTERNAL;
        }
        Err(e) => return usage_error(err, format!("invalid run inputs: {e}")),
    };
    let path = out_path
        .map(Path::to_path_buf)
        .or_else(|| config.output.clone())
        .unwrap_or_else(|| PathBuf::from(DEFAULT_TRANSCRIPT));
    if let Err(e) = write_json(&path, &transcript) {
        let _ = writeln!(err, "error: cannot write {}: {e}", path.display());
        return EXIT_USAGE;
    }
    let _ = writeln!(
        out,
        "statistic={:?} rate={}",
        transcript.statistic, transcript.rate
    );
    let _ = writeln!(
        out,
        "download_symbols={} upload_symbols={} query_symbols={}",
        transcript.cost.download_symbols,
        transcript.cost.upload_symbols,
        transcript.cost.query_symbols
    );
    let _ = writeln!(out, "transcript={}", path.display());
    EXIT_OK
}

pub fn cmd_audit(
    config_path: &Path,
    filter: ConstraintFilter,
    budget: u64,
    out_path: Option<&Path>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32 {
    let (_, params) = match load_params(config_path, err) {
        Ok(v) => v,
        Err(code) => return code,
    };
    let opts = AuditOptions {
        budget,
        ..Default::default()
    };
    let reports: Vec<AuditReport> = match audit_all(&params, &filter.constraints(), &opts) {
        Ok(r) => r,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_USAGE;
        }
    };
    for r in &reports {
        let distance = r
            .distance
            .map_or_else(|| "-".to_string(), |d| d.to_string());
        let verdict = match r.verdict {
            Verdict::Pass => "pass",
            Verdict::Fail => "FAIL",
            Verdict::Refused => "REFUSED",
            Verdict::NotApplicable => "n/a",
        };
        let _ = writeln!(
            out,
            "{} {:<7} distance={} enumerated={} [{}]{}",
            r.constraint,
            verdict,
            distance,
            r.enumerated,
            r.scope,
            r.note.as_ref().map(|n| format!(" {n}")).unwrap_or_default()
        );
        if let Some(w) = &r.witness {
            let _ = writeln!(
                out,
                "    witness: outcome {:?} has probability {} under {} but {} under {}",
                w.outcome, w.left_probability, w.left, w.right_probability, w.right
            );
        }
    }
    let path = out_path.unwrap_or(Path::new(DEFAULT_AUDIT_REPORT));
    if let Err(e) = write_json(path, &reports) {
        let _ = writeln!(err, "error: cannot write {}: {e}", path.display());
        return EXIT_USAGE;
    }
    let blocking = reports
        .iter()
        .filter(|r| matches!(r.verdict, Verdict::Fail | Verdict::Refused))
        .count();
    let _ = writeln!(
        out,
        "{} audits, {} not passed, report={}",
        reports.len(),
        blocking,
        path.display()
    );
    if blocking == 0 {
        EXIT_OK
    } else {
        EXIT_AUDIT_FAILED
    }
}

pub fn cmd_rate(
    grid: &str,
    seed: u64,
    out_path: Option<&Path>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32 {
    let grid = match parse_grid(grid) {
        Ok(s) => s,
        Err(e) => return usage_error(err, e),
    };
    let rows = sweep_rates(&grid.points(), seed);
    let _ = writeln!(
        out,
        "{:>3} {:>3} {:>3} {:>4} {:>3} {:>8} {:>10} {:>6}",
        "N", "E", "L", "q", "K", "rate", "(N-E-1)/N", "match"
    );
    for r in &rows {
        let matches = match r.matches {
            Some(true) => "true",
            Some(false) => "false",
            None => "n/a",
        };
        let note = match (&r.reason, r.capacity == Rate::zero()) {
            (Some(_), true) => "  (infeasible: E >= N-1)".to_string(),
            (Some(reason), false) => format!("  ({reason})"),
            (None, _) => String::new(),
        };
        let _ = writeln!(
            out,
            "{:>3} {:>3} {:>3} {:>4} {:>3} {:>8} {:>10} {:>6}{}",
            r.servers,
            r.colluders,
            r.message_len,
            r.q,
            r.users,
            r.rate.to_string(),
            r.capacity.to_string(),
            matches,
            note
        );
    }
    if let Some(path) = out_path {
        if let Err(e) = write_json(path, &rows) {
            let _ = writeln!(err, "error: cannot write {}: {e}", path.display());
            return EXIT_USAGE;
        }
    }
    if rows.iter().any(|r| r.matches == Some(false)) {
        let _ = writeln!(err, "error: measured rate differs from (N-E-1)/N");
        EXIT_INTERNAL
    } else {
        EXIT_OK
    }
}

pub fn cmd_inspect(path: &Path, role: &str, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let role: Role = match role.parse() {
        Ok(r) => r,
        Err(e) => return usage_error(err, e),
    };
    let text = match fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => return usage_error(err, format!("cannot read {}: {e}", path.display())),
    };
    let transcript: Transcript = match serde_json::from_str(&text) {
        Ok(t) => t,
        Err(e) => {
            return usage_error(
                err,
                format!("{} is not a valid transcript: {e}", path.display()),
            )
        }
    };
    if let Err(e) = transcript.reverify() {
        let _ = writeln!(err, "error: transcript failed verification: {e}");
        return EXIT_INTERNAL;
    }
    let view = match extract_view(&transcript, role) {
        Ok(v) => v,
        Err(e) => return usage_error(err, e),
    };
    match serde_json::to_string_pretty(&view) {
        Ok(s) => {
            let _ = writeln!(out, "{s}");
            EXIT_OK
        }
        Err(e) => {
            let _ = writeln!(err, "internal error: {e}");
            EXIT_INTERNAL
        }
    }
}
