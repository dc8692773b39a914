//! The `propbridge` command line.

use std::collections::{BTreeMap, BTreeSet};
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use chrono::{SecondsFormat, Utc};
use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use propbridge_core::{cardinality, PrngState, Verdict};

use crate::config::{load_config, ConfigFile};
use crate::history::{read_history, update_history};
use crate::registry::Registry;
use crate::report::{profile_report, write_report, RunReport};
use crate::runner::{check_property, run_suite, Backend, RunConfig};
use crate::waiver::{apply_waivers, load_waivers};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FALSIFIED: i32 = 1;
pub const EXIT_UNKNOWN: i32 = 2;
pub const EXIT_USAGE: i32 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "propbridge",
    version,
    about = "Check properties by sampling, enumeration or symbolic proof"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check the selected properties and report verdicts.
    Run(RunArgs),
    /// List registered properties.
    List {
        #[arg(long)]
        filter: Option<String>,
    },
    /// Re-run one property under the fuzz backend with a given seed.
    Replay(ReplayArgs),
    /// Show recorded runs and flaky properties.
    History {
        #[arg(long)]
        history: PathBuf,
        #[arg(long)]
        property: Option<String>,
    },
}

#[derive(Args, Debug)]
struct RunArgs {
    #[arg(long)]
    backend: Option<Backend>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    cases: Option<u64>,
    #[arg(long)]
    budget: Option<u64>,
    #[arg(long)]
    timeout_ms: Option<u64>,
    /// Glob over property names.
    #[arg(long)]
    filter: Option<String>,
    #[arg(long)]
    config: Option<PathBuf>,
    /// Write the JSON report here.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Append JSON-lines history here and check for flaky verdicts.
    #[arg(long)]
    history: Option<PathBuf>,
    #[arg(long)]
    waivers: Option<PathBuf>,
    /// Exit with 2 when any unwaived verdict is unknown.
    #[arg(long)]
    strict: bool,
}

#[derive(Args, Debug)]
struct ReplayArgs {
    #[arg(long)]
    property: String,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    cases: Option<u64>,
    #[arg(long)]
    config: Option<PathBuf>,
}

struct Usage(String);

impl<E: std::fmt::Display> From<E> for Usage {
    fn from(e: E) -> Self {
        Usage(e.to_string())
    }
}

/// Parse `args` (program name first), run the command against `registry`,
/// and return the process exit code.
pub fn main_with<I, T>(
    registry: &Registry,
    args: I,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{}", e.render());
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{}", e.render());
                    EXIT_USAGE
                }
            };
        }
    };
    let result = match cli.command {
        Command::Run(a) => run(registry, a, out, err),
        Command::List { filter } => list(registry, filter.as_deref(), out),
        Command::Replay(a) => replay(registry, a, out),
        Command::History { history, property } => {
            show_history(&history, property.as_deref(), out, err)
        }
    };
    match result {
        Ok(code) => code,
        Err(Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_USAGE
        }
    }
}

fn file_config(path: Option<&Path>) -> Result<ConfigFile, Usage> {
    Ok(match path {
        Some(p) => load_config(p)?,
        None => ConfigFile::default(),
    })
}

fn new_run_id() -> String {
    let nanos = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_nanos() as u64)
        .unwrap_or(0);
    format!("{:016x}", PrngState::new(nanos).next_u64())
}

fn now_rfc3339() -> String {
    Utc::now().to_rfc3339_opts(SecondsFormat::Secs, true)
}

fn run(
    registry: &Registry,
    a: RunArgs,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32, Usage> {
    let file = file_config(a.config.as_deref())?;
    let d = RunConfig::default();
    let cfg = RunConfig {
        backend: a.backend.or(file.backend).unwrap_or(d.backend),
        seed: a.seed.or(file.seed).unwrap_or(d.seed),
        cases: a.cases.or(file.cases).unwrap_or(d.cases),
        budget: a.budget.or(file.budget).unwrap_or(d.budget),
        timeout_ms: a.timeout_ms.or(file.timeout_ms).unwrap_or(d.timeout_ms),
        repetition_cap: file.repetition_cap.unwrap_or(d.repetition_cap),
        filter: a.filter.or(file.filter),
        code_fingerprint: file.code_fingerprint.unwrap_or(d.code_fingerprint),
    };
    if let Some(key) = cfg.zero_count() {
        return Err(Usage(format!("{key} must be at least 1")));
    }
    let strict = a.strict || file.strict.unwrap_or(false);
    let report_path = a.report.or(file.report);
    let history_path = a.history.or(file.history);
    let waivers = match a.waivers.or(file.waivers) {
        Some(p) => load_waivers(&p)?,
        None => Vec::new(),
    };

    let mut report = run_suite(registry, &cfg, new_run_id(), now_rfc3339())?;
    apply_waivers(&mut report, &waivers, Utc::now().date_naive())?;
    if let Some(p) = &report_path {
        write_report(&report, p).map_err(|e| Usage(format!("{}: {e}", p.display())))?;
    }
    let mut flaky = Vec::new();
    if let Some(p) = &history_path {
        let update =
            update_history(p, &report).map_err(|e| Usage(format!("{}: {e}", p.display())))?;
        for w in &update.warnings {
            let _ = writeln!(err, "warning: {w}");
        }
        flaky = update.flaky;
    }
    let _ = print_summary(&report, &flaky, out);
    Ok(report.exit_code(strict))
}

fn print_summary(report: &RunReport, flaky: &[String], out: &mut dyn Write) -> std::io::Result<()> {
    let width = report
        .entries
        .iter()
        .map(|e| e.name.len())
        .max()
        .unwrap_or(0);
    for e in &report.entries {
        write!(
            out,
            "{:width$}  {:10}  {}  ({} ms)",
            e.name, e.backend, e.verdict, e.duration_ms
        )?;
        if let Some(r) = &e.waiver_reason {
            write!(out, "  [waived: {r}]")?;
        }
        writeln!(out)?;
        if let Verdict::Falsified(c) = &e.verdict {
            if let Some(seed) = c.seed {
                writeln!(
                    out,
                    "{:width$}  replay with: propbridge replay --property={} --seed={seed}",
                    "", e.name
                )?;
            }
        }
    }
    let t = report.totals();
    writeln!(
        out,
        "totals: passed {}, proved {}, falsified {}, unknown {}, waived {}",
        t.passed, t.proved, t.falsified, t.unknown, t.waived
    )?;
    if !report.stale_waivers.is_empty() {
        writeln!(out, "stale waivers: {}", report.stale_waivers.join(", "))?;
    }
    if !report.unused_waivers.is_empty() {
        writeln!(out, "unused waivers: {}", report.unused_waivers.join(", "))?;
    }
    if !flaky.is_empty() {
        writeln!(out, "flaky: {}", flaky.join(", "))?;
    }
    let slow: Vec<String> = profile_report(report, 3)
        .into_iter()
        .map(|(n, b, ms)| format!("{n} ({b}, {ms} ms)"))
        .collect();
    if !slow.is_empty() {
        writeln!(out, "slowest: {}", slow.join(", "))?;
    }
    Ok(())
}

fn list(registry: &Registry, filter: Option<&str>, out: &mut dyn Write) -> Result<i32, Usage> {
    for p in registry.select(filter)? {
        let _ = writeln!(
            out,
            "{}  [{}]  domain: {}",
            p.name(),
            p.tags().join(", "),
            cardinality(p.strategy())
        );
    }
    Ok(EXIT_OK)
}

fn replay(registry: &Registry, a: ReplayArgs, out: &mut dyn Write) -> Result<i32, Usage> {
    let file = file_config(a.config.as_deref())?;
    let prop = registry
        .get(&a.property)
        .ok_or_else(|| Usage(format!("no property named `{}`", a.property)))?;
    let d = RunConfig::default();
    let cfg = RunConfig {
        backend: Backend::Fuzz,
        seed: a.seed.or(file.seed).unwrap_or(d.seed),
        cases: a.cases.or(file.cases).unwrap_or(d.cases),
        timeout_ms: file.timeout_ms.unwrap_or(d.timeout_ms),
        repetition_cap: file.repetition_cap.unwrap_or(d.repetition_cap),
        ..d
    };
    if let Some(key) = cfg.zero_count() {
        return Err(Usage(format!("{key} must be at least 1")));
    }
    let entry = check_property(prop, &cfg)?;
    let _ = writeln!(out, "{}: {}", entry.name, entry.verdict);
    Ok(match &entry.verdict {
        Verdict::Falsified(c) => {
            let _ = writeln!(out, "original: {}", c.original);
            let _ = writeln!(out, "shrunk: {}", c.shrunk);
            let _ = writeln!(out, "message: {}", c.message);
            EXIT_FALSIFIED
        }
        _ => EXIT_OK,
    })
}

fn show_history(
    path: &Path,
    property: Option<&str>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32, Usage> {
    let (records, warnings) =
        read_history(path).map_err(|e| Usage(format!("{}: {e}", path.display())))?;
    for w in &warnings {
        let _ = writeln!(err, "warning: {w}");
    }
    // (property, fingerprint, config hash) -> {(run id, verdict kind)}
    type Runs<'a> = BTreeSet<(&'a str, &'a str)>;
    let mut groups: BTreeMap<(&str, &str, &str), Runs> = BTreeMap::new();
    for r in records
        .iter()
        .filter(|r| property.is_none_or(|p| p == r.property))
    {
        let _ = writeln!(
            out,
            "{}  {}  {}  {}  {}  {} ms",
            r.timestamp, r.run_id, r.property, r.backend, r.verdict, r.duration_ms
        );
        groups
            .entry((&r.property, &r.code_fingerprint, &r.config_hash))
            .or_default()
            .insert((&r.run_id, &r.verdict));
    }
    let flaky: BTreeSet<&str> = groups
        .iter()
        .filter(|(_, runs)| runs.iter().map(|(_, v)| *v).collect::<BTreeSet<_>>().len() >= 2)
        .map(|((p, _, _), _)| *p)
        .collect();
    if !flaky.is_empty() {
        let _ = writeln!(
            out,
            "flaky: {}",
            flaky.into_iter().collect::<Vec<_>>().join(", ")
        );
    }
    Ok(EXIT_OK)
}
