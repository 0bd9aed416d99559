//! Command-line front end: `lint`, `resolve`, `plan` and `scan`.
//!
//! JSON goes to stdout, human diagnostics to stderr. Exit codes: 0 all
//! definitions true, 1 some false, 2 some error (none false), 3 usage or
//! input error.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::content::{parse_bundle, parse_collectors, parse_plans, serialize_plans, CheckBundle};
use crate::datasource::{load_data_source, DataSource, PropertyRegistry};
use crate::model::{Collector, Violation};
use crate::oval::{parse_adapters, run_checks, run_plans, AdapterKind, CollectionAdapter};
use crate::planner::generate_system_tests;
use crate::report::{ScanReport, Summary};
use crate::resolve::interpret_target_definition;

pub const EXIT_INPUT: i32 = 3;

/// Overrides the remap root of every file adapter.
pub const FIXTURE_ROOT_ENV: &str = "CONFCHECK_FIXTURE_ROOT";

#[derive(Debug, Parser)]
#[command(name = "confcheck", version, about = "Configuration checks for distributed software components")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Validate a check bundle.
    Lint {
        bundle: PathBuf,
    },
    /// Print the identifier groups and assignment of a target definition.
    Resolve {
        #[command(flatten)]
        inputs: Inventory,
        #[arg(long)]
        bundle: PathBuf,
        #[arg(long)]
        target: String,
    },
    /// Print system-test plans for the bundle's check definitions.
    Plan {
        #[command(flatten)]
        inputs: Inventory,
        #[arg(long)]
        bundle: PathBuf,
        #[arg(long)]
        collectors: PathBuf,
        /// Only plan this check definition.
        #[arg(long)]
        check: Option<String>,
    },
    /// Run checks and write a JSON report.
    Scan {
        #[arg(long = "datasource", num_args = 1.., required_unless_present = "plan")]
        datasource: Vec<PathBuf>,
        #[arg(long)]
        registry: Option<PathBuf>,
        #[arg(long)]
        bundle: PathBuf,
        #[arg(long, required_unless_present = "plan")]
        collectors: Option<PathBuf>,
        #[arg(long)]
        adapters: PathBuf,
        /// Execute a hand-written plan instead of resolving targets.
        #[arg(long)]
        plan: Option<PathBuf>,
        #[arg(long)]
        report: PathBuf,
    },
}

#[derive(Debug, Args)]
pub struct Inventory {
    /// Data source files, merged in order.
    #[arg(long = "datasource", num_args = 1.., required = true)]
    pub datasource: Vec<PathBuf>,
    /// Extra property kinds, `{"property": "string|version|spec"}`.
    #[arg(long)]
    pub registry: Option<PathBuf>,
}

struct InputError(String);

impl<E: std::fmt::Display> From<E> for InputError {
    fn from(e: E) -> Self {
        InputError(e.to_string())
    }
}

/// Runs the CLI with process stdout/stderr and returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run(args, &mut stdout.lock(), &mut stderr.lock())
}

pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(err, "{}", e.render());
            return if e.use_stderr() { EXIT_INPUT } else { 0 };
        }
    };
    let fixture_root = std::env::var_os(FIXTURE_ROOT_ENV).map(PathBuf::from);
    match execute(cli.command, fixture_root.as_deref(), out, err) {
        Ok(code) => code,
        Err(InputError(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_INPUT
        }
    }
}

fn execute(cmd: Command, fixture_root: Option<&Path>, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, InputError> {
    match cmd {
        Command::Lint { bundle } => lint(&bundle, out, err),
        Command::Resolve { inputs, bundle, target } => {
            let ds = load_inventory(&inputs.datasource, inputs.registry.as_deref())?;
            let bundle = load_bundle(&bundle)?;
            let td = bundle
                .targets
                .get(&target)
                .ok_or_else(|| InputError(format!("unknown target definition {target}")))?;
            let resolution = interpret_target_definition(&ds, td)?;
            if !resolution.conflicts.is_empty() {
                writeln!(err, "note: identifiers matching several components: {}", resolution.conflicts.join(", "))?;
            }
            writeln!(out, "{}", resolution.to_json())?;
            Ok(0)
        }
        Command::Plan {
            inputs,
            bundle,
            collectors,
            check,
        } => {
            let ds = load_inventory(&inputs.datasource, inputs.registry.as_deref())?;
            let bundle = load_bundle(&bundle)?;
            let collectors = load_collectors(&collectors)?;
            let checks: Vec<_> = match &check {
                Some(id) => vec![bundle
                    .checks
                    .get(id)
                    .ok_or_else(|| InputError(format!("unknown check definition {id}")))?],
                None => bundle.checks.values().collect(),
            };
            let mut plans = Vec::new();
            for cd in checks {
                let plan = generate_system_tests(&ds, &bundle, cd, &collectors)?;
                for st in &plan.system_tests {
                    for d in &st.diagnostics {
                        writeln!(err, "{}: {d}", st.id)?;
                    }
                }
                plans.push(plan);
            }
            writeln!(out, "{}", serialize_plans(&plans))?;
            Ok(0)
        }
        Command::Scan {
            datasource,
            registry,
            bundle,
            collectors,
            adapters,
            plan,
            report,
        } => {
            let bundle = load_bundle(&bundle)?;
            let adapters = load_adapters(&adapters, fixture_root)?;
            let results = match plan {
                Some(plan) => {
                    let plans = parse_plans(&read(&plan)?).map_err(|e| in_file(&plan, e))?;
                    run_plans(&plans, &bundle, &adapters)?
                }
                None => {
                    let ds = load_inventory(&datasource, registry.as_deref())?;
                    let collectors = load_collectors(collectors.as_deref().expect("required by clap"))?;
                    run_checks(&ds, &bundle, &collectors, &adapters)?
                }
            };
            let started = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
            let scan = ScanReport::new(results).started_at(started);
            std::fs::write(&report, scan.to_json()).map_err(|e| in_file(&report, e))?;
            for r in &scan.results {
                writeln!(err, "{} {}: {}", r.check_id(), r.system_test.id, r.definition_status)?;
                for d in &r.diagnostics {
                    writeln!(err, "  {d}")?;
                }
            }
            let code = scan.exit_code();
            #[derive(Serialize)]
            struct ScanSummary<'a> {
                report: String,
                summary: &'a Summary,
                exit_code: i32,
            }
            let summary = ScanSummary {
                report: report.display().to_string(),
                summary: &scan.summary,
                exit_code: code,
            };
            writeln!(out, "{}", serde_json::to_string_pretty(&summary)?)?;
            Ok(code)
        }
    }
}

fn lint(path: &Path, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, InputError> {
    let bundle = load_bundle(path)?;
    let report = bundle.validate();
    for v in &report.violations {
        writeln!(err, "{v}")?;
    }
    #[derive(Serialize)]
    struct LintJson<'a> {
        valid: bool,
        violations: &'a [Violation],
    }
    let json = LintJson {
        valid: report.is_valid(),
        violations: &report.violations,
    };
    writeln!(out, "{}", serde_json::to_string_pretty(&json)?)?;
    Ok(if report.is_valid() { 0 } else { EXIT_INPUT })
}

fn in_file(path: &Path, e: impl std::fmt::Display) -> InputError {
    InputError(format!("{}: {e}", path.display()))
}

fn read(path: &Path) -> Result<Vec<u8>, InputError> {
    std::fs::read(path).map_err(|e| in_file(path, e))
}

fn load_bundle(path: &Path) -> Result<CheckBundle, InputError> {
    parse_bundle(&read(path)?).map_err(|e| in_file(path, e))
}

fn load_collectors(path: &Path) -> Result<Vec<Collector>, InputError> {
    parse_collectors(&read(path)?).map_err(|e| in_file(path, e))
}

fn load_inventory(paths: &[PathBuf], registry: Option<&Path>) -> Result<DataSource, InputError> {
    let mut kinds = PropertyRegistry::default();
    if let Some(path) = registry {
        kinds.extend_from_json(&read(path)?).map_err(|e| in_file(path, e))?;
    }
    let sources = paths.iter().map(|p| read(p)).collect::<Result<Vec<_>, _>>()?;
    Ok(load_data_source(&sources, kinds)?)
}

fn load_adapters(path: &Path, fixture_root: Option<&Path>) -> Result<Vec<CollectionAdapter>, InputError> {
    let base = path.parent().unwrap_or(Path::new("."));
    let mut adapters = parse_adapters(&read(path)?, base).map_err(|e| in_file(path, e))?;
    if let Some(root) = fixture_root {
        for a in &mut adapters {
            if let AdapterKind::File { remap_root, .. } = &mut a.kind {
                *remap_root = root.to_path_buf();
            }
        }
    }
    Ok(adapters)
}
