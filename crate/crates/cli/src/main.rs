//! `bh`: runs the Betti map, height, intersection and counting experiments
//! and prints one structured report per invocation.

mod arithmetic;
mod counting;
mod geometry;
mod intersect;
mod parse;
mod report;

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::error::ErrorKind;
use clap::parser::ValueSource;
use clap::{ArgMatches, CommandFactory, FromArgMatches, Parser, Subcommand};
use serde_json::{json, Value};

use crate::report::{CliError, CliResult, ConfigEntry, ErrorObject, Format, Meta, Report};

#[derive(Parser, Debug)]
#[command(
    name = "bh",
    version,
    about = "Betti maps, canonical heights and point-counting experiments"
)]
struct Cli {
    #[arg(long, global = true, value_enum, default_value = "json")]
    format: Format,
    /// Seed for every random draw in the run.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Plain-text `key = value` file mirroring the long flags of the command.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Betti coordinates, form values, semi-positivity and scaling at a point.
    Betti(geometry::BettiArgs),
    /// Numerical rank of the Betti map along a section of a family.
    Nondegeneracy(geometry::NondegeneracyArgs),
    /// Canonical height by the Tate limit.
    Height(arithmetic::HeightArgs),
    /// Ratio `|h_hat - h| / max(1, h(lambda))` over the Legendre family.
    SilvermanTate(arithmetic::ScanArgs),
    /// Siu bigness inequality.
    Siu(intersect::SiuArgs),
    /// Covering, height partition, large-point and packet bounds.
    #[command(subcommand)]
    Count(counting::CountCommand),
    /// Product-set non-containment bound, test and exhaustive grid.
    #[command(subcommand)]
    Alon(counting::AlonCommand),
    /// Intersection numbers on products of projective spaces.
    #[command(subcommand)]
    Intersect(intersect::IntersectCommand),
    /// Least power-of-two `N` and the assembled height constants.
    Constants(arithmetic::ConstantsArgs),
}

fn run(cmd: &Command, seed: u64) -> CliResult<Value> {
    match cmd {
        Command::Betti(a) => geometry::run_betti(a, seed),
        Command::Nondegeneracy(a) => geometry::run_nondegeneracy(a),
        Command::Height(a) => arithmetic::run_height(a),
        Command::SilvermanTate(a) => arithmetic::run_scan(a),
        Command::Siu(a) => intersect::run_siu(a),
        Command::Count(c) => counting::run_count(c, seed),
        Command::Alon(c) => counting::run_alon(c),
        Command::Intersect(c) => intersect::run_intersect(c),
        Command::Constants(a) => arithmetic::run_constants(a),
    }
}

fn config_path(argv: &[String]) -> Option<String> {
    argv.iter().enumerate().find_map(|(i, a)| {
        if a == "--config" {
            argv.get(i + 1).cloned()
        } else {
            a.strip_prefix("--config=").map(str::to_string)
        }
    })
}

/// Appends config-file entries not already given on the command line;
/// returns the long names that came from the file.
fn inject_config(argv: &mut Vec<String>) -> CliResult<BTreeSet<String>> {
    let mut injected = BTreeSet::new();
    let Some(path) = config_path(argv) else {
        return Ok(injected);
    };
    let text = std::fs::read_to_string(&path).map_err(|e| CliError::Io(format!("{path}: {e}")))?;
    for (key, value) in parse::config_args(&text)? {
        let flag = format!("--{key}");
        let given = argv.iter().any(|a| *a == flag || a.starts_with(&format!("{flag}=")));
        if given {
            continue;
        }
        argv.push(flag);
        if let Some(v) = value {
            argv.push(v);
        }
        injected.insert(key);
    }
    Ok(injected)
}

/// Command path (e.g. `count cover`) and the matches of its last level.
fn leaf(matches: &ArgMatches) -> (Vec<String>, &ArgMatches) {
    let mut names = Vec::new();
    let mut m = matches;
    while let Some((name, sub)) = m.subcommand() {
        names.push(name.to_string());
        m = sub;
    }
    (names, m)
}

fn config_echo(path: &[String], m: &ArgMatches, injected: &BTreeSet<String>) -> BTreeMap<String, ConfigEntry> {
    let mut cmd = Cli::command();
    // Global arguments reach subcommands only once the tree is built.
    cmd.build();
    for name in path {
        cmd = cmd
            .find_subcommand(name)
            .expect("subcommand came from the parser")
            .clone();
    }
    let mut out = BTreeMap::new();
    for id in m.ids() {
        let id = id.as_str();
        // Argument groups share the id namespace; only real arguments are echoed.
        let Some(arg) = cmd.get_arguments().find(|a| a.get_id() == id) else {
            continue;
        };
        let long = arg.get_long().unwrap_or(id).to_string();
        let raw: Vec<String> = m
            .get_raw(id)
            .map(|vals| vals.map(|v| v.to_string_lossy().into_owned()).collect())
            .unwrap_or_default();
        let value = match raw.len() {
            0 => Value::Null,
            1 if !matches!(long.as_str(), "poly") => json!(raw[0]),
            _ => json!(raw),
        };
        let source = match m.value_source(id) {
            Some(ValueSource::DefaultValue) => "default",
            Some(ValueSource::EnvVariable) => "environment",
            _ if injected.contains(&long) => "config_file",
            _ => "command_line",
        };
        out.insert(long, ConfigEntry { value, source });
    }
    let (threads, source) = match std::env::var("BH_THREADS") {
        Ok(v) => (json!(v), "environment"),
        Err(_) => (json!("auto"), "default"),
    };
    out.insert("threads".into(), ConfigEntry { value: threads, source });
    out
}

fn configure_threads() -> CliResult<()> {
    let Ok(v) = std::env::var("BH_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Validation(format!("BH_THREADS must be a positive integer, got {v:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Validation(format!("cannot set up {n} threads: {e}")))
}

fn failure_report(command: String, err: &CliError, format: Format, seed: u64) -> Report {
    Report {
        command,
        config: BTreeMap::new(),
        results: Value::Null,
        errors: vec![ErrorObject {
            kind: err.kind(),
            exit_code: err.exit_code(),
            message: err.to_string(),
        }],
        meta: meta(format, seed),
    }
}

fn meta(format: Format, seed: u64) -> Meta {
    Meta {
        tool: "bh",
        version: env!("CARGO_PKG_VERSION"),
        core_version: bh_core::VERSION,
        seed,
        format,
    }
}

fn emit(report: &Report, code: i32) -> ExitCode {
    print!("{}", report.render());
    ExitCode::from(code as u8)
}

fn main() -> ExitCode {
    let mut argv: Vec<String> = std::env::args().collect();
    let guess = argv.get(1).cloned().unwrap_or_default();
    let injected = match inject_config(&mut argv) {
        Ok(k) => k,
        Err(e) => return emit(&failure_report(guess, &e, Format::Json, 0), e.exit_code()),
    };
    let matches = match Cli::command().try_get_matches_from(&argv) {
        Ok(m) => m,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) if e.kind() == ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => {
            let _ = e.print();
            return ExitCode::from(2);
        }
        Err(e) => {
            let _ = e.print();
            let rendered = e.to_string();
            let first = rendered
                .lines()
                .next()
                .unwrap_or_default()
                .trim_start_matches("error: ")
                .to_string();
            let err = CliError::Validation(first);
            return emit(&failure_report(guess, &err, Format::Json, 0), 2);
        }
    };
    let cli = Cli::from_arg_matches(&matches).expect("matches came from the same definition");
    let (path, leaf_matches) = leaf(&matches);
    let command = path.join(" ");
    if let Err(e) = configure_threads() {
        return emit(&failure_report(command, &e, cli.format, cli.seed), e.exit_code());
    }
    let config = config_echo(&path, leaf_matches, &injected);
    let start = Instant::now();
    let outcome = run(&cli.command, cli.seed);
    eprintln!("bh {command}: {:.3} s", start.elapsed().as_secs_f64());
    let (results, errors, code) = match outcome {
        Ok(v) => (v, Vec::new(), 0),
        Err(e) => {
            eprintln!("bh {command}: {e}");
            let obj = ErrorObject {
                kind: e.kind(),
                exit_code: e.exit_code(),
                message: e.to_string(),
            };
            (Value::Null, vec![obj], e.exit_code())
        }
    };
    let report = Report {
        command,
        config,
        results,
        errors,
        meta: meta(cli.format, cli.seed),
    };
    emit(&report, code)
}
