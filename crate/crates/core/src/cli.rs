//! Command-line front end: `check`, `transform`, `run`, `pattern`, `analyze`.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::analyzer::{analyze, export_csv, export_json, ingest, InputFormat};
use crate::answerability::is_ldaq;
use crate::exec::{execute, Dereferencer, ExecConfig, FixtureWeb, HttpDereferencer};
use crate::pattern::{display_template, extract_template};
use crate::rdf::BindingTable;
use crate::sparql::{
    lexer::tokenize, parse, parse_sparql_ld, repair, triage, ParsedQuery, Projection, ProjectionItem, QueryForm,
    TriageStatus,
};
use crate::transform::{to_sparql_ld, transform_query, traversal_from_pattern};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExitStatus(pub i32);

impl ExitStatus {
    pub const SUCCESS: ExitStatus = ExitStatus(0);
    /// Non-answerable query, or an execution error.
    pub const FAILURE: ExitStatus = ExitStatus(1);
    /// Unconsidered or invalid input.
    pub const BAD_INPUT: ExitStatus = ExitStatus(2);
    pub const USAGE: ExitStatus = ExitStatus(3);
}

#[derive(Parser, Debug)]
#[command(name = "ldtraverse", version, about = "Link-traversal evaluation of SPARQL queries over Linked Data")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide whether a query is Linked Data-answerable
    Check {
        file: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Rewrite an answerable query into SERVICE-anchored form
    Transform {
        file: PathBuf,
        #[arg(short = 'o', long = "out")]
        out: Option<PathBuf>,
    },
    /// Evaluate a query by dereferencing IRIs (live web or fixtures)
    Run {
        file: PathBuf,
        /// Directory with mapping.json (and optionally latency.json)
        #[arg(long)]
        fixtures: Option<PathBuf>,
        #[arg(long, default_value_t = 10)]
        max_parallel: usize,
        /// Minimum gap between requests to one host, in ms
        #[arg(long)]
        host_delay: Option<u64>,
        #[arg(long, default_value_t = 10_000)]
        timeout: u64,
        #[arg(long, default_value_t = 1_000_000)]
        max_triples: usize,
        #[arg(long)]
        strict: bool,
        /// Honor robots.txt Crawl-delay
        #[arg(long)]
        robots: bool,
        /// Print execution statistics as JSON on stderr
        #[arg(long)]
        stats: bool,
    },
    /// Print the query's template
    Pattern {
        file: PathBuf,
        /// Use UN / OPT instead of UNION / OPTIONAL
        #[arg(long)]
        short: bool,
    },
    /// Analyze a query log
    Analyze {
        source: PathBuf,
        #[arg(long, value_enum)]
        format: Format,
        #[arg(long, default_value_t = 10)]
        top: usize,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        csv: Option<String>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Lines,
    Dir,
}

/// Runs the command line `argv` (program name first), writing results to
/// `out` and diagnostics to `err`.
pub fn dispatch<I, S>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> ExitStatus
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{text}");
                    ExitStatus::SUCCESS
                }
                _ => {
                    let _ = write!(err, "{text}");
                    ExitStatus::USAGE
                }
            };
        }
    };
    let result = match cli.command {
        Command::Check { file, json } => check(&file, json, out),
        Command::Transform { file, out: target } => transform(&file, target.as_deref(), out, err),
        Command::Run { file, fixtures, max_parallel, host_delay, timeout, max_triples, strict, robots, stats } => {
            let cfg = ExecConfig {
                max_parallel: max_parallel.max(1),
                per_host_delay_ms: host_delay.unwrap_or(if fixtures.is_some() { 0 } else { 500 }),
                timeout_ms: timeout,
                max_triples_per_resource: max_triples,
                strict,
                honor_robots_crawl_delay: robots,
                ..ExecConfig::default()
            };
            run(&file, fixtures.as_deref(), &cfg, stats, out, err)
        }
        Command::Pattern { file, short } => pattern(&file, short, out),
        Command::Analyze { source, format, top, out: target, csv } => {
            let format = match format {
                Format::Lines => InputFormat::Lines,
                Format::Dir => InputFormat::Dir,
            };
            analyze_cmd(&source, format, top, target.as_deref(), csv.as_deref(), out, err)
        }
    };
    match result {
        Ok(code) => code,
        Err(Failure(code, msg)) => {
            let _ = writeln!(err, "{msg}");
            code
        }
    }
}

struct Failure(ExitStatus, String);

type CmdResult = Result<ExitStatus, Failure>;

fn io_fail(e: std::io::Error) -> Failure {
    Failure(ExitStatus::FAILURE, e.to_string())
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure(ExitStatus::BAD_INPUT, format!("{}: {e}", path.display())))
}

/// Triage plus parse; anything but a considered query is bad input.
fn load_query(path: &Path) -> Result<ParsedQuery, Failure> {
    let text = read(path)?;
    let t = triage(&text);
    match t.status {
        TriageStatus::Considered => {
            parse(&repair(&text)).map_err(|e| Failure(ExitStatus::BAD_INPUT, format!("invalid: {e}")))
        }
        status => Err(Failure(ExitStatus::BAD_INPUT, format!("{}: {}", status.name(), t.reasons.join(", ")))),
    }
}

fn check(file: &Path, as_json: bool, out: &mut dyn Write) -> CmdResult {
    let text = read(file)?;
    let t = triage(&text);
    if t.status != TriageStatus::Considered {
        if as_json {
            writeln!(out, "{}", json!({ "status": t.status.name(), "reasons": t.reasons })).map_err(io_fail)?;
        } else {
            writeln!(out, "{}: {}", t.status.name(), t.reasons.join(", ")).map_err(io_fail)?;
        }
        return Ok(ExitStatus::BAD_INPUT);
    }
    let q = load_query(file)?;
    let v = is_ldaq(&q.pattern);
    if as_json {
        let witness = v.witness.as_ref().map(|w| json!({ "variable": w.variable, "element": w.element }));
        let doc = json!({
            "status": "considered",
            "answerable": v.answerable,
            "witness": witness,
            "elementOrder": v.element_order,
            "boundAfter": v.bound_after,
        });
        writeln!(out, "{doc}").map_err(io_fail)?;
    } else if v.answerable {
        writeln!(out, "answerable").map_err(io_fail)?;
    } else {
        let w = v.witness.as_ref().map(|w| w.variable.as_str()).unwrap_or_default();
        writeln!(out, "non-answerable: ?{w}").map_err(io_fail)?;
    }
    Ok(if v.answerable { ExitStatus::SUCCESS } else { ExitStatus::FAILURE })
}

fn transform(file: &Path, target: Option<&Path>, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    let q = load_query(file)?;
    let plan = transform_query(&q.pattern).map_err(|e| Failure(ExitStatus::FAILURE, e.to_string()))?;
    let text = to_sparql_ld(&q, &plan);
    match target {
        Some(p) => {
            std::fs::write(p, text + "\n").map_err(io_fail)?;
            let _ = writeln!(err, "wrote {}", p.display());
        }
        None => writeln!(out, "{text}").map_err(io_fail)?,
    }
    Ok(ExitStatus::SUCCESS)
}

fn is_service_form(text: &str) -> bool {
    tokenize(text).is_ok_and(|toks| toks.iter().any(|t| t.tok.is_word("SERVICE")))
}

fn run(
    file: &Path,
    fixtures: Option<&Path>,
    cfg: &ExecConfig,
    stats: bool,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> CmdResult {
    let text = read(file)?;
    let (query, plan) = if is_service_form(&text) {
        let q = parse_sparql_ld(&repair(&text)).map_err(|e| Failure(ExitStatus::BAD_INPUT, format!("invalid: {e}")))?;
        let plan = traversal_from_pattern(&q.pattern).map_err(|e| Failure(ExitStatus::BAD_INPUT, e.to_string()))?;
        (q, plan)
    } else {
        let q = load_query(file)?;
        let plan = transform_query(&q.pattern).map_err(|e| Failure(ExitStatus::FAILURE, e.to_string()))?;
        (q, plan)
    };
    if !query.modifiers.is_empty() {
        let _ = writeln!(err, "note: solution modifiers are not applied: {}", query.modifiers);
    }
    let web;
    let http;
    let deref: &dyn Dereferencer = match fixtures {
        Some(dir) => {
            web = FixtureWeb::load(dir).map_err(|e| Failure(ExitStatus::BAD_INPUT, e.to_string()))?;
            &web
        }
        None => {
            http = HttpDereferencer::new();
            &http
        }
    };
    let (table, st) = execute(&plan, deref, cfg).map_err(|e| Failure(ExitStatus::FAILURE, e.to_string()))?;
    if stats {
        let _ = writeln!(err, "{}", serde_json::to_string(&st).expect("stats serialize"));
    }
    if query.form == QueryForm::Ask {
        writeln!(out, "{}", !table.is_empty()).map_err(io_fail)?;
        return Ok(ExitStatus::SUCCESS);
    }
    let vars: Vec<String> = match &query.projection {
        Projection::All => table.variables().to_vec(),
        Projection::Items(items) => items
            .iter()
            .filter_map(|i| match i {
                ProjectionItem::Variable(v) => Some(v.clone()),
                ProjectionItem::Expression { text, .. } => {
                    let _ = writeln!(err, "note: projection expression {text} is not evaluated");
                    None
                }
            })
            .collect(),
    };
    let mut projected = table.project(&vars);
    if query.distinct {
        let mut seen = std::collections::HashSet::new();
        let rows = projected.rows().iter().filter(|r| seen.insert(format!("{r:?}"))).cloned().collect();
        projected = BindingTable::new(vars, rows);
    }
    write!(out, "{}", projected.to_tsv()).map_err(io_fail)?;
    Ok(ExitStatus::SUCCESS)
}

fn pattern(file: &Path, short: bool, out: &mut dyn Write) -> CmdResult {
    let q = load_query(file)?;
    let t = extract_template(&q.pattern).text;
    writeln!(out, "{}", if short { display_template(&t) } else { t }).map_err(io_fail)?;
    Ok(ExitStatus::SUCCESS)
}

fn analyze_cmd(
    source: &Path,
    format: InputFormat,
    top: usize,
    target: Option<&Path>,
    csv: Option<&str>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> CmdResult {
    let queries =
        ingest(source, format).map_err(|e| Failure(ExitStatus::BAD_INPUT, format!("{}: {e}", source.display())))?;
    let report = analyze(&queries, top);
    if let Some(prefix) = csv {
        export_csv(&report, prefix).map_err(io_fail)?;
    }
    match target {
        Some(p) => {
            export_json(&report, p).map_err(io_fail)?;
            let _ = writeln!(
                err,
                "{} queries, {} unique, {} LDaQ ({:.1}%)",
                report.total,
                report.unique,
                report.ldaq.count,
                100.0 * report.ldaq_share()
            );
        }
        None => writeln!(out, "{}", report.to_json()).map_err(io_fail)?,
    }
    Ok(ExitStatus::SUCCESS)
}
