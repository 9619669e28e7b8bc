//! Command-line front end: check histories, generate workloads, reduce
//! PC/SI instances to serializability, encode to DIMACS, and query the
//! brute-force oracle.
//!
//! Exit codes: 0 valid/true, 1 violation/false, 2 input error, 3 budget
//! exceeded.

use std::io::Write as _;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use txncheck_core::commgraph;
use txncheck_core::generate::{self, CnfInput, GenMode, GenParams};
use txncheck_core::history::Width;
use txncheck_core::oracle;
use txncheck_core::sat;
use txncheck_core::serializable::SearchOptions;
use txncheck_core::verdict::{Evidence, Status, Verdict};
use txncheck_core::{Criterion, Error, History};

#[derive(Parser)]
#[command(name = "txncheck", version, about = "Transactional consistency checker")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum CriterionArg {
    Rc,
    Ra,
    Cc,
    Pc,
    Si,
    Ser,
}

impl From<CriterionArg> for Criterion {
    fn from(c: CriterionArg) -> Criterion {
        match c {
            CriterionArg::Rc => Criterion::ReadCommitted,
            CriterionArg::Ra => Criterion::ReadAtomic,
            CriterionArg::Cc => Criterion::Causal,
            CriterionArg::Pc => Criterion::Prefix,
            CriterionArg::Si => Criterion::SnapshotIsolation,
            CriterionArg::Ser => Criterion::Serializability,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Check history files against a consistency criterion.
    Check {
        #[arg(long, value_enum)]
        criterion: CriterionArg,
        /// Check each biconnected component of the communication graph
        /// separately (session-form histories only).
        #[arg(long, conflicts_with = "via_sat")]
        decompose: bool,
        /// Decide via the CNF encoding and the internal solver.
        #[arg(long)]
        via_sat: bool,
        /// Print the witness commit order for valid histories.
        #[arg(long)]
        witness: bool,
        /// Search budget (states for the prefix search, conflicts for the
        /// solver); also settable via TXNCHECK_BUDGET.
        #[arg(long)]
        budget: Option<u64>,
        /// Emit machine-readable JSON per file.
        #[arg(long)]
        json: bool,
        #[arg(required = true)]
        files: Vec<String>,
    },
    /// Produce history files.
    Generate {
        #[command(subcommand)]
        what: GenerateCmd,
    },
    /// Write the serializability reduction of a history.
    Reduce {
        #[arg(value_enum)]
        target: ReduceTarget,
        file: String,
        #[arg(short, long)]
        output: String,
    },
    /// Encode criterion checking as DIMACS CNF.
    Encode {
        #[arg(long, value_enum)]
        criterion: CriterionArg,
        file: String,
        #[arg(short, long)]
        output: String,
    },
    /// Brute-force ground truth for small histories; prints true/false.
    Oracle {
        #[arg(long, value_enum)]
        criterion: CriterionArg,
        file: String,
        /// Override the non-init transaction guard (hard cap 63).
        #[arg(long, default_value_t = oracle::DEFAULT_LIMIT)]
        limit: usize,
    },
    /// Print size, width, and communication-graph statistics.
    Stats { file: String },
}

#[derive(Clone, Copy, ValueEnum)]
enum ReduceTarget {
    Pc,
    Si,
}

#[derive(Subcommand)]
enum GenerateCmd {
    /// Random client workload; serializable unless reads are redirected.
    Random(RandomArgs),
    /// A named history from the anomaly catalogue.
    Canned {
        #[arg(help = canned_name_help())]
        name: String,
        #[arg(short, long)]
        output: Option<String>,
    },
    /// The hardness gadget for a DIMACS CNF formula.
    FromCnf {
        file: String,
        #[arg(short, long)]
        output: Option<String>,
    },
}

#[derive(Args)]
struct RandomArgs {
    #[arg(long, default_value_t = 3)]
    sessions: u32,
    #[arg(long = "txns", default_value_t = 5)]
    txns_per_session: u32,
    #[arg(long = "ops", default_value_t = 4)]
    ops_per_txn: u32,
    #[arg(long, default_value_t = 6)]
    vars: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    disjoint_writes: bool,
    /// Redirect this many reads to older versions (0 = serial).
    #[arg(long, default_value_t = 0)]
    stale_reads: u32,
    #[arg(short, long)]
    output: Option<String>,
}

fn canned_name_help() -> String {
    format!("One of: {}", generate::CANNED_NAMES.join(", "))
}

const EXIT_VALID: u8 = 0;
const EXIT_VIOLATION: u8 = 1;
const EXIT_INPUT_ERROR: u8 = 2;
const EXIT_BUDGET: u8 = 3;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}

fn exit_code_for(e: &Error) -> u8 {
    match e {
        Error::SearchBudgetExceeded { .. } | Error::SolverBudgetExceeded => EXIT_BUDGET,
        _ => EXIT_INPUT_ERROR,
    }
}

fn run(cli: Cli) -> Result<u8, Error> {
    match cli.command {
        Command::Check { criterion, decompose, via_sat, witness, budget, json, files } => {
            check_files(criterion.into(), decompose, via_sat, witness, budget, json, &files)
        }
        Command::Generate { what } => generate_cmd(what),
        Command::Reduce { target, file, output } => {
            let h = load(&file)?;
            let (reduced, _) = match target {
                ReduceTarget::Pc => txncheck_core::reduction::reduce_pc_to_ser(&h),
                ReduceTarget::Si => txncheck_core::reduction::reduce_si_to_ser(&h),
            };
            write_output(Some(&output), &txncheck_core::serialize_history(&reduced))?;
            Ok(EXIT_VALID)
        }
        Command::Encode { criterion, file, output } => {
            let h = load(&file)?;
            let f = sat::encode(&h, criterion.into())?;
            write_output(Some(&output), &sat::emit_dimacs(&f))?;
            Ok(EXIT_VALID)
        }
        Command::Oracle { criterion, file, limit } => {
            let h = load(&file)?;
            let ok = oracle::brute_check_with_limit(&h, criterion.into(), limit)?;
            println!("{ok}");
            Ok(if ok { EXIT_VALID } else { EXIT_VIOLATION })
        }
        Command::Stats { file } => {
            let h = load(&file)?;
            stats(&h);
            Ok(EXIT_VALID)
        }
    }
}

fn load(path: &str) -> Result<History, Error> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::MalformedInput(format!("{path}: {e}")))?;
    txncheck_core::parse_history(&text)
}

fn write_output(path: Option<&str>, contents: &str) -> Result<(), Error> {
    match path {
        Some(path) => std::fs::write(path, contents)
            .map_err(|e| Error::MalformedInput(format!("{path}: {e}"))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(contents.as_bytes())
                .map_err(|e| Error::MalformedInput(e.to_string()))
        }
    }
}

fn budget_from_env() -> Option<u64> {
    std::env::var("TXNCHECK_BUDGET").ok()?.parse().ok()
}

fn check_files(
    criterion: Criterion,
    decompose: bool,
    via_sat: bool,
    witness: bool,
    budget: Option<u64>,
    json: bool,
    files: &[String],
) -> Result<u8, Error> {
    let budget = budget.or_else(budget_from_env);
    let opts = SearchOptions {
        budget: budget.unwrap_or(txncheck_core::serializable::DEFAULT_BUDGET),
        memo: true,
    };
    let mut worst = EXIT_VALID;
    for file in files {
        let started = Instant::now();
        let outcome = load(file).and_then(|h| {
            if via_sat {
                sat::check_via_sat(&h, criterion, budget.unwrap_or(sat::DEFAULT_CONFLICT_BUDGET))
            } else if decompose {
                commgraph::check_decomposed(&h, criterion, &opts)
            } else {
                txncheck_core::check(&h, criterion, &opts)
            }
        });
        let elapsed_ms = started.elapsed().as_millis() as u64;
        match outcome {
            Ok(v) => {
                let code = if v.is_valid() { EXIT_VALID } else { EXIT_VIOLATION };
                worst = worst_of(worst, code);
                report(file, criterion, &v, witness, json, elapsed_ms, files.len() > 1);
            }
            Err(e) => {
                let code = exit_code_for(&e);
                worst = worst_of(worst, code);
                eprintln!("{file}: error: {e}");
            }
        }
    }
    Ok(worst)
}

/// Input errors dominate budget exhaustion, which dominates violations.
fn worst_of(a: u8, b: u8) -> u8 {
    let rank = |c: u8| match c {
        EXIT_INPUT_ERROR => 3,
        EXIT_BUDGET => 2,
        EXIT_VIOLATION => 1,
        _ => 0,
    };
    if rank(b) > rank(a) {
        b
    } else {
        a
    }
}

fn report(
    file: &str,
    criterion: Criterion,
    v: &Verdict,
    witness: bool,
    json: bool,
    elapsed_ms: u64,
    multi: bool,
) {
    if json {
        let mut obj = serde_json::json!({
            "criterion": criterion.key(),
            "status": match v.status { Status::Valid => "valid", Status::Violation => "violation" },
            "explored_states": v.explored_states,
            "elapsed_ms": elapsed_ms,
        });
        if let Some(w) = &v.witness {
            obj["witness"] = serde_json::json!(w);
        }
        if let Some(e) = &v.evidence {
            obj["evidence"] = evidence_json(e);
        }
        println!("{obj}");
        return;
    }
    let prefix = if multi { format!("{file}: ") } else { String::new() };
    match v.status {
        Status::Valid => {
            println!("{prefix}{criterion}: valid");
            if witness {
                if let Some(w) = &v.witness {
                    println!("{prefix}witness: {}", w.join(" < "));
                }
            }
        }
        Status::Violation => {
            println!("{prefix}{criterion}: violation");
            match &v.evidence {
                Some(Evidence::Cycle(edges)) => {
                    for e in edges {
                        println!("{prefix}  {} -[{}]-> {}", e.from, e.label, e.to);
                    }
                }
                Some(Evidence::DeepestPrefix(tids)) => {
                    println!("{prefix}  deepest serializable prefix: {}", tids.join(", "));
                }
                None => {}
            }
        }
    }
}

fn evidence_json(e: &Evidence) -> serde_json::Value {
    match e {
        Evidence::Cycle(edges) => serde_json::json!({
            "kind": "cycle",
            "edges": edges.iter().map(|e| serde_json::json!({
                "from": e.from,
                "to": e.to,
                "label": e.label.to_string(),
            })).collect::<Vec<_>>(),
        }),
        Evidence::DeepestPrefix(tids) => serde_json::json!({
            "kind": "deepest_prefix",
            "tids": tids,
        }),
    }
}

fn generate_cmd(what: GenerateCmd) -> Result<u8, Error> {
    match what {
        GenerateCmd::Random(args) => {
            let mut p = GenParams::new(
                args.sessions,
                args.txns_per_session,
                args.ops_per_txn,
                args.vars,
                args.seed,
            );
            p.disjoint_writes = args.disjoint_writes;
            p.mode = if args.stale_reads > 0 {
                GenMode::StaleRead(args.stale_reads)
            } else {
                GenMode::Serial
            };
            let h = generate::gen_random(&p);
            write_history(args.output.as_deref(), &h)
        }
        GenerateCmd::Canned { name, output } => {
            let h = generate::canned(&name)?;
            write_history(output.as_deref(), &h)
        }
        GenerateCmd::FromCnf { file, output } => {
            let text = std::fs::read_to_string(&file)
                .map_err(|e| Error::MalformedInput(format!("{file}: {e}")))?;
            let cnf = CnfInput::parse_dimacs(&text)?;
            let h = generate::gen_from_cnf(&cnf);
            write_history(output.as_deref(), &h)
        }
    }
}

fn write_history(path: Option<&str>, h: &History) -> Result<u8, Error> {
    let mut text = txncheck_core::serialize_history(h);
    text.push('\n');
    write_output(path, &text)?;
    Ok(EXIT_VALID)
}

fn stats(h: &History) {
    let non_init = h.txn_count() - 1;
    let ops: usize = h.tids().map(|t| h.ops(t).len()).sum();
    println!("transactions: {non_init} (+ init)");
    println!("operations: {ops}");
    println!("variables: {}", h.var_count());
    match h.width() {
        Width::Exact(w) => println!("width: {w}"),
        Width::UpperBound(w) => println!("width: <= {w} (approximate)"),
    }
    match commgraph::build_comm_graph(h) {
        Ok(g) => {
            let comps = commgraph::biconnected_components(&g);
            println!("sessions: {}", g.session_count());
            println!("communication edges: {}", g.edges().count());
            println!("biconnected components: {}", comps.len());
            let sizes: Vec<String> = comps.iter().map(|c| c.size().to_string()).collect();
            println!("component sizes: {}", sizes.join(", "));
            if let Some(max) = comps.iter().map(|c| c.size()).max() {
                println!("max component size: {max}");
            }
        }
        Err(_) => println!("communication graph: n/a (general-form session order)"),
    }
}
