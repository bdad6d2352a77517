//! `dissem`: simulate dissemination under explicit graph sequences, search
//! for worst-case adversaries, build and verify the three-graph lower-bound
//! construction, enumerate graph classes, and run the randomized property
//! suites.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage or input errors.
//! All randomness flows from `--seed`; `DISSEM_THREADS` bounds parallelism
//! over n-ranges. Artifacts are byte-identical for identical commands and
//! seeds regardless of thread count.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use dissemnet_core::adversary::{
    greedy_adversary, verify_upper_bound, worst_case_time, Heuristic, NamedBound, SearchOptions,
    SearchResult,
};
use dissemnet_core::checks::{collection_suite, lemma1_suite, lemma2_suite, CheckReport, SuiteConfig};
use dissemnet_core::dissemination::{run, RoundCount};
use dissemnet_core::graphs::GraphClassDescriptor;
use dissemnet_core::io::{
    graph_to_dot, graph_to_json, sequence_from_jsonl, sequence_to_jsonl, trace_to_csv,
    trace_to_json, GraphJson,
};
use dissemnet_core::nodeset::NodeId;
use dissemnet_core::{lower_bound_sequence, pigeonhole_cap, verify_lower_bound};

#[derive(Parser)]
#[command(name = "dissem", version, about = "Data dissemination in dynamic networks: simulator, adversary search, and bound verification")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ClassName {
    RootedTrees,
    RootedTreesWithLeaves,
    DirectedChains,
    UndirectedChains,
    Star,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Dot,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum VerifyTarget {
    LowerBound,
    ChainBound,
    UndirectedChainBound,
    KLeavesBound,
    InnerNodesBound,
    NlognCap,
    Lemma1,
    Lemma2,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a JSONL graph sequence and report dissemination times.
    Simulate {
        /// Sequence file: one graph JSON per line, optional trailing repeat
        /// directive.
        file: PathBuf,
        /// Rounds to simulate; defaults to n(n-2)+1 when every listed round
        /// is a rooted tree, and is required otherwise.
        #[arg(long)]
        horizon: Option<u32>,
        /// Artifact format for --out.
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        /// Write the trace artifact here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact worst-case dissemination time of a class (or a greedy probe).
    Search {
        #[arg(long, value_enum)]
        class: ClassName,
        #[arg(long)]
        n: u32,
        /// Leaf count for rooted-trees-with-leaves.
        #[arg(long)]
        leaves: Option<u32>,
        /// Reporting cap; defaults to the pigeonhole bound n(n-2)+1.
        #[arg(long)]
        cap: Option<u32>,
        /// Memoize modulo node relabeling (exact; needed around n = 6).
        #[arg(long)]
        canonicalize: bool,
        /// Use a greedy heuristic instead of exhaustive search:
        /// min-max-set-growth, min-total-growth, or random-restart.
        #[arg(long)]
        heuristic: Option<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write result JSON here (certificate JSONL lands next to it).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Emit the three-graph lower-bound sequence for a given n.
    Construct {
        #[arg(long)]
        n: u32,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a named bound or property target over a range of n.
    Verify {
        #[arg(long, value_enum)]
        target: VerifyTarget,
        /// Inclusive range `a..b`; target-specific default.
        #[arg(long)]
        n_range: Option<String>,
        #[arg(long)]
        n: Option<u32>,
        #[arg(long)]
        leaves: Option<u32>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        trials: u32,
        #[arg(long, default_value_t = 8)]
        max_n: u32,
        #[arg(long)]
        canonicalize: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Stream every graph of a class.
    Enumerate {
        #[arg(long, value_enum)]
        class: ClassName,
        #[arg(long)]
        n: u32,
        #[arg(long)]
        leaves: Option<u32>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the full randomized property suite.
    Properties {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        trials: u32,
        #[arg(long, default_value_t = 8)]
        max_n: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Errors that should exit with code 2 (usage or input problems).
struct UsageError(String);

impl<E: std::fmt::Display> From<E> for UsageError {
    fn from(e: E) -> Self {
        UsageError(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Simulate { file, horizon, format, out } => simulate(&file, horizon, format, out.as_deref()),
        Command::Search { class, n, leaves, cap, canonicalize, heuristic, seed, out } => {
            search(class, n, leaves, cap, canonicalize, heuristic.as_deref(), seed, out.as_deref())
        }
        Command::Construct { n, format, out } => construct(n, format, out.as_deref()),
        Command::Verify { target, n_range, n, leaves, seed, trials, max_n, canonicalize, out } => {
            verify(target, n_range.as_deref(), n, leaves, seed, trials, max_n, canonicalize, out.as_deref())
        }
        Command::Enumerate { class, n, leaves, format, out } => {
            enumerate(class, n, leaves, format, out.as_deref())
        }
        Command::Properties { seed, trials, max_n, out } => properties(seed, trials, max_n, out.as_deref()),
    };
    match outcome {
        Ok(all_passed) => {
            if all_passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(UsageError(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}

fn descriptor(class: ClassName, n: u32, leaves: Option<u32>) -> Result<GraphClassDescriptor, UsageError> {
    Ok(match class {
        ClassName::RootedTrees => GraphClassDescriptor::rooted_trees(n)?,
        ClassName::RootedTreesWithLeaves => {
            let m = leaves.ok_or_else(|| UsageError("--leaves is required for rooted-trees-with-leaves".into()))?;
            GraphClassDescriptor::rooted_trees_with_leaves(n, m)?
        }
        ClassName::DirectedChains => GraphClassDescriptor::directed_chains(n)?,
        ClassName::UndirectedChains => GraphClassDescriptor::undirected_chains(n)?,
        ClassName::Star => GraphClassDescriptor::star(n)?,
    })
}

fn write_artifact(out: Option<&Path>, content: &str) -> Result<(), UsageError> {
    match out {
        Some(path) => std::fs::write(path, content).map_err(UsageError::from),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn simulate(
    file: &Path,
    horizon: Option<u32>,
    format: Format,
    out: Option<&Path>,
) -> Result<bool, UsageError> {
    let text = std::fs::read_to_string(file)?;
    let sequence = sequence_from_jsonl(&text)?;
    let n = sequence.n();
    let horizon = match horizon {
        Some(h) => h,
        None => {
            let rooted = sequence.listed_rounds().iter().all(|g| g.classify().is_rooted_tree);
            if !rooted {
                return Err(UsageError(
                    "--horizon is required when the sequence is not made of rooted trees".into(),
                ));
            }
            let cap = pigeonhole_cap(n).max(1);
            if sequence.is_infinite() {
                cap
            } else {
                cap.min(sequence.listed_rounds().len() as u32)
            }
        }
    };
    let trace = run(sequence, horizon)?;
    match trace.dissemination_time() {
        RoundCount::Finite(b) => println!("B = {b}; winners = {}", trace.winners()),
        RoundCount::AtLeast(b) => println!("B >= {b} (horizon reached)"),
    }
    for i in 0..n as usize {
        let p = NodeId::from_index(i);
        match trace.node_dissemination_time(p) {
            RoundCount::Finite(r) => println!("B({p}) = {r}"),
            RoundCount::AtLeast(r) => println!("B({p}) >= {r}"),
        }
    }
    if out.is_some() {
        let artifact = match format {
            Format::Csv => trace_to_csv(&trace),
            Format::Json => trace_to_json(&trace),
            Format::Dot => return Err(UsageError("traces export as json or csv".into())),
        };
        write_artifact(out, &artifact)?;
    }
    Ok(true)
}

fn search_result_json(result: &SearchResult) -> serde_json::Value {
    let certificate: Vec<serde_json::Value> = result
        .certificate
        .listed_rounds()
        .iter()
        .map(|g| serde_json::to_value(GraphJson::from(g)).expect("graph serializes"))
        .collect();
    json!({
        "class": result.class,
        "leaves": result.leaves,
        "n": result.n,
        "worst_case": result.worst_case,
        "exact": result.exact,
        "certificate": certificate,
        "explored_states": result.explored_states,
        "canonicalization": result.canonicalized,
    })
}

#[allow(clippy::too_many_arguments)]
fn search(
    class: ClassName,
    n: u32,
    leaves: Option<u32>,
    cap: Option<u32>,
    canonicalize: bool,
    heuristic: Option<&str>,
    seed: u64,
    out: Option<&Path>,
) -> Result<bool, UsageError> {
    let desc = descriptor(class, n, leaves)?;
    let result = match heuristic {
        None => worst_case_time(&desc, &SearchOptions { cap, canonicalize })?,
        Some(name) => {
            let heuristic = Heuristic::parse(name)
                .ok_or_else(|| UsageError(format!("unknown heuristic {name}")))?;
            greedy_adversary(&desc, heuristic, cap, seed)?
        }
    };
    eprintln!(
        "search {} n={}: B = {} ({} states, {:?})",
        result.class, result.n, result.worst_case, result.explored_states, result.wall_time
    );
    let doc = serde_json::to_string_pretty(&search_result_json(&result)).expect("result serializes");
    match out {
        Some(path) => {
            std::fs::write(path, &doc)?;
            let cert_path = path.with_extension("cert.jsonl");
            std::fs::write(&cert_path, sequence_to_jsonl(&result.certificate))?;
        }
        None => println!("{doc}"),
    }
    Ok(true)
}

fn construct(n: u32, format: Format, out: Option<&Path>) -> Result<bool, UsageError> {
    let construction = lower_bound_sequence(n)?;
    let artifact = match format {
        Format::Dot => {
            let mut text = String::new();
            for g in [&construction.g1, &construction.g2, &construction.g3] {
                text.push_str(&graph_to_dot(g));
            }
            text
        }
        Format::Csv => return Err(UsageError("construct supports json or dot output".into())),
        Format::Json => {
            let phases = json!({
                "g1_rounds": [construction.phase1.0, construction.phase1.1],
                "g2_rounds": [construction.phase2.0, construction.phase2.1],
                "g3_rounds": [construction.phase3.0, construction.phase3.1],
            });
            let mut text = String::new();
            text.push_str(&sequence_to_jsonl(&construction.to_sequence()));
            eprintln!(
                "lower-bound construction n={n}: {} rounds, phases {phases}",
                construction.total_rounds()
            );
            text
        }
    };
    write_artifact(out, &artifact)?;
    Ok(true)
}

/// One verification line; `detail` is shown in parentheses and `report`
/// carries the full machine-readable result for the JSON artifact.
struct CheckLine {
    label: String,
    pass: bool,
    detail: String,
    report: Option<serde_json::Value>,
}

impl CheckLine {
    fn render(&self) -> String {
        format!(
            "{}: {} ({})",
            self.label,
            if self.pass { "PASS" } else { "FAIL" },
            self.detail
        )
    }

    fn to_json(&self) -> serde_json::Value {
        let mut doc = json!({ "check": self.label, "pass": self.pass, "detail": self.detail });
        if let Some(report) = &self.report {
            doc["report"] = report.clone();
        }
        doc
    }
}

fn parse_range(spec: Option<&str>, n: Option<u32>, default: (u32, u32)) -> Result<(u32, u32), UsageError> {
    if let Some(n) = n {
        return Ok((n, n));
    }
    match spec {
        None => Ok(default),
        Some(text) => {
            let (a, b) = text
                .split_once("..")
                .ok_or_else(|| UsageError(format!("expected a..b, got {text}")))?;
            let a: u32 = a.trim().parse().map_err(|_| UsageError(format!("bad range start in {text}")))?;
            let b: u32 = b.trim().parse().map_err(|_| UsageError(format!("bad range end in {text}")))?;
            if a > b {
                return Err(UsageError(format!("empty range {text}")));
            }
            Ok((a, b))
        }
    }
}

fn thread_budget() -> usize {
    match std::env::var("DISSEM_THREADS").ok().and_then(|s| s.parse::<usize>().ok()) {
        Some(k) if k >= 1 => k,
        _ => std::thread::available_parallelism().map(|p| p.get().min(8)).unwrap_or(1),
    }
}

/// Order-preserving parallel map; worker count is bounded by DISSEM_THREADS.
fn parallel_map<T, R, F>(items: Vec<T>, f: F) -> Vec<R>
where
    T: Send,
    R: Send,
    F: Fn(T) -> R + Sync,
{
    let workers = thread_budget().min(items.len().max(1));
    if workers <= 1 {
        return items.into_iter().map(f).collect();
    }
    let tagged: Vec<(usize, T)> = items.into_iter().enumerate().collect();
    let queue = std::sync::Mutex::new(tagged);
    let results = std::sync::Mutex::new(Vec::new());
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let item = queue.lock().unwrap().pop();
                match item {
                    None => break,
                    Some((idx, item)) => {
                        let r = f(item);
                        results.lock().unwrap().push((idx, r));
                    }
                }
            });
        }
    });
    let mut results = results.into_inner().unwrap();
    results.sort_by_key(|(idx, _)| *idx);
    results.into_iter().map(|(_, r)| r).collect()
}

fn suite_lines(reports: Vec<CheckReport>) -> Vec<CheckLine> {
    reports
        .into_iter()
        .map(|r| CheckLine {
            label: r.name.to_string(),
            pass: r.pass,
            detail: match &r.failure {
                None => format!("{} trials", r.trials),
                Some(f) => f.clone(),
            },
            report: None,
        })
        .collect()
}

#[allow(clippy::too_many_arguments)]
fn verify(
    target: VerifyTarget,
    n_range: Option<&str>,
    n: Option<u32>,
    leaves: Option<u32>,
    seed: u64,
    trials: u32,
    max_n: u32,
    canonicalize: bool,
    out: Option<&Path>,
) -> Result<bool, UsageError> {
    let lines: Vec<CheckLine> = match target {
        VerifyTarget::LowerBound => {
            let (a, b) = parse_range(n_range, n, (4, 16))?;
            parallel_map((a..=b).collect(), |n| -> Result<CheckLine, String> {
                let report = verify_lower_bound(n).map_err(|e| e.to_string())?;
                let line = CheckLine {
                    label: format!("lower-bound n={n}"),
                    pass: report.pass,
                    detail: format!(
                        "B = {}; expected {}; reading = {}",
                        report.simulated,
                        report.expected_rounds,
                        report.identified_reading.as_deref().unwrap_or("none")
                    ),
                    report: serde_json::to_value(&report).ok(),
                };
                Ok(line)
            })
            .into_iter()
            .collect::<Result<_, _>>()
            .map_err(UsageError)?
        }
        VerifyTarget::ChainBound | VerifyTarget::UndirectedChainBound => {
            let (a, b) = parse_range(n_range, n, (2, 6))?;
            let undirected = target == VerifyTarget::UndirectedChainBound;
            parallel_map((a..=b).collect(), |n| -> Result<CheckLine, String> {
                let desc = if undirected {
                    GraphClassDescriptor::undirected_chains(n)
                } else {
                    GraphClassDescriptor::directed_chains(n)
                }
                .map_err(|e| e.to_string())?;
                let bound = if undirected { NamedBound::UndirectedChain } else { NamedBound::DirectedChain };
                // The n = 6 directed search needs the canonical memo to stay
                // in memory; smaller n agree with and validate it.
                let opts = SearchOptions { cap: None, canonicalize: canonicalize || (!undirected && n >= 6) };
                let report = verify_upper_bound(&desc, bound, &opts).map_err(|e| e.to_string())?;
                let tight = report.observed == RoundCount::Finite(report.bound_value as u32);
                Ok(CheckLine {
                    label: format!("{} n={n}", report.bound),
                    pass: report.pass && tight,
                    detail: format!("B = {}; bound = {} (tight)", report.observed, report.bound_value),
                    report: serde_json::to_value(&report).ok(),
                })
            })
            .into_iter()
            .collect::<Result<_, _>>()
            .map_err(UsageError)?
        }
        VerifyTarget::KLeavesBound | VerifyTarget::InnerNodesBound => {
            let n = n.unwrap_or(4);
            let leaf_range: Vec<u32> = match leaves {
                Some(m) => vec![m],
                None => (1..n).collect(),
            };
            let bound = if target == VerifyTarget::KLeavesBound {
                NamedBound::KLeaves
            } else {
                NamedBound::InnerNodes
            };
            parallel_map(leaf_range, |m| -> Result<CheckLine, String> {
                let desc = GraphClassDescriptor::rooted_trees_with_leaves(n, m).map_err(|e| e.to_string())?;
                let opts = SearchOptions { cap: None, canonicalize };
                let report = verify_upper_bound(&desc, bound, &opts).map_err(|e| e.to_string())?;
                Ok(CheckLine {
                    label: format!("{} n={n} leaves={m}", report.bound),
                    pass: report.pass,
                    detail: format!("B = {}; bound = {}", report.observed, report.bound_value),
                    report: serde_json::to_value(&report).ok(),
                })
            })
            .into_iter()
            .collect::<Result<_, _>>()
            .map_err(UsageError)?
        }
        VerifyTarget::NlognCap => {
            let (a, b) = parse_range(n_range, n, (2, 4))?;
            parallel_map((a..=b).collect(), |n| -> Result<CheckLine, String> {
                let desc = GraphClassDescriptor::rooted_trees(n).map_err(|e| e.to_string())?;
                let opts = SearchOptions { cap: None, canonicalize: canonicalize || n >= 5 };
                let report = verify_upper_bound(&desc, NamedBound::NLogNCap, &opts).map_err(|e| e.to_string())?;
                Ok(CheckLine {
                    label: format!("nlogn-cap n={n}"),
                    pass: report.pass,
                    detail: format!("B = {}; cap = {}", report.observed, report.bound_value),
                    report: serde_json::to_value(&report).ok(),
                })
            })
            .into_iter()
            .collect::<Result<_, _>>()
            .map_err(UsageError)?
        }
        VerifyTarget::Lemma1 => {
            let cfg = SuiteConfig { seed, trials, max_n };
            suite_lines(lemma1_suite(&cfg))
        }
        VerifyTarget::Lemma2 => {
            let cfg = SuiteConfig { seed, trials, max_n };
            suite_lines(lemma2_suite(&cfg))
        }
    };

    let mut all_pass = true;
    for line in &lines {
        println!("{}", line.render());
        all_pass &= line.pass;
    }
    if out.is_some() {
        let report: Vec<serde_json::Value> = lines
            .iter()
            .map(CheckLine::to_json)
            .collect();
        write_artifact(out, &serde_json::to_string_pretty(&report).expect("report serializes"))?;
    }
    Ok(all_pass)
}

fn enumerate(
    class: ClassName,
    n: u32,
    leaves: Option<u32>,
    format: Format,
    out: Option<&Path>,
) -> Result<bool, UsageError> {
    let desc = descriptor(class, n, leaves)?;
    let mut text = String::new();
    let mut count = 0u64;
    for g in desc.enumerate()? {
        match format {
            Format::Dot => text.push_str(&graph_to_dot(&g)),
            Format::Json => {
                text.push_str(&graph_to_json(&g));
                text.push('\n');
            }
            Format::Csv => return Err(UsageError("graphs export as json lines or dot".into())),
        }
        count += 1;
    }
    eprintln!("enumerated {count} graphs of {} on n={n}", desc.name());
    write_artifact(out, &text)?;
    Ok(true)
}

fn properties(seed: u64, trials: u32, max_n: u32, out: Option<&Path>) -> Result<bool, UsageError> {
    let cfg = SuiteConfig { seed, trials, max_n };
    let suites: Vec<fn(&SuiteConfig) -> Vec<CheckReport>> =
        vec![lemma1_suite, lemma2_suite, collection_suite];
    let reports: Vec<CheckReport> =
        parallel_map(suites, |suite| suite(&cfg)).into_iter().flatten().collect();
    let lines = suite_lines(reports);
    let mut all_pass = true;
    for line in &lines {
        println!("{}", line.render());
        all_pass &= line.pass;
    }
    if out.is_some() {
        let report: Vec<serde_json::Value> = lines
            .iter()
            .map(CheckLine::to_json)
            .collect();
        write_artifact(out, &serde_json::to_string_pretty(&report).expect("report serializes"))?;
    }
    Ok(all_pass)
}
