//! Command-line front end. Output is JSON unless `--pretty` asks for a table.
//!
//! Exit codes: 0 yes (or success), 1 no, 2 budget exceeded, 64 usage,
//! 65 bad input data, 66 missing input file, 70 internal failure.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::catalog::{self, catalog_list, one_state_gadget};
use crate::classify::classify;
use crate::error::{Error, Result};
use crate::gadget::Gadget;
use crate::io::{gadget_to_json, network_to_json, read_gadget, read_network, read_system, system_to_json, GadgetNetwork};
use crate::netsim::{
    check_bisimulation, gadget_lts, interface_lts, multi_agent_locking_2_toggle, multi_agent_one_toggle,
    simulate_extra_agents, InterfaceLts, ToggleKind,
};
use crate::reduce::*;
use crate::solve::{oracle_solve, solve_auto, Decision, Objective, SolveResult, DEFAULT_MAX_NODES};
use crate::system::System;
use crate::verify::{verify, VerifyOptions};

pub const EXIT_YES: u8 = 0;
pub const EXIT_NO: u8 = 1;
pub const EXIT_BUDGET: u8 = 2;
pub const EXIT_USAGE: u8 = 64;
pub const EXIT_DATA: u8 = 65;
pub const EXIT_NO_INPUT: u8 = 66;
pub const EXIT_INTERNAL: u8 = 70;

#[derive(Parser, Debug)]
#[command(name = "gadgets", version, about = "Motion planning through gadgets")]
pub struct Cli {
    /// Seed for randomized commands.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Configuration budget for exhaustive searches.
    #[arg(long, global = true, default_value_t = DEFAULT_MAX_NODES)]
    max_nodes: usize,
    /// Human-readable output instead of JSON.
    #[arg(long, global = true)]
    pretty: bool,
    /// Write the main output here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Classify a gadget.
    Classify { gadget: PathBuf },
    /// Decide an objective on a system.
    Solve(SolveArgs),
    /// Compile a reduction.
    Reduce(ReduceArgs),
    #[command(subcommand)]
    Netsim(NetsimCommand),
    #[command(subcommand)]
    Catalog(CatalogCommand),
    /// Cross-check a reduction against brute force on generated instances.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ObjectiveKind {
    Reach,
    Traverse,
    Reconfig,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Algorithm {
    Oracle,
    Auto,
}

#[derive(Args, Debug)]
struct SolveArgs {
    system: PathBuf,
    #[arg(long, value_enum, default_value = "reach")]
    objective: ObjectiveKind,
    /// Reach: a component index (default: the system's target). Reconfig:
    /// comma-separated state names per instance, `_` for any.
    #[arg(long)]
    target: Option<String>,
    /// Objective JSON file; a reduction output's `objective` is used too.
    #[arg(long, conflicts_with_all = ["target"])]
    objective_file: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "oracle")]
    algorithm: Algorithm,
    #[arg(long, default_value_t = 1)]
    agents: usize,
}

#[derive(Clone, Copy, Debug, ValueEnum, PartialEq, Eq)]
enum ReductionName {
    #[value(name = "3sat")]
    ThreeSat,
    Stcon,
    HampathDir,
    HampathUndirClose,
    HampathSpiral,
    #[value(name = "reach2traversal")]
    ReachToTraversal,
    #[value(name = "reach2traversal-dag")]
    ReachToTraversalDag,
    #[value(name = "reach2reconfig")]
    ReachToReconfig,
    Shadow,
    Verified,
    Collapse,
    ExtraAgents,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Scheme {
    Closing,
    Opening,
}

#[derive(Args, Debug)]
struct ReduceArgs {
    #[arg(value_enum)]
    reduction: ReductionName,
    /// DIMACS for 3sat, edge-list text for graphs, system.json otherwise.
    #[arg(long)]
    input: PathBuf,
    /// Gadget to build with; for shadow and verified, the base gadget.
    #[arg(long)]
    gadget: Option<PathBuf>,
    /// Write the compiled system here.
    #[arg(short = 'o')]
    out: Option<PathBuf>,
    /// Shadow only: reconfiguration target states (names, `_` for any).
    #[arg(long)]
    target: Option<String>,
    #[arg(long, value_enum, default_value = "closing")]
    scheme: Scheme,
    /// Extra-agents only: comma-separated starting components.
    #[arg(long)]
    agents: Option<String>,
}

#[derive(Subcommand, Debug)]
enum NetsimCommand {
    /// Interface LTS of a gadget network.
    Interface {
        network: PathBuf,
        #[arg(long)]
        cap: Option<usize>,
        #[arg(long, default_value_t = 1)]
        probes: usize,
    },
    /// Interface LTS of a lone gadget in one state.
    Gadget {
        gadget: PathBuf,
        #[arg(long)]
        state: String,
    },
    /// Bisimulation between two LTS files.
    Bisim { a: PathBuf, b: PathBuf },
}

#[derive(Subcommand, Debug)]
enum CatalogCommand {
    /// List built-in gadgets and networks.
    List,
    /// Write a built-in gadget as gadget.json.
    Export {
        name: String,
        #[arg(short = 'o')]
        out: PathBuf,
    },
    /// Write a built-in network as network.json.
    Network {
        name: String,
        #[arg(short = 'o')]
        out: PathBuf,
    },
}

#[derive(Args, Debug)]
struct VerifyArgs {
    reduction: String,
    #[arg(long, default_value_t = 3)]
    size: usize,
    #[arg(long)]
    clauses: Option<usize>,
    #[arg(long, default_value_t = 100)]
    samples: usize,
    #[arg(long)]
    exhaustive: bool,
    #[arg(long)]
    gadget: Option<PathBuf>,
    #[arg(long)]
    threads: Option<usize>,
}

const NETWORKS: [&str; 3] = ["multi-agent-1-toggle", "multi-agent-locking-2-toggle", "plain-locking-2-toggle"];

/// What a command produced: the JSON document, an optional table, and the
/// exit code.
struct Output {
    json: Value,
    table: Option<String>,
    code: u8,
}

impl Output {
    fn ok(json: Value) -> Self {
        Self { json, table: None, code: EXIT_YES }
    }
}

fn exit_for(e: &Error) -> u8 {
    match e {
        Error::Io(_) => EXIT_NO_INPUT,
        Error::BudgetExceeded(_) => EXIT_BUDGET,
        Error::UnknownReduction(_) | Error::UnknownGadget(_) => EXIT_USAGE,
        _ => EXIT_DATA,
    }
}

fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn read_json(path: &Path) -> Result<Value> {
    Ok(serde_json::from_str(&read_text(path)?)?)
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    let text = if text.ends_with('\n') { text.to_string() } else { format!("{text}\n") };
    std::fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn load_gadget(path: &Path) -> Result<Gadget> {
    let text = path.to_string_lossy();
    if let Some(key) = text.strip_prefix("catalog:") {
        return Ok(catalog::get(key)?.gadget);
    }
    if !path.exists() {
        return Err(Error::Io(format!("{}: no such file", path.display())));
    }
    read_gadget(path)
}

fn load_system(path: &Path) -> Result<System> {
    if !path.exists() {
        return Err(Error::Io(format!("{}: no such file", path.display())));
    }
    read_system(path)
}

/// `A,_,B` to per-instance state indices.
fn parse_states(system: &System, spec: &str) -> Result<Vec<Option<usize>>> {
    let names: Vec<&str> = spec.split(',').map(str::trim).collect();
    if names.len() != system.instance_count() {
        return Err(Error::InvalidTarget(format!(
            "{} states given for {} instances",
            names.len(),
            system.instance_count()
        )));
    }
    names
        .iter()
        .enumerate()
        .map(|(i, &n)| match n {
            "_" | "*" => Ok(None),
            n => system.gadget_of(i).state_index(n).map(Some).ok_or_else(|| Error::UnknownId(n.to_string())),
        })
        .collect()
}

fn parse_list(spec: &str) -> Result<Vec<usize>> {
    spec.split(',')
        .map(|s| s.trim().parse().map_err(|_| Error::InvalidInput(format!("not an index: {s}"))))
        .collect()
}

fn objective_for(system: &System, args: &SolveArgs) -> Result<Objective> {
    if let Some(p) = &args.objective_file {
        let mut v = read_json(p)?;
        if let Some(o) = v.get_mut("objective") {
            v = o.take();
        }
        return Ok(serde_json::from_value(v)?);
    }
    Ok(match args.objective {
        ObjectiveKind::Reach => match &args.target {
            Some(t) => Objective::reach(t.parse().map_err(|_| Error::InvalidTarget(format!("not a component: {t}")))?),
            None => Objective::Reachability { target: None },
        },
        ObjectiveKind::Traverse => Objective::UniversalTraversal,
        ObjectiveKind::Reconfig => {
            let t = args.target.as_deref().ok_or_else(|| Error::InvalidTarget("reconfig needs --target".into()))?;
            Objective::Reconfiguration { states: parse_states(system, t)?, agents: None }
        }
    })
}

fn decision_code(d: Decision) -> u8 {
    match d {
        Decision::Yes => EXIT_YES,
        Decision::No => EXIT_NO,
        Decision::BudgetExceeded => EXIT_BUDGET,
    }
}

fn cmd_solve(args: &SolveArgs, max_nodes: usize) -> Result<Output> {
    let system = load_system(&args.system)?;
    let objective = objective_for(&system, args)?;
    let (algorithm, result): (&str, SolveResult) = match args.algorithm {
        Algorithm::Oracle => ("oracle", oracle_solve(&system, &objective, args.agents, max_nodes)?),
        Algorithm::Auto => solve_auto(&system, &objective, args.agents, max_nodes)?,
    };
    let mut json = serde_json::to_value(&result)?;
    json["algorithm"] = algorithm.into();
    json["objective"] = serde_json::to_value(&objective)?;
    let moves = result.witness.as_ref().map_or(0, |w| w.moves.len());
    let table = format!(
        "decision   {:?}\nalgorithm  {algorithm}\nmoves      {moves}\nexpanded   {}\n",
        result.decision, result.stats.nodes_expanded
    );
    Ok(Output { json, table: Some(table), code: decision_code(result.decision) })
}

fn cmd_classify(path: &Path) -> Result<Output> {
    let report = classify(&load_gadget(path)?);
    let mut table = format!("gadget {}\n", report.gadget);
    for (k, p) in &report.predicates {
        table.push_str(&format!("  {k:<28} {}\n", p.value));
    }
    for (k, l) in &report.labels {
        table.push_str(&format!("  {k:<28} {} ({})\n", l.label, l.rule));
    }
    Ok(Output { json: serde_json::to_value(&report)?, table: Some(table), code: EXIT_YES })
}

fn cmd_reduce(args: &ReduceArgs) -> Result<Output> {
    use ReductionName::*;
    let gadget = args.gadget.as_deref().map(load_gadget).transpose()?;
    let pick = |default: Gadget| gadget.clone().unwrap_or(default);
    let one_state = |d, u| one_state_gadget(d, u).expect("nonempty");
    let input = &args.input;
    let out = match args.reduction {
        ThreeSat => reduce_3sat_to_traversal(&CnfFormula::parse_dimacs(&read_text(input)?)?, &pick(one_state(1, 2)))?,
        Stcon => reduce_stcon_to_traversal(&Digraph::parse(&read_text(input)?)?, &pick(one_state(1, 0)))?,
        HampathDir => reduce_hampath_directed(&Digraph::parse(&read_text(input)?)?, &pick(catalog::visiting_harder()))?,
        HampathUndirClose => {
            reduce_hampath_undir_close(&Digraph::parse(&read_text(input)?)?, &pick(catalog::labeled_ttsu()))?
        }
        HampathSpiral => {
            reduce_hampath_spiral(&Graph::parse(&read_text(input)?)?, &pick(catalog::paired_undirected_single_use()))?
        }
        // These take the system's own gadget unless told otherwise.
        ReachToTraversal => {
            let system = load_system(input)?;
            let g = pick(system.gadgets().first().cloned().unwrap_or_else(catalog::locking_2_toggle));
            reduce_reach_to_traversal_reversible_interacting(&system, &g)?
        }
        ReachToTraversalDag => {
            let system = load_system(input)?;
            let g = pick(system.gadgets().first().cloned().unwrap_or_else(catalog::distant_opening));
            reduce_reach_to_traversal_distant_opening(&system, &g)?
        }
        ReachToReconfig => reduce_reach_to_reconfig_reversible(&load_system(input)?)?,
        Collapse => collapse_system(&load_system(input)?)?,
        Shadow => {
            let system = load_system(input)?;
            let objective = match &args.target {
                Some(t) => Objective::Reconfiguration { states: parse_states(&system, t)?, agents: None },
                None => Objective::Reconfiguration { states: system.initial_states().into_iter().map(Some).collect(), agents: None },
            };
            apply_shadow_reduction(&system, &objective, &full_shadow(&pick(catalog::two_toggle())))?
        }
        Verified => {
            let scheme = match args.scheme {
                Scheme::Closing => VerificationScheme::ClosingPair,
                Scheme::Opening => VerificationScheme::OpeningPairs,
            };
            let v = verified_gadget(&full_shadow(&pick(catalog::two_toggle())), scheme)?;
            apply_verified_reduction(&load_system(input)?, &v)?
        }
        ExtraAgents => {
            let system = load_system(input)?;
            let agents = parse_list(args.agents.as_deref().ok_or_else(|| Error::InvalidInput("--agents is required".into()))?)?;
            let t = system.target().ok_or_else(|| Error::InvalidTarget("system has no target".into()))?;
            simulate_extra_agents(&system, &agents, &Objective::reach(t))?
        }
    };
    out.validate()?;
    if let Some(p) = &args.out {
        write_file(p, &system_to_json(&out.system))?;
    }
    let table = format!(
        "instances   {}\ncomponents  {}\nobjective   {}\nequivalence {}\n",
        out.system.instance_count(),
        out.system.component_count(),
        serde_json::to_string(&out.objective)?,
        out.expected_equivalence
    );
    Ok(Output { json: out.to_value(), table: Some(table), code: EXIT_YES })
}

fn lts_table(lts: &InterfaceLts) -> String {
    let mut t = format!("states {}  initial {}\n", lts.states.len(), lts.initial);
    for tr in &lts.transitions {
        t.push_str(&format!("  {} --({},{})--> {}\n", tr.from, tr.enter, tr.exit, tr.to));
    }
    t
}

fn load_lts(path: &Path) -> Result<InterfaceLts> {
    Ok(serde_json::from_value(read_json(path)?)?)
}

fn cmd_netsim(cmd: &NetsimCommand, max_nodes: usize) -> Result<Output> {
    match cmd {
        NetsimCommand::Interface { network, cap, probes } => {
            if !network.exists() {
                return Err(Error::Io(format!("{}: no such file", network.display())));
            }
            let mut net = read_network(network)?;
            if cap.is_some() {
                net.cap = *cap;
            }
            let lts = interface_lts(&net, *probes, max_nodes)?;
            Ok(Output { json: serde_json::to_value(&lts)?, table: Some(lts_table(&lts)), code: EXIT_YES })
        }
        NetsimCommand::Gadget { gadget, state } => {
            let g = load_gadget(gadget)?;
            let s = g.state_index(state).ok_or_else(|| Error::UnknownId(state.clone()))?;
            let lts = gadget_lts(&g, s);
            Ok(Output { json: serde_json::to_value(&lts)?, table: Some(lts_table(&lts)), code: EXIT_YES })
        }
        NetsimCommand::Bisim { a, b } => {
            let report = check_bisimulation(&load_lts(a)?, &load_lts(b)?);
            let table = match (&report.trace, &report.reason) {
                (Some(t), Some(r)) => format!("not bisimilar\ntrace  {t:?}\nreason {r}\n"),
                _ => format!("bisimilar ({} related pairs)\n", report.relation.len()),
            };
            let code = if report.bisimilar { EXIT_YES } else { EXIT_NO };
            Ok(Output { json: serde_json::to_value(&report)?, table: Some(table), code })
        }
    }
}

fn network(name: &str) -> Result<GadgetNetwork> {
    match name {
        "multi-agent-1-toggle" => Ok(multi_agent_one_toggle()),
        "multi-agent-locking-2-toggle" => Ok(multi_agent_locking_2_toggle(ToggleKind::MultiAgent, 0)),
        "plain-locking-2-toggle" => Ok(multi_agent_locking_2_toggle(ToggleKind::Plain, 0)),
        _ => Err(Error::UnknownGadget(name.to_string())),
    }
}

fn cmd_catalog(cmd: &CatalogCommand) -> Result<Output> {
    match cmd {
        CatalogCommand::List => {
            let entries: Vec<Value> = catalog_list()
                .iter()
                .map(|e| {
                    json!({
                        "key": e.key,
                        "name": e.gadget.name(),
                        "states": e.gadget.state_count(),
                        "locations": e.gadget.location_count(),
                        "initial": e.gadget.states()[e.initial],
                    })
                })
                .collect();
            let mut table = String::new();
            for e in &entries {
                table.push_str(&format!("{:<34} {:>3} states {:>2} locations\n", e["key"].as_str().unwrap_or(""), e["states"], e["locations"]));
            }
            for n in NETWORKS {
                table.push_str(&format!("{n:<34} network\n"));
            }
            Ok(Output { json: json!({ "gadgets": entries, "networks": NETWORKS }), table: Some(table), code: EXIT_YES })
        }
        CatalogCommand::Export { name, out } => {
            let e = catalog::get(name)?;
            write_file(out, &gadget_to_json(&e.gadget))?;
            Ok(Output::ok(json!({ "key": e.key, "path": out, "states": e.gadget.state_count() })))
        }
        CatalogCommand::Network { name, out } => {
            let n = network(name)?;
            write_file(out, &network_to_json(&n))?;
            Ok(Output::ok(json!({ "key": name, "path": out, "boundary": n.boundary, "helpers": n.helpers })))
        }
    }
}

fn cmd_verify(args: &VerifyArgs, seed: u64, max_nodes: usize) -> Result<Output> {
    let mut opts = VerifyOptions {
        size: args.size,
        clauses: args.clauses,
        samples: args.samples,
        exhaustive: args.exhaustive,
        seed,
        max_nodes,
        gadget: args.gadget.as_deref().map(load_gadget).transpose()?,
        ..Default::default()
    };
    if let Some(t) = args.threads {
        opts.threads = t;
    }
    let report = verify(&args.reduction, &opts)?;
    let table = format!(
        "{}: tried {}, agree {} ({} yes), disagree {}, budget {}\n",
        report.reduction,
        report.tried,
        report.agreements,
        report.yes_agreements,
        report.disagreements.len(),
        report.exhaustions
    );
    let code = if report.disagreements.is_empty() { EXIT_YES } else { EXIT_NO };
    Ok(Output { json: serde_json::to_value(&report)?, table: Some(table), code })
}

fn dispatch(cli: &Cli) -> Result<Output> {
    match &cli.command {
        Command::Classify { gadget } => cmd_classify(gadget),
        Command::Solve(a) => cmd_solve(a, cli.max_nodes),
        Command::Reduce(a) => cmd_reduce(a),
        Command::Netsim(c) => cmd_netsim(c, cli.max_nodes),
        Command::Catalog(c) => cmd_catalog(c),
        Command::Verify(a) => cmd_verify(a, cli.seed, cli.max_nodes),
    }
}

/// Runs the CLI on `args` (program name first) and returns the exit code.
pub fn run<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_YES };
        }
    };
    let out = match dispatch(&cli) {
        Ok(o) => o,
        Err(e) => {
            let code = exit_for(&e);
            if code == EXIT_BUDGET {
                let r = json!({ "decision": "budgetExceeded", "error": e.to_string() });
                println!("{r}");
            } else {
                eprintln!("error: {e}");
            }
            return code;
        }
    };
    let text = match (&out.table, cli.pretty) {
        (Some(t), true) => t.clone(),
        _ if cli.pretty => serde_json::to_string_pretty(&out.json).expect("json") + "\n",
        _ => out.json.to_string() + "\n",
    };
    match &cli.output {
        Some(p) => {
            if let Err(e) = write_file(p, &text) {
                eprintln!("error: {e}");
                return EXIT_NO_INPUT;
            }
        }
        None => print!("{text}"),
    }
    out.code
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::one_toggle;
    use crate::netsim::MULTI_AGENT_TOGGLE_STATE;

    #[test]
    fn usage_errors() {
        assert_eq!(run(["gadgets"]), EXIT_USAGE);
        assert_eq!(run(["gadgets", "solve"]), EXIT_USAGE);
        assert_eq!(run(["gadgets", "reduce", "4sat", "--input", "x"]), EXIT_USAGE);
        assert_eq!(run(["gadgets", "verify", "4sat"]), EXIT_USAGE);
        assert_eq!(run(["gadgets", "catalog", "network", "nope", "-o", "/dev/null"]), EXIT_USAGE);
    }

    #[test]
    fn missing_file() {
        assert_eq!(run(["gadgets", "classify", "/nonexistent/g.json"]), EXIT_NO_INPUT);
        assert_eq!(run(["gadgets", "solve", "/nonexistent/s.json"]), EXIT_NO_INPUT);
    }

    #[test]
    fn networks_are_listed() {
        for n in NETWORKS {
            network(n).unwrap();
        }
        assert_eq!(multi_agent_one_toggle().system.instances()[0].initial, MULTI_AGENT_TOGGLE_STATE);
        assert_eq!(one_toggle().state_count(), 2);
    }
}
