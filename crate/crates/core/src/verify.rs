//! Cross-checks reductions: generate source instances, reduce, solve both
//! sides by brute force, and shrink any disagreement.

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::Serialize;
use serde_json::{json, Value};

use crate::catalog::{
    distant_opening, labeled_ttsu, locking_2_toggle, not_true_2_tunnel, one_state_gadget, one_toggle,
    paired_undirected_single_use, rdni, two_toggle, visiting_harder,
};
use crate::error::{Error, Result};
use crate::gadget::Gadget;
use crate::io::system_to_value;
use crate::netsim::{multi_agent_oracle, simulate_extra_agents};
use crate::reduce::*;
use crate::solve::{oracle_decide, oracle_solve, Decision, Objective};
use crate::system::{Node, System, SystemBuilder};

pub const REDUCTIONS: [&str; 12] = [
    "3sat",
    "stcon",
    "hampath-dir",
    "hampath-undir-close",
    "hampath-spiral",
    "reach2traversal",
    "reach2traversal-dag",
    "reach2reconfig",
    "shadow",
    "verified",
    "collapse",
    "extra-agents",
];

#[derive(Clone, Debug)]
pub struct VerifyOptions {
    /// Variables for 3SAT, vertices for graphs, gadgets for systems.
    pub size: usize,
    /// Clause bound for 3SAT; defaults to `size`.
    pub clauses: Option<usize>,
    pub samples: usize,
    /// Also enumerate every instance up to the size bound, where supported.
    pub exhaustive: bool,
    pub seed: u64,
    pub max_nodes: usize,
    /// Replaces the reduction's default gadget.
    pub gadget: Option<Gadget>,
    pub threads: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            size: 3,
            clauses: None,
            samples: 100,
            exhaustive: false,
            seed: 0,
            max_nodes: 2_000_000,
            gadget: None,
            threads: std::thread::available_parallelism().map_or(1, |n| n.get()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Disagreement {
    pub index: usize,
    pub source: Value,
    /// Smallest failing instance found by greedy deletion.
    pub minimized: Value,
    pub note: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct VerifyReport {
    pub reduction: String,
    pub seed: u64,
    pub tried: usize,
    pub agreements: usize,
    /// Agreements where the source instance is a yes-instance.
    pub yes_agreements: usize,
    pub disagreements: Vec<Disagreement>,
    pub exhaustions: usize,
}

#[derive(Clone, Debug)]
enum Source {
    Cnf(CnfFormula),
    Digraph(Digraph),
    Graph(Graph),
    System(System, Objective),
    Agents(System, Vec<usize>, Objective),
}

impl Source {
    fn to_value(&self) -> Value {
        match self {
            Source::Cnf(f) => json!({ "dimacs": f.to_dimacs() }),
            Source::Digraph(d) => json!({ "digraph": d.to_text() }),
            Source::Graph(g) => json!({ "graph": g.to_text() }),
            Source::System(s, o) => json!({ "system": system_to_value(s), "objective": o }),
            Source::Agents(s, a, o) => json!({ "system": system_to_value(s), "agents": a, "objective": o }),
        }
    }

    /// Every instance with one element deleted.
    fn smaller(&self) -> Vec<Source> {
        match self {
            Source::Cnf(f) => (0..f.clauses.len())
                .map(|i| {
                    let mut f = f.clone();
                    f.clauses.remove(i);
                    Source::Cnf(f)
                })
                .collect(),
            Source::Digraph(d) => (0..d.arcs.len())
                .map(|i| {
                    let mut d = d.clone();
                    d.arcs.remove(i);
                    Source::Digraph(d)
                })
                .collect(),
            Source::Graph(g) => (0..g.edges.len())
                .map(|i| {
                    let mut g = g.clone();
                    g.edges.remove(i);
                    Source::Graph(g)
                })
                .collect(),
            Source::System(s, o) => (0..s.instance_count())
                .map(|i| Source::System(without(s, i), without_entry(o, i)))
                .collect(),
            Source::Agents(s, a, o) => (0..s.instance_count())
                .map(|i| Source::Agents(without(s, i), a.clone(), without_entry(o, i)))
                .collect(),
        }
    }
}

/// The system with one instance removed; components keep their numbers.
fn without(system: &System, skip: usize) -> System {
    let mut b = SystemBuilder::new();
    let nodes: Vec<Node> = (0..system.component_count()).map(|_| b.node()).collect();
    for inst in (0..system.instance_count()).filter(|&i| i != skip) {
        let g = system.gadget_of(inst);
        let i = b.add_instance(g, system.instances()[inst].initial);
        for loc in 0..g.location_count() {
            b.attach(i, loc, nodes[system.component_of(inst, loc)]);
        }
    }
    if let Some(s) = system.start() {
        b.set_start(nodes[s]);
    }
    if let Some(t) = system.target() {
        b.set_target(nodes[t]);
    }
    b.build().expect("subsystem of a valid system").0
}

fn without_entry(o: &Objective, skip: usize) -> Objective {
    match o {
        Objective::Reconfiguration { states, agents } => {
            let mut states = states.clone();
            states.remove(skip);
            Objective::Reconfiguration { states, agents: agents.clone() }
        }
        o => o.clone(),
    }
}

enum Outcome {
    Agree(bool),
    Disagree(String),
    Exhausted,
}

fn default_gadget(name: &str) -> Gadget {
    match name {
        "3sat" => one_state_gadget(1, 2).expect("nonempty"),
        "stcon" => one_state_gadget(1, 0).expect("nonempty"),
        "hampath-dir" => visiting_harder(),
        "hampath-undir-close" => labeled_ttsu(),
        "hampath-spiral" => paired_undirected_single_use(),
        "reach2traversal" => locking_2_toggle(),
        "reach2traversal-dag" => distant_opening(),
        "collapse" => not_true_2_tunnel(),
        _ => two_toggle(),
    }
}

fn generate(name: &str, g: &Gadget, opts: &VerifyOptions) -> Vec<Source> {
    let mut rng = StdRng::seed_from_u64(opts.seed);
    let size = opts.size.max(1);
    let clauses = opts.clauses.unwrap_or(size).max(1);
    let mut out = Vec::new();
    if opts.exhaustive {
        match name {
            "3sat" => {
                for v in 1..=size {
                    for c in 1..=clauses {
                        out.extend(all_cnfs(v, c).into_iter().map(Source::Cnf));
                    }
                }
            }
            "stcon" => {
                for n in 2..=size.max(2) {
                    out.extend(all_digraphs(n).into_iter().map(Source::Digraph));
                }
            }
            _ => {}
        }
    }
    let reach = |s: System| {
        let t = s.target().expect("sampled systems have targets");
        Source::System(s, Objective::reach(t))
    };
    for _ in 0..opts.samples {
        let src = match name {
            "3sat" => Source::Cnf(random_cnf(&mut rng, size, clauses)),
            "stcon" => Source::Digraph(random_digraph(&mut rng, size)),
            "hampath-dir" | "hampath-undir-close" => Source::Digraph(random_legal_digraph(&mut rng, size.max(2))),
            "hampath-spiral" => Source::Graph(random_legal_cubic(&mut rng, size.max(2))),
            "reach2traversal" | "collapse" => reach(random_system(&mut rng, std::slice::from_ref(g), size)),
            "reach2traversal-dag" => {
                let s = random_system(&mut rng, std::slice::from_ref(g), size);
                let s = s.with_initial_states(&vec![0; s.instance_count()]).expect("state 0 exists");
                reach(s)
            }
            "reach2reconfig" => reach(random_system(&mut rng, &[one_toggle(), locking_2_toggle(), g.clone()], size)),
            "shadow" => {
                let s = random_system(&mut rng, std::slice::from_ref(g), size);
                let states = (0..s.instance_count()).map(|i| Some(rng.gen_range(0..s.gadget_of(i).state_count())));
                let o = Objective::Reconfiguration { states: states.collect(), agents: None };
                Source::System(s, o)
            }
            "verified" => reach(random_system(&mut rng, std::slice::from_ref(g), size)),
            "extra-agents" => {
                let s = random_system(&mut rng, &[one_toggle(), locking_2_toggle(), rdni()], size);
                let agents = (0..2).map(|_| rng.gen_range(0..s.component_count())).collect();
                let t = s.target().expect("sampled systems have targets");
                Source::Agents(s, agents, Objective::reach(t))
            }
            _ => unreachable!("checked by caller"),
        };
        out.push(src);
    }
    out
}

fn decision(d: Decision) -> Option<bool> {
    match d {
        Decision::Yes => Some(true),
        Decision::No => Some(false),
        Decision::BudgetExceeded => None,
    }
}

fn reduce(name: &str, g: &Gadget, src: &Source, index: usize) -> Result<ReductionOutput> {
    match (name, src) {
        ("3sat", Source::Cnf(f)) => reduce_3sat_to_traversal(f, g),
        ("stcon", Source::Digraph(d)) => reduce_stcon_to_traversal(d, g),
        ("hampath-dir", Source::Digraph(d)) => reduce_hampath_directed(d, g),
        ("hampath-undir-close", Source::Digraph(d)) => reduce_hampath_undir_close(d, g),
        ("hampath-spiral", Source::Graph(gr)) => reduce_hampath_spiral(gr, g),
        ("reach2traversal", Source::System(s, _)) => reduce_reach_to_traversal_reversible_interacting(s, g),
        ("reach2traversal-dag", Source::System(s, _)) => reduce_reach_to_traversal_distant_opening(s, g),
        ("reach2reconfig", Source::System(s, _)) => reduce_reach_to_reconfig_reversible(s),
        ("shadow", Source::System(s, o)) => apply_shadow_reduction(s, o, &full_shadow(g)),
        ("verified", Source::System(s, _)) => {
            let scheme = if index.is_multiple_of(2) { VerificationScheme::ClosingPair } else { VerificationScheme::OpeningPairs };
            apply_verified_reduction(s, &verified_gadget(&full_shadow(g), scheme)?)
        }
        ("collapse", Source::System(s, _)) => collapse_system(s),
        ("extra-agents", Source::Agents(s, a, o)) => simulate_extra_agents(s, a, o),
        _ => Err(Error::UnknownReduction(name.to_string())),
    }
}

fn check(name: &str, g: &Gadget, src: &Source, index: usize, max_nodes: usize) -> Outcome {
    let want = match src {
        Source::Cnf(f) => Some(f.is_satisfiable()),
        Source::Digraph(d) if name == "stcon" => Some(d.st_connected()),
        Source::Digraph(d) => Some(d.has_hamiltonian_path()),
        Source::Graph(gr) => Some(gr.has_hamiltonian_path()),
        Source::System(s, o) => match oracle_solve(s, o, 1, max_nodes) {
            Ok(r) => decision(r.decision),
            Err(e) => return Outcome::Disagree(format!("source oracle failed: {e}")),
        },
        Source::Agents(s, a, o) => match multi_agent_oracle(s, o, a, max_nodes) {
            Ok(r) => decision(r.decision),
            Err(e) => return Outcome::Disagree(format!("source oracle failed: {e}")),
        },
    };
    let Some(want) = want else { return Outcome::Exhausted };
    let out = match reduce(name, g, src, index) {
        Ok(out) => out,
        Err(e) => return Outcome::Disagree(format!("reduction failed: {e}")),
    };
    if let Err(e) = out.validate() {
        return Outcome::Disagree(format!("invalid output: {e}"));
    }
    match oracle_decide(&out.system, &out.objective, 1, max_nodes).map(|r| decision(r.decision)) {
        Ok(Some(got)) if got == want => Outcome::Agree(want),
        Ok(Some(got)) => Outcome::Disagree(format!("source says {want}, reduced instance says {got}")),
        Ok(None) => Outcome::Exhausted,
        Err(e) => Outcome::Disagree(format!("reduced oracle failed: {e}")),
    }
}

fn shrink(name: &str, g: &Gadget, src: &Source, index: usize, max_nodes: usize) -> Source {
    let mut cur = src.clone();
    'outer: loop {
        for cand in cur.smaller() {
            if matches!(check(name, g, &cand, index, max_nodes), Outcome::Disagree(_)) {
                cur = cand;
                continue 'outer;
            }
        }
        return cur;
    }
}

/// Runs the named reduction on generated instances and compares brute-force
/// answers on both sides. Checks fan out over threads; results are merged
/// by instance index.
pub fn verify(name: &str, opts: &VerifyOptions) -> Result<VerifyReport> {
    if !REDUCTIONS.contains(&name) {
        return Err(Error::UnknownReduction(name.to_string()));
    }
    let g = opts.gadget.clone().unwrap_or_else(|| default_gadget(name));
    let sources = generate(name, &g, opts);
    let threads = opts.threads.clamp(1, sources.len().max(1));
    let mut outcomes: Vec<Option<Outcome>> = (0..sources.len()).map(|_| None).collect();
    std::thread::scope(|scope| {
        let handles: Vec<_> = (0..threads)
            .map(|w| {
                let (g, sources) = (&g, &sources);
                scope.spawn(move || {
                    (w..sources.len())
                        .step_by(threads)
                        .map(|i| (i, check(name, g, &sources[i], i, opts.max_nodes)))
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        for h in handles {
            for (i, o) in h.join().expect("worker panicked") {
                outcomes[i] = Some(o);
            }
        }
    });
    let mut report = VerifyReport {
        reduction: name.to_string(),
        seed: opts.seed,
        tried: sources.len(),
        agreements: 0,
        yes_agreements: 0,
        disagreements: Vec::new(),
        exhaustions: 0,
    };
    for (i, o) in outcomes.into_iter().enumerate() {
        match o.expect("every index checked") {
            Outcome::Agree(yes) => {
                report.agreements += 1;
                report.yes_agreements += usize::from(yes);
            }
            Outcome::Exhausted => report.exhaustions += 1,
            Outcome::Disagree(note) => report.disagreements.push(Disagreement {
                index: i,
                source: sources[i].to_value(),
                minimized: shrink(name, &g, &sources[i], i, opts.max_nodes).to_value(),
                note,
            }),
        }
    }
    Ok(report)
}
