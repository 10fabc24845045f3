//! Multi-agent search, and networks of gadgets viewed from their boundary.
//!
//! A network's interface is a labeled transition system over its internal
//! configurations (gadget states plus helper agents). A label `(a, b)` means
//! a probe agent dropped on boundary `a` can, with any help from the other
//! agents, leave from boundary `b` while every helper that started on a
//! boundary component is back on it. Helpers never leave. Agents are
//! indistinguishable tokens; the probe is only a marked position among them.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::catalog::{one_toggle, rdni};
use crate::error::{Error, Result};
use crate::gadget::Gadget;
pub use crate::io::GadgetNetwork;
use crate::reduce::{Place, ReductionOutput};
use crate::solve::{oracle_solve_from, Objective, SolveResult};
use crate::system::{successors, Configuration, Move, MovePath, Node, System, SystemBuilder};

/// Breadth-first search with agents at the given components instead of all
/// at the start.
pub fn multi_agent_oracle(system: &System, objective: &Objective, agents: &[usize], max_nodes: usize) -> Result<SolveResult> {
    let init = Configuration::new(system.initial_states(), agents.to_vec());
    oracle_solve_from(system, objective, init, max_nodes)
}

/// Enter and exit boundary indices.
pub type Label = (usize, usize);

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LtsTransition {
    pub from: usize,
    pub enter: usize,
    pub exit: usize,
    pub to: usize,
    /// Moves from the representative of `from` with the probes added at
    /// `enter`, ending in a configuration that, with the probes removed at
    /// `exit`, belongs to `to`.
    pub witness: MovePath,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InterfaceLts {
    pub boundary: Vec<usize>,
    pub probes: usize,
    /// Members of each class; the first is the representative.
    pub states: Vec<Vec<Configuration>>,
    pub transitions: Vec<LtsTransition>,
    pub initial: usize,
}

impl InterfaceLts {
    pub fn labels(&self, state: usize) -> BTreeSet<Label> {
        self.transitions.iter().filter(|t| t.from == state).map(|t| (t.enter, t.exit)).collect()
    }

    fn edges(&self) -> Vec<(usize, Label, usize)> {
        self.transitions.iter().map(|t| (t.from, (t.enter, t.exit), t.to)).collect()
    }

    pub fn class_of(&self, config: &Configuration) -> Option<usize> {
        self.states.iter().position(|m| m.contains(config))
    }
}

fn add_agents(config: &Configuration, at: usize, k: usize) -> Configuration {
    let mut agents = config.agents.clone();
    agents.extend(std::iter::repeat_n(at, k));
    Configuration::new(config.states.clone(), agents)
}

fn remove_agents(config: &Configuration, at: usize, k: usize) -> Option<Configuration> {
    if config.agents.iter().filter(|&&c| c == at).count() < k {
        return None;
    }
    let mut agents = config.agents.clone();
    for _ in 0..k {
        let i = agents.iter().position(|&c| c == at).expect("counted");
        agents.remove(i);
    }
    Some(Configuration::new(config.states.clone(), agents))
}

/// Whether every gadget has at most `cap` agents on its connections.
struct Cap {
    cap: Option<usize>,
    comps: Vec<Vec<usize>>,
}

impl Cap {
    fn new(system: &System, cap: Option<usize>) -> Self {
        Self { cap, comps: (0..system.instance_count()).map(|i| system.components_of_instance(i)).collect() }
    }

    fn allows(&self, c: &Configuration) -> bool {
        let Some(cap) = self.cap else { return true };
        self.comps.iter().all(|cs| c.agents.iter().filter(|a| cs.contains(a)).count() <= cap)
    }
}

fn path_to(parents: &[(usize, Option<Move>)], mut v: usize) -> MovePath {
    let mut moves = Vec::new();
    while let (p, Some(mv)) = parents[v] {
        moves.push(mv);
        v = p;
    }
    moves.reverse();
    MovePath { moves }
}

/// Raw interface: one state per internal configuration.
struct RawLts {
    configs: Vec<Configuration>,
    edges: Vec<(usize, Label, usize, MovePath)>,
}

/// Search node inside one probe round: all agents as a multiset, plus the
/// sorted positions of the probes among them.
type Marked = (Configuration, Vec<usize>);

/// Successors of a marked configuration. A move out of a component may be
/// made by a probe or by a helper there, whichever exist.
fn marked_successors(sys: &System, (config, probes): &Marked) -> Vec<(Move, Marked)> {
    let mut out = Vec::new();
    for (mv, next) in successors(sys, config) {
        let from = config.agents[mv.agent];
        let t = sys.gadget_of(mv.instance).transition(mv.transition);
        let to = sys.component_of(mv.instance, t.to_loc);
        let here = config.agents.iter().filter(|&&c| c == from).count();
        let marked = probes.iter().filter(|&&c| c == from).count();
        if marked > 0 {
            let mut p = probes.clone();
            let i = p.iter().position(|&c| c == from).expect("counted");
            p[i] = to;
            p.sort_unstable();
            out.push((mv, (next.clone(), p)));
        }
        if here > marked {
            out.push((mv, (next, probes.clone())));
        }
    }
    out
}

fn explore(net: &GadgetNetwork, probes: usize, max_nodes: usize) -> Result<RawLts> {
    let sys = &net.system;
    let cap = Cap::new(sys, net.cap);
    let init = Configuration::new(sys.initial_states(), net.helpers.clone());
    init.validate(sys)?;
    if net.boundary.iter().any(|&c| c >= sys.component_count()) {
        return Err(Error::InvalidSystem("boundary component does not exist".into()));
    }
    // Helpers placed on a boundary component must all be back there when the
    // probe leaves.
    let homes: Vec<(usize, usize)> =
        net.boundary.iter().map(|&c| (c, net.helpers.iter().filter(|&&h| h == c).count())).collect();
    let mut index: HashMap<Configuration, usize> = HashMap::from([(init.clone(), 0)]);
    let mut configs = vec![init];
    let mut edges = Vec::new();
    let mut spent = 0usize;
    let mut u = 0;
    while u < configs.len() {
        for (a, &ca) in net.boundary.iter().enumerate() {
            let root = (add_agents(&configs[u], ca, probes), vec![ca; probes]);
            if !cap.allows(&root.0) {
                continue;
            }
            let mut seen: HashMap<Marked, usize> = HashMap::from([(root.clone(), 0)]);
            let mut order = vec![root];
            let mut parents = vec![(0usize, None)];
            let mut queue = VecDeque::from([0usize]);
            while let Some(x) = queue.pop_front() {
                for (mv, next) in marked_successors(sys, &order[x]) {
                    if !cap.allows(&next.0) || seen.contains_key(&next) {
                        continue;
                    }
                    spent += 1;
                    if spent > max_nodes {
                        return Err(Error::BudgetExceeded(max_nodes));
                    }
                    seen.insert(next.clone(), order.len());
                    parents.push((x, Some(mv)));
                    queue.push_back(order.len());
                    order.push(next);
                }
            }
            let mut recorded = BTreeSet::new();
            for (x, (conf, marks)) in order.iter().enumerate() {
                for (b, &cb) in net.boundary.iter().enumerate() {
                    if marks.iter().any(|&c| c != cb) {
                        continue;
                    }
                    let out = remove_agents(conf, cb, probes).expect("probes are agents");
                    if !homes.iter().all(|&(c, k)| out.agents.iter().filter(|&&x| x == c).count() >= k) {
                        continue;
                    }
                    let to = match index.get(&out) {
                        Some(&i) => i,
                        None => {
                            index.insert(out.clone(), configs.len());
                            configs.push(out);
                            configs.len() - 1
                        }
                    };
                    if recorded.insert((b, to)) {
                        edges.push((u, (a, b), to, path_to(&parents, x)));
                    }
                }
            }
        }
        u += 1;
    }
    Ok(RawLts { configs, edges })
}

/// Coarsest partition compatible with `initial` that is stable under the
/// labeled edges. Blocks are numbered by first member.
fn refine(n: usize, edges: &[(usize, Label, usize)], initial: &[usize]) -> Vec<usize> {
    let mut out: Vec<Vec<(Label, usize)>> = vec![Vec::new(); n];
    for &(u, l, v) in edges {
        out[u].push((l, v));
    }
    let mut block = initial.to_vec();
    let mut count = usize::MAX;
    loop {
        let mut ids: HashMap<(usize, Vec<(Label, usize)>), usize> = HashMap::new();
        let next: Vec<usize> = (0..n)
            .map(|s| {
                let mut sig: Vec<(Label, usize)> = out[s].iter().map(|&(l, v)| (l, block[v])).collect();
                sig.sort_unstable();
                sig.dedup();
                let fresh = ids.len();
                *ids.entry((block[s], sig)).or_insert(fresh)
            })
            .collect();
        let stable = ids.len() == count;
        count = ids.len();
        block = next;
        if stable {
            return block;
        }
    }
}

/// Explores the network's interface and quotients it by bisimulation.
pub fn interface_lts(net: &GadgetNetwork, probes: usize, max_nodes: usize) -> Result<InterfaceLts> {
    if probes == 0 {
        return Err(Error::InvalidInput("at least one probe agent is needed".into()));
    }
    let raw = explore(net, probes, max_nodes)?;
    let n = raw.configs.len();
    let plain: Vec<_> = raw.edges.iter().map(|(u, l, v, _)| (*u, *l, *v)).collect();
    let block = refine(n, &plain, &vec![0; n]);
    let classes = block.iter().max().map_or(0, |m| m + 1);
    let mut states = vec![Vec::new(); classes];
    let mut rep = vec![usize::MAX; classes];
    for (s, &b) in block.iter().enumerate() {
        if rep[b] == usize::MAX {
            rep[b] = s;
        }
        states[b].push(raw.configs[s].clone());
    }
    let transitions = raw
        .edges
        .into_iter()
        .filter(|(u, ..)| rep[block[*u]] == *u)
        .map(|(u, (enter, exit), v, witness)| LtsTransition { from: block[u], enter, exit, to: block[v], witness })
        .collect();
    Ok(InterfaceLts { boundary: net.boundary.clone(), probes, states, transitions, initial: block[0] })
}

/// A single gadget exposed on all its locations.
pub fn gadget_network(g: &Gadget, state: usize) -> GadgetNetwork {
    gadget_network_on(g, state, &(0..g.location_count()).collect::<Vec<_>>())
}

/// A single gadget exposed on the given locations; the rest stay private.
pub fn gadget_network_on(g: &Gadget, state: usize, locations: &[usize]) -> GadgetNetwork {
    let mut b = SystemBuilder::new();
    let i = b.add_instance(g, state);
    let nodes: Vec<Node> = (0..g.location_count()).map(|l| b.node_of(i, l)).collect();
    let (system, comp) = b.build().expect("single gadget");
    let boundary = locations.iter().map(|&l| SystemBuilder::component(&comp, nodes[l])).collect();
    GadgetNetwork { system, boundary, helpers: vec![], cap: None }
}

pub fn gadget_lts(g: &Gadget, state: usize) -> InterfaceLts {
    interface_lts(&gadget_network(g, state), 1, 1_000_000).expect("a lone gadget is small")
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BisimReport {
    pub bisimilar: bool,
    /// Pairs of related states, when bisimilar.
    pub relation: Vec<(usize, usize)>,
    /// Labels leading to a pair of states where one side can do the last
    /// label and the other cannot.
    pub trace: Option<Vec<Label>>,
    pub reason: Option<String>,
}

/// Partition-refinement bisimulation between the initial states.
pub fn check_bisimulation(a: &InterfaceLts, b: &InterfaceLts) -> BisimReport {
    if a.boundary.len() != b.boundary.len() {
        return BisimReport {
            bisimilar: false,
            relation: vec![],
            trace: None,
            reason: Some(format!("boundary sizes differ: {} vs {}", a.boundary.len(), b.boundary.len())),
        };
    }
    let na = a.states.len();
    let mut edges = a.edges();
    edges.extend(b.edges().into_iter().map(|(u, l, v)| (u + na, l, v + na)));
    let n = na + b.states.len();
    let block = refine(n, &edges, &vec![0; n]);
    if block[a.initial] == block[na + b.initial] {
        let mut relation = Vec::new();
        for p in 0..na {
            relation.extend((0..b.states.len()).filter(|&q| block[p] == block[na + q]).map(|q| (p, q)));
        }
        return BisimReport { bisimilar: true, relation, trace: None, reason: None };
    }
    let (trace, reason) = distinguish(a, b);
    BisimReport { bisimilar: false, relation: vec![], trace, reason: Some(reason) }
}

/// Breadth-first search over pairs reached by the same labels for one where
/// the enabled labels differ.
fn distinguish(a: &InterfaceLts, b: &InterfaceLts) -> (Option<Vec<Label>>, String) {
    let succ = |l: &InterfaceLts, s: usize, lab: Label| -> Vec<usize> {
        l.transitions.iter().filter(|t| t.from == s && (t.enter, t.exit) == lab).map(|t| t.to).collect()
    };
    let start = (a.initial, b.initial);
    let mut parent: BTreeMap<(usize, usize), Option<((usize, usize), Label)>> = BTreeMap::from([(start, None)]);
    let mut queue = VecDeque::from([start]);
    while let Some((p, q)) = queue.pop_front() {
        let (lp, lq) = (a.labels(p), b.labels(q));
        if lp != lq {
            let (extra, side) = match lp.difference(&lq).next() {
                Some(&l) => (l, "first"),
                None => (*lq.difference(&lp).next().expect("sets differ"), "second"),
            };
            let mut trace = vec![extra];
            let mut at = (p, q);
            while let Some((prev, l)) = parent[&at] {
                trace.push(l);
                at = prev;
            }
            trace.reverse();
            return (Some(trace), format!("only the {side} system can take {:?} at the end", extra));
        }
        for &l in &lp {
            for p2 in succ(a, p, l) {
                for q2 in succ(b, q, l) {
                    if let std::collections::btree_map::Entry::Vacant(e) = parent.entry((p2, q2)) {
                        e.insert(Some(((p, q), l)));
                        queue.push_back((p2, q2));
                    }
                }
            }
        }
    }
    (None, "trace equivalent but not bisimilar".into())
}

/// Gadget state in which the multi-agent 1-toggle lets one net agent move
/// from the bottom connection to the right one.
pub const MULTI_AGENT_TOGGLE_STATE: usize = 0;

/// Wires one RDNI as a multi-agent 1-toggle between `bottom` and `right`:
/// its top and left locations share a private middle connection. Returns
/// the instance. Helpers are not added.
pub fn attach_multi_agent_toggle(b: &mut SystemBuilder, state: usize, bottom: Node, right: Node) -> usize {
    let g = rdni();
    let (h1, h2, v1, v2) = (0, 1, 2, 3);
    let i = b.add_instance(&g, state);
    let mid = b.node_of(i, v1);
    b.attach(i, h1, mid);
    b.attach(i, v2, bottom);
    b.attach(i, h2, right);
    i
}

/// The multi-agent 1-toggle with one helper on each side, exposing
/// `[bottom, right]`. In its initial state it behaves like a 1-toggle
/// pointing from bottom to right.
pub fn multi_agent_one_toggle() -> GadgetNetwork {
    let mut b = SystemBuilder::new();
    let (bottom, right) = (b.node(), b.node());
    attach_multi_agent_toggle(&mut b, MULTI_AGENT_TOGGLE_STATE, bottom, right);
    let (system, comp) = b.build().expect("one gadget");
    let (cb, cr) = (SystemBuilder::component(&comp, bottom), SystemBuilder::component(&comp, right));
    GadgetNetwork { system, boundary: vec![cb, cr], helpers: vec![cb, cr], cap: Some(3) }
}

/// How the four 1-toggles around the central RDNI are realized.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum ToggleKind {
    /// Multi-agent 1-toggles, each with an external helper.
    MultiAgent,
    /// Plain 1-toggles; only the two internal helpers remain.
    Plain,
}

/// Central RDNI state of the unlocked multi-agent locking 2-toggle.
pub const UNLOCKED_STATE: usize = 0;

/// The multi-agent locking 2-toggle in its unlocked state, exposing
/// `[top, bottom, left, right]` in the order of the locking 2-toggle's
/// locations. The vertical route runs top -> toggle -> RDNI top to bottom
/// -> toggle -> bottom, the horizontal one left -> toggle -> RDNI left to
/// right -> toggle -> right. Internal helpers sit above and left of the RDNI.
pub fn multi_agent_locking_2_toggle(kind: ToggleKind, rdni_state: usize) -> GadgetNetwork {
    let mut b = SystemBuilder::new();
    let [top, bottom, left, right, top_in, bottom_in, left_in, right_in] = [(); 8].map(|_| b.node());
    let (h1, h2, v1, v2) = (0, 1, 2, 3);
    let c = b.add_instance(&rdni(), rdni_state);
    b.attach(c, v1, top_in);
    b.attach(c, v2, bottom_in);
    b.attach(c, h1, left_in);
    b.attach(c, h2, right_in);
    let toggle = one_toggle();
    for (from, to) in [(top, top_in), (bottom_in, bottom), (left, left_in), (right_in, right)] {
        match kind {
            ToggleKind::MultiAgent => {
                attach_multi_agent_toggle(&mut b, MULTI_AGENT_TOGGLE_STATE, from, to);
            }
            ToggleKind::Plain => {
                let t = b.add_instance(&toggle, 0);
                b.attach(t, 0, from);
                b.attach(t, 1, to);
            }
        }
    }
    let (system, comp) = b.build().expect("fixed wiring");
    let at = |n: Node| SystemBuilder::component(&comp, n);
    let boundary = vec![at(top), at(bottom), at(left), at(right)];
    let mut helpers = vec![at(top_in), at(left_in)];
    if kind == ToggleKind::MultiAgent {
        helpers.extend(&boundary);
    }
    GadgetNetwork { system, boundary, helpers, cap: Some(3) }
}

/// Single-agent simulation of a multi-agent instance: every connection gets
/// two 1-toggles to a new hub, pointing at the connection once per agent
/// there, and the agent starts at the hub.
///
/// Reachability keeps its target. A reconfiguration target keeps its gadget
/// states; agent targets, if given, become toggle targets (the first k
/// toggles of a connection for k agents) with the agent back at the hub.
pub fn simulate_extra_agents(system: &System, agents: &[usize], objective: &Objective) -> Result<ReductionOutput> {
    objective.validate(system)?;
    let mut counts = vec![0usize; system.component_count()];
    for &c in agents {
        *counts
            .get_mut(c)
            .ok_or_else(|| Error::InvalidSystem(format!("agent on missing component {c}")))? += 1;
    }
    if let Some((component, &count)) = counts.iter().enumerate().find(|(_, &k)| k > 2) {
        return Err(Error::TooManyAgentsPerConnection { component, count });
    }
    let mut b = SystemBuilder::new();
    let nodes: Vec<Node> = (0..system.component_count()).map(|_| b.node()).collect();
    for inst in 0..system.instance_count() {
        let g = system.gadget_of(inst);
        let i = b.add_instance(g, system.instances()[inst].initial);
        for loc in 0..g.location_count() {
            b.attach(i, loc, nodes[system.component_of(inst, loc)]);
        }
    }
    // State 0 of the toggle crosses hub -> connection.
    let toggle = one_toggle();
    let hub = b.node();
    let mut toggles = Vec::new();
    for (c, &k) in counts.iter().enumerate() {
        for j in 0..2 {
            let t = b.add_instance(&toggle, if j < k { 0 } else { 1 });
            b.attach(t, 0, hub);
            b.attach(t, 1, nodes[c]);
            toggles.push(t);
        }
    }
    b.set_start(hub);
    if let Some(t) = system.target() {
        b.set_target(nodes[t]);
    }
    let (sys, comp) = b.build()?;
    let at = |n: Node| SystemBuilder::component(&comp, n);
    let objective = match objective {
        Objective::Reachability { target } => {
            let t = target.or(system.target()).expect("validated");
            Objective::reach(at(nodes[t]))
        }
        Objective::Reconfiguration { states, agents: want } => {
            let mut states = states.clone();
            match want {
                Some(want) => {
                    let mut k = vec![0usize; system.component_count()];
                    for &c in want {
                        k[c] += 1;
                    }
                    if let Some((component, &count)) = k.iter().enumerate().find(|(_, &n)| n > 2) {
                        return Err(Error::TooManyAgentsPerConnection { component, count });
                    }
                    for &kc in &k {
                        states.extend((0..2).map(|j| Some(if j < kc { 0 } else { 1 })));
                    }
                }
                None => states.extend(std::iter::repeat_n(None, toggles.len())),
            }
            let agents = want.as_ref().map(|_| vec![at(hub)]);
            Objective::Reconfiguration { states, agents }
        }
        Objective::UniversalTraversal => {
            return Err(Error::InvalidInput("extra-agent simulation supports reachability and reconfiguration".into()))
        }
    };
    let mut out = ReductionOutput::new(sys, objective, "solvable iff the multi-agent instance is solvable");
    out.correspondence.insert("toggles".into(), Place { instances: toggles, components: vec![] });
    out.correspondence.insert("hub".into(), Place { instances: vec![], components: vec![at(hub)] });
    out.metadata.insert("reduction".into(), "simulate-extra-agents".into());
    out.metadata.insert("agents".into(), agents.len().to_string());
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{locking_2_toggle, not_true_2_tunnel, one_state_gadget};
    use crate::gadget::tunnel_decomposition;
    use crate::reduce::collapse_non_true_2_tunnel;
    use crate::solve::oracle_solve;
    use crate::system::{configuration_graph_from, replay};

    fn toggle_sides() -> (GadgetNetwork, usize, usize) {
        let net = multi_agent_one_toggle();
        let (b, r) = (net.boundary[0], net.boundary[1]);
        (net, b, r)
    }

    fn canonical(states: usize, agents: &[usize]) -> Objective {
        Objective::Reconfiguration { states: vec![None; states], agents: Some(agents.to_vec()) }
    }

    #[test]
    fn multi_agent_toggle_needs_helpers() {
        let (net, b, r) = toggle_sides();
        let sys = &net.system;
        // Helpers plus one extra agent below: one agent ends up on the right.
        let yes = multi_agent_oracle(sys, &canonical(1, &[b, r, r]), &[b, b, r], 100_000).unwrap();
        assert!(yes.is_yes());
        // Alone, an agent crosses neither way.
        for (from, to) in [(b, r), (r, b)] {
            assert!(!multi_agent_oracle(sys, &Objective::reach(to), &[from], 100_000).unwrap().is_yes());
        }
        // Helpers plus an extra agent on the pointed-to side: nothing crosses.
        let no = multi_agent_oracle(sys, &canonical(1, &[b, b, r]), &[b, r, r], 100_000).unwrap();
        assert!(!no.is_yes());
    }

    #[test]
    fn zero_agents() {
        let (net, _, _) = toggle_sides();
        let r = multi_agent_oracle(&net.system, &Objective::reconfigure(&[MULTI_AGENT_TOGGLE_STATE]), &[], 10).unwrap();
        assert!(r.is_yes());
        assert!(r.witness.unwrap().is_empty());
    }

    /// Largest number of agents on `side` over every reachable configuration.
    fn most_on(net: &GadgetNetwork, agents: &[usize], side: usize) -> usize {
        let init = Configuration::new(net.system.initial_states(), agents.to_vec());
        let graph = configuration_graph_from(&net.system, init, 1_000_000).unwrap();
        graph.nodes.iter().map(|c| c.agents.iter().filter(|&&a| a == side).count()).max().unwrap()
    }

    #[test]
    fn net_flow_facts() {
        let (net, b, r) = toggle_sides();
        // Extra agent on the pointed-to side never gets to the bottom.
        assert_eq!(most_on(&net, &[b, r, r], b), 1);
        // Extra agent below: at most one more agent reaches the right.
        assert_eq!(most_on(&net, &[b, b, r], r), 2);
        // Two agents on the right only happen in states where the right side
        // cannot take another agent from the middle.
        let init = Configuration::new(net.system.initial_states(), vec![b, b, r]);
        let graph = configuration_graph_from(&net.system, init, 1_000_000).unwrap();
        let lts = interface_lts(&net, 1, 100_000).unwrap();
        let flipped = lts.transitions.iter().find(|t| (t.enter, t.exit) == (0, 1)).unwrap().to;
        for c in graph.nodes.iter().filter(|c| c.agents == vec![b, r, r]) {
            assert_eq!(lts.class_of(&Configuration::new(c.states.clone(), vec![b, r])), Some(flipped));
        }
    }

    #[test]
    fn multi_agent_toggle_is_a_1_toggle() {
        let (net, _, _) = toggle_sides();
        let lts = interface_lts(&net, 1, 100_000).unwrap();
        let r = check_bisimulation(&lts, &gadget_lts(&one_toggle(), 0));
        assert!(r.bisimilar, "{r:?}");
        assert!(r.relation.contains(&(lts.initial, 0)));
        assert!(!check_bisimulation(&lts, &gadget_lts(&one_toggle(), 1)).bisimilar);
    }

    #[test]
    fn witnesses_replay() {
        let (net, _, _) = toggle_sides();
        let lts = interface_lts(&net, 1, 100_000).unwrap();
        for t in &lts.transitions {
            let start = add_agents(&lts.states[t.from][0], lts.boundary[t.enter], 1);
            let end = replay(&net.system, &start, &t.witness).unwrap().pop().unwrap();
            let out = remove_agents(&end, lts.boundary[t.exit], 1).unwrap();
            assert_eq!(lts.class_of(&out), Some(t.to));
        }
        assert_eq!(lts, interface_lts(&net, 1, 100_000).unwrap());
    }

    #[test]
    fn budget() {
        let (net, _, _) = toggle_sides();
        assert!(matches!(interface_lts(&net, 1, 3), Err(Error::BudgetExceeded(3))));
    }

    #[test]
    fn bisimulation_basics() {
        let t = gadget_lts(&one_toggle(), 0);
        assert!(check_bisimulation(&t, &t).bisimilar);
        let tunnel = gadget_lts(&one_state_gadget(0, 1).unwrap(), 0);
        let r = check_bisimulation(&t, &tunnel);
        assert!(!r.bisimilar);
        // Only the tunnel can be crossed backwards right away.
        assert_eq!(r.trace, Some(vec![(1, 0)]));
        assert!(r.reason.unwrap().contains("second"));
    }

    #[test]
    fn empty_network_is_complete() {
        let mut b = SystemBuilder::new();
        let n = b.node();
        let (system, comp) = b.build().unwrap();
        let c = SystemBuilder::component(&comp, n);
        let net = GadgetNetwork { system, boundary: vec![c, c], helpers: vec![], cap: None };
        let lts = interface_lts(&net, 1, 100).unwrap();
        assert_eq!(lts.states.len(), 1);
        assert_eq!(lts.labels(0), [(0, 0), (0, 1), (1, 0), (1, 1)].into_iter().collect());
    }

    #[test]
    fn collapse_matches_merged_tunnels() {
        let g = not_true_2_tunnel();
        let collapsed = collapse_non_true_2_tunnel(&g).unwrap();
        let mut b = SystemBuilder::new();
        let i = b.add_instance(&g, 0);
        let (a, z) = (b.node(), b.node());
        for &(x, y) in tunnel_decomposition(&g).unwrap().pairs() {
            b.attach(i, x, a);
            b.attach(i, y, z);
        }
        let (system, comp) = b.build().unwrap();
        let at = |n| SystemBuilder::component(&comp, n);
        let net = GadgetNetwork { system, boundary: vec![at(a), at(z)], helpers: vec![], cap: None };
        let merged = interface_lts(&net, 1, 1000).unwrap();
        assert!(check_bisimulation(&merged, &gadget_lts(&collapsed, 0)).bisimilar);
    }

    #[test]
    fn locking_network_does_not_lock() {
        // With the reconstructed RDNI table the horizontal route stays open
        // after a vertical crossing, at either scale.
        let l2t = gadget_lts(&locking_2_toggle(), 2);
        let plain = interface_lts(&multi_agent_locking_2_toggle(ToggleKind::Plain, 3), 1, 1_000_000).unwrap();
        let r = check_bisimulation(&plain, &l2t);
        assert!(!r.bisimilar);
        assert_eq!(r.trace, Some(vec![(0, 1), (2, 3)]));
        let full = multi_agent_locking_2_toggle(ToggleKind::MultiAgent, UNLOCKED_STATE);
        assert!(!check_bisimulation(&interface_lts(&full, 1, 1_000_000).unwrap(), &l2t).bisimilar);
    }

    fn two_agent_systems() -> Vec<(System, Vec<usize>)> {
        let mut out = Vec::new();
        for g in [one_toggle(), locking_2_toggle(), rdni()] {
            for state in 0..g.state_count().min(4) {
                let mut b = SystemBuilder::new();
                let i = b.add_instance(&g, state);
                let j = b.add_instance(&one_toggle(), 1);
                let n0 = b.node_of(i, 0);
                b.attach(j, 0, n0);
                let n1 = b.node_of(i, 1);
                b.attach(j, 1, n1);
                let (sys, _) = b.build().unwrap();
                let k = sys.component_count();
                for p in 0..k {
                    for q in p..k {
                        out.push((sys.clone(), vec![p, q]));
                    }
                }
            }
        }
        out
    }

    #[test]
    fn extra_agent_simulation_agrees() {
        let mut checked = 0;
        for (sys, agents) in two_agent_systems() {
            for t in 0..sys.component_count() {
                let obj = Objective::reach(t);
                let want = multi_agent_oracle(&sys, &obj, &agents, 100_000).unwrap().is_yes();
                let out = simulate_extra_agents(&sys, &agents, &obj).unwrap();
                out.validate().unwrap();
                let got = oracle_solve(&out.system, &out.objective, 1, 100_000).unwrap().is_yes();
                assert_eq!(got, want, "{agents:?} -> {t}");
                checked += 1;
            }
            let init = sys.initial_states();
            for s in 0..sys.gadget_of(0).state_count() {
                for goal in [None, Some(agents.iter().rev().map(|&a| (a + 1) % sys.component_count()).collect())] {
                    let obj = Objective::Reconfiguration {
                        states: vec![Some(s), Some(init[1])],
                        agents: goal,
                    };
                    let want = multi_agent_oracle(&sys, &obj, &agents, 100_000).unwrap().is_yes();
                    let out = simulate_extra_agents(&sys, &agents, &obj).unwrap();
                    let got = oracle_solve(&out.system, &out.objective, 1, 100_000).unwrap().is_yes();
                    assert_eq!(got, want, "{agents:?} {obj:?}");
                    checked += 1;
                }
            }
        }
        assert!(checked > 100);
    }

    #[test]
    fn too_many_agents() {
        let (net, b, _) = toggle_sides();
        let r = simulate_extra_agents(&net.system, &[b, b, b], &Objective::reach(b));
        assert_eq!(r.err(), Some(Error::TooManyAgentsPerConnection { component: b, count: 3 }));
    }
}
