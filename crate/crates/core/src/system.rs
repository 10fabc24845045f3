//! Systems of gadgets, configurations, and single-step semantics.

use std::collections::{HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gadget::{Gadget, Transition};

/// A placed copy of a gadget.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Instance {
    pub gadget: usize,
    pub initial: usize,
}

/// Gadget instances joined by a connection graph.
///
/// The connection graph is stored contracted: each component is the list of
/// `(instance, location)` pairs it joins. Components may be empty, which is how
/// free-standing start or target points are represented.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct System {
    gadgets: Vec<Gadget>,
    instances: Vec<Instance>,
    components: Vec<Vec<(usize, usize)>>,
    comp_of: Vec<Vec<usize>>,
    start: Option<usize>,
    target: Option<usize>,
}

impl System {
    pub fn new(
        gadgets: Vec<Gadget>,
        instances: Vec<Instance>,
        components: Vec<Vec<(usize, usize)>>,
        start: Option<usize>,
        target: Option<usize>,
    ) -> Result<Self> {
        let mut comp_of: Vec<Vec<Option<usize>>> = Vec::with_capacity(instances.len());
        for (i, inst) in instances.iter().enumerate() {
            let g = gadgets
                .get(inst.gadget)
                .ok_or_else(|| Error::InvalidSystem(format!("instance {i} references missing gadget {}", inst.gadget)))?;
            if inst.initial >= g.state_count() {
                return Err(Error::InvalidSystem(format!(
                    "instance {i} initial state {} out of range for {}",
                    inst.initial,
                    g.name()
                )));
            }
            comp_of.push(vec![None; g.location_count()]);
        }
        for (c, members) in components.iter().enumerate() {
            for &(i, loc) in members {
                let slot = comp_of
                    .get_mut(i)
                    .and_then(|v| v.get_mut(loc))
                    .ok_or_else(|| Error::InvalidSystem(format!("component {c} references missing location {i}:{loc}")))?;
                if slot.is_some() {
                    return Err(Error::InvalidSystem(format!("location {i}:{loc} belongs to two components")));
                }
                *slot = Some(c);
            }
        }
        let comp_of = comp_of
            .into_iter()
            .enumerate()
            .map(|(i, v)| {
                v.into_iter()
                    .enumerate()
                    .map(|(loc, c)| c.ok_or_else(|| Error::InvalidSystem(format!("location {i}:{loc} has no component"))))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        for (what, c) in [("start", start), ("target", target)] {
            if let Some(c) = c {
                if c >= components.len() {
                    return Err(Error::InvalidSystem(format!("{what} component {c} does not exist")));
                }
            }
        }
        Ok(Self { gadgets, instances, components, comp_of, start, target })
    }

    pub fn gadgets(&self) -> &[Gadget] {
        &self.gadgets
    }

    pub fn instances(&self) -> &[Instance] {
        &self.instances
    }

    pub fn instance_count(&self) -> usize {
        self.instances.len()
    }

    pub fn gadget_of(&self, instance: usize) -> &Gadget {
        &self.gadgets[self.instances[instance].gadget]
    }

    pub fn components(&self) -> &[Vec<(usize, usize)>] {
        &self.components
    }

    pub fn component_count(&self) -> usize {
        self.components.len()
    }

    /// Component holding location `loc` of `instance`.
    pub fn component_of(&self, instance: usize, loc: usize) -> usize {
        self.comp_of[instance][loc]
    }

    pub fn start(&self) -> Option<usize> {
        self.start
    }

    pub fn target(&self) -> Option<usize> {
        self.target
    }

    pub fn with_start(mut self, start: Option<usize>) -> Result<Self> {
        if matches!(start, Some(c) if c >= self.components.len()) {
            return Err(Error::InvalidSystem("start component does not exist".into()));
        }
        self.start = start;
        Ok(self)
    }

    pub fn with_target(mut self, target: Option<usize>) -> Result<Self> {
        if matches!(target, Some(c) if c >= self.components.len()) {
            return Err(Error::InvalidSystem("target component does not exist".into()));
        }
        self.target = target;
        Ok(self)
    }

    pub fn initial_states(&self) -> Vec<usize> {
        self.instances.iter().map(|i| i.initial).collect()
    }

    /// Copy of the system with different initial states.
    pub fn with_initial_states(&self, states: &[usize]) -> Result<Self> {
        if states.len() != self.instances.len() {
            return Err(Error::InvalidSystem("state vector length mismatch".into()));
        }
        let instances = self
            .instances
            .iter()
            .zip(states)
            .map(|(i, &s)| Instance { gadget: i.gadget, initial: s })
            .collect();
        Self::new(self.gadgets.clone(), instances, self.components.clone(), self.start, self.target)
    }

    /// Initial configuration with `agents` agents on the start component.
    pub fn initial_configuration(&self, agents: usize) -> Result<Configuration> {
        let positions = if agents == 0 {
            Vec::new()
        } else {
            let s = self.start.ok_or_else(|| Error::InvalidSystem("system has no start location".into()))?;
            vec![s; agents]
        };
        Ok(Configuration::new(self.initial_states(), positions))
    }

    /// `(transition index, from component, to component)` for every transition
    /// of `instance` available in `state`.
    pub fn moves_in_state(&self, instance: usize, state: usize) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        let g = self.gadget_of(instance);
        g.transitions_from(state).iter().map(move |&ti| {
            let t = g.transition(ti);
            (ti, self.comp_of[instance][t.from_loc], self.comp_of[instance][t.to_loc])
        })
    }

    /// Components touched by an instance, without repeats.
    pub fn components_of_instance(&self, instance: usize) -> Vec<usize> {
        let mut v = self.comp_of[instance].clone();
        v.sort_unstable();
        v.dedup();
        v
    }
}

/// Per-instance states plus the sorted multiset of agent components.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Configuration {
    pub states: Vec<usize>,
    pub agents: Vec<usize>,
}

impl Configuration {
    pub fn new(states: Vec<usize>, mut agents: Vec<usize>) -> Self {
        agents.sort_unstable();
        Self { states, agents }
    }

    pub fn validate(&self, system: &System) -> Result<()> {
        if self.states.len() != system.instance_count() {
            return Err(Error::InvalidSystem("state vector length mismatch".into()));
        }
        for (i, &s) in self.states.iter().enumerate() {
            if s >= system.gadget_of(i).state_count() {
                return Err(Error::InvalidSystem(format!("state {s} invalid for instance {i}")));
            }
        }
        if self.agents.iter().any(|&c| c >= system.component_count()) {
            return Err(Error::InvalidSystem("agent on a missing component".into()));
        }
        Ok(())
    }
}

/// One gadget traversal by one agent.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Move {
    /// Index into the configuration's sorted agent multiset.
    pub agent: usize,
    pub instance: usize,
    /// Index into the instance's gadget transition list.
    pub transition: usize,
}

/// Ordered sequence of traversals; free movement inside components is implicit.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MovePath {
    pub moves: Vec<Move>,
}

impl MovePath {
    pub fn len(&self) -> usize {
        self.moves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.moves.is_empty()
    }
}

/// Applies one traversal, leaving every other instance untouched.
pub fn step(system: &System, config: &Configuration, mv: &Move) -> Result<Configuration> {
    let inst = system
        .instances()
        .get(mv.instance)
        .ok_or_else(|| Error::IllegalTransition(format!("no instance {}", mv.instance)))?;
    let g = &system.gadgets()[inst.gadget];
    let t: &Transition = g
        .transitions()
        .get(mv.transition)
        .ok_or_else(|| Error::IllegalTransition(format!("instance {} has no transition {}", mv.instance, mv.transition)))?;
    let state = *config
        .states
        .get(mv.instance)
        .ok_or_else(|| Error::IllegalTransition("configuration too short".into()))?;
    if t.from_state != state {
        return Err(Error::IllegalTransition(format!(
            "instance {} is in state {}, transition {} needs {}",
            mv.instance,
            g.states()[state],
            g.describe(mv.transition),
            g.states()[t.from_state]
        )));
    }
    let here = *config
        .agents
        .get(mv.agent)
        .ok_or_else(|| Error::AgentNotAdjacent(format!("no agent {}", mv.agent)))?;
    let entrance = system.component_of(mv.instance, t.from_loc);
    if here != entrance {
        return Err(Error::AgentNotAdjacent(format!(
            "agent {} is at component {here}, entrance is component {entrance}",
            mv.agent
        )));
    }
    let mut next = config.clone();
    next.states[mv.instance] = t.to_state;
    next.agents[mv.agent] = system.component_of(mv.instance, t.to_loc);
    next.agents.sort_unstable();
    Ok(next)
}

/// Replays a path, returning every intermediate configuration (first is `start`).
pub fn replay(system: &System, start: &Configuration, path: &MovePath) -> Result<Vec<Configuration>> {
    let mut out = Vec::with_capacity(path.len() + 1);
    out.push(start.clone());
    for mv in &path.moves {
        let next = step(system, out.last().unwrap(), mv)?;
        out.push(next);
    }
    Ok(out)
}

/// All moves available in `config`, one per (distinct agent position, transition).
pub fn successors(system: &System, config: &Configuration) -> Vec<(Move, Configuration)> {
    let mut out = Vec::new();
    for inst in 0..system.instance_count() {
        for (ti, from, to) in system.moves_in_state(inst, config.states[inst]) {
            if let Some(agent) = config.agents.iter().position(|&c| c == from) {
                let mut next = config.clone();
                let g = system.gadget_of(inst);
                next.states[inst] = g.transition(ti).to_state;
                next.agents[agent] = to;
                next.agents.sort_unstable();
                out.push((Move { agent, instance: inst, transition: ti }, next));
            }
        }
    }
    out
}

/// Explicit reachable configuration graph.
#[derive(Clone, Debug, Default)]
pub struct ConfigurationGraph {
    pub nodes: Vec<Configuration>,
    pub edges: Vec<(usize, usize, Move)>,
}

impl ConfigurationGraph {
    pub fn index_of(&self, config: &Configuration) -> Option<usize> {
        self.nodes.iter().position(|c| c == config)
    }
}

/// Explores every configuration reachable from the initial one.
pub fn configuration_graph(system: &System, agents: usize, max_nodes: usize) -> Result<ConfigurationGraph> {
    let init = system.initial_configuration(agents)?;
    configuration_graph_from(system, init, max_nodes)
}

pub fn configuration_graph_from(system: &System, init: Configuration, max_nodes: usize) -> Result<ConfigurationGraph> {
    let mut graph = ConfigurationGraph::default();
    let mut index: HashMap<Configuration, usize> = HashMap::new();
    let mut queue = VecDeque::new();
    index.insert(init.clone(), 0);
    graph.nodes.push(init);
    queue.push_back(0);
    while let Some(u) = queue.pop_front() {
        let here = graph.nodes[u].clone();
        for (mv, next) in successors(system, &here) {
            let v = match index.get(&next) {
                Some(&v) => v,
                None => {
                    if graph.nodes.len() >= max_nodes {
                        return Err(Error::BudgetExceeded(max_nodes));
                    }
                    let v = graph.nodes.len();
                    index.insert(next.clone(), v);
                    graph.nodes.push(next);
                    queue.push_back(v);
                    v
                }
            };
            graph.edges.push((u, v, mv));
        }
    }
    Ok(graph)
}

/// Incremental construction of systems with named connection nodes.
///
/// Nodes are merged with union-find; every location left unattached at build
/// time receives a private component.
#[derive(Clone, Debug, Default)]
pub struct SystemBuilder {
    gadgets: Vec<Gadget>,
    instances: Vec<Instance>,
    parent: Vec<usize>,
    attach: Vec<Vec<Option<usize>>>,
    start: Option<usize>,
    target: Option<usize>,
}

/// Opaque handle for a connection node of a [`SystemBuilder`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Node(usize);

impl SystemBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Registers a gadget type, reusing an identical one if present.
    pub fn add_gadget(&mut self, g: &Gadget) -> usize {
        if let Some(i) = self.gadgets.iter().position(|x| x == g) {
            return i;
        }
        self.gadgets.push(g.clone());
        self.gadgets.len() - 1
    }

    pub fn add_instance(&mut self, g: &Gadget, initial: usize) -> usize {
        let gi = self.add_gadget(g);
        self.instances.push(Instance { gadget: gi, initial });
        self.attach.push(vec![None; g.location_count()]);
        self.instances.len() - 1
    }

    pub fn node(&mut self) -> Node {
        self.parent.push(self.parent.len());
        Node(self.parent.len() - 1)
    }

    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.parent[r] != r {
            r = self.parent[r];
        }
        let mut c = x;
        while self.parent[c] != r {
            let n = self.parent[c];
            self.parent[c] = r;
            c = n;
        }
        r
    }

    pub fn merge(&mut self, a: Node, b: Node) {
        let (ra, rb) = (self.find(a.0), self.find(b.0));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }

    /// Places location `loc` of `instance` on `node`, merging with any node it
    /// was already attached to.
    pub fn attach(&mut self, instance: usize, loc: usize, node: Node) {
        match self.attach[instance][loc] {
            Some(prev) => self.merge(Node(prev), node),
            None => self.attach[instance][loc] = Some(node.0),
        }
    }

    /// Node a location is attached to, creating one if needed.
    pub fn node_of(&mut self, instance: usize, loc: usize) -> Node {
        match self.attach[instance][loc] {
            Some(n) => Node(n),
            None => {
                let n = self.node();
                self.attach[instance][loc] = Some(n.0);
                n
            }
        }
    }

    pub fn set_start(&mut self, n: Node) {
        self.start = Some(n.0);
    }

    pub fn set_target(&mut self, n: Node) {
        self.target = Some(n.0);
    }

    pub fn instance_count(&self) -> usize {
        self.instances.len()
    }

    /// Finishes the system. The returned vector maps each node to its component.
    pub fn build(mut self) -> Result<(System, Vec<usize>)> {
        for i in 0..self.attach.len() {
            for loc in 0..self.attach[i].len() {
                if self.attach[i][loc].is_none() {
                    let n = self.node();
                    self.attach[i][loc] = Some(n.0);
                }
            }
        }
        let mut root_comp: HashMap<usize, usize> = HashMap::new();
        let mut node_comp = Vec::with_capacity(self.parent.len());
        for n in 0..self.parent.len() {
            let r = self.find(n);
            let next = root_comp.len();
            let c = *root_comp.entry(r).or_insert(next);
            node_comp.push(c);
        }
        let mut components = vec![Vec::new(); root_comp.len()];
        for (i, locs) in self.attach.iter().enumerate() {
            for (loc, n) in locs.iter().enumerate() {
                components[node_comp[n.unwrap()]].push((i, loc));
            }
        }
        let start = self.start.map(|n| node_comp[n]);
        let target = self.target.map(|n| node_comp[n]);
        let system = System::new(self.gadgets, self.instances, components, start, target)?;
        Ok((system, node_comp))
    }

    pub fn component(node_comp: &[usize], n: Node) -> usize {
        node_comp[n.0]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    fn single(g: &Gadget, initial: usize, start_loc: usize) -> System {
        let mut b = SystemBuilder::new();
        let i = b.add_instance(g, initial);
        let n = b.node_of(i, start_loc);
        b.set_start(n);
        b.build().unwrap().0
    }

    #[test]
    fn l2t_step_down_left_tunnel() {
        let g = catalog::locking_2_toggle();
        let mut b = SystemBuilder::new();
        let i = b.add_instance(&g, 2);
        let top = b.node();
        b.attach(i, 0, top);
        b.attach(i, 2, top);
        b.set_start(top);
        let (sys, _) = b.build().unwrap();
        let c0 = sys.initial_configuration(1).unwrap();
        let t = g.find_transition(&Transition::new(2, 0, 1, 0)).unwrap();
        let c1 = step(&sys, &c0, &Move { agent: 0, instance: 0, transition: t }).unwrap();
        assert_eq!(c1.states, vec![0]);
        assert_eq!(c1.agents, vec![sys.component_of(0, 1)]);
    }

    #[test]
    fn step_rejects_bad_moves() {
        let g = catalog::locking_2_toggle();
        let sys = single(&g, 2, 0);
        let c0 = sys.initial_configuration(1).unwrap();
        let up = g.find_transition(&Transition::new(0, 1, 0, 2)).unwrap();
        assert!(matches!(
            step(&sys, &c0, &Move { agent: 0, instance: 0, transition: up }),
            Err(Error::IllegalTransition(_))
        ));
        let right_down = g.find_transition(&Transition::new(2, 2, 3, 1)).unwrap();
        assert!(matches!(
            step(&sys, &c0, &Move { agent: 0, instance: 0, transition: right_down }),
            Err(Error::AgentNotAdjacent(_))
        ));
    }

    #[test]
    fn step_is_local() {
        let g = catalog::one_toggle();
        let mut b = SystemBuilder::new();
        let a = b.add_instance(&g, 0);
        let c = b.add_instance(&g, 0);
        let s = b.node();
        b.attach(a, 0, s);
        b.attach(c, 0, s);
        b.set_start(s);
        let (sys, _) = b.build().unwrap();
        let c0 = sys.initial_configuration(1).unwrap();
        let c1 = step(&sys, &c0, &Move { agent: 0, instance: 0, transition: 0 }).unwrap();
        assert_eq!(c1.states[1], c0.states[1]);
        assert_ne!(c1.states[0], c0.states[0]);
    }

    #[test]
    fn one_toggle_has_two_configurations() {
        let sys = single(&catalog::one_toggle(), 0, 0);
        let graph = configuration_graph(&sys, 1, 100).unwrap();
        assert_eq!(graph.nodes.len(), 2);
    }

    #[test]
    fn empty_system_has_one_configuration() {
        let mut b = SystemBuilder::new();
        let s = b.node();
        b.set_start(s);
        let (sys, _) = b.build().unwrap();
        let graph = configuration_graph(&sys, 1, 10).unwrap();
        assert_eq!(graph.nodes.len(), 1);
        assert!(graph.edges.is_empty());
    }

    #[test]
    fn budget_is_reported() {
        let sys = single(&catalog::one_toggle(), 0, 0);
        assert_eq!(configuration_graph(&sys, 1, 1).unwrap_err(), Error::BudgetExceeded(1));
    }

    #[test]
    fn l2t_with_joined_tops() {
        // Hand enumeration: unlocked with the agent on top, or locked with the
        // agent at the bottom of the tunnel it went down.
        let g = catalog::locking_2_toggle();
        let mut b = SystemBuilder::new();
        let i = b.add_instance(&g, 2);
        let top = b.node();
        b.attach(i, 0, top);
        b.attach(i, 2, top);
        b.set_start(top);
        let (sys, node_comp) = b.build().unwrap();
        let top = SystemBuilder::component(&node_comp, top);
        let mut expected = vec![
            Configuration::new(vec![2], vec![top]),
            Configuration::new(vec![0], vec![sys.component_of(0, 1)]),
            Configuration::new(vec![1], vec![sys.component_of(0, 3)]),
        ];
        let graph = configuration_graph(&sys, 1, 100).unwrap();
        let mut got = graph.nodes.clone();
        got.sort();
        expected.sort();
        assert_eq!(got, expected);
        assert_eq!(graph.edges.len(), 4);
    }
}
