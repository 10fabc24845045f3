//! Exhaustive configuration-space search.

use std::collections::{HashMap, VecDeque};
use std::time::Instant;

use super::{Objective, SolveResult, SolveStats};
use crate::error::Result;
use crate::system::{Configuration, Move, MovePath, System};

pub const DEFAULT_MAX_NODES: usize = 10_000_000;

/// Packs state vectors and agent multisets into words. Each instance gets
/// `ceil(log2(state count))` bits, little-endian; agents follow at a fixed
/// width.
struct Packer {
    slots: Vec<(usize, u32, u32)>,
    agent_bits: u32,
    agent_start: (usize, u32),
    words: usize,
}

fn bits_for(n: usize) -> u32 {
    if n <= 1 {
        0
    } else {
        usize::BITS - (n - 1).leading_zeros()
    }
}

impl Packer {
    fn new(system: &System, agents: usize) -> Self {
        let mut slots = Vec::with_capacity(system.instance_count());
        let (mut word, mut bit) = (0usize, 0u32);
        let place = |w: u32, word: &mut usize, bit: &mut u32| {
            if *bit + w > 64 {
                *word += 1;
                *bit = 0;
            }
            let at = (*word, *bit);
            *bit += w;
            at
        };
        for i in 0..system.instance_count() {
            let w = bits_for(system.gadget_of(i).state_count());
            let (wd, b) = place(w, &mut word, &mut bit);
            slots.push((wd, b, w));
        }
        let agent_bits = bits_for(system.component_count()).max(1);
        let agent_start = place(0, &mut word, &mut bit);
        for _ in 0..agents {
            place(agent_bits, &mut word, &mut bit);
        }
        Self { slots, agent_bits, agent_start, words: word + 1 }
    }

    fn pack(&self, c: &Configuration) -> Box<[u64]> {
        let mut out = vec![0u64; self.words];
        for (&(w, b, width), &s) in self.slots.iter().zip(&c.states) {
            if width > 0 {
                out[w] |= (s as u64) << b;
            }
        }
        let (mut w, mut b) = self.agent_start;
        for &a in &c.agents {
            if b + self.agent_bits > 64 {
                w += 1;
                b = 0;
            }
            out[w] |= (a as u64) << b;
            b += self.agent_bits;
        }
        out.into_boxed_slice()
    }

    fn unpack(&self, key: &[u64], agents: usize) -> Configuration {
        let states = self
            .slots
            .iter()
            .map(|&(w, b, width)| if width == 0 { 0 } else { ((key[w] >> b) & ((1u64 << width) - 1)) as usize })
            .collect();
        let mask = (1u64 << self.agent_bits) - 1;
        let (mut w, mut b) = self.agent_start;
        let mut out = Vec::with_capacity(agents);
        for _ in 0..agents {
            if b + self.agent_bits > 64 {
                w += 1;
                b = 0;
            }
            out.push(((key[w] >> b) & mask) as usize);
            b += self.agent_bits;
        }
        Configuration { states, agents: out }
    }
}

type Mask = Box<[u64]>;

fn mask_full(m: &[u64], n: usize) -> bool {
    (0..n).all(|i| m[i / 64] >> (i % 64) & 1 == 1)
}

fn superset(a: &[u64], b: &[u64]) -> bool {
    a.iter().zip(b).all(|(x, y)| x & y == *y)
}

/// Moves available from a configuration, in declaration order of instances
/// and transitions. Agents sharing a component are interchangeable, so only
/// the first agent on each component moves.
fn expand(system: &System, c: &Configuration, out: &mut Vec<(Move, Configuration)>) {
    out.clear();
    for (agent, &comp) in c.agents.iter().enumerate() {
        if agent > 0 && c.agents[agent - 1] == comp {
            continue;
        }
        for &(inst, loc) in &system.components()[comp] {
            let g = system.gadget_of(inst);
            for &ti in g.transitions_from(c.states[inst]) {
                let t = g.transition(ti);
                if t.from_loc != loc {
                    continue;
                }
                let mut next = c.clone();
                next.states[inst] = t.to_state;
                next.agents[agent] = system.component_of(inst, t.to_loc);
                next.agents.sort_unstable();
                out.push((Move { agent, instance: inst, transition: ti }, next));
            }
        }
    }
    out.sort_by_key(|(m, _)| (m.instance, m.transition, m.agent));
}

struct Node {
    key: Box<[u64]>,
    mask: Option<Mask>,
    parent: usize,
    mv: Option<Move>,
}

fn path_to(nodes: &[Node], mut i: usize) -> MovePath {
    let mut moves = Vec::new();
    while let Some(m) = nodes[i].mv {
        moves.push(m);
        i = nodes[i].parent;
    }
    moves.reverse();
    MovePath { moves }
}

fn stats(nodes: usize, peak: usize, t0: Instant) -> SolveStats {
    SolveStats { nodes_expanded: nodes, frontier_peak: peak, elapsed_micros: t0.elapsed().as_micros() as u64 }
}

/// Breadth-first search from the system's initial configuration with
/// `agents` agents at the start.
pub fn oracle_solve(system: &System, objective: &Objective, agents: usize, max_nodes: usize) -> Result<SolveResult> {
    let init = system.initial_configuration(agents)?;
    oracle_solve_from(system, objective, init, max_nodes)
}

/// Breadth-first search from an arbitrary configuration. Witnesses are
/// shortest in moves. For universal traversal the search state carries the
/// set of instances already traversed, and a node is dropped when an earlier
/// node with the same configuration has traversed a superset.
pub fn oracle_solve_from(
    system: &System,
    objective: &Objective,
    init: Configuration,
    max_nodes: usize,
) -> Result<SolveResult> {
    objective.validate(system)?;
    init.validate(system)?;
    let t0 = Instant::now();
    let n = system.instance_count();
    let agents = init.agents.len();
    let packer = Packer::new(system, agents);
    let traverse = matches!(objective, Objective::UniversalTraversal);
    let mask_words = n.div_ceil(64).max(1);
    let done = |node: &Node, c: &Configuration| match &node.mask {
        Some(m) => mask_full(m, n),
        None => objective.holds_at(system, c),
    };

    let root = Node {
        key: packer.pack(&init),
        mask: traverse.then(|| vec![0u64; mask_words].into_boxed_slice()),
        parent: usize::MAX,
        mv: None,
    };
    if done(&root, &init) {
        return Ok(SolveResult::yes(MovePath::default(), stats(1, 1, t0)));
    }
    let mut seen: HashMap<Box<[u64]>, Vec<usize>> = HashMap::new();
    seen.entry(root.key.clone()).or_default().push(0);
    let mut nodes = vec![root];
    let mut queue = VecDeque::from([0usize]);
    let mut peak = 1;
    let mut buf = Vec::new();
    while let Some(u) = queue.pop_front() {
        let here = packer.unpack(&nodes[u].key, agents);
        expand(system, &here, &mut buf);
        for (mv, next) in buf.drain(..) {
            let key = packer.pack(&next);
            let mask = nodes[u].mask.as_ref().map(|m| {
                let mut m = m.clone();
                m[mv.instance / 64] |= 1 << (mv.instance % 64);
                m
            });
            let entry = seen.entry(key.clone()).or_default();
            let dominated = entry.iter().any(|&v| match (&nodes[v].mask, &mask) {
                (Some(old), Some(new)) => superset(old, new),
                _ => true,
            });
            if dominated {
                continue;
            }
            if nodes.len() >= max_nodes {
                return Ok(SolveResult {
                    decision: super::Decision::BudgetExceeded,
                    witness: None,
                    stats: stats(nodes.len(), peak, t0),
                });
            }
            let v = nodes.len();
            entry.push(v);
            nodes.push(Node { key, mask, parent: u, mv: Some(mv) });
            if done(&nodes[v], &next) {
                return Ok(SolveResult::yes(path_to(&nodes, v), stats(nodes.len(), peak, t0)));
            }
            queue.push_back(v);
            peak = peak.max(queue.len());
        }
    }
    Ok(SolveResult::no(stats(nodes.len(), peak, t0)))
}

/// Depth-first decision procedure with the same pruning as
/// [`oracle_solve_from`]. Witnesses are valid but not necessarily shortest.
/// Moves into gadgets not yet traversed are tried first.
pub fn oracle_decide(system: &System, objective: &Objective, agents: usize, max_nodes: usize) -> Result<SolveResult> {
    objective.validate(system)?;
    let init = system.initial_configuration(agents)?;
    let t0 = Instant::now();
    let n = system.instance_count();
    let packer = Packer::new(system, agents);
    let traverse = matches!(objective, Objective::UniversalTraversal);
    let mask_words = n.div_ceil(64).max(1);
    let empty: Mask = vec![0u64; mask_words].into_boxed_slice();
    let finished = |c: &Configuration, m: &[u64]| {
        if traverse {
            mask_full(m, n)
        } else {
            objective.holds_at(system, c)
        }
    };
    if finished(&init, &empty) {
        return Ok(SolveResult::yes(MovePath::default(), stats(1, 1, t0)));
    }
    let mut seen: HashMap<Box<[u64]>, Vec<Mask>> = HashMap::new();
    seen.entry(packer.pack(&init)).or_default().push(empty.clone());
    let mut count = 1usize;
    // Each frame: configuration, mask, pending successors (reversed), move taken.
    struct Frame {
        mask: Mask,
        pending: Vec<(Move, Configuration)>,
        mv: Option<Move>,
    }
    let order = |c: &Configuration, m: &[u64]| {
        let mut v = Vec::new();
        expand(system, c, &mut v);
        if traverse {
            v.sort_by_key(|(mv, _)| (m[mv.instance / 64] >> (mv.instance % 64)) & 1);
        }
        v.reverse();
        v
    };
    let mut stack = vec![Frame { pending: order(&init, &empty), mask: empty, mv: None }];
    let mut peak = 1;
    while let Some(top) = stack.last_mut() {
        let Some((mv, next)) = top.pending.pop() else {
            stack.pop();
            continue;
        };
        let mut mask = top.mask.clone();
        if traverse {
            mask[mv.instance / 64] |= 1 << (mv.instance % 64);
        }
        let key = packer.pack(&next);
        let entry = seen.entry(key).or_default();
        if entry.iter().any(|old| !traverse || superset(old, &mask)) {
            continue;
        }
        if count >= max_nodes {
            return Ok(SolveResult {
                decision: super::Decision::BudgetExceeded,
                witness: None,
                stats: stats(count, peak, t0),
            });
        }
        count += 1;
        entry.retain(|old| !superset(&mask, old));
        entry.push(mask.clone());
        if finished(&next, &mask) {
            let mut moves: Vec<Move> = stack.iter().filter_map(|f| f.mv).collect();
            moves.push(mv);
            return Ok(SolveResult::yes(MovePath { moves }, stats(count, peak, t0)));
        }
        let pending = order(&next, &mask);
        stack.push(Frame { mask, pending, mv: Some(mv) });
        peak = peak.max(stack.len());
    }
    Ok(SolveResult::no(stats(count, peak, t0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{directed_single_use, locking_2_toggle, one_toggle};
    use crate::solve::{verify_path, Decision};
    use crate::system::{configuration_graph, SystemBuilder};

    #[test]
    fn packer_round_trip() {
        let mut b = SystemBuilder::new();
        for k in 0..40 {
            let g = if k % 2 == 0 { locking_2_toggle() } else { one_toggle() };
            let i = b.add_instance(&g, 0);
            if k == 0 {
                let n = b.node_of(i, 0);
                b.set_start(n);
            }
        }
        let sys = b.build().unwrap().0;
        let p = Packer::new(&sys, 3);
        let states: Vec<usize> = (0..40).map(|k| if k % 2 == 0 { k % 3 } else { k % 2 }).collect();
        let c = Configuration::new(states, vec![5, 100, 17]);
        assert_eq!(p.unpack(&p.pack(&c), 3), c);
    }

    #[test]
    fn l2t_to_state_one_in_one_move() {
        let mut b = SystemBuilder::new();
        let i = b.add_instance(&locking_2_toggle(), 2);
        let top = b.node_of(i, 0);
        b.set_start(top);
        let sys = b.build().unwrap().0;
        let r = oracle_solve(&sys, &Objective::reconfigure(&[0]), 1, 100).unwrap();
        assert_eq!(r.decision, Decision::Yes);
        assert_eq!(r.witness.unwrap().len(), 1);
    }

    #[test]
    fn single_use_paths_pointing_away() {
        let mut b = SystemBuilder::new();
        let start = b.node();
        for _ in 0..2 {
            let i = b.add_instance(&directed_single_use(), 0);
            b.attach(i, 1, start);
        }
        b.set_start(start);
        let sys = b.build().unwrap().0;
        let r = oracle_solve(&sys, &Objective::UniversalTraversal, 1, 100).unwrap();
        assert_eq!(r.decision, Decision::No);
        assert_eq!(oracle_decide(&sys, &Objective::UniversalTraversal, 1, 100).unwrap().decision, Decision::No);
    }

    #[test]
    fn budget_is_distinct_from_no() {
        let mut b = SystemBuilder::new();
        let hub = b.node();
        for _ in 0..6 {
            let i = b.add_instance(&one_toggle(), 0);
            b.attach(i, 0, hub);
            let j = b.add_instance(&one_toggle(), 1);
            let far = b.node_of(i, 1);
            b.attach(j, 1, far);
        }
        b.set_start(hub);
        let sys = b.build().unwrap().0;
        let r = oracle_solve(&sys, &Objective::reconfigure(&[1; 12]), 1, 5).unwrap();
        assert_eq!(r.decision, Decision::BudgetExceeded);
        assert!(r.witness.is_none());
    }

    #[test]
    fn reachability_matches_configuration_graph() {
        // Chain of 1-toggles alternating direction.
        let mut b = SystemBuilder::new();
        let mut prev = b.node();
        b.set_start(prev);
        for k in 0..4 {
            let i = b.add_instance(&one_toggle(), k % 2);
            b.attach(i, 0, prev);
            prev = b.node_of(i, 1);
        }
        b.set_target(prev);
        let (sys, _) = b.build().unwrap();
        let graph = configuration_graph(&sys, 1, 1000).unwrap();
        let target = sys.target().unwrap();
        let reachable = graph.nodes.iter().any(|c| c.agents.contains(&target));
        let obj = Objective::Reachability { target: None };
        let r = oracle_solve(&sys, &obj, 1, 1000).unwrap();
        assert_eq!(r.is_yes(), reachable);
        assert_eq!(oracle_decide(&sys, &obj, 1, 1000).unwrap().is_yes(), reachable);
        if let Some(w) = r.witness {
            assert!(verify_path(&sys, &obj, &w));
        }
    }
}
