//! Reductions to universal traversal with one-state gadgets.

use std::collections::BTreeSet;

use super::source::{CnfFormula, Digraph};
use super::{Place, ReductionOutput};
use crate::classify::traversable_tunnels;
use crate::error::{Error, Result};
use crate::gadget::{tunnel_decomposition, Direction, Gadget};
use crate::solve::Objective;
use crate::system::{Node, SystemBuilder};

/// Live tunnels of a one-state gadget as `(entrance, exit, directed)`, one
/// crossing per tunnel; directed tunnels first.
fn one_state_tunnels(g: &Gadget) -> Result<Vec<(usize, usize, bool)>> {
    if g.state_count() != 1 {
        return Err(Error::WrongGadgetClass(format!("{} is not a one-state gadget", g.name())));
    }
    let ts = tunnel_decomposition(g)?;
    let dirs = traversable_tunnels(g, &ts, 0);
    let live: BTreeSet<usize> = dirs.iter().map(|&(t, _)| t).collect();
    let mut out: Vec<(usize, usize, bool)> = live
        .into_iter()
        .map(|t| {
            let fwd = dirs.contains(&(t, Direction::Forward));
            let back = dirs.contains(&(t, Direction::Backward));
            let (a, b) = ts.endpoints(t, if fwd { Direction::Forward } else { Direction::Backward });
            (a, b, !(fwd && back))
        })
        .collect();
    out.sort_by_key(|&(_, _, directed)| !directed);
    Ok(out)
}

fn directed_tunnel(g: &Gadget) -> Result<(usize, usize)> {
    one_state_tunnels(g)?
        .into_iter()
        .find(|t| t.2)
        .map(|(a, b, _)| (a, b))
        .ok_or_else(|| Error::WrongGadgetClass(format!("{} has no directed tunnel", g.name())))
}

/// s-t connectivity to universal traversal: add `t -> v` and `v -> s` for
/// every vertex, then turn every arc into the directed tunnel of a fresh copy
/// of `g`.
pub fn reduce_stcon_to_traversal(graph: &Digraph, g: &Gadget) -> Result<ReductionOutput> {
    let (entry, exit) = directed_tunnel(g)?;
    if graph.s == graph.t {
        return Err(Error::InvalidInput("s and t must differ".into()));
    }
    let mut arcs = graph.arcs.clone();
    for v in 0..graph.vertex_count {
        arcs.push((graph.t, v));
        arcs.push((v, graph.s));
    }
    let mut b = SystemBuilder::new();
    let nodes: Vec<Node> = (0..graph.vertex_count).map(|_| b.node()).collect();
    let mut arc_instances = Vec::new();
    for &(u, v) in &arcs {
        let i = b.add_instance(g, 0);
        b.attach(i, entry, nodes[u]);
        b.attach(i, exit, nodes[v]);
        arc_instances.push(i);
    }
    b.set_start(nodes[graph.s]);
    let (system, comp) = b.build()?;
    let mut out = ReductionOutput::new(system, Objective::UniversalTraversal, "solvable iff t is reachable from s");
    for (v, &n) in nodes.iter().enumerate() {
        let components = vec![SystemBuilder::component(&comp, n)];
        out.correspondence.insert(format!("v{v}"), Place { instances: vec![], components });
    }
    for (k, &i) in arc_instances.iter().enumerate() {
        let key = if k < graph.arcs.len() { format!("arc{k}") } else { format!("added{}", k - graph.arcs.len()) };
        out.correspondence.insert(key, Place { instances: vec![i], components: vec![] });
    }
    out.metadata.insert("reduction".into(), "stcon".into());
    Ok(out)
}

/// Six copies of a one-state gadget wired into three disjoint paths that
/// each cross every copy; each path starts and ends on a directed tunnel, so
/// together they act as one gadget with three directed tunnels. Returns the
/// path entrances, exits and the six instances.
fn three_directed_tunnels(
    b: &mut SystemBuilder,
    g: &Gadget,
    tunnels: &[(usize, usize, bool)],
) -> ([Node; 3], [Node; 3], Vec<usize>) {
    let copies: Vec<usize> = (0..6).map(|_| b.add_instance(g, 0)).collect();
    let (d, t1, t2) = (tunnels[0], tunnels[1], tunnels[2]);
    let mut entrances = Vec::new();
    let mut exits = Vec::new();
    for p in 0..3 {
        // Copy q's spare tunnels serve the two paths other than q % 3.
        let spare = |q: usize| if p == (0..3).find(|&x| x != q % 3).unwrap() { t1 } else { t2 };
        let middle: Vec<usize> = (0..6).filter(|&q| q % 3 != p).collect();
        let entrance = b.node();
        b.attach(copies[p], d.0, entrance);
        let mut at = b.node_of(copies[p], d.1);
        for &q in &middle {
            let t = spare(q);
            b.attach(copies[q], t.0, at);
            at = b.node_of(copies[q], t.1);
        }
        b.attach(copies[p + 3], d.0, at);
        let exit = b.node_of(copies[p + 3], d.1);
        entrances.push(entrance);
        exits.push(exit);
    }
    (entrances.try_into().unwrap(), exits.try_into().unwrap(), copies)
}

/// 3SAT to universal traversal with a one-state gadget having a directed
/// tunnel and at least three live tunnels.
///
/// Each clause is a three-path bundle; literal slot `k` of a clause is path
/// `k`. Variable `i` branches at node `B_i` into a positive and a negative
/// chain threading the slots holding that literal, both merging at `B_{i+1}`.
pub fn reduce_3sat_to_traversal(cnf: &CnfFormula, g: &Gadget) -> Result<ReductionOutput> {
    let tunnels = one_state_tunnels(g)?;
    if tunnels.len() < 3 || !tunnels[0].2 {
        return Err(Error::WrongGadgetClass(format!(
            "{} needs a directed tunnel and three live tunnels",
            g.name()
        )));
    }
    let mut b = SystemBuilder::new();
    let bundles: Vec<_> = cnf.clauses.iter().map(|_| three_directed_tunnels(&mut b, g, &tunnels)).collect();
    let branches: Vec<Node> = (0..=cnf.variable_count).map(|_| b.node()).collect();
    for var in 1..=cnf.variable_count as i32 {
        for lit in [var, -var] {
            let mut at = branches[var as usize - 1];
            for (j, c) in cnf.clauses.iter().enumerate() {
                for (k, &l) in c.iter().enumerate() {
                    if l == lit {
                        b.merge(at, bundles[j].0[k]);
                        at = bundles[j].1[k];
                    }
                }
            }
            b.merge(at, branches[var as usize]);
        }
    }
    b.set_start(branches[0]);
    let (system, comp) = b.build()?;
    let mut out = ReductionOutput::new(system, Objective::UniversalTraversal, "solvable iff the formula is satisfiable");
    for (j, bundle) in bundles.iter().enumerate() {
        out.correspondence.insert(format!("clause{j}"), Place { instances: bundle.2.clone(), components: vec![] });
    }
    for (i, &n) in branches.iter().enumerate() {
        let components = vec![SystemBuilder::component(&comp, n)];
        out.correspondence.insert(format!("branch{i}"), Place { instances: vec![], components });
    }
    out.metadata.insert("reduction".into(), "3sat".into());
    Ok(out)
}
