//! Reconfiguration for systems of labeled two-tunnel single-use gadgets, as an
//! Eulerian trail problem.

use std::time::Instant;

use super::special::{require_start, stats_since};
use super::SolveResult;
use crate::catalog::labeled_ttsu;
use crate::classify::isomorphic;
use crate::error::{Error, Result};
use crate::system::{Move, MovePath, System};

/// A trail from `start` using every edge of an undirected multigraph exactly
/// once, ending at `end` if given. Loops are allowed. Returns
/// `(edge, entered from)` pairs in order.
pub fn eulerian_trail(
    vertices: usize,
    edges: &[(usize, usize)],
    start: usize,
    end: Option<usize>,
) -> Option<Vec<(usize, usize)>> {
    if edges.is_empty() {
        return end.is_none_or(|e| e == start).then(Vec::new);
    }
    let mut degree = vec![0usize; vertices];
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); vertices];
    for (i, &(u, v)) in edges.iter().enumerate() {
        degree[u] += 1;
        degree[v] += 1;
        adj[u].push((i, v));
        if u != v {
            adj[v].push((i, u));
        }
    }
    let odd: Vec<usize> = (0..vertices).filter(|&v| degree[v] % 2 == 1).collect();
    let ok = match (odd.as_slice(), end) {
        ([], None) => degree[start] > 0,
        ([], Some(e)) => e == start && degree[start] > 0,
        ([a, b], None) => *a == start || *b == start,
        ([a, b], Some(e)) => e != start && ((*a, *b) == (start, e) || (*a, *b) == (e, start)),
        _ => false,
    };
    if !ok {
        return None;
    }
    // Hierholzer: walk until stuck, splicing sub-tours in on the way back.
    let mut used = vec![false; edges.len()];
    let mut next = vec![0usize; vertices];
    let mut stack: Vec<(usize, Option<(usize, usize)>)> = vec![(start, None)];
    let mut trail = Vec::with_capacity(edges.len());
    while let Some(&(v, _)) = stack.last() {
        while next[v] < adj[v].len() && used[adj[v][next[v]].0] {
            next[v] += 1;
        }
        if next[v] == adj[v].len() {
            let (_, via) = stack.pop().expect("nonempty");
            if let Some(step) = via {
                trail.push(step);
            }
        } else {
            let (e, w) = adj[v][next[v]];
            used[e] = true;
            stack.push((w, Some((e, v))));
        }
    }
    trail.reverse();
    (trail.len() == edges.len()).then_some(trail)
}

/// Decides whether the system can be driven from its initial states to
/// `target`, optionally with the agent ending on component `end`.
///
/// A gadget that starts terminal can never change; one that starts and ends
/// open must never be crossed; one that goes from open to a terminal state
/// must be crossed exactly once, through the tunnel its label names. The
/// required crossings form an undirected multigraph on components, and a
/// solution is exactly an Eulerian trail of it from the start.
pub fn solve_ttsu_reconfiguration(system: &System, target: &[usize], end: Option<usize>) -> Result<SolveResult> {
    let reference = labeled_ttsu();
    for g in system.gadgets() {
        if !isomorphic(g, &reference) {
            return Err(Error::WrongGadgetClass(format!("{} is not a labeled two-tunnel single-use gadget", g.name())));
        }
    }
    if target.len() != system.instance_count() {
        return Err(Error::InvalidTarget("target vector length mismatch".into()));
    }
    if matches!(end, Some(e) if e >= system.component_count()) {
        return Err(Error::InvalidTarget("end component does not exist".into()));
    }
    let t0 = Instant::now();
    let start = require_start(system)?;
    let mut edges = Vec::new();
    let mut owner = Vec::new();
    for (inst, &want) in target.iter().enumerate() {
        let g = system.gadget_of(inst);
        if want >= g.state_count() {
            return Err(Error::InvalidTarget(format!("state out of range for instance {inst}")));
        }
        let open = (0..g.state_count()).find(|&s| !g.transitions_from(s).is_empty()).expect("open state");
        let init = system.instances()[inst].initial;
        if init != open || want == open {
            if init != want {
                return Ok(SolveResult::no(stats_since(t0, 0)));
            }
            continue;
        }
        let &ti = g
            .transitions_from(open)
            .iter()
            .find(|&&ti| g.transition(ti).to_state == want)
            .expect("every terminal state is entered from the open state");
        let t = g.transition(ti);
        edges.push((system.component_of(inst, t.from_loc), system.component_of(inst, t.to_loc)));
        owner.push(inst);
    }
    let Some(trail) = eulerian_trail(system.component_count(), &edges, start, end) else {
        return Ok(SolveResult::no(stats_since(t0, edges.len())));
    };
    let mut path = MovePath::default();
    for (e, from) in trail {
        let inst = owner[e];
        let g = system.gadget_of(inst);
        let init = system.instances()[inst].initial;
        let &ti = g
            .transitions_from(init)
            .iter()
            .find(|&&ti| {
                let t = g.transition(ti);
                t.to_state == target[inst] && system.component_of(inst, t.from_loc) == from
            })
            .expect("both directions of the tunnel lead to the same label");
        path.moves.push(Move { agent: 0, instance: inst, transition: ti });
    }
    Ok(SolveResult::yes(path, stats_since(t0, edges.len())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solve::{oracle_solve, verify_path, Decision, Objective};
    use crate::system::SystemBuilder;

    fn two_in_a_row() -> System {
        let g = labeled_ttsu();
        let mut b = SystemBuilder::new();
        let s = b.node();
        let g1 = b.add_instance(&g, 0);
        let g2 = b.add_instance(&g, 0);
        b.attach(g1, 0, s);
        let mid = b.node_of(g1, 1);
        b.attach(g2, 0, mid);
        b.set_start(s);
        b.build().unwrap().0
    }

    #[test]
    fn path_of_two() {
        let sys = two_in_a_row();
        let target = [1, 1];
        let r = solve_ttsu_reconfiguration(&sys, &target, None).unwrap();
        assert_eq!(r.decision, Decision::Yes);
        assert!(verify_path(&sys, &Objective::reconfigure(&target), r.witness.as_ref().unwrap()));
        assert_eq!(oracle_solve(&sys, &Objective::reconfigure(&target), 1, 1000).unwrap().decision, Decision::Yes);
    }

    #[test]
    fn edges_away_from_start() {
        let sys = two_in_a_row();
        // Only the far gadget must be crossed, but the start is not on it.
        let target = [0, 1];
        let r = solve_ttsu_reconfiguration(&sys, &target, None).unwrap();
        assert_eq!(r.decision, Decision::No);
        assert_eq!(oracle_solve(&sys, &Objective::reconfigure(&target), 1, 1000).unwrap().decision, Decision::No);
    }

    #[test]
    fn nothing_to_do() {
        let sys = two_in_a_row();
        let r = solve_ttsu_reconfiguration(&sys, &[0, 0], None).unwrap();
        assert_eq!(r.witness.unwrap().len(), 0);
    }

    #[test]
    fn trail_with_end() {
        let edges = [(0, 1), (1, 2), (2, 0), (0, 0)];
        let t = eulerian_trail(3, &edges, 0, None).unwrap();
        assert_eq!(t.len(), 4);
        assert!(eulerian_trail(3, &edges, 0, Some(1)).is_none());
        let path = [(0, 1), (1, 2)];
        assert!(eulerian_trail(3, &path, 0, Some(2)).is_some());
        assert!(eulerian_trail(3, &path, 1, None).is_none());
        assert!(eulerian_trail(4, &[(0, 1), (2, 3)], 0, None).is_none());
    }
}
