//! Polynomial-time solvers for restricted gadget classes.

use std::collections::VecDeque;
use std::time::Instant;

use super::{SolveResult, SolveStats};
use crate::classify::{has_interacting_tunnels, is_deterministic, is_reversible};
use crate::error::{Error, Result};
use crate::gadget::tunnel_decomposition;
use crate::system::{step, Configuration, Move, MovePath, System};

/// Shortest route over the component graph whose edges are the transitions
/// available in the fixed state vector `states`. Returns the moves
/// `(instance, transition)` and the component reached.
pub(crate) fn route(
    system: &System,
    states: &[usize],
    from: usize,
    is_goal: impl Fn(usize) -> bool,
) -> Option<(Vec<(usize, usize)>, usize)> {
    let mut prev: Vec<Option<(usize, usize, usize)>> = vec![None; system.component_count()];
    let mut seen = vec![false; system.component_count()];
    seen[from] = true;
    let mut queue = VecDeque::from([from]);
    while let Some(c) = queue.pop_front() {
        if is_goal(c) {
            let mut moves = Vec::new();
            let mut at = c;
            while let Some((p, inst, ti)) = prev[at] {
                moves.push((inst, ti));
                at = p;
            }
            moves.reverse();
            return Some((moves, c));
        }
        for &(inst, loc) in &system.components()[c] {
            let g = system.gadget_of(inst);
            for &ti in g.transitions_from(states[inst]) {
                let t = g.transition(ti);
                if t.from_loc != loc {
                    continue;
                }
                let d = system.component_of(inst, t.to_loc);
                if !seen[d] {
                    seen[d] = true;
                    prev[d] = Some((c, inst, ti));
                    queue.push_back(d);
                }
            }
        }
    }
    None
}

pub(crate) fn require_start(system: &System) -> Result<usize> {
    system.start().ok_or_else(|| Error::InvalidSystem("system has no start location".into()))
}

pub(crate) fn stats_since(t0: Instant, nodes: usize) -> SolveStats {
    SolveStats { nodes_expanded: nodes, frontier_peak: 0, elapsed_micros: t0.elapsed().as_micros() as u64 }
}

fn moves(path: &[(usize, usize)]) -> impl Iterator<Item = Move> + '_ {
    path.iter().map(|&(instance, transition)| Move { agent: 0, instance, transition })
}

/// Universal traversal when every gadget has one state and only undirected
/// tunnels: the movement graph is undirected, so each gadget is usable iff
/// one of its locations is connected to the start.
pub fn solve_one_state_undirected(system: &System) -> Result<SolveResult> {
    for g in system.gadgets() {
        if g.state_count() != 1 || !is_reversible(g) {
            return Err(Error::WrongGadgetClass(format!(
                "{} is not a one-state gadget with undirected tunnels",
                g.name()
            )));
        }
        tunnel_decomposition(g)?;
    }
    let t0 = Instant::now();
    let start = require_start(system)?;
    let states = vec![0; system.instance_count()];
    let mut path = MovePath::default();
    let mut here = start;
    for inst in 0..system.instance_count() {
        if path.moves.iter().any(|m| m.instance == inst) {
            continue;
        }
        let g = system.gadget_of(inst);
        let entrances: Vec<usize> =
            g.transitions().iter().map(|t| system.component_of(inst, t.from_loc)).collect();
        let Some((r, at)) = route(system, &states, here, |c| entrances.contains(&c)) else {
            return Ok(SolveResult::no(stats_since(t0, system.component_count())));
        };
        path.moves.extend(moves(&r));
        let ti = g.transitions().iter().position(|t| system.component_of(inst, t.from_loc) == at).expect("entrance");
        path.moves.push(Move { agent: 0, instance: inst, transition: ti });
        here = system.component_of(inst, g.transition(ti).to_loc);
    }
    Ok(SolveResult::yes(path, stats_since(t0, system.component_count())))
}

/// Universal traversal for reversible deterministic gadgets without
/// interacting tunnels.
///
/// Every component the agent can ever reach is reachable using only the
/// tunnel directions open in the initial configuration, so an instance can be
/// traversed iff one of its initially open directions starts in that set. The
/// witness walks to each instance, crosses it, and retraces every move.
pub fn solve_reversible_non_interacting_traversal(system: &System) -> Result<SolveResult> {
    for g in system.gadgets() {
        if !is_reversible(g) || !is_deterministic(g) {
            return Err(Error::WrongGadgetClass(format!("{} is not reversible and deterministic", g.name())));
        }
        if has_interacting_tunnels(g)? {
            return Err(Error::WrongGadgetClass(format!("{} has interacting tunnels", g.name())));
        }
    }
    let t0 = Instant::now();
    let start = require_start(system)?;
    let init_states = system.initial_states();
    let init = Configuration::new(init_states.clone(), vec![start]);
    let mut path = MovePath::default();
    for inst in 0..system.instance_count() {
        if path.moves.iter().any(|m| m.instance == inst) {
            continue;
        }
        let g = system.gadget_of(inst);
        let open: Vec<usize> = g
            .transitions_from(init_states[inst])
            .iter()
            .map(|&ti| system.component_of(inst, g.transition(ti).from_loc))
            .collect();
        let Some((r, at)) = route(system, &init_states, start, |c| open.contains(&c)) else {
            return Ok(SolveResult::no(stats_since(t0, system.component_count())));
        };
        // Replay the route, then cross the instance, then undo everything.
        let mut cur = init.clone();
        let mut taken: Vec<Move> = Vec::new();
        for (i, ti) in r {
            let want = g_transition_locs(system, i, ti);
            let mv = pick(system, &cur, i, want).expect("non-interacting tunnels keep the route open");
            cur = step(system, &cur, &mv)?;
            taken.push(mv);
        }
        if !taken.iter().any(|m| m.instance == inst) {
            let ti = *g
                .transitions_from(cur.states[inst])
                .iter()
                .find(|&&ti| system.component_of(inst, g.transition(ti).from_loc) == at)
                .expect("direction still open");
            let mv = Move { agent: 0, instance: inst, transition: ti };
            cur = step(system, &cur, &mv)?;
            taken.push(mv);
        }
        let mut back = Vec::new();
        for mv in taken.iter().rev() {
            let g = system.gadget_of(mv.instance);
            let rev = g.find_transition(&g.transition(mv.transition).reversed()).expect("reversible");
            let b = Move { agent: 0, instance: mv.instance, transition: rev };
            cur = step(system, &cur, &b)?;
            back.push(b);
        }
        debug_assert_eq!(cur, init);
        path.moves.extend(taken);
        path.moves.extend(back);
    }
    Ok(SolveResult::yes(path, stats_since(t0, system.component_count())))
}

fn g_transition_locs(system: &System, inst: usize, ti: usize) -> (usize, usize) {
    let t = system.gadget_of(inst).transition(ti);
    (t.from_loc, t.to_loc)
}

/// The transition of `inst` in its current state crossing `from -> to`.
fn pick(system: &System, cur: &Configuration, inst: usize, (from, to): (usize, usize)) -> Option<Move> {
    let g = system.gadget_of(inst);
    g.transitions_from(cur.states[inst])
        .iter()
        .find(|&&ti| {
            let t = g.transition(ti);
            t.from_loc == from && t.to_loc == to
        })
        .map(|&ti| Move { agent: 0, instance: inst, transition: ti })
}
