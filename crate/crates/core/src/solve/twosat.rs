//! Universal traversal for one-state gadgets with at most two tunnels, by
//! reduction to 2SAT.

use std::collections::VecDeque;
use std::time::Instant;

use super::special::{require_start, route, stats_since};
use super::SolveResult;
use crate::classify::strongly_connected_components;
use crate::error::{Error, Result};
use crate::gadget::tunnel_decomposition;
use crate::system::{Move, MovePath, System};

/// 2SAT over variables `0..n`; literal `2v` is `v`, `2v + 1` is `not v`.
#[derive(Clone, Debug)]
pub struct TwoSat {
    n: usize,
    implications: Vec<Vec<usize>>,
}

impl TwoSat {
    pub fn new(n: usize) -> Self {
        Self { n, implications: vec![Vec::new(); 2 * n] }
    }

    pub fn lit(var: usize, positive: bool) -> usize {
        2 * var + usize::from(!positive)
    }

    /// Adds the clause `a or b`.
    pub fn add_clause(&mut self, a: usize, b: usize) {
        self.implications[a ^ 1].push(b);
        self.implications[b ^ 1].push(a);
    }

    /// A satisfying assignment, if one exists.
    pub fn solve(&self) -> Option<Vec<bool>> {
        let sccs = strongly_connected_components(&self.implications);
        let mut pos = vec![0; 2 * self.n];
        for (i, comp) in sccs.iter().enumerate() {
            for &l in comp {
                pos[l] = i;
            }
        }
        (0..self.n)
            .map(|v| {
                let (p, q) = (pos[2 * v], pos[2 * v + 1]);
                // Components are in topological order; a literal is true when it
                // comes after its negation.
                (p != q).then_some(p > q)
            })
            .collect()
    }
}

struct Tunnel {
    instance: usize,
    /// `(transition, entrance component, exit component)` for each direction.
    crossings: Vec<(usize, usize, usize)>,
}

fn closure(system: &System) -> Vec<Vec<bool>> {
    let n = system.component_count();
    let mut adj = vec![Vec::new(); n];
    for inst in 0..system.instance_count() {
        for (_, a, b) in system.moves_in_state(inst, 0) {
            adj[a].push(b);
        }
    }
    (0..n)
        .map(|s| {
            let mut seen = vec![false; n];
            seen[s] = true;
            let mut q = VecDeque::from([s]);
            while let Some(u) = q.pop_front() {
                for &v in &adj[u] {
                    if !seen[v] {
                        seen[v] = true;
                        q.push_back(v);
                    }
                }
            }
            seen
        })
        .collect()
}

/// Universal traversal when every gadget has a single state and at most two
/// traversable tunnels.
///
/// One variable per tunnel says the tunnel is used. Each gadget needs one of
/// its tunnels; two tunnels neither of which can reach the other cannot both
/// be used; a tunnel whose entrances are unreachable from the start cannot be
/// used at all. A satisfying assignment is turned into a walk by visiting the
/// chosen tunnels in the order of the reachability relation among them.
pub fn solve_one_state_2_tunnel(system: &System) -> Result<SolveResult> {
    let mut tunnels: Vec<Tunnel> = Vec::new();
    let mut per_instance: Vec<Vec<usize>> = Vec::new();
    for inst in 0..system.instance_count() {
        let g = system.gadget_of(inst);
        if g.state_count() != 1 {
            return Err(Error::WrongGadgetClass(format!("{} has more than one state", g.name())));
        }
        let ts = tunnel_decomposition(g)?;
        let mut mine = Vec::new();
        for t in 0..ts.len() {
            let crossings: Vec<_> = g
                .transitions_from(0)
                .iter()
                .filter(|&&ti| ts.tunnel_of(g.transition(ti).from_loc) == t)
                .map(|&ti| {
                    let tr = g.transition(ti);
                    (ti, system.component_of(inst, tr.from_loc), system.component_of(inst, tr.to_loc))
                })
                .collect();
            if !crossings.is_empty() {
                mine.push(tunnels.len());
                tunnels.push(Tunnel { instance: inst, crossings });
            }
        }
        if mine.len() > 2 {
            return Err(Error::WrongGadgetClass(format!("{} has more than two tunnels", g.name())));
        }
        per_instance.push(mine);
    }
    let t0 = Instant::now();
    let start = require_start(system)?;
    if per_instance.iter().any(|v| v.is_empty()) {
        return Ok(SolveResult::no(stats_since(t0, 0)));
    }
    let reach = closure(system);
    let leads_to = |x: &Tunnel, y: &Tunnel| {
        x.crossings.iter().any(|&(_, _, out)| y.crossings.iter().any(|&(_, inn, _)| reach[out][inn]))
    };
    let n = tunnels.len();
    let mut sat = TwoSat::new(n);
    for mine in &per_instance {
        let a = TwoSat::lit(mine[0], true);
        let b = mine.get(1).map_or(a, |&y| TwoSat::lit(y, true));
        sat.add_clause(a, b);
    }
    let mut edge = vec![vec![false; n]; n];
    for x in 0..n {
        for y in 0..n {
            edge[x][y] = x != y && leads_to(&tunnels[x], &tunnels[y]);
        }
    }
    for x in 0..n {
        if !tunnels[x].crossings.iter().any(|&(_, inn, _)| reach[start][inn]) {
            sat.add_clause(TwoSat::lit(x, false), TwoSat::lit(x, false));
        }
        for y in x + 1..n {
            if !edge[x][y] && !edge[y][x] {
                sat.add_clause(TwoSat::lit(x, false), TwoSat::lit(y, false));
            }
        }
    }
    let Some(assignment) = sat.solve() else {
        return Ok(SolveResult::no(stats_since(t0, 2 * n)));
    };

    // Chosen tunnels are totally preordered by reachability; order the
    // equivalence classes topologically and break ties by declaration order.
    let chosen: Vec<usize> = (0..n).filter(|&x| assignment[x]).collect();
    let succ: Vec<Vec<usize>> = chosen
        .iter()
        .map(|&x| (0..chosen.len()).filter(|&j| edge[x][chosen[j]]).collect())
        .collect();
    let order: Vec<usize> = strongly_connected_components(&succ).into_iter().flatten().map(|j| chosen[j]).collect();

    let states = vec![0; system.instance_count()];
    let mut visited = vec![false; system.instance_count()];
    let mut path = MovePath::default();
    let mut here = start;
    for x in order {
        let tun = &tunnels[x];
        if visited[tun.instance] {
            continue;
        }
        let Some((r, at)) = route(system, &states, here, |c| tun.crossings.iter().any(|&(_, inn, _)| inn == c)) else {
            return Err(Error::InvalidSystem("2SAT assignment could not be routed".into()));
        };
        for (instance, transition) in r {
            visited[instance] = true;
            path.moves.push(Move { agent: 0, instance, transition });
        }
        if !visited[tun.instance] {
            let &(ti, _, out) = tun.crossings.iter().find(|&&(_, inn, _)| inn == at).expect("entrance");
            path.moves.push(Move { agent: 0, instance: tun.instance, transition: ti });
            visited[tun.instance] = true;
            here = out;
        } else {
            here = at;
        }
    }
    Ok(SolveResult::yes(path, stats_since(t0, 2 * n)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::one_state_gadget;
    use crate::solve::{oracle_solve, verify_path, Decision, Objective};
    use crate::system::SystemBuilder;

    fn brute(n: usize, clauses: &[(usize, usize)]) -> bool {
        (0..1u32 << n).any(|m| {
            let val = |l: usize| ((m >> (l / 2)) & 1 == 1) != (l % 2 == 1);
            clauses.iter().all(|&(a, b)| val(a) || val(b))
        })
    }

    #[test]
    fn twosat_matches_brute_force() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        for _ in 0..500 {
            let n = rng.gen_range(1..6);
            let m = rng.gen_range(0..10);
            let clauses: Vec<(usize, usize)> = (0..m).map(|_| (rng.gen_range(0..2 * n), rng.gen_range(0..2 * n))).collect();
            let mut s = TwoSat::new(n);
            for &(a, b) in &clauses {
                s.add_clause(a, b);
            }
            let got = s.solve();
            assert_eq!(got.is_some(), brute(n, &clauses));
            if let Some(v) = got {
                let val = |l: usize| v[l / 2] != (l % 2 == 1);
                assert!(clauses.iter().all(|&(a, b)| val(a) || val(b)));
            }
        }
    }

    #[test]
    fn series_of_directed_tunnels() {
        let mut b = SystemBuilder::new();
        let g = one_state_gadget(1, 0).unwrap();
        let s = b.node();
        let x = b.add_instance(&g, 0);
        let y = b.add_instance(&g, 0);
        b.attach(x, 0, s);
        let mid = b.node_of(x, 1);
        b.attach(y, 0, mid);
        b.set_start(s);
        let sys = b.build().unwrap().0;
        let r = solve_one_state_2_tunnel(&sys).unwrap();
        let w = r.witness.unwrap();
        assert_eq!(w.moves.iter().map(|m| m.instance).collect::<Vec<_>>(), vec![0, 1]);
        assert!(verify_path(&sys, &Objective::UniversalTraversal, &w));
    }

    #[test]
    fn tunnels_pointing_at_each_other() {
        // Both tunnels lead away from the start into separate dead ends.
        let mut b = SystemBuilder::new();
        let g = one_state_gadget(1, 0).unwrap();
        let x = b.add_instance(&g, 0);
        let y = b.add_instance(&g, 0);
        let s = b.node();
        b.attach(x, 0, s);
        b.attach(y, 0, s);
        b.set_start(s);
        let sys = b.build().unwrap().0;
        let r = solve_one_state_2_tunnel(&sys).unwrap();
        assert_eq!(r.decision, Decision::No);
        assert_eq!(oracle_solve(&sys, &Objective::UniversalTraversal, 1, 1000).unwrap().decision, Decision::No);
    }
}
