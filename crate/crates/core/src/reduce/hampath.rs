//! Hamiltonian path to universal traversal with true 2-tunnel DAG gadgets,
//! for the cases without distant openings.

use std::collections::BTreeSet;

use super::source::{Digraph, Graph};
use super::{Place, ReductionOutput};
use crate::catalog::{directed_single_use, undirected_single_use};
use crate::classify::{final_true_2_tunnel_states, traversable_tunnels};
use crate::error::{Error, Result};
use crate::gadget::{tunnel_decomposition, Direction, Gadget, TunnelStructure};
use crate::solve::Objective;
use crate::system::{Node, SystemBuilder};

/// A crossing `(entrance, exit)` of one tunnel.
type Crossing = (usize, usize);

fn crossing(ts: &TunnelStructure, t: usize, d: Direction) -> Crossing {
    ts.endpoints(t, d)
}

/// States reachable by one transition from `s` across `(t, d)`.
fn after(g: &Gadget, ts: &TunnelStructure, s: usize, t: usize, d: Direction) -> Vec<usize> {
    g.transitions_from(s)
        .iter()
        .map(|&i| g.transition(i))
        .filter(|tr| ts.classify(tr) == (t, d))
        .map(|tr| tr.to_state)
        .collect()
}

fn open_in(g: &Gadget, ts: &TunnelStructure, s: usize) -> BTreeSet<(usize, Direction)> {
    traversable_tunnels(g, ts, s)
}

const DIRS: [Direction; 2] = [Direction::Forward, Direction::Backward];

/// State and tunnels for the directed construction. `d` is directed in the
/// chosen state; `both` says `u` is directed as well.
struct DirectedPick {
    state: usize,
    d: Crossing,
    u: Crossing,
    both: bool,
}

fn pick_directed(g: &Gadget) -> Result<DirectedPick> {
    let ts = tunnel_decomposition(g)?;
    for s in final_true_2_tunnel_states(g)? {
        let open = open_in(g, &ts, s);
        let tunnels: BTreeSet<usize> = open.iter().map(|&(t, _)| t).collect();
        let directed = |t: usize| open.iter().filter(|&&(x, _)| x == t).count() == 1;
        let dir_of = |t: usize| open.iter().find(|&&(x, _)| x == t).expect("open").1;
        for &a in &tunnels {
            for &b in &tunnels {
                if a == b || !directed(a) {
                    continue;
                }
                // No crossing of either tunnel may open a new direction of the other.
                let opens = |x: usize, y: usize| {
                    DIRS.iter().any(|&dx| {
                        open.contains(&(x, dx))
                            && after(g, &ts, s, x, dx)
                                .iter()
                                .any(|&s2| open_in(g, &ts, s2).iter().any(|&(t, e)| t == y && !open.contains(&(y, e))))
                    })
                };
                if opens(a, b) || opens(b, a) {
                    continue;
                }
                return Ok(DirectedPick {
                    state: s,
                    d: crossing(&ts, a, dir_of(a)),
                    u: crossing(&ts, b, dir_of(b)),
                    both: directed(b),
                });
            }
        }
    }
    Err(Error::WrongGadgetClass(format!(
        "{} has no final true 2-tunnel state with a directed tunnel and no distant opening",
        g.name()
    )))
}

/// State and orientations for the undirected-closing construction: crossing
/// `a` left to right always closes `b` right to left. `symmetric` says the
/// same holds with the tunnels swapped.
struct ClosePick {
    state: usize,
    a: Crossing,
    b: Crossing,
    symmetric: bool,
}

fn pick_close(g: &Gadget) -> Result<ClosePick> {
    let ts = tunnel_decomposition(g)?;
    let mut best: Option<ClosePick> = None;
    for s in final_true_2_tunnel_states(g)? {
        let open = open_in(g, &ts, s);
        let both_ways: Vec<usize> =
            (0..ts.len()).filter(|&t| DIRS.iter().all(|&d| open.contains(&(t, d)))).collect();
        let closes = |x: usize, dx: Direction, y: usize, dy_back: Direction| {
            after(g, &ts, s, x, dx).iter().all(|&s2| !open_in(g, &ts, s2).contains(&(y, dy_back)))
        };
        for &a in &both_ways {
            for &b in &both_ways {
                if a == b {
                    continue;
                }
                for da in DIRS {
                    for db in DIRS {
                        if !closes(a, da, b, db.flip()) {
                            continue;
                        }
                        let pick = ClosePick {
                            state: s,
                            a: crossing(&ts, a, da),
                            b: crossing(&ts, b, db),
                            symmetric: closes(b, db, a, da.flip()),
                        };
                        if pick.symmetric {
                            return Ok(pick);
                        }
                        best.get_or_insert(pick);
                    }
                }
            }
        }
    }
    best.ok_or_else(|| {
        Error::WrongGadgetClass(format!(
            "{} has no final true 2-tunnel state where crossing one undirected tunnel closes another",
            g.name()
        ))
    })
}

/// State and tunnels for the spiral construction: both tunnels open both
/// ways, and any crossing of one can leave either direction of the other open.
struct SpiralPick {
    state: usize,
    a: Crossing,
    b: Crossing,
}

fn pick_spiral(g: &Gadget) -> Result<SpiralPick> {
    let ts = tunnel_decomposition(g)?;
    for s in final_true_2_tunnel_states(g)? {
        let open = open_in(g, &ts, s);
        let both_ways: Vec<usize> =
            (0..ts.len()).filter(|&t| DIRS.iter().all(|&d| open.contains(&(t, d)))).collect();
        let keeps = |x: usize, y: usize| {
            DIRS.iter().all(|&dx| {
                DIRS.iter().all(|&dy| after(g, &ts, s, x, dx).iter().any(|&s2| open_in(g, &ts, s2).contains(&(y, dy))))
            })
        };
        for &a in &both_ways {
            for &b in &both_ways {
                if a < b && keeps(a, b) && keeps(b, a) {
                    return Ok(SpiralPick {
                        state: s,
                        a: crossing(&ts, a, Direction::Forward),
                        b: crossing(&ts, b, Direction::Forward),
                    });
                }
            }
        }
    }
    Err(Error::WrongGadgetClass(format!(
        "{} has no final true 2-tunnel state with two freely usable undirected tunnels",
        g.name()
    )))
}

fn check_interior_degrees(graph: &Digraph) -> Result<()> {
    if graph.s == graph.t {
        return Err(Error::BadDegreeSequence("s and t must differ".into()));
    }
    if graph.arcs.iter().any(|&(u, v)| u == v) {
        return Err(Error::BadDegreeSequence("self-loops are not allowed".into()));
    }
    for v in 0..graph.vertex_count {
        let (i, o) = (graph.in_degree(v), graph.out_degree(v));
        let ok = if v == graph.s {
            (1..=2).contains(&o)
        } else if v == graph.t {
            (1..=2).contains(&i)
        } else {
            matches!((i, o), (1, 2) | (2, 1))
        };
        if !ok {
            return Err(Error::BadDegreeSequence(format!("vertex {v} has in-degree {i} and out-degree {o}")));
        }
    }
    Ok(())
}

/// Attaches a crossing of `inst` from node `x` to node `y`.
fn wire(b: &mut SystemBuilder, inst: usize, (entrance, exit): Crossing, x: Node, y: Node) {
    b.attach(inst, entrance, x);
    b.attach(inst, exit, y);
}

/// Builders for the two halves of a vertex gadget: a one-in, two-out fan and
/// a two-in, one-out merge. Each returns the instances it created.
trait VertexParts {
    /// A single-use path from `x` to `y`.
    fn single_use(&self, b: &mut SystemBuilder, x: Node, y: Node) -> usize;
    fn fan(&self, b: &mut SystemBuilder, center: Node, out: [Node; 2]) -> Vec<usize>;
    fn merge(&self, b: &mut SystemBuilder, ins: [Node; 2], center: Node) -> Vec<usize>;
}

struct DirectedParts<'a>(&'a Gadget, DirectedPick);

impl VertexParts for DirectedParts<'_> {
    fn single_use(&self, b: &mut SystemBuilder, x: Node, y: Node) -> usize {
        let i = b.add_instance(&directed_single_use(), 0);
        wire(b, i, (0, 1), x, y);
        i
    }

    fn fan(&self, b: &mut SystemBuilder, center: Node, out: [Node; 2]) -> Vec<usize> {
        let p = &self.1;
        let i = b.add_instance(self.0, p.state);
        wire(b, i, p.d, center, out[0]);
        wire(b, i, p.u, center, out[1]);
        vec![i]
    }

    fn merge(&self, b: &mut SystemBuilder, ins: [Node; 2], center: Node) -> Vec<usize> {
        let p = &self.1;
        let g1 = b.add_instance(self.0, p.state);
        if p.both {
            wire(b, g1, p.d, ins[0], center);
            wire(b, g1, p.u, ins[1], center);
            return vec![g1];
        }
        let g2 = b.add_instance(self.0, p.state);
        let (m1, m2) = (b.node(), b.node());
        wire(b, g1, p.d, ins[0], m1);
        wire(b, g2, p.u, m1, center);
        wire(b, g2, p.d, ins[1], m2);
        wire(b, g1, p.u, m2, center);
        vec![g1, g2]
    }
}

struct CloseParts<'a>(&'a Gadget, ClosePick);

impl VertexParts for CloseParts<'_> {
    fn single_use(&self, b: &mut SystemBuilder, x: Node, y: Node) -> usize {
        let i = b.add_instance(&undirected_single_use(), 0);
        wire(b, i, (0, 1), x, y);
        i
    }

    fn fan(&self, b: &mut SystemBuilder, center: Node, out: [Node; 2]) -> Vec<usize> {
        let p = &self.1;
        let i = b.add_instance(self.0, p.state);
        wire(b, i, p.a, center, out[0]);
        wire(b, i, p.b, center, out[1]);
        vec![i]
    }

    fn merge(&self, b: &mut SystemBuilder, ins: [Node; 2], center: Node) -> Vec<usize> {
        let p = &self.1;
        let g1 = b.add_instance(self.0, p.state);
        if p.symmetric {
            wire(b, g1, p.a, ins[0], center);
            wire(b, g1, p.b, ins[1], center);
            return vec![g1];
        }
        let g2 = b.add_instance(self.0, p.state);
        let (m1, m2) = (b.node(), b.node());
        wire(b, g1, p.a, ins[0], m1);
        wire(b, g2, p.b, m1, center);
        wire(b, g2, p.a, ins[1], m2);
        wire(b, g1, p.b, m2, center);
        vec![g1, g2]
    }
}

fn build_directed(graph: &Digraph, parts: &dyn VertexParts, name: &str) -> Result<ReductionOutput> {
    check_interior_degrees(graph)?;
    let mut b = SystemBuilder::new();
    let arc_nodes: Vec<Node> = graph.arcs.iter().map(|_| b.node()).collect();
    let mut places = Vec::new();
    let mut start = None;
    for v in 0..graph.vertex_count {
        let ins: Vec<Node> = (0..graph.arcs.len()).filter(|&k| graph.arcs[k].1 == v).map(|k| arc_nodes[k]).collect();
        let outs: Vec<Node> = (0..graph.arcs.len()).filter(|&k| graph.arcs[k].0 == v).map(|k| arc_nodes[k]).collect();
        let center = b.node();
        let mut insts = Vec::new();
        // s keeps only the part after its center, t only the part before.
        let left = v != graph.s;
        let right = v != graph.t;
        let (i, o) = if v == graph.s {
            (3 - outs.len(), outs.len())
        } else if v == graph.t {
            (ins.len(), 3 - ins.len())
        } else {
            (ins.len(), outs.len())
        };
        if (i, o) == (1, 2) {
            if left {
                insts.push(parts.single_use(&mut b, ins[0], center));
            }
            if right {
                insts.extend(parts.fan(&mut b, center, [outs[0], outs[1]]));
            }
        } else {
            if left {
                insts.extend(parts.merge(&mut b, [ins[0], ins[1]], center));
            }
            if right {
                insts.push(parts.single_use(&mut b, center, outs[0]));
            }
        }
        if v == graph.s {
            start = Some(center);
        }
        places.push((v, insts, center));
    }
    b.set_start(start.expect("s exists"));
    let (system, comp) = b.build()?;
    let mut out = ReductionOutput::new(
        system,
        Objective::UniversalTraversal,
        "solvable iff the digraph has a Hamiltonian path from s to t",
    );
    for (v, instances, center) in places {
        let components = vec![SystemBuilder::component(&comp, center)];
        out.correspondence.insert(format!("v{v}"), Place { instances, components });
    }
    out.metadata.insert("reduction".into(), name.into());
    out.metadata.insert("singleUsePaths".into(), "literal catalog gadgets".into());
    Ok(out)
}

/// Directed Hamiltonian path (interior vertices of in/out degree (1,2) or
/// (2,1)) to universal traversal, for a gadget whose final true 2-tunnel
/// state has a directed tunnel and no distant opening.
pub fn reduce_hampath_directed(graph: &Digraph, g: &Gadget) -> Result<ReductionOutput> {
    let pick = pick_directed(g)?;
    build_directed(graph, &DirectedParts(g, pick), "hampath-dir")
}

/// As [`reduce_hampath_directed`], for a gadget whose final true 2-tunnel
/// state has two undirected tunnels where crossing one closes the other.
pub fn reduce_hampath_undir_close(graph: &Digraph, g: &Gadget) -> Result<ReductionOutput> {
    let pick = pick_close(g)?;
    build_directed(graph, &CloseParts(g, pick), "hampath-undir-close")
}

/// Undirected Hamiltonian path (s and t of degree 1, all else degree 3) to
/// universal traversal with nine-gadget spiral vertex gadgets.
///
/// Spoke `i` of a vertex runs from its center out to the edge node of its
/// `i`-th incident edge. Gadget `X[k][i]` has tunnel `a` on spoke `i` and `b`
/// on spoke `i + 1`; spoke `i` crosses, from the center outward,
/// `X[0][i], X[0][i-1], X[1][i], X[1][i-1], X[2][i], X[2][i-1]`.
pub fn reduce_hampath_spiral(graph: &Graph, g: &Gadget) -> Result<ReductionOutput> {
    let pick = pick_spiral(g)?;
    if graph.s == graph.t {
        return Err(Error::BadDegreeSequence("s and t must differ".into()));
    }
    if graph.edges.iter().any(|&(u, v)| u == v) {
        return Err(Error::BadDegreeSequence("self-loops are not allowed".into()));
    }
    for v in 0..graph.vertex_count {
        let want = if v == graph.s || v == graph.t { 1 } else { 3 };
        if graph.degree(v) != want {
            return Err(Error::BadDegreeSequence(format!("vertex {v} has degree {}", graph.degree(v))));
        }
    }
    let mut b = SystemBuilder::new();
    let edge_nodes: Vec<Node> = graph.edges.iter().map(|_| b.node()).collect();
    let mut places = Vec::new();
    for v in 0..graph.vertex_count {
        if v == graph.s || v == graph.t {
            continue;
        }
        let ends: Vec<Node> = (0..graph.edges.len())
            .flat_map(|k| {
                let (x, y) = graph.edges[k];
                [x, y].into_iter().filter(move |&w| w == v).map(move |_| k)
            })
            .map(|k| edge_nodes[k])
            .collect();
        let center = b.node();
        let x: Vec<[usize; 3]> = (0..3).map(|_| [0; 3].map(|_| b.add_instance(g, pick.state))).collect();
        for i in 0..3 {
            let prev = (i + 2) % 3;
            let mut at = center;
            for k in 0..3 {
                for (inst, tunnel) in [(x[k][i], pick.a), (x[k][prev], pick.b)] {
                    let next = if k == 2 && inst == x[k][prev] { ends[i] } else { b.node() };
                    wire(&mut b, inst, tunnel, at, next);
                    at = next;
                }
            }
        }
        places.push((v, x.concat(), center));
    }
    let t_edge = graph.edges.iter().position(|&(x, y)| x == graph.t || y == graph.t).expect("t has degree 1");
    let s_edge = graph.edges.iter().position(|&(x, y)| x == graph.s || y == graph.s).expect("s has degree 1");
    let t_node = b.node();
    let last = b.add_instance(&undirected_single_use(), 0);
    wire(&mut b, last, (0, 1), edge_nodes[t_edge], t_node);
    b.set_start(edge_nodes[s_edge]);
    let (system, comp) = b.build()?;
    let mut out = ReductionOutput::new(
        system,
        Objective::UniversalTraversal,
        "solvable iff the graph has a Hamiltonian path from s to t",
    );
    for (v, instances, center) in places {
        let components = vec![SystemBuilder::component(&comp, center)];
        out.correspondence.insert(format!("v{v}"), Place { instances, components });
    }
    out.correspondence.insert(
        format!("v{}", graph.t),
        Place { instances: vec![last], components: vec![SystemBuilder::component(&comp, t_node)] },
    );
    out.metadata.insert("reduction".into(), "hampath-spiral".into());
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{distant_opening, labeled_ttsu, paired_undirected_single_use, visiting_harder};
    use crate::solve::{oracle_decide, Decision};

    fn decide(out: &ReductionOutput) -> bool {
        let r = oracle_decide(&out.system, &out.objective, 1, 2_000_000).unwrap();
        assert_ne!(r.decision, Decision::BudgetExceeded);
        r.is_yes()
    }

    /// s -> a, a -> b twice, b -> t: every interior vertex has legal degrees.
    fn doubled_middle() -> Digraph {
        Digraph::new(4, vec![(0, 1), (1, 2), (1, 2), (2, 3)], 0, 3).unwrap()
    }

    #[test]
    fn directed_small() {
        let g = visiting_harder();
        let d = doubled_middle();
        assert!(d.has_hamiltonian_path());
        assert!(decide(&reduce_hampath_directed(&d, &g).unwrap()));
    }

    #[test]
    fn degree_checks() {
        let bad = Digraph::new(5, vec![(0, 1), (2, 1), (3, 1), (1, 4)], 0, 4).unwrap();
        assert!(matches!(reduce_hampath_directed(&bad, &visiting_harder()), Err(Error::BadDegreeSequence(_))));
        let path = Graph::new(4, vec![(0, 1), (1, 2), (2, 3)], 0, 3).unwrap();
        assert!(matches!(
            reduce_hampath_spiral(&path, &paired_undirected_single_use()),
            Err(Error::BadDegreeSequence(_))
        ));
    }

    #[test]
    fn gadget_gates() {
        let d = doubled_middle();
        assert!(matches!(reduce_hampath_directed(&d, &labeled_ttsu()), Err(Error::WrongGadgetClass(_))));
        assert!(matches!(reduce_hampath_directed(&d, &distant_opening()), Err(Error::WrongGadgetClass(_))));
        assert!(matches!(reduce_hampath_undir_close(&d, &paired_undirected_single_use()), Err(Error::WrongGadgetClass(_))));
        assert!(matches!(reduce_hampath_spiral(&Graph::new(2, vec![(0, 1)], 0, 1).unwrap(), &labeled_ttsu()), Err(Error::WrongGadgetClass(_))));
    }

    #[test]
    fn undirected_close_small() {
        let g = labeled_ttsu();
        assert!(decide(&reduce_hampath_undir_close(&doubled_middle(), &g).unwrap()));
    }

    #[test]
    fn spiral_small() {
        let g = paired_undirected_single_use();
        // s - a = b - t with a doubled middle edge.
        let yes = Graph::new(4, vec![(0, 1), (1, 2), (1, 2), (2, 3)], 0, 3).unwrap();
        assert!(decide(&reduce_hampath_spiral(&yes, &g).unwrap()));
        let direct = Graph::new(2, vec![(0, 1)], 0, 1).unwrap();
        assert!(decide(&reduce_hampath_spiral(&direct, &g).unwrap()));
    }
}
