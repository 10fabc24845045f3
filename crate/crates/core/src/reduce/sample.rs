//! Enumerators and seeded samplers of small source instances.

use rand::seq::SliceRandom;
use rand::Rng;

use super::source::{CnfFormula, Digraph, Graph};
use crate::gadget::Gadget;
use crate::system::{Node, System, SystemBuilder};

/// Every 3CNF over exactly `vars` variables with `clauses` clauses, up to the
/// order of clauses and of literals within a clause.
pub fn all_cnfs(vars: usize, clauses: usize) -> Vec<CnfFormula> {
    let lits: Vec<i32> = (1..=vars as i32).flat_map(|v| [v, -v]).collect();
    let mut triples = Vec::new();
    for i in 0..lits.len() {
        for j in i..lits.len() {
            for k in j..lits.len() {
                triples.push([lits[i], lits[j], lits[k]]);
            }
        }
    }
    let mut out = Vec::new();
    let mut pick = vec![0usize; clauses];
    loop {
        out.push(CnfFormula { variable_count: vars, clauses: pick.iter().map(|&i| triples[i]).collect() });
        // Next nondecreasing index tuple.
        let mut k = clauses;
        loop {
            if k == 0 {
                return out;
            }
            k -= 1;
            if pick[k] + 1 < triples.len() {
                pick[k] += 1;
                for m in k + 1..clauses {
                    pick[m] = pick[k];
                }
                break;
            }
        }
    }
}

pub fn random_cnf(rng: &mut impl Rng, max_vars: usize, max_clauses: usize) -> CnfFormula {
    let vars = rng.gen_range(1..=max_vars);
    let clauses = rng.gen_range(1..=max_clauses);
    let lit = |rng: &mut dyn rand::RngCore| {
        let v = rng.gen_range(1..=vars as i32);
        if rng.gen_bool(0.5) {
            v
        } else {
            -v
        }
    };
    let clauses = (0..clauses).map(|_| [lit(rng), lit(rng), lit(rng)]).collect();
    CnfFormula { variable_count: vars, clauses }
}

/// Every simple digraph without loops on `n` vertices, with `s = 0` and
/// `t = n - 1`.
pub fn all_digraphs(n: usize) -> Vec<Digraph> {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (0..n).filter(move |&v| v != u).map(move |v| (u, v))).collect();
    (0..1u64 << pairs.len())
        .map(|m| Digraph {
            vertex_count: n,
            arcs: (0..pairs.len()).filter(|&i| m >> i & 1 == 1).map(|i| pairs[i]).collect(),
            s: 0,
            t: n - 1,
        })
        .collect()
}

/// Pairs out-stubs with in-stubs uniformly, retrying until no loop appears.
fn match_stubs(rng: &mut impl Rng, outs: &[usize], ins: &[usize]) -> Option<Vec<(usize, usize)>> {
    for _ in 0..100 {
        let mut ins = ins.to_vec();
        ins.shuffle(rng);
        let arcs: Vec<(usize, usize)> = outs.iter().copied().zip(ins).collect();
        if arcs.iter().all(|&(u, v)| u != v) {
            return Some(arcs);
        }
    }
    None
}

/// A random digraph legal for the directed Hamiltonian reductions: interior
/// vertices have in/out degree (1,2) or (2,1), s has out-degree 1 or 2 and no
/// in-arcs, t has in-degree 1 or 2 and no out-arcs. Multi-arcs may appear.
pub fn random_legal_digraph(rng: &mut impl Rng, max_n: usize) -> Digraph {
    loop {
        let n = rng.gen_range(2..=max_n);
        let (s, t) = (0, n - 1);
        let mut outs = Vec::new();
        let mut ins = Vec::new();
        for _ in 0..rng.gen_range(1..=2) {
            outs.push(s);
        }
        for _ in 0..rng.gen_range(1..=2) {
            ins.push(t);
        }
        for v in 1..n - 1 {
            let (i, o) = if rng.gen_bool(0.5) { (1, 2) } else { (2, 1) };
            ins.extend(std::iter::repeat_n(v, i));
            outs.extend(std::iter::repeat_n(v, o));
        }
        if ins.len() != outs.len() {
            continue;
        }
        if let Some(arcs) = match_stubs(rng, &outs, &ins) {
            return Digraph { vertex_count: n, arcs, s, t };
        }
    }
}

/// A random multigraph with s and t of degree 1 and all other vertices of
/// degree 3.
pub fn random_legal_cubic(rng: &mut impl Rng, max_n: usize) -> Graph {
    loop {
        let interior = 2 * rng.gen_range(0..=(max_n - 2) / 2);
        let n = interior + 2;
        let (s, t) = (0, n - 1);
        let mut stubs = vec![s, t];
        for v in 1..n - 1 {
            stubs.extend([v, v, v]);
        }
        stubs.shuffle(rng);
        let edges: Vec<(usize, usize)> = stubs.chunks(2).map(|c| (c[0], c[1])).collect();
        if edges.iter().all(|&(u, v)| u != v) {
            return Graph { vertex_count: n, edges, s, t };
        }
    }
}

/// A random digraph on 2..=max_n vertices, each arc present with
/// probability 0.3, s = 0 and t = n - 1.
pub fn random_digraph(rng: &mut impl Rng, max_n: usize) -> Digraph {
    let n = rng.gen_range(2..=max_n.max(2));
    let arcs = (0..n).flat_map(|u| (0..n).map(move |v| (u, v))).filter(|&(u, v)| u != v).collect::<Vec<_>>();
    let arcs = arcs.into_iter().filter(|_| rng.gen_bool(0.3)).collect();
    Digraph { vertex_count: n, arcs, s: 0, t: n - 1 }
}

/// 1..=max_gadgets instances drawn from `gadgets` in random states, every
/// location on one of 2..=2k+1 nodes, and distinct random start and target.
pub fn random_system(rng: &mut impl Rng, gadgets: &[Gadget], max_gadgets: usize) -> System {
    let k = rng.gen_range(1..=max_gadgets.max(1));
    let mut b = SystemBuilder::new();
    let nodes: Vec<Node> = (0..rng.gen_range(2..=2 * k + 1)).map(|_| b.node()).collect();
    for _ in 0..k {
        let g = &gadgets[rng.gen_range(0..gadgets.len())];
        let i = b.add_instance(g, rng.gen_range(0..g.state_count()));
        for loc in 0..g.location_count() {
            b.attach(i, loc, nodes[rng.gen_range(0..nodes.len())]);
        }
    }
    let s = rng.gen_range(0..nodes.len());
    let t = (s + rng.gen_range(1..nodes.len())) % nodes.len();
    b.set_start(nodes[s]);
    b.set_target(nodes[t]);
    b.build().expect("random wiring is valid").0
}
