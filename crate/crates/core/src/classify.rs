//! Structural predicates and complexity labels.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::Serialize;

use crate::catalog;
use crate::error::{Error, Result};
use crate::gadget::{tunnel_decomposition, Direction, Gadget, Transition, TunnelStructure};

pub fn is_deterministic(g: &Gadget) -> bool {
    nondeterminism_witness(g).is_none()
}

/// A `(state, location)` with two exits.
pub fn nondeterminism_witness(g: &Gadget) -> Option<(usize, usize)> {
    for s in 0..g.state_count() {
        let mut seen = BTreeSet::new();
        for &i in g.transitions_from(s) {
            if !seen.insert(g.transition(i).from_loc) {
                return Some((s, g.transition(i).from_loc));
            }
        }
    }
    None
}

pub fn is_reversible(g: &Gadget) -> bool {
    irreversibility_witness(g).is_none()
}

/// A transition whose reverse is missing.
pub fn irreversibility_witness(g: &Gadget) -> Option<usize> {
    (0..g.transitions().len()).find(|&i| g.find_transition(&g.transition(i).reversed()).is_none())
}

/// Whether the transition graph on `(state, location)` pairs is a partial
/// matching: symmetric, with every vertex on at most one edge.
pub fn is_partial_matching(g: &Gadget) -> bool {
    let mut out: HashMap<(usize, usize), Vec<(usize, usize)>> = HashMap::new();
    let mut inn: HashMap<(usize, usize), usize> = HashMap::new();
    for t in g.transitions() {
        out.entry((t.from_state, t.from_loc)).or_default().push((t.to_state, t.to_loc));
        *inn.entry((t.to_state, t.to_loc)).or_default() += 1;
    }
    out.values().all(|v| v.len() == 1)
        && inn.values().all(|&c| c == 1)
        && out.iter().all(|(u, v)| out.get(&v[0]).is_some_and(|w| w[0] == *u))
}

fn successors(g: &Gadget) -> Vec<Vec<usize>> {
    let mut succ = vec![Vec::new(); g.state_count()];
    for t in g.transitions() {
        succ[t.from_state].push(t.to_state);
    }
    for v in &mut succ {
        v.sort_unstable();
        v.dedup();
    }
    succ
}

/// Strongly connected components, each sorted, listed in topological order
/// of the quotient (sources first).
pub fn strongly_connected_components(succ: &[Vec<usize>]) -> Vec<Vec<usize>> {
    struct Tarjan<'a> {
        succ: &'a [Vec<usize>],
        index: Vec<Option<usize>>,
        low: Vec<usize>,
        on_stack: Vec<bool>,
        stack: Vec<usize>,
        next: usize,
        out: Vec<Vec<usize>>,
    }
    impl Tarjan<'_> {
        fn visit(&mut self, v: usize) {
            self.index[v] = Some(self.next);
            self.low[v] = self.next;
            self.next += 1;
            self.stack.push(v);
            self.on_stack[v] = true;
            for &w in &self.succ[v] {
                match self.index[w] {
                    None => {
                        self.visit(w);
                        self.low[v] = self.low[v].min(self.low[w]);
                    }
                    Some(iw) if self.on_stack[w] => self.low[v] = self.low[v].min(iw),
                    _ => {}
                }
            }
            if Some(self.low[v]) == self.index[v] {
                let mut comp = Vec::new();
                loop {
                    let w = self.stack.pop().expect("tarjan stack");
                    self.on_stack[w] = false;
                    comp.push(w);
                    if w == v {
                        break;
                    }
                }
                comp.sort_unstable();
                self.out.push(comp);
            }
        }
    }
    let n = succ.len();
    let mut t = Tarjan {
        succ,
        index: vec![None; n],
        low: vec![0; n],
        on_stack: vec![false; n],
        stack: Vec::new(),
        next: 0,
        out: Vec::new(),
    };
    for v in 0..n {
        if t.index[v].is_none() {
            t.visit(v);
        }
    }
    t.out.reverse();
    t.out
}

/// A directed cycle of states, if any; a self-loop is a cycle of length one.
pub fn dag_cycle(g: &Gadget) -> Option<Vec<usize>> {
    let succ = successors(g);
    for s in 0..g.state_count() {
        if succ[s].contains(&s) {
            return Some(vec![s]);
        }
    }
    let comp = strongly_connected_components(&succ).into_iter().find(|c| c.len() > 1)?;
    // Walk inside the component until a state repeats.
    let inside: BTreeSet<usize> = comp.iter().copied().collect();
    let mut path = vec![comp[0]];
    let mut pos = HashMap::from([(comp[0], 0)]);
    loop {
        let cur = *path.last().expect("nonempty");
        let next = *succ[cur].iter().find(|x| inside.contains(x)).expect("strongly connected");
        if let Some(&p) = pos.get(&next) {
            return Some(path[p..].to_vec());
        }
        pos.insert(next, path.len());
        path.push(next);
    }
}

pub fn is_dag(g: &Gadget) -> bool {
    dag_cycle(g).is_none()
}

/// Directions of each tunnel traversable in `state`.
pub fn traversable_tunnels(g: &Gadget, tunnels: &TunnelStructure, state: usize) -> BTreeSet<(usize, Direction)> {
    g.transitions_from(state).iter().map(|&i| tunnels.classify(g.transition(i))).collect()
}

fn tunnels_of(g: &Gadget, ts: &TunnelStructure, state: usize) -> BTreeSet<usize> {
    traversable_tunnels(g, ts, state).into_iter().map(|(t, _)| t).collect()
}

fn ever_traversable(g: &Gadget, ts: &TunnelStructure, state: usize) -> BTreeSet<usize> {
    let reach = g.reachable_states(state);
    (0..g.state_count()).filter(|&s| reach[s]).flat_map(|s| tunnels_of(g, ts, s)).collect()
}

pub fn is_true_2_tunnel_state(g: &Gadget, ts: &TunnelStructure, state: usize) -> bool {
    ever_traversable(g, ts, state).len() >= 2
}

pub fn is_true_2_tunnel(g: &Gadget) -> Result<bool> {
    let ts = tunnel_decomposition(g)?;
    Ok((0..g.state_count()).any(|s| is_true_2_tunnel_state(g, &ts, s)))
}

/// True 2-tunnel states from which no strictly reachable state is true
/// 2-tunnel.
pub fn final_true_2_tunnel_states(g: &Gadget) -> Result<Vec<usize>> {
    if !is_dag(g) {
        return Err(Error::NotDag);
    }
    let ts = tunnel_decomposition(g)?;
    let t2: Vec<bool> = (0..g.state_count()).map(|s| is_true_2_tunnel_state(g, &ts, s)).collect();
    Ok((0..g.state_count())
        .filter(|&s| {
            if !t2[s] {
                return false;
            }
            let reach = g.reachable_states(s);
            (0..g.state_count()).all(|x| x == s || !reach[x] || !t2[x])
        })
        .collect())
}

/// A transition across one tunnel that gives another tunnel a new direction.
pub fn distant_opening_witness(g: &Gadget) -> Result<Option<usize>> {
    let ts = tunnel_decomposition(g)?;
    Ok(find_distant_change(g, &ts, true))
}

pub fn has_distant_opening(g: &Gadget) -> Result<bool> {
    Ok(distant_opening_witness(g)?.is_some())
}

fn find_distant_change(g: &Gadget, ts: &TunnelStructure, only_openings: bool) -> Option<usize> {
    let sets: Vec<_> = (0..g.state_count()).map(|s| traversable_tunnels(g, ts, s)).collect();
    g.transitions().iter().position(|t| {
        let (tun, _) = ts.classify(t);
        let before: BTreeSet<_> = sets[t.from_state].iter().filter(|(x, _)| *x != tun).collect();
        let after: BTreeSet<_> = sets[t.to_state].iter().filter(|(x, _)| *x != tun).collect();
        if only_openings {
            after.difference(&before).next().is_some()
        } else {
            before != after
        }
    })
}

/// A transition across one tunnel that changes the traversable directions of
/// another.
pub fn interacting_witness(g: &Gadget) -> Result<Option<usize>> {
    let ts = tunnel_decomposition(g)?;
    Ok(find_distant_change(g, &ts, false))
}

pub fn has_interacting_tunnels(g: &Gadget) -> Result<bool> {
    Ok(interacting_witness(g)?.is_some())
}

/// Forced distant closing: in some state `S`, every transition across
/// `(tunnel, dir)` leads to a state where a direction `(t2, d2)` of another
/// tunnel, traversable in `S`, is no longer traversable.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ForcedClosing {
    pub state: usize,
    pub across: (usize, Direction),
    pub closed: (usize, Direction),
}

pub fn forced_distant_closing(g: &Gadget) -> Result<Option<ForcedClosing>> {
    let ts = tunnel_decomposition(g)?;
    for s in 0..g.state_count() {
        let here = traversable_tunnels(g, &ts, s);
        for &across in &here {
            let targets: Vec<usize> = g
                .transitions_from(s)
                .iter()
                .map(|&i| g.transition(i))
                .filter(|t| ts.classify(t) == across)
                .map(|t| t.to_state)
                .collect();
            for &closed in &here {
                if closed.0 == across.0 {
                    continue;
                }
                if targets.iter().all(|&x| !traversable_tunnels(g, &ts, x).contains(&closed)) {
                    return Ok(Some(ForcedClosing { state: s, across, closed }));
                }
            }
        }
    }
    Ok(None)
}

/// Traversability never decreases along a transition.
pub fn is_monotonically_opening(g: &Gadget) -> bool {
    monotone_violation(g, true).is_none()
}

/// Traversability never increases along a transition.
pub fn is_monotonically_closing(g: &Gadget) -> bool {
    monotone_violation(g, false).is_none()
}

fn monotone_violation(g: &Gadget, opening: bool) -> Option<usize> {
    let sets: Vec<_> = (0..g.state_count()).map(|s| g.traversals(s)).collect();
    g.transitions().iter().position(|t| {
        let (a, b) = (&sets[t.from_state], &sets[t.to_state]);
        if opening {
            !a.is_subset(b)
        } else {
            !b.is_subset(a)
        }
    })
}

/// Sub-gadget induced by a set of states: those states and the transitions
/// among them.
pub fn induced_subgadget(g: &Gadget, states: &[usize]) -> Gadget {
    let index: HashMap<usize, usize> = states.iter().enumerate().map(|(i, &s)| (s, i)).collect();
    let transitions = g
        .transitions()
        .iter()
        .filter_map(|t| {
            Some(Transition::new(*index.get(&t.from_state)?, t.from_loc, t.to_loc, *index.get(&t.to_state)?))
        })
        .collect();
    let names = states.iter().map(|&s| g.states()[s].clone()).collect();
    Gadget::new(format!("{}[block]", g.name()), names, g.locations().to_vec(), transitions)
        .expect("induced sub-gadget of a valid gadget")
}

/// Partition of a gadget's states into blocks joined acyclically.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Decomposition {
    /// Blocks in topological order.
    pub blocks: Vec<Vec<usize>>,
    pub block_of: Vec<usize>,
    /// Transitions between different blocks.
    pub dag_like: Vec<usize>,
}

/// Blocks are the strongly connected components; `None` if some block fails
/// `family`.
pub fn npredag_decomposition(g: &Gadget, family: impl Fn(&Gadget) -> bool) -> Option<Decomposition> {
    let blocks = strongly_connected_components(&successors(g));
    let mut block_of = vec![0; g.state_count()];
    for (b, states) in blocks.iter().enumerate() {
        for &s in states {
            block_of[s] = b;
        }
    }
    if !blocks.iter().all(|b| family(&induced_subgadget(g, b))) {
        return None;
    }
    let dag_like = g
        .transitions()
        .iter()
        .enumerate()
        .filter(|(_, t)| block_of[t.from_state] != block_of[t.to_state])
        .map(|(i, _)| i)
        .collect();
    Some(Decomposition { blocks, block_of, dag_like })
}

/// Family check for loop-DAG gadgets: every block is a single state.
pub fn one_state_family(g: &Gadget) -> bool {
    g.state_count() == 1
}

/// Whether two gadgets are equal up to renaming states and locations.
pub fn isomorphic(g: &Gadget, h: &Gadget) -> bool {
    if g.state_count() != h.state_count()
        || g.location_count() != h.location_count()
        || g.transitions().len() != h.transitions().len()
    {
        return false;
    }
    let target: BTreeSet<Transition> = h.transitions().iter().copied().collect();
    let mut perm: Vec<usize> = (0..g.location_count()).collect();
    loop {
        if states_match(g, h, &perm, &target) {
            return true;
        }
        if !next_permutation(&mut perm) {
            return false;
        }
    }
}

fn next_permutation(p: &mut [usize]) -> bool {
    let n = p.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

fn states_match(g: &Gadget, h: &Gadget, loc: &[usize], target: &BTreeSet<Transition>) -> bool {
    let sig = |x: &Gadget, s: usize, map: Option<&[usize]>| -> Vec<(usize, usize)> {
        let mut v: Vec<_> = x
            .transitions_from(s)
            .iter()
            .map(|&i| {
                let t = x.transition(i);
                match map {
                    Some(m) => (m[t.from_loc], m[t.to_loc]),
                    None => (t.from_loc, t.to_loc),
                }
            })
            .collect();
        v.sort_unstable();
        v
    };
    let gs: Vec<_> = (0..g.state_count()).map(|s| sig(g, s, Some(loc))).collect();
    let hs: Vec<_> = (0..h.state_count()).map(|s| sig(h, s, None)).collect();
    let mut assign = vec![usize::MAX; g.state_count()];
    let mut used = vec![false; h.state_count()];
    fn go(
        s: usize,
        g: &Gadget,
        loc: &[usize],
        gs: &[Vec<(usize, usize)>],
        hs: &[Vec<(usize, usize)>],
        assign: &mut Vec<usize>,
        used: &mut Vec<bool>,
        target: &BTreeSet<Transition>,
    ) -> bool {
        if s == assign.len() {
            return g.transitions().iter().all(|t| {
                target.contains(&Transition::new(assign[t.from_state], loc[t.from_loc], loc[t.to_loc], assign[t.to_state]))
            });
        }
        for c in 0..used.len() {
            if used[c] || gs[s] != hs[c] {
                continue;
            }
            assign[s] = c;
            used[c] = true;
            // Check transitions among already-assigned states.
            let ok = g.transitions().iter().all(|t| {
                t.from_state > s
                    || t.to_state > s
                    || target.contains(&Transition::new(
                        assign[t.from_state],
                        loc[t.from_loc],
                        loc[t.to_loc],
                        assign[t.to_state],
                    ))
            });
            if ok && go(s + 1, g, loc, gs, hs, assign, used, target) {
                return true;
            }
            used[c] = false;
        }
        assign[s] = usize::MAX;
        false
    }
    go(0, g, loc, &gs, &hs, &mut assign, &mut used, target)
}

/// Boolean predicate outcome with an optional human-checkable witness.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Predicate {
    pub value: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

/// A complexity label and the result that produced it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Label {
    pub label: String,
    pub rule: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClassificationReport {
    pub gadget: String,
    pub predicates: BTreeMap<String, Predicate>,
    pub labels: BTreeMap<String, Label>,
}

fn label(label: &str, rule: &str) -> Label {
    Label { label: label.into(), rule: rule.into() }
}

fn tunnel_name(g: &Gadget, ts: &TunnelStructure, t: usize, d: Direction) -> String {
    let (a, b) = ts.endpoints(t, d);
    format!("{}->{}", g.locations()[a], g.locations()[b])
}

/// Runs every predicate and applies the known dichotomies.
pub fn classify(g: &Gadget) -> ClassificationReport {
    let mut p: BTreeMap<String, Predicate> = BTreeMap::new();
    let mut put = |name: &str, value: bool, witness: Option<String>| {
        p.insert(name.to_string(), Predicate { value, witness });
    };
    let states = |v: &[usize]| v.iter().map(|&s| g.states()[s].clone()).collect::<Vec<_>>().join(", ");

    let det = nondeterminism_witness(g);
    put(
        "deterministic",
        det.is_none(),
        det.map(|(s, l)| format!("state {} has two exits from {}", g.states()[s], g.locations()[l])),
    );
    let rev = irreversibility_witness(g);
    put("reversible", rev.is_none(), rev.map(|i| format!("{} has no reverse", g.describe(i))));
    let cycle = dag_cycle(g);
    put("dag", cycle.is_none(), cycle.as_ref().map(|c| format!("cycle through {}", states(c))));
    let mo = monotone_violation(g, true);
    put("monotone_opening", mo.is_none(), mo.map(|i| format!("{} loses a traversal", g.describe(i))));
    let mc = monotone_violation(g, false);
    put("monotone_closing", mc.is_none(), mc.map(|i| format!("{} gains a traversal", g.describe(i))));

    let tunnels = tunnel_decomposition(g);
    put("tunnel_gadget", tunnels.is_ok(), tunnels.as_ref().err().map(|e| e.to_string()));
    let mut facts = Facts { one_state: g.state_count() == 1, ..Facts::default() };
    facts.deterministic = det.is_none();
    facts.reversible = rev.is_none();
    facts.dag = cycle.is_none();
    if let Ok(ts) = &tunnels {
        let t2 = (0..g.state_count()).find(|&s| is_true_2_tunnel_state(g, ts, s));
        put("true_2_tunnel", t2.is_some(), t2.map(|s| format!("state {}", g.states()[s])));
        facts.true2 = t2.is_some();
        if facts.dag {
            let fin = final_true_2_tunnel_states(g).expect("dag tunnel gadget");
            put("final_true_2_tunnel", !fin.is_empty(), Some(format!("states [{}]", states(&fin))));
        }
        let dop = find_distant_change(g, ts, true);
        put("distant_opening", dop.is_some(), dop.map(|i| g.describe(i)));
        facts.distant_opening = dop.is_some();
        let inter = find_distant_change(g, ts, false);
        put("interacting_tunnels", inter.is_some(), inter.map(|i| g.describe(i)));
        facts.interacting = inter.is_some();
        let fdc = forced_distant_closing(g).expect("tunnel gadget");
        put(
            "forced_distant_closing",
            fdc.is_some(),
            fdc.map(|f| {
                format!(
                    "state {}: crossing {} always closes {}",
                    g.states()[f.state],
                    tunnel_name(g, ts, f.across.0, f.across.1),
                    tunnel_name(g, ts, f.closed.0, f.closed.1)
                )
            }),
        );
        facts.forced_closing = fdc.is_some();
        if facts.one_state {
            let mut directed = 0;
            let mut live = 0;
            for t in 0..ts.len() {
                let dirs: BTreeSet<Direction> =
                    traversable_tunnels(g, ts, 0).into_iter().filter(|(x, _)| *x == t).map(|(_, d)| d).collect();
                if !dirs.is_empty() {
                    live += 1;
                    if dirs.len() == 1 {
                        directed += 1;
                    }
                }
            }
            facts.one_state_counts = Some((directed, live));
        }
    }
    let ldag = npredag_decomposition(g, one_state_family);
    put(
        "ldag",
        ldag.is_some(),
        ldag.as_ref().map(|d| format!("{} singleton blocks, {} dag-like transitions", d.blocks.len(), d.dag_like.len())),
    );
    facts.ldag = ldag.is_some();
    facts.ttsu = isomorphic(g, &catalog::labeled_ttsu());
    facts.rdni = isomorphic(g, &catalog::rdni());
    put("isomorphic_to_ttsu", facts.ttsu, None);
    put("isomorphic_to_rdni", facts.rdni, None);

    let mut labels = BTreeMap::new();
    labels.insert("universalTraversal".to_string(), traversal_label(&facts, tunnels.is_ok()));
    let reach = reachability_label(&facts, tunnels.is_ok());
    labels.insert("reconfiguration".to_string(), reconfiguration_label(&facts, &reach));
    labels.insert("reachability".to_string(), reach);
    ClassificationReport { gadget: g.name().to_string(), predicates: p, labels }
}

#[derive(Default)]
struct Facts {
    one_state: bool,
    one_state_counts: Option<(usize, usize)>,
    deterministic: bool,
    reversible: bool,
    dag: bool,
    true2: bool,
    distant_opening: bool,
    forced_closing: bool,
    interacting: bool,
    ldag: bool,
    ttsu: bool,
    rdni: bool,
}

fn traversal_label(f: &Facts, tunnel: bool) -> Label {
    if !tunnel {
        return label("unknown", "not a tunnel gadget");
    }
    if let Some((directed, k)) = f.one_state_counts {
        return if directed == 0 {
            label("L", "one-state gadget without directed tunnels")
        } else if k <= 2 {
            label("NL-complete", "one-state gadget with a directed tunnel and at most two tunnels")
        } else {
            label("NP-complete", "one-state gadget with a directed tunnel and at least three tunnels")
        };
    }
    if f.dag && f.true2 {
        return label("NP-complete", "true 2-tunnel DAG gadget");
    }
    if f.reversible && f.deterministic {
        return if f.interacting {
            label("PSPACE-complete", "reversible deterministic gadget with interacting tunnels")
        } else {
            label("NL", "reversible deterministic gadget without interacting tunnels")
        };
    }
    label("unknown", "outside the characterized classes")
}

fn reachability_label(f: &Facts, tunnel: bool) -> Label {
    if !tunnel {
        return label("unknown", "not a tunnel gadget");
    }
    if f.dag {
        return if f.distant_opening || f.forced_closing {
            label("NP-complete", "DAG gadget with a distant opening or forced distant closing")
        } else {
            label("NL", "DAG gadget without distant openings or forced distant closings")
        };
    }
    if !f.interacting {
        return label("NL", "gadget without interacting tunnels");
    }
    if f.reversible && f.deterministic {
        return label("PSPACE-complete", "reversible deterministic gadget with interacting tunnels");
    }
    label("unknown", "outside the characterized classes")
}

fn reconfiguration_label(f: &Facts, reach: &Label) -> Label {
    if f.reversible && reach.label == "PSPACE-complete" {
        return label("PSPACE-complete", "reversible gadget with PSPACE-complete reachability");
    }
    if f.ttsu {
        return label("P", "labeled two-tunnel single-use gadget (Eulerian trail)");
    }
    if f.rdni {
        return label("PSPACE-complete", "12-state reversible deterministic non-interacting gadget");
    }
    if f.ldag || f.dag {
        return label("NP", "DAG-like transitions between one-state blocks");
    }
    label("unknown", "outside the characterized classes")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::*;

    #[test]
    fn catalog_expected_properties() {
        for e in catalog_list() {
            let r = classify(&e.gadget);
            for (name, want) in &e.expected {
                let got = r.predicates.get(*name).unwrap_or_else(|| panic!("{}: missing {name}", e.key));
                assert_eq!(got.value, *want, "{}: {name}", e.key);
            }
        }
    }

    #[test]
    fn traversable_tunnels_examples() {
        let l2t = locking_2_toggle();
        let ts = tunnel_decomposition(&l2t).unwrap();
        assert_eq!(traversable_tunnels(&l2t, &ts, 2).len(), 2);
        assert!(traversable_tunnels(&l2t, &ts, 2).iter().all(|&(_, d)| d == Direction::Forward));
        let ttsu = labeled_ttsu();
        let ts = tunnel_decomposition(&ttsu).unwrap();
        assert!(traversable_tunnels(&ttsu, &ts, 1).is_empty());
        let g = one_state_gadget(1, 1).unwrap();
        let ts = tunnel_decomposition(&g).unwrap();
        let dirs = traversable_tunnels(&g, &ts, 0);
        assert_eq!(dirs.iter().filter(|(t, _)| *t == 0).count(), 1);
        assert_eq!(dirs.iter().filter(|(t, _)| *t == 1).count(), 2);
    }

    #[test]
    fn final_states() {
        assert_eq!(final_true_2_tunnel_states(&labeled_ttsu()).unwrap(), vec![0]);
        assert_eq!(final_true_2_tunnel_states(&visiting_harder()).unwrap(), vec![0]);
        assert!(final_true_2_tunnel_states(&not_true_2_tunnel()).unwrap().is_empty());
        assert_eq!(final_true_2_tunnel_states(&one_toggle()), Err(Error::NotDag));
    }

    #[test]
    fn distant_opening_witness_in_l2t() {
        let g = locking_2_toggle();
        let i = distant_opening_witness(&g).unwrap().unwrap();
        let t = g.transition(i);
        // Returning up from a locked state reopens the other tunnel.
        assert_eq!(t.to_state, 2);
    }

    #[test]
    fn nondeterministic_state() {
        let g = Gadget::from_names("nd", &["1", "2"], &["a", "b"], &[("1", "a", "b", "1"), ("1", "a", "b", "2")])
            .unwrap();
        assert!(!is_deterministic(&g));
    }

    #[test]
    fn self_loop_is_a_cycle() {
        assert_eq!(dag_cycle(&one_state_gadget(0, 1).unwrap()), Some(vec![0]));
        assert!(is_dag(&labeled_ttsu()));
        assert!(!is_dag(&one_toggle()));
    }

    #[test]
    fn decompositions() {
        let ttsu = npredag_decomposition(&labeled_ttsu(), |_| true).unwrap();
        assert_eq!(ttsu.blocks.len(), 3);
        assert_eq!(ttsu.dag_like.len(), 4);
        let toggle = npredag_decomposition(&one_toggle(), |_| true).unwrap();
        assert_eq!(toggle.blocks, vec![vec![0, 1]]);
        assert!(toggle.dag_like.is_empty());
        assert!(npredag_decomposition(&one_toggle(), one_state_family).is_none());
        let ldag = Gadget::from_names(
            "ldag",
            &["1", "2"],
            &["a", "b"],
            &[("1", "a", "b", "1"), ("1", "b", "a", "2"), ("2", "a", "b", "2")],
        )
        .unwrap();
        let d = npredag_decomposition(&ldag, one_state_family).unwrap();
        assert_eq!(d.blocks, vec![vec![0], vec![1]]);
    }

    #[test]
    fn labels() {
        let lab = |g: &Gadget, p: &str| classify(g).labels[p].label.clone();
        assert_eq!(lab(&one_state_gadget(0, 3).unwrap(), "universalTraversal"), "L");
        assert_eq!(lab(&one_state_gadget(1, 2).unwrap(), "universalTraversal"), "NP-complete");
        assert_eq!(lab(&one_state_gadget(1, 1).unwrap(), "universalTraversal"), "NL-complete");
        assert_eq!(lab(&locking_2_toggle(), "universalTraversal"), "PSPACE-complete");
        assert_eq!(lab(&locking_2_toggle(), "reconfiguration"), "PSPACE-complete");
        assert_eq!(lab(&rdni(), "universalTraversal"), "NL");
        assert_eq!(lab(&rdni(), "reconfiguration"), "PSPACE-complete");
        assert_eq!(lab(&labeled_ttsu(), "reconfiguration"), "P");
        assert_eq!(lab(&visiting_harder(), "universalTraversal"), "NP-complete");
        assert_eq!(lab(&visiting_harder(), "reachability"), "NL");
        assert_eq!(lab(&directed_single_use(), "universalTraversal"), "unknown");
    }

    #[test]
    fn isomorphism_respects_relabeling() {
        let g = labeled_ttsu();
        let renamed = Gadget::from_names(
            "x",
            &["t2", "open", "t1"],
            &["q", "p", "s", "r"],
            &[("open", "p", "q", "t1"), ("open", "q", "p", "t1"), ("open", "r", "s", "t2"), ("open", "s", "r", "t2")],
        )
        .unwrap();
        assert!(isomorphic(&g, &renamed));
        assert!(!isomorphic(&g, &visiting_harder()));
        assert!(isomorphic(&rdni(), &rdni()));
    }
}
