//! Gadgets, their transition relation, and tunnel decomposition.

use std::collections::{BTreeSet, HashMap, HashSet};

use crate::error::{Error, Result};

/// One arc of a gadget's transition graph: entering at `from_loc` in state
/// `from_state` and exiting at `to_loc` leaves the gadget in `to_state`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Transition {
    pub from_state: usize,
    pub from_loc: usize,
    pub to_loc: usize,
    pub to_state: usize,
}

impl Transition {
    pub fn new(from_state: usize, from_loc: usize, to_loc: usize, to_state: usize) -> Self {
        Self { from_state, from_loc, to_loc, to_state }
    }

    /// The transition that undoes this one.
    pub fn reversed(&self) -> Self {
        Self {
            from_state: self.to_state,
            from_loc: self.to_loc,
            to_loc: self.from_loc,
            to_state: self.from_state,
        }
    }
}

/// A finite-state gadget specified by its transition graph.
///
/// States and locations are referred to by index; their names are kept for
/// serialization and diagnostics.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Gadget {
    name: String,
    states: Vec<String>,
    locations: Vec<String>,
    transitions: Vec<Transition>,
    by_state: Vec<Vec<usize>>,
}

impl Gadget {
    pub fn new(
        name: impl Into<String>,
        states: Vec<String>,
        locations: Vec<String>,
        transitions: Vec<Transition>,
    ) -> Result<Self> {
        if states.is_empty() || locations.is_empty() {
            return Err(Error::EmptyGadget);
        }
        check_unique(&states, "state")?;
        check_unique(&locations, "location")?;
        let mut seen = HashSet::new();
        let mut by_state = vec![Vec::new(); states.len()];
        for (i, t) in transitions.iter().enumerate() {
            if t.from_state >= states.len() || t.to_state >= states.len() {
                return Err(Error::UnknownId(format!("state index in {t:?}")));
            }
            if t.from_loc >= locations.len() || t.to_loc >= locations.len() {
                return Err(Error::UnknownId(format!("location index in {t:?}")));
            }
            if !seen.insert(*t) {
                return Err(Error::DuplicateTransition(format!(
                    "({}, {}, {}, {})",
                    states[t.from_state], locations[t.from_loc], locations[t.to_loc], states[t.to_state]
                )));
            }
            by_state[t.from_state].push(i);
        }
        Ok(Self { name: name.into(), states, locations, transitions, by_state })
    }

    /// Builds a gadget from string ids, resolving every transition endpoint.
    pub fn from_names(
        name: &str,
        states: &[&str],
        locations: &[&str],
        transitions: &[(&str, &str, &str, &str)],
    ) -> Result<Self> {
        let states: Vec<String> = states.iter().map(|s| s.to_string()).collect();
        let locations: Vec<String> = locations.iter().map(|s| s.to_string()).collect();
        let resolved = transitions
            .iter()
            .map(|(s, a, b, s2)| {
                Ok(Transition::new(
                    index_of(&states, s, "state")?,
                    index_of(&locations, a, "location")?,
                    index_of(&locations, b, "location")?,
                    index_of(&states, s2, "state")?,
                ))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(name, states, locations, resolved)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn locations(&self) -> &[String] {
        &self.locations
    }

    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn location_count(&self) -> usize {
        self.locations.len()
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    pub fn transition(&self, idx: usize) -> &Transition {
        &self.transitions[idx]
    }

    /// Indices of the transitions leaving `state`, in declaration order.
    pub fn transitions_from(&self, state: usize) -> &[usize] {
        &self.by_state[state]
    }

    pub fn state_index(&self, name: &str) -> Option<usize> {
        self.states.iter().position(|s| s == name)
    }

    pub fn location_index(&self, name: &str) -> Option<usize> {
        self.locations.iter().position(|s| s == name)
    }

    pub fn find_transition(&self, t: &Transition) -> Option<usize> {
        self.by_state
            .get(t.from_state)?
            .iter()
            .copied()
            .find(|&i| self.transitions[i] == *t)
    }

    /// Ordered location pairs traversable in `state`.
    pub fn traversals(&self, state: usize) -> BTreeSet<(usize, usize)> {
        self.by_state[state]
            .iter()
            .map(|&i| (self.transitions[i].from_loc, self.transitions[i].to_loc))
            .collect()
    }

    /// Human-readable form of a transition.
    pub fn describe(&self, idx: usize) -> String {
        let t = &self.transitions[idx];
        format!(
            "({}, {}, {}, {})",
            self.states[t.from_state], self.locations[t.from_loc], self.locations[t.to_loc], self.states[t.to_state]
        )
    }

    /// States reachable from `state` in the state-transition graph, including itself.
    pub fn reachable_states(&self, state: usize) -> Vec<bool> {
        let mut seen = vec![false; self.states.len()];
        let mut stack = vec![state];
        seen[state] = true;
        while let Some(s) = stack.pop() {
            for &i in &self.by_state[s] {
                let next = self.transitions[i].to_state;
                if !seen[next] {
                    seen[next] = true;
                    stack.push(next);
                }
            }
        }
        seen
    }

    /// Copy of the gadget with `transitions` replaced.
    pub fn with_transitions(&self, transitions: Vec<Transition>) -> Result<Self> {
        Self::new(self.name.clone(), self.states.clone(), self.locations.clone(), transitions)
    }
}

fn check_unique(names: &[String], kind: &str) -> Result<()> {
    let mut seen = HashSet::new();
    for n in names {
        if !seen.insert(n.as_str()) {
            return Err(Error::DuplicateId(format!("{kind} {n}")));
        }
    }
    Ok(())
}

fn index_of(names: &[String], name: &str, kind: &str) -> Result<usize> {
    names
        .iter()
        .position(|n| n == name)
        .ok_or_else(|| Error::UnknownId(format!("{kind} {name}")))
}

/// Direction of a traversal across a tunnel, relative to the tunnel's
/// declared `(first, second)` location order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
pub enum Direction {
    Forward,
    Backward,
}

impl Direction {
    pub fn flip(self) -> Self {
        match self {
            Direction::Forward => Direction::Backward,
            Direction::Backward => Direction::Forward,
        }
    }
}

/// A partition of a gadget's locations into tunnels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TunnelStructure {
    pairs: Vec<(usize, usize)>,
    tunnel_of: Vec<usize>,
}

impl TunnelStructure {
    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn tunnel_of(&self, loc: usize) -> usize {
        self.tunnel_of[loc]
    }

    /// Tunnel and direction of a transition.
    pub fn classify(&self, t: &Transition) -> (usize, Direction) {
        let tunnel = self.tunnel_of[t.from_loc];
        let dir = if self.pairs[tunnel].0 == t.from_loc && t.from_loc != t.to_loc {
            Direction::Forward
        } else if t.from_loc == t.to_loc {
            // A location-to-itself traversal has no orientation; call it forward
            // when it sits on the first endpoint.
            if self.pairs[tunnel].0 == t.from_loc {
                Direction::Forward
            } else {
                Direction::Backward
            }
        } else {
            Direction::Backward
        };
        (tunnel, dir)
    }

    /// Entrance and exit locations of a tunnel traversed in `dir`.
    pub fn endpoints(&self, tunnel: usize, dir: Direction) -> (usize, usize) {
        let (a, b) = self.pairs[tunnel];
        match dir {
            Direction::Forward => (a, b),
            Direction::Backward => (b, a),
        }
    }
}

/// Splits a gadget's locations into tunnels.
///
/// Locations joined by some transition must form pairs; leftover singleton
/// locations are paired with each other in declaration order as untraversable
/// tunnels.
pub fn tunnel_decomposition(gadget: &Gadget) -> Result<TunnelStructure> {
    let n = gadget.location_count();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        let mut c = x;
        while p[c] != r {
            let next = p[c];
            p[c] = r;
            c = next;
        }
        r
    }
    for t in gadget.transitions() {
        let (a, b) = (find(&mut parent, t.from_loc), find(&mut parent, t.to_loc));
        if a != b {
            parent[a.max(b)] = a.min(b);
        }
    }
    let mut groups: HashMap<usize, Vec<usize>> = HashMap::new();
    for loc in 0..n {
        let r = find(&mut parent, loc);
        groups.entry(r).or_default().push(loc);
    }
    let mut pairs = Vec::new();
    let mut singles = Vec::new();
    let mut roots: Vec<_> = groups.keys().copied().collect();
    roots.sort_unstable();
    for r in roots {
        let g = &groups[&r];
        match g.len() {
            1 => singles.push(g[0]),
            2 => pairs.push((g[0], g[1])),
            k => {
                let names: Vec<_> = g.iter().map(|&l| gadget.locations()[l].as_str()).collect();
                return Err(Error::NotTunnelGadget(format!(
                    "locations {{{}}} form a connected group of size {k}",
                    names.join(", ")
                )));
            }
        }
    }
    if singles.len() % 2 == 1 {
        return Err(Error::NotTunnelGadget(format!("odd location count {n}")));
    }
    for chunk in singles.chunks(2) {
        pairs.push((chunk[0], chunk[1]));
    }
    pairs.sort_unstable();
    let mut tunnel_of = vec![0; n];
    for (i, &(a, b)) in pairs.iter().enumerate() {
        tunnel_of[a] = i;
        tunnel_of[b] = i;
    }
    Ok(TunnelStructure { pairs, tunnel_of })
}
