//! Source instances for the reductions, with brute-force deciders.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A 3CNF formula. Literals are nonzero signed 1-based variable indices, as in
/// DIMACS.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CnfFormula {
    pub variable_count: usize,
    pub clauses: Vec<[i32; 3]>,
}

impl CnfFormula {
    pub fn new(variable_count: usize, clauses: Vec<[i32; 3]>) -> Result<Self> {
        for c in &clauses {
            for &l in c {
                if l == 0 || l.unsigned_abs() as usize > variable_count {
                    return Err(Error::InvalidInput(format!("literal {l} out of range")));
                }
            }
        }
        Ok(Self { variable_count, clauses })
    }

    /// Parses DIMACS CNF. Every clause must have exactly three literals.
    pub fn parse_dimacs(text: &str) -> Result<Self> {
        let mut vars = None;
        let mut lits: Vec<i32> = Vec::new();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('c') || line.starts_with('%') {
                continue;
            }
            if let Some(rest) = line.strip_prefix('p') {
                let parts: Vec<&str> = rest.split_whitespace().collect();
                if parts.len() != 3 || parts[0] != "cnf" {
                    return Err(Error::InvalidInput(format!("bad problem line: {line}")));
                }
                vars = Some(parts[1].parse::<usize>().map_err(|e| Error::InvalidInput(e.to_string()))?);
                continue;
            }
            for tok in line.split_whitespace() {
                lits.push(tok.parse::<i32>().map_err(|e| Error::InvalidInput(format!("{tok}: {e}")))?);
            }
        }
        let vars = vars.ok_or_else(|| Error::InvalidInput("missing problem line".into()))?;
        let mut clauses = Vec::new();
        for chunk in lits.split(|&l| l == 0) {
            if chunk.is_empty() {
                continue;
            }
            let c: [i32; 3] = chunk
                .try_into()
                .map_err(|_| Error::InvalidInput(format!("clause {chunk:?} does not have three literals")))?;
            clauses.push(c);
        }
        if lits.last().is_some_and(|&l| l != 0) {
            return Err(Error::InvalidInput("last clause is not terminated by 0".into()));
        }
        Self::new(vars, clauses)
    }

    pub fn to_dimacs(&self) -> String {
        let mut s = format!("p cnf {} {}\n", self.variable_count, self.clauses.len());
        for c in &self.clauses {
            s.push_str(&format!("{} {} {} 0\n", c[0], c[1], c[2]));
        }
        s
    }

    pub fn satisfied_by(&self, assignment: &[bool]) -> bool {
        self.clauses
            .iter()
            .all(|c| c.iter().any(|&l| assignment[l.unsigned_abs() as usize - 1] == (l > 0)))
    }

    pub fn is_satisfiable(&self) -> bool {
        let n = self.variable_count;
        (0..1u64 << n).any(|m| {
            let a: Vec<bool> = (0..n).map(|i| m >> i & 1 == 1).collect();
            self.satisfied_by(&a)
        })
    }
}

/// A directed multigraph with designated endpoints.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Digraph {
    pub vertex_count: usize,
    pub arcs: Vec<(usize, usize)>,
    pub s: usize,
    pub t: usize,
}

/// An undirected multigraph with designated endpoints.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Graph {
    pub vertex_count: usize,
    pub edges: Vec<(usize, usize)>,
    pub s: usize,
    pub t: usize,
}

/// Parses the edge-list format shared by both graph kinds: optional header
/// lines `n <count>`, `s <vertex>`, `t <vertex>`, then one `u v` pair per
/// line. `#` starts a comment. Without `n`, the count is one more than the
/// largest vertex mentioned; `s` and `t` default to 0 and `n - 1`.
fn parse_edge_list(text: &str) -> Result<(usize, Vec<(usize, usize)>, usize, usize)> {
    let bad = |line: &str| Error::InvalidInput(format!("bad edge-list line: {line}"));
    let (mut n, mut s, mut t) = (None, None, None);
    let mut edges = Vec::new();
    for raw in text.lines() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split_whitespace().collect();
        let num = |p: &str| p.parse::<usize>().map_err(|_| bad(line));
        match parts.as_slice() {
            ["n", v] => n = Some(num(v)?),
            ["s", v] => s = Some(num(v)?),
            ["t", v] => t = Some(num(v)?),
            [u, v] => edges.push((num(u)?, num(v)?)),
            _ => return Err(bad(line)),
        }
    }
    let mentioned = edges.iter().map(|&(u, v)| u.max(v) + 1).max().unwrap_or(0);
    let mentioned = mentioned.max(s.map_or(0, |x| x + 1)).max(t.map_or(0, |x| x + 1));
    let n = n.unwrap_or(mentioned);
    if mentioned > n || n == 0 {
        return Err(Error::InvalidInput("vertex index out of range".into()));
    }
    Ok((n, edges, s.unwrap_or(0), t.unwrap_or(n - 1)))
}

fn edge_list_text(n: usize, s: usize, t: usize, edges: &[(usize, usize)]) -> String {
    let mut out = format!("n {n}\ns {s}\nt {t}\n");
    for (u, v) in edges {
        out.push_str(&format!("{u} {v}\n"));
    }
    out
}

/// Hamiltonian path from `s` to `t` by dynamic programming over subsets.
fn hamiltonian(n: usize, succ: &[Vec<usize>], s: usize, t: usize) -> bool {
    if n > 20 {
        panic!("brute-force Hamiltonian path limited to 20 vertices");
    }
    if n == 1 {
        return s == t;
    }
    let full = (1usize << n) - 1;
    // reach[mask] = set of end vertices of paths from s covering exactly mask.
    let mut reach = vec![0u32; 1 << n];
    reach[1 << s] = 1 << s;
    for mask in 0..=full {
        let ends = reach[mask];
        if ends == 0 {
            continue;
        }
        for v in 0..n {
            if ends >> v & 1 == 0 || v == t {
                continue;
            }
            for &w in &succ[v] {
                if mask >> w & 1 == 0 {
                    reach[mask | 1 << w] |= 1 << w;
                }
            }
        }
    }
    reach[full] >> t & 1 == 1
}

impl Digraph {
    pub fn new(vertex_count: usize, arcs: Vec<(usize, usize)>, s: usize, t: usize) -> Result<Self> {
        if s >= vertex_count || t >= vertex_count || arcs.iter().any(|&(u, v)| u >= vertex_count || v >= vertex_count)
        {
            return Err(Error::InvalidInput("vertex index out of range".into()));
        }
        Ok(Self { vertex_count, arcs, s, t })
    }

    pub fn parse(text: &str) -> Result<Self> {
        let (n, arcs, s, t) = parse_edge_list(text)?;
        Self::new(n, arcs, s, t)
    }

    pub fn to_text(&self) -> String {
        edge_list_text(self.vertex_count, self.s, self.t, &self.arcs)
    }

    pub fn successors(&self) -> Vec<Vec<usize>> {
        let mut succ = vec![Vec::new(); self.vertex_count];
        for &(u, v) in &self.arcs {
            succ[u].push(v);
        }
        succ
    }

    pub fn in_degree(&self, v: usize) -> usize {
        self.arcs.iter().filter(|a| a.1 == v).count()
    }

    pub fn out_degree(&self, v: usize) -> usize {
        self.arcs.iter().filter(|a| a.0 == v).count()
    }

    /// Whether `t` is reachable from `s`.
    pub fn st_connected(&self) -> bool {
        let succ = self.successors();
        let mut seen = vec![false; self.vertex_count];
        seen[self.s] = true;
        let mut q = VecDeque::from([self.s]);
        while let Some(u) = q.pop_front() {
            for &v in &succ[u] {
                if !seen[v] {
                    seen[v] = true;
                    q.push_back(v);
                }
            }
        }
        seen[self.t]
    }

    pub fn has_hamiltonian_path(&self) -> bool {
        hamiltonian(self.vertex_count, &self.successors(), self.s, self.t)
    }
}

impl Graph {
    pub fn new(vertex_count: usize, edges: Vec<(usize, usize)>, s: usize, t: usize) -> Result<Self> {
        if s >= vertex_count
            || t >= vertex_count
            || edges.iter().any(|&(u, v)| u >= vertex_count || v >= vertex_count)
        {
            return Err(Error::InvalidInput("vertex index out of range".into()));
        }
        Ok(Self { vertex_count, edges, s, t })
    }

    pub fn parse(text: &str) -> Result<Self> {
        let (n, edges, s, t) = parse_edge_list(text)?;
        Self::new(n, edges, s, t)
    }

    pub fn to_text(&self) -> String {
        edge_list_text(self.vertex_count, self.s, self.t, &self.edges)
    }

    pub fn degree(&self, v: usize) -> usize {
        self.edges.iter().map(|&(a, b)| usize::from(a == v) + usize::from(b == v)).sum()
    }

    pub fn has_hamiltonian_path(&self) -> bool {
        let mut succ = vec![Vec::new(); self.vertex_count];
        for &(u, v) in &self.edges {
            succ[u].push(v);
            succ[v].push(u);
        }
        hamiltonian(self.vertex_count, &succ, self.s, self.t)
    }
}
