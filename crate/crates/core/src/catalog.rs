//! Built-in gadgets.

use crate::error::{Error, Result};
use crate::gadget::{Gadget, Transition};

/// A named built-in gadget together with the classifier outcomes it must
/// produce.
#[derive(Clone, Debug)]
pub struct CatalogEntry {
    pub key: &'static str,
    pub gadget: Gadget,
    /// Canonical starting state.
    pub initial: usize,
    pub provenance: &'static str,
    pub expected: Vec<(&'static str, bool)>,
}

fn build(name: &str, states: &[&str], locations: &[&str], transitions: &[(&str, &str, &str, &str)]) -> Gadget {
    Gadget::from_names(name, states, locations, transitions).expect("catalog gadget is well formed")
}

/// Two-state directed toggle: `a -> b` in state A, `b -> a` in state B.
pub fn one_toggle() -> Gadget {
    build("1-toggle", &["A", "B"], &["a", "b"], &[("A", "a", "b", "B"), ("B", "b", "a", "A")])
}

/// Locking 2-toggle. State 3 is unlocked; going down either tunnel locks the
/// other until the traversal is undone.
pub fn locking_2_toggle() -> Gadget {
    build(
        "locking-2-toggle",
        &["1", "2", "3"],
        &["L1", "L2", "R1", "R2"],
        &[
            ("3", "L1", "L2", "1"),
            ("1", "L2", "L1", "3"),
            ("3", "R1", "R2", "2"),
            ("2", "R2", "R1", "3"),
        ],
    )
}

/// 2-toggle: both tunnels flip direction whenever either is crossed.
pub fn two_toggle() -> Gadget {
    build(
        "2-toggle",
        &["A", "B"],
        &["a1", "b1", "a2", "b2"],
        &[
            ("A", "a1", "b1", "B"),
            ("B", "b1", "a1", "A"),
            ("A", "a2", "b2", "B"),
            ("B", "b2", "a2", "A"),
        ],
    )
}

pub fn directed_single_use() -> Gadget {
    build("directed-single-use", &["open", "used"], &["a", "b"], &[("open", "a", "b", "used")])
}

pub fn undirected_single_use() -> Gadget {
    build(
        "undirected-single-use",
        &["open", "used"],
        &["a", "b"],
        &[("open", "a", "b", "used"), ("open", "b", "a", "used")],
    )
}

/// Labeled two-tunnel single-use gadget: any crossing from state 1 closes both
/// tunnels, and the terminal state records which tunnel was used.
pub fn labeled_ttsu() -> Gadget {
    build(
        "labeled-two-tunnel-single-use",
        &["1", "2", "3"],
        &["a1", "a2", "b1", "b2"],
        &[
            ("1", "a1", "a2", "2"),
            ("1", "a2", "a1", "2"),
            ("1", "b1", "b2", "3"),
            ("1", "b2", "b1", "3"),
        ],
    )
}

/// Two directed single-use tunnels in one gadget; each crossing closes only
/// its own tunnel.
pub fn visiting_harder() -> Gadget {
    build(
        "visiting-harder",
        &["oo", "co", "oc", "cc"],
        &["a1", "a2", "b1", "b2"],
        &[
            ("oo", "a1", "a2", "co"),
            ("oc", "a1", "a2", "cc"),
            ("oo", "b1", "b2", "oc"),
            ("co", "b1", "b2", "cc"),
        ],
    )
}

/// Undirected counterpart of [`visiting_harder`].
pub fn paired_undirected_single_use() -> Gadget {
    build(
        "paired-undirected-single-use",
        &["oo", "co", "oc", "cc"],
        &["a1", "a2", "b1", "b2"],
        &[
            ("oo", "a1", "a2", "co"),
            ("oo", "a2", "a1", "co"),
            ("oc", "a1", "a2", "cc"),
            ("oc", "a2", "a1", "cc"),
            ("oo", "b1", "b2", "oc"),
            ("oo", "b2", "b1", "oc"),
            ("co", "b1", "b2", "cc"),
            ("co", "b2", "b1", "cc"),
        ],
    )
}

/// Two-tunnel DAG gadget whose tunnels are never usable from a common state.
pub fn not_true_2_tunnel() -> Gadget {
    build(
        "not-true-2-tunnel",
        &["1", "2", "3"],
        &["a1", "a2", "b1", "b2"],
        &[("1", "a1", "a2", "3"), ("2", "b1", "b2", "3")],
    )
}

/// DAG gadget where crossing the top tunnel left to right opens the bottom
/// tunnel left to right; the bottom tunnel is closed in the initial state.
pub fn distant_opening() -> Gadget {
    build(
        "distant-opening",
        &["S", "T", "D"],
        &["a1", "a2", "b1", "b2"],
        &[("S", "a1", "a2", "T"), ("T", "b1", "b2", "D")],
    )
}

/// Variant of [`distant_opening`] whose bottom tunnel is already traversable
/// right to left in the initial state.
pub fn distant_opening_reverse_open() -> Gadget {
    build(
        "distant-opening-reverse-open",
        &["S", "T", "D"],
        &["a1", "a2", "b1", "b2"],
        &[("S", "a1", "a2", "T"), ("S", "b2", "b1", "D"), ("T", "b1", "b2", "D")],
    )
}

/// Reversible deterministic 12-state gadget with non-interacting tunnels.
///
/// Tunnel H joins `H1` (left) and `H2` (right); tunnel V joins `V1` (top) and
/// `V2` (bottom). The state graph is a 12-cycle with two chords; the chords
/// close the bottom square `{1, 2, 3, 4}` and the right square
/// `{9, 10, 11, 12}`. States 1, 2 are the bottom leaves and 9, 10 the right
/// leaves.
///
/// ```text
///   6,7  5,12  10        top row
///   4,8  3,11  9         middle row
///   2    1               bottom row
/// ```
pub fn rdni() -> Gadget {
    // (lower, upper): an upward V crossing (V2 -> V1) moves lower -> upper.
    const UP: [(usize, usize); 7] = [(1, 3), (3, 5), (2, 4), (4, 6), (8, 7), (9, 10), (11, 12)];
    // (right, left): a leftward H crossing (H2 -> H1) moves right -> left.
    const LEFT: [(usize, usize); 7] = [(1, 2), (3, 4), (5, 7), (11, 8), (9, 11), (10, 12), (12, 6)];
    let (h1, h2, v1, v2) = (0, 1, 2, 3);
    let mut transitions = Vec::new();
    for &(lo, hi) in &UP {
        transitions.push(Transition::new(lo - 1, v2, v1, hi - 1));
        transitions.push(Transition::new(hi - 1, v1, v2, lo - 1));
    }
    for &(r, l) in &LEFT {
        transitions.push(Transition::new(r - 1, h2, h1, l - 1));
        transitions.push(Transition::new(l - 1, h1, h2, r - 1));
    }
    let states = (1..=12).map(|i| i.to_string()).collect();
    let locations = ["H1", "H2", "V1", "V2"].iter().map(|s| s.to_string()).collect();
    Gadget::new("rdni", states, locations, transitions).expect("rdni table is well formed")
}

/// One-state gadget with the given numbers of directed and undirected tunnels.
pub fn one_state_gadget(directed: usize, undirected: usize) -> Result<Gadget> {
    if directed + undirected == 0 {
        return Err(Error::EmptyGadget);
    }
    let mut locations = Vec::new();
    let mut transitions = Vec::new();
    for i in 0..directed {
        let a = locations.len();
        locations.push(format!("d{i}a"));
        locations.push(format!("d{i}b"));
        transitions.push(Transition::new(0, a, a + 1, 0));
    }
    for i in 0..undirected {
        let a = locations.len();
        locations.push(format!("u{i}a"));
        locations.push(format!("u{i}b"));
        transitions.push(Transition::new(0, a, a + 1, 0));
        transitions.push(Transition::new(0, a + 1, a, 0));
    }
    Gadget::new(format!("one-state-{directed}d-{undirected}u"), vec!["1".into()], locations, transitions)
}

const ALL_FALSE_DYNAMIC: [(&str, bool); 2] = [("monotone_opening", false), ("monotone_closing", false)];

/// Every built-in gadget, in a fixed order.
pub fn catalog_list() -> Vec<CatalogEntry> {
    let mut out = vec![
        CatalogEntry {
            key: "1-toggle",
            gadget: one_toggle(),
            initial: 0,
            provenance: "two-state one-tunnel reversible deterministic toggle",
            expected: vec![
                ("deterministic", true),
                ("reversible", true),
                ("dag", false),
                ("true_2_tunnel", false),
                ("distant_opening", false),
                ("interacting_tunnels", false),
            ],
        },
        CatalogEntry {
            key: "locking-2-toggle",
            gadget: locking_2_toggle(),
            initial: 2,
            provenance: "three-state locking 2-toggle diagram",
            expected: vec![
                ("deterministic", true),
                ("reversible", true),
                ("dag", false),
                ("true_2_tunnel", true),
                ("distant_opening", true),
                ("interacting_tunnels", true),
            ],
        },
        CatalogEntry {
            key: "2-toggle",
            gadget: two_toggle(),
            initial: 0,
            provenance: "two-state two-tunnel toggle",
            expected: vec![
                ("deterministic", true),
                ("reversible", true),
                ("dag", false),
                ("interacting_tunnels", true),
            ],
        },
        CatalogEntry {
            key: "directed-single-use",
            gadget: directed_single_use(),
            initial: 0,
            provenance: "single-use directed path",
            expected: vec![
                ("deterministic", true),
                ("reversible", false),
                ("dag", true),
                ("true_2_tunnel", false),
                ("monotone_opening", false),
                ("monotone_closing", true),
            ],
        },
        CatalogEntry {
            key: "undirected-single-use",
            gadget: undirected_single_use(),
            initial: 0,
            provenance: "single-use undirected path",
            expected: vec![("reversible", false), ("dag", true), ("true_2_tunnel", false), ("monotone_closing", true)],
        },
        CatalogEntry {
            key: "labeled-ttsu",
            gadget: labeled_ttsu(),
            initial: 0,
            provenance: "labeled two-tunnel single-use gadget",
            expected: vec![
                ("dag", true),
                ("true_2_tunnel", true),
                ("distant_opening", false),
                ("interacting_tunnels", true),
                ("monotone_closing", true),
            ],
        },
        CatalogEntry {
            key: "visiting-harder",
            gadget: visiting_harder(),
            initial: 0,
            provenance: "DAG gadget with easy reachability and hard universal traversal",
            expected: vec![
                ("dag", true),
                ("true_2_tunnel", true),
                ("distant_opening", false),
                ("interacting_tunnels", false),
            ],
        },
        CatalogEntry {
            key: "paired-undirected-single-use",
            gadget: paired_undirected_single_use(),
            initial: 0,
            provenance: "two undirected single-use tunnels sharing one gadget",
            expected: vec![
                ("dag", true),
                ("true_2_tunnel", true),
                ("distant_opening", false),
                ("interacting_tunnels", false),
            ],
        },
        CatalogEntry {
            key: "not-true-2-tunnel",
            gadget: not_true_2_tunnel(),
            initial: 0,
            provenance: "two-tunnel DAG gadget that never uses both tunnels",
            expected: vec![("dag", true), ("true_2_tunnel", false), ("distant_opening", false)],
        },
        CatalogEntry {
            key: "distant-opening",
            gadget: distant_opening(),
            initial: 0,
            provenance: "final true 2-tunnel state with a distant opening, bottom closed",
            expected: vec![
                ("dag", true),
                ("true_2_tunnel", true),
                ("distant_opening", true),
                ("interacting_tunnels", true),
                ALL_FALSE_DYNAMIC[0],
                ALL_FALSE_DYNAMIC[1],
            ],
        },
        CatalogEntry {
            key: "distant-opening-reverse-open",
            gadget: distant_opening_reverse_open(),
            initial: 0,
            provenance: "final true 2-tunnel state with a distant opening, bottom open leftward",
            expected: vec![("dag", true), ("true_2_tunnel", true), ("distant_opening", true)],
        },
        CatalogEntry {
            key: "rdni",
            gadget: rdni(),
            initial: 0,
            provenance: "12-state reversible deterministic gadget with non-interacting tunnels",
            expected: vec![
                ("deterministic", true),
                ("reversible", true),
                ("dag", false),
                ("true_2_tunnel", true),
                ("distant_opening", false),
                ("interacting_tunnels", false),
            ],
        },
    ];
    for (d, u) in [(0, 1), (0, 3), (1, 0), (1, 1), (1, 2), (3, 0)] {
        let gadget = one_state_gadget(d, u).expect("nonempty");
        out.push(CatalogEntry {
            key: match (d, u) {
                (0, 1) => "one-state-0d-1u",
                (0, 3) => "one-state-0d-3u",
                (1, 0) => "one-state-1d-0u",
                (1, 1) => "one-state-1d-1u",
                (1, 2) => "one-state-1d-2u",
                _ => "one-state-3d-0u",
            },
            gadget,
            initial: 0,
            provenance: "one-state gadget family",
            expected: vec![
                ("dag", false),
                ("distant_opening", false),
                ("interacting_tunnels", false),
                ("monotone_opening", true),
                ("monotone_closing", true),
                ("true_2_tunnel", d + u >= 2),
                ("reversible", d == 0),
            ],
        });
    }
    out
}

/// Looks a catalog gadget up by key.
pub fn get(key: &str) -> Result<CatalogEntry> {
    catalog_list()
        .into_iter()
        .find(|e| e.key == key)
        .ok_or_else(|| Error::UnknownGadget(key.to_string()))
}
