//! Reachability to universal traversal for DAG gadgets whose final true
//! 2-tunnel state has a distant opening.

use serde::Serialize;

use super::{Place, ReductionOutput};
use crate::classify::{final_true_2_tunnel_states, traversable_tunnels};
use crate::error::{Error, Result};
use crate::gadget::{tunnel_decomposition, Gadget};
use crate::solve::{oracle_decide, Decision, Objective};
use crate::system::{configuration_graph, Node, System, SystemBuilder};

/// Whether the bottom tunnel can already be crossed right to left in the
/// chosen state; this selects the attachment.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum DistantOpeningShape {
    BottomClosed,
    BottomReverseOpen,
}

/// Crossing the top tunnel left to right from `state` can open the bottom
/// tunnel left to right.
#[derive(Clone, Copy, Debug)]
struct Pick {
    state: usize,
    top: (usize, usize),
    bottom: (usize, usize),
    shape: DistantOpeningShape,
}

fn pick(g: &Gadget, state: usize) -> Result<Pick> {
    let ts = tunnel_decomposition(g)?;
    if final_true_2_tunnel_states(g)?.contains(&state) {
        let open = traversable_tunnels(g, &ts, state);
        for &ti in g.transitions_from(state) {
            let t = g.transition(ti);
            let (top, dt) = ts.classify(t);
            let after = traversable_tunnels(g, &ts, t.to_state);
            if let Some(&(bottom, db)) = after.iter().find(|&&(x, d)| x != top && !open.contains(&(x, d))) {
                let shape = if open.contains(&(bottom, db.flip())) {
                    DistantOpeningShape::BottomReverseOpen
                } else {
                    DistantOpeningShape::BottomClosed
                };
                return Ok(Pick { state, top: ts.endpoints(top, dt), bottom: ts.endpoints(bottom, db), shape });
            }
        }
    }
    Err(Error::WrongGadgetClass(format!(
        "state {} of {} is not a final true 2-tunnel state with a distant opening",
        g.states()[state],
        g.name()
    )))
}

/// Adds the two helper copies for the instance whose top tunnel sits on
/// `(left, right)`. Both helpers have their top tunnel looped at `win`, so
/// nothing can happen in them before the agent gets there.
fn attach(b: &mut SystemBuilder, g: &Gadget, p: &Pick, left: Node, right: Node, win: Node) -> [usize; 2] {
    let h1 = b.add_instance(g, p.state);
    let h2 = b.add_instance(g, p.state);
    for h in [h1, h2] {
        b.attach(h, p.top.0, win);
        b.attach(h, p.top.1, win);
    }
    match p.shape {
        // Opened by crossing h1's top: win -> left.
        DistantOpeningShape::BottomClosed => {
            b.attach(h1, p.bottom.0, win);
            b.attach(h1, p.bottom.1, left);
        }
        // Already open right to left: win -> left.
        DistantOpeningShape::BottomReverseOpen => {
            b.attach(h1, p.bottom.0, left);
            b.attach(h1, p.bottom.1, win);
        }
    }
    // Opened by crossing h2's top: right -> win.
    b.attach(h2, p.bottom.0, right);
    b.attach(h2, p.bottom.1, win);
    [h1, h2]
}

fn compile(system: &System, g: &Gadget, p: &Pick) -> Result<ReductionOutput> {
    let win = system.target().ok_or_else(|| Error::InvalidInput("reachability instance needs a target".into()))?;
    let mut b = SystemBuilder::new();
    let nodes: Vec<Node> = (0..system.component_count()).map(|_| b.node()).collect();
    for inst in 0..system.instance_count() {
        let i = b.add_instance(g, p.state);
        for loc in 0..g.location_count() {
            b.attach(i, loc, nodes[system.component_of(inst, loc)]);
        }
    }
    let mut helpers = Vec::new();
    for inst in 0..system.instance_count() {
        let (l, r) = (nodes[system.component_of(inst, p.top.0)], nodes[system.component_of(inst, p.top.1)]);
        helpers.push(attach(&mut b, g, p, l, r, nodes[win]));
    }
    if let Some(s) = system.start() {
        b.set_start(nodes[s]);
    }
    let (sys, comp) = b.build()?;
    let mut out = ReductionOutput::new(sys, Objective::UniversalTraversal, "solvable iff the target is reachable");
    for (inst, h) in helpers.into_iter().enumerate() {
        out.correspondence.insert(format!("instance{inst}"), Place { instances: vec![inst, h[0], h[1]], components: vec![] });
    }
    out.correspondence.insert(
        "target".into(),
        Place { instances: vec![], components: vec![SystemBuilder::component(&comp, nodes[win])] },
    );
    out.metadata.insert("reduction".into(), "reach2traversal-distant-opening".into());
    out.metadata.insert("shape".into(), format!("{:?}", p.shape));
    Ok(out)
}

/// Checks the attachment on tiny instances: helpers are dead while the agent
/// has not reached the target, and after reaching it the agent can use an
/// instance through its helpers and come back.
fn self_test(g: &Gadget, p: &Pick) -> Result<()> {
    let one = |start_at_win: bool, copies: usize| -> Result<System> {
        let mut b = SystemBuilder::new();
        let win = b.node();
        let away = b.node();
        for _ in 0..copies {
            let i = b.add_instance(g, p.state);
            b.attach(i, p.top.0, away);
        }
        b.set_start(if start_at_win { win } else { away });
        b.set_target(win);
        Ok(b.build()?.0)
    };
    let before = compile(&one(false, 1)?, g, p)?;
    let graph = configuration_graph(&before.system, 1, 100_000)?;
    let helper_moved = graph.edges.iter().any(|(_, _, mv)| mv.instance != 0);
    let after = compile(&one(true, 2)?, g, p)?;
    let usable = oracle_decide(&after.system, &after.objective, 1, 100_000)?.decision == Decision::Yes;
    if helper_moved || !usable {
        return Err(Error::WrongGadgetClass(format!("attachment self-test failed for {}", g.name())));
    }
    Ok(())
}

/// Reachability with copies of `g`, all starting in the same final true
/// 2-tunnel state with a distant opening, to universal traversal: every
/// instance gets two helper copies that only become usable at the target and
/// let the agent cross the instance's top tunnel and return.
pub fn reduce_reach_to_traversal_distant_opening(system: &System, g: &Gadget) -> Result<ReductionOutput> {
    if system.instance_count() == 0 {
        return Err(Error::InvalidInput("reachability instance has no gadgets".into()));
    }
    let state = system.instances()[0].initial;
    for inst in 0..system.instance_count() {
        if system.gadget_of(inst) != g || system.instances()[inst].initial != state {
            return Err(Error::WrongGadgetClass("every instance must be a copy of the gadget in one shared state".into()));
        }
    }
    let p = pick(g, state)?;
    self_test(g, &p)?;
    compile(system, g, &p)
}
