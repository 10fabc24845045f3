//! Reductions from reachability with reversible gadgets.

use super::{Place, ReductionOutput};
use crate::catalog::one_toggle;
use crate::classify::{has_interacting_tunnels, is_deterministic, is_reversible};
use crate::error::{Error, Result};
use crate::gadget::Gadget;
use crate::solve::Objective;
use crate::system::{Node, System, SystemBuilder};

/// Copies every instance of `system` into a fresh builder, returning the
/// builder and one node per original component.
fn copy(system: &System) -> (SystemBuilder, Vec<Node>) {
    let mut b = SystemBuilder::new();
    let nodes: Vec<Node> = (0..system.component_count()).map(|_| b.node()).collect();
    for inst in 0..system.instance_count() {
        let g = system.gadget_of(inst);
        let i = b.add_instance(g, system.instances()[inst].initial);
        for loc in 0..g.location_count() {
            b.attach(i, loc, nodes[system.component_of(inst, loc)]);
        }
    }
    if let Some(s) = system.start() {
        b.set_start(nodes[s]);
    }
    (b, nodes)
}

fn target_of(system: &System) -> Result<usize> {
    system.target().ok_or_else(|| Error::InvalidInput("reachability instance needs a target".into()))
}

/// Reachability to universal traversal for a reversible, deterministic gadget
/// with interacting tunnels.
///
/// A 1-toggle runs from the target to every other component, initially
/// pointing away from the target, so the agent can only use it after
/// arriving there; from the target it can then reach and use every gadget
/// and come back. One more copy of `g` hangs off the target with its other
/// locations unconnected, so it too is usable only at the target.
pub fn reduce_reach_to_traversal_reversible_interacting(system: &System, g: &Gadget) -> Result<ReductionOutput> {
    if !is_reversible(g) || !is_deterministic(g) || !has_interacting_tunnels(g)? {
        return Err(Error::WrongGadgetClass(format!(
            "{} is not reversible and deterministic with interacting tunnels",
            g.name()
        )));
    }
    for inst in 0..system.instance_count() {
        if system.gadget_of(inst) != g {
            return Err(Error::WrongGadgetClass("every instance must be a copy of the gadget".into()));
        }
        if g.transitions_from(system.instances()[inst].initial).is_empty() {
            return Err(Error::InvalidInput(format!("instance {inst} has no traversal in its initial state")));
        }
    }
    let target = target_of(system)?;
    let (mut b, nodes) = copy(system);
    let toggle = one_toggle();
    let mut toggles = Vec::new();
    for c in (0..system.component_count()).filter(|&c| c != target) {
        let i = b.add_instance(&toggle, 0);
        b.attach(i, 0, nodes[target]);
        b.attach(i, 1, nodes[c]);
        toggles.push(i);
    }
    let state = (0..g.state_count()).find(|&s| !g.transitions_from(s).is_empty()).expect("some transition");
    let stub = b.add_instance(g, state);
    let entry = g.transition(g.transitions_from(state)[0]).from_loc;
    b.attach(stub, entry, nodes[target]);
    let (sys, comp) = b.build()?;
    let mut out = ReductionOutput::new(sys, Objective::UniversalTraversal, "solvable iff the target is reachable");
    out.correspondence.insert("toggles".into(), Place { instances: toggles, components: vec![] });
    out.correspondence.insert(
        "target".into(),
        Place { instances: vec![stub], components: vec![SystemBuilder::component(&comp, nodes[target])] },
    );
    out.metadata.insert("reduction".into(), "reach2traversal-reversible".into());
    out.metadata.insert("oneToggles".into(), "literal catalog gadgets".into());
    Ok(out)
}

/// Reachability to reconfiguration for reversible gadgets: a loop at the
/// target holds one gadget with a state-changing traversal, and the goal is
/// every original gadget back in its initial state with the loop gadget
/// changed. The loop gadget is a copy of the first gadget type with a
/// state-changing transition, or a 1-toggle if there is none.
pub fn reduce_reach_to_reconfig_reversible(system: &System) -> Result<ReductionOutput> {
    if let Some(g) = system.gadgets().iter().find(|g| !is_reversible(g)) {
        return Err(Error::WrongGadgetClass(format!("{} is not reversible", g.name())));
    }
    let target = target_of(system)?;
    let (mut b, nodes) = copy(system);
    let changing = system.gadgets().iter().find_map(|g| {
        g.transitions().iter().find(|t| t.from_state != t.to_state).map(|t| (g.clone(), *t))
    });
    let (g, t) = changing.unwrap_or_else(|| (one_toggle(), *one_toggle().transition(0)));
    let looped = b.add_instance(&g, t.from_state);
    b.attach(looped, t.from_loc, nodes[target]);
    b.attach(looped, t.to_loc, nodes[target]);
    let (sys, comp) = b.build()?;
    let mut states: Vec<Option<usize>> = system.initial_states().into_iter().map(Some).collect();
    states.push(Some(t.to_state));
    let objective = Objective::Reconfiguration { states, agents: None };
    let mut out = ReductionOutput::new(sys, objective, "solvable iff the target is reachable");
    out.correspondence.insert(
        "target".into(),
        Place { instances: vec![looped], components: vec![SystemBuilder::component(&comp, nodes[target])] },
    );
    out.metadata.insert("reduction".into(), "reach2reconfig".into());
    out.metadata.insert("loopGadget".into(), g.name().to_string());
    Ok(out)
}
