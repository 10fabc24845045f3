//! Short witnesses for universal traversal with one-state gadgets.

use super::special::route;
use crate::error::{Error, Result};
use crate::gadget::tunnel_decomposition;
use crate::system::{Move, MovePath, System};

/// Number of tunnels with at least one traversal, over all instances.
pub fn live_tunnel_count(system: &System) -> Result<usize> {
    let mut total = 0;
    for inst in 0..system.instance_count() {
        let g = system.gadget_of(inst);
        let ts = tunnel_decomposition(g)?;
        let mut live = vec![false; ts.len()];
        for t in g.transitions() {
            live[ts.tunnel_of(t.from_loc)] = true;
        }
        total += live.iter().filter(|&&l| l).count();
    }
    Ok(total)
}

/// Rebuilds a universal-traversal witness of a one-state system as shortest
/// routes between the first uses of each instance. The first uses are taken
/// in the order of `witness`; an instance crossed on the way to an earlier
/// target is not revisited.
pub fn compress_traversal_witness(system: &System, witness: &MovePath) -> Result<MovePath> {
    if system.gadgets().iter().any(|g| g.state_count() != 1) {
        return Err(Error::WrongGadgetClass("compression needs one-state gadgets".into()));
    }
    let start = system.start().ok_or_else(|| Error::InvalidSystem("system has no start location".into()))?;
    let states = vec![0; system.instance_count()];
    let mut first_uses: Vec<Move> = Vec::new();
    for mv in &witness.moves {
        if !first_uses.iter().any(|m| m.instance == mv.instance) {
            first_uses.push(*mv);
        }
    }
    let mut visited = vec![false; system.instance_count()];
    let mut out = MovePath::default();
    let mut here = start;
    for mv in first_uses {
        if visited[mv.instance] {
            continue;
        }
        let t = system.gadget_of(mv.instance).transition(mv.transition);
        let entrance = system.component_of(mv.instance, t.from_loc);
        let (r, _) = route(system, &states, here, |c| c == entrance)
            .ok_or_else(|| Error::InvalidInput("witness is not a valid walk".into()))?;
        for (instance, transition) in r {
            visited[instance] = true;
            out.moves.push(Move { agent: 0, instance, transition });
        }
        here = entrance;
        if !visited[mv.instance] {
            visited[mv.instance] = true;
            out.moves.push(Move { agent: 0, ..mv });
            here = system.component_of(mv.instance, t.to_loc);
        }
    }
    Ok(out)
}
