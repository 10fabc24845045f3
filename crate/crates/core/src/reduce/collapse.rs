//! Collapsing gadgets that are not true 2-tunnel onto a single tunnel.

use super::{Place, ReductionOutput};
use crate::classify::{is_true_2_tunnel, traversable_tunnels};
use crate::error::{Error, Result};
use crate::gadget::{tunnel_decomposition, Direction, Gadget, Transition};
use crate::system::{System, SystemBuilder};

/// Merges every tunnel of `g` onto one tunnel `a`-`b`. Each tunnel's first
/// endpoint becomes `a`; states are kept one to one.
pub fn collapse_non_true_2_tunnel(g: &Gadget) -> Result<Gadget> {
    let ts = tunnel_decomposition(g)?;
    if is_true_2_tunnel(g)? {
        return Err(Error::WrongGadgetClass(format!("{} is true 2-tunnel", g.name())));
    }
    let side = |loc: usize| usize::from(ts.pairs()[ts.tunnel_of(loc)].0 != loc);
    let transitions = g
        .transitions()
        .iter()
        .map(|t| Transition::new(t.from_state, side(t.from_loc), side(t.to_loc), t.to_state))
        .collect();
    Gadget::new(
        format!("{}-collapsed", g.name()),
        g.states().to_vec(),
        vec!["a".into(), "b".into()],
        transitions,
    )
}

/// The only tunnel of a non-true-2-tunnel gadget that is ever traversable
/// from `state`, if any.
fn live_tunnel(g: &Gadget, state: usize) -> Result<Option<usize>> {
    let ts = tunnel_decomposition(g)?;
    let reach = g.reachable_states(state);
    Ok((0..g.state_count())
        .filter(|&s| reach[s])
        .flat_map(|s| traversable_tunnels(g, &ts, s))
        .map(|(t, _)| t)
        .next())
}

/// Replaces every instance whose gadget is not true 2-tunnel with its
/// collapse, placed on the endpoints of the tunnel it can actually use.
/// Other instances are copied unchanged.
pub fn collapse_system(system: &System) -> Result<ReductionOutput> {
    let mut b = SystemBuilder::new();
    let nodes: Vec<_> = (0..system.component_count()).map(|_| b.node()).collect();
    let mut collapsed = Vec::new();
    for inst in 0..system.instance_count() {
        let g = system.gadget_of(inst);
        let init = system.instances()[inst].initial;
        let simple = tunnel_decomposition(g).is_ok() && !is_true_2_tunnel(g)?;
        if !simple {
            let i = b.add_instance(g, init);
            for loc in 0..g.location_count() {
                b.attach(i, loc, nodes[system.component_of(inst, loc)]);
            }
            continue;
        }
        let c = collapse_non_true_2_tunnel(g)?;
        let i = b.add_instance(&c, init);
        collapsed.push(i);
        if let Some(t) = live_tunnel(g, init)? {
            let ts = tunnel_decomposition(g)?;
            let (x, y) = ts.endpoints(t, Direction::Forward);
            b.attach(i, 0, nodes[system.component_of(inst, x)]);
            b.attach(i, 1, nodes[system.component_of(inst, y)]);
        }
    }
    if let Some(s) = system.start() {
        b.set_start(nodes[s]);
    }
    if let Some(t) = system.target() {
        b.set_target(nodes[t]);
    }
    let (sys, comp) = b.build()?;
    // Keep original component numbering for objectives that refer to it.
    let remap: Vec<usize> = nodes.iter().map(|&n| SystemBuilder::component(&comp, n)).collect();
    let objective = match system.target() {
        Some(t) => crate::solve::Objective::reach(remap[t]),
        None => crate::solve::Objective::UniversalTraversal,
    };
    let mut out = ReductionOutput::new(sys, objective, "same reachability and universal traversal answers");
    out.correspondence.insert("collapsed".into(), Place { instances: collapsed, components: vec![] });
    for (c, &r) in remap.iter().enumerate() {
        out.correspondence.insert(format!("component{c}"), Place { instances: vec![], components: vec![r] });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{labeled_ttsu, not_true_2_tunnel, one_toggle};
    use crate::classify::isomorphic;

    #[test]
    fn figure_gadget() {
        let c = collapse_non_true_2_tunnel(&not_true_2_tunnel()).unwrap();
        assert_eq!(c.location_count(), 2);
        assert_eq!(c.state_count(), 3);
        assert_eq!(c.transitions().len(), 2);
        assert!(c.transitions().iter().all(|t| (t.from_loc, t.to_loc) == (0, 1)));
    }

    #[test]
    fn one_tunnel_is_fixed() {
        let g = one_toggle();
        assert!(isomorphic(&collapse_non_true_2_tunnel(&g).unwrap(), &g));
    }

    #[test]
    fn true_2_tunnel_rejected() {
        assert!(matches!(collapse_non_true_2_tunnel(&labeled_ttsu()), Err(Error::WrongGadgetClass(_))));
    }
}
