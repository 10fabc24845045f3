//! Shadow gadgets, verified gadgets, and the substitutions built on them.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::{Place, ReductionOutput};
use crate::error::{Error, Result};
use crate::gadget::{Gadget, Transition};
use crate::solve::Objective;
use crate::system::{Node, System, SystemBuilder};

/// A base gadget extended with shadow states. States `0..normal` are the
/// base's own; every added transition ends in a shadow state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShadowGadget {
    pub gadget: Gadget,
    pub base: Gadget,
    pub normal: usize,
}

impl ShadowGadget {
    pub fn is_shadow(&self, state: usize) -> bool {
        state >= self.normal
    }
}

/// Adds `shadow_states` and `extra` to `base`. Extra transitions index states
/// in the combined list (base states first) and must end in a shadow state.
pub fn shadow_gadget(base: &Gadget, shadow_states: &[String], extra: &[Transition]) -> Result<ShadowGadget> {
    let normal = base.state_count();
    if let Some(t) = extra.iter().find(|t| t.to_state < normal) {
        return Err(Error::IllegalShadowTransition(format!(
            "{} -> {} ends in base state {}",
            t.from_loc, t.to_loc, base.states()[t.to_state]
        )));
    }
    let mut states = base.states().to_vec();
    states.extend(shadow_states.iter().cloned());
    let mut transitions = base.transitions().to_vec();
    transitions.extend_from_slice(extra);
    let gadget = Gadget::new(format!("{}-shadow", base.name()), states, base.locations().to_vec(), transitions)?;
    Ok(ShadowGadget { gadget, base: base.clone(), normal })
}

/// One shadow state; from every state, any location leads to any other
/// location and into the shadow state, and the shadow state connects all
/// pairs of locations.
pub fn full_shadow(base: &Gadget) -> ShadowGadget {
    let mut name = "shadow".to_string();
    while base.state_index(&name).is_some() {
        name.push('\'');
    }
    let sh = base.state_count();
    let n = base.location_count();
    let mut extra = Vec::new();
    for s in 0..=sh {
        for x in 0..n {
            for y in (0..n).filter(|&y| y != x) {
                extra.push(Transition::new(s, x, y, sh));
            }
        }
    }
    let mut out = shadow_gadget(base, &[name], &extra).expect("full shadow is well formed");
    out.gadget = out.gadget.with_name(format!("{}-full-shadow", base.name()));
    out
}

/// How the verifying locations are added.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum VerificationScheme {
    /// `A <-> B` in every normal state and never in a shadow state.
    ClosingPair,
    /// `A <-> B` moves any normal state to a new verified state and keeps
    /// shadow states where they are; `C <-> D` exists only in the verified
    /// state.
    OpeningPairs,
}

/// A shadow gadget with verifying locations. `verification` lists the
/// crossings, in order, that make up the verification traversal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerifiedGadget {
    pub gadget: Gadget,
    pub base: Gadget,
    pub normal: usize,
    pub verification: Vec<(usize, usize)>,
}

pub fn verified_gadget(shadow: &ShadowGadget, scheme: VerificationScheme) -> Result<VerifiedGadget> {
    let g = &shadow.gadget;
    let normal = shadow.normal;
    if normal >= g.state_count() {
        return Err(Error::NotShadowGadget(format!("{} has no shadow states", g.name())));
    }
    if g.transitions().iter().any(|t| t.from_state >= normal && t.to_state < normal) {
        return Err(Error::NotShadowGadget(format!("{} leaves its shadow states", g.name())));
    }
    let n = g.location_count();
    let mut locations = g.locations().to_vec();
    let mut states = g.states().to_vec();
    let mut transitions = g.transitions().to_vec();
    let (a, b) = (n, n + 1);
    let both = |s: usize, t: usize, x: usize, y: usize| [Transition::new(s, x, y, t), Transition::new(s, y, x, t)];
    let verification = match scheme {
        VerificationScheme::ClosingPair => {
            locations.extend(["A".to_string(), "B".to_string()]);
            for s in 0..normal {
                transitions.extend(both(s, s, a, b));
            }
            vec![(a, b)]
        }
        VerificationScheme::OpeningPairs => {
            let (c, d) = (n + 2, n + 3);
            locations.extend(["A", "B", "C", "D"].map(String::from));
            let v = states.len();
            states.push("verified".into());
            for s in 0..g.state_count() {
                let to = if s < normal { v } else { s };
                transitions.extend(both(s, to, a, b));
            }
            // The verified state keeps every traversal any other state has.
            let mut pairs: BTreeSet<(usize, usize)> = (0..g.state_count()).flat_map(|s| g.traversals(s)).collect();
            pairs.extend([(a, b), (b, a), (c, d), (d, c)]);
            transitions.extend(pairs.into_iter().map(|(x, y)| Transition::new(v, x, y, v)));
            vec![(a, b), (c, d)]
        }
    };
    let suffix = match scheme {
        VerificationScheme::ClosingPair => "closing",
        VerificationScheme::OpeningPairs => "opening",
    };
    let gadget = Gadget::new(format!("{}-verified-{suffix}", g.name()), states, locations, transitions)?;
    Ok(VerifiedGadget { gadget, base: shadow.base.clone(), normal, verification })
}

/// Rebuilds `system` with every instance of `from` replaced by `to` in the
/// same state (locations of `to` beyond those of `from` are left unattached).
fn substitute(system: &System, from: &Gadget, to: &Gadget) -> Result<(SystemBuilder, Vec<Node>, Vec<usize>)> {
    let mut b = SystemBuilder::new();
    let nodes: Vec<Node> = (0..system.component_count()).map(|_| b.node()).collect();
    let mut replaced = Vec::new();
    for inst in 0..system.instance_count() {
        let g = system.gadget_of(inst);
        let swap = g == from;
        let i = b.add_instance(if swap { to } else { g }, system.instances()[inst].initial);
        if swap {
            replaced.push(i);
        }
        for loc in 0..g.location_count() {
            b.attach(i, loc, nodes[system.component_of(inst, loc)]);
        }
    }
    if replaced.is_empty() {
        return Err(Error::WrongGadgetClass(format!("no instance of {} to replace", from.name())));
    }
    if let Some(s) = system.start() {
        b.set_start(nodes[s]);
    }
    Ok((b, nodes, replaced))
}

/// Replaces every instance of the shadow's base gadget with the shadow
/// gadget. The reconfiguration target must name a base state for each of
/// them.
pub fn apply_shadow_reduction(system: &System, objective: &Objective, shadow: &ShadowGadget) -> Result<ReductionOutput> {
    let Objective::Reconfiguration { states, agents } = objective else {
        return Err(Error::InvalidTarget("shadow substitution needs a reconfiguration objective".into()));
    };
    for inst in 0..system.instance_count() {
        if system.gadget_of(inst) != &shadow.base {
            continue;
        }
        match states.get(inst) {
            Some(Some(s)) if shadow.is_shadow(*s) => {
                return Err(Error::InvalidTarget(format!("target for instance {inst} is a shadow state")))
            }
            Some(Some(_)) => {}
            _ => return Err(Error::InvalidTarget(format!("instance {inst} needs a definite target state"))),
        }
    }
    objective.validate(system)?;
    let (mut b, nodes, replaced) = substitute(system, &shadow.base, &shadow.gadget)?;
    if let Some(t) = system.target() {
        b.set_target(nodes[t]);
    }
    let (sys, _) = b.build()?;
    let objective = Objective::Reconfiguration { states: states.clone(), agents: agents.clone() };
    let mut out = ReductionOutput::new(sys, objective, "solvable iff the base instance is solvable");
    out.correspondence.insert("replaced".into(), Place { instances: replaced, components: vec![] });
    out.metadata.insert("reduction".into(), "shadow".into());
    Ok(out)
}

/// Replaces every instance of the base gadget with the verified gadget and
/// routes the old target through their verification traversals, in
/// instance order, to a new target.
pub fn apply_verified_reduction(system: &System, verified: &VerifiedGadget) -> Result<ReductionOutput> {
    apply_verified_reduction_ordered(system, verified, None)
}

/// As [`apply_verified_reduction`], visiting the replaced instances in the
/// given order (a permutation of `0..count`).
pub fn apply_verified_reduction_ordered(
    system: &System,
    verified: &VerifiedGadget,
    order: Option<&[usize]>,
) -> Result<ReductionOutput> {
    let old = system.target().ok_or_else(|| Error::InvalidInput("reachability instance needs a target".into()))?;
    let (mut b, nodes, replaced) = substitute(system, &verified.base, &verified.gadget)?;
    let order: Vec<usize> = match order {
        Some(o) => {
            let mut sorted = o.to_vec();
            sorted.sort_unstable();
            if sorted != (0..replaced.len()).collect::<Vec<_>>() {
                return Err(Error::InvalidInput("order must be a permutation of the replaced instances".into()));
            }
            o.to_vec()
        }
        None => (0..replaced.len()).collect(),
    };
    let mut at = nodes[old];
    for &k in &order {
        let inst = replaced[k];
        for &(x, y) in &verified.verification {
            b.attach(inst, x, at);
            at = b.node_of(inst, y);
        }
    }
    b.set_target(at);
    let (sys, comp) = b.build()?;
    let target = SystemBuilder::component(&comp, at);
    let mut out = ReductionOutput::new(sys, Objective::reach(target), "solvable iff the base instance is solvable");
    out.correspondence.insert("replaced".into(), Place { instances: replaced, components: vec![] });
    out.correspondence.insert(
        "oldTarget".into(),
        Place { instances: vec![], components: vec![SystemBuilder::component(&comp, nodes[old])] },
    );
    out.metadata.insert("reduction".into(), "verified".into());
    Ok(out)
}
