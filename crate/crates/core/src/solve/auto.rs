//! Picks a polynomial special-case solver when the instance qualifies.

use super::{oracle_solve, solve_one_state_2_tunnel, solve_one_state_undirected, solve_reversible_non_interacting_traversal};
use super::{solve_ttsu_reconfiguration, Objective, SolveResult};
use crate::error::{Error, Result};
use crate::system::System;

/// Tries the special-case solvers that apply to the objective, in a fixed
/// order, and falls back to the breadth-first oracle. Returns the name of
/// the solver that answered.
pub fn solve_auto(system: &System, objective: &Objective, agents: usize, max_nodes: usize) -> Result<(&'static str, SolveResult)> {
    objective.validate(system)?;
    if agents == 1 {
        let attempts: Vec<(&'static str, Result<SolveResult>)> = match objective {
            Objective::Reachability { target } => {
                let sys = system.clone().with_target(target.or(system.target()))?;
                vec![
                    ("one-state-undirected", solve_one_state_undirected(&sys)),
                    ("one-state-2-tunnel", solve_one_state_2_tunnel(&sys)),
                ]
            }
            Objective::UniversalTraversal => {
                vec![("reversible-non-interacting", solve_reversible_non_interacting_traversal(system))]
            }
            Objective::Reconfiguration { states, agents: None } if states.iter().all(Option::is_some) => {
                let target: Vec<usize> = states.iter().map(|s| s.expect("checked")).collect();
                vec![("ttsu-eulerian", solve_ttsu_reconfiguration(system, &target, None))]
            }
            Objective::Reconfiguration { .. } => vec![],
        };
        for (name, r) in attempts {
            match r {
                Ok(r) => return Ok((name, r)),
                Err(Error::WrongGadgetClass(_)) => {}
                Err(e) => return Err(e),
            }
        }
    }
    Ok(("oracle", oracle_solve(system, objective, agents, max_nodes)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{labeled_ttsu, locking_2_toggle, one_state_gadget};
    use crate::system::SystemBuilder;

    fn pair(g: &crate::Gadget, state: usize) -> System {
        let mut b = SystemBuilder::new();
        let i = b.add_instance(g, state);
        let s = b.node_of(i, 0);
        let t = b.node_of(i, 1);
        b.set_start(s);
        b.set_target(t);
        b.build().unwrap().0
    }

    #[test]
    fn dispatch() {
        let tunnel = pair(&one_state_gadget(0, 1).unwrap(), 0);
        let (name, r) = solve_auto(&tunnel, &Objective::reach(tunnel.target().unwrap()), 1, 100).unwrap();
        assert_eq!(name, "one-state-undirected");
        assert!(r.is_yes());
        let l2t = pair(&locking_2_toggle(), 2);
        assert_eq!(solve_auto(&l2t, &Objective::reach(1), 1, 100).unwrap().0, "oracle");
        let ttsu = pair(&labeled_ttsu(), 0);
        assert_eq!(solve_auto(&ttsu, &Objective::reconfigure(&[0]), 1, 100).unwrap().0, "ttsu-eulerian");
        assert_eq!(solve_auto(&tunnel, &Objective::reach(1), 2, 100).unwrap().0, "oracle");
    }
}
