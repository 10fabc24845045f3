//! Decision procedures for reachability, universal traversal and
//! reconfiguration.

mod auto;
mod certificate;
mod compress;
mod oracle;
mod special;
mod ttsu;
mod twosat;

use serde::{Deserialize, Serialize};

pub use auto::solve_auto;
pub use certificate::{extract_certificate, verify_npredag_certificate, Certificate, DagStep};
pub use compress::{compress_traversal_witness, live_tunnel_count};
pub use oracle::{oracle_decide, oracle_solve, oracle_solve_from, DEFAULT_MAX_NODES};
pub use special::{solve_one_state_undirected, solve_reversible_non_interacting_traversal};
pub use ttsu::{eulerian_trail, solve_ttsu_reconfiguration};
pub use twosat::{solve_one_state_2_tunnel, TwoSat};

use crate::error::{Error, Result};
use crate::system::{step, Configuration, MovePath, System};

/// What the agents must achieve.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "camelCase")]
pub enum Objective {
    /// Some agent reaches the component; `None` means the system's target.
    Reachability { target: Option<usize> },
    /// Every instance is traversed at least once.
    UniversalTraversal,
    /// The state vector matches; `None` entries are unconstrained. If
    /// `agents` is given the sorted agent multiset must match too.
    Reconfiguration {
        states: Vec<Option<usize>>,
        #[serde(default)]
        agents: Option<Vec<usize>>,
    },
}

impl Objective {
    pub fn reach(target: usize) -> Self {
        Objective::Reachability { target: Some(target) }
    }

    pub fn reconfigure(states: &[usize]) -> Self {
        Objective::Reconfiguration { states: states.iter().map(|&s| Some(s)).collect(), agents: None }
    }

    /// Checks the objective refers to existing components and states.
    pub fn validate(&self, system: &System) -> Result<()> {
        match self {
            Objective::Reachability { target } => {
                let t = target.or(system.target()).ok_or_else(|| Error::InvalidTarget("no target component".into()))?;
                if t >= system.component_count() {
                    return Err(Error::InvalidTarget(format!("component {t} does not exist")));
                }
            }
            Objective::UniversalTraversal => {}
            Objective::Reconfiguration { states, agents } => {
                if states.len() != system.instance_count() {
                    return Err(Error::InvalidTarget(format!(
                        "target vector has {} entries for {} instances",
                        states.len(),
                        system.instance_count()
                    )));
                }
                for (i, s) in states.iter().enumerate() {
                    if matches!(s, Some(s) if *s >= system.gadget_of(i).state_count()) {
                        return Err(Error::InvalidTarget(format!("state out of range for instance {i}")));
                    }
                }
                if let Some(a) = agents {
                    if a.iter().any(|&c| c >= system.component_count()) {
                        return Err(Error::InvalidTarget("agent target on a missing component".into()));
                    }
                }
            }
        }
        Ok(())
    }

    /// Whether a configuration satisfies a reachability or reconfiguration
    /// objective. Universal traversal depends on the path, not the endpoint.
    pub(crate) fn holds_at(&self, system: &System, config: &Configuration) -> bool {
        match self {
            Objective::Reachability { target } => {
                let t = target.or(system.target());
                t.is_some_and(|t| config.agents.contains(&t))
            }
            Objective::UniversalTraversal => false,
            Objective::Reconfiguration { states, agents } => {
                states.iter().zip(&config.states).all(|(want, &got)| want.is_none_or(|w| w == got))
                    && agents.as_ref().is_none_or(|a| {
                        let mut a = a.clone();
                        a.sort_unstable();
                        a == config.agents
                    })
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Decision {
    Yes,
    No,
    BudgetExceeded,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SolveStats {
    pub nodes_expanded: usize,
    pub frontier_peak: usize,
    pub elapsed_micros: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolveResult {
    pub decision: Decision,
    pub witness: Option<MovePath>,
    pub stats: SolveStats,
}

impl SolveResult {
    pub(crate) fn yes(witness: MovePath, stats: SolveStats) -> Self {
        Self { decision: Decision::Yes, witness: Some(witness), stats }
    }

    pub(crate) fn no(stats: SolveStats) -> Self {
        Self { decision: Decision::No, witness: None, stats }
    }

    pub fn is_yes(&self) -> bool {
        self.decision == Decision::Yes
    }
}

/// Outcome of replaying a candidate witness.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct PathCheck {
    pub valid: bool,
    /// Index of the first illegal move, or the path length if every move was
    /// legal but the objective fails at the end.
    pub first_failure: Option<usize>,
    pub reason: Option<String>,
}

/// Replays `path` from `start` and checks legality and the objective.
pub fn check_path_from(system: &System, objective: &Objective, start: &Configuration, path: &MovePath) -> PathCheck {
    let fail = |i: usize, why: String| PathCheck { valid: false, first_failure: Some(i), reason: Some(why) };
    if let Err(e) = objective.validate(system) {
        return fail(0, e.to_string());
    }
    let mut cur = start.clone();
    let mut visited = vec![false; system.instance_count()];
    let mut reached = objective.holds_at(system, &cur);
    for (i, mv) in path.moves.iter().enumerate() {
        match step(system, &cur, mv) {
            Ok(next) => cur = next,
            Err(e) => return fail(i, e.to_string()),
        }
        visited[mv.instance] = true;
        reached |= objective.holds_at(system, &cur);
    }
    let ok = match objective {
        Objective::UniversalTraversal => visited.iter().all(|&v| v),
        // Reaching the target at any point suffices; reconfiguration is judged
        // at the end of the path.
        Objective::Reachability { .. } => reached,
        Objective::Reconfiguration { .. } => objective.holds_at(system, &cur),
    };
    if ok {
        PathCheck { valid: true, first_failure: None, reason: None }
    } else {
        fail(path.len(), "objective not met".into())
    }
}

/// Single-agent check from the system's initial configuration.
pub fn check_path(system: &System, objective: &Objective, path: &MovePath) -> PathCheck {
    match system.initial_configuration(1) {
        Ok(start) => check_path_from(system, objective, &start, path),
        Err(e) => PathCheck { valid: false, first_failure: Some(0), reason: Some(e.to_string()) },
    }
}

pub fn verify_path(system: &System, objective: &Objective, path: &MovePath) -> bool {
    check_path(system, objective, path).valid
}
