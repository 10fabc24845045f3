//! Reduction compilers from source problems to systems of gadgets, and
//! gadget-to-gadget transforms.

use std::collections::BTreeMap;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::io::system_to_value;
use crate::solve::Objective;
use crate::system::System;

mod collapse;
mod dag_open;
mod hampath;
mod reversible;
mod shadow;
mod sample;
mod source;
mod stateless;

pub use collapse::{collapse_non_true_2_tunnel, collapse_system};
pub use dag_open::{reduce_reach_to_traversal_distant_opening, DistantOpeningShape};
pub use hampath::{reduce_hampath_directed, reduce_hampath_spiral, reduce_hampath_undir_close};
pub use reversible::{reduce_reach_to_reconfig_reversible, reduce_reach_to_traversal_reversible_interacting};
pub use shadow::{
    apply_shadow_reduction, apply_verified_reduction, apply_verified_reduction_ordered, full_shadow, shadow_gadget,
    verified_gadget, ShadowGadget, VerificationScheme, VerifiedGadget,
};
pub use sample::{all_cnfs, all_digraphs, random_cnf, random_digraph, random_legal_cubic, random_legal_digraph, random_system};
pub use source::{CnfFormula, Digraph, Graph};
pub use stateless::{reduce_3sat_to_traversal, reduce_stcon_to_traversal};

/// Where a source element ended up in the produced system.
#[derive(Clone, Debug, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct Place {
    pub instances: Vec<usize>,
    pub components: Vec<usize>,
}

/// A compiled instance together with the objective to decide on it.
#[derive(Clone, Debug)]
pub struct ReductionOutput {
    pub system: System,
    pub objective: Objective,
    /// Source element (`"x1"`, `"clause0"`, `"v3"`, `"arc2"`, ...) to its
    /// image in the system.
    pub correspondence: BTreeMap<String, Place>,
    pub expected_equivalence: String,
    pub metadata: BTreeMap<String, String>,
}

impl ReductionOutput {
    pub(crate) fn new(system: System, objective: Objective, expected: &str) -> Self {
        Self {
            system,
            objective,
            correspondence: BTreeMap::new(),
            expected_equivalence: expected.to_string(),
            metadata: BTreeMap::new(),
        }
    }

    /// Checks that every referenced instance and component exists and that
    /// the objective fits the system.
    pub fn validate(&self) -> Result<()> {
        self.objective.validate(&self.system)?;
        for (k, p) in &self.correspondence {
            if p.instances.iter().any(|&i| i >= self.system.instance_count())
                || p.components.iter().any(|&c| c >= self.system.component_count())
            {
                return Err(Error::InvalidSystem(format!("correspondence entry {k} is out of range")));
            }
        }
        Ok(())
    }

    pub fn to_value(&self) -> Value {
        json!({
            "system": system_to_value(&self.system),
            "objective": self.objective,
            "correspondence": self.correspondence,
            "expectedEquivalence": self.expected_equivalence,
            "metadata": self.metadata,
        })
    }
}
