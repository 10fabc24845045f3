//! Certificates for reconfiguration with gadgets whose state graphs split
//! into blocks joined by acyclic transitions.

use serde::{Deserialize, Serialize};

use crate::classify::Decomposition;
use crate::error::{Error, Result};
use crate::system::{step, Configuration, Move, MovePath, System};

/// One transition between blocks, with the full state vector around it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DagStep {
    pub before: Vec<usize>,
    pub mv: Move,
    pub after: Vec<usize>,
}

/// The between-block transitions of a solution plus the within-block
/// segments connecting them; `segments.len() == steps.len() + 1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub steps: Vec<DagStep>,
    pub segments: Vec<MovePath>,
}

fn is_dag_like(system: &System, decomps: &[Decomposition], mv: &Move) -> bool {
    let gi = system.instances()[mv.instance].gadget;
    decomps[gi].dag_like.contains(&mv.transition)
}

/// Splits a single-agent witness at its between-block transitions.
/// `decomps[i]` is the decomposition of gadget type `i`.
pub fn extract_certificate(system: &System, decomps: &[Decomposition], path: &MovePath) -> Result<Certificate> {
    if decomps.len() != system.gadgets().len() {
        return Err(Error::MalformedCertificate("one decomposition per gadget type is required".into()));
    }
    let mut cur = system.initial_configuration(1)?;
    let mut steps = Vec::new();
    let mut segments = vec![MovePath::default()];
    for mv in &path.moves {
        let next = step(system, &cur, mv)?;
        if is_dag_like(system, decomps, mv) {
            steps.push(DagStep { before: cur.states.clone(), mv: *mv, after: next.states.clone() });
            segments.push(MovePath::default());
        } else {
            segments.last_mut().expect("nonempty").moves.push(*mv);
        }
        cur = next;
    }
    Ok(Certificate { steps, segments })
}

/// Checks a certificate against the reconfiguration target. Each segment
/// must use only within-block transitions and end in the recorded `before`
/// vector; each step must be a legal between-block transition producing
/// `after`; the last segment must end in `target`.
pub fn verify_npredag_certificate(
    system: &System,
    decomps: &[Decomposition],
    cert: &Certificate,
    target: &[usize],
) -> Result<bool> {
    let n = system.instance_count();
    if decomps.len() != system.gadgets().len() {
        return Err(Error::MalformedCertificate("one decomposition per gadget type is required".into()));
    }
    if cert.segments.len() != cert.steps.len() + 1 {
        return Err(Error::MalformedCertificate("segment count must be step count plus one".into()));
    }
    if target.len() != n || cert.steps.iter().any(|s| s.before.len() != n || s.after.len() != n) {
        return Err(Error::MalformedCertificate("state vector length mismatch".into()));
    }
    let mut cur: Configuration = system.initial_configuration(1)?;
    for (k, segment) in cert.segments.iter().enumerate() {
        for mv in &segment.moves {
            if mv.instance >= n || is_dag_like(system, decomps, mv) {
                return Ok(false);
            }
            match step(system, &cur, mv) {
                Ok(next) => cur = next,
                Err(_) => return Ok(false),
            }
        }
        let Some(s) = cert.steps.get(k) else { break };
        if cur.states != s.before || s.mv.instance >= n || !is_dag_like(system, decomps, &s.mv) {
            return Ok(false);
        }
        match step(system, &cur, &s.mv) {
            Ok(next) if next.states == s.after => cur = next,
            _ => return Ok(false),
        }
    }
    Ok(cur.states == target)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::labeled_ttsu;
    use crate::classify::npredag_decomposition;
    use crate::solve::{oracle_solve, Objective};
    use crate::system::SystemBuilder;

    fn setup() -> (System, Vec<Decomposition>, Vec<usize>, MovePath) {
        let g = labeled_ttsu();
        let mut b = SystemBuilder::new();
        let s = b.node();
        let x = b.add_instance(&g, 0);
        let y = b.add_instance(&g, 0);
        b.attach(x, 0, s);
        let mid = b.node_of(x, 1);
        b.attach(y, 0, mid);
        b.set_start(s);
        let sys = b.build().unwrap().0;
        let d = vec![npredag_decomposition(&g, |_| true).unwrap()];
        let target = vec![1, 1];
        let w = oracle_solve(&sys, &Objective::reconfigure(&target), 1, 1000).unwrap().witness.unwrap();
        (sys, d, target, w)
    }

    #[test]
    fn round_trip() {
        let (sys, d, target, w) = setup();
        let cert = extract_certificate(&sys, &d, &w).unwrap();
        assert_eq!(cert.steps.len(), 2);
        assert!(verify_npredag_certificate(&sys, &d, &cert, &target).unwrap());
    }

    #[test]
    fn mismatched_vectors() {
        let (sys, d, target, w) = setup();
        let mut cert = extract_certificate(&sys, &d, &w).unwrap();
        cert.steps[0].after = vec![2, 0];
        assert!(!verify_npredag_certificate(&sys, &d, &cert, &target).unwrap());
    }

    #[test]
    fn segment_with_dag_like_move() {
        let (sys, d, target, w) = setup();
        let mut cert = extract_certificate(&sys, &d, &w).unwrap();
        // Fold the first step into the preceding segment.
        let first = cert.steps.remove(0);
        cert.segments[0].moves.push(first.mv);
        let tail = cert.segments.remove(1);
        cert.segments[0].moves.extend(tail.moves);
        assert!(!verify_npredag_certificate(&sys, &d, &cert, &target).unwrap());
        cert.segments.pop();
        assert!(matches!(
            verify_npredag_certificate(&sys, &d, &cert, &target),
            Err(Error::MalformedCertificate(_))
        ));
    }
}
