//! Definitional checks for matchings and strong stability. No LP machinery.

use thiserror::Error;

use crate::instance::{EdgeId, Instance, Matching};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VerifyError {
    #[error("edge id {0} is not an edge of the instance")]
    UnknownEdge(usize),
    #[error("edge {0} is in the matching")]
    EdgeInMatching(String),
    #[error("edges {0} and {1} share a vertex")]
    NotAMatching(String, String),
}

/// True iff the edges are pairwise vertex-disjoint.
pub fn is_matching(inst: &Instance, edges: &[EdgeId]) -> Result<bool, VerifyError> {
    Ok(conflict(inst, edges)?.is_none())
}

fn conflict(inst: &Instance, edges: &[EdgeId]) -> Result<Option<(EdgeId, EdgeId)>, VerifyError> {
    let mut owner: Vec<Option<EdgeId>> = vec![None; inst.num_vertices()];
    for &e in edges {
        if e.0 >= inst.num_edges() {
            return Err(VerifyError::UnknownEdge(e.0));
        }
        for v in inst.endpoints(e) {
            match owner[v.0] {
                Some(f) if f != e => return Ok(Some((f, e))),
                _ => owner[v.0] = Some(e),
            }
        }
    }
    Ok(None)
}

/// How an edge outside the matching relates to each endpoint's current edge.
/// Arrays are indexed like [`Instance::endpoints`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockReport {
    pub weak_on: [bool; 2],
    pub strong_on: [bool; 2],
    pub blocks: bool,
}

/// Evaluates the blocking definition for `e ∉ μ`. Being unmatched ranks below
/// every incident edge.
pub fn blocks(inst: &Instance, matching: &Matching, e: EdgeId) -> Result<BlockReport, VerifyError> {
    if e.0 >= inst.num_edges() {
        return Err(VerifyError::UnknownEdge(e.0));
    }
    if matching.contains(e) {
        return Err(VerifyError::EdgeInMatching(inst.edge_name(e)));
    }
    let mates = matching.mates(inst);
    Ok(block_report(inst, &mates, e))
}

fn block_report(inst: &Instance, mates: &[Option<EdgeId>], e: EdgeId) -> BlockReport {
    let mut weak_on = [false; 2];
    let mut strong_on = [false; 2];
    for (i, v) in inst.endpoints(e).into_iter().enumerate() {
        let here = inst.rank_at(v, e);
        match mates[v.0] {
            None => {
                weak_on[i] = true;
                strong_on[i] = true;
            }
            Some(m) => {
                let current = inst.rank_at(v, m);
                weak_on[i] = here <= current;
                strong_on[i] = here < current;
            }
        }
    }
    let blocks = weak_on[0] && weak_on[1] && (strong_on[0] || strong_on[1]);
    BlockReport { weak_on, strong_on, blocks }
}

/// `None` iff `μ` is strongly stable; otherwise the lowest-id blocking edge.
pub fn strongly_stable(inst: &Instance, matching: &Matching) -> Result<Option<EdgeId>, VerifyError> {
    if let Some((f, e)) = conflict(inst, matching.edges())? {
        return Err(VerifyError::NotAMatching(inst.edge_name(f), inst.edge_name(e)));
    }
    let mates = matching.mates(inst);
    Ok(inst.edges().filter(|&e| !matching.contains(e)).find(|&e| block_report(inst, &mates, e).blocks))
}

/// Classical stability: `None` iff no edge outside `μ`
/// is strictly preferred by both endpoints. For strict preferences this is
/// the same notion as strong stability.
pub fn classically_stable(inst: &Instance, matching: &Matching) -> Result<Option<EdgeId>, VerifyError> {
    if let Some((f, e)) = conflict(inst, matching.edges())? {
        return Err(VerifyError::NotAMatching(inst.edge_name(f), inst.edge_name(e)));
    }
    let mates = matching.mates(inst);
    Ok(inst
        .edges()
        .filter(|&e| !matching.contains(e))
        .find(|&e| block_report(inst, &mates, e).strong_on == [true, true]))
}
