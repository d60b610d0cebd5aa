//! Separation for the odd-set constraints `x(E⟨X⟩) ≤ ⌊|X|/2⌋`.
//!
//! Two independent oracles: brute-force enumeration of odd subsets, and the
//! Padberg–Rao minimum odd cut computed on a Gomory–Hu tree.

use thiserror::Error;

use super::flow::{gomory_hu_tree, FlowNetwork};
use super::{EdgeVector, OddSetCut};
use crate::instance::{Instance, VertexId};
use crate::rational::Rat;

pub const DEFAULT_EXHAUSTIVE_CAP: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeparationError {
    #[error("{vertices} vertices exceeds the exhaustive separation cap of {cap}")]
    TooLarge { vertices: usize, cap: usize },
    #[error("degree constraint violated at vertex {0}")]
    DegreeConstraintViolated(String),
    #[error("negative value on edge {0}")]
    NegativeValue(String),
    #[error("point has {got} entries, instance has {expected} edges")]
    WrongLength { expected: usize, got: usize },
}

fn check_length(inst: &Instance, x: &EdgeVector) -> Result<(), SeparationError> {
    if x.len() != inst.num_edges() {
        return Err(SeparationError::WrongLength { expected: inst.num_edges(), got: x.len() });
    }
    Ok(())
}

pub fn separate_exhaustive(inst: &Instance, x: &EdgeVector) -> Result<Option<OddSetCut>, SeparationError> {
    separate_exhaustive_with_cap(inst, x, DEFAULT_EXHAUSTIVE_CAP)
}

/// Most violated odd set by enumeration; ties go to the lexicographically
/// smallest sorted vertex-id sequence.
pub fn separate_exhaustive_with_cap(
    inst: &Instance,
    x: &EdgeVector,
    cap: usize,
) -> Result<Option<OddSetCut>, SeparationError> {
    check_length(inst, x)?;
    let n = inst.num_vertices();
    if n > cap || n >= 64 {
        return Err(SeparationError::TooLarge { vertices: n, cap });
    }
    let weighted: Vec<(u64, &Rat)> = inst
        .edges()
        .filter(|&e| !x.get(e).is_zero())
        .map(|e| {
            let [u, v] = inst.endpoints(e);
            ((1u64 << u.0) | (1u64 << v.0), x.get(e))
        })
        .collect();

    let ids = |mask: u64| -> Vec<usize> { (0..n).filter(|&i| mask >> i & 1 == 1).collect() };
    let mut best: Option<(Rat, u64)> = None;
    for mask in 0u64..(1u64 << n) {
        let size = mask.count_ones() as usize;
        if size < 3 || size.is_multiple_of(2) {
            continue;
        }
        let lhs: Rat = weighted.iter().filter(|(m, _)| mask & m == *m).map(|(_, w)| *w).sum();
        let excess = lhs - Rat::from_integer((size / 2) as i64);
        if !excess.is_positive() {
            continue;
        }
        let better = match &best {
            None => true,
            Some((b, bm)) => excess > *b || (excess == *b && ids(mask) < ids(*bm)),
        };
        if better {
            best = Some((excess, mask));
        }
    }
    Ok(best.map(|(_, mask)| OddSetCut { vertices: ids(mask).into_iter().map(VertexId).collect() }))
}

/// Padberg–Rao separation.
///
/// On `V ∪ {r}` put capacity `x(e)` on every edge and the slack
/// `1 − x(E(v))` on `(v, r)`. For `X ⊆ V` the cut `δ(X)` then has capacity
/// `|X| − 2·x(E⟨X⟩)`, so an odd `X` is violated iff its cut is below one.
/// With `T = V` (or `V ∪ {r}` when `|V|` is odd) the minimum `T`-odd cut is a
/// fundamental cut of the Gomory–Hu tree. Requires `x ≥ 0` and `x(E(v)) ≤ 1`.
pub fn separate_padberg_rao(inst: &Instance, x: &EdgeVector) -> Result<Option<OddSetCut>, SeparationError> {
    check_length(inst, x)?;
    let n = inst.num_vertices();
    if let Some(e) = inst.edges().find(|&e| x.get(e).is_negative()) {
        return Err(SeparationError::NegativeValue(inst.edge_name(e)));
    }
    let root = n;
    let mut net = FlowNetwork::new(n + 1);
    for e in inst.edges() {
        let [u, v] = inst.endpoints(e);
        net.add_capacity(u.0, v.0, x.get(e));
    }
    for v in inst.vertices() {
        let slack = Rat::one() - x.degree(inst, v);
        if slack.is_negative() {
            return Err(SeparationError::DegreeConstraintViolated(inst.name(v).to_string()));
        }
        net.add_capacity(v.0, root, &slack);
    }
    if n < 3 {
        return Ok(None);
    }

    let in_t = |node: usize| node < n || n % 2 == 1;
    let tree = gomory_hu_tree(&net);
    let mut best: Option<(&Rat, usize)> = None;
    for (child, _, weight) in tree.edges() {
        if weight >= &Rat::one() {
            continue;
        }
        if best.is_some_and(|(b, _)| b <= weight) {
            continue;
        }
        let side = tree.fundamental_side(child);
        let odd = (0..=n).filter(|&u| side[u] && in_t(u)).count() % 2 == 1;
        if odd {
            best = Some((weight, child));
        }
    }
    let Some((weight, child)) = best else {
        return Ok(None);
    };
    let side = tree.fundamental_side(child);
    let keep = !side[root];
    let members: Vec<VertexId> = (0..n).filter(|&u| side[u] == keep).map(VertexId).collect();
    // A single vertex cuts exactly 1, so a cut below one spans at least 3.
    debug_assert!(members.len() >= 3 && members.len() % 2 == 1);
    let cut = OddSetCut { vertices: members };
    debug_assert_eq!(Rat::from_integer(cut.vertices.len() as i64) - Rat::from_integer(2) * cut.lhs(inst, x), *weight);
    Ok(Some(cut))
}
