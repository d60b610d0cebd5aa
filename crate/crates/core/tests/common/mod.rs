#![allow(dead_code)]

use strong_roommates::instance::{parse_instance, EdgeId, Instance, RelationMode, VertexId};
use strong_roommates::polytope::EdgeVector;
use strong_roommates::rational::Rat;

pub const SINGLE_EDGE: &str = "agents: a b\nprefs a: b\nprefs b: a";
pub const PATH_TIE: &str = "agents: a b c\nprefs a: b\nprefs b: (a c)\nprefs c: b";
pub const STRICT_PATH: &str = "agents: a b c\nprefs a: b\nprefs b: a c\nprefs c: b";
pub const CYCLIC_TRIANGLE: &str = "agents: a b c\nprefs a: b c\nprefs b: c a\nprefs c: a b";
pub const FOUR_CYCLE: &str = "agents: a b c d\nprefs a: b d\nprefs b: a c\nprefs c: d b\nprefs d: c a";

pub fn inst(text: &str) -> Instance {
    parse_instance(text).unwrap()
}

fn rel(inst: &Instance, v: VertexId, e: EdgeId, mode: RelationMode) -> Vec<EdgeId> {
    inst.relation_set(v, e, mode).unwrap()
}

/// Checks the three equalities every support edge `e` of one point imposes
/// on another point `x`: tight degrees at both ends, tight stability rows at
/// both ends, and equal tie mass at both ends.
pub fn self_dual_failure(inst: &Instance, x: &EdgeVector, e: EdgeId) -> Option<String> {
    let [v, w] = inst.endpoints(e);
    for u in [v, w] {
        if !x.degree(inst, u).is_one() {
            return Some(format!("S1 fails at {} for {}", inst.name(u), inst.edge_name(e)));
        }
    }
    let above = |u| x.sum(&rel(inst, u, e, RelationMode::StrictAbove));
    let tied = |u| x.sum(&rel(inst, u, e, RelationMode::Equal));
    for u in [v, w] {
        let lhs = tied(u) + above(v) + above(w);
        if !lhs.is_one() {
            return Some(format!("S2 fails at {} for {}: {}", inst.name(u), inst.edge_name(e), lhs));
        }
    }
    if tied(v) != tied(w) {
        return Some(format!("S3 fails for {}", inst.edge_name(e)));
    }
    None
}

fn held(inst: &Instance, x: &EdgeVector, v: VertexId) -> Vec<usize> {
    inst.incident_edges(v).iter().filter(|&&f| x.get(f).is_positive()).map(|&f| inst.rank(v, f).unwrap()).collect()
}

/// The four equivalences linking the two ends of an edge `e` that lies in
/// the support of some point of the polytope, evaluated at the point `x`.
pub fn endpoint_symmetry_failure(inst: &Instance, x: &EdgeVector, e: EdgeId) -> Option<String> {
    let [a, b] = inst.endpoints(e);
    for (v, w) in [(a, b), (b, a)] {
        let (hv, hw) = (held(inst, x, v), held(inst, x, w));
        if hv.is_empty() || hw.is_empty() {
            return Some(format!("{} has an inactive endpoint", inst.edge_name(e)));
        }
        let (rv, rw) = (inst.rank(v, e).unwrap(), inst.rank(w, e).unwrap());
        let worst_v = *hv.iter().max().unwrap();
        let best_w = *hw.iter().min().unwrap();
        let flat = |h: &[usize]| h.iter().min() == h.iter().max();
        let checks = [
            ("A1", worst_v < rv, rw < best_w),
            ("A2", worst_v == rv, best_w == rw),
            ("A3", flat(&hv) && hv[0] == rv, flat(&hw) && hw[0] == rw),
            ("A4", x.get(e).is_positive() && worst_v == rv, x.get(e).is_positive() && best_w == rw),
        ];
        for (name, left, right) in checks {
            if left != right {
                return Some(format!("{} fails for {} at {}", name, inst.edge_name(e), inst.name(v)));
            }
        }
    }
    None
}

pub fn half() -> Rat {
    Rat::new(1, 2)
}
