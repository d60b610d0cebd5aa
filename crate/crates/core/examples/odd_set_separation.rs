//! Finds a violated odd-set inequality for a fractional point on two
//! disjoint triangles, and prints the cut tree the search runs on.

use strong_roommates::instance::{parse_instance, VertexId};
use strong_roommates::polytope::flow::{gomory_hu_tree, FlowNetwork};
use strong_roommates::polytope::{separate_exhaustive, separate_padberg_rao, EdgeVector};
use strong_roommates::rational::Rat;

const TWO_TRIANGLES: &str = "agents: a b c d e f
prefs a: b c
prefs b: c a
prefs c: a b
prefs d: e f
prefs e: f d
prefs f: d e
";

fn main() {
    let inst = parse_instance(TWO_TRIANGLES).expect("valid instance");
    // Half on the first triangle, a third on the second.
    let x = EdgeVector::from_values(
        inst.edges().map(|e| if inst.endpoints(e)[0].0 < 3 { Rat::new(1, 2) } else { Rat::new(1, 3) }).collect(),
    );

    let mut net = FlowNetwork::new(inst.num_vertices());
    for e in inst.edges() {
        let [u, v] = inst.endpoints(e);
        net.add_capacity(u.0, v.0, x.get(e));
    }
    let tree = gomory_hu_tree(&net);
    for (u, v, w) in tree.edges() {
        println!("cut tree: {} - {} weight {}", inst.name(VertexId(u)), inst.name(VertexId(v)), w);
    }

    for (name, cut) in [
        ("padberg-rao", separate_padberg_rao(&inst, &x).unwrap()),
        ("exhaustive", separate_exhaustive(&inst, &x).unwrap()),
    ] {
        match cut {
            Some(cut) => println!("{}: {} has x = {} > {}", name, cut.display(&inst), cut.lhs(&inst, &x), cut.rhs()),
            None => println!("{}: no violated odd set", name),
        }
    }
}
