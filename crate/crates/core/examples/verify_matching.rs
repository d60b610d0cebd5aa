//! Checks candidate matchings for blocking edges, with and without ties.

use strong_roommates::instance::{parse_instance, Matching};
use strong_roommates::verify::{classically_stable, strongly_stable};

const PATH_TIE: &str = "agents: a b c\nprefs a: b\nprefs b: (a c)\nprefs c: b\n";
const FOUR_CYCLE: &str = "agents: a b c d\nprefs a: b d\nprefs b: a c\nprefs c: d b\nprefs d: c a\n";

fn report(text: &str, pairs: &str) {
    let inst = parse_instance(text).expect("valid instance");
    let m = Matching::parse(&inst, pairs).expect("valid matching");
    let strong = strongly_stable(&inst, &m).expect("edges of this instance");
    let classical = classically_stable(&inst, &m).expect("edges of this instance");
    let name = |b: Option<_>| b.map_or("none".to_string(), |e| inst.edge_name(e));
    println!("{:<10} strong blocker: {:<5} classical blocker: {}", pairs, name(strong), name(classical));
}

fn main() {
    // b is indifferent, so c weakly blocks {a-b}: only the classical notion
    // accepts it.
    report(PATH_TIE, "a-b");
    report(PATH_TIE, "b-c");
    report(FOUR_CYCLE, "a-b c-d");
    report(FOUR_CYCLE, "a-d b-c");
}
