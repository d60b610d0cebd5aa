//! Solves every preference profile on four agents and compares each answer
//! with brute force.

use std::time::Instant;

use strong_roommates::algorithm::run;
use strong_roommates::oracle::{brute_force_exists, enumerate_instances};
use strong_roommates::verify::strongly_stable;

fn main() {
    let start = Instant::now();
    let family = enumerate_instances(4).expect("n = 4 is enumerable");
    let total = family.len();
    let (mut yes, mut rounds, mut mismatches) = (0usize, 0usize, 0usize);
    for (i, inst) in family.enumerate() {
        let out = run(&inst).expect("solver error");
        let truth = brute_force_exists(&inst).expect("small instance");
        if let Some(m) = out.matching() {
            assert_eq!(strongly_stable(&inst, m).unwrap(), None, "instance {}", i);
        }
        if out.exists() != truth.is_some() {
            mismatches += 1;
            eprintln!("mismatch at #{}:\n{}", i, inst);
        }
        yes += out.exists() as usize;
        rounds = rounds.max(out.iterations());
    }
    println!("instances: {}", total);
    println!("with a strongly stable matching: {}", yes);
    println!("most rounds: {}", rounds);
    println!("mismatches: {}", mismatches);
    println!("elapsed: {:.1?}", start.elapsed());
}
