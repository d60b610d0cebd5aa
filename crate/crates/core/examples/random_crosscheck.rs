//! Compares the solver with brute force on seeded random instances.
//!
//! Usage: `random_crosscheck [n] [count] [tie_prob]`, defaults `8 100 1/3`.

use std::time::Instant;

use strong_roommates::algorithm::run;
use strong_roommates::generator::random_instance;
use strong_roommates::oracle::{brute_force_exists_with, OracleConfig};
use strong_roommates::rational::Rat;

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let n: usize = args.first().map_or(8, |s| s.parse().expect("n"));
    let count: u64 = args.get(1).map_or(100, |s| s.parse().expect("count"));
    let tie: Rat = args.get(2).map_or(Rat::new(1, 3), |s| s.parse().expect("tie probability"));
    let oracle = OracleConfig { max_edges: n * (n - 1) / 2 };

    let start = Instant::now();
    let (mut agree, mut yes, mut rounds) = (0, 0, 0);
    for seed in 0..count {
        let inst = random_instance(n, &Rat::new(1, 2), &tie, seed).expect("valid parameters");
        let out = run(&inst).expect("solver error");
        let truth = brute_force_exists_with(&inst, &oracle).expect("within cap");
        if out.exists() == truth.is_some() {
            agree += 1;
        } else {
            println!("disagreement at seed {}:\n{}", seed, inst);
        }
        yes += out.exists() as usize;
        rounds = rounds.max(out.iterations());
    }
    println!("n={} count={} tie={}", n, count, tie);
    println!("agreement: {}/{}", agree, count);
    println!("yes answers: {}", yes);
    println!("most rounds: {}", rounds);
    println!("elapsed: {:.1?}", start.elapsed());
}
