//! Solves one instance file and prints the rounding trace and the final
//! point. Defaults to the bundled four-cycle.
//!
//! ```text
//! cargo run --example solve_instance -- data/cyclic_triangle.txt
//! ```

use strong_roommates::algorithm::{run, Status};
use strong_roommates::instance::parse_instance;

fn main() {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/data/four_cycle.txt").to_string());
    let text = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {}", path, e));
    let inst = parse_instance(&text).expect("valid instance");
    let out = run(&inst).expect("solver error");

    for line in out.trace.lines(&inst) {
        println!("{}", line);
    }
    for line in &out.cut_log {
        println!("{}", line);
    }
    match &out.status {
        Status::Yes(m) => println!("strongly stable matching: {}", m.display(&inst)),
        Status::No { witness } => println!("none: x({}) is fractional at every optimum", inst.edge_name(*witness)),
        Status::PolytopeEmpty => println!("none: the polytope is empty"),
    }
    if let Some(z) = out.final_point() {
        for e in inst.edges() {
            println!("  x({}) = {}", inst.edge_name(e), z.get(e));
        }
    }
}
