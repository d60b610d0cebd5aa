//! The exact simplex on a small LP whose optimum is not integral.

use strong_roommates::lp::{solve_lp, verify_solution, LinearProgram, LpOutcome, Relation, Sense};
use strong_roommates::rational::Rat;

fn main() {
    // max x + y  s.t.  2x + y ≤ 2,  x + 3y ≤ 3,  x, y ≥ 0.
    let mut lp = LinearProgram::new(2, Sense::Maximize);
    lp.add_row(vec![(0, Rat::from(2)), (1, Rat::one())], Relation::Le, Rat::from(2)).add_row(
        vec![(0, Rat::one()), (1, Rat::from(3))],
        Relation::Le,
        Rat::from(3),
    );
    lp.objective = vec![(0, Rat::one()), (1, Rat::one())];

    match solve_lp(&lp).expect("within the pivot budget") {
        LpOutcome::Optimal { point, value } => {
            println!("x = {}, y = {}, value = {}", point[0], point[1], value);
            assert_eq!(verify_solution(&lp, &point), None);
        }
        other => println!("{:?}", other),
    }

    lp.add_row(vec![(0, Rat::one()), (1, Rat::one())], Relation::Ge, Rat::from(3));
    println!("with x + y ≥ 3: {:?}", solve_lp(&lp).expect("within the pivot budget"));
}
